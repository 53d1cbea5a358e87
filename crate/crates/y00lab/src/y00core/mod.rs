//! Protocol core: keyed mapping tables, signal constellations, and the
//! encode / invert / decode slot arithmetic.

mod constellation;
mod encode;
mod mapping;

pub use constellation::{Constellation, Scheme};
pub use encode::{bob_decode_slot, encode_frame, encode_slot, invert_slot, Y00Frame};
pub use mapping::MappingTable;
