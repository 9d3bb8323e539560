//! Laurent friezes from triangulations of punctured disks, annuli and polygons.

pub mod bci;
pub mod expansion;
pub mod frieze;
pub mod laurent;
pub mod surface;
