//! Exhaustive hypersurface-section censuses over finite fields, zeta-function
//! density predictions, and Bertini-type lifting over `F_q[t]_(t)`.

pub mod caps;
pub mod cli;
pub mod density;
pub mod dvr;
pub mod error;
pub mod field;
pub mod gf;
pub mod homog;
pub mod ideal;
pub mod linalg;
pub mod scheme;
pub mod zeta;

pub use error::{Error, Result};
pub use field::Field;
pub use gf::{make_field, Fe, Gf};
pub use homog::{poly_divides, HomogPoly, ProjPoint};
