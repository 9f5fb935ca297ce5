//! Local Artinian Gorenstein algebras with cubic socle degree: Macaulay
//! inverse systems, the structure of their defining ideals, minimal free
//! resolutions of the residue field and Poincaré series, and flat
//! degenerations from split algebras.

pub mod apolarity;
pub mod deformation;
pub mod error;
pub mod field;
pub mod linalg;
pub mod par;
pub mod parser;
pub mod random;
pub mod report;
pub mod resolution;
pub mod ring;
pub mod structure;

pub use error::{Error, Result};
pub use field::{Field, Fp, Rat};
pub use par::Exec;
pub use parser::{parse_poly, print_poly};
pub use ring::{derivative_action, span_to_degree, subspace_equal, Monomial, MonomialIndex, Polynomial, Space, SubspaceBasis};
