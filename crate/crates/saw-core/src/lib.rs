// Reference constants are pinned to 17 significant digits so the intended
// value is documented even where the nearest f64 needs fewer.
#![allow(clippy::excessive_precision)]

//! Exact computation engine for an integrable self-avoiding walk on rhombic
//! tilings of a half-plane strip.
//!
//! The model lives on tilings by rhombi (and, at the boundary of triangular
//! domains, half-rhombi). A face holds one of nine local configurations
//! whose weights ([`weights`]) are sine ratios in the face's tilt angle,
//! chosen so that weighted walk sums satisfy exact local identities. On top
//! of the local data the crate provides
//!
//! * [`tiling`]: concrete domains (rectangles, truncated strips, triangles,
//!   three-rhombus hexagons) with a shared mid-edge addressing scheme,
//! * [`enumerate`]: brute-force weighted enumeration of boundary-to-boundary
//!   walks, partition sums, and a discretely holomorphic observable,
//! * [`transfer`]: a link-pattern transfer matrix that grows strips row by
//!   row and reaches lengths far beyond enumeration,
//! * [`yangbaxter`]: local face-exchange checks and the column-swap
//!   experiments they license,
//! * [`triangle`]: partition sums on triangular domains and the bridge
//!   bounds they control,
//! * [`fugacity`]: partition sums with a boundary-contact fugacity and the
//!   critical-point computations built on them.
//!
//! All floating-point verification routines report residuals against pinned
//! tolerances; nothing is rounded to make an identity look exact.

pub mod angle;
pub mod enumerate;
pub mod error;
pub mod exec;
pub mod fugacity;
pub mod sum;
pub mod tiling;
pub mod transfer;
pub mod triangle;
pub mod weights;
pub mod yangbaxter;

pub use error::{Result, SawError};
