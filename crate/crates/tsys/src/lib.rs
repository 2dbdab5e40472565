//! Exact symbolic solver for the A_r T-system (octahedron recurrence
//! T_{a,j,k+1} T_{a,j,k-1} = T_{a,j+1,k} T_{a,j-1,k} + T_{a+1,j,k} T_{a-1,j,k}
//! with frozen layers T_0 = T_{r+1} = 1) under arbitrary stepped-surface
//! initial data.
//!
//! Values of T are computed as exact Laurent polynomials of the boundary
//! labels by several independent routes (slice transfer matrices, a
//! determinant reduction to the first layer, the raw recursion, and
//! non-intersecting path enumeration) which are cross-checked against each
//! other and against small-rank closed forms.

pub mod boundary;
pub mod laurent;
pub mod matrix;
pub mod oracles;
pub mod qsystem;
pub mod slicenet;
pub mod solver;

pub use boundary::{Boundary, MotzkinPath, MutationDirection, SixVertexView, SquareType};
pub use laurent::{LaurentError, LaurentPoly, Monomial, VarId};
pub use matrix::PolyMatrix;
pub use oracles::{Letter, OracleError, StaircaseWord};
pub use slicenet::{Diagonal, ElementaryFactor, FactorKind, Network, SliceMatrix};
pub use solver::{BoundarySolver, Point, Projection, SolveError, VerifyReport};


