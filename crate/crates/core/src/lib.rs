//! Computational companion for the density of square-free values of `n^2 + 1`.
//!
//! * [`arith`]: roots of `-1` modulo prime powers, `rho(d)`, square-freeness,
//!   Gaussian integers.
//! * [`counting`]: exact `N(x)`, the windowed Möbius decomposition, the density
//!   constant `c0` and the exponent optimizations.
//! * [`solutions`]: triples `e^2 f = n^2 + 1`, negative Pell equations and the
//!   Gaussian quadruple decomposition.
//! * [`detmethod`]: monomial matrices, exact kernels and auxiliary curves on
//!   short `s`-intervals.
//! * [`lattice`]: the two-dimensional interval lattices and their censuses.
//! * [`cli`]: the `sqfree` command-line front end.

pub mod arith;
pub mod cli;
pub mod counting;
pub mod detmethod;
pub mod lattice;
pub mod solutions;
