pub mod expr;
pub mod grid;
pub mod fourier;
pub mod gelfand;
pub mod winding;
pub mod approx;
pub mod zpoly;
pub mod bezout;
pub mod peaks;
pub mod stable_rank;
