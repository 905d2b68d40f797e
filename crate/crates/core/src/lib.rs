//! First-order rigidity of crystallographic bar-joint frameworks.
//!
//! The crate builds the transfer function of a periodic framework, computes
//! its RUM and geometric flex spectra, constructs factor-periodic /
//! flexible-lattice / polynomially weighted geometric flexes, and renders
//! rank-extremality rigidity verdicts.

pub mod elimination;
pub mod error;
pub mod flexes;
pub mod framework;
pub mod laurent;
pub mod numeric;
pub mod polymatrix;
pub mod rational;
pub mod spectrum;
pub mod transfer;

pub use error::Error;

/// Map over independent items, in parallel when the `parallel` feature is
/// enabled. Output order always matches input order.
pub fn maybe_par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Always-sequential counterpart of [`maybe_par_map`], kept available for
/// benchmarking the two paths against each other.
pub fn seq_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}
