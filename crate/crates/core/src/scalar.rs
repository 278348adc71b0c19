//! Exact scalar types usable as cost-vector components.

use std::fmt::Debug;
use std::hash::Hash;

use num_rational::Ratio;
use num_traits::Zero;

/// A non-negative exact number used for one component of a cost vector.
///
/// Dominance tests need exact comparison, so only integer and rational
/// types implement this trait. Floating point is intentionally absent.
pub trait CostScalar: Copy + Ord + Hash + Debug + Zero + Send + Sync + 'static {
    /// Builds a value from a count of whole fixed-point units.
    fn from_units(units: u64) -> Self;

    /// Lossy conversion used only for reporting.
    fn to_f64(self) -> f64;
}

macro_rules! impl_cost_scalar_int {
    ($($t:ty),*) => {
        $(
            impl CostScalar for $t {
                #[inline]
                fn from_units(units: u64) -> Self {
                    <$t>::try_from(units).expect("cost units overflow scalar type")
                }

                #[inline]
                fn to_f64(self) -> f64 {
                    self as f64
                }
            }
        )*
    };
}

impl_cost_scalar_int!(u32, u64, u128, i64);

macro_rules! impl_cost_scalar_ratio {
    ($($t:ty),*) => {
        $(
            impl CostScalar for Ratio<$t> {
                #[inline]
                fn from_units(units: u64) -> Self {
                    Ratio::from_integer(<$t>::try_from(units).expect("cost units overflow scalar type"))
                }

                #[inline]
                fn to_f64(self) -> f64 {
                    *self.numer() as f64 / *self.denom() as f64
                }
            }
        )*
    };
}

impl_cost_scalar_ratio!(u64, i64);
