//! The valued field `K = Q(t^(1/N))` with the `t`-adic valuation, `ν(t) = 1`.
//!
//! Elements are exact rational functions in `u = t^(1/N)`, so the valuation
//! is read off without truncation. Completeness of `K` plays no role in any
//! algorithm here. Ramifying (`u -> u^M`) emulates a dense value group.

mod elem;
mod poly;

pub use elem::FieldElem;
pub use poly::Poly;

use crate::rat::Val;

pub fn val(x: &FieldElem) -> Val {
    x.val()
}

pub fn ramify(x: &FieldElem, m: u32) -> FieldElem {
    x.ramify(m)
}
