//! Exact accumulators for the dynamic programs.
//!
//! Weights are stored as `BigUint`. The solvers pick `u64` or `u128` whenever four
//! times the total edge weight fits, which covers every realistic instance and keeps the
//! tables allocation-free; otherwise they fall back to `BigUint`. Both paths
//! are exact.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

pub trait Accum: Clone + Ord + Eq + Hash + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_big(w: &BigUint) -> Self;
    fn to_big(&self) -> BigUint;
    fn add(&self, other: &Self) -> Self;
    fn add_assign(&mut self, other: &Self);
    /// `other` must not exceed `self`.
    fn sub(&self, other: &Self) -> Self;
    fn double(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Accum for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_big(w: &BigUint) -> Self {
        w.to_u128()
            .expect("weight exceeds u128; caller must select BigUint")
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn double(&self) -> Self {
        self << 1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
}

impl Accum for u64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_big(w: &BigUint) -> Self {
        w.to_u64()
            .expect("weight exceeds u64; caller must select BigUint")
    }
    fn to_big(&self) -> BigUint {
        BigUint::from(*self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn double(&self) -> Self {
        self << 1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
}

impl Accum for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_big(w: &BigUint) -> Self {
        w.clone()
    }
    fn to_big(&self) -> BigUint {
        self.clone()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn double(&self) -> Self {
        self << 1u32
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// True when every value up to `4 * bound` fits in a `u64`.
pub(crate) fn fits_u64(bound: &BigUint) -> bool {
    bound.bits() <= 61
}

/// True when every value up to `4 * bound` fits in a `u128`.
pub(crate) fn fits_u128(bound: &BigUint) -> bool {
    bound.bits() <= 125
}
