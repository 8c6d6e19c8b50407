//! Exact arithmetic on integer powers of `r = (q + p) / q`.
//!
//! Every decision is exact. Comparisons first try a floating-point estimate
//! and only fall back to big-integer arithmetic when the two sides are within
//! the accumulated rounding error of each other.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// `None` stands for the exact value 0; `Some(k)` for `r^k`.
pub type Exponent = Option<u32>;

pub(crate) struct Powers {
    q: BigUint,
    qp: BigUint,
    r: f64,
    ln_r: f64,
    float: RefCell<Vec<f64>>,
    exact: RefCell<HashMap<u32, (BigUint, BigUint)>>,
}

fn to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Natural log of a positive integer, also for values beyond `f64` range.
fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        to_f64(x).ln()
    } else {
        let shift = bits - 64;
        to_f64(&(x >> shift)).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

impl Powers {
    /// Powers of `1 + p/q`; `p, q ≥ 1`.
    pub(crate) fn new(p: &BigUint, q: &BigUint) -> Self {
        let ratio = to_f64(p) / to_f64(q);
        Powers {
            q: q.clone(),
            qp: q + p,
            r: 1.0 + ratio,
            ln_r: ratio.ln_1p(),
            float: RefCell::new(vec![1.0]),
            exact: RefCell::new(HashMap::new()),
        }
    }

    fn float(&self, k: u32) -> f64 {
        let mut t = self.float.borrow_mut();
        while t.len() <= k as usize {
            let last = *t.last().unwrap();
            t.push(last * self.r);
        }
        t[k as usize]
    }

    /// `((q+p)^k, q^k)`.
    fn exact(&self, k: u32) -> (BigUint, BigUint) {
        if let Some(v) = self.exact.borrow().get(&k) {
            return v.clone();
        }
        let v = (self.qp.pow(k), self.q.pow(k));
        self.exact.borrow_mut().insert(k, v.clone());
        v
    }

    fn tolerance(k: u32) -> f64 {
        (4.0 * k as f64 + 16.0) * f64::EPSILON
    }

    /// `Σ r^e + c` as a common-denominator fraction over `q^top`.
    fn exact_sum(&self, terms: &[u32], c: &BigUint, top: u32) -> BigUint {
        let (_, qtop) = self.exact(top);
        let mut num = c * &qtop;
        for &e in terms {
            let (a, _) = self.exact(e);
            let (_, b) = self.exact(top - e);
            num += a * b;
        }
        num
    }

    /// `r^k ≥ Σ r^e + c`.
    fn power_covers(&self, k: u32, terms: &[u32], c: &BigUint) -> bool {
        if terms.iter().any(|&e| e > k) {
            return false;
        }
        let top = k;
        let lhs_f = self.float(k);
        let rhs_f: f64 = terms.iter().map(|&e| self.float(e)).sum::<f64>() + to_f64(c);
        if lhs_f.is_finite() && rhs_f.is_finite() {
            let tol = Self::tolerance(top);
            if lhs_f > rhs_f * (1.0 + tol) {
                return true;
            }
            if lhs_f < rhs_f * (1.0 - tol) {
                return false;
            }
        }
        let (a, _) = self.exact(k);
        a >= self.exact_sum(terms, c, top)
    }

    /// Least exponent whose power is at least `Σ r^e + c`; `None` when the sum
    /// is 0.
    pub(crate) fn round_up(&self, terms: &[u32], c: &BigUint) -> Exponent {
        if terms.is_empty() && c.is_zero() {
            return None;
        }
        let floor = terms.iter().copied().max().unwrap_or(0);
        let est_f: f64 = terms.iter().map(|&e| self.float(e)).sum::<f64>() + to_f64(c);
        let ln_y = if est_f.is_finite() {
            est_f.ln()
        } else {
            let top = terms
                .iter()
                .map(|&e| e as f64 * self.ln_r)
                .fold(0.0, f64::max);
            top.max(ln_big(c)) + (terms.len() as f64 + 1.0).ln()
        };
        let guess = (ln_y / self.ln_r).ceil();
        let mut k = if guess.is_finite() && guess > 0.0 {
            (guess.min(u32::MAX as f64 - 1.0) as u32).max(floor)
        } else {
            floor
        };
        while !self.power_covers(k, terms, c) {
            k += 1;
        }
        while k > floor && self.power_covers(k - 1, terms, c) {
            k -= 1;
        }
        Some(k)
    }

    /// `α · (r^x + c) > β`.
    pub(crate) fn scaled_exceeds(
        &self,
        alpha: &BigUint,
        x: Exponent,
        c: &BigUint,
        beta: &BigUint,
    ) -> bool {
        let Some(x) = x else {
            return alpha * c > *beta;
        };
        let lhs_f = to_f64(alpha) * (self.float(x) + to_f64(c));
        let rhs_f = to_f64(beta);
        if lhs_f.is_finite() && rhs_f.is_finite() {
            let tol = Self::tolerance(x);
            if lhs_f > rhs_f * (1.0 + tol) {
                return true;
            }
            if lhs_f < rhs_f * (1.0 - tol) {
                return false;
            }
        }
        let (a, b) = self.exact(x);
        alpha * (a + c * &b) > beta * b
    }

    /// The exact rational `r^k` as `(numerator, denominator)`.
    #[cfg(test)]
    fn value(&self, k: u32) -> (BigUint, BigUint) {
        self.exact(k)
    }
}
