use std::fmt;

use serde::{Serialize, Serializer};

use crate::linalg::{self, Mat4};
use crate::scalar::Real;

/// Nilpotency index of a 4×4 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Nilpotency {
    /// The matrix itself vanishes.
    Zero,
    /// Smallest `k` with `M^k = 0`.
    Step(u8),
    NotNilpotent,
}

impl Nilpotency {
    /// Index as used in reports: `0` for the zero matrix.
    pub fn index(self) -> Option<u8> {
        match self {
            Nilpotency::Zero => Some(0),
            Nilpotency::Step(k) => Some(k),
            Nilpotency::NotNilpotent => None,
        }
    }
}

impl fmt::Display for Nilpotency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index() {
            Some(k) => write!(f, "{k}"),
            None => f.write_str("not-nilpotent"),
        }
    }
}

impl Serialize for Nilpotency {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.index() {
            Some(k) => s.serialize_u8(k),
            None => s.serialize_str("not-nilpotent"),
        }
    }
}

/// Smallest `k ≤ 4` with `‖M^k‖ < tol (‖M‖^k + tol)` (Frobenius norms).
pub fn nilpotency_index<T: Real>(m: &Mat4<T>, tol: T) -> Nilpotency {
    let n = linalg::norm(m);
    if n < tol {
        return Nilpotency::Zero;
    }
    let mut power = *m;
    let mut nk = n;
    for k in 1..=4u8 {
        if linalg::norm(&power) < tol * (nk + tol) {
            return Nilpotency::Step(k);
        }
        power = linalg::mul(&power, m);
        nk *= n;
    }
    Nilpotency::NotNilpotent
}
