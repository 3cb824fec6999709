//! Truncated Taylor jets of order three in the four chart variables.
//!
//! A [`Jet3`] stores the Taylor coefficients `∂^α f / α!` of a function at a
//! point for every multi-index `|α| ≤ 3` over `(u, v, x, y)`, 35 slots in
//! graded-lexicographic order. Arithmetic is truncated Taylor arithmetic, so a
//! coefficient of order `k` in a result depends only on coefficients of order
//! `≤ k` in the operands.
//!
//! [`Jet3::partial`] drops one order: the third-order slots of a derivative are
//! zeroed and carry no information. The geometry layer relies on this and only
//! reads the orders that remain valid after each differentiation.

pub mod fd;

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::LazyLock;

use thiserror::Error;

use crate::scalar::{Point, Real};

/// Number of coefficients in an order-3 jet over four variables.
pub const NCOEF: usize = 35;

/// Highest derivative order carried by a jet.
pub const ORDER: usize = 3;

/// A multi-index `α = (α_u, α_v, α_x, α_y)`.
pub type MultiIndex = [u8; 4];

struct IndexTable {
    alphas: [MultiIndex; NCOEF],
    // 4^4 lookup keyed by exponents, `u8::MAX` for |α| > 3
    lookup: [u8; 256],
    factorial: [f64; NCOEF],
    // (lhs slot, rhs slot, product slot)
    products: Vec<(u8, u8, u8)>,
    // per variable: (result slot, source slot, factor α_i + 1)
    partials: [Vec<(u8, u8, f64)>; 4],
}

fn key(a: &MultiIndex) -> usize {
    (a[0] as usize) | (a[1] as usize) << 2 | (a[2] as usize) << 4 | (a[3] as usize) << 6
}

fn degree(a: &MultiIndex) -> usize {
    a.iter().map(|&e| e as usize).sum()
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

static TABLE: LazyLock<IndexTable> = LazyLock::new(|| {
    let mut alphas = Vec::with_capacity(NCOEF);
    for d in 0..=ORDER as u8 {
        // lex order within a degree, u most significant, larger exponents first
        for a in (0..=d).rev() {
            for b in (0..=d - a).rev() {
                for c in (0..=d - a - b).rev() {
                    alphas.push([a, b, c, d - a - b - c]);
                }
            }
        }
    }
    let alphas: [MultiIndex; NCOEF] = alphas.try_into().expect("35 multi-indices");
    let mut lookup = [u8::MAX; 256];
    for (i, a) in alphas.iter().enumerate() {
        lookup[key(a)] = i as u8;
    }
    let find = |a: &MultiIndex| -> Option<u8> {
        if degree(a) > ORDER {
            None
        } else {
            Some(lookup[key(a)])
        }
    };
    let factorial: [f64; NCOEF] = std::array::from_fn(|i| alphas[i].iter().map(|&e| factorial(e)).product());
    let mut products = Vec::new();
    for (i, a) in alphas.iter().enumerate() {
        for (j, b) in alphas.iter().enumerate() {
            let s = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
            if let Some(k) = find(&s) {
                products.push((i as u8, j as u8, k));
            }
        }
    }
    let partials = std::array::from_fn(|var| {
        let mut out = Vec::new();
        for (k, a) in alphas.iter().enumerate() {
            if degree(a) >= ORDER {
                continue;
            }
            let mut up = *a;
            up[var] += 1;
            let src = find(&up).expect("raised index within order");
            out.push((k as u8, src, f64::from(a[var]) + 1.0));
        }
        out
    });
    IndexTable {
        alphas,
        lookup,
        factorial,
        products,
        partials,
    }
});

/// Slot of a multi-index, or `None` when `|α| > 3`.
pub fn slot(alpha: MultiIndex) -> Option<usize> {
    if degree(&alpha) > ORDER || alpha.iter().any(|&e| e > 3) {
        return None;
    }
    Some(TABLE.lookup[key(&alpha)] as usize)
}

/// Multi-index stored in a slot.
pub fn multi_index(slot: usize) -> MultiIndex {
    TABLE.alphas[slot]
}

/// All multi-indices in slot order.
pub fn multi_indices() -> &'static [MultiIndex; NCOEF] {
    &TABLE.alphas
}

/// Total order `|α|` of a slot.
pub fn slot_order(slot: usize) -> usize {
    degree(&TABLE.alphas[slot])
}

/// Slot of the first-order coefficient for chart variable `var`.
#[inline]
pub fn first_slot(var: usize) -> usize {
    1 + var
}

/// Slot of the mixed second-order coefficient `∂_i ∂_j`.
pub fn second_slot(i: usize, j: usize) -> usize {
    let mut a = [0u8; 4];
    a[i] += 1;
    a[j] += 1;
    slot(a).expect("second order slot")
}

/// Errors raised by jet arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum JetError {
    #[error("division by a jet with zero value")]
    DivisionByZero,
    #[error("{function} undefined at value {value}")]
    Domain { function: &'static str, value: f64 },
}

/// Binary arithmetic operations on jets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

/// Elementary functions that can be composed with a jet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnaryFn {
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
    Powf(f64),
}

impl UnaryFn {
    pub fn name(&self) -> &'static str {
        match self {
            UnaryFn::Exp => "exp",
            UnaryFn::Log => "log",
            UnaryFn::Sin => "sin",
            UnaryFn::Cos => "cos",
            UnaryFn::Sinh => "sinh",
            UnaryFn::Cosh => "cosh",
            UnaryFn::Sqrt => "sqrt",
            UnaryFn::Powf(_) => "pow",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => UnaryFn::Exp,
            "log" => UnaryFn::Log,
            "sin" => UnaryFn::Sin,
            "cos" => UnaryFn::Cos,
            "sinh" => UnaryFn::Sinh,
            "cosh" => UnaryFn::Cosh,
            "sqrt" => UnaryFn::Sqrt,
            _ => return None,
        })
    }
}

/// Order-3 Taylor jet in `(u, v, x, y)`.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet3<T> {
    coeffs: [T; NCOEF],
}

impl<T: Real> Default for Jet3<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> fmt::Debug for Jet3<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c != T::zero() {
                m.entry(&TABLE.alphas[i], c);
            }
        }
        m.finish()
    }
}

impl<T: Real> Jet3<T> {
    pub fn zero() -> Self {
        Self {
            coeffs: [T::zero(); NCOEF],
        }
    }

    pub fn constant(value: T) -> Self {
        let mut j = Self::zero();
        j.coeffs[0] = value;
        j
    }

    /// Coordinate jet for chart variable `var` at value `value`.
    pub fn variable(var: usize, value: T) -> Self {
        let mut j = Self::constant(value);
        j.coeffs[first_slot(var)] = T::one();
        j
    }

    pub fn from_coeffs(coeffs: [T; NCOEF]) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[T; NCOEF] {
        &self.coeffs
    }

    #[inline]
    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    /// Taylor coefficient `∂^α f / α!`; zero for `|α| > 3`.
    pub fn coeff(&self, alpha: MultiIndex) -> T {
        slot(alpha).map_or(T::zero(), |s| self.coeffs[s])
    }

    /// Raw partial derivative `∂^α f`.
    pub fn derivative(&self, alpha: MultiIndex) -> T {
        slot(alpha).map_or(T::zero(), |s| self.coeffs[s] * T::lit(TABLE.factorial[s]))
    }

    /// First derivative along chart variable `var`.
    #[inline]
    pub fn d1(&self, var: usize) -> T {
        self.coeffs[first_slot(var)]
    }

    /// Second derivative `∂_i ∂_j`.
    pub fn d2(&self, i: usize, j: usize) -> T {
        let mut a = [0u8; 4];
        a[i] += 1;
        a[j] += 1;
        self.derivative(a)
    }

    /// Third derivative `∂_i ∂_j ∂_k`.
    pub fn d3(&self, i: usize, j: usize, k: usize) -> T {
        let mut a = [0u8; 4];
        a[i] += 1;
        a[j] += 1;
        a[k] += 1;
        self.derivative(a)
    }

    /// Jet of `∂f/∂(var)`; its third-order slots are zero.
    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for &(k, src, fac) in &TABLE.partials[var] {
            out.coeffs[k as usize] = self.coeffs[src as usize] * T::lit(fac);
        }
        out
    }

    /// Gradient of the value as a plain vector.
    pub fn gradient(&self) -> [T; 4] {
        std::array::from_fn(|i| self.d1(i))
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            coeffs: self.coeffs.map(|c| c * s),
        }
    }

    pub fn add_scalar(&self, s: T) -> Self {
        let mut out = *self;
        out.coeffs[0] += s;
        out
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    fn mul_jet(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for &(i, j, k) in &TABLE.products {
            out.coeffs[k as usize] += self.coeffs[i as usize] * rhs.coeffs[j as usize];
        }
        out
    }

    /// `f(a)` for a univariate `f` with derivatives `derivs = [f, f', f'', f''']`
    /// evaluated at `self.value()`.
    pub fn compose(&self, derivs: [T; 4]) -> Self {
        let mut delta = *self;
        delta.coeffs[0] = T::zero();
        let d2 = delta.mul_jet(&delta);
        let d3 = d2.mul_jet(&delta);
        let half = T::lit(0.5);
        let sixth = T::lit(1.0 / 6.0);
        let mut out = Self::zero();
        for k in 0..NCOEF {
            out.coeffs[k] =
                derivs[1] * delta.coeffs[k] + derivs[2] * half * d2.coeffs[k] + derivs[3] * sixth * d3.coeffs[k];
        }
        out.coeffs[0] = derivs[0];
        out
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        let a = self.value();
        if a == T::zero() || !a.is_finite() {
            return Err(JetError::DivisionByZero);
        }
        let r = a.recip();
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        Ok(self.compose([r, -r * r, two * r * r * r, -six * r * r * r * r]))
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self, JetError> {
        Ok(self.mul_jet(&rhs.recip()?))
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose([e; 4])
    }

    pub fn ln(&self) -> Result<Self, JetError> {
        let a = self.value();
        if !(a > T::zero()) {
            return Err(domain("log", a));
        }
        let r = a.recip();
        Ok(self.compose([a.ln(), r, -r * r, T::lit(2.0) * r * r * r]))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn sinh(&self) -> Self {
        let a = self.value();
        let (s, c) = (a.sinh(), a.cosh());
        self.compose([s, c, s, c])
    }

    pub fn cosh(&self) -> Self {
        let a = self.value();
        let (s, c) = (a.sinh(), a.cosh());
        self.compose([c, s, c, s])
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        let a = self.value();
        if !(a > T::zero()) {
            return Err(domain("sqrt", a));
        }
        let s = a.sqrt();
        let d1 = T::lit(0.5) / s;
        let d2 = -T::lit(0.25) / (a * s);
        let d3 = T::lit(0.375) / (a * a * s);
        Ok(self.compose([s, d1, d2, d3]))
    }

    /// `self^p` for a constant exponent. Non-integer exponents need a positive value.
    pub fn powf(&self, p: f64) -> Result<Self, JetError> {
        let a = self.value();
        let is_int = p.fract() == 0.0 && p.abs() < 1e9;
        if is_int && p >= 0.0 {
            // falling factorial n(n-1)...(n-k+1) a^(n-k), exactly zero once k > n
            let n = p as i64;
            let mut derivs = [T::zero(); 4];
            let mut fall = 1.0;
            for (k, d) in derivs.iter_mut().enumerate() {
                if (k as i64) <= n {
                    *d = T::lit(fall) * a.powi((n - k as i64) as i32);
                }
                fall *= (n - k as i64) as f64;
            }
            return Ok(self.compose(derivs));
        }
        if is_int {
            if a == T::zero() {
                return Err(JetError::DivisionByZero);
            }
        } else if !(a > T::zero()) {
            return Err(domain("pow", a));
        }
        let pt = T::lit(p);
        let one = T::one();
        let two = T::lit(2.0);
        let d0 = a.powf(pt);
        let d1 = pt * a.powf(pt - one);
        let d2 = pt * (pt - one) * a.powf(pt - two);
        let d3 = pt * (pt - one) * (pt - two) * a.powf(pt - T::lit(3.0));
        Ok(self.compose([d0, d1, d2, d3]))
    }

    /// Apply an elementary function.
    pub fn apply(&self, f: UnaryFn) -> Result<Self, JetError> {
        match f {
            UnaryFn::Exp => Ok(self.exp()),
            UnaryFn::Log => self.ln(),
            UnaryFn::Sin => Ok(self.sin()),
            UnaryFn::Cos => Ok(self.cos()),
            UnaryFn::Sinh => Ok(self.sinh()),
            UnaryFn::Cosh => Ok(self.cosh()),
            UnaryFn::Sqrt => self.sqrt(),
            UnaryFn::Powf(p) => self.powf(p),
        }
    }
}

fn domain<T: Real>(function: &'static str, value: T) -> JetError {
    JetError::Domain {
        function,
        value: value.to_f64_lossy(),
    }
}

/// Coordinate jets `u, v, x, y` seeded at `coords`.
pub fn seed_point<T: Real>(coords: &Point<T>) -> [Jet3<T>; 4] {
    std::array::from_fn(|i| Jet3::variable(i, coords[i]))
}

/// Tagged binary arithmetic. `Neg` ignores `b`.
pub fn arith<T: Real>(op: ArithOp, a: &Jet3<T>, b: &Jet3<T>) -> Result<Jet3<T>, JetError> {
    Ok(match op {
        ArithOp::Add => *a + *b,
        ArithOp::Sub => *a - *b,
        ArithOp::Mul => *a * *b,
        ArithOp::Div => a.try_div(b)?,
        ArithOp::Neg => -*a,
    })
}

/// Tagged elementary-function application.
pub fn apply_unary<T: Real>(f: UnaryFn, a: &Jet3<T>) -> Result<Jet3<T>, JetError> {
    a.apply(f)
}

impl<T: Real> Add for Jet3<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<T: Real> AddAssign for Jet3<T> {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a += *b;
        }
    }
}

impl<T: Real> Sub for Jet3<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<T: Real> SubAssign for Jet3<T> {
    fn sub_assign(&mut self, rhs: Self) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a -= *b;
        }
    }
}

impl<T: Real> Neg for Jet3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            coeffs: self.coeffs.map(|c| -c),
        }
    }
}

impl<T: Real> Mul for Jet3<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_jet(&rhs)
    }
}

impl<T: Real> Mul<&Jet3<T>> for &Jet3<T> {
    type Output = Jet3<T>;
    fn mul(self, rhs: &Jet3<T>) -> Jet3<T> {
        self.mul_jet(rhs)
    }
}

impl<T: Real> Mul<T> for Jet3<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        self.scale(rhs)
    }
}

impl<T: Real> Sum for Jet3<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}
