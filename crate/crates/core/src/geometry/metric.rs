use crate::error::EvalError;
use crate::expr::{jet_err, ScalarField};
use crate::jets::Jet3;
use crate::linalg::{self, Mat4};
use crate::scalar::{point_to_f64, Point, Real};

/// Smallest `|det g|` accepted before a metric counts as singular.
pub const SINGULAR_DET: f64 = 1e-12;

pub type JetMatrix<T> = [[Jet3<T>; 4]; 4];

#[derive(Debug, Clone)]
enum Kind<T> {
    PrWave(ScalarField<T>),
    // u,v,x,y ordered upper triangle: uu uv ux uy vv vx vy xx xy yy
    General(Box<[ScalarField<T>; 10]>),
}

/// Lorentzian metric on the `(u, v, x, y)` chart.
#[derive(Debug, Clone)]
pub struct MetricField<T> {
    kind: Kind<T>,
}

fn upper_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows of the upper triangle have lengths 4, 3, 2, 1
    [0, 4, 7, 9][i] + (j - i)
}

/// pr-wave metric `2 du dv + F dv² + dx² + dy²`.
pub fn prwave_metric<T: Real>(f: ScalarField<T>) -> MetricField<T> {
    MetricField { kind: Kind::PrWave(f) }
}

impl<T: Real> MetricField<T> {
    /// General symmetric metric from its upper-triangle components in the order
    /// `uu uv ux uy vv vx vy xx xy yy`.
    pub fn general(components: [ScalarField<T>; 10]) -> Self {
        Self {
            kind: Kind::General(Box::new(components)),
        }
    }

    pub fn is_prwave(&self) -> bool {
        matches!(self.kind, Kind::PrWave(_))
    }

    /// Profile `F` of a pr-wave metric.
    pub fn profile(&self) -> Option<&ScalarField<T>> {
        match &self.kind {
            Kind::PrWave(f) => Some(f),
            Kind::General(_) => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::PrWave(_) => "pr-wave",
            Kind::General(_) => "general",
        }
    }

    /// Metric components as jets.
    pub fn jets_at(&self, p: &Point<T>) -> Result<JetMatrix<T>, EvalError> {
        match &self.kind {
            Kind::PrWave(f) => {
                let mut g = [[Jet3::zero(); 4]; 4];
                let one = Jet3::constant(T::one());
                g[0][1] = one;
                g[1][0] = one;
                g[2][2] = one;
                g[3][3] = one;
                g[1][1] = f.eval(p)?;
                Ok(g)
            }
            Kind::General(c) => {
                let mut g = [[Jet3::zero(); 4]; 4];
                for i in 0..4 {
                    for j in i..4 {
                        let jet = c[upper_index(i, j)].eval(p)?;
                        g[i][j] = jet;
                        g[j][i] = jet;
                    }
                }
                Ok(g)
            }
        }
    }

    /// Metric matrix at a point.
    pub fn matrix_at(&self, p: &Point<T>) -> Result<Mat4<T>, EvalError> {
        let g = self.jets_at(p)?;
        Ok(values(&g))
    }

    /// Metric and inverse metric jets. pr-wave metrics use the closed form
    /// `g^{uu} = -F, g^{uv} = 1, g^{xx} = g^{yy} = 1`.
    pub fn jets_with_inverse(&self, p: &Point<T>) -> Result<(JetMatrix<T>, JetMatrix<T>), EvalError> {
        let g = self.jets_at(p)?;
        let d = linalg::det(&values(&g));
        if !(d.abs() >= T::lit(SINGULAR_DET)) {
            return Err(EvalError::SingularMetric {
                det: d.to_f64_lossy(),
                point: point_to_f64(p),
            });
        }
        let inv = match &self.kind {
            Kind::PrWave(_) => {
                let mut inv = [[Jet3::zero(); 4]; 4];
                let one = Jet3::constant(T::one());
                inv[0][0] = -g[1][1];
                inv[0][1] = one;
                inv[1][0] = one;
                inv[2][2] = one;
                inv[3][3] = one;
                inv
            }
            Kind::General(_) => invert_jets(&g).map_err(|e| jet_err(e, p))?,
        };
        Ok((g, inv))
    }

    /// Inverse metric at a point.
    pub fn inverse_at(&self, p: &Point<T>) -> Result<Mat4<T>, EvalError> {
        Ok(values(&self.jets_with_inverse(p)?.1))
    }
}

pub(crate) fn values<T: Real>(m: &JetMatrix<T>) -> Mat4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].value()))
}

/// Gauss-Jordan inversion in jet arithmetic, pivoting on values.
pub(crate) fn invert_jets<T: Real>(a: &JetMatrix<T>) -> Result<JetMatrix<T>, crate::jets::JetError> {
    let mut m = *a;
    let mut inv = [[Jet3::zero(); 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = Jet3::constant(T::one());
    }
    for c in 0..4 {
        let p = (c..4)
            .max_by(|&i, &j| {
                m[i][c]
                    .value()
                    .abs()
                    .partial_cmp(&m[j][c].value().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        m.swap(p, c);
        inv.swap(p, c);
        let r = m[c][c].recip()?;
        for k in 0..4 {
            m[c][k] = m[c][k] * r;
            inv[c][k] = inv[c][k] * r;
        }
        for row in 0..4 {
            if row != c {
                let f = m[row][c];
                for k in 0..4 {
                    let (mc, ic) = (m[c][k], inv[c][k]);
                    m[row][k] -= f * mc;
                    inv[row][k] -= f * ic;
                }
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{field_from_text, Params};

    fn field(text: &str) -> ScalarField<f64> {
        let params: Params = [("a".to_string(), 2.0), ("b".to_string(), -0.5)].into();
        field_from_text(text, &params).unwrap()
    }

    #[test]
    fn flat_prwave_is_lightcone_minkowski() {
        let g = prwave_metric(field("0"));
        for p in [[0.0; 4], [1.0, -2.0, 3.0, 0.5]] {
            let m = g.matrix_at(&p).unwrap();
            assert_eq!(linalg::det(&m), -1.0);
        }
    }

    #[test]
    fn cahen_wallach_vv_component() {
        let g = prwave_metric(field("a*x^2+b*y^2"));
        let m = g.matrix_at(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(m[1][1], 1.5);
        assert_eq!(m[0][1], 1.0);
        assert_eq!(m[2][2], 1.0);
        assert_eq!(m[0][0], 0.0);
        assert_eq!(m[2][3], 0.0);
    }

    #[test]
    fn closed_form_inverse_matches_numeric_inverse() {
        let g = prwave_metric(field("u^2*sin(x*v)+a*exp(y)-u*x"));
        for p in [[0.3, 0.1, -0.4, 0.2], [-1.0, 2.0, 0.5, -0.7]] {
            let (gj, inv) = g.jets_with_inverse(&p).unwrap();
            let num = invert_jets(&gj).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    for (a, b) in inv[i][j].coeffs().iter().zip(num[i][j].coeffs()) {
                        assert!((a - b).abs() < 1e-12);
                    }
                }
            }
            let id = linalg::mul(&values(&gj), &values(&inv));
            for i in 0..4 {
                for j in 0..4 {
                    assert!((id[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn general_metric_roundtrip_and_singularity() {
        let one = || field("1");
        let zero = || field("0");
        let g = MetricField::general([
            zero(),
            one(),
            zero(),
            zero(),
            field("a*x^2"),
            zero(),
            zero(),
            one(),
            zero(),
            one(),
        ]);
        let p = [0.0, 0.0, 1.0, 0.0];
        assert_eq!(g.matrix_at(&p).unwrap()[1][1], 2.0);
        let inv = g.inverse_at(&p).unwrap();
        assert!((inv[0][0] + 2.0).abs() < 1e-14);

        let degenerate = MetricField::general([
            zero(),
            zero(),
            zero(),
            zero(),
            one(),
            zero(),
            zero(),
            one(),
            zero(),
            one(),
        ]);
        assert!(matches!(
            degenerate.jets_with_inverse(&p),
            Err(EvalError::SingularMetric { .. })
        ));
    }
}
