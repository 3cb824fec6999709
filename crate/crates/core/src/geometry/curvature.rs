use crate::error::EvalError;
use crate::jets::Jet3;
use crate::linalg::Mat4;
use crate::scalar::{Point, Real};

use super::metric::{values, JetMatrix, MetricField};

pub type Tensor3<T> = [[[T; 4]; 4]; 4];
pub type Tensor4<T> = [[[[T; 4]; 4]; 4]; 4];
pub type Tensor5<T> = [[[[[T; 4]; 4]; 4]; 4]; 4];

/// Curvature data at a point. All tensors are fully lowered except
/// [`ricci_op`](Self::ricci_op) and the Christoffel symbols.
///
/// Conventions: `Γ^k_ij` is stored at `christoffel[k][i][j]`;
/// `R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb`,
/// `R_abcd = g_ae R^e_bcd`, `ρ_bd = R^a_bad`. With these, a pp-wave has
/// `R_xvvx = ½ ∂x²F` and `Ric(∂_v) = −½ ΔF ∂_u`.
#[derive(Debug, Clone)]
pub struct CurvatureBundle<T> {
    pub point: Point<T>,
    pub metric: Mat4<T>,
    pub inverse: Mat4<T>,
    pub christoffel: Tensor3<T>,
    pub riemann: Tensor4<T>,
    pub ricci: Mat4<T>,
    /// `Ric^a_b = g^{ac} ρ_cb`; column `b` is the image of `∂_b`.
    pub ricci_op: Mat4<T>,
    pub tau: T,
    /// `(∇_i ρ)_jk` at `[i][j][k]`.
    pub nabla_ricci: Tensor3<T>,
    /// `(∇_e R)_abcd` at `[e][a][b][c][d]`.
    pub nabla_riemann: Tensor5<T>,
}

/// Jets of the metric, Christoffel symbols and curvature at a point.
///
/// Valid orders shrink with each derivative: `g` and `g^{-1}` are exact to
/// order 3, `Γ` to order 2, `R` and `ρ` to order 1.
#[derive(Clone)]
pub struct LocalGeometry<T> {
    pub point: Point<T>,
    pub g: JetMatrix<T>,
    pub ginv: JetMatrix<T>,
    pub christoffel: Tensor3<Jet3<T>>,
    pub riemann: Box<Tensor4<Jet3<T>>>,
    pub ricci: JetMatrix<T>,
}

fn zero_jets<T: Real>() -> JetMatrix<T> {
    [[Jet3::zero(); 4]; 4]
}

impl<T: Real> LocalGeometry<T> {
    pub fn at(metric: &MetricField<T>, p: &Point<T>) -> Result<Self, EvalError> {
        let (g, ginv) = metric.jets_with_inverse(p)?;

        // dg[l][i][j] = ∂_l g_ij
        let dg: [JetMatrix<T>; 4] =
            std::array::from_fn(|l| std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].partial(l))));
        let half = T::lit(0.5);
        // first kind Γ_lij = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
        let mut first = [[[Jet3::zero(); 4]; 4]; 4];
        for (l, first_l) in first.iter_mut().enumerate() {
            for i in 0..4 {
                for j in i..4 {
                    let s = (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]).scale(half);
                    first_l[i][j] = s;
                    first_l[j][i] = s;
                }
            }
        }
        let sparse_inv: [[bool; 4]; 4] =
            std::array::from_fn(|k| std::array::from_fn(|l| ginv[k][l].max_abs() != T::zero()));
        let mut gamma = [[[Jet3::zero(); 4]; 4]; 4];
        for k in 0..4 {
            for i in 0..4 {
                for j in i..4 {
                    let mut s = Jet3::zero();
                    for l in 0..4 {
                        if sparse_inv[k][l] {
                            s += ginv[k][l] * first[l][i][j];
                        }
                    }
                    gamma[k][i][j] = s;
                    gamma[k][j][i] = s;
                }
            }
        }

        // dgamma[c][a][b][d] = ∂_c Γ^a_bd
        let dgamma: [[[[Jet3<T>; 4]; 4]; 4]; 4] = std::array::from_fn(|c| {
            std::array::from_fn(|a| std::array::from_fn(|b| std::array::from_fn(|d| gamma[a][b][d].partial(c))))
        });
        let nonzero: [[[bool; 4]; 4]; 4] = std::array::from_fn(|a| {
            std::array::from_fn(|b| std::array::from_fn(|d| gamma[a][b][d].max_abs() != T::zero()))
        });

        // R^a_bcd, antisymmetric in (c, d)
        let mut rup = Box::new([[[[Jet3::zero(); 4]; 4]; 4]; 4]);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in c + 1..4 {
                        let mut r = dgamma[c][a][d][b] - dgamma[d][a][c][b];
                        for e in 0..4 {
                            if nonzero[a][c][e] && nonzero[e][d][b] {
                                r += gamma[a][c][e] * gamma[e][d][b];
                            }
                            if nonzero[a][d][e] && nonzero[e][c][b] {
                                r -= gamma[a][d][e] * gamma[e][c][b];
                            }
                        }
                        rup[a][b][c][d] = r;
                        rup[a][b][d][c] = -r;
                    }
                }
            }
        }

        let mut ricci = zero_jets();
        for b in 0..4 {
            for d in 0..4 {
                ricci[b][d] = (0..4).map(|a| rup[a][b][a][d]).sum();
            }
        }

        let sparse_g: [[bool; 4]; 4] = std::array::from_fn(|a| std::array::from_fn(|e| g[a][e].max_abs() != T::zero()));
        let mut riemann = Box::new([[[[Jet3::zero(); 4]; 4]; 4]; 4]);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in c + 1..4 {
                        let mut s = Jet3::zero();
                        for e in 0..4 {
                            if sparse_g[a][e] {
                                s += g[a][e] * rup[e][b][c][d];
                            }
                        }
                        riemann[a][b][c][d] = s;
                        riemann[a][b][d][c] = -s;
                    }
                }
            }
        }

        Ok(Self {
            point: *p,
            g,
            ginv,
            christoffel: gamma,
            riemann,
            ricci,
        })
    }

    pub fn christoffel_values(&self) -> Tensor3<T> {
        std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| self.christoffel[k][i][j].value())))
    }

    /// Point values of all curvature quantities.
    pub fn bundle(&self) -> CurvatureBundle<T> {
        let metric = values(&self.g);
        let inverse = values(&self.ginv);
        let christoffel = self.christoffel_values();
        let riemann: Tensor4<T> = std::array::from_fn(|a| {
            std::array::from_fn(|b| std::array::from_fn(|c| std::array::from_fn(|d| self.riemann[a][b][c][d].value())))
        });
        let ricci = values(&self.ricci);
        let mut ricci_op = [[T::zero(); 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                ricci_op[a][b] = (0..4).map(|c| inverse[a][c] * ricci[c][b]).sum();
            }
        }
        let tau = (0..4).map(|a| ricci_op[a][a]).sum();

        let gam = &christoffel;
        let mut nabla_ricci = [[[T::zero(); 4]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let mut s = self.ricci[j][k].d1(i);
                    for m in 0..4 {
                        s -= gam[m][i][j] * ricci[m][k] + gam[m][i][k] * ricci[j][m];
                    }
                    nabla_ricci[i][j][k] = s;
                }
            }
        }

        let mut nabla_riemann = [[[[[T::zero(); 4]; 4]; 4]; 4]; 4];
        for e in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            let mut s = self.riemann[a][b][c][d].d1(e);
                            for m in 0..4 {
                                s -= gam[m][e][a] * riemann[m][b][c][d]
                                    + gam[m][e][b] * riemann[a][m][c][d]
                                    + gam[m][e][c] * riemann[a][b][m][d]
                                    + gam[m][e][d] * riemann[a][b][c][m];
                            }
                            nabla_riemann[e][a][b][c][d] = s;
                        }
                    }
                }
            }
        }

        CurvatureBundle {
            point: self.point,
            metric,
            inverse,
            christoffel,
            riemann,
            ricci,
            ricci_op,
            tau,
            nabla_ricci,
            nabla_riemann,
        }
    }
}

/// Curvature bundle of `metric` at `p`.
pub fn curvature_at<T: Real>(metric: &MetricField<T>, p: &Point<T>) -> Result<CurvatureBundle<T>, EvalError> {
    Ok(LocalGeometry::at(metric, p)?.bundle())
}

/// Christoffel symbols `Γ^k_ij` only (first metric derivatives).
pub fn christoffel_at<T: Real>(metric: &MetricField<T>, p: &Point<T>) -> Result<Tensor3<T>, EvalError> {
    let (g, ginv) = metric.jets_with_inverse(p)?;
    let ginv = values(&ginv);
    let half = T::lit(0.5);
    let mut first = [[[T::zero(); 4]; 4]; 4];
    for (l, first_l) in first.iter_mut().enumerate() {
        for i in 0..4 {
            for j in 0..4 {
                first_l[i][j] = half * (g[j][l].d1(i) + g[i][l].d1(j) - g[i][j].d1(l));
            }
        }
    }
    Ok(std::array::from_fn(|k| {
        std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|l| ginv[k][l] * first[l][i][j]).sum()))
    }))
}

impl<T: Real> CurvatureBundle<T> {
    /// Largest absolute Riemann component.
    pub fn riemann_max(&self) -> T {
        self.riemann
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Largest residual of `R_abcd + R_acdb + R_adbc = 0`.
    pub fn bianchi_residual(&self) -> T {
        let r = &self.riemann;
        let mut m = T::zero();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        m = m.max((r[a][b][c][d] + r[a][c][d][b] + r[a][d][b][c]).abs());
                    }
                }
            }
        }
        m
    }

    /// Largest violation of the pair symmetries of `R_abcd`.
    pub fn symmetry_residual(&self) -> T {
        let r = &self.riemann;
        let mut m = T::zero();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let x = r[a][b][c][d];
                        m = m
                            .max((x + r[b][a][c][d]).abs())
                            .max((x + r[a][b][d][c]).abs())
                            .max((x - r[c][d][a][b]).abs());
                    }
                }
            }
        }
        m
    }

    /// `(div ρ)_k = g^{ij} (∇_i ρ)_jk`.
    pub fn ricci_divergence(&self) -> [T; 4] {
        std::array::from_fn(|k| {
            let mut s = T::zero();
            for i in 0..4 {
                for j in 0..4 {
                    s += self.inverse[i][j] * self.nabla_ricci[i][j][k];
                }
            }
            s
        })
    }

    /// Gradient of the scalar curvature, `∂_k τ = g^{ij} (∇_k ρ)_ij`.
    pub fn tau_gradient(&self) -> [T; 4] {
        std::array::from_fn(|k| {
            let mut s = T::zero();
            for i in 0..4 {
                for j in 0..4 {
                    s += self.inverse[i][j] * self.nabla_ricci[k][i][j];
                }
            }
            s
        })
    }
}
