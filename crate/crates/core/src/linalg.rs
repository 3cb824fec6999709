//! Small dense 4×4 linear algebra used by the tensor layers.

use crate::scalar::Real;

pub type Mat4<T> = [[T; 4]; 4];
pub type Vec4<T> = [T; 4];

pub fn zeros<T: Real>() -> Mat4<T> {
    [[T::zero(); 4]; 4]
}

pub fn identity<T: Real>() -> Mat4<T> {
    let mut m = zeros();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

pub fn mul<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut out = zeros();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mul_vec<T: Real>(a: &Mat4<T>, v: &Vec4<T>) -> Vec4<T> {
    std::array::from_fn(|i| (0..4).map(|k| a[i][k] * v[k]).sum())
}

pub fn transpose<T: Real>(a: &Mat4<T>) -> Mat4<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

/// Frobenius norm.
pub fn norm<T: Real>(a: &Mat4<T>) -> T {
    a.iter().flatten().map(|&x| x * x).sum::<T>().sqrt()
}

pub fn max_abs<T: Real>(a: &Mat4<T>) -> T {
    a.iter().flatten().fold(T::zero(), |m, &x| m.max(x.abs()))
}

/// `g(a, b) = a^i g_ij b^j`.
pub fn bilinear<T: Real>(g: &Mat4<T>, a: &Vec4<T>, b: &Vec4<T>) -> T {
    let gb = mul_vec(g, b);
    (0..4).map(|i| a[i] * gb[i]).sum()
}

/// Determinant by cofactor-free Gaussian elimination.
pub fn det<T: Real>(a: &Mat4<T>) -> T {
    let mut m = *a;
    let mut d = T::one();
    for c in 0..4 {
        let p = (c..4)
            .max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())
            .unwrap();
        if m[p][c] == T::zero() {
            return T::zero();
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for r in c + 1..4 {
            let f = m[r][c] / m[c][c];
            for k in c..4 {
                let t = m[c][k];
                m[r][k] -= f * t;
            }
        }
    }
    d
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse<T: Real>(a: &Mat4<T>) -> Option<Mat4<T>> {
    let mut m = *a;
    let mut inv = identity();
    for c in 0..4 {
        let p = (c..4)
            .max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())
            .unwrap();
        if m[p][c] == T::zero() || !m[p][c].is_finite() {
            return None;
        }
        m.swap(p, c);
        inv.swap(p, c);
        let piv = m[c][c];
        for k in 0..4 {
            m[c][k] /= piv;
            inv[c][k] /= piv;
        }
        for r in 0..4 {
            if r != c {
                let f = m[r][c];
                for k in 0..4 {
                    let (mc, ic) = (m[c][k], inv[c][k]);
                    m[r][k] -= f * mc;
                    inv[r][k] -= f * ic;
                }
            }
        }
    }
    Some(inv)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and the matrix whose columns are the eigenvectors.
pub fn symmetric_eigen<T: Real>(a: &Mat4<T>) -> (Vec4<T>, Mat4<T>) {
    let mut m = *a;
    let mut vecs = identity();
    let eps = T::epsilon();
    for _sweep in 0..64 {
        let off: T = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        let scale: T = (0..4).map(|i| m[i][i] * m[i][i]).sum::<T>() + off;
        if off <= eps * eps * scale || off == T::zero() {
            break;
        }
        for p in 0..3 {
            for q in p + 1..4 {
                if m[p][q] == T::zero() {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (T::lit(2.0) * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for k in 0..4 {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..4 {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..4 {
                    let (vkp, vkq) = (vecs[k][p], vecs[k][q]);
                    vecs[k][p] = c * vkp - s * vkq;
                    vecs[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    (std::array::from_fn(|i| m[i][i]), vecs)
}

/// Singular values (descending) and an orthonormal basis of the column space
/// spanned by singular directions above `rel_tol · (σ_max + 1e-30)`.
pub fn column_space<T: Real>(a: &Mat4<T>, rel_tol: T) -> (Vec4<T>, Vec<Vec4<T>>) {
    let ata = mul(&transpose(a), a);
    let (evals, evecs) = symmetric_eigen(&ata);
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| evals[j].partial_cmp(&evals[i]).unwrap());
    let sigma: Vec4<T> = std::array::from_fn(|k| evals[order[k]].max(T::zero()).sqrt());
    let cutoff = rel_tol * (sigma[0] + T::lit(1e-30));
    let mut basis = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        if sigma[k] <= cutoff {
            continue;
        }
        let v: Vec4<T> = std::array::from_fn(|r| evecs[r][i]);
        let av = mul_vec(a, &v);
        basis.push(av.map(|x| x / sigma[k]));
    }
    (sigma, basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let a: Mat4<f64> = [
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.7, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        assert!((det(&a) + 1.0).abs() < 1e-15);
        let inv = inverse(&a).unwrap();
        assert!((inv[0][0] + 0.7).abs() < 1e-15);
        let id = mul(&a, &inv);
        for i in 0..4 {
            for j in 0..4 {
                assert!((id[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        assert!(inverse(&zeros::<f64>()).is_none());
    }

    #[test]
    fn jacobi_recovers_spectrum() {
        let a = [
            [4.0, 1.0, 0.5, 0.0],
            [1.0, 3.0, 0.0, 0.2],
            [0.5, 0.0, 2.0, 0.1],
            [0.0, 0.2, 0.1, 1.0],
        ];
        let (vals, vecs) = symmetric_eigen(&a);
        for k in 0..4 {
            let v: Vec4<f64> = std::array::from_fn(|r| vecs[r][k]);
            let av = mul_vec(&a, &v);
            for r in 0..4 {
                assert!((av[r] - vals[k] * v[r]).abs() < 1e-12);
            }
        }
        let tr: f64 = vals.iter().sum();
        assert!((tr - 10.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_column_space() {
        let mut a = zeros::<f64>();
        a[0][1] = -3.0;
        let (s, basis) = column_space(&a, 1e-9);
        assert!((s[0] - 3.0).abs() < 1e-14);
        assert!(s[1] < 1e-14);
        assert_eq!(basis.len(), 1);
        assert!((basis[0][0].abs() - 1.0).abs() < 1e-14);
        let (_, b0) = column_space(&zeros::<f64>(), 1e-9);
        assert!(b0.is_empty());
    }
}
