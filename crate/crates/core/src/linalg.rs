//! Dense helpers: matrix exponential, rank and null spaces.

use nalgebra::{Complex, DMatrix, SymmetricEigen};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn norm1(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols()).map(|c| a.column(c).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let nrm = norm1(a);
    let s = if nrm > THETA13 { (nrm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a / 2f64.powi(s);
    let id = DMatrix::<f64>::identity(n, n);
    let b = &PADE13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]) + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is singular");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Exponential of a real antisymmetric matrix through the eigendecomposition of
/// the Hermitian matrix `iA`.
pub fn expm_antisymmetric(a: &DMatrix<f64>) -> DMatrix<f64> {
    let h: DMatrix<Complex<f64>> = a.map(|x| Complex::new(0.0, x));
    let eig = SymmetricEigen::new(h);
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex::new(0.0, -l).exp()));
    let e = v * phases * v.adjoint();
    e.map(|z| z.re)
}

/// Singular values of `m`, padding wide matrices with zero rows.
fn svd_padded(m: &DMatrix<f64>) -> nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn> {
    let (r, c) = m.shape();
    let m = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        p
    } else {
        m.clone()
    };
    m.svd(false, true)
}

/// Numerical rank with a threshold relative to the largest singular value.
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = svd_padded(m).singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Orthonormal basis (as columns) of the right null space of `m`.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let c = m.ncols();
    let svd = svd_padded(m);
    let smax = svd.singular_values.max().max(f64::MIN_POSITIVE);
    let vt = svd.v_t.unwrap();
    let cols: Vec<_> = (0..vt.nrows())
        .filter(|&k| svd.singular_values[k] <= rel_tol * smax)
        .map(|k| vt.row(k).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(c, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let r = m.nrows();
    if m.ncols() == 0 {
        return DMatrix::zeros(r, 0);
    }
    let svd = m.clone().svd(true, false);
    let smax = svd.singular_values.max();
    let u = svd.u.unwrap();
    let cols: Vec<_> = (0..svd.singular_values.len())
        .filter(|&k| smax > 0.0 && svd.singular_values[k] > rel_tol * smax)
        .map(|k| u.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(r, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Symmetric eigen-decomposition with eigenvalues sorted ascending.
pub fn sorted_symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&k| eig.eigenvalues[k]).collect();
    let cols: Vec<_> = idx.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
    let n = m.nrows();
    let vecs = if cols.is_empty() { DMatrix::zeros(n, 0) } else { DMatrix::from_columns(&cols) };
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn taylor(a: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
        let n = a.nrows();
        let mut out = DMatrix::identity(n, n);
        let mut t = DMatrix::identity(n, n);
        for k in 1..terms {
            t = &t * a / k as f64;
            out += &t;
        }
        out
    }

    #[test]
    fn expm_of_rotation_generator() {
        let t = 2.3_f64;
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let e = expm(&a);
        let r = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!((e - r).amax() < 1e-14);
    }

    #[test]
    fn expm_of_nilpotent() {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 2.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0]);
        let expect = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 3.5, 0.0, 1.0, 3.0, 0.0, 0.0, 1.0]);
        assert!((expm(&a) - expect).amax() < 1e-14);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space(&m, 1e-12);
        assert_eq!(ns.ncols(), 2);
        assert!((&m * &ns).amax() < 1e-14);
        assert_eq!(rank(&m, 1e-12), 1);
    }

    proptest! {
        #[test]
        fn expm_matches_taylor(v in proptest::collection::vec(-1.0f64..1.0, 16)) {
            let a = DMatrix::from_row_slice(4, 4, &v);
            prop_assert!((expm(&a) - taylor(&a, 40)).amax() < 1e-12);
        }

        #[test]
        fn antisymmetric_routes_agree(v in proptest::collection::vec(-3.0f64..3.0, 25)) {
            let m = DMatrix::from_row_slice(5, 5, &v);
            let a = &m - m.transpose();
            let e = expm(&a);
            prop_assert!((&e - expm_antisymmetric(&a)).amax() < 1e-11);
            prop_assert!((e.transpose() * &e - DMatrix::identity(5, 5)).amax() < 1e-12);
        }
    }
}
