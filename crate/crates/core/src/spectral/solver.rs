use super::{FormMatrices, SpectrumResult};
use crate::{Error, Result};
use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

/// Smallest `k` generalized eigenpairs of S v = β M v.
///
/// M = L Lᵀ reduces the problem to C = L⁻¹ S L⁻ᵀ; eigenvectors come back as
/// v = L⁻ᵀ y, which are M-orthonormal by construction.
pub fn solve_spectrum(mats: &FormMatrices, k: usize) -> Result<SpectrumResult> {
    let (values, vectors) = generalized_eigen(&mats.s, &mats.mass, k)?;
    if let Some(bad) = values.iter().find(|v| **v <= 0.0) {
        return Err(Error::EigenConvergence(format!("non-positive Ritz value {bad}")));
    }
    Ok(SpectrumResult {
        domain: mats.basis.domain.clone(),
        basis: mats.basis.clone(),
        coefficients: (0..k).map(|j| vectors.column(j).iter().copied().collect()).collect(),
        eigenvalues: values,
        k_retained: k,
        error_estimates: None,
    })
}

/// Dense generalized solve on raw matrices; returns ascending values and vectors as columns.
pub fn generalized_eigen(s: &DMatrix<f64>, mass: &DMatrix<f64>, k: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = s.nrows();
    if s.ncols() != n || mass.shape() != (n, n) {
        return Err(Error::InvalidArgument("S and M must be square and of equal size".into()));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds basis size {n}")));
    }
    let chol = Cholesky::new(mass.clone()).ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let ls = l.solve_lower_triangular(s).ok_or(Error::NotPositiveDefinite)?;
    let mut c = l.solve_lower_triangular(&ls.transpose()).ok_or(Error::NotPositiveDefinite)?;
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    let eig = SymmetricEigen::try_new(c, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::EigenConvergence("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order.truncate(k);

    let lt = l.transpose();
    let mut vectors = DMatrix::zeros(n, k);
    let mut values = Vec::with_capacity(k);
    let s_norm = s.norm();
    for (col, &idx) in order.iter().enumerate() {
        let beta = eig.eigenvalues[idx];
        let y = eig.eigenvectors.column(idx).into_owned();
        let mut v = lt.solve_upper_triangular(&y).ok_or(Error::NotPositiveDefinite)?;
        // fix the sign so the largest component is positive
        let lead = v.iter().copied().fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if lead < 0.0 {
            v.neg_mut();
        }
        let resid = (s * &v - mass * &v * beta).norm();
        if resid > 1e-9 * s_norm {
            return Err(Error::EigenConvergence(format!("residual {resid:e} for eigenvalue {beta}")));
        }
        vectors.set_column(col, &v);
        values.push(beta);
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_problem() {
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let (v, _) = generalized_eigen(&s, &DMatrix::identity(3, 3), 2).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn scaled_identity_pencil() {
        let s = DMatrix::identity(4, 4) * 2.0;
        let (v, vecs) = generalized_eigen(&s, &s, 4).unwrap();
        assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-14));
        let gram = vecs.transpose() * &s * &vecs;
        assert!((gram - DMatrix::identity(4, 4)).amax() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_mass() {
        let s = DMatrix::identity(2, 2);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(generalized_eigen(&s, &m, 1).unwrap_err(), Error::NotPositiveDefinite);
        assert!(generalized_eigen(&s, &s, 3).is_err());
    }
}
