//! Dense complex linear algebra for multi-qubit operators: tensor products,
//! partial trace, qubit permutation, Bloch decomposition, correlation-tensor
//! singular values, and density-matrix validity checks.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;

/// Dense complex matrix, the working type for all operators.
pub type CMat = DMatrix<Complex64>;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;
pub const PURITY_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// 2x2 identity.
pub fn eye(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// Pauli matrices sigma_x, sigma_y, sigma_z.
pub fn paulis() -> [CMat; 3] {
    let sx = CMat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]);
    let sy = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    let sz = CMat::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)]);
    [sx, sy, sz]
}

/// Computational-basis ket |bits⟩ over bits.len() qubits, first bit most significant.
pub fn basis_ket(bits: &[u8]) -> Vec<Complex64> {
    let dim = 1usize << bits.len();
    let mut v = vec![cr(0.0); dim];
    let mut idx = 0usize;
    for &b in bits {
        idx = idx * 2 + b as usize;
    }
    v[idx] = cr(1.0);
    v
}

/// Outer product |v⟩⟨v| of a (not necessarily normalized) ket.
pub fn projector(v: &[Complex64]) -> CMat {
    let n = v.len();
    CMat::from_fn(n, n, |i, j| v[i] * v[j].conj())
}

/// Kronecker (tensor) product a ⊗ b.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Number of qubits for a square matrix of dimension 2^k; errors otherwise.
pub fn qubit_count(m: &CMat) -> Result<usize> {
    let d = m.nrows();
    if m.ncols() != d || d == 0 || !d.is_power_of_two() {
        return Err(Error::State(format!("matrix is {}x{}, not a 2^k square", m.nrows(), m.ncols())));
    }
    Ok(d.trailing_zeros() as usize)
}

/// Relabel qubits: output qubit j is input qubit perm[j]. Qubit 0 is the most
/// significant bit of the row/column index.
pub fn permute_qubits(rho: &CMat, perm: &[usize]) -> Result<CMat> {
    let k = qubit_count(rho)?;
    if perm.len() != k {
        return Err(Error::Parameter(format!("perm length {} != {} qubits", perm.len(), k)));
    }
    let mut seen = vec![false; k];
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::Parameter("perm is not a permutation".into()));
        }
        seen[p] = true;
    }
    let dim = 1usize << k;
    // map[out] = in: bit j (MSB-first) of the output index equals bit perm[j] of the input.
    let mut map = vec![0usize; dim];
    for (out, slot) in map.iter_mut().enumerate() {
        let mut inp = 0usize;
        for (j, &pj) in perm.iter().enumerate() {
            let bit = (out >> (k - 1 - j)) & 1;
            inp |= bit << (k - 1 - pj);
        }
        *slot = inp;
    }
    Ok(CMat::from_fn(dim, dim, |r, cidx| rho[(map[r], map[cidx])]))
}

/// Partial trace keeping the listed qubits, in the listed order.
pub fn partial_trace(rho: &CMat, keep: &[usize]) -> Result<CMat> {
    let k = qubit_count(rho)?;
    for &q in keep {
        if q >= k {
            return Err(Error::Parameter(format!("keep index {q} out of range for {k} qubits")));
        }
    }
    let traced: Vec<usize> = (0..k).filter(|q| !keep.contains(q)).collect();
    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();
    let compose = |kept_idx: usize, tr_idx: usize| -> usize {
        let mut full = 0usize;
        for (j, &q) in keep.iter().enumerate() {
            let bit = (kept_idx >> (keep.len() - 1 - j)) & 1;
            full |= bit << (k - 1 - q);
        }
        for (j, &q) in traced.iter().enumerate() {
            let bit = (tr_idx >> (traced.len() - 1 - j)) & 1;
            full |= bit << (k - 1 - q);
        }
        full
    };
    let mut out = CMat::zeros(kd, kd);
    for r in 0..kd {
        for cidx in 0..kd {
            let mut acc = cr(0.0);
            for t in 0..td {
                acc += rho[(compose(r, t), compose(cidx, t))];
            }
            out[(r, cidx)] = acc;
        }
    }
    Ok(out)
}

/// Bloch decomposition of a two-qubit state: local Bloch vectors and the 3x3
/// correlation tensor T[j][k] = Tr[rho sigma_j ⊗ sigma_k].
#[derive(Debug, Clone)]
pub struct BlochForm {
    pub u: Vector3<f64>,
    pub v: Vector3<f64>,
    pub corr: Matrix3<f64>,
}

pub fn bloch_decompose(rho: &CMat) -> Result<BlochForm> {
    if qubit_count(rho)? != 2 {
        return Err(Error::State("bloch_decompose expects a two-qubit state".into()));
    }
    let p = paulis();
    let id = eye(2);
    let tr_re = |m: &CMat| -> f64 {
        let mut t = cr(0.0);
        for i in 0..4 {
            for j in 0..4 {
                t += rho[(i, j)] * m[(j, i)];
            }
        }
        t.re
    };
    let mut u = Vector3::zeros();
    let mut v = Vector3::zeros();
    let mut corr = Matrix3::zeros();
    for j in 0..3 {
        u[j] = tr_re(&kron(&p[j], &id));
        v[j] = tr_re(&kron(&id, &p[j]));
        for k in 0..3 {
            corr[(j, k)] = tr_re(&kron(&p[j], &p[k]));
        }
    }
    Ok(BlochForm { u, v, corr })
}

/// Descending singular values of the correlation tensor.
pub fn correlation_singular_values(rho: &CMat) -> Result<[f64; 3]> {
    let b = bloch_decompose(rho)?;
    let svd = b.corr.svd(false, false);
    let mut s = [svd.singular_values[0], svd.singular_values[1], svd.singular_values[2]];
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(s)
}

/// CHSH locality per the Horodecki criterion: the two largest squared singular
/// values of the correlation tensor sum to at most 1.
pub fn chsh_local(rho: &CMat) -> Result<bool> {
    let s = correlation_singular_values(rho)?;
    Ok(s[0] * s[0] + s[1] * s[1] <= 1.0 + 1e-12)
}

/// Validity checks for a density matrix: Hermitian, unit trace, positive
/// semidefinite within tolerances.
pub fn validate_density(rho: &CMat) -> Result<()> {
    qubit_count(rho)?;
    let n = rho.nrows();
    for i in 0..n {
        for j in 0..n {
            if (rho[(i, j)] - rho[(j, i)].conj()).norm() > HERMITICITY_TOL {
                return Err(Error::State(format!("not Hermitian at ({i},{j})")));
            }
        }
    }
    let tr: Complex64 = (0..n).map(|i| rho[(i, i)]).sum();
    if (tr - cr(1.0)).norm() > TRACE_TOL {
        return Err(Error::State(format!("trace {} != 1", tr)));
    }
    let eig = rho.clone().symmetric_eigen();
    for &ev in eig.eigenvalues.iter() {
        if ev < -PSD_TOL {
            return Err(Error::State(format!("negative eigenvalue {ev}")));
        }
    }
    Ok(())
}

/// Purity Tr[rho^2] (real part).
pub fn purity(rho: &CMat) -> f64 {
    let n = rho.nrows();
    let mut acc = cr(0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho[(i, j)] * rho[(j, i)];
        }
    }
    acc.re
}

pub fn is_pure(rho: &CMat) -> bool {
    (purity(rho) - 1.0).abs() < PURITY_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn phi_plus() -> CMat {
        let s = 1.0 / 2f64.sqrt();
        let mut v = basis_ket(&[0, 0]);
        let v11 = basis_ket(&[1, 1]);
        for (a, b) in v.iter_mut().zip(v11.iter()) {
            *a = (*a + *b) * cr(s);
        }
        projector(&v)
    }

    #[test]
    fn kron_dimensions_and_values() {
        let a = CMat::from_row_slice(2, 2, &[cr(1.0), cr(2.0), cr(3.0), cr(4.0)]);
        let b = eye(2);
        let k = kron(&a, &b);
        assert_eq!(k.nrows(), 4);
        assert_abs_diff_eq!(k[(0, 0)].re, 1.0);
        assert_abs_diff_eq!(k[(2, 2)].re, 4.0);
        assert_abs_diff_eq!(k[(2, 0)].re, 3.0);
        assert_abs_diff_eq!(k[(1, 1)].re, 1.0);
    }

    #[test]
    fn permute_roundtrip() {
        let rho = kron(&phi_plus(), &phi_plus());
        let p = permute_qubits(&rho, &[2, 0, 3, 1]).unwrap();
        // inverse of [2,0,3,1] is [1,3,0,2]
        let back = permute_qubits(&p, &[1, 3, 0, 2]).unwrap();
        assert!((&back - &rho).norm() < 1e-14);
    }

    #[test]
    fn permute_swap_on_asymmetric_state() {
        // |01⟩⟨01| with qubits swapped becomes |10⟩⟨10|
        let rho = projector(&basis_ket(&[0, 1]));
        let sw = permute_qubits(&rho, &[1, 0]).unwrap();
        let expect = projector(&basis_ket(&[1, 0]));
        assert!((&sw - &expect).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let rho = phi_plus();
        let r = partial_trace(&rho, &[0]).unwrap();
        assert!((&r - &(eye(2) * cr(0.5))).norm() < 1e-14);
        let r1 = partial_trace(&rho, &[1]).unwrap();
        assert!((&r1 - &(eye(2) * cr(0.5))).norm() < 1e-14);
    }

    #[test]
    fn bell_correlation_singular_values_are_unit() {
        let s = correlation_singular_values(&phi_plus()).unwrap();
        for v in s {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn product_state_corr_is_rank_one() {
        // |0⟩⟨0| ⊗ |+⟩⟨+| : corr = u v^T with u = z-hat, v = x-hat
        let zero = projector(&basis_ket(&[0]));
        let plus = {
            let v = vec![cr(1.0 / 2f64.sqrt()), cr(1.0 / 2f64.sqrt())];
            projector(&v)
        };
        let rho = kron(&zero, &plus);
        let s = correlation_singular_values(&rho).unwrap();
        assert_abs_diff_eq!(s[0], 1.0, epsilon = 1e-12);
        assert!(s[1].abs() < 1e-12 && s[2].abs() < 1e-12);
        let b = bloch_decompose(&rho).unwrap();
        assert_abs_diff_eq!(b.u[2], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.v[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn chsh_local_classifies_bell_and_mixed() {
        assert!(!chsh_local(&phi_plus()).unwrap());
        assert!(chsh_local(&(eye(4) * cr(0.25))).unwrap());
    }

    #[test]
    fn validate_rejects_bad_matrices() {
        let mut bad = eye(4) * cr(0.25);
        bad[(0, 1)] = cr(0.5);
        assert!(validate_density(&bad).is_err());
        let off_trace = eye(4) * cr(0.3);
        assert!(validate_density(&off_trace).is_err());
        assert!(validate_density(&(eye(4) * cr(0.25))).is_ok());
    }
}
