//! Four-outcome joint measurements: entangled and product orthonormal bases,
//! the two-parameter basis family, and the detector-inefficiency POVM model.
//! Outcome index o = 2*o1 + o2 encodes the two-bit outcome (o1, o2); basis
//! vectors b1..b4 map to outcomes (0,0), (0,1), (1,0), (1,1) in listed order.

use crate::error::{Error, Result};
use crate::linalg::{basis_ket, cr, eye, projector, CMat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const COMPLETENESS_TOL: f64 = 1e-10;
pub const ELEMENT_PSD_TOL: f64 = 1e-9;

/// A four-outcome POVM on two qubits.
#[derive(Debug, Clone)]
pub struct FourOutcomePovm {
    elements: [CMat; 4],
}

/// Declarative description of a party's measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PovmSpec {
    EntangledBasis { alpha1: f64 },
    ProductBasis,
    TwoParamBasis { alpha2: f64, alpha4: f64 },
    Inefficient { base: Box<PovmSpec>, p4: f64 },
}

impl FourOutcomePovm {
    /// Build from four explicit elements, checking positivity and completeness.
    pub fn new(elements: [CMat; 4]) -> Result<Self> {
        let mut sum = CMat::zeros(4, 4);
        for e in &elements {
            if e.nrows() != 4 || e.ncols() != 4 {
                return Err(Error::Povm("elements must be 4x4".into()));
            }
            for i in 0..4 {
                for j in 0..4 {
                    if (e[(i, j)] - e[(j, i)].conj()).norm() > 1e-10 {
                        return Err(Error::Povm("element not Hermitian".into()));
                    }
                }
            }
            let eig = e.clone().symmetric_eigen();
            if eig.eigenvalues.iter().any(|&v| v < -ELEMENT_PSD_TOL) {
                return Err(Error::Povm("element not positive semidefinite".into()));
            }
            sum += e;
        }
        if (&sum - &eye(4)).norm() > COMPLETENESS_TOL {
            return Err(Error::Povm("elements do not sum to identity".into()));
        }
        Ok(Self { elements })
    }

    /// Build from four orthonormal basis kets.
    pub fn from_basis(kets: [Vec<Complex64>; 4]) -> Result<Self> {
        let elems = kets.map(|k| projector(&k));
        Self::new(elems)
    }

    pub fn element(&self, outcome: usize) -> &CMat {
        &self.elements[outcome]
    }

    pub fn elements(&self) -> &[CMat; 4] {
        &self.elements
    }
}

fn check_unit(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(())
}

fn combine(a: &[Complex64], ca: f64, b: &[Complex64], cb: f64) -> Vec<Complex64> {
    a.iter().zip(b.iter()).map(|(x, y)| *x * cr(ca) + *y * cr(cb)).collect()
}

/// Orthonormal basis {|01⟩, |10⟩, a1|00⟩ + a2|11⟩, a2|00⟩ - a1|11⟩} with
/// a2 = sqrt(1 - a1^2), for 0 < a1 < 1.
pub fn entangled_basis(alpha1: f64) -> Result<FourOutcomePovm> {
    if !(0.0 < alpha1 && alpha1 < 1.0) {
        return Err(Error::Parameter(format!("alpha1 = {alpha1} outside (0, 1)")));
    }
    entangled_basis_closed(alpha1)
}

/// Same construction with the closed interval allowed; the endpoints are the
/// product-basis limits, useful for sweeps that touch the corners.
pub fn entangled_basis_closed(alpha1: f64) -> Result<FourOutcomePovm> {
    check_unit("alpha1", alpha1)?;
    let alpha2 = (1.0 - alpha1 * alpha1).sqrt();
    let k00 = basis_ket(&[0, 0]);
    let k11 = basis_ket(&[1, 1]);
    FourOutcomePovm::from_basis([
        basis_ket(&[0, 1]),
        basis_ket(&[1, 0]),
        combine(&k00, alpha1, &k11, alpha2),
        combine(&k00, alpha2, &k11, -alpha1),
    ])
}

/// Product basis {|01⟩, |10⟩, |11⟩, |00⟩}.
pub fn product_basis() -> FourOutcomePovm {
    FourOutcomePovm::from_basis([
        basis_ket(&[0, 1]),
        basis_ket(&[1, 0]),
        basis_ket(&[1, 1]),
        basis_ket(&[0, 0]),
    ])
    .expect("product basis is orthonormal")
}

/// Two-parameter orthonormal basis
/// {a1|01⟩ + a2|10⟩, a2|01⟩ - a1|10⟩, a3|00⟩ + a4|11⟩, a4|00⟩ - a3|11⟩}
/// with a1 = sqrt(1 - a2^2), a3 = sqrt(1 - a4^2). The fourth vector is the
/// orthogonality-completing partner of the third.
pub fn two_param_basis(alpha2: f64, alpha4: f64) -> Result<FourOutcomePovm> {
    check_unit("alpha2", alpha2)?;
    check_unit("alpha4", alpha4)?;
    let alpha1 = (1.0 - alpha2 * alpha2).sqrt();
    let alpha3 = (1.0 - alpha4 * alpha4).sqrt();
    let k00 = basis_ket(&[0, 0]);
    let k01 = basis_ket(&[0, 1]);
    let k10 = basis_ket(&[1, 0]);
    let k11 = basis_ket(&[1, 1]);
    FourOutcomePovm::from_basis([
        combine(&k01, alpha1, &k10, alpha2),
        combine(&k01, alpha2, &k10, -alpha1),
        combine(&k00, alpha3, &k11, alpha4),
        combine(&k00, alpha4, &k11, -alpha3),
    ])
}

/// Detector-inefficiency model: each element becomes p4*E + (1-p4)/4 * I.
pub fn inefficient_povm(basis: &FourOutcomePovm, p4: f64) -> Result<FourOutcomePovm> {
    check_unit("p4", p4)?;
    let elems = [0, 1, 2, 3]
        .map(|o| basis.element(o) * cr(p4) + eye(4) * cr((1.0 - p4) / 4.0));
    FourOutcomePovm::new(elems)
}

/// Construct the POVM described by a `PovmSpec`.
pub fn make_povm(spec: &PovmSpec) -> Result<FourOutcomePovm> {
    match spec {
        PovmSpec::EntangledBasis { alpha1 } => entangled_basis_closed(*alpha1),
        PovmSpec::ProductBasis => Ok(product_basis()),
        PovmSpec::TwoParamBasis { alpha2, alpha4 } => two_param_basis(*alpha2, *alpha4),
        PovmSpec::Inefficient { base, p4 } => inefficient_povm(&make_povm(base)?, *p4),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn completeness(p: &FourOutcomePovm) -> f64 {
        let mut sum = CMat::zeros(4, 4);
        for o in 0..4 {
            sum += p.element(o);
        }
        (&sum - &eye(4)).norm()
    }

    #[test]
    fn entangled_basis_symmetric_point_contains_phi_plus() {
        let p = entangled_basis(1.0 / 2f64.sqrt()).unwrap();
        let phi = crate::states::bell_state(crate::states::BellKind::PhiPlus);
        assert!((p.element(2) - &phi).norm() < 1e-12);
        assert!(completeness(&p) < 1e-12);
    }

    #[test]
    fn entangled_basis_rejects_endpoints_open() {
        assert!(entangled_basis(0.0).is_err());
        assert!(entangled_basis(1.0).is_err());
        assert!(entangled_basis_closed(1.0).is_ok());
    }

    #[test]
    fn entangled_basis_limit_is_product() {
        let p = entangled_basis_closed(1.0).unwrap();
        assert!((p.element(2) - &projector(&basis_ket(&[0, 0]))).norm() < 1e-12);
        assert!((p.element(3) - &projector(&basis_ket(&[1, 1]))).norm() < 1e-12);
    }

    #[test]
    fn product_basis_elements() {
        let p = product_basis();
        assert!((p.element(3) - &projector(&basis_ket(&[0, 0]))).norm() < 1e-15);
        assert!(completeness(&p) < 1e-12);
        // rank-1, mutually orthogonal
        for a in 0..4 {
            for b in 0..4 {
                let prod = p.element(a) * p.element(b);
                let tr: f64 = (0..4).map(|i| prod[(i, i)].re).sum();
                assert_abs_diff_eq!(tr, if a == b { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn two_param_basis_gram_is_identity() {
        for (a2, a4) in [(0.3, 0.7), (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.6, 0.6)] {
            let p = two_param_basis(a2, a4).unwrap();
            assert!(completeness(&p) < 1e-12, "completeness fails at ({a2}, {a4})");
        }
    }

    #[test]
    fn two_param_corners_are_product_bases() {
        let p = two_param_basis(1.0, 0.0).unwrap();
        assert!((p.element(0) - &projector(&basis_ket(&[1, 0]))).norm() < 1e-12);
        assert!((p.element(1) - &projector(&basis_ket(&[0, 1]))).norm() < 1e-12);
        assert!((p.element(2) - &projector(&basis_ket(&[0, 0]))).norm() < 1e-12);
        assert!((p.element(3) - &projector(&basis_ket(&[1, 1]))).norm() < 1e-12);
    }

    #[test]
    fn inefficient_povm_limits() {
        let base = entangled_basis(0.9).unwrap();
        let same = inefficient_povm(&base, 1.0).unwrap();
        for o in 0..4 {
            assert!((same.element(o) - base.element(o)).norm() < 1e-14);
        }
        let flat = inefficient_povm(&base, 0.0).unwrap();
        for o in 0..4 {
            assert!((flat.element(o) - &(eye(4) * cr(0.25))).norm() < 1e-14);
        }
        let mid = inefficient_povm(&base, 0.35).unwrap();
        assert!(completeness(&mid) < 1e-12);
    }

    #[test]
    fn povm_new_rejects_incomplete_sets() {
        let bad = [eye(4) * cr(0.25), eye(4) * cr(0.25), eye(4) * cr(0.25), eye(4) * cr(0.1)];
        assert!(FourOutcomePovm::new(bad).is_err());
    }
}
