//! Two-qubit source state constructors: Bell states, Schmidt-form pure
//! states, separable and product states, Bell-diagonal mixtures, and the two
//! noise channels (imperfect gate-based entanglement generation and
//! depolarization).

use crate::error::{Error, Result};
use crate::linalg::{basis_ket, cr, eye, kron, paulis, projector, validate_density, CMat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const PARAM_TOL: f64 = 1e-12;

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

/// Declarative description of a two-qubit source state.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Bell { which: BellKind },
    Schmidt { tau1: f64, tau2: f64 },
    SeparableCc,
    Product { u: [f64; 3], v: [f64; 3] },
    BellDiagonal { weights: [f64; 4] },
    NoisyGate { p1: f64, p2: f64 },
    DepolarizedBell { p3: f64 },
}

/// Bell-state ket amplitudes.
pub fn bell_ket(which: BellKind) -> Vec<Complex64> {
    let s = cr(1.0 / 2f64.sqrt());
    let (a, b, sign) = match which {
        BellKind::PhiPlus => ([0, 0], [1, 1], 1.0),
        BellKind::PhiMinus => ([0, 0], [1, 1], -1.0),
        BellKind::PsiPlus => ([0, 1], [1, 0], 1.0),
        BellKind::PsiMinus => ([0, 1], [1, 0], -1.0),
    };
    let ka = basis_ket(&a);
    let kb = basis_ket(&b);
    ka.iter().zip(kb.iter()).map(|(x, y)| (*x + *y * cr(sign)) * s).collect()
}

pub fn bell_state(which: BellKind) -> CMat {
    projector(&bell_ket(which))
}

/// Pure Schmidt-form state tau1|00⟩ + tau2|11⟩ with tau1^2 + tau2^2 = 1.
pub fn schmidt_state(tau1: f64, tau2: f64) -> Result<CMat> {
    if (tau1 * tau1 + tau2 * tau2 - 1.0).abs() > PARAM_TOL {
        return Err(Error::Parameter(format!("schmidt weights not normalized: {tau1}, {tau2}")));
    }
    let k00 = basis_ket(&[0, 0]);
    let k11 = basis_ket(&[1, 1]);
    let v: Vec<Complex64> =
        k00.iter().zip(k11.iter()).map(|(a, b)| *a * cr(tau1) + *b * cr(tau2)).collect();
    Ok(projector(&v))
}

/// Classically correlated separable state diag(1/2, 0, 0, 1/2).
pub fn separable_cc() -> CMat {
    (projector(&basis_ket(&[0, 0])) + projector(&basis_ket(&[1, 1]))) * cr(0.5)
}

/// Single-qubit state (I + u·sigma)/2 for |u| ≤ 1.
pub fn bloch_qubit(u: [f64; 3]) -> Result<CMat> {
    let norm2: f64 = u.iter().map(|x| x * x).sum();
    if norm2 > 1.0 + PARAM_TOL {
        return Err(Error::Parameter(format!("Bloch vector norm {} > 1", norm2.sqrt())));
    }
    let p = paulis();
    let mut m = eye(2) * cr(0.5);
    for j in 0..3 {
        m += &p[j] * cr(0.5 * u[j]);
    }
    Ok(m)
}

/// Product state (I + u·sigma)/2 ⊗ (I + v·sigma)/2.
pub fn product_state(u: [f64; 3], v: [f64; 3]) -> Result<CMat> {
    Ok(kron(&bloch_qubit(u)?, &bloch_qubit(v)?))
}

/// Bell-diagonal mixture with weights (w1..w4) on (psi-, phi+, phi-, psi+).
/// Its correlation tensor is diag(1-2(w1+w3), 1-2(w2+w3), 1-2(w1+w2)).
pub fn bell_diagonal(weights: [f64; 4]) -> Result<CMat> {
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > PARAM_TOL || weights.iter().any(|&w| !(0.0..=1.0).contains(&w)) {
        return Err(Error::Parameter(format!("bell_diagonal weights invalid: {weights:?}")));
    }
    let parts = [
        bell_state(BellKind::PsiMinus),
        bell_state(BellKind::PhiPlus),
        bell_state(BellKind::PhiMinus),
        bell_state(BellKind::PsiPlus),
    ];
    let mut m = CMat::zeros(4, 4);
    for (w, p) in weights.iter().zip(parts.iter()) {
        m += p * cr(*w);
    }
    Ok(m)
}

fn check_unit(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(())
}

/// State produced by imperfect gate-based entanglement generation, composed
/// from first principles: starting from |10⟩⟨10|, apply a Hadamard on the
/// first qubit with fidelity p1 (failure replaces the first qubit by I/2 while
/// keeping the second-qubit marginal), then a CNOT (first qubit control) with
/// fidelity p2 (failure fully depolarizes the pair). The p1 = p2 = 1 limit is
/// the Bell state phi-.
pub fn noisy_gate_state(p1: f64, p2: f64) -> Result<CMat> {
    check_unit("p1", p1)?;
    check_unit("p2", p2)?;
    let rho0 = projector(&basis_ket(&[1, 0]));
    // Hadamard on qubit 0.
    let h1 = {
        let s = 1.0 / 2f64.sqrt();
        let h = CMat::from_row_slice(2, 2, &[cr(s), cr(s), cr(s), cr(-s)]);
        kron(&h, &eye(2))
    };
    let ideal1 = &h1 * &rho0 * h1.adjoint();
    let marginal = crate::linalg::partial_trace(&rho0, &[1])?;
    let noise1 = kron(&(eye(2) * cr(0.5)), &marginal);
    let rho1 = ideal1 * cr(p1) + noise1 * cr(1.0 - p1);
    // CNOT with qubit 0 as control.
    let cnot = CMat::from_fn(4, 4, |r, cidx| {
        let control = r >> 1;
        let target = r & 1;
        let src = if control == 1 { (control << 1) | (target ^ 1) } else { r };
        if src == cidx { cr(1.0) } else { cr(0.0) }
    });
    let ideal2 = &cnot * &rho1 * cnot.adjoint();
    let rho2 = ideal2 * cr(p2) + eye(4) * cr((1.0 - p2) / 4.0);
    validate_density(&rho2).map(|_| rho2)
}

/// Depolarized Bell state p3 |phi-⟩⟨phi-| + (1-p3) I/4.
pub fn depolarize_bell(p3: f64) -> Result<CMat> {
    check_unit("p3", p3)?;
    Ok(bell_state(BellKind::PhiMinus) * cr(p3) + eye(4) * cr((1.0 - p3) / 4.0))
}

/// Depolarize an arbitrary two-qubit state.
pub fn depolarize(p3: f64, rho: &CMat) -> Result<CMat> {
    check_unit("p3", p3)?;
    Ok(rho * cr(p3) + eye(4) * cr((1.0 - p3) / 4.0))
}

/// Construct the state described by a `StateSpec`.
pub fn make_state(spec: &StateSpec) -> Result<CMat> {
    let rho = match spec {
        StateSpec::Bell { which } => bell_state(*which),
        StateSpec::Schmidt { tau1, tau2 } => schmidt_state(*tau1, *tau2)?,
        StateSpec::SeparableCc => separable_cc(),
        StateSpec::Product { u, v } => product_state(*u, *v)?,
        StateSpec::BellDiagonal { weights } => bell_diagonal(*weights)?,
        StateSpec::NoisyGate { p1, p2 } => noisy_gate_state(*p1, *p2)?,
        StateSpec::DepolarizedBell { p3 } => depolarize_bell(*p3)?,
    };
    validate_density(&rho)?;
    Ok(rho)
}

/// Whether the spec describes a state that is pure by construction.
pub fn spec_is_pure(spec: &StateSpec) -> bool {
    match spec {
        StateSpec::Bell { .. } | StateSpec::Schmidt { .. } => true,
        StateSpec::Product { u, v } => {
            let n = |x: &[f64; 3]| x.iter().map(|t| t * t).sum::<f64>();
            (n(u) - 1.0).abs() < PARAM_TOL && (n(v) - 1.0).abs() < PARAM_TOL
        }
        _ => false,
    }
}
