//! Discrepancy report: compare the evaluator's (I1, I2) against transcribed
//! closed-form reference polynomials for each scan family, fitting an overall
//! scale, a component ordering, and component signs. Families whose reference
//! polynomials cannot be reproduced under any fit are expected to be listed
//! in the repository's `KNOWN_DISCREPANCIES.md`.

use crate::error::Result;
use crate::network::joint_distribution_from;
use crate::povm::{entangled_basis, inefficient_povm, two_param_basis};
use crate::signs::{
    depolarization_triple, evaluate_ngon, square_quadruple, standard_triple_a, standard_triple_b,
    SignFunction, SQUARE_T, TRIANGLE_T,
};
use crate::states::{
    bell_state, depolarize_bell, noisy_gate_state, separable_cc, BellKind,
};
use serde::{Deserialize, Serialize};

/// Fitted comparison between computed and reference invariant pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscrepancyRecord {
    pub id: String,
    /// best-fit overall scale divisor applied to the reference pair
    pub scale: f64,
    /// false when the reference order is (Q2, Q1) relative to (I1, I2)
    pub direct_order: bool,
    pub sign1: i8,
    pub sign2: i8,
    /// max over sample points of |a-b| / max(1, |a|, |b|) under the best fit
    pub max_gap: f64,
    pub matched: bool,
}

pub const FIT_TOL: f64 = 1e-6;
const SCALES: [f64; 6] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

fn gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

/// Fit (order, sign1, sign2, scale) minimizing the worst-point gap.
fn fit(id: &str, pairs: &[((f64, f64), (f64, f64))]) -> DiscrepancyRecord {
    let mut best: Option<DiscrepancyRecord> = None;
    for &direct in &[true, false] {
        for &e1 in &[1i8, -1] {
            for &e2 in &[1i8, -1] {
                for &c in &SCALES {
                    let max_gap = pairs
                        .iter()
                        .map(|&((i1, i2), (q1, q2))| {
                            let (a, b) = if direct { (q1, q2) } else { (q2, q1) };
                            gap(i1, e1 as f64 * a / c).max(gap(i2, e2 as f64 * b / c))
                        })
                        .fold(0.0, f64::max);
                    if best.as_ref().map(|r| max_gap < r.max_gap).unwrap_or(true) {
                        best = Some(DiscrepancyRecord {
                            id: id.into(),
                            scale: c,
                            direct_order: direct,
                            sign1: e1,
                            sign2: e2,
                            max_gap,
                            matched: max_gap < FIT_TOL,
                        });
                    }
                }
            }
        }
    }
    best.unwrap()
}

fn tri_pair(
    states: &[crate::linalg::CMat],
    povms: &[crate::povm::FourOutcomePovm],
    fs: &[SignFunction],
    t: usize,
) -> Result<(f64, f64)> {
    let p = joint_distribution_from(states, povms)?;
    let r = evaluate_ngon(&p, fs, t)?;
    Ok((r.i1, r.i2))
}

/// All report targets, in a fixed order.
pub fn discrepancy_report() -> Result<Vec<DiscrepancyRecord>> {
    let phi = bell_state(BellKind::PhiPlus);
    let [fa0, fa1, fa2] = standard_triple_a();
    let fs_a = [fa0, fa1, fa2];
    let [fb0, fb1, fb2] = standard_triple_b();
    let fs_b = [fb0, fb1, fb2];
    let mut out = Vec::new();

    // Family 1: Bell sources, one-parameter entangled basis, placement A.
    {
        let grid = [0.3, 0.55, 0.7, 0.85, 0.92];
        let mut pairs = Vec::new();
        for &a1 in &grid {
            let povm = entangled_basis(a1)?;
            let i = tri_pair(&[phi.clone(), phi.clone(), phi.clone()], &[povm.clone(), povm.clone(), povm], &fs_a, TRIANGLE_T)?;
            let a1s = a1 * a1;
            let a2s = 1.0 - a1s;
            let q = (
                2.0 * a1s - a2s,
                a1s.powi(3) - a1s.powi(2) * a2s + a2s.powi(3) + a1s * (3.0 - a2s * a2s),
            );
            pairs.push((i, q));
        }
        out.push(fit("entangled-basis-family", &pairs));
    }

    // Family 2: classically correlated sources, two-parameter basis, placement B.
    {
        let grid = [(0.2, 0.3), (0.4, 0.7), (0.6, 0.2), (0.8, 0.9), (0.95, 0.1)];
        let sep = separable_cc();
        let mut pairs = Vec::new();
        for &(a2, a4) in &grid {
            let povm = two_param_basis(a2, a4)?;
            let i = tri_pair(&[sep.clone(), sep.clone(), sep.clone()], &[povm.clone(), povm.clone(), povm], &fs_b, TRIANGLE_T)?;
            let q = (
                1.0 + a2 * a2 + 2.0 * a2.powi(4) - a4 * a4 - 6.0 * a2 * a2 * a4 * a4
                    + 4.0 * a4.powi(4),
                (1.0 - 2.0 * a2 * a2) * (1.0 + a2 * a2 - 3.0 * a4 * a4),
            );
            pairs.push((i, q));
        }
        out.push(fit("two-param-basis-family", &pairs));
    }

    // Family 3: noisy-gate sources at p1 = 1, placement B.
    {
        let grid: [(f64, f64); 5] = [(0.3, 0.6), (0.5, 0.8), (0.7, 0.95), (0.9, 0.85), (0.2, 0.99)];
        let mut pairs = Vec::new();
        for &(a2, p2) in &grid {
            let a1 = (1.0 - a2 * a2).sqrt();
            let st = noisy_gate_state(1.0, p2)?;
            let povm = entangled_basis(a1)?;
            let i = tri_pair(&[st.clone(), st.clone(), st], &[povm.clone(), povm.clone(), povm], &fs_b, TRIANGLE_T)?;
            let a2s = a2 * a2;
            let q = (
                p2 * (p2 - 3.0 * p2 * a2s - (1.0 - p2) * a2s * a2s),
                p2 * p2 * (p2 - a2s + 4.0 * a2s * a2s),
            );
            pairs.push((i, q));
        }
        out.push(fit("noisy-gate-family", &pairs));
    }

    // Family 4: depolarized Bell sources, placement B.
    {
        let grid: [(f64, f64); 5] = [(0.3, 0.6), (0.5, 0.9), (0.7, 0.95), (0.9, 0.8), (0.2, 0.99)];
        let mut pairs = Vec::new();
        for &(a2, p3) in &grid {
            let a1 = (1.0 - a2 * a2).sqrt();
            let st = depolarize_bell(p3)?;
            let povm = entangled_basis(a1)?;
            let i = tri_pair(&[st.clone(), st.clone(), st], &[povm.clone(), povm.clone(), povm], &fs_b, TRIANGLE_T)?;
            let a2s = a2 * a2;
            let q = (
                p3 * p3 * (a2s - 4.0 * a2s * a2s + p3),
                p3 * (p3 - 3.0 * a2s * p3 + a2s * a2s * (1.0 + p3)),
            );
            pairs.push((i, q));
        }
        out.push(fit("depolarizing-family", &pairs));
    }

    // Family 5: depolarized Bell sources under the dedicated witness triple.
    {
        let grid: [(f64, f64); 5] = [(0.3, 0.6), (0.5, 0.9), (0.7, 0.95), (0.9, 0.8), (0.2, 0.99)];
        let [d0, d1, d2] = depolarization_triple();
        let fs_d = [d0, d1, d2];
        let mut pairs = Vec::new();
        for &(a2, p3) in &grid {
            let a1 = (1.0 - a2 * a2).sqrt();
            let st = depolarize_bell(p3)?;
            let povm = entangled_basis(a1)?;
            let i = tri_pair(&[st.clone(), st.clone(), st], &[povm.clone(), povm.clone(), povm], &fs_d, TRIANGLE_T)?;
            let a2s = a2 * a2;
            let w1 = 2.0 + 6.0 * p3 + 2.0 * p3 * p3 - 2.0 * p3.powi(3)
                + 8.0 * a2s * a2s * p3 * (1.0 + p3)
                - 8.0 * a2s * p3 * (2.0 + p3);
            let w2 = p3 * (9.0 + a2s * (-22.0 - 4.0 * p3) + p3 + a2s * a2s * (14.0 + 6.0 * p3));
            pairs.push((i, (w1, w2)));
        }
        out.push(fit("depolarizing-witness-family", &pairs));
    }

    // Family 6: Bell sources with inefficient detectors, placement B.
    {
        let grid: [(f64, f64); 5] = [(0.3, 0.9), (0.5, 0.95), (0.7, 0.85), (0.9, 0.99), (0.2, 0.8)];
        let mut pairs = Vec::new();
        for &(a2, p4) in &grid {
            let a1 = (1.0 - a2 * a2).sqrt();
            let base = entangled_basis(a1)?;
            let povm = inefficient_povm(&base, p4)?;
            let i = tri_pair(&[phi.clone(), phi.clone(), phi.clone()], &[povm.clone(), povm.clone(), povm], &fs_b, TRIANGLE_T)?;
            let a2s = a2 * a2;
            let q = (
                p4 * p4 * (3.0 * a2s * p4 - a2s * a2s * (1.0 - p4) - p4),
                (1.0 - a2s + 4.0 * a2s * a2s) * p4.powi(3),
            );
            pairs.push((i, q));
        }
        out.push(fit("inefficiency-family", &pairs));
    }

    // Family 7: four-party ring of Bell sources, dedicated quadruple.
    {
        let grid: [f64; 5] = [0.3, 0.5, 0.7, 0.85, 0.95];
        let [s0, s1, s2, s3] = square_quadruple();
        let fs_s = [s0, s1, s2, s3];
        let mut pairs = Vec::new();
        for &a2 in &grid {
            let a1 = (1.0 - a2 * a2).sqrt();
            let povm = entangled_basis(a1)?;
            let i = tri_pair(
                &[phi.clone(), phi.clone(), phi.clone(), phi.clone()],
                &[povm.clone(), povm.clone(), povm.clone(), povm],
                &fs_s,
                SQUARE_T,
            )?;
            let a2s = a2 * a2;
            let q = (2.0 - 5.0 * a2s + 8.0 * a2s * a2s, a2s * (3.0 - 2.0 * a2s));
            pairs.push((i, q));
        }
        out.push(fit("square-ring-family", &pairs));
    }

    Ok(out)
}

/// Family ids expected to appear in `KNOWN_DISCREPANCIES.md` when unmatched.
pub fn known_discrepancy_ids() -> &'static [&'static str] {
    &["depolarizing-family", "depolarizing-witness-family", "inefficiency-family"]
}
