//! Entanglement detection and the triangle-vs-linear-network comparison.

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::network::joint_distribution_from;
use crate::povm::FourOutcomePovm;
use crate::signs::{evaluate_trilocal, linear_nlocal_value, standard_triple_a, SignFunction};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntanglementVerdict {
    AllEntangled,
    Inconclusive,
}

const PURITY_TOL: f64 = 1e-9;

/// Witness-based entanglement detection: if the triangle inequality (with the
/// standard witness placement) is violated, every source state must be
/// entangled. Only defined for pure sources; a mixed input is refused because
/// no conclusion follows in that case.
pub fn entanglement_detect(states: &[CMat], basis: &FourOutcomePovm) -> Result<EntanglementVerdict> {
    if states.len() != 3 {
        return Err(Error::Parameter("entanglement_detect expects 3 states".into()));
    }
    for (i, rho) in states.iter().enumerate() {
        let purity = crate::linalg::purity(rho);
        if (purity - 1.0).abs() > PURITY_TOL {
            return Err(Error::State(format!(
                "state {i} is mixed (purity {purity:.6}); detection is only conclusive for pure states"
            )));
        }
    }
    let povms = vec![basis.clone(); 3];
    let p = joint_distribution_from(states, &povms)?;
    let [f, g, h] = standard_triple_a();
    let r = evaluate_trilocal(&p, &f, &g, &h)?;
    Ok(if r.violated { EntanglementVerdict::AllEntangled } else { EntanglementVerdict::Inconclusive })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareLinearRecord {
    pub triangle_s: f64,
    pub linear_value: f64,
    pub triangle_only: bool,
}

/// Evaluate the triangle witness and the linear-chain singular-value
/// criterion on the same sources; `triangle_only` marks parameters where the
/// triangle detects non-n-locality but the linear chain cannot.
pub fn compare_linear(
    states: &[CMat],
    povms: &[FourOutcomePovm],
    f: &SignFunction,
    g: &SignFunction,
    h: &SignFunction,
) -> Result<CompareLinearRecord> {
    let p = joint_distribution_from(states, povms)?;
    let r = evaluate_trilocal(&p, f, g, h)?;
    let linear_value = linear_nlocal_value(states)?;
    Ok(CompareLinearRecord {
        triangle_s: r.s_value,
        linear_value,
        triangle_only: r.violated && linear_value <= 1.0,
    })
}
