//! Polygon-network assembly: global state construction with the frozen wiring
//! convention and exact joint outcome distributions.
//!
//! Wiring convention (frozen and documented): sources are tensored in order,
//! source s owning qubits (2s, 2s+1). Party i's two local qubits are, in
//! order, (qubit from source i-1 mod n, qubit from source i). For s < n-1,
//! source s sends its first qubit to party s and its second to party s+1; the
//! closing source n-1 sends its first qubit to party 0 and its second to
//! party n-1.

use crate::error::{Error, Result};
use crate::linalg::{cr, kron, permute_qubits, CMat};
use crate::povm::{make_povm, FourOutcomePovm, PovmSpec};
use crate::states::{make_state, StateSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const MIN_PARTIES: usize = 3;
pub const MAX_PARTIES: usize = 6;
pub const TABLE_SUM_TOL: f64 = 1e-9;

/// Declarative description of a full polygon-network experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub n: usize,
    pub sources: Vec<StateSpec>,
    pub povms: Vec<PovmSpec>,
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<()> {
        if !(MIN_PARTIES..=MAX_PARTIES).contains(&self.n) {
            return Err(Error::Network(format!(
                "n = {} outside [{MIN_PARTIES}, {MAX_PARTIES}]",
                self.n
            )));
        }
        if self.sources.len() != self.n || self.povms.len() != self.n {
            return Err(Error::Network("sources/povms length must equal n".into()));
        }
        Ok(())
    }
}

/// Exact joint outcome distribution over 4^n outcomes. The flat index packs
/// party outcomes base-4 with party 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    pub n: usize,
    pub probs: Vec<f64>,
}

impl ProbabilityTable {
    pub fn new(n: usize, mut probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << (2 * n) {
            return Err(Error::Network("probability table has wrong length".into()));
        }
        let mut sum = 0.0;
        for p in probs.iter_mut() {
            if *p < -1e-12 {
                return Err(Error::Network(format!("negative probability {p}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
            sum += *p;
        }
        if (sum - 1.0).abs() > TABLE_SUM_TOL {
            return Err(Error::Network(format!("probabilities sum to {sum}")));
        }
        Ok(Self { n, probs })
    }

    #[inline]
    pub fn index(&self, outcomes: &[usize]) -> usize {
        outcomes.iter().fold(0usize, |acc, &o| acc * 4 + o)
    }

    #[inline]
    pub fn get(&self, outcomes: &[usize]) -> f64 {
        self.probs[self.index(outcomes)]
    }

    /// Outcome of party i for a flat index.
    #[inline]
    pub fn outcome_of(&self, flat: usize, party: usize) -> usize {
        (flat >> (2 * (self.n - 1 - party))) & 3
    }
}

/// The qubit permutation that maps source order to party-blocked order:
/// output qubit 2i is party i's qubit from source i-1, output 2i+1 its qubit
/// from source i.
pub fn wiring_permutation(n: usize) -> Vec<usize> {
    let qubit_of = |src: usize, party: usize| -> usize {
        if src == n - 1 {
            if party == 0 {
                2 * src
            } else {
                2 * src + 1
            }
        } else if party == src {
            2 * src
        } else {
            2 * src + 1
        }
    };
    let mut perm = Vec::with_capacity(2 * n);
    for i in 0..n {
        let prev = (i + n - 1) % n;
        perm.push(qubit_of(prev, i));
        perm.push(qubit_of(i, i));
    }
    perm
}

/// Tensor the source states and permute into party-blocked qubit order.
pub fn global_state_from(states: &[CMat]) -> Result<CMat> {
    let n = states.len();
    if !(MIN_PARTIES..=MAX_PARTIES).contains(&n) {
        return Err(Error::Network(format!("n = {n} outside [{MIN_PARTIES}, {MAX_PARTIES}]")));
    }
    let mut rho = states[0].clone();
    for s in &states[1..] {
        rho = kron(&rho, s);
    }
    permute_qubits(&rho, &wiring_permutation(n))
}

pub fn global_state(spec: &NetworkSpec) -> Result<CMat> {
    spec.validate()?;
    let states: Vec<CMat> = spec.sources.iter().map(make_state).collect::<Result<_>>()?;
    global_state_from(&states)
}

/// 4x4 complex matrix in the bond space (x, x') used by the ring contraction.
type Bond = [[Complex64; 4]; 4];

/// Joint distribution via a transfer-matrix contraction around the polygon.
/// For each party i and outcome o, a 4x4 bond matrix A_i(o) absorbs the POVM
/// element and source i's state; p(o1..on) = Tr[A_0(o_0) ... A_{n-1}(o_{n-1})].
pub fn joint_distribution_from(states: &[CMat], povms: &[FourOutcomePovm]) -> Result<ProbabilityTable> {
    let n = states.len();
    if povms.len() != n {
        return Err(Error::Network("states/povms length mismatch".into()));
    }
    if !(MIN_PARTIES..=MAX_PARTIES).contains(&n) {
        return Err(Error::Network(format!("n = {n} outside [{MIN_PARTIES}, {MAX_PARTIES}]")));
    }
    // A_i(o)[(x,x'), (x+,x+')] = sum_{y,y'} E_i(o)[(x,y),(x',y')] * R_i[(y,y'),(x+,x+')]
    // where R_i[(y,y'),(x+,x+')] is source i's matrix element with its qubit
    // heading to party i as (y,y') and the one heading to party i+1 as (x+,x+').
    // Source i sends first qubit -> party i, second -> party i+1, except the
    // closing source n-1 which sends first -> party 0 (bond side) and second ->
    // party n-1 (local side).
    let mut transfer: Vec<[Bond; 4]> = Vec::with_capacity(n);
    for i in 0..n {
        let rho = &states[i];
        let rfun = |y: usize, yp: usize, xn: usize, xnp: usize| -> Complex64 {
            if i == n - 1 {
                // first qubit is the bond qubit (to party 0)
                rho[(2 * xn + y, 2 * xnp + yp)]
            } else {
                rho[(2 * y + xn, 2 * yp + xnp)]
            }
        };
        let mut per_outcome = [[[Complex64::new(0.0, 0.0); 4]; 4]; 4];
        for (o, slot) in per_outcome.iter_mut().enumerate() {
            let e = povms[i].element(o);
            for x in 0..2 {
                for xp in 0..2 {
                    for xn in 0..2 {
                        for xnp in 0..2 {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for y in 0..2 {
                                for yp in 0..2 {
                                    // E row index = (x, y), column = (x', y');
                                    // trace pairs E[r, c] with rho-side [c, r].
                                    acc += e[(2 * x + y, 2 * xp + yp)] * rfun(yp, y, xnp, xn);
                                }
                            }
                            slot[2 * x + xp][2 * xn + xnp] = acc;
                        }
                    }
                }
            }
        }
        transfer.push(per_outcome);
    }
    let total = 1usize << (2 * n);
    let mut probs = vec![0.0f64; total];
    let mut outcomes = vec![0usize; n];
    for (flat, p) in probs.iter_mut().enumerate() {
        for (i, o) in outcomes.iter_mut().enumerate() {
            *o = (flat >> (2 * (n - 1 - i))) & 3;
        }
        let mut m = transfer[0][outcomes[0]];
        for i in 1..n {
            let b = &transfer[i][outcomes[i]];
            let mut next = [[Complex64::new(0.0, 0.0); 4]; 4];
            for (r, next_row) in next.iter_mut().enumerate() {
                for (cidx, cell) in next_row.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..4 {
                        acc += m[r][k] * b[k][cidx];
                    }
                    *cell = acc;
                }
            }
            m = next;
        }
        let tr: Complex64 = (0..4).map(|k| m[k][k]).sum();
        *p = tr.re;
    }
    ProbabilityTable::new(n, probs)
}

pub fn joint_distribution(spec: &NetworkSpec) -> Result<ProbabilityTable> {
    spec.validate()?;
    let states: Vec<CMat> = spec.sources.iter().map(make_state).collect::<Result<_>>()?;
    let povms: Vec<FourOutcomePovm> = spec.povms.iter().map(make_povm).collect::<Result<_>>()?;
    joint_distribution_from(&states, &povms)
}

/// Slow reference path: p(o) = Tr[(E_1 ⊗ ... ⊗ E_n) rho_global]. Kept public
/// for cross-checks; quadratic in the global dimension.
pub fn joint_distribution_dense(states: &[CMat], povms: &[FourOutcomePovm]) -> Result<ProbabilityTable> {
    let n = states.len();
    let rho = global_state_from(states)?;
    let total = 1usize << (2 * n);
    let dim = 1usize << (2 * n);
    let mut probs = vec![0.0f64; total];
    for (flat, slot) in probs.iter_mut().enumerate() {
        let mut e = povms[0].element((flat >> (2 * (n - 1))) & 3).clone();
        for i in 1..n {
            e = kron(&e, povms[i].element((flat >> (2 * (n - 1 - i))) & 3));
        }
        let mut tr = cr(0.0);
        for r in 0..dim {
            for c2 in 0..dim {
                tr += e[(r, c2)] * rho[(c2, r)];
            }
        }
        *slot = tr.re;
    }
    ProbabilityTable::new(n, probs)
}
