//! Local hidden-variable models for polygon networks: each source emits a
//! discrete shared variable; each party applies a response table mapping its
//! two incoming variables to a distribution over the four outcomes.

use crate::error::{Error, Result};
use crate::network::{wiring_permutation, ProbabilityTable};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};
use serde::{Deserialize, Serialize};

/// A trilocal / n-local hidden-variable model.
///
/// `source_dists[s][v]` is the probability that source s emits value v
/// (cardinality `cardinality`). `responses[i][a][b][o]` is party i's
/// probability of outcome o given left variable a (from its predecessor
/// source) and right variable b (from its own source), following the same
/// ring wiring as the quantum network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LhvModel {
    pub n: usize,
    pub cardinality: usize,
    pub source_dists: Vec<Vec<f64>>,
    pub responses: Vec<Vec<Vec<Vec<f64>>>>,
}

const DIST_TOL: f64 = 1e-9;

fn check_dist(d: &[f64], what: &str) -> Result<()> {
    if d.iter().any(|&v| v < -DIST_TOL) {
        return Err(Error::Model(format!("{what}: negative probability")));
    }
    let s: f64 = d.iter().sum();
    if (s - 1.0).abs() > 1e-8 {
        return Err(Error::Model(format!("{what}: sums to {s}, not 1")));
    }
    Ok(())
}

impl LhvModel {
    pub fn validate(&self) -> Result<()> {
        if !(3..=6).contains(&self.n) {
            return Err(Error::Model(format!("n = {} out of range", self.n)));
        }
        if self.cardinality == 0 {
            return Err(Error::Model("cardinality must be positive".into()));
        }
        if self.source_dists.len() != self.n || self.responses.len() != self.n {
            return Err(Error::Model("need one source and one response per party".into()));
        }
        for (s, d) in self.source_dists.iter().enumerate() {
            if d.len() != self.cardinality {
                return Err(Error::Model(format!("source {s}: wrong cardinality")));
            }
            check_dist(d, &format!("source {s}"))?;
        }
        for (i, r) in self.responses.iter().enumerate() {
            if r.len() != self.cardinality || r.iter().any(|a| a.len() != self.cardinality) {
                return Err(Error::Model(format!("party {i}: wrong response shape")));
            }
            for (a, row) in r.iter().enumerate() {
                for (b, d) in row.iter().enumerate() {
                    if d.len() != 4 {
                        return Err(Error::Model(format!("party {i}: response ({a},{b}) not 4-outcome")));
                    }
                    check_dist(d, &format!("party {i} response ({a},{b})"))?;
                }
            }
        }
        Ok(())
    }

    /// Source feeding party i from the left (shared with party i-1).
    #[inline]
    fn left_source(&self, i: usize) -> usize {
        if i == 0 {
            self.n - 1
        } else {
            i - 1
        }
    }

    /// Exact joint distribution of the model, by summing over all source
    /// value assignments with a ring transfer-matrix contraction analogous to
    /// the quantum evaluator: for fixed outcomes, chain over source values.
    pub fn distribution(&self) -> Result<ProbabilityTable> {
        self.validate()?;
        let n = self.n;
        let k = self.cardinality;
        let total = 1usize << (2 * n);
        let mut probs = vec![0.0f64; total];
        for (flat, slot) in probs.iter_mut().enumerate() {
            // M_i[a][b] = p_source_i(b) * p_i(o_i | a, b); chain and trace.
            // Party i's own (right) source is source i; its left variable
            // comes from source i-1 (mod n), so the chain index is the value
            // of source i-1 flowing into party i.
            let mut chain: Vec<Vec<f64>> = vec![vec![0.0; k]; k];
            for (a, row) in chain.iter_mut().enumerate() {
                row[a] = 1.0;
            }
            for i in 0..n {
                let o = (flat >> (2 * (n - 1 - i))) & 3;
                let left = self.left_source(i);
                let _ = left;
                let mut next = vec![vec![0.0f64; k]; k];
                for (start, nrow) in next.iter_mut().enumerate() {
                    for a in 0..k {
                        let c = chain[start][a];
                        if c == 0.0 {
                            continue;
                        }
                        for (b, &pb) in self.source_dists[i].iter().enumerate() {
                            nrow[b] += c * pb * self.responses[i][a][b][o];
                        }
                    }
                }
                chain = next;
            }
            // close the ring: the chain start variable is source n-1's value
            // feeding party 0; weight by its distribution on the diagonal.
            let mut p = 0.0;
            for (v, &pv) in self.source_dists[self.n - 1].iter().enumerate() {
                // source n-1's weight was already applied when party n-1
                // consumed it as its right source; the trace just closes the
                // loop.
                let _ = pv;
                p += chain[v][v];
            }
            *slot = p;
        }
        ProbabilityTable::new(n, probs)
    }

    /// Deterministic model picking, for each (a, b), a fixed outcome.
    pub fn deterministic(n: usize, cardinality: usize, source_dists: Vec<Vec<f64>>, choice: impl Fn(usize, usize, usize) -> usize) -> Self {
        let responses = (0..n)
            .map(|i| {
                (0..cardinality)
                    .map(|a| {
                        (0..cardinality)
                            .map(|b| {
                                let mut d = vec![0.0; 4];
                                d[choice(i, a, b) % 4] = 1.0;
                                d
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { n, cardinality, source_dists, responses }
    }
}

/// Draw a random model: source distributions and every response distribution
/// are Dirichlet(1) (uniform on the simplex).
pub fn sample_model(rng: &mut ChaCha8Rng, n: usize, cardinality: usize) -> Result<LhvModel> {
    let out_dir = Dirichlet::new(&[1.0f64; 4]).map_err(|e| Error::Model(e.to_string()))?;
    let source_dists = sample_source_dists(rng, n, cardinality)?;
    let responses = (0..n)
        .map(|_| {
            (0..cardinality)
                .map(|_| (0..cardinality).map(|_| out_dir.sample(rng).to_vec()).collect())
                .collect()
        })
        .collect();
    let m = LhvModel { n, cardinality, source_dists, responses };
    m.validate()?;
    Ok(m)
}

fn sample_source_dists(rng: &mut ChaCha8Rng, n: usize, cardinality: usize) -> Result<Vec<Vec<f64>>> {
    if cardinality == 1 {
        // Dirichlet needs at least two categories; a single-valued source is
        // the deterministic point distribution
        return Ok(vec![vec![1.0]; n]);
    }
    let src_dir = Dirichlet::new(&vec![1.0f64; cardinality]).map_err(|e| Error::Model(e.to_string()))?;
    Ok((0..n).map(|_| src_dir.sample(rng)).collect())
}

/// Draw a random *deterministic* model with Dirichlet source distributions.
pub fn sample_deterministic_model(rng: &mut ChaCha8Rng, n: usize, cardinality: usize) -> Result<LhvModel> {
    let source_dists = sample_source_dists(rng, n, cardinality)?;
    let picks: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|_| {
            (0..cardinality)
                .map(|_| (0..cardinality).map(|_| rng.gen_range(0..4)).collect())
                .collect()
        })
        .collect();
    let m = LhvModel::deterministic(n, cardinality, source_dists, move |i, a, b| picks[i][a][b]);
    m.validate()?;
    Ok(m)
}

/// Sanity helper used by tests: brute-force distribution by explicit
/// enumeration of all source assignments (O(cardinality^n * 4^n)).
pub fn distribution_bruteforce(m: &LhvModel) -> Result<ProbabilityTable> {
    m.validate()?;
    let n = m.n;
    let k = m.cardinality;
    let total = 1usize << (2 * n);
    let mut probs = vec![0.0f64; total];
    let assignments = k.pow(n as u32);
    // keep the wiring identical to the quantum network's qubit routing
    let _ = wiring_permutation(n);
    for asg in 0..assignments {
        let vals: Vec<usize> = (0..n).map(|s| (asg / k.pow(s as u32)) % k).collect();
        let mut w = 1.0;
        for (s, &v) in vals.iter().enumerate() {
            w *= m.source_dists[s][v];
        }
        if w == 0.0 {
            continue;
        }
        for (flat, slot) in probs.iter_mut().enumerate() {
            let mut p = w;
            for i in 0..n {
                let o = (flat >> (2 * (n - 1 - i))) & 3;
                let a = vals[m.left_source(i)];
                let b = vals[i];
                p *= m.responses[i][a][b][o];
                if p == 0.0 {
                    break;
                }
            }
            *slot += p;
        }
    }
    ProbabilityTable::new(n, probs)
}
