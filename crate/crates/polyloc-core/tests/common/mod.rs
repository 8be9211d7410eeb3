//! Shared helpers for integration tests: an independent statevector oracle
//! for three-party pure-state networks, built on plain index arithmetic.

use num_complex::Complex64;
use polyloc_core::linalg::CMat;
use polyloc_core::povm::FourOutcomePovm;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn rand_c(rng: &mut ChaCha8Rng) -> C {
    c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
}

/// Random normalized two-qubit statevector (basis order |00>,|01>,|10>,|11>).
pub fn random_state_vec(rng: &mut ChaCha8Rng) -> [C; 4] {
    let mut v = [c(0.0, 0.0); 4];
    for slot in v.iter_mut() {
        *slot = rand_c(rng);
    }
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for slot in v.iter_mut() {
        *slot /= norm;
    }
    v
}

/// Random orthonormal four-vector basis by Gram-Schmidt on random vectors.
pub fn random_basis(rng: &mut ChaCha8Rng) -> [[C; 4]; 4] {
    let mut basis = [[c(0.0, 0.0); 4]; 4];
    let mut row = 0;
    while row < 4 {
        let mut v: [C; 4] = std::array::from_fn(|_| rand_c(rng));
        for prev in basis.iter().take(row) {
            let overlap: C = prev.iter().zip(v.iter()).map(|(p, x)| p.conj() * x).sum();
            for (slot, p) in v.iter_mut().zip(prev.iter()) {
                *slot -= overlap * p;
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue; // degenerate draw; redraw
        }
        for slot in v.iter_mut() {
            *slot /= norm;
        }
        basis[row] = v;
        row += 1;
    }
    basis
}

/// Oracle probabilities for n = 3: sources are pure statevectors psi[s],
/// each party measures basis[i]. Party i holds (qubit from source i-1 mod 3,
/// qubit from source i); source s sends its first qubit to party s and its
/// second to party s+1, except the closing source 2, which sends its first
/// qubit to party 0 and its second to party 2.
pub fn oracle_probs(psi: &[[C; 4]; 3], basis: &[[[C; 4]; 4]; 3]) -> Vec<f64> {
    let mut probs = vec![0.0f64; 64];
    for o1 in 0..4 {
        for o2 in 0..4 {
            for o3 in 0..4 {
                let mut inner = c(0.0, 0.0);
                for bits in 0..64usize {
                    let b0a = (bits >> 5) & 1;
                    let b0b = (bits >> 4) & 1;
                    let b1a = (bits >> 3) & 1;
                    let b1b = (bits >> 2) & 1;
                    let b2a = (bits >> 1) & 1;
                    let b2b = bits & 1;
                    let amp = psi[0][2 * b0b + b1a]
                        * psi[1][2 * b1b + b2a]
                        * psi[2][2 * b0a + b2b];
                    let meas = basis[0][o1][2 * b0a + b0b].conj()
                        * basis[1][o2][2 * b1a + b1b].conj()
                        * basis[2][o3][2 * b2a + b2b].conj();
                    inner += meas * amp;
                }
                probs[16 * o1 + 4 * o2 + o3] = inner.norm_sqr();
            }
        }
    }
    probs
}

/// Density matrix |psi><psi| of a statevector.
pub fn projector_of(v: &[C; 4]) -> CMat {
    let mut rho = CMat::zeros(4, 4);
    for r in 0..4 {
        for cidx in 0..4 {
            rho[(r, cidx)] = v[r] * v[cidx].conj();
        }
    }
    rho
}

/// Production POVMs from oracle bases.
pub fn povms_of(bases: &[[[C; 4]; 4]; 3]) -> Vec<FourOutcomePovm> {
    bases
        .iter()
        .map(|b| FourOutcomePovm::from_basis(b.map(|v| v.to_vec())).unwrap())
        .collect()
}
