//! Upper bounds on the BMSA by simulated annealing over Clifford circuits.
//!
//! The chain holds a reference Clifford `C_ref` and the rotated state
//! `C_ref ψ`. A move picks, for a neighbouring pair `(j, j+1)`, one of the
//! 15 coset representatives of `C_z` in the two-qubit Clifford group (the
//! trivial coset included) by heat-bath sampling on the participation
//! entropy, and updates `C_ref ← C_i C_ref`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{two_qubit_coset_reps, CliffordTableau, Gate, TableauJson};
use crate::entropy::renyi;
use crate::error::{check_cap, check_dim, MagicError, Result};
use crate::statevec::Statevector;

/// Largest `n` accepted by the annealer.
pub const ANNEAL_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct AnnealConfig {
    pub alpha: f64,
    /// Strictly positive, descending.
    pub temperatures: Vec<f64>,
    pub sweeps_per_temperature: usize,
    pub seed: u64,
    pub initial_tableau: Option<CliffordTableau>,
    /// Independent chains (seeds `seed, seed + 1, …`), best one reported.
    pub restarts: usize,
}

/// `points` values spaced geometrically from `hi` down to `lo`.
pub fn geometric_temperatures(hi: f64, lo: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![hi];
    }
    let ratio = (lo / hi).powf(1.0 / (points - 1) as f64);
    (0..points).map(|i| hi * ratio.powi(i as i32)).collect()
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            temperatures: geometric_temperatures(1e-1, 1e-4, 16),
            sweeps_per_temperature: 2,
            seed: 0,
            initial_tableau: None,
            restarts: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub sweep: usize,
    pub temperature: f64,
    pub best_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnealResult {
    /// Lowest participation entropy seen (nats).
    pub best_value: f64,
    /// `C` with `S_part(C† ψ) = best_value`.
    pub best_tableau: CliffordTableau,
    /// Running best after every sweep.
    pub trace: Vec<TracePoint>,
    pub accepted_moves: u64,
}

impl AnnealResult {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("sweep,temperature,best_value\n");
        for p in &self.trace {
            out.push_str(&format!("{},{:e},{}\n", p.sweep, p.temperature, p.best_value));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let tab: TableauJson = self.best_tableau.to_json();
        serde_json::json!({
            "best_value_nats": self.best_value,
            "best_value_bits": self.best_value / std::f64::consts::LN_2,
            "best_tableau": tab,
            "accepted_moves": self.accepted_moves,
            "trace": self.trace,
        })
    }
}

/// `H_1 CNOT_{1,2} CNOT_{2,3} … CNOT_{N-1,N}` as an operator product
/// (the rightmost CNOT acts first). Maps the GHZ state to `|0…0>`.
pub fn ising_initial_guess(n: usize) -> Result<CliffordTableau> {
    if n < 2 {
        return Err(MagicError::Domain("ising_initial_guess needs n >= 2".into()));
    }
    let mut t = CliffordTableau::identity(n);
    for j in (0..n - 1).rev() {
        t = t.then(Gate::Cnot(j, j + 1))?;
    }
    t.then(Gate::H(0))
}

fn check_config(cfg: &AnnealConfig) -> Result<()> {
    if cfg.temperatures.is_empty() {
        return Err(MagicError::Domain("empty temperature grid".into()));
    }
    if cfg.temperatures.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(MagicError::Domain("temperatures must be positive and finite".into()));
    }
    if cfg.temperatures.windows(2).any(|w| w[1] > w[0]) {
        return Err(MagicError::Domain("temperatures must be descending".into()));
    }
    if cfg.alpha.is_nan() || cfg.alpha < 0.0 {
        return Err(MagicError::Domain(format!("alpha must be >= 0, got {}", cfg.alpha)));
    }
    Ok(())
}

/// Applies a 4x4 unitary to qubits `(j, j+1)` of `amps` into `out`.
fn apply_pair(amps: &[Complex64], u: &[Complex64], j: usize, out: &mut [Complex64]) {
    let (b0, b1) = (1usize << j, 1usize << (j + 1));
    for base in 0..amps.len() {
        if base & (b0 | b1) != 0 {
            continue;
        }
        let idx = [base, base | b0, base | b1, base | b0 | b1];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for r in 0..4 {
            out[idx[r]] = u[4 * r] * v[0] + u[4 * r + 1] * v[1] + u[4 * r + 2] * v[2] + u[4 * r + 3] * v[3];
        }
    }
}

fn part_entropy(amps: &[Complex64], alpha: f64, probs: &mut Vec<f64>) -> f64 {
    probs.clear();
    probs.extend(amps.iter().map(|a| a.norm_sqr()));
    renyi(probs, alpha)
}

fn run_chain(psi: &Statevector, cfg: &AnnealConfig, seed: u64) -> Result<AnnealResult> {
    let n = psi.num_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c_ref = cfg
        .initial_tableau
        .clone()
        .unwrap_or_else(|| CliffordTableau::identity(n));
    let mut phi = c_ref.apply_to_state(psi)?.into_amps();
    let reps = two_qubit_coset_reps();
    let unitaries: Vec<Vec<Complex64>> = reps.iter().map(|r| r.to_unitary()).collect();
    let stay: Vec<bool> = reps.iter().map(|r| r.preserves_z_strings()).collect();
    let mut probs = Vec::with_capacity(phi.len());
    let mut cur = part_entropy(&phi, cfg.alpha, &mut probs);
    let mut best = (cur, c_ref.clone());
    let mut trace = Vec::new();
    let mut accepted = 0u64;
    let mut candidates: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); phi.len()]; reps.len()];
    let mut values = vec![0.0; reps.len()];
    let mut sweep = 0;
    for &temp in &cfg.temperatures {
        for _ in 0..cfg.sweeps_per_temperature {
            for j in 0..n.saturating_sub(1) {
                for (i, u) in unitaries.iter().enumerate() {
                    apply_pair(&phi, u, j, &mut candidates[i]);
                    values[i] = part_entropy(&candidates[i], cfg.alpha, &mut probs);
                }
                let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
                let weights: Vec<f64> = values.iter().map(|v| (-(v - lo) / temp).exp()).collect();
                let total: f64 = weights.iter().sum();
                let mut pick = rng.random::<f64>() * total;
                let mut choice = weights.len() - 1;
                for (i, w) in weights.iter().enumerate() {
                    if pick < *w {
                        choice = i;
                        break;
                    }
                    pick -= w;
                }
                std::mem::swap(&mut phi, &mut candidates[choice]);
                c_ref = reps[choice].embed(n, &[j, j + 1])?.compose(&c_ref)?;
                cur = values[choice];
                if !stay[choice] {
                    accepted += 1;
                }
                if cur < best.0 {
                    best = (cur, c_ref.clone());
                }
            }
            trace.push(TracePoint {
                sweep,
                temperature: temp,
                best_value: best.0,
            });
            sweep += 1;
        }
    }
    let _ = cur;
    Ok(AnnealResult {
        best_value: best.0.max(0.0),
        best_tableau: best.1.inverse(),
        trace,
        accepted_moves: accepted,
    })
}

/// Minimizes the participation entropy of `C ψ` over Cliffords reachable by
/// nearest-neighbour moves. Deterministic for a fixed seed.
pub fn anneal_minimize(psi: &Statevector, cfg: &AnnealConfig) -> Result<AnnealResult> {
    let n = psi.num_qubits();
    check_cap("anneal_minimize", n, ANNEAL_CAP)?;
    check_config(cfg)?;
    if let Some(t) = &cfg.initial_tableau {
        check_dim(n, t.num_qubits())?;
    }
    let runs: Vec<Result<AnnealResult>> = (0..cfg.restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| run_chain(psi, cfg, cfg.seed.wrapping_add(r)))
        .collect();
    let mut best: Option<AnnealResult> = None;
    for r in runs {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.best_value < b.best_value) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one chain"))
}
