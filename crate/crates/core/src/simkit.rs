//! State generators for the numerical experiments, and a sparse
//! stabilizer-basis simulator for Clifford circuits with few Pauli
//! rotations.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::clifford::{random_clifford, CliffordTableau, Gate};
use crate::entropy::shannon;
use crate::error::{check_cap, check_dim, MagicError, Result};
use crate::pauli::{PauliString, I_POW};
use crate::statevec::{Statevector, DENSE_CAP};

/// Largest chain for exact diagonalization.
pub const ISING_CAP: usize = 20;
/// Up to this size the Ising Hamiltonian is diagonalized densely.
const ISING_DENSE_MAX: usize = 8;
/// Largest `n` for GUE evolution.
pub const GUE_CAP: usize = 8;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl std::str::FromStr for Boundary {
    type Err = MagicError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "open" | "obc" | "o" => Ok(Boundary::Open),
            "periodic" | "pbc" | "p" => Ok(Boundary::Periodic),
            _ => Err(MagicError::Domain(format!("unknown boundary {s:?}"))),
        }
    }
}

fn ising_bonds(n: usize, bc: Boundary) -> Vec<(usize, usize)> {
    let mut bonds: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|j| (j, j + 1)).collect();
    if bc == Boundary::Periodic && n > 2 {
        bonds.push((n - 1, 0));
    }
    bonds
}

/// `H v` for `H = -Σ Z_j Z_{j+1} - h Σ X_j`.
pub fn ising_apply(n: usize, h: f64, bc: Boundary, v: &[f64]) -> Vec<f64> {
    let bonds = ising_bonds(n, bc);
    let mut out = vec![0.0; v.len()];
    for (s, o) in out.iter_mut().enumerate() {
        let diag: f64 = bonds
            .iter()
            .map(|&(a, b)| if ((s >> a) ^ (s >> b)) & 1 == 0 { -1.0 } else { 1.0 })
            .sum();
        let mut acc = diag * v[s];
        for q in 0..n {
            acc -= h * v[s ^ (1 << q)];
        }
        *o = acc;
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    norm
}

/// Lowest eigenpair of a real symmetric operator by restarted Lanczos with
/// full reorthogonalization.
fn lanczos_lowest(apply: impl Fn(&[f64]) -> Vec<f64>, start: Vec<f64>, tol: f64) -> (f64, Vec<f64>) {
    let dim = start.len();
    let m = dim.min(80);
    let mut v0 = start;
    normalize(&mut v0);
    let mut best = (f64::INFINITY, v0.clone());
    for _ in 0..200 {
        let mut basis: Vec<Vec<f64>> = vec![v0.clone()];
        let mut alphas = Vec::new();
        let mut betas = Vec::new();
        for j in 0..m {
            let mut w = apply(&basis[j]);
            alphas.push(dot(&w, &basis[j]));
            for _ in 0..2 {
                for b in &basis {
                    let p = dot(&w, b);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
                }
            }
            let beta = dot(&w, &w).sqrt();
            if beta < 1e-13 || j + 1 == m {
                break;
            }
            betas.push(beta);
            w.iter_mut().for_each(|x| *x /= beta);
            basis.push(w);
        }
        let k = alphas.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = t.symmetric_eigen();
        let (imin, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        let mut y = vec![0.0; dim];
        for (i, b) in basis.iter().take(k).enumerate() {
            let s = eig.eigenvectors[(i, imin)];
            y.iter_mut().zip(b).for_each(|(acc, x)| *acc += s * x);
        }
        normalize(&mut y);
        let hy = apply(&y);
        let resid = hy
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - theta * b).powi(2))
            .sum::<f64>()
            .sqrt();
        best = (theta, y.clone());
        if resid < tol {
            break;
        }
        v0 = y;
    }
    best
}

/// Ground state of the transverse-field Ising chain
/// `H = -Σ Z_j Z_{j+1} - h Σ X_j`, with its largest amplitude real positive
/// (for `h > 0` every amplitude is then non-negative). Periodic chains of
/// fewer than three sites have no wrap-around bond.
pub fn ising_ground_state(n: usize, h: f64, bc: Boundary) -> Result<Statevector> {
    check_cap("ising_ground_state", n, ISING_CAP)?;
    if n == 0 {
        return Err(MagicError::Domain("empty chain".into()));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(MagicError::Domain(format!(
            "transverse field must be positive (h = {h} gives a degenerate or ill-defined ground state)"
        )));
    }
    let dim = 1usize << n;
    let vec = if n <= ISING_DENSE_MAX {
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        for col in 0..dim {
            let mut e = vec![0.0; dim];
            e[col] = 1.0;
            for (row, v) in ising_apply(n, h, bc, &e).into_iter().enumerate() {
                m[(row, col)] = v;
            }
        }
        let eig = m.symmetric_eigen();
        let imin = (0..dim)
            .min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
            .expect("non-empty");
        eig.eigenvectors.column(imin).iter().cloned().collect::<Vec<f64>>()
    } else {
        lanczos_lowest(|v| ising_apply(n, h, bc, v), vec![1.0; dim], 1e-11).1
    };
    let amps = vec.into_iter().map(|a| cx(a, 0.0)).collect();
    Ok(Statevector::from_unnormalized(amps)?.fix_global_phase())
}

/// `‖Hψ - Eψ‖` with `E = <ψ|H|ψ>`, for real `ψ`.
pub fn ising_residual(psi: &Statevector, h: f64, bc: Boundary) -> f64 {
    let v: Vec<f64> = psi.amps().iter().map(|a| a.re).collect();
    let hv = ising_apply(psi.num_qubits(), h, bc, &v);
    let e = dot(&v, &hv);
    hv.iter().zip(&v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt()
}

/// `(|0> + e^{iθ}|1>)^{⊗n} / 2^{n/2}`.
pub fn product_theta_state(n: usize, theta: f64) -> Result<Statevector> {
    check_cap("product_theta_state", n, DENSE_CAP)?;
    let one = Statevector::from_unnormalized(vec![cx(1.0, 0.0), Complex64::from_polar(1.0, theta)])?;
    Ok(power(&one, n))
}

fn power(s: &Statevector, n: usize) -> Statevector {
    let mut out = s.clone();
    for _ in 1..n {
        out = out.tensor(s);
    }
    out
}

/// Angle `β` of the magic state, `cos 2β = 1/√3`.
pub fn chi_beta() -> f64 {
    (1.0 / 3f64.sqrt()).acos() / 2.0
}

/// `|χ> = e^{-iπ/4} cos β |0> + sin β |1>`; `|<X>| = |<Y>| = |<Z>| = 1/√3`.
pub fn chi_state() -> Statevector {
    let b = chi_beta();
    Statevector::from_unnormalized(vec![Complex64::from_polar(b.cos(), -FRAC_PI_4), cx(b.sin(), 0.0)]).expect("nonzero")
}

/// `W_n`: uniform superposition of the `n` single-excitation basis states.
pub fn w_state(n: usize) -> Result<Statevector> {
    check_cap("w_state", n, DENSE_CAP)?;
    if n == 0 {
        return Err(MagicError::Domain("w_state needs n >= 1".into()));
    }
    let amps = (0..1usize << n)
        .map(|i| cx(if i.count_ones() == 1 { 1.0 } else { 0.0 }, 0.0))
        .collect();
    Statevector::from_unnormalized(amps)
}

/// `(|0…0> + |1…1>) / √2`.
pub fn ghz_state(n: usize) -> Result<Statevector> {
    check_cap("ghz_state", n, DENSE_CAP)?;
    let mut amps = vec![cx(0.0, 0.0); 1 << n];
    amps[0] = cx(1.0, 0.0);
    amps[(1 << n) - 1] = cx(1.0, 0.0);
    Statevector::from_unnormalized(amps)
}

/// `𝒩_ε = 1 + ε² + 2ε cos^n β cos(nπ/4)`.
pub fn psi_eps_norm(n: usize, eps: f64) -> f64 {
    let nf = n as f64;
    1.0 + eps * eps + 2.0 * eps * chi_beta().cos().powi(n as i32) * (nf * FRAC_PI_4).cos()
}

/// `(|0>^{⊗n} + ε |χ>^{⊗n}) / √𝒩_ε`.
pub fn psi_eps(n: usize, eps: f64) -> Result<Statevector> {
    check_cap("psi_eps", n, DENSE_CAP)?;
    let chi_n = power(&chi_state(), n);
    let norm = psi_eps_norm(n, eps).sqrt();
    let mut amps: Vec<Complex64> = chi_n.amps().iter().map(|a| a * eps).collect();
    amps[0] += 1.0;
    amps.iter_mut().for_each(|a| *a /= norm);
    Statevector::from_amplitudes(amps)
}

/// `exp(-iHt)|0…0>` for `H = (A + A†)/2`, `A` with i.i.d. standard complex
/// Gaussian entries, scaled (not shifted) so that `max |λ| = 2`.
pub fn gue_evolved<R: Rng + ?Sized>(n: usize, t: f64, rng: &mut R) -> Result<Statevector> {
    check_cap("gue_evolved", n, GUE_CAP)?;
    let dim = 1usize << n;
    let a = DMatrix::<Complex64>::from_fn(dim, dim, |_, _| {
        cx(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let h = (&a + a.adjoint()) * cx(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let scale = 2.0 / eig.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    // coefficients of |0> in the eigenbasis: conj of the first row of V
    let v = &eig.eigenvectors;
    let coeffs: DVector<Complex64> = DVector::from_fn(dim, |k, _| {
        v[(0, k)].conj() * Complex64::from_polar(1.0, -eig.eigenvalues[k] * scale * t)
    });
    let out = v * coeffs;
    Statevector::from_unnormalized(out.iter().cloned().collect())
}

/// `C|0…0>` for a uniformly random Clifford `C`.
pub fn random_stabilizer_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Statevector> {
    random_clifford(n, rng).apply_to_state(&Statevector::zero_state(n))
}

/// Gate of a [`CircuitIR`].
#[derive(Clone, Debug, PartialEq)]
pub enum CircuitOp {
    Clifford(Gate),
    /// `exp(iθP)` for Hermitian `P`.
    Rotation {
        pauli: PauliString,
        theta: f64,
    },
}

/// Ordered gate list on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitIR {
    n: usize,
    ops: Vec<CircuitOp>,
}

#[derive(Serialize, Deserialize)]
struct OpLine {
    g: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    q: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
}

/// `T = diag(1, e^{iπ/4}) = e^{iπ/8} exp(-iπ/8 Z)`.
fn t_rotation(n: usize, q: usize, dagger: bool) -> CircuitOp {
    let pauli = PauliString::single(n, q, 'Z').expect("qubit in range");
    CircuitOp::Rotation {
        pauli,
        theta: if dagger { FRAC_PI_8 } else { -FRAC_PI_8 },
    }
}

impl CircuitIR {
    pub fn new(n: usize) -> Self {
        Self { n, ops: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn push(&mut self, op: CircuitOp) -> Result<()> {
        match &op {
            CircuitOp::Clifford(g) => {
                if let Some(&q) = g.qubits().iter().find(|&&q| q >= self.n) {
                    return Err(MagicError::Domain(format!("qubit {q} out of range for n = {}", self.n)));
                }
            }
            CircuitOp::Rotation { pauli, .. } => {
                check_dim(self.n, pauli.num_qubits())?;
                if !pauli.is_hermitian() {
                    return Err(MagicError::Domain(format!(
                        "rotation generator {pauli} is not Hermitian"
                    )));
                }
            }
        }
        self.ops.push(op);
        Ok(())
    }

    /// Parses JSON lines, e.g. `{"g":"H","q":[0]}` or
    /// `{"g":"ROT","p":"XIZ","theta":0.39}`. `T` and `TDG` become Z
    /// rotations. Blank lines and lines starting with `#` are skipped.
    pub fn from_jsonl(n: usize, text: &str) -> Result<Self> {
        let mut circ = Self::new(n);
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let perr = |msg: String| MagicError::Parse { line: line_no, msg };
            let op: OpLine = serde_json::from_str(trimmed).map_err(|e| perr(e.to_string()))?;
            let name = op.g.to_ascii_uppercase();
            let parsed = match name.as_str() {
                "ROT" => {
                    let label = op.p.ok_or_else(|| perr("ROT needs \"p\"".into()))?;
                    let pauli: PauliString = label.parse().map_err(|e: MagicError| perr(e.to_string()))?;
                    let theta = op.theta.ok_or_else(|| perr("ROT needs \"theta\"".into()))?;
                    CircuitOp::Rotation { pauli, theta }
                }
                "T" | "TDG" => match op.q.as_slice() {
                    [q] if *q < n => t_rotation(n, *q, name == "TDG"),
                    _ => return Err(perr(format!("{name} takes one qubit below {n}"))),
                },
                _ => CircuitOp::Clifford(Gate::from_name(&name, &op.q).map_err(|e| perr(e.to_string()))?),
            };
            circ.push(parsed).map_err(|e| perr(e.to_string()))?;
        }
        Ok(circ)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            let line = match op {
                CircuitOp::Clifford(g) => OpLine {
                    g: g.name().into(),
                    q: g.qubits(),
                    p: None,
                    theta: None,
                },
                CircuitOp::Rotation { pauli, theta } => OpLine {
                    g: "ROT".into(),
                    q: Vec::new(),
                    p: Some(pauli.to_string()),
                    theta: Some(*theta),
                },
            };
            out.push_str(&serde_json::to_string(&line).expect("plain struct"));
            out.push('\n');
        }
        out
    }

    pub fn rotation_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| matches!(o, CircuitOp::Rotation { .. }))
            .count()
    }

    /// Dense reference simulation from `|0…0>`.
    pub fn run_dense(&self) -> Result<Statevector> {
        check_cap("run_dense", self.n, DENSE_CAP)?;
        let mut psi = Statevector::zero_state(self.n);
        for op in &self.ops {
            match op {
                CircuitOp::Clifford(g) => g.apply(&mut psi)?,
                CircuitOp::Rotation { pauli, theta } => psi = psi.apply_pauli_rotation(pauli, *theta)?,
            }
        }
        Ok(psi)
    }
}

/// `U_C^{(0)} Π_k (T† ⊗ I) U_C^{(k)}` with fresh uniform Cliffords, as a
/// circuit. The dose is `diag(1, e^{-iπ/4})` on qubit 0; `U^{(n_t)}` acts
/// first.
pub fn doped_circuit<R: Rng + ?Sized>(n: usize, n_t: usize, rng: &mut R) -> Result<CircuitIR> {
    let cliffords: Vec<CliffordTableau> = (0..=n_t).map(|_| random_clifford(n, rng)).collect();
    let mut circ = CircuitIR::new(n);
    for k in (0..=n_t).rev() {
        for g in cliffords[k].synthesize() {
            circ.push(CircuitOp::Clifford(g))?;
        }
        if k > 0 {
            circ.push(t_rotation(n, 0, true))?;
        }
    }
    Ok(circ)
}

/// Dense state of [`doped_circuit`].
pub fn doped_clifford_state<R: Rng + ?Sized>(n: usize, n_t: usize, rng: &mut R) -> Result<Statevector> {
    doped_circuit(n, n_t, rng)?.run_dense()
}

/// `|ψ> = C Σ_i c_i |i>`: coefficients over the stabilizer basis
/// `C|i> = d_i C|0>`, where `d_i = C X^i C†` are destabilizers.
#[derive(Clone, Debug)]
pub struct SparseStabExpansion {
    tableau: CliffordTableau,
    coeffs: BTreeMap<u64, Complex64>,
    discarded_weight: f64,
    drift_angle: f64,
}

impl SparseStabExpansion {
    /// `|0…0>`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(MagicError::CapExceeded {
                what: "SparseStabExpansion",
                n,
                cap: 63,
            });
        }
        Ok(Self {
            tableau: CliffordTableau::identity(n),
            coeffs: BTreeMap::from([(0, cx(1.0, 0.0))]),
            discarded_weight: 0.0,
            drift_angle: 0.0,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.tableau.num_qubits()
    }

    pub fn tableau(&self) -> &CliffordTableau {
        &self.tableau
    }

    pub fn coeffs(&self) -> &BTreeMap<u64, Complex64> {
        &self.coeffs
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Total weight removed by truncation so far.
    pub fn discarded_weight(&self) -> f64 {
        self.discarded_weight
    }

    /// Upper bound on `1 - |<exact|self>|^2`. A renormalized truncation of
    /// weight `w` moves the state by Fubini-Study angle `asin(sqrt(w))`, and
    /// unitaries preserve angles, so the angles add.
    pub fn infidelity_bound(&self) -> f64 {
        self.drift_angle.min(FRAC_PI_2).sin().powi(2)
    }

    /// Shannon entropy of `|c_i|^2` (nats).
    pub fn coefficient_entropy(&self) -> f64 {
        let probs: Vec<f64> = self.coeffs.values().map(|c| c.norm_sqr()).collect();
        shannon(&probs)
    }

    /// Applies one gate. Cliffords only update the tableau; `exp(iθP)`
    /// acts on the coefficients through `P' = C† P C`.
    pub fn apply(&mut self, op: &CircuitOp) -> Result<()> {
        let n = self.num_qubits();
        match op {
            CircuitOp::Clifford(g) => {
                self.tableau = CliffordTableau::from_gate(n, *g)?.compose(&self.tableau)?;
            }
            CircuitOp::Rotation { pauli, theta } => {
                check_dim(n, pauli.num_qubits())?;
                if !pauli.is_hermitian() {
                    return Err(MagicError::Unsupported(format!(
                        "non-Hermitian rotation generator {pauli}"
                    )));
                }
                let local = self.tableau.inverse().conjugate(pauli)?;
                let (s, c) = theta.sin_cos();
                let mut next: BTreeMap<u64, Complex64> = BTreeMap::new();
                if local.x_mask() == 0 {
                    for (&i, &a) in &self.coeffs {
                        let (_, k) = local.act_on_basis(i);
                        let lambda = if k == 0 { 1.0 } else { -1.0 };
                        next.insert(i, a * Complex64::from_polar(1.0, theta * lambda));
                    }
                } else {
                    for (&i, &a) in &self.coeffs {
                        let (j, k) = local.act_on_basis(i);
                        *next.entry(i).or_default() += a * c;
                        *next.entry(j).or_default() += a * cx(0.0, s) * I_POW[k as usize];
                    }
                    next.retain(|_, v| v.norm_sqr() > 0.0);
                }
                self.coeffs = next;
            }
        }
        Ok(())
    }

    /// Drops coefficients with `|c| < eps`, renormalizes and accumulates
    /// the discarded weight.
    pub fn truncate(&mut self, eps: f64) {
        if eps <= 0.0 {
            return;
        }
        let dropped: f64 = self
            .coeffs
            .values()
            .filter(|c| c.norm() < eps)
            .map(|c| c.norm_sqr())
            .sum();
        if dropped == 0.0 {
            return;
        }
        self.coeffs.retain(|_, c| c.norm() >= eps);
        let total: f64 = self.coeffs.values().map(|c| c.norm_sqr()).sum();
        if total > 0.0 {
            let scale = total.sqrt().recip();
            self.coeffs.values_mut().for_each(|c| *c *= scale);
        }
        self.discarded_weight += dropped;
        self.drift_angle += dropped.min(1.0).sqrt().asin();
    }

    /// Dense state, up to global phase.
    pub fn to_statevector(&self) -> Result<Statevector> {
        let n = self.num_qubits();
        check_cap("sparse_to_statevector", n, DENSE_CAP)?;
        let mut amps = vec![cx(0.0, 0.0); 1 << n];
        for (&i, &c) in &self.coeffs {
            amps[i as usize] = c;
        }
        self.tableau.apply_to_state(&Statevector::from_unnormalized(amps)?)
    }
}

/// Outcome of [`simulate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub n: usize,
    pub eps: f64,
    /// Term count after each gate.
    pub term_counts: Vec<usize>,
    pub max_terms: usize,
    pub discarded_weight: f64,
    /// Bound on the infidelity from the truncations.
    pub infidelity_bound: f64,
    /// Shannon entropy of the final `|c_i|^2` (nats).
    pub final_entropy: f64,
    /// `|<dense|sparse>|^2`, when the dense check ran.
    pub fidelity: Option<f64>,
}

/// Runs `circ` on the sparse simulator, truncating at `eps` after every
/// rotation, optionally comparing with dense simulation.
pub fn simulate(circ: &CircuitIR, eps: f64, dense_check: bool) -> Result<(SparseStabExpansion, SimReport)> {
    let mut state = SparseStabExpansion::new(circ.num_qubits())?;
    let mut counts = Vec::with_capacity(circ.ops().len());
    for op in circ.ops() {
        state.apply(op)?;
        if matches!(op, CircuitOp::Rotation { .. }) {
            state.truncate(eps);
        }
        counts.push(state.term_count());
    }
    let fidelity = if dense_check {
        let dense = circ.run_dense()?;
        Some(dense.inner(&state.to_statevector()?)?.norm_sqr())
    } else {
        None
    };
    let report = SimReport {
        n: circ.num_qubits(),
        eps,
        max_terms: counts.iter().copied().max().unwrap_or(1),
        term_counts: counts,
        discarded_weight: state.discarded_weight(),
        infidelity_bound: state.infidelity_bound(),
        final_entropy: state.coefficient_entropy(),
        fidelity,
    };
    Ok((state, report))
}
