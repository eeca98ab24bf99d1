//! Basis-minimised stabilizerness asymmetry.
//!
//! A stabilizer basis is labelled by a [`StabBasisKey`] `(k, Q', c, R)`;
//! its `2^n` elements are
//!
//! ```text
//! |phi(q_d, t)> = 2^(-k/2) Σ_x (-1)^(q_d·x + xᵀQ'x) i^(c·x) |Rx + t>
//! ```
//!
//! with `x ∈ F_2^k`, `R` an `n x k` matrix in reduced column echelon form and
//! `t` a coset representative of `Im R` (zero on the pivot rows). The BMSA
//! `A_α(ψ)` is the minimum over keys of the Rényi-α entropy of
//! `|<phi|ψ>|^2`. Element `(q_d, t)` sits at index `t_index · 2^k + q_d`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{basis_to_tableau, CliffordTableau};
use crate::entropy::{fwht_complex, fwht_real, renyi};
use crate::error::{check_cap, check_dim, MagicError, Result};
use crate::f2linalg::{coset_reps_from_pivots, mask, pivot_patterns, q_binomial_u64, BitMatrix, PivotPattern};
use crate::pauli::{product_phase, PauliString, I_POW};
use crate::statevec::Statevector;

/// Largest `n` for the exhaustive searches.
pub const BRUTE_CAP: usize = 5;
/// Largest `n` for branch and bound.
pub const BB_CAP: usize = 10;
/// Values closer than this are ties, resolved by key order.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StabBasisKey {
    n: usize,
    k: usize,
    qp: BitMatrix,
    c: u64,
    r: BitMatrix,
}

/// Bits of `value` at the set positions of `positions`, packed low.
fn extract_bits(value: u64, mut positions: u64) -> u64 {
    let mut out = 0;
    let mut i = 0;
    while positions != 0 {
        let low = positions & positions.wrapping_neg();
        if value & low != 0 {
            out |= 1 << i;
        }
        i += 1;
        positions ^= low;
    }
    out
}

fn upper_positions(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |i| (i + 1..k).map(move |j| (i, j)))
}

/// Row masks of the strict upper-triangular matrix with code `code`.
fn qp_rows_from_code(k: usize, code: u64) -> Vec<u64> {
    let mut rows = vec![0u64; k];
    for (b, (i, j)) in upper_positions(k).enumerate() {
        if (code >> b) & 1 == 1 {
            rows[i] |= 1 << j;
        }
    }
    rows
}

impl StabBasisKey {
    /// Validates and builds a key. `qp` must be strictly upper triangular
    /// `k x k`, `c < 2^k`, and `r` an `n x k` RCEF matrix of rank `k`.
    pub fn new(n: usize, qp: BitMatrix, c: u64, r: BitMatrix) -> Result<Self> {
        let k = r.cols();
        check_dim(n, r.rows())?;
        if n > 32 {
            return Err(MagicError::CapExceeded {
                what: "StabBasisKey",
                n,
                cap: 32,
            });
        }
        if qp.rows() != k || qp.cols() != k {
            return Err(MagicError::Domain(format!("Q' must be {k}x{k}")));
        }
        for i in 0..k {
            for j in 0..=i {
                if qp.get(i, j) {
                    return Err(MagicError::Domain("Q' must be strictly upper triangular".into()));
                }
            }
        }
        if c >> k != 0 {
            return Err(MagicError::Domain(format!("c must have {k} bits")));
        }
        if r.rcef_pivots().is_none() || r.rcef() != r {
            return Err(MagicError::Domain("R must be in RCEF with full column rank".into()));
        }
        Ok(Self { n, k, qp, c, r })
    }

    /// The computational basis (`k = 0`).
    pub fn computational(n: usize) -> Self {
        Self {
            n,
            k: 0,
            qp: BitMatrix::zeros(0, 0),
            c: 0,
            r: BitMatrix::zeros(n, 0),
        }
    }

    fn from_parts(n: usize, columns: &[u64], qp_code: u64, c: u64) -> Self {
        let k = columns.len();
        let rows = qp_rows_from_code(k, qp_code);
        Self {
            n,
            k,
            qp: BitMatrix::from_rows(k, &rows),
            c,
            r: BitMatrix::from_columns(n, columns),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn qp(&self) -> &BitMatrix {
        &self.qp
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn r(&self) -> &BitMatrix {
        &self.r
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.r.rcef_pivots().expect("validated key")
    }

    fn qp_rows(&self) -> Vec<u64> {
        self.qp.row_masks()
    }

    fn qp_code(&self) -> u64 {
        upper_positions(self.k).enumerate().fold(
            0,
            |acc, (b, (i, j))| if self.qp.get(i, j) { acc | (1 << b) } else { acc },
        )
    }

    /// Index of `R` within its pivot pattern, as used by the enumeration.
    fn r_code(&self) -> u64 {
        let pat = PivotPattern::new(self.n, self.pivots());
        let mut code = 0u64;
        let mut shift = 0;
        let pivot_mask = self.pivots().iter().fold(0u64, |m, &p| m | (1 << p));
        for (j, &p) in self.pivots().iter().enumerate() {
            let free = mask(self.n) & !mask(p + 1) & !pivot_mask;
            code |= extract_bits(self.r.column_mask(j), free) << shift;
            shift += free.count_ones();
        }
        debug_assert_eq!(pat.columns(code), self.r.column_masks());
        code
    }

    fn order_tuple(&self) -> (usize, u64, u64, Vec<usize>, u64) {
        (self.k, self.qp_code(), self.c, self.pivots(), self.r_code())
    }

    /// Generators `g_1..g_n` of the unsigned stabilizer group shared by every
    /// element of the basis, as Hermitian strings. The first `k` are X-type
    /// and act on `|phi(q_d, t)>` with eigenvalue `(-1)^(q_d_j)`; the rest
    /// are Z-type, one per non-pivot row `r` in increasing order, with
    /// eigenvalue `(-1)^(t_r)`.
    pub fn stabilizer_generators(&self) -> Result<Vec<PauliString>> {
        let n = self.n;
        let pivots = self.pivots();
        let cols = self.r.column_masks();
        let rows = self.qp_rows();
        let mut gens = Vec::with_capacity(n);
        for j in 0..self.k {
            // row j of Q' + Q'ᵀ, diagonal c_j
            let mut ell = rows[j];
            for (i, &row) in rows.iter().enumerate() {
                if (row >> j) & 1 == 1 {
                    ell |= 1 << i;
                }
            }
            ell |= ((self.c >> j) & 1) << j;
            let w = pivots.iter().enumerate().fold(
                0u64,
                |acc, (i, &p)| if (ell >> i) & 1 == 1 { acc | (1 << p) } else { acc },
            );
            gens.push(PauliString::from_masks(n, cols[j], w, 0));
        }
        let pivot_mask = pivots.iter().fold(0u64, |m, &p| m | (1 << p));
        for row in (0..n).filter(|r| (pivot_mask >> r) & 1 == 0) {
            let mut w = 1u64 << row;
            for (i, &p) in pivots.iter().enumerate() {
                if (cols[i] >> row) & 1 == 1 {
                    w |= 1 << p;
                }
            }
            gens.push(PauliString::from_masks(n, 0, w, 0));
        }
        Ok(gens)
    }

    /// The basis element `|phi(q_d, t)>`; `t_index` indexes the coset
    /// representatives in increasing order.
    pub fn basis_state(&self, q_d: u64, t_index: u64) -> Result<Statevector> {
        let n = self.n;
        check_cap("basis_state", n, crate::statevec::DENSE_CAP)?;
        if q_d >> self.k != 0 || t_index >> (n - self.k) != 0 {
            return Err(MagicError::Domain("basis label out of range".into()));
        }
        let pivots = self.pivots();
        let t = coset_reps_from_pivots(n, &pivots)[t_index as usize];
        let cols = self.r.column_masks();
        let rows = self.qp_rows();
        let scale = (0.5f64).powf(self.k as f64 / 2.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for x in 0..1u64 << self.k {
            let y = (0..self.k).fold(t, |acc, j| if (x >> j) & 1 == 1 { acc ^ cols[j] } else { acc });
            let quad: u32 = (0..self.k)
                .map(|i| {
                    if (x >> i) & 1 == 1 {
                        (rows[i] & x).count_ones()
                    } else {
                        0
                    }
                })
                .sum();
            let e = 2 * ((q_d & x).count_ones() + quad) + (self.c & x).count_ones();
            amps[y as usize] = I_POW[(e % 4) as usize] * scale;
        }
        Statevector::from_amplitudes(amps)
    }

    /// All `2^n` basis elements in distribution order.
    pub fn basis_states(&self) -> Result<Vec<Statevector>> {
        let mut out = Vec::with_capacity(1 << self.n);
        for t in 0..1u64 << (self.n - self.k) {
            for q in 0..1u64 << self.k {
                out.push(self.basis_state(q, t)?);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> KeyJson {
        let bits = |m: &BitMatrix, r: usize| {
            (0..m.cols())
                .map(|c| if m.get(r, c) { '1' } else { '0' })
                .collect::<String>()
        };
        KeyJson {
            k: self.k,
            qp: (0..self.k).map(|i| bits(&self.qp, i)).collect(),
            c: (0..self.k)
                .map(|j| if (self.c >> j) & 1 == 1 { '1' } else { '0' })
                .collect(),
            r: (0..self.n).map(|i| bits(&self.r, i)).collect(),
        }
    }

    pub fn from_json(n: usize, j: &KeyJson) -> Result<Self> {
        let k = j.k;
        let parse_rows = |rows: &[String], cols: usize| -> Result<Vec<u64>> {
            rows.iter()
                .map(|s| {
                    check_dim(cols, s.len())?;
                    Ok(s.chars()
                        .enumerate()
                        .fold(0u64, |acc, (i, ch)| if ch == '1' { acc | (1 << i) } else { acc }))
                })
                .collect()
        };
        check_dim(k, j.qp.len())?;
        check_dim(n, j.r.len())?;
        let qp = BitMatrix::from_rows(k, &parse_rows(&j.qp, k)?);
        let r = BitMatrix::from_rows(k, &parse_rows(&j.r, k)?);
        let c = parse_rows(std::slice::from_ref(&j.c), k)?[0];
        Self::new(n, qp, c, r)
    }
}

impl PartialOrd for StabBasisKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Enumeration order: `k`, then `Q'`, then `c`, then `R`.
impl Ord for StabBasisKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.order_tuple().cmp(&other.order_tuple()))
    }
}

/// Serialized key: rows of `Q'` and `R` and the vector `c` as bit strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyJson {
    pub k: usize,
    #[serde(rename = "Qp")]
    pub qp: Vec<String>,
    pub c: String,
    #[serde(rename = "R")]
    pub r: Vec<String>,
}

/// A uniformly chosen `k`, pivot pattern and free bits; not uniform over keys.
pub fn random_key<R: Rng + ?Sized>(n: usize, rng: &mut R) -> StabBasisKey {
    let k = rng.random_range(0..=n);
    let pats = pivot_patterns(n, k);
    let pat = &pats[rng.random_range(0..pats.len())];
    let idx = rng.random_range(0..pat.count());
    let qcode = rng.random_range(0..1u64 << (k * k.saturating_sub(1) / 2));
    let c = rng.random_range(0..1u64 << k);
    StabBasisKey::from_parts(n, &pat.columns(idx), qcode, c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisDistribution {
    key: StabBasisKey,
    probs: Vec<f64>,
}

impl BasisDistribution {
    pub fn key(&self) -> &StabBasisKey {
        &self.key
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn entropy(&self, alpha: f64) -> f64 {
        renyi(&self.probs, alpha)
    }
}

/// Overlap kernel shared by every search: gathers amplitudes along the
/// cosets of one `R` and transforms them for each `(Q', c)`.
struct Kernel<'a> {
    n: usize,
    amps: &'a [Complex64],
}

struct Scratch {
    gathered: Vec<Complex64>,
    gathered_abs: Vec<f64>,
    buf: Vec<Complex64>,
    rbuf: Vec<f64>,
    probs: Vec<f64>,
    rx: Vec<u64>,
    quad: Vec<u8>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        let dim = 1 << n;
        Self {
            gathered: vec![Complex64::new(0.0, 0.0); dim],
            gathered_abs: vec![0.0; dim],
            buf: vec![Complex64::new(0.0, 0.0); dim],
            rbuf: vec![0.0; dim],
            probs: vec![0.0; dim],
            rx: vec![0; dim],
            quad: vec![0; dim],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Restriction {
    None,
    /// `c = 0`.
    Real,
    /// `Q' = 0`, `c = 0`.
    Positive,
}

/// Best leaf under one `R`.
#[derive(Clone, Debug)]
struct Leaf {
    value: f64,
    qp_code: u64,
    c: u64,
}

impl<'a> Kernel<'a> {
    fn gather(&self, cols: &[u64], pivots: &[usize], s: &mut Scratch) {
        let k = cols.len();
        let size = 1usize << k;
        s.rx[0] = 0;
        for x in 1..size {
            let low = x.trailing_zeros() as usize;
            s.rx[x] = s.rx[x & (x - 1)] ^ cols[low];
        }
        for (ti, t) in coset_reps_from_pivots(self.n, pivots).into_iter().enumerate() {
            let base = ti << k;
            for x in 0..size {
                let a = self.amps[(s.rx[x] ^ t) as usize];
                s.gathered[base + x] = a;
                s.gathered_abs[base + x] = a.norm();
            }
        }
    }

    /// Entropy at `Q' = 0, c = 0` with amplitudes replaced by moduli.
    fn abs_entropy(&self, k: usize, alpha: f64, s: &mut Scratch) -> f64 {
        let size = 1usize << k;
        let scale = 1.0 / size as f64;
        for base in (0..1usize << self.n).step_by(size) {
            let buf = &mut s.rbuf[..size];
            buf.copy_from_slice(&s.gathered_abs[base..base + size]);
            fwht_real(buf);
            for (p, v) in s.probs[base..base + size].iter_mut().zip(buf.iter()) {
                *p = v * v * scale;
            }
        }
        renyi(&s.probs, alpha)
    }

    fn fill_quad(&self, k: usize, rows: &[u64], s: &mut Scratch) {
        s.quad[0] = 0;
        for x in 1..1usize << k {
            let low = x.trailing_zeros() as usize;
            let rest = (x & (x - 1)) as u64;
            s.quad[x] = s.quad[x & (x - 1)] ^ ((rows[low] & rest).count_ones() & 1) as u8;
        }
    }

    /// Fills `s.probs` for the current gather and `(Q', c)`.
    fn leaf_probs(&self, k: usize, c: u64, s: &mut Scratch) {
        let size = 1usize << k;
        let scale = 1.0 / size as f64;
        for base in (0..1usize << self.n).step_by(size) {
            for x in 0..size {
                // conjugated phase: (-1)^{xQ'x} (-i)^{c·x}
                let e = 2 * s.quad[x] as u32 + 3 * (c & x as u64).count_ones();
                s.buf[x] = s.gathered[base + x] * I_POW[(e % 4) as usize];
            }
            fwht_complex(&mut s.buf[..size]);
            for (p, v) in s.probs[base..base + size].iter_mut().zip(s.buf.iter()) {
                *p = v.norm_sqr() * scale;
            }
        }
    }

    /// Minimizes over `(Q', c)` for a gathered `R`, keeping the first of
    /// tied leaves in enumeration order. Returns the leaf and leaf count.
    fn best_leaf(&self, k: usize, alpha: f64, restrict: Restriction, s: &mut Scratch) -> (Leaf, u64) {
        let nq = if restrict == Restriction::Positive {
            1
        } else {
            1u64 << (k * k.saturating_sub(1) / 2)
        };
        let nc = if restrict == Restriction::None { 1u64 << k } else { 1 };
        let mut best = Leaf {
            value: f64::INFINITY,
            qp_code: 0,
            c: 0,
        };
        for qcode in 0..nq {
            let rows = qp_rows_from_code(k, qcode);
            self.fill_quad(k, &rows, s);
            for c in 0..nc {
                self.leaf_probs(k, c, s);
                let v = renyi(&s.probs, alpha);
                if v < best.value - TIE_TOL {
                    best = Leaf {
                        value: v,
                        qp_code: qcode,
                        c,
                    };
                }
            }
        }
        (best, nq * nc)
    }
}

/// Probability distribution of `psi` in the basis `key`.
pub fn distribution_for_basis(psi: &Statevector, key: &StabBasisKey) -> Result<BasisDistribution> {
    check_dim(key.num_qubits(), psi.num_qubits())?;
    check_cap("distribution_for_basis", psi.num_qubits(), crate::statevec::DENSE_CAP)?;
    let kern = Kernel {
        n: psi.num_qubits(),
        amps: psi.amps(),
    };
    let mut s = Scratch::new(psi.num_qubits());
    let k = key.k();
    kern.gather(&key.r.column_masks(), &key.pivots(), &mut s);
    kern.fill_quad(k, &key.qp_rows(), &mut s);
    kern.leaf_probs(k, key.c, &mut s);
    Ok(BasisDistribution {
        key: key.clone(),
        probs: s.probs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BruteforceOverlap,
    BruteforcePauli,
    BranchBound,
    Anneal,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::BruteforceOverlap => "bruteforce-overlap",
            Method::BruteforcePauli => "bruteforce-pauli",
            Method::BranchBound => "branch-bound",
            Method::Anneal => "anneal",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BmsaResult {
    pub alpha: f64,
    /// Minimum entropy in nats.
    pub value: f64,
    pub key: StabBasisKey,
    pub method: Method,
    pub nodes_visited: u64,
    pub nodes_pruned: u64,
    pub wall_time_s: f64,
}

pub(crate) fn alpha_json(alpha: f64) -> serde_json::Value {
    if alpha.is_infinite() {
        serde_json::Value::String("inf".into())
    } else {
        serde_json::json!(alpha)
    }
}

impl BmsaResult {
    pub fn value_bits(&self) -> f64 {
        self.value / std::f64::consts::LN_2
    }

    pub fn tableau(&self) -> Result<CliffordTableau> {
        basis_to_tableau(&self.key)
    }

    /// JSON record; `wall_time_s` only when `timing` is set so that
    /// repeated runs serialize identically.
    pub fn to_json(&self, timing: bool) -> serde_json::Value {
        let mut v = serde_json::json!({
            "alpha": alpha_json(self.alpha),
            "value_nats": self.value,
            "value_bits": self.value_bits(),
            "key": self.key.to_json(),
            "tableau": self.tableau().ok().map(|t| t.to_json()),
            "method": self.method.tag(),
            "nodes": {"visited": self.nodes_visited, "pruned": self.nodes_pruned},
        });
        if timing {
            v["wall_time_s"] = serde_json::json!(self.wall_time_s);
        }
        v
    }
}

/// `true` if `(v, key)` beats the incumbent `(bv, bkey)`.
fn improves(v: f64, key: &StabBasisKey, bv: f64, bkey: &StabBasisKey) -> bool {
    v < bv - TIE_TOL || ((v - bv).abs() <= TIE_TOL && key < bkey)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Overlap,
    Pauli,
}

/// Unit of parallel work: a slice of the subspaces of one pivot pattern.
struct WorkItem {
    pattern: usize,
    start: u64,
    end: u64,
}

const CHUNK: u64 = 512;
const BATCH: usize = 256;

fn work_items(patterns: &[PivotPattern]) -> Vec<WorkItem> {
    let mut items = Vec::new();
    for (pi, p) in patterns.iter().enumerate() {
        let mut start = 0;
        while start < p.count() {
            let end = (start + CHUNK).min(p.count());
            items.push(WorkItem {
                pattern: pi,
                start,
                end,
            });
            start = end;
        }
    }
    items
}

struct SearchOutcome {
    value: f64,
    key: StabBasisKey,
    visited: u64,
    pruned: u64,
}

/// Searches every `k >= 1` basis, pruning an `R` when its bound exceeds
/// the incumbent. With `prune = false` this is exhaustive.
/// Best leaf of one work item, with visited and pruned counts.
type ItemOutcome = (Option<(f64, StabBasisKey)>, u64, u64);

fn search(
    psi: &Statevector,
    alpha: f64,
    restrict: Restriction,
    prune: bool,
    incumbent: (f64, StabBasisKey),
) -> SearchOutcome {
    let n = psi.num_qubits();
    let kern = Kernel { n, amps: psi.amps() };
    let (mut best_v, mut best_key) = incumbent;
    let mut visited = 0u64;
    let mut pruned = 0u64;
    for k in 1..=n {
        let patterns = pivot_patterns(n, k);
        let items = work_items(&patterns);
        for batch in items.chunks(BATCH) {
            let cutoff = best_v;
            let results: Vec<ItemOutcome> = batch
                .par_iter()
                .map_init(
                    || Scratch::new(n),
                    |s, item| {
                        let pat = &patterns[item.pattern];
                        let mut local: Option<(f64, StabBasisKey)> = None;
                        let (mut vis, mut pr) = (0u64, 0u64);
                        for idx in item.start..item.end {
                            let cols = pat.columns(idx);
                            kern.gather(&cols, pat.pivots(), s);
                            let (leaf, count) = if restrict == Restriction::Positive {
                                let v = kern.abs_entropy(k, alpha, s);
                                if prune && v > cutoff + TIE_TOL {
                                    pr += 1;
                                    continue;
                                }
                                (
                                    Leaf {
                                        value: v,
                                        qp_code: 0,
                                        c: 0,
                                    },
                                    1,
                                )
                            } else {
                                if prune && kern.abs_entropy(k, alpha, s) > cutoff + TIE_TOL {
                                    pr += 1;
                                    continue;
                                }
                                kern.best_leaf(k, alpha, restrict, s)
                            };
                            vis += count;
                            let key = StabBasisKey::from_parts(n, &cols, leaf.qp_code, leaf.c);
                            let better = match &local {
                                None => true,
                                Some((lv, lk)) => improves(leaf.value, &key, *lv, lk),
                            };
                            if better {
                                local = Some((leaf.value, key));
                            }
                        }
                        (local, vis, pr)
                    },
                )
                .collect();
            for (local, vis, pr) in results {
                visited += vis;
                pruned += pr;
                if let Some((v, key)) = local {
                    if improves(v, &key, best_v, &best_key) {
                        best_v = v;
                        best_key = key;
                    }
                }
            }
        }
    }
    SearchOutcome {
        value: best_v,
        key: best_key,
        visited,
        pruned,
    }
}

fn computational_incumbent(psi: &Statevector, alpha: f64) -> (f64, StabBasisKey) {
    (
        renyi(&psi.probabilities(), alpha),
        StabBasisKey::computational(psi.num_qubits()),
    )
}

/// Exact BMSA by exhaustive search (`n <= 5`).
pub fn bmsa_bruteforce(psi: &Statevector, alpha: f64, backend: Backend) -> Result<BmsaResult> {
    let n = psi.num_qubits();
    check_cap("bmsa_bruteforce", n, BRUTE_CAP)?;
    if alpha.is_nan() || alpha < 0.0 {
        return Err(MagicError::Domain(format!("alpha must be >= 0, got {alpha}")));
    }
    let start = Instant::now();
    let (value, key, visited, method) = match backend {
        Backend::Overlap => {
            let out = search(
                psi,
                alpha,
                Restriction::None,
                false,
                computational_incumbent(psi, alpha),
            );
            (out.value, out.key, out.visited + 1, Method::BruteforceOverlap)
        }
        Backend::Pauli => {
            let (v, key, count) = pauli_backend(psi, |d| renyi(d, alpha))?;
            (v, key, count, Method::BruteforcePauli)
        }
    };
    Ok(BmsaResult {
        alpha,
        value: value.max(0.0),
        key,
        method,
        nodes_visited: visited,
        nodes_pruned: 0,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Lower bound on the entropy of every basis sharing `r`: the `Q' = 0`,
/// `c = 0` distribution of `|psi|`. Proven for integer `alpha >= 2` and
/// `alpha = inf`; for `alpha = 1` it is conjectured and requires
/// `assume_alpha1`.
pub fn bound_for_r(psi: &Statevector, r: &BitMatrix, alpha: f64, assume_alpha1: bool) -> Result<f64> {
    check_alpha_bb(alpha, assume_alpha1)?;
    check_dim(psi.num_qubits(), r.rows())?;
    let pivots = r
        .rcef_pivots()
        .filter(|_| r.rcef() == *r)
        .ok_or_else(|| MagicError::Domain("R must be in RCEF with full column rank".into()))?;
    let kern = Kernel {
        n: psi.num_qubits(),
        amps: psi.amps(),
    };
    let mut s = Scratch::new(psi.num_qubits());
    kern.gather(&r.column_masks(), &pivots, &mut s);
    Ok(kern.abs_entropy(r.cols(), alpha, &mut s))
}

fn check_alpha_bb(alpha: f64, assume_alpha1: bool) -> Result<()> {
    let integer = alpha.is_finite() && alpha >= 2.0 && alpha.fract() == 0.0;
    if integer || alpha.is_infinite() || (alpha == 1.0 && assume_alpha1) {
        Ok(())
    } else if alpha == 1.0 {
        Err(MagicError::Unsupported(
            "alpha = 1 pruning bound is unproven; set assume_alpha1_bound".into(),
        ))
    } else {
        Err(MagicError::Unsupported(format!(
            "branch and bound needs alpha in {{1, 2, 3, ...}} or inf, got {alpha}"
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BbOptions {
    /// Accept the unproven `alpha = 1` bound.
    pub assume_alpha1_bound: bool,
    /// Restrict to `c = 0` (valid for real amplitudes).
    pub real_amplitudes: bool,
    /// Restrict to `Q' = 0, c = 0` (valid for non-negative amplitudes).
    pub positive_amplitudes: bool,
    /// Detect the two cases above after fixing the global phase.
    pub auto_detect: bool,
    /// Recheck against unpruned search when `n <= 4`.
    pub verify: bool,
}

impl Default for BbOptions {
    fn default() -> Self {
        Self {
            assume_alpha1_bound: true,
            real_amplitudes: false,
            positive_amplitudes: false,
            auto_detect: true,
            verify: false,
        }
    }
}

/// Exact BMSA by branch and bound over `R`.
pub fn bmsa_branch_bound(psi: &Statevector, alpha: f64, opts: BbOptions) -> Result<BmsaResult> {
    let n = psi.num_qubits();
    check_cap("bmsa_branch_bound", n, BB_CAP)?;
    check_alpha_bb(alpha, opts.assume_alpha1_bound)?;
    let start = Instant::now();
    let fixed = psi.fix_global_phase();
    let tol = 1e-12;
    let restrict = if opts.positive_amplitudes || (opts.auto_detect && fixed.is_nonnegative_real(tol)) {
        Restriction::Positive
    } else if opts.real_amplitudes || (opts.auto_detect && fixed.is_real(tol)) {
        Restriction::Real
    } else {
        Restriction::None
    };
    let target = if restrict == Restriction::None { psi } else { &fixed };
    let out = search(target, alpha, restrict, true, computational_incumbent(psi, alpha));
    if opts.verify && n <= 4 {
        let full = search(
            psi,
            alpha,
            Restriction::None,
            false,
            computational_incumbent(psi, alpha),
        );
        if (full.value - out.value).abs() > 1e-9 {
            return Err(MagicError::Tolerance(format!(
                "branch and bound gave {}, exhaustive search {}",
                out.value, full.value
            )));
        }
    }
    Ok(BmsaResult {
        alpha,
        value: out.value.max(0.0),
        key: out.key,
        method: Method::BranchBound,
        nodes_visited: out.visited + 1,
        nodes_pruned: out.pruned,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Branch and bound when `alpha` is supported, exhaustive search otherwise.
pub fn bmsa(psi: &Statevector, alpha: f64) -> Result<BmsaResult> {
    if check_alpha_bb(alpha, true).is_ok() {
        bmsa_branch_bound(psi, alpha, BbOptions::default())
    } else {
        bmsa_bruteforce(psi, alpha, Backend::Overlap)
    }
}

// ---------------------------------------------------------------------------
// Pauli-vector route

#[inline]
fn sym(a: u64, b: u64, n: usize) -> u32 {
    let m = mask(n);
    (((a & m) & (b >> n)) ^ ((a >> n) & (b & m))).count_ones() & 1
}

/// Fully reduced echelon basis of the span, sorted decreasing.
pub(crate) fn canonical_span(vectors: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &v in vectors {
        let mut r = v;
        for &b in &basis {
            r = r.min(r ^ b);
        }
        if r != 0 {
            let lead = 63 - r.leading_zeros();
            for b in basis.iter_mut() {
                if (*b >> lead) & 1 == 1 {
                    *b ^= r;
                }
            }
            basis.push(r);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

/// Every Lagrangian subspace of F_2^{2n} (vectors packed `x | z << n`) as a
/// canonical basis. Each subspace `T` is generated once, from its canonical
/// parent `{t ∈ T : t_p = 0}` where `p` is the lowest pivot of `T`.
pub fn lagrangian_subspaces(n: usize) -> Result<&'static [Vec<u64>]> {
    check_cap("lagrangian_subspaces", n, BRUTE_CAP)?;
    static CACHE: [OnceLock<Vec<Vec<u64>>>; BRUTE_CAP + 1] = [const { OnceLock::new() }; BRUTE_CAP + 1];
    Ok(CACHE[n].get_or_init(|| {
        // (echelon basis with decreasing leads, lowest pivot)
        let mut level: Vec<Vec<u64>> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for s in &level {
                let min_pivot = s.last().map(|v| 63 - v.leading_zeros() as usize).unwrap_or(2 * n);
                let support = s.iter().fold(0u64, |m, v| m | v);
                for p in (0..min_pivot).filter(|p| (support >> p) & 1 == 0) {
                    for w in 0..1u64 << p {
                        let v = (1u64 << p) | w;
                        if s.iter().all(|&b| sym(b, v, n) == 0) && sym(v, v, n) == 0 {
                            let mut t = s.clone();
                            t.push(v);
                            next.push(t);
                        }
                    }
                }
            }
            level = next;
        }
        let mut out: Vec<Vec<u64>> = level.iter().map(|b| canonical_span(b)).collect();
        out.sort();
        out
    }))
}

/// Map from canonical group label to the key of the matching basis.
pub(crate) fn key_by_group(n: usize) -> Result<&'static HashMap<Vec<u64>, StabBasisKey>> {
    check_cap("key_by_group", n, BRUTE_CAP)?;
    static CACHE: [OnceLock<HashMap<Vec<u64>, StabBasisKey>>; BRUTE_CAP + 1] =
        [const { OnceLock::new() }; BRUTE_CAP + 1];
    Ok(CACHE[n].get_or_init(|| {
        let mut map = HashMap::new();
        for key in all_keys(n) {
            let gens = key.stabilizer_generators().expect("valid key");
            let packed: Vec<u64> = gens.iter().map(|g| g.x_mask() | (g.z_mask() << n)).collect();
            let prev = map.insert(canonical_span(&packed), key);
            assert!(prev.is_none(), "two keys share a stabilizer group");
        }
        map
    }))
}

/// Every key for `n` qubits, in enumeration order.
pub fn all_keys(n: usize) -> Vec<StabBasisKey> {
    let mut keys = Vec::new();
    for k in 0..=n {
        let nq = 1u64 << (k * k.saturating_sub(1) / 2);
        for qcode in 0..nq {
            for c in 0..1u64 << k {
                for pat in pivot_patterns(n, k) {
                    for idx in 0..pat.count() {
                        keys.push(StabBasisKey::from_parts(n, &pat.columns(idx), qcode, c));
                    }
                }
            }
        }
    }
    keys
}

/// Number of stabilizer bases `Σ_k 2^{k(k-1)/2} 2^k [n k]_2`.
pub fn count_bases(n: usize) -> Result<u64> {
    (0..=n).try_fold(0u64, |acc, k| {
        Ok(acc + (1u64 << (k * k.saturating_sub(1) / 2)) * (1u64 << k) * q_binomial_u64(n, k)?)
    })
}

/// Outcome distribution of measuring the group `gens` (packed vectors):
/// `c_u = <psi| g^u |psi>` with the signed products `g^u`, then
/// `d = H^{⊗m} c / 2^m`.
pub(crate) fn group_distribution(spectrum: &[f64], n: usize, gens: &[u64]) -> Vec<f64> {
    let m = gens.len();
    let size = 1usize << m;
    let lo = mask(n);
    // (packed, phase exponent) of g^u
    let mut elems = vec![(0u64, 0u8); size];
    let mut c = vec![0.0; size];
    c[0] = 1.0;
    for u in 1..size {
        let low = u.trailing_zeros() as usize;
        let (prev, ph) = elems[u & (u - 1)];
        let g = gens[low];
        let extra = product_phase(prev & lo, prev >> n, g & lo, g >> n);
        let v = prev ^ g;
        let phase = (ph + extra) % 4;
        debug_assert!(phase.is_multiple_of(2));
        elems[u] = (v, phase);
        c[u] = if phase == 2 { -1.0 } else { 1.0 } * spectrum[v as usize];
    }
    fwht_real(&mut c);
    for v in c.iter_mut() {
        *v = (*v / size as f64).max(0.0);
    }
    c
}

/// Minimizes `f(d)` over all full groups; returns value, key and group count.
fn pauli_backend(psi: &Statevector, f: impl Fn(&[f64]) -> f64 + Sync) -> Result<(f64, StabBasisKey, u64)> {
    let n = psi.num_qubits();
    let spectrum = psi.pauli_spectrum()?;
    let groups = lagrangian_subspaces(n)?;
    let keys = key_by_group(n)?;
    let values: Vec<f64> = groups
        .par_iter()
        .map(|g| f(&group_distribution(spectrum.values(), n, g)))
        .collect();
    let mut best: Option<(f64, &StabBasisKey)> = None;
    for (g, &v) in groups.iter().zip(&values) {
        let key = &keys[g];
        match best {
            Some((bv, bk)) if !improves(v, key, bv, bk) => {}
            _ => best = Some((v, key)),
        }
    }
    let (v, key) = best.expect("at least one group");
    Ok((v, key.clone(), groups.len() as u64))
}

/// `A_2^lin = min_G 1 - Σ_{P∈G} <P>^2 / 2^n` over full stabilizer groups,
/// with the minimizing key. Satisfies `-ln(1 - A_2^lin) = A_2`.
pub fn a2_lin_exact(psi: &Statevector) -> Result<(f64, StabBasisKey)> {
    let n = psi.num_qubits();
    check_cap("a2_lin_exact", n, BRUTE_CAP)?;
    // Σ_u c_u^2 / 2^n = Σ_s d_s^2
    let (v, key, _) = pauli_backend(psi, |d| 1.0 - d.iter().map(|p| p * p).sum::<f64>())?;
    Ok((v.max(0.0), key))
}

/// Largest squared overlap with any stabilizer state, with its basis key,
/// element index and value. Exhaustive, `n <= 5`.
pub fn max_stabilizer_overlap(psi: &Statevector) -> Result<(f64, StabBasisKey, usize)> {
    let n = psi.num_qubits();
    check_cap("stabilizer_fidelity", n, BRUTE_CAP)?;
    let keys = all_keys(n);
    let found: Vec<(f64, usize)> = keys
        .par_iter()
        .map(|key| {
            let d = distribution_for_basis(psi, key).expect("valid key");
            d.probs().iter().enumerate().fold(
                (f64::NEG_INFINITY, 0),
                |(m, i), (j, &p)| {
                    if p > m + TIE_TOL {
                        (p, j)
                    } else {
                        (m, i)
                    }
                },
            )
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for (ki, &(p, idx)) in found.iter().enumerate() {
        if p > best.0 + TIE_TOL {
            best = (p, ki, idx);
        }
    }
    Ok((best.0.min(1.0), keys[best.1].clone(), best.2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Statevector {
        let amps = (0..1 << n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Statevector::from_unnormalized(amps).unwrap()
    }

    fn chi() -> Statevector {
        let beta = (1.0 / 3f64.sqrt()).acos() / 2.0;
        let ph = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        Statevector::from_amplitudes(vec![ph * beta.cos(), Complex64::new(beta.sin(), 0.0)]).unwrap()
    }

    /// Naive overlap oracle built from explicit basis vectors.
    fn naive_probs(psi: &Statevector, key: &StabBasisKey) -> Vec<f64> {
        key.basis_states()
            .unwrap()
            .iter()
            .map(|phi| phi.inner(psi).unwrap().norm_sqr())
            .collect()
    }

    #[test]
    fn key_examples() {
        let d = distribution_for_basis(&Statevector::basis_state(3, 5), &StabBasisKey::computational(3)).unwrap();
        assert_eq!(d.probs()[5], 1.0);
        let had = StabBasisKey::new(3, BitMatrix::zeros(3, 3), 0, BitMatrix::identity(3)).unwrap();
        let d = distribution_for_basis(&Statevector::zero_state(3), &had).unwrap();
        assert!(d.probs().iter().all(|&p| (p - 0.125).abs() < 1e-15));
        assert!(StabBasisKey::new(2, BitMatrix::zeros(1, 1), 2, BitMatrix::from_columns(2, &[1])).is_err());
        assert!(StabBasisKey::new(2, BitMatrix::zeros(1, 1), 0, BitMatrix::from_columns(2, &[3])).is_ok());
        assert!(StabBasisKey::new(2, BitMatrix::zeros(1, 1), 0, BitMatrix::from_columns(2, &[2])).is_ok());
        assert!(StabBasisKey::new(2, BitMatrix::zeros(1, 1), 0, BitMatrix::from_columns(2, &[0])).is_err());
    }

    #[test]
    fn distribution_matches_naive_overlaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..40 {
            let psi = random_state(3, &mut rng);
            let key = random_key(3, &mut rng);
            let fast = distribution_for_basis(&psi, &key).unwrap();
            let slow = naive_probs(&psi, &key);
            for (a, b) in fast.probs().iter().zip(&slow) {
                assert!((a - b).abs() < 1e-10);
            }
            assert!((fast.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn basis_states_are_orthonormal_and_stabilized() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let key = random_key(3, &mut rng);
            let states = key.basis_states().unwrap();
            for (i, a) in states.iter().enumerate() {
                for (j, b) in states.iter().enumerate() {
                    let ip = a.inner(b).unwrap().norm();
                    assert!((ip - (i == j) as u8 as f64).abs() < 1e-12);
                }
            }
            let gens = key.stabilizer_generators().unwrap();
            for (idx, s) in states.iter().enumerate() {
                let (q_d, t) = (idx as u64 & mask(key.k()), idx as u64 >> key.k());
                for (j, g) in gens.iter().enumerate() {
                    let bit = if j < key.k() {
                        (q_d >> j) & 1
                    } else {
                        (t >> (j - key.k())) & 1
                    };
                    let expected = if bit == 1 { -1.0 } else { 1.0 };
                    assert!((s.expectation(g).unwrap() - expected).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn key_ordering_follows_enumeration() {
        for n in 1..=3 {
            let keys = all_keys(n);
            let mut sorted = keys.clone();
            sorted.sort();
            let mut by_k: Vec<&StabBasisKey> = keys.iter().collect();
            by_k.sort_by_key(|k| k.order_tuple());
            assert_eq!(sorted.iter().collect::<Vec<_>>(), by_k);
            assert_eq!(keys.len() as u64, count_bases(n).unwrap());
        }
    }

    #[test]
    fn basis_counts() {
        let expected = [1u64, 3, 15, 135, 2295];
        for n in 1..=4 {
            assert_eq!(count_bases(n).unwrap(), expected[n]);
            assert_eq!(lagrangian_subspaces(n).unwrap().len() as u64, expected[n]);
            assert_eq!(key_by_group(n).unwrap().len() as u64, expected[n]);
        }
    }

    #[test]
    fn stabilizer_states_have_zero_bmsa() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let key = random_key(3, &mut rng);
            let q = rng.random_range(0..1u64 << key.k());
            let t = rng.random_range(0..1u64 << (3 - key.k()));
            let s = key.basis_state(q, t).unwrap();
            for alpha in [0.5, 1.0, 2.0, f64::INFINITY] {
                let r = bmsa_bruteforce(&s, alpha, Backend::Overlap).unwrap();
                assert!(r.value < 1e-9, "{alpha} {}", r.value);
                let own = distribution_for_basis(&s, &r.key).unwrap();
                assert!(own.entropy(alpha) < 1e-9);
            }
        }
    }

    #[test]
    fn chi_bmsa_is_binary_entropy() {
        let p: f64 = (1.0 + 1.0 / 3f64.sqrt()) / 2.0;
        let h = -p * p.ln() - (1.0 - p) * (1.0 - p).ln();
        assert!((h - 0.5157).abs() < 1e-4);
        for backend in [Backend::Overlap, Backend::Pauli] {
            let r = bmsa_bruteforce(&chi(), 1.0, backend).unwrap();
            assert!((r.value - h).abs() < 1e-12);
        }
        // all three single-qubit bases tie
        for key in all_keys(1) {
            let d = distribution_for_basis(&chi(), &key).unwrap();
            assert!((d.entropy(1.0) - h).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_state_is_free() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let w = Statevector::from_amplitudes(vec![z, Complex64::new(s, 0.0), Complex64::new(s, 0.0), z]).unwrap();
        for alpha in [1.0, 2.0, f64::INFINITY] {
            assert!(bmsa_bruteforce(&w, alpha, Backend::Overlap).unwrap().value < 1e-12);
            assert!(bmsa_branch_bound(&w, alpha, BbOptions::default()).unwrap().value < 1e-12);
        }
    }

    #[test]
    fn backends_agree_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=3 {
            for _ in 0..8 {
                let psi = random_state(n, &mut rng);
                for alpha in [1.0, 2.0, 3.0, f64::INFINITY] {
                    let a = bmsa_bruteforce(&psi, alpha, Backend::Overlap).unwrap();
                    let b = bmsa_bruteforce(&psi, alpha, Backend::Pauli).unwrap();
                    let c = bmsa_branch_bound(&psi, alpha, BbOptions::default()).unwrap();
                    assert!((a.value - b.value).abs() < 1e-9, "{n} {alpha} {} {}", a.value, b.value);
                    assert!((a.value - c.value).abs() < 1e-9);
                    assert_eq!(a.key, c.key);
                }
            }
        }
    }

    #[test]
    fn real_and_positive_fast_paths_agree_with_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let re: Vec<Complex64> = (0..8)
                .map(|_| Complex64::new(rng.sample(StandardNormal), 0.0))
                .collect();
            let psi = Statevector::from_unnormalized(re).unwrap();
            let pos = psi.abs();
            for s in [&psi, &pos] {
                for alpha in [1.0, 2.0] {
                    let a = bmsa_bruteforce(s, alpha, Backend::Overlap).unwrap();
                    let c = bmsa_branch_bound(
                        s,
                        alpha,
                        BbOptions {
                            verify: true,
                            ..Default::default()
                        },
                    )
                    .unwrap();
                    assert!((a.value - c.value).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn bound_is_below_every_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let psi = random_state(3, &mut rng);
        for _ in 0..20 {
            let key = random_key(3, &mut rng);
            let b = bound_for_r(&psi, key.r(), 2.0, false).unwrap();
            let nq = 1u64 << (key.k() * key.k().saturating_sub(1) / 2);
            for q in 0..nq {
                for c in 0..1u64 << key.k() {
                    let leaf = StabBasisKey::from_parts(3, &key.r().column_masks(), q, c);
                    assert!(b <= distribution_for_basis(&psi, &leaf).unwrap().entropy(2.0) + 1e-12);
                }
            }
            let zero = bound_for_r(&Statevector::zero_state(3), key.r(), 2.0, false).unwrap();
            let base = StabBasisKey::from_parts(3, &key.r().column_masks(), 0, 0);
            let own = distribution_for_basis(&Statevector::zero_state(3), &base).unwrap();
            assert!((zero - own.entropy(2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn unsupported_alpha_is_rejected() {
        let psi = Statevector::zero_state(2);
        assert!(matches!(
            bmsa_branch_bound(&psi, 1.5, BbOptions::default()),
            Err(MagicError::Unsupported(_))
        ));
        let opts = BbOptions {
            assume_alpha1_bound: false,
            ..Default::default()
        };
        assert!(matches!(
            bmsa_branch_bound(&psi, 1.0, opts),
            Err(MagicError::Unsupported(_))
        ));
        assert!(bmsa_bruteforce(&Statevector::zero_state(6), 1.0, Backend::Overlap).is_err());
    }

    #[test]
    fn a2_lin_examples() {
        let (v, _) = a2_lin_exact(&chi()).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let (z, _) = a2_lin_exact(&Statevector::plus_state(3)).unwrap();
        assert!(z.abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let psi = random_state(2, &mut rng);
            let (lin, _) = a2_lin_exact(&psi).unwrap();
            let a2 = bmsa_bruteforce(&psi, 2.0, Backend::Overlap).unwrap().value;
            assert!((-(1.0 - lin).ln() - a2).abs() < 1e-9);
        }
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let key = random_key(4, &mut rng);
            let text = serde_json::to_string(&key.to_json()).unwrap();
            let back: KeyJson = serde_json::from_str(&text).unwrap();
            assert_eq!(StabBasisKey::from_json(4, &back).unwrap(), key);
        }
    }

    #[test]
    fn result_json_is_stable_without_timing() {
        let r = bmsa_branch_bound(&chi(), 2.0, BbOptions::default()).unwrap();
        let j = r.to_json(false);
        assert!(j.get("wall_time_s").is_none());
        assert_eq!(j["method"], "branch-bound");
        assert!(r.to_json(true).get("wall_time_s").is_some());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn bmsa_range_and_hierarchy(seed in any::<u64>(), n in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = random_state(n, &mut rng);
            let mut prev = f64::INFINITY;
            for alpha in [0.5, 1.0, 2.0, f64::INFINITY] {
                let v = bmsa_bruteforce(&psi, alpha, Backend::Overlap).unwrap().value;
                prop_assert!(v >= 0.0 && v <= n as f64 * std::f64::consts::LN_2 + 1e-12);
                prop_assert!(v <= prev + 1e-9);
                prev = v;
            }
        }
    }
}
