//! Clifford tableaux.
//!
//! A tableau stores the images `C X_j C†` and `C Z_j C†` of the `2n`
//! generators as signed Pauli strings. Composition is operator order:
//! `a.compose(&b)` is `a·b`, i.e. `b` acts first.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bmsa::StabBasisKey;
use crate::error::{check_dim, MagicError, Result};
use crate::f2linalg::BitMatrix;
use crate::pauli::PauliString;
use crate::statevec::{gates, Statevector};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CliffordTableau {
    n: usize,
    /// `images[j]` is the image of `X_j`, `images[n + j]` that of `Z_j`.
    images: Vec<PauliString>,
}

/// Elementary Clifford gates understood by tableaux and statevectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
}

impl Gate {
    pub fn inverse(self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            g => g,
        }
    }

    pub fn qubits(self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![q],
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Swap(a, b) => vec![a, b],
        }
    }

    /// Looks a gate up by name (`H S SDG X Y Z CNOT CX CZ SWAP`).
    pub fn from_name(name: &str, qubits: &[usize]) -> Result<Gate> {
        let upper = name.to_ascii_uppercase();
        let one = |f: fn(usize) -> Gate| match qubits {
            [q] => Ok(f(*q)),
            _ => Err(MagicError::Domain(format!("{name} takes one qubit, got {qubits:?}"))),
        };
        let two = |f: fn(usize, usize) -> Gate| match qubits {
            [a, b] if a != b => Ok(f(*a, *b)),
            _ => Err(MagicError::Domain(format!(
                "{name} takes two distinct qubits, got {qubits:?}"
            ))),
        };
        match upper.as_str() {
            "H" => one(Gate::H),
            "S" => one(Gate::S),
            "SDG" => one(Gate::Sdg),
            "X" => one(Gate::X),
            "Y" => one(Gate::Y),
            "Z" => one(Gate::Z),
            "CNOT" | "CX" => two(Gate::Cnot),
            "CZ" => two(Gate::Cz),
            "SWAP" => two(Gate::Swap),
            _ => Err(MagicError::Unsupported(format!("gate {name}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::X(_) => "X",
            Gate::Y(_) => "Y",
            Gate::Z(_) => "Z",
            Gate::Cnot(..) => "CNOT",
            Gate::Cz(..) => "CZ",
            Gate::Swap(..) => "SWAP",
        }
    }

    /// Applies the gate's unitary to a statevector.
    pub fn apply(self, psi: &mut Statevector) -> Result<()> {
        match self {
            Gate::H(q) => psi.apply_gate_mut(&gates::hadamard(), &[q]),
            Gate::S(q) => psi.apply_gate_mut(&gates::s(), &[q]),
            Gate::Sdg(q) => psi.apply_gate_mut(&gates::s_dag(), &[q]),
            Gate::X(q) => psi.apply_gate_mut(&gates::pauli_x(), &[q]),
            Gate::Z(q) => psi.apply_gate_mut(&gates::pauli_z(), &[q]),
            Gate::Y(q) => {
                let i = Complex64::new(0.0, 1.0);
                let z = Complex64::new(0.0, 0.0);
                psi.apply_gate_mut(&[z, -i, i, z], &[q])
            }
            Gate::Cnot(c, t) => psi.apply_gate_mut(&gates::cnot(), &[c, t]),
            Gate::Cz(a, b) => psi.apply_gate_mut(&gates::cz(), &[a, b]),
            Gate::Swap(a, b) => {
                let o = Complex64::new(1.0, 0.0);
                let z = Complex64::new(0.0, 0.0);
                let m = [o, z, z, z, z, z, o, z, z, o, z, z, z, z, z, o];
                psi.apply_gate_mut(&m, &[a, b])
            }
        }
    }
}

fn pauli_on(n: usize, ops: &[(usize, char)], phase: u8) -> PauliString {
    let mut p = PauliString::identity(n);
    for &(q, c) in ops {
        let (x, z) = match c {
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            _ => (false, false),
        };
        p.set(q, x, z);
    }
    p.with_phase(phase)
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let images = (0..2 * n)
            .map(|i| {
                let (q, c) = if i < n { (i, 'X') } else { (i - n, 'Z') };
                pauli_on(n, &[(q, c)], 0)
            })
            .collect();
        Self { n, images }
    }

    /// Builds a tableau from generator images, validating Hermiticity and
    /// the symplectic relations.
    pub fn from_images(n: usize, images: Vec<PauliString>) -> Result<Self> {
        check_dim(2 * n, images.len())?;
        for p in &images {
            check_dim(n, p.num_qubits())?;
        }
        let t = Self { n, images };
        if !t.is_valid() {
            return Err(MagicError::Domain("images violate the symplectic relations".into()));
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn image_x(&self, q: usize) -> &PauliString {
        &self.images[q]
    }

    pub fn image_z(&self, q: usize) -> &PauliString {
        &self.images[self.n + q]
    }

    pub fn images(&self) -> &[PauliString] {
        &self.images
    }

    /// Images are Hermitian and obey the canonical commutation relations.
    pub fn is_valid(&self) -> bool {
        let n = self.n;
        if self.images.iter().any(|p| !p.is_hermitian() || p.num_qubits() != n) {
            return false;
        }
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                let expected = (b == a + n) as u8;
                if self.images[a].symplectic_product(&self.images[b]).ok() != Some(expected) {
                    return false;
                }
            }
        }
        true
    }

    /// `C P C†` with exact sign.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        check_dim(self.n, p.num_qubits())?;
        let mut acc = PauliString::identity(self.n);
        let mut extra = p.phase_exp() as u32;
        for q in 0..self.n {
            let (xb, zb) = (p.x_bit(q), p.z_bit(q));
            if xb {
                acc = acc.multiply(&self.images[q])?;
            }
            if zb {
                acc = acc.multiply(&self.images[self.n + q])?;
            }
            if xb && zb {
                extra += 1;
            }
        }
        let phase = ((acc.phase_exp() as u32 + extra) % 4) as u8;
        Ok(acc.with_phase(phase))
    }

    /// Operator product `self · inner` (`inner` acts first).
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        check_dim(self.n, inner.n)?;
        let images = inner
            .images
            .iter()
            .map(|p| self.conjugate(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: self.n, images })
    }

    pub fn inverse(&self) -> Self {
        let n = self.n;
        let gens = Self::identity(n).images;
        let mut images = Vec::with_capacity(2 * n);
        for g in &gens {
            // M^{-1} = Ω Mᵀ Ω on the symplectic part.
            let mut p = PauliString::identity(n);
            for q in 0..n {
                let x = self.images[n + q].symplectic_product(g).unwrap() == 1;
                let z = self.images[q].symplectic_product(g).unwrap() == 1;
                p.set(q, x, z);
            }
            let back = self.conjugate(&p).unwrap();
            debug_assert_eq!(back.unsigned(), *g);
            images.push(p.with_phase(back.phase_exp()));
        }
        Self { n, images }
    }

    /// Tableau of a single named gate on `n` qubits.
    pub fn from_gate(n: usize, gate: Gate) -> Result<Self> {
        for q in gate.qubits() {
            if q >= n {
                return Err(MagicError::Dimension {
                    expected: n,
                    got: q + 1,
                });
            }
        }
        let mut t = Self::identity(n);
        let img = &mut t.images;
        match gate {
            Gate::H(q) => {
                img[q] = pauli_on(n, &[(q, 'Z')], 0);
                img[n + q] = pauli_on(n, &[(q, 'X')], 0);
            }
            Gate::S(q) => img[q] = pauli_on(n, &[(q, 'Y')], 0),
            Gate::Sdg(q) => img[q] = pauli_on(n, &[(q, 'Y')], 2),
            Gate::X(q) => img[n + q] = pauli_on(n, &[(q, 'Z')], 2),
            Gate::Z(q) => img[q] = pauli_on(n, &[(q, 'X')], 2),
            Gate::Y(q) => {
                img[q] = pauli_on(n, &[(q, 'X')], 2);
                img[n + q] = pauli_on(n, &[(q, 'Z')], 2);
            }
            Gate::Cnot(c, tq) => {
                img[c] = pauli_on(n, &[(c, 'X'), (tq, 'X')], 0);
                img[n + tq] = pauli_on(n, &[(c, 'Z'), (tq, 'Z')], 0);
            }
            Gate::Cz(a, b) => {
                img[a] = pauli_on(n, &[(a, 'X'), (b, 'Z')], 0);
                img[b] = pauli_on(n, &[(a, 'Z'), (b, 'X')], 0);
            }
            Gate::Swap(a, b) => {
                img.swap(a, b);
                img.swap(n + a, n + b);
            }
        }
        Ok(t)
    }

    /// Named gate constructor: `H S SDG X Y Z CNOT CZ SWAP`.
    pub fn named_gate(n: usize, name: &str, targets: &[usize]) -> Result<Self> {
        Self::from_gate(n, Gate::from_name(name, targets)?)
    }

    /// `g · self`.
    pub fn then(&self, gate: Gate) -> Result<Self> {
        Self::from_gate(self.n, gate)?.compose(self)
    }

    /// Gate list whose product equals this tableau up to global phase, in
    /// application order (first element acts first).
    ///
    /// The tableau is reduced to the identity qubit by qubit with H, S,
    /// CNOT, CZ and SWAP, then signs are cleared with X and Z.
    pub fn synthesize(&self) -> Vec<Gate> {
        let n = self.n;
        let mut work = self.clone();
        let mut ops: Vec<Gate> = Vec::new();
        let mut push = |work: &mut CliffordTableau, g: Gate| {
            *work = work.then(g).expect("gate within range");
            ops.push(g);
        };
        for i in 0..n {
            // X_i image -> ±X_i
            let xi = work.images[i].clone();
            if !(i..n).any(|q| xi.x_bit(q)) {
                let j = (i..n)
                    .find(|&q| xi.z_bit(q))
                    .expect("image of X_i is trivial on qubits >= i");
                push(&mut work, Gate::H(j));
            }
            let xi = work.images[i].clone();
            let j = (i..n).find(|&q| xi.x_bit(q)).unwrap();
            if j != i {
                push(&mut work, Gate::Swap(i, j));
            }
            let xi = work.images[i].clone();
            for m in i + 1..n {
                if xi.x_bit(m) {
                    push(&mut work, Gate::Cnot(i, m));
                }
            }
            if work.images[i].z_bit(i) {
                push(&mut work, Gate::S(i));
            }
            let xi = work.images[i].clone();
            for m in i + 1..n {
                if xi.z_bit(m) {
                    push(&mut work, Gate::Cz(i, m));
                }
            }
            // Z_i image -> ±Z_i, keeping X_i fixed
            if work.images[n + i].x_bit(i) {
                push(&mut work, Gate::H(i));
                push(&mut work, Gate::S(i));
                push(&mut work, Gate::H(i));
            }
            for m in i + 1..n {
                let zi = work.images[n + i].clone();
                if zi.x_bit(m) {
                    if zi.z_bit(m) {
                        push(&mut work, Gate::S(m));
                    }
                    push(&mut work, Gate::H(m));
                }
                if work.images[n + i].z_bit(m) {
                    push(&mut work, Gate::Cnot(m, i));
                }
            }
        }
        for i in 0..n {
            if work.images[i].phase_exp() == 2 {
                push(&mut work, Gate::Z(i));
            }
            if work.images[n + i].phase_exp() == 2 {
                push(&mut work, Gate::X(i));
            }
        }
        debug_assert_eq!(work, Self::identity(n));
        ops.iter().rev().map(|g| g.inverse()).collect()
    }

    /// `C|psi>` up to global phase.
    pub fn apply_to_state(&self, psi: &Statevector) -> Result<Statevector> {
        check_dim(self.n, psi.num_qubits())?;
        let mut out = psi.clone();
        for g in self.synthesize() {
            g.apply(&mut out)?;
        }
        Ok(out)
    }

    /// Dense unitary (row-major) realizing the tableau up to global phase.
    pub fn to_unitary(&self) -> Vec<Complex64> {
        assert!(self.n <= 10);
        let dim = 1usize << self.n;
        let circuit = self.synthesize();
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for col in 0..dim {
            let mut psi = Statevector::basis_state(self.n, col as u64);
            for g in &circuit {
                g.apply(&mut psi).expect("valid gate");
            }
            for (row, a) in psi.amps().iter().enumerate() {
                m[row * dim + col] = *a;
            }
        }
        m
    }

    /// Symplectic part as a `2n x 2n` matrix whose column `j` is the image
    /// of generator `j` written as `(x | z)`.
    pub fn symplectic_matrix(&self) -> BitMatrix {
        let n = self.n;
        let mut m = BitMatrix::zeros(2 * n, 2 * n);
        for (j, p) in self.images.iter().enumerate() {
            for q in 0..n {
                m.set(q, j, p.x_bit(q));
                m.set(n + q, j, p.z_bit(q));
            }
        }
        m
    }

    pub fn signs(&self) -> Vec<bool> {
        self.images.iter().map(|p| p.phase_exp() == 2).collect()
    }

    /// Maps every Z-type string to a Z-type string (a permutation with phases).
    pub fn preserves_z_strings(&self) -> bool {
        (0..self.n).all(|q| self.image_z(q).x_words().iter().all(|&w| w == 0))
    }

    /// Embeds a tableau on `targets.len()` qubits into `n` qubits.
    pub fn embed(&self, n: usize, targets: &[usize]) -> Result<Self> {
        check_dim(self.n, targets.len())?;
        let mut out = Self::identity(n);
        let lift = |p: &PauliString| {
            let mut q = PauliString::identity(n);
            for (local, &global) in targets.iter().enumerate() {
                q.set(global, p.x_bit(local), p.z_bit(local));
            }
            q.with_phase(p.phase_exp())
        };
        for (local, &global) in targets.iter().enumerate() {
            if global >= n {
                return Err(MagicError::Dimension {
                    expected: n,
                    got: global + 1,
                });
            }
            out.images[global] = lift(&self.images[local]);
            out.images[n + global] = lift(&self.images[self.n + local]);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> TableauJson {
        let n = self.n;
        let rows = self
            .images
            .iter()
            .map(|p| {
                let xs: String = (0..n).map(|q| if p.x_bit(q) { '1' } else { '0' }).collect();
                let zs: String = (0..n).map(|q| if p.z_bit(q) { '1' } else { '0' }).collect();
                xs + &zs
            })
            .collect();
        TableauJson {
            n,
            rows,
            signs: self.signs().iter().map(|&s| s as u8).collect(),
            paulis: self
                .images
                .iter()
                .map(|p| {
                    let s = p.to_string();
                    if s.starts_with('-') {
                        s
                    } else {
                        format!("+{s}")
                    }
                })
                .collect(),
        }
    }

    pub fn from_json(j: &TableauJson) -> Result<Self> {
        let n = j.n;
        check_dim(2 * n, j.rows.len())?;
        check_dim(2 * n, j.signs.len())?;
        let mut images = Vec::with_capacity(2 * n);
        for (row, &sign) in j.rows.iter().zip(&j.signs) {
            let bits: Vec<char> = row.chars().collect();
            check_dim(2 * n, bits.len())?;
            let mut p = PauliString::identity(n);
            for q in 0..n {
                p.set(q, bits[q] == '1', bits[n + q] == '1');
            }
            images.push(p.with_phase(if sign == 1 { 2 } else { 0 }));
        }
        Self::from_images(n, images)
    }
}

/// Serialized tableau: one `2n`-character row per generator image (X
/// images first), written as x bits then z bits, plus sign bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableauJson {
    pub n: usize,
    pub rows: Vec<String>,
    pub signs: Vec<u8>,
    pub paulis: Vec<String>,
}

#[inline]
fn sym(a: (u64, u64), b: (u64, u64)) -> bool {
    ((a.0 & b.1) ^ (a.1 & b.0)).count_ones() % 2 == 1
}

/// Keeps a linearly independent subset (over GF(2)) of the vectors.
fn independent(vectors: &[(u64, u64)], n: usize) -> Vec<(u64, u64)> {
    let pack = |v: (u64, u64)| (v.0 as u128) | ((v.1 as u128) << n);
    let mut reduced: Vec<u128> = Vec::new();
    let mut keep = Vec::new();
    for &v in vectors {
        let mut r = pack(v);
        for &b in &reduced {
            r = r.min(r ^ b);
        }
        if r != 0 {
            reduced.push(r);
            reduced.sort_unstable_by(|a, b| b.cmp(a));
            keep.push(v);
        }
    }
    keep
}

/// Uniformly random `n`-qubit Clifford (modulo global phase).
///
/// Generator images are drawn pair by pair: `X_i` maps to a uniform
/// nonzero vector of the symplectic complement of the earlier pairs and
/// `Z_i` to a uniform partner in that complement; signs are uniform.
pub fn random_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordTableau {
    assert!((1..=32).contains(&n));
    let mut basis: Vec<(u64, u64)> = (0..n)
        .map(|q| (1u64 << q, 0))
        .chain((0..n).map(|q| (0, 1u64 << q)))
        .collect();
    let combo = |basis: &[(u64, u64)], rng: &mut R| {
        basis.iter().fold((0u64, 0u64), |acc, &v| {
            if rng.random::<bool>() {
                (acc.0 ^ v.0, acc.1 ^ v.1)
            } else {
                acc
            }
        })
    };
    let mut xs = Vec::with_capacity(n);
    let mut zs = Vec::with_capacity(n);
    for _ in 0..n {
        let a = loop {
            let v = combo(&basis, rng);
            if v != (0, 0) {
                break v;
            }
        };
        let b = loop {
            let v = combo(&basis, rng);
            if sym(a, v) {
                break v;
            }
        };
        let projected: Vec<(u64, u64)> = basis
            .iter()
            .map(|&v| {
                let mut w = v;
                if sym(v, b) {
                    w = (w.0 ^ a.0, w.1 ^ a.1);
                }
                if sym(v, a) {
                    w = (w.0 ^ b.0, w.1 ^ b.1);
                }
                w
            })
            .collect();
        basis = independent(&projected, n);
        xs.push(a);
        zs.push(b);
    }
    let mut images = Vec::with_capacity(2 * n);
    for v in xs.into_iter().chain(zs) {
        let phase = if rng.random::<bool>() { 2 } else { 0 };
        images.push(PauliString::from_masks(n, v.0, v.1, phase));
    }
    CliffordTableau { n, images }
}

/// Every element of the two-qubit Clifford group (11520 tableaux), by
/// breadth-first closure over H, S and CNOT.
pub fn two_qubit_group() -> &'static [CliffordTableau] {
    static GROUP: OnceLock<Vec<CliffordTableau>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let gens: Vec<CliffordTableau> = [
            Gate::H(0),
            Gate::H(1),
            Gate::S(0),
            Gate::S(1),
            Gate::Cnot(0, 1),
            Gate::Cnot(1, 0),
        ]
        .iter()
        .map(|&g| CliffordTableau::from_gate(2, g).unwrap())
        .collect();
        let id = CliffordTableau::identity(2);
        let mut seen: HashSet<CliffordTableau> = HashSet::from([id.clone()]);
        let mut order = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(t) = queue.pop_front() {
            for g in &gens {
                let next = g.compose(&t).unwrap();
                if seen.insert(next.clone()) {
                    order.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        order
    })
}

/// Canonical label of the right coset `C_z·g`: the row-reduced span of
/// `g† Z_j g`.
fn right_coset_label(g: &CliffordTableau) -> Vec<u64> {
    let inv = g.inverse();
    let n = g.n;
    let rows: Vec<u64> = (0..n)
        .map(|q| {
            let p = inv.image_z(q);
            p.x_mask() | (p.z_mask() << n)
        })
        .collect();
    BitMatrix::from_rows(2 * n, &rows).rref().row_masks()
}

/// One representative per right coset `C_z·g` of the diagonal-preserving
/// subgroup `C_z` (768 elements) in the two-qubit Clifford group: 15
/// tableaux, the lexicographically smallest of each coset, sorted.
///
/// Left-multiplying by an element of `C_z` permutes computational basis
/// states with phases, so `rep` and `h·rep` give the same participation
/// entropy.
pub fn two_qubit_coset_reps() -> &'static [CliffordTableau] {
    static REPS: OnceLock<Vec<CliffordTableau>> = OnceLock::new();
    REPS.get_or_init(|| {
        let mut best: HashMap<Vec<u64>, CliffordTableau> = HashMap::new();
        for g in two_qubit_group() {
            let label = right_coset_label(g);
            match best.get(&label) {
                Some(cur) if cur <= g => {}
                _ => {
                    best.insert(label, g.clone());
                }
            }
        }
        let mut reps: Vec<CliffordTableau> = best.into_values().collect();
        reps.sort();
        reps
    })
}

/// Index of the coset representative `r` with `g = h·r`, `h ∈ C_z`.
pub fn two_qubit_coset_of(g: &CliffordTableau) -> usize {
    let label = right_coset_label(g);
    two_qubit_coset_reps()
        .iter()
        .position(|r| right_coset_label(r) == label)
        .expect("every two-qubit Clifford lies in some coset")
}

/// Solves `A d = e_i` over GF(2) for every `i`, where row `j` of `A` acts on
/// a packed `2n`-bit unknown. Free variables are set to zero.
fn solve_unit_rhs(rows: &[u64], width: usize) -> Option<Vec<u64>> {
    let m = rows.len();
    // augmented: coefficient bits, rhs as an m-bit identity block
    let mut a: Vec<(u64, u64)> = rows.iter().enumerate().map(|(j, &r)| (r, 1u64 << j)).collect();
    let mut pivots = Vec::with_capacity(m);
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..m).find(|&i| (a[i].0 >> col) & 1 == 1) else {
            continue;
        };
        a.swap(rank, p);
        let pr = a[rank];
        for (i, row) in a.iter_mut().enumerate() {
            if i != rank && (row.0 >> col) & 1 == 1 {
                row.0 ^= pr.0;
                row.1 ^= pr.1;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rank < m {
        return None;
    }
    Some(
        (0..m)
            .map(|i| {
                (0..m).fold(0u64, |d, r| {
                    if (a[r].1 >> i) & 1 == 1 {
                        d | (1 << pivots[r])
                    } else {
                        d
                    }
                })
            })
            .collect(),
    )
}

/// Clifford `C` whose column `|σ>` is the stabilizer basis state of `key`
/// with `Q_d = σ mod 2^k` and coset index `σ >> k`, up to a phase per
/// element. Hence `C†|psi>` has the basis distribution of `key` as its
/// computational-basis distribution.
pub fn basis_to_tableau(key: &StabBasisKey) -> Result<CliffordTableau> {
    let n = key.num_qubits();
    if n > 32 {
        return Err(MagicError::CapExceeded {
            what: "basis_to_tableau",
            n,
            cap: 32,
        });
    }
    let gens = key.stabilizer_generators()?;
    // <d, g> = d_x·g_z + d_z·g_x; unknown packed as d_x | d_z << n
    let rows: Vec<u64> = gens.iter().map(|g| g.z_mask() | (g.x_mask() << n)).collect();
    let sols =
        solve_unit_rhs(&rows, 2 * n).ok_or_else(|| MagicError::Domain("stabilizer generators are dependent".into()))?;
    let low = crate::f2linalg::mask(n);
    let mut destab: Vec<PauliString> = Vec::with_capacity(n);
    for (i, &d) in sols.iter().enumerate() {
        let mut p = PauliString::from_masks(n, d & low, d >> n, 0);
        for (j, dj) in destab.iter().enumerate() {
            if p.symplectic_product(dj)? == 1 {
                let (x, z) = (p.x_mask() ^ gens[j].x_mask(), p.z_mask() ^ gens[j].z_mask());
                p = PauliString::from_masks(n, x, z, 0);
            }
        }
        debug_assert!((0..n).all(|j| p.symplectic_product(&gens[j]).unwrap() == (i == j) as u8));
        destab.push(p);
    }
    let images = destab.into_iter().chain(gens).collect();
    CliffordTableau::from_images(n, images)
}
