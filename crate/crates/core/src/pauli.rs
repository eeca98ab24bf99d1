//! Pauli strings in symplectic form.
//!
//! A string on `n` qubits is stored as two bit vectors `x` and `z` plus a
//! phase exponent `p` (mod 4), and represents the operator
//!
//! ```text
//! i^p  ⊗_j  i^(x_j z_j) X^(x_j) Z^(z_j)
//! ```
//!
//! so that with `p = 0` every string is Hermitian (`Y = i X Z`). Qubit 0 is
//! the least significant bit of word 0. For spectra, a string on `n <= 32`
//! qubits is indexed by the integer `x | (z << n)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, MagicError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

#[inline]
fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Phase exponent picked up by the product `(x1,z1) * (x2,z2)` of two
/// phase-free strings given as single words.
#[inline]
pub fn product_phase(x1: u64, z1: u64, x2: u64, z2: u64) -> u8 {
    let x3 = x1 ^ x2;
    let z3 = z1 ^ z2;
    let e = (x1 & z1).count_ones() as i64 + (x2 & z2).count_ones() as i64 + 2 * (z1 & x2).count_ones() as i64
        - (x3 & z3).count_ones() as i64;
    e.rem_euclid(4) as u8
}

/// Powers of `i`, indexed mod 4.
pub const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "Pauli strings need at least one qubit");
        let w = words_for(n);
        Self {
            n,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    /// Builds a string from single-word masks (`n <= 64`).
    pub fn from_masks(n: usize, x: u64, z: u64, phase: u8) -> Self {
        assert!((1..=64).contains(&n));
        let m = low_mask(n);
        Self {
            n,
            x: vec![x & m],
            z: vec![z & m],
            phase: phase & 3,
        }
    }

    /// Inverse of [`PauliString::index`], phase-free.
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n <= 32);
        Self::from_masks(n, index & low_mask(n), index >> n, 0)
    }

    /// Single-qubit Pauli `label` (one of `IXYZ`) on `qubit`.
    pub fn single(n: usize, qubit: usize, label: char) -> Result<Self> {
        let mut p = Self::identity(n);
        if qubit >= n {
            return Err(MagicError::Dimension {
                expected: n,
                got: qubit + 1,
            });
        }
        let (xb, zb) = match label {
            'I' => (false, false),
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            c => return Err(MagicError::InvalidPauliChar(c)),
        };
        p.set(qubit, xb, zb);
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / 64] >> (q % 64)) & 1 == 1
    }

    pub fn set(&mut self, q: usize, xb: bool, zb: bool) {
        let (w, b) = (q / 64, q % 64);
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
    }

    /// X part as one word; only meaningful for `n <= 64`.
    pub fn x_mask(&self) -> u64 {
        self.x[0]
    }

    pub fn z_mask(&self) -> u64 {
        self.z[0]
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// Spectrum index `x | (z << n)`, requires `n <= 32`.
    pub fn index(&self) -> u64 {
        assert!(self.n <= 32);
        self.x[0] | (self.z[0] << self.n)
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// True when the operator is Hermitian, i.e. the phase exponent is even.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// `+1` or `-1` for Hermitian strings.
    pub fn sign(&self) -> f64 {
        debug_assert!(self.is_hermitian());
        if self.phase == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Same string with the phase dropped.
    pub fn unsigned(&self) -> Self {
        let mut p = self.clone();
        p.phase = 0;
        p
    }

    /// Symplectic product `x_a·z_b + z_a·x_b mod 2`; 1 iff the two anticommute.
    pub fn symplectic_product(&self, other: &Self) -> Result<u8> {
        check_dim(self.n, other.n)?;
        let ones: u32 = (0..self.x.len())
            .map(|w| ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones())
            .sum();
        Ok((ones % 2) as u8)
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        Ok(self.symplectic_product(other)? == 0)
    }

    /// Operator product `self * other` with exact phase tracking.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        let mut e: i64 = self.phase as i64 + other.phase as i64;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.x.len());
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            e += product_phase(x1, z1, x2, z2) as i64;
            x.push(x1 ^ x2);
            z.push(z1 ^ z2);
        }
        Ok(Self {
            n: self.n,
            x,
            z,
            phase: e.rem_euclid(4) as u8,
        })
    }

    /// Action on a computational basis state: `P|s> = i^k |s ^ x>`.
    ///
    /// Returns `(s ^ x, k)`. Single-word strings only.
    #[inline]
    pub fn act_on_basis(&self, s: u64) -> (u64, u8) {
        let (x, z) = (self.x[0], self.z[0]);
        let k = self.phase as u32 + (x & z).count_ones() + 2 * (z & s).count_ones();
        (s ^ x, (k % 4) as u8)
    }

    /// Dense `2^n x 2^n` matrix, row-major. Intended for tests and small `n`.
    pub fn to_dense(&self) -> Vec<Complex64> {
        assert!(self.n <= 12);
        let dim = 1usize << self.n;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for col in 0..dim as u64 {
            let (row, k) = self.act_on_basis(col);
            m[row as usize * dim + col as usize] = I_POW[k as usize];
        }
        m
    }

    fn label_char(&self, q: usize) -> char {
        match (self.x_bit(q), self.z_bit(q)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }
}

/// Renders as e.g. `XIZ` (qubit 0 first) with an optional `i`, `-`, `-i` prefix.
impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize];
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.label_char(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = MagicError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else {
            (0, s)
        };
        if body.is_empty() {
            return Err(MagicError::Domain("empty Pauli label".into()));
        }
        let n = body.chars().count();
        let mut p = PauliString::identity(n);
        for (q, c) in body.chars().enumerate() {
            let (xb, zb) = match c {
                'I' => (false, false),
                'X' => (true, false),
                'Y' => (true, true),
                'Z' => (false, true),
                other => return Err(MagicError::InvalidPauliChar(other)),
            };
            p.set(q, xb, zb);
        }
        p.phase = phase;
        Ok(p)
    }
}
