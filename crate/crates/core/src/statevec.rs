//! Dense pure states over `n` qubits.
//!
//! Basis index convention: qubit `j` is bit `j` of the index (qubit 0 least
//! significant). Entropies are in nats.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{fwht_complex, renyi};
use crate::error::{check_cap, check_dim, MagicError, Result};
use crate::pauli::{PauliString, I_POW};

/// Default largest `n` for which the full `4^n` Pauli spectrum is built.
pub const SPECTRUM_CAP: usize = 12;

/// Largest `n` accepted by the dense backend.
pub const DENSE_CAP: usize = 26;

const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

/// Expectations `b_P = <psi|P|psi>` of every phase-free Pauli string,
/// indexed by [`PauliString::index`].
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSpectrum {
    n: usize,
    values: Vec<f64>,
}

impl PauliSpectrum {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, index: u64) -> f64 {
        self.values[index as usize]
    }

    pub fn of(&self, p: &PauliString) -> f64 {
        self.values[p.index() as usize]
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Statevector {
    /// Wraps amplitudes that are already unit-norm (within 1e-10).
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = Self::qubits_for(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(MagicError::Domain(format!("state is not normalized (norm^2 = {norm})")));
        }
        Ok(Self { n, amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn from_unnormalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let n = Self::qubits_for(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(MagicError::Domain("cannot normalize a zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n, amps })
    }

    fn qubits_for(len: usize) -> Result<usize> {
        if len < 2 || !len.is_power_of_two() {
            return Err(MagicError::Domain(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_cap("dense statevector", n, DENSE_CAP)?;
        Ok(n)
    }

    /// Haar-random state from i.i.d. complex Gaussian amplitudes.
    pub fn haar_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_cap("dense statevector", n, DENSE_CAP)?;
        let amps = (0..1usize << n)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_unnormalized(amps)
    }

    pub fn basis_state(n: usize, index: u64) -> Self {
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[index as usize] = c(1.0, 0.0);
        Self { n, amps }
    }

    pub fn zero_state(n: usize) -> Self {
        Self::basis_state(n, 0)
    }

    /// `|+>^{⊗n}`.
    pub fn plus_state(n: usize) -> Self {
        let a = (1.0 / (1u64 << n) as f64).sqrt();
        Self {
            n,
            amps: vec![c(a, 0.0); 1 << n],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Complex-conjugated amplitudes.
    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            amps: self.amps.iter().map(|a| a.conj()).collect(),
        }
    }

    /// Amplitudes replaced by their moduli.
    pub fn abs(&self) -> Self {
        Self {
            n: self.n,
            amps: self.amps.iter().map(|a| c(a.norm(), 0.0)).collect(),
        }
    }

    /// Same ray with the largest-modulus amplitude made real positive.
    pub fn fix_global_phase(&self) -> Self {
        let (_, big) = self
            .amps
            .iter()
            .enumerate()
            .fold((0.0, c(1.0, 0.0)), |(m, a), (_, &z)| {
                if z.norm() > m + 1e-12 {
                    (z.norm(), z)
                } else {
                    (m, a)
                }
            });
        let phase = big.conj() / big.norm();
        Self {
            n: self.n,
            amps: self.amps.iter().map(|a| a * phase).collect(),
        }
    }

    /// True when every amplitude has imaginary part below `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.amps.iter().all(|a| a.im.abs() <= tol)
    }

    /// True when every amplitude is real and non-negative within `tol`.
    pub fn is_nonnegative_real(&self, tol: f64) -> bool {
        self.amps.iter().all(|a| a.im.abs() <= tol && a.re >= -tol)
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_dim(self.n, other.n)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|self> ⊗ |other>` with `other`'s qubits placed after `self`'s.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        Self {
            n: self.n + other.n,
            amps,
        }
    }

    /// `P|psi>` including the string's phase.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<Self> {
        check_dim(self.n, p.num_qubits())?;
        let mut out = vec![c(0.0, 0.0); self.dim()];
        for (s, &a) in self.amps.iter().enumerate() {
            let (t, k) = p.act_on_basis(s as u64);
            out[t as usize] = I_POW[k as usize] * a;
        }
        Ok(Self { n: self.n, amps: out })
    }

    /// `<psi|P|psi>` for a Hermitian string, O(2^n).
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        check_dim(self.n, p.num_qubits())?;
        if !p.is_hermitian() {
            return Err(MagicError::Domain(format!("{p} is not Hermitian")));
        }
        let mut acc = c(0.0, 0.0);
        for (s, &a) in self.amps.iter().enumerate() {
            let (t, k) = p.act_on_basis(s as u64);
            acc += self.amps[t as usize].conj() * I_POW[k as usize] * a;
        }
        Ok(acc.re)
    }

    /// Full Pauli spectrum with the default cap.
    pub fn pauli_spectrum(&self) -> Result<PauliSpectrum> {
        self.pauli_spectrum_with_cap(SPECTRUM_CAP)
    }

    /// All `4^n` expectations in `O(n 4^n)`: for each X part the Z parts
    /// come out of one Walsh-Hadamard transform.
    pub fn pauli_spectrum_with_cap(&self, cap: usize) -> Result<PauliSpectrum> {
        check_cap("pauli spectrum", self.n, cap)?;
        let n = self.n;
        let dim = self.dim();
        let rows: Vec<Vec<f64>> = (0..dim)
            .into_par_iter()
            .map(|x| {
                let mut v: Vec<Complex64> = (0..dim).map(|s| self.amps[s ^ x].conj() * self.amps[s]).collect();
                fwht_complex(&mut v);
                v.iter()
                    .enumerate()
                    .map(|(z, val)| (I_POW[((x & z).count_ones() % 4) as usize] * val).re)
                    .collect()
            })
            .collect();
        let mut values = vec![0.0; dim * dim];
        for (x, row) in rows.into_iter().enumerate() {
            for (z, v) in row.into_iter().enumerate() {
                values[x | (z << n)] = v;
            }
        }
        Ok(PauliSpectrum { n, values })
    }

    /// Rényi-α entropy of `|<σ|psi>|^2` in the computational basis.
    pub fn participation_entropy(&self, alpha: f64) -> f64 {
        renyi(&self.probabilities(), alpha)
    }

    /// Computational-basis measurement of qubit `j`; zero-probability
    /// outcomes are omitted. Returns `(outcome, probability, post-state)`.
    pub fn measure_qubit_outcomes(&self, j: usize) -> Result<Vec<(u8, f64, Statevector)>> {
        if j >= self.n {
            return Err(MagicError::Dimension {
                expected: self.n,
                got: j + 1,
            });
        }
        let mut out = Vec::with_capacity(2);
        for outcome in 0..2u8 {
            let mut amps = self.amps.clone();
            let mut p = 0.0;
            for (s, a) in amps.iter_mut().enumerate() {
                if ((s >> j) & 1) as u8 == outcome {
                    p += a.norm_sqr();
                } else {
                    *a = c(0.0, 0.0);
                }
            }
            if p > 1e-14 {
                let s = p.sqrt();
                amps.iter_mut().for_each(|a| *a /= s);
                out.push((outcome, p, Statevector { n: self.n, amps }));
            }
        }
        Ok(out)
    }

    /// Same as [`Statevector::measure_qubit_outcomes`] without outcome labels.
    pub fn measure_qubit(&self, j: usize) -> Result<Vec<(f64, Statevector)>> {
        Ok(self
            .measure_qubit_outcomes(j)?
            .into_iter()
            .map(|(_, p, s)| (p, s))
            .collect())
    }

    /// `exp(iθP)|psi> = cos θ |psi> + i sin θ P|psi>`.
    pub fn apply_pauli_rotation(&self, p: &PauliString, theta: f64) -> Result<Self> {
        if !p.is_hermitian() {
            return Err(MagicError::Domain(format!("rotation generator {p} is not Hermitian")));
        }
        let pp = self.apply_pauli(p)?;
        let (s, co) = theta.sin_cos();
        let amps: Vec<Complex64> = self
            .amps
            .iter()
            .zip(&pp.amps)
            .map(|(a, b)| a * co + c(0.0, s) * b)
            .collect();
        Self::from_unnormalized(amps)
    }

    /// Applies a 2x2 (one target) or 4x4 (two targets) row-major unitary.
    /// For two targets `[q0, q1]` the local index is `bit(q0) + 2 bit(q1)`.
    pub fn apply_gate(&self, unitary: &[Complex64], targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate_mut(unitary, targets)?;
        Ok(out)
    }

    pub fn apply_gate_mut(&mut self, unitary: &[Complex64], targets: &[usize]) -> Result<()> {
        for &t in targets {
            if t >= self.n {
                return Err(MagicError::Dimension {
                    expected: self.n,
                    got: t + 1,
                });
            }
        }
        match (targets, unitary.len()) {
            ([q], 4) => {
                let bit = 1usize << q;
                for s in 0..self.dim() {
                    if s & bit == 0 {
                        let (a0, a1) = (self.amps[s], self.amps[s | bit]);
                        self.amps[s] = unitary[0] * a0 + unitary[1] * a1;
                        self.amps[s | bit] = unitary[2] * a0 + unitary[3] * a1;
                    }
                }
                Ok(())
            }
            ([q0, q1], 16) if q0 != q1 => {
                let (b0, b1) = (1usize << q0, 1usize << q1);
                for s in 0..self.dim() {
                    if s & (b0 | b1) == 0 {
                        let idx = [s, s | b0, s | b1, s | b0 | b1];
                        let a = idx.map(|i| self.amps[i]);
                        for (r, &i) in idx.iter().enumerate() {
                            self.amps[i] = (0..4).map(|k| unitary[4 * r + k] * a[k]).sum();
                        }
                    }
                }
                Ok(())
            }
            _ => Err(MagicError::Domain(format!(
                "gate of size {} on targets {:?} is not supported",
                unitary.len(),
                targets
            ))),
        }
    }

    /// JSON array of `[re, im]` pairs in basis-index order.
    pub fn to_json(&self) -> String {
        let pairs: Vec<[f64; 2]> = self.amps.iter().map(|a| [a.re, a.im]).collect();
        serde_json::to_string(&pairs).expect("finite amplitudes serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let pairs: Vec<[f64; 2]> = serde_json::from_str(text).map_err(|e| MagicError::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        Self::from_amplitudes(pairs.into_iter().map(|[re, im]| c(re, im)).collect())
    }

    /// Raw little-endian `(re, im)` f64 pairs.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 * self.dim());
        for a in &self.amps {
            out.extend_from_slice(&a.re.to_le_bytes());
            out.extend_from_slice(&a.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(16) {
            return Err(MagicError::Domain("binary state length is not a multiple of 16".into()));
        }
        let amps = bytes
            .chunks_exact(16)
            .map(|ch| {
                let re = f64::from_le_bytes(ch[..8].try_into().unwrap());
                let im = f64::from_le_bytes(ch[8..].try_into().unwrap());
                c(re, im)
            })
            .collect();
        Self::from_amplitudes(amps)
    }
}

/// Standard single-qubit matrices, row-major.
pub mod gates {
    use num_complex::Complex64;

    const Z0: Complex64 = Complex64::new(0.0, 0.0);
    const O: Complex64 = Complex64::new(1.0, 0.0);

    pub fn hadamard() -> [Complex64; 4] {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        [h, h, h, -h]
    }

    pub fn phase(phi: f64) -> [Complex64; 4] {
        [O, Z0, Z0, Complex64::from_polar(1.0, phi)]
    }

    pub fn s() -> [Complex64; 4] {
        [O, Z0, Z0, Complex64::new(0.0, 1.0)]
    }

    pub fn s_dag() -> [Complex64; 4] {
        [O, Z0, Z0, Complex64::new(0.0, -1.0)]
    }

    pub fn pauli_x() -> [Complex64; 4] {
        [Z0, O, O, Z0]
    }

    pub fn pauli_z() -> [Complex64; 4] {
        [O, Z0, Z0, -O]
    }

    /// CNOT with control on the first target, local index `bit(q0) + 2 bit(q1)`.
    pub fn cnot() -> [Complex64; 16] {
        let mut m = [Z0; 16];
        // |c t>: 00->00, 01(c=1)->11, 10->10, 11->01
        m[0] = O;
        m[4 * 3 + 1] = O;
        m[4 * 2 + 2] = O;
        m[4 + 3] = O;
        m
    }

    pub fn cz() -> [Complex64; 16] {
        let mut m = [Z0; 16];
        m[0] = O;
        m[5] = O;
        m[10] = O;
        m[15] = -O;
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Statevector {
        let amps = (0..1 << n)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Statevector::from_unnormalized(amps).unwrap()
    }

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn chi() -> Statevector {
        let beta = (1.0 / 3f64.sqrt()).acos() / 2.0;
        Statevector::from_amplitudes(vec![
            Complex64::from_polar(beta.cos(), -std::f64::consts::FRAC_PI_4),
            c(beta.sin(), 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn expectation_examples() {
        assert!((Statevector::zero_state(1).expectation(&p("Z")).unwrap() - 1.0).abs() < 1e-15);
        assert!(Statevector::plus_state(1).expectation(&p("Z")).unwrap().abs() < 1e-15);
        let chi = chi();
        for l in ["X", "Y", "Z"] {
            let v = chi.expectation(&p(l)).unwrap();
            assert!((v.abs() - 1.0 / 3f64.sqrt()).abs() < 1e-12, "{l}: {v}");
        }
        assert!(chi.expectation(&p("iX")).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let s = Statevector::zero_state(1).pauli_spectrum().unwrap();
        let get = |l: &str| s.of(&p(l));
        assert_eq!([get("I"), get("Z"), get("X"), get("Y")], [1.0, 1.0, 0.0, 0.0]);

        let s = Statevector::plus_state(2).pauli_spectrum().unwrap();
        for idx in 0..16u64 {
            let q = PauliString::from_index(2, idx);
            let only_ix = q.z_mask() == 0;
            let v = s.get(idx);
            assert!((v - if only_ix { 1.0 } else { 0.0 }).abs() < 1e-12, "{q}");
        }
    }

    #[test]
    fn spectrum_matches_direct_expectations_and_purity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=4 {
            let psi = random_state(n, &mut rng);
            let spec = psi.pauli_spectrum().unwrap();
            let mut sum_sq = 0.0;
            for idx in 0..(1u64 << (2 * n)) {
                let direct = psi.expectation(&PauliString::from_index(n, idx)).unwrap();
                assert!((direct - spec.get(idx)).abs() < 1e-12);
                assert!(direct.abs() <= 1.0 + 1e-12);
                sum_sq += direct * direct;
            }
            assert!((spec.get(0) - 1.0).abs() < 1e-12);
            assert!((sum_sq - (1 << n) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn spectrum_cap_is_enforced() {
        let psi = Statevector::zero_state(3);
        assert!(matches!(
            psi.pauli_spectrum_with_cap(2),
            Err(MagicError::CapExceeded { .. })
        ));
    }

    #[test]
    fn participation_entropy_examples() {
        for n in 1..=4 {
            for alpha in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
                let plus = Statevector::plus_state(n).participation_entropy(alpha);
                assert!((plus - n as f64 * 2f64.ln()).abs() < 1e-12);
                assert!(Statevector::zero_state(n).participation_entropy(alpha).abs() < 1e-15);
            }
        }
        for n in 2..=6 {
            let mut amps = vec![c(0.0, 0.0); 1 << n];
            for j in 0..n {
                amps[1 << j] = c(1.0, 0.0);
            }
            let w = Statevector::from_unnormalized(amps).unwrap();
            assert!((w.participation_entropy(1.0) - (n as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn measurement_examples() {
        let plus = Statevector::plus_state(1);
        let out = plus.measure_qubit(0).unwrap();
        assert_eq!(out.len(), 2);
        assert!((out[0].0 - 0.5).abs() < 1e-15 && (out[1].0 - 0.5).abs() < 1e-15);
        assert_eq!(out[0].1, Statevector::zero_state(1));
        assert_eq!(out[1].1, Statevector::basis_state(1, 1));
        let zero = Statevector::zero_state(1).measure_qubit(0).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].0, 1.0);
    }

    #[test]
    fn measurement_preserves_total_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let psi = random_state(3, &mut rng);
            for j in 0..3 {
                let out = psi.measure_qubit(j).unwrap();
                let total: f64 = out.iter().map(|(p, _)| p).sum();
                assert!((total - 1.0).abs() < 1e-12);
                for (_, s) in &out {
                    assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn rotation_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = random_state(2, &mut rng);
        let xz = p("XZ");
        assert_eq!(psi.apply_pauli_rotation(&xz, 0.0).unwrap().amps(), psi.amps());
        let half = psi.apply_pauli_rotation(&xz, std::f64::consts::FRAC_PI_2).unwrap();
        let ipsi = psi.apply_pauli(&xz).unwrap();
        let ov = half.inner(&ipsi).unwrap();
        assert!((ov.norm() - 1.0).abs() < 1e-12);
        let rz = Statevector::plus_state(1)
            .apply_pauli_rotation(&p("Z"), std::f64::consts::PI / 8.0)
            .unwrap();
        assert!((rz.participation_entropy(1.0) - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn gate_and_tensor_examples() {
        let h = Statevector::zero_state(1).apply_gate(&gates::hadamard(), &[0]).unwrap();
        assert!(h.inner(&Statevector::plus_state(1)).unwrap().re > 1.0 - 1e-12);
        let t = Statevector::zero_state(1).tensor(&Statevector::basis_state(1, 1));
        assert_eq!(t, Statevector::basis_state(2, 0b10));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_state(3, &mut rng);
        assert!((psi.inner(&psi).unwrap().re - 1.0).abs() < 1e-12);
        let cn = Statevector::basis_state(2, 0b01)
            .apply_gate(&gates::cnot(), &[0, 1])
            .unwrap();
        assert_eq!(cn, Statevector::basis_state(2, 0b11));
    }

    #[test]
    fn second_moment_inequality_under_commuting_pauli_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 3;
        let mut trials = 0;
        while trials < 1000 {
            let psi = random_state(n, &mut rng);
            let pp = PauliString::from_index(n, rng.random_range(1..64));
            let q = PauliString::from_index(n, rng.random_range(1..64));
            if !pp.commutes(&q).unwrap() {
                continue;
            }
            trials += 1;
            let before = psi.expectation(&pp).unwrap().powi(2);
            let qpsi = psi.apply_pauli(&q).unwrap();
            let mut after = 0.0;
            for lambda in [1.0, -1.0] {
                let amps: Vec<Complex64> = psi
                    .amps()
                    .iter()
                    .zip(qpsi.amps())
                    .map(|(a, b)| (a + b * lambda) * 0.5)
                    .collect();
                let prob: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                if prob < 1e-14 {
                    continue;
                }
                let post = Statevector::from_unnormalized(amps).unwrap();
                after += prob * post.expectation(&pp).unwrap().powi(2);
            }
            assert!(after >= before - 1e-10);
        }
    }

    #[test]
    fn json_and_binary_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = random_state(3, &mut rng);
        assert_eq!(Statevector::from_json(&psi.to_json()).unwrap(), psi);
        assert_eq!(Statevector::from_bytes(&psi.to_bytes()).unwrap(), psi);
        assert!(Statevector::from_json("[[1.0, 0.0], [1.0, 0.0]]").is_err());
        assert!(Statevector::from_json("[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]").is_err());
    }
}
