//! Magic measures that need no basis search (or only an exhaustive one at
//! tiny sizes): stabilizer Rényi entropies, G-asymmetries, stabilizer
//! fidelity, nullity and the convolved Pauli spectrum.

use std::collections::HashSet;
use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::bmsa::{self, group_distribution, StabBasisKey};
use crate::entropy::{fwht_real, renyi};
use crate::error::{check_cap, check_dim, MagicError, Result};
use crate::f2linalg::mask;
use crate::pauli::{PauliString, I_POW};
use crate::statevec::{Statevector, SPECTRUM_CAP};

/// Largest `n` for the convolved spectrum and its minimization.
pub const CONV_CAP: usize = 4;

/// Independent, pairwise commuting Pauli strings (signs ignored).
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerGroupGens {
    n: usize,
    gens: Vec<PauliString>,
}

impl StabilizerGroupGens {
    pub fn new(n: usize, gens: Vec<PauliString>) -> Result<Self> {
        if n > 32 {
            return Err(MagicError::CapExceeded {
                what: "StabilizerGroupGens",
                n,
                cap: 32,
            });
        }
        for g in &gens {
            check_dim(n, g.num_qubits())?;
        }
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                if !a.commutes(b)? {
                    return Err(MagicError::Domain(format!("generators {a} and {b} anticommute")));
                }
            }
        }
        let packed: Vec<u64> = gens.iter().map(|g| g.x_mask() | (g.z_mask() << n)).collect();
        if bmsa::canonical_span(&packed).len() != gens.len() {
            return Err(MagicError::Domain("generators are not independent".into()));
        }
        let gens = gens.into_iter().map(|g| g.unsigned()).collect();
        Ok(Self { n, gens })
    }

    /// The stabilizer group of the basis labelled by `key`.
    pub fn from_key(key: &StabBasisKey) -> Result<Self> {
        Self::new(key.num_qubits(), key.stabilizer_generators()?)
    }

    pub fn gens(&self) -> &[PauliString] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// All `2^k` signed products `g^u`, indexed by `u`.
    pub fn elements(&self) -> Vec<PauliString> {
        let size = 1usize << self.gens.len();
        let mut out = vec![PauliString::identity(self.n); size];
        for u in 1..size {
            let low = u.trailing_zeros() as usize;
            out[u] = out[u & (u - 1)].multiply(&self.gens[low]).expect("same width");
        }
        out
    }
}

/// One measure evaluation, ready for JSON output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureResult {
    pub measure: String,
    pub params: serde_json::Value,
    /// Nats.
    pub value: f64,
    pub certificate: Option<serde_json::Value>,
}

impl MeasureResult {
    pub fn new(measure: &str, params: serde_json::Value, value: f64) -> Self {
        Self {
            measure: measure.into(),
            params,
            value,
            certificate: None,
        }
    }

    pub fn with_certificate(mut self, cert: serde_json::Value) -> Self {
        self.certificate = Some(cert);
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "measure": self.measure,
            "params": self.params,
            "value_nats": self.value,
            "value_bits": self.value / LN_2,
            "certificate": self.certificate,
        })
    }
}

/// Normalized squared spectrum `Ξ_P = <P>^2 / 2^n`.
pub fn characteristic_distribution(psi: &Statevector) -> Result<Vec<f64>> {
    let dim = psi.dim() as f64;
    Ok(psi.pauli_spectrum()?.values().iter().map(|b| b * b / dim).collect())
}

/// Stabilizer Rényi entropy `M_n = (1-n)^{-1} ln Σ_P <P>^{2n} / 2^N` (nats),
/// or with `linear` the linear entropy `1 - Σ_P <P>^{2n} / 2^N`. `n = 1` is
/// the Shannon limit `H(Ξ) - N ln 2`. Monotonicity holds only for
/// `n >= 2`; other orders are computed all the same.
pub fn sre(psi: &Statevector, order: f64, linear: bool) -> Result<f64> {
    check_cap("sre", psi.num_qubits(), SPECTRUM_CAP)?;
    if order.is_nan() || order <= 0.0 {
        return Err(MagicError::Domain(format!("SRE order must be positive, got {order}")));
    }
    let xi = characteristic_distribution(psi)?;
    let nln2 = psi.num_qubits() as f64 * LN_2;
    if linear {
        if order.is_infinite() {
            return Err(MagicError::Domain("linear SRE needs a finite order".into()));
        }
        let dim = psi.dim() as f64;
        let spec = psi.pauli_spectrum()?;
        let s: f64 = spec.values().iter().map(|b| (b * b).powf(order)).sum();
        return Ok(1.0 - s / dim);
    }
    Ok((renyi(&xi, order) - nln2).max(0.0))
}

fn group_expectations(psi: &Statevector, group: &StabilizerGroupGens) -> Result<Vec<f64>> {
    check_dim(group.n, psi.num_qubits())?;
    group.elements().iter().map(|p| psi.expectation(p)).collect()
}

/// Distribution of the joint eigenvalues of `G` in `psi`:
/// `d = H^{⊗k} c / 2^k` with `c_u = <psi|g^u|psi>`.
pub fn group_outcome_distribution(psi: &Statevector, group: &StabilizerGroupGens) -> Result<Vec<f64>> {
    let mut c = group_expectations(psi, group)?;
    fwht_real(&mut c);
    let size = c.len() as f64;
    Ok(c.into_iter().map(|v| (v / size).max(0.0)).collect())
}

/// `A_{G,α}(ψ) = S_α(𝒢_G(ψ))`: the entropy of the dephased state, which for
/// pure input is the entropy of the joint outcome distribution of `G`.
pub fn g_asymmetry(psi: &Statevector, group: &StabilizerGroupGens, alpha: f64) -> Result<f64> {
    Ok(renyi(&group_outcome_distribution(psi, group)?, alpha).max(0.0))
}

/// `A_{G,2} = -ln(Σ_{P∈G} <P>^2 / |G|)` read off the Pauli spectrum.
pub fn g_asymmetry_renyi2_pauli(psi: &Statevector, group: &StabilizerGroupGens) -> Result<f64> {
    check_dim(group.n, psi.num_qubits())?;
    let spec = psi.pauli_spectrum()?;
    let elems = group.elements();
    let s: f64 = elems.iter().map(|p| spec.of(p).powi(2)).sum();
    Ok((-(s / elems.len() as f64).ln()).max(0.0))
}

/// Largest squared overlap with a stabilizer state (exhaustive, `n <= 5`),
/// with the basis key and element index of the maximizer.
pub fn stabilizer_fidelity(psi: &Statevector) -> Result<(f64, StabBasisKey, usize)> {
    bmsa::max_stabilizer_overlap(psi).map_err(|e| match e {
        MagicError::CapExceeded { n, cap, .. } => MagicError::CapExceeded {
            what: "stabilizer_fidelity (use branch and bound at alpha = inf)",
            n,
            cap,
        },
        other => other,
    })
}

/// `D_min = -ln F_STAB` (nats).
pub fn d_min(psi: &Statevector) -> Result<f64> {
    Ok((-stabilizer_fidelity(psi)?.0.ln()).max(0.0))
}

/// Stabilizer nullity `N - log2 |{P : |<P>| >= 1 - tol}|`. The counted set
/// must be a group; otherwise a tolerance error is returned.
pub fn nullity(psi: &Statevector, tol: f64) -> Result<usize> {
    let n = psi.num_qubits();
    let spec = psi.pauli_spectrum()?;
    let set: HashSet<u64> = spec
        .values()
        .iter()
        .enumerate()
        .filter(|(_, b)| b.abs() >= 1.0 - tol)
        .map(|(i, _)| i as u64)
        .collect();
    let size = set.len();
    if !size.is_power_of_two() {
        return Err(MagicError::Tolerance(format!(
            "{size} Paulis with |<P>| >= 1 - {tol}: not a power of two"
        )));
    }
    for &a in &set {
        for &b in &set {
            let anticommute = ((a & mask(n)) & (b >> n) ^ (a >> n) & (b & mask(n))).count_ones() % 2 == 1;
            if !set.contains(&(a ^ b)) || anticommute {
                return Err(MagicError::Tolerance(
                    "near-unit Paulis do not form a commuting group".into(),
                ));
            }
        }
    }
    Ok(n - size.trailing_zeros() as usize)
}

/// Self-convolution `Q(b) = Σ_a Ξ(a) Ξ(a ⊕ b)` of the characteristic
/// distribution over F_2^{2n}, via the Walsh-Hadamard transform.
pub fn convolved_spectrum(psi: &Statevector) -> Result<Vec<f64>> {
    check_cap("convolved_spectrum", psi.num_qubits(), CONV_CAP)?;
    let mut xi = characteristic_distribution(psi)?;
    let len = xi.len() as f64;
    fwht_real(&mut xi);
    for v in xi.iter_mut() {
        *v = *v * *v;
    }
    fwht_real(&mut xi);
    Ok(xi.into_iter().map(|v| (v / len).max(0.0)).collect())
}

/// `r(b) = |<psi|P_b|psi*>|^2 / 2^n`, a second route to the convolved
/// spectrum: its self-convolution equals that of `Ξ`.
pub fn conjugate_overlap_spectrum(psi: &Statevector) -> Result<Vec<f64>> {
    let n = psi.num_qubits();
    check_cap("conjugate_overlap_spectrum", n, CONV_CAP)?;
    let amps = psi.amps();
    let dim = psi.dim();
    let mut out = vec![0.0; dim * dim];
    for (idx, slot) in out.iter_mut().enumerate() {
        let p = PauliString::from_index(n, idx as u64);
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 0..dim as u64 {
            // P|psi*> has amplitude conj(psi(s)) i^k at s ^ x
            let (t, k) = p.act_on_basis(s);
            acc += amps[t as usize].conj() * amps[s as usize].conj() * I_POW[k as usize];
        }
        *slot = acc.norm_sqr() / dim as f64;
    }
    Ok(out)
}

/// `A_2^conv = min_G -ln Σ_{b∈G} Q(b)` over full stabilizer groups, with
/// the minimizing key. Zero on stabilizer states.
pub fn a2_conv(psi: &Statevector) -> Result<(f64, StabBasisKey)> {
    let n = psi.num_qubits();
    let q = convolved_spectrum(psi)?;
    let keys = bmsa::key_by_group(n)?;
    let mut best: Option<(f64, &StabBasisKey)> = None;
    for g in bmsa::lagrangian_subspaces(n)? {
        let size = 1usize << g.len();
        let mut elem = vec![0u64; size];
        let mut s = q[0];
        for u in 1..size {
            elem[u] = elem[u & (u - 1)] ^ g[u.trailing_zeros() as usize];
            s += q[elem[u] as usize];
        }
        let v = -s.ln();
        let key = &keys[g];
        match best {
            Some((bv, bk)) if !(v < bv - bmsa::TIE_TOL || ((v - bv).abs() <= bmsa::TIE_TOL && key < bk)) => {}
            _ => best = Some((v, key)),
        }
    }
    let (v, key) = best.expect("groups exist");
    Ok((v.max(0.0), key.clone()))
}

/// `G`-asymmetry of the basis `key`, computed from the Pauli spectrum.
pub fn basis_entropy_from_spectrum(psi: &Statevector, key: &StabBasisKey, alpha: f64) -> Result<f64> {
    let n = psi.num_qubits();
    check_dim(key.num_qubits(), n)?;
    let spec = psi.pauli_spectrum()?;
    let gens: Vec<u64> = key
        .stabilizer_generators()?
        .iter()
        .map(|g| g.x_mask() | (g.z_mask() << n))
        .collect();
    debug_assert!(gens.iter().all(|g| g >> (2 * n) == 0 && (g & mask(2 * n)) == *g));
    Ok(renyi(&group_distribution(spec.values(), n, &gens), alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmsa::{bmsa_bruteforce, distribution_for_basis, random_key, Backend};
    use crate::clifford::random_clifford;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use rand::{Rng, SeedableRng};
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

    fn w(n: usize) -> Statevector {
        let amps = (0..1usize << n)
            .map(|i| Complex64::new(if i.count_ones() == 1 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        Statevector::from_unnormalized(amps).unwrap()
    }

    #[test]
    fn sre_examples() {
        assert!(sre(&Statevector::plus_state(3), 2.0, false).unwrap().abs() < 1e-12);
        assert!((sre(&chi(), 2.0, false).unwrap() - 1.5f64.ln()).abs() < 1e-12);
        for n in 3..=6 {
            let nf = n as f64;
            let expected = 3.0 * nf.ln() - (7.0 * nf - 6.0).ln();
            assert!((sre(&w(n), 2.0, false).unwrap() - expected).abs() < 1e-9);
        }
        // linear and Rényi forms are tied by M_n = ln(1 - M^lin_n) / (1 - n)
        let m2 = sre(&chi(), 2.0, false).unwrap();
        let lin = sre(&chi(), 2.0, true).unwrap();
        assert!(((1.0 - lin).ln() / -1.0 - m2).abs() < 1e-12);
    }

    #[test]
    fn sre_additive_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let a = random_state(2, &mut rng);
            let b = random_state(2, &mut rng);
            let ab = a.tensor(&b);
            for order in [1.0, 2.0, 3.0] {
                let lhs = sre(&ab, order, false).unwrap();
                let rhs = sre(&a, order, false).unwrap() + sre(&b, order, false).unwrap();
                assert!((lhs - rhs).abs() < 1e-9);
                let lin = sre(&ab, order, true).unwrap();
                assert!((-1e-12..=1.0).contains(&lin));
            }
        }
    }

    #[test]
    fn g_asymmetry_examples() {
        let z = StabilizerGroupGens::new(1, vec!["Z".parse().unwrap()]).unwrap();
        let plus = Statevector::plus_state(1);
        assert!((g_asymmetry(&plus, &z, 2.0).unwrap() - LN_2).abs() < 1e-12);
        assert!((g_asymmetry_renyi2_pauli(&plus, &z).unwrap() - LN_2).abs() < 1e-12);
        let x = StabilizerGroupGens::new(1, vec!["X".parse().unwrap()]).unwrap();
        assert!(g_asymmetry(&plus, &x, 1.0).unwrap().abs() < 1e-12);
        let bad = StabilizerGroupGens::new(1, vec!["X".parse().unwrap(), "Z".parse().unwrap()]);
        assert!(matches!(bad, Err(MagicError::Domain(_))));
        let dep = StabilizerGroupGens::new(2, vec!["XX".parse().unwrap(), "XX".parse().unwrap()]);
        assert!(matches!(dep, Err(MagicError::Domain(_))));
    }

    #[test]
    fn g_asymmetry_pipelines_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let psi = random_state(3, &mut rng);
            let key = random_key(3, &mut rng);
            let g = StabilizerGroupGens::from_key(&key).unwrap();
            let direct = distribution_for_basis(&psi, &key).unwrap();
            for alpha in [0.5, 1.0, 2.0, f64::INFINITY] {
                let a = g_asymmetry(&psi, &g, alpha).unwrap();
                assert!((a - direct.entropy(alpha)).abs() < 1e-9);
                let b = basis_entropy_from_spectrum(&psi, &key, alpha).unwrap();
                assert!((a - b).abs() < 1e-9);
            }
            let r2 = g_asymmetry_renyi2_pauli(&psi, &g).unwrap();
            assert!((r2 - direct.entropy(2.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn partial_group_asymmetry_hierarchy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_state(3, &mut rng);
        let g = StabilizerGroupGens::new(3, vec!["ZZI".parse().unwrap(), "XXX".parse().unwrap()]).unwrap();
        let vals: Vec<f64> = [0.5, 1.0, 2.0, 5.0, f64::INFINITY]
            .iter()
            .map(|&a| g_asymmetry(&psi, &g, a).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(vals[0] <= 2.0 * LN_2 + 1e-12);
        assert!((vals[3 - 1] - g_asymmetry_renyi2_pauli(&psi, &g).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn own_group_has_zero_asymmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let key = random_key(3, &mut rng);
            let s = key.basis_state(0, 0).unwrap();
            let g = StabilizerGroupGens::from_key(&key).unwrap();
            assert!(g_asymmetry(&s, &g, 1.0).unwrap() < 1e-12);
        }
    }

    #[test]
    fn fidelity_examples() {
        let (f, _, _) = stabilizer_fidelity(&Statevector::plus_state(2)).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
        // oracle: the six single-qubit stabilizer states
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let i = Complex64::new(0.0, h);
        let r = Complex64::new(h, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let six = [[one, zero], [zero, one], [r, r], [r, -r], [r, i], [r, -i]];
        let oracle = six
            .iter()
            .map(|s| {
                let st = Statevector::from_amplitudes(s.to_vec()).unwrap();
                st.inner(&chi()).unwrap().norm_sqr()
            })
            .fold(0.0, f64::max);
        let expected = (1.0 + 1.0 / 3f64.sqrt()) / 2.0;
        assert!((oracle - expected).abs() < 1e-12);
        assert!((stabilizer_fidelity(&chi()).unwrap().0 - expected).abs() < 1e-12);
        let two = chi().tensor(&chi());
        assert!((d_min(&two).unwrap() - 2.0 * d_min(&chi()).unwrap()).abs() < 1e-10);
        assert!(matches!(
            d_min(&Statevector::zero_state(6)),
            Err(MagicError::CapExceeded { .. })
        ));
    }

    #[test]
    fn nullity_examples() {
        assert_eq!(nullity(&Statevector::plus_state(3), 1e-8).unwrap(), 0);
        assert_eq!(nullity(&Statevector::zero_state(1).tensor(&chi()), 1e-8).unwrap(), 1);
        assert_eq!(nullity(&chi().tensor(&chi()), 1e-8).unwrap(), 2);
        // a loose tolerance admits a non-group set
        assert!(matches!(nullity(&chi(), 0.5), Err(MagicError::Tolerance(_))));
    }

    #[test]
    fn convolved_spectrum_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3 {
            let psi = random_state(n, &mut rng);
            let q = convolved_spectrum(&psi).unwrap();
            let xi = characteristic_distribution(&psi).unwrap();
            // naive convolution
            for (b, &qb) in q.iter().enumerate() {
                let naive: f64 = (0..xi.len()).map(|a| xi[a] * xi[a ^ b]).sum();
                assert!((qb - naive).abs() < 1e-12);
            }
            let r = conjugate_overlap_spectrum(&psi).unwrap();
            for (b, &qb) in q.iter().enumerate() {
                let rr: f64 = (0..r.len()).map(|a| r[a] * r[a ^ b]).sum();
                assert!((qb - rr).abs() < 1e-9);
            }
            let q0: f64 = xi.iter().map(|x| x * x).sum();
            assert!((q[0] - q0).abs() < 1e-12);
            let m2 = sre(&psi, 2.0, false).unwrap();
            assert!((q0 - (-m2).exp() / psi.dim() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn a2_conv_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..5 {
            let key = random_key(2, &mut rng);
            let s = key.basis_state(0, 0).unwrap();
            assert!(a2_conv(&s).unwrap().0.abs() < 1e-10);
        }
        let c = a2_conv(&chi()).unwrap().0;
        let a2 = bmsa_bruteforce(&chi(), 2.0, Backend::Overlap).unwrap().value;
        assert!(c >= 0.0 && c <= 2.0 * a2 + 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn measures_are_clifford_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = random_state(3, &mut rng);
            let c = random_clifford(3, &mut rng);
            let out = c.apply_to_state(&psi).unwrap();
            for order in [1.0, 2.0] {
                prop_assert!((sre(&psi, order, false).unwrap() - sre(&out, order, false).unwrap()).abs() < 1e-9);
            }
            prop_assert!((d_min(&psi).unwrap() - d_min(&out).unwrap()).abs() < 1e-9);
            prop_assert_eq!(nullity(&psi, 1e-8).unwrap(), nullity(&out, 1e-8).unwrap());
        }
    }
}
