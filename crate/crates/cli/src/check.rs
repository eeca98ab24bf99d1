//! Randomized check of the relations between BMSA, SRE, D_min and nullity.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stabmagic::bmsa::bmsa;
use stabmagic::clifford::random_clifford;
use stabmagic::measures::{d_min, nullity, sre};
use stabmagic::{Result, Statevector};

pub const TOL: f64 = 1e-9;

/// Tally for one relation. `worst_slack` is the smallest `rhs - lhs` seen;
/// a violation is a slack below `-TOL`.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub checks: usize,
    pub violations: usize,
    pub worst_slack: f64,
}

impl Tally {
    fn record(&mut self, slack: f64) {
        if self.checks == 0 || slack < self.worst_slack {
            self.worst_slack = slack;
        }
        self.checks += 1;
        if slack < -TOL {
            self.violations += 1;
        }
    }
}

pub struct Report {
    pub tallies: BTreeMap<&'static str, Tally>,
}

impl Report {
    pub fn total_violations(&self) -> usize {
        self.tallies.values().map(|t| t.violations).sum()
    }
}

/// Runs `trials` random states on `n` qubits. With `fault` the D_min
/// values are tripled, which must trip the battery.
pub fn run(n: usize, trials: usize, seed: u64, fault: bool) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tallies: BTreeMap<&'static str, Tally> = BTreeMap::new();
    let mut rec = |name: &'static str, slack: f64| tallies.entry(name).or_default().record(slack);
    let cap = n as f64 * LN_2;
    for _ in 0..trials {
        let psi = Statevector::haar_random(n, &mut rng)?;
        let a_half = bmsa(&psi, 0.5)?.value;
        let a1 = bmsa(&psi, 1.0)?.value;
        let a2 = bmsa(&psi, 2.0)?.value;
        let a_inf = bmsa(&psi, f64::INFINITY)?.value;
        let mut dm = d_min(&psi)?;
        if fault {
            dm *= 3.0;
        }
        let m2 = sre(&psi, 2.0, false)?;
        let nu = nullity(&psi, TOL)? as f64;

        rec("sre_le_2_bmsa", 2.0 * a1 - m2);
        rec("sre_le_2_bmsa", 2.0 * a2 - m2);
        for order in [0.5, 1.0, 2.0] {
            rec("two_bmsa_half_ge_sre", 2.0 * a_half - sre(&psi, order, false)?);
        }
        for a in [a_half, a1, a2, a_inf] {
            rec("nullity_bound", nu * LN_2 - a);
            rec("dmin_le_bmsa", a - dm);
            rec("range", a.min(cap - a));
        }
        rec("bmsa2_le_2_dmin", 2.0 * dm - a2);
        rec("bmsa_inf_eq_dmin", 0.0 - (a_inf - dm).abs());
        rec("alpha_hierarchy", (a_half - a1).min(a1 - a2).min(a2 - a_inf));

        let moved = random_clifford(n, &mut rng).apply_to_state(&psi)?;
        rec("clifford_invariance", 0.0 - (bmsa(&moved, 1.0)?.value - a1).abs());

        if n >= 2 {
            let left = Statevector::haar_random(1, &mut rng)?;
            let right = Statevector::haar_random(n - 1, &mut rng)?;
            let joint = left.tensor(&right);
            for alpha in [1.0, 2.0] {
                let parts = bmsa(&left, alpha)?.value + bmsa(&right, alpha)?.value;
                rec("subadditivity", parts - bmsa(&joint, alpha)?.value);
            }
        }

        for j in 0..n {
            let mut avg = 0.0;
            for (_, p, post) in psi.measure_qubit_outcomes(j)? {
                if p > 1e-14 {
                    avg += p * bmsa(&post, 1.0)?.value;
                }
            }
            rec("strong_monotonicity", a1 - avg);
        }
    }
    Ok(Report { tallies })
}
