//! Named state generators and state files.

use std::f64::consts::PI;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stabmagic::simkit::{
    chi_state, doped_clifford_state, ghz_state, gue_evolved, ising_ground_state, product_theta_state, psi_eps,
    random_stabilizer_state, w_state, Boundary,
};
use stabmagic::{MagicError, Result, Statevector};

/// Parses `1.2`, `pi`, `pi/8`, `3pi/8`, `-pi/4`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || MagicError::Domain(format!("cannot parse angle {s:?}"));
    let Some(pos) = t.find("pi") else {
        return t.parse().map_err(|_| bad());
    };
    let (coef, rest) = (&t[..pos], &t[pos + 2..]);
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
    };
    let div = match rest.strip_prefix('/') {
        Some(d) => d.parse::<f64>().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    Ok(coef * PI / div)
}

fn field<T: std::str::FromStr>(parts: &[&str], i: usize, spec: &str) -> Result<T> {
    parts
        .get(i)
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| MagicError::Domain(format!("bad state spec {spec:?}")))
}

/// Resolves a `--state` argument. Random generators draw from `seed`.
pub fn load_state(spec: &str, seed: u64) -> Result<Statevector> {
    let parts: Vec<&str> = spec.split(':').collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arity = |k: usize| -> Result<()> {
        if parts.len() == k {
            Ok(())
        } else {
            Err(MagicError::Domain(format!(
                "{} takes {} field(s): {spec:?}",
                parts[0],
                k - 1
            )))
        }
    };
    match parts[0] {
        "chi" => {
            arity(1)?;
            Ok(chi_state())
        }
        "w" => {
            arity(2)?;
            w_state(field(&parts, 1, spec)?)
        }
        "ghz" => {
            arity(2)?;
            ghz_state(field(&parts, 1, spec)?)
        }
        "zero" => {
            arity(2)?;
            Ok(Statevector::zero_state(field(&parts, 1, spec)?))
        }
        "theta" => {
            arity(3)?;
            product_theta_state(field(&parts, 2, spec)?, parse_angle(parts[1])?)
        }
        "ising" => {
            arity(4)?;
            let bc: Boundary = parts[3].parse()?;
            ising_ground_state(field(&parts, 1, spec)?, field(&parts, 2, spec)?, bc)
        }
        "gue" => {
            arity(3)?;
            gue_evolved(field(&parts, 1, spec)?, field(&parts, 2, spec)?, &mut rng)
        }
        "doped" => {
            arity(3)?;
            doped_clifford_state(field(&parts, 1, spec)?, field(&parts, 2, spec)?, &mut rng)
        }
        "psieps" => {
            arity(3)?;
            psi_eps(field(&parts, 1, spec)?, field(&parts, 2, spec)?)
        }
        "stab-random" => {
            arity(2)?;
            random_stabilizer_state(field(&parts, 1, spec)?, &mut rng)
        }
        "haar" => {
            arity(2)?;
            Statevector::haar_random(field(&parts, 1, spec)?, &mut rng)
        }
        _ => load_file(Path::new(spec)),
    }
}

/// `.json` files hold an array of `[re, im]` pairs, anything else raw
/// little-endian complex doubles.
fn load_file(path: &Path) -> Result<Statevector> {
    if !path.exists() {
        return Err(MagicError::Io(format!(
            "no generator or file named {:?}",
            path.display().to_string()
        )));
    }
    let bytes = std::fs::read(path).map_err(|e| MagicError::Io(e.to_string()))?;
    if path.extension().is_some_and(|e| e == "json") {
        let text = String::from_utf8(bytes).map_err(|e| MagicError::Io(e.to_string()))?;
        Statevector::from_json(&text)
    } else {
        Statevector::from_bytes(&bytes)
    }
}
