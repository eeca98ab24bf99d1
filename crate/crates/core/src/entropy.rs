//! Rényi entropies of classical distributions and the Walsh-Hadamard transform.
//!
//! All entropies are in nats. `alpha` may be any non-negative real or
//! `f64::INFINITY` (min-entropy).

use num_complex::Complex64;

/// Probabilities at or below this are treated as zero when counting support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Rényi-α entropy of a (normalized) probability vector, in nats.
///
/// `alpha == 1` is the Shannon entropy with `0 ln 0 = 0`, `alpha == 0` is
/// the log of the support size and `alpha == inf` is `-ln max p`.
pub fn renyi(probs: &[f64], alpha: f64) -> f64 {
    debug_assert!(alpha >= 0.0);
    if alpha == 0.0 {
        let support = probs.iter().filter(|&&p| p > SUPPORT_THRESHOLD).count();
        return (support.max(1) as f64).ln();
    }
    if alpha == 1.0 {
        return shannon(probs);
    }
    if alpha.is_infinite() {
        let max = probs.iter().cloned().fold(0.0_f64, f64::max);
        return -max.ln();
    }
    let sum: f64 = if alpha == 2.0 {
        probs.iter().map(|&p| p * p).sum()
    } else {
        probs.iter().filter(|&&p| p > 0.0).map(|&p| p.powf(alpha)).sum()
    };
    sum.ln() / (1.0 - alpha)
}

pub fn shannon(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

/// In-place unnormalized Walsh-Hadamard transform (`H = [[1,1],[1,-1]]` per bit).
pub fn fwht_real(data: &mut [f64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in data.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Complex counterpart of [`fwht_real`].
pub fn fwht_complex(data: &mut [Complex64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in data.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Binary Shannon entropy `-p ln p - (1-p) ln(1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    shannon(&[p, 1.0 - p])
}
