//! Selection, crossover and mutation.

use alloc::vec::Vec;
use rand::Rng;

use crate::math;

/// Crowded binary tournament: draws two indices uniformly and returns the
/// one with lower rank, then larger crowding, then the first drawn.
pub fn tournament_select<R: Rng + ?Sized>(ranks: &[usize], crowding: &[f64], rng: &mut R) -> usize {
    let n = ranks.len();
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    crowded_winner(a, b, ranks, crowding)
}

pub(crate) fn crowded_winner(a: usize, b: usize, ranks: &[usize], crowding: &[f64]) -> usize {
    if ranks[b] < ranks[a] || (ranks[b] == ranks[a] && crowding[b] > crowding[a]) {
        b
    } else {
        a
    }
}

/// SBX spread factor for a uniform draw `u`.
pub fn sbx_beta(u: f64, eta: f64) -> f64 {
    let e = 1.0 / (eta + 1.0);
    if u <= 0.5 {
        math::powf(2.0 * u, e)
    } else {
        math::powf(1.0 / (2.0 * (1.0 - u)), e)
    }
}

/// Children of one gene pair before clamping.
pub fn sbx_gene(x1: f64, x2: f64, beta: f64) -> (f64, f64) {
    (
        0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2),
        0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2),
    )
}

/// Simulated binary crossover. Each gene is recombined with probability
/// one half, otherwise copied; children are clamped to `bounds`. A
/// recombined gene pair goes to the two children in random order, which is
/// what lets genes from both parents mix.
pub fn sbx_crossover<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    eta: f64,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for i in 0..p1.len() {
        if rng.random::<f64>() >= 0.5 {
            continue;
        }
        let beta = sbx_beta(rng.random::<f64>(), eta);
        let (mut a, mut b) = sbx_gene(p1[i], p2[i], beta);
        if rng.random::<f64>() < 0.5 {
            core::mem::swap(&mut a, &mut b);
        }
        let (lo, hi) = bounds[i];
        c1[i] = a.clamp(lo, hi);
        c2[i] = b.clamp(lo, hi);
    }
    (c1, c2)
}

/// Bounded polynomial perturbation of one gene for a uniform draw `u`.
pub fn polynomial_perturb(y: f64, lo: f64, hi: f64, eta: f64, u: f64) -> f64 {
    let span = hi - lo;
    if !(span > 0.0) {
        return y;
    }
    let p = 1.0 / (eta + 1.0);
    let dq = if u < 0.5 {
        let xy = 1.0 - (y - lo) / span;
        let val = 2.0 * u + (1.0 - 2.0 * u) * math::powf(xy, eta + 1.0);
        math::powf(val, p) - 1.0
    } else {
        let xy = 1.0 - (hi - y) / span;
        let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * math::powf(xy, eta + 1.0);
        1.0 - math::powf(val, p)
    };
    (y + dq * span).clamp(lo, hi)
}

/// Mutates each gene with probability `prob`.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    genome: &mut [f64],
    eta: f64,
    bounds: &[(f64, f64)],
    prob: f64,
    rng: &mut R,
) {
    for (g, &(lo, hi)) in genome.iter_mut().zip(bounds) {
        if rng.random::<f64>() < prob {
            *g = polynomial_perturb(*g, lo, hi, eta, rng.random::<f64>());
        }
    }
}
