//! Entropy, relative entropy and mutual information (base 2, in bits).

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::polytope::CorrelationSet;
use crate::rational::{to_f64, Rational};
use crate::space::JointDistribution;

/// Tolerance for identities between float-valued quantities.
pub const EQ_TOL: f64 = 1e-9;
/// Slack required for a probe to count as a strict decrease.
pub const STRICT_TOL: f64 = 1e-12;
pub const LADDER: usize = 9;
pub const LADDER_TAIL: usize = 3;

fn plogp(w: &Rational) -> f64 {
    if w.is_zero() {
        0.0
    } else {
        let x = to_f64(w);
        x * x.log2()
    }
}

pub fn entropy_of(weights: &[Rational]) -> f64 {
    -weights.iter().map(plogp).sum::<f64>()
}

/// Shannon entropy `-Σ p log2 p`, with `0 log 0 = 0`.
pub fn entropy(p: &JointDistribution) -> f64 {
    entropy_of(p.weights())
}

/// `D(p ‖ q)`; `+∞` when `p` puts mass where `q` does not.
pub fn kl_divergence(p: &JointDistribution, q: &JointDistribution) -> Result<f64> {
    if !p.space().same_shape(q.space()) {
        return Err(Error::InvalidSpace(format!("{} vs {}", p.space(), q.space())));
    }
    Ok(kl_weights(p.weights(), q.weights()))
}

fn kl_weights(p: &[Rational], q: &[Rational]) -> f64 {
    let mut total = 0.0;
    for (a, b) in p.iter().zip(q) {
        if a.is_zero() {
            continue;
        }
        if b.is_zero() {
            return f64::INFINITY;
        }
        total += to_f64(a) * to_f64(&(a / b)).log2();
    }
    total
}

/// Entropies `H(p_i)` of the marginals of `cs`.
pub fn marginal_entropies(cs: &CorrelationSet) -> Vec<f64> {
    cs.marginals().iter().map(|m| entropy_of(m.weights())).collect()
}

/// `I(p) = D(p ‖ p_ind)`, cross-checked against `Σ H(p_i) - H(p)`.
pub fn mutual_information(cs: &CorrelationSet, p: &JointDistribution) -> Result<f64> {
    if !cs.contains(p) {
        return Err(Error::NotInCorrelationSet);
    }
    let direct = kl_weights(p.weights(), cs.independent_product().weights());
    let via_entropy: f64 = marginal_entropies(cs).iter().sum::<f64>() - entropy(p);
    if (direct - via_entropy).abs() > EQ_TOL {
        return Err(Error::Internal(format!(
            "mutual information {direct} disagrees with entropy identity {via_entropy}"
        )));
    }
    Ok(direct.max(0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MutualInformationReport {
    pub value: f64,
    pub is_local_max: bool,
    pub probe_count: usize,
    /// Largest `I(probe point) - I(p)` over the judged steps; negative when every probe decreased.
    pub max_observed_increase: f64,
}

/// Numerically certifies that `p` is a local maximizer of `I` over `𝒫`.
///
/// Directions point from `p` towards every vertex of `𝒫` and towards `random_probes`
/// seeded random convex combinations of vertices; along each, `I` is evaluated at
/// `λ = step / 4^k` for `k = 0..LADDER`. A vertex only wins once `λ` is small enough for the
/// `λ log λ` entropy gain of its zero cells to dominate, so the verdict looks at the last
/// [`LADDER_TAIL`] steps, where `I` must drop by more than [`STRICT_TOL`].
pub fn certify_local_max_mi(
    cs: &CorrelationSet,
    p: &JointDistribution,
    random_probes: usize,
    step: &Rational,
    seed: u64,
) -> Result<MutualInformationReport> {
    if !(step > &Rational::zero() && step <= &Rational::one()) {
        return Err(Error::Precondition("step must lie in (0, 1]".into()));
    }
    let base = mutual_information(cs, p)?;
    let ind = weights_f64(cs.independent_product().weights());
    let vertices = cs.vertices()?;

    // probes are convex combinations of members, so they stay in 𝒫; evaluate them in f64
    let pw = weights_f64(p.weights());
    let all_w: Vec<Vec<f64>> = vertices.iter().map(|v| weights_f64(v.weights())).collect();
    let mut targets: Vec<Vec<f64>> =
        vertices.iter().zip(&all_w).filter(|(v, _)| *v != p).map(|(_, w)| w.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // with one vertex every mixture is p itself
    let probes = if all_w.len() > 1 { random_probes } else { 0 };
    for _ in 0..probes {
        let coeffs: Vec<f64> = all_w.iter().map(|_| rng.gen_range(1..=64) as f64).collect();
        let total: f64 = coeffs.iter().sum();
        let mut w = vec![0.0; pw.len()];
        for (c, v) in coeffs.iter().zip(&all_w) {
            for (x, y) in w.iter_mut().zip(v) {
                *x += c / total * y;
            }
        }
        targets.push(w);
    }

    let base_f = mi_f64(&pw, &ind);
    let lambdas: Vec<f64> = (LADDER - LADDER_TAIL..LADDER).map(|k| to_f64(step) / 4f64.powi(k as i32)).collect();
    let mut probe_count = 0;
    let mut all_decrease = true;
    let mut max_increase = f64::NEG_INFINITY;
    let mut q = vec![0.0; pw.len()];
    for tw in &targets {
        probe_count += 1;
        for &l in &lambdas {
            for ((x, a), b) in q.iter_mut().zip(&pw).zip(tw) {
                *x = (1.0 - l) * a + l * b;
            }
            let v = mi_f64(&q, &ind);
            max_increase = max_increase.max(v - base_f);
            if v + STRICT_TOL >= base_f {
                all_decrease = false;
            }
        }
    }
    Ok(MutualInformationReport {
        value: base,
        is_local_max: all_decrease,
        probe_count,
        max_observed_increase: if probe_count == 0 { 0.0 } else { max_increase },
    })
}

fn weights_f64(w: &[Rational]) -> Vec<f64> {
    w.iter().map(to_f64).collect()
}

fn mi_f64(p: &[f64], ind: &[f64]) -> f64 {
    p.iter()
        .zip(ind)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a / b).log2())
        .sum()
}

/// Random convex combination of `vertices` with integer weights in `1..=64`.
pub fn random_member(
    space: &crate::space::ProductSpace,
    vertices: &[JointDistribution],
    rng: &mut impl Rng,
) -> JointDistribution {
    let coeffs: Vec<Rational> = vertices
        .iter()
        .map(|_| Rational::from_integer(rng.gen_range(1..=64).into()))
        .collect();
    let total: Rational = coeffs.iter().sum();
    let mut w = vec![Rational::zero(); space.total_size()];
    for (c, v) in coeffs.iter().zip(vertices) {
        let c = c / &total;
        for (x, y) in w.iter_mut().zip(v.weights()) {
            *x += &c * y;
        }
    }
    JointDistribution::new(space.clone(), w).expect("convex combination of distributions")
}
