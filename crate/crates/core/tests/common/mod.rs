#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use corrpoly::rational::Rational;
use corrpoly::{CorrelationSet, JointDistribution, Marginal, ProductSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Full-support marginal with integer weights in `1..=9`, normalized.
pub fn random_marginal(rng: &mut impl Rng, index: usize, n: usize) -> Marginal {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    Marginal::new(index, raw.iter().map(|&w| r(w, total)).collect()).unwrap()
}

pub fn random_cs(rng: &mut impl Rng, sizes: &[usize]) -> CorrelationSet {
    let space = ProductSpace::new(sizes.to_vec()).unwrap();
    let marginals: Vec<Marginal> = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| random_marginal(rng, i, n))
        .collect();
    CorrelationSet::new(&space, &marginals).unwrap()
}

/// Every shape with at most `max_arity` subspaces of sizes `1..=max_size`.
pub fn shapes(max_arity: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_arity {
        let mut next = Vec::new();
        for s in &frontier {
            for k in 1..=max_size {
                let mut t = s.clone();
                t.push(k);
                out.push(t.clone());
                next.push(t);
            }
        }
        frontier = next;
    }
    out
}

/// Shapes with every size at least 2 and `∏ n_i ≤ max_total`.
pub fn shapes_up_to(max_total: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, product: usize, max_total: usize, out: &mut Vec<Vec<usize>>) {
        for k in 2..=max_total {
            if product * k > max_total {
                break;
            }
            prefix.push(k);
            out.push(prefix.clone());
            grow(prefix, product * k, max_total, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), 1, max_total, &mut out);
    out
}

/// Solves `A x = b` by fraction Gauss-Jordan; `None` unless the solution exists and is unique.
pub fn unique_solution(a: &[Vec<Rational>], b: &[Rational], ncols: usize) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut v = row.clone();
            v.push(rhs.clone());
            v
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(p) = (pivot_row..m.len()).find(|&k| !m[k][col].is_zero()) else {
            return None;
        };
        m.swap(pivot_row, p);
        let inv = Rational::one() / m[pivot_row][col].clone();
        for x in m[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for k in 0..m.len() {
            if k != pivot_row && !m[k][col].is_zero() {
                let f = m[k][col].clone();
                for c in 0..=ncols {
                    let delta = &f * &m[pivot_row][c];
                    m[k][c] -= delta;
                }
            }
        }
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    Some((0..ncols).map(|c| m[c][ncols].clone()).collect())
}

/// Marginal rows of `cs` written out from scratch: row `(i, c)` has ones on `[ω_i = c]`.
pub fn marginal_rows(cs: &CorrelationSet) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let space = cs.space();
    let n = space.total_size();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (i, m) in cs.marginals().iter().enumerate() {
        for (c, w) in m.weights().iter().enumerate() {
            let row = (0..n)
                .map(|k| {
                    if space.multi_index(k).coords()[i] == c {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            rows.push(row);
            rhs.push(w.clone());
        }
    }
    (rows, rhs)
}

/// Brute-force vertices: every support subset whose restricted system has a unique,
/// non-negative solution. Sorted by weights.
pub fn brute_force_vertices(cs: &CorrelationSet) -> Vec<Vec<Rational>> {
    let n = cs.space().total_size();
    assert!(n <= 16, "brute force is exponential");
    let (rows, rhs) = marginal_rows(cs);
    let mut found: Vec<Vec<Rational>> = Vec::new();
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
        if support.len() > rows.len() {
            continue;
        }
        let a: Vec<Vec<Rational>> = rows
            .iter()
            .map(|row| support.iter().map(|&k| row[k].clone()).collect())
            .collect();
        if let Some(x) = unique_solution(&a, &rhs, support.len()) {
            if x.iter().all(|v| !v.is_negative()) {
                let mut w = vec![Rational::zero(); n];
                for (&k, v) in support.iter().zip(x) {
                    w[k] = v;
                }
                found.push(w);
            }
        }
    }
    found.sort();
    found.dedup();
    found
}

/// Random member of `𝒫`: `p_ind + t ε q` for a random kernel combination `q`, where `ε` is
/// the largest feasible step along `q` and `t ∈ (0, 1]`.
pub fn random_member(cs: &CorrelationSet, rng: &mut impl Rng) -> JointDistribution {
    let base = cs.independent_product().weights().to_vec();
    let n = base.len();
    let mut q = vec![Rational::zero(); n];
    for v in cs.kernel().vectors() {
        let c = Rational::from_integer(rng.gen_range(-5i64..=5).into());
        for (x, y) in q.iter_mut().zip(v) {
            *x += &c * y;
        }
    }
    let mut eps: Option<Rational> = None;
    for (b, d) in base.iter().zip(&q) {
        if d.is_negative() {
            let bound = -(b / d);
            eps = Some(match eps {
                Some(e) if e < bound => e,
                _ => bound,
            });
        }
    }
    let t = r(rng.gen_range(1..=16), 16);
    let step = eps.map(|e| e * t).unwrap_or_else(Rational::zero);
    let w = base.iter().zip(&q).map(|(b, d)| b + &step * d).collect();
    JointDistribution::new(cs.space().clone(), w).unwrap()
}

pub fn random_values(rng: &mut impl Rng, n: usize, lo: i64, hi: i64) -> Vec<Rational> {
    (0..n).map(|_| Rational::from_integer(rng.gen_range(lo..=hi).into())).collect()
}
