//! The correlation set `𝒫(Ω; p_1, …, p_n)`: its marginal system, kernel, dimension,
//! membership and vertices.

use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, EchelonBasis, Matrix, Solution};
use crate::rational::Rational;
use crate::space::{
    hamming_distance, independent_product, order_marginals, JointDistribution, Marginal,
    MultiIndex, ProductSpace,
};

/// Default bound on `N` for support enumeration.
pub const DEFAULT_VERTEX_GUARD: usize = 4096;

/// The linear system `M p = rhs` stating that `p` has the prescribed marginals.
///
/// Row `(i, ω_i)` has a one at every state of the cylinder `[ω_i]`; rows are ordered by
/// subspace, then by state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalSystem {
    space: ProductSpace,
    marginals: Vec<Marginal>,
    matrix: Matrix,
    rhs: Vec<Rational>,
}

impl MarginalSystem {
    pub fn new(space: &ProductSpace, marginals: &[Marginal]) -> Result<Self> {
        let ordered: Vec<Marginal> = order_marginals(space, marginals)?.into_iter().cloned().collect();
        let mut matrix = Vec::new();
        let mut rhs = Vec::new();
        for (i, m) in ordered.iter().enumerate() {
            for (c, w) in m.weights().iter().enumerate() {
                let row = (0..space.total_size())
                    .map(|k| {
                        if space.coordinate(k, i) == c {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect();
                matrix.push(row);
                rhs.push(w.clone());
            }
        }
        Ok(Self {
            space: space.clone(),
            marginals: ordered,
            matrix,
            rhs,
        })
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    /// Marginals ordered by subspace index.
    pub fn marginals(&self) -> &[Marginal] {
        &self.marginals
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn is_satisfied_by(&self, weights: &[Rational]) -> bool {
        weights.len() == self.space.total_size() && linalg::matvec(&self.matrix, weights) == self.rhs
    }

    /// Row index of `(i, ω_i)`.
    fn row_of(&self, i: usize, c: usize) -> usize {
        self.space.sizes()[..i].iter().sum::<usize>() + c
    }

    /// States lying in some cylinder `[ω_i]` with `p_i(ω_i) = 0`.
    pub fn forced_zero_states(&self) -> Vec<usize> {
        (0..self.space.total_size())
            .filter(|&k| {
                self.marginals
                    .iter()
                    .enumerate()
                    .any(|(i, m)| m.weights()[self.space.coordinate(k, i)].is_zero())
            })
            .collect()
    }
}

/// A basis of the kernel `Q = { q : M q = 0 }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis {
    vectors: Vec<Vec<Rational>>,
}

impl KernelBasis {
    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Whether `v` lies in the span of the basis (exact solve).
    pub fn spans(&self, v: &[Rational]) -> bool {
        let mut e = EchelonBasis::new();
        for b in &self.vectors {
            e.insert(b);
        }
        e.contains(v)
    }
}

/// `∏ n_i - 1 - Σ (n_i - 1)`.
pub fn dimension_formula(sizes: &[usize]) -> usize {
    let prod: usize = sizes.iter().product();
    let s: usize = sizes.iter().map(|n| n - 1).sum();
    prod - 1 - s
}

/// Rectangle mass shifts anchored at the all-zeros state.
pub fn kernel_basis_rectangles(space: &ProductSpace) -> KernelBasis {
    let anchor = MultiIndex(vec![0; space.arity()]);
    kernel_basis_rectangles_at(space, &anchor).expect("all-zeros state is always valid")
}

/// One rectangle shift per state `ω` at Hamming distance at least two from `anchor`:
/// with `i < j` the first two coordinates where they differ, `+1` on `ω` and on `ω`
/// with both coordinates reset to the anchor, `-1` on the two states with one reset.
pub fn kernel_basis_rectangles_at(space: &ProductSpace, anchor: &MultiIndex) -> Result<KernelBasis> {
    space.check_multi_index(anchor)?;
    let n = space.total_size();
    let mut vectors = Vec::new();
    for (k, w) in space.states().enumerate() {
        if hamming_distance(&w, anchor) < 2 {
            continue;
        }
        let mut diff = (0..space.arity()).filter(|&i| w.0[i] != anchor.0[i]);
        let (i, j) = (diff.next().unwrap(), diff.next().unwrap());
        let reset = |coords: &[usize]| {
            let mut c = w.0.clone();
            for &t in coords {
                c[t] = anchor.0[t];
            }
            space.flat_index(&MultiIndex(c)).expect("reset stays in range")
        };
        let mut v = vec![Rational::zero(); n];
        v[k] += Rational::one();
        v[reset(&[i, j])] += Rational::one();
        v[reset(&[i])] -= Rational::one();
        v[reset(&[j])] -= Rational::one();
        vectors.push(v);
    }
    Ok(KernelBasis { vectors })
}

/// Dimension of `𝒫`, computed both by rank and by the closed formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionReport {
    /// Affine dimension of `𝒫`.
    pub dim: usize,
    /// `N - rank(M)` for the full shape.
    pub rank_dim: usize,
    /// Closed formula for the full shape.
    pub formula_dim: usize,
    /// Shape after discarding zero-weight marginal states.
    pub reduced_sizes: Vec<usize>,
    pub warning: Option<String>,
}

/// The polytope `𝒫` of joint distributions with the given marginals.
#[derive(Debug)]
pub struct CorrelationSet {
    system: MarginalSystem,
    kernel: KernelBasis,
    p_ind: JointDistribution,
    guard: usize,
    vertices: OnceLock<Result<Vec<JointDistribution>>>,
}

impl Clone for CorrelationSet {
    fn clone(&self) -> Self {
        let vertices = OnceLock::new();
        if let Some(v) = self.vertices.get() {
            let _ = vertices.set(v.clone());
        }
        Self {
            system: self.system.clone(),
            kernel: self.kernel.clone(),
            p_ind: self.p_ind.clone(),
            guard: self.guard,
            vertices,
        }
    }
}

impl CorrelationSet {
    pub fn new(space: &ProductSpace, marginals: &[Marginal]) -> Result<Self> {
        let system = MarginalSystem::new(space, marginals)?;
        let p_ind = independent_product(space, system.marginals())?;
        Ok(Self {
            kernel: kernel_basis_rectangles(space),
            system,
            p_ind,
            guard: DEFAULT_VERTEX_GUARD,
            vertices: OnceLock::new(),
        })
    }

    /// Correlation set sharing the marginals of `p`.
    pub fn from_distribution(p: &JointDistribution) -> Result<Self> {
        Self::new(p.space(), &p.marginals())
    }

    pub fn with_guard(mut self, guard: usize) -> Self {
        self.guard = guard;
        self.vertices = OnceLock::new();
        self
    }

    pub fn space(&self) -> &ProductSpace {
        self.system.space()
    }

    pub fn system(&self) -> &MarginalSystem {
        &self.system
    }

    pub fn marginals(&self) -> &[Marginal] {
        self.system.marginals()
    }

    pub fn kernel(&self) -> &KernelBasis {
        &self.kernel
    }

    pub fn independent_product(&self) -> &JointDistribution {
        &self.p_ind
    }

    pub fn has_full_support(&self) -> bool {
        self.marginals().iter().all(Marginal::has_full_support)
    }

    /// Rank-based dimension checked against the closed formula.
    pub fn dimension(&self) -> Result<DimensionReport> {
        let space = self.space();
        let n = space.total_size();
        let rank_dim = n - linalg::rank(self.system.matrix(), n);
        let formula_dim = dimension_formula(space.sizes());
        if rank_dim != formula_dim || self.kernel.dim() != formula_dim {
            return Err(Error::Internal(format!(
                "kernel dimension {rank_dim} disagrees with formula {formula_dim} on {space}"
            )));
        }
        let reduced_sizes: Vec<usize> = self
            .marginals()
            .iter()
            .map(|m| m.weights().iter().filter(|w| w.is_positive()).count())
            .collect();
        if self.has_full_support() {
            return Ok(DimensionReport {
                dim: rank_dim,
                rank_dim,
                formula_dim,
                reduced_sizes,
                warning: None,
            });
        }
        // pin every state of a zero-weight cylinder and recount
        let mut rows = self.system.matrix().clone();
        for k in self.system.forced_zero_states() {
            let mut e = vec![Rational::zero(); n];
            e[k] = Rational::one();
            rows.push(e);
        }
        let reduced_rank_dim = n - linalg::rank(&rows, n);
        let reduced_formula = dimension_formula(&reduced_sizes);
        if reduced_rank_dim != reduced_formula {
            return Err(Error::Internal(format!(
                "reduced dimension {reduced_rank_dim} disagrees with formula {reduced_formula}"
            )));
        }
        Ok(DimensionReport {
            dim: reduced_formula,
            rank_dim,
            formula_dim,
            warning: Some(format!(
                "marginals have zero-weight states; dimension reported for reduced shape {:?}",
                reduced_sizes
            )),
            reduced_sizes,
        })
    }

    pub fn contains(&self, p: &JointDistribution) -> bool {
        p.space().same_shape(self.space()) && self.system.is_satisfied_by(p.weights())
    }

    fn check_member(&self, p: &JointDistribution) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::NotInCorrelationSet)
        }
    }

    /// `p = p_ind + q` with `q` in the kernel.
    pub fn decompose(&self, p: &JointDistribution) -> Result<(JointDistribution, Vec<Rational>)> {
        self.check_member(p)?;
        let q = p
            .weights()
            .iter()
            .zip(self.p_ind.weights())
            .map(|(a, b)| a - b)
            .collect();
        Ok((self.p_ind.clone(), q))
    }

    /// No other member of `𝒫` vanishes wherever `p` does.
    pub fn is_maximally_zero(&self, p: &JointDistribution) -> Result<bool> {
        self.check_member(p)?;
        Ok(self.support_is_basic(&p.support()))
    }

    /// Whether the columns of `M` indexed by `support` are linearly independent.
    fn support_is_basic(&self, support: &[usize]) -> bool {
        let mut e = EchelonBasis::new();
        support.iter().all(|&k| e.insert(&self.column(k)))
    }

    fn column(&self, k: usize) -> Vec<Rational> {
        self.system.matrix().iter().map(|row| row[k].clone()).collect()
    }

    /// Vertices of `𝒫` sorted lexicographically by weight vector.
    pub fn vertices(&self) -> Result<&[JointDistribution]> {
        match self.vertices.get_or_init(|| self.enumerate()) {
            Ok(v) => Ok(v),
            Err(e) => Err(e.clone()),
        }
    }

    pub fn enumerate_extreme_points(&self) -> Result<Vec<JointDistribution>> {
        self.vertices().map(<[_]>::to_vec)
    }

    fn enumerate(&self) -> Result<Vec<JointDistribution>> {
        let space = self.space();
        let n = space.total_size();
        if n > self.guard {
            return Err(Error::GuardExceeded {
                size: n,
                limit: self.guard,
            });
        }
        let forced: Vec<bool> = {
            let mut f = vec![false; n];
            for k in self.system.forced_zero_states() {
                f[k] = true;
            }
            f
        };
        let candidates: Vec<usize> = (0..n).filter(|&k| !forced[k]).collect();
        // rows with positive rhs that a support must still cover
        let rows: Vec<usize> = (0..self.system.rhs().len())
            .filter(|&r| self.system.rhs()[r].is_positive())
            .collect();
        // last candidate position touching each row, for pruning
        let mut last_pos = vec![None; self.system.rhs().len()];
        for (pos, &k) in candidates.iter().enumerate() {
            for (i, _) in space.sizes().iter().enumerate() {
                let r = self.system.row_of(i, space.coordinate(k, i));
                last_pos[r] = Some(pos);
            }
        }
        let max_len = linalg::rank(self.system.matrix(), n);
        let columns: Vec<Vec<Rational>> = (0..n).map(|k| self.column(k)).collect();

        let mut search = Search {
            cs: self,
            candidates: &candidates,
            columns: &columns,
            rows: &rows,
            last_pos: &last_pos,
            cover: vec![0usize; self.system.rhs().len()],
            support: Vec::new(),
            max_len,
            found: Vec::new(),
        };
        search.visit(0, &EchelonBasis::new());
        let mut found = search.found;
        found.sort();
        found.dedup();
        Ok(found
            .into_iter()
            .map(|w| JointDistribution::new_unchecked(space.clone(), w))
            .collect())
    }
}

struct Search<'a> {
    cs: &'a CorrelationSet,
    candidates: &'a [usize],
    columns: &'a [Vec<Rational>],
    rows: &'a [usize],
    last_pos: &'a [Option<usize>],
    cover: Vec<usize>,
    support: Vec<usize>,
    max_len: usize,
    found: Vec<Vec<Rational>>,
}

impl Search<'_> {
    fn covered(&self, r: usize) -> bool {
        self.cover[r] > 0
    }

    fn try_support(&mut self) {
        if !self.rows.iter().all(|&r| self.covered(r)) {
            return;
        }
        let system = self.cs.system();
        let a: Matrix = system
            .matrix()
            .iter()
            .map(|row| self.support.iter().map(|&k| row[k].clone()).collect())
            .collect();
        if let Solution::Unique(x) = linalg::solve(&a, system.rhs(), self.support.len()) {
            if x.iter().all(Signed::is_positive) {
                let mut w = vec![Rational::zero(); system.space().total_size()];
                for (&k, v) in self.support.iter().zip(x) {
                    w[k] = v;
                }
                self.found.push(w);
            }
        }
    }

    fn touch(&mut self, k: usize, delta: isize) {
        let space = self.cs.space();
        for i in 0..space.arity() {
            let r = self.cs.system.row_of(i, space.coordinate(k, i));
            self.cover[r] = (self.cover[r] as isize + delta) as usize;
        }
    }

    /// Explores supports extending the current one with candidates from position `pos` on.
    fn visit(&mut self, pos: usize, basis: &EchelonBasis) {
        if !self.support.is_empty() {
            self.try_support();
        }
        if self.support.len() == self.max_len {
            return;
        }
        for next in pos..self.candidates.len() {
            // a positive row none of whose remaining candidates is reachable is dead
            if self
                .rows
                .iter()
                .any(|&r| !self.covered(r) && self.last_pos[r].is_none_or(|lp| lp < next))
            {
                return;
            }
            let k = self.candidates[next];
            let mut extended = basis.clone();
            if !extended.insert(&self.columns[k]) {
                continue;
            }
            self.support.push(k);
            self.touch(k, 1);
            self.visit(next + 1, &extended);
            self.touch(k, -1);
            self.support.pop();
        }
    }
}
