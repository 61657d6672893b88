//! Product state spaces, distributions over them, cylinder events and acts.
//!
//! States of `Ω = Ω_1 × … × Ω_n` are stored in row-major order with subspace 0
//! varying slowest. Every weight is an exact [`Rational`].

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, sum, Rational};

/// Shape `(n_1, …, n_n)` of a finite product space, with optional state labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductSpace {
    sizes: Vec<usize>,
    labels: Option<Vec<Vec<String>>>,
    strides: Vec<usize>,
    total: usize,
}

impl ProductSpace {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidSpace("at least one subspace is required".into()));
        }
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidSpace(format!("subspace {i} is empty")));
        }
        let mut strides = vec![1; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        let total = sizes.iter().product();
        Ok(Self {
            sizes,
            labels: None,
            strides,
            total,
        })
    }

    pub fn with_labels(labels: Vec<Vec<String>>) -> Result<Self> {
        let mut space = Self::new(labels.iter().map(Vec::len).collect())?;
        for (i, names) in labels.iter().enumerate() {
            let unique: BTreeSet<&String> = names.iter().collect();
            if unique.len() != names.len() {
                return Err(Error::InvalidSpace(format!(
                    "duplicate state label in subspace {i}"
                )));
            }
        }
        space.labels = Some(labels);
        Ok(space)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of subspaces `n`.
    pub fn arity(&self) -> usize {
        self.sizes.len()
    }

    /// `N = ∏ n_i`.
    pub fn total_size(&self) -> usize {
        self.total
    }

    pub fn labels(&self) -> Option<&[Vec<String>]> {
        self.labels.as_deref()
    }

    /// Label of state `j` of subspace `i`; falls back to the 1-based position.
    pub fn label(&self, i: usize, j: usize) -> String {
        match &self.labels {
            Some(l) => l[i][j].clone(),
            None => (j + 1).to_string(),
        }
    }

    pub fn label_position(&self, i: usize, label: &str) -> Option<usize> {
        match &self.labels {
            Some(l) => l[i].iter().position(|s| s == label),
            None => label
                .parse::<usize>()
                .ok()
                .filter(|&k| k >= 1 && k <= self.sizes[i])
                .map(|k| k - 1),
        }
    }

    /// Human readable name of a flat state, e.g. `Hcs.Ha`.
    pub fn state_name(&self, flat: usize) -> String {
        let w = self.multi_index(flat);
        w.coords()
            .iter()
            .enumerate()
            .map(|(i, &j)| self.label(i, j))
            .collect::<Vec<_>>()
            .join(".")
    }

    pub fn same_shape(&self, other: &ProductSpace) -> bool {
        self.sizes == other.sizes
    }

    pub fn flat_index(&self, w: &MultiIndex) -> Result<usize> {
        self.check_multi_index(w)?;
        Ok(w.0.iter().zip(&self.strides).map(|(c, s)| c * s).sum())
    }

    pub fn check_multi_index(&self, w: &MultiIndex) -> Result<()> {
        if w.0.len() != self.sizes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.sizes.len(),
                actual: w.0.len(),
            });
        }
        for (i, (&c, &n)) in w.0.iter().zip(&self.sizes).enumerate() {
            if c >= n {
                return Err(Error::InvalidSpace(format!(
                    "coordinate {c} out of range for subspace {i} of size {n}"
                )));
            }
        }
        Ok(())
    }

    pub fn multi_index(&self, flat: usize) -> MultiIndex {
        debug_assert!(flat < self.total);
        MultiIndex(
            self.strides
                .iter()
                .zip(&self.sizes)
                .map(|(s, n)| (flat / s) % n)
                .collect(),
        )
    }

    pub fn coordinate(&self, flat: usize, i: usize) -> usize {
        (flat / self.strides[i]) % self.sizes[i]
    }

    pub fn states(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.total).map(|k| self.multi_index(k))
    }

    /// The sub-product `Ω_I` (coordinates in ascending index order).
    pub fn subspace(&self, set: &IndexSet) -> Result<ProductSpace> {
        set.check_within(self.arity())?;
        if set.is_empty() {
            return Err(Error::InvalidIndexSet("empty index set".into()));
        }
        let sizes = set.iter().map(|i| self.sizes[i]).collect();
        let mut sub = ProductSpace::new(sizes)?;
        if let Some(l) = &self.labels {
            sub.labels = Some(set.iter().map(|i| l[i].clone()).collect());
        }
        Ok(sub)
    }

    /// Flat index in `Ω_I` of the projection `ω_I` of the flat state `flat`.
    pub fn project_flat(&self, flat: usize, set: &IndexSet, sub: &ProductSpace) -> usize {
        set.iter()
            .zip(&sub.strides)
            .map(|(i, s)| self.coordinate(flat, i) * s)
            .sum()
    }
}

impl fmt::Display for ProductSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// A state `ω = (ω_1, …, ω_n)` given by zero-based coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

/// Number of coordinates in which two states differ.
pub fn hamming_distance(a: &MultiIndex, b: &MultiIndex) -> usize {
    debug_assert_eq!(a.0.len(), b.0.len());
    a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count()
}

/// A probability vector on one subspace `Ω_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marginal {
    subspace: usize,
    weights: Vec<Rational>,
}

impl Marginal {
    pub fn new(subspace: usize, weights: Vec<Rational>) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidMarginal {
            index: subspace,
            reason: reason.to_string(),
        };
        if weights.is_empty() {
            return Err(bad("no weights"));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(bad("negative weight"));
        }
        if sum(&weights) != Rational::one() {
            return Err(bad("weights do not sum to 1"));
        }
        Ok(Self { subspace, weights })
    }

    pub fn uniform(subspace: usize, size: usize) -> Self {
        let w = Rational::new(1.into(), (size as i64).into());
        Self {
            subspace,
            weights: vec![w; size],
        }
    }

    pub fn subspace(&self) -> usize {
        self.subspace
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn has_full_support(&self) -> bool {
        self.weights.iter().all(|w| w.is_positive())
    }
}

/// A probability vector over all of `Ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDistribution {
    space: ProductSpace,
    weights: Vec<Rational>,
}

impl JointDistribution {
    pub fn new(space: ProductSpace, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != space.total_size() {
            return Err(Error::DimensionMismatch {
                expected: space.total_size(),
                actual: weights.len(),
            });
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidDistribution("negative weight".into()));
        }
        if sum(&weights) != Rational::one() {
            return Err(Error::InvalidDistribution("weights do not sum to 1".into()));
        }
        Ok(Self { space, weights })
    }

    pub(crate) fn new_unchecked(space: ProductSpace, weights: Vec<Rational>) -> Self {
        debug_assert_eq!(weights.len(), space.total_size());
        Self { space, weights }
    }

    pub fn point_mass(space: ProductSpace, flat: usize) -> Self {
        let mut weights = vec![Rational::zero(); space.total_size()];
        weights[flat] = Rational::one();
        Self { space, weights }
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<Rational> {
        self.weights
    }

    pub fn weight(&self, w: &MultiIndex) -> Result<&Rational> {
        Ok(&self.weights[self.space.flat_index(w)?])
    }

    pub fn prob(&self, event: &Event) -> Rational {
        event.members.iter().map(|&k| &self.weights[k]).fold(Rational::zero(), |a, w| a + w)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&k| !self.weights[k].is_zero())
            .collect()
    }

    /// Marginal on the single subspace `i`.
    pub fn marginal(&self, i: usize) -> Marginal {
        let n = self.space.sizes()[i];
        let mut w = vec![Rational::zero(); n];
        for (k, p) in self.weights.iter().enumerate() {
            w[self.space.coordinate(k, i)] += p;
        }
        Marginal {
            subspace: i,
            weights: w,
        }
    }

    pub fn marginals(&self) -> Vec<Marginal> {
        (0..self.space.arity()).map(|i| self.marginal(i)).collect()
    }

    /// Convex combination `(1 - t) * self + t * other`.
    pub fn mix(&self, other: &JointDistribution, t: &Rational) -> JointDistribution {
        let s = Rational::one() - t;
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| a * &s + b * t)
            .collect();
        JointDistribution::new_unchecked(self.space.clone(), weights)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.weights.iter().map(crate::rational::to_f64).collect()
    }
}

impl fmt::Display for JointDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.weights.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A set of states of `Ω`, stored by flat index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    space: ProductSpace,
    members: BTreeSet<usize>,
}

impl Event {
    pub fn new(space: ProductSpace, states: impl IntoIterator<Item = MultiIndex>) -> Result<Self> {
        let mut members = BTreeSet::new();
        for w in states {
            members.insert(space.flat_index(&w)?);
        }
        Ok(Self { space, members })
    }

    pub fn from_flat(space: ProductSpace, flat: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members: BTreeSet<usize> = flat.into_iter().collect();
        if let Some(&k) = members.iter().next_back() {
            if k >= space.total_size() {
                return Err(Error::InvalidSpace(format!("state {k} out of range")));
            }
        }
        Ok(Self { space, members })
    }

    pub(crate) fn from_flat_unchecked(space: ProductSpace, members: BTreeSet<usize>) -> Self {
        Self { space, members }
    }

    /// Event whose members are the set bits of `mask` (requires `N <= 64`).
    pub fn from_mask(space: ProductSpace, mask: u64) -> Self {
        let members = (0..space.total_size().min(64))
            .filter(|k| mask >> k & 1 == 1)
            .collect();
        Self { space, members }
    }

    pub fn empty(space: ProductSpace) -> Self {
        Self {
            space,
            members: BTreeSet::new(),
        }
    }

    pub fn full(space: ProductSpace) -> Self {
        let members = (0..space.total_size()).collect();
        Self { space, members }
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn states(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        self.members.iter().map(|&k| self.space.multi_index(k))
    }

    pub fn contains(&self, flat: usize) -> bool {
        self.members.contains(&flat)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn union(&self, other: &Event) -> Event {
        Event::from_flat_unchecked(
            self.space.clone(),
            self.members.union(&other.members).copied().collect(),
        )
    }

    pub fn intersection(&self, other: &Event) -> Event {
        Event::from_flat_unchecked(
            self.space.clone(),
            self.members.intersection(&other.members).copied().collect(),
        )
    }

    pub fn difference(&self, other: &Event) -> Event {
        Event::from_flat_unchecked(
            self.space.clone(),
            self.members.difference(&other.members).copied().collect(),
        )
    }

    pub fn complement(&self) -> Event {
        Event::from_flat_unchecked(
            self.space.clone(),
            (0..self.space.total_size())
                .filter(|k| !self.members.contains(k))
                .collect(),
        )
    }

    /// Bitmask over flat indices, available when `N <= 64`.
    pub fn mask(&self) -> Option<u64> {
        if self.space.total_size() > 64 {
            return None;
        }
        Some(self.members.iter().fold(0u64, |m, &k| m | 1 << k))
    }
}

/// A subset `I ⊆ {0, …, n-1}` of subspace indices, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(BTreeSet<usize>);

impl IndexSet {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        IndexSet(indices.into_iter().collect())
    }

    pub fn all(n: usize) -> Self {
        IndexSet((0..n).collect())
    }

    pub fn singleton(i: usize) -> Self {
        IndexSet(BTreeSet::from([i]))
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0.union(&other.0).copied().collect())
    }

    pub fn complement(&self, n: usize) -> IndexSet {
        IndexSet((0..n).filter(|i| !self.0.contains(i)).collect())
    }

    pub fn check_within(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i >= n) {
            Some(i) => Err(Error::InvalidIndexSet(format!(
                "index {i} out of range for {n} subspaces"
            ))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for IndexSet {
    /// 1-based, matching the collection syntax of the command line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A family of at least two non-empty, pairwise disjoint index sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Collection {
    members: Vec<IndexSet>,
}

impl Collection {
    pub fn new(members: Vec<IndexSet>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::InvalidCollection("needs at least two members".into()));
        }
        if members.iter().any(IndexSet::is_empty) {
            return Err(Error::InvalidCollection("members must be non-empty".into()));
        }
        for (a, i) in members.iter().enumerate() {
            for j in &members[a + 1..] {
                if !i.is_disjoint(j) {
                    return Err(Error::InvalidCollection(format!(
                        "members {i} and {j} overlap"
                    )));
                }
            }
        }
        Ok(Self { members })
    }

    /// Parses `"{1},{2,3}"` with 1-based subspace numbers.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidCollection(format!("{m} in `{text}`"));
        let mut members = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            rest = rest.trim_start_matches([',', ' ']);
            if rest.is_empty() {
                break;
            }
            let body = rest.strip_prefix('{').ok_or_else(|| bad("expected `{`"))?;
            let close = body.find('}').ok_or_else(|| bad("missing `}`"))?;
            let mut set = BTreeSet::new();
            for tok in body[..close].split(',') {
                let tok = tok.trim();
                let k: usize = tok.parse().map_err(|_| bad("bad subspace number"))?;
                if k == 0 {
                    return Err(bad("subspace numbers are 1-based"));
                }
                set.insert(k - 1);
            }
            members.push(IndexSet(set));
            rest = &body[close + 1..];
        }
        Collection::new(members)
    }

    pub fn members(&self) -> &[IndexSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn union(&self) -> IndexSet {
        self.members
            .iter()
            .fold(IndexSet::new([]), |acc, m| acc.union(m))
    }

    pub fn is_partition_of(&self, n: usize) -> bool {
        self.union() == IndexSet::all(n)
    }

    pub fn check_within(&self, n: usize) -> Result<()> {
        self.members.iter().try_for_each(|m| m.check_within(n))
    }
}

impl fmt::Display for Collection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Utility values per state of `Ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Act {
    space: ProductSpace,
    values: Vec<Rational>,
}

impl Act {
    pub fn new(space: ProductSpace, values: Vec<Rational>) -> Result<Self> {
        if values.len() != space.total_size() {
            return Err(Error::DimensionMismatch {
                expected: space.total_size(),
                actual: values.len(),
            });
        }
        Ok(Self { space, values })
    }

    pub fn constant(space: ProductSpace, value: Rational) -> Self {
        let values = vec![value; space.total_size()];
        Self { space, values }
    }

    /// `x` on `event`, `y` elsewhere.
    pub fn bet(event: &Event, x: Rational, y: Rational) -> Self {
        let space = event.space().clone();
        let values = (0..space.total_size())
            .map(|k| if event.contains(k) { x.clone() } else { y.clone() })
            .collect();
        Self { space, values }
    }

    /// The act `f_E x`: this act on `event`, constant `x` elsewhere.
    pub fn splice(&self, event: &Event, x: &Rational) -> Act {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| if event.contains(k) { v.clone() } else { x.clone() })
            .collect();
        Act {
            space: self.space.clone(),
            values,
        }
    }

    /// Lifts an act on `Ω_I` to `Ω` (constant on every cylinder `[ω_I]`).
    pub fn embed(sub_act: &Act, set: &IndexSet, space: &ProductSpace) -> Result<Act> {
        let sub = space.subspace(set)?;
        if !sub.same_shape(sub_act.space()) {
            return Err(Error::InvalidSpace("act does not live on the sub-product".into()));
        }
        let values = (0..space.total_size())
            .map(|k| sub_act.values[space.project_flat(k, set, &sub)].clone())
            .collect();
        Ok(Act {
            space: space.clone(),
            values,
        })
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, flat: usize) -> &Rational {
        &self.values[flat]
    }

    /// Expected value under `p`.
    pub fn expectation(&self, p: &JointDistribution) -> Rational {
        self.values
            .iter()
            .zip(p.weights())
            .fold(Rational::zero(), |acc, (v, w)| acc + v * w)
    }
}

/// The independent product `p_1 ⊗ … ⊗ p_n`.
pub fn independent_product(space: &ProductSpace, marginals: &[Marginal]) -> Result<JointDistribution> {
    let ordered = order_marginals(space, marginals)?;
    let weights = (0..space.total_size())
        .map(|k| {
            ordered
                .iter()
                .enumerate()
                .fold(Rational::one(), |acc, (i, m)| acc * &m.weights[space.coordinate(k, i)])
        })
        .collect();
    Ok(JointDistribution::new_unchecked(space.clone(), weights))
}

/// Sorts marginals by subspace index, checking each subspace appears once with the right size.
pub fn order_marginals<'a>(space: &ProductSpace, marginals: &'a [Marginal]) -> Result<Vec<&'a Marginal>> {
    let n = space.arity();
    let mut slots: Vec<Option<&Marginal>> = vec![None; n];
    for m in marginals {
        if m.subspace >= n {
            return Err(Error::MarginalCoverage(format!(
                "subspace index {} out of range",
                m.subspace
            )));
        }
        if slots[m.subspace].is_some() {
            return Err(Error::MarginalCoverage(format!(
                "duplicate marginal for subspace {}",
                m.subspace
            )));
        }
        if m.len() != space.sizes()[m.subspace] {
            return Err(Error::DimensionMismatch {
                expected: space.sizes()[m.subspace],
                actual: m.len(),
            });
        }
        slots[m.subspace] = Some(m);
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| Error::MarginalCoverage(format!("missing marginal for subspace {i}"))))
        .collect()
}

/// Marginal of `p` on the sub-product `Ω_I`.
pub fn marginalize(p: &JointDistribution, set: &IndexSet) -> Result<JointDistribution> {
    if set.is_empty() {
        return Err(Error::InvalidIndexSet("cannot marginalize onto an empty index set".into()));
    }
    let space = p.space();
    let sub = space.subspace(set)?;
    let mut weights = vec![Rational::zero(); sub.total_size()];
    for (k, w) in p.weights().iter().enumerate() {
        weights[space.project_flat(k, set, &sub)] += w;
    }
    Ok(JointDistribution::new_unchecked(sub, weights))
}

/// The cylinder `[E_I] = { ω ∈ Ω : ω_I ∈ E_I }` of an event on `Ω_I`.
pub fn embed_cylinder(sub_event: &Event, set: &IndexSet, space: &ProductSpace) -> Result<Event> {
    let sub = space.subspace(set)?;
    if !sub.same_shape(sub_event.space()) {
        return Err(Error::InvalidSpace(format!(
            "event lives on {} but Ω_I is {}",
            sub_event.space(),
            sub
        )));
    }
    let members = (0..space.total_size())
        .filter(|&k| sub_event.contains(space.project_flat(k, set, &sub)))
        .collect();
    Ok(Event::from_flat_unchecked(space.clone(), members))
}

/// Whether `f(ω) = f(ω')` whenever `ω_I = ω'_I`, i.e. `f ∈ 𝓕_I`.
pub fn is_independent_of(f: &Act, set: &IndexSet) -> bool {
    let space = f.space();
    if set.is_empty() {
        return f.values.iter().all(|v| v == &f.values[0]);
    }
    let Ok(sub) = space.subspace(set) else {
        return false;
    };
    let mut seen: Vec<Option<&Rational>> = vec![None; sub.total_size()];
    for (k, v) in f.values.iter().enumerate() {
        let slot = &mut seen[space.project_flat(k, set, &sub)];
        match slot {
            Some(prev) if *prev != v => return false,
            Some(_) => {}
            None => *slot = Some(v),
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn space(sizes: &[usize]) -> ProductSpace {
        ProductSpace::new(sizes.to_vec()).unwrap()
    }

    #[test]
    fn row_major_indexing() {
        let s = space(&[2, 3]);
        assert_eq!(s.total_size(), 6);
        assert_eq!(s.multi_index(4), MultiIndex(vec![1, 1]));
        assert_eq!(s.flat_index(&MultiIndex(vec![1, 2])).unwrap(), 5);
        assert!(s.flat_index(&MultiIndex(vec![2, 0])).is_err());
        assert!(ProductSpace::new(vec![2, 0]).is_err());
        assert!(ProductSpace::new(vec![]).is_err());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let err = ProductSpace::with_labels(vec![vec!["a".into(), "a".into()]]);
        assert!(err.is_err());
    }

    #[test]
    fn independent_product_examples() {
        let s = space(&[2, 2]);
        let m = [Marginal::uniform(0, 2), Marginal::uniform(1, 2)];
        let p = independent_product(&s, &m).unwrap();
        assert!(p.weights().iter().all(|w| *w == ratio(1, 4)));

        let s3 = space(&[2, 2, 2]);
        let m3 = [
            Marginal::new(0, vec![ratio(1, 3), ratio(2, 3)]).unwrap(),
            Marginal::new(1, vec![ratio(1, 2), ratio(1, 2)]).unwrap(),
            Marginal::new(2, vec![ratio(1, 4), ratio(3, 4)]).unwrap(),
        ];
        let p3 = independent_product(&s3, &m3).unwrap();
        assert_eq!(p3.weights()[0], ratio(1, 24));

        let s1 = space(&[3]);
        let m1 = Marginal::new(0, vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)]).unwrap();
        let p1 = independent_product(&s1, std::slice::from_ref(&m1)).unwrap();
        assert_eq!(p1.weights(), m1.weights());
    }

    #[test]
    fn independent_product_rejects_bad_coverage() {
        let s = space(&[2, 2]);
        let dup = [Marginal::uniform(0, 2), Marginal::uniform(0, 2)];
        assert!(matches!(independent_product(&s, &dup), Err(Error::MarginalCoverage(_))));
        let missing = [Marginal::uniform(1, 2)];
        assert!(matches!(independent_product(&s, &missing), Err(Error::MarginalCoverage(_))));
    }

    #[test]
    fn marginal_validation() {
        assert!(Marginal::new(0, vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(Marginal::new(0, vec![ratio(3, 2), ratio(-1, 2)]).is_err());
        let m = Marginal::new(0, vec![int(1), int(0)]).unwrap();
        assert!(!m.has_full_support());
    }

    #[test]
    fn marginalize_examples() {
        let s = space(&[2, 2]);
        let diag = JointDistribution::new(s.clone(), vec![ratio(1, 2), int(0), int(0), ratio(1, 2)]).unwrap();
        let m = marginalize(&diag, &IndexSet::singleton(0)).unwrap();
        assert_eq!(m.weights(), &[ratio(1, 2), ratio(1, 2)]);
        assert!(marginalize(&diag, &IndexSet::new([])).is_err());
        assert_eq!(marginalize(&diag, &IndexSet::all(2)).unwrap(), diag);
    }

    #[test]
    fn embed_cylinder_examples() {
        let s = space(&[2, 2]);
        let sub = s.subspace(&IndexSet::singleton(0)).unwrap();
        let e1 = Event::from_flat(sub.clone(), [0]).unwrap();
        let cyl = embed_cylinder(&e1, &IndexSet::singleton(0), &s).unwrap();
        let expected: Vec<MultiIndex> = vec![MultiIndex(vec![0, 0]), MultiIndex(vec![0, 1])];
        assert_eq!(cyl.states().collect::<Vec<_>>(), expected);

        let full = Event::full(s.subspace(&IndexSet::all(2)).unwrap());
        assert_eq!(embed_cylinder(&full, &IndexSet::all(2), &s).unwrap().len(), 4);

        let s3 = space(&[2, 2, 2]);
        let set = IndexSet::new([1, 2]);
        let e = Event::from_flat(s3.subspace(&set).unwrap(), [0]).unwrap();
        let cyl3 = embed_cylinder(&e, &set, &s3).unwrap();
        let states: Vec<MultiIndex> = cyl3.states().collect();
        assert_eq!(states, vec![MultiIndex(vec![0, 0, 0]), MultiIndex(vec![1, 0, 0])]);

        // wrong sub-space shape
        assert!(embed_cylinder(&e, &IndexSet::singleton(0), &s3).is_err());
    }

    #[test]
    fn independence_of_acts() {
        let s = space(&[2, 2]);
        let c = Act::constant(s.clone(), int(3));
        assert!(is_independent_of(&c, &IndexSet::singleton(0)));
        assert!(is_independent_of(&c, &IndexSet::singleton(1)));
        // values y1, y1, y2, y2 in row-major order
        let f = Act::new(s, vec![int(1), int(1), int(2), int(2)]).unwrap();
        assert!(is_independent_of(&f, &IndexSet::singleton(0)));
        assert!(!is_independent_of(&f, &IndexSet::singleton(1)));
    }

    #[test]
    fn hamming() {
        let a = MultiIndex(vec![0, 0, 0]);
        assert_eq!(hamming_distance(&a, &a), 0);
        assert_eq!(hamming_distance(&a, &MultiIndex(vec![1, 1, 1])), 3);
        assert_eq!(hamming_distance(&a, &MultiIndex(vec![1, 1, 0])), 2);
    }

    #[test]
    fn collection_parsing() {
        let c = Collection::parse("{1},{2,3}").unwrap();
        assert_eq!(c.members(), &[IndexSet::singleton(0), IndexSet::new([1, 2])]);
        assert_eq!(c.to_string(), "{1},{2,3}");
        assert!(Collection::parse("{1}").is_err());
        assert!(Collection::parse("{1,2},{2}").is_err());
        assert!(Collection::parse("{0},{1}").is_err());
    }
}
