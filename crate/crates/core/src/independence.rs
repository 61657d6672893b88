//! Independence of a joint distribution on a collection of subspaces.

use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::info::random_member;
use crate::linalg::{self, Matrix};
use crate::polytope::CorrelationSet;
use crate::rational::Rational;
use crate::space::{
    embed_cylinder, marginalize, Collection, Event, IndexSet, JointDistribution, Marginal,
    MultiIndex, ProductSpace,
};

/// Largest number of vertex combinations materialized by [`partition_factorize`].
pub const PRODUCT_VERTEX_LIMIT: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceVerdict {
    pub collection: Collection,
    pub holds: bool,
    /// First failing tuple `(ω_I)_{I ∈ 𝓘}` in lexicographic order, coordinates local to each `Ω_I`.
    pub witness: Option<Vec<MultiIndex>>,
    pub max_abs_defect: Rational,
}

/// Iterates over all tuples of flat indices `(k_1, …, k_m)` with `k_j < sizes[j]`, lexicographically.
fn for_each_tuple(sizes: &[usize], mut f: impl FnMut(&[usize])) {
    if sizes.contains(&0) {
        return;
    }
    let mut t = vec![0usize; sizes.len()];
    loop {
        f(&t);
        let mut j = sizes.len();
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            t[j] += 1;
            if t[j] < sizes[j] {
                break;
            }
            t[j] = 0;
        }
    }
}

/// Element-wise test of `p([(ω_I)]) = ∏_I p↾_{Ω_I}(ω_I)`.
pub fn is_independent_on(p: &JointDistribution, collection: &Collection) -> Result<IndependenceVerdict> {
    let space = p.space();
    collection.check_within(space.arity())?;
    let members = collection.members();
    let subs: Vec<ProductSpace> = members.iter().map(|m| space.subspace(m)).collect::<Result<_>>()?;
    let margs: Vec<JointDistribution> = members.iter().map(|m| marginalize(p, m)).collect::<Result<_>>()?;
    let union = collection.union();
    let joint = marginalize(p, &union)?;
    let union_space = joint.space().clone();
    let union_pos: Vec<usize> = union.iter().collect();

    let sizes: Vec<usize> = subs.iter().map(ProductSpace::total_size).collect();
    let mut witness = None;
    let mut defect = Rational::zero();
    for_each_tuple(&sizes, |t| {
        let mut coords = vec![0usize; union_pos.len()];
        let mut product = Rational::one();
        for (j, (m, sub)) in members.iter().zip(&subs).enumerate() {
            let local = sub.multi_index(t[j]);
            for (i, c) in m.iter().zip(local.coords()) {
                let pos = union_pos.binary_search(&i).expect("member within union");
                coords[pos] = *c;
            }
            product *= &margs[j].weights()[t[j]];
        }
        let flat = union_space.flat_index(&MultiIndex(coords)).expect("coordinates in range");
        let diff = (&joint.weights()[flat] - product).abs();
        if !diff.is_zero() && witness.is_none() {
            witness = Some(
                subs.iter()
                    .zip(t)
                    .map(|(sub, &k)| sub.multi_index(k))
                    .collect(),
            );
        }
        if diff > defect {
            defect = diff;
        }
    });
    Ok(IndependenceVerdict {
        collection: collection.clone(),
        holds: witness.is_none(),
        witness,
        max_abs_defect: defect,
    })
}

/// Tests `p([⨉ E_I]) = ∏ p↾_{Ω_I}(E_I)` for one event per member (each on `Ω_I`).
pub fn check_event_level_independence(
    p: &JointDistribution,
    collection: &Collection,
    events: &[Event],
) -> Result<bool> {
    let space = p.space();
    collection.check_within(space.arity())?;
    if events.len() != collection.len() {
        return Err(Error::DimensionMismatch {
            expected: collection.len(),
            actual: events.len(),
        });
    }
    let mut joint = Event::full(space.clone());
    let mut product = Rational::one();
    for (m, e) in collection.members().iter().zip(events) {
        if e.is_empty() {
            return Err(Error::Precondition(format!("event for {m} is empty")));
        }
        let cyl = embed_cylinder(e, m, space)?;
        product *= p.prob(&cyl);
        joint = joint.intersection(&cyl);
    }
    Ok(p.prob(&joint) == product)
}

/// Sub-collections `𝓘′`: at least two members of `𝓘`, each replaced by a non-empty subset.
/// `𝓘` itself comes first.
pub fn inherited_collections(collection: &Collection) -> Vec<Collection> {
    let members = collection.members();
    let m = members.len();
    let subsets: Vec<Vec<IndexSet>> = members.iter().map(non_empty_subsets).collect();
    let mut out = vec![collection.clone()];
    for pick in 1u64..(1 << m) {
        if pick.count_ones() < 2 {
            continue;
        }
        let chosen: Vec<usize> = (0..m).filter(|j| pick >> j & 1 == 1).collect();
        let sizes: Vec<usize> = chosen.iter().map(|&j| subsets[j].len()).collect();
        for_each_tuple(&sizes, |t| {
            let parts: Vec<IndexSet> = chosen
                .iter()
                .zip(t)
                .map(|(&j, &k)| subsets[j][k].clone())
                .collect();
            let c = Collection::new(parts).expect("subsets of disjoint members stay disjoint");
            if &c != collection {
                out.push(c);
            }
        });
    }
    out
}

/// Non-empty subsets, largest (the set itself) first.
fn non_empty_subsets(set: &IndexSet) -> Vec<IndexSet> {
    let items: Vec<usize> = set.iter().collect();
    let mut out: Vec<IndexSet> = (1u64..(1 << items.len()))
        .map(|mask| IndexSet::new((0..items.len()).filter(|b| mask >> b & 1 == 1).map(|b| items[b])))
        .collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    out
}

/// Marginals of `cs` restricted to the subspaces in `set`, re-indexed from zero.
fn component_set(cs: &CorrelationSet, set: &IndexSet) -> Result<CorrelationSet> {
    let sub = cs.space().subspace(set)?;
    let marginals: Vec<Marginal> = set
        .iter()
        .enumerate()
        .map(|(local, i)| Marginal::new(local, cs.marginals()[i].weights().to_vec()))
        .collect::<Result<_>>()?;
    CorrelationSet::new(&sub, &marginals)
}

/// `⊗_I p_I` for a partition `𝓘` and one distribution per member.
pub fn product_of_components(
    space: &ProductSpace,
    partition: &Collection,
    components: &[JointDistribution],
) -> Result<JointDistribution> {
    if !partition.is_partition_of(space.arity()) {
        return Err(Error::InvalidCollection(format!("{partition} is not a partition")));
    }
    if components.len() != partition.len() {
        return Err(Error::DimensionMismatch {
            expected: partition.len(),
            actual: components.len(),
        });
    }
    let subs: Vec<ProductSpace> = partition.members().iter().map(|m| space.subspace(m)).collect::<Result<_>>()?;
    for (sub, c) in subs.iter().zip(components) {
        if !sub.same_shape(c.space()) {
            return Err(Error::InvalidSpace(format!("component on {} but Ω_I is {sub}", c.space())));
        }
    }
    let weights = (0..space.total_size())
        .map(|k| {
            partition
                .members()
                .iter()
                .zip(&subs)
                .zip(components)
                .fold(Rational::one(), |acc, ((m, sub), c)| {
                    acc * &c.weights()[space.project_flat(k, m, sub)]
                })
        })
        .collect();
    JointDistribution::new(space.clone(), weights)
}

#[derive(Clone, Debug)]
pub struct Factorization {
    pub components: Vec<CorrelationSet>,
    pub component_dims: Vec<usize>,
    /// Dimension of the product set at the independent product, by tangent rank.
    pub dim: usize,
    /// Products of component vertices (empty if their number exceeds [`PRODUCT_VERTEX_LIMIT`]).
    pub product_vertices: Vec<JointDistribution>,
}

/// Splits `𝒫_𝓘` for a partition into the component sets `𝒫(Ω_I)` and verifies the pieces.
pub fn partition_factorize(cs: &CorrelationSet, partition: &Collection) -> Result<Factorization> {
    let space = cs.space();
    partition.check_within(space.arity())?;
    if !partition.is_partition_of(space.arity()) {
        return Err(Error::InvalidCollection(format!("{partition} does not cover every subspace")));
    }
    let components: Vec<CorrelationSet> = partition
        .members()
        .iter()
        .map(|m| component_set(cs, m))
        .collect::<Result<_>>()?;
    let component_dims: Vec<usize> = components
        .iter()
        .map(|c| c.dimension().map(|d| d.dim))
        .collect::<Result<_>>()?;

    // tangent directions q_I ⊗ (⊗_{J ≠ I} p_ind_J) at the independent product
    let inds: Vec<JointDistribution> = components.iter().map(|c| c.independent_product().clone()).collect();
    let mut tangent: Matrix = Vec::new();
    for (j, c) in components.iter().enumerate() {
        for q in c.kernel().vectors() {
            let mut factors = inds.clone();
            factors[j] = JointDistribution::new_unchecked(c.space().clone(), q.clone());
            tangent.push(product_weights(space, partition, &factors));
        }
    }
    let dim = linalg::rank(&tangent, space.total_size());
    let expected: usize = components.iter().map(|c| c.kernel().dim()).sum();
    if dim != expected {
        return Err(Error::Internal(format!(
            "product set has tangent rank {dim}, components sum to {expected}"
        )));
    }
    if product_weights(space, partition, &inds) != cs.independent_product().weights() {
        return Err(Error::Internal("product of component products is not p_ind".into()));
    }

    let mut product_vertices = Vec::new();
    let vertex_lists: Vec<&[JointDistribution]> = components.iter().map(|c| c.vertices()).collect::<Result<_>>()?;
    let count = vertex_lists.iter().try_fold(1usize, |acc, v| acc.checked_mul(v.len()));
    if count.is_some_and(|c| c <= PRODUCT_VERTEX_LIMIT) {
        let sizes: Vec<usize> = vertex_lists.iter().map(|v| v.len()).collect();
        let mut failure = None;
        for_each_tuple(&sizes, |t| {
            if failure.is_some() {
                return;
            }
            let parts: Vec<JointDistribution> = vertex_lists.iter().zip(t).map(|(v, &k)| v[k].clone()).collect();
            let check = || -> Result<JointDistribution> {
                for (c, v) in components.iter().zip(&parts) {
                    if !c.is_maximally_zero(v)? {
                        return Err(Error::Internal("component vertex is not maximally zero".into()));
                    }
                }
                let p = product_of_components(space, partition, &parts)?;
                if !cs.contains(&p) || !is_independent_on(&p, partition)?.holds {
                    return Err(Error::Internal("product of component vertices left 𝒫_𝓘".into()));
                }
                Ok(p)
            };
            match check() {
                Ok(p) => product_vertices.push(p),
                Err(e) => failure = Some(e),
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
    }
    Ok(Factorization {
        components,
        component_dims,
        dim,
        product_vertices,
    })
}

fn product_weights(space: &ProductSpace, partition: &Collection, factors: &[JointDistribution]) -> Vec<Rational> {
    let subs: Vec<ProductSpace> = factors.iter().map(|f| f.space().clone()).collect();
    (0..space.total_size())
        .map(|k| {
            partition
                .members()
                .iter()
                .zip(&subs)
                .zip(factors)
                .fold(Rational::one(), |acc, ((m, sub), f)| {
                    acc * &f.weights()[space.project_flat(k, m, sub)]
                })
        })
        .collect()
}

/// Random member of `𝒫_𝓘` for a partition: a random member of each component, multiplied out.
pub fn random_partition_member(
    cs: &CorrelationSet,
    partition: &Collection,
    rng: &mut impl Rng,
) -> Result<JointDistribution> {
    let mut parts = Vec::new();
    for m in partition.members() {
        let c = component_set(cs, m)?;
        parts.push(random_member(c.space(), c.vertices()?, rng));
    }
    product_of_components(cs.space(), partition, &parts)
}

/// Coefficient rows of the linear constraints defining `𝒫_𝓘`; requires at most one
/// member with two or more subspaces.
pub fn linear_constraint_rows(cs: &CorrelationSet, collection: &Collection) -> Result<Matrix> {
    let space = cs.space();
    collection.check_within(space.arity())?;
    let big: Vec<&IndexSet> = collection.members().iter().filter(|m| m.len() >= 2).collect();
    if big.len() > 1 {
        return Err(Error::Unsupported(format!(
            "{collection} has several members with two or more subspaces; its independence constraints are not linear"
        )));
    }
    let members = collection.members();
    let subs: Vec<ProductSpace> = members.iter().map(|m| space.subspace(m)).collect::<Result<_>>()?;
    let sizes: Vec<usize> = subs.iter().map(ProductSpace::total_size).collect();
    let big_pos = members.iter().position(|m| m.len() >= 2);
    let n = space.total_size();
    let mut rows = Vec::new();
    for_each_tuple(&sizes, |t| {
        // product of the fixed singleton marginals
        let c = members
            .iter()
            .enumerate()
            .filter(|&(j, _)| Some(j) != big_pos)
            .fold(Rational::one(), |acc, (j, m)| {
                let i = m.iter().next().expect("non-empty member");
                acc * &cs.marginals()[i].weights()[t[j]]
            });
        let row = (0..n)
            .map(|k| {
                let in_tuple = members
                    .iter()
                    .zip(&subs)
                    .zip(t)
                    .all(|((m, sub), &tk)| space.project_flat(k, m, sub) == tk);
                let mut v = if in_tuple { Rational::one() } else { Rational::zero() };
                if let Some(b) = big_pos {
                    if space.project_flat(k, &members[b], &subs[b]) == t[b] {
                        v -= &c;
                    }
                }
                v
            })
            .collect();
        rows.push(row);
    });
    Ok(rows)
}

/// Dimension of the affine hull of `𝒫_{𝓘_1} ∩ … ∩ 𝒫_{𝓘_m}` in the linear regime.
pub fn restricted_dimension(cs: &CorrelationSet, collections: &[Collection]) -> Result<usize> {
    if !cs.has_full_support() {
        return Err(Error::Precondition("restricted dimension needs fully supported marginals".into()));
    }
    let n = cs.space().total_size();
    let mut rows = cs.system().matrix().clone();
    for c in collections {
        rows.extend(linear_constraint_rows(cs, c)?);
    }
    Ok(n - linalg::rank(&rows, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn cube() -> CorrelationSet {
        let s = ProductSpace::new(vec![2, 2, 2]).unwrap();
        let m = [
            Marginal::new(0, vec![ratio(1, 3), ratio(2, 3)]).unwrap(),
            Marginal::new(1, vec![ratio(1, 2), ratio(1, 2)]).unwrap(),
            Marginal::new(2, vec![ratio(1, 4), ratio(3, 4)]).unwrap(),
        ];
        CorrelationSet::new(&s, &m).unwrap()
    }

    fn c(text: &str) -> Collection {
        Collection::parse(text).unwrap()
    }

    #[test]
    fn product_is_independent() {
        let cs = cube();
        for text in ["{1},{2}", "{1},{2,3}", "{1},{2},{3}", "{3},{1}"] {
            let v = is_independent_on(cs.independent_product(), &c(text)).unwrap();
            assert!(v.holds, "{text}");
            assert!(v.max_abs_defect.is_zero());
        }
    }

    #[test]
    fn diagonal_is_dependent() {
        let s = ProductSpace::new(vec![2, 2]).unwrap();
        let p = JointDistribution::new(s, vec![ratio(1, 2), int(0), int(0), ratio(1, 2)]).unwrap();
        let v = is_independent_on(&p, &c("{1},{2}")).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness, Some(vec![MultiIndex(vec![0]), MultiIndex(vec![0])]));
        assert_eq!(v.max_abs_defect, ratio(1, 4));
    }

    #[test]
    fn cube_dimensions() {
        let cs = cube();
        assert_eq!(restricted_dimension(&cs, &[c("{1},{2}")]).unwrap(), 3);
        assert_eq!(restricted_dimension(&cs, &[c("{1},{2,3}")]).unwrap(), 1);
        assert_eq!(restricted_dimension(&cs, &[c("{1},{2}"), c("{1},{3}")]).unwrap(), 2);
        assert!(restricted_dimension(&cube(), &[c("{1,2},{3}")]).is_ok());
    }

    #[test]
    fn nonlinear_collections_are_refused() {
        let s = ProductSpace::new(vec![2, 2, 2, 2]).unwrap();
        let m: Vec<Marginal> = (0..4).map(|i| Marginal::uniform(i, 2)).collect();
        let cs = CorrelationSet::new(&s, &m).unwrap();
        assert!(matches!(
            restricted_dimension(&cs, &[c("{1,2},{3,4}")]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn sub_collections() {
        let subs = inherited_collections(&c("{1},{2,3}"));
        assert_eq!(subs[0], c("{1},{2,3}"));
        assert!(subs.contains(&c("{1},{2}")));
        assert!(subs.contains(&c("{1},{3}")));
        assert_eq!(subs.len(), 3);
        assert_eq!(inherited_collections(&c("{1},{2}")), vec![c("{1},{2}")]);
    }

    #[test]
    fn factorization_of_cube() {
        let cs = cube();
        let f = partition_factorize(&cs, &c("{1},{2,3}")).unwrap();
        assert_eq!(f.component_dims, vec![0, 1]);
        assert_eq!(f.dim, 1);
        assert_eq!(f.product_vertices.len(), 2);
        let all = partition_factorize(&cs, &c("{1},{2},{3}")).unwrap();
        assert_eq!(all.dim, 0);
        assert_eq!(all.product_vertices, vec![cs.independent_product().clone()]);
        assert!(partition_factorize(&cs, &c("{1},{2}")).is_err());
    }

    #[test]
    fn event_level_check() {
        let cs = cube();
        let coll = c("{1},{2}");
        let s = cs.space();
        let e1 = Event::from_flat(s.subspace(&IndexSet::singleton(0)).unwrap(), [0]).unwrap();
        let e2 = Event::from_flat(s.subspace(&IndexSet::singleton(1)).unwrap(), [1]).unwrap();
        assert!(check_event_level_independence(cs.independent_product(), &coll, &[e1, e2]).unwrap());
    }
}
