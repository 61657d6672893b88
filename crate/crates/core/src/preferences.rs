//! Expected-utility evaluations (SEU, MEU, CEU) and checkers for the behavioural axioms
//! linking preferences on the subspaces with preferences on `Ω`.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capacity::{choquet_integral, Capacity};
use crate::error::{Error, Result};
use crate::independence::{is_independent_on, IndependenceVerdict};
use crate::lp::in_convex_hull;
use crate::polytope::CorrelationSet;
use crate::rational::Rational;
use crate::space::{
    embed_cylinder, independent_product, marginalize, Act, Collection, Event, IndexSet,
    JointDistribution, Marginal, MultiIndex, ProductSpace,
};

/// A convex prior set given by a non-empty list of distinct points whose hull it is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorSet {
    space: ProductSpace,
    vertices: Vec<JointDistribution>,
}

impl PriorSet {
    /// Duplicates are dropped, keeping the first occurrence.
    pub fn new(space: &ProductSpace, vertices: Vec<JointDistribution>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Precondition("a prior set needs at least one distribution".into()));
        }
        let mut unique: Vec<JointDistribution> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if !v.space().same_shape(space) {
                return Err(Error::InvalidSpace(format!("prior on {} but space is {space}", v.space())));
            }
            if !unique.contains(&v) {
                unique.push(v);
            }
        }
        Ok(Self {
            space: space.clone(),
            vertices: unique,
        })
    }

    pub fn singleton(p: JointDistribution) -> Self {
        Self {
            space: p.space().clone(),
            vertices: vec![p],
        }
    }

    /// All of `𝒫`, through its vertices.
    pub fn from_correlation_set(cs: &CorrelationSet) -> Result<Self> {
        Self::new(cs.space(), cs.vertices()?.to_vec())
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn vertices(&self) -> &[JointDistribution] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `E` is null iff every prior gives it probability zero.
    pub fn is_null(&self, e: &Event) -> bool {
        self.vertices.iter().all(|p| p.prob(e).is_zero())
    }

    pub fn lower_capacity(&self) -> Result<Capacity> {
        Capacity::from_vertices(&self.space, &self.vertices)
    }
}

/// Positive affine map `u_i = a u + b` relating two Bernoulli utilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UtilityAlignment {
    a: Rational,
    b: Rational,
}

impl UtilityAlignment {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::Precondition("alignment scale must be positive".into()));
        }
        Ok(Self { a, b })
    }

    pub fn identity() -> Self {
        Self {
            a: Rational::one(),
            b: Rational::zero(),
        }
    }

    pub fn scale(&self) -> &Rational {
        &self.a
    }

    pub fn shift(&self) -> &Rational {
        &self.b
    }

    pub fn apply(&self, v: &Rational) -> Rational {
        &self.a * v + &self.b
    }
}

/// Subjective expected utility on one subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspacePreference {
    pub marginal: Marginal,
    pub utility: UtilityAlignment,
}

impl SubspacePreference {
    pub fn new(marginal: Marginal) -> Self {
        Self {
            marginal,
            utility: UtilityAlignment::identity(),
        }
    }

    pub fn subspace(&self) -> usize {
        self.marginal.subspace()
    }
}

/// Bernoulli utility applied to monetary outcomes.
#[derive(Clone, Debug, PartialEq)]
pub enum RiskUtility {
    Identity,
    /// `((base + x) / scale)^(1 - rho)` normalized as `(t^(1-rho) - 1) / (1 - rho)`, `ln t` at `rho = 1`.
    Crra { rho: f64, scale: f64, base: f64 },
}

impl RiskUtility {
    pub fn apply(&self, x: f64) -> Result<f64> {
        match *self {
            RiskUtility::Identity => Ok(x),
            RiskUtility::Crra { rho, scale, base } => {
                let t = (base + x) / scale;
                if !(t > 0.0) || !(scale > 0.0) {
                    return Err(Error::Precondition(format!(
                        "CRRA utility undefined at wealth {}",
                        base + x
                    )));
                }
                if (rho - 1.0).abs() < 1e-15 {
                    Ok(t.ln())
                } else {
                    Ok((t.powf(1.0 - rho) - 1.0) / (1.0 - rho))
                }
            }
        }
    }
}

/// Expected utility of monetary act `f` under `p` (floating point).
pub fn expected_utility(p: &JointDistribution, f: &Act, u: &RiskUtility) -> Result<f64> {
    let mut total = 0.0;
    for (w, x) in p.weights().iter().zip(f.values()) {
        if w.is_zero() {
            continue;
        }
        total += crate::rational::to_f64(w) * u.apply(crate::rational::to_f64(x))?;
    }
    Ok(total)
}

fn check_act(space: &ProductSpace, f: &Act) -> Result<()> {
    if f.space().same_shape(space) {
        Ok(())
    } else {
        Err(Error::InvalidSpace(format!("act on {} but prior set on {space}", f.space())))
    }
}

/// `min_{p ∈ 𝒞} E_p[f]` with the index of the first minimizing vertex.
pub fn meu_value(prior: &PriorSet, f: &Act) -> Result<(Rational, usize)> {
    check_act(prior.space(), f)?;
    let mut best: Option<(Rational, usize)> = None;
    for (k, p) in prior.vertices().iter().enumerate() {
        let v = f.expectation(p);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, k));
        }
    }
    best.ok_or_else(|| Error::Precondition("empty prior set".into()))
}

/// MEU of a monetary act under a risk utility (floating point).
pub fn meu_value_with(prior: &PriorSet, f: &Act, u: &RiskUtility) -> Result<(f64, usize)> {
    check_act(prior.space(), f)?;
    let mut best: Option<(f64, usize)> = None;
    for (k, p) in prior.vertices().iter().enumerate() {
        let v = expected_utility(p, f, u)?;
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, k));
        }
    }
    best.ok_or_else(|| Error::Precondition("empty prior set".into()))
}

/// `Σ p_i(ω_i) (a f_i(ω_i) + b)` for an act on `Ω_i`.
pub fn seu_subspace_value(sp: &SubspacePreference, f_i: &Act) -> Result<Rational> {
    let w = sp.marginal.weights();
    if f_i.values().len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            actual: f_i.values().len(),
        });
    }
    Ok(w.iter()
        .zip(f_i.values())
        .fold(Rational::zero(), |acc, (p, v)| acc + p * sp.utility.apply(v)))
}

/// Choquet expected utility against the capacity of `𝒫`.
pub fn ceu_value(cs: &CorrelationSet, f: &Act) -> Result<Rational> {
    choquet_integral(&Capacity::from_correlation_set(cs)?, f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub holds: bool,
    /// `(vertex index, subspace)` pairs whose marginal differs.
    pub violations: Vec<(usize, usize)>,
    pub alignments: Vec<UtilityAlignment>,
}

/// Every prior has marginal `p_i` on each subspace `i`.
pub fn check_subspace_consistency(prior: &PriorSet, subs: &[SubspacePreference]) -> Result<ConsistencyReport> {
    let n = prior.space().arity();
    let marginals: Vec<Marginal> = subs.iter().map(|s| s.marginal.clone()).collect();
    let ordered = crate::space::order_marginals(prior.space(), &marginals)?;
    let mut violations = Vec::new();
    for (k, p) in prior.vertices().iter().enumerate() {
        for i in 0..n {
            if p.marginal(i).weights() != ordered[i].weights() {
                violations.push((k, i));
            }
        }
    }
    let mut alignments = vec![UtilityAlignment::identity(); n];
    for s in subs {
        alignments[s.subspace()] = s.utility.clone();
    }
    Ok(ConsistencyReport {
        holds: violations.is_empty(),
        violations,
        alignments,
    })
}

fn require_consistency(prior: &PriorSet, marginals: &[Marginal]) -> Result<()> {
    let subs: Vec<SubspacePreference> = marginals.iter().cloned().map(SubspacePreference::new).collect();
    let report = check_subspace_consistency(prior, &subs)?;
    if report.holds {
        Ok(())
    } else {
        let (k, i) = report.violations[0];
        Err(Error::Precondition(format!(
            "prior {k} does not have the prescribed marginal on subspace {i}"
        )))
    }
}

/// A tuple `(i, f_i, g_i, E_{-i}, x)` on which the axiom's equivalence fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceCounterexample {
    pub trial: usize,
    pub subspace: usize,
    /// Values of `f_i` and `g_i` on `Ω_i`.
    pub f: Vec<Rational>,
    pub g: Vec<Rational>,
    /// The conditioning cylinder `[E_{-i}]`.
    pub condition: Event,
    pub x: Rational,
    /// `(V([f_i]), V([g_i]))`.
    pub unconditioned: (Rational, Rational),
    /// `(V(f_i[E_{-i}]x), V(g_i[E_{-i}]x))`.
    pub conditioned: (Rational, Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    /// Decision by the characterization: the prior set is exactly `{p_ind}`.
    pub holds: bool,
    pub trials: usize,
    pub counterexample: Option<SubspaceCounterexample>,
}

struct SubspaceTrial {
    subspace: usize,
    f: Vec<Rational>,
    g: Vec<Rational>,
    /// Event on `Ω_{-i}`.
    rest: Event,
    x: Rational,
}

/// Subspace Independence. The verdict compares the prior set with `{p_ind}`; a seeded
/// search over `(i, f_i, g_i, E_{-i}, x)` then tries to exhibit a behavioural violation.
///
/// The search first runs a systematic phase (bets on singletons `{ω_i}` against their
/// `p_i`-value, conditioned on every product of singletons and full factors of `Ω_{-i}`),
/// then `random_trials` seeded random tuples. The first counterexample by trial index is kept.
pub fn check_subspace_independence_axiom(
    prior: &PriorSet,
    marginals: &[Marginal],
    random_trials: usize,
    seed: u64,
) -> Result<AxiomReport> {
    require_consistency(prior, marginals)?;
    let space = prior.space();
    let p_ind = independent_product(space, marginals)?;
    let holds = prior.vertices() == [p_ind];
    let ordered: Vec<Marginal> = crate::space::order_marginals(space, marginals)?.into_iter().cloned().collect();

    let mut trial_index = 0;
    let mut try_trial = |t: SubspaceTrial| -> Result<Option<SubspaceCounterexample>> {
        let index = trial_index;
        trial_index += 1;
        evaluate_trial(prior, &ordered, t, index)
    };

    // systematic phase
    for i in 0..space.arity() {
        let rest_set = IndexSet::singleton(i).complement(space.arity());
        if rest_set.is_empty() {
            continue;
        }
        let rest_space = space.subspace(&rest_set)?;
        let rest_events = factor_products(&rest_space);
        for c in 0..space.sizes()[i] {
            let mut f = vec![Rational::zero(); space.sizes()[i]];
            f[c] = Rational::one();
            let g = vec![ordered[i].weights()[c].clone(); space.sizes()[i]];
            for rest in &rest_events {
                let t = SubspaceTrial {
                    subspace: i,
                    f: f.clone(),
                    g: g.clone(),
                    rest: rest.clone(),
                    x: Rational::zero(),
                };
                if let Some(ce) = try_trial(t)? {
                    return Ok(AxiomReport {
                        holds,
                        trials: trial_index,
                        counterexample: Some(ce),
                    });
                }
            }
        }
    }

    // random phase
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_trials {
        let i = rng.gen_range(0..space.arity());
        let rest_set = IndexSet::singleton(i).complement(space.arity());
        if rest_set.is_empty() {
            continue;
        }
        let rest_space = space.subspace(&rest_set)?;
        let ni = space.sizes()[i];
        let f: Vec<Rational> = (0..ni).map(|_| small_rational(&mut rng)).collect();
        let g: Vec<Rational> = if rng.gen_bool(0.5) {
            // constant g at f's subjective value makes [f_i] ~ [g_i]
            let v = f
                .iter()
                .zip(ordered[i].weights())
                .fold(Rational::zero(), |a, (x, p)| a + x * p);
            vec![v; ni]
        } else {
            (0..ni).map(|_| small_rational(&mut rng)).collect()
        };
        let members: Vec<usize> = (0..rest_space.total_size()).filter(|_| rng.gen_bool(0.5)).collect();
        let rest = Event::from_flat(rest_space, members)?;
        let x = small_rational(&mut rng);
        if let Some(ce) = try_trial(SubspaceTrial { subspace: i, f, g, rest, x })? {
            return Ok(AxiomReport {
                holds,
                trials: trial_index,
                counterexample: Some(ce),
            });
        }
    }
    Ok(AxiomReport {
        holds,
        trials: trial_index,
        counterexample: None,
    })
}

fn small_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(-12i64..=12).into(), rng.gen_range(1i64..=4).into())
}

/// Events of a product space that are products of singletons and full factors.
fn factor_products(space: &ProductSpace) -> Vec<Event> {
    let choices: Vec<usize> = space.sizes().iter().map(|n| n + 1).collect();
    let total: usize = choices.iter().product();
    (0..total)
        .map(|mut code| {
            // choice n_j means the whole factor
            let pick: Vec<usize> = choices
                .iter()
                .rev()
                .map(|&c| {
                    let d = code % c;
                    code /= c;
                    d
                })
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .collect();
            let members = (0..space.total_size()).filter(|&k| {
                pick.iter()
                    .enumerate()
                    .all(|(j, &d)| d == space.sizes()[j] || space.coordinate(k, j) == d)
            });
            Event::from_flat(space.clone(), members).expect("indices in range")
        })
        .collect()
}

fn evaluate_trial(
    prior: &PriorSet,
    marginals: &[Marginal],
    t: SubspaceTrial,
    index: usize,
) -> Result<Option<SubspaceCounterexample>> {
    let space = prior.space();
    let i = t.subspace;
    let set = IndexSet::singleton(i);
    let rest_set = set.complement(space.arity());
    let condition = embed_cylinder(&t.rest, &rest_set, space)?;
    if prior.is_null(&condition) {
        return Ok(None);
    }
    let sub = space.subspace(&set)?;
    let f = Act::embed(&Act::new(sub.clone(), t.f.clone())?, &set, space)?;
    let g = Act::embed(&Act::new(sub, t.g.clone())?, &set, space)?;
    let sp = SubspacePreference::new(marginals[i].clone());
    let vf = seu_subspace_value(&sp, &Act::new(space.subspace(&set)?, t.f.clone())?)?;
    let vg = seu_subspace_value(&sp, &Act::new(space.subspace(&set)?, t.g.clone())?)?;
    let cf = meu_value(prior, &f.splice(&condition, &t.x))?.0;
    let cg = meu_value(prior, &g.splice(&condition, &t.x))?.0;
    if vf.cmp(&vg) != cf.cmp(&cg) {
        return Ok(Some(SubspaceCounterexample {
            trial: index,
            subspace: i,
            f: t.f,
            g: t.g,
            condition,
            x: t.x,
            unconditioned: (vf, vg),
            conditioned: (cf, cg),
        }));
    }
    Ok(None)
}

/// Failure of `p([E × F]) p([E′ × F′]) = p([E × F′]) p([E′ × F])` for `I_0` and `J_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductIdentityWitness {
    pub i0: IndexSet,
    pub j0: IndexSet,
    /// `E` as a state of `Ω_{I_0}` and `F` as a state of `Ω_{J_0}`; `E′` and `F′` are the full spaces.
    pub e: MultiIndex,
    pub f: MultiIndex,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollectionAxiomReport {
    pub holds: bool,
    pub verdict: IndependenceVerdict,
    /// Event quadruples on which the product identity was confirmed.
    pub quadruples_checked: usize,
    pub witness: Option<ProductIdentityWitness>,
}

/// Largest `|Ω_{I_0}| + |Ω_{J_0}|` for which all event quadruples are enumerated.
pub const QUADRUPLE_LIMIT: usize = 6;

/// `𝓘`-Independence for an SEU preference with belief `p`.
pub fn check_collection_independence_axiom(p: &JointDistribution, collection: &Collection) -> Result<CollectionAxiomReport> {
    let verdict = is_independent_on(p, collection)?;
    let space = p.space();
    let mut checked = 0;
    let mut witness = None;
    for (j, i0) in collection.members().iter().enumerate() {
        let j0 = collection
            .members()
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .fold(IndexSet::new([]), |acc, (_, m)| acc.union(m));
        let si = space.subspace(i0)?;
        let sj = space.subspace(&j0)?;
        let cyl = |e: &Event, set: &IndexSet| embed_cylinder(e, set, space);
        let joint = |a: &Event, b: &Event| -> Result<Rational> {
            Ok(p.prob(&cyl(a, i0)?.intersection(&cyl(b, &j0)?)))
        };
        if verdict.holds {
            let (a, b) = (si.total_size(), sj.total_size());
            if a + b > QUADRUPLE_LIMIT {
                continue;
            }
            let ev_i: Vec<Event> = (0..1u64 << a).map(|m| Event::from_mask(si.clone(), m)).collect();
            let ev_j: Vec<Event> = (0..1u64 << b).map(|m| Event::from_mask(sj.clone(), m)).collect();
            for e in &ev_i {
                for e2 in &ev_i {
                    for f in &ev_j {
                        for f2 in &ev_j {
                            let lhs = joint(e, f)? * joint(e2, f2)?;
                            let rhs = joint(e, f2)? * joint(e2, f)?;
                            if lhs != rhs {
                                return Err(Error::Internal(format!(
                                    "independent belief violates the product identity for {i0}"
                                )));
                            }
                            checked += 1;
                        }
                    }
                }
            }
        } else if witness.is_none() {
            let full_i = Event::full(si.clone());
            let full_j = Event::full(sj.clone());
            'search: for a in 0..si.total_size() {
                let e = Event::from_flat(si.clone(), [a])?;
                for b in 0..sj.total_size() {
                    let f = Event::from_flat(sj.clone(), [b])?;
                    let lhs = joint(&e, &f)? * joint(&full_i, &full_j)?;
                    let rhs = joint(&e, &full_j)? * joint(&full_i, &f)?;
                    if lhs != rhs {
                        witness = Some(ProductIdentityWitness {
                            i0: i0.clone(),
                            j0: j0.clone(),
                            e: si.multi_index(a),
                            f: sj.multi_index(b),
                            lhs,
                            rhs,
                        });
                        break 'search;
                    }
                }
            }
        }
    }
    if !verdict.holds && witness.is_none() {
        return Err(Error::Internal("dependent belief without a product-identity witness".into()));
    }
    Ok(CollectionAxiomReport {
        holds: verdict.holds,
        verdict,
        quadruples_checked: checked,
        witness,
    })
}

/// Whether `𝒞` is more correlation averse than `𝒞′`: `𝒞 ⊇ 𝒞′` with positively aligned utilities.
pub fn more_correlation_averse(c: &PriorSet, c_prime: &PriorSet, alignment: &UtilityAlignment) -> Result<bool> {
    if !c.space().same_shape(c_prime.space()) {
        return Err(Error::InvalidSpace("prior sets live on different spaces".into()));
    }
    let reference = c.vertices()[0].marginals();
    for p in c.vertices().iter().chain(c_prime.vertices()) {
        if p.marginals() != reference {
            return Err(Error::MarginalMismatch(
                "prior sets do not share the same marginals".into(),
            ));
        }
    }
    if !alignment.scale().is_positive() {
        return Ok(false);
    }
    let points: Vec<Vec<Rational>> = c.vertices().iter().map(|p| p.weights().to_vec()).collect();
    for q in c_prime.vertices() {
        if !in_convex_hull(&points, q.weights())? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RevealedOrder {
    MorePositive,
    MoreNegative,
    Equal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrelationSign {
    Positive,
    Negative,
    Zero,
}

/// `[⨉ E_I] = ⋂ [E_I]` for one event per member (each on `Ω_I`).
pub fn product_cylinder(space: &ProductSpace, collection: &Collection, events: &[Event]) -> Result<Event> {
    collection.check_within(space.arity())?;
    if events.len() != collection.len() {
        return Err(Error::DimensionMismatch {
            expected: collection.len(),
            actual: events.len(),
        });
    }
    let mut out = Event::full(space.clone());
    for (m, e) in collection.members().iter().zip(events) {
        out = out.intersection(&embed_cylinder(e, m, space)?);
    }
    Ok(out)
}

/// Compares `p([⨉ E_I])` with `p′([⨉ E_I])` for beliefs sharing their marginals.
pub fn compare_revealed_correlation(
    p: &JointDistribution,
    p_prime: &JointDistribution,
    collection: &Collection,
    events: &[Event],
) -> Result<RevealedOrder> {
    if !p.space().same_shape(p_prime.space()) {
        return Err(Error::InvalidSpace("beliefs live on different spaces".into()));
    }
    if p.marginals() != p_prime.marginals() {
        return Err(Error::MarginalMismatch("beliefs have different marginals".into()));
    }
    let e = product_cylinder(p.space(), collection, events)?;
    Ok(match p.prob(&e).cmp(&p_prime.prob(&e)) {
        Ordering::Greater => RevealedOrder::MorePositive,
        Ordering::Less => RevealedOrder::MoreNegative,
        Ordering::Equal => RevealedOrder::Equal,
    })
}

/// Sign of `p([⨉ E_I]) - p_ind([⨉ E_I])` with `p_ind` built from the marginals of `p`.
pub fn absolute_revealed_correlation(
    p: &JointDistribution,
    collection: &Collection,
    events: &[Event],
) -> Result<CorrelationSign> {
    let p_ind = independent_product(p.space(), &p.marginals())?;
    let e = product_cylinder(p.space(), collection, events)?;
    // p_ind([⨉ E_I]) factors as ∏ p_ind([E_I])
    let factored = collection
        .members()
        .iter()
        .zip(events)
        .map(|(m, ev)| marginalize(&p_ind, m).map(|q| q.prob(ev)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(Rational::one(), |a, b| a * b);
    debug_assert_eq!(factored, p_ind.prob(&e));
    Ok(match p.prob(&e).cmp(&factored) {
        Ordering::Greater => CorrelationSign::Positive,
        Ordering::Less => CorrelationSign::Negative,
        Ordering::Equal => CorrelationSign::Zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn uniform_2x2() -> CorrelationSet {
        let s = ProductSpace::new(vec![2, 2]).unwrap();
        CorrelationSet::new(&s, &[Marginal::uniform(0, 2), Marginal::uniform(1, 2)]).unwrap()
    }

    fn act(s: &ProductSpace, v: &[i64]) -> Act {
        Act::new(s.clone(), v.iter().map(|&x| int(x)).collect()).unwrap()
    }

    #[test]
    fn meu_and_ceu_diverge() {
        let cs = uniform_2x2();
        let prior = PriorSet::from_correlation_set(&cs).unwrap();
        let s = cs.space();
        let f = act(s, &[4, 2, 3, 1]);
        let g = act(s, &[5, 2, 3, 0]);
        assert_eq!(meu_value(&prior, &f).unwrap().0, ratio(5, 2));
        assert_eq!(meu_value(&prior, &g).unwrap().0, ratio(5, 2));
        assert_eq!(ceu_value(&cs, &f).unwrap(), int(2));
        assert_eq!(ceu_value(&cs, &g).unwrap(), ratio(3, 2));
        assert_eq!(meu_value(&prior, &Act::constant(s.clone(), int(3))).unwrap().0, int(3));
    }

    #[test]
    fn subspace_seu() {
        let m = Marginal::new(0, vec![ratio(1, 3), ratio(2, 3)]).unwrap();
        let sp = SubspacePreference::new(m);
        let sub = ProductSpace::new(vec![2]).unwrap();
        assert_eq!(seu_subspace_value(&sp, &act(&sub, &[1, 0])).unwrap(), ratio(1, 3));
        assert_eq!(seu_subspace_value(&sp, &act(&sub, &[5, 5])).unwrap(), int(5));
    }

    #[test]
    fn consistency() {
        let cs = uniform_2x2();
        let subs: Vec<SubspacePreference> = cs.marginals().iter().cloned().map(SubspacePreference::new).collect();
        let full = PriorSet::from_correlation_set(&cs).unwrap();
        assert!(check_subspace_consistency(&full, &subs).unwrap().holds);
        let point = PriorSet::singleton(JointDistribution::point_mass(cs.space().clone(), 0));
        let r = check_subspace_consistency(&point, &subs).unwrap();
        assert!(!r.holds);
        assert_eq!(r.violations, vec![(0, 0), (0, 1)]);
    }

    #[test]
    fn subspace_independence() {
        let cs = uniform_2x2();
        let ind = PriorSet::singleton(cs.independent_product().clone());
        let r = check_subspace_independence_axiom(&ind, cs.marginals(), 500, 3).unwrap();
        assert!(r.holds);
        assert!(r.counterexample.is_none());

        let full = PriorSet::from_correlation_set(&cs).unwrap();
        let r = check_subspace_independence_axiom(&full, cs.marginals(), 500, 3).unwrap();
        assert!(!r.holds);
        assert!(r.counterexample.is_some());

        let single = PriorSet::singleton(cs.vertices().unwrap()[0].clone());
        let r = check_subspace_independence_axiom(&single, cs.marginals(), 0, 3).unwrap();
        assert!(!r.holds && r.counterexample.is_some());
    }

    #[test]
    fn collection_axiom() {
        let cs = uniform_2x2();
        let coll = Collection::parse("{1},{2}").unwrap();
        let r = check_collection_independence_axiom(cs.independent_product(), &coll).unwrap();
        assert!(r.holds && r.witness.is_none());
        assert!(r.quadruples_checked > 0);
        let diag = &cs.vertices().unwrap()[1];
        let r = check_collection_independence_axiom(diag, &coll).unwrap();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!((w.lhs, w.rhs), (ratio(1, 2), ratio(1, 4)));
    }

    #[test]
    fn correlation_aversion() {
        let cs = uniform_2x2();
        let full = PriorSet::from_correlation_set(&cs).unwrap();
        let ind = PriorSet::singleton(cs.independent_product().clone());
        let id = UtilityAlignment::identity();
        assert!(more_correlation_averse(&full, &ind, &id).unwrap());
        assert!(!more_correlation_averse(&ind, &full, &id).unwrap());
        assert!(more_correlation_averse(&full, &full, &id).unwrap());
    }

    #[test]
    fn revealed_correlation() {
        let cs = uniform_2x2();
        let s = cs.space();
        let coll = Collection::parse("{1},{2}").unwrap();
        let e1 = Event::from_flat(s.subspace(&IndexSet::singleton(0)).unwrap(), [0]).unwrap();
        let e2 = Event::from_flat(s.subspace(&IndexSet::singleton(1)).unwrap(), [0]).unwrap();
        let events = [e1, e2];
        let v = cs.vertices().unwrap();
        let (anti, diag) = (&v[0], &v[1]);
        let ind = cs.independent_product();
        assert_eq!(compare_revealed_correlation(diag, ind, &coll, &events).unwrap(), RevealedOrder::MorePositive);
        assert_eq!(compare_revealed_correlation(diag, diag, &coll, &events).unwrap(), RevealedOrder::Equal);
        assert_eq!(absolute_revealed_correlation(anti, &coll, &events).unwrap(), CorrelationSign::Negative);
        assert_eq!(absolute_revealed_correlation(ind, &coll, &events).unwrap(), CorrelationSign::Zero);
    }

    #[test]
    fn crra_utility() {
        let u = RiskUtility::Crra { rho: 0.5, scale: 6.0, base: 6.0 };
        assert!((u.apply(0.0).unwrap()).abs() < 1e-15);
        assert!(u.apply(-6.0).is_err());
        let log = RiskUtility::Crra { rho: 1.0, scale: 6.0, base: 6.0 };
        assert!((log.apply(6.0).unwrap() - 2f64.ln()).abs() < 1e-15);
    }
}
