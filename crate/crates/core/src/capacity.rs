//! The lower envelope `υ(E) = min_{p ∈ 𝒫} p(E)`, its exactness, convexity witnesses
//! and the Choquet integral.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lp::{solve_lp_min, LinearProgram};
use crate::polytope::{CorrelationSet, MarginalSystem};
use crate::rational::Rational;
use crate::space::{embed_cylinder, Act, Event, IndexSet, JointDistribution, ProductSpace};

/// Largest `N` for which event sweeps enumerate all `2^N` events.
pub const EXHAUSTIVE_EVENT_LIMIT: usize = 16;
/// Random events drawn beyond the exhaustive limit.
pub const SAMPLED_EVENTS: usize = 10_000;
/// Largest `N` for which convexity search enumerates all event pairs.
pub const EXHAUSTIVE_PAIR_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum EventKey {
    Mask(u64),
    Sorted(Vec<usize>),
}

impl EventKey {
    fn of(e: &Event) -> Self {
        match e.mask() {
            Some(m) => EventKey::Mask(m),
            None => EventKey::Sorted(e.members().iter().copied().collect()),
        }
    }
}

/// Lower envelope of a finite set of distributions, memoized per event.
#[derive(Debug)]
pub struct Capacity {
    space: ProductSpace,
    vertices: Vec<JointDistribution>,
    system: Option<MarginalSystem>,
    cache: Mutex<HashMap<EventKey, Rational>>,
}

impl Clone for Capacity {
    fn clone(&self) -> Self {
        Self {
            space: self.space.clone(),
            vertices: self.vertices.clone(),
            system: self.system.clone(),
            cache: Mutex::new(self.cache.lock().expect("capacity cache poisoned").clone()),
        }
    }
}

impl Capacity {
    /// Capacity of `𝒫`; every value is cross-checked against a direct LP.
    pub fn from_correlation_set(cs: &CorrelationSet) -> Result<Self> {
        Ok(Self {
            space: cs.space().clone(),
            vertices: cs.vertices()?.to_vec(),
            system: Some(cs.system().clone()),
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Lower envelope of the convex hull of `vertices`.
    pub fn from_vertices(space: &ProductSpace, vertices: &[JointDistribution]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Precondition("capacity needs at least one distribution".into()));
        }
        if let Some(v) = vertices.iter().find(|v| !v.space().same_shape(space)) {
            return Err(Error::InvalidSpace(format!("distribution on {} but space is {space}", v.space())));
        }
        Ok(Self {
            space: space.clone(),
            vertices: vertices.to_vec(),
            system: None,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn vertices(&self) -> &[JointDistribution] {
        &self.vertices
    }

    fn check_event(&self, e: &Event) -> Result<()> {
        if e.space().same_shape(&self.space) {
            Ok(())
        } else {
            Err(Error::InvalidSpace(format!("event on {} but capacity on {}", e.space(), self.space)))
        }
    }

    /// `min_p p(E)` over the vertices, computed without the cache.
    pub fn vertex_min(&self, e: &Event) -> Rational {
        self.vertices
            .iter()
            .map(|p| p.prob(e))
            .min()
            .expect("non-empty vertex list")
    }

    pub fn value(&self, e: &Event) -> Result<Rational> {
        self.check_event(e)?;
        let key = EventKey::of(e);
        if let Some(v) = self.cache.lock().expect("capacity cache poisoned").get(&key) {
            return Ok(v.clone());
        }
        let v = self.vertex_min(e);
        if let Some(system) = &self.system {
            let lp = lp_capacity(system, e)?;
            if lp != v {
                return Err(Error::Internal(format!(
                    "LP value {lp} disagrees with vertex minimum {v}"
                )));
            }
        }
        self.cache
            .lock()
            .expect("capacity cache poisoned")
            .insert(key, v.clone());
        Ok(v)
    }
}

/// `min p(E)` over `𝒫` by linear programming, independent of vertex enumeration.
pub fn lp_capacity(system: &MarginalSystem, e: &Event) -> Result<Rational> {
    let n = system.space().total_size();
    let objective = (0..n)
        .map(|k| if e.contains(k) { Rational::one() } else { Rational::zero() })
        .collect();
    let lp = LinearProgram::new(objective, system.matrix().clone(), system.rhs().to_vec())?;
    Ok(solve_lp_min(&lp)?.optimum)
}

/// `υ(E)` on `𝒫`, computed by LP and by vertex minimum; errors if they disagree.
pub fn capacity_value(cs: &CorrelationSet, e: &Event) -> Result<Rational> {
    let lp = lp_capacity(cs.system(), e)?;
    let vertex = cs
        .vertices()?
        .iter()
        .map(|p| p.prob(e))
        .min()
        .ok_or(Error::Infeasible)?;
    if lp != vertex {
        return Err(Error::Internal(format!(
            "LP value {lp} disagrees with vertex minimum {vertex}"
        )));
    }
    Ok(lp)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub holds: bool,
    pub exhaustive: bool,
    pub events_checked: usize,
    /// First event on which some vertex fell below `υ`, if any.
    pub failure: Option<Event>,
}

/// Verifies `core(υ) = 𝒫`: each vertex dominates the LP-computed `υ` on the swept
/// events, and `υ` on the cylinders `[ω_i]` reproduces the marginals and sums to one.
pub fn check_exactness(cs: &CorrelationSet, seed: u64) -> Result<ExactnessReport> {
    let space = cs.space();
    let n = space.total_size();
    let vertices = cs.vertices()?;
    let system = cs.system();

    let mut events: Vec<Event> = Vec::new();
    let exhaustive = n <= EXHAUSTIVE_EVENT_LIMIT;
    if exhaustive {
        events.extend((0..1u64 << n).map(|m| Event::from_mask(space.clone(), m)));
    } else {
        events.extend(all_cylinders(space)?);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SAMPLED_EVENTS {
            events.push(random_event(space, &mut rng));
        }
    }

    let mut failure = None;
    for e in &events {
        let v = lp_capacity(system, e)?;
        if vertices.iter().any(|p| p.prob(e) < v) {
            failure = Some(e.clone());
            break;
        }
    }

    let mut cylinders_ok = true;
    for (i, m) in cs.marginals().iter().enumerate() {
        let mut total = Rational::zero();
        for (c, w) in m.weights().iter().enumerate() {
            let v = lp_capacity(system, &single_cylinder(space, i, c)?)?;
            cylinders_ok &= &v == w;
            total += v;
        }
        cylinders_ok &= total.is_one();
    }

    Ok(ExactnessReport {
        holds: failure.is_none() && cylinders_ok,
        exhaustive,
        events_checked: events.len(),
        failure,
    })
}

/// The cylinder `[ω_i]` for state `c` of subspace `i`.
pub fn single_cylinder(space: &ProductSpace, i: usize, c: usize) -> Result<Event> {
    let set = IndexSet::singleton(i);
    let sub = space.subspace(&set)?;
    embed_cylinder(&Event::from_flat(sub, [c])?, &set, space)
}

fn all_cylinders(space: &ProductSpace) -> Result<Vec<Event>> {
    let mut out = Vec::new();
    for i in 0..space.arity() {
        let set = IndexSet::singleton(i);
        let sub = space.subspace(&set)?;
        let k = sub.total_size();
        if k <= 16 {
            for m in 1..(1u64 << k) {
                out.push(embed_cylinder(&Event::from_mask(sub.clone(), m), &set, space)?);
            }
        } else {
            for c in 0..k {
                out.push(single_cylinder(space, i, c)?);
            }
        }
    }
    Ok(out)
}

fn random_event(space: &ProductSpace, rng: &mut impl Rng) -> Event {
    let members = (0..space.total_size()).filter(|_| rng.gen_bool(0.5));
    Event::from_flat(space.clone(), members).expect("indices in range")
}

/// Checks `υ(E) = p_i(E_i) + υ(E ∖ [E_i])` for `[E_i] ⊆ E`.
pub fn cylinder_additivity_check(cs: &CorrelationSet, e: &Event, i: usize, e_i: &Event) -> Result<bool> {
    let space = cs.space();
    let set = IndexSet::singleton(i);
    let cyl = embed_cylinder(e_i, &set, space)?;
    if !cyl.is_subset(e) {
        return Err(Error::Precondition(format!("cylinder over subspace {i} is not contained in E")));
    }
    let p_i = e_i
        .members()
        .iter()
        .map(|&c| &cs.marginals()[i].weights()[c])
        .fold(Rational::zero(), |a, w| a + w);
    let lhs = capacity_value(cs, e)?;
    let rhs = p_i + capacity_value(cs, &e.difference(&cyl))?;
    Ok(lhs == rhs)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexityWitness {
    pub e: Event,
    pub f: Event,
    /// `υ(E) + υ(F) - υ(E ∪ F) - υ(E ∩ F)`, strictly positive.
    pub gap: Rational,
}

/// Searches for `υ(E ∪ F) + υ(E ∩ F) < υ(E) + υ(F)`, returning the pair with the largest gap
/// (first in search order on ties). Exhaustive for `N <= 8`, otherwise `budget` seeded pairs.
pub fn find_convexity_violation(cap: &Capacity, seed: u64, budget: usize) -> Result<Option<ConvexityWitness>> {
    let space = cap.space();
    let n = space.total_size();
    let mut best: Option<ConvexityWitness> = None;
    let mut consider = |e: Event, f: Event| -> Result<()> {
        let gap = cap.value(&e)? + cap.value(&f)? - cap.value(&e.union(&f))? - cap.value(&e.intersection(&f))?;
        if gap > Rational::zero() && best.as_ref().is_none_or(|b| gap > b.gap) {
            best = Some(ConvexityWitness { e, f, gap });
        }
        Ok(())
    };
    if n <= EXHAUSTIVE_PAIR_LIMIT {
        let count = 1u64 << n;
        for a in 0..count {
            for b in (a + 1)..count {
                // nested pairs are modular and cannot witness a violation
                if a & b == a || a & b == b {
                    continue;
                }
                consider(Event::from_mask(space.clone(), a), Event::from_mask(space.clone(), b))?;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..budget {
            let e = random_event(space, &mut rng);
            let f = random_event(space, &mut rng);
            consider(e, f)?;
        }
    }
    Ok(best)
}

/// Choquet integral of `f` against `cap` via descending upper level sets.
pub fn choquet_integral(cap: &Capacity, f: &Act) -> Result<Rational> {
    if !f.space().same_shape(cap.space()) {
        return Err(Error::InvalidSpace("act and capacity live on different spaces".into()));
    }
    let mut levels: Vec<&Rational> = f.values().iter().collect();
    levels.sort();
    levels.dedup();
    let mut total = Rational::zero();
    let mut previous = Rational::zero();
    for v in levels.into_iter().rev() {
        let upper = (0..f.values().len()).filter(|&k| f.value(k) >= v);
        let a = Event::from_flat(cap.space().clone(), upper)?;
        let u = cap.value(&a)?;
        total += v * (&u - &previous);
        previous = u;
    }
    Ok(total)
}
