mod output;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use corrpoly::capacity::{check_exactness, find_convexity_violation};
use corrpoly::independence::{is_independent_on, restricted_dimension};
use corrpoly::info::{certify_local_max_mi, entropy, marginal_entropies, mutual_information};
use corrpoly::preferences::{
    absolute_revealed_correlation, ceu_value, check_collection_independence_axiom, check_subspace_consistency,
    check_subspace_independence_axiom, compare_revealed_correlation, expected_utility, meu_value, meu_value_with,
    more_correlation_averse, CorrelationSign, RevealedOrder, RiskUtility, SubspacePreference, UtilityAlignment,
};
use corrpoly::rational::{format_decimal, format_rational, parse_rational};
use corrpoly::scenario::{prior_block, Document, Scenario};
use corrpoly::scenarios::{
    climate_from_scenario, finance_rows, insurance_from_scenario, insurance_rows, rows_to_csv, rows_to_table,
    run_finance, sweep, ReportRow, Value,
};
use corrpoly::space::embed_cylinder;
use corrpoly::{Capacity, Collection, Error, Event, IndexSet, JointDistribution, Rational, Result};

use output::{Format, Table};

/// Correlation sets of finite product spaces, evaluated from scenario files.
#[derive(Parser)]
#[command(name = "corrpoly", version)]
struct Cli {
    /// Seed for every randomized search or probe.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format; `sweep` defaults to csv, everything else to table.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension of the correlation set, optionally under independence collections.
    Dim {
        scenario: PathBuf,
        /// Collection such as "{1},{2,3}"; repeat to intersect.
        #[arg(long = "restrict")]
        restrict: Vec<String>,
    },
    /// Extreme points of the correlation set.
    Vertices {
        scenario: PathBuf,
        #[arg(long)]
        guard: Option<usize>,
        /// Print a PRIOR section listing the vertices instead of a table.
        #[arg(long)]
        prior_block: bool,
    },
    /// Exact lower probability of events.
    Capacity {
        scenario: PathBuf,
        /// Event expressions, e.g. "[Hcs,*] | feedback".
        events: Vec<String>,
        /// Use the lower envelope of the scenario prior instead of the full correlation set.
        #[arg(long)]
        prior: bool,
        /// Verify that the core of the capacity is the correlation set.
        #[arg(long)]
        exactness: bool,
        /// Search for a pair of events violating convexity.
        #[arg(long)]
        convexity: bool,
    },
    /// Entropies, mutual information and the local-maximum certificate.
    Mi {
        scenario: PathBuf,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 8)]
        probes: usize,
        #[arg(long, default_value = "1/64")]
        step: String,
    },
    /// Independence of a distribution (or every prior vertex) on a collection.
    Independence {
        scenario: PathBuf,
        collection: String,
        #[command(flatten)]
        dist: DistArgs,
    },
    /// SEU, MEU and CEU of the scenario acts.
    Evaluate {
        scenario: PathBuf,
        /// Acts to evaluate; all of them when omitted.
        acts: Vec<String>,
        /// Belief used for SEU; the independent product when omitted.
        #[arg(long)]
        belief: Option<String>,
        /// Print the worked report for the climate, insurance or finance scenario.
        #[arg(long)]
        report: bool,
        /// Relative risk aversion for the finance report.
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<f64>,
    },
    /// Check an axiom against the scenario prior.
    CheckAxiom {
        scenario: PathBuf,
        axiom: Axiom,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Collection for collection-independence.
        #[arg(long)]
        collection: Option<String>,
        #[command(flatten)]
        dist: DistArgs,
    },
    /// Correlation aversion and revealed correlation between two scenarios.
    Compare {
        scenario: PathBuf,
        other: PathBuf,
        #[arg(long)]
        belief_a: Option<String>,
        #[arg(long)]
        belief_b: Option<String>,
        /// Collection for revealed correlation; all singletons when omitted.
        #[arg(long)]
        collection: Option<String>,
        /// One cylinder event per collection member, in order.
        #[arg(long = "event")]
        events: Vec<String>,
    },
    /// Evaluate the scenario over a parameter grid.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        param: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<String>,
        #[arg(long)]
        step: Option<String>,
        /// Write to a file instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Axiom {
    SubspaceIndependence,
    CollectionIndependence,
    Consistency,
}

/// Selects a distribution; at most one flag may be given.
#[derive(Args, Debug, Default)]
#[group(multiple = false)]
struct DistArgs {
    /// 1-based index into the vertices of the correlation set.
    #[arg(long)]
    vertex: Option<usize>,
    /// Named vertex of the scenario prior.
    #[arg(long)]
    prior_vertex: Option<String>,
    /// Named belief from the BELIEFS section.
    #[arg(long)]
    belief: Option<String>,
    /// Whitespace-separated rational weights in row-major order.
    #[arg(long)]
    weights: Option<String>,
    /// The independent product of the marginals.
    #[arg(long)]
    independent: bool,
}

impl DistArgs {
    fn resolve(&self, scn: &Scenario) -> Result<Option<(String, JointDistribution)>> {
        let cs = scn.correlation_set();
        if let Some(k) = self.vertex {
            let vs = cs.vertices()?;
            let p = k
                .checked_sub(1)
                .and_then(|i| vs.get(i))
                .ok_or_else(|| Error::Precondition(format!("vertex index {k} outside 1..={}", vs.len())))?;
            return Ok(Some((format!("vertex {k}"), p.clone())));
        }
        if let Some(name) = &self.prior_vertex {
            let k = scn
                .vertex_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::Scenario(format!("unknown prior vertex `{name}`")))?;
            return Ok(Some((name.clone(), scn.prior.vertices()[k].clone())));
        }
        if let Some(name) = &self.belief {
            return Ok(Some((name.clone(), scn.belief(name)?.clone())));
        }
        if let Some(text) = &self.weights {
            let w = text.split_whitespace().map(parse_rational).collect::<Result<Vec<_>>>()?;
            return Ok(Some(("inline".into(), JointDistribution::new(scn.space.clone(), w)?)));
        }
        if self.independent {
            return Ok(Some(("independent".into(), cs.independent_product().clone())));
        }
        Ok(None)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Returns the verdict of check commands; `true` for everything else.
fn run(cli: Cli) -> Result<bool> {
    let format = cli.format.unwrap_or(Format::Table);
    let seed = cli.seed;
    let print = |t: &Table| -> Result<()> {
        print!("{}", t.render(format)?);
        Ok(())
    };
    match cli.command {
        Command::Dim { scenario, restrict } => {
            let scn = load(&scenario)?;
            let d = scn.correlation_set().dimension()?;
            let mut t = Table::key_value();
            t.kv("sizes", join(scn.space.sizes()));
            t.kv("dim", d.dim);
            t.kv("rank_dim", d.rank_dim);
            t.kv("formula_dim", d.formula_dim);
            t.kv("reduced_sizes", join(&d.reduced_sizes));
            if let Some(w) = &d.warning {
                t.kv("warning", w);
            }
            if !restrict.is_empty() {
                let cols = restrict.iter().map(|c| Collection::parse(c)).collect::<Result<Vec<_>>>()?;
                let names: Vec<String> = cols.iter().map(|c| c.to_string()).collect();
                t.kv(format!("dim[{}]", names.join(" & ")), restricted_dimension(scn.correlation_set(), &cols)?);
            }
            print(&t)?;
        }
        Command::Vertices { scenario, guard, prior_block: as_block } => {
            let scn = load(&scenario)?;
            let mut cs = scn.correlation_set().clone();
            if let Some(g) = guard {
                cs = cs.with_guard(g);
            }
            let vs = cs.vertices()?;
            if as_block {
                let names: Vec<String> = (1..=vs.len()).map(|k| format!("v{k}")).collect();
                print!("{}", prior_block(&names, vs));
            } else {
                let states = (0..scn.space.total_size()).map(|k| scn.space.state_name(k));
                let mut t = Table::new(std::iter::once("vertex".to_string()).chain(states));
                for (k, v) in vs.iter().enumerate() {
                    t.push(std::iter::once(format!("v{}", k + 1)).chain(v.weights().iter().map(format_rational)));
                }
                print(&t)?;
            }
        }
        Command::Capacity { scenario, events, prior, exactness, convexity } => {
            let scn = load(&scenario)?;
            let cap = if prior {
                scn.prior.lower_capacity()?
            } else {
                Capacity::from_correlation_set(scn.correlation_set())?
            };
            let mut t = Table::new(["event", "states", "rational", "decimal"]);
            for text in &events {
                let e = parse_event(&scn, text)?;
                let v = cap.value(&e)?;
                t.push([text.clone(), event_text(&e), format_rational(&v), format_decimal(&v)]);
            }
            let mut ok = true;
            if exactness {
                let r = check_exactness(scn.correlation_set(), seed)?;
                ok &= r.holds;
                let detail = match &r.failure {
                    Some(e) => format!("fails on {}", event_text(e)),
                    None => format!("{} events, {}", r.events_checked, if r.exhaustive { "exhaustive" } else { "sampled" }),
                };
                t.push(["exactness".into(), detail, r.holds.to_string(), String::new()]);
            }
            if convexity {
                match find_convexity_violation(&cap, seed, 10_000)? {
                    Some(w) => t.push([
                        "convexity violation".into(),
                        format!("E = {}, F = {}", event_text(&w.e), event_text(&w.f)),
                        format_rational(&w.gap),
                        format_decimal(&w.gap),
                    ]),
                    None => t.push(["convexity violation", "none found", "", ""]),
                }
            }
            print(&t)?;
            return Ok(ok);
        }
        Command::Mi { scenario, dist, probes, step } => {
            let scn = load(&scenario)?;
            let cs = scn.correlation_set();
            let (label, p) = dist
                .resolve(&scn)?
                .ok_or_else(|| Error::Precondition("choose a distribution, e.g. --vertex 1".into()))?;
            let step = parse_rational(&step)?;
            let cert = certify_local_max_mi(cs, &p, probes, &step, seed)?;
            let mut t = Table::key_value();
            t.kv("distribution", label);
            t.kv("I(p)", fmt_f64(mutual_information(cs, &p)?));
            t.kv("H(p)", fmt_f64(entropy(&p)));
            for (i, h) in marginal_entropies(cs).iter().enumerate() {
                t.kv(format!("H(p{})", i + 1), fmt_f64(*h));
            }
            t.kv("maximally_zero", cs.is_maximally_zero(&p)?);
            t.kv("local_max", cert.is_local_max);
            t.kv("probes", cert.probe_count);
            t.kv("max_increase", fmt_f64(cert.max_observed_increase));
            print(&t)?;
        }
        Command::Independence { scenario, collection, dist } => {
            let scn = load(&scenario)?;
            let coll = Collection::parse(&collection)?;
            let targets: Vec<(String, JointDistribution)> = match dist.resolve(&scn)? {
                Some(d) => vec![d],
                None => scn.vertex_names.iter().cloned().zip(scn.prior.vertices().iter().cloned()).collect(),
            };
            let mut t = Table::new(["distribution", "independent", "witness", "max_defect"]);
            let mut ok = true;
            for (name, p) in &targets {
                let v = is_independent_on(p, &coll)?;
                ok &= v.holds;
                let witness = v
                    .witness
                    .as_ref()
                    .map(|w| w.iter().map(|m| format!("({})", join(m.coords()))).collect::<Vec<_>>().join(" "))
                    .unwrap_or_default();
                t.push([name.clone(), v.holds.to_string(), witness, format_rational(&v.max_abs_defect)]);
            }
            match restricted_dimension(scn.correlation_set(), std::slice::from_ref(&coll)) {
                Ok(d) => t.push(["dimension".into(), d.to_string(), String::new(), String::new()]),
                Err(Error::Unsupported(_)) | Err(Error::Precondition(_)) => {}
                Err(e) => return Err(e),
            }
            print(&t)?;
            return Ok(ok);
        }
        Command::Evaluate { scenario, acts, belief, report, rho } => {
            let scn = load(&scenario)?;
            if report {
                return example_report(&scn, rho, format).map(|_| true);
            }
            let names: Vec<String> = if acts.is_empty() {
                scn.acts.iter().map(|(n, _)| n.clone()).collect()
            } else {
                acts
            };
            let p = match &belief {
                Some(b) => scn.belief(b)?.clone(),
                None => scn.correlation_set().independent_product().clone(),
            };
            let identity = scn.utility == RiskUtility::Identity;
            let mut t = Table::new([
                "act",
                "seu_rational",
                "seu_decimal",
                "meu_rational",
                "meu_decimal",
                "argmin_vertex",
                "ceu_rational",
                "ceu_decimal",
            ]);
            for name in &names {
                let f = scn.act(name)?;
                let (seu, meu, k, ceu) = if identity {
                    let (m, k) = meu_value(&scn.prior, f)?;
                    let c = ceu_value(scn.correlation_set(), f)?;
                    (Value::Exact(f.expectation(&p)), Value::Exact(m), k, Some(Value::Exact(c)))
                } else {
                    let (m, k) = meu_value_with(&scn.prior, f, &scn.utility)?;
                    (Value::Approx(expected_utility(&p, f, &scn.utility)?), Value::Approx(m), k, None)
                };
                let (cr, cd) = ceu.map(|c| (c.rational_text(), c.decimal_text())).unwrap_or_default();
                t.push([
                    name.clone(),
                    seu.rational_text(),
                    seu.decimal_text(),
                    meu.rational_text(),
                    meu.decimal_text(),
                    scn.vertex_names[k].clone(),
                    cr,
                    cd,
                ]);
            }
            print(&t)?;
        }
        Command::CheckAxiom { scenario, axiom, trials, collection, dist } => {
            let scn = load(&scenario)?;
            let mut t = Table::key_value();
            let holds = match axiom {
                Axiom::SubspaceIndependence => {
                    let r = check_subspace_independence_axiom(&scn.prior, &scn.marginals, trials, seed)?;
                    t.kv("holds", r.holds);
                    t.kv("trials", r.trials);
                    if let Some(c) = &r.counterexample {
                        t.kv("trial", c.trial);
                        t.kv("subspace", c.subspace + 1);
                        t.kv("f", join_rationals(&c.f));
                        t.kv("g", join_rationals(&c.g));
                        t.kv("condition", event_text(&c.condition));
                        t.kv("x", format_rational(&c.x));
                        t.kv("V(f), V(g)", pair(&c.unconditioned));
                        t.kv("V(f|E)x, V(g|E)x", pair(&c.conditioned));
                    }
                    r.holds
                }
                Axiom::CollectionIndependence => {
                    let text = collection
                        .as_deref()
                        .ok_or_else(|| Error::Precondition("--collection is required".into()))?;
                    let coll = Collection::parse(text)?;
                    let (label, p) = match dist.resolve(&scn)? {
                        Some(d) => d,
                        None if scn.prior.len() == 1 => (scn.vertex_names[0].clone(), scn.prior.vertices()[0].clone()),
                        None => {
                            return Err(Error::Precondition(
                                "prior has several vertices; choose a belief, e.g. --prior-vertex".into(),
                            ))
                        }
                    };
                    let r = check_collection_independence_axiom(&p, &coll)?;
                    t.kv("distribution", label);
                    t.kv("holds", r.holds);
                    t.kv("quadruples_checked", r.quadruples_checked);
                    if let Some(w) = &r.witness {
                        t.kv("I0", &w.i0);
                        t.kv("J0", &w.j0);
                        t.kv("E", format!("({})", join(w.e.coords())));
                        t.kv("F", format!("({})", join(w.f.coords())));
                        t.kv("lhs", format_rational(&w.lhs));
                        t.kv("rhs", format_rational(&w.rhs));
                    }
                    r.holds
                }
                Axiom::Consistency => {
                    let subs: Vec<SubspacePreference> =
                        scn.marginals.iter().cloned().map(SubspacePreference::new).collect();
                    let r = check_subspace_consistency(&scn.prior, &subs)?;
                    t.kv("holds", r.holds);
                    for (k, i) in &r.violations {
                        t.kv("violation", format!("{} on subspace {}", scn.vertex_names[*k], i + 1));
                    }
                    r.holds
                }
            };
            print(&t)?;
            return Ok(holds);
        }
        Command::Compare { scenario, other, belief_a, belief_b, collection, events } => {
            let (a, b) = (load(&scenario)?, load(&other)?);
            let id = UtilityAlignment::identity();
            let mut t = Table::new(["measure", "events", "result"]);
            t.push(["a more correlation averse than b", "", &more_correlation_averse(&a.prior, &b.prior, &id)?.to_string()]);
            t.push(["b more correlation averse than a", "", &more_correlation_averse(&b.prior, &a.prior, &id)?.to_string()]);
            let (pa, pb) = match (pick_belief(&a, belief_a.as_deref())?, pick_belief(&b, belief_b.as_deref())?) {
                (Some(pa), Some(pb)) => (pa, pb),
                _ => {
                    t.push(["revealed a vs b", "", "skipped: pass --belief-a and --belief-b"]);
                    print(&t)?;
                    return Ok(true);
                }
            };
            let n = a.space.arity();
            let coll = match &collection {
                Some(c) => Collection::parse(c)?,
                None => Collection::new((0..n).map(IndexSet::singleton).collect())?,
            };
            let tuples = if events.is_empty() {
                singleton_tuples(&a, &coll)?
            } else {
                let evs = events.iter().map(|e| parse_event(&a, e)).collect::<Result<Vec<_>>>()?;
                vec![(events.join(" x "), cylinder_bases(&a, &coll, &evs)?)]
            };
            for (label, evs) in &tuples {
                let order = compare_revealed_correlation(&pa, &pb, &coll, evs)?;
                t.push(["revealed a vs b", label, revealed_text(order)]);
                t.push(["absolute a", label, sign_text(absolute_revealed_correlation(&pa, &coll, evs)?)]);
                t.push(["absolute b", label, sign_text(absolute_revealed_correlation(&pb, &coll, evs)?)]);
            }
            print(&t)?;
        }
        Command::Sweep { scenario, param, lo, hi, step, output } => {
            let doc = Document::read(&scenario)?;
            let defaults = doc.instantiate()?.sweep;
            let param = param
                .or(defaults.as_ref().map(|s| s.param.clone()))
                .ok_or_else(|| Error::Precondition("no SWEEP section; pass --param".into()))?;
            let env = HashMap::new();
            let bound = |given: Option<String>, from: Option<Rational>, what: &str| -> Result<Rational> {
                match given {
                    Some(t) => corrpoly::scenario::Expr::parse(&t)
                        .map_err(|(_, m)| Error::Precondition(format!("--{what}: {m}")))?
                        .eval(&env),
                    None => from.ok_or_else(|| Error::Precondition(format!("no SWEEP section; pass --{what}"))),
                }
            };
            let lo = bound(lo, defaults.as_ref().map(|s| s.lo.clone()), "lo")?;
            let hi = bound(hi, defaults.as_ref().map(|s| s.hi.clone()), "hi")?;
            let step = bound(step, defaults.as_ref().map(|s| s.step.clone()), "step")?;
            let grid = corrpoly::scenario::Sweep { param: param.clone(), lo, hi, step }.grid();
            let rows = sweep(&doc, &param, &grid)?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => rows_to_csv(&rows)?,
                Format::Table => rows_to_table(&rows),
            };
            match output {
                Some(path) => std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
        }
    }
    Ok(true)
}

fn load(path: &Path) -> Result<Scenario> {
    corrpoly::scenario::load_scenario(path)
}

fn example_report(scn: &Scenario, rho: Option<f64>, format: Format) -> Result<()> {
    let rows: Vec<ReportRow> = match scn.name.as_str() {
        "climate" => climate_from_scenario(scn)?,
        "insurance" => {
            let r = insurance_from_scenario(scn)?;
            let mut t = Table::key_value();
            t.kv("insurer_price", format_rational(&r.insurer_price));
            t.kv("insuree_price", format_rational(&r.insuree_price));
            t.kv("interval", r.interval.as_ref().map(pair).unwrap_or_else(|| "empty".into()));
            t.kv("verdict", r.verdict);
            t.kv("profit", r.profit.as_ref().map(format_rational).unwrap_or_default());
            print!("{}", t.render(format)?);
            insurance_rows(&r)
        }
        "finance" => {
            let a = scn.param("a")?.clone();
            let rho = rho.or(match scn.utility {
                RiskUtility::Crra { rho, .. } => Some(rho),
                RiskUtility::Identity => None,
            });
            let r = run_finance(&a, rho)?;
            let mut t = Table::key_value();
            t.kv("a", format_rational(&r.a));
            t.kv("averaged", join_rationals(&r.averaged));
            t.kv("expected_return", format_rational(&r.expected_return));
            if let Some(c) = &r.crra {
                t.kv("rho", c.rho);
                t.kv("eu_buy", fmt_f64(c.eu_buy));
                t.kv("eu_hold", fmt_f64(c.eu_hold));
                t.kv("buy", c.buy);
                t.kv("threshold", c.threshold_formula.map(fmt_f64).unwrap_or_else(|| "none".into()));
            }
            print!("{}", t.render(format)?);
            finance_rows(&r)
        }
        other => {
            return Err(Error::Precondition(format!(
                "no report for scenario `{other}`; reports exist for climate, insurance and finance"
            )))
        }
    };
    if format == Format::Table && scn.name != "climate" {
        println!();
    }
    print!(
        "{}",
        match format {
            Format::Csv => rows_to_csv(&rows)?,
            Format::Table => rows_to_table(&rows),
        }
    );
    Ok(())
}

/// Named belief, else the prior if it is a singleton, else the first listed belief.
fn pick_belief(scn: &Scenario, name: Option<&str>) -> Result<Option<JointDistribution>> {
    if let Some(n) = name {
        return Ok(Some(scn.belief(n)?.clone()));
    }
    if scn.prior.len() == 1 {
        return Ok(Some(scn.prior.vertices()[0].clone()));
    }
    Ok(scn.beliefs.first().map(|(_, p)| p.clone()))
}

/// Recovers the events on each `Ω_I` whose cylinders are the given full-space events.
fn cylinder_bases(scn: &Scenario, coll: &Collection, events: &[Event]) -> Result<Vec<Event>> {
    if events.len() != coll.len() {
        return Err(Error::DimensionMismatch {
            expected: coll.len(),
            actual: events.len(),
        });
    }
    coll.members()
        .iter()
        .zip(events)
        .map(|(set, e)| {
            let sub = scn.space.subspace(set)?;
            let base = Event::from_flat(
                sub.clone(),
                e.members().iter().map(|&k| scn.space.project_flat(k, set, &sub)).collect::<Vec<_>>(),
            )?;
            if embed_cylinder(&base, set, &scn.space)? != *e {
                return Err(Error::Precondition(format!("event {} is not a cylinder on {set}", event_text(e))));
            }
            Ok(base)
        })
        .collect()
}

const MAX_TUPLES: usize = 256;

/// All tuples of single states `(ω_I)`, one per collection member.
fn singleton_tuples(scn: &Scenario, coll: &Collection) -> Result<Vec<(String, Vec<Event>)>> {
    let subs = coll.members().iter().map(|m| scn.space.subspace(m)).collect::<Result<Vec<_>>>()?;
    let count: usize = subs.iter().map(|s| s.total_size()).product();
    if count > MAX_TUPLES {
        return Err(Error::Precondition(format!("{count} state tuples; pass --event to pick one")));
    }
    let mut out = Vec::new();
    for k in 0..count {
        let mut rest = k;
        let mut idx = vec![0; subs.len()];
        for (j, s) in subs.iter().enumerate().rev() {
            idx[j] = rest % s.total_size();
            rest /= s.total_size();
        }
        let evs = subs
            .iter()
            .zip(&idx)
            .map(|(s, &i)| Event::from_flat(s.clone(), [i]))
            .collect::<Result<Vec<_>>>()?;
        let label = subs.iter().zip(&idx).map(|(s, &i)| s.state_name(i)).collect::<Vec<_>>().join(" x ");
        out.push((label, evs));
    }
    Ok(out)
}

/// Labels never contain whitespace, so it is dropped before parsing.
fn parse_event(scn: &Scenario, text: &str) -> Result<Event> {
    scn.parse_event(&text.split_whitespace().collect::<String>())
}

fn revealed_text(o: RevealedOrder) -> &'static str {
    match o {
        RevealedOrder::MorePositive => "a more positive",
        RevealedOrder::MoreNegative => "a more negative",
        RevealedOrder::Equal => "equal",
    }
}

fn sign_text(s: CorrelationSign) -> &'static str {
    match s {
        CorrelationSign::Positive => "positive",
        CorrelationSign::Negative => "negative",
        CorrelationSign::Zero => "zero",
    }
}

fn event_text(e: &Event) -> String {
    let names: Vec<String> = e.members().iter().map(|&k| e.space().state_name(k)).collect();
    format!("{{{}}}", names.join(", "))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn join_rationals(xs: &[Rational]) -> String {
    xs.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}

fn pair((a, b): &(Rational, Rational)) -> String {
    format!("{}, {}", format_rational(a), format_rational(b))
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.12}")
}
