//! The worked examples (climate policy, insurance, gold finance), report rows and sweeps.

use num_traits::{One, Signed};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::preferences::{
    check_subspace_consistency, expected_utility, meu_value, meu_value_with, PriorSet, RiskUtility,
    SubspacePreference,
};
use crate::rational::{format_decimal, format_rational, int, ratio, to_f64, Rational};
use crate::scenario::{Document, Scenario};
use crate::space::{independent_product, Act, JointDistribution, Marginal, ProductSpace};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    /// Produced under a non-linear risk utility.
    Approx(f64),
}

impl Value {
    pub fn as_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => to_f64(r),
            Value::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Approx(_) => None,
        }
    }

    /// Empty for approximate values.
    pub fn rational_text(&self) -> String {
        self.exact().map(format_rational).unwrap_or_default()
    }

    pub fn decimal_text(&self) -> String {
        match self {
            Value::Exact(r) => format_decimal(r),
            Value::Approx(x) => match Rational::from_float(*x) {
                Some(r) => format_decimal(&r),
                None => x.to_string(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub param: Option<Rational>,
    pub act: String,
    pub value: Value,
    pub argmin_vertex: Option<String>,
}

pub const CSV_HEADER: [&str; 5] = ["param", "act", "value_rational", "value_decimal", "argmin_vertex"];

fn row_fields(r: &ReportRow) -> [String; 5] {
    [
        r.param.as_ref().map(format_rational).unwrap_or_default(),
        r.act.clone(),
        r.value.rational_text(),
        r.value.decimal_text(),
        r.argmin_vertex.clone().unwrap_or_default(),
    ]
}

pub fn rows_to_csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record(row_fields(r)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Space-aligned rendering of the same columns.
pub fn rows_to_table(rows: &[ReportRow]) -> String {
    let mut cells: Vec<[String; 5]> = vec![CSV_HEADER.map(String::from)];
    cells.extend(rows.iter().map(row_fields));
    let widths: Vec<usize> = (0..5).map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in &cells {
        let line: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn vertex_id(names: Option<&[String]>, k: usize) -> String {
    names
        .and_then(|n| n.get(k).cloned())
        .unwrap_or_else(|| format!("v{}", k + 1))
}

/// MEU of every act of the scenario under its prior set and utility.
pub fn evaluate(scn: &Scenario) -> Result<Vec<ReportRow>> {
    scn.acts
        .iter()
        .map(|(name, f)| {
            let (value, k) = match scn.utility {
                RiskUtility::Identity => {
                    let (v, k) = meu_value(&scn.prior, f)?;
                    (Value::Exact(v), k)
                }
                _ => {
                    let (v, k) = meu_value_with(&scn.prior, f, &scn.utility)?;
                    (Value::Approx(v), k)
                }
            };
            Ok(ReportRow {
                param: None,
                act: name.clone(),
                value,
                argmin_vertex: Some(vertex_id(Some(&scn.vertex_names), k)),
            })
        })
        .collect()
}

/// Evaluates the document at every grid value of `param`; rows come out in grid order.
pub fn sweep(doc: &Document, param: &str, grid: &[Rational]) -> Result<Vec<ReportRow>> {
    if !doc.params.iter().any(|(k, _)| k == param) {
        return Err(Error::Scenario(format!("unbound parameter `{param}`")));
    }
    let per_point: Vec<Result<Vec<ReportRow>>> = grid
        .par_iter()
        .map(|v| {
            let scn = doc.instantiate_with(&[(param.to_string(), v.clone())])?;
            let mut rows = evaluate(&scn)?;
            for r in &mut rows {
                r.param = Some(v.clone());
            }
            Ok(rows)
        })
        .collect();
    let mut out = Vec::new();
    for rows in per_point {
        out.extend(rows?);
    }
    Ok(out)
}

/// Runs the document's own SWEEP section.
pub fn sweep_document(doc: &Document) -> Result<Vec<ReportRow>> {
    let scn = doc.instantiate()?;
    let spec = scn
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Scenario("scenario has no SWEEP section".into()))?;
    sweep(doc, &spec.param, &spec.grid())
}

fn require_2x2(space: &ProductSpace, what: &str) -> Result<()> {
    if space.sizes() != [2, 2] {
        return Err(Error::InvalidSpace(format!("{what} needs a 2x2 space, got {space}")));
    }
    Ok(())
}

fn consistent_marginals(prior: &PriorSet) -> Result<Vec<Marginal>> {
    let marginals = prior.vertices()[0].marginals();
    let subs: Vec<SubspacePreference> = marginals.iter().cloned().map(SubspacePreference::new).collect();
    let report = check_subspace_consistency(prior, &subs)?;
    if !report.holds {
        return Err(Error::Precondition(
            "prior set vertices do not share one set of marginals".into(),
        ));
    }
    Ok(marginals)
}

// ---------------------------------------------------------------------------
// climate policy

/// Damage `d`, mitigation cost `c`, damage under mitigation `d_c`, engineering cost
/// `c_prime` and engineering failure loss `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClimateParams {
    pub d: Rational,
    pub c: Rational,
    pub d_c: Rational,
    pub c_prime: Rational,
    pub x: Rational,
}

/// Business as usual, mitigation and climate engineering on (sensitivity × effectiveness).
pub fn climate_acts(space: &ProductSpace, p: &ClimateParams) -> Result<[Act; 3]> {
    require_2x2(space, "climate acts")?;
    let bau = Act::new(space.clone(), vec![-p.d.clone(), -p.d.clone(), int(0), int(0)])?;
    let mc = -(&p.d_c + &p.c);
    let mitigation = Act::new(space.clone(), vec![mc.clone(), mc, -p.c.clone(), -p.c.clone()])?;
    let cp = -p.c_prime.clone();
    let engineering = Act::new(space.clone(), vec![&cp - &p.x, cp.clone(), cp.clone(), cp])?;
    Ok([bau, mitigation, engineering])
}

pub const CLIMATE_ACTS: [&str; 3] = ["bau", "mitigation", "engineering"];

/// MEU values of the three climate strategies, each checked against its closed form.
pub fn run_climate(params: &ClimateParams, prior: &PriorSet) -> Result<Vec<ReportRow>> {
    let space = prior.space().clone();
    require_2x2(&space, "climate example")?;
    let marginals = consistent_marginals(prior)?;
    let p1_hot = marginals[0].weights()[0].clone();

    // the extra loss falls on (Hcs, Ha), so the worst case maximizes its weight
    let max_joint = prior
        .vertices()
        .iter()
        .map(|p| p.weights()[0].clone())
        .max()
        .expect("non-empty prior");
    let closed = [
        -(&p1_hot * &params.d),
        -(&params.c + &p1_hot * &params.d_c),
        -(&params.c_prime + &params.x * max_joint),
    ];

    let acts = climate_acts(&space, params)?;
    let mut rows = Vec::new();
    for ((name, act), expected) in CLIMATE_ACTS.iter().zip(&acts).zip(closed) {
        let (v, k) = meu_value(prior, act)?;
        if v != expected {
            return Err(Error::Internal(format!(
                "{name}: MEU {} differs from closed form {}",
                format_rational(&v),
                format_rational(&expected)
            )));
        }
        rows.push(ReportRow {
            param: None,
            act: name.to_string(),
            value: Value::Exact(v),
            argmin_vertex: Some(vertex_id(None, k)),
        });
    }
    Ok(rows)
}

/// Reads `D`, `c`, `dc`, `cp` and `x` from the scenario and runs the climate example.
pub fn climate_from_scenario(scn: &Scenario) -> Result<Vec<ReportRow>> {
    let params = ClimateParams {
        d: scn.param("D")?.clone(),
        c: scn.param("c")?.clone(),
        d_c: scn.param("dc")?.clone(),
        c_prime: scn.param("cp")?.clone(),
        x: scn.param("x")?.clone(),
    };
    let mut rows = run_climate(&params, &scn.prior)?;
    for r in &mut rows {
        if let Some(id) = &r.argmin_vertex {
            let k: usize = id[1..].parse().expect("generated id");
            r.argmin_vertex = Some(vertex_id(Some(&scn.vertex_names), k - 1));
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// insurance

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsuranceVerdict {
    /// Both sides share the same price.
    UniquePrice,
    /// The insuree pays more than the insurer needs.
    PositiveProfit,
    /// The insurer's minimum price exceeds what the insuree accepts.
    MarketFailure,
}

impl std::fmt::Display for InsuranceVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InsuranceVerdict::UniquePrice => "unique price",
            InsuranceVerdict::PositiveProfit => "positive-profit trade",
            InsuranceVerdict::MarketFailure => "market failure",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsuranceReport {
    /// Lowest premium the insurer accepts.
    pub insurer_price: Rational,
    /// Highest premium the insuree accepts.
    pub insuree_price: Rational,
    pub interval: Option<(Rational, Rational)>,
    pub verdict: InsuranceVerdict,
    /// Insurer's expected profit when selling at the insuree's price; `None` without trade.
    pub profit: Option<Rational>,
}

/// Acts `(insurer no insurance, insurer insures, insuree no insurance, insuree insures)`
/// at premium `c` on (fire B/NB × flood F/NF).
pub fn insurance_acts(space: &ProductSpace, v: &Rational, x: &Rational, c: &Rational) -> Result<[Act; 4]> {
    require_2x2(space, "insurance acts")?;
    let s = space.clone();
    let zero = int(0);
    Ok([
        Act::constant(s.clone(), zero.clone()),
        Act::new(s.clone(), vec![c - x * v, c - v, c.clone(), c.clone()])?,
        Act::new(s.clone(), vec![-v.clone(), -v.clone(), -v.clone(), zero])?,
        Act::new(
            s,
            vec![-(Rational::one() - x) * v - c, -c.clone(), -v - c, -c.clone()],
        )?,
    ])
}

/// Reservation prices, trade interval and verdict for insurer belief `p` and insuree belief `p_hat`.
pub fn run_insurance(
    v: &Rational,
    x: &Rational,
    p: &JointDistribution,
    p_hat: &JointDistribution,
) -> Result<InsuranceReport> {
    require_2x2(p.space(), "insurance example")?;
    if !p.space().same_shape(p_hat.space()) {
        return Err(Error::InvalidSpace(format!("{} vs {}", p.space(), p_hat.space())));
    }
    if !v.is_positive() {
        return Err(Error::Precondition("insured value v must be positive".into()));
    }
    if x.is_negative() || *x >= Rational::one() {
        return Err(Error::Precondition("insured fraction x must lie in [0, 1)".into()));
    }
    if p.marginals() != p_hat.marginals() {
        return Err(Error::MarginalMismatch(
            "insurer and insuree beliefs have different marginals".into(),
        ));
    }
    let (bf, bnf) = (0, 1);
    let reservation = |q: &JointDistribution| {
        let pb = &q.weights()[bf] + &q.weights()[bnf];
        v * (x * pb + (Rational::one() - x) * &q.weights()[bnf])
    };
    let insurer_price = reservation(p);
    let insuree_price = reservation(p_hat);

    // both sides must be indifferent at their own reservation price
    let space = p.space();
    let [insurer_none, insurer_ins, _, _] = insurance_acts(space, v, x, &insurer_price)?;
    let [_, _, insuree_none, insuree_ins] = insurance_acts(space, v, x, &insuree_price)?;
    if insurer_ins.expectation(p) != insurer_none.expectation(p)
        || insuree_ins.expectation(p_hat) != insuree_none.expectation(p_hat)
    {
        return Err(Error::Internal("reservation prices do not make the parties indifferent".into()));
    }

    let verdict = match p.weights()[bf].cmp(&p_hat.weights()[bf]) {
        std::cmp::Ordering::Equal => InsuranceVerdict::UniquePrice,
        std::cmp::Ordering::Greater => InsuranceVerdict::PositiveProfit,
        std::cmp::Ordering::Less => InsuranceVerdict::MarketFailure,
    };
    let ordered = insurer_price <= insuree_price;
    if ordered == (verdict == InsuranceVerdict::MarketFailure) {
        return Err(Error::Internal("price ordering disagrees with the joint-probability verdict".into()));
    }

    let (interval, profit) = if ordered {
        let profit = insurer_ins_at(space, v, x, &insuree_price)?.expectation(p);
        let closed = v * (Rational::one() - x) * (&p_hat.weights()[bnf] - &p.weights()[bnf]);
        if profit != closed {
            return Err(Error::Internal("insurer profit differs from its closed form".into()));
        }
        (Some((insurer_price.clone(), insuree_price.clone())), Some(profit))
    } else {
        (None, None)
    };
    Ok(InsuranceReport {
        insurer_price,
        insuree_price,
        interval,
        verdict,
        profit,
    })
}

fn insurer_ins_at(space: &ProductSpace, v: &Rational, x: &Rational, c: &Rational) -> Result<Act> {
    let [_, ins, _, _] = insurance_acts(space, v, x, c)?;
    Ok(ins)
}

/// Reads `v`, `x` and the beliefs `insurer` and `insuree` from the scenario.
pub fn insurance_from_scenario(scn: &Scenario) -> Result<InsuranceReport> {
    run_insurance(
        scn.param("v")?,
        scn.param("x")?,
        scn.belief("insurer")?,
        scn.belief("insuree")?,
    )
}

pub fn insurance_rows(report: &InsuranceReport) -> Vec<ReportRow> {
    let row = |act: &str, v: &Rational| ReportRow {
        param: None,
        act: act.to_string(),
        value: Value::Exact(v.clone()),
        argmin_vertex: None,
    };
    let mut rows = vec![
        row("insurer_price", &report.insurer_price),
        row("insuree_price", &report.insuree_price),
    ];
    if let Some(p) = &report.profit {
        rows.push(row("insurer_profit", p));
    }
    rows
}

// ---------------------------------------------------------------------------
// gold finance

/// Marginals of inflation (high), uncertainty (high) and a gold deposit find.
pub fn finance_marginals() -> [Rational; 3] {
    [ratio(1, 3), ratio(1, 2), ratio(1, 4)]
}

/// (space, gold act, belief) for correlation parameter `a`.
pub fn finance_model(a: &Rational) -> Result<(ProductSpace, Act, JointDistribution)> {
    if a.is_negative() || *a > ratio(1, 3) {
        return Err(Error::Precondition(format!("a = {} must lie in [0, 1/3]", format_rational(a))));
    }
    let label = |l: &[&str]| l.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let space = ProductSpace::with_labels(vec![label(&["H", "L"]), label(&["H", "L"]), label(&["G", "NG"])])?;
    let gold = Act::new(
        space.clone(),
        [3, 7, -9, 3, -6, 2, -12, 0].into_iter().map(int).collect(),
    )?;
    let block = [a.clone(), ratio(1, 3) - a, ratio(1, 2) - a, ratio(1, 6) + a];
    let p3 = finance_marginals()[2].clone();
    let dep = [p3.clone(), Rational::one() - p3];
    let w = (0..8).map(|k| &block[k / 2] * &dep[k % 2]).collect();
    let belief = JointDistribution::new(space.clone(), w)?;
    Ok((space, gold, belief))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrraVerdict {
    pub rho: f64,
    pub eu_buy: f64,
    pub eu_hold: f64,
    pub buy: bool,
    /// `1 + log2(6a / (1 + 6a))`; `None` at `a = 0` where no `ρ` buys.
    pub threshold_formula: Option<f64>,
    /// Root of `EU(buy) - EU(hold)` in `ρ` found by bisection.
    pub threshold_direct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FinanceReport {
    pub a: Rational,
    /// Gold return averaged over the deposit, on (inflation × uncertainty) row-major.
    pub averaged: Vec<Rational>,
    pub expected_return: Rational,
    pub crra: Option<CrraVerdict>,
}

pub const FINANCE_WEALTH: f64 = 6.0;

fn finance_utility(rho: f64) -> RiskUtility {
    RiskUtility::Crra {
        rho,
        scale: FINANCE_WEALTH,
        base: FINANCE_WEALTH,
    }
}

pub fn run_finance(a: &Rational, rho: Option<f64>) -> Result<FinanceReport> {
    let (space, gold, belief) = finance_model(a)?;
    let p3 = &finance_marginals()[2];
    let averaged: Vec<Rational> = (0..4)
        .map(|cell| p3 * &gold.values()[2 * cell] + (Rational::one() - p3) * &gold.values()[2 * cell + 1])
        .collect();
    let expected_return = gold.expectation(&belief);
    if expected_return != int(3) * a - ratio(1, 2) {
        return Err(Error::Internal("expected gold return differs from 3a - 1/2".into()));
    }

    let block_space = ProductSpace::new(vec![2, 2])?;
    let block = JointDistribution::new(
        block_space.clone(),
        (0..4).map(|c| &belief.weights()[2 * c] + &belief.weights()[2 * c + 1]).collect(),
    )?;
    let averaged_act = Act::new(block_space, averaged.clone())?;
    let hold = Act::constant(averaged_act.space().clone(), int(0));
    let gap = |rho: f64| -> Result<f64> {
        let u = finance_utility(rho);
        Ok(expected_utility(&block, &averaged_act, &u)? - expected_utility(&block, &hold, &u)?)
    };

    let crra = match rho {
        None => None,
        Some(rho) => {
            let u = finance_utility(rho);
            let eu_buy = expected_utility(&block, &averaged_act, &u)?;
            let eu_hold = expected_utility(&block, &hold, &u)?;
            let a_f = to_f64(a);
            let threshold_formula = (a_f > 0.0).then(|| 1.0 + (6.0 * a_f / (1.0 + 6.0 * a_f)).log2());
            Some(CrraVerdict {
                rho,
                eu_buy,
                eu_hold,
                buy: eu_buy >= eu_hold,
                threshold_formula,
                threshold_direct: bisect_threshold(&gap)?,
            })
        }
    };
    let _ = space;
    Ok(FinanceReport {
        a: a.clone(),
        averaged,
        expected_return,
        crra,
    })
}

/// Largest `ρ` with a non-negative gap, assuming the gap is positive below and negative above it.
fn bisect_threshold(gap: &impl Fn(f64) -> Result<f64>) -> Result<Option<f64>> {
    let mut hi = 1.0;
    if gap(hi)? >= 0.0 {
        return Err(Error::Internal("CRRA gap is non-negative at rho = 1".into()));
    }
    let mut lo = -1.0;
    while gap(lo)? <= 0.0 {
        lo *= 2.0;
        if lo < -1e6 {
            return Ok(None);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Reads `a` and (for CRRA utilities) `ρ` from the scenario.
pub fn finance_from_scenario(scn: &Scenario) -> Result<FinanceReport> {
    let rho = match scn.utility {
        RiskUtility::Crra { rho, .. } => Some(rho),
        RiskUtility::Identity => None,
    };
    run_finance(scn.param("a")?, rho)
}

pub fn finance_rows(report: &FinanceReport) -> Vec<ReportRow> {
    let cells = ["avg_HH", "avg_HL", "avg_LH", "avg_LL"];
    let mut rows: Vec<ReportRow> = cells
        .iter()
        .zip(&report.averaged)
        .map(|(name, v)| ReportRow {
            param: Some(report.a.clone()),
            act: name.to_string(),
            value: Value::Exact(v.clone()),
            argmin_vertex: None,
        })
        .collect();
    rows.push(ReportRow {
        param: Some(report.a.clone()),
        act: "expected_return".into(),
        value: Value::Exact(report.expected_return.clone()),
        argmin_vertex: None,
    });
    if let Some(c) = &report.crra {
        rows.push(ReportRow {
            param: Some(report.a.clone()),
            act: "crra_gap".into(),
            value: Value::Approx(c.eu_buy - c.eu_hold),
            argmin_vertex: None,
        });
        if let Some(t) = c.threshold_direct {
            rows.push(ReportRow {
                param: Some(report.a.clone()),
                act: "crra_threshold".into(),
                value: Value::Approx(t),
                argmin_vertex: None,
            });
        }
    }
    rows
}

/// `p_ind` of the marginals carried by `prior`.
pub fn prior_independent_product(prior: &PriorSet) -> Result<JointDistribution> {
    let marginals = consistent_marginals(prior)?;
    independent_product(prior.space(), &marginals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::CorrelationSet;

    fn climate_params() -> ClimateParams {
        ClimateParams {
            d: int(10),
            c: int(3),
            d_c: int(4),
            c_prime: int(1),
            x: int(6),
        }
    }

    fn cs_2x2(p1: Rational, p2: Rational) -> CorrelationSet {
        let s = ProductSpace::new(vec![2, 2]).unwrap();
        let m = [
            Marginal::new(0, vec![p1.clone(), Rational::one() - p1]).unwrap(),
            Marginal::new(1, vec![p2.clone(), Rational::one() - p2]).unwrap(),
        ];
        CorrelationSet::new(&s, &m).unwrap()
    }

    #[test]
    fn climate_values() {
        let cs = cs_2x2(ratio(1, 2), ratio(1, 3));
        let ind = PriorSet::singleton(cs.independent_product().clone());
        let rows = run_climate(&climate_params(), &ind).unwrap();
        assert_eq!(rows[0].value, Value::Exact(int(-5)));
        assert_eq!(rows[1].value, Value::Exact(int(-5)));
        // -1 - 6 * 1/6
        assert_eq!(rows[2].value, Value::Exact(int(-2)));
        let full = PriorSet::from_correlation_set(&cs).unwrap();
        let rows = run_climate(&climate_params(), &full).unwrap();
        // Fréchet upper bound min(1/2, 1/3)
        assert_eq!(rows[2].value, Value::Exact(int(-3)));
    }

    #[test]
    fn climate_rejects_mixed_marginals() {
        let a = cs_2x2(ratio(1, 2), ratio(1, 3)).independent_product().clone();
        let b = cs_2x2(ratio(1, 3), ratio(1, 3)).independent_product().clone();
        let prior = PriorSet::new(&a.space().clone(), vec![a, b]).unwrap();
        assert!(matches!(run_climate(&climate_params(), &prior), Err(Error::Precondition(_))));
    }

    fn belief(bf: Rational) -> JointDistribution {
        // p1(B) = 1/10, p2(F) = 1/5
        let s = ProductSpace::new(vec![2, 2]).unwrap();
        let w = vec![bf.clone(), ratio(1, 10) - &bf, ratio(1, 5) - &bf, ratio(7, 10) + bf];
        JointDistribution::new(s, w).unwrap()
    }

    #[test]
    fn insurance_verdicts() {
        let (v, x) = (int(100), ratio(1, 2));
        let p = belief(ratio(1, 25));
        let same = run_insurance(&v, &x, &p, &p).unwrap();
        assert_eq!(same.verdict, InsuranceVerdict::UniquePrice);
        assert_eq!(same.profit, Some(int(0)));
        assert_eq!(same.insurer_price, same.insuree_price);

        let ind = belief(ratio(1, 50));
        let r = run_insurance(&v, &x, &p, &ind).unwrap();
        assert_eq!(r.verdict, InsuranceVerdict::PositiveProfit);
        assert!(r.profit.unwrap() > int(0));

        let r = run_insurance(&v, &x, &ind, &p).unwrap();
        assert_eq!(r.verdict, InsuranceVerdict::MarketFailure);
        assert_eq!(r.interval, None);

        let other = JointDistribution::new(p.space().clone(), vec![ratio(1, 4); 4]).unwrap();
        assert!(matches!(run_insurance(&v, &x, &p, &other), Err(Error::MarginalMismatch(_))));
    }

    #[test]
    fn finance_values() {
        let r = run_finance(&ratio(1, 6), None).unwrap();
        assert_eq!(r.averaged, vec![int(6), int(0), int(0), int(-3)]);
        assert_eq!(r.expected_return, int(0));
        let r = run_finance(&ratio(1, 4), Some(0.5)).unwrap();
        assert_eq!(r.expected_return, ratio(1, 4));
        let c = r.crra.unwrap();
        assert!(!c.buy);
        let formula = c.threshold_formula.unwrap();
        assert!((formula - 0.2630344058).abs() < 1e-9);
        assert!((formula - c.threshold_direct.unwrap()).abs() < 1e-9);
        assert!(run_finance(&ratio(1, 2), None).is_err());
        assert!(run_finance(&int(0), Some(0.0)).unwrap().crra.unwrap().threshold_direct.is_none());
    }

    #[test]
    fn csv_shapes() {
        assert_eq!(rows_to_csv(&[]).unwrap(), "param,act,value_rational,value_decimal,argmin_vertex\n");
        let row = ReportRow {
            param: Some(ratio(1, 12)),
            act: "gold".into(),
            value: Value::Exact(ratio(-1, 4)),
            argmin_vertex: Some("v1".into()),
        };
        assert_eq!(
            rows_to_csv(&[row]).unwrap(),
            "param,act,value_rational,value_decimal,argmin_vertex\n1/12,gold,-1/4,-0.25,v1\n"
        );
    }
}
