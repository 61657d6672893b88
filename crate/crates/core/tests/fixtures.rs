use std::path::PathBuf;

use corrpoly::rational::{int, ratio};
use corrpoly::scenario::{load_scenario, Document};
use corrpoly::scenarios::{
    climate_from_scenario, evaluate, finance_from_scenario, finance_model, insurance_from_scenario,
    rows_to_csv, sweep_document, InsuranceVerdict, Value,
};
use corrpoly::Error;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

#[test]
fn fixtures_round_trip_byte_identical() {
    for name in ["climate.scn", "insurance.scn", "finance.scn"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let doc = Document::parse(&text).unwrap();
        assert_eq!(doc.serialize(), text, "{name}");
    }
}

#[test]
fn climate_fixture() {
    let scn = load_scenario(fixture("climate.scn")).unwrap();
    assert_eq!(scn.space.sizes(), &[2, 2]);
    assert_eq!(scn.act("bau").unwrap().values(), &[int(-10), int(-10), int(0), int(0)]);
    assert_eq!(scn.act("engineering").unwrap().values(), &[int(-7), int(-1), int(-1), int(-1)]);
    assert_eq!(scn.event("rescued").unwrap().len(), 1);
    let rows = climate_from_scenario(&scn).unwrap();
    let generic = evaluate(&scn).unwrap();
    assert_eq!(rows, generic);
    // -c' - x * max p(Hcs, Ha) with max = 1/3
    assert_eq!(rows[2].value, Value::Exact(int(-3)));
}

#[test]
fn climate_sweep_is_monotone() {
    let doc = Document::read(fixture("climate.scn")).unwrap();
    let rows = sweep_document(&doc).unwrap();
    let ce: Vec<_> = rows
        .iter()
        .filter(|r| r.act == "engineering")
        .map(|r| r.value.exact().unwrap().clone())
        .collect();
    assert_eq!(ce.len(), 5);
    assert!(ce.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(ce[0], int(-2));
}

#[test]
fn insurance_fixture() {
    let scn = load_scenario(fixture("insurance.scn")).unwrap();
    let r = insurance_from_scenario(&scn).unwrap();
    assert_eq!(r.insurer_price, int(8));
    assert_eq!(r.insuree_price, int(9));
    assert_eq!(r.verdict, InsuranceVerdict::PositiveProfit);
    assert_eq!(r.profit, Some(int(1)));
}

#[test]
fn finance_fixture_matches_model() {
    let scn = load_scenario(fixture("finance.scn")).unwrap();
    let (space, gold, belief) = finance_model(&ratio(1, 4)).unwrap();
    assert!(scn.space.same_shape(&space));
    assert_eq!(scn.act("gold").unwrap(), &gold);
    assert_eq!(scn.prior.vertices(), &[belief]);
    let r = finance_from_scenario(&scn).unwrap();
    assert_eq!(r.expected_return, ratio(1, 4));
    let csv = rows_to_csv(&sweep_document(&Document::read(fixture("finance.scn")).unwrap()).unwrap()).unwrap();
    assert!(csv.starts_with("param,act,value_rational,value_decimal,argmin_vertex\n0,gold,-1/2,-0.5,v1\n"));
}

#[test]
fn malformed_files_report_positions() {
    let text = std::fs::read_to_string(fixture("finance.scn")).unwrap();
    let bad = text.replace("1/3 2/3", "1/3 2//3");
    match Document::parse(&bad) {
        Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (9, 20)),
        other => panic!("{other:?}"),
    }
}
