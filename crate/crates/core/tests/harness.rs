use kgspec_core::harness::*;
use kgspec_core::spectral::Family;
use kgspec_core::Domain;

fn run(d: &str, k: usize) -> VerificationReport {
    verify(&d.parse::<Domain>().unwrap(), &VerifyOptions::new(k)).unwrap()
}

#[test]
fn interval_report_passes_and_round_trips() {
    let r = run("interval:2", 20);
    assert!(r.passed(), "{:?}", r.failures());
    assert_eq!(r.table.len(), 20);
    for row in &r.table {
        assert!(row.margin5 > 0.0, "k={}", row.k);
        assert!(row.eq6_bound.is_none() && row.margin6.is_none());
        assert!(row.is_consistent());
    }
    let json = to_json(&r);
    let back: VerificationReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
}

#[test]
fn square_report_and_csv_agree() {
    let r = run("box:1x1", 6);
    assert!(r.passed(), "{:?}", r.failures());
    for row in &r.table {
        assert!(row.margin5 > 0.0 && row.margin6.unwrap() > 0.0, "k={}", row.k);
    }
    let csv = r.table_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    for (line, row) in lines.zip(&r.table) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 7);
        assert_eq!(cols[0].parse::<usize>().unwrap(), row.k);
        assert_eq!(cols[1].parse::<f64>().unwrap(), row.sum_beta);
        assert_eq!(cols[2].parse::<f64>().unwrap(), row.eq5_bound);
        assert_eq!(cols[3].parse::<f64>().unwrap(), row.eq6_bound.unwrap());
        assert_eq!(cols[4].parse::<f64>().unwrap(), row.margin5);
        assert_eq!(cols[5].parse::<f64>().unwrap(), row.margin6.unwrap());
        assert_eq!(cols[6].parse::<f64>().unwrap(), row.weyl_ratio);
    }
    for name in ["normalization", "sum_identity", "bessel", "gradient", "slope", "phi0", "h_monotone", "eq6_margins"] {
        let c = &r.checks[name];
        assert!(c.asserted && c.passed, "{name}");
    }
}

#[test]
fn reports_are_deterministic() {
    let a = to_json(&run("interval:1", 4));
    let b = to_json(&run("interval:1", 4));
    assert_eq!(a, b);
}

#[test]
fn single_family_and_invalid_k() {
    let mut opts = VerifyOptions::new(3);
    opts.families = vec![Family::Hat];
    let r = verify(&"interval:2".parse().unwrap(), &opts).unwrap();
    assert!(r.passed());
    assert!(!r.checks.contains_key("cross_family") || !r.checks["cross_family"].asserted);
    assert!(verify(&"interval:2".parse().unwrap(), &VerifyOptions::new(0)).is_err());
    assert!(verify(&"ball:2,1".parse().unwrap(), &VerifyOptions::new(2)).is_err());
}

#[test]
fn margins_match_columns() {
    let spec = kgspec_core::bounds::DomainSpec::of(&"box:1x2".parse().unwrap());
    let row = TableRow::new(spec, 3, 10.0, 4.0);
    assert!(row.is_consistent());
    assert_eq!(row.margin5, 10.0 - row.eq5_bound);
    let mut bad = row.clone();
    bad.margin5 += 1e-9;
    assert!(!bad.is_consistent());
}
