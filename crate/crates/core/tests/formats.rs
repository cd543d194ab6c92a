use nefcert::certify::{certify_effective, verify_certificate, CertifyOptions, EffectivityCertificate};
use nefcert::divisors::{divisor_d, Family};
use nefcert::keel::are_linearly_equivalent;
use nefcert::rational::{int, ratio};
use nefcert::{DegreeProblem, DivisorClass, ProperPartition, StableTree, Weighting};

#[test]
fn class_file_round_trip() {
    let c = divisor_d(&DegreeProblem::new(vec![1, 2, 3, 4, 5], 5).unwrap()).unwrap();
    let text = c.to_json();
    assert!(text.contains("\"psi\""));
    assert_eq!(DivisorClass::from_json(&text).unwrap(), c);
}

#[test]
fn class_file_literal() {
    let text = r#"{"n": 5, "psi": ["1/1", "0/1", "0/1", "0/1", "0/1"],
                   "boundary": [{"block": [1, 2], "coeff": "-1/2"}]}"#;
    let c = DivisorClass::from_json(text).unwrap();
    assert_eq!(c.psi(1), &int(1));
    assert_eq!(c.b(&ProperPartition::new(&[1, 2], 5).unwrap()), ratio(-1, 2));
    assert!(DivisorClass::from_json(r#"{"n": 5, "psi": ["1/0"], "boundary": []}"#).is_err());
}

#[test]
fn weighting_and_tree_files() {
    let mut w = Weighting::zero(4);
    w.set(1, 3, ratio(3, 2)).unwrap();
    let back = Weighting::from_json(&w.to_json()).unwrap();
    assert_eq!(back, w);
    assert!(Weighting::from_json(r#"{"n": 4, "edges": [{"edge": [3, 1], "value": "1/1"}]}"#).is_err());

    let t = StableTree::from_blocks(&[vec![1, 2], vec![5, 6]], 6).unwrap();
    assert_eq!(StableTree::from_json(&t.to_json()).unwrap(), t);
    assert!(StableTree::from_json(r#"{"n": 6, "nodes": [[1, 2], [2, 3]]}"#).is_err());
}

#[test]
fn certificate_rationals_are_lowest_terms() {
    let p = DegreeProblem::new(vec![1; 6], 3).unwrap();
    let cert = certify_effective(&p, Family::E, &CertifyOptions::default()).unwrap();
    let text = cert.to_json();
    assert!(text.contains("\"2/5\""));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for e in v["weights"].as_array().unwrap() {
        let s = e["value"].as_str().unwrap();
        let (num, den) = s.split_once('/').unwrap();
        let (num, den): (i64, i64) = (num.parse().unwrap(), den.parse().unwrap());
        assert!(den > 0);
        let g = (1..=den).rev().find(|g| num % g == 0 && den % g == 0).unwrap();
        assert_eq!(g, 1, "{s}");
    }
    assert_eq!(v["family"], "E");
    assert_eq!(v["claims"], serde_json::json!(["P1", "P2", "P3"]));
}

#[test]
fn verification_spot_checks_soundness() {
    for (d, m, family) in [
        (vec![1, 1, 1, 1, 2], 3, Family::D),
        (vec![2, 3, 4, 5, 6], 5, Family::D),
        (vec![1, 1, 2, 2, 3, 3], 4, Family::E),
        (vec![1, 2, 3, 4, 5, 6, 3], 8, Family::E),
    ] {
        let p = DegreeProblem::new(d, m).unwrap();
        let cert = certify_effective(&p, family, &CertifyOptions::default()).unwrap();
        assert!(verify_certificate(&cert).accepted());
        let class = nefcert::divisors::family_class(family, &p).unwrap();
        let effective = DivisorClass::from_boundary_coeffs(p.n(), cert.boundary_coefficients.iter()).unwrap();
        assert!(are_linearly_equivalent(&class, &effective).unwrap().equivalent);
    }
}

#[test]
fn malformed_certificates() {
    let p = DegreeProblem::new(vec![1, 1, 1, 1, 2], 3).unwrap();
    let text = certify_effective(&p, Family::D, &CertifyOptions::default())
        .unwrap()
        .to_json();
    for (from, to) in [
        ("\"n\": 5", "\"n\": 6"),
        ("\"m\": 3", "\"m\": 4"),
        ("\"family\": \"D\"", "\"family\": \"Q\""),
    ] {
        assert!(
            EffectivityCertificate::from_json(&text.replacen(from, to, 1)).is_err(),
            "{to}"
        );
    }
    let extra = text.replacen('{', "{\"bogus\": 1,", 1);
    assert!(EffectivityCertificate::from_json(&extra).is_err());
}
