use hft::examples::{fixture, frobenius_truncated_poly, point_algebra, spec_json, tensor_product, GOOD_FIXTURES, NEGATIVE_FIXTURES};
use hft::superalgebra::{check_axioms, load_algebra, AlgebraSpec};

#[test]
fn good_fixtures_pass() {
    for name in GOOD_FIXTURES {
        let rep = check_axioms(&fixture(name).unwrap());
        assert!(rep.passed(), "{name}: {:?}", rep.failed());
    }
}

#[test]
fn each_negative_fails_only_its_check() {
    for (name, check) in NEGATIVE_FIXTURES {
        let rep = check_axioms(&fixture(name).unwrap());
        assert_eq!(rep.failed(), vec![check], "{name}");
        assert!(rep.get(check).unwrap().witness.is_some());
    }
}

#[test]
fn spec_round_trip() {
    for name in GOOD_FIXTURES {
        let alg = fixture(name).unwrap();
        let spec: AlgebraSpec = serde_json::from_str(&spec_json(&alg)).unwrap();
        let back = load_algebra(&spec).unwrap();
        assert_eq!(spec_json(&back), spec_json(&alg));
    }
}

#[test]
fn tensor_with_the_point_is_harmless() {
    let f = frobenius_truncated_poly(3).unwrap();
    let t = tensor_product(&f, &point_algebra()).unwrap();
    assert_eq!(t.dim(), 3);
    assert!(check_axioms(&t).passed());
}
