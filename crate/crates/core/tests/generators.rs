mod common;

use abdkit::dispatch::verify;
use abdkit::oracle::oracle_abduce;
use abdkit::reductions::{gen_indset_eq, gen_vertexcover_le, Graph};
use abdkit::Variant;
use common::{graphs_up_to_iso, random_instance, rng, Region, Shape};

#[test]
fn isomorphism_classes_match_the_known_counts() {
    let counts: Vec<usize> = (0..=6).map(|n| graphs_up_to_iso(n).len()).collect();
    assert_eq!(counts, [1, 1, 2, 4, 11, 34, 156]);
}

#[test]
fn triangle_with_a_tail() {
    let g = Graph::parse_edges("a-b,b-c,c-a,c-d").unwrap();
    assert!(g.has_independent_set(2) && !g.has_independent_set(3));
    assert!(g.has_vertex_cover(2) && !g.has_vertex_cover(1));
    for k in 0..=4 {
        let ind = gen_indset_eq(&g, k).unwrap();
        assert_eq!(oracle_abduce(&ind, Variant::Exact).unwrap().is_some(), g.has_independent_set(k), "k={k}");
        let vc = gen_vertexcover_le(&g, k).unwrap();
        assert_eq!(oracle_abduce(&vc, Variant::AtMost).unwrap().is_some(), g.has_vertex_cover(k), "k={k}");
    }
}

#[test]
fn edgeless_graph_needs_no_cover() {
    let g = Graph::parse_edges("").unwrap();
    let vc = gen_vertexcover_le(&g, 0).unwrap();
    assert!(oracle_abduce(&vc, Variant::AtMost).unwrap().is_some());
}

#[test]
fn every_applicable_engine_agrees() {
    let mut r = rng(77);
    for region in [Region::EssPositive, Region::EssNegative, Region::DualHorn, Region::Affine2, Region::Is10] {
        for _ in 0..40 {
            let inst = random_instance(&mut r, region, Shape::default());
            for v in [Variant::Plain, Variant::AtMost, Variant::Exact] {
                let report = verify(&inst, v).unwrap();
                assert!(report.all_agree, "{region:?} {v:?}: {report:?}");
            }
        }
    }
}
