use freeproj::complex::{build_bipartite, ComplexSpec};
use freeproj::groups::{
    aut_transfer, bfs_closure, cayley_graph, kernel_check, psi_report, sample_invertible,
    standard_connection_set, standard_generators, swapped_psi_pairs, verify_exceptional_psi,
    verify_not_bn_pair, Verdict, DEFAULT_CLOSURE_CAP,
};
use freeproj::rigidity::{is_isomorphic, CanonOptions};
use freeproj::{Flavor, RingSpec};

#[test]
fn psi_is_an_isomorphism() {
    let rep = verify_exceptional_psi();
    assert!(rep.passed(), "{}", serde_json::to_string(&rep).unwrap());
    assert_eq!(rep.witness["bijection_size"], 86016);
}

#[test]
fn swapped_psi_targets_fail() {
    let rep = psi_report(&swapped_psi_pairs(), "swapped");
    assert_eq!(
        rep.verdict,
        Verdict::Fail,
        "{}",
        serde_json::to_string(&rep).unwrap()
    );
}

#[test]
fn not_bn_pair_both_flavors() {
    for s in [
        RingSpec::zmod(2, 2).unwrap(),
        RingSpec::tpoly(2, 2).unwrap(),
    ] {
        let rep = verify_not_bn_pair(s, 512);
        assert!(rep.passed(), "{}", serde_json::to_string(&rep).unwrap());
        assert_eq!(rep.witness["in_bwb"], false);
        assert_eq!(rep.witness["borel_size"], 512);
    }
    let rep = verify_not_bn_pair(RingSpec::zmod(2, 2).unwrap(), 512);
    assert_eq!(rep.witness["entry_2_1"], "2");
}

#[test]
fn cayley_graphs_realize_line_plane_graphs() {
    let mut cayley = vec![];
    for (f, s) in [
        (Flavor::IntegerMod, RingSpec::zmod(2, 2).unwrap()),
        (Flavor::TruncatedPoly, RingSpec::tpoly(2, 2).unwrap()),
    ] {
        let c = cayley_graph(&standard_connection_set(f)).unwrap();
        let x = build_bipartite(&ComplexSpec::new(s, 3).unwrap(), 1, 2).unwrap();
        let map = is_isomorphic(&c, &x.graph().uncolored())
            .unwrap()
            .expect("isomorphic");
        assert!(c.is_isomorphism_to(&x.graph().uncolored(), &map));
        cayley.push(c);
    }
    assert!(is_isomorphic(&cayley[0], &cayley[1]).unwrap().is_none());
}

#[test]
fn kernel_sampled_gl3() {
    let spec = ComplexSpec::new(RingSpec::zmod(2, 2).unwrap(), 3).unwrap();
    let ring = spec.ring();
    let mut sample = sample_invertible(ring, 3, 300, 5);
    // make sure both scalars are present
    sample.push(freeproj::Matrix::identity(ring, 3));
    sample.push(freeproj::Matrix::from_rows(
        3,
        &[[3u32, 0, 0], [0, 3, 0], [0, 0, 3]],
    ));
    let k = kernel_check(&spec, &sample);
    assert_eq!(k.mismatches, 0);
    assert!(k.scalars >= 2);
}

#[test]
fn kernel_exhaustive_gl3() {
    let spec = ComplexSpec::new(RingSpec::zmod(2, 2).unwrap(), 3).unwrap();
    let g = bfs_closure(
        spec.ring(),
        &standard_generators(spec.ring(), 3),
        DEFAULT_CLOSURE_CAP,
    )
    .unwrap();
    let k = kernel_check(&spec, &g.elements);
    assert_eq!(
        (k.checked, k.scalars, k.trivial_on_lines, k.mismatches),
        (86016, 2, 2, 0)
    );
}

#[test]
fn closure_gl3_z4() {
    let ring = freeproj::Ring::new(RingSpec::zmod(2, 2).unwrap());
    let g = bfs_closure(&ring, &standard_generators(&ring, 3), DEFAULT_CLOSURE_CAP).unwrap();
    assert_eq!(g.order(), 86016);
}

#[test]
fn automorphism_transfer_d3() {
    for s in [
        RingSpec::zmod(2, 2).unwrap(),
        RingSpec::tpoly(2, 2).unwrap(),
    ] {
        let spec = ComplexSpec::new(s, 3).unwrap();
        let rep = aut_transfer(&spec, 1, 2, CanonOptions::default()).unwrap();
        assert!(rep.agrees(), "{rep:?}");
        assert_eq!(rep.generated_order, 86016);
        assert_eq!(
            rep.pgl_formula_matching,
            vec!["center_quotient".to_string()]
        );
    }
}

mod invariants {
    use super::*;
    use freeproj::groups::{semilinear_map, verify_graph_automorphism, SemilinearAut};
    use freeproj::{Ring, RingAut};
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn induced_maps_are_automorphisms_and_compose(seed in any::<u64>(), twist in 1u32..3) {
            let s = RingSpec::tpoly(3, 2).unwrap();
            let ring = Ring::new(s);
            let g = build_bipartite(&ComplexSpec::new(s, 3).unwrap(), 1, 2).unwrap();
            let ms = sample_invertible(&ring, 3, 2, seed);
            // t -> twist * t
            let tau = RingAut::substitution(s, ring.mul(twist, 3)).unwrap();
            let phi = SemilinearAut::new(&ring, ms[0].clone(), tau).unwrap();
            let f = semilinear_map(&g, &phi).unwrap();
            prop_assert!(verify_graph_automorphism(g.graph(), &f));

            let a = semilinear_map(&g, &SemilinearAut::linear(&ring, ms[0].clone()).unwrap()).unwrap();
            let b = semilinear_map(&g, &SemilinearAut::linear(&ring, ms[1].clone()).unwrap()).unwrap();
            let ab = semilinear_map(&g, &SemilinearAut::linear(&ring, ms[0].mul(&ring, &ms[1])).unwrap()).unwrap();
            for v in 0..ab.len() {
                prop_assert_eq!(ab[v], a[b[v] as usize]);
            }
        }
    }
}
