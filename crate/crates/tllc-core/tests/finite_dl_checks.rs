use tllc_core::characters::{CharPair, MultCharacter, QuadraticCharacter};
use tllc_core::covers::{genuine_from_pair, CaseTag, CoverModel, TauCharacter};
use tllc_core::ext::{ExtKind, TameExtension};
use tllc_core::finite_dl::*;
use tllc_core::{CycInt, PadicNumber, PrimeConfig, RootOfUnity};

fn ext(p: u64, kind: ExtKind) -> TameExtension {
    let ell = if kind.is_quadratic() { 2 } else { 3 };
    TameExtension::build(PrimeConfig::relaxed(p, 12, ell).unwrap(), kind, None).unwrap()
}

#[test]
fn normalizer_identity_gl2_3_exhaustive() {
    let g = GLnq::new(2, 3).unwrap();
    let mut count = 0;
    for s in 1..9 {
        if !g.is_regular(s) {
            continue;
        }
        for k in 0..8 {
            let theta = FqMultChar { k };
            if !theta.is_regular(g.field()) {
                continue;
            }
            let r = normalizer_identity(&g, s, &theta).unwrap();
            assert!(r.holds, "{s} {k}: {r:?}");
            assert_eq!(r.weyl_order, 2);
            count += 1;
        }
    }
    assert!(count > 0);
}

#[test]
fn gl3_2_matches_orbit_pattern() {
    let g = GLnq::new(3, 2).unwrap();
    assert_eq!(g.order().unwrap(), 168);
    for k in 0..7 {
        let theta = FqMultChar { k };
        if !theta.is_regular(g.field()) {
            continue;
        }
        for s in 1..8 {
            if !g.is_regular(s) {
                continue;
            }
            assert_eq!(dl_value(&g, s, &theta).unwrap(), orbit_sum(&g, s, &theta).unwrap());
        }
    }
}

#[test]
fn dl_value_is_frobenius_invariant() {
    let g = GLnq::new(2, 5).unwrap();
    let theta = FqMultChar { k: 1 };
    let s = g.field().generator();
    let v = dl_value(&g, s, &theta).unwrap();
    assert_eq!(v, dl_value(&g, g.field().frob(s), &theta).unwrap());
    assert_eq!(v, dl_value(&g, s, &FqMultChar { k: 5 }).unwrap());
    let want = CycInt::from_roots([(RootOfUnity::new(1, 24), -1), (RootOfUnity::new(5, 24), -1)]).unwrap();
    assert_eq!(v, want);
}

#[test]
fn depth_zero_gl2_p3_all_regular_characters() {
    let e = ext(3, ExtKind::UnramQuad);
    let grp = GLnq::from_field(e.residue_field().clone()).unwrap();
    let mut n = 0;
    for uval in [RootOfUnity::ONE, RootOfUnity::MINUS_ONE] {
        for t in 0..8 {
            let pair = CharPair::new(e.clone(), MultCharacter::new(uval, t, None)).unwrap();
            if !pair.flags.regular {
                continue;
            }
            for tau in TauCharacter::choices(&e).unwrap() {
                let model = CoverModel::new(CaseTag::Gl2, e.clone(), tau, None).unwrap();
                let g = genuine_from_pair(&pair, &model).unwrap();
                let r = depth_zero_crosscheck(&g, &grp, 3).unwrap();
                assert!(r.checked() > 0);
                assert!(r.all_pass(), "{:?}", r.failures());
                n += 1;
            }
        }
    }
    assert_eq!(n, 2 * 2 * 6);
}

#[test]
fn depth_zero_degree_three_p7() {
    let e = ext(7, ExtKind::UnramL);
    let grp = GLnq::from_field(e.residue_field().clone()).unwrap();
    assert!(!grp.is_enumerated());
    let nonsq = PadicNumber::from_int(e.config(), 3);
    let mut ran = 0;
    for t in [1u64, 2, 5, 100] {
        let pair = CharPair::new(e.clone(), MultCharacter::new(RootOfUnity::ONE, t, None)).unwrap();
        assert!(pair.flags.regular);
        let tau = TauCharacter::choices(&e).unwrap().remove(0);
        for (tag, d) in [(CaseTag::GlLSplit, None), (CaseTag::GlLDeltaNontrivial, Some(QuadraticCharacter { disc: nonsq }))] {
            let model = match CoverModel::new(tag, e.clone(), tau.clone(), d) {
                Ok(m) => m,
                Err(_) => continue,
            };
            let Ok(g) = genuine_from_pair(&pair, &model) else { continue };
            let r = depth_zero_crosscheck(&g, &grp, 2).unwrap();
            assert!(r.checked() > 0);
            assert!(r.all_pass(), "{tag:?}: {:?}", r.failures());
            ran += 1;
        }
    }
    assert!(ran >= 4, "ran {ran}");
}
