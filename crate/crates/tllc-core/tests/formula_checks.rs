use tllc_core::characters::{delta_ef, BaseCharacter, CharPair, MultCharacter, QuadraticCharacter};
use tllc_core::covers::{genuine_from_pair, CaseTag, CoverModel, GenuineCharacter, TauCharacter};
use tllc_core::ext::{ExtElement, ExtKind, TameExtension};
use tllc_core::formula::*;
use tllc_core::{PrimeConfig, RootOfUnity};

fn ext(p: u64, kind: ExtKind) -> TameExtension {
    let ell = if kind.is_quadratic() { 2 } else { 3 };
    TameExtension::build(PrimeConfig::relaxed(p, 12, ell).unwrap(), kind, None).unwrap()
}

/// Characters with `χ(ϖ) = 1` and wild element `α`, over all tame exponents.
fn chars_with_alpha(e: &TameExtension, alpha: Option<ExtElement>) -> Vec<MultCharacter> {
    (0..e.residue_card() - 1).map(|t| MultCharacter::new(RootOfUnity::ONE, t, alpha.clone())).collect()
}

fn tag_for(e: &TameExtension, projective: bool) -> (CaseTag, Option<QuadraticCharacter>) {
    if e.kind().is_quadratic() {
        return (if projective { CaseTag::Pgl2 } else { CaseTag::Gl2 }, None);
    }
    if delta_ef(e).unwrap().is_trivial(e.config()) {
        (CaseTag::GlLSplit, None)
    } else {
        (CaseTag::GlLDeltaNontrivial, None)
    }
}

fn genuine(e: &TameExtension, chi: MultCharacter, tau: usize) -> Option<GenuineCharacter> {
    let pair = CharPair::new(e.clone(), chi).ok()?;
    if !pair.flags.regular {
        return None;
    }
    let (tag, d) = tag_for(e, false);
    let tau = TauCharacter::choices(e).unwrap().remove(tau);
    let model = CoverModel::new(tag, e.clone(), tau, d).unwrap();
    genuine_from_pair(&pair, &model).ok()
}

#[test]
fn omega_suite_quadratic() {
    for (p, kind) in [(3, ExtKind::UnramQuad), (3, ExtKind::RamQuad), (5, ExtKind::RamQuad), (7, ExtKind::UnramQuad)] {
        let e = ext(p, kind);
        let pair = CharPair::new(e.clone(), MultCharacter::new(RootOfUnity::ONE, 1, None)).unwrap();
        let r = identity_suite(&pair, Suite::Omega, 3).unwrap();
        assert!(r.checked() > 0);
        assert!(r.all_pass(), "{p} {kind:?}: {:?}", r.failures());
    }
}

#[test]
fn mu_suite_positive_levels() {
    for p in [3u64, 5] {
        let e = ext(p, ExtKind::UnramQuad);
        for n in 1..=2 {
            let a = e.element(-n, &[1, 1]);
            let pair = CharPair::new(e.clone(), MultCharacter::new(RootOfUnity::ONE, 0, Some(a))).unwrap();
            let r = identity_suite(&pair, Suite::Mu, 3).unwrap();
            assert!(r.checked() > 0);
            assert!(r.all_pass(), "{:?}", r.failures());
        }
        let e = ext(p, ExtKind::RamQuad);
        let d = e.delta().unwrap();
        for c in 1..p as i64 {
            let a = e.scale(&e.element(0, &[0, c]), &d.inv().unwrap());
            let pair = CharPair::new(e.clone(), MultCharacter::new(RootOfUnity::ONE, 0, Some(a))).unwrap();
            let r = identity_suite(&pair, Suite::Mu, 4).unwrap();
            assert!(r.checked() > 0);
            assert!(r.all_pass(), "{:?}", r.failures());
        }
    }
}

#[test]
fn lambda_and_l_suites_unramified() {
    for p in [3u64, 5, 7] {
        let e = ext(p, ExtKind::UnramQuad);
        for n in 1..=3 {
            for c0 in 0..p as i64 {
                let a = e.element(-n, &[c0, 1 + c0 % 2]);
                let pair = CharPair::new(e.clone(), MultCharacter::new(RootOfUnity::ONE, 0, Some(a))).unwrap();
                assert_eq!(pair.flags.minimal, Some(true));
                for s in [Suite::Lambda, Suite::LMinusN] {
                    let r = identity_suite(&pair, s, 3).unwrap();
                    assert!(r.all_pass(), "{p} {n} {:?}", r.failures());
                }
            }
        }
    }
}

#[test]
fn delta_delta_suite_ramified() {
    for p in [3u64, 5, 7] {
        let e = ext(p, ExtKind::RamQuad);
        let d = e.delta().unwrap();
        for k in [1i64, 2] {
            for c in 1..p as i64 {
                let a = e.scale(&e.element(0, &[0, c]), &d.pow(-k).unwrap());
                let pair = CharPair::new(e.clone(), MultCharacter::new(RootOfUnity::ONE, 0, Some(a))).unwrap();
                let r = identity_suite(&pair, Suite::DeltaDelta, 3).unwrap();
                assert!(r.all_pass(), "{p} {k} {c}: {:?}", r.failures());
            }
        }
    }
}

#[test]
fn window_suite_unramified() {
    for p in [3u64, 5] {
        let e = ext(p, ExtKind::UnramQuad);
        let pair = CharPair::new(e.clone(), MultCharacter::new(RootOfUnity::ONE, 1, None)).unwrap();
        let r = identity_suite(&pair, Suite::Window, 3).unwrap();
        assert!(r.all_pass(), "{:?}", r.failures());
    }
}

#[test]
fn collapse_suite_odd_degree() {
    for (kind, cutoff) in [(ExtKind::UnramL, 2), (ExtKind::RamGaloisL, 3)] {
        let e = ext(7, kind);
        let pair = CharPair::new(e.clone(), MultCharacter::new(RootOfUnity::ONE, 1, None)).unwrap();
        let r = identity_suite(&pair, Suite::Collapse, cutoff).unwrap();
        assert!(r.checked() > 0);
        assert!(r.all_pass(), "{kind:?}: {:?}", &r.failures()[..r.failures().len().min(3)]);
    }
}

fn sample_points(e: &TameExtension, level: u32, cutoff: u32) -> Vec<ExtElement> {
    tllc_core::covers::torus_classes(e, cutoff)
        .unwrap()
        .into_iter()
        .filter(|w| !e.is_in_base(w))
        .filter(|w| {
            let d = n_depth(e, w).unwrap().depth;
            if level == 0 {
                d.is_zero()
            } else {
                d.within_half_depth(level)
            }
        })
        .collect()
}

fn formula_cases() -> Vec<(TameExtension, MultCharacter, u32)> {
    let mut out = Vec::new();
    let u3 = ext(3, ExtKind::UnramQuad);
    out.push((u3.clone(), MultCharacter::new(RootOfUnity::ONE, 1, None), 3));
    out.push((u3.clone(), MultCharacter::new(RootOfUnity::ONE, 2, Some(u3.element(-2, &[1, 1]))), 3));
    let r5 = ext(5, ExtKind::RamQuad);
    let a = r5.scale(&r5.gen(), &r5.delta().unwrap().pow(-2).unwrap());
    out.push((r5.clone(), MultCharacter::new(RootOfUnity::ONE, 1, Some(a)), 4));
    let r3 = ext(3, ExtKind::RamQuad);
    let a = r3.scale(&r3.gen(), &r3.delta().unwrap().pow(-1).unwrap());
    out.push((r3.clone(), MultCharacter::new(RootOfUnity::MINUS_ONE, 1, Some(a)), 3));
    let ul = ext(7, ExtKind::UnramL);
    out.push((ul.clone(), MultCharacter::new(RootOfUnity::ONE, 5, None), 2));
    let rl = ext(7, ExtKind::RamGaloisL);
    let a = rl.scale(&rl.element(0, &[0, 0, 1]), &rl.delta().unwrap().pow(-1).unwrap());
    out.push((rl.clone(), MultCharacter::new(RootOfUnity::ONE, 1, Some(a)), 3));
    out
}

#[test]
fn formula_routes_and_invariances() {
    for (e, chi, cutoff) in formula_cases() {
        let level = chi.level(&e);
        let g0 = genuine(&e, chi.clone(), 0).expect("regular");
        let g1 = genuine(&e, chi.clone(), 1).expect("regular");
        let pts = sample_points(&e, level, cutoff);
        assert!(!pts.is_empty());
        for w in &pts {
            let v = eval_formula(&g0, w, PositiveSystem::STANDARD).unwrap();
            assert_eq!(v, eval_formula_literal(&g0, w).unwrap(), "literal {:?} {w}", e.kind());
            assert_eq!(v, eval_formula(&g1, w, PositiveSystem::STANDARD).unwrap(), "tau {:?} {w}", e.kind());
            assert_eq!(v, eval_formula(&g0, w, PositiveSystem::OPPOSITE).unwrap(), "positive system");
            for i in 1..e.degree() as i64 {
                let sw = e.galois_apply(i, w).unwrap();
                assert_eq!(v, eval_formula(&g0, &sw, PositiveSystem::STANDARD).unwrap(), "weyl");
            }
        }
    }
}

#[test]
fn twist_equivariance() {
    for (e, chi, cutoff) in formula_cases() {
        let level = chi.level(&e);
        let phi = BaseCharacter::unramified(RootOfUnity::new(1, 3));
        let g = genuine(&e, chi.clone(), 0).unwrap();
        let gt = genuine(&e, chi.twisted(phi.clone()), 0).unwrap();
        for w in sample_points(&e, level, cutoff) {
            let v = eval_formula(&g, &w, PositiveSystem::STANDARD).unwrap();
            let vt = eval_formula(&gt, &w, PositiveSystem::STANDARD).unwrap();
            let f = phi.eval(e.config(), &e.norm(&w).unwrap()).unwrap();
            assert_eq!(vt.exact, v.exact.mul_root(f).unwrap());
            assert_eq!(vt.norm, v.norm);
        }
    }
}

#[test]
fn depth_zero_gl2_matches_display() {
    let e = ext(3, ExtKind::UnramQuad);
    for chi in chars_with_alpha(&e, None) {
        let Some(g) = genuine(&e, chi.clone(), 0) else { continue };
        for w in sample_points(&e, 0, 3) {
            let v = eval_formula(&g, &w, PositiveSystem::STANDARD).unwrap();
            let dchi = if e.val(&w) % 2 == 0 { 1 } else { -1 };
            let want = tllc_core::ExactValue::from_root(3, 0, chi.eval(&e, &w).unwrap())
                .unwrap()
                .add(&tllc_core::ExactValue::from_root(3, 0, chi.eval(&e, &e.conj(&w)).unwrap()).unwrap())
                .unwrap()
                .mul_root(RootOfUnity::from_sign(-dchi))
                .unwrap();
            assert_eq!(v.exact, want);
        }
    }
}

#[test]
fn out_of_window_is_refused() {
    let e = ext(3, ExtKind::UnramQuad);
    let g = genuine(&e, MultCharacter::new(RootOfUnity::ONE, 1, None), 0).unwrap();
    let w = e.add(&e.one(), &e.element(1, &[0, 1]));
    assert!(eval_formula(&g, &w, PositiveSystem::STANDARD).is_err());
    let gp = genuine(&e, MultCharacter::new(RootOfUnity::ONE, 0, Some(e.element(-2, &[0, 1]))), 0).unwrap();
    assert!(eval_formula(&gp, &w, PositiveSystem::STANDARD).is_ok());
    let w2 = e.add(&e.one(), &e.element(2, &[0, 1]));
    assert!(eval_formula(&gp, &w2, PositiveSystem::STANDARD).is_err());
}

#[test]
fn discriminant_routes_agree_quadratic() {
    for (p, kind) in [(3, ExtKind::UnramQuad), (5, ExtKind::RamQuad), (3, ExtKind::RamQuad)] {
        let e = ext(p, kind);
        for w in tllc_core::covers::torus_classes(&e, 3).unwrap() {
            if e.is_in_base(&w) {
                continue;
            }
            assert_eq!(discriminant_valuation(&e, &w).unwrap(), discriminant_valuation_direct(&e, &w).unwrap());
        }
    }
}

#[test]
fn separation_examples() {
    let u = ext(3, ExtKind::UnramQuad);
    let chi = MultCharacter::new(RootOfUnity::ONE, 1, None);
    let g = genuine(&u, chi.clone(), 0).unwrap();
    let gs = genuine(&u, chi.conjugate(&u, 1).unwrap(), 0).unwrap();
    assert_eq!(separation_test(&g, &gs, 3).unwrap(), Separation::EquivalentByWeyl);
    let r = ext(3, ExtKind::RamQuad);
    let a = r.scale(&r.gen(), &r.delta().unwrap().pow(-1).unwrap());
    let gr = genuine(&r, MultCharacter::new(RootOfUnity::ONE, 1, Some(a)), 0).unwrap();
    assert!(matches!(separation_test(&g, &gr, 3).unwrap(), Separation::SeparatedAt { .. }));
    // t = 3 is the Frobenius conjugate of t = 1
    let g3 = genuine(&u, MultCharacter::new(RootOfUnity::ONE, 3, None), 0).unwrap();
    assert_eq!(separation_test(&g, &g3, 3).unwrap(), Separation::EquivalentByWeyl);
    let g2 = genuine(&u, MultCharacter::new(RootOfUnity::ONE, 2, None), 0).unwrap();
    assert!(matches!(separation_test(&g, &g2, 3).unwrap(), Separation::SeparatedAt { .. }));
    // twisting by the unramified quadratic character through the norm
    let a = r.scale(&r.gen(), &r.delta().unwrap().pow(-1).unwrap());
    let chi_r = MultCharacter::new(RootOfUnity::ONE, 1, Some(a));
    let g1 = genuine(&r, chi_r.clone(), 0).unwrap();
    let gt = genuine(&r, chi_r.twisted(BaseCharacter::unramified(RootOfUnity::MINUS_ONE)), 0).unwrap();
    assert!(matches!(separation_test(&g1, &gt, 3).unwrap(), Separation::SeparatedAt { .. }));
}
