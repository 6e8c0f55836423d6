use proptest::prelude::*;
use proptest::test_runner::Config;

use tllc_core::characters::{classify_pair, BaseCharacter, MultCharacter};
use tllc_core::covers::{CaseTag, CoverModel, TauCharacter};
use tllc_core::ext::{ExtElement, ExtKind, TameExtension};
use tllc_core::formula::{gamma_factor, n_depth, q_form_gram};
use tllc_core::symbols::{hilbert, hilbert_by_solvability, weil_gamma, weil_gamma_closed, weil_index_oracle, AdditiveCharacter};
use tllc_core::{CycInt, Error, ExactValue, PadicNumber, PrimeConfig, RootOfUnity};

const PRIMES: [u64; 3] = [3, 5, 7];
const DIVISORS_360: [u64; 12] = [1, 3, 4, 5, 8, 9, 10, 12, 15, 24, 40, 360];

fn cfg(p: u64, ell: u64) -> PrimeConfig {
    PrimeConfig::relaxed(p, 8, ell).unwrap()
}

fn ext(p: u64, kind: ExtKind) -> TameExtension {
    let ell = if kind.is_quadratic() { 2 } else { 3 };
    TameExtension::build(cfg(p, ell), kind, None).unwrap()
}

fn quiet(cases: u32) -> Config {
    Config { cases, failure_persistence: None, ..Config::default() }
}

fn cyc() -> impl Strategy<Value = CycInt> {
    (prop::sample::select(&DIVISORS_360[..]), prop::collection::vec((0u64..360, -4i64..5), 0..5))
        .prop_map(|(m, terms)| CycInt::from_terms(m, terms).unwrap())
}

/// `p^v·u` with `u` a unit mod `p^8`.
fn padic(p: u64, vmax: i64) -> impl Strategy<Value = PadicNumber> {
    let m = p.pow(8);
    (-vmax..=vmax, 1..m).prop_filter_map("unit", move |(v, u)| {
        (u % p != 0).then(|| PadicNumber::from_parts(&cfg(p, 2), v, u))
    })
}

fn prime_and(vmax: i64) -> impl Strategy<Value = (u64, PadicNumber, PadicNumber, PadicNumber)> {
    prop::sample::select(&PRIMES[..]).prop_flat_map(move |p| (Just(p), padic(p, vmax), padic(p, vmax), padic(p, vmax)))
}

const CASES: [(u64, ExtKind); 9] = [
    (3, ExtKind::UnramQuad),
    (5, ExtKind::UnramQuad),
    (7, ExtKind::UnramQuad),
    (3, ExtKind::RamQuad),
    (5, ExtKind::RamQuad),
    (7, ExtKind::RamQuad),
    (3, ExtKind::UnramL),
    (7, ExtKind::UnramL),
    (7, ExtKind::RamGaloisL),
];

fn case() -> impl Strategy<Value = (u64, ExtKind)> {
    prop::sample::select(&CASES[..])
}

/// Coefficients `p^{a_i}·c_i` so that the valuation pattern varies.
fn element(e: &TameExtension, k: i64, raw: &[(u32, i64)]) -> ExtElement {
    let p = e.config().p as i64;
    let c: Vec<i64> = raw.iter().take(e.degree()).map(|&(a, c)| p.pow(a) * c).collect();
    e.element(k, &c)
}

fn raw_coeffs() -> impl Strategy<Value = Vec<(u32, i64)>> {
    prop::collection::vec((0u32..4, -40i64..41), 3)
}

proptest! {
    #![proptest_config(quiet(500))]

    #[test]
    fn cyclotomic_ring_axioms(a in cyc(), b in cyc(), c in cyc()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
    }

    #[test]
    fn roots_have_exact_order(k in -500i64..500, m in 1u64..400) {
        let z = RootOfUnity::new(k, m);
        let n = z.order();
        prop_assert!(z.pow(n as i64).is_one());
        for j in 1..n {
            prop_assert!(!z.pow(j as i64).is_one());
        }
        prop_assert_eq!(z.to_cyc().unwrap().pow(n as u32).unwrap(), CycInt::one());
    }

    #[test]
    fn canonical_form_is_idempotent(q in prop::sample::select(&PRIMES[..]), h in -6i64..7, a in cyc(), s in 0u32..3) {
        let v = ExactValue::new(q, h, a.scale((q as i64).pow(s)));
        prop_assert_eq!(v.canonical(), v.clone());
        prop_assert_eq!(v.canonical().canonical(), v.canonical());
    }

    #[test]
    fn square_classes((p, x, _, _) in prime_and(4)) {
        prop_assert!(x.mul(&x).is_square());
        let c = cfg(p, 2);
        let u = PadicNumber::from_int(&c, (2..p as i64).find(|&a| tllc_core::arith::legendre(a, p) == -1).unwrap());
        let pp = PadicNumber::from_int(&c, p as i64);
        let classes = [x.is_square(), x.mul(&u).is_square(), x.mul(&pp).is_square(), x.mul(&u).mul(&pp).is_square()];
        prop_assert_eq!(classes.iter().filter(|&&s| s).count(), 1);
    }

    #[test]
    fn hensel_root_squares_back((_, x, _, _) in prime_and(4)) {
        let y = x.mul(&x);
        let r = y.sqrt_hensel().unwrap();
        prop_assert_eq!(r.mul(&r), y);
    }

    #[test]
    fn teichmuller_has_order_dividing_p_minus_one(p in prop::sample::select(&PRIMES[..]), r in 1u64..7) {
        prop_assume!(r < p);
        let c = cfg(p, 2);
        let t = PadicNumber::teichmuller(&c, r);
        prop_assert_eq!(t.pow(p as i64 - 1).unwrap(), PadicNumber::one(&c));
        prop_assert_eq!(t.unit_residue(), r);
    }

    #[test]
    fn hilbert_symbol_laws((_, a, b, c) in prime_and(3)) {
        prop_assert_eq!(hilbert(&a, &b), hilbert(&b, &a));
        prop_assert_eq!(hilbert(&a.mul(&b), &c), hilbert(&a, &c) * hilbert(&b, &c));
        prop_assert_eq!(hilbert(&a, &a.neg()), 1);
        prop_assert_eq!(hilbert(&a, &b), hilbert_by_solvability(&a, &b));
        let one = PadicNumber::one(&cfg(a.p(), 2));
        if let Ok(d) = one.sub(&a) {
            if !d.is_zero() {
                prop_assert_eq!(hilbert(&a, &d), 1);
            }
        }
    }

    #[test]
    fn weil_index_calculus((p, a, _, s) in prime_and(2), level in -1i64..2) {
        let c = cfg(p, 2);
        let psi = AdditiveCharacter::standard(&c, level).twist(&s);
        let g = weil_gamma(&a, &psi).unwrap();
        prop_assert_eq!(g, weil_gamma_closed(&a, &psi));
        prop_assert_eq!(g * g, RootOfUnity::from_sign(hilbert(&a, &a)));
        let minus_one = PadicNumber::from_int(&c, -1);
        prop_assert_eq!(weil_gamma(&minus_one, &psi).unwrap(), weil_index_oracle(&psi).unwrap().pow(-2));
    }

    #[test]
    fn valuation_and_norm_laws((p, k) in case(), ra in raw_coeffs(), rb in raw_coeffs(), ka in -2i64..3, kb in -2i64..3) {
        let e = ext(p, k);
        let a = element(&e, ka, &ra);
        let b = element(&e, kb, &rb);
        prop_assume!(!a.is_zero() && !b.is_zero());
        let ab = e.mul(&a, &b);
        prop_assert_eq!(e.val(&ab), e.val(&a) + e.val(&b));
        let s = e.add(&a, &b);
        if !s.is_zero() {
            prop_assert!(e.val(&s) >= e.val(&a).min(e.val(&b)));
        }
        prop_assert_eq!(e.norm(&ab).unwrap(), e.norm(&a).unwrap().mul(&e.norm(&b).unwrap()));
        let r = e.div(&ab, &b).unwrap();
        prop_assert_eq!(e.sub(&r, &a).is_zero(), true);
        prop_assert_eq!(e.to_base(&e.div(&a, &a).unwrap()).map(|x| x.unit()), Some(1));
        // equal modulo the absolute precision of s, which may have absorbed part of b
        let dt = e.trace(&s).unwrap().sub(&e.trace(&a).unwrap().add(&e.trace(&b).unwrap()).unwrap()).unwrap();
        prop_assert!(dt.is_zero() || s.is_zero() || dt.val() >= s.abs_prec(), "{:?}", dt);
        if k.is_quadratic() {
            prop_assert_eq!(e.from_padic(&e.norm(&a).unwrap()), e.mul(&a, &e.conj(&a)));
        }
    }

    #[test]
    fn log_is_a_homomorphism((p, k) in case(), ra in raw_coeffs(), rb in raw_coeffs()) {
        let e = ext(p, k);
        let pi = e.uniformizer();
        let one = e.one();
        let a = e.add(&one, &e.mul(&pi, &element(&e, 0, &ra)));
        let b = e.add(&one, &e.mul(&pi, &element(&e, 0, &rb)));
        let lhs = e.log(&e.mul(&a, &b)).unwrap();
        let rhs = e.add(&e.log(&a).unwrap(), &e.log(&b).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn twist_keeps_regularity((p, k) in case(), t in 0u64..48, tw in 0u64..6, pv in 0i64..4) {
        let e = ext(p, k);
        let chi = MultCharacter::new(RootOfUnity::ONE, t % (e.residue_card() - 1), None);
        let phi = BaseCharacter { p_value: RootOfUnity::new(pv, 4), tame: tw % (p - 1), alpha: None };
        let before = classify_pair(&e, &chi).unwrap().regular;
        let after = classify_pair(&e, &chi.twisted(phi)).unwrap().regular;
        prop_assert_eq!(before, after);
    }
}

proptest! {
    #![proptest_config(quiet(1000))]

    #[test]
    fn depth_closed_form_matches_membership((p, k) in case(), raw in raw_coeffs(), shift in -2i64..3) {
        let e = ext(p, k);
        let w = element(&e, shift, &raw);
        match n_depth(&e, &w) {
            Ok(_) | Err(Error::NotRegular) => {}
            Err(err) => prop_assert!(false, "{w}: {err:?}"),
        }
    }
}

proptest! {
    #![proptest_config(quiet(64))]

    #[test]
    fn q_form_is_diagonal_and_gamma_routes_agree(
        p in prop::sample::select(&PRIMES[..]),
        ram in any::<bool>(),
        (ax, vx) in (1i64..200, -1i64..2),
        (yx, vy) in (1i64..200, -1i64..2),
        a0 in -20i64..21,
        y0 in -20i64..21,
    ) {
        prop_assume!(ax % p as i64 != 0 && yx % p as i64 != 0);
        let e = ext(p, if ram { ExtKind::RamQuad } else { ExtKind::UnramQuad });
        let c = e.config();
        let delta = e.delta().unwrap();
        let pe = |v: i64| PadicNumber::from_parts(c, v, 1);
        let x = PadicNumber::from_int(c, ax).mul(&pe(vx));
        let y = PadicNumber::from_int(c, yx).mul(&pe(vy));
        let alpha = e.add(&e.from_int(a0), &e.mul(&e.from_padic(&x), &e.gen()));
        let yel = e.add(&e.from_int(y0), &e.mul(&e.from_padic(&y), &e.gen()));
        let g = q_form_gram(&e, &alpha, &yel).unwrap();
        let four = PadicNumber::from_int(c, 4).mul(&x).mul(&y).mul(&delta);
        prop_assert!(g[0][1].is_zero() && g[1][0].is_zero());
        prop_assert_eq!(g[0][0], four);
        prop_assert_eq!(g[1][1], four.mul(&delta).neg());
        let psi = AdditiveCharacter::standard(c, 1);
        let gf = gamma_factor(&e, &alpha, &yel, &psi).unwrap();
        prop_assert_eq!(gf.oracle, gf.closed);
    }

    #[test]
    fn cover_points_satisfy_lambda_squared((p, k) in case(), raw in raw_coeffs(), shift in -2i64..3, tau_ix in 0usize..8, proj in any::<bool>()) {
        let e = ext(p, k);
        let tag = match (k.is_quadratic(), proj) {
            (true, true) => CaseTag::Pgl2,
            (true, false) => CaseTag::Gl2,
            (false, _) => {
                let d = tllc_core::characters::delta_ef(&e).unwrap();
                if d.is_trivial(e.config()) { CaseTag::GlLSplit } else { CaseTag::GlLDeltaNontrivial }
            }
        };
        let taus = TauCharacter::choices(&e).unwrap();
        let tau = taus[tau_ix % taus.len()].clone();
        let model = CoverModel::new(tag, e.clone(), tau, None).unwrap();
        let w = element(&e, shift, &raw);
        prop_assume!(!w.is_zero());
        let fiber = match model.fiber(&w) {
            Ok(f) => f,
            Err(Error::Precondition(_)) => return Ok(()),
            Err(err) => return Err(TestCaseError::fail(format!("{err:?}"))),
        };
        for m in &fiber {
            let c = model.kappa(m).unwrap();
            prop_assert!(model.check_lambda_squared(&c).unwrap());
            prop_assert!(model.model_eq(&model.kappa_inv(&c).unwrap(), m).unwrap());
            if e.is_galois() {
                let once = model.weyl_act(1, &c).unwrap();
                prop_assert!(model.check_lambda_squared(&once).unwrap());
                prop_assert_eq!(model.weyl_act(1, &once).unwrap(), model.weyl_act(2, &c).unwrap());
                prop_assert_eq!(model.weyl_act(e.degree() as i64, &c).unwrap(), c.clone());
            }
        }
    }
}
