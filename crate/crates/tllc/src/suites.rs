//! The check suites behind `tllc run`. Each suite turns a [`RunConfig`] into
//! report entries; sampling draws from a ChaCha stream fixed by the seed and
//! the suite, so suites can run in any order or in parallel.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use tllc_core::characters::{delta_ef, generators, CharPair, MultCharacter, QuadraticCharacter};
use tllc_core::covers::{check_split, genuine_from_pair, torus_classes, CaseTag, CoverModel, GenuineCharacter, TauCharacter};
use tllc_core::ext::{ExtElement, ExtKind, TameExtension, UnitLevel};
use tllc_core::finite_dl::{
    depth_zero_crosscheck, dl_value, normalizer_identity, orbit_sum, sign_rank, sign_stated, FqMultChar, GLnq,
};
use tllc_core::formula::{
    eval_formula, eval_formula_literal, gamma_factor, identity_suite, n_depth, n_depth_closed, q_form_gram, separate,
    separation_data, Depth, PositiveSystem, Separation, Suite, SuiteReport,
};
use tllc_core::symbols::{
    hilbert, hilbert_by_solvability, langlands_lambda, weil_gamma, weil_gamma_closed, AdditiveCharacter,
};
use tllc_core::{Error, PadicNumber, PrimeConfig, Result, RootOfUnity};

use crate::characters::CharacterFile;
use crate::config::RunConfig;
use crate::report::Entry;

/// Random characters the separation suite keeps (with their Weyl conjugates)
/// when the full family has more than twice as many.
pub const SEPARATION_SEEDS: usize = 80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SuiteId {
    Weil,
    LambdaConst,
    Hilbert,
    Depth,
    Covers,
    QForm,
    Identities,
    DepthZero,
    Normalizer,
    Separation,
    Invariance,
    Dl,
}

impl SuiteId {
    pub const ALL: [SuiteId; 12] = [
        SuiteId::Weil,
        SuiteId::LambdaConst,
        SuiteId::Hilbert,
        SuiteId::Depth,
        SuiteId::Covers,
        SuiteId::QForm,
        SuiteId::Identities,
        SuiteId::DepthZero,
        SuiteId::Normalizer,
        SuiteId::Separation,
        SuiteId::Invariance,
        SuiteId::Dl,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuiteId::Weil => "weil",
            SuiteId::LambdaConst => "lambda-const",
            SuiteId::Hilbert => "hilbert",
            SuiteId::Depth => "depth",
            SuiteId::Covers => "covers",
            SuiteId::QForm => "qform",
            SuiteId::Identities => "identities",
            SuiteId::DepthZero => "depth-zero",
            SuiteId::Normalizer => "normalizer",
            SuiteId::Separation => "separation",
            SuiteId::Invariance => "invariance",
            SuiteId::Dl => "dl",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s)
    }

    pub fn description(&self) -> &'static str {
        match self {
            SuiteId::Weil => "Weil index calculus, oracle against closed form",
            SuiteId::LambdaConst => "gamma of a nonsquare unit and the Langlands constant of each quadratic extension",
            SuiteId::Hilbert => "Hilbert symbol closed form against the solvability oracle",
            SuiteId::Depth => "n(w) closed forms against filtration membership",
            SuiteId::Covers => "cover models: kappa, lambda^2, Weyl action, splitting criterion",
            SuiteId::QForm => "Q-form Gram matrix and gamma(alpha, Y)",
            SuiteId::Identities => "identity suites of the character formula",
            SuiteId::DepthZero => "depth-zero formula against Deligne-Lusztig values",
            SuiteId::Normalizer => "Carter sum reduction to the torus normalizer",
            SuiteId::Separation => "separation of level <= 1 characters by formula values",
            SuiteId::Invariance => "formula invariance under positive system, tau and Weyl action",
            SuiteId::Dl => "Deligne-Lusztig values: brute force, orbit pattern, signs",
        }
    }

    /// Whether the suite has anything to check for this configuration.
    pub fn applies(&self, cfg: &RunConfig) -> bool {
        match self {
            SuiteId::LambdaConst | SuiteId::QForm | SuiteId::Separation => cfg.ell == 2,
            SuiteId::Normalizer => GLnq::new(cfg.gl_n(), cfg.gl_q()).map(|g| g.is_enumerated()).unwrap_or(false),
            _ => true,
        }
    }

    pub fn run(&self, cfg: &RunConfig) -> Result<Vec<Entry>> {
        let mut ctx = Ctx::new(cfg, *self)?;
        match self {
            SuiteId::Weil => weil(&mut ctx),
            SuiteId::LambdaConst => lambda_const(&mut ctx),
            SuiteId::Hilbert => hilbert_suite(&mut ctx),
            SuiteId::Depth => depth(&mut ctx),
            SuiteId::Covers => covers(&mut ctx),
            SuiteId::QForm => qform(&mut ctx),
            SuiteId::Identities => identities(&mut ctx),
            SuiteId::DepthZero => depth_zero(&mut ctx),
            SuiteId::Normalizer => normalizer(&mut ctx),
            SuiteId::Separation => separation(&mut ctx),
            SuiteId::Invariance => invariance(&mut ctx),
            SuiteId::Dl => dl(&mut ctx),
        }?;
        Ok(ctx.entries)
    }
}

/// Suites selected by the config, expanding `all` to the applicable ones.
pub fn selected(cfg: &RunConfig) -> std::result::Result<Vec<SuiteId>, String> {
    let mut out = Vec::new();
    for s in &cfg.suites {
        if s == "all" {
            out.extend(SuiteId::ALL.into_iter().filter(|x| x.applies(cfg)));
        } else {
            let id = SuiteId::from_name(s).ok_or_else(|| format!("unknown suite {s:?}"))?;
            if !id.applies(cfg) {
                return Err(format!("suite {s} does not apply to this configuration"));
            }
            out.push(id);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Runs the suites in parallel; entries come back unsorted.
pub fn run_all(cfg: &RunConfig, suites: &[SuiteId]) -> Result<Vec<Entry>> {
    let parts: Vec<Result<Vec<Entry>>> = suites.par_iter().map(|s| s.run(cfg)).collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    pc: PrimeConfig,
    suite: &'static str,
    rng: ChaCha8Rng,
    entries: Vec<Entry>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a RunConfig, id: SuiteId) -> Result<Self> {
        let pc = PrimeConfig::new(cfg.p, cfg.precision, cfg.ell)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(id as u64);
        Ok(Ctx { cfg, pc, suite: id.name(), rng, entries: Vec::new() })
    }

    /// At most `cap` pairs from `a × b`, all of them when they fit.
    fn product_sample<A: Copy, B: Copy>(&mut self, a: &[A], b: &[B], cap: usize) -> Vec<(A, B)> {
        let total = a.len() * b.len();
        let mut idx: Vec<usize> = if total <= cap {
            (0..total).collect()
        } else {
            rand::seq::index::sample(&mut self.rng, total, cap).into_vec()
        };
        idx.sort_unstable();
        idx.into_iter().map(|i| (a[i / b.len()], b[i % b.len()])).collect()
    }

    /// Keeps a seeded random `cap` of the items, in their original order.
    fn subsample<T>(&mut self, items: Vec<T>, cap: usize) -> Vec<T> {
        if items.len() <= cap {
            return items;
        }
        let mut keep = rand::seq::index::sample(&mut self.rng, items.len(), cap).into_vec();
        keep.sort_unstable();
        let mut items: Vec<Option<T>> = items.into_iter().map(Some).collect();
        keep.into_iter().map(|i| items[i].take().expect("distinct indices")).collect()
    }

    fn eq<A: std::fmt::Display + PartialEq>(&mut self, anchor: &str, id: String, input: String, lhs: A, rhs: A) {
        self.entries.push(Entry::eq(self.suite, anchor, id, input, lhs, rhs));
    }

    fn push(&mut self, anchor: &str, id: String, input: String, lhs: String, rhs: String, pass: bool) {
        self.entries.push(Entry::new(self.suite, anchor, id, input, lhs, rhs, pass));
    }

    /// Copies a core suite report, prefixing its ids.
    fn absorb(&mut self, anchor: &str, prefix: &str, rep: SuiteReport) {
        for r in rep.records {
            self.push(anchor, format!("{prefix}/{}", r.id), r.input, r.lhs, r.rhs, r.pass);
        }
    }

    fn quad_config(&self) -> PrimeConfig {
        PrimeConfig::relaxed(self.cfg.p, self.cfg.precision, 2).expect("validated prime")
    }

    /// `p^v·u` with `v` uniform in `vs` and `u` a random unit.
    fn padic(&mut self, pc: &PrimeConfig, vs: std::ops::RangeInclusive<i64>) -> PadicNumber {
        let p = pc.p;
        let v = self.rng.gen_range(vs);
        loop {
            let u = self.rng.gen_range(1..pc.modulus());
            if u % p != 0 {
                return PadicNumber::from_parts(pc, v, u);
            }
        }
    }

    /// A random element of `E*` outside `F`, with coefficients of varied valuation.
    fn element(&mut self, e: &TameExtension) -> ExtElement {
        let p = e.config().p as i64;
        loop {
            let shift = self.rng.gen_range(-2..=2);
            let c: Vec<i64> = (0..e.degree())
                .map(|_| {
                    if self.rng.gen_bool(0.2) {
                        0
                    } else {
                        p.pow(self.rng.gen_range(0..4)) * self.rng.gen_range(-40..=40)
                    }
                })
                .collect();
            let w = e.element(shift, &c);
            if !w.is_zero() && !e.is_in_base(&w) {
                return w;
            }
        }
    }

    /// Extensions of degree `ℓ` for this prime, restricted to the configured kind.
    fn extensions(&self) -> Result<Vec<(String, TameExtension)>> {
        let want = self.cfg.kind().map_err(|_| Error::InvalidConfig("unknown extension kind"))?;
        let keep = |k: ExtKind| want.is_none_or(|w| w == k);
        let mut out = Vec::new();
        if self.cfg.ell == 2 {
            for (name, e) in quadratic_extensions(&self.quad_config())? {
                if keep(e.kind()) {
                    out.push((name, e));
                }
            }
        } else {
            let pc = PrimeConfig::relaxed(self.cfg.p, self.cfg.precision, self.cfg.ell)?;
            if keep(ExtKind::UnramL) {
                out.push(("UnramL".into(), TameExtension::build(pc, ExtKind::UnramL, None)?));
            }
            if keep(ExtKind::RamGaloisL) && (self.cfg.p - 1).is_multiple_of(self.cfg.ell) {
                out.push(("RamGaloisL".into(), TameExtension::build(pc, ExtKind::RamGaloisL, None)?));
            }
        }
        Ok(out)
    }
}

fn nonsquare_unit(p: u64) -> u64 {
    (2..p).find(|&a| tllc_core::arith::legendre(a as i64, p) == -1).expect("odd prime")
}

/// The three quadratic extensions: unramified, `F(√p)` and `F(√(pu))`, `u` a nonsquare unit.
pub fn quadratic_extensions(pc: &PrimeConfig) -> Result<Vec<(String, TameExtension)>> {
    let p = pc.p;
    let pu = PadicNumber::from_int(pc, (p * nonsquare_unit(p)) as i64);
    Ok(vec![
        ("UnramQuad".into(), TameExtension::build(*pc, ExtKind::UnramQuad, None)?),
        (format!("RamQuad[{p}]"), TameExtension::build(*pc, ExtKind::RamQuad, None)?),
        (format!("RamQuad[{}]", p * nonsquare_unit(p)), TameExtension::build(*pc, ExtKind::RamQuad, Some(pu))?),
    ])
}

/// Number of classes produced by [`torus_classes`] at cutoff `c`.
pub fn class_count(e: &TameExtension, c: u32) -> u64 {
    let p = e.config().p;
    let qe = e.residue_card();
    let ram = e.ramification() as u32;
    let mut n = (qe - 1) / (p - 1);
    for j in 1..c {
        n *= if j % ram != 0 {
            qe
        } else if e.residue_degree() == 1 {
            1
        } else {
            qe / p
        };
    }
    n * ram as u64
}

/// The largest cutoff `≤ c` with at most `max` classes.
pub fn effective_cutoff(e: &TameExtension, c: u32, max: u64) -> u32 {
    (1..=c).rev().find(|&k| class_count(e, k) <= max).unwrap_or(1)
}

fn regular_classes(e: &TameExtension, cutoff: u32) -> Result<Vec<ExtElement>> {
    Ok(torus_classes(e, cutoff)?.into_iter().filter(|w| !e.is_in_base(w)).collect())
}

fn sign(s: i32) -> RootOfUnity {
    RootOfUnity::from_sign(s)
}

fn weil(ctx: &mut Ctx) -> Result<()> {
    let pc = ctx.quad_config();
    for i in 0..ctx.cfg.samples {
        let a = ctx.padic(&pc, -2..=2);
        let b = ctx.padic(&pc, -2..=2);
        let c = ctx.padic(&pc, -1..=1);
        let level = ctx.rng.gen_range(0..=2);
        let psi = AdditiveCharacter::standard(&pc, level);
        let input = format!("a={a}, b={b}, c={c}, level={level}");
        let ga = weil_gamma(&a, &psi)?;
        let gb = weil_gamma(&b, &psi)?;
        let gac2 = weil_gamma(&a.mul(&c).mul(&c), &psi)?;
        let gab = weil_gamma(&a.mul(&b), &psi)?;
        ctx.eq("gamma.square-class", format!("square-class/{i:05}"), input.clone(), gac2, ga);
        ctx.eq("gamma.product", format!("product/{i:05}"), input.clone(), gab, sign(hilbert(&a, &b)) * ga * gb);
        ctx.eq("gamma.square", format!("square/{i:05}"), input.clone(), ga * ga, sign(hilbert(&a, &a)));
        ctx.eq("gamma.closed-form", format!("closed/{i:05}"), input, ga, weil_gamma_closed(&a, &psi));
    }
    Ok(())
}

fn lambda_const(ctx: &mut Ctx) -> Result<()> {
    let pc = ctx.quad_config();
    let m1 = PadicNumber::from_int(&pc, -1);
    for (name, e) in quadratic_extensions(&pc)? {
        let delta = e.delta().expect("quadratic");
        for level in 0..=2 {
            let psi = AdditiveCharacter::standard(&pc, level);
            let input = format!("E={name}, level={level}");
            let lam = langlands_lambda(&e, &psi)?;
            let g = weil_gamma(&delta, &psi)?;
            let h = sign(hilbert(&m1, &delta));
            ctx.eq("lambda.gamma-form", format!("{name}/L{level}/gamma-form"), input.clone(), lam, g * h);
            ctx.eq("lambda.power", format!("{name}/L{level}/power"), input.clone(), lam.pow(-4), RootOfUnity::ONE);
            if delta.val() == 0 {
                let want = sign(if level % 2 == 0 { 1 } else { -1 });
                ctx.eq("gamma.nonsquare-unit", format!("{name}/L{level}/unit-gamma"), input, g, want);
            }
        }
    }
    Ok(())
}

fn hilbert_suite(ctx: &mut Ctx) -> Result<()> {
    let pc = ctx.quad_config();
    for i in 0..5 * ctx.cfg.samples {
        let a = ctx.padic(&pc, -3..=3);
        let b = ctx.padic(&pc, -3..=3);
        ctx.eq("hilbert.solvability", format!("{i:05}"), format!("a={a}, b={b}"), hilbert(&a, &b), hilbert_by_solvability(&a, &b));
    }
    Ok(())
}

fn depth(ctx: &mut Ctx) -> Result<()> {
    for (name, e) in ctx.extensions()? {
        for i in 0..10 * ctx.cfg.samples {
            let w = ctx.element(&e);
            let closed = n_depth_closed(&e, &w)?;
            let k = match e.unit_level(&w)? {
                UnitLevel::NotInFU => 0,
                UnitLevel::Level(k) => k,
            };
            let member = Depth { num: k, den: e.ramification() as u32 };
            ctx.eq("depth.closed-form", format!("{name}/{i:05}"), format!("w={w}"), closed, member);
        }
    }
    Ok(())
}

/// Cover models for the configured degree, each with its extension.
fn cover_models(ctx: &Ctx) -> Result<Vec<(String, CoverModel)>> {
    let mut out = Vec::new();
    for (name, e) in ctx.extensions()? {
        let taus = TauCharacter::choices(&e)?;
        let cfg = *e.config();
        let tags: Vec<(CaseTag, Option<QuadraticCharacter>)> = if e.kind().is_quadratic() {
            vec![(CaseTag::Pgl2, None), (CaseTag::Gl2, None)]
        } else {
            let stipulated = QuadraticCharacter { disc: PadicNumber::from_int(&cfg, nonsquare_unit(cfg.p) as i64) };
            let mut t = vec![
                (CaseTag::PglLDeltaNontrivial, Some(stipulated)),
                (CaseTag::GlLDeltaNontrivial, Some(stipulated)),
            ];
            if delta_ef(&e)?.is_trivial(&cfg) {
                t.push((CaseTag::PglLSplit, None));
                t.push((CaseTag::GlLSplit, None));
            }
            t
        };
        for (tag, d) in tags {
            for (ti, tau) in taus.iter().enumerate() {
                let model = CoverModel::new(tag, e.clone(), tau.clone(), d)?;
                out.push((format!("{name}/{}/tau{ti}", tag.name()), model));
            }
        }
    }
    Ok(out)
}

fn covers(ctx: &mut Ctx) -> Result<()> {
    let models = cover_models(ctx)?;
    let (cutoff, max) = (ctx.cfg.cutoff, ctx.cfg.max_classes);
    let results: Vec<Result<Vec<Entry>>> = models
        .par_iter()
        .map(|(name, model)| {
            let c = effective_cutoff(&model.ext, cutoff, max);
            cover_checks(ctx.suite, name, model, c)
        })
        .collect();
    for r in results {
        ctx.entries.extend(r?);
    }
    if ctx.cfg.ell == 2 {
        let m1 = PadicNumber::from_int(&ctx.quad_config(), -1);
        for (name, e) in ctx.extensions()? {
            let r = check_split(&e)?;
            let want = hilbert(&m1, &e.delta().expect("quadratic")) == 1;
            ctx.eq("cover.split-criterion", format!("{name}/split"), format!("E={name}"), r.splits, want);
        }
    }
    Ok(())
}

fn cover_checks(suite: &str, name: &str, model: &CoverModel, cutoff: u32) -> Result<Vec<Entry>> {
    let e = &model.ext;
    let mut out = Vec::new();
    for (i, w) in torus_classes(e, cutoff)?.iter().enumerate() {
        let input = format!("w={w}, cutoff={cutoff}");
        let fiber = model.fiber(w)?;
        let pts = [model.kappa(&fiber[0])?, model.kappa(&fiber[1])?];
        let mut lam_ok = true;
        let mut inv_ok = true;
        for (m, c) in fiber.iter().zip(&pts) {
            lam_ok &= model.check_lambda_squared(c)?;
            inv_ok &= model.model_eq(&model.kappa_inv(c)?, m)?;
        }
        let same_base = if model.tag.is_projective() {
            e.to_base(&e.div(&pts[0].base, &pts[1].base)?).is_some()
        } else {
            pts[0].base == pts[1].base
        };
        let bij = same_base && pts[0].lambda == pts[1].lambda.neg() && !model.model_eq(&fiber[0], &fiber[1])?;
        out.push(Entry::new(suite, "cover.lambda-squared", format!("{name}/{i:05}/lambda2"), input.clone(), lam_ok.to_string(), "true".into(), lam_ok));
        out.push(Entry::new(suite, "cover.kappa-inverse", format!("{name}/{i:05}/inverse"), input.clone(), inv_ok.to_string(), "true".into(), inv_ok));
        out.push(Entry::new(suite, "cover.kappa-bijective", format!("{name}/{i:05}/fiber"), input.clone(), bij.to_string(), "true".into(), bij));
        if e.is_galois() {
            let l = e.degree() as i64;
            let mut act_ok = true;
            for c in &pts {
                let once = model.weyl_act(1, c)?;
                act_ok &= model.check_lambda_squared(&once)?;
                act_ok &= model.weyl_act(1, &once)? == model.weyl_act(2, c)?;
                act_ok &= model.weyl_act(l, c)? == *c;
            }
            out.push(Entry::new(suite, "cover.weyl-action", format!("{name}/{i:05}/weyl"), input, act_ok.to_string(), "true".into(), act_ok));
        }
    }
    Ok(out)
}

fn qform(ctx: &mut Ctx) -> Result<()> {
    let pc = ctx.quad_config();
    let psi = AdditiveCharacter::standard(&pc, 1);
    for (name, e) in ctx.extensions()? {
        let delta = e.delta().expect("quadratic");
        for i in 0..ctx.cfg.samples {
            let x = ctx.padic(&pc, -1..=1);
            let y = ctx.padic(&pc, -1..=1);
            let a0 = ctx.rng.gen_range(-50..=50);
            let y0 = ctx.rng.gen_range(-50..=50);
            let alpha = e.add(&e.from_int(a0), &e.scale(&e.gen(), &x));
            let yy = e.add(&e.from_int(y0), &e.scale(&e.gen(), &y));
            let input = format!("E={name}, alpha={alpha}, Y={yy}");
            let g = q_form_gram(&e, &alpha, &yy)?;
            let d0 = PadicNumber::from_int(&pc, 4).mul(&x).mul(&y).mul(&delta);
            let want = [[d0, PadicNumber::zero(&pc)], [PadicNumber::zero(&pc), d0.mul(&delta).neg()]];
            let pass = g == want;
            let show = |m: &[[PadicNumber; 2]; 2]| format!("[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1]);
            ctx.push("qform.gram", format!("{name}/{i:05}/gram"), input.clone(), show(&g), show(&want), pass);
            let gf = gamma_factor(&e, &alpha, &yy, &psi)?;
            ctx.eq("qform.gamma", format!("{name}/{i:05}/gamma"), input.clone(), gf.oracle, gf.closed);
            ctx.eq("qform.hasse", format!("{name}/{i:05}/hasse"), input, gf.hasse, hilbert(&delta, &x.mul(&y).neg()));
        }
    }
    Ok(())
}

fn anchor_of(s: Suite) -> &'static str {
    match s {
        Suite::Omega => "identity.omega",
        Suite::Mu => "identity.mu",
        Suite::Lambda => "identity.lambda-sign",
        Suite::DeltaDelta => "identity.delta-at-delta",
        Suite::LMinusN => "identity.l-equals-minus-n",
        Suite::Window => "identity.depth-zero-window",
        Suite::Collapse => "identity.odd-collapse",
    }
}

/// `(extension, character)` pairs each identity suite runs on.
fn identity_cases(ctx: &Ctx) -> Result<Vec<(Suite, String, CharPair, u32)>> {
    let cutoff = ctx.cfg.cutoff;
    let mut out = Vec::new();
    let mut add = |s: Suite, label: String, e: &TameExtension, chi: MultCharacter, c: u32| -> Result<()> {
        out.push((s, label, CharPair::new(e.clone(), chi)?, c));
        Ok(())
    };
    for (name, e) in ctx.extensions()? {
        let p = e.config().p as i64;
        match e.kind() {
            ExtKind::UnramQuad => {
                add(Suite::Omega, format!("{name}/t1"), &e, MultCharacter::new(RootOfUnity::ONE, 1, None), cutoff)?;
                add(Suite::Window, format!("{name}/t1"), &e, MultCharacter::new(RootOfUnity::ONE, 1, None), cutoff)?;
                for n in 1..=3i64 {
                    for c0 in 0..p {
                        let a = e.element(-n, &[c0, 1 + c0 % 2]);
                        let chi = MultCharacter::new(RootOfUnity::ONE, 0, Some(a));
                        let label = format!("{name}/n{n}/c{c0}");
                        if n <= 2 {
                            add(Suite::Mu, label.clone(), &e, chi.clone(), cutoff)?;
                        }
                        add(Suite::Lambda, label.clone(), &e, chi.clone(), cutoff)?;
                        add(Suite::LMinusN, label, &e, chi, cutoff)?;
                    }
                }
            }
            ExtKind::RamQuad => {
                add(Suite::Omega, format!("{name}/t1"), &e, MultCharacter::new(RootOfUnity::ONE, 1, None), cutoff)?;
                let d = e.delta().expect("quadratic");
                for k in 1..=2i64 {
                    for c in 1..p {
                        let a = e.scale(&e.element(0, &[0, c]), &d.pow(-k)?);
                        let chi = MultCharacter::new(RootOfUnity::ONE, 0, Some(a));
                        let label = format!("{name}/k{k}/c{c}");
                        if k == 1 {
                            add(Suite::Mu, label.clone(), &e, chi.clone(), cutoff)?;
                        }
                        add(Suite::DeltaDelta, label, &e, chi, cutoff)?;
                    }
                }
            }
            ExtKind::UnramL | ExtKind::RamGaloisL => {
                let c = effective_cutoff(&e, cutoff, ctx.cfg.max_classes);
                add(Suite::Collapse, format!("{name}/t1"), &e, MultCharacter::new(RootOfUnity::ONE, 1, None), c)?;
            }
        }
    }
    Ok(out)
}

fn identities(ctx: &mut Ctx) -> Result<()> {
    let cases = identity_cases(ctx)?;
    let reports: Vec<Result<SuiteReport>> = cases.par_iter().map(|(s, _, pair, c)| identity_suite(pair, *s, *c)).collect();
    for ((s, label, _, _), rep) in cases.iter().zip(reports) {
        ctx.absorb(anchor_of(*s), &format!("{}/{label}", s.name()), rep?);
    }
    Ok(())
}

fn genuine(e: &TameExtension, chi: MultCharacter, tag: CaseTag, tau: usize, d: Option<QuadraticCharacter>) -> Result<Option<GenuineCharacter>> {
    let pair = CharPair::new(e.clone(), chi)?;
    if !pair.flags.regular {
        return Ok(None);
    }
    let tau = TauCharacter::choices(e)?.swap_remove(tau);
    let model = CoverModel::new(tag, e.clone(), tau, d)?;
    Ok(Some(genuine_from_pair(&pair, &model)?))
}

fn depth_zero(ctx: &mut Ctx) -> Result<()> {
    for (name, e) in ctx.extensions()? {
        if e.kind().is_ramified() {
            continue;
        }
        let grp = GLnq::from_field(e.residue_field().clone())?;
        let cfg = *e.config();
        let qe = e.residue_card();
        let ntau = TauCharacter::choices(&e)?.len();
        let mut jobs = Vec::new();
        let ts = ctx.subsample((0..qe - 1).filter(|&t| representable(t, qe - 1)).collect(), ctx.cfg.samples);
        if e.kind().is_quadratic() {
            for (ui, u) in [RootOfUnity::ONE, RootOfUnity::MINUS_ONE].into_iter().enumerate() {
                for &t in &ts {
                    for tau in 0..ntau {
                        jobs.push((format!("{name}/u{ui}/t{t:04}/tau{tau}"), MultCharacter::new(u, t, None), CaseTag::Gl2, tau, None));
                    }
                }
            }
        } else {
            let stipulated = QuadraticCharacter { disc: PadicNumber::from_int(&cfg, nonsquare_unit(cfg.p) as i64) };
            let split = delta_ef(&e)?.is_trivial(&cfg);
            for &t in &ts {
                let chi = MultCharacter::new(RootOfUnity::ONE, t, None);
                jobs.push((format!("{name}/t{t:04}/delta"), chi.clone(), CaseTag::GlLDeltaNontrivial, 0, Some(stipulated)));
                if split {
                    jobs.push((format!("{name}/t{t:04}/split"), chi, CaseTag::GlLSplit, 0, None));
                }
            }
        }
        // depth-zero values only see w modulo F*U_E^1
        let cutoff = if e.kind().is_quadratic() { ctx.cfg.cutoff } else { 1 };
        let reports: Vec<Result<Option<SuiteReport>>> = jobs
            .par_iter()
            .map(|(_, chi, tag, tau, d)| match genuine(&e, chi.clone(), *tag, *tau, *d)? {
                Some(g) => depth_zero_crosscheck(&g, &grp, cutoff).map(Some),
                None => Ok(None),
            })
            .collect();
        for ((label, ..), rep) in jobs.iter().zip(reports) {
            if let Some(rep) = rep? {
                ctx.absorb("depth-zero.deligne-lusztig", label, rep);
            }
        }
    }
    Ok(())
}

/// Whether `ζ_m^k` fits under the cyclotomic conductor bound.
fn representable(k: u64, m: u64) -> bool {
    RootOfUnity::new(k as i64, m).to_cyc().is_ok()
}

fn regular_pairs(g: &GLnq) -> (Vec<u64>, Vec<FqMultChar>) {
    let size = g.field().size();
    let s: Vec<u64> = (1..size).filter(|&s| g.is_regular(s)).collect();
    let th: Vec<FqMultChar> = (0..size - 1)
        .filter(|&k| representable(k, size - 1))
        .map(|k| FqMultChar { k })
        .filter(|t| t.is_regular(g.field()))
        .collect();
    (s, th)
}

fn normalizer(ctx: &mut Ctx) -> Result<()> {
    let g = GLnq::new(ctx.cfg.gl_n(), ctx.cfg.gl_q())?;
    let (ss, ths) = regular_pairs(&g);
    let pairs = ctx.product_sample(&ss, &ths, ctx.cfg.samples.max(20));
    let label = format!("GL{}_{}", g.n(), g.q());
    let results: Vec<_> = pairs.par_iter().map(|(s, t)| normalizer_identity(&g, *s, t)).collect();
    for ((s, t), r) in pairs.iter().zip(results) {
        let r = r?;
        let input = format!("G={label}, s={s}, k={}", t.k);
        let id = format!("{label}/s{s:05}/k{:05}", t.k);
        ctx.eq("normalizer.normalizer-sum", format!("{id}/normalizer"), input.clone(), &r.full_sum, &r.normalizer_sum);
        ctx.eq("normalizer.torus-orbit", format!("{id}/orbit"), input.clone(), &r.full_sum, &r.torus_times_orbit);
        ctx.eq("normalizer.weyl-order", format!("{id}/weyl"), input, r.weyl_order, g.n() as u64);
    }
    Ok(())
}

fn dl(ctx: &mut Ctx) -> Result<()> {
    let g = GLnq::new(ctx.cfg.gl_n(), ctx.cfg.gl_q())?;
    let label = format!("GL{}_{}", g.n(), g.q());
    let n = g.n();
    ctx.eq("dl.sign", format!("{label}/sign"), format!("G={label}"), sign_rank(&g), sign_stated(n));
    if g.is_enumerated() {
        ctx.eq("dl.group-order", format!("{label}/order"), format!("G={label}"), g.order()?, g.order_formula());
    }
    let (ss, ths) = regular_pairs(&g);
    let pairs = ctx.product_sample(&ss, &ths, 20 * ctx.cfg.samples);
    let f = g.field().clone();
    let q = g.q();
    let m = f.size() - 1;
    let results: Vec<Result<Vec<Entry>>> = pairs
        .par_iter()
        .map(|&(s, t)| {
            let input = format!("G={label}, s={s}, k={}", t.k);
            let id = format!("{label}/s{s:05}/k{:05}", t.k);
            let v = dl_value(&g, s, &t)?;
            let mut out = Vec::new();
            if g.is_enumerated() {
                let pattern = orbit_sum(&g, s, &t)?.scale(sign_stated(n) as i64);
                out.push(Entry::eq(ctx.suite, "dl.orbit-pattern", format!("{id}/pattern"), input.clone(), &v, &pattern));
            }
            let vf = dl_value(&g, f.frob(s), &t)?;
            out.push(Entry::eq(ctx.suite, "dl.frobenius-s", format!("{id}/frob-s"), input.clone(), &v, &vf));
            let tq = FqMultChar { k: t.k * q % m };
            out.push(Entry::eq(ctx.suite, "dl.frobenius-theta", format!("{id}/frob-theta"), input, &v, &dl_value(&g, s, &tq)?));
            Ok(out)
        })
        .collect();
    for r in results {
        ctx.entries.extend(r?);
    }
    Ok(())
}

/// Level `≤ 1` characters with `χ(ϖ) = 1` on the three quadratic extensions.
pub fn separation_family(pc: &PrimeConfig) -> Result<Vec<(String, CharPair)>> {
    let mut out = Vec::new();
    for (name, e) in quadratic_extensions(pc)? {
        let p = pc.p as i64;
        let qe = e.residue_card();
        let mut chis = Vec::new();
        for t in 0..qe - 1 {
            chis.push((format!("t{t}"), MultCharacter::new(RootOfUnity::ONE, t, None)));
            if e.kind() == ExtKind::UnramQuad {
                for c0 in 0..p {
                    for c1 in 1..p {
                        let a = e.element(-1, &[c0, c1]);
                        chis.push((format!("t{t}/a{c0}.{c1}"), MultCharacter::new(RootOfUnity::ONE, t, Some(a))));
                    }
                }
            } else {
                let d = e.delta().expect("quadratic");
                for c in 1..p {
                    let a = e.scale(&e.element(0, &[0, c]), &d.inv()?);
                    chis.push((format!("t{t}/a{c}"), MultCharacter::new(RootOfUnity::ONE, t, Some(a))));
                }
            }
        }
        for (label, chi) in chis {
            let pair = CharPair::new(e.clone(), chi)?;
            if pair.flags.admissible && pair.flags.level <= 1 {
                out.push((format!("{name}/{label}"), pair));
            }
        }
    }
    Ok(out)
}

/// `χ_b = χ_a∘σ^i` for some `i`, by evaluation on generators of `E*/U_E^2`.
pub fn weyl_conjugate(a: &CharPair, b: &CharPair) -> Result<bool> {
    let (ea, eb) = (&a.ext, &b.ext);
    if ea.kind() != eb.kind() || ea.delta() != eb.delta() {
        return Ok(false);
    }
    let gens = generators(ea, 1)?;
    for i in 0..ea.degree() as i64 {
        let mut same = true;
        for g in &gens {
            if b.chi.eval(ea, g)? != a.chi.eval(ea, &ea.galois_apply(i, g)?)? {
                same = false;
                break;
            }
        }
        if same {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Characters sampled from a large separation family, with their conjugates.
fn separation_subset(ctx: &mut Ctx, fam: Vec<(String, CharPair)>) -> Result<Vec<(String, CharPair)>> {
    if fam.len() <= 2 * SEPARATION_SEEDS {
        return Ok(fam);
    }
    let mut seeds: Vec<usize> = (0..fam.len()).collect();
    seeds.shuffle(&mut ctx.rng);
    seeds.truncate(SEPARATION_SEEDS);
    let keep: Vec<Result<bool>> = fam
        .par_iter()
        .enumerate()
        .map(|(j, (_, b))| {
            if seeds.contains(&j) {
                return Ok(true);
            }
            for &i in &seeds {
                if weyl_conjugate(&fam[i].1, b)? {
                    return Ok(true);
                }
            }
            Ok(false)
        })
        .collect();
    let mut out = Vec::new();
    for (c, k) in fam.into_iter().zip(keep) {
        if k? {
            out.push(c);
        }
    }
    Ok(out)
}

fn separation(ctx: &mut Ctx) -> Result<()> {
    let pc = ctx.quad_config();
    let cutoff = ctx.cfg.cutoff;
    let fam = separation_subset(ctx, separation_family(&pc)?)?;
    let data: Vec<Result<_>> = fam
        .par_iter()
        .map(|(_, pair)| {
            let tau = TauCharacter::choices(&pair.ext)?.swap_remove(0);
            let model = CoverModel::new(CaseTag::Gl2, pair.ext.clone(), tau, None)?;
            separation_data(&genuine_from_pair(pair, &model)?, cutoff)
        })
        .collect();
    let data: Vec<_> = data.into_iter().collect::<Result<_>>()?;
    let idx: Vec<(usize, usize)> = (0..fam.len()).flat_map(|i| (i + 1..fam.len()).map(move |j| (i, j))).collect();
    let results: Vec<Result<Entry>> = idx
        .par_iter()
        .map(|&(i, j)| {
            let conj = weyl_conjugate(&fam[i].1, &fam[j].1)?;
            let outcome = separate(&data[i], &data[j])?;
            let (got, pass) = match &outcome {
                Separation::EquivalentByWeyl => ("equivalent".to_string(), conj),
                Separation::SeparatedAt { w, .. } => (format!("separated at {w}"), !conj),
                Separation::Inconclusive => ("inconclusive".to_string(), false),
            };
            let want = if conj { "equivalent" } else { "separated" };
            let input = format!("A={}, B={}, cutoff={cutoff}", fam[i].0, fam[j].0);
            let id = format!("{}/{}", fam[i].0, fam[j].0);
            Ok(Entry::new(ctx.suite, "separation.weyl-conjugacy", id, input, got, want.into(), pass))
        })
        .collect();
    for r in results {
        ctx.entries.push(r?);
    }
    Ok(())
}

/// Default characters for the invariance suite: depth zero and positive level per extension.
fn default_formula_characters(ctx: &Ctx) -> Result<Vec<(String, TameExtension, MultCharacter)>> {
    let mut out = Vec::new();
    for (name, e) in ctx.extensions()? {
        let one = RootOfUnity::ONE;
        match e.kind() {
            ExtKind::UnramQuad => {
                out.push((format!("{name}/t1"), e.clone(), MultCharacter::new(one, 1, None)));
                out.push((format!("{name}/t2/a"), e.clone(), MultCharacter::new(one, 2, Some(e.element(-2, &[1, 1])))));
            }
            ExtKind::RamQuad => {
                let d = e.delta().expect("quadratic");
                out.push((format!("{name}/t1/a1"), e.clone(), MultCharacter::new(RootOfUnity::MINUS_ONE, 1, Some(e.scale(&e.gen(), &d.inv()?)))));
                out.push((format!("{name}/t1/a2"), e.clone(), MultCharacter::new(one, 1, Some(e.scale(&e.gen(), &d.pow(-2)?)))));
            }
            ExtKind::UnramL => {
                for t in [1u64, 5] {
                    out.push((format!("{name}/t{t}"), e.clone(), MultCharacter::new(one, t, None)));
                }
            }
            ExtKind::RamGaloisL => {
                let d = e.delta().expect("ramified");
                let a = e.scale(&e.element(0, &[0, 0, 1]), &d.inv()?);
                out.push((format!("{name}/t1/a"), e.clone(), MultCharacter::new(one, 1, Some(a))));
            }
        }
    }
    Ok(out)
}

fn tag_for(e: &TameExtension) -> Result<(CaseTag, Option<QuadraticCharacter>)> {
    if e.kind().is_quadratic() {
        return Ok((CaseTag::Gl2, None));
    }
    let cfg = *e.config();
    if delta_ef(e)?.is_trivial(&cfg) {
        Ok((CaseTag::GlLSplit, None))
    } else {
        Ok((CaseTag::GlLDeltaNontrivial, None))
    }
}

fn invariance(ctx: &mut Ctx) -> Result<()> {
    let chars = match &ctx.cfg.characters {
        Some(path) => CharacterFile::load(path)
            .map_err(|_| Error::InvalidConfig("character file could not be read"))?
            .resolve(&ctx.pc)?,
        None => default_formula_characters(ctx)?,
    };
    for (label, e, chi) in chars {
        let (tag, d) = tag_for(&e)?;
        let (Some(g0), Some(g1)) = (genuine(&e, chi.clone(), tag, 0, d)?, genuine(&e, chi.clone(), tag, 1, d)?) else {
            continue;
        };
        let level = chi.level(&e);
        let cutoff = effective_cutoff(&e, ctx.cfg.cutoff.max(level.div_ceil(2) + 1), ctx.cfg.max_classes);
        let mut pts = Vec::new();
        for w in regular_classes(&e, cutoff)? {
            let dep = n_depth(&e, &w)?.depth;
            if (level == 0 && dep.is_zero()) || (level > 0 && dep.within_half_depth(level)) {
                pts.push(w);
            }
        }
        if pts.is_empty() {
            continue;
        }
        for i in 0..ctx.cfg.samples {
            let w = pts.choose(&mut ctx.rng).expect("nonempty").clone();
            let input = format!("chi={label}, w={w}");
            let v = eval_formula(&g0, &w, PositiveSystem::STANDARD)?;
            let id = format!("{label}/{i:05}");
            ctx.eq("formula.positive-system", format!("{id}/positive-system"), input.clone(), &v, &eval_formula(&g0, &w, PositiveSystem::OPPOSITE)?);
            ctx.eq("formula.tau", format!("{id}/tau"), input.clone(), &v, &eval_formula(&g1, &w, PositiveSystem::STANDARD)?);
            ctx.eq("formula.literal", format!("{id}/literal"), input.clone(), &v, &eval_formula_literal(&g0, &w)?);
            for k in 1..e.degree() as i64 {
                let sw = e.galois_apply(k, &w)?;
                ctx.eq("formula.weyl", format!("{id}/weyl{k}"), input.clone(), &v, &eval_formula(&g0, &sw, PositiveSystem::STANDARD)?);
            }
        }
    }
    Ok(())
}
