//! Built-in example registry: the models, map families, and jets the
//! toolkit ships with, plus the deterministic suite that exercises them.
//!
//! Invariants:
//! - Registry construction is a pure function of `(degree, seed)`; all
//!   randomized parameter choices flow through seeded samplers.
//! - Every case carries a minimum working degree. Below it the suite emits
//!   insufficient-cap records instead of verdicts computed on a silently
//!   truncated model.
//! - Case records are sorted by case name in the report, so two runs with
//!   the same settings produce byte-identical output.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use segrekit_core::hspm::{
    compose_hspm, condition_d_witnesses, hspm_verify, invert_hspm, jet_extract, real_slice_check,
    segre_submersive, JetPair, SegrePreservingMap,
};
use segrekit_core::model::{analyze_model, GenericModel};
use segrekit_core::multiindex::MultiIndex;
use segrekit_core::rational::GaussianRational;
use segrekit_core::reflection::{
    jet_determination_oracle, jet_extends_to_automorphism, partner_from_left, partner_from_right,
    ExtensionVerdict, JetDeterminationInput, JetDeterminationVerdict,
};
use segrekit_core::sample::RationalSampler;
use segrekit_core::segre::{segre_map, symmetric_point_pullback};
use segrekit_core::series::TruncatedSeries;
use segrekit_core::{Result, SegreError};

use crate::report::{analysis_detail, verify_record, CaseReport, CheckRecord, Report};

/// A registered map together with the names of its endpoint models.
#[derive(Clone, Debug)]
pub struct CorpusMap {
    pub map: SegrePreservingMap,
    pub source: String,
    pub target: String,
}

/// A registered jet table together with the names of its endpoint models.
#[derive(Clone, Debug)]
pub struct CorpusJet {
    pub jets: JetPair,
    pub source: String,
    pub target: String,
}

/// The named models, maps, and jets available at a given degree cap.
///
/// Entities whose defining data does not fit under the cap are absent;
/// [`corpus_report`] still lists their cases, as insufficient-cap records.
pub struct Corpus {
    pub degree: u32,
    pub seed: u64,
    pub models: BTreeMap<String, GenericModel>,
    pub maps: BTreeMap<String, CorpusMap>,
    pub jets: BTreeMap<String, CorpusJet>,
}

fn gr(re: i64, im: i64) -> GaussianRational {
    GaussianRational::from_parts(re, 1, im, 1)
}

fn two_i() -> GaussianRational {
    gr(0, 2)
}

/// Builds `Q = tau + 2i * phi` for a hypersurface with `m` z-variables,
/// `phi` given as `(z-and-chi exponents, coefficient)` terms.
fn hypersurface(m: usize, cap: u32, phi_terms: &[(Vec<u16>, GaussianRational)]) -> GenericModel {
    let arity = 2 * m + 1;
    let mut q = TruncatedSeries::variable(arity, cap, 2 * m);
    for (exps, c) in phi_terms {
        assert_eq!(exps.len(), 2 * m, "term must list z and chi exponents");
        let mut full = exps.clone();
        full.push(0);
        q = q.add(&TruncatedSeries::monomial(
            arity,
            cap,
            MultiIndex::new(full),
            &two_i() * c,
        ));
    }
    GenericModel::from_normal(m, 1, vec![q]).expect("registry model must be valid")
}

/// `Q = tau + 2i z chi` in one z-variable.
pub fn lewy_model(cap: u32) -> GenericModel {
    hypersurface(1, cap, &[(vec![1, 1], gr(1, 0))])
}

/// `Q = tau + 2i z^2 chi^2`: finite type, degenerate at every order.
pub fn quartic_model(cap: u32) -> GenericModel {
    hypersurface(1, cap, &[(vec![2, 2], gr(1, 0))])
}

/// Graph form `Im w = |z|^2 (1 + Re z^2)`, entered through the real-graph
/// constructor so the normal form is computed rather than transcribed.
pub fn quartic_mixed_model(cap: u32) -> GenericModel {
    let half = GaussianRational::from_ratio(1, 2);
    let mono = |e: Vec<u16>, c: GaussianRational| {
        TruncatedSeries::monomial(3, cap, MultiIndex::new(e), c)
    };
    let phi = mono(vec![1, 1, 0], gr(1, 0))
        .add(&mono(vec![3, 1, 0], half.clone()))
        .add(&mono(vec![1, 3, 0], half));
    GenericModel::from_real_graph(1, 1, vec![phi]).expect("registry model must be valid")
}

/// The sphere-type hypersurface `Q = tau + 2i sum_j z_j chi_j` in `m`
/// z-variables.
pub fn sphere_model(m: usize, cap: u32) -> GenericModel {
    let terms: Vec<(Vec<u16>, GaussianRational)> = (0..m)
        .map(|j| {
            let mut e = vec![0u16; 2 * m];
            e[j] = 1;
            e[m + j] = 1;
            (e, gr(1, 0))
        })
        .collect();
    hypersurface(m, cap, &terms)
}

/// `Q = tau + 2i (z1 chi1 - z2 chi2)`: the signature-(1,1) partner of the
/// two-variable sphere.
pub fn mixed_signature_model(cap: u32) -> GenericModel {
    hypersurface(
        2,
        cap,
        &[(vec![1, 0, 1, 0], gr(1, 0)), (vec![0, 1, 0, 1], gr(-1, 0))],
    )
}

/// Graph form `Im w = |z|^2 + 2 Re[z^4 zbar^2 (1 + eps i Re w)]` with
/// `eps = 1` or `-1`; the two signs give models that no real-slice map
/// identifies, yet a split map does.
pub fn quartic_coefficient_model(cap: u32, eps: i64) -> GenericModel {
    let mono = |e: Vec<u16>, c: GaussianRational| {
        TruncatedSeries::monomial(3, cap, MultiIndex::new(e), c)
    };
    let phi = mono(vec![1, 1, 0], gr(1, 0))
        .add(&mono(vec![4, 2, 0], gr(1, 0)))
        .add(&mono(vec![4, 2, 1], gr(0, eps)))
        .add(&mono(vec![2, 4, 0], gr(1, 0)))
        .add(&mono(vec![2, 4, 1], gr(0, -eps)));
    GenericModel::from_real_graph(1, 1, vec![phi]).expect("registry model must be valid")
}

/// `Im w = |z1|^2 + 2 Re(z3 zbar1 - z3 zbar2) - |z2|^2` in three
/// z-variables: finite type, and every column pair of the linearized map
/// below gives an invertible minor.
pub fn minor_rich_model(cap: u32) -> GenericModel {
    hypersurface(
        3,
        cap,
        &[
            (vec![1, 0, 0, 1, 0, 0], gr(1, 0)),
            (vec![0, 1, 0, 0, 1, 0], gr(-1, 0)),
            (vec![0, 0, 1, 1, 0, 0], gr(1, 0)),
            (vec![0, 0, 1, 0, 1, 0], gr(-1, 0)),
            (vec![1, 0, 0, 0, 0, 1], gr(1, 0)),
            (vec![0, 1, 0, 0, 0, 1], gr(-1, 0)),
        ],
    )
}

/// The codimension-two product `Im w1 = |z1|^2, Im w2 = |z2|^2`.
pub fn product_model(cap: u32) -> GenericModel {
    let arity = 6;
    let mono = |e: Vec<u16>| TruncatedSeries::monomial(arity, cap, MultiIndex::new(e), two_i());
    let q1 = TruncatedSeries::variable(arity, cap, 4).add(&mono(vec![1, 0, 1, 0, 0, 0]));
    let q2 = TruncatedSeries::variable(arity, cap, 5).add(&mono(vec![0, 1, 0, 1, 0, 0]));
    GenericModel::from_normal(2, 2, vec![q1, q2]).expect("registry model must be valid")
}

/// `Q = tau + 2i (z^2 chi^2 + z^n chi^n)` for `n > 2`.
pub fn two_circle_model(n: u16, cap: u32) -> GenericModel {
    hypersurface(1, cap, &[(vec![2, 2], gr(1, 0)), (vec![n, n], gr(1, 0))])
}

fn var(arity: usize, cap: u32, v: usize) -> TruncatedSeries {
    TruncatedSeries::variable(arity, cap, v)
}

/// Moebius-type automorphism of the Lewy-model pair: parameters
/// `(a, b, at, bt, c)` with `a, at` nonzero give
/// `f = a (z + b w) / den`, `g = a at w / den` with
/// `den = 1 - (c + i b bt) w - 2i bt z`, and the tilde side mirrored.
pub fn moebius_member(
    cap: u32,
    a: &GaussianRational,
    b: &GaussianRational,
    at: &GaussianRational,
    bt: &GaussianRational,
    c: &GaussianRational,
) -> SegrePreservingMap {
    let z = var(2, cap, 0);
    let w = var(2, cap, 1);
    let one = TruncatedSeries::one(2, cap);
    let i = GaussianRational::i();
    let ibbt = &(&i * b) * bt;
    let aat = a * at;

    let den = one
        .sub(&w.scale(&(c + &ibbt)))
        .sub(&z.scale(&(&gr(0, 2) * bt)));
    let den_inv = den.invert_unit().expect("denominator is a unit");
    let f = z.add(&w.scale(b)).scale(a).mul(&den_inv);
    let g = w.scale(&aat).mul(&den_inv);

    let tden = one
        .sub(&w.scale(&(c - &ibbt)))
        .add(&z.scale(&(&gr(0, 2) * b)));
    let tden_inv = tden.invert_unit().expect("denominator is a unit");
    let ft = z.add(&w.scale(bt)).scale(at).mul(&tden_inv);
    let gt = w.scale(&aat).mul(&tden_inv);

    SegrePreservingMap::new((1, 1), (1, 1), vec![f], vec![g], vec![ft], vec![gt])
        .expect("family member is a valid map pair")
}

/// Samples `(a, b, at, bt, c)` for [`moebius_member`]: `a, at` nonzero.
pub fn moebius_params(sampler: &mut RationalSampler) -> [GaussianRational; 5] {
    [
        sampler.nonzero_gaussian(3),
        sampler.gaussian(3),
        sampler.nonzero_gaussian(3),
        sampler.gaussian(3),
        sampler.gaussian(3),
    ]
}

/// Linear maps `(a z, c^2 w, (c/a) chi, c^2 tau)` on a two-circle model
/// with exponents `(2, n)`; they preserve it exactly when `c^(n-2) = 1`.
pub fn circle_scaling_map(
    cap: u32,
    a: &GaussianRational,
    c: &GaussianRational,
) -> SegrePreservingMap {
    let c2 = c * c;
    let f = var(2, cap, 0).scale(a);
    let g = var(2, cap, 1).scale(&c2);
    let ft = var(2, cap, 0).scale(&(c * &a.inv().expect("a is nonzero")));
    let gt = var(2, cap, 1).scale(&c2);
    SegrePreservingMap::new((1, 1), (1, 1), vec![f], vec![g], vec![ft], vec![gt])
        .expect("scaling member is a valid map pair")
}

/// Square-root family on the plain quartic model:
/// `f = a z (1 + alpha w)^(-1/2)`, `g = a^2 at^2 w / (1 + alpha w)`, the
/// tilde side using `at` in place of `a` and the same `alpha`.
pub fn quartic_root_member(
    cap: u32,
    a: &GaussianRational,
    at: &GaussianRational,
    alpha: &GaussianRational,
) -> SegrePreservingMap {
    let minus_half = BigRational::new(BigInt::from(-1), BigInt::from(2));
    let a2 = a * a;
    let at2 = at * at;
    let scale2 = &a2 * &at2;
    let side = |p: &GaussianRational| {
        let x = var(2, cap, 0);
        let y = var(2, cap, 1);
        let base = TruncatedSeries::one(2, cap).add(&y.scale(alpha));
        let root = base
            .binom_pow(&minus_half)
            .expect("base has constant term one");
        let num = x.scale(p).mul(&root);
        let den_inv = base.invert_unit().expect("base is a unit");
        let last = y.scale(&scale2).mul(&den_inv);
        (num, last)
    };
    let (f, g) = side(a);
    let (ft, gt) = side(at);
    SegrePreservingMap::new((1, 1), (1, 1), vec![f], vec![g], vec![ft], vec![gt])
        .expect("root-family member is a valid map pair")
}

/// Diagonal family from the two-variable sphere to its mixed-signature
/// partner: `(c1 z1, c2 z2, a w, (a/c1) chi1, -(a/c2) chi2, a tau)`.
pub fn signature_cross_member(
    cap: u32,
    c1: &GaussianRational,
    c2: &GaussianRational,
    a: &GaussianRational,
) -> SegrePreservingMap {
    let f = vec![var(3, cap, 0).scale(c1), var(3, cap, 1).scale(c2)];
    let g = vec![var(3, cap, 2).scale(a)];
    let ft = vec![
        var(3, cap, 0).scale(&(a * &c1.inv().expect("c1 nonzero"))),
        var(3, cap, 1).scale(&(-&(a * &c2.inv().expect("c2 nonzero")))),
    ];
    let gt = vec![var(3, cap, 2).scale(a)];
    SegrePreservingMap::new((2, 1), (2, 1), f, g, ft, gt)
        .expect("signature-cross member is a valid map pair")
}

/// One of the four sign automorphisms `(sz z, sw w, scz chi, sct tau)` of
/// the mixed quartic model.
pub fn sign_map(cap: u32, sz: i64, sw: i64, scz: i64, sct: i64) -> SegrePreservingMap {
    SegrePreservingMap::new(
        (1, 1),
        (1, 1),
        vec![var(2, cap, 0).scale(&gr(sz, 0))],
        vec![var(2, cap, 1).scale(&gr(sw, 0))],
        vec![var(2, cap, 0).scale(&gr(scz, 0))],
        vec![var(2, cap, 1).scale(&gr(sct, 0))],
    )
    .expect("sign map is a valid map pair")
}

/// The split map `(iz, -w, i chi, -tau)` between the two
/// quartic-coefficient models; no real-slice map identifies them.
pub fn quartic_coefficient_map(cap: u32) -> SegrePreservingMap {
    SegrePreservingMap::new(
        (1, 1),
        (1, 1),
        vec![var(2, cap, 0).scale(&gr(0, 1))],
        vec![var(2, cap, 1).scale(&gr(-1, 0))],
        vec![var(2, cap, 0).scale(&gr(0, 1))],
        vec![var(2, cap, 1).scale(&gr(-1, 0))],
    )
    .expect("coefficient-twist map is a valid map pair")
}

/// The linear submersion from [`minor_rich_model`] to the two-variable
/// sphere: `(z1 + z3, z1 - z2, w, chi1 - chi2, chi2 + chi3, tau)`.
pub fn minor_rich_map(cap: u32) -> SegrePreservingMap {
    let a = 4;
    let f = vec![
        var(a, cap, 0).add(&var(a, cap, 2)),
        var(a, cap, 0).sub(&var(a, cap, 1)),
    ];
    let g = vec![var(a, cap, 3)];
    let ft = vec![
        var(a, cap, 0).sub(&var(a, cap, 1)),
        var(a, cap, 1).add(&var(a, cap, 2)),
    ];
    let gt = vec![var(a, cap, 3)];
    SegrePreservingMap::new((3, 1), (2, 1), f, g, ft, gt)
        .expect("minor-rich map is a valid map pair")
}

/// Widening family from the codimension-two product into the
/// three-variable sphere, indexed by `r >= 1`; members with `r >= 2` share
/// their whole order-1 jet, so no finite first-order data separates them.
pub fn widening_member(cap: u32, r: u32) -> SegrePreservingMap {
    let a = 4;
    let z1 = var(a, cap, 0);
    let z2 = var(a, cap, 1);
    let w1 = var(a, cap, 2);
    let w2 = var(a, cap, 3);
    let f = vec![z1, z2, w1.clone()];
    let g = vec![w1.add(&w2)];

    let chi1 = var(a, cap, 0);
    let chi2 = var(a, cap, 1);
    let t1 = var(a, cap, 2);
    let t2 = var(a, cap, 3);
    let m2i = gr(0, -2);
    let t1r = t1.pow(r);
    let ft = vec![
        chi1.add(&chi1.mul(&t1).scale(&m2i))
            .add(&chi1.mul(&t1r).scale(&m2i)),
        chi2,
        t1r.add(&t1),
    ];
    let gt = vec![t1
        .add(&t2)
        .add(&t1.pow(2).scale(&m2i))
        .add(&t1.pow(r + 1).scale(&m2i))];
    SegrePreservingMap::new((2, 2), (3, 1), f, g, ft, gt)
        .expect("widening member is a valid map pair")
}

/// Minimum degree cap at which each named case computes honestly.
pub fn case_min_degrees() -> BTreeMap<&'static str, u32> {
    BTreeMap::from([
        ("coefficient_twist", 8),
        ("eight_circle", 8),
        ("lewy", 2),
        ("minor_rich", 2),
        ("moebius_family", 2),
        ("moebius_jets", 6),
        ("moebius_member", 2),
        ("quartic", 4),
        ("quartic_pair", 4),
        ("quartic_root_family", 4),
        ("segre_identities", 2),
        ("sign_group", 4),
        ("signature_cross", 2),
        ("six_circle", 6),
        ("sphere_c4", 2),
        ("widening", 4),
    ])
}

/// Per-entity parameter seeds, derived from the run seed so families use
/// independent deterministic streams.
fn stream(seed: u64, tag: u64) -> u64 {
    seed ^ tag.wrapping_mul(0x9e3779b97f4a7c15)
}

/// The sampled parameters behind the registry, so cases can rebuild
/// members at padded caps without re-running the samplers inconsistently.
pub struct CorpusParams {
    pub moebius: [GaussianRational; 5],
    pub moebius_real: [GaussianRational; 3],
    pub cross: [GaussianRational; 3],
    pub root: [GaussianRational; 3],
    pub circle: [GaussianRational; 2],
}

/// Draws every registry parameter from `seed`-derived streams.
pub fn corpus_params(seed: u64) -> CorpusParams {
    let mut m = RationalSampler::new(stream(seed, 1));
    let moebius = moebius_params(&mut m);
    let mut r = RationalSampler::new(stream(seed, 2));
    let moebius_real = [
        r.nonzero_gaussian(3),
        r.gaussian(3),
        GaussianRational::new(r.rational(3), BigRational::from(BigInt::from(0))),
    ];
    let mut x = RationalSampler::new(stream(seed, 3));
    let cross = [
        x.nonzero_gaussian(3),
        x.nonzero_gaussian(3),
        x.nonzero_gaussian(3),
    ];
    let mut q = RationalSampler::new(stream(seed, 4));
    let root = [
        q.nonzero_gaussian(2),
        q.nonzero_gaussian(2),
        q.gaussian(2),
    ];
    let mut c = RationalSampler::new(stream(seed, 5));
    let circle = [c.nonzero_gaussian(3), c.nonzero_gaussian(3)];
    CorpusParams {
        moebius,
        moebius_real,
        cross,
        root,
        circle,
    }
}

/// The real-form member built from [`CorpusParams::moebius_real`]: the
/// tilde parameters are the conjugates and the drift is real, so the pair
/// restricts to a single map on the real points.
pub fn moebius_real_member(cap: u32, p: &CorpusParams) -> SegrePreservingMap {
    let [a, b, c] = &p.moebius_real;
    moebius_member(cap, a, b, &a.conj(), &b.conj(), c)
}

/// Builds every model, map, and jet table that fits under `degree`.
pub fn build_corpus(degree: u32, seed: u64) -> Corpus {
    let cap = degree;
    let p = corpus_params(seed);
    let mut models: BTreeMap<String, GenericModel> = BTreeMap::new();
    let mut maps: BTreeMap<String, CorpusMap> = BTreeMap::new();
    let mut jets: BTreeMap<String, CorpusJet> = BTreeMap::new();

    {
        let mut model = |name: &str, min: u32, built: &dyn Fn() -> GenericModel| {
            if degree >= min {
                models.insert(name.to_string(), built());
            }
        };
        model("lewy", 2, &|| lewy_model(cap));
        model("quartic", 4, &|| quartic_model(cap));
        model("quartic_mixed", 4, &|| quartic_mixed_model(cap));
        model("sphere_c3", 2, &|| sphere_model(2, cap));
        model("sphere_c4", 2, &|| sphere_model(3, cap));
        model("mixed_signature", 2, &|| mixed_signature_model(cap));
        model("coefficient_plus", 8, &|| quartic_coefficient_model(cap, 1));
        model("coefficient_minus", 8, &|| quartic_coefficient_model(cap, -1));
        model("minor_rich", 2, &|| minor_rich_model(cap));
        model("product_c4", 2, &|| product_model(cap));
        model("six_circle", 6, &|| two_circle_model(3, cap));
        model("eight_circle", 8, &|| two_circle_model(4, cap));
    }

    {
        let mut map = |name: &str,
                       min: u32,
                       source: &str,
                       target: &str,
                       built: &dyn Fn() -> SegrePreservingMap| {
            if degree >= min {
                maps.insert(
                    name.to_string(),
                    CorpusMap {
                        map: built(),
                        source: source.to_string(),
                        target: target.to_string(),
                    },
                );
            }
        };

        map("moebius_member", 2, "lewy", "lewy", &|| {
            let [a, b, at, bt, c] = &p.moebius;
            moebius_member(cap, a, b, at, bt, c)
        });
        map("moebius_member_real", 2, "lewy", "lewy", &|| {
            moebius_real_member(cap, &p)
        });
        map("quartic_pair_H1", 4, "quartic", "quartic", &|| {
            sign_map(cap, 1, 1, 1, 1)
        });
        map("quartic_pair_H2", 4, "quartic", "quartic", &|| {
            sign_map(cap, 1, 1, -1, 1)
        });
        map("quartic_mixed_H1", 4, "quartic_mixed", "quartic_mixed", &|| {
            sign_map(cap, 1, 1, 1, 1)
        });
        map("quartic_mixed_H2", 4, "quartic_mixed", "quartic_mixed", &|| {
            sign_map(cap, -1, 1, -1, 1)
        });
        map("quartic_mixed_H3", 4, "quartic_mixed", "quartic_mixed", &|| {
            sign_map(cap, -1, -1, 1, -1)
        });
        map("quartic_mixed_H4", 4, "quartic_mixed", "quartic_mixed", &|| {
            sign_map(cap, 1, -1, -1, -1)
        });
        map("signature_cross", 2, "sphere_c3", "mixed_signature", &|| {
            signature_cross_member(cap, &p.cross[0], &p.cross[1], &p.cross[2])
        });
        map("coefficient_twist", 8, "coefficient_plus", "coefficient_minus", &|| {
            quartic_coefficient_map(cap)
        });
        map("minor_rich", 2, "minor_rich", "sphere_c3", &|| minor_rich_map(cap));
        map("widening_H1", 2, "product_c4", "sphere_c4", &|| widening_member(cap, 1));
        map("widening_H2", 3, "product_c4", "sphere_c4", &|| widening_member(cap, 2));
        map("widening_H3", 4, "product_c4", "sphere_c4", &|| widening_member(cap, 3));
        map("quartic_root_member", 4, "quartic", "quartic", &|| {
            quartic_root_member(cap, &p.root[0], &p.root[1], &p.root[2])
        });
        map("six_circle_id", 6, "six_circle", "six_circle", &|| {
            circle_scaling_map(cap, &p.circle[0], &gr(1, 0))
        });
        map("eight_circle_plus", 8, "eight_circle", "eight_circle", &|| {
            circle_scaling_map(cap, &p.circle[1], &gr(1, 0))
        });
        map("eight_circle_minus", 8, "eight_circle", "eight_circle", &|| {
            circle_scaling_map(cap, &p.circle[1], &gr(-1, 0))
        });
    }

    if let Some(member) = maps.get("moebius_member") {
        if let Ok(j) = jet_extract(&member.map, 2) {
            jets.insert(
                "moebius_jets".to_string(),
                CorpusJet {
                    jets: j,
                    source: "lewy".to_string(),
                    target: "lewy".to_string(),
                },
            );
        }
    }

    Corpus {
        degree,
        seed,
        models,
        maps,
        jets,
    }
}

fn record_result<T>(
    check: &str,
    result: Result<T>,
    judge: impl FnOnce(T) -> CheckRecord,
) -> CheckRecord {
    match result {
        Ok(value) => judge(value),
        Err(SegreError::InsufficientCap { have, need, context }) => CheckRecord::insufficient_cap(
            check,
            format!("{context}: have cap {have}, need {need}"),
        ),
        Err(SegreError::InsufficientJetOrder { have, need, context }) => {
            CheckRecord::insufficient_cap(
                check,
                format!("{context}: have jet order {have}, need {need}"),
            )
        }
        Err(err) => CheckRecord::fail(check, err.to_string()),
    }
}

fn gated_case(name: &str, min: u32, degree: u32) -> CaseReport {
    CaseReport::new(
        name,
        vec![CheckRecord::insufficient_cap(
            "degree-gate",
            format!("case needs degree cap at least {min}, have {degree}"),
        )],
    )
}

fn verify_check(
    name: &str,
    map: &SegrePreservingMap,
    src: &GenericModel,
    tgt: &GenericModel,
) -> CheckRecord {
    record_result(name, hspm_verify(map, src, tgt), |rep| {
        verify_record(name, &rep)
    })
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(name: &str, got: &T, want: &T) -> CheckRecord {
    CheckRecord::expect(name, got == want, format!("got {got:?}, expected {want:?}"))
}

fn expect_real_slice(name: &str, map: &SegrePreservingMap, want: bool) -> CheckRecord {
    let got = real_slice_check(map);
    CheckRecord::expect(name, got == want, format!("real-slice {got}, expected {want}"))
}

/// The symmetric-point identity at level `2r`: exact vanishing.
pub fn segre_symmetric_vanishes(model: &GenericModel, r: usize) -> bool {
    let v = segre_map(model, 2 * r);
    symmetric_point_pullback(&v, r).iter().all(|c| c.is_zero())
}

/// Level stability: zeroing the last block of the level-`(l+1)` mapping
/// recovers the level-`l` mapping exactly.
pub fn segre_level_stable(model: &GenericModel, l: usize) -> bool {
    let m = model.m();
    let cap = model.cap();
    let args: Vec<TruncatedSeries> = (0..(l + 1) * m)
        .map(|v| {
            if v < l * m {
                TruncatedSeries::variable(l * m, cap, v)
            } else {
                TruncatedSeries::zero(l * m, cap)
            }
        })
        .collect();
    let hi = segre_map(model, l + 1);
    let lo = segre_map(model, l);
    hi.components()
        .iter()
        .zip(lo.components())
        .all(|(h, l_comp)| h.substitute(&args) == *l_comp)
}

fn maps_equal_to(map: &SegrePreservingMap, other: &SegrePreservingMap, cap: u32) -> bool {
    let t = |s: &TruncatedSeries| s.truncate(cap);
    map.f().iter().map(t).eq(other.f().iter().map(t))
        && map.g().iter().map(t).eq(other.g().iter().map(t))
        && map.ft().iter().map(t).eq(other.ft().iter().map(t))
        && map.gt().iter().map(t).eq(other.gt().iter().map(t))
}

struct CaseCtx<'c> {
    corpus: &'c Corpus,
    degree: u32,
    seed: u64,
    bracket_bound: u32,
    params: CorpusParams,
}

impl<'c> CaseCtx<'c> {
    fn model(&self, name: &str) -> &GenericModel {
        self.corpus
            .models
            .get(name)
            .unwrap_or_else(|| panic!("registry model {name} missing at this degree"))
    }

    fn map(&self, name: &str) -> &CorpusMap {
        self.corpus
            .maps
            .get(name)
            .unwrap_or_else(|| panic!("registry map {name} missing at this degree"))
    }

    fn verify_registered(&self, name: &str) -> CheckRecord {
        let entry = self.map(name);
        verify_check(
            &format!("verify-{name}"),
            &entry.map,
            self.model(&entry.source),
            self.model(&entry.target),
        )
    }
}

fn case_lewy(ctx: &CaseCtx) -> CaseReport {
    let model = ctx.model("lewy");
    let records = match analyze_model(model, ctx.bracket_bound, ctx.seed) {
        Ok(rep) => vec![
            CheckRecord::pass_detail("analysis", analysis_detail(&rep)),
            expect_eq("finite-type-order", &rep.finite_type_order, &Some(2)),
            expect_eq("nondegeneracy-order", &rep.nondeg_order_k, &Some(1)),
            expect_eq("levi-signature", &rep.levi_signature, &Some((1, 0, 0))),
            expect_eq("segre-rank", &rep.segre_rank_r, &Some(2)),
        ],
        Err(err) => vec![CheckRecord::fail("analysis", err.to_string())],
    };
    CaseReport::new("lewy", records)
}

fn case_sphere_c4(ctx: &CaseCtx) -> CaseReport {
    let model = ctx.model("sphere_c4");
    let records = match analyze_model(model, ctx.bracket_bound, ctx.seed) {
        Ok(rep) => vec![
            CheckRecord::pass_detail("analysis", analysis_detail(&rep)),
            expect_eq("finite-type-order", &rep.finite_type_order, &Some(2)),
            expect_eq("nondegeneracy-order", &rep.nondeg_order_k, &Some(1)),
            expect_eq("levi-signature", &rep.levi_signature, &Some((3, 0, 0))),
        ],
        Err(err) => vec![CheckRecord::fail("analysis", err.to_string())],
    };
    CaseReport::new("sphere_c4", records)
}

fn case_quartic(ctx: &CaseCtx) -> CaseReport {
    let model = ctx.model("quartic");
    let mut records = match analyze_model(model, ctx.bracket_bound, ctx.seed) {
        Ok(rep) => vec![
            CheckRecord::pass_detail("analysis", analysis_detail(&rep)),
            expect_eq("finite-type-order", &rep.finite_type_order, &Some(4)),
            expect_eq("nondegeneracy-order", &rep.nondeg_order_k, &None),
        ],
        Err(err) => vec![CheckRecord::fail("analysis", err.to_string())],
    };

    // Reconstruction of one side from the other is not well posed on a
    // degenerate target: no reflected derivative rows are independent.
    let h1 = &ctx.map("quartic_pair_H1").map;
    let rec = match partner_from_left(h1.f(), h1.g(), model, model, ctx.degree) {
        Err(SegreError::NotWellPosed(reason)) => {
            CheckRecord::pass_detail("reconstruction-not-well-posed", reason)
        }
        Err(err) => CheckRecord::fail("reconstruction-not-well-posed", err.to_string()),
        Ok(_) => CheckRecord::fail(
            "reconstruction-not-well-posed",
            "reconstruction unexpectedly succeeded on a degenerate target",
        ),
    };
    records.push(rec);

    // The determination oracle sees the ambiguity directly: the tilde side
    // is free in the direction that flips its sign.
    let padded = quartic_model(ctx.degree + 1);
    let h1_padded = sign_map(ctx.degree + 1, 1, 1, 1, 1);
    let input = JetDeterminationInput::LeftSideKnown {
        f: h1_padded.f().to_vec(),
        g: h1_padded.g().to_vec(),
    };
    records.push(record_result(
        "determination-ambiguous",
        jet_determination_oracle(&input, &padded, &padded, ctx.degree),
        |verdict| match verdict {
            JetDeterminationVerdict::Ambiguous { degree, witness } => CheckRecord::expect(
                "determination-ambiguous",
                witness.contains("ftilde1"),
                format!("ambiguous at degree {degree} with witness {witness}"),
            ),
            other => CheckRecord::fail(
                "determination-ambiguous",
                format!("expected an ambiguous verdict, got {other:?}"),
            ),
        },
    ));
    CaseReport::new("quartic", records)
}

fn case_moebius_member(ctx: &CaseCtx) -> CaseReport {
    let mut records = vec![
        ctx.verify_registered("moebius_member"),
        ctx.verify_registered("moebius_member_real"),
        expect_real_slice(
            "real-member-restricts",
            &ctx.map("moebius_member_real").map,
            true,
        ),
    ];

    // Partner reconstruction both ways, against a padded rebuild of the
    // same member (the solver consumes one derivative order of cap).
    let pad = ctx.degree + 1;
    let model = lewy_model(pad);
    let [a, b, at, bt, c] = &ctx.params.moebius;
    let member = moebius_member(pad, a, b, at, bt, c);
    let expected = |s: &TruncatedSeries| s.truncate(ctx.degree);

    records.push(record_result(
        "partner-from-left",
        partner_from_left(member.f(), member.g(), &model, &model, ctx.degree),
        |rebuilt| {
            let ok = rebuilt.ft()[0] == expected(&member.ft()[0])
                && rebuilt.gt()[0] == expected(&member.gt()[0]);
            CheckRecord::expect(
                "partner-from-left",
                ok,
                "reconstructed tilde side differs from the family member",
            )
        },
    ));
    records.push(record_result(
        "partner-from-right",
        partner_from_right(member.ft(), member.gt(), &model, &model, ctx.degree),
        |rebuilt| {
            let ok = rebuilt.f()[0] == expected(&member.f()[0])
                && rebuilt.g()[0] == expected(&member.g()[0]);
            CheckRecord::expect(
                "partner-from-right",
                ok,
                "reconstructed plain side differs from the family member",
            )
        },
    ));
    CaseReport::new("moebius_member", records)
}

fn case_moebius_family(ctx: &CaseCtx) -> CaseReport {
    let model = ctx.model("lewy");
    let cap = ctx.degree;
    let mut sampler = RationalSampler::new(stream(ctx.seed, 6));
    let members: Vec<SegrePreservingMap> = (0..3)
        .map(|_| {
            let [a, b, at, bt, c] = moebius_params(&mut sampler);
            moebius_member(cap, &a, &b, &at, &bt, &c)
        })
        .collect();

    let mut records = Vec::new();
    for (i, member) in members.iter().enumerate() {
        records.push(verify_check(&format!("member-{}", i + 1), member, model, model));
    }
    for (i, j) in [(0, 1), (1, 2)] {
        records.push(record_result(
            &format!("compose-{}-{}", i + 1, j + 1),
            compose_hspm(&members[i], &members[j]),
            |composed| verify_check(&format!("compose-{}-{}", i + 1, j + 1), &composed, model, model),
        ));
    }
    records.push(record_result(
        "inverse-verifies",
        invert_hspm(&members[0]),
        |inverse| verify_check("inverse-verifies", &inverse, model, model),
    ));
    records.push(record_result(
        "inverse-composes-to-identity",
        invert_hspm(&members[0]).and_then(|inv| compose_hspm(&inv, &members[0])),
        |round| {
            let id = SegrePreservingMap::identity(1, 1, round.cap());
            CheckRecord::expect(
                "inverse-composes-to-identity",
                maps_equal_to(&round, &id, round.cap()),
                "inverse composed with the member is not the identity germ",
            )
        },
    ));
    CaseReport::new("moebius_family", records)
}

fn case_moebius_jets(ctx: &CaseCtx) -> CaseReport {
    let out_cap = ctx.degree;
    let oracle_model = lewy_model(2 * out_cap);
    let member = &ctx.map("moebius_member").map;
    let jets = &ctx.corpus.jets["moebius_jets"].jets;

    let mut records = Vec::new();
    let mut oracle_solution: Option<SegrePreservingMap> = None;
    records.push(record_result(
        "determination-unique",
        jet_determination_oracle(
            &JetDeterminationInput::BothJets(jets.clone()),
            &oracle_model,
            &oracle_model,
            out_cap,
        ),
        |verdict| match verdict {
            JetDeterminationVerdict::Unique(map) => {
                let ok = maps_equal_to(&map, member, out_cap);
                oracle_solution = Some(map);
                CheckRecord::expect(
                    "determination-unique",
                    ok,
                    "determined coefficients differ from the family member",
                )
            }
            other => CheckRecord::fail(
                "determination-unique",
                format!("expected a unique solution, got {other:?}"),
            ),
        },
    ));

    if let Some(solution) = &oracle_solution {
        let fj_model = lewy_model(2 * out_cap + 4);
        let full = jet_extract(solution, 4).and_then(|jets4| {
            segrekit_core::reflection::full_jet_reconstruct(
                &jets4,
                &fj_model,
                &fj_model,
                out_cap,
                stream(ctx.seed, 7),
            )
        });
        records.push(record_result("full-jet-agrees", full, |rebuilt| {
            CheckRecord::expect(
                "full-jet-agrees",
                maps_equal_to(&rebuilt, solution, out_cap),
                "transport reconstruction differs from the determined member",
            )
        }));
    }

    let mut perturbed = jets.clone();
    let key = (0usize, MultiIndex::new(vec![2, 0]));
    let bumped = &perturbed.left[&key] + &GaussianRational::one();
    perturbed.left.insert(key, bumped);
    records.push(record_result(
        "perturbed-jet-rejected",
        jet_extends_to_automorphism(
            &perturbed,
            &oracle_model,
            &oracle_model,
            out_cap,
            stream(ctx.seed, 8),
        ),
        |verdict| match verdict {
            ExtensionVerdict::DoesNotExtend { reason } => {
                CheckRecord::pass_detail("perturbed-jet-rejected", reason)
            }
            other => CheckRecord::fail(
                "perturbed-jet-rejected",
                format!("expected a does-not-extend verdict, got {other:?}"),
            ),
        },
    ));
    CaseReport::new("moebius_jets", records)
}

fn case_quartic_pair(ctx: &CaseCtx) -> CaseReport {
    let records = vec![
        ctx.verify_registered("quartic_pair_H1"),
        ctx.verify_registered("quartic_pair_H2"),
        expect_real_slice("identity-restricts", &ctx.map("quartic_pair_H1").map, true),
        expect_real_slice("twin-does-not-restrict", &ctx.map("quartic_pair_H2").map, false),
    ];
    CaseReport::new("quartic_pair", records)
}

fn case_quartic_root_family(ctx: &CaseCtx) -> CaseReport {
    let model = ctx.model("quartic");
    let member = &ctx.map("quartic_root_member").map;
    let mut records = vec![ctx.verify_registered("quartic_root_member")];
    records.push(record_result(
        "inverse-composes-to-identity",
        invert_hspm(member).and_then(|inv| compose_hspm(&inv, member)),
        |round| {
            let id = SegrePreservingMap::identity(1, 1, round.cap());
            CheckRecord::expect(
                "inverse-composes-to-identity",
                maps_equal_to(&round, &id, round.cap()),
                "inverse composed with the member is not the identity germ",
            )
        },
    ));
    records.push(record_result(
        "inverse-verifies",
        invert_hspm(member),
        |inverse| verify_check("inverse-verifies", &inverse, model, model),
    ));
    CaseReport::new("quartic_root_family", records)
}

fn case_sign_group(ctx: &CaseCtx) -> CaseReport {
    let names = ["quartic_mixed_H1", "quartic_mixed_H2", "quartic_mixed_H3", "quartic_mixed_H4"];
    let mut records: Vec<CheckRecord> =
        names.iter().map(|n| ctx.verify_registered(n)).collect();
    let group: Vec<&SegrePreservingMap> = names.iter().map(|n| &ctx.map(n).map).collect();

    let mut closed = true;
    let mut detail = String::new();
    for (i, outer) in group.iter().enumerate() {
        for (j, inner) in group.iter().enumerate() {
            match compose_hspm(outer, inner) {
                Ok(composed) => {
                    if !group.iter().any(|g| **g == composed) {
                        closed = false;
                        detail = format!("composite {}*{} left the set", i + 1, j + 1);
                    }
                }
                Err(err) => {
                    closed = false;
                    detail = err.to_string();
                }
            }
        }
    }
    records.push(CheckRecord::expect("composition-table-closes", closed, detail));

    records.push(record_result(
        "second-third-gives-fourth",
        compose_hspm(group[1], group[2]),
        |composed| {
            CheckRecord::expect(
                "second-third-gives-fourth",
                composed == *group[3],
                "composite of the second and third maps is not the fourth",
            )
        },
    ));

    let mut inverses_ok = true;
    for member in &group {
        match invert_hspm(member) {
            Ok(inv) => {
                if !group.iter().any(|g| **g == inv) {
                    inverses_ok = false;
                }
            }
            Err(_) => inverses_ok = false,
        }
    }
    records.push(CheckRecord::expect(
        "inverses-stay-in-set",
        inverses_ok,
        "some inverse left the set",
    ));
    CaseReport::new("sign_group", records)
}

fn case_signature_cross(ctx: &CaseCtx) -> CaseReport {
    let mut records = vec![
        ctx.verify_registered("signature_cross"),
        expect_real_slice("no-real-slice", &ctx.map("signature_cross").map, false),
    ];
    for (model_name, want, check) in [
        ("sphere_c3", (2, 0, 0), "source-signature"),
        ("mixed_signature", (1, 1, 0), "target-signature"),
    ] {
        let rec = match analyze_model(ctx.model(model_name), ctx.bracket_bound, ctx.seed) {
            Ok(rep) => expect_eq(check, &rep.levi_signature, &Some(want)),
            Err(err) => CheckRecord::fail(check, err.to_string()),
        };
        records.push(rec);
    }
    CaseReport::new("signature_cross", records)
}

fn case_coefficient_twist(ctx: &CaseCtx) -> CaseReport {
    let records = vec![
        ctx.verify_registered("coefficient_twist"),
        expect_real_slice("no-real-slice", &ctx.map("coefficient_twist").map, false),
    ];
    CaseReport::new("coefficient_twist", records)
}

fn case_minor_rich(ctx: &CaseCtx) -> CaseReport {
    let entry = ctx.map("minor_rich");
    let mut records = vec![ctx.verify_registered("minor_rich")];

    let sub = segre_submersive(&entry.map);
    records.push(CheckRecord::expect(
        "segre-submersive",
        sub.submersive,
        format!(
            "ranks ({}, {}), required {}",
            sub.f_rank, sub.ft_rank, sub.required
        ),
    ));

    let witnesses = condition_d_witnesses(&entry.map);
    records.push(expect_eq("witness-count", &witnesses.len(), &9));

    let dets = |rows: &[(Vec<usize>, i64)], got: &mut Vec<CheckRecord>, side: &str| {
        for (subset, want) in rows {
            let found = witnesses.iter().find(|w| match side {
                "mu" => &w.mu == subset,
                _ => &w.nu == subset,
            });
            let ok = match (found, side) {
                (Some(w), "mu") => w.mu_det == GaussianRational::from_int(*want),
                (Some(w), _) => w.nu_det == GaussianRational::from_int(*want),
                (None, _) => false,
            };
            got.push(CheckRecord::expect(
                &format!("{side}-minor-{}{}", subset[0] + 1, subset[1] + 1),
                ok,
                format!("expected determinant {want}"),
            ));
        }
    };
    dets(
        &[(vec![0, 1], -1), (vec![0, 2], -1), (vec![1, 2], 1)],
        &mut records,
        "mu",
    );
    dets(
        &[(vec![0, 1], 1), (vec![0, 2], 1), (vec![1, 2], -1)],
        &mut records,
        "nu",
    );

    let analysis = match analyze_model(ctx.model("minor_rich"), ctx.bracket_bound, ctx.seed) {
        Ok(rep) => CheckRecord::pass_detail("source-analysis", analysis_detail(&rep)),
        Err(err) => CheckRecord::fail("source-analysis", err.to_string()),
    };
    records.push(analysis);
    CaseReport::new("minor_rich", records)
}

fn case_segre_identities(ctx: &CaseCtx) -> CaseReport {
    let mut records = Vec::new();
    for (name, model) in &ctx.corpus.models {
        let symmetric = (1..=3).all(|r| segre_symmetric_vanishes(model, r));
        records.push(CheckRecord::expect(
            &format!("symmetric-{name}"),
            symmetric,
            "a symmetric-point pullback did not vanish",
        ));
        let stable = (1..=3).all(|l| segre_level_stable(model, l));
        records.push(CheckRecord::expect(
            &format!("stability-{name}"),
            stable,
            "zeroing the deepest block did not recover the previous level",
        ));
    }
    CaseReport::new("segre_identities", records)
}

fn case_six_circle(ctx: &CaseCtx) -> CaseReport {
    let model = ctx.model("six_circle");
    let mut records = vec![ctx.verify_registered("six_circle_id")];

    // The scaling with the flipped sign must fail: only the trivial root
    // of unity preserves exponent gap one.
    let bad = circle_scaling_map(ctx.degree, &ctx.params.circle[0], &gr(-1, 0));
    records.push(record_result(
        "rejects-sign-flip",
        hspm_verify(&bad, model, model),
        |rep| match rep.offender {
            Some(off) => CheckRecord::pass_detail(
                "rejects-sign-flip",
                format!("residual has lowest monomial {}", off.rendered),
            ),
            None => CheckRecord::fail(
                "rejects-sign-flip",
                "sign-flipped scaling unexpectedly preserved the model",
            ),
        },
    ));
    let analysis = match analyze_model(model, ctx.bracket_bound, ctx.seed) {
        Ok(rep) => CheckRecord::pass_detail("analysis", analysis_detail(&rep)),
        Err(err) => CheckRecord::fail("analysis", err.to_string()),
    };
    records.push(analysis);
    CaseReport::new("six_circle", records)
}

fn case_eight_circle(ctx: &CaseCtx) -> CaseReport {
    let mut records = vec![
        ctx.verify_registered("eight_circle_plus"),
        ctx.verify_registered("eight_circle_minus"),
        expect_real_slice(
            "minus-no-real-slice",
            &ctx.map("eight_circle_minus").map,
            false,
        ),
    ];
    // The sign-flipped branch never restricts to the real points, for any
    // nonzero parameter: check a few more deterministic samples.
    let mut sampler = RationalSampler::new(stream(ctx.seed, 9));
    for k in 0..4 {
        let a = sampler.nonzero_gaussian(3);
        let extra = circle_scaling_map(ctx.degree, &a, &gr(-1, 0));
        records.push(expect_real_slice(
            &format!("minus-no-real-slice-{}", k + 1),
            &extra,
            false,
        ));
    }
    CaseReport::new("eight_circle", records)
}

fn case_widening(ctx: &CaseCtx) -> CaseReport {
    let mut records = vec![
        ctx.verify_registered("widening_H1"),
        ctx.verify_registered("widening_H2"),
        ctx.verify_registered("widening_H3"),
    ];

    let h2 = &ctx.map("widening_H2").map;
    let h3 = &ctx.map("widening_H3").map;
    let shared = match (jet_extract(h2, 1), jet_extract(h3, 1)) {
        (Ok(j2), Ok(j3)) => CheckRecord::expect(
            "shared-order1-jets",
            j2.left == j3.left && j2.right == j3.right,
            "order-1 jets of the two members differ",
        ),
        (Err(err), _) | (_, Err(err)) => CheckRecord::fail("shared-order1-jets", err.to_string()),
    };
    records.push(shared);

    // The shared jet cannot determine the map: distinct members extend it,
    // so the degree-by-degree solve must report a free direction.
    let src = product_model(8);
    let tgt = sphere_model(3, 8);
    let oracle = jet_extract(&widening_member(8, 2), 1).and_then(|jets| {
        jet_determination_oracle(
            &JetDeterminationInput::BothJets(jets),
            &src,
            &tgt,
            4,
        )
    });
    records.push(record_result("shared-jet-ambiguous", oracle, |verdict| {
        match verdict {
            JetDeterminationVerdict::Ambiguous { degree, witness } => {
                let mut parts = witness.split("; ");
                let first = parts.next().unwrap_or("").to_string();
                let rest = parts.count();
                CheckRecord::pass_detail(
                    "shared-jet-ambiguous",
                    format!("free at degree {degree}: {first} and {rest} more directions"),
                )
            }
            other => CheckRecord::fail(
                "shared-jet-ambiguous",
                format!("expected an ambiguous verdict, got {other:?}"),
            ),
        }
    }));
    CaseReport::new("widening", records)
}

/// Runs the complete built-in suite at the given settings.
pub fn corpus_report(degree: u32, seed: u64, bracket_bound: u32) -> Report {
    let corpus = build_corpus(degree, seed);
    let ctx = CaseCtx {
        corpus: &corpus,
        degree,
        seed,
        bracket_bound,
        params: corpus_params(seed),
    };
    let runners: Vec<(&str, fn(&CaseCtx) -> CaseReport)> = vec![
        ("coefficient_twist", case_coefficient_twist),
        ("eight_circle", case_eight_circle),
        ("lewy", case_lewy),
        ("minor_rich", case_minor_rich),
        ("moebius_family", case_moebius_family),
        ("moebius_jets", case_moebius_jets),
        ("moebius_member", case_moebius_member),
        ("quartic", case_quartic),
        ("quartic_pair", case_quartic_pair),
        ("quartic_root_family", case_quartic_root_family),
        ("segre_identities", case_segre_identities),
        ("sign_group", case_sign_group),
        ("signature_cross", case_signature_cross),
        ("six_circle", case_six_circle),
        ("sphere_c4", case_sphere_c4),
        ("widening", case_widening),
    ];
    let mins = case_min_degrees();
    let mut cases = Vec::new();
    for (name, run) in runners {
        let min = mins[name];
        if degree < min {
            cases.push(gated_case(name, min, degree));
        } else {
            cases.push(run(&ctx));
        }
    }
    Report::new("corpus", degree, seed, bracket_bound, cases)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_deterministic() {
        let a = build_corpus(4, 11);
        let b = build_corpus(4, 11);
        assert_eq!(
            a.models.keys().collect::<Vec<_>>(),
            b.models.keys().collect::<Vec<_>>()
        );
        for (name, entry) in &a.maps {
            assert_eq!(entry.map, b.maps[name].map, "map {name} must not drift");
        }
    }

    #[test]
    fn low_degree_drops_high_degree_entities() {
        let c = build_corpus(4, 0);
        assert!(c.models.contains_key("lewy"));
        assert!(c.models.contains_key("quartic"));
        assert!(!c.models.contains_key("six_circle"));
        assert!(!c.maps.contains_key("eight_circle_minus"));
    }

    #[test]
    fn moebius_member_preserves_model() {
        let c = build_corpus(6, 3);
        let entry = &c.maps["moebius_member"];
        let model = &c.models["lewy"];
        let rep = hspm_verify(&entry.map, model, model).unwrap();
        assert!(rep.residual_zero, "offender: {:?}", rep.offender);
    }

    #[test]
    fn widening_members_share_first_jet_only() {
        let h2 = widening_member(6, 2);
        let h3 = widening_member(6, 3);
        let j2 = jet_extract(&h2, 1).unwrap();
        let j3 = jet_extract(&h3, 1).unwrap();
        assert_eq!(j2.left, j3.left);
        assert_eq!(j2.right, j3.right);
        let k2 = jet_extract(&h2, 2).unwrap();
        let k3 = jet_extract(&h3, 2).unwrap();
        assert_ne!(k2.right, k3.right, "order-2 jets must separate members");
    }
}
