//! Pairs of holomorphic maps preserving complexified models, and their
//! exact verification.
//!
//! A map pair between a source model `(m, d)` and a target model `(n, e)`
//! consists of `H = (f, g)` in the variables `(z, w)` and
//! `Htilde = (ftilde, gtilde)` in `(chi, tau)`, all fixing the origin. The
//! pair preserves the models when, identically on the source graph
//! `w = Q(z, chi, tau)`,
//!
//! `g = Q'(f, ftilde, gtilde)`.
//!
//! [`hspm_verify`] checks this exactly to the common cap and reports the
//! lowest offending monomial on failure.

use crate::error::{Result, SegreError};
use crate::ift::{ift_solve, k_subsets};
use crate::matrix::ExactMatrix;
use crate::model::{model_var_names, GenericModel};
use crate::multiindex::{monomials_in_range, MultiIndex};
use crate::rational::GaussianRational;
use crate::series::TruncatedSeries;
use num_rational::BigRational;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegrePreservingMap {
    sm: usize,
    sd: usize,
    tn: usize,
    te: usize,
    cap: u32,
    f: Vec<TruncatedSeries>,
    g: Vec<TruncatedSeries>,
    ft: Vec<TruncatedSeries>,
    gt: Vec<TruncatedSeries>,
}

impl SegrePreservingMap {
    /// Builds a map pair from its component series. `f, g` live in the
    /// source `(z, w)` ring of arity `sm + sd`; `ftilde, gtilde` in the
    /// `(chi, tau)` ring of the same arity. All components must vanish at 0.
    pub fn new(
        (sm, sd): (usize, usize),
        (tn, te): (usize, usize),
        f: Vec<TruncatedSeries>,
        g: Vec<TruncatedSeries>,
        ft: Vec<TruncatedSeries>,
        gt: Vec<TruncatedSeries>,
    ) -> Result<Self> {
        if f.len() != tn || ft.len() != tn || g.len() != te || gt.len() != te {
            return Err(SegreError::Precondition(format!(
                "component counts ({}, {}, {}, {}) do not match target dimensions ({}, {})",
                f.len(),
                g.len(),
                ft.len(),
                gt.len(),
                tn,
                te
            )));
        }
        let arity = sm + sd;
        let cap = f
            .iter()
            .chain(&g)
            .chain(&ft)
            .chain(&gt)
            .map(|s| s.cap())
            .min()
            .unwrap();
        let check = |side: &str, list: &[TruncatedSeries]| -> Result<()> {
            for (i, s) in list.iter().enumerate() {
                if s.arity() != arity {
                    return Err(SegreError::Precondition(format!(
                        "{}{} has arity {}, expected {}",
                        side,
                        i + 1,
                        s.arity(),
                        arity
                    )));
                }
                if !s.constant_term().is_zero() {
                    return Err(SegreError::Precondition(format!(
                        "{}{} does not fix the origin",
                        side,
                        i + 1
                    )));
                }
            }
            Ok(())
        };
        check("f", &f)?;
        check("g", &g)?;
        check("ftilde", &ft)?;
        check("gtilde", &gt)?;
        Ok(SegrePreservingMap {
            sm,
            sd,
            tn,
            te,
            cap,
            f: f.into_iter().map(|s| s.truncate(cap)).collect(),
            g: g.into_iter().map(|s| s.truncate(cap)).collect(),
            ft: ft.into_iter().map(|s| s.truncate(cap)).collect(),
            gt: gt.into_iter().map(|s| s.truncate(cap)).collect(),
        })
    }

    pub fn identity(m: usize, d: usize, cap: u32) -> Self {
        let arity = m + d;
        let coords: Vec<TruncatedSeries> = (0..arity)
            .map(|i| TruncatedSeries::variable(arity, cap, i))
            .collect();
        SegrePreservingMap::new(
            (m, d),
            (m, d),
            coords[..m].to_vec(),
            coords[m..].to_vec(),
            coords[..m].to_vec(),
            coords[m..].to_vec(),
        )
        .unwrap()
    }

    pub fn source_dims(&self) -> (usize, usize) {
        (self.sm, self.sd)
    }

    pub fn target_dims(&self) -> (usize, usize) {
        (self.tn, self.te)
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn f(&self) -> &[TruncatedSeries] {
        &self.f
    }

    pub fn g(&self) -> &[TruncatedSeries] {
        &self.g
    }

    pub fn ft(&self) -> &[TruncatedSeries] {
        &self.ft
    }

    pub fn gt(&self) -> &[TruncatedSeries] {
        &self.gt
    }

    /// Jacobian `df/dz` at the origin (`tn` rows, `sm` columns).
    pub fn f_z0(&self) -> ExactMatrix {
        let arity = self.sm + self.sd;
        ExactMatrix::from_fn(self.tn, self.sm, |i, j| {
            self.f[i].coeff(&MultiIndex::unit(arity, j))
        })
    }

    /// Jacobian `dftilde/dchi` at the origin (`tn` rows, `sm` columns).
    pub fn ft_chi0(&self) -> ExactMatrix {
        let arity = self.sm + self.sd;
        ExactMatrix::from_fn(self.tn, self.sm, |i, j| {
            self.ft[i].coeff(&MultiIndex::unit(arity, j))
        })
    }
}

/// Outcome of an exact residual check.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub residual_zero: bool,
    pub effective_cap: u32,
    pub offender: Option<ResidualOffender>,
}

#[derive(Clone, Debug)]
pub struct ResidualOffender {
    pub component: usize,
    pub monomial: MultiIndex,
    pub coefficient: GaussianRational,
    pub rendered: String,
}

/// The exact residual `g(z, Q) - Q'(f(z, Q), ftilde, gtilde)` of a map pair,
/// one series per target codimension component, in the source `(z, chi, tau)`
/// ring at the common cap of map and models. The pair preserves the models
/// exactly when every component vanishes.
pub fn preservation_residual(
    map: &SegrePreservingMap,
    src: &GenericModel,
    tgt: &GenericModel,
) -> Result<Vec<TruncatedSeries>> {
    check_model_dims(map, src, tgt)?;
    let m = src.m();
    let d = src.d();
    let arity = src.arity();
    let cap = map.cap().min(src.cap()).min(tgt.cap());

    // Graph substitution (z, w = Q(z, chi, tau)) for the (z, w)-side.
    let graph_args: Vec<TruncatedSeries> = (0..(m + d))
        .map(|v| {
            if v < m {
                TruncatedSeries::variable(arity, cap, v)
            } else {
                src.q()[v - m].truncate(cap.min(src.q()[v - m].cap()))
            }
        })
        .collect();
    // (chi, tau)-side components embedded into the (z, chi, tau) ring.
    let tilde_map: Vec<usize> = (0..m)
        .map(|i| m + i)
        .chain((0..d).map(|r| 2 * m + r))
        .collect();

    let f_on_graph: Vec<TruncatedSeries> =
        map.f().iter().map(|s| s.compose(&graph_args)).collect();
    let g_on_graph: Vec<TruncatedSeries> =
        map.g().iter().map(|s| s.compose(&graph_args)).collect();
    let ft_emb: Vec<TruncatedSeries> = map.ft().iter().map(|s| s.embed(arity, &tilde_map)).collect();
    let gt_emb: Vec<TruncatedSeries> = map.gt().iter().map(|s| s.embed(arity, &tilde_map)).collect();

    let qprime_args: Vec<TruncatedSeries> = f_on_graph
        .iter()
        .chain(&ft_emb)
        .chain(&gt_emb)
        .cloned()
        .collect();

    Ok(tgt
        .q()
        .iter()
        .enumerate()
        .map(|(r, q)| g_on_graph[r].sub(&q.compose(&qprime_args)).truncate(cap))
        .collect())
}

/// Checks the preservation identity `g(z, Q) = Q'(f(z, Q), ftilde, gtilde)`
/// exactly to the common cap of map and models.
pub fn hspm_verify(
    map: &SegrePreservingMap,
    src: &GenericModel,
    tgt: &GenericModel,
) -> Result<VerifyReport> {
    let cap = map.cap().min(src.cap()).min(tgt.cap());
    let residual = preservation_residual(map, src, tgt)?;
    let names = model_var_names(src.m(), src.d());
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    for (r, defect) in residual.iter().enumerate() {
        if let Some((idx, c)) = defect.lowest_term() {
            let rendered =
                TruncatedSeries::monomial(src.arity(), idx.degree(), idx.clone(), GaussianRational::one())
                    .render(&name_refs);
            return Ok(VerifyReport {
                residual_zero: false,
                effective_cap: cap,
                offender: Some(ResidualOffender {
                    component: r,
                    monomial: idx.clone(),
                    coefficient: c.clone(),
                    rendered,
                }),
            });
        }
    }
    Ok(VerifyReport {
        residual_zero: true,
        effective_cap: cap,
        offender: None,
    })
}

fn check_model_dims(
    map: &SegrePreservingMap,
    src: &GenericModel,
    tgt: &GenericModel,
) -> Result<()> {
    if map.source_dims() != (src.m(), src.d()) {
        return Err(SegreError::Precondition(format!(
            "map expects source dimensions {:?}, model has ({}, {})",
            map.source_dims(),
            src.m(),
            src.d()
        )));
    }
    if map.target_dims() != (tgt.m(), tgt.d()) {
        return Err(SegreError::Precondition(format!(
            "map expects target dimensions {:?}, model has ({}, {})",
            map.target_dims(),
            tgt.m(),
            tgt.d()
        )));
    }
    Ok(())
}

/// Ranks of the two linearizations along the Segre directions.
#[derive(Clone, Debug)]
pub struct SubmersiveReport {
    pub f_rank: usize,
    pub ft_rank: usize,
    pub required: usize,
    pub submersive: bool,
}

/// A map pair is Segre submersive when both `df/dz(0)` and `dftilde/dchi(0)`
/// have full rank `n`.
pub fn segre_submersive(map: &SegrePreservingMap) -> SubmersiveReport {
    let f_rank = map.f_z0().rank();
    let ft_rank = map.ft_chi0().rank();
    let required = map.target_dims().0;
    SubmersiveReport {
        f_rank,
        ft_rank,
        required,
        submersive: f_rank == required && ft_rank == required,
    }
}

/// A pair of coordinate subsets certifying Segre submersiveness: `mu` indexes
/// `n` source `z`-coordinates with `det (df/dz)(0)[.., mu] != 0`, and `nu`
/// does the same for `dftilde/dchi`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionDWitness {
    pub mu: Vec<usize>,
    pub nu: Vec<usize>,
    pub mu_det: GaussianRational,
    pub nu_det: GaussianRational,
}

/// All valid witness pairs, ordered lexicographically; empty exactly when
/// the map is not Segre submersive.
pub fn condition_d_witnesses(map: &SegrePreservingMap) -> Vec<ConditionDWitness> {
    let n = map.target_dims().0;
    let m = map.source_dims().0;
    let minors = |jac: &ExactMatrix| -> Vec<(Vec<usize>, GaussianRational)> {
        k_subsets(m, n)
            .into_iter()
            .filter_map(|cols| {
                let sub = ExactMatrix::from_fn(n, n, |i, j| jac.at(i, cols[j]).clone());
                let det = sub.det();
                if det.is_zero() {
                    None
                } else {
                    Some((cols, det))
                }
            })
            .collect()
    };
    let mu_list = minors(&map.f_z0());
    let nu_list = minors(&map.ft_chi0());
    let mut out = Vec::new();
    for (mu, mu_det) in &mu_list {
        for (nu, nu_det) in &nu_list {
            out.push(ConditionDWitness {
                mu: mu.clone(),
                nu: nu.clone(),
                mu_det: mu_det.clone(),
                nu_det: nu_det.clone(),
            });
        }
    }
    out
}

/// The conjugate-swapped pair `(conj ftilde, conj gtilde, conj f, conj g)`,
/// which preserves the same pair of models; an involution.
pub fn conjugate_swap(map: &SegrePreservingMap) -> SegrePreservingMap {
    SegrePreservingMap::new(
        map.source_dims(),
        map.target_dims(),
        map.ft().iter().map(|s| s.conjugate_series()).collect(),
        map.gt().iter().map(|s| s.conjugate_series()).collect(),
        map.f().iter().map(|s| s.conjugate_series()).collect(),
        map.g().iter().map(|s| s.conjugate_series()).collect(),
    )
    .expect("swapping a valid pair yields a valid pair")
}

/// Jets of both sides of a map pair in the derivative-value convention:
/// entry `(component, alpha)` holds the true partial derivative at 0, i.e.
/// the series coefficient times `alpha!`. Components are indexed `f` first,
/// then `g` (and likewise on the tilde side).
#[derive(Clone, Debug, PartialEq)]
pub struct JetPair {
    pub order: u32,
    pub source_dims: (usize, usize),
    pub target_dims: (usize, usize),
    pub left: BTreeMap<(usize, MultiIndex), GaussianRational>,
    pub right: BTreeMap<(usize, MultiIndex), GaussianRational>,
}

/// Extracts the order-`k` jets of both sides. Every entry with
/// `1 <= |alpha| <= k` is present, zeros included, so tables compare
/// exactly. Requires `k <= cap`.
pub fn jet_extract(map: &SegrePreservingMap, k: u32) -> Result<JetPair> {
    if k > map.cap() {
        return Err(SegreError::InsufficientCap {
            have: map.cap(),
            need: k,
            context: "jet extraction".into(),
        });
    }
    let (sm, sd) = map.source_dims();
    let arity = sm + sd;
    let idxs = monomials_in_range(arity, 1, k);
    let table = |comps: &[&[TruncatedSeries]]| {
        let mut out = BTreeMap::new();
        let mut comp_offset = 0;
        for list in comps {
            for (i, s) in list.iter().enumerate() {
                for idx in &idxs {
                    let fact = GaussianRational::new(
                        BigRational::from_integer(idx.factorial()),
                        BigRational::from_integer(0.into()),
                    );
                    out.insert((comp_offset + i, idx.clone()), &s.coeff(idx) * &fact);
                }
            }
            comp_offset += list.len();
        }
        out
    };
    Ok(JetPair {
        order: k,
        source_dims: map.source_dims(),
        target_dims: map.target_dims(),
        left: table(&[map.f(), map.g()]),
        right: table(&[map.ft(), map.gt()]),
    })
}

impl JetPair {
    /// Jets of the conjugate-swapped pair: sides trade places and every
    /// derivative value is conjugated. An involution matching
    /// [`conjugate_swap`] on full maps.
    pub fn conjugate_swap(&self) -> JetPair {
        let flip = |table: &BTreeMap<(usize, MultiIndex), GaussianRational>| {
            table
                .iter()
                .map(|(key, v)| (key.clone(), v.conj()))
                .collect()
        };
        JetPair {
            order: self.order,
            source_dims: self.source_dims,
            target_dims: self.target_dims,
            left: flip(&self.right),
            right: flip(&self.left),
        }
    }

    /// Reassembles the jet data into polynomial map components at the given
    /// cap (jet coefficients are derivative values divided by `alpha!`).
    pub fn to_polynomial_components(
        &self,
        cap: u32,
    ) -> (
        Vec<TruncatedSeries>,
        Vec<TruncatedSeries>,
        Vec<TruncatedSeries>,
        Vec<TruncatedSeries>,
    ) {
        let (sm, sd) = self.source_dims;
        let (tn, te) = self.target_dims;
        let arity = sm + sd;
        let build = |table: &BTreeMap<(usize, MultiIndex), GaussianRational>, comp: usize| {
            TruncatedSeries::from_terms(
                arity,
                cap,
                table
                    .iter()
                    .filter(|((c, _), _)| *c == comp)
                    .map(|((_, idx), v)| {
                        let fact = GaussianRational::new(
                            BigRational::from_integer(idx.factorial()),
                            BigRational::from_integer(0.into()),
                        );
                        (idx.clone(), v * &fact.inv().unwrap())
                    }),
            )
        };
        let f: Vec<TruncatedSeries> = (0..tn).map(|i| build(&self.left, i)).collect();
        let g: Vec<TruncatedSeries> = (0..te).map(|i| build(&self.left, tn + i)).collect();
        let ft: Vec<TruncatedSeries> = (0..tn).map(|i| build(&self.right, i)).collect();
        let gt: Vec<TruncatedSeries> = (0..te).map(|i| build(&self.right, tn + i)).collect();
        (f, g, ft, gt)
    }
}

/// Composition `outer . inner` of map pairs (inner applied first).
pub fn compose_hspm(
    outer: &SegrePreservingMap,
    inner: &SegrePreservingMap,
) -> Result<SegrePreservingMap> {
    if inner.target_dims() != outer.source_dims() {
        return Err(SegreError::Precondition(format!(
            "composition dimension mismatch: inner target {:?}, outer source {:?}",
            inner.target_dims(),
            outer.source_dims()
        )));
    }
    let left_args: Vec<TruncatedSeries> = inner.f().iter().chain(inner.g()).cloned().collect();
    let right_args: Vec<TruncatedSeries> = inner.ft().iter().chain(inner.gt()).cloned().collect();
    SegrePreservingMap::new(
        inner.source_dims(),
        outer.target_dims(),
        outer.f().iter().map(|s| s.compose(&left_args)).collect(),
        outer.g().iter().map(|s| s.compose(&left_args)).collect(),
        outer.ft().iter().map(|s| s.compose(&right_args)).collect(),
        outer.gt().iter().map(|s| s.compose(&right_args)).collect(),
    )
}

/// Inverse of an equidimensional map pair whose linearizations at 0 are
/// invertible, as formal germs.
pub fn invert_hspm(map: &SegrePreservingMap) -> Result<SegrePreservingMap> {
    if map.source_dims() != map.target_dims() {
        return Err(SegreError::Precondition(
            "only equidimensional map pairs can be inverted".into(),
        ));
    }
    let (m, d) = map.source_dims();
    let arity = m + d;
    let cap = map.cap();
    let invert_side = |comps: Vec<&TruncatedSeries>| -> Result<Vec<TruncatedSeries>> {
        // Solve H(X) = Z: F(Z, X) = H(X) - Z in (Z | X).
        let f: Vec<TruncatedSeries> = comps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let h = s.embed(2 * arity, &(arity..2 * arity).collect::<Vec<_>>());
                h.sub(&TruncatedSeries::variable(2 * arity, cap, i))
            })
            .collect();
        ift_solve(&f, arity, arity)
    };
    let left = invert_side(map.f().iter().chain(map.g()).collect())?;
    let right = invert_side(map.ft().iter().chain(map.gt()).collect())?;
    SegrePreservingMap::new(
        (m, d),
        (m, d),
        left[..m].to_vec(),
        left[m..].to_vec(),
        right[..m].to_vec(),
        right[m..].to_vec(),
    )
}

/// True when the pair restricts to a single holomorphic map on the real
/// points: `ftilde = conj f` and `gtilde = conj g` coefficientwise.
pub fn real_slice_check(map: &SegrePreservingMap) -> bool {
    map.ft()
        .iter()
        .zip(map.f())
        .all(|(t, s)| *t == s.conjugate_series())
        && map
            .gt()
            .iter()
            .zip(map.g())
            .all(|(t, s)| *t == s.conjugate_series())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::GaussianRational as Q;
    use crate::testkit::{lewy, lewy_member};

    #[test]
    fn identity_preserves_any_model() {
        let model = lewy(8);
        let id = SegrePreservingMap::identity(1, 1, 8);
        let report = hspm_verify(&id, &model, &model).unwrap();
        assert!(report.residual_zero);
    }

    #[test]
    fn lewy_family_members_verify() {
        let model = lewy(8);
        // Simple member: a = at = 1, b = bt = 0, c = 1.
        let simple = lewy_member(8, Q::one(), Q::zero(), Q::one(), Q::zero(), Q::one());
        assert!(hspm_verify(&simple, &model, &model).unwrap().residual_zero);
        assert!(real_slice_check(&simple));
        // Complex-parameter member: at = conj a, bt = conj b, c real.
        let a = Q::from_parts(1, 1, 1, 2);
        let b = Q::from_parts(0, 1, 1, 3);
        let member = lewy_member(8, a.clone(), b.clone(), a.conj(), b.conj(), Q::from_ratio(2, 5));
        assert!(hspm_verify(&member, &model, &model).unwrap().residual_zero);
        assert!(real_slice_check(&member));
        // Non-real member: bt unrelated to conj b.
        let loose = lewy_member(8, Q::one(), Q::from_int(1), Q::one(), Q::from_int(2), Q::zero());
        assert!(hspm_verify(&loose, &model, &model).unwrap().residual_zero);
        assert!(!real_slice_check(&loose));
    }

    #[test]
    fn broken_map_reports_lowest_offender() {
        let model = lewy(8);
        let z = TruncatedSeries::variable(2, 8, 0);
        let w = TruncatedSeries::variable(2, 8, 1);
        // gtilde = 2 tau breaks the identity at the tau monomial.
        let map = SegrePreservingMap::new(
            (1, 1),
            (1, 1),
            vec![z.clone()],
            vec![w.clone()],
            vec![z.clone()],
            vec![w.scale(&Q::from_int(2))],
        )
        .unwrap();
        let report = hspm_verify(&map, &model, &model).unwrap();
        assert!(!report.residual_zero);
        let off = report.offender.unwrap();
        assert_eq!(off.rendered, "tau1");
        assert_eq!(off.coefficient, Q::from_int(-1));
    }

    #[test]
    fn jet_extraction_derivative_convention() {
        // f = z/(1-w) = z + z w + z w^2 + ...: d^2 f / dz dw (0) = 1,
        // g = w/(1-w): d^2 g / dw^2 (0) = 2.
        let member = lewy_member(8, Q::one(), Q::zero(), Q::one(), Q::zero(), Q::one());
        let jets = jet_extract(&member, 2).unwrap();
        assert_eq!(
            jets.left[&(0, MultiIndex::new(vec![1, 1]))],
            Q::one()
        );
        assert_eq!(
            jets.left[&(1, MultiIndex::new(vec![0, 2]))],
            Q::from_int(2)
        );
        // Round trip through polynomial components.
        let (f, g, ft, gt) = jets.to_polynomial_components(2);
        let rebuilt = SegrePreservingMap::new((1, 1), (1, 1), f, g, ft, gt).unwrap();
        assert_eq!(jet_extract(&rebuilt, 2).unwrap(), jets);
    }

    #[test]
    fn conjugate_swap_is_involution_and_preserves() {
        let model = lewy(8);
        let member = lewy_member(
            8,
            Q::from_parts(0, 1, 1, 1),
            Q::from_ratio(1, 2),
            Q::one(),
            Q::from_ratio(1, 3),
            Q::from_int(2),
        );
        assert!(hspm_verify(&member, &model, &model).unwrap().residual_zero);
        let swapped = conjugate_swap(&member);
        assert!(hspm_verify(&swapped, &model, &model).unwrap().residual_zero);
        let back = conjugate_swap(&swapped);
        assert_eq!(back.f(), member.f());
        assert_eq!(back.gt(), member.gt());
    }

    #[test]
    fn composition_and_inverse() {
        let model = lewy(8);
        let a = lewy_member(8, Q::from_int(2), Q::zero(), Q::from_ratio(1, 2), Q::zero(), Q::one());
        let b = lewy_member(8, Q::one(), Q::from_ratio(1, 3), Q::one(), Q::from_ratio(1, 3), Q::zero());
        let ab = compose_hspm(&a, &b).unwrap();
        assert!(hspm_verify(&ab, &model, &model).unwrap().residual_zero);
        let a_inv = invert_hspm(&a).unwrap();
        let prod = compose_hspm(&a, &a_inv).unwrap();
        let id = SegrePreservingMap::identity(1, 1, 8);
        assert_eq!(prod.f(), id.f());
        assert_eq!(prod.g(), id.g());
        assert_eq!(prod.ft(), id.ft());
        assert_eq!(prod.gt(), id.gt());
    }

    #[test]
    fn products_map_witnesses() {
        // f = (z1 + z3, z1 - z2), ftilde = (chi1 - chi2, chi2 + chi3):
        // all six 2x2 minors are nonzero, giving 9 witness pairs.
        let cap = 6;
        let v = |i| TruncatedSeries::variable(4, cap, i);
        let map = SegrePreservingMap::new(
            (3, 1),
            (2, 1),
            vec![v(0).add(&v(2)), v(0).sub(&v(1))],
            vec![v(3)],
            vec![v(0).sub(&v(1)), v(1).add(&v(2))],
            vec![v(3)],
        )
        .unwrap();
        let sub = segre_submersive(&map);
        assert!(sub.submersive);
        let witnesses = condition_d_witnesses(&map);
        assert_eq!(witnesses.len(), 9);
        let mu_dets: Vec<(Vec<usize>, Q)> = witnesses
            .iter()
            .take(3)
            .map(|w| (w.nu.clone(), w.nu_det.clone()))
            .collect();
        assert_eq!(
            mu_dets,
            vec![
                (vec![0, 1], Q::from_int(1)),
                (vec![0, 2], Q::from_int(1)),
                (vec![1, 2], Q::from_int(-1)),
            ]
        );
        assert_eq!(witnesses[0].mu_det, Q::from_int(-1));
        assert_eq!(witnesses[3].mu_det, Q::from_int(-1));
        assert_eq!(witnesses[6].mu_det, Q::from_int(1));
    }

    #[test]
    fn real_slice_detects_mismatch() {
        let z = TruncatedSeries::variable(2, 4, 0);
        let w = TruncatedSeries::variable(2, 4, 1);
        let map = SegrePreservingMap::new(
            (1, 1),
            (1, 1),
            vec![z.scale(&Q::i())],
            vec![w.clone()],
            vec![z.scale(&Q::i())],
            vec![w.clone()],
        )
        .unwrap();
        // conj(i z) = -i chi, but the tilde side has +i chi.
        assert!(!real_slice_check(&map));
    }
}
