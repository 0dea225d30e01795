//! Generic real-analytic CR models in normal coordinates, and their basic
//! invariants.
//!
//! A model with CR dimension `m` and codimension `d` is stored through the
//! defining series `Q = (Q^1, ..., Q^d)` of its complexification: `d` series
//! in the `2m + d` variables `(z, chi, tau)`, laid out in that block order,
//! satisfying
//!
//! * normality: `Q(0, chi, tau) = tau` and `Q(z, 0, tau) = tau`,
//! * reality: `Q(z, chi, barQ(chi, z, w)) = w` identically,
//!
//! where `barQ` has the conjugated coefficients of `Q` with the first two
//! blocks swapped. Both identities are enforced exactly, to the cap, at
//! construction time.

use crate::error::{Result, SegreError};
use crate::ift::ift_solve;
use crate::matrix::ExactMatrix;
use crate::multiindex::{monomials_of_degree, MultiIndex};
use crate::rational::GaussianRational;
use crate::series::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericModel {
    m: usize,
    d: usize,
    cap: u32,
    q: Vec<TruncatedSeries>,
}

/// Variable names for rendering model series: `z1..zm, chi1..chim, tau1..taud`.
pub fn model_var_names(m: usize, d: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(2 * m + d);
    for i in 1..=m {
        names.push(format!("z{}", i));
    }
    for i in 1..=m {
        names.push(format!("chi{}", i));
    }
    for r in 1..=d {
        names.push(format!("tau{}", r));
    }
    names
}

fn render_with(names: &[String], idx: &MultiIndex) -> String {
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    TruncatedSeries::monomial(names.len(), idx.degree(), idx.clone(), GaussianRational::one())
        .render(&refs)
}

impl GenericModel {
    /// Builds a model from its defining series, validating normality and
    /// reality exactly to the cap.
    pub fn from_normal(m: usize, d: usize, q: Vec<TruncatedSeries>) -> Result<GenericModel> {
        if m == 0 || d == 0 {
            return Err(SegreError::Precondition(
                "model needs m >= 1 and d >= 1".into(),
            ));
        }
        if q.len() != d {
            return Err(SegreError::Precondition(format!(
                "expected {} defining series, got {}",
                d,
                q.len()
            )));
        }
        let arity = 2 * m + d;
        let cap = q.iter().map(|s| s.cap()).min().unwrap();
        let q: Vec<TruncatedSeries> = q.into_iter().map(|s| s.truncate(cap)).collect();
        let names = model_var_names(m, d);
        for (r, s) in q.iter().enumerate() {
            if s.arity() != arity {
                return Err(SegreError::Precondition(format!(
                    "Q{} has arity {}, expected {}",
                    r + 1,
                    s.arity(),
                    arity
                )));
            }
            for (idx, c) in s.terms() {
                let is_tau_r = idx == &MultiIndex::unit(arity, 2 * m + r);
                if is_tau_r {
                    if !c.is_one() {
                        return Err(SegreError::Precondition(format!(
                            "Q{} must carry tau{} with coefficient 1",
                            r + 1,
                            r + 1
                        )));
                    }
                    continue;
                }
                let z_deg = idx.block_degree(0..m);
                let chi_deg = idx.block_degree(m..2 * m);
                if z_deg == 0 || chi_deg == 0 {
                    return Err(SegreError::Precondition(format!(
                        "normality violated in Q{} at monomial {}",
                        r + 1,
                        render_with(&names, idx)
                    )));
                }
            }
            if s.coeff(&MultiIndex::unit(arity, 2 * m + r)).is_zero() {
                return Err(SegreError::Precondition(format!(
                    "Q{} is missing its tau{} term",
                    r + 1,
                    r + 1
                )));
            }
        }
        let model = GenericModel { m, d, cap, q };
        // Reality: Q(z, chi, barQ(chi, z, w)) = w in the (z, chi, w) ring.
        let bar_q = model.bar_q();
        for r in 0..d {
            let args: Vec<TruncatedSeries> = (0..arity)
                .map(|v| {
                    if v < 2 * m {
                        TruncatedSeries::variable(arity, cap, v)
                    } else {
                        bar_q[v - 2 * m].clone()
                    }
                })
                .collect();
            let composed = model.q[r].compose(&args);
            let w_r = TruncatedSeries::variable(arity, cap, 2 * m + r);
            let defect = composed.sub(&w_r);
            if let Some((idx, _)) = defect.lowest_term() {
                return Err(SegreError::Precondition(format!(
                    "reality violated in Q{} at monomial {}",
                    r + 1,
                    render_with(&names, idx)
                )));
            }
        }
        Ok(model)
    }

    /// Builds a model from a real graph `Im w = phi(z, conj z, Re w)`:
    /// `phi` holds `d` series in `(z, chi, s)` (layout as the model ring)
    /// that are real-valued (`conj` + block swap fixes them) and vanish when
    /// `z = 0` or `chi = 0`. Solves `w = tau + 2i phi(z, chi, (w + tau)/2)`
    /// exactly to the cap.
    pub fn from_real_graph(m: usize, d: usize, phi: Vec<TruncatedSeries>) -> Result<GenericModel> {
        if phi.len() != d {
            return Err(SegreError::Precondition(format!(
                "expected {} graph series, got {}",
                d,
                phi.len()
            )));
        }
        let arity = 2 * m + d;
        let cap = phi.iter().map(|s| s.cap()).min().unwrap();
        let names = model_var_names(m, d);
        for (r, s) in phi.iter().enumerate() {
            if s.arity() != arity {
                return Err(SegreError::Precondition(format!(
                    "phi{} has arity {}, expected {}",
                    r + 1,
                    s.arity(),
                    arity
                )));
            }
            for (idx, _) in s.terms() {
                if idx.block_degree(0..m) == 0 || idx.block_degree(m..2 * m) == 0 {
                    return Err(SegreError::Precondition(format!(
                        "graph series phi{} has a term without both z- and chi-dependence: {}",
                        r + 1,
                        render_with(&names, idx)
                    )));
                }
            }
            let swapped = conj_block_swap(s, m, d);
            if swapped != *s {
                return Err(SegreError::Precondition(format!(
                    "graph series phi{} is not real-valued",
                    r + 1
                )));
            }
        }
        // Solve w_r = tau_r + 2i phi_r(z, chi, (w + tau)/2) for w(z, chi, tau).
        let big = arity + d; // (z, chi, tau | w)
        let two_i = GaussianRational::new(
            num_rational::BigRational::from_integer(0.into()),
            num_rational::BigRational::from_integer(2.into()),
        );
        let half = GaussianRational::from_ratio(1, 2);
        let phi_args: Vec<TruncatedSeries> = (0..arity)
            .map(|v| {
                if v < 2 * m {
                    TruncatedSeries::variable(big, cap, v)
                } else {
                    let tau = TruncatedSeries::variable(big, cap, v);
                    let w = TruncatedSeries::variable(big, cap, arity + (v - 2 * m));
                    tau.add(&w).scale(&half)
                }
            })
            .collect();
        let f: Vec<TruncatedSeries> = (0..d)
            .map(|r| {
                let w_r = TruncatedSeries::variable(big, cap, arity + r);
                let tau_r = TruncatedSeries::variable(big, cap, 2 * m + r);
                w_r.sub(&tau_r).sub(&phi[r].compose(&phi_args).scale(&two_i))
            })
            .collect();
        let q = ift_solve(&f, arity, d)?;
        GenericModel::from_normal(m, d, q)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn arity(&self) -> usize {
        2 * self.m + self.d
    }

    pub fn q(&self) -> &[TruncatedSeries] {
        &self.q
    }

    /// The conjugate defining series `barQ` as functions of `(chi, z, w)`,
    /// expressed in this ring's layout: entry `r` is the series whose value
    /// at `(a, b, c)` (first block `a`, second `b`, third `c`) equals the
    /// conjugate of `Q^r` at `(b, a, c)`.
    pub fn bar_q(&self) -> Vec<TruncatedSeries> {
        self.q
            .iter()
            .map(|s| conj_block_swap(s, self.m, self.d))
            .collect()
    }
}

/// Conjugates coefficients and swaps the z- and chi-blocks.
fn conj_block_swap(s: &TruncatedSeries, m: usize, d: usize) -> TruncatedSeries {
    let arity = 2 * m + d;
    let mut var_map = Vec::with_capacity(arity);
    for i in 0..m {
        var_map.push(m + i);
    }
    for i in 0..m {
        var_map.push(i);
    }
    for r in 0..d {
        var_map.push(2 * m + r);
    }
    s.conjugate_series().embed(arity, &var_map)
}

/// The CR frame of a model, in the graph chart `(z, chi, tau)`.
///
/// The holomorphic fields are `L_j = d/dz_j`; the antiholomorphic fields are
/// `Lbar_j = d/dchi_j + sum_r c[j][r] d/dtau_r` with coefficient series
/// `c[j][r] = (d barQ^r / d chi_j)(chi, z, Q(z, chi, tau))`, one cap lower
/// than the model.
#[derive(Clone, Debug)]
pub struct CrFrame {
    m: usize,
    d: usize,
    /// `c[j][r]`: tau-coefficients of the j-th antiholomorphic field.
    pub lt_tau: Vec<Vec<TruncatedSeries>>,
}

pub fn cr_frame(model: &GenericModel) -> CrFrame {
    let m = model.m();
    let d = model.d();
    let arity = model.arity();
    let cap = model.cap();
    let bar_q = model.bar_q();
    // Arguments (z, chi, Q) for substituting w = Q(z, chi, tau).
    let args: Vec<TruncatedSeries> = (0..arity)
        .map(|v| {
            if v < 2 * m {
                TruncatedSeries::variable(arity, cap, v)
            } else {
                model.q()[v - 2 * m].clone()
            }
        })
        .collect();
    let lt_tau: Vec<Vec<TruncatedSeries>> = (0..m)
        .map(|j| {
            (0..d)
                .map(|r| bar_q[r].differentiate(m + j).compose(&args))
                .collect()
        })
        .collect();
    CrFrame { m, d, lt_tau }
}

impl CrFrame {
    /// The frame as chart vector fields: each field is a coefficient vector
    /// over `(d/dz, d/dchi, d/dtau)`, indexed like the model variables.
    pub fn chart_fields(&self, arity: usize, cap: u32) -> Vec<Vec<TruncatedSeries>> {
        let m = self.m;
        let d = self.d;
        assert_eq!(arity, 2 * m + d);
        let mut fields = Vec::with_capacity(2 * m);
        for j in 0..m {
            let mut comp = vec![TruncatedSeries::zero(arity, cap); arity];
            comp[j] = TruncatedSeries::one(arity, cap);
            fields.push(comp);
        }
        for j in 0..m {
            let mut comp = vec![TruncatedSeries::zero(arity, cap); arity];
            comp[m + j] = TruncatedSeries::one(arity, cap);
            for r in 0..d {
                comp[2 * m + r] = self.lt_tau[j][r].truncate(cap.min(self.lt_tau[j][r].cap()));
            }
            fields.push(comp);
        }
        fields
    }
}

fn bracket(x: &[TruncatedSeries], y: &[TruncatedSeries]) -> Vec<TruncatedSeries> {
    let arity = x.len();
    (0..arity)
        .map(|b| {
            let mut acc: Option<TruncatedSeries> = None;
            for a in 0..arity {
                if !x[a].is_zero() && !y[b].is_zero() {
                    let t = x[a].mul(&y[b].differentiate(a));
                    acc = Some(match acc {
                        None => t,
                        Some(s) => s.add(&t),
                    });
                }
                if !y[a].is_zero() && !x[b].is_zero() {
                    let t = y[a].mul(&x[b].differentiate(a));
                    acc = Some(match acc {
                        None => t.neg(),
                        Some(s) => s.sub(&t),
                    });
                }
            }
            acc.unwrap_or_else(|| TruncatedSeries::zero(arity, 0))
        })
        .collect()
}

/// Incremental exact row-space tracker.
struct RowSpan {
    cols: usize,
    rows: Vec<Vec<GaussianRational>>,
    pivots: Vec<usize>,
}

impl RowSpan {
    fn new(cols: usize) -> Self {
        RowSpan {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the stored basis; returns true when it was
    /// independent (and is now part of the basis).
    fn insert(&mut self, mut row: Vec<GaussianRational>) -> bool {
        assert_eq!(row.len(), self.cols);
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if row[p].is_zero() {
                continue;
            }
            let factor = &row[p] * &r[p].inv().unwrap();
            for c in 0..self.cols {
                let v = &row[c] - &(&factor * &r[c]);
                row[c] = v;
            }
        }
        match row.iter().position(|v| !v.is_zero()) {
            Some(p) => {
                self.rows.push(row);
                self.pivots.push(p);
                true
            }
            None => false,
        }
    }
}

/// Smallest length of an iterated commutator of the CR frame fields whose
/// values at 0, together with all shorter ones, span the full tangent space;
/// `None` if no length up to `bound` suffices.
///
/// The search runs over right-nested commutator words in the `2m` frame
/// fields, which span the generated Lie algebra. Requires `cap >= bound` so
/// that every commutator value at the origin is determined.
pub fn finite_type_order(model: &GenericModel, bound: u32) -> Result<Option<u32>> {
    let arity = model.arity();
    if model.cap() < bound {
        return Err(SegreError::InsufficientCap {
            have: model.cap(),
            need: bound,
            context: "commutator search".into(),
        });
    }
    let frame = cr_frame(model);
    let generators = frame.chart_fields(arity, model.cap().max(1) - 1);
    let mut span = RowSpan::new(arity);
    for g in &generators {
        span.insert(g.iter().map(|s| s.constant_term()).collect());
    }
    if span.rank() == arity {
        return Ok(Some(1));
    }
    let mut frontier: Vec<Vec<TruncatedSeries>> = generators.clone();
    for level in 2..=bound {
        let mut next = Vec::new();
        let mut seen: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
        for x in &frontier {
            for g in &generators {
                let b = bracket(g, x);
                if b.iter().all(|s| s.is_zero()) {
                    continue;
                }
                let key = format!("{:?}", b);
                if !seen.insert(key) {
                    continue;
                }
                if span.insert(b.iter().map(|s| s.constant_term()).collect())
                    && span.rank() == arity
                {
                    return Ok(Some(level));
                }
                next.push(b);
            }
        }
        if next.len() > 4096 {
            return Err(SegreError::NotWellPosed(
                "commutator search exceeded its field budget".into(),
            ));
        }
        frontier = next;
    }
    Ok(None)
}

/// A spanning family for finite nondegeneracy: pairs `(r, alpha)` such that
/// the gradients `d/dz (d/dchi)^alpha Q^r` at 0, with `|alpha| <= k`, span;
/// the pairs are the graded-lex-first independent choices.
#[derive(Clone, Debug)]
pub struct SpanningSet {
    pub order: u32,
    pub pairs: Vec<(usize, MultiIndex)>,
    pub rows: Vec<Vec<GaussianRational>>,
}

/// Smallest `k` such that the vectors
/// `(d/dz_1 .. d/dz_m)(d/dchi)^alpha Q^r (0)`, over `1 <= |alpha| <= k` and
/// all components `r`, span `C^m`; `None` when no `k <= k_max` works.
pub fn nondegeneracy_order(model: &GenericModel, k_max: u32) -> Result<Option<SpanningSet>> {
    let m = model.m();
    let arity = model.arity();
    if model.cap() < k_max + 1 {
        return Err(SegreError::InsufficientCap {
            have: model.cap(),
            need: k_max + 1,
            context: "nondegeneracy rows".into(),
        });
    }
    let mut span = RowSpan::new(m);
    let mut pairs = Vec::new();
    let mut rows = Vec::new();
    for k in 1..=k_max {
        for r in 0..model.d() {
            for alpha_chi in monomials_of_degree(m, k) {
                // Row of derivative values: entry j is
                // d/dz_j (d/dchi)^alpha Q^r at 0 = coeff(z_j chi^alpha) * alpha!.
                let fact = GaussianRational::new(
                    num_rational::BigRational::from_integer(alpha_chi.factorial()),
                    num_rational::BigRational::from_integer(0.into()),
                );
                let row: Vec<GaussianRational> = (0..m)
                    .map(|j| {
                        let mut exps = vec![0u16; arity];
                        exps[j] = 1;
                        for i in 0..m {
                            exps[m + i] = alpha_chi.get(i);
                        }
                        &model.q()[r].coeff(&MultiIndex::new(exps)) * &fact
                    })
                    .collect();
                if span.insert(row.clone()) {
                    pairs.push((r, alpha_chi));
                    rows.push(row);
                    if span.rank() == m {
                        return Ok(Some(SpanningSet {
                            order: k,
                            pairs,
                            rows,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Signature `(n_plus, n_minus, n_zero)` of the Levi form of a hypersurface
/// model (`d = 1`): the inertia of the Hermitian matrix
/// `(d^2 Q / dz_j dchi_k)(0) / (2i)`.
pub fn levi_signature(model: &GenericModel) -> Result<(usize, usize, usize)> {
    if model.d() != 1 {
        return Err(SegreError::Precondition(format!(
            "Levi signature is defined for hypersurface models, got d = {}",
            model.d()
        )));
    }
    let m = model.m();
    let arity = model.arity();
    let two_i_inv = GaussianRational::new(
        num_rational::BigRational::from_integer(0.into()),
        num_rational::BigRational::from_integer(2.into()),
    )
    .inv()
    .unwrap();
    let b = ExactMatrix::from_fn(m, m, |j, k| {
        let mut exps = vec![0u16; arity];
        exps[j] = 1;
        exps[m + k] = 1;
        &model.q()[0].coeff(&MultiIndex::new(exps)) * &two_i_inv
    });
    if b != b.conj_transpose() {
        return Err(SegreError::Precondition(
            "Levi matrix is not Hermitian; the model violates reality".into(),
        ));
    }
    Ok(b.hermitian_inertia())
}

/// Computed invariants of a model, each reported together with the bound it
/// was searched under so a `None` always means "not attained up to the
/// bound" rather than a bare failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub finite_type_order: Option<u32>,
    pub finite_type_bound: u32,
    pub nondeg_order_k: Option<u32>,
    pub nondeg_bound: u32,
    /// Levi inertia `(n_plus, n_minus, n_zero)`; present for hypersurfaces
    /// (`d = 1`) only.
    pub levi_signature: Option<(usize, usize, usize)>,
    pub segre_rank_r: Option<usize>,
    pub segre_rank_bound: usize,
}

/// Runs every model invariant in one pass: finite type order up to
/// `bracket_bound`, nondegeneracy order up to `cap - 1`, Levi signature for
/// hypersurfaces, and the sampled Segre rank probe up to level 4.
pub fn analyze_model(
    model: &GenericModel,
    bracket_bound: u32,
    seed: u64,
) -> Result<AnalysisReport> {
    let bracket_bound = bracket_bound.min(model.cap());
    let finite_type = finite_type_order(model, bracket_bound)?;
    let k_max = model.cap().max(1) - 1;
    let nondeg = nondegeneracy_order(model, k_max)?;
    let levi = if model.d() == 1 {
        Some(levi_signature(model)?)
    } else {
        None
    };
    const R_MAX: usize = 4;
    const TRIALS: u32 = 8;
    let rank = crate::segre::find_segre_rank(model, R_MAX, TRIALS, seed)?;
    Ok(AnalysisReport {
        finite_type_order: finite_type,
        finite_type_bound: bracket_bound,
        nondeg_order_k: nondeg.map(|s| s.order),
        nondeg_bound: k_max,
        levi_signature: levi,
        segre_rank_r: rank,
        segre_rank_bound: R_MAX,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::GaussianRational as Q;

    fn two_i() -> Q {
        Q::from_parts(0, 1, 2, 1)
    }

    /// Q = tau + 2i z chi.
    pub fn lewy(cap: u32) -> GenericModel {
        let z = TruncatedSeries::variable(3, cap, 0);
        let chi = TruncatedSeries::variable(3, cap, 1);
        let tau = TruncatedSeries::variable(3, cap, 2);
        let q = tau.add(&z.mul(&chi).scale(&two_i()));
        GenericModel::from_normal(1, 1, vec![q]).unwrap()
    }

    /// Q = tau + 2i z^2 chi^2.
    pub fn quartic(cap: u32) -> GenericModel {
        let z = TruncatedSeries::variable(3, cap, 0);
        let chi = TruncatedSeries::variable(3, cap, 1);
        let tau = TruncatedSeries::variable(3, cap, 2);
        let q = tau.add(&z.pow(2).mul(&chi.pow(2)).scale(&two_i()));
        GenericModel::from_normal(1, 1, vec![q]).unwrap()
    }

    #[test]
    fn lewy_model_validates() {
        let model = lewy(8);
        assert_eq!(model.m(), 1);
        assert_eq!(model.d(), 1);
    }

    #[test]
    fn normality_violations_are_rejected() {
        let cap = 6;
        let z = TruncatedSeries::variable(3, cap, 0);
        let tau = TruncatedSeries::variable(3, cap, 2);
        // Q = tau + z^2 has a chi-free term.
        let q = tau.add(&z.pow(2));
        match GenericModel::from_normal(1, 1, vec![q]) {
            Err(SegreError::Precondition(msg)) => {
                assert!(msg.contains("normality"), "message: {}", msg)
            }
            other => panic!("expected a normality error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn reality_violations_are_rejected() {
        let cap = 6;
        let z = TruncatedSeries::variable(3, cap, 0);
        let chi = TruncatedSeries::variable(3, cap, 1);
        let tau = TruncatedSeries::variable(3, cap, 2);
        // Q = tau + z chi fails reality (the coefficient must be imaginary).
        let q = tau.add(&z.mul(&chi));
        match GenericModel::from_normal(1, 1, vec![q]) {
            Err(SegreError::Precondition(msg)) => {
                assert!(msg.contains("reality"), "message: {}", msg)
            }
            other => panic!("expected a reality error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn finite_type_values() {
        assert_eq!(finite_type_order(&lewy(8), 8).unwrap(), Some(2));
        assert_eq!(finite_type_order(&quartic(8), 8).unwrap(), Some(4));
        // Levi-flat: Q = tau is of infinite type.
        let tau = TruncatedSeries::variable(3, 8, 2);
        let flat = GenericModel::from_normal(1, 1, vec![tau]).unwrap();
        assert_eq!(finite_type_order(&flat, 8).unwrap(), None);
    }

    #[test]
    fn nondegeneracy_values() {
        let lspan = nondegeneracy_order(&lewy(8), 7).unwrap().unwrap();
        assert_eq!(lspan.order, 1);
        assert_eq!(lspan.pairs.len(), 1);
        assert_eq!(lspan.pairs[0].0, 0);
        assert_eq!(lspan.pairs[0].1, MultiIndex::new(vec![1]));
        assert_eq!(lspan.rows[0][0], two_i());
        // The quartic is degenerate at every order: all rows vanish.
        assert!(nondegeneracy_order(&quartic(8), 7).unwrap().is_none());
    }

    #[test]
    fn levi_signatures() {
        assert_eq!(levi_signature(&lewy(8)).unwrap(), (1, 0, 0));
        assert_eq!(levi_signature(&quartic(8)).unwrap(), (0, 0, 1));
        // Q = tau + 2i(z1 chi1 - z2 chi2): signature (1, 1, 0).
        let cap = 6;
        let arity = 5;
        let z1 = TruncatedSeries::variable(arity, cap, 0);
        let z2 = TruncatedSeries::variable(arity, cap, 1);
        let c1 = TruncatedSeries::variable(arity, cap, 2);
        let c2 = TruncatedSeries::variable(arity, cap, 3);
        let tau = TruncatedSeries::variable(arity, cap, 4);
        let q = tau.add(&z1.mul(&c1).sub(&z2.mul(&c2)).scale(&two_i()));
        let saddle = GenericModel::from_normal(2, 1, vec![q]).unwrap();
        assert_eq!(levi_signature(&saddle).unwrap(), (1, 1, 0));
        // d = 2 is rejected.
        let big = 6;
        let t1 = TruncatedSeries::variable(big, cap, 4);
        let t2 = TruncatedSeries::variable(big, cap, 5);
        let zz1 = TruncatedSeries::variable(big, cap, 0);
        let cc1 = TruncatedSeries::variable(big, cap, 2);
        let zz2 = TruncatedSeries::variable(big, cap, 1);
        let cc2 = TruncatedSeries::variable(big, cap, 3);
        let pair = GenericModel::from_normal(
            2,
            2,
            vec![
                t1.add(&zz1.mul(&cc1).scale(&two_i())),
                t2.add(&zz2.mul(&cc2).scale(&two_i())),
            ],
        )
        .unwrap();
        assert!(levi_signature(&pair).is_err());
        assert_eq!(finite_type_order(&pair, 6).unwrap(), Some(2));
    }

    #[test]
    fn products_model_invariants() {
        // Q = tau + 2i(z1 chi1 - z2 chi2 + z3 chi1 - z3 chi2 + z1 chi3 - z2 chi3),
        // the hypersurface in C^4 carrying the corpus product maps.
        let cap = 6;
        let arity = 7;
        let v = |i| TruncatedSeries::variable(arity, cap, i);
        let sum = v(0)
            .mul(&v(3))
            .sub(&v(1).mul(&v(4)))
            .add(&v(2).mul(&v(3)))
            .sub(&v(2).mul(&v(4)))
            .add(&v(0).mul(&v(5)))
            .sub(&v(1).mul(&v(5)));
        let q = v(6).add(&sum.scale(&two_i()));
        let model = GenericModel::from_normal(3, 1, vec![q]).unwrap();
        assert_eq!(levi_signature(&model).unwrap(), (1, 1, 1));
        // Bilinear with a rank-2 coefficient matrix: no order makes it
        // nondegenerate.
        assert!(nondegeneracy_order(&model, 5).unwrap().is_none());
        assert_eq!(finite_type_order(&model, 6).unwrap(), Some(2));
    }

    #[test]
    fn graph_solve_quartic_mixed() {
        // phi = z chi + z chi (z^2 + chi^2) / 2 has no s-dependence, so
        // Q = tau + 2i phi exactly.
        let cap = 8;
        let z = TruncatedSeries::variable(3, cap, 0);
        let chi = TruncatedSeries::variable(3, cap, 1);
        let tau = TruncatedSeries::variable(3, cap, 2);
        let half = Q::from_ratio(1, 2);
        let phi = z.mul(&chi).add(
            &z.mul(&chi)
                .mul(&z.pow(2).add(&chi.pow(2)))
                .scale(&half),
        );
        let model = GenericModel::from_real_graph(1, 1, vec![phi]).unwrap();
        let i_coef = Q::from_parts(0, 1, 1, 1);
        let expected = tau
            .add(&z.mul(&chi).scale(&two_i()))
            .add(&z.pow(3).mul(&chi).scale(&i_coef))
            .add(&z.mul(&chi.pow(3)).scale(&i_coef));
        assert_eq!(*model.q(), vec![expected]);
        assert_eq!(finite_type_order(&model, 8).unwrap(), Some(2));
    }

    #[test]
    fn graph_solve_with_s_dependence() {
        // phi = z chi + z^4 chi^2 (1 + i s) + z^2 chi^4 (1 - i s): frozen
        // low-order coefficients of the solved normal form.
        let cap = 8;
        let z = TruncatedSeries::variable(3, cap, 0);
        let chi = TruncatedSeries::variable(3, cap, 1);
        let s = TruncatedSeries::variable(3, cap, 2);
        let one = TruncatedSeries::one(3, cap);
        let phi = z
            .mul(&chi)
            .add(&z.pow(4).mul(&chi.pow(2)).mul(&one.add(&s.scale(&Q::i()))))
            .add(&z.pow(2).mul(&chi.pow(4)).mul(&one.sub(&s.scale(&Q::i()))));
        let model = GenericModel::from_real_graph(1, 1, vec![phi]).unwrap();
        let q = &model.q()[0];
        assert_eq!(q.coeff(&MultiIndex::new(vec![1, 1, 0])), two_i());
        assert_eq!(q.coeff(&MultiIndex::new(vec![4, 2, 0])), two_i());
        assert_eq!(q.coeff(&MultiIndex::new(vec![2, 4, 0])), two_i());
        assert_eq!(q.coeff(&MultiIndex::new(vec![4, 2, 1])), Q::from_int(-2));
        assert_eq!(q.coeff(&MultiIndex::new(vec![2, 4, 1])), Q::from_int(2));
    }

    #[test]
    fn graph_rejects_complex_valued_data() {
        let cap = 5;
        let z = TruncatedSeries::variable(3, cap, 0);
        let chi = TruncatedSeries::variable(3, cap, 1);
        let phi = z.mul(&chi).scale(&Q::i());
        assert!(GenericModel::from_real_graph(1, 1, vec![phi]).is_err());
    }

    #[test]
    fn cr_frame_lewy() {
        // Lbar = d/dchi - 2i z d/dtau.
        let frame = cr_frame(&lewy(6));
        let minus_two_i = Q::from_parts(0, 1, -2, 1);
        assert_eq!(
            frame.lt_tau[0][0],
            TruncatedSeries::variable(3, 5, 0).scale(&minus_two_i)
        );
    }
}
