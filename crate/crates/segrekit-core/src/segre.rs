//! Iterated Segre mappings of a model.
//!
//! The level-`s` Segre mapping sends `s` blocks of `m` variables
//! `(t^0, ..., t^{s-1})` to a point `(t^0, u^s)` of the ambient space:
//!
//! * `u^1 = 0`,
//! * `u^s(t^0, ..., t^{s-1}) = Q(t^0, t^1, conj(u^{s-1})(t^1, ..., t^{s-1}))`,
//!
//! where `conj` conjugates coefficients. Successive levels are stable:
//! setting the last block to zero recovers the previous level.

use crate::error::{Result, SegreError};
use crate::matrix::ExactMatrix;
use crate::model::GenericModel;
use crate::rational::GaussianRational;
use crate::sample::RationalSampler;
use crate::series::TruncatedSeries;

/// The level-`s` Segre mapping of a model: `m + d` component series in
/// `s * m` variables (blocks `t^0, ..., t^{s-1}` of `m` each).
#[derive(Clone, Debug)]
pub struct SegreMapping {
    m: usize,
    d: usize,
    level: usize,
    components: Vec<TruncatedSeries>,
}

impl SegreMapping {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn arity(&self) -> usize {
        self.level * self.m
    }

    /// All `m + d` components: the `z`-part (the `t^0` coordinates) followed
    /// by the `w`-part `u^s`.
    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    /// The `w`-part `u^s` alone.
    pub fn u(&self) -> &[TruncatedSeries] {
        &self.components[self.m..]
    }
}

/// Builds the level-`s` Segre mapping, exact to the model cap in the `t`
/// variables.
pub fn segre_map(model: &GenericModel, s: usize) -> SegreMapping {
    assert!(s >= 1, "Segre mapping level starts at 1");
    let m = model.m();
    let d = model.d();
    let cap = model.cap();
    // u holds the w-part at the current level, in `level * m` variables.
    let mut u: Vec<TruncatedSeries> = (0..d).map(|_| TruncatedSeries::zero(m, cap)).collect();
    for level in 2..=s {
        let arity = level * m;
        // conj(u^{level-1}) shifted one block to the right: variables
        // t^1..t^{level-1}.
        let shift: Vec<usize> = (m..(level * m).min(arity)).collect();
        let prev_arity = (level - 1) * m;
        let bar_prev: Vec<TruncatedSeries> = u
            .iter()
            .map(|s| s.conjugate_series().embed(arity, &shift[..prev_arity]))
            .collect();
        let args: Vec<TruncatedSeries> = (0..(2 * m + d))
            .map(|v| {
                if v < m {
                    TruncatedSeries::variable(arity, cap, v)
                } else if v < 2 * m {
                    TruncatedSeries::variable(arity, cap, v)
                } else {
                    bar_prev[v - 2 * m].clone()
                }
            })
            .collect();
        u = model.q().iter().map(|q| q.compose(&args)).collect();
    }
    let arity = s * m;
    let mut components: Vec<TruncatedSeries> = (0..m)
        .map(|i| TruncatedSeries::variable(arity, cap, i))
        .collect();
    for comp in &u {
        components.push(if s == 1 {
            TruncatedSeries::zero(arity, cap)
        } else {
            comp.clone()
        });
    }
    SegreMapping {
        m,
        d,
        level: s,
        components,
    }
}

/// Substitutes the symmetric point into a level-`2r` mapping: `t^0 = 0`,
/// `t^j = x^j` and `t^{2r-j} = x^j` for `1 <= j <= r`. Returns the
/// components as series in the `r * m` variables `(x^1, ..., x^r)`.
pub fn symmetric_point_pullback(v: &SegreMapping, r: usize) -> Vec<TruncatedSeries> {
    assert_eq!(v.level(), 2 * r, "symmetric point needs an even level 2r");
    let m = v.m();
    let arity = r * m;
    let cap = v.components()[0].cap();
    let args: Vec<TruncatedSeries> = (0..(2 * r * m))
        .map(|var| {
            let block = var / m;
            let off = var % m;
            if block == 0 {
                TruncatedSeries::zero(arity, cap)
            } else if block <= r {
                TruncatedSeries::variable(arity, cap, (block - 1) * m + off)
            } else {
                let j = 2 * r - block; // 1 <= j <= r - 1
                TruncatedSeries::variable(arity, cap, (j - 1) * m + off)
            }
        })
        .collect();
    v.components().iter().map(|c| c.substitute(&args)).collect()
}

#[derive(Clone, Debug)]
pub struct SegreRankReport {
    pub r: usize,
    /// The level-`2r` mapping vanishes identically at the symmetric point.
    pub symmetric_point_vanishes: bool,
    /// Some sampled symmetric point gave the full Jacobian rank `m + d` in
    /// the block `(t^0, t^{r+1}, ..., t^{2r-1})`.
    pub rank_attained: bool,
    pub trials_used: u32,
}

/// Tests whether the level-`2r` Segre mapping attains generic rank `m + d`
/// in the block `(t^0, t^{r+1}, ..., t^{2r-1})` along the symmetric point,
/// probing `trials` seeded rational samples. Also checks the symmetric-point
/// vanishing identity, which holds for every model and every `r`.
pub fn segre_rank_r(
    model: &GenericModel,
    r: usize,
    trials: u32,
    seed: u64,
) -> Result<SegreRankReport> {
    assert!(r >= 1, "rank test needs r >= 1");
    let m = model.m();
    let d = model.d();
    if model.cap() < 2 {
        return Err(SegreError::InsufficientCap {
            have: model.cap(),
            need: 2,
            context: "Segre rank probe".into(),
        });
    }
    let v = segre_map(model, 2 * r);
    let pulled = symmetric_point_pullback(&v, r);
    let symmetric_point_vanishes = pulled.iter().all(|c| c.is_zero());

    // Jacobian columns: t^0 block and blocks t^{r+1}..t^{2r-1}.
    let mut cols: Vec<usize> = (0..m).collect();
    for block in (r + 1)..(2 * r) {
        cols.extend((block * m)..((block + 1) * m));
    }
    let jac: Vec<Vec<TruncatedSeries>> = v
        .components()
        .iter()
        .map(|c| cols.iter().map(|&col| c.differentiate(col)).collect())
        .collect();

    let mut sampler = RationalSampler::new(seed);
    let mut rank_attained = false;
    let mut trials_used = 0;
    for _ in 0..trials {
        trials_used += 1;
        let x = sampler.point(r * m, 3);
        // Symmetric t-point: t^0 = 0, t^j = x^j, t^{2r-j} = x^j.
        let mut t_point = vec![GaussianRational::zero(); 2 * r * m];
        for j in 1..=r {
            for off in 0..m {
                t_point[j * m + off] = x[(j - 1) * m + off].clone();
                if j < r {
                    t_point[(2 * r - j) * m + off] = x[(j - 1) * m + off].clone();
                }
            }
        }
        let jm = ExactMatrix::from_fn(m + d, cols.len(), |i, j| jac[i][j].eval(&t_point));
        if jm.rank() == m + d {
            rank_attained = true;
            break;
        }
    }
    Ok(SegreRankReport {
        r,
        symmetric_point_vanishes,
        rank_attained,
        trials_used,
    })
}

/// Smallest `r <= r_max` whose rank probe succeeds.
pub fn find_segre_rank(
    model: &GenericModel,
    r_max: usize,
    trials: u32,
    seed: u64,
) -> Result<Option<usize>> {
    for r in 1..=r_max {
        let report = segre_rank_r(model, r, trials, seed)?;
        if report.rank_attained {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;
    use crate::rational::GaussianRational as Q;

    fn two_i() -> Q {
        Q::from_parts(0, 1, 2, 1)
    }

    fn lewy(cap: u32) -> GenericModel {
        let z = TruncatedSeries::variable(3, cap, 0);
        let chi = TruncatedSeries::variable(3, cap, 1);
        let tau = TruncatedSeries::variable(3, cap, 2);
        GenericModel::from_normal(1, 1, vec![tau.add(&z.mul(&chi).scale(&two_i()))]).unwrap()
    }

    fn quartic(cap: u32) -> GenericModel {
        let z = TruncatedSeries::variable(3, cap, 0);
        let chi = TruncatedSeries::variable(3, cap, 1);
        let tau = TruncatedSeries::variable(3, cap, 2);
        GenericModel::from_normal(
            1,
            1,
            vec![tau.add(&z.pow(2).mul(&chi.pow(2)).scale(&two_i()))],
        )
        .unwrap()
    }

    #[test]
    fn lewy_segre_mappings_frozen() {
        // u^2 = 2i t0 t1, u^3 = 2i (t0 t1 - t1 t2),
        // u^4 = 2i (t0 t1 - t1 t2 + t2 t3): alternating chain sums.
        let model = lewy(8);
        let v2 = segre_map(&model, 2);
        assert_eq!(
            v2.u()[0],
            TruncatedSeries::variable(2, 8, 0)
                .mul(&TruncatedSeries::variable(2, 8, 1))
                .scale(&two_i())
        );
        let v4 = segre_map(&model, 4);
        let t = |i| TruncatedSeries::variable(4, 8, i);
        let expected = t(0)
            .mul(&t(1))
            .sub(&t(1).mul(&t(2)))
            .add(&t(2).mul(&t(3)))
            .scale(&two_i());
        assert_eq!(v4.u()[0], expected);
    }

    #[test]
    fn stability_under_zero_last_block() {
        let model = lewy(8);
        let v3 = segre_map(&model, 3);
        let v4 = segre_map(&model, 4);
        // Set t^3 = 0 in v^4: must equal v^3 embedded.
        let args: Vec<TruncatedSeries> = (0..4)
            .map(|i| {
                if i < 3 {
                    TruncatedSeries::variable(3, 8, i)
                } else {
                    TruncatedSeries::zero(3, 8)
                }
            })
            .collect();
        for (c4, c3) in v4.components().iter().zip(v3.components()) {
            assert_eq!(c4.substitute(&args), *c3);
        }
    }

    #[test]
    fn symmetric_point_identity_and_rank() {
        for model in [lewy(8), quartic(8)] {
            for r in 1..=2usize {
                let report = segre_rank_r(&model, r, 8, 42).unwrap();
                assert!(report.symmetric_point_vanishes, "identity at r = {}", r);
            }
        }
        // r = 1 probes only the m columns of t^0, so rank m + d needs r = 2:
        // for the Lewy map the block Jacobian at (0, x1, x2, x1) is
        // [[1, 0], [2i x1, 2i x2]], of rank 2 for x2 != 0; the quartic gives
        // [[1, 0], [4i x1^2 x2, 4i x2^2 x1]] with the same conclusion.
        assert_eq!(find_segre_rank(&lewy(8), 3, 8, 42).unwrap(), Some(2));
        assert_eq!(find_segre_rank(&quartic(8), 3, 8, 42).unwrap(), Some(2));
    }

    #[test]
    fn quartic_segre_map_values() {
        // u^2 = 2i (t0)^2 (t1)^2 for the quartic model.
        let model = quartic(8);
        let v2 = segre_map(&model, 2);
        assert_eq!(
            v2.u()[0].coeff(&MultiIndex::new(vec![2, 2])),
            two_i()
        );
        assert_eq!(v2.u()[0].num_terms(), 1);
    }

    #[test]
    fn two_codimension_segre() {
        // Q_r = tau_r + 2i z_r chi_r: u^2 = (2i t0_1 t1_1, 2i t0_2 t1_2).
        let cap = 6;
        let big = 6;
        let v = |i| TruncatedSeries::variable(big, cap, i);
        let model = GenericModel::from_normal(
            2,
            2,
            vec![
                v(4).add(&v(0).mul(&v(2)).scale(&two_i())),
                v(5).add(&v(1).mul(&v(3)).scale(&two_i())),
            ],
        )
        .unwrap();
        let v2 = segre_map(&model, 2);
        assert_eq!(v2.arity(), 4);
        let t = |i| TruncatedSeries::variable(4, cap, i);
        assert_eq!(v2.u()[0], t(0).mul(&t(2)).scale(&two_i()));
        assert_eq!(v2.u()[1], t(1).mul(&t(3)).scale(&two_i()));
        let low = segre_rank_r(&model, 1, 8, 7).unwrap();
        assert!(low.symmetric_point_vanishes);
        assert!(!low.rank_attained, "m columns cannot reach rank m + d");
        let report = segre_rank_r(&model, 2, 8, 7).unwrap();
        assert!(report.symmetric_point_vanishes);
        assert!(report.rank_attained);
    }
}
