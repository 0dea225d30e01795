//! Implicit function theorem solver and pointwise inversion of parametrized
//! series maps.
//!
//! [`ift_solve`] inverts triangular-by-valuation systems with an exact Newton
//! iteration whose residual valuation doubles each step. Truncation caps are
//! tracked honestly throughout: every reported coefficient is exactly
//! determined by the input coefficients.

use crate::error::{Result, SegreError};
use crate::matrix::{ExactMatrix, SeriesMatrix};
use crate::rational::GaussianRational;
use crate::series::TruncatedSeries;

/// Solves `F(x, y) = 0` for `y = y(x)` with `y(0) = 0`.
///
/// `f` holds `ny` series in `nx + ny` variables (the `x`-block first), each
/// with zero constant term; the Jacobian `dF/dy` at the origin must be
/// invertible. Returns `ny` series in the `nx` variables, exact to the
/// common cap, with `F(x, y(x)) = 0` to that cap.
pub fn ift_solve(f: &[TruncatedSeries], nx: usize, ny: usize) -> Result<Vec<TruncatedSeries>> {
    if f.len() != ny {
        return Err(SegreError::Precondition(format!(
            "implicit system needs {} equations for {} unknowns, got {}",
            ny,
            ny,
            f.len()
        )));
    }
    let arity = nx + ny;
    let cap = f.iter().map(|s| s.cap()).min().unwrap_or(0);
    if cap == 0 {
        return Err(SegreError::InsufficientCap {
            have: 0,
            need: 1,
            context: "implicit solve".into(),
        });
    }
    for (i, s) in f.iter().enumerate() {
        if s.arity() != arity {
            return Err(SegreError::Precondition(format!(
                "equation {} has arity {}, expected {}",
                i,
                s.arity(),
                arity
            )));
        }
        if !s.constant_term().is_zero() {
            return Err(SegreError::Precondition(format!(
                "equation {} does not vanish at the origin",
                i
            )));
        }
    }
    // dF/dy as series (cap - 1), and its constant part.
    let jac = SeriesMatrix::new(
        ny,
        ny,
        (0..ny)
            .flat_map(|i| (0..ny).map(move |j| f[i].differentiate(nx + j)))
            .collect(),
    );
    let j0 = jac.constant_matrix();
    let j0_inv = j0.inverse().ok_or_else(|| {
        SegreError::NotWellPosed("Jacobian in the unknown block is singular at the origin".into())
    })?;

    let mut y: Vec<TruncatedSeries> = (0..ny).map(|_| TruncatedSeries::zero(nx, cap)).collect();

    // Newton: y <- y - J(x, y)^{-1} F(x, y). The residual valuation at least
    // doubles per step, so ceil(log2(cap)) + 2 steps always suffice.
    let max_steps = 34 - (cap.leading_zeros().min(32)) + 2;
    for _ in 0..max_steps {
        let residual: Vec<TruncatedSeries> = f.iter().map(|s| s.eval_tail(nx, &y)).collect();
        if residual.iter().all(|r| r.is_zero()) {
            return Ok(y);
        }
        let jx = jac.map(|e| e.eval_tail(nx, &y));
        let delta = solve_unit_system(&jx, &j0_inv, &residual, cap);
        for (yi, d) in y.iter_mut().zip(&delta) {
            *yi = yi.sub(d);
        }
    }
    unreachable!("Newton iteration failed to converge within its step bound");
}

/// Solves `J delta = r` for series `delta`, exact to `out_cap`, where `J` is
/// known to cap `out_cap - 1`, has invertible constant part `j0`, and every
/// component of `r` has valuation at least 1. Uses the Neumann expansion
/// `J^{-1} = sum (-(j0^{-1} J - I))^k j0^{-1}`; the valuation of `r` covers
/// the one missing degree of `J`.
fn solve_unit_system(
    jx: &SeriesMatrix,
    j0_inv: &ExactMatrix,
    r: &[TruncatedSeries],
    out_cap: u32,
) -> Vec<TruncatedSeries> {
    let n = r.len();
    let inner_arity = r[0].arity();
    let jac_cap = jx.min_cap();
    // n_mat = j0^{-1} jx - I, valuation >= 1 entries at cap jac_cap.
    let j0_inv_series = j0_inv.to_series_matrix(inner_arity, jac_cap);
    let normalized = j0_inv_series.mul(jx);
    let id = SeriesMatrix::identity(n, inner_arity, jac_cap);
    let n_mat = normalized.sub(&id);

    let apply_const = |m: &ExactMatrix, v: &[TruncatedSeries]| -> Vec<TruncatedSeries> {
        (0..n)
            .map(|i| {
                let mut acc = TruncatedSeries::zero(inner_arity, out_cap);
                for k in 0..n {
                    acc = acc.add(&v[k].scale(m.at(i, k)));
                }
                acc
            })
            .collect()
    };
    let u = apply_const(j0_inv, r);
    let mut acc = u.clone();
    let mut pw = u;
    for _ in 0..out_cap {
        // pw <- -(n_mat) * pw, exact to out_cap because pw has valuation >= 1.
        let next: Vec<TruncatedSeries> = (0..n)
            .map(|i| {
                let mut s = TruncatedSeries::zero(inner_arity, out_cap);
                for k in 0..n {
                    let e = n_mat.at(i, k);
                    if e.is_zero() || pw[k].is_zero() {
                        continue;
                    }
                    s = s.add(&e.mul_exact_to(&pw[k], out_cap));
                }
                s.neg()
            })
            .collect();
        if next.iter().all(|s| s.is_zero()) {
            return acc;
        }
        for (a, nx) in acc.iter_mut().zip(&next) {
            *a = a.add(nx);
        }
        pw = next;
    }
    acc
}

/// Inverts a parametrized polynomial map at a base point of the parameter
/// block.
///
/// `v` holds `N` series in `rx + rxi` variables (parameters `x` first, then
/// `xi`), each vanishing identically at `xi = 0`. The Jacobian `dv/dxi` at
/// `xi = 0` must contain an `N x N` minor whose determinant `d(x)` is not
/// identically zero. Given a sample `x0` with `d(x0) != 0`, returns
///
/// * `delta0 = d(x0)^2`, the exact squared denominator at the base point, and
/// * `phi0`: `rxi` series in `N` new variables `Z`, supported on the chosen
///   column set and zero elsewhere, with `v(x0, phi0(Z)) = Z` to the cap.
///
/// The stored terms of `v` are treated as an exact polynomial (the intended
/// inputs are polynomial iterated Segre data); a vanishing `d(x0)` reports a
/// degenerate sample so the caller can resample.
pub fn denominator_inverse(
    v: &[TruncatedSeries],
    rx: usize,
    rxi: usize,
    x0: &[GaussianRational],
) -> Result<(GaussianRational, Vec<TruncatedSeries>)> {
    let n = v.len();
    assert!(n >= 1, "empty map");
    assert_eq!(x0.len(), rx, "base point lives in the parameter block");
    let arity = rx + rxi;
    let cap = v.iter().map(|s| s.cap()).min().unwrap();
    for (l, s) in v.iter().enumerate() {
        if s.arity() != arity {
            return Err(SegreError::Precondition(format!(
                "component {} has arity {}, expected {}",
                l,
                s.arity(),
                arity
            )));
        }
        if s.terms().any(|(idx, _)| idx.block_degree(rx..arity) == 0) {
            return Err(SegreError::Precondition(format!(
                "component {} does not vanish identically at xi = 0",
                l
            )));
        }
    }
    if rxi < n {
        return Err(SegreError::NotWellPosed(format!(
            "cannot invert {} components through {} coordinates",
            n, rxi
        )));
    }

    // Jacobian columns d v_l / d xi_j at xi = 0, as series in x alone.
    let jac_cols: Vec<Vec<TruncatedSeries>> = (0..rxi)
        .map(|j| {
            v.iter()
                .map(|s| {
                    s.differentiate(rx + j)
                        .retain_terms(|idx| idx.block_degree(rx..arity) == 0)
                })
                .collect()
        })
        .collect();

    // Graded-first column subset with a not-identically-zero determinant.
    let mut chosen: Option<(Vec<usize>, TruncatedSeries)> = None;
    for subset in k_subsets(rxi, n) {
        let mut entries: Vec<TruncatedSeries> = Vec::with_capacity(n * n);
        for l in 0..n {
            for &j in &subset {
                entries.push(jac_cols[j][l].clone());
            }
        }
        let m = SeriesMatrix::new(n, n, entries);
        let (det, _) = m.det_adjugate();
        if !det.is_zero() {
            chosen = Some((subset, det));
            break;
        }
    }
    let Some((columns, det)) = chosen else {
        return Err(SegreError::NotWellPosed(
            "no invertible minor: the map is rank deficient in the xi-block".into(),
        ));
    };

    let mut full_point = x0.to_vec();
    full_point.extend(vec![GaussianRational::zero(); rxi]);
    let d0 = det.eval(&full_point);
    if d0.is_zero() {
        return Err(SegreError::DegenerateSample(
            "denominator vanishes at the sampled base point".into(),
        ));
    }

    // W(xi') := v(x0, xi' embedded in the chosen columns): N series in N vars.
    let w: Vec<TruncatedSeries> = v
        .iter()
        .map(|s| {
            let args: Vec<TruncatedSeries> = (0..arity)
                .map(|slot| {
                    if slot < rx {
                        TruncatedSeries::constant(n, cap, x0[slot].clone())
                    } else if let Some(pos) = columns.iter().position(|&c| c == slot - rx) {
                        TruncatedSeries::variable(n, cap, pos)
                    } else {
                        TruncatedSeries::zero(n, cap)
                    }
                })
                .collect();
            s.substitute(&args)
        })
        .collect();

    // Solve W(phi') = Z via F(Z, xi') = W(xi') - Z.
    let f: Vec<TruncatedSeries> = (0..n)
        .map(|l| {
            let w_embedded = w[l].embed(2 * n, &(n..2 * n).collect::<Vec<_>>());
            let z_l = TruncatedSeries::variable(2 * n, cap, l);
            w_embedded.sub(&z_l)
        })
        .collect();
    let phi_selected = ift_solve(&f, n, n)?;

    let mut phi0 = vec![TruncatedSeries::zero(n, cap); rxi];
    for (pos, &col) in columns.iter().enumerate() {
        phi0[col] = phi_selected[pos].clone();
    }

    // Postcondition: v(x0, phi0(Z)) = Z exactly to the cap.
    for (l, s) in v.iter().enumerate() {
        let args: Vec<TruncatedSeries> = (0..arity)
            .map(|slot| {
                if slot < rx {
                    TruncatedSeries::constant(n, cap, x0[slot].clone())
                } else {
                    phi0[slot - rx].clone()
                }
            })
            .collect();
        let back = s.substitute(&args);
        let z_l = TruncatedSeries::variable(n, cap, l);
        assert!(
            back == z_l,
            "pointwise inverse failed its defining identity in component {}",
            l
        );
    }

    Ok((&d0 * &d0, phi0))
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, start: usize, n: usize, k: usize) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let remaining = k - current.len();
        for i in start..=(n - remaining) {
            current.push(i);
            rec(out, current, i + 1, n, k);
            current.pop();
        }
    }
    if k <= n {
        rec(&mut out, &mut current, 0, n, k);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;
    use crate::rational::GaussianRational as Q;

    fn var(arity: usize, cap: u32, v: usize) -> TruncatedSeries {
        TruncatedSeries::variable(arity, cap, v)
    }

    #[test]
    fn catalan_generating_series() {
        // y = x + y^2: coefficients are the Catalan numbers, frozen from the
        // recurrence c_{n+1} = sum_i c_i c_{n-i}, c_1 = 1.
        let cap = 9;
        let x = var(2, cap, 0);
        let y = var(2, cap, 1);
        let f = y.sub(&x).sub(&y.mul(&y));
        let sol = ift_solve(&[f], 1, 1).unwrap();
        let mut catalan = vec![0i64; (cap + 1) as usize];
        catalan[1] = 1;
        for n in 1..cap as usize {
            let mut s = 0;
            for i in 1..=n {
                s += catalan[i] * catalan[n + 1 - i];
            }
            catalan[n + 1] = s;
        }
        for d in 1..=cap as usize {
            assert_eq!(
                sol[0].coeff(&MultiIndex::new(vec![d as u16])),
                Q::from_int(catalan[d]),
                "Catalan coefficient at degree {}",
                d
            );
        }
    }

    #[test]
    fn two_by_two_system() {
        // y1 = x1 + y1 y2, y2 = x2 + y1^2: check the residual vanishes.
        let cap = 7;
        let x1 = var(4, cap, 0);
        let x2 = var(4, cap, 1);
        let y1 = var(4, cap, 2);
        let y2 = var(4, cap, 3);
        let f1 = y1.sub(&x1).sub(&y1.mul(&y2));
        let f2 = y2.sub(&x2).sub(&y1.mul(&y1));
        let sol = ift_solve(&[f1.clone(), f2.clone()], 2, 2).unwrap();
        let args: Vec<TruncatedSeries> = vec![
            var(2, cap, 0),
            var(2, cap, 1),
            sol[0].clone(),
            sol[1].clone(),
        ];
        assert!(f1.compose(&args).is_zero());
        assert!(f2.compose(&args).is_zero());
    }

    #[test]
    fn singular_jacobian_is_rejected() {
        let cap = 4;
        let x = var(2, cap, 0);
        let y = var(2, cap, 1);
        let f = x.sub(&y.mul(&y));
        match ift_solve(&[f], 1, 1) {
            Err(SegreError::NotWellPosed(_)) => {}
            other => panic!("expected NotWellPosed, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn denominator_inverse_worked_example() {
        // v(x, xi) = (x xi1, xi2): d(x) = x, delta0 = x0^2,
        // phi0 = (Z1 / x0, Z2).
        let cap = 6;
        let x = var(3, cap, 0);
        let xi1 = var(3, cap, 1);
        let xi2 = var(3, cap, 2);
        let v = vec![x.mul(&xi1), xi2.clone()];
        let x0 = vec![Q::from_int(2)];
        let (delta0, phi0) = denominator_inverse(&v, 1, 2, &x0).unwrap();
        assert_eq!(delta0, Q::from_int(4));
        assert_eq!(
            phi0[0].coeff(&MultiIndex::new(vec![1, 0])),
            Q::from_ratio(1, 2)
        );
        assert_eq!(phi0[1], var(2, cap, 1));
    }

    #[test]
    fn denominator_inverse_detects_degenerate_sample() {
        let cap = 4;
        let x = var(2, cap, 0);
        let xi = var(2, cap, 1);
        let v = vec![x.mul(&xi)];
        match denominator_inverse(&v, 1, 1, &[Q::zero()]) {
            Err(SegreError::DegenerateSample(_)) => {}
            other => panic!("expected DegenerateSample, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn subsets_enumeration() {
        assert_eq!(k_subsets(4, 2).len(), 6);
        assert_eq!(k_subsets(4, 2)[0], vec![0, 1]);
        assert_eq!(k_subsets(3, 3), vec![vec![0, 1, 2]]);
        assert!(k_subsets(2, 3).is_empty());
    }
}
