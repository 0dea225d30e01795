//! Exact truncated multivariate power series over the Gaussian rationals.
//!
//! A [`TruncatedSeries`] stores the coefficients of all monomials of total
//! degree at most `cap` in a fixed number of variables. Invariants:
//!
//! * every stored key has the series' arity and degree `<= cap`,
//! * no stored coefficient is zero,
//! * arithmetic propagates `cap` as the minimum of the operands' caps, so a
//!   coefficient is only ever reported when it is exactly determined.
//!
//! Requesting a coefficient beyond the cap panics rather than returning a
//! silently wrong zero.

use crate::multiindex::MultiIndex;
use crate::rational::GaussianRational;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    arity: usize,
    cap: u32,
    terms: BTreeMap<MultiIndex, GaussianRational>,
}

impl TruncatedSeries {
    pub fn zero(arity: usize, cap: u32) -> Self {
        TruncatedSeries {
            arity,
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, cap: u32, c: GaussianRational) -> Self {
        let mut s = TruncatedSeries::zero(arity, cap);
        if !c.is_zero() {
            s.terms.insert(MultiIndex::zero(arity), c);
        }
        s
    }

    pub fn one(arity: usize, cap: u32) -> Self {
        TruncatedSeries::constant(arity, cap, GaussianRational::one())
    }

    /// The coordinate series of variable `var`.
    pub fn variable(arity: usize, cap: u32, var: usize) -> Self {
        assert!(cap >= 1, "cap too small to hold a variable");
        let mut s = TruncatedSeries::zero(arity, cap);
        s.terms
            .insert(MultiIndex::unit(arity, var), GaussianRational::one());
        s
    }

    pub fn monomial(arity: usize, cap: u32, idx: MultiIndex, c: GaussianRational) -> Self {
        assert_eq!(idx.arity(), arity, "monomial arity mismatch");
        assert!(idx.degree() <= cap, "monomial degree exceeds cap");
        let mut s = TruncatedSeries::zero(arity, cap);
        if !c.is_zero() {
            s.terms.insert(idx, c);
        }
        s
    }

    /// Builds a series from raw terms, dropping zero coefficients and any
    /// term beyond the cap (truncation semantics).
    pub fn from_terms<I>(arity: usize, cap: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, GaussianRational)>,
    {
        let mut s = TruncatedSeries::zero(arity, cap);
        for (idx, c) in terms {
            assert_eq!(idx.arity(), arity, "term arity mismatch");
            if idx.degree() > cap || c.is_zero() {
                continue;
            }
            let entry = s.terms.entry(idx).or_insert_with(GaussianRational::zero);
            *entry += &c;
            if entry.is_zero() {
                let key = s
                    .terms
                    .iter()
                    .find(|(_, v)| v.is_zero())
                    .map(|(k, _)| k.clone());
                if let Some(key) = key {
                    s.terms.remove(&key);
                }
            }
        }
        s.terms.retain(|_, v| !v.is_zero());
        s
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the monomial `idx`. Panics if `idx` lies beyond the
    /// truncation cap: that coefficient is simply not known.
    pub fn coeff(&self, idx: &MultiIndex) -> GaussianRational {
        assert!(
            idx.degree() <= self.cap,
            "coefficient of degree {} requested beyond cap {}",
            idx.degree(),
            self.cap
        );
        assert_eq!(idx.arity(), self.arity, "coefficient arity mismatch");
        self.terms.get(idx).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.terms
            .get(&MultiIndex::zero(self.arity))
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    /// Terms in graded lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &GaussianRational)> {
        self.terms.iter()
    }

    /// The graded-lex-first nonzero term, if any.
    pub fn lowest_term(&self) -> Option<(&MultiIndex, &GaussianRational)> {
        self.terms.iter().next()
    }

    /// Degree of the lowest nonzero term; `None` for the zero series.
    pub fn valuation(&self) -> Option<u32> {
        self.lowest_term().map(|(idx, _)| idx.degree())
    }

    /// Lowers the cap, discarding higher terms. Panics if `new_cap > cap`:
    /// raising a cap would claim knowledge the series does not have.
    pub fn truncate(&self, new_cap: u32) -> Self {
        assert!(
            new_cap <= self.cap,
            "cannot raise a truncation cap ({} -> {})",
            self.cap,
            new_cap
        );
        let mut terms = BTreeMap::new();
        for (idx, c) in &self.terms {
            if idx.degree() > new_cap {
                break;
            }
            terms.insert(idx.clone(), c.clone());
        }
        TruncatedSeries {
            arity: self.arity,
            cap: new_cap,
            terms,
        }
    }

    /// Keeps only terms satisfying the predicate.
    pub fn retain_terms<F: FnMut(&MultiIndex) -> bool>(&self, mut pred: F) -> Self {
        TruncatedSeries {
            arity: self.arity,
            cap: self.cap,
            terms: self
                .terms
                .iter()
                .filter(|(idx, _)| pred(idx))
                .map(|(idx, c)| (idx.clone(), c.clone()))
                .collect(),
        }
    }

    /// Re-embeds into a ring with `new_arity` variables: old variable `i`
    /// becomes variable `var_map[i]`. The map must be injective.
    pub fn embed(&self, new_arity: usize, var_map: &[usize]) -> Self {
        assert_eq!(var_map.len(), self.arity, "variable map length mismatch");
        let mut seen = vec![false; new_arity];
        for &v in var_map {
            assert!(v < new_arity, "variable map target out of range");
            assert!(!seen[v], "variable map must be injective");
            seen[v] = true;
        }
        let mut terms = BTreeMap::new();
        for (idx, c) in &self.terms {
            let mut exps = vec![0u16; new_arity];
            for (i, &e) in idx.exps().iter().enumerate() {
                exps[var_map[i]] = e;
            }
            terms.insert(MultiIndex::new(exps), c.clone());
        }
        TruncatedSeries {
            arity: new_arity,
            cap: self.cap,
            terms,
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            arity: self.arity,
            cap: self.cap,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return TruncatedSeries::zero(self.arity, self.cap);
        }
        TruncatedSeries {
            arity: self.arity,
            cap: self.cap,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, rhs: &TruncatedSeries) -> Self {
        assert_eq!(self.arity, rhs.arity, "arity mismatch in add");
        let cap = self.cap.min(rhs.cap);
        let mut terms: BTreeMap<MultiIndex, GaussianRational> = BTreeMap::new();
        for (idx, c) in self.terms.iter().chain(rhs.terms.iter()) {
            if idx.degree() > cap {
                continue;
            }
            let entry = terms
                .entry(idx.clone())
                .or_insert_with(GaussianRational::zero);
            *entry += c;
        }
        terms.retain(|_, v| !v.is_zero());
        TruncatedSeries {
            arity: self.arity,
            cap,
            terms,
        }
    }

    pub fn sub(&self, rhs: &TruncatedSeries) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &TruncatedSeries) -> Self {
        assert_eq!(self.arity, rhs.arity, "arity mismatch in mul");
        let cap = self.cap.min(rhs.cap);
        let mut terms: BTreeMap<MultiIndex, GaussianRational> = BTreeMap::new();
        let rhs_val = match rhs.valuation() {
            Some(v) => v,
            None => return TruncatedSeries::zero(self.arity, cap),
        };
        for (ia, ca) in &self.terms {
            let da = ia.degree();
            if da + rhs_val > cap {
                break;
            }
            for (ib, cb) in &rhs.terms {
                if da + ib.degree() > cap {
                    break;
                }
                let prod = ca * cb;
                if prod.is_zero() {
                    continue;
                }
                let entry = terms
                    .entry(ia.add(ib))
                    .or_insert_with(GaussianRational::zero);
                *entry += &prod;
            }
        }
        terms.retain(|_, v| !v.is_zero());
        TruncatedSeries {
            arity: self.arity,
            cap,
            terms,
        }
    }

    /// Product exact to `out_cap`, which may exceed the operands' caps when
    /// valuations cover the gap: coefficients of a factor beyond its cap can
    /// only influence degrees above `cap + other's valuation`. Panics when
    /// that margin does not hold.
    pub fn mul_exact_to(&self, rhs: &TruncatedSeries, out_cap: u32) -> Self {
        assert_eq!(self.arity, rhs.arity, "arity mismatch in mul");
        let val_l = self.valuation().unwrap_or(u32::MAX);
        let val_r = rhs.valuation().unwrap_or(u32::MAX);
        if val_l == u32::MAX || val_r == u32::MAX {
            return TruncatedSeries::zero(self.arity, out_cap);
        }
        assert!(
            self.cap.saturating_add(val_r) >= out_cap && rhs.cap.saturating_add(val_l) >= out_cap,
            "caps {}/{} with valuations {}/{} cannot support an exact product to {}",
            self.cap,
            rhs.cap,
            val_l,
            val_r,
            out_cap
        );
        let mut terms: BTreeMap<MultiIndex, GaussianRational> = BTreeMap::new();
        for (ia, ca) in &self.terms {
            let da = ia.degree();
            if da + val_r > out_cap {
                break;
            }
            for (ib, cb) in &rhs.terms {
                if da + ib.degree() > out_cap {
                    break;
                }
                let prod = ca * cb;
                if prod.is_zero() {
                    continue;
                }
                let entry = terms
                    .entry(ia.add(ib))
                    .or_insert_with(GaussianRational::zero);
                *entry += &prod;
            }
        }
        terms.retain(|_, v| !v.is_zero());
        TruncatedSeries {
            arity: self.arity,
            cap: out_cap,
            terms,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = TruncatedSeries::one(self.arity, self.cap);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative with respect to variable `var`. The cap drops by
    /// one: the top-degree coefficients of the derivative are unknown.
    pub fn differentiate(&self, var: usize) -> Self {
        assert!(var < self.arity, "derivative variable out of range");
        assert!(self.cap >= 1, "cannot differentiate a cap-0 series");
        let cap = self.cap - 1;
        let mut terms = BTreeMap::new();
        for (idx, c) in &self.terms {
            if let Some(down) = idx.step_down(var) {
                let e = GaussianRational::from_int(idx.get(var) as i64);
                if down.degree() <= cap {
                    terms.insert(down, c * &e);
                }
            }
        }
        TruncatedSeries {
            arity: self.arity,
            cap,
            terms,
        }
    }

    /// Coefficientwise complex conjugation, variables untouched.
    pub fn conjugate_series(&self) -> Self {
        TruncatedSeries {
            arity: self.arity,
            cap: self.cap,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.conj()))
                .collect(),
        }
    }

    /// Composition `self(args[0], ..., args[arity-1])`.
    ///
    /// Every inner series must have vanishing constant term (otherwise the
    /// result would depend on coefficients of `self` beyond its cap), and all
    /// inner series must share one ring. The result cap is the minimum of the
    /// outer and inner caps.
    pub fn compose(&self, args: &[TruncatedSeries]) -> Self {
        assert_eq!(args.len(), self.arity, "composition needs one series per variable");
        for (i, a) in args.iter().enumerate() {
            assert!(
                a.constant_term().is_zero(),
                "composition argument {} has nonzero constant term",
                i
            );
        }
        let (inner_arity, cap) = check_common_ring(args, self.cap);
        let mut out = TruncatedSeries::zero(inner_arity, cap);
        let mut powers: Vec<Vec<TruncatedSeries>> = args
            .iter()
            .map(|a| vec![TruncatedSeries::one(inner_arity, cap), a.truncate(cap.min(a.cap()))])
            .collect();
        for (idx, c) in &self.terms {
            if idx.degree() > cap {
                break;
            }
            let mut term = TruncatedSeries::constant(inner_arity, cap, c.clone());
            for (i, &e) in idx.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                term = term.mul(power_of(&mut powers[i], e as usize));
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Substitutes `args` into the *polynomial* formed by the stored terms.
    ///
    /// Unlike [`compose`](Self::compose), the inner series may have nonzero
    /// constant terms. The receiver is treated as an exact polynomial: the
    /// caller is responsible for knowing that its truncated tail is genuinely
    /// zero (or for accounting for the truncation). The result cap is the
    /// minimum of the inner caps.
    pub fn substitute(&self, args: &[TruncatedSeries]) -> Self {
        assert_eq!(args.len(), self.arity, "substitution needs one series per variable");
        let (inner_arity, cap) = check_common_ring(args, u32::MAX);
        let mut out = TruncatedSeries::zero(inner_arity, cap);
        let mut powers: Vec<Vec<TruncatedSeries>> = args
            .iter()
            .map(|a| vec![TruncatedSeries::one(inner_arity, cap), a.clone()])
            .collect();
        for (idx, c) in &self.terms {
            let mut term = TruncatedSeries::constant(inner_arity, cap, c.clone());
            for (i, &e) in idx.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                term = term.mul(power_of(&mut powers[i], e as usize));
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Substitutes series for the trailing `arity - nx` variables while the
    /// leading `nx` variables stay coordinates: `self(x, ys[0](x), ...)`.
    ///
    /// Every tail series must live in the `nx`-variable ring and have zero
    /// constant term (the result would otherwise depend on coefficients of
    /// `self` beyond its cap). Agrees with [`compose`](Self::compose)
    /// against coordinate head arguments, but groups terms by their tail
    /// pattern so the head block is never rebuilt monomial by monomial.
    pub fn eval_tail(&self, nx: usize, ys: &[TruncatedSeries]) -> Self {
        assert_eq!(nx + ys.len(), self.arity, "tail substitution arity mismatch");
        let mut cap = self.cap;
        for (j, y) in ys.iter().enumerate() {
            assert_eq!(y.arity(), nx, "tail series {} lives in the wrong ring", j);
            assert!(
                y.constant_term().is_zero(),
                "tail series {} has nonzero constant term",
                j
            );
            cap = cap.min(y.cap());
        }
        let mut groups: BTreeMap<MultiIndex, Vec<(MultiIndex, GaussianRational)>> =
            BTreeMap::new();
        for (idx, c) in &self.terms {
            let exps = idx.exps();
            let head = MultiIndex::new(exps[..nx].to_vec());
            let tail = MultiIndex::new(exps[nx..].to_vec());
            groups.entry(tail).or_default().push((head, c.clone()));
        }
        let mut powers: Vec<Vec<TruncatedSeries>> = ys
            .iter()
            .map(|y| vec![TruncatedSeries::one(nx, cap), y.truncate(cap.min(y.cap()))])
            .collect();
        let mut out = TruncatedSeries::zero(nx, cap);
        for (tail, terms) in groups {
            let mut factor = TruncatedSeries::from_terms(nx, cap, terms);
            for (j, &e) in tail.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if factor.is_zero() {
                    break;
                }
                factor = factor.mul(power_of(&mut powers[j], e as usize));
            }
            out = out.add(&factor);
        }
        out
    }

    /// Evaluates the stored polynomial at an exact point.
    pub fn eval(&self, point: &[GaussianRational]) -> GaussianRational {
        assert_eq!(point.len(), self.arity, "evaluation point arity mismatch");
        let mut out = GaussianRational::zero();
        for (idx, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in idx.exps().iter().enumerate() {
                if e > 0 {
                    term = &term * &point[i].powi(e as i64);
                }
            }
            out += &term;
        }
        out
    }

    /// Multiplicative inverse of a series with nonzero constant term, via the
    /// geometric series. Returns `None` when the constant term vanishes.
    pub fn invert_unit(&self) -> Option<Self> {
        let c0 = self.constant_term();
        let c0_inv = c0.inv()?;
        // self = c0 (1 - n) with n of valuation >= 1; inverse = c0^{-1} sum n^j.
        let n = TruncatedSeries::one(self.arity, self.cap).sub(&self.scale(&c0_inv));
        let mut acc = TruncatedSeries::one(self.arity, self.cap);
        let mut pw = TruncatedSeries::one(self.arity, self.cap);
        for _ in 0..self.cap {
            pw = pw.mul(&n);
            if pw.is_zero() {
                break;
            }
            acc = acc.add(&pw);
        }
        Some(acc.scale(&c0_inv))
    }

    /// `self^p` for rational `p`, where `self = 1 + v` with `v(0) = 0`:
    /// the principal branch, via the binomial series
    /// `sum_j binom(p, j) v^j`. Returns `None` unless the constant term is
    /// exactly 1.
    pub fn binom_pow(&self, p: &BigRational) -> Option<Self> {
        if !self.constant_term().is_one() {
            return None;
        }
        let v = self.sub(&TruncatedSeries::one(self.arity, self.cap));
        let mut acc = TruncatedSeries::one(self.arity, self.cap);
        let mut vpow = TruncatedSeries::one(self.arity, self.cap);
        let mut coef = BigRational::one();
        for j in 0..self.cap {
            // binom(p, j+1) = binom(p, j) * (p - j) / (j + 1)
            let j_rat = BigRational::from_integer(BigInt::from(j));
            coef = coef * (p - j_rat) / BigRational::from_integer(BigInt::from(j + 1));
            vpow = vpow.mul(&v);
            if vpow.is_zero() || coef.is_zero() {
                break;
            }
            let c = GaussianRational::new(coef.clone(), BigRational::zero());
            acc = acc.add(&vpow.scale(&c));
        }
        Some(acc)
    }

    /// Renders as an expression string, graded order, parseable by the DSL
    /// grammar when the variable names are valid identifiers.
    pub fn render(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.arity, "one name per variable required");
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, c) in &self.terms {
            let mono: Vec<String> = idx
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        names[i].to_string()
                    } else {
                        format!("{}^{}", names[i], e)
                    }
                })
                .collect();
            let coeff_str = render_coeff(c, mono.is_empty());
            let mut piece = coeff_str;
            if !mono.is_empty() {
                if !piece.is_empty() && piece != "-" {
                    piece.push('*');
                }
                piece.push_str(&mono.join("*"));
            }
            if out.is_empty() {
                out = piece;
            } else if let Some(rest) = piece.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&piece);
            }
        }
        out
    }
}

/// Renders a coefficient for use in front of a monomial (empty string means
/// an implicit 1). Standalone constants are rendered in full.
fn render_coeff(c: &GaussianRational, standalone: bool) -> String {
    if standalone {
        return render_scalar(c);
    }
    if c.is_one() {
        return String::new();
    }
    if (-c).is_one() {
        return "-".to_string();
    }
    render_scalar(c)
}

fn render_scalar(c: &GaussianRational) -> String {
    use num_traits::Signed;
    let re_zero = c.re().is_zero();
    let im_zero = c.im().is_zero();
    if im_zero {
        return fmt_ratio_expr(c.re());
    }
    if re_zero {
        let im = c.im();
        if im.is_one() {
            return "i".to_string();
        }
        if (-im).is_one() {
            return "-i".to_string();
        }
        if im.is_negative() {
            return format!("-{}*i", fmt_ratio_expr(&-im));
        }
        return format!("{}*i", fmt_ratio_expr(im));
    }
    let im = c.im();
    let (sign, mag) = if im.is_negative() {
        ("-", -im)
    } else {
        ("+", im.clone())
    };
    let im_part = if mag.is_one() {
        "i".to_string()
    } else {
        format!("{}*i", fmt_ratio_expr(&mag))
    };
    format!("({} {} {})", fmt_ratio_expr(c.re()), sign, im_part)
}

fn fmt_ratio_expr(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn check_common_ring(args: &[TruncatedSeries], outer_cap: u32) -> (usize, u32) {
    assert!(!args.is_empty(), "composition into the empty ring");
    let inner_arity = args[0].arity();
    let mut cap = outer_cap;
    for a in args {
        assert_eq!(a.arity(), inner_arity, "inner series live in different rings");
        cap = cap.min(a.cap());
    }
    (inner_arity, cap)
}

fn power_of(powers: &mut Vec<TruncatedSeries>, e: usize) -> &TruncatedSeries {
    while powers.len() <= e {
        let next = powers[powers.len() - 1].mul(&powers[1].clone());
        powers.push(next);
    }
    &powers[e]
}

impl std::fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = (0..self.arity).map(|i| format!("x{}", i)).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "[cap {}] {}", self.cap, self.render(&refs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::GaussianRational as Q;

    fn x(arity: usize, cap: u32, v: usize) -> TruncatedSeries {
        TruncatedSeries::variable(arity, cap, v)
    }

    #[test]
    fn product_truncates_at_min_cap() {
        let a = x(1, 5, 0); // x to cap 5
        let b = x(1, 3, 0); // x to cap 3
        let p = a.mul(&b);
        assert_eq!(p.cap(), 3);
        assert_eq!(p.coeff(&MultiIndex::new(vec![2])), Q::one());
    }

    #[test]
    fn geometric_inverse() {
        // 1/(1 - x) = 1 + x + x^2 + ...
        let one = TruncatedSeries::one(1, 6);
        let s = one.sub(&x(1, 6, 0));
        let inv = s.invert_unit().unwrap();
        for d in 0..=6u16 {
            assert_eq!(inv.coeff(&MultiIndex::new(vec![d])), Q::one());
        }
        assert_eq!(s.mul(&inv), TruncatedSeries::one(1, 6));
    }

    #[test]
    fn invert_requires_unit() {
        assert!(x(2, 4, 0).invert_unit().is_none());
    }

    #[test]
    fn compose_rejects_constant_terms() {
        let f = x(1, 4, 0);
        let bad = TruncatedSeries::one(1, 4);
        let result = std::panic::catch_unwind(|| f.compose(std::slice::from_ref(&bad)));
        assert!(result.is_err());
    }

    #[test]
    fn compose_geometric_into_double() {
        // f(u) = 1/(1-u), u = 2x  =>  coefficients 2^d.
        let one = TruncatedSeries::one(1, 5);
        let f = one.sub(&x(1, 5, 0)).invert_unit().unwrap();
        let u = x(1, 5, 0).scale(&Q::from_int(2));
        let g = f.compose(&[u]);
        for d in 0..=5u16 {
            assert_eq!(
                g.coeff(&MultiIndex::new(vec![d])),
                Q::from_int(1i64 << d),
                "coefficient of x^{}",
                d
            );
        }
    }

    #[test]
    fn binomial_square_root() {
        // (1+x)^{1/2} squared returns 1+x; frozen low coefficients.
        let s = TruncatedSeries::one(1, 6).add(&x(1, 6, 0));
        let r = s.binom_pow(&BigRational::new(1.into(), 2.into())).unwrap();
        let expect = [
            Q::one(),
            Q::from_ratio(1, 2),
            Q::from_ratio(-1, 8),
            Q::from_ratio(1, 16),
            Q::from_ratio(-5, 128),
            Q::from_ratio(7, 256),
        ];
        for (d, e) in expect.iter().enumerate() {
            assert_eq!(r.coeff(&MultiIndex::new(vec![d as u16])), *e);
        }
        assert_eq!(r.mul(&r), s);
    }

    #[test]
    fn derivative_drops_cap() {
        let s = x(2, 4, 0).pow(3).mul(&x(2, 4, 1)); // x^3 y at cap 4
        let d = s.differentiate(0);
        assert_eq!(d.cap(), 3);
        assert_eq!(
            d.coeff(&MultiIndex::new(vec![2, 1])),
            Q::from_int(3)
        );
    }

    #[test]
    fn conjugation_distributes() {
        let s = x(1, 3, 0).scale(&Q::from_parts(1, 2, 3, 1));
        let t = x(1, 3, 0).scale(&Q::i()).add(&TruncatedSeries::one(1, 3));
        assert_eq!(
            s.mul(&t).conjugate_series(),
            s.conjugate_series().mul(&t.conjugate_series())
        );
    }

    #[test]
    fn substitution_with_offsets() {
        // p = x^2 at (1 + y): (1+y)^2 = 1 + 2y + y^2.
        let p = x(1, 8, 0).pow(2);
        let sub = TruncatedSeries::one(1, 8).add(&x(1, 8, 0));
        let q = p.substitute(&[sub]);
        assert_eq!(q.coeff(&MultiIndex::new(vec![0])), Q::one());
        assert_eq!(q.coeff(&MultiIndex::new(vec![1])), Q::from_int(2));
        assert_eq!(q.coeff(&MultiIndex::new(vec![2])), Q::one());
    }

    #[test]
    fn eval_polynomial() {
        let s = x(2, 4, 0).mul(&x(2, 4, 1)).scale(&Q::i()); // i x y
        let v = s.eval(&[Q::from_int(2), Q::from_ratio(1, 2)]);
        assert_eq!(v, Q::i());
    }

    #[test]
    fn embed_is_lossless() {
        let s = x(2, 4, 0).mul(&x(2, 4, 1));
        let e = s.embed(4, &[3, 1]);
        assert_eq!(
            e.coeff(&MultiIndex::new(vec![0, 1, 0, 1])),
            Q::one()
        );
        assert_eq!(e.arity(), 4);
    }

    #[test]
    fn render_round_trip_shape() {
        let s = TruncatedSeries::one(2, 4)
            .add(&x(2, 4, 0).scale(&Q::from_int(-1)))
            .add(&x(2, 4, 1).pow(2).scale(&Q::from_parts(0, 1, 2, 1)));
        assert_eq!(s.render(&["z", "w"]), "1 - z + 2*i*w^2");
    }
}
