//! Shared builders for unit tests: small models and map families.

use crate::hspm::SegrePreservingMap;
use crate::model::GenericModel;
use crate::rational::GaussianRational;
use crate::series::TruncatedSeries;

pub fn two_i() -> GaussianRational {
    GaussianRational::from_parts(0, 1, 2, 1)
}

/// The hyperquadric model `w = tau + 2i z chi` (`m = d = 1`).
pub fn lewy(cap: u32) -> GenericModel {
    let z = TruncatedSeries::variable(3, cap, 0);
    let chi = TruncatedSeries::variable(3, cap, 1);
    let tau = TruncatedSeries::variable(3, cap, 2);
    GenericModel::from_normal(1, 1, vec![tau.add(&z.mul(&chi).scale(&two_i()))]).unwrap()
}

/// The degenerate quartic model `w = tau + 2i z^2 chi^2`.
pub fn quartic(cap: u32) -> GenericModel {
    let z = TruncatedSeries::variable(3, cap, 0);
    let chi = TruncatedSeries::variable(3, cap, 1);
    let tau = TruncatedSeries::variable(3, cap, 2);
    let quad = z.pow(2).mul(&chi.pow(2)).scale(&two_i());
    GenericModel::from_normal(1, 1, vec![tau.add(&quad)]).unwrap()
}

/// The rational self-map family of the hyperquadric:
/// `f = a (z + b w) / den`, `g = a at w / den` with
/// `den = 1 - (c + i b bt) w - 2i bt z`, and the tilde side mirrored with
/// `den~ = 1 - (c - i b bt) w + 2i b chi`.
pub fn lewy_member(
    cap: u32,
    a: GaussianRational,
    b: GaussianRational,
    at: GaussianRational,
    bt: GaussianRational,
    c: GaussianRational,
) -> SegrePreservingMap {
    let z = TruncatedSeries::variable(2, cap, 0);
    let w = TruncatedSeries::variable(2, cap, 1);
    let one = TruncatedSeries::one(2, cap);
    let i = GaussianRational::i();
    let ibbt = &(&i * &b) * &bt;
    let den = one
        .sub(&w.scale(&(&c + &ibbt)))
        .sub(&z.scale(&(&(&i * &bt) * &GaussianRational::from_int(2))));
    let den_inv = den.invert_unit().unwrap();
    let f = z.add(&w.scale(&b)).scale(&a).mul(&den_inv);
    let g = w.scale(&(&a * &at)).mul(&den_inv);
    let tden = one
        .sub(&w.scale(&(&c - &ibbt)))
        .add(&z.scale(&(&(&i * &b) * &GaussianRational::from_int(2))));
    let tden_inv = tden.invert_unit().unwrap();
    let ft = z.add(&w.scale(&bt)).scale(&at).mul(&tden_inv);
    let gt = w.scale(&(&a * &at)).mul(&tden_inv);
    SegrePreservingMap::new((1, 1), (1, 1), vec![f], vec![g], vec![ft], vec![gt]).unwrap()
}

/// The linear diagonal members `(a z, a at w; at chi, a at tau)` of the
/// hyperquadric family; polynomial, so every composed pipeline stays exact.
pub fn lewy_linear(cap: u32, a: GaussianRational, at: GaussianRational) -> SegrePreservingMap {
    let z = TruncatedSeries::variable(2, cap, 0);
    let w = TruncatedSeries::variable(2, cap, 1);
    let aat = &a * &at;
    SegrePreservingMap::new(
        (1, 1),
        (1, 1),
        vec![z.scale(&a)],
        vec![w.scale(&aat)],
        vec![z.scale(&at)],
        vec![w.scale(&aat)],
    )
    .unwrap()
}
