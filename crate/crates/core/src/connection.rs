//! Closed-form Levi-Civita data of (𝒫, G_t): the covariant derivatives of
//! the fundamental forms F_{t,ν}(A,B) = G_t(𝒦_ν A, B), the Nijenhuis
//! tensors of the four structures, and the quadratic forms governing the
//! Gil-Medrano conditions on the eigendistributions.
//!
//! Everything here is pointwise algebra in the curvature data of the base:
//! derivatives of the fibre metric never appear because the closed forms
//! already integrate them out. The independent check lives in `oracle`.

use crate::bivector::{from_halves, k_endo, wedge, PointGeometry};
use crate::twistor::{k_nu, MetricParams, Nu, TangentP, TwistorPoint, VerticalVector};
use nalgebra::{Vector3, Vector4, Vector6};

/// One slot of a covariant-derivative request: a horizontal vector in
/// frame components or a vertical vector at κ.
#[derive(Debug, Clone, Copy)]
pub enum Slot {
    Horizontal(Vector4<f64>),
    Vertical(VerticalVector),
}

impl Slot {
    pub fn to_tangent(&self) -> TangentP {
        match self {
            Slot::Horizontal(x) => TangentP::horizontal_lift(*x),
            Slot::Vertical(v) => TangentP::vertical(*v),
        }
    }
}

/// A fully specified derivative of the fundamental form:
/// (D_{dir} F_{t,ν})(b, c) at κ.
#[derive(Debug, Clone, Copy)]
pub struct DFRequest {
    pub nu: Nu,
    pub t: MetricParams,
    pub kappa: TwistorPoint,
    pub dir: Slot,
    pub b: Slot,
    pub c: Slot,
}

/// t-weighted mixed cross product t₁ σ⁺×U⁺ + c · t₂ σ⁻×U⁻ as a 6-vector.
fn weighted_cross(
    kappa: &TwistorPoint,
    t: MetricParams,
    u: &VerticalVector,
    minus_coef: f64,
) -> Vector6<f64> {
    from_halves(
        &(kappa.y_plus.cross(&u.plus) * t.t1),
        &(kappa.y_minus.cross(&u.minus) * (t.t2 * minus_coef)),
    )
}

/// Covariant derivative of two horizontal lifts, with the normal extension
/// rule ∇X|_p = ∇Y|_p = 0: the base term drops and only the curvature
/// half remains, (D_{X^h} Y^h)_κ = ½ R(X∧Y)κ.
pub fn d_hh(
    geom: &PointGeometry,
    kappa: &TwistorPoint,
    x: &Vector4<f64>,
    y: &Vector4<f64>,
) -> TangentP {
    let xy = wedge(x, y);
    let rp = geom.curv_der_apply(&xy, &kappa.sigma_plus6());
    let rm = geom.curv_der_apply(&xy, &kappa.sigma_minus6());
    TangentP::vertical(VerticalVector {
        plus: crate::bivector::plus_part(&rp) * 0.5,
        minus: crate::bivector::minus_part(&rm) * 0.5,
    })
}

/// (D_V X^h)_κ = −½ (R(t₁σ⁺×V⁺ − t₂σ⁻×V⁻) X)^h.
pub fn d_vh(
    geom: &PointGeometry,
    kappa: &TwistorPoint,
    t: MetricParams,
    v: &VerticalVector,
    x: &Vector4<f64>,
) -> TangentP {
    let xi = weighted_cross(kappa, t, v, -1.0);
    TangentP::horizontal_lift(geom.curv_end(&xi) * x * (-0.5))
}

/// The six-case dispatch for (D_A F_{t,ν})(B, C). Four of the cases vanish
/// identically; the two survivors are evaluated in closed form.
pub fn df(geom: &PointGeometry, req: &DFRequest) -> f64 {
    use Slot::*;
    let kappa = &req.kappa;
    let t = req.t;
    match (req.dir, req.b, req.c) {
        // Derivative along a horizontal lift.
        (Horizontal(_), Horizontal(_), Horizontal(_)) => 0.0,
        (Horizontal(x), Horizontal(y), Vertical(u))
        | (Horizontal(x), Vertical(u), Horizontal(y)) => df_hhv(geom, req.nu, kappa, t, &x, &y, &u),
        (Horizontal(_), Vertical(_), Vertical(_)) => 0.0,
        // Derivative along a vertical vector.
        (Vertical(u), Horizontal(y), Horizontal(z)) => df_vhh(geom, kappa, t, &u, &y, &z),
        (Vertical(_), Horizontal(_), Vertical(_)) | (Vertical(_), Vertical(_), Horizontal(_)) => {
            0.0
        }
        (Vertical(_), Vertical(_), Vertical(_)) => 0.0,
    }
}

/// (D_{X^h} F)(Y^h, U) = −½ ε_ν g(ℛ(t₁σ⁺×U⁺ + (−1)^ν t₂σ⁻×U⁻), X∧Y)
///                        + ½ g(ℛ(t₁σ⁺×U⁺ − t₂σ⁻×U⁻), X∧P_κY).
fn df_hhv(
    geom: &PointGeometry,
    nu: Nu,
    kappa: &TwistorPoint,
    t: MetricParams,
    x: &Vector4<f64>,
    y: &Vector4<f64>,
    u: &VerticalVector,
) -> f64 {
    let eps = nu.epsilon();
    let minus_sign = if nu.index() % 2 == 0 { 1.0 } else { -1.0 }; // (−1)^ν
    let first = weighted_cross(kappa, t, u, minus_sign);
    let second = weighted_cross(kappa, t, u, -1.0);
    let p = crate::twistor::p_kappa(kappa);
    let xy = wedge(x, y);
    let xpy = wedge(x, &(p * y));
    -0.5 * eps * geom.curv_op_apply(&first).dot(&xy)
        + 0.5 * geom.curv_op_apply(&second).dot(&xpy)
}

/// (D_U F)(Y^h, Z^h) = g((K_{σ⁻}K_{U⁺} + K_{σ⁺}K_{U⁻})Y, Z)
///                      + ½ g(ℛ(t₁σ⁺×U⁺ − t₂σ⁻×U⁻), Y∧P_κZ − P_κY∧Z).
fn df_vhh(
    geom: &PointGeometry,
    kappa: &TwistorPoint,
    t: MetricParams,
    u: &VerticalVector,
    y: &Vector4<f64>,
    z: &Vector4<f64>,
) -> f64 {
    let k_sm = k_endo(&kappa.sigma_minus6());
    let k_sp = k_endo(&kappa.sigma_plus6());
    let k_up = k_endo(&from_halves(&u.plus, &Vector3::zeros()));
    let k_um = k_endo(&from_halves(&Vector3::zeros(), &u.minus));
    let algebra = ((k_sm * k_up + k_sp * k_um) * y).dot(z);

    let xi = weighted_cross(kappa, t, u, -1.0);
    let p = crate::twistor::p_kappa(kappa);
    let mixed = wedge(y, &(p * z)) - wedge(&(p * y), z);
    algebra + 0.5 * geom.curv_op_apply(&xi).dot(&mixed)
}

/// The Nijenhuis tensor of 𝒦_ν at κ, for tangent vectors split into
/// horizontal and vertical parts. Bilinear and antisymmetric; vanishes on
/// pairs of verticals.
pub fn nijenhuis(
    geom: &PointGeometry,
    nu: Nu,
    kappa: &TwistorPoint,
    a: &TangentP,
    b: &TangentP,
) -> TangentP {
    let hh = nijenhuis_hh(geom, nu, kappa, &a.horizontal, &b.horizontal);
    let hv = nijenhuis_hv(nu, kappa, &a.horizontal, &b.vertical);
    let vh = nijenhuis_hv(nu, kappa, &b.horizontal, &a.vertical);
    hh.add(&hv).add(&vh.scale(-1.0))
}

/// 𝒩_ν(X^h, Y^h) = R(X∧Y + PX∧PY)κ − 𝒦_ν(R(X∧PY + PX∧Y)κ); purely
/// vertical.
fn nijenhuis_hh(
    geom: &PointGeometry,
    nu: Nu,
    kappa: &TwistorPoint,
    x: &Vector4<f64>,
    y: &Vector4<f64>,
) -> TangentP {
    let p = crate::twistor::p_kappa(kappa);
    let px = p * x;
    let py = p * y;
    let sym = wedge(x, y) + wedge(&px, &py);
    let mixed = wedge(x, &py) + wedge(&px, y);
    let apply = |b: &Vector6<f64>| -> VerticalVector {
        VerticalVector {
            plus: crate::bivector::plus_part(&geom.curv_der_apply(b, &kappa.sigma_plus6())),
            minus: crate::bivector::minus_part(&geom.curv_der_apply(b, &kappa.sigma_minus6())),
        }
    };
    let first = TangentP::vertical(apply(&sym));
    let second = k_nu(nu, kappa, &TangentP::vertical(apply(&mixed)));
    first.add(&second.scale(-1.0))
}

/// 𝒩_ν(X^h, U) = −((K_{σ⁺}K_{U⁺} + K_{σ⁻}K_{U⁻} + ε_ν K_{σ⁻}K_{U⁺}
///                 + ε_ν(−1)^{ν+1} K_{σ⁺}K_{U⁻}) X)^h; purely horizontal.
fn nijenhuis_hv(nu: Nu, kappa: &TwistorPoint, x: &Vector4<f64>, u: &VerticalVector) -> TangentP {
    let eps = nu.epsilon();
    let alt = eps * if nu.index() % 2 == 0 { -1.0 } else { 1.0 }; // ε_ν(−1)^{ν+1}
    let k_sp = k_endo(&kappa.sigma_plus6());
    let k_sm = k_endo(&kappa.sigma_minus6());
    let k_up = k_endo(&from_halves(&u.plus, &Vector3::zeros()));
    let k_um = k_endo(&from_halves(&Vector3::zeros(), &u.minus));
    let m = k_sp * k_up + k_sm * k_um + (k_sm * k_up) * eps + (k_sp * k_um) * alt;
    TangentP::horizontal_lift(-(m * x))
}

/// Output slot for the distribution derivative forms: pair against a
/// horizontal lift Z^h or a vertical vector W.
#[derive(Debug, Clone, Copy)]
pub enum OutSlot {
    Horizontal(Vector4<f64>),
    Vertical(VerticalVector),
}

/// Arguments (X, U) and (Y, V) parametrizing vectors of an
/// eigendistribution: A = (X^h + U) ± 𝒦_ν(X^h + U), similarly B.
#[derive(Debug, Clone, Copy)]
pub struct DistArgs {
    pub x: Vector4<f64>,
    pub u: VerticalVector,
    pub y: Vector4<f64>,
    pub v: VerticalVector,
}

/// G_t((D_A 𝒦_ν)(B), C) for A, B in the +1 eigendistribution 𝒟_ν,
/// parametrized as A = (X^h+U) + 𝒦_ν(X^h+U), B = (Y^h+V) + 𝒦_ν(Y^h+V).
pub fn daf_plus(
    geom: &PointGeometry,
    nu: Nu,
    kappa: &TwistorPoint,
    t: MetricParams,
    args: &DistArgs,
    out: &OutSlot,
) -> f64 {
    let eps = nu.epsilon();
    let nu_sign = if nu.index() % 2 == 0 { 1.0 } else { -1.0 }; // (−1)^ν
    let c_plus = eps + 1.0;
    let c_minus = eps * nu_sign - 1.0;
    let p = crate::twistor::p_kappa(kappa);
    match out {
        OutSlot::Horizontal(z) => {
            let pz = p * z;
            let zm = z - pz; // Z − P_κZ
            let curv = |w: &VerticalVector, base: &Vector4<f64>| -> f64 {
                let xi = from_halves(
                    &(kappa.y_plus.cross(&w.plus) * (c_plus * t.t1)),
                    &(kappa.y_minus.cross(&w.minus) * (c_minus * t.t2)),
                );
                let pbase = p * base;
                let wedge4 = wedge(&(base + pbase), &zm);
                -0.5 * geom.curv_op_apply(&xi).dot(&wedge4)
            };
            let k_sm = k_endo(&kappa.sigma_minus6());
            let k_sp = k_endo(&kappa.sigma_plus6());
            let k_up = k_endo(&from_halves(&args.u.plus, &Vector3::zeros()));
            let k_um = k_endo(&from_halves(&Vector3::zeros(), &args.u.minus));
            let ypy = args.y + p * args.y;
            let algebra = (((k_sm * k_up) * c_plus - (k_sp * k_um) * c_minus) * ypy).dot(z);
            curv(&args.v, &args.x) + curv(&args.u, &args.y) + algebra
        }
        OutSlot::Vertical(w) => {
            let d_plus = eps - 1.0;
            let d_minus = eps * nu_sign + 1.0;
            let xi = from_halves(
                &(kappa.y_plus.cross(&w.plus) * (d_plus * t.t1)),
                &(kappa.y_minus.cross(&w.minus) * (d_minus * t.t2)),
            );
            let xp = args.x + p * args.x;
            let yp = args.y + p * args.y;
            -0.5 * geom.curv_op_apply(&xi).dot(&wedge(&xp, &yp))
        }
    }
}

/// G_t((D_Ã 𝒦_ν)(B̃), C) for Ã, B̃ in the −1 eigendistribution 𝒟_ν⊥,
/// parametrized as Ã = (X^h+U) − 𝒦_ν(X^h+U), B̃ = (Y^h+V) − 𝒦_ν(Y^h+V).
pub fn daf_minus(
    geom: &PointGeometry,
    nu: Nu,
    kappa: &TwistorPoint,
    t: MetricParams,
    args: &DistArgs,
    out: &OutSlot,
) -> f64 {
    let eps = nu.epsilon();
    let nu_sign = if nu.index() % 2 == 0 { 1.0 } else { -1.0 };
    let d_plus = eps - 1.0;
    let d_minus = eps * nu_sign + 1.0;
    let p = crate::twistor::p_kappa(kappa);
    match out {
        OutSlot::Horizontal(z) => {
            let pz = p * z;
            let zp = z + pz; // Z + P_κZ
            let curv = |w: &VerticalVector, base: &Vector4<f64>| -> f64 {
                let xi = from_halves(
                    &(kappa.y_plus.cross(&w.plus) * (d_plus * t.t1)),
                    &(kappa.y_minus.cross(&w.minus) * (d_minus * t.t2)),
                );
                let pbase = p * base;
                let wedge4 = wedge(&(base - pbase), &zp);
                -0.5 * geom.curv_op_apply(&xi).dot(&wedge4)
            };
            let k_sm = k_endo(&kappa.sigma_minus6());
            let k_sp = k_endo(&kappa.sigma_plus6());
            let k_up = k_endo(&from_halves(&args.u.plus, &Vector3::zeros()));
            let k_um = k_endo(&from_halves(&Vector3::zeros(), &args.u.minus));
            let ymy = args.y - p * args.y;
            let algebra = -(((k_sm * k_up) * d_plus - (k_sp * k_um) * d_minus) * ymy).dot(z);
            curv(&args.v, &args.x) + curv(&args.u, &args.y) + algebra
        }
        OutSlot::Vertical(w) => {
            let c_plus = eps + 1.0;
            let c_minus = eps * nu_sign - 1.0;
            let xi = from_halves(
                &(kappa.y_plus.cross(&w.plus) * (c_plus * t.t1)),
                &(kappa.y_minus.cross(&w.minus) * (c_minus * t.t2)),
            );
            let xm = args.x - p * args.x;
            let ym = args.y - p * args.y;
            -0.5 * geom.curv_op_apply(&xi).dot(&wedge(&xm, &ym))
        }
    }
}

/// G_t(R(X,Y)κ, V): the pairing of the bundle curvature with a vertical
/// vector, equal to g(ℛ(t₁σ⁺×V⁺ − t₂σ⁻×V⁻), X∧Y).
pub fn curvature_pairing(
    geom: &PointGeometry,
    kappa: &TwistorPoint,
    t: MetricParams,
    x: &Vector4<f64>,
    y: &Vector4<f64>,
    v: &VerticalVector,
) -> f64 {
    let xi = weighted_cross(kappa, t, v, -1.0);
    geom.curv_op_apply(&xi).dot(&wedge(x, y))
}
