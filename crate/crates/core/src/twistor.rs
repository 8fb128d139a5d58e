//! Points and tangent vectors of the product bundle of the two twistor
//! spaces: adapted frames, the vertical/horizontal split, the fibre
//! metrics G_t, and the four compatible almost product structures.
//!
//! A twistor point κ = (σ⁺, σ⁻) is stored through the split components of
//! σ^± relative to the chart frame at its base point; tangent vectors of
//! the total space carry frame components of their horizontal part and
//! split components of their vertical part.

use crate::bivector::{from_halves, k_endo, plus_part, PointGeometry};
use crate::chart::{OrthonormalFrame, Point};
use crate::error::Result;
use nalgebra::{Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

/// Fibre scaling parameters t₁, t₂ > 0 of the metric G_t.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MetricParams {
    pub t1: f64,
    pub t2: f64,
}

impl MetricParams {
    pub fn new(t1: f64, t2: f64) -> Self {
        assert!(t1 > 0.0 && t2 > 0.0, "fibre scales must be positive");
        MetricParams { t1, t2 }
    }
}

/// Index ν of the almost product structure; fixes the sign pattern on the
/// vertical halves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Nu {
    N1,
    N2,
    N3,
    N4,
}

pub const ALL_NU: [Nu; 4] = [Nu::N1, Nu::N2, Nu::N3, Nu::N4];

impl Nu {
    pub fn index(self) -> u8 {
        match self {
            Nu::N1 => 1,
            Nu::N2 => 2,
            Nu::N3 => 3,
            Nu::N4 => 4,
        }
    }

    pub fn from_index(i: u8) -> Option<Nu> {
        match i {
            1 => Some(Nu::N1),
            2 => Some(Nu::N2),
            3 => Some(Nu::N3),
            4 => Some(Nu::N4),
            _ => None,
        }
    }

    /// ε₁ = ε₂ = 1, ε₃ = ε₄ = −1.
    pub fn epsilon(self) -> f64 {
        match self {
            Nu::N1 | Nu::N2 => 1.0,
            Nu::N3 | Nu::N4 => -1.0,
        }
    }

    /// Signs of the structure on the two vertical halves:
    /// (ε_ν, ε_ν·(−1)^{ν+1}).
    pub fn vertical_signs(self) -> (f64, f64) {
        match self {
            Nu::N1 => (1.0, 1.0),
            Nu::N2 => (1.0, -1.0),
            Nu::N3 => (-1.0, -1.0),
            Nu::N4 => (-1.0, 1.0),
        }
    }

    /// Dimensions of the (+1, −1) eigenspaces: (6,2), (4,4), (2,6), (4,4).
    pub fn eigen_dims(self) -> (usize, usize) {
        match self {
            Nu::N1 => (6, 2),
            Nu::N2 => (4, 4),
            Nu::N3 => (2, 6),
            Nu::N4 => (4, 4),
        }
    }
}

/// A point of the product twistor bundle over a chart point.
#[derive(Debug, Clone, Copy)]
pub struct TwistorPoint {
    pub point: Point,
    /// Unit split components of σ⁺ in the chart frame.
    pub y_plus: Vector3<f64>,
    /// Unit split components of σ⁻.
    pub y_minus: Vector3<f64>,
}

impl TwistorPoint {
    pub fn new(point: Point, y_plus: Vector3<f64>, y_minus: Vector3<f64>) -> Self {
        debug_assert!((y_plus.norm() - 1.0).abs() < 1e-9);
        debug_assert!((y_minus.norm() - 1.0).abs() < 1e-9);
        TwistorPoint {
            point,
            y_plus,
            y_minus,
        }
    }

    /// κ = (s₁⁺, s₁⁻) of the chart frame.
    pub fn canonical(point: Point) -> Self {
        TwistorPoint::new(point, Vector3::x(), Vector3::x())
    }

    pub fn sigma_plus6(&self) -> nalgebra::Vector6<f64> {
        from_halves(&self.y_plus, &Vector3::zeros())
    }

    pub fn sigma_minus6(&self) -> nalgebra::Vector6<f64> {
        from_halves(&Vector3::zeros(), &self.y_minus)
    }
}

/// A vertical tangent vector at κ: a pair of split components orthogonal
/// to σ⁺ and σ⁻ respectively.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalVector {
    pub plus: Vector3<f64>,
    pub minus: Vector3<f64>,
}

impl VerticalVector {
    pub fn zero() -> Self {
        VerticalVector {
            plus: Vector3::zeros(),
            minus: Vector3::zeros(),
        }
    }

    pub fn is_vertical_at(&self, kappa: &TwistorPoint, tol: f64) -> bool {
        self.plus.dot(&kappa.y_plus).abs() < tol && self.minus.dot(&kappa.y_minus).abs() < tol
    }
}

/// A tangent vector of the total space at κ: horizontal part in frame
/// components of the base, vertical part in split components.
#[derive(Debug, Clone, Copy)]
pub struct TangentP {
    pub horizontal: Vector4<f64>,
    pub vertical: VerticalVector,
}

impl TangentP {
    pub fn horizontal_lift(x: Vector4<f64>) -> Self {
        TangentP {
            horizontal: x,
            vertical: VerticalVector::zero(),
        }
    }

    pub fn vertical(v: VerticalVector) -> Self {
        TangentP {
            horizontal: Vector4::zeros(),
            vertical: v,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        TangentP {
            horizontal: self.horizontal * c,
            vertical: VerticalVector {
                plus: self.vertical.plus * c,
                minus: self.vertical.minus * c,
            },
        }
    }

    pub fn add(&self, other: &TangentP) -> Self {
        TangentP {
            horizontal: self.horizontal + other.horizontal,
            vertical: VerticalVector {
                plus: self.vertical.plus + other.vertical.plus,
                minus: self.vertical.minus + other.vertical.minus,
            },
        }
    }
}

/// Project a pair of split bivector components onto the vertical space at
/// κ: a^± − g(a^±, σ^±) σ^±.
pub fn vertical_projection(
    kappa: &TwistorPoint,
    a_plus: &Vector3<f64>,
    a_minus: &Vector3<f64>,
) -> VerticalVector {
    VerticalVector {
        plus: a_plus - kappa.y_plus * a_plus.dot(&kappa.y_plus),
        minus: a_minus - kappa.y_minus * a_minus.dot(&kappa.y_minus),
    }
}

/// The base involution P_κ = K_{σ⁺} ∘ K_{σ⁻} in frame components.
pub fn p_kappa(kappa: &TwistorPoint) -> Matrix4<f64> {
    k_endo(&kappa.sigma_plus6()) * k_endo(&kappa.sigma_minus6())
}

/// The almost product structure applied to a tangent vector at κ.
pub fn k_nu(nu: Nu, kappa: &TwistorPoint, a: &TangentP) -> TangentP {
    let (sp, sm) = nu.vertical_signs();
    TangentP {
        horizontal: p_kappa(kappa) * a.horizontal,
        vertical: VerticalVector {
            plus: a.vertical.plus * sp,
            minus: a.vertical.minus * sm,
        },
    }
}

/// The fibre metric: G_t(X^h + V, Y^h + W) = g(X,Y) + t₁ g(V⁺,W⁺) + t₂ g(V⁻,W⁻).
pub fn g_t(t: MetricParams, a: &TangentP, b: &TangentP) -> f64 {
    a.horizontal.dot(&b.horizontal)
        + t.t1 * a.vertical.plus.dot(&b.vertical.plus)
        + t.t2 * a.vertical.minus.dot(&b.vertical.minus)
}

/// Deterministic orthonormal basis of the orthogonal complement of a unit
/// 3-vector.
pub fn orthocomplement_basis(y: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let mut axis = 0;
    for i in 1..3 {
        if y[i].abs() < y[axis].abs() {
            axis = i;
        }
    }
    let mut e = Vector3::zeros();
    e[axis] = 1.0;
    let u = (e - y * y.dot(&e)).normalize();
    let v = y.cross(&u);
    (u, v)
}

/// Orthonormal bases of the ±1 eigenspaces of P_κ and of the two vertical
/// complements, chosen deterministically from the frame.
pub struct FibreBases {
    /// Horizontal basis of the (−1)-eigenspace of P_κ (frame components).
    pub h_neg: [Vector4<f64>; 2],
    /// Horizontal basis of the (+1)-eigenspace.
    pub h_pos: [Vector4<f64>; 2],
    /// Basis of σ⁺⊥ in the plus half.
    pub v_plus: [Vector3<f64>; 2],
    /// Basis of σ⁻⊥ in the minus half.
    pub v_minus: [Vector3<f64>; 2],
}

pub fn fibre_bases(kappa: &TwistorPoint) -> FibreBases {
    let p = p_kappa(kappa);
    let k_plus = k_endo(&kappa.sigma_plus6());
    let pick = |sign: f64| -> [Vector4<f64>; 2] {
        let proj = (Matrix4::identity() + p * sign) * 0.5;
        // Seed with the first frame vector whose projection is substantial;
        // ties broken by coordinate order for reproducibility.
        let mut first = Vector4::zeros();
        for a in 0..4 {
            let cand = proj * Vector4::ith(a, 1.0);
            if cand.norm() > 0.3 {
                first = cand.normalize();
                break;
            }
        }
        let second = k_plus * first;
        [first, second]
    };
    let (u_p, v_p) = orthocomplement_basis(&kappa.y_plus);
    let (u_m, v_m) = orthocomplement_basis(&kappa.y_minus);
    FibreBases {
        h_neg: pick(-1.0),
        h_pos: pick(1.0),
        v_plus: [u_p, v_p],
        v_minus: [u_m, v_m],
    }
}

/// An adapted frame at κ: an oriented orthonormal frame with
/// σ^± = E₁∧E₂ ± E₃∧E₄, produced by rotating the chart frame.
pub struct AdaptedFrame {
    /// New frame vectors in old-frame components (columns).
    pub rotation: Matrix4<f64>,
    /// New frame in chart coordinates.
    pub frame: OrthonormalFrame,
}

/// Build the adapted frame: E₁ from the (−1)-eigenspace of P_κ,
/// E₂ = K_{σ⁺}E₁, E₃ from the (+1)-eigenspace, E₄ = K_{σ⁺}E₃. The result
/// is automatically oriented because K_{σ⁺} is compatible with the
/// orientation.
pub fn adapted_frame(geom: &PointGeometry, kappa: &TwistorPoint) -> AdaptedFrame {
    let bases = fibre_bases(kappa);
    let mut rotation = Matrix4::zeros();
    rotation.set_column(0, &bases.h_neg[0]);
    rotation.set_column(1, &bases.h_neg[1]);
    rotation.set_column(2, &bases.h_pos[0]);
    rotation.set_column(3, &bases.h_pos[1]);
    debug_assert!(rotation.determinant() > 0.5, "adapted frame lost orientation");
    let vectors = geom.frame.vectors * rotation;
    AdaptedFrame {
        rotation,
        frame: OrthonormalFrame {
            point: geom.point,
            vectors,
        },
    }
}

/// Rebase the geometry on the adapted frame of κ; the returned twistor
/// point is κ expressed in the new frame, i.e. (s₁⁺, s₁⁻).
pub fn adapt(geom: &PointGeometry, kappa: &TwistorPoint) -> (PointGeometry, TwistorPoint) {
    let adapted = adapted_frame(geom, kappa);
    let new_geom = geom.rebase(adapted.frame);
    (new_geom, TwistorPoint::canonical(geom.point))
}

/// Numeric eigenvalue dimensions of the structure at κ via a symmetric
/// eigendecomposition in a G_t-orthonormal basis.
pub fn eigen_dims_numeric(nu: Nu, kappa: &TwistorPoint, t: MetricParams) -> Result<(usize, usize)> {
    let bases = fibre_bases(kappa);
    let mut basis: Vec<TangentP> = Vec::with_capacity(8);
    for h in [bases.h_neg[0], bases.h_neg[1], bases.h_pos[0], bases.h_pos[1]] {
        basis.push(TangentP::horizontal_lift(h));
    }
    for v in bases.v_plus {
        basis.push(TangentP::vertical(VerticalVector {
            plus: v / t.t1.sqrt(),
            minus: Vector3::zeros(),
        }));
    }
    for v in bases.v_minus {
        basis.push(TangentP::vertical(VerticalVector {
            plus: Vector3::zeros(),
            minus: v / t.t2.sqrt(),
        }));
    }
    let mut m = nalgebra::SMatrix::<f64, 8, 8>::zeros();
    for (j, b) in basis.iter().enumerate() {
        let kb = k_nu(nu, kappa, b);
        for (i, a) in basis.iter().enumerate() {
            m[(i, j)] = g_t(t, a, &kb);
        }
    }
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut pos = 0;
    let mut neg = 0;
    for ev in eig.eigenvalues.iter() {
        if (ev - 1.0).abs() < 1e-8 {
            pos += 1;
        } else if (ev + 1.0).abs() < 1e-8 {
            neg += 1;
        }
    }
    assert_eq!(pos + neg, 8, "structure is not an involution");
    Ok((pos, neg))
}

/// σ^± rebuilt from an adapted frame, for invariant checks:
/// s₁^± of the frame given by `rotation` columns, in old-frame components.
pub fn sigma_from_rotation(rotation: &Matrix4<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let col = |i: usize| rotation.column(i).into_owned();
    let w12 = crate::bivector::wedge(&col(0), &col(1));
    let w34 = crate::bivector::wedge(&col(2), &col(3));
    let plus = plus_part(&(w12 + w34));
    let minus = crate::bivector::minus_part(&(w12 - w34));
    (plus, minus)
}
