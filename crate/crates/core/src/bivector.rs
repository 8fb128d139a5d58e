//! The algebra of Λ²T_pM for an oriented orthonormal frame: induced metric,
//! Hodge star, the split orthonormal basis
//!
//!   s₁^± = E₁∧E₂ ± E₃∧E₄,  s₂^± = E₁∧E₃ ± E₄∧E₂,  s₃^± = E₁∧E₄ ± E₂∧E₃,
//!
//! the skew endomorphisms K_a with g(K_a X, Y) = 2 g(a, X∧Y), the cross
//! product on each three-dimensional half, the curvature operator on
//! bivectors, and its four-block decomposition ℛ = s/6·Id + B + W₊ + W₋.
//!
//! Sign bookkeeping: the base curvature is stored sphere-positive
//! (`chart::riemann`); the curvature operator here is built from its
//! negative, so that on a round sphere of curvature χ the operator acts as
//! +2χ on both halves. That derived eigenvalue (= s/6) is what every
//! formula downstream relies on.

use crate::chart::{orthonormal_frame, CurvatureTensor, MetricChart, OrthonormalFrame, Point};
use crate::error::{Error, Result};
use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector4, Vector6};

/// Wedge-index pairs of the split basis elements; s_i^± = e_{p} ± e_{q}.
pub const SBASIS_PAIRS: [((usize, usize), (usize, usize)); 3] =
    [((0, 1), (2, 3)), ((0, 2), (3, 1)), ((0, 3), (1, 2))];

/// Components of the split basis element s_{i+1}^± as a 6-vector.
pub fn s_basis(i: usize, plus: bool) -> Vector6<f64> {
    let mut v = Vector6::zeros();
    v[if plus { i } else { i + 3 }] = 1.0;
    v
}

/// s-components of the wedge of two frame-component vectors.
pub fn wedge(x: &Vector4<f64>, y: &Vector4<f64>) -> Vector6<f64> {
    let w = |a: usize, b: usize| x[a] * y[b] - x[b] * y[a];
    Vector6::new(
        0.5 * (w(0, 1) + w(2, 3)),
        0.5 * (w(0, 2) + w(3, 1)),
        0.5 * (w(0, 3) + w(1, 2)),
        0.5 * (w(0, 1) - w(2, 3)),
        0.5 * (w(0, 2) - w(3, 1)),
        0.5 * (w(0, 3) - w(1, 2)),
    )
}

/// Antisymmetric matrix of wedge components w_{ab} of a bivector.
pub fn wedge_matrix(b: &Vector6<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    let mut set = |a: usize, c: usize, v: f64| {
        m[(a, c)] = v;
        m[(c, a)] = -v;
    };
    set(0, 1, b[0] + b[3]);
    set(2, 3, b[0] - b[3]);
    set(0, 2, b[1] + b[4]);
    set(3, 1, b[1] - b[4]);
    set(0, 3, b[2] + b[5]);
    set(1, 2, b[2] - b[5]);
    m
}

/// Inverse of `wedge_matrix`.
pub fn split_from_wedge_matrix(m: &Matrix4<f64>) -> Vector6<f64> {
    Vector6::new(
        0.5 * (m[(0, 1)] + m[(2, 3)]),
        0.5 * (m[(0, 2)] + m[(3, 1)]),
        0.5 * (m[(0, 3)] + m[(1, 2)]),
        0.5 * (m[(0, 1)] - m[(2, 3)]),
        0.5 * (m[(0, 2)] - m[(3, 1)]),
        0.5 * (m[(0, 3)] - m[(1, 2)]),
    )
}

/// The skew endomorphism K_a in frame components, g(K_a X, Y) = 2 g(a, X∧Y).
pub fn k_endo(b: &Vector6<f64>) -> Matrix4<f64> {
    wedge_matrix(b).transpose()
}

/// Hodge star in the split basis: +1 on the plus half, −1 on the minus half.
pub fn hodge(b: &Vector6<f64>) -> Vector6<f64> {
    let mut out = *b;
    for i in 3..6 {
        out[i] = -out[i];
    }
    out
}

pub fn plus_part(b: &Vector6<f64>) -> Vector3<f64> {
    Vector3::new(b[0], b[1], b[2])
}

pub fn minus_part(b: &Vector6<f64>) -> Vector3<f64> {
    Vector3::new(b[3], b[4], b[5])
}

pub fn from_halves(p: &Vector3<f64>, m: &Vector3<f64>) -> Vector6<f64> {
    Vector6::new(p[0], p[1], p[2], m[0], m[1], m[2])
}

/// Cross product on the oriented three-dimensional halves; the split bases
/// (s₁^±, s₂^±, s₃^±) are right-handed for it.
pub fn cross_half(a: &Vector3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
    a.cross(b)
}

/// A bivector attached to a base point, in the s-basis of the chart frame.
#[derive(Debug, Clone, Copy)]
pub struct Bivector {
    pub point: Point,
    pub comps: Vector6<f64>,
}

impl Bivector {
    pub fn new(point: Point, comps: Vector6<f64>) -> Self {
        Bivector { point, comps }
    }

    /// From components in the wedge basis {E_a∧E_b : a < b}, ordered
    /// (12, 13, 14, 23, 24, 34).
    pub fn from_wedge_components(point: Point, w: [f64; 6]) -> Self {
        let mut m = Matrix4::zeros();
        let order = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        for (k, (a, b)) in order.into_iter().enumerate() {
            m[(a, b)] = w[k];
            m[(b, a)] = -w[k];
        }
        Bivector::new(point, split_from_wedge_matrix(&m))
    }

    pub fn wedge_components(&self) -> [f64; 6] {
        let m = wedge_matrix(&self.comps);
        [
            m[(0, 1)],
            m[(0, 2)],
            m[(0, 3)],
            m[(1, 2)],
            m[(1, 3)],
            m[(2, 3)],
        ]
    }

    pub fn norm(&self) -> f64 {
        self.comps.norm()
    }
}

/// Induced metric on Λ²: in the orthonormal split basis this is the dot
/// product; the ½·det formula is its defining expansion.
pub fn metric_lambda2(a: &Bivector, b: &Bivector) -> Result<f64> {
    if a.point != b.point {
        return Err(Error::MismatchedBasePoints);
    }
    Ok(a.comps.dot(&b.comps))
}

/// Hodge star of a bivector.
pub fn hodge_star(a: &Bivector) -> Bivector {
    Bivector::new(a.point, hodge(&a.comps))
}

/// Self-dual / anti-self-dual parts.
pub fn sd_split(a: &Bivector) -> (Bivector, Bivector) {
    let p = plus_part(&a.comps);
    let m = minus_part(&a.comps);
    (
        Bivector::new(a.point, from_halves(&p, &Vector3::zeros())),
        Bivector::new(a.point, from_halves(&Vector3::zeros(), &m)),
    )
}

/// Cross product of two bivectors lying in the same half.
pub fn cross(a: &Bivector, b: &Bivector) -> Result<Bivector> {
    if a.point != b.point {
        return Err(Error::MismatchedBasePoints);
    }
    let tol = 1e-12 * (a.norm() + b.norm()).max(1.0);
    let a_plus = minus_part(&a.comps).norm() < tol;
    let a_minus = plus_part(&a.comps).norm() < tol;
    let b_plus = minus_part(&b.comps).norm() < tol;
    let b_minus = plus_part(&b.comps).norm() < tol;
    if a_plus && b_plus {
        let c = cross_half(&plus_part(&a.comps), &plus_part(&b.comps));
        Ok(Bivector::new(a.point, from_halves(&c, &Vector3::zeros())))
    } else if a_minus && b_minus {
        let c = cross_half(&minus_part(&a.comps), &minus_part(&b.comps));
        Ok(Bivector::new(a.point, from_halves(&Vector3::zeros(), &c)))
    } else {
        Err(Error::MixedHalves)
    }
}

/// The four blocks of the curvature operator in the split basis.
#[derive(Debug, Clone)]
pub struct CurvatureDecomposition {
    /// Scalar curvature (trace of the Ricci operator).
    pub scalar: f64,
    /// Trace of the 6×6 operator; agrees with `scalar` when conventions are
    /// consistent.
    pub scalar_from_op: f64,
    pub w_plus: Matrix3<f64>,
    pub w_minus: Matrix3<f64>,
    /// The Λ²₊ → Λ²₋ coupling block read off the operator.
    pub b_block: Matrix3<f64>,
    /// ‖ℛ − (s/6·Id + B + W₊ + W₋)‖_F.
    pub reconstruction_residual: f64,
    /// Deviation of the traceless-Ricci block from the operator's
    /// off-diagonal block.
    pub b_formula_residual: f64,
}

impl CurvatureDecomposition {
    /// Frobenius norm of the full traceless-Ricci endomorphism.
    pub fn b_norm(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.b_block.norm()
    }

    pub fn is_einstein(&self, tol: f64) -> bool {
        self.b_norm() < tol
    }

    pub fn is_self_dual(&self, tol: f64) -> bool {
        self.w_minus.norm() < tol
    }

    pub fn is_anti_self_dual(&self, tol: f64) -> bool {
        self.w_plus.norm() < tol
    }

    pub fn is_constant_curvature(&self, tol: f64) -> bool {
        self.is_einstein(tol) && self.w_plus.norm() < tol && self.w_minus.norm() < tol
    }
}

/// Split a curvature operator into scalar, traceless-Ricci and Weyl blocks,
/// cross-checking the coupling block against the explicit traceless-Ricci
/// formula B(X∧Y) = ρ(X)∧Y + X∧ρ(Y) − s/2·X∧Y.
pub fn decompose(
    curv_op: &Matrix6<f64>,
    ricci_frame: &Matrix4<f64>,
    scalar: f64,
) -> CurvatureDecomposition {
    let a = curv_op.fixed_view::<3, 3>(0, 0).into_owned();
    let c = curv_op.fixed_view::<3, 3>(3, 3).into_owned();
    let b_block = curv_op.fixed_view::<3, 3>(0, 3).into_owned();
    let w_plus = a - Matrix3::identity() * (a.trace() / 3.0);
    let w_minus = c - Matrix3::identity() * (c.trace() / 3.0);

    let mut recon = Matrix6::zeros();
    recon
        .fixed_view_mut::<3, 3>(0, 0)
        .copy_from(&(w_plus + Matrix3::identity() * (scalar / 6.0)));
    recon
        .fixed_view_mut::<3, 3>(3, 3)
        .copy_from(&(w_minus + Matrix3::identity() * (scalar / 6.0)));
    recon.fixed_view_mut::<3, 3>(0, 3).copy_from(&b_block);
    recon
        .fixed_view_mut::<3, 3>(3, 0)
        .copy_from(&b_block.transpose());
    let reconstruction_residual = (curv_op - recon).norm();

    // Traceless-Ricci endomorphism from ρ, expanded over the split basis.
    let mut b_form = Matrix6::zeros();
    let frame_vec = |a: usize| {
        let mut v = Vector4::zeros();
        v[a] = 1.0;
        v
    };
    let rho = |a: usize| ricci_frame.column(a).into_owned();
    for i in 0..6 {
        let (pair1, pair2) = SBASIS_PAIRS[i % 3];
        let c2 = if i < 3 { 1.0 } else { -1.0 };
        let mut image = Vector6::zeros();
        for (coef, (p, q)) in [(1.0, pair1), (c2, pair2)] {
            let e_p = frame_vec(p);
            let e_q = frame_vec(q);
            let term = wedge(&rho(p), &e_q) + wedge(&e_p, &rho(q))
                - wedge(&e_p, &e_q) * (scalar / 2.0);
            image += term * coef;
        }
        b_form.set_column(i, &image);
    }
    let mut op_off = *curv_op;
    op_off.fixed_view_mut::<3, 3>(0, 0).fill(0.0);
    op_off.fixed_view_mut::<3, 3>(3, 3).fill(0.0);
    let b_formula_residual = (b_form - op_off).norm();

    CurvatureDecomposition {
        scalar,
        scalar_from_op: curv_op.trace(),
        w_plus,
        w_minus,
        b_block,
        reconstruction_residual,
        b_formula_residual,
    }
}

/// Everything the twistor-bundle formulas need at one base point: the
/// oriented frame, the curvature in frame components, the curvature
/// operator on the split basis, and its decomposition.
pub struct PointGeometry {
    pub point: Point,
    pub metric: Matrix4<f64>,
    pub frame: OrthonormalFrame,
    pub curvature: CurvatureTensor,
    /// R_{abcd} in frame indices, sphere-positive convention.
    pub r_frame: [[[[f64; 4]; 4]; 4]; 4],
    /// Ricci(E_a, E_b).
    pub ricci_frame: Matrix4<f64>,
    pub scalar: f64,
    /// Curvature operator on Λ² in the split basis (sphere eigenvalue +s/6).
    pub curv_op: Matrix6<f64>,
    pub decomposition: CurvatureDecomposition,
}

impl PointGeometry {
    pub fn build(chart: &MetricChart, x: &Point) -> Result<Self> {
        let frame = orthonormal_frame(chart, x)?;
        Self::build_with_frame(chart, x, frame)
    }

    pub fn build_with_frame(
        chart: &MetricChart,
        x: &Point,
        frame: OrthonormalFrame,
    ) -> Result<Self> {
        let metric = chart.metric(x)?;
        let curvature = crate::chart::riemann(chart, x)?;
        Ok(Self::assemble(metric, frame, curvature))
    }

    /// Rebuild the frame-dependent data on a rotated frame at the same point.
    pub fn rebase(&self, frame: OrthonormalFrame) -> Self {
        Self::assemble(self.metric, frame, self.curvature.clone())
    }

    fn assemble(
        metric: Matrix4<f64>,
        frame: OrthonormalFrame,
        curvature: CurvatureTensor,
    ) -> Self {
        let point = frame.point;
        let e = &frame.vectors;

        // Contract the coordinate curvature into frame indices one slot at
        // a time.
        let mut t1 = [[[[0.0; 4]; 4]; 4]; 4];
        for al in 0..4 {
            for be in 0..4 {
                for ga in 0..4 {
                    for d in 0..4 {
                        let mut v = 0.0;
                        for de in 0..4 {
                            v += curvature.riemann_low[al][be][ga][de] * e[(de, d)];
                        }
                        t1[al][be][ga][d] = v;
                    }
                }
            }
        }
        let mut t2 = [[[[0.0; 4]; 4]; 4]; 4];
        for al in 0..4 {
            for be in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let mut v = 0.0;
                        for ga in 0..4 {
                            v += t1[al][be][ga][d] * e[(ga, c)];
                        }
                        t2[al][be][c][d] = v;
                    }
                }
            }
        }
        let mut t3 = [[[[0.0; 4]; 4]; 4]; 4];
        for al in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let mut v = 0.0;
                        for be in 0..4 {
                            v += t2[al][be][c][d] * e[(be, b)];
                        }
                        t3[al][b][c][d] = v;
                    }
                }
            }
        }
        let mut r_frame = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let mut v = 0.0;
                        for al in 0..4 {
                            v += t3[al][b][c][d] * e[(al, a)];
                        }
                        r_frame[a][b][c][d] = v;
                    }
                }
            }
        }

        let ricci_frame = e.transpose() * curvature.ricci * e;
        let scalar = curvature.scalar;

        // Curvature operator with the bundle-side sign: g(ℛ(X∧Y), Z∧T)
        // equals the negative of the stored R(X,Y,Z,T).
        let mut curv_op = Matrix6::zeros();
        for i in 0..6 {
            let (pi1, pi2) = SBASIS_PAIRS[i % 3];
            let ci = if i < 3 { 1.0 } else { -1.0 };
            for j in i..6 {
                let (pj1, pj2) = SBASIS_PAIRS[j % 3];
                let cj = if j < 3 { 1.0 } else { -1.0 };
                let mut v = 0.0;
                for (ca, (a, b)) in [(1.0, pi1), (ci, pi2)] {
                    for (cb, (c, d)) in [(1.0, pj1), (cj, pj2)] {
                        v -= ca * cb * r_frame[a][b][c][d];
                    }
                }
                curv_op[(i, j)] = v;
                curv_op[(j, i)] = v;
            }
        }

        let decomposition = decompose(&curv_op, &ricci_frame, scalar);

        PointGeometry {
            point,
            metric,
            frame,
            curvature,
            r_frame,
            ricci_frame,
            scalar,
            curv_op,
            decomposition,
        }
    }

    /// Curvature as an endomorphism of the tangent space: the linear
    /// extension of X∧Y ↦ R(X,Y) over a bivector, in frame components and
    /// with the bundle-side sign.
    pub fn curv_end(&self, b: &Vector6<f64>) -> Matrix4<f64> {
        let w = wedge_matrix(b);
        let mut m = Matrix4::zeros();
        for c in 0..4 {
            for d in 0..4 {
                let mut v = 0.0;
                for a in 0..4 {
                    for bb in (a + 1)..4 {
                        if w[(a, bb)] != 0.0 {
                            v -= w[(a, bb)] * self.r_frame[a][bb][c][d];
                        }
                    }
                }
                // g(R(b) E_c, E_d) lands in row d, column c.
                m[(d, c)] = v;
            }
        }
        m
    }

    /// Derivation action of the curvature on Λ²: R(a)(Z∧T) =
    /// R(a)Z ∧ T + Z ∧ R(a)T, as a commutator of wedge matrices.
    pub fn curv_der_apply(&self, a: &Vector6<f64>, b: &Vector6<f64>) -> Vector6<f64> {
        let m = self.curv_end(a);
        let w = wedge_matrix(b);
        split_from_wedge_matrix(&(m * w - w * m))
    }

    /// ℛ applied to a bivector.
    pub fn curv_op_apply(&self, b: &Vector6<f64>) -> Vector6<f64> {
        self.curv_op * b
    }

    /// Frame components of a coordinate tangent vector.
    pub fn to_frame(&self, v: &Vector4<f64>) -> Vector4<f64> {
        self.frame.to_frame(&self.metric, v)
    }

    pub fn to_coords(&self, vf: &Vector4<f64>) -> Vector4<f64> {
        self.frame.to_coords(vf)
    }
}

/// The curvature operator of a chart at a point, in the split basis.
pub fn curvature_operator(chart: &MetricChart, x: &Point) -> Result<Matrix6<f64>> {
    Ok(PointGeometry::build(chart, x)?.curv_op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::sample;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit6(i: usize) -> Vector6<f64> {
        let mut v = Vector6::zeros();
        v[i] = 1.0;
        v
    }

    #[test]
    fn wedge_norm_of_orthonormal_pair_is_one_half() {
        let e1 = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let e2 = Vector4::new(0.0, 1.0, 0.0, 0.0);
        let b = wedge(&e1, &e2);
        assert_relative_eq!(b.dot(&b), 0.5);
    }

    #[test]
    fn split_basis_is_orthonormal_and_hodge_eigenbasis() {
        for i in 0..3 {
            for plus in [true, false] {
                let s = s_basis(i, plus);
                assert_relative_eq!(s.dot(&s), 1.0);
                let star = hodge(&s);
                let expect = if plus { s } else { -s };
                assert_eq!(star, expect);
            }
        }
    }

    #[test]
    fn k_endo_moves_frame_vectors_as_expected() {
        // K_{s₁⁺} E₁ = E₂ and K_{s₁⁺} E₃ = E₄, forced by the factor 2 in the
        // pairing and the ½ in the induced metric.
        let k = k_endo(&s_basis(0, true));
        let e1 = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let e3 = Vector4::new(0.0, 0.0, 1.0, 0.0);
        assert_eq!(k * e1, Vector4::new(0.0, 1.0, 0.0, 0.0));
        assert_eq!(k * e3, Vector4::new(0.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn unit_split_bivectors_give_complex_structures() {
        for i in 0..3 {
            for plus in [true, false] {
                let k = k_endo(&s_basis(i, plus));
                assert!((k * k + Matrix4::identity()).norm() < 1e-15);
                assert!((k + k.transpose()).norm() == 0.0);
            }
        }
    }

    #[test]
    fn cross_of_split_basis_is_right_handed() {
        let p = [0.3, 0.0, 0.0, 0.0];
        let s1 = Bivector::new(p, s_basis(0, true));
        let s2 = Bivector::new(p, s_basis(1, true));
        let c = cross(&s1, &s2).unwrap();
        assert_eq!(c.comps, s_basis(2, true));
        let self_cross = cross(&s1, &s1).unwrap();
        assert_eq!(self_cross.comps.norm(), 0.0);
        let m = Bivector::new(p, s_basis(0, false));
        assert!(matches!(cross(&s1, &m), Err(Error::MixedHalves)));
    }

    proptest! {
        /// g(a, b) against the ½·det expansion over random wedges.
        #[test]
        fn lambda2_metric_matches_half_det(
            u in prop::array::uniform4(-1.0f64..1.0),
            v in prop::array::uniform4(-1.0f64..1.0),
            w in prop::array::uniform4(-1.0f64..1.0),
            z in prop::array::uniform4(-1.0f64..1.0),
        ) {
            let u = Vector4::from(u);
            let v = Vector4::from(v);
            let w = Vector4::from(w);
            let z = Vector4::from(z);
            let lhs = wedge(&u, &v).dot(&wedge(&w, &z));
            let det = u.dot(&w) * v.dot(&z) - u.dot(&z) * v.dot(&w);
            prop_assert!((lhs - 0.5 * det).abs() < 1e-12);
        }

        /// K_b K_c = −g(b,c) Id ± K_{b×c} on each half.
        #[test]
        fn composition_of_skew_endos_follows_cross_product(
            b in prop::array::uniform3(-1.0f64..1.0),
            c in prop::array::uniform3(-1.0f64..1.0),
            plus in any::<bool>(),
        ) {
            let b3 = Vector3::from(b);
            let c3 = Vector3::from(c);
            let (b6, c6, sign) = if plus {
                (from_halves(&b3, &Vector3::zeros()), from_halves(&c3, &Vector3::zeros()), 1.0)
            } else {
                (from_halves(&Vector3::zeros(), &b3), from_halves(&Vector3::zeros(), &c3), -1.0)
            };
            let lhs = k_endo(&b6) * k_endo(&c6);
            let cross6 = if plus {
                from_halves(&b3.cross(&c3), &Vector3::zeros())
            } else {
                from_halves(&Vector3::zeros(), &b3.cross(&c3))
            };
            let rhs = -Matrix4::identity() * b6.dot(&c6) + k_endo(&cross6) * sign;
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn mixed_half_endos_commute_and_orthogonal_same_half_anticommute() {
        let mut rng = sample::rng(11);
        for _ in 0..32 {
            let a = from_halves(&sample::random_vec3(&mut rng), &Vector3::zeros());
            let b = from_halves(&Vector3::zeros(), &sample::random_vec3(&mut rng));
            let ka = k_endo(&a);
            let kb = k_endo(&b);
            assert!((ka * kb - kb * ka).norm() < 1e-13);

            let p = sample::random_vec3(&mut rng);
            let mut q = sample::random_vec3(&mut rng);
            q -= p * (p.dot(&q) / p.norm_squared());
            let kp = k_endo(&from_halves(&p, &Vector3::zeros()));
            let kq = k_endo(&from_halves(&q, &Vector3::zeros()));
            assert!((kp * kq + kq * kp).norm() < 1e-12);
        }
    }

    #[test]
    fn gamma_metric_on_skew_endos_doubles_lambda2_metric() {
        let mut rng = sample::rng(3);
        for _ in 0..16 {
            let a = from_halves(&sample::random_vec3(&mut rng), &sample::random_vec3(&mut rng));
            let b = from_halves(&sample::random_vec3(&mut rng), &sample::random_vec3(&mut rng));
            let gamma = -0.5 * (k_endo(&a) * k_endo(&b)).trace();
            assert_relative_eq!(gamma, 2.0 * a.dot(&b), epsilon = 1e-13);
        }
    }

    #[test]
    fn wedge_basis_round_trip_is_isometric() {
        let p = [0.0; 4];
        let mut rng = sample::rng(21);
        for _ in 0..16 {
            let w: [f64; 6] = std::array::from_fn(|_| {
                use rand::Rng;
                rng.gen_range(-1.0..1.0)
            });
            let b = Bivector::from_wedge_components(p, w);
            let back = b.wedge_components();
            for k in 0..6 {
                assert_relative_eq!(w[k], back[k], epsilon = 1e-14);
            }
            // ‖Σ w_k e_k‖² = ½ Σ w_k² for the orthogonal wedge basis.
            let expected: f64 = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
            assert_relative_eq!(b.comps.dot(&b.comps), expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn flat_chart_has_zero_curvature_operator() {
        let chart = catalog::make_flat();
        let op = curvature_operator(&chart, &[0.1, 0.2, -0.3, 0.0]).unwrap();
        assert_eq!(op.norm(), 0.0);
    }

    #[test]
    fn sphere_curvature_operator_is_twice_chi_on_both_halves() {
        // The derived constant-curvature eigenvalue: ℛ = 2χ·Id = (s/6)·Id.
        for r in [1.0, 2.0] {
            let chart = catalog::make_round_sphere(r);
            let chi = 1.0 / (r * r);
            let geom = PointGeometry::build(&chart, &[0.2, -0.1, 0.3, 0.05]).unwrap();
            let expect = Matrix6::identity() * (2.0 * chi);
            assert!((geom.curv_op - expect).norm() < 1e-7 * chi.max(1.0));
            assert!(geom.decomposition.b_norm() < 1e-8);
            assert!(geom.decomposition.w_plus.norm() < 1e-8);
            assert!(geom.decomposition.w_minus.norm() < 1e-8);
            assert_relative_eq!(geom.decomposition.scalar_from_op, 12.0 * chi, max_relative = 1e-7);
        }
    }

    #[test]
    fn cp2_has_exactly_one_vanishing_weyl_half() {
        let geom = PointGeometry::build(&catalog::make_cp2(false), &[0.2, 0.1, -0.15, 0.3]).unwrap();
        let dec = &geom.decomposition;
        assert!(dec.b_norm() < 1e-7, "Fubini-Study is Einstein");
        assert!(dec.w_minus.norm() < 1e-7, "standard orientation is self-dual");
        assert!(dec.w_plus.norm() > 1e-2, "but not anti-self-dual");
        assert!(dec.w_plus.trace().abs() < 1e-7);

        let rev = PointGeometry::build(&catalog::make_cp2(true), &[0.2, 0.1, -0.15, 0.3]).unwrap();
        assert!(rev.decomposition.w_plus.norm() < 1e-7);
        assert!(rev.decomposition.w_minus.norm() > 1e-2);
    }

    #[test]
    fn equal_radius_product_is_einstein_with_nonzero_weyl() {
        let geom = PointGeometry::build(&catalog::make_s2xs2(1.0, 1.0), &[0.1, 0.2, -0.2, 0.15]).unwrap();
        let dec = &geom.decomposition;
        assert!(dec.b_norm() < 1e-7);
        assert!(dec.w_plus.norm() > 1e-2);
        assert!(dec.w_minus.norm() > 1e-2);
    }

    #[test]
    fn decomposition_reconstructs_generic_operators() {
        let chart = catalog::make_perturbed_flat(0.1, 7).unwrap();
        for x in sample::box_points(&chart.domain, 0.15, 5, 2) {
            let geom = PointGeometry::build(&chart, &x).unwrap();
            let dec = &geom.decomposition;
            assert!(dec.reconstruction_residual < 1e-9 * (1.0 + geom.curv_op.norm()));
            assert!(dec.b_formula_residual < 1e-8 * (1.0 + geom.curv_op.norm()));
            assert!(dec.w_plus.trace().abs() < 1e-10);
            assert!(dec.w_minus.trace().abs() < 1e-10);
            assert_relative_eq!(dec.scalar, dec.scalar_from_op, max_relative = 1e-9);
        }
    }

    /// Both sign branches of the curvature pairing identity
    /// g(R(a)b, c) = ± g(ℛ(a), b×c) on every catalog chart.
    #[test]
    fn derivation_action_matches_operator_through_cross_products() {
        for entry in catalog::catalog() {
            let chart = &entry.chart;
            let mut rng = sample::rng(17);
            for x in sample::box_points(&chart.domain, 0.15, 3, 5) {
                let geom = PointGeometry::build(chart, &x).unwrap();
                for _ in 0..8 {
                    let a = from_halves(&sample::random_vec3(&mut rng), &sample::random_vec3(&mut rng));
                    let bp = sample::random_vec3(&mut rng);
                    let cp = sample::random_vec3(&mut rng);
                    // plus branch
                    let b6 = from_halves(&bp, &Vector3::zeros());
                    let c6 = from_halves(&cp, &Vector3::zeros());
                    let lhs = geom.curv_der_apply(&a, &b6).dot(&c6);
                    let rhs = geom
                        .curv_op_apply(&a)
                        .dot(&from_halves(&bp.cross(&cp), &Vector3::zeros()));
                    assert!(
                        (lhs - rhs).abs() < 1e-7 * (1.0 + geom.curv_op.norm()),
                        "plus branch failed on {}: {lhs} vs {rhs}",
                        chart.id
                    );
                    // minus branch
                    let b6 = from_halves(&Vector3::zeros(), &bp);
                    let c6 = from_halves(&Vector3::zeros(), &cp);
                    let lhs = geom.curv_der_apply(&a, &b6).dot(&c6);
                    let rhs = -geom
                        .curv_op_apply(&a)
                        .dot(&from_halves(&Vector3::zeros(), &bp.cross(&cp)));
                    assert!(
                        (lhs - rhs).abs() < 1e-7 * (1.0 + geom.curv_op.norm()),
                        "minus branch failed on {}: {lhs} vs {rhs}",
                        chart.id
                    );
                }
            }
        }
    }

    #[test]
    fn mismatched_base_points_are_rejected() {
        let a = Bivector::new([0.0; 4], unit6(0));
        let b = Bivector::new([0.1, 0.0, 0.0, 0.0], unit6(1));
        assert!(matches!(
            metric_lambda2(&a, &b),
            Err(Error::MismatchedBasePoints)
        ));
    }
}
