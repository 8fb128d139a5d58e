//! The eight-dimensional coordinate model of the product bundle: chart
//! coordinates x̃_α on the base and orthographic chart coordinates on the
//! two unit-sphere fibres, with the moving frame, its connection
//! coefficients, the fibre metric G_t, and horizontal lifts expressed in
//! these coordinates.
//!
//! This is the machinery behind the independent finite-difference oracle:
//! apart from the Gram-Schmidt frame it shares nothing with the
//! closed-form path.

use crate::bivector::{
    minus_part, plus_part, s_basis, split_from_wedge_matrix, wedge_matrix,
};
use crate::chart::{gram_schmidt_frame, MetricChart, Point};
use crate::dual::Dual4;
use crate::error::{Error, Result};
use crate::twistor::{k_nu, MetricParams, Nu, TangentP, TwistorPoint, VerticalVector};
use nalgebra::{Matrix3, Matrix4, SMatrix, SVector, Vector2, Vector3, Vector4};

/// Orthographic chart of the unit sphere along one coordinate axis: the
/// two remaining components are the chart coordinates and the axis
/// component is recovered by sign·√(1 − |c|²).
#[derive(Debug, Clone, Copy)]
pub struct SphereChart {
    pub axis: usize,
    pub sign: f64,
}

impl SphereChart {
    /// Chart keeping the largest component on the reconstruction axis; the
    /// axis component then stays ≥ 1/√3 and the chart never degenerates.
    pub fn choose(y: &Vector3<f64>) -> SphereChart {
        let mut axis = 0;
        for i in 1..3 {
            if y[i].abs() > y[axis].abs() {
                axis = i;
            }
        }
        SphereChart {
            axis,
            sign: if y[axis] >= 0.0 { 1.0 } else { -1.0 },
        }
    }

    fn free_axes(&self) -> (usize, usize) {
        match self.axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    }

    pub fn to_chart(&self, y: &Vector3<f64>) -> Vector2<f64> {
        let (i, j) = self.free_axes();
        Vector2::new(y[i], y[j])
    }

    pub fn to_sphere(&self, c: &Vector2<f64>) -> Result<Vector3<f64>> {
        let rest = 1.0 - c.norm_squared();
        if rest <= 1e-12 {
            return Err(Error::DegenerateSphereChart {
                coord: [c[0], c[1], 0.0],
            });
        }
        let (i, j) = self.free_axes();
        let mut y = Vector3::zeros();
        y[i] = c[0];
        y[j] = c[1];
        y[self.axis] = self.sign * rest.sqrt();
        Ok(y)
    }

    /// Jacobian ∂y/∂c, a 3×2 matrix.
    pub fn jacobian(&self, c: &Vector2<f64>) -> Result<SMatrix<f64, 3, 2>> {
        let y = self.to_sphere(c)?;
        let (i, j) = self.free_axes();
        let mut m = SMatrix::<f64, 3, 2>::zeros();
        m[(i, 0)] = 1.0;
        m[(j, 1)] = 1.0;
        m[(self.axis, 0)] = -c[0] / y[self.axis];
        m[(self.axis, 1)] = -c[1] / y[self.axis];
        Ok(m)
    }

    /// Chart velocity of a sphere-tangent vector: its free components.
    pub fn velocity_to_chart(&self, v: &Vector3<f64>) -> Vector2<f64> {
        let (i, j) = self.free_axes();
        Vector2::new(v[i], v[j])
    }
}

/// Coordinates (x̃_α, y_j⁺, y_j⁻) of a bundle point and back; the sphere
/// components are the split components of σ^± in the chart frame.
pub fn ambient_coordinates(kappa: &TwistorPoint) -> ([f64; 4], [f64; 3], [f64; 3]) {
    (
        kappa.point,
        [kappa.y_plus[0], kappa.y_plus[1], kappa.y_plus[2]],
        [kappa.y_minus[0], kappa.y_minus[1], kappa.y_minus[2]],
    )
}

pub fn from_ambient(x: [f64; 4], y_plus: [f64; 3], y_minus: [f64; 3]) -> Result<TwistorPoint> {
    let yp = Vector3::from(y_plus);
    let ym = Vector3::from(y_minus);
    for y in [&yp, &ym] {
        if (y.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::DegenerateSphereChart {
                coord: [y[0], y[1], y[2]],
            });
        }
    }
    Ok(TwistorPoint::new(x, yp, ym))
}

/// Frame field and connection data shared by the coordinate formulas.
pub struct BundleCoords<'a> {
    pub chart: &'a MetricChart,
    pub t: MetricParams,
    pub plus_chart: SphereChart,
    pub minus_chart: SphereChart,
}

/// Per-direction split of the eight coordinate basis vectors at a bundle
/// point: frame components of the base projection and split components of
/// the vertical part.
pub struct DirectionSplit {
    pub h_frame: [Vector4<f64>; 8],
    pub v_plus: [Vector3<f64>; 8],
    pub v_minus: [Vector3<f64>; 8],
    pub y_plus: Vector3<f64>,
    pub y_minus: Vector3<f64>,
    /// Frame vectors at the base point (columns, coordinate components).
    pub frame: Matrix4<f64>,
}

impl<'a> BundleCoords<'a> {
    pub fn new(chart: &'a MetricChart, t: MetricParams, kappa: &TwistorPoint) -> Self {
        BundleCoords {
            chart,
            t,
            plus_chart: SphereChart::choose(&kappa.y_plus),
            minus_chart: SphereChart::choose(&kappa.y_minus),
        }
    }

    pub fn to_z(&self, kappa: &TwistorPoint) -> SVector<f64, 8> {
        let cp = self.plus_chart.to_chart(&kappa.y_plus);
        let cm = self.minus_chart.to_chart(&kappa.y_minus);
        SVector::<f64, 8>::from_column_slice(&[
            kappa.point[0],
            kappa.point[1],
            kappa.point[2],
            kappa.point[3],
            cp[0],
            cp[1],
            cm[0],
            cm[1],
        ])
    }

    pub fn kappa_at(&self, z: &SVector<f64, 8>) -> Result<TwistorPoint> {
        let x = [z[0], z[1], z[2], z[3]];
        let yp = self.plus_chart.to_sphere(&Vector2::new(z[4], z[5]))?;
        let ym = self.minus_chart.to_sphere(&Vector2::new(z[6], z[7]))?;
        Ok(TwistorPoint::new(x, yp, ym))
    }

    /// Frame vectors and their x-derivatives by pushing dual numbers
    /// through Gram-Schmidt.
    pub fn frame_jet(&self, x: &Point) -> Result<(Matrix4<f64>, [Matrix4<f64>; 4])> {
        self.chart.check_inside(x, 0.0)?;
        let g = self.chart.metric(x)?;
        let dg = self.chart.metric_d1(x);
        let gdual: [[Dual4; 4]; 4] = std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                Dual4::with_grad(
                    g[(a, b)],
                    [dg[0][(a, b)], dg[1][(a, b)], dg[2][(a, b)], dg[3][(a, b)]],
                )
            })
        });
        let fj = gram_schmidt_frame(&gdual, self.chart.orientation);
        let mut frame = Matrix4::zeros();
        let mut dframe = [Matrix4::zeros(); 4];
        for a in 0..4 {
            for k in 0..4 {
                frame[(k, a)] = fj[a][k].v;
                for mu in 0..4 {
                    dframe[mu][(k, a)] = fj[a][k].d[mu];
                }
            }
        }
        Ok((frame, dframe))
    }

    /// Connection coefficients of the split bases along each coordinate
    /// direction: ω^±_μ[(j,k)] = g(∇_μ s_j^±, s_k^±).
    pub fn omega(&self, x: &Point) -> Result<([Matrix3<f64>; 4], [Matrix3<f64>; 4])> {
        let g = self.chart.metric(x)?;
        let (frame, dframe) = self.frame_jet(x)?;
        let gamma = crate::chart::christoffel(self.chart, x)?;
        let mut omega_p = [Matrix3::zeros(); 4];
        let mut omega_m = [Matrix3::zeros(); 4];
        for mu in 0..4 {
            // ∇_μ E_a in coordinates, then in frame components.
            let mut gmat = Matrix4::zeros();
            for c in 0..4 {
                for d in 0..4 {
                    gmat[(c, d)] = gamma[c][mu][d];
                }
            }
            let dcov = dframe[mu] + gmat * frame;
            let c_mu = frame.transpose() * g * dcov;
            debug_assert!((c_mu + c_mu.transpose()).norm() < 1e-7 * (1.0 + c_mu.norm()));
            for j in 0..3 {
                let wp = wedge_matrix(&s_basis(j, true));
                let wm = wedge_matrix(&s_basis(j, false));
                let dp = split_from_wedge_matrix(&(c_mu * wp - wp * c_mu));
                let dm = split_from_wedge_matrix(&(c_mu * wm - wm * c_mu));
                // The derivation by a skew endomorphism preserves the
                // halves; the opposite components vanish identically.
                for k in 0..3 {
                    omega_p[mu][(j, k)] = plus_part(&dp)[k];
                    omega_m[mu][(j, k)] = minus_part(&dm)[k];
                }
            }
        }
        Ok((omega_p, omega_m))
    }

    /// Split the eight coordinate directions at z into base and fibre
    /// parts.
    pub fn direction_split(&self, z: &SVector<f64, 8>) -> Result<DirectionSplit> {
        let x = [z[0], z[1], z[2], z[3]];
        let g = self.chart.metric(&x)?;
        let (frame, _) = self.frame_jet(&x)?;
        let (omega_p, omega_m) = self.omega(&x)?;
        let cp = Vector2::new(z[4], z[5]);
        let cm = Vector2::new(z[6], z[7]);
        let y_plus = self.plus_chart.to_sphere(&cp)?;
        let y_minus = self.minus_chart.to_sphere(&cm)?;
        let jp = self.plus_chart.jacobian(&cp)?;
        let jm = self.minus_chart.jacobian(&cm)?;

        let mut h_frame = [Vector4::zeros(); 8];
        let mut v_plus = [Vector3::zeros(); 8];
        let mut v_minus = [Vector3::zeros(); 8];
        let gf = frame.transpose() * g;
        for mu in 0..4 {
            h_frame[mu] = gf.column(mu).into_owned();
            // Covariant fibre velocity of ∂_{x_μ}: Σ_j y_j ω_μ[(j,k)].
            v_plus[mu] = omega_p[mu].transpose() * y_plus;
            v_minus[mu] = omega_m[mu].transpose() * y_minus;
        }
        for i in 0..2 {
            v_plus[4 + i] = jp.column(i).into_owned();
            v_minus[6 + i] = jm.column(i).into_owned();
        }
        Ok(DirectionSplit {
            h_frame,
            v_plus,
            v_minus,
            y_plus,
            y_minus,
            frame,
        })
    }

    /// The fibre metric G_t as an 8×8 matrix in bundle coordinates.
    pub fn g_matrix(&self, z: &SVector<f64, 8>) -> Result<SMatrix<f64, 8, 8>> {
        let split = self.direction_split(z)?;
        let mut m = SMatrix::<f64, 8, 8>::zeros();
        for a in 0..8 {
            for b in a..8 {
                let v = split.h_frame[a].dot(&split.h_frame[b])
                    + self.t.t1 * split.v_plus[a].dot(&split.v_plus[b])
                    + self.t.t2 * split.v_minus[a].dot(&split.v_minus[b]);
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
        Ok(m)
    }

    /// The fundamental form F_{t,ν} as an 8×8 matrix in bundle coordinates.
    pub fn f_matrix(&self, z: &SVector<f64, 8>, nu: Nu) -> Result<SMatrix<f64, 8, 8>> {
        let split = self.direction_split(z)?;
        let kappa = TwistorPoint::new([z[0], z[1], z[2], z[3]], split.y_plus, split.y_minus);
        let p = crate::twistor::p_kappa(&kappa);
        let (sp, sm) = nu.vertical_signs();
        let mut m = SMatrix::<f64, 8, 8>::zeros();
        for a in 0..8 {
            let ph = p * split.h_frame[a];
            for b in 0..8 {
                m[(a, b)] = ph.dot(&split.h_frame[b])
                    + self.t.t1 * sp * split.v_plus[a].dot(&split.v_plus[b])
                    + self.t.t2 * sm * split.v_minus[a].dot(&split.v_minus[b]);
            }
        }
        Ok(m)
    }

    /// Coordinate components of the horizontal lift of a coordinate-basis
    /// combination X (coordinate components on the base).
    pub fn lift_to_coords(
        &self,
        z: &SVector<f64, 8>,
        x_coord: &Vector4<f64>,
    ) -> Result<SVector<f64, 8>> {
        let split = self.direction_split(z)?;
        let mut bp = Vector3::zeros();
        let mut bm = Vector3::zeros();
        for mu in 0..4 {
            bp += split.v_plus[mu] * x_coord[mu];
            bm += split.v_minus[mu] * x_coord[mu];
        }
        let ap = self.plus_chart.velocity_to_chart(&(-bp));
        let am = self.minus_chart.velocity_to_chart(&(-bm));
        Ok(SVector::<f64, 8>::from_column_slice(&[
            x_coord[0], x_coord[1], x_coord[2], x_coord[3], ap[0], ap[1], am[0], am[1],
        ]))
    }

    /// Coordinate components of a vertical vector at z.
    pub fn vertical_to_coords(
        &self,
        v: &VerticalVector,
    ) -> SVector<f64, 8> {
        let ap = self.plus_chart.velocity_to_chart(&v.plus);
        let am = self.minus_chart.velocity_to_chart(&v.minus);
        SVector::<f64, 8>::from_column_slice(&[0.0, 0.0, 0.0, 0.0, ap[0], ap[1], am[0], am[1]])
    }

    /// Frame components → coordinate components on the base.
    pub fn frame_to_coords(&self, z: &SVector<f64, 8>, xf: &Vector4<f64>) -> Result<Vector4<f64>> {
        let x = [z[0], z[1], z[2], z[3]];
        let (frame, _) = self.frame_jet(&x)?;
        Ok(frame * xf)
    }
}

/// Horizontal lift in bundle coordinates of a tangent vector given in
/// frame components at the base point of κ.
pub fn horizontal_lift(
    chart: &MetricChart,
    t: MetricParams,
    kappa: &TwistorPoint,
    x_frame: &Vector4<f64>,
) -> Result<SVector<f64, 8>> {
    let coords = BundleCoords::new(chart, t, kappa);
    let z = coords.to_z(kappa);
    let xc = coords.frame_to_coords(&z, x_frame)?;
    coords.lift_to_coords(&z, &xc)
}

/// Evaluate G_t between two tangent vectors given in the split
/// representation, through the coordinate model (for cross-checks).
pub fn g_t_via_coords(
    chart: &MetricChart,
    t: MetricParams,
    kappa: &TwistorPoint,
    a: &TangentP,
    b: &TangentP,
) -> Result<f64> {
    let coords = BundleCoords::new(chart, t, kappa);
    let z = coords.to_z(kappa);
    let g = coords.g_matrix(&z)?;
    let to8 = |v: &TangentP| -> Result<SVector<f64, 8>> {
        let xc = coords.frame_to_coords(&z, &v.horizontal)?;
        Ok(coords.lift_to_coords(&z, &xc)? + coords.vertical_to_coords(&v.vertical))
    };
    let av = to8(a)?;
    let bv = to8(b)?;
    Ok((g * bv).dot(&av))
}

/// The fundamental form through the coordinate model.
pub fn f_via_coords(
    chart: &MetricChart,
    t: MetricParams,
    nu: Nu,
    kappa: &TwistorPoint,
    a: &TangentP,
    b: &TangentP,
) -> Result<f64> {
    let ka = k_nu(nu, kappa, a);
    g_t_via_coords(chart, t, kappa, &ka, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bivector::{wedge, PointGeometry};
    use crate::catalog;
    use crate::sample;
    use crate::twistor::{g_t, vertical_projection};
    use approx::assert_relative_eq;

    #[test]
    fn sphere_chart_round_trips_and_jacobian_is_consistent() {
        let mut rng = sample::rng(33);
        for _ in 0..32 {
            let y = sample::unit_sphere(&mut rng);
            let chart = SphereChart::choose(&y);
            let c = chart.to_chart(&y);
            let back = chart.to_sphere(&c).unwrap();
            assert!((back - y).norm() < 1e-12);

            let j = chart.jacobian(&c).unwrap();
            let h = 1e-6;
            for i in 0..2 {
                let mut cp = c;
                let mut cm = c;
                cp[i] += h;
                cm[i] -= h;
                let fd = (chart.to_sphere(&cp).unwrap() - chart.to_sphere(&cm).unwrap())
                    / (2.0 * h);
                assert!((j.column(i) - fd).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn ambient_coordinates_round_trip() {
        let mut rng = sample::rng(34);
        let kappa = TwistorPoint::new(
            [0.1, -0.2, 0.3, 0.0],
            sample::unit_sphere(&mut rng),
            sample::unit_sphere(&mut rng),
        );
        let (x, yp, ym) = ambient_coordinates(&kappa);
        let back = from_ambient(x, yp, ym).unwrap();
        assert_eq!(back.point, kappa.point);
        assert!((back.y_plus - kappa.y_plus).norm() < 1e-15);
        assert!((back.y_minus - kappa.y_minus).norm() < 1e-15);

        // The canonical point has fibre coordinates (1,0,0) on both spheres.
        let canon = TwistorPoint::canonical([0.0; 4]);
        let (_, yp, ym) = ambient_coordinates(&canon);
        assert_eq!(yp, [1.0, 0.0, 0.0]);
        assert_eq!(ym, [1.0, 0.0, 0.0]);

        assert!(from_ambient(x, [0.5, 0.0, 0.0], ym).is_err());
    }

    #[test]
    fn flat_chart_lift_has_no_fibre_components() {
        let chart = catalog::make_flat();
        let t = MetricParams::new(1.0, 2.0);
        let kappa = TwistorPoint::canonical([0.1, 0.2, -0.3, 0.0]);
        let lift = horizontal_lift(&chart, t, &kappa, &Vector4::new(1.0, -2.0, 0.5, 0.3)).unwrap();
        for i in 4..8 {
            assert_eq!(lift[i], 0.0);
        }
    }

    #[test]
    fn coordinate_metric_matches_the_split_formula() {
        let chart = catalog::make_cp2(false);
        let t = MetricParams::new(0.8, 1.7);
        let mut rng = sample::rng(35);
        for x0 in sample::box_points(&chart.domain, 0.2, 3, 7) {
            let kappa = TwistorPoint::new(
                x0,
                sample::unit_sphere(&mut rng),
                sample::unit_sphere(&mut rng),
            );
            for _ in 0..6 {
                let a = TangentP {
                    horizontal: sample::random_vec4(&mut rng),
                    vertical: vertical_projection(
                        &kappa,
                        &sample::random_vec3(&mut rng),
                        &sample::random_vec3(&mut rng),
                    ),
                };
                let b = TangentP {
                    horizontal: sample::random_vec4(&mut rng),
                    vertical: vertical_projection(
                        &kappa,
                        &sample::random_vec3(&mut rng),
                        &sample::random_vec3(&mut rng),
                    ),
                };
                let via = g_t_via_coords(&chart, t, &kappa, &a, &b).unwrap();
                assert_relative_eq!(via, g_t(t, &a, &b), epsilon = 1e-9);
                for nu in crate::twistor::ALL_NU {
                    let fvia = f_via_coords(&chart, t, nu, &kappa, &a, &b).unwrap();
                    assert_relative_eq!(
                        fvia,
                        g_t(t, &k_nu(nu, &kappa, &a), &b),
                        epsilon = 1e-9
                    );
                }
            }
        }
    }

    #[test]
    fn lift_is_g_orthogonal_to_the_fibres() {
        let chart = catalog::make_round_sphere(1.0);
        let t = MetricParams::new(1.3, 0.4);
        let mut rng = sample::rng(36);
        let kappa = TwistorPoint::new(
            [0.2, -0.1, 0.3, 0.1],
            sample::unit_sphere(&mut rng),
            sample::unit_sphere(&mut rng),
        );
        let coords = BundleCoords::new(&chart, t, &kappa);
        let z = coords.to_z(&kappa);
        let g = coords.g_matrix(&z).unwrap();
        let lift = coords
            .lift_to_coords(&z, &Vector4::new(0.3, 1.0, -0.7, 0.2))
            .unwrap();
        let glift = g * lift;
        for i in 4..8 {
            assert!(
                glift[i].abs() < 1e-10,
                "fibre pairing {} at {}",
                glift[i],
                i
            );
        }
    }

    /// Finite-difference Lie bracket of two lifted coordinate fields equals
    /// the curvature action on κ.
    #[test]
    fn bracket_of_lifts_reproduces_the_bundle_curvature() {
        let chart = catalog::make_round_sphere(1.0);
        let t = MetricParams::new(1.0, 1.0);
        let mut rng = sample::rng(37);
        let x0 = [0.25, -0.1, 0.05, 0.3];
        let kappa = TwistorPoint::new(
            x0,
            sample::unit_sphere(&mut rng),
            sample::unit_sphere(&mut rng),
        );
        let coords = BundleCoords::new(&chart, t, &kappa);
        let z0 = coords.to_z(&kappa);

        let ex = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let ey = Vector4::new(0.0, 1.0, 0.0, 0.0);
        let fx = |z: &SVector<f64, 8>| coords.lift_to_coords(z, &ex).unwrap();
        let fy = |z: &SVector<f64, 8>| coords.lift_to_coords(z, &ey).unwrap();

        // [X,Y]^μ = X^ν ∂_ν Y^μ − Y^ν ∂_ν X^μ by central differences.
        let h = 1e-5;
        let mut bracket = SVector::<f64, 8>::zeros();
        for nu_ax in 0..8 {
            let mut zp = z0;
            let mut zm = z0;
            zp[nu_ax] += h;
            zm[nu_ax] -= h;
            let dy = (fy(&zp) - fy(&zm)) / (2.0 * h);
            let dx = (fx(&zp) - fx(&zm)) / (2.0 * h);
            bracket += dy * fx(&z0)[nu_ax] - dx * fy(&z0)[nu_ax];
        }

        // Coordinate fields commute on the base, so the bracket is purely
        // vertical and equals R(X∧Y)κ.
        for mu in 0..4 {
            assert!(bracket[mu].abs() < 1e-7);
        }
        let geom = PointGeometry::build(&chart, &x0).unwrap();
        let xf = geom.to_frame(&ex);
        let yf = geom.to_frame(&ey);
        let xy = wedge(&xf, &yf);
        let expect = VerticalVector {
            plus: plus_part(&geom.curv_der_apply(&xy, &kappa.sigma_plus6())),
            minus: minus_part(&geom.curv_der_apply(&xy, &kappa.sigma_minus6())),
        };
        let expect8 = coords.vertical_to_coords(&expect);
        for i in 4..8 {
            assert_relative_eq!(bracket[i], expect8[i], epsilon = 1e-6);
        }
    }

    /// The bracket of a lift with the vertical field of a projected section
    /// is the vertical field of the covariant derivative of the section.
    #[test]
    fn bracket_with_vertical_fields_matches_covariant_derivative() {
        let chart = catalog::make_s2xs2(1.0, 2.0);
        let t = MetricParams::new(1.0, 1.0);
        let x0 = [0.2, 0.15, -0.4, 0.3];
        let mut rng = sample::rng(38);
        let kappa = TwistorPoint::new(
            x0,
            sample::unit_sphere(&mut rng),
            sample::unit_sphere(&mut rng),
        );
        let coords = BundleCoords::new(&chart, t, &kappa);
        let z0 = coords.to_z(&kappa);

        // Section a = (s₂⁺, 0) with constant split components; its
        // projected vertical field in chart coordinates.
        let a_plus = Vector3::y();
        let field_a = |z: &SVector<f64, 8>| -> SVector<f64, 8> {
            let kappa_z = coords.kappa_at(z).unwrap();
            let v = vertical_projection(&kappa_z, &a_plus, &Vector3::zeros());
            coords.vertical_to_coords(&v)
        };
        let ex = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let field_x = |z: &SVector<f64, 8>| coords.lift_to_coords(z, &ex).unwrap();

        let h = 1e-5;
        let mut bracket = SVector::<f64, 8>::zeros();
        for nu_ax in 0..8 {
            let mut zp = z0;
            let mut zm = z0;
            zp[nu_ax] += h;
            zm[nu_ax] -= h;
            let da = (field_a(&zp) - field_a(&zm)) / (2.0 * h);
            let dx = (field_x(&zp) - field_x(&zm)) / (2.0 * h);
            bracket += da * field_x(&z0)[nu_ax] - dx * field_a(&z0)[nu_ax];
        }

        // ∇_X a in split components from the connection coefficients.
        let (omega_p, _) = coords.omega(&x0).unwrap();
        let mut nabla = Vector3::zeros();
        for mu in 0..4 {
            // (∇_μ s₂⁺)_k = ω⁺_μ[(1,k)]; X = ∂_0.
            nabla += omega_p[mu].row(1).transpose() * ex[mu];
        }
        let expect = coords.vertical_to_coords(&vertical_projection(
            &kappa,
            &nabla,
            &Vector3::zeros(),
        ));
        for mu in 0..4 {
            assert!(bracket[mu].abs() < 1e-7);
        }
        for i in 4..8 {
            assert_relative_eq!(bracket[i], expect[i], epsilon = 1e-6);
        }
    }

    /// A frame corrected to first order by the connection has vanishing
    /// covariant derivative at the base point, so lifts over its fibre
    /// lose their fibre components there.
    #[test]
    fn normalized_frame_kills_fibre_components_of_the_lift() {
        let chart = catalog::make_round_sphere(1.0);
        let x0 = [0.3, -0.2, 0.1, 0.15];
        let g = chart.metric(&x0).unwrap();
        let t = MetricParams::new(1.0, 1.0);
        let kappa = TwistorPoint::canonical(x0);
        let coords = BundleCoords::new(&chart, t, &kappa);
        let (frame0, _) = coords.frame_jet(&x0).unwrap();
        let gamma = crate::chart::christoffel(&chart, &x0).unwrap();

        // Connection matrix at x0 in frame components, per direction.
        let mut c_mu = [Matrix4::zeros(); 4];
        {
            let (_, dframe) = coords.frame_jet(&x0).unwrap();
            for mu in 0..4 {
                let mut gmat = Matrix4::zeros();
                for c in 0..4 {
                    for d in 0..4 {
                        gmat[(c, d)] = gamma[c][mu][d];
                    }
                }
                c_mu[mu] = frame0.transpose() * g * (dframe[mu] + gmat * frame0);
            }
        }

        // Corrected frame field: F(x) = E(x)·exp(−Σ (x−x0)^μ C_μ).
        let corrected = |x: &Point| -> Matrix4<f64> {
            let (e, _) = coords.frame_jet(x).unwrap();
            let mut omega = Matrix4::zeros();
            for mu in 0..4 {
                omega += c_mu[mu] * (x[mu] - x0[mu]);
            }
            let mut expm = Matrix4::identity();
            let mut term = Matrix4::identity();
            for k in 1..12 {
                term = term * (-omega) / (k as f64);
                expm += term;
            }
            e * expm
        };

        // ∇_μ F_a at x0 by finite differences must vanish.
        let h = 1e-6;
        for mu in 0..4 {
            let mut xp = x0;
            let mut xm = x0;
            xp[mu] += h;
            xm[mu] -= h;
            let dff = (corrected(&xp) - corrected(&xm)) / (2.0 * h);
            let mut gmat = Matrix4::zeros();
            for c in 0..4 {
                for d in 0..4 {
                    gmat[(c, d)] = gamma[c][mu][d];
                }
            }
            let cov = dff + gmat * corrected(&x0);
            let omega_fr = corrected(&x0).transpose() * g * cov;
            assert!(
                omega_fr.norm() < 1e-6,
                "corrected frame connection at x0: {}",
                omega_fr.norm()
            );
        }
    }
}
