//! Coordinate charts of an oriented Riemannian four-manifold: metric
//! evaluation, Levi-Civita connection, Riemann curvature, and orthonormal
//! frames.
//!
//! The curvature tensor is stored so that on a round sphere the sectional
//! curvature g(R(X,Y)Y,X) of an orthonormal plane is positive. All bundle
//! formulas downstream consume the opposite sign (see `bivector`), matching
//! the convention in which the curvature operator of the sphere is a
//! positive multiple of the identity on both halves of Λ².

use crate::dual::Scalar;
use crate::error::{Error, Result};
use crate::expr::Expr;
use nalgebra::{Matrix4, Vector4};
use std::sync::Arc;

pub type Point = [f64; 4];
pub type Christoffel = [[[f64; 4]; 4]; 4];

type MetricFn = Box<dyn Fn(&Point) -> Matrix4<f64> + Send + Sync>;
type MetricGradFn = Box<dyn Fn(&Point) -> [Matrix4<f64>; 4] + Send + Sync>;
type MetricHessFn = Box<dyn Fn(&Point) -> [[Matrix4<f64>; 4]; 4] + Send + Sync>;

/// A single coordinate patch with metric component functions.
///
/// `orientation` is the sign of the coordinate basis relative to the chosen
/// orientation of the manifold; frames built from the chart honor it.
pub struct MetricChart {
    pub id: String,
    pub domain: [[f64; 2]; 4],
    pub orientation: f64,
    g: MetricFn,
    dg: Option<MetricGradFn>,
    d2g: Option<MetricHessFn>,
}

impl MetricChart {
    pub fn new(
        id: impl Into<String>,
        domain: [[f64; 2]; 4],
        orientation: f64,
        g: MetricFn,
        dg: Option<MetricGradFn>,
        d2g: Option<MetricHessFn>,
    ) -> Self {
        assert!(orientation == 1.0 || orientation == -1.0);
        MetricChart {
            id: id.into(),
            domain,
            orientation,
            g,
            dg,
            d2g,
        }
    }

    /// Build a chart from expression trees for the metric components.
    /// First and second partials are derived symbolically.
    pub fn from_exprs(
        id: impl Into<String>,
        domain: [[f64; 2]; 4],
        orientation: f64,
        comps: [[Expr; 4]; 4],
    ) -> Self {
        let comps = Arc::new(comps);
        let d1: Arc<Vec<[[Expr; 4]; 4]>> = Arc::new(
            (0..4)
                .map(|mu| {
                    std::array::from_fn(|a| std::array::from_fn(|b| comps[a][b].diff(mu)))
                })
                .collect(),
        );
        let d2: Arc<Vec<Vec<[[Expr; 4]; 4]>>> = Arc::new(
            (0..4)
                .map(|mu| {
                    (0..4)
                        .map(|nu| {
                            std::array::from_fn(|a| {
                                std::array::from_fn(|b| d1[mu][a][b].diff(nu))
                            })
                        })
                        .collect()
                })
                .collect(),
        );

        let g = {
            let comps = comps.clone();
            Box::new(move |x: &Point| {
                Matrix4::from_fn(|a, b| comps[a][b].eval(x))
            })
        };
        let dg = {
            let d1 = d1.clone();
            Box::new(move |x: &Point| {
                std::array::from_fn(|mu| Matrix4::from_fn(|a, b| d1[mu][a][b].eval(x)))
            })
        };
        let d2g = {
            let d2 = d2.clone();
            Box::new(move |x: &Point| {
                std::array::from_fn(|mu| {
                    std::array::from_fn(|nu| Matrix4::from_fn(|a, b| d2[mu][nu][a][b].eval(x)))
                })
            })
        };
        MetricChart::new(id, domain, orientation, g, Some(dg), Some(d2g))
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.dg.is_some() && self.d2g.is_some()
    }

    fn fd_step(&self, axis: usize) -> f64 {
        1e-5 * (self.domain[axis][1] - self.domain[axis][0]).abs().max(1e-6)
    }

    /// Margin required by the widest finite-difference stencil at this chart.
    pub fn required_margin(&self) -> f64 {
        if self.has_analytic_partials() {
            0.0
        } else {
            8.0 * (0..4).map(|a| self.fd_step(a)).fold(0.0, f64::max)
        }
    }

    pub fn contains(&self, x: &Point, margin: f64) -> bool {
        (0..4).all(|a| {
            x[a] > self.domain[a][0] + margin && x[a] < self.domain[a][1] - margin
        })
    }

    pub fn check_inside(&self, x: &Point, margin: f64) -> Result<()> {
        if self.contains(x, margin) {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain { point: *x, margin })
        }
    }

    /// Metric components; errors if the point is outside the domain or the
    /// matrix fails to be positive definite.
    pub fn metric(&self, x: &Point) -> Result<Matrix4<f64>> {
        self.check_inside(x, 0.0)?;
        let g = (self.g)(x);
        if nalgebra::Cholesky::new(g).is_none() {
            return Err(Error::MetricNotPositiveDefinite { point: *x });
        }
        Ok(g)
    }

    pub fn metric_unchecked(&self, x: &Point) -> Matrix4<f64> {
        (self.g)(x)
    }

    /// First partials ∂_μ g, analytic when available, otherwise central
    /// differences with step 1e-5 per axis scale.
    pub fn metric_d1(&self, x: &Point) -> [Matrix4<f64>; 4] {
        if let Some(dg) = &self.dg {
            return dg(x);
        }
        std::array::from_fn(|mu| {
            let h = self.fd_step(mu);
            let mut xp = *x;
            let mut xm = *x;
            xp[mu] += h;
            xm[mu] -= h;
            ((self.g)(&xp) - (self.g)(&xm)) / (2.0 * h)
        })
    }

    /// Second partials ∂_μ∂_ν g; the finite-difference fallback uses one
    /// Richardson extrapolation level.
    pub fn metric_d2(&self, x: &Point) -> [[Matrix4<f64>; 4]; 4] {
        if let Some(d2g) = &self.d2g {
            return d2g(x);
        }
        let second = |mu: usize, nu: usize, h: f64| -> Matrix4<f64> {
            if mu == nu {
                let mut xp = *x;
                let mut xm = *x;
                xp[mu] += h;
                xm[mu] -= h;
                ((self.g)(&xp) + (self.g)(&xm) - 2.0 * (self.g)(x)) / (h * h)
            } else {
                let shift = |smu: f64, snu: f64| {
                    let mut y = *x;
                    y[mu] += smu * h;
                    y[nu] += snu * h;
                    (self.g)(&y)
                };
                (shift(1.0, 1.0) - shift(1.0, -1.0) - shift(-1.0, 1.0) + shift(-1.0, -1.0))
                    / (4.0 * h * h)
            }
        };
        std::array::from_fn(|mu| {
            std::array::from_fn(|nu| {
                let h = 10.0 * self.fd_step(mu.max(nu));
                let coarse = second(mu, nu, h);
                let fine = second(mu, nu, h / 2.0);
                (4.0 * fine - coarse) / 3.0
            })
        })
    }
}

/// A tangent vector in coordinate components.
#[derive(Debug, Clone, Copy)]
pub struct TangentVector {
    pub point: Point,
    pub components: Vector4<f64>,
}

impl TangentVector {
    pub fn new(point: Point, components: Vector4<f64>) -> Self {
        TangentVector { point, components }
    }
}

impl CurvatureTensor {
    /// Sectional curvature of the plane spanned by two tangent vectors.
    pub fn sectional_of(
        &self,
        g: &Matrix4<f64>,
        x: &TangentVector,
        y: &TangentVector,
    ) -> crate::error::Result<f64> {
        if x.point != self.point || y.point != self.point {
            return Err(crate::error::Error::MismatchedBasePoints);
        }
        Ok(self.sectional(g, &x.components, &y.components))
    }
}

/// An oriented orthonormal frame at a point; column `a` of `vectors` holds
/// the coordinate components of E_{a+1}.
#[derive(Debug, Clone)]
pub struct OrthonormalFrame {
    pub point: Point,
    pub vectors: Matrix4<f64>,
}

impl OrthonormalFrame {
    /// Frame components of a coordinate vector: v_a = g(v, E_a).
    pub fn to_frame(&self, g: &Matrix4<f64>, v: &Vector4<f64>) -> Vector4<f64> {
        let gv = g * v;
        Vector4::from_fn(|a, _| self.vectors.column(a).dot(&gv))
    }

    /// Coordinate components of a frame vector.
    pub fn to_coords(&self, vf: &Vector4<f64>) -> Vector4<f64> {
        &self.vectors * vf
    }

    pub fn gram(&self, g: &Matrix4<f64>) -> Matrix4<f64> {
        self.vectors.transpose() * g * self.vectors
    }
}

/// Gram-Schmidt on the coordinate basis, generic over the scalar so the
/// same construction yields frame jets from dual numbers. The output is
/// upper-triangular in the coordinate basis with positive diagonal, hence
/// carries the orientation of the coordinate basis; `orientation = -1`
/// flips E₄ to restore the chart orientation.
pub fn gram_schmidt_frame<S: Scalar>(g: &[[S; 4]; 4], orientation: f64) -> [[S; 4]; 4] {
    let zero = S::from_f64(0.0);
    let inner = |u: &[S; 4], w: &[S; 4]| {
        let mut acc = zero;
        for a in 0..4 {
            for b in 0..4 {
                acc = acc + u[a] * g[a][b] * w[b];
            }
        }
        acc
    };
    let mut frame = [[zero; 4]; 4];
    for a in 0..4 {
        let mut u = [zero; 4];
        u[a] = S::from_f64(1.0);
        for b in 0..a {
            let c = inner(&u, &frame[b]);
            for k in 0..4 {
                u[k] = u[k] - c * frame[b][k];
            }
        }
        let n = inner(&u, &u).sqrt_s();
        for k in 0..4 {
            frame[a][k] = u[k] / n;
        }
    }
    if orientation < 0.0 {
        for k in 0..4 {
            frame[3][k] = -frame[3][k];
        }
    }
    frame
}

/// Oriented orthonormal frame by Gram-Schmidt on the coordinate basis.
pub fn orthonormal_frame(chart: &MetricChart, x: &Point) -> Result<OrthonormalFrame> {
    let g = chart.metric(x)?;
    let garr: [[f64; 4]; 4] = std::array::from_fn(|a| std::array::from_fn(|b| g[(a, b)]));
    let f = gram_schmidt_frame(&garr, chart.orientation);
    let mut vectors = Matrix4::zeros();
    for a in 0..4 {
        for k in 0..4 {
            vectors[(k, a)] = f[a][k];
        }
    }
    Ok(OrthonormalFrame { point: *x, vectors })
}

/// Christoffel symbols Γ^γ_{αβ} of the Levi-Civita connection.
pub fn christoffel(chart: &MetricChart, x: &Point) -> Result<Christoffel> {
    chart.check_inside(x, chart.required_margin())?;
    let g = chart.metric(x)?;
    let ginv = g
        .try_inverse()
        .ok_or(Error::MetricNotPositiveDefinite { point: *x })?;
    let dg = chart.metric_d1(x);
    Ok(christoffel_from(&ginv, &dg))
}

fn christoffel_from(ginv: &Matrix4<f64>, dg: &[Matrix4<f64>; 4]) -> Christoffel {
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for c in 0..4 {
        for a in 0..4 {
            for b in a..4 {
                let mut sum = 0.0;
                for d in 0..4 {
                    sum += ginv[(c, d)] * (dg[a][(d, b)] + dg[b][(a, d)] - dg[d][(a, b)]);
                }
                gamma[c][a][b] = 0.5 * sum;
                gamma[c][b][a] = gamma[c][a][b];
            }
        }
    }
    gamma
}

/// Riemann curvature, Ricci and scalar curvature at a point.
///
/// `riemann_low[a][b][c][d]` holds R_{αβγδ} = g(R(∂_α,∂_β)∂_γ, ∂_δ) in the
/// sphere-positive convention R(X,Y) = [∇_X,∇_Y] − ∇_{[X,Y]}.
#[derive(Debug, Clone)]
pub struct CurvatureTensor {
    pub point: Point,
    pub riemann_low: [[[[f64; 4]; 4]; 4]; 4],
    pub ricci: Matrix4<f64>,
    pub ricci_op: Matrix4<f64>,
    pub scalar: f64,
}

impl CurvatureTensor {
    /// g(R(X,Y)Z, T) for coordinate-component vectors.
    pub fn curv(&self, x: &Vector4<f64>, y: &Vector4<f64>, z: &Vector4<f64>, t: &Vector4<f64>) -> f64 {
        let mut sum = 0.0;
        for a in 0..4 {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..4 {
                if y[b] == 0.0 {
                    continue;
                }
                for c in 0..4 {
                    for d in 0..4 {
                        sum += x[a] * y[b] * z[c] * t[d] * self.riemann_low[a][b][c][d];
                    }
                }
            }
        }
        sum
    }

    /// Sectional curvature of the plane spanned by X, Y.
    pub fn sectional(&self, g: &Matrix4<f64>, x: &Vector4<f64>, y: &Vector4<f64>) -> f64 {
        let num = self.curv(x, y, y, x);
        let xx = (g * x).dot(x);
        let yy = (g * y).dot(y);
        let xy = (g * x).dot(y);
        num / (xx * yy - xy * xy)
    }
}

/// Curvature by differentiating the Christoffel symbols.
pub fn riemann(chart: &MetricChart, x: &Point) -> Result<CurvatureTensor> {
    chart.check_inside(x, 2.0 * chart.required_margin())?;
    let g = chart.metric(x)?;
    let ginv = g
        .try_inverse()
        .ok_or(Error::MetricNotPositiveDefinite { point: *x })?;
    let dg = chart.metric_d1(x);
    let d2g = chart.metric_d2(x);
    let gamma = christoffel_from(&ginv, &dg);

    // ∂_μ Γ^c_{ab} from analytic (or extrapolated) second partials.
    let mut dgamma = [[[[0.0; 4]; 4]; 4]; 4]; // [mu][c][a][b]
    for mu in 0..4 {
        // ∂_μ g^{cd} = -g^{ca} ∂_μ g_{ab} g^{bd}
        let dginv = -ginv * dg[mu] * ginv;
        for c in 0..4 {
            for a in 0..4 {
                for b in a..4 {
                    let mut sum = 0.0;
                    for d in 0..4 {
                        sum += dginv[(c, d)] * (dg[a][(d, b)] + dg[b][(a, d)] - dg[d][(a, b)]);
                        sum += ginv[(c, d)]
                            * (d2g[mu][a][(d, b)] + d2g[mu][b][(a, d)] - d2g[mu][d][(a, b)]);
                    }
                    dgamma[mu][c][a][b] = 0.5 * sum;
                    dgamma[mu][c][b][a] = dgamma[mu][c][a][b];
                }
            }
        }
    }

    // R^d_{abc} = [R(∂_a,∂_b)∂_c]^d with R(X,Y) = [∇_X,∇_Y] − ∇_{[X,Y]}.
    let mut r_up = [[[[0.0; 4]; 4]; 4]; 4]; // [a][b][c][d]
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut v = dgamma[a][d][b][c] - dgamma[b][d][a][c];
                    for e in 0..4 {
                        v += gamma[d][a][e] * gamma[e][b][c] - gamma[d][b][e] * gamma[e][a][c];
                    }
                    r_up[a][b][c][d] = v;
                }
            }
        }
    }

    let mut riemann_low = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut v = 0.0;
                    for e in 0..4 {
                        v += r_up[a][b][c][e] * g[(e, d)];
                    }
                    riemann_low[a][b][c][d] = v;
                }
            }
        }
    }

    // Ricci(X,Y) = trace(Z ↦ R(Z,X)Y); positive on the round sphere.
    let mut ricci = Matrix4::zeros();
    for b in 0..4 {
        for c in 0..4 {
            let mut v = 0.0;
            for a in 0..4 {
                v += r_up[a][b][c][a];
            }
            ricci[(b, c)] = v;
        }
    }
    let ricci_op = ginv * ricci;
    let scalar = ricci_op.trace();

    Ok(CurvatureTensor {
        point: *x,
        riemann_low,
        ricci,
        ricci_op,
        scalar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    const PTS: [[f64; 4]; 3] = [
        [0.3, 0.0, 0.0, 0.0],
        [0.12, -0.21, 0.05, 0.17],
        [-0.25, 0.1, 0.3, -0.08],
    ];

    #[test]
    fn flat_chart_has_vanishing_connection_and_curvature() {
        let chart = catalog::make_flat();
        let x = [0.2, -0.4, 0.1, 0.6];
        let gamma = christoffel(&chart, &x).unwrap();
        for c in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    assert_eq!(gamma[c][a][b], 0.0);
                }
            }
        }
        let r = riemann(&chart, &x).unwrap();
        assert_eq!(r.scalar, 0.0);
        assert_eq!(r.ricci.norm(), 0.0);
    }

    #[test]
    fn christoffel_is_symmetric_in_lower_indices() {
        let chart = catalog::make_perturbed_flat(0.1, 7).unwrap();
        for x in PTS {
            let gamma = christoffel(&chart, &x).unwrap();
            for c in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        assert_eq!(gamma[c][a][b], gamma[c][b][a]);
                    }
                }
            }
        }
    }

    /// Independent oracle: recover Γ at a point by solving the metric
    /// compatibility equations ∂_c g_{ab} = Σ_d Γ^d_{ca} g_{db} + Γ^d_{cb} g_{ad}
    /// as a 40x40 linear system, with ∂g from finite differences of g alone.
    fn christoffel_oracle(chart: &MetricChart, x: &Point) -> Christoffel {
        let g = chart.metric_unchecked(x);
        let h = 1e-6;
        let dg: [Matrix4<f64>; 4] = std::array::from_fn(|mu| {
            let mut xp = *x;
            let mut xm = *x;
            xp[mu] += h;
            xm[mu] -= h;
            (chart.metric_unchecked(&xp) - chart.metric_unchecked(&xm)) / (2.0 * h)
        });

        // Unknowns Γ^d_{ca} with c ≤ a would lose equations; keep the full
        // symmetric parametrization: index (d, {c,a}) over c ≤ a.
        let mut pairs = Vec::new();
        for c in 0..4 {
            for a in c..4 {
                pairs.push((c, a));
            }
        }
        let unknowns = 4 * pairs.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for c in 0..4 {
            for a in 0..4 {
                for b in a..4 {
                    // ∂_c g_{ab} = Γ^d_{ca} g_{db} + Γ^d_{cb} g_{ad}
                    let mut row = vec![0.0; unknowns];
                    for d in 0..4 {
                        let idx_ca = pairs
                            .iter()
                            .position(|&(p, q)| (p, q) == (c.min(a), c.max(a)))
                            .unwrap();
                        row[4 * idx_ca + d] += g[(d, b)];
                        let idx_cb = pairs
                            .iter()
                            .position(|&(p, q)| (p, q) == (c.min(b), c.max(b)))
                            .unwrap();
                        row[4 * idx_cb + d] += g[(a, d)];
                    }
                    rows.push(row);
                    rhs.push(dg[c][(a, b)]);
                }
            }
        }
        let m = DMatrix::from_fn(rows.len(), unknowns, |i, j| rows[i][j]);
        let b = DMatrix::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        let sol = (m.transpose() * &m)
            .lu()
            .solve(&(m.transpose() * b))
            .expect("compatibility system is solvable");

        let mut gamma = [[[0.0; 4]; 4]; 4];
        for (k, &(c, a)) in pairs.iter().enumerate() {
            for d in 0..4 {
                gamma[d][c][a] = sol[(4 * k + d, 0)];
                gamma[d][a][c] = sol[(4 * k + d, 0)];
            }
        }
        gamma
    }

    #[test]
    fn sphere_christoffel_matches_compatibility_oracle() {
        let chart = catalog::make_round_sphere(1.0);
        let x = [0.3, 0.0, 0.0, 0.0];
        let gamma = christoffel(&chart, &x).unwrap();
        let oracle = christoffel_oracle(&chart, &x);
        for c in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    assert_relative_eq!(gamma[c][a][b], oracle[c][a][b], epsilon = 1e-8);
                }
            }
        }
        // Frozen closed-form values for the conformal factor of the round
        // sphere: Γ^1_{11} = ∂_1 log λ = -2 x_1 / (1 + |x|^2) at x = (0.3,0,0,0).
        let dphi = -0.6 / 1.09;
        assert_relative_eq!(gamma[0][0][0], dphi, epsilon = 1e-12);
        assert_relative_eq!(gamma[1][0][1], dphi, epsilon = 1e-12);
        assert_relative_eq!(gamma[0][1][1], -dphi, epsilon = 1e-12);
        assert_relative_eq!(gamma[0][0][1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn metric_compatibility_residual_is_small_on_catalog_charts() {
        for entry in catalog::catalog() {
            let chart = &entry.chart;
            let tol = if chart.has_analytic_partials() { 1e-9 } else { 1e-5 };
            for x in crate::sample::box_points(&chart.domain, 0.1, 50, 13) {
                let g = chart.metric(&x).unwrap();
                let dg = chart.metric_d1(&x);
                let gamma = christoffel(&chart, &x).unwrap();
                for c in 0..4 {
                    for a in 0..4 {
                        for b in 0..4 {
                            let mut resid = dg[c][(a, b)];
                            for d in 0..4 {
                                resid -= gamma[d][c][a] * g[(d, b)] + gamma[d][c][b] * g[(a, d)];
                            }
                            assert!(
                                resid.abs() < tol,
                                "chart {} at {:?}: residual {}",
                                chart.id,
                                x,
                                resid
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn riemann_symmetries_and_bianchi_hold() {
        let chart = catalog::make_s2xs2(1.0, 2.0);
        for x in PTS {
            let r = riemann(&chart, &x).unwrap();
            let rr = &r.riemann_low;
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            assert_relative_eq!(rr[a][b][c][d], -rr[b][a][c][d], epsilon = 1e-9);
                            assert_relative_eq!(rr[a][b][c][d], -rr[a][b][d][c], epsilon = 1e-9);
                            assert_relative_eq!(rr[a][b][c][d], rr[c][d][a][b], epsilon = 1e-9);
                            let bianchi = rr[a][b][c][d] + rr[b][c][a][d] + rr[c][a][b][d];
                            assert!(bianchi.abs() < 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn round_sphere_has_positive_constant_sectional_curvature() {
        for r in [1.0, 2.0] {
            let chart = catalog::make_round_sphere(r);
            let chi = 1.0 / (r * r);
            let mut rng = crate::sample::rng(5);
            for x in crate::sample::box_points(&chart.domain, 0.1, 5, 3) {
                let g = chart.metric(&x).unwrap();
                let curv = riemann(&chart, &x).unwrap();
                for _ in 0..20 {
                    let (u, v) = crate::sample::random_plane(&mut rng);
                    let sec = curv.sectional(&g, &u, &v);
                    assert!(sec > 0.0, "sign convention check failed");
                    assert_relative_eq!(sec, chi, max_relative = 1e-7);
                }
                assert_relative_eq!(curv.scalar, 12.0 * chi, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn product_of_unit_spheres_is_einstein_with_scalar_four() {
        let chart = catalog::make_s2xs2(1.0, 1.0);
        for x in crate::sample::box_points(&chart.domain, 0.15, 5, 11) {
            let g = chart.metric(&x).unwrap();
            let curv = riemann(&chart, &x).unwrap();
            assert_relative_eq!(curv.scalar, 4.0, max_relative = 1e-7);
            // Einstein with constant 1: Ricci = g.
            assert!((curv.ricci - g).norm() < 1e-7 * g.norm());
        }
    }

    #[test]
    fn frame_is_orthonormal_and_oriented() {
        let entries = catalog::catalog();
        for entry in &entries {
            let chart = &entry.chart;
            for x in crate::sample::box_points(&chart.domain, 0.1, 5, 2) {
                let g = chart.metric(&x).unwrap();
                let frame = orthonormal_frame(chart, &x).unwrap();
                let gram = frame.gram(&g);
                assert!((gram - Matrix4::identity()).norm() < 1e-12);
                assert!(frame.vectors.determinant() * chart.orientation > 0.0);
            }
        }
    }

    #[test]
    fn conformal_frame_matches_closed_form() {
        // g = e^{2f} δ rescales the coordinate basis by e^{-f}.
        let f = crate::expr::parse("x1 * x2 - x3^2 + x4 / 2").unwrap();
        let comps: [[Expr; 4]; 4] = std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                if a == b {
                    (Expr::constant(2.0) * f.clone()).exp_of()
                } else {
                    Expr::constant(0.0)
                }
            })
        });
        let chart = MetricChart::from_exprs(
            "conformal",
            [[-1.0, 1.0]; 4],
            1.0,
            comps,
        );
        let x = [0.3, -0.2, 0.1, 0.4];
        let frame = orthonormal_frame(&chart, &x).unwrap();
        let scale = (-f.eval(&x)).exp();
        for a in 0..4 {
            for k in 0..4 {
                let expected = if a == k { scale } else { 0.0 };
                assert_relative_eq!(frame.vectors[(k, a)], expected, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn finite_difference_fallback_tracks_analytic_partials() {
        let analytic = catalog::make_round_sphere(1.0);
        let fd = MetricChart::new(
            "sphere-fd",
            analytic.domain,
            1.0,
            Box::new({
                let r4 = 4.0;
                move |x: &Point| {
                    let n = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
                    Matrix4::identity() * (r4 / (n * n))
                }
            }),
            None,
            None,
        );
        let x = [0.21, -0.13, 0.4, 0.17];
        let da = analytic.metric_d1(&x);
        let df = fd.metric_d1(&x);
        let d2a = analytic.metric_d2(&x);
        let d2f = fd.metric_d2(&x);
        for mu in 0..4 {
            assert!((da[mu] - df[mu]).norm() < 1e-8);
            for nu in 0..4 {
                assert!((d2a[mu][nu] - d2f[mu][nu]).norm() < 1e-5);
            }
        }
        let ra = riemann(&analytic, &x).unwrap();
        let rf = riemann(&fd, &x).unwrap();
        assert_relative_eq!(ra.scalar, rf.scalar, max_relative = 1e-4);
    }

    #[test]
    fn out_of_domain_point_is_rejected() {
        let chart = catalog::make_flat();
        let err = christoffel(&chart, &[5.0, 0.0, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::PointOutsideDomain { .. }));
    }
}
