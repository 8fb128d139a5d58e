//! Built-in metric charts with analytic partials, plus user-defined charts
//! parsed from the expression grammar.
//!
//! Every catalog entry carries the geometric properties it is supposed to
//! have (Einstein, constant curvature, one-sided Weyl vanishing, scalar
//! curvature). Those claims are never trusted: `verify_entry` re-derives
//! them numerically and errors out on any mismatch.

use crate::bivector::PointGeometry;
use crate::chart::MetricChart;
use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::sample;

use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize)]
pub struct KnownProps {
    pub einstein: bool,
    pub constant_curvature: Option<f64>,
    pub self_dual: bool,
    pub anti_self_dual: bool,
    pub scalar: Option<f64>,
}

pub struct CatalogEntry {
    pub chart: MetricChart,
    pub props: KnownProps,
}

fn zero() -> Expr {
    Expr::constant(0.0)
}

fn radius_sq() -> Expr {
    Expr::var(0).powi(2) + Expr::var(1).powi(2) + Expr::var(2).powi(2) + Expr::var(3).powi(2)
}

/// Identity metric on a box.
pub fn make_flat() -> MetricChart {
    let comps: [[Expr; 4]; 4] = std::array::from_fn(|a| {
        std::array::from_fn(|b| if a == b { Expr::constant(1.0) } else { zero() })
    });
    MetricChart::from_exprs("flat", [[-1.0, 1.0]; 4], 1.0, comps)
}

/// Round four-sphere of radius r in a stereographic chart:
/// g = 4r⁴/(r² + |x|²)² δ, sectional curvature 1/r², scalar 12/r².
pub fn make_round_sphere(r: f64) -> MetricChart {
    make_round_sphere_oriented(r, 1.0)
}

pub fn make_round_sphere_oriented(r: f64, orientation: f64) -> MetricChart {
    assert!(r > 0.0);
    let denom = (Expr::constant(r * r) + radius_sq()).powi(2);
    let factor = Expr::constant(4.0 * r.powi(4)) / denom;
    let comps: [[Expr; 4]; 4] = std::array::from_fn(|a| {
        std::array::from_fn(|b| if a == b { factor.clone() } else { zero() })
    });
    let id = if orientation > 0.0 {
        "round_sphere".to_string()
    } else {
        "round_sphere_reversed".to_string()
    };
    let half = 0.9 * r;
    MetricChart::from_exprs(id, [[-half, half]; 4], orientation, comps)
}

/// Fubini-Study metric on an affine chart of the complex projective plane,
/// normalized to holomorphic sectional curvature 4 (scalar curvature 24).
/// `reversed` flips the orientation, exchanging the roles of the two Weyl
/// halves.
pub fn make_cp2(reversed: bool) -> MetricChart {
    // Real form of ((1+|z|²)δ_{jk} − z̄_j z_k)/(1+|z|²)² with z1 = x1 + i x2,
    // z2 = x3 + i x4 and complex structure J x = (-x2, x1, -x4, x3).
    let n = Expr::constant(1.0) + radius_sq();
    let x = |i: usize| Expr::var(i);
    let jx = |i: usize| match i {
        0 => -x(1),
        1 => x(0),
        2 => -x(3),
        _ => x(2),
    };
    let comps: [[Expr; 4]; 4] = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let kron = if a == b { n.clone() } else { zero() };
            (kron - x(a) * x(b) - jx(a) * jx(b)) / n.clone().powi(2)
        })
    });
    let (id, orientation) = if reversed {
        ("cp2_reversed", -1.0)
    } else {
        ("cp2", 1.0)
    };
    MetricChart::from_exprs(id, [[-0.8, 0.8]; 4], orientation, comps)
}

/// Product of round 2-spheres of radii a and b in stereographic product
/// coordinates; Einstein exactly when a = b, scalar 2/a² + 2/b².
pub fn make_s2xs2(a: f64, b: f64) -> MetricChart {
    assert!(a > 0.0 && b > 0.0);
    let rho1 = Expr::var(0).powi(2) + Expr::var(1).powi(2);
    let rho2 = Expr::var(2).powi(2) + Expr::var(3).powi(2);
    let f1 = Expr::constant(4.0 * a.powi(4)) / (Expr::constant(a * a) + rho1).powi(2);
    let f2 = Expr::constant(4.0 * b.powi(4)) / (Expr::constant(b * b) + rho2).powi(2);
    let comps: [[Expr; 4]; 4] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            if i == j {
                if i < 2 {
                    f1.clone()
                } else {
                    f2.clone()
                }
            } else {
                zero()
            }
        })
    });
    let ha = 0.9 * a;
    let hb = 0.9 * b;
    MetricChart::from_exprs(
        format!("s2xs2_{a}_{b}"),
        [[-ha, ha], [-ha, ha], [-hb, hb], [-hb, hb]],
        1.0,
        comps,
    )
}

/// Conformally stretched flat metric with an additional non-conformal
/// quadratic-form term, so that every block of the curvature decomposition
/// is generically nonzero. Deterministic in (amplitude, seed).
pub fn make_perturbed_flat(amplitude: f64, seed: u64) -> Result<MetricChart> {
    let mut rng = sample::rng(seed);
    let mut coeff = || rng.gen_range(-0.5..0.5);

    // f = amplitude * (linear + quadratic) driving the conformal factor.
    let mut f = zero();
    for a in 0..4 {
        f = f + Expr::constant(coeff()) * Expr::var(a);
    }
    for a in 0..4 {
        for b in a..4 {
            f = f + Expr::constant(coeff()) * Expr::var(a) * Expr::var(b);
        }
    }
    f = Expr::constant(amplitude) * f;
    let conf = (Expr::constant(2.0) * f).exp_of();

    // Symmetric matrix-valued polynomial perturbation; purely conformal
    // metrics keep both Weyl halves zero, this term breaks that.
    let mut h: Vec<Vec<Expr>> = vec![vec![zero(); 4]; 4];
    for a in 0..4 {
        for b in a..4 {
            let mut e = Expr::constant(coeff());
            for c in 0..4 {
                e = e + Expr::constant(coeff()) * Expr::var(c);
            }
            h[a][b] = e.clone();
            h[b][a] = e;
        }
    }

    let comps: [[Expr; 4]; 4] = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            let kron = if a == b { conf.clone() } else { zero() };
            kron + Expr::constant(amplitude) * h[a][b].clone()
        })
    });
    let chart = MetricChart::from_exprs(
        format!("perturbed_flat_{amplitude}_{seed}"),
        [[-0.5, 0.5]; 4],
        1.0,
        comps,
    );

    // Positive definiteness over a coarse grid; fails loudly for large
    // amplitudes instead of producing garbage curvature later.
    let steps = [-0.5, -0.25, 0.0, 0.25, 0.5];
    for &x0 in &steps {
        for &x1 in &steps {
            for &x2 in &steps {
                for &x3 in &steps {
                    let x = [x0, x1, x2, x3];
                    let g = chart.metric_unchecked(&x);
                    if nalgebra::Cholesky::new(g).is_none() {
                        return Err(Error::MetricNotPositiveDefinite { point: x });
                    }
                }
            }
        }
    }
    Ok(chart)
}

/// The standard desk-scale chart set used by the verification suites.
pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            chart: make_flat(),
            props: KnownProps {
                einstein: true,
                constant_curvature: Some(0.0),
                self_dual: true,
                anti_self_dual: true,
                scalar: Some(0.0),
            },
        },
        CatalogEntry {
            chart: make_round_sphere(1.0),
            props: KnownProps {
                einstein: true,
                constant_curvature: Some(1.0),
                self_dual: true,
                anti_self_dual: true,
                scalar: Some(12.0),
            },
        },
        CatalogEntry {
            chart: make_cp2(false),
            props: KnownProps {
                einstein: true,
                constant_curvature: None,
                self_dual: true,
                anti_self_dual: false,
                scalar: Some(24.0),
            },
        },
        CatalogEntry {
            chart: make_s2xs2(1.0, 2.0),
            props: KnownProps {
                einstein: false,
                constant_curvature: None,
                self_dual: false,
                anti_self_dual: false,
                scalar: Some(2.0 + 0.5),
            },
        },
        CatalogEntry {
            chart: make_perturbed_flat(0.1, 7).expect("preset perturbation is positive definite"),
            props: KnownProps {
                einstein: false,
                constant_curvature: None,
                self_dual: false,
                anti_self_dual: false,
                scalar: None,
            },
        },
    ]
}

/// Look up a chart by id with optional parameters.
pub fn chart_by_id(id: &str, params: &BTreeMap<String, f64>) -> Result<MetricChart> {
    let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
    match id {
        "flat" => Ok(make_flat()),
        "round_sphere" => Ok(make_round_sphere(get("radius", 1.0))),
        "round_sphere_reversed" => Ok(make_round_sphere_oriented(get("radius", 1.0), -1.0)),
        "cp2" => Ok(make_cp2(false)),
        "cp2_reversed" => Ok(make_cp2(true)),
        "s2xs2" => Ok(make_s2xs2(get("a", 1.0), get("b", 2.0))),
        "perturbed_flat" => {
            make_perturbed_flat(get("amplitude", 0.1), get("seed", 7.0) as u64)
        }
        other => Err(Error::UnknownChart(other.to_string())),
    }
}

/// Numeric re-derivation of a catalog entry's claimed properties.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogCheck {
    pub id: String,
    pub points: usize,
    pub max_b_norm: f64,
    pub max_w_plus_norm: f64,
    pub max_w_minus_norm: f64,
    pub max_reconstruction_residual: f64,
    pub scalar_min: f64,
    pub scalar_max: f64,
}

/// Curvature-block measurements over sampled points, with no claims
/// attached.
pub fn measure_chart(chart: &MetricChart, points: usize) -> Result<CatalogCheck> {
    let mut check = CatalogCheck {
        id: chart.id.clone(),
        points: 0,
        max_b_norm: 0.0,
        max_w_plus_norm: 0.0,
        max_w_minus_norm: 0.0,
        max_reconstruction_residual: 0.0,
        scalar_min: f64::INFINITY,
        scalar_max: f64::NEG_INFINITY,
    };
    for x in sample::box_points(&chart.domain, 0.12, points, 23) {
        let geom = PointGeometry::build(chart, &x)?;
        let dec = &geom.decomposition;
        check.points += 1;
        check.max_b_norm = check.max_b_norm.max(dec.b_norm());
        check.max_w_plus_norm = check.max_w_plus_norm.max(dec.w_plus.norm());
        check.max_w_minus_norm = check.max_w_minus_norm.max(dec.w_minus.norm());
        check.max_reconstruction_residual = check
            .max_reconstruction_residual
            .max(dec.reconstruction_residual);
        check.scalar_min = check.scalar_min.min(dec.scalar);
        check.scalar_max = check.scalar_max.max(dec.scalar);
    }
    Ok(check)
}

pub fn verify_entry(entry: &CatalogEntry, points: usize) -> Result<CatalogCheck> {
    let chart = &entry.chart;
    let tol = if chart.has_analytic_partials() { 1e-6 } else { 1e-4 };
    let check = measure_chart(chart, points)?;
    let fail = |detail: String| -> Result<CatalogCheck> {
        Err(Error::CatalogVerification {
            id: chart.id.clone(),
            detail,
        })
    };
    if check.max_reconstruction_residual > tol {
        return fail(format!(
            "decomposition reconstruction residual {}",
            check.max_reconstruction_residual
        ));
    }
    if entry.props.einstein && check.max_b_norm > tol {
        return fail(format!("claimed Einstein but ‖B‖ = {}", check.max_b_norm));
    }
    if !entry.props.einstein && check.max_b_norm < 100.0 * tol {
        return fail(format!(
            "claimed non-Einstein but ‖B‖ = {} is tiny",
            check.max_b_norm
        ));
    }
    if entry.props.self_dual && check.max_w_minus_norm > tol {
        return fail(format!(
            "claimed self-dual but ‖W₋‖ = {}",
            check.max_w_minus_norm
        ));
    }
    if entry.props.anti_self_dual && check.max_w_plus_norm > tol {
        return fail(format!(
            "claimed anti-self-dual but ‖W₊‖ = {}",
            check.max_w_plus_norm
        ));
    }
    if !entry.props.self_dual && check.max_w_minus_norm < 100.0 * tol {
        return fail(format!(
            "claimed W₋ ≠ 0 but ‖W₋‖ = {}",
            check.max_w_minus_norm
        ));
    }
    if !entry.props.anti_self_dual && check.max_w_plus_norm < 100.0 * tol {
        return fail(format!(
            "claimed W₊ ≠ 0 but ‖W₊‖ = {}",
            check.max_w_plus_norm
        ));
    }
    if let Some(s) = entry.props.scalar {
        let dev = (check.scalar_min - s).abs().max((check.scalar_max - s).abs());
        if dev > 1e-5 * (1.0 + s.abs()) {
            return fail(format!(
                "claimed scalar {} but measured [{}, {}]",
                s, check.scalar_min, check.scalar_max
            ));
        }
    }
    if let Some(chi) = entry.props.constant_curvature {
        if (check.scalar_min - 12.0 * chi).abs() > 1e-5 * (1.0 + chi.abs()) {
            return fail(format!(
                "claimed constant curvature {chi} but scalar is {}",
                check.scalar_min
            ));
        }
    }
    Ok(check)
}

/// Build a user-defined chart from `g11 = ...` style expression entries.
pub fn custom_chart_from_kv(kv: &BTreeMap<String, String>) -> Result<MetricChart> {
    let domain = match kv.get("domain") {
        Some(text) => {
            let parts: Vec<f64> = text
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad domain entry '{t}'")))
                })
                .collect::<Result<_>>()?;
            match parts.len() {
                2 => [[parts[0], parts[1]]; 4],
                8 => std::array::from_fn(|a| [parts[2 * a], parts[2 * a + 1]]),
                _ => {
                    return Err(Error::Config(
                        "domain wants 2 or 8 numbers (lo hi per axis)".into(),
                    ))
                }
            }
        }
        None => [[-1.0, 1.0]; 4],
    };
    let orientation = match kv.get("orientation").map(|s| s.as_str()) {
        None | Some("1") | Some("+1") => 1.0,
        Some("-1") => -1.0,
        Some(other) => return Err(Error::Config(format!("bad orientation '{other}'"))),
    };
    let mut comps: Vec<Vec<Expr>> = vec![vec![Expr::constant(0.0); 4]; 4];
    for a in 0..4 {
        for b in a..4 {
            let key = format!("g{}{}", a + 1, b + 1);
            let text = kv
                .get(&key)
                .ok_or_else(|| Error::Config(format!("missing metric component '{key}'")))?;
            let e = parse(text)?;
            comps[a][b] = e.clone();
            comps[b][a] = e;
        }
    }
    let comps: [[Expr; 4]; 4] =
        std::array::from_fn(|a| std::array::from_fn(|b| comps[a][b].clone()));
    let id = kv.get("id").cloned().unwrap_or_else(|| "custom".into());
    Ok(MetricChart::from_exprs(id, domain, orientation, comps))
}
