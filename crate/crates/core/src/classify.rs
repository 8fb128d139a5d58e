//! Numerical decision of the Gil-Medrano conditions F, D₁, D₂, D₃ for the
//! eigendistributions of the four almost product structures, Naveira class
//! inference, critical fibre-scale search, and the theorem verification
//! table.
//!
//! Condition residuals are suprema of identity defects over a seeded
//! sample set; verdicts use a two-sided band (holds below the tolerance,
//! fails above 100×, inconclusive in between with one budget doubling).

use crate::bivector::PointGeometry;
use crate::catalog::CatalogEntry;
use crate::chart::MetricChart;
use crate::connection::{daf_minus, daf_plus, df, DFRequest, DistArgs, OutSlot, Slot};
use crate::error::{Error, Result};
use crate::sample;
use crate::twistor::{
    fibre_bases, g_t, k_nu, p_kappa, vertical_projection, MetricParams, Nu, TangentP,
    TwistorPoint, VerticalVector, ALL_NU,
};
use nalgebra::{Vector3, Vector4};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    F,
    D1,
    D2,
    D3,
}

/// Which eigendistribution of 𝒦_ν: the +1 space or its orthogonal
/// complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Dist,
    Perp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceTier {
    Analytic,
    FiniteDiff,
}

impl ToleranceTier {
    pub fn for_chart(chart: &MetricChart) -> Self {
        if chart.has_analytic_partials() {
            ToleranceTier::Analytic
        } else {
            ToleranceTier::FiniteDiff
        }
    }

    pub fn tol(self) -> f64 {
        match self {
            ToleranceTier::Analytic => 1e-6,
            ToleranceTier::FiniteDiff => 1e-4,
        }
    }
}

pub fn verdict_of(residual: f64, tier: ToleranceTier) -> Verdict {
    let tol = tier.tol();
    if residual < tol {
        Verdict::Holds
    } else if residual > 100.0 * tol {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    }
}

/// Sampling budgets; the documented minima are 20 base points, 5 fibre
/// points per base point, 10 argument tuples per condition.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SampleConfig {
    pub base_points: usize,
    pub kappas_per_point: usize,
    pub tuples: usize,
    pub seed: u64,
}

impl SampleConfig {
    pub const MIN_BASE_POINTS: usize = 20;
    pub const MIN_KAPPAS: usize = 5;
    pub const MIN_TUPLES: usize = 10;

    pub fn standard(seed: u64) -> Self {
        SampleConfig {
            base_points: Self::MIN_BASE_POINTS,
            kappas_per_point: Self::MIN_KAPPAS,
            tuples: Self::MIN_TUPLES,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_points < Self::MIN_BASE_POINTS
            || self.kappas_per_point < Self::MIN_KAPPAS
            || self.tuples < Self::MIN_TUPLES
        {
            return Err(Error::BudgetTooSmall(format!(
                "{}x{}x{} below {}x{}x{}",
                self.base_points,
                self.kappas_per_point,
                self.tuples,
                Self::MIN_BASE_POINTS,
                Self::MIN_KAPPAS,
                Self::MIN_TUPLES
            )));
        }
        Ok(())
    }
}

/// Base-point geometry and fibre samples shared by every condition of one
/// classification run.
pub struct SampleSet {
    pub chart_id: String,
    pub geoms: Vec<PointGeometry>,
    pub kappas: Vec<Vec<TwistorPoint>>,
    pub seed: u64,
}

pub fn build_samples(
    chart: &MetricChart,
    base_points: usize,
    kappas_per_point: usize,
    seed: u64,
) -> Result<SampleSet> {
    let mut geoms = Vec::with_capacity(base_points);
    let mut kappas = Vec::with_capacity(base_points);
    let mut rng = sample::rng(seed);
    let mut offset = 1u64;
    let mut failures = 0usize;
    while geoms.len() < base_points {
        let x = sample::box_points(&chart.domain, 0.12, 1, offset)[0];
        offset += 1;
        match PointGeometry::build(chart, &x) {
            Ok(geom) => {
                let mut ks = Vec::with_capacity(kappas_per_point);
                for _ in 0..kappas_per_point {
                    ks.push(TwistorPoint::new(
                        x,
                        sample::unit_sphere(&mut rng),
                        sample::unit_sphere(&mut rng),
                    ));
                }
                geoms.push(geom);
                kappas.push(ks);
            }
            Err(e) => {
                // Re-draw on evaluation failure; give up if the chart is
                // systematically broken.
                failures += 1;
                eprintln!("sample at {x:?} re-drawn: {e}");
                if failures > 4 * base_points {
                    return Err(e);
                }
            }
        }
    }
    Ok(SampleSet {
        chart_id: chart.id.clone(),
        geoms,
        kappas,
        seed,
    })
}

/// The input achieving the maximal residual of a condition report.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub base_point: [f64; 4],
    pub y_plus: [f64; 3],
    pub y_minus: [f64; 3],
    pub tuple_index: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub side: Side,
    pub nu: u8,
    pub max_residual: f64,
    pub samples: usize,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

/// G_t-orthonormal basis of the chosen eigendistribution at κ.
fn dist_basis(nu: Nu, side: Side, kappa: &TwistorPoint, t: MetricParams) -> Vec<Slot> {
    let fb = fibre_bases(kappa);
    let mut out = Vec::with_capacity(6);
    let horiz = match side {
        Side::Dist => fb.h_pos,
        Side::Perp => fb.h_neg,
    };
    for h in horiz {
        out.push(Slot::Horizontal(h));
    }
    let (sp, sm) = nu.vertical_signs();
    let keep_plus = match side {
        Side::Dist => sp > 0.0,
        Side::Perp => sp < 0.0,
    };
    let keep_minus = match side {
        Side::Dist => sm > 0.0,
        Side::Perp => sm < 0.0,
    };
    if keep_plus {
        for v in fb.v_plus {
            out.push(Slot::Vertical(VerticalVector {
                plus: v / t.t1.sqrt(),
                minus: Vector3::zeros(),
            }));
        }
    }
    if keep_minus {
        for v in fb.v_minus {
            out.push(Slot::Vertical(VerticalVector {
                plus: Vector3::zeros(),
                minus: v / t.t2.sqrt(),
            }));
        }
    }
    out
}

pub fn dist_dim(nu: Nu, side: Side) -> usize {
    let d = match nu {
        Nu::N1 => 6,
        Nu::N2 => 4,
        Nu::N3 => 2,
        Nu::N4 => 4,
    };
    match side {
        Side::Dist => d,
        Side::Perp => 8 - d,
    }
}

/// The trace form α(X) = Σ_l h((∇_{E_l}P)(E_l), X) over a G_t-orthonormal
/// basis of the distribution, evaluated on one complementary vector.
pub fn alpha_eval(
    geom: &PointGeometry,
    nu: Nu,
    side: Side,
    t: MetricParams,
    kappa: &TwistorPoint,
    c: &Slot,
) -> f64 {
    let basis = dist_basis(nu, side, kappa, t);
    let mut total = 0.0;
    for e in &basis {
        total += df(
            geom,
            &DFRequest {
                nu,
                t,
                kappa: *kappa,
                dir: *e,
                b: *e,
                c: *c,
            },
        );
    }
    total
}

/// α on the full complementary basis.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaForm {
    pub nu: u8,
    pub side: Side,
    pub values: Vec<f64>,
}

pub fn alpha_form(
    geom: &PointGeometry,
    nu: Nu,
    side: Side,
    t: MetricParams,
    kappa: &TwistorPoint,
) -> AlphaForm {
    let co_side = match side {
        Side::Dist => Side::Perp,
        Side::Perp => Side::Dist,
    };
    let co_basis = dist_basis(nu, co_side, kappa, t);
    let values = co_basis
        .iter()
        .map(|c| alpha_eval(geom, nu, side, t, kappa, c))
        .collect();
    AlphaForm {
        nu: nu.index(),
        side,
        values,
    }
}

/// Project an output slot onto the complement of the side's distribution
/// (the space the derivative of the structure actually lands in).
fn project_complement(nu: Nu, side: Side, kappa: &TwistorPoint, out: &OutSlot) -> OutSlot {
    let p = p_kappa(kappa);
    let (sp, sm) = nu.vertical_signs();
    // For A, B in 𝒟 the values lie in the (−1)-eigenspace and vice versa.
    let target = match side {
        Side::Dist => -1.0,
        Side::Perp => 1.0,
    };
    match out {
        OutSlot::Horizontal(z) => {
            OutSlot::Horizontal((z + p * z * target) * 0.5)
        }
        OutSlot::Vertical(w) => OutSlot::Vertical(VerticalVector {
            plus: w.plus * (0.5 * (1.0 + target * sp)),
            minus: w.minus * (0.5 * (1.0 + target * sm)),
        }),
    }
}

fn out_to_slot(out: &OutSlot) -> Slot {
    match out {
        OutSlot::Horizontal(z) => Slot::Horizontal(*z),
        OutSlot::Vertical(w) => Slot::Vertical(*w),
    }
}

/// Tangent vector of the distribution parametrized by (X, U):
/// (X^h + U) ± 𝒦_ν(X^h + U).
fn dist_vector(
    nu: Nu,
    side: Side,
    kappa: &TwistorPoint,
    x: &Vector4<f64>,
    u: &VerticalVector,
) -> TangentP {
    let base = TangentP {
        horizontal: *x,
        vertical: *u,
    };
    let sign = match side {
        Side::Dist => 1.0,
        Side::Perp => -1.0,
    };
    base.add(&k_nu(nu, kappa, &base).scale(sign))
}

struct Tuple {
    args: DistArgs,
    out_h: OutSlot,
    out_v: OutSlot,
}

fn draw_tuple(rng: &mut ChaCha8Rng, kappa: &TwistorPoint) -> Tuple {
    let unit4 = |rng: &mut ChaCha8Rng| sample::random_unit4(rng);
    let vert = |rng: &mut ChaCha8Rng| {
        let v = vertical_projection(
            kappa,
            &sample::random_vec3(rng),
            &sample::random_vec3(rng),
        );
        let n = (v.plus.norm_squared() + v.minus.norm_squared()).sqrt();
        if n > 1e-6 {
            VerticalVector {
                plus: v.plus / n,
                minus: v.minus / n,
            }
        } else {
            v
        }
    };
    Tuple {
        args: DistArgs {
            x: unit4(rng),
            u: vert(rng),
            y: unit4(rng),
            v: vert(rng),
        },
        out_h: OutSlot::Horizontal(unit4(rng)),
        out_v: OutSlot::Vertical(vert(rng)),
    }
}

fn daf(
    geom: &PointGeometry,
    nu: Nu,
    side: Side,
    kappa: &TwistorPoint,
    t: MetricParams,
    args: &DistArgs,
    out: &OutSlot,
) -> f64 {
    match side {
        Side::Dist => daf_plus(geom, nu, kappa, t, args, out),
        Side::Perp => daf_minus(geom, nu, kappa, t, args, out),
    }
}

/// Maximal identity defect of one Gil-Medrano condition over the sample
/// set.
pub fn condition_residual(
    samples: &SampleSet,
    nu: Nu,
    t: MetricParams,
    side: Side,
    condition: Condition,
    tuples: usize,
    tier: ToleranceTier,
) -> ConditionReport {
    let mut max_residual = 0.0f64;
    let mut witness = None;
    let mut count = 0usize;
    // Decouple the tuple stream from the fibre sampling so budgets can be
    // doubled independently.
    let tuple_seed = samples
        .seed
        .wrapping_mul(1099511628211)
        .wrapping_add(nu.index() as u64 * 1009 + cond_ix(condition) * 131 + side_ix(side));
    let mut rng = sample::rng(tuple_seed);

    for (geom, ks) in samples.geoms.iter().zip(&samples.kappas) {
        for kappa in ks {
            for tuple_index in 0..tuples {
                let tuple = draw_tuple(&mut rng, kappa);
                let swapped = DistArgs {
                    x: tuple.args.y,
                    u: tuple.args.v,
                    y: tuple.args.x,
                    v: tuple.args.u,
                };
                let residual = match condition {
                    Condition::F => {
                        let mut r = 0.0f64;
                        for out in [&tuple.out_h, &tuple.out_v] {
                            let d = daf(geom, nu, side, kappa, t, &tuple.args, out)
                                - daf(geom, nu, side, kappa, t, &swapped, out);
                            r = r.max(d.abs());
                        }
                        r
                    }
                    Condition::D1 => {
                        let mut r = 0.0f64;
                        for out in [&tuple.out_h, &tuple.out_v] {
                            let d = daf(geom, nu, side, kappa, t, &tuple.args, out)
                                + daf(geom, nu, side, kappa, t, &swapped, out);
                            r = r.max(d.abs());
                        }
                        r
                    }
                    Condition::D2 => {
                        if tuple_index == 0 {
                            alpha_form(geom, nu, side, t, kappa)
                                .values
                                .iter()
                                .fold(0.0f64, |m, v| m.max(v.abs()))
                        } else {
                            0.0
                        }
                    }
                    Condition::D3 => {
                        let m = dist_dim(nu, side) as f64;
                        let a_vec = dist_vector(nu, side, kappa, &tuple.args.x, &tuple.args.u);
                        let b_vec = dist_vector(nu, side, kappa, &tuple.args.y, &tuple.args.v);
                        let h_ab = g_t(t, &a_vec, &b_vec);
                        let mut r = 0.0f64;
                        for out in [&tuple.out_h, &tuple.out_v] {
                            let c_proj = project_complement(nu, side, kappa, out);
                            let sym = daf(geom, nu, side, kappa, t, &tuple.args, &c_proj)
                                + daf(geom, nu, side, kappa, t, &swapped, &c_proj);
                            let alpha =
                                alpha_eval(geom, nu, side, t, kappa, &out_to_slot(&c_proj));
                            r = r.max((sym - (2.0 / m) * h_ab * alpha).abs());
                        }
                        r
                    }
                };
                count += 1;
                if residual > max_residual {
                    max_residual = residual;
                    witness = Some(Witness {
                        base_point: geom.point,
                        y_plus: [kappa.y_plus[0], kappa.y_plus[1], kappa.y_plus[2]],
                        y_minus: [kappa.y_minus[0], kappa.y_minus[1], kappa.y_minus[2]],
                        tuple_index,
                    });
                }
            }
        }
    }

    ConditionReport {
        condition,
        side,
        nu: nu.index(),
        max_residual,
        samples: count,
        verdict: verdict_of(max_residual, tier),
        witness,
    }
}

fn cond_ix(c: Condition) -> u64 {
    match c {
        Condition::F => 0,
        Condition::D1 => 1,
        Condition::D2 => 2,
        Condition::D3 => 3,
    }
}

fn side_ix(s: Side) -> u64 {
    match s {
        Side::Dist => 0,
        Side::Perp => 1,
    }
}

/// Naveira class labels emitted by the verification theorems; anything
/// outside those verdict patterns is reported unclassified with the raw
/// pattern attached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum NaveiraLabel {
    W1W2W4W5,
    W1W4W5,
    W1W4,
    W4W5,
    W4,
    Unclassified,
}

impl fmt::Display for NaveiraLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NaveiraLabel::W1W2W4W5 => "W1⊕W2⊕W4⊕W5",
            NaveiraLabel::W1W4W5 => "W1⊕W4⊕W5",
            NaveiraLabel::W1W4 => "W1⊕W4",
            NaveiraLabel::W4W5 => "W4⊕W5",
            NaveiraLabel::W4 => "W4",
            NaveiraLabel::Unclassified => "unclassified",
        };
        write!(f, "{s}")
    }
}

fn infer_label(reports: &[ConditionReport]) -> NaveiraLabel {
    let verdict = |c: Condition, s: Side| -> Option<bool> {
        reports
            .iter()
            .find(|r| r.condition == c && r.side == s)
            .and_then(|r| match r.verdict {
                Verdict::Holds => Some(true),
                Verdict::Fails => Some(false),
                Verdict::Inconclusive => None,
            })
    };
    let (Some(f_d), Some(d1_d), Some(d2_d), Some(d1_p), Some(d2_p)) = (
        verdict(Condition::F, Side::Dist),
        verdict(Condition::D1, Side::Dist),
        verdict(Condition::D2, Side::Dist),
        verdict(Condition::D1, Side::Perp),
        verdict(Condition::D2, Side::Perp),
    ) else {
        return NaveiraLabel::Unclassified;
    };
    if !(d2_d && d2_p) {
        return NaveiraLabel::Unclassified;
    }
    match (f_d, d1_d, d1_p) {
        (true, true, true) => NaveiraLabel::W4,
        (true, true, false) => NaveiraLabel::W4W5,
        (false, true, true) => NaveiraLabel::W1W4,
        (false, true, false) => NaveiraLabel::W1W4W5,
        (false, false, _) => NaveiraLabel::W1W2W4W5,
        (true, false, _) => NaveiraLabel::Unclassified,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometricSummary {
    pub dist_integrable: Option<bool>,
    pub dist_totally_geodesic: Option<bool>,
    pub dist_minimal: Option<bool>,
    pub perp_integrable: Option<bool>,
    pub perp_totally_geodesic: Option<bool>,
    pub perp_minimal: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub chart_id: String,
    pub nu: u8,
    pub t1: f64,
    pub t2: f64,
    pub tier: ToleranceTier,
    pub seed: u64,
    pub reports: Vec<ConditionReport>,
    pub label: String,
    pub pattern: String,
    pub geometric: GeometricSummary,
    pub d1_iff_d2_d3_consistent: bool,
}

impl ClassReport {
    pub fn label_enum(&self) -> NaveiraLabel {
        infer_label(&self.reports)
    }
}

/// Run all eight condition reports and infer the class label; inconclusive
/// verdicts get one budget doubling before they stand.
pub fn classify_with_samples(
    samples: &SampleSet,
    nu: Nu,
    t: MetricParams,
    cfg: &SampleConfig,
    tier: ToleranceTier,
) -> ClassReport {
    let mut reports = Vec::with_capacity(8);
    for side in [Side::Dist, Side::Perp] {
        for condition in [Condition::F, Condition::D1, Condition::D2, Condition::D3] {
            let mut rep = condition_residual(samples, nu, t, side, condition, cfg.tuples, tier);
            if rep.verdict == Verdict::Inconclusive {
                rep = condition_residual(samples, nu, t, side, condition, cfg.tuples * 2, tier);
            }
            reports.push(rep);
        }
    }

    let verdict = |c: Condition, s: Side| -> Verdict {
        reports
            .iter()
            .find(|r| r.condition == c && r.side == s)
            .map(|r| r.verdict)
            .unwrap()
    };
    let as_bool = |v: Verdict| match v {
        Verdict::Holds => Some(true),
        Verdict::Fails => Some(false),
        Verdict::Inconclusive => None,
    };
    // D₁ ⟺ D₂ ∧ D₃ must be reflected in the verdicts.
    let mut d1_consistent = true;
    for side in [Side::Dist, Side::Perp] {
        if verdict(Condition::D1, side) == Verdict::Holds {
            d1_consistent &= verdict(Condition::D2, side) == Verdict::Holds
                && verdict(Condition::D3, side) == Verdict::Holds;
        }
    }

    let label = infer_label(&reports);
    let pattern = reports
        .iter()
        .map(|r| {
            format!(
                "{:?}({:?},{:?})={:?}",
                r.condition, r.side, r.nu, r.verdict
            )
        })
        .collect::<Vec<_>>()
        .join(";");
    let geometric = GeometricSummary {
        dist_integrable: as_bool(verdict(Condition::F, Side::Dist)),
        dist_totally_geodesic: as_bool(verdict(Condition::D1, Side::Dist)),
        dist_minimal: as_bool(verdict(Condition::D2, Side::Dist)),
        perp_integrable: as_bool(verdict(Condition::F, Side::Perp)),
        perp_totally_geodesic: as_bool(verdict(Condition::D1, Side::Perp)),
        perp_minimal: as_bool(verdict(Condition::D2, Side::Perp)),
    };

    ClassReport {
        chart_id: samples.chart_id.clone(),
        nu: nu.index(),
        t1: t.t1,
        t2: t.t2,
        tier,
        seed: samples.seed,
        reports,
        label: label.to_string(),
        pattern,
        geometric,
        d1_iff_d2_d3_consistent: d1_consistent,
    }
}

pub fn classify(
    chart: &MetricChart,
    nu: Nu,
    t: MetricParams,
    cfg: &SampleConfig,
    tier: ToleranceTier,
) -> Result<ClassReport> {
    cfg.validate()?;
    let samples = build_samples(chart, cfg.base_points, cfg.kappas_per_point, cfg.seed)?;
    Ok(classify_with_samples(&samples, nu, t, cfg, tier))
}

/// Which fibre scale the critical search varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TParam {
    T1,
    T2,
    Equal,
}

impl TParam {
    fn metric(self, v: f64) -> MetricParams {
        match self {
            TParam::T1 => MetricParams::new(v, 1.0),
            TParam::T2 => MetricParams::new(1.0, v),
            TParam::Equal => MetricParams::new(v, v),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalT {
    pub nu: u8,
    pub side: Side,
    pub param: TParam,
    pub t_star: f64,
    pub residual_at_t_star: f64,
    pub curve: Vec<(f64, f64)>,
    pub six_over_s: Option<f64>,
    pub three_over_8chi: Option<f64>,
    /// Which published expression the found value matches (up to 1e-3
    /// relative), if any.
    pub matches: Vec<String>,
}

/// Locate the fibre scale at which the D₁ residual of the chosen
/// distribution vanishes, by golden-section search on an Einstein chart
/// with positive scalar curvature.
pub fn critical_t_search(
    chart: &MetricChart,
    nu: Nu,
    side: Side,
    param: TParam,
    interval: (f64, f64),
    seed: u64,
) -> Result<CriticalT> {
    let tier = ToleranceTier::for_chart(chart);
    let samples = build_samples(chart, 6, 3, seed)?;

    // Einstein with s > 0 is a precondition for a critical value to exist.
    let mut scalar_sum = 0.0;
    let mut const_curv = true;
    for geom in &samples.geoms {
        let dec = &geom.decomposition;
        if !dec.is_einstein(100.0 * tier.tol()) || dec.scalar <= 0.0 {
            return Err(Error::NotEinsteinPositive(chart.id.clone()));
        }
        const_curv &= dec.is_constant_curvature(100.0 * tier.tol());
        scalar_sum += dec.scalar;
    }
    let s_mean = scalar_sum / samples.geoms.len() as f64;

    let objective = |tv: f64| -> f64 {
        let t = param.metric(tv);
        condition_residual(&samples, nu, t, side, Condition::D1, 6, tier).max_residual
    };

    let (lo, hi) = interval;
    assert!(lo > 0.0 && hi > lo);
    let curve: Vec<(f64, f64)> = (0..17)
        .map(|i| {
            let tv = lo + (hi - lo) * i as f64 / 16.0;
            (tv, objective(tv))
        })
        .collect();
    let flat_level = curve.iter().fold(0.0f64, |m, (_, r)| m.max(*r));
    if flat_level < tier.tol() {
        return Err(Error::DegenerateFlatObjective);
    }

    // Golden-section minimization of the residual.
    const PHI_COMP: f64 = 0.381_966_011_250_105;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = a + PHI_COMP * (b - a);
    let mut x2 = b - PHI_COMP * (b - a);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    for _ in 0..80 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + PHI_COMP * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - PHI_COMP * (b - a);
            f2 = objective(x2);
        }
        if (b - a).abs() < 1e-12 * (1.0 + b.abs()) {
            break;
        }
    }
    let (t_star, residual) = if f1 < f2 { (x1, f1) } else { (x2, f2) };

    let span = hi - lo;
    if residual > tier.tol()
        || (t_star - lo).abs() < 1e-3 * span
        || (hi - t_star).abs() < 1e-3 * span
    {
        return Err(Error::NoInteriorMinimum { lo, hi });
    }

    let six_over_s = Some(6.0 / s_mean);
    let three_over_8chi = if const_curv {
        let chi = s_mean / 12.0;
        Some(3.0 / (8.0 * chi))
    } else {
        None
    };
    let mut matches = Vec::new();
    if let Some(v) = six_over_s {
        if (t_star - v).abs() < 1e-3 * v {
            matches.push("6/s".to_string());
        }
    }
    if let Some(v) = three_over_8chi {
        if (t_star - v).abs() < 1e-3 * v {
            matches.push("3/(8chi)".to_string());
        }
    }

    Ok(CriticalT {
        nu: nu.index(),
        side,
        param,
        t_star,
        residual_at_t_star: residual,
        curve,
        six_over_s,
        three_over_8chi,
        matches,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremRow {
    pub id: String,
    pub chart: String,
    pub nu: Option<u8>,
    pub description: String,
    pub passed: bool,
    pub residual: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremTable {
    pub rows: Vec<TheoremRow>,
}

impl TheoremTable {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

/// The class label predicted by the theorems from a chart's verified
/// properties, a structure index, and the fibre scales.
fn expected_label(
    const_curv: bool,
    positive_einstein: bool,
    sd: bool,
    asd: bool,
    t_crit: f64,
    nu: Nu,
    t: MetricParams,
) -> NaveiraLabel {
    let close = |a: f64, b: f64| (a - b).abs() < 1e-9 * (1.0 + b.abs());
    let cc = const_curv && positive_einstein;
    let f_d = nu == Nu::N3 && const_curv;
    let d1_d = match nu {
        Nu::N1 => cc && close(t.t1, t_crit) && close(t.t2, t_crit),
        Nu::N2 => asd && positive_einstein && close(t.t1, t_crit),
        Nu::N3 => true,
        Nu::N4 => sd && positive_einstein && close(t.t2, t_crit),
    };
    let d1_p = match nu {
        Nu::N1 => true,
        Nu::N2 => sd && positive_einstein && close(t.t2, t_crit),
        Nu::N3 => cc && close(t.t1, t_crit) && close(t.t2, t_crit),
        Nu::N4 => asd && positive_einstein && close(t.t1, t_crit),
    };
    match (f_d, d1_d, d1_p) {
        (true, true, true) => NaveiraLabel::W4,
        (true, true, false) => NaveiraLabel::W4W5,
        (false, true, true) => NaveiraLabel::W1W4,
        (false, true, false) => NaveiraLabel::W1W4W5,
        (false, false, _) => NaveiraLabel::W1W2W4W5,
        (true, false, _) => NaveiraLabel::Unclassified,
    }
}

/// Numerically check every clause of the verification theorems on the
/// provided charts, including the class labels.
pub fn verify_theorems(
    entries: &[CatalogEntry],
    t_grid: &[f64],
    seed: u64,
) -> Result<TheoremTable> {
    let mut rows = Vec::new();
    let cfg = SampleConfig::standard(seed);

    for entry in entries {
        let chart = &entry.chart;
        let tier = ToleranceTier::for_chart(chart);
        let samples = build_samples(chart, cfg.base_points, cfg.kappas_per_point, seed)?;
        let const_curv = entry.props.constant_curvature.is_some();
        let positive_einstein = entry.props.einstein
            && entry.props.scalar.map(|s| s > 0.0).unwrap_or(false);
        let s_mean =
            samples.geoms.iter().map(|g| g.scalar).sum::<f64>() / samples.geoms.len() as f64;
        let t_crit = if positive_einstein { 6.0 / s_mean } else { f64::NAN };
        let expect_label = |nu: Nu, t: MetricParams| {
            expected_label(
                const_curv,
                positive_einstein,
                entry.props.self_dual,
                entry.props.anti_self_dual,
                t_crit,
                nu,
                t,
            )
        };

        for &tv in t_grid {
            let t = MetricParams::new(tv, 1.3 * tv);
            for nu in ALL_NU {
                let f_d = condition_residual(&samples, nu, t, Side::Dist, Condition::F, cfg.tuples, tier);
                let d1_d =
                    condition_residual(&samples, nu, t, Side::Dist, Condition::D1, cfg.tuples, tier);
                let d2_d =
                    condition_residual(&samples, nu, t, Side::Dist, Condition::D2, cfg.tuples, tier);
                let f_p = condition_residual(&samples, nu, t, Side::Perp, Condition::F, cfg.tuples, tier);
                let d1_p =
                    condition_residual(&samples, nu, t, Side::Perp, Condition::D1, cfg.tuples, tier);
                let d2_p =
                    condition_residual(&samples, nu, t, Side::Perp, Condition::D2, cfg.tuples, tier);
                let d3_d =
                    condition_residual(&samples, nu, t, Side::Dist, Condition::D3, cfg.tuples, tier);
                let d3_p =
                    condition_residual(&samples, nu, t, Side::Perp, Condition::D3, cfg.tuples, tier);
                let label = infer_label(&[
                    f_d.clone(),
                    d1_d.clone(),
                    d2_d.clone(),
                    d3_d,
                    f_p.clone(),
                    d1_p.clone(),
                    d2_p.clone(),
                    d3_p,
                ]);
                let expected = expect_label(nu, t);
                rows.push(TheoremRow {
                    id: "naveira-class".into(),
                    chart: chart.id.clone(),
                    nu: Some(nu.index()),
                    description: format!("class label at t=({:.3},{:.3})", t.t1, t.t2),
                    passed: label == expected,
                    residual: 0.0,
                    detail: format!("expected {expected}, inferred {label}"),
                });

                // Non-integrability of the distribution for ν = 1,2,4.
                if nu != Nu::N3 {
                    rows.push(TheoremRow {
                        id: "dist-not-integrable".into(),
                        chart: chart.id.clone(),
                        nu: Some(nu.index()),
                        description: "distribution is not integrable".into(),
                        passed: f_d.verdict == Verdict::Fails,
                        residual: f_d.max_residual,
                        detail: format!("t=({:.3},{:.3})", t.t1, t.t2),
                    });
                }
                // Integrability of the third distribution on constant
                // curvature only.
                if nu == Nu::N3 {
                    let expect = const_curv;
                    let got = f_d.verdict == Verdict::Holds;
                    rows.push(TheoremRow {
                        id: "third-integrable-iff-constant-curvature".into(),
                        chart: chart.id.clone(),
                        nu: Some(3),
                        description: "third distribution integrable iff constant curvature".into(),
                        passed: got == expect && f_d.verdict != Verdict::Inconclusive,
                        residual: f_d.max_residual,
                        detail: format!("expected holds = {expect}"),
                    });
                }
                // Minimality of everything.
                rows.push(TheoremRow {
                    id: "dist-minimal".into(),
                    chart: chart.id.clone(),
                    nu: Some(nu.index()),
                    description: "distribution is minimal".into(),
                    passed: d2_d.verdict == Verdict::Holds,
                    residual: d2_d.max_residual,
                    detail: String::new(),
                });
                rows.push(TheoremRow {
                    id: "perp-minimal".into(),
                    chart: chart.id.clone(),
                    nu: Some(nu.index()),
                    description: "complement is minimal".into(),
                    passed: d2_p.verdict == Verdict::Holds,
                    residual: d2_p.max_residual,
                    detail: String::new(),
                });
                // Totally geodesic distributions independent of t.
                if nu == Nu::N3 {
                    rows.push(TheoremRow {
                        id: "third-totally-geodesic".into(),
                        chart: chart.id.clone(),
                        nu: Some(3),
                        description: "third distribution is totally geodesic".into(),
                        passed: d1_d.verdict == Verdict::Holds,
                        residual: d1_d.max_residual,
                        detail: format!("t=({:.3},{:.3})", t.t1, t.t2),
                    });
                }
                if nu == Nu::N1 {
                    rows.push(TheoremRow {
                        id: "first-perp-totally-geodesic".into(),
                        chart: chart.id.clone(),
                        nu: Some(1),
                        description: "first complement is totally geodesic".into(),
                        passed: d1_p.verdict == Verdict::Holds,
                        residual: d1_p.max_residual,
                        detail: format!("t=({:.3},{:.3})", t.t1, t.t2),
                    });
                }
                // Non-integrability of the complements for ν = 2,3,4 and
                // the constant-curvature dichotomy for ν = 1.
                if nu == Nu::N1 {
                    let expect = const_curv;
                    let got = f_p.verdict == Verdict::Holds;
                    rows.push(TheoremRow {
                        id: "first-perp-integrable-iff-constant-curvature".into(),
                        chart: chart.id.clone(),
                        nu: Some(1),
                        description: "first complement integrable iff constant curvature".into(),
                        passed: got == expect && f_p.verdict != Verdict::Inconclusive,
                        residual: f_p.max_residual,
                        detail: format!("expected holds = {expect}"),
                    });
                } else {
                    rows.push(TheoremRow {
                        id: "perp-not-integrable".into(),
                        chart: chart.id.clone(),
                        nu: Some(nu.index()),
                        description: "complement is not integrable".into(),
                        passed: f_p.verdict == Verdict::Fails,
                        residual: f_p.max_residual,
                        detail: String::new(),
                    });
                }
                // Off-critical t: no total geodesy for ν = 1,2,4 unless the
                // chart and scales sit on a critical configuration, which
                // the generic grid avoids.
                if nu != Nu::N3 && !positive_einstein {
                    rows.push(TheoremRow {
                        id: "dist-critical-scale".into(),
                        chart: chart.id.clone(),
                        nu: Some(nu.index()),
                        description: "no totally geodesic distribution off the Einstein case".into(),
                        passed: d1_d.verdict == Verdict::Fails,
                        residual: d1_d.max_residual,
                        detail: format!("t=({:.3},{:.3})", t.t1, t.t2),
                    });
                }
            }
        }

        // Critical-scale clauses on the Einstein charts, using the
        // measured scalar curvature rather than the catalog claim.
        if positive_einstein {
            // Class labels at the critical scales.
            for (nu, param) in [
                (Nu::N1, TParam::Equal),
                (Nu::N2, TParam::T1),
                (Nu::N3, TParam::Equal),
                (Nu::N4, TParam::T2),
            ] {
                let t = param.metric(t_crit);
                let rep = classify_with_samples(&samples, nu, t, &cfg, tier);
                let expected = expect_label(nu, t);
                rows.push(TheoremRow {
                    id: "naveira-class-critical".into(),
                    chart: chart.id.clone(),
                    nu: Some(nu.index()),
                    description: format!(
                        "class label at the critical scale ({:?} = {t_crit:.6})",
                        param
                    ),
                    passed: rep.label == expected.to_string(),
                    residual: 0.0,
                    detail: format!("expected {expected}, inferred {}", rep.label),
                });
            }
            let crit_rows: Vec<(Nu, Side, TParam, bool)> = match (
                entry.props.anti_self_dual,
                entry.props.self_dual,
            ) {
                (true, true) => vec![
                    (Nu::N1, Side::Dist, TParam::Equal, true),
                    (Nu::N2, Side::Dist, TParam::T1, true),
                    (Nu::N4, Side::Dist, TParam::T2, true),
                    (Nu::N3, Side::Perp, TParam::Equal, true),
                    (Nu::N2, Side::Perp, TParam::T2, true),
                    (Nu::N4, Side::Perp, TParam::T1, true),
                ],
                (false, true) => vec![
                    (Nu::N4, Side::Dist, TParam::T2, true),
                    (Nu::N2, Side::Dist, TParam::T1, false),
                    (Nu::N2, Side::Perp, TParam::T2, true),
                    (Nu::N4, Side::Perp, TParam::T1, false),
                ],
                (true, false) => vec![
                    (Nu::N2, Side::Dist, TParam::T1, true),
                    (Nu::N4, Side::Dist, TParam::T2, false),
                    (Nu::N4, Side::Perp, TParam::T1, true),
                    (Nu::N2, Side::Perp, TParam::T2, false),
                ],
                (false, false) => vec![],
            };
            let tier = ToleranceTier::for_chart(chart);
            for (nu, side, param, works) in crit_rows {
                let t = param.metric(t_crit);
                let d1 = condition_residual(&samples, nu, t, side, Condition::D1, cfg.tuples, tier);
                let expected = if works { Verdict::Holds } else { Verdict::Fails };
                rows.push(TheoremRow {
                    id: if side == Side::Dist {
                        "dist-critical-scale".into()
                    } else {
                        "perp-critical-scale".into()
                    },
                    chart: chart.id.clone(),
                    nu: Some(nu.index()),
                    description: format!(
                        "total geodesy at the critical scale 6/s = {t_crit:.6} ({:?})",
                        param
                    ),
                    passed: d1.verdict == expected,
                    residual: d1.max_residual,
                    detail: format!("expected {:?}", expected),
                });
            }
        }
    }

    Ok(TheoremTable { rows })
}
