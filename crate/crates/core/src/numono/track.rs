//! Monodromy of the projection `(x, y) ↦ x` of a plane curve `p(x, y) = 0`.
//!
//! Critical values come from the exact resultant `Res_y(p, ∂p/∂y)`. From a
//! base point outside all of them, each critical value gets a loop made of
//! a straight segment, a small counterclockwise circle and the segment back;
//! the `d` roots in `y` are continued along it and the permutation is read
//! off by matching the end fiber to the start fiber. A large circle around
//! everything gives the cycle at infinity, and the product relation between
//! all cycles is checked exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::poly::{PlanePolynomial, QPoly};
use super::resultant::discriminant_resultant;
use super::roots::{aberth, min_separation, polish, relative_residual, sort_lex};
use super::NumonoError;
use crate::cover::{BranchedCover, CoverFile};
use crate::fiber::{FiberAnalysis, SdOutcome};
use crate::perm::{factorial, Permutation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "angle", rename_all = "snake_case")]
pub enum BasePointStrategy {
    /// To the right of all critical values, rotated about their center by
    /// the smallest angle that keeps every segment clear of the other
    /// critical values.
    Right,
    /// At a fixed angle (radians) about the center of the critical values.
    Angle(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackingConfig {
    /// Mantissa bits of the arithmetic used for tracking. Only 53 (f64) is
    /// implemented; a refined retry tightens tolerances instead.
    pub working_precision_bits: u32,
    /// Root convergence and critical-value separation tolerance.
    pub tolerance: f64,
    /// A step is accepted only if each root moves less than the minimum
    /// root separation divided by this factor.
    pub safety_factor: f64,
    pub max_refinement_depth: u32,
    /// Steps per path piece before adaptive refinement.
    pub initial_steps: usize,
    pub base_point: BasePointStrategy,
}

impl Default for TrackingConfig {
    fn default() -> Self {
        TrackingConfig {
            working_precision_bits: 53,
            tolerance: 1e-10,
            safety_factor: 3.0,
            max_refinement_depth: 40,
            initial_steps: 64,
            base_point: BasePointStrategy::Right,
        }
    }
}

impl TrackingConfig {
    pub fn validate(&self) -> Result<(), NumonoError> {
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(NumonoError::InvalidConfig("tolerance must be positive"));
        }
        if !(self.safety_factor > 1.0) {
            return Err(NumonoError::InvalidConfig("safety factor must exceed 1"));
        }
        if self.initial_steps == 0 {
            return Err(NumonoError::InvalidConfig("initial steps must be positive"));
        }
        Ok(())
    }

    fn refined(&self) -> TrackingConfig {
        TrackingConfig {
            working_precision_bits: self.working_precision_bits * 2,
            tolerance: (self.tolerance * 1e-3).max(1e-15),
            safety_factor: self.safety_factor * 2.0,
            initial_steps: self.initial_steps * 4,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalValue {
    pub re: f64,
    pub im: f64,
    /// Relative residual of the resultant at the computed root.
    pub residual: f64,
    /// The leading `y`-coefficient vanishes here: a fiber point escapes to
    /// infinity.
    pub leading_coefficient_vanishes: bool,
}

impl CriticalValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSet {
    pub resultant: QPoly,
    /// Sorted by real part, then imaginary part.
    pub values: Vec<CriticalValue>,
}

/// Critical values of the projection to `x`, with exact genericity and
/// smoothness gates.
pub fn critical_values(p: &PlanePolynomial, cfg: &TrackingConfig) -> Result<CriticalSet, NumonoError> {
    cfg.validate()?;
    let resultant = discriminant_resultant(p);
    if resultant.is_zero() {
        return Err(NumonoError::NotSquarefree);
    }
    if !resultant.is_squarefree() {
        return Err(classify_repeated_root(p, &resultant, cfg));
    }
    let coeffs = resultant.to_complex();
    let mut roots = if resultant.degree() == Some(0) {
        Vec::new()
    } else {
        aberth(&coeffs, None, 1e-15, 2000)
            .ok_or_else(|| NumonoError::RootFinding("critical values did not converge".into()))?
    };
    for r in roots.iter_mut() {
        *r = polish(&coeffs, *r);
        if r.im.abs() < cfg.tolerance * (1.0 + r.re.abs()) {
            r.im = 0.0;
        }
    }
    sort_lex(&mut roots);
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    if min_separation(&roots) <= cfg.tolerance * scale {
        return Err(NumonoError::NonGenericProjection(
            "critical values closer than the tolerance".into(),
        ));
    }
    let d = p.degree_y().unwrap();
    let lead = p.y_coefficient(d);
    let lead_c = lead.to_complex();
    let values = roots
        .iter()
        .map(|&r| CriticalValue {
            re: r.re,
            im: r.im,
            residual: relative_residual(&coeffs, r),
            leading_coefficient_vanishes: lead.degree().unwrap_or(0) > 0
                && relative_residual(&lead_c, r) < 1e-8,
        })
        .collect();
    Ok(CriticalSet { resultant, values })
}

/// The discriminant has a repeated root: either the curve is singular
/// there or the projection is not generic.
fn classify_repeated_root(p: &PlanePolynomial, resultant: &QPoly, cfg: &TrackingConfig) -> NumonoError {
    let repeated = resultant.gcd(&resultant.derivative());
    let coeffs = repeated.to_complex();
    let Some(xs) = aberth(&coeffs, None, 1e-15, 2000) else {
        return NumonoError::NonGenericProjection("discriminant has a repeated root".into());
    };
    let px = p.derivative_x();
    let py = p.derivative_y();
    for x0 in xs {
        let x0 = polish(&coeffs, x0);
        let fiber = p.eval_y_coeffs(x0);
        let Some(ys) = aberth(&fiber, None, 1e-15, 2000) else {
            continue;
        };
        for y0 in ys {
            let scale = 1.0 + x0.norm() + y0.norm();
            let tol = cfg.tolerance.sqrt() * scale.powi(p.degree_y().unwrap_or(1) as i32);
            if p.eval(x0, y0).norm() < tol && px.eval(x0, y0).norm() < tol && py.eval(x0, y0).norm() < tol
            {
                return NumonoError::SingularCurve {
                    x: [x0.re, x0.im],
                    y: [y0.re, y0.im],
                };
            }
        }
    }
    NumonoError::NonGenericProjection(format!(
        "discriminant has repeated roots (factor {repeated}): a critical fiber is not a simple tangency"
    ))
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Line { from: Complex64, to: Complex64 },
    Arc { center: Complex64, radius: f64, start: f64, sweep: f64 },
}

impl Piece {
    fn at(&self, t: f64) -> Complex64 {
        match *self {
            Piece::Line { from, to } => from + (to - from) * t,
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + Complex64::from_polar(radius, start + sweep * t),
        }
    }
}

#[derive(Debug, Clone)]
struct Geometry {
    center: Complex64,
    big_radius: f64,
    theta: f64,
    base: Complex64,
    radii: Vec<f64>,
    /// Smallest `dist(c_k, segment to c_m) / (distance from c_k to its
    /// nearest neighbor)`, in `[0, 1]`.
    margin: f64,
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * ab.conj()).re / len2;
    (p - (a + ab * t.clamp(0.0, 1.0))).norm()
}

impl Geometry {
    fn at_angle(crit: &[Complex64], center: Complex64, big_radius: f64, theta: f64) -> Geometry {
        let base = center + Complex64::from_polar(big_radius, theta);
        let mut radii = Vec::with_capacity(crit.len());
        let mut margin = f64::INFINITY;
        for (k, &c) in crit.iter().enumerate() {
            let mut nearest = (base - c).norm();
            let mut clearance = f64::INFINITY;
            for (m, &o) in crit.iter().enumerate() {
                if m != k {
                    nearest = nearest.min((o - c).norm());
                    clearance = clearance.min(point_segment_distance(c, base, o));
                }
            }
            // the circle around c_k stays clear of every other critical
            // value and of every other loop's segment
            radii.push(0.5 * nearest.min(clearance));
            margin = margin.min(clearance / nearest);
        }
        Geometry {
            center,
            big_radius,
            theta,
            base,
            radii,
            margin,
        }
    }

    fn entry(&self, crit: &[Complex64], k: usize) -> Complex64 {
        let c = crit[k];
        c + (self.base - c) / (self.base - c).norm() * self.radii[k]
    }

    /// Position of `c_k` in the sweep around the base point, measured from
    /// the direction pointing back at the center.
    fn sweep_angle(&self, c: Complex64) -> f64 {
        let rel = (c - self.base).arg() - (self.theta + PI);
        let mut a = rel % (2.0 * PI);
        if a <= -PI {
            a += 2.0 * PI;
        } else if a > PI {
            a -= 2.0 * PI;
        }
        a
    }
}

const PREFERRED_MARGIN: f64 = 0.25;
const MIN_MARGIN: f64 = 1e-3;

fn choose_geometry(crit: &[Complex64], strategy: BasePointStrategy) -> Result<Geometry, NumonoError> {
    let (center, big_radius) = if crit.is_empty() {
        (Complex64::zero(), 1.0)
    } else {
        let (mut lo_re, mut hi_re, mut lo_im, mut hi_im) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for c in crit {
            lo_re = lo_re.min(c.re);
            hi_re = hi_re.max(c.re);
            lo_im = lo_im.min(c.im);
            hi_im = hi_im.max(c.im);
        }
        let center = Complex64::new(0.5 * (lo_re + hi_re), 0.5 * (lo_im + hi_im));
        let spread = (hi_re - lo_re).max(hi_im - lo_im);
        (center, (hi_re - center.re) + 1.0 + spread)
    };
    match strategy {
        BasePointStrategy::Angle(theta) => {
            let g = Geometry::at_angle(crit, center, big_radius, theta);
            if crit.len() > 1 && g.margin <= MIN_MARGIN {
                return Err(NumonoError::BadBasePoint(format!(
                    "at angle {theta} a loop segment runs into another critical value"
                )));
            }
            Ok(g)
        }
        BasePointStrategy::Right => {
            let mut best: Option<(f64, Geometry)> = None;
            for k in 0..64 {
                let step = (k + 1) / 2;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                let theta = sign * step as f64 * PI / 32.0;
                let g = Geometry::at_angle(crit, center, big_radius, theta);
                let m = g.margin;
                if m >= PREFERRED_MARGIN {
                    return Ok(g);
                }
                if best.as_ref().is_none_or(|(bm, _)| m > *bm) {
                    best = Some((m, g));
                }
            }
            match best {
                Some((m, g)) if m > MIN_MARGIN => Ok(g),
                _ => Err(NumonoError::BadBasePoint(
                    "no base direction keeps the loops apart".into(),
                )),
            }
        }
    }
}

/// Continues the fiber along `piece`, with labels following the roots.
fn track_piece(
    p: &PlanePolynomial,
    piece: Piece,
    roots: Vec<Complex64>,
    cfg: &TrackingConfig,
) -> Result<Vec<Complex64>, f64> {
    let h_max = 1.0 / cfg.initial_steps as f64;
    let h_min = h_max / 2f64.powi(cfg.max_refinement_depth as i32);
    let mut t = 0.0;
    let mut h = h_max;
    let mut current = roots;
    while t < 1.0 {
        let step = h.min(1.0 - t);
        let x = piece.at(t + step);
        let coeffs = p.eval_y_coeffs(x);
        let accepted = aberth(&coeffs, Some(&current), cfg.tolerance, 200)
            .and_then(|cand| match_roots(&current, &cand, cfg.safety_factor));
        match accepted {
            Some(next) => {
                current = next;
                t += step;
                h = (h * 2.0).min(h_max);
            }
            None => {
                h *= 0.5;
                if h < h_min {
                    return Err(t);
                }
            }
        }
    }
    Ok(current)
}

/// Nearest-neighbor matching of `cand` to `prev`. Returns `cand` reordered
/// to follow `prev`'s labels, or `None` when some root moved too far or the
/// matching is not a bijection.
fn match_roots(prev: &[Complex64], cand: &[Complex64], safety: f64) -> Option<Vec<Complex64>> {
    if prev.len() != cand.len() {
        return None;
    }
    let limit = min_separation(prev) / safety;
    let mut used = vec![false; cand.len()];
    let mut out = Vec::with_capacity(prev.len());
    for &z in prev {
        let (j, dist) = cand
            .iter()
            .enumerate()
            .map(|(j, &w)| (j, (w - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        if used[j] || !(dist < limit) {
            return None;
        }
        used[j] = true;
        out.push(cand[j]);
    }
    Some(out)
}

fn loop_pieces(geom: &Geometry, crit: &[Complex64], k: usize) -> Vec<Piece> {
    let c = crit[k];
    let e = geom.entry(crit, k);
    let start = (e - c).arg();
    vec![
        Piece::Line {
            from: geom.base,
            to: e,
        },
        Piece::Arc {
            center: c,
            radius: geom.radii[k],
            start,
            sweep: 2.0 * PI,
        },
        Piece::Line {
            from: e,
            to: geom.base,
        },
    ]
}

fn big_circle(geom: &Geometry) -> Vec<Piece> {
    vec![Piece::Arc {
        center: geom.center,
        radius: geom.big_radius,
        start: geom.theta,
        sweep: 2.0 * PI,
    }]
}

/// Permutation `i ↦ j` where root `i` of the base fiber ends at root `j`.
fn loop_permutation(
    p: &PlanePolynomial,
    pieces: &[Piece],
    base_fiber: &[Complex64],
    cfg: &TrackingConfig,
    loop_index: usize,
) -> Result<Permutation, NumonoError> {
    let mut roots = base_fiber.to_vec();
    for (n, piece) in pieces.iter().enumerate() {
        roots = track_piece(p, *piece, roots, cfg).map_err(|t| NumonoError::TrackingAmbiguity {
            loop_index,
            piece: n,
            t,
        })?;
    }
    let limit = min_separation(base_fiber) / cfg.safety_factor;
    let mut images = Vec::with_capacity(roots.len());
    for z in &roots {
        let (j, dist) = base_fiber
            .iter()
            .enumerate()
            .map(|(j, &w)| (j, (w - z).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty fiber");
        if !(dist < limit) {
            return Err(NumonoError::TrackingAmbiguity {
                loop_index,
                piece: pieces.len(),
                t: 1.0,
            });
        }
        images.push(j as u32);
    }
    Permutation::from_images(images).map_err(|_| NumonoError::TrackingAmbiguity {
        loop_index,
        piece: pieces.len(),
        t: 1.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenericityReport {
    pub simple_discriminant_roots: bool,
    pub leading_coefficient_constant: bool,
    pub finite_cycles_transpositions: bool,
    pub infinity_trivial: bool,
    pub infinity_transposition: bool,
    /// Loops with trivial monodromy; they are left out of the assembled cover.
    pub trivial_loops: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct MonodromyResult {
    pub polynomial: PlanePolynomial,
    pub degree: usize,
    pub resultant: QPoly,
    /// In loop order: `critical_values[k]` carries `branch_cycles[k]`.
    pub critical_values: Vec<CriticalValue>,
    pub base_point: Complex64,
    pub base_fiber: Vec<Complex64>,
    pub branch_cycles: Vec<Permutation>,
    pub infinity_cycle: Permutation,
    pub genericity: GenericityReport,
    pub cover: BranchedCover,
    pub refined_retry: bool,
}

/// Branch cycles of the projection to `x`, with the cycle at infinity,
/// satisfying `c_1 ∘ ⋯ ∘ c_r ∘ c_∞ = id` exactly.
pub fn track_monodromy(p: &PlanePolynomial, cfg: &TrackingConfig) -> Result<MonodromyResult, NumonoError> {
    let crit = critical_values(p, cfg)?;
    match track_with(p, &crit, cfg, false) {
        Err(NumonoError::RelationViolation { product }) => {
            log::warn!("monodromy relation failed ({product}); retrying with refined tracking");
            track_with(p, &crit, &cfg.refined(), true)
        }
        other => other,
    }
}

fn track_with(
    p: &PlanePolynomial,
    crit: &CriticalSet,
    cfg: &TrackingConfig,
    refined_retry: bool,
) -> Result<MonodromyResult, NumonoError> {
    let degree = p.degree_y().unwrap() as usize;
    let points: Vec<Complex64> = crit.values.iter().map(CriticalValue::value).collect();
    let geom = choose_geometry(&points, cfg.base_point)?;
    log::debug!(
        "base point {} (angle {:.4}), {} critical values",
        geom.base,
        geom.theta,
        points.len()
    );

    let fiber_coeffs = p.eval_y_coeffs(geom.base);
    let mut base_fiber = aberth(&fiber_coeffs, None, 1e-15, 2000)
        .ok_or_else(|| NumonoError::RootFinding("base fiber did not converge".into()))?;
    if base_fiber.len() != degree {
        return Err(NumonoError::RootFinding("base fiber has the wrong size".into()));
    }
    sort_lex(&mut base_fiber);

    // c_1..c_r by decreasing sweep angle; c_1 ∘ ⋯ ∘ c_r is the
    // monodromy of the big counterclockwise circle
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| geom.sweep_angle(points[b]).total_cmp(&geom.sweep_angle(points[a])));

    let perms: Vec<Permutation> = order
        .par_iter()
        .map(|&k| loop_permutation(p, &loop_pieces(&geom, &points, k), &base_fiber, cfg, k))
        .collect::<Result<_, _>>()?;
    let around_all = loop_permutation(p, &big_circle(&geom), &base_fiber, cfg, points.len())?;
    let infinity_cycle = around_all.inverse();

    let mut product = Permutation::identity(degree);
    for c in &perms {
        product = product.compose_unchecked(c);
    }
    product = product.compose_unchecked(&infinity_cycle);
    if !product.is_identity() {
        return Err(NumonoError::RelationViolation {
            product: product.to_string(),
        });
    }

    let critical_values: Vec<CriticalValue> = order.iter().map(|&k| crit.values[k].clone()).collect();
    let trivial_loops: Vec<usize> = perms
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_identity())
        .map(|(k, _)| k)
        .collect();

    let mut cycles = Vec::new();
    let mut labels = Vec::new();
    for (c, v) in perms.iter().zip(&critical_values) {
        if !c.is_identity() {
            cycles.push(c.clone());
            labels.push(format_point(v.re, v.im));
        }
    }
    if !infinity_cycle.is_identity() {
        cycles.push(infinity_cycle.clone());
        labels.push("inf".to_string());
    }
    let cover = BranchedCover::new(degree, 0, Vec::new(), cycles).with_labels(labels);
    cover.validate()?;

    let lead_degree = p.y_coefficient(degree as u32).degree().unwrap_or(0);
    let genericity = GenericityReport {
        simple_discriminant_roots: true,
        leading_coefficient_constant: lead_degree == 0,
        finite_cycles_transpositions: perms.iter().all(Permutation::is_transposition),
        infinity_trivial: infinity_cycle.is_identity(),
        infinity_transposition: infinity_cycle.is_transposition(),
        trivial_loops,
    };

    Ok(MonodromyResult {
        polynomial: p.clone(),
        degree,
        resultant: crit.resultant.clone(),
        critical_values,
        base_point: geom.base,
        base_fiber,
        branch_cycles: perms,
        infinity_cycle,
        genericity,
        cover,
        refined_retry,
    })
}

fn format_point(re: f64, im: f64) -> String {
    let clean = |v: f64| if v.abs() < 5e-13 { 0.0 } else { v };
    format!("x={:.9}{:+.9}i", clean(re), clean(im))
}

/// Serializable view of a [`MonodromyResult`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonodromyReport {
    pub polynomial: String,
    pub degree: usize,
    pub resultant: String,
    pub critical_values: Vec<CriticalValue>,
    pub base_point: [f64; 2],
    pub branch_cycles: Vec<String>,
    pub infinity_cycle: String,
    pub genericity: GenericityReport,
    pub group_order: u128,
    pub refined_retry: bool,
    pub cover: CoverFile,
}

impl MonodromyResult {
    pub fn report(&self) -> MonodromyReport {
        let order = self
            .cover
            .monodromy_group()
            .map(|g| g.order())
            .unwrap_or(0);
        MonodromyReport {
            polynomial: self.polynomial.to_string(),
            degree: self.degree,
            resultant: self.resultant.to_string(),
            critical_values: self.critical_values.clone(),
            base_point: [self.base_point.re, self.base_point.im],
            branch_cycles: self.branch_cycles.iter().map(|c| c.to_string()).collect(),
            infinity_cycle: self.infinity_cycle.to_string(),
            genericity: self.genericity.clone(),
            group_order: order,
            refined_retry: self.refined_retry,
            cover: self.cover.to_file(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfinityStatus {
    Unbranched,
    Transposition,
    Other { cycle: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub degree: usize,
    pub finite_branch_points: usize,
    /// Every finite critical value is a simple tangency.
    pub finite_morse: bool,
    pub infinity: InfinityStatus,
    /// Morse over all of the line, infinity included.
    pub morse: bool,
    /// Automatic over the projective line.
    pub genuinely_ramified: bool,
    pub group_order: u128,
    pub full_symmetric: bool,
    pub sd_certificate: SdOutcome,
}

/// Runs the tracker and checks the conclusions for a generic projection:
/// Morse branching, and monodromy the full symmetric group.
pub fn certify_projection(
    p: &PlanePolynomial,
    cfg: &TrackingConfig,
) -> Result<(MonodromyResult, ProjectionReport), NumonoError> {
    let result = track_monodromy(p, cfg)?;
    let analysis = FiberAnalysis::new(&result.cover)?;
    let gr = analysis.genuinely_ramified();
    debug_assert!(gr.genuinely_ramified, "covers of the line are genuinely ramified");
    let order = analysis.galois_closure_order();
    let infinity = if result.infinity_cycle.is_identity() {
        InfinityStatus::Unbranched
    } else if result.infinity_cycle.is_transposition() {
        InfinityStatus::Transposition
    } else {
        InfinityStatus::Other {
            cycle: result.infinity_cycle.to_string(),
        }
    };
    let finite_morse = result.genericity.finite_cycles_transpositions;
    let report = ProjectionReport {
        degree: result.degree,
        finite_branch_points: result.branch_cycles.len(),
        finite_morse,
        morse: result.cover.is_morse(),
        infinity,
        genuinely_ramified: gr.genuinely_ramified,
        group_order: order,
        full_symmetric: order == factorial(result.degree),
        sd_certificate: analysis.certify_sd()?,
    };
    Ok((result, report))
}
