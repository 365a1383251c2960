//! Contour search in the pulse-parameter plane.
//!
//! A sector driven by the half-sine pulse is characterized by two effective
//! parameters: the exchange coefficient 𝒥 and the pulse amplitude 𝒜. For a
//! prescribed gate amplitude A, the solution set { (𝒜, 𝒥) : A(𝒜, 𝒥) = A }
//! is traced over a rectangular region by evaluating a grid, bisecting every
//! sign change of A - target along grid edges, and chaining the crossings
//! into polylines. The attached phases (ϕ, θ) ride along with every point.
//!
//! The extreme targets need a second pass: A ranges over [0, 1], so the
//! level sets A = 0 and A = 1 are one-sided and never bracketed by a sign
//! change. Grid nodes that sit on the level set within the solver tolerance
//! are emitted directly (the 𝒜 = 0 axis for A = 1), and local minima of
//! |A - target| are refined by a compass search that emits only if it
//! actually reaches the tolerance (the isolated A = 0 solutions).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FieldProfile;
use crate::model::BlockParams;
use crate::propagator::{evolve, reference, EvolutionSpec, StepOrder};
use crate::su2::{extract_gate_form, wrap_angle, GateForm, SigmaAxis};

/// |A - target| threshold for points emitted by [`scan_plane`].
pub const SCAN_TOL: f64 = 1e-6;
/// |A - target| threshold for [`solve_for_target`].
pub const SOLVE_TOL: f64 = 1e-8;
/// Unitarity guard for gate-form extraction from raw (unprojected) schemes.
const EXTRACT_GUARD: f64 = 0.05;
/// Candidate local minima above this |A - target| are not worth refining.
const MIN_SEARCH_THRESHOLD: f64 = 0.1;

/// Rectangle in the (𝒜, 𝒥) plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    /// Amplitude axis bounds [lo, hi].
    pub ampl: [f64; 2],
    /// Exchange axis bounds [lo, hi].
    pub j: [f64; 2],
}

impl Default for Region {
    fn default() -> Self {
        Self {
            ampl: [-5.0, 5.0],
            j: [-5.0, 5.0],
        }
    }
}

impl Region {
    pub fn contains(&self, ampl: f64, j: f64) -> bool {
        (self.ampl[0]..=self.ampl[1]).contains(&ampl) && (self.j[0]..=self.j[1]).contains(&j)
    }

    fn clamp(&self, ampl: f64, j: f64) -> (f64, f64) {
        (
            ampl.clamp(self.ampl[0], self.ampl[1]),
            j.clamp(self.j[0], self.j[1]),
        )
    }
}

/// Configuration of one contour scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Prescribed gate amplitude in [0, 1].
    pub target_a: f64,
    /// Which Pauli axis the drive couples to.
    pub q: SigmaAxis,
    pub region: Region,
    /// Grid nodes per axis, >= 2.
    pub grid_resolution: usize,
    /// Partition count for the scanning propagator.
    pub n: usize,
    pub order: StepOrder,
}

impl ScanConfig {
    pub fn new(target_a: f64, q: SigmaAxis) -> Self {
        Self {
            target_a,
            q,
            region: Region::default(),
            grid_resolution: 101,
            n: 1000,
            order: StepOrder::Quadratic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.target_a) {
            return Err(Error::Config(format!(
                "target amplitude must be in [0, 1], got {}",
                self.target_a
            )));
        }
        if self.grid_resolution < 2 {
            return Err(Error::Config("grid resolution must be >= 2".into()));
        }
        if self.n == 0 {
            return Err(Error::Config("partition count must be >= 1".into()));
        }
        let r = &self.region;
        if !(r.ampl[0] < r.ampl[1] && r.j[0] < r.j[1]) {
            return Err(Error::Config("scan region is degenerate".into()));
        }
        Ok(())
    }

    fn cell(&self) -> (f64, f64) {
        let steps = (self.grid_resolution - 1) as f64;
        (
            (self.region.ampl[1] - self.region.ampl[0]) / steps,
            (self.region.j[1] - self.region.j[0]) / steps,
        )
    }
}

/// One solution point with its full gate form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourPoint {
    pub ampl: f64,
    pub j: f64,
    pub gate: GateForm,
}

/// A chained run of contour points with its off-diagonal phase spread.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub points: Vec<ContourPoint>,
    /// Circular standard deviation of θ along the polyline, radians.
    pub theta_std: f64,
}

/// All polylines found for one target amplitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanOutcome {
    pub target_a: f64,
    pub polylines: Vec<Polyline>,
}

impl ScanOutcome {
    pub fn points(&self) -> impl Iterator<Item = &ContourPoint> {
        self.polylines.iter().flat_map(|p| p.points.iter())
    }

    pub fn len(&self) -> usize {
        self.polylines.iter().map(|p| p.points.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Gate form of the sector evolved with the scan propagator at effective
/// parameters (𝒜, 𝒥).
pub fn amplitude_at(ampl: f64, j: f64, cfg: &ScanConfig) -> Result<GateForm> {
    if !(ampl.is_finite() && j.is_finite()) {
        return Err(Error::Domain("scan coordinates must be finite".into()));
    }
    let spec = EvolutionSpec {
        block: BlockParams::effective(j, cfg.q),
        field: FieldProfile::half_sine(ampl, 1)?,
        n: cfg.n,
        order: cfg.order,
        attach_global_phase: false,
    };
    extract_gate_form(&evolve(&spec)?, EXTRACT_GUARD)
}

/// Gate form at (𝒜, 𝒥) computed with the refined reference propagator.
pub fn reference_gate_at(ampl: f64, j: f64, q: SigmaAxis, tol: f64) -> Result<GateForm> {
    let block = BlockParams::effective(j, q);
    let field = FieldProfile::half_sine(ampl, 1)?;
    let u = reference(&block, &field, false, tol)?;
    extract_gate_form(&u, 1e-9)
}

fn mismatch_at(ampl: f64, j: f64, cfg: &ScanConfig) -> Result<f64> {
    Ok(amplitude_at(ampl, j, cfg)?.a - cfg.target_a)
}

/// Bisect a sign change of g along the segment from `lo` to `hi`.
fn bisect_segment(
    cfg: &ScanConfig,
    mut lo: (f64, f64),
    mut hi: (f64, f64),
    mut g_lo: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    for _ in 0..120 {
        let mid = (0.5 * (lo.0 + hi.0), 0.5 * (lo.1 + hi.1));
        let g_mid = mismatch_at(mid.0, mid.1, cfg)?;
        if g_mid.abs() <= tol {
            return Ok(mid);
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence(format!(
        "edge bisection stalled near ({:.6}, {:.6})",
        lo.0, lo.1
    )))
}

/// Compass search minimizing |g|; returns the final point and value.
fn compass_min(
    cfg: &ScanConfig,
    start: (f64, f64),
    initial_step: f64,
    tol: f64,
) -> Result<((f64, f64), f64)> {
    let mut point = start;
    let mut value = mismatch_at(point.0, point.1, cfg)?.abs();
    let mut step = initial_step;
    let floor = initial_step * 1e-9;
    let mut evals = 0;
    while value > tol && step > floor && evals < 4000 {
        let mut best = (point, value);
        for (dx, dy) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let cand = cfg.region.clamp(point.0 + dx, point.1 + dy);
            let v = mismatch_at(cand.0, cand.1, cfg)?.abs();
            evals += 1;
            if v < best.1 {
                best = (cand, v);
            }
        }
        if best.1 < value {
            point = best.0;
            value = best.1;
        } else {
            step *= 0.5;
        }
    }
    Ok((point, value))
}

/// Circular standard deviation of a set of angles.
fn circular_std(angles: impl Iterator<Item = f64> + Clone) -> f64 {
    let (mut c, mut s, mut count) = (0.0, 0.0, 0usize);
    for a in angles.clone() {
        c += a.cos();
        s += a.sin();
        count += 1;
    }
    if count < 2 {
        return 0.0;
    }
    let mean = s.atan2(c);
    let var = angles.map(|a| wrap_angle(a - mean).powi(2)).sum::<f64>() / count as f64;
    var.sqrt()
}

/// Chain crossings into polylines by greedy nearest-neighbor linking.
fn chain_points(mut points: Vec<ContourPoint>, link_radius: f64) -> Vec<Polyline> {
    points.sort_by(|p, q| {
        (p.ampl, p.j)
            .partial_cmp(&(q.ampl, q.j))
            .expect("finite coordinates")
    });
    let n = points.len();
    let mut used = vec![false; n];
    let dist2 =
        |a: &ContourPoint, b: &ContourPoint| (a.ampl - b.ampl).powi(2) + (a.j - b.j).powi(2);
    let radius2 = link_radius * link_radius;
    let mut polylines = Vec::new();
    for start in 0..n {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut chain = vec![points[start]];
        // Grow forward from the tail, then backward from the head.
        for head in [false, true] {
            loop {
                let anchor = if head {
                    chain[0]
                } else {
                    *chain.last().expect("chain is non-empty")
                };
                let next = (0..n)
                    .filter(|&i| !used[i])
                    .map(|i| (i, dist2(&points[i], &anchor)))
                    .filter(|(_, d)| *d <= radius2)
                    .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite distance"));
                match next {
                    Some((i, _)) => {
                        used[i] = true;
                        if head {
                            chain.insert(0, points[i]);
                        } else {
                            chain.push(points[i]);
                        }
                    }
                    None => break,
                }
            }
        }
        let theta_std = circular_std(chain.iter().map(|p| p.gate.theta));
        polylines.push(Polyline {
            points: chain,
            theta_std,
        });
    }
    polylines
}

/// Trace the level set A(𝒜, 𝒥) = target over the configured grid.
///
/// An empty outcome is not an error; it just means no solutions exist in
/// the region at this resolution.
pub fn scan_plane(cfg: &ScanConfig) -> Result<ScanOutcome> {
    cfg.validate()?;
    let res = cfg.grid_resolution;
    let steps = (res - 1) as f64;
    let xs: Vec<f64> = (0..res)
        .map(|i| cfg.region.ampl[0] + (cfg.region.ampl[1] - cfg.region.ampl[0]) * i as f64 / steps)
        .collect();
    let ys: Vec<f64> = (0..res)
        .map(|i| cfg.region.j[0] + (cfg.region.j[1] - cfg.region.j[0]) * i as f64 / steps)
        .collect();

    // Grid of A - target, row-major over (j, ampl), evaluated in parallel.
    let grid: Vec<f64> = (0..res * res)
        .into_par_iter()
        .map(|idx| mismatch_at(xs[idx % res], ys[idx / res], cfg))
        .collect::<Result<_>>()?;
    let g = |ix: usize, iy: usize| grid[iy * res + ix];

    let mut found: Vec<(f64, f64)> = Vec::new();

    // Nodes already on the level set (catches the 𝒜 = 0 axis for A = 1).
    for (iy, y) in ys.iter().enumerate() {
        for (ix, x) in xs.iter().enumerate() {
            if g(ix, iy).abs() <= SCAN_TOL {
                found.push((*x, *y));
            }
        }
    }

    // Sign changes along grid edges.
    type Edge = ((f64, f64), (f64, f64), f64);
    let mut edges: Vec<Edge> = Vec::new();
    for (iy, y) in ys.iter().enumerate() {
        for (ix, x) in xs.iter().enumerate() {
            let ga = g(ix, iy);
            if ix + 1 < res {
                let gb = g(ix + 1, iy);
                if ga * gb < 0.0 && ga.abs() > SCAN_TOL && gb.abs() > SCAN_TOL {
                    edges.push(((*x, *y), (xs[ix + 1], *y), ga));
                }
            }
            if iy + 1 < res {
                let gb = g(ix, iy + 1);
                if ga * gb < 0.0 && ga.abs() > SCAN_TOL && gb.abs() > SCAN_TOL {
                    edges.push(((*x, *y), (*x, ys[iy + 1]), ga));
                }
            }
        }
    }
    let roots: Vec<(f64, f64)> = edges
        .par_iter()
        .map(|(lo, hi, g_lo)| bisect_segment(cfg, *lo, *hi, *g_lo, SCAN_TOL))
        .collect::<Result<_>>()?;
    found.extend(roots);

    // Local minima of |g| (one-sided level sets have no sign changes).
    let (dx, dy) = cfg.cell();
    let mut seeds: Vec<(f64, f64)> = Vec::new();
    for (iy, y) in ys.iter().enumerate() {
        for (ix, x) in xs.iter().enumerate() {
            let v = g(ix, iy).abs();
            if v <= SCAN_TOL || v > MIN_SEARCH_THRESHOLD {
                continue;
            }
            let mut is_min = true;
            for (nx, ny) in [
                (ix.wrapping_sub(1), iy),
                (ix + 1, iy),
                (ix, iy.wrapping_sub(1)),
                (ix, iy + 1),
            ] {
                if nx < res && ny < res && g(nx, ny).abs() < v {
                    is_min = false;
                    break;
                }
            }
            if is_min {
                seeds.push((*x, *y));
            }
        }
    }
    let refined: Vec<((f64, f64), f64)> = seeds
        .par_iter()
        .map(|seed| compass_min(cfg, *seed, dx.max(dy), SCAN_TOL * 0.5))
        .collect::<Result<_>>()?;
    found.extend(
        refined
            .into_iter()
            .filter(|(_, v)| *v <= SCAN_TOL)
            .map(|(p, _)| p),
    );

    // Deduplicate near-coincident points, then attach gate forms.
    found.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    let dedup_radius2 = (1e-3 * dx.max(dy)).powi(2);
    let mut unique: Vec<(f64, f64)> = Vec::with_capacity(found.len());
    for p in found {
        if unique
            .iter()
            .all(|q| (p.0 - q.0).powi(2) + (p.1 - q.1).powi(2) > dedup_radius2)
        {
            unique.push(p);
        }
    }
    let points: Vec<ContourPoint> = unique
        .par_iter()
        .map(|(ampl, j)| {
            amplitude_at(*ampl, *j, cfg).map(|gate| ContourPoint {
                ampl: *ampl,
                j: *j,
                gate,
            })
        })
        .collect::<Result<_>>()?;

    let link_radius = 2.0 * dx.max(dy);
    Ok(ScanOutcome {
        target_a: cfg.target_a,
        polylines: chain_points(points, link_radius),
    })
}

/// Requested gate: an amplitude and optionally one or both phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateTarget {
    pub a: f64,
    #[serde(default)]
    pub phi: Option<f64>,
    #[serde(default)]
    pub theta: Option<f64>,
}

/// Solution returned by [`solve_for_target`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOutcome {
    pub point: ContourPoint,
    pub a_residual: f64,
    pub phi_residual: Option<f64>,
    pub theta_residual: Option<f64>,
}

fn gradient(cfg: &ScanConfig, p: (f64, f64), h: f64) -> Result<(f64, f64)> {
    let (xp, _) = cfg.region.clamp(p.0 + h, p.1);
    let (xm, _) = cfg.region.clamp(p.0 - h, p.1);
    let (_, yp) = cfg.region.clamp(p.0, p.1 + h);
    let (_, ym) = cfg.region.clamp(p.0, p.1 - h);
    let gx = (mismatch_at(xp, p.1, cfg)? - mismatch_at(xm, p.1, cfg)?) / (xp - xm);
    let gy = (mismatch_at(p.0, yp, cfg)? - mismatch_at(p.0, ym, cfg)?) / (yp - ym);
    Ok((gx, gy))
}

/// Root of g along the ray p + t·dir, |t| <= span: bracket by marching and
/// bisect, falling back to golden-section minimization of |g| when the
/// target is one-sided. Returns the new point when |g| <= tol there.
fn line_root(
    cfg: &ScanConfig,
    p: (f64, f64),
    dir: (f64, f64),
    span: f64,
    tol: f64,
) -> Result<Option<(f64, f64)>> {
    let at = |t: f64| cfg.region.clamp(p.0 + t * dir.0, p.1 + t * dir.1);
    let g_at = |t: f64| {
        let (x, y) = at(t);
        mismatch_at(x, y, cfg)
    };
    let g0 = g_at(0.0)?;
    if g0.abs() <= tol {
        return Ok(Some(at(0.0)));
    }
    // March outward both ways looking for a sign change.
    let fractions = [0.125, 0.25, 0.5, 1.0];
    for sign in [1.0, -1.0] {
        let mut t_prev = 0.0;
        let mut g_prev = g0;
        for f in fractions {
            let t = sign * f * span;
            let g_t = g_at(t)?;
            if g_prev * g_t < 0.0 {
                let (mut lo, mut hi, mut g_lo) = (t_prev, t, g_prev);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    let g_mid = g_at(mid)?;
                    if g_mid.abs() <= tol {
                        return Ok(Some(at(mid)));
                    }
                    if (g_mid < 0.0) == (g_lo < 0.0) {
                        lo = mid;
                        g_lo = g_mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(None);
            }
            t_prev = t;
            g_prev = g_t;
        }
    }
    // No bracket: golden-section minimize |g| over [-span, span].
    let inv_phi = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (-span, span);
    let mut t1 = hi - inv_phi * (hi - lo);
    let mut t2 = lo + inv_phi * (hi - lo);
    let mut v1 = g_at(t1)?.abs();
    let mut v2 = g_at(t2)?.abs();
    for _ in 0..80 {
        if v1 < v2 {
            hi = t2;
            t2 = t1;
            v2 = v1;
            t1 = hi - inv_phi * (hi - lo);
            v1 = g_at(t1)?.abs();
        } else {
            lo = t1;
            t1 = t2;
            v1 = v2;
            t2 = lo + inv_phi * (hi - lo);
            v2 = g_at(t2)?.abs();
        }
    }
    let t_best = if v1 < v2 { t1 } else { t2 };
    if g_at(t_best)?.abs() <= tol || v1.min(v2) < g0.abs() {
        // Either converged, or at least improved; the caller iterates.
        Ok(Some(at(t_best)))
    } else {
        Ok(None)
    }
}

fn phase_mismatch(gate: &GateForm, target: &GateTarget) -> f64 {
    let mut m = 0.0;
    if let Some(phi) = target.phi {
        m += wrap_angle(gate.phi - phi).powi(2);
    }
    if let Some(theta) = target.theta {
        m += wrap_angle(gate.theta - theta).powi(2);
    }
    m
}

/// Find a point realizing the target amplitude near `seed_point`, then, if
/// phase prescriptions are given, walk along the amplitude contour to
/// minimize the phase mismatch.
pub fn solve_for_target(
    target: &GateTarget,
    seed_point: (f64, f64),
    cfg: &ScanConfig,
) -> Result<SolveOutcome> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&target.a) {
        return Err(Error::Config(format!(
            "target amplitude must be in [0, 1], got {}",
            target.a
        )));
    }
    if !cfg.region.contains(seed_point.0, seed_point.1) {
        return Err(Error::Config(format!(
            "seed point ({}, {}) lies outside the scan region",
            seed_point.0, seed_point.1
        )));
    }
    let solve_cfg = ScanConfig {
        target_a: target.a,
        ..cfg.clone()
    };
    let (dx, dy) = solve_cfg.cell();
    let cell = dx.max(dy);
    let h = 1e-4 * cell.max(1e-6);

    // Stage 1: land on the amplitude contour along steepest-change rays.
    let mut p = seed_point;
    let mut best = (p, mismatch_at(p.0, p.1, &solve_cfg)?.abs());
    let mut reached = best.1 <= SOLVE_TOL;
    for _ in 0..60 {
        if reached {
            break;
        }
        let (gx, gy) = gradient(&solve_cfg, p, h)?;
        let norm = gx.hypot(gy);
        if norm < 1e-14 {
            break;
        }
        let dir = (gx / norm, gy / norm);
        match line_root(&solve_cfg, p, dir, 4.0 * cell, SOLVE_TOL)? {
            Some(next) => {
                let v = mismatch_at(next.0, next.1, &solve_cfg)?.abs();
                if v < best.1 {
                    best = (next, v);
                }
                p = next;
                reached = v <= SOLVE_TOL;
            }
            None => break,
        }
    }
    if !reached {
        return Err(Error::NotFound(format!(
            "no point with A = {} near ({}, {}); best |A - target| = {:.3e} at ({:.6}, {:.6})",
            target.a, seed_point.0, seed_point.1, best.1, best.0 .0, best.0 .1
        )));
    }
    p = best.0;

    // Stage 2: when phases are prescribed, walk along the contour toward
    // smaller phase mismatch. Each candidate move is projected back onto
    // the contour before scoring, which also covers ridge contours where
    // the amplitude gradient vanishes (the 𝒜 = 0 axis for target 1).
    if target.phi.is_some() || target.theta.is_some() {
        let gate = amplitude_at(p.0, p.1, &solve_cfg)?;
        let mut walk = p;
        let mut best_m = phase_mismatch(&gate, target);
        let mut step_size = cell;
        for _ in 0..8 * solve_cfg.grid_resolution {
            if step_size < cell / 16.0 {
                break;
            }
            let mut improved = None;
            for (dx, dy) in [
                (step_size, 0.0),
                (-step_size, 0.0),
                (0.0, step_size),
                (0.0, -step_size),
            ] {
                let predicted = solve_cfg.region.clamp(walk.0 + dx, walk.1 + dy);
                let (corrected, g_abs) =
                    compass_min(&solve_cfg, predicted, step_size / 4.0, SOLVE_TOL)?;
                if g_abs > SOLVE_TOL {
                    continue;
                }
                let gate = amplitude_at(corrected.0, corrected.1, &solve_cfg)?;
                let m = phase_mismatch(&gate, target);
                if m < best_m {
                    best_m = m;
                    improved = Some(corrected);
                }
            }
            match improved {
                Some(next) => walk = next,
                None => step_size *= 0.5,
            }
        }
        p = walk;
    }

    let gate = amplitude_at(p.0, p.1, &solve_cfg)?;
    Ok(SolveOutcome {
        point: ContourPoint {
            ampl: p.0,
            j: p.1,
            gate,
        },
        a_residual: (gate.a - target.a).abs(),
        phi_residual: target.phi.map(|phi| wrap_angle(gate.phi - phi).abs()),
        theta_residual: target
            .theta
            .map(|theta| wrap_angle(gate.theta - theta).abs()),
    })
}

/// One CSV row: a contour point re-checked against the refined reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub target_a: f64,
    pub q: u8,
    pub ampl: f64,
    pub j: f64,
    pub gate: GateForm,
    /// |A - target| with A recomputed by the reference propagator.
    pub residual: f64,
}

/// Re-check every scanned point with the reference propagator and flatten
/// the polylines into CSV rows (row order follows the chained polylines).
pub fn scan_rows(
    outcome: &ScanOutcome,
    cfg: &ScanConfig,
    reference_tol: f64,
) -> Result<Vec<ScanRow>> {
    let points: Vec<&ContourPoint> = outcome.points().collect();
    points
        .par_iter()
        .map(|p| {
            let reference = reference_gate_at(p.ampl, p.j, cfg.q, reference_tol)?;
            Ok(ScanRow {
                target_a: outcome.target_a,
                q: cfg.q.index(),
                ampl: p.ampl,
                j: p.j,
                gate: p.gate,
                residual: (reference.a - outcome.target_a).abs(),
            })
        })
        .collect()
}

/// CSV rendering of scan rows, full round-trip precision.
pub fn render_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("target_A,q,ampl,J,A,B,phi,theta,varphi,residual\n");
    for r in rows {
        out.push_str(&format!(
            "{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.target_a,
            r.q,
            r.ampl,
            r.j,
            r.gate.a,
            r.gate.b,
            r.gate.phi,
            r.gate.theta,
            r.gate.global_phase,
            r.residual
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn coarse_cfg(target_a: f64) -> ScanConfig {
        ScanConfig {
            target_a,
            q: SigmaAxis::X,
            region: Region {
                ampl: [-3.0, 3.0],
                j: [-3.0, 3.0],
            },
            grid_resolution: 31,
            n: 400,
            order: StepOrder::Quadratic,
        }
    }

    #[test]
    fn config_validation() {
        assert!(ScanConfig::new(0.5, SigmaAxis::X).validate().is_ok());
        assert!(ScanConfig::new(1.5, SigmaAxis::X).validate().is_err());
        let mut cfg = ScanConfig::new(0.5, SigmaAxis::X);
        cfg.grid_resolution = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = ScanConfig::new(0.5, SigmaAxis::X);
        cfg.region.ampl = [2.0, 2.0];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn no_drive_keeps_full_amplitude() {
        let cfg = ScanConfig::new(1.0, SigmaAxis::X);
        for j in [0.5, 1.0, 2.0] {
            let gate = amplitude_at(0.0, j, &cfg).unwrap();
            assert_eq!(gate.a, 1.0);
            assert_eq!(gate.b, 0.0);
            assert!((gate.phi - j).abs() < 1e-4, "phi={} vs j={}", gate.phi, j);
        }
    }

    #[test]
    fn quarter_turn_pulse_kills_amplitude() {
        // Φ = pi/2 at 𝒜 = pi²/4 along J = 0.
        let cfg = ScanConfig::new(0.0, SigmaAxis::X);
        let gate = amplitude_at(PI * PI / 4.0, 0.0, &cfg).unwrap();
        assert!(gate.a <= 1e-4, "A = {:.3e}", gate.a);

        // Φ = pi restores full amplitude up to sign.
        let gate = amplitude_at(PI * PI / 2.0, 0.0, &cfg).unwrap();
        assert!(gate.a >= 1.0 - 1e-4, "A = {:.3e}", gate.a);
    }

    #[test]
    fn mirrored_amplitude_shifts_theta_by_pi() {
        let cfg = coarse_cfg(0.5);
        for (ampl, j) in [(1.2, 0.7), (2.1, -0.9)] {
            let plus = amplitude_at(ampl, j, &cfg).unwrap();
            let minus = amplitude_at(-ampl, j, &cfg).unwrap();
            assert!((plus.a - minus.a).abs() < 1e-12);
            assert!(wrap_angle(plus.theta - minus.theta - PI).abs() < 1e-9);
        }
    }

    #[test]
    fn full_amplitude_scan_contains_axis() {
        let cfg = coarse_cfg(1.0);
        let outcome = scan_plane(&cfg).unwrap();
        // Every grid value of J should appear with 𝒜 = 0.
        let axis_points: Vec<f64> = outcome
            .points()
            .filter(|p| p.ampl.abs() <= 1e-12)
            .map(|p| p.j)
            .collect();
        assert_eq!(axis_points.len(), cfg.grid_resolution);
        for p in outcome.points() {
            assert!((p.gate.a - 1.0).abs() <= SCAN_TOL);
        }
    }

    #[test]
    fn zero_amplitude_scan_finds_quarter_turn() {
        let cfg = coarse_cfg(0.0);
        let outcome = scan_plane(&cfg).unwrap();
        assert!(!outcome.is_empty(), "no A = 0 solutions found");
        let hit = outcome
            .points()
            .any(|p| (p.ampl - PI * PI / 4.0).abs() < 0.05 && p.j.abs() < 0.05);
        assert!(hit, "no solution near (pi^2/4, 0)");
        for p in outcome.points() {
            assert!(p.gate.a <= SCAN_TOL);
        }
    }

    #[test]
    fn mid_amplitude_scan_emits_chained_contours() {
        let cfg = coarse_cfg(0.5);
        let outcome = scan_plane(&cfg).unwrap();
        assert!(outcome.len() > 20, "only {} points", outcome.len());
        for p in outcome.points() {
            assert!((p.gate.a - 0.5).abs() <= SCAN_TOL);
        }
        // Chaining should produce a few long polylines, not point dust.
        let longest = outcome
            .polylines
            .iter()
            .map(|p| p.points.len())
            .max()
            .unwrap();
        assert!(longest >= 10, "longest polyline has {longest} points");
    }

    #[test]
    fn solve_reaches_axis_for_full_amplitude() {
        let cfg = coarse_cfg(1.0);
        let target = GateTarget {
            a: 1.0,
            phi: None,
            theta: None,
        };
        let solved = solve_for_target(&target, (0.1, 2.0), &cfg).unwrap();
        assert!(solved.a_residual <= SOLVE_TOL);
        assert!(solved.point.ampl.abs() < 1e-3);
        // On the axis the diagonal phase equals J.
        assert!((solved.point.gate.phi - solved.point.j).abs() < 1e-4);
    }

    #[test]
    fn solve_reaches_quarter_turn_for_zero_amplitude() {
        let cfg = coarse_cfg(0.0);
        let target = GateTarget {
            a: 0.0,
            phi: None,
            theta: None,
        };
        let solved = solve_for_target(&target, (2.4, 0.05), &cfg).unwrap();
        assert!(solved.a_residual <= SOLVE_TOL);
        assert!((solved.point.ampl - PI * PI / 4.0).abs() < 1e-2);
        assert!(solved.point.j.abs() < 1e-2);
    }

    #[test]
    fn solve_walks_contour_to_requested_phase() {
        let cfg = coarse_cfg(1.0);
        let target = GateTarget {
            a: 1.0,
            phi: Some(1.5),
            theta: None,
        };
        let solved = solve_for_target(&target, (0.1, 0.3), &cfg).unwrap();
        assert!(solved.a_residual <= SOLVE_TOL);
        let phi_residual = solved.phi_residual.unwrap();
        assert!(phi_residual < 1e-2, "phi residual {phi_residual:.3e}");
    }

    #[test]
    fn solve_reports_unreachable_targets() {
        // Tiny region around (0, 2): A stays near 1, so A = 0.2 is absent.
        let cfg = ScanConfig {
            target_a: 0.2,
            q: SigmaAxis::X,
            region: Region {
                ampl: [-0.2, 0.2],
                j: [1.8, 2.2],
            },
            grid_resolution: 11,
            n: 200,
            order: StepOrder::Quadratic,
        };
        let target = GateTarget {
            a: 0.2,
            phi: None,
            theta: None,
        };
        let err = solve_for_target(&target, (0.0, 2.0), &cfg).unwrap_err();
        assert!(matches!(err, Error::NotFound(_)), "got {err:?}");
    }

    #[test]
    fn seed_outside_region_is_rejected() {
        let cfg = coarse_cfg(0.5);
        let target = GateTarget {
            a: 0.5,
            phi: None,
            theta: None,
        };
        assert!(matches!(
            solve_for_target(&target, (10.0, 0.0), &cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn csv_schema() {
        let gate = GateForm::new(0.1, 0.6, 0.8, 0.2, -0.3).unwrap();
        let rows = vec![ScanRow {
            target_a: 0.6,
            q: 1,
            ampl: 1.0,
            j: -2.0,
            gate,
            residual: 1e-6,
        }];
        let csv = render_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "target_A,q,ampl,J,A,B,phi,theta,varphi,residual"
        );
        assert_eq!(lines.next().unwrap().split(',').count(), 10);
    }
}
