//! Extraction of collinearity links and preimage links as oriented polylines.
//!
//! Both problems are the zero set of a two-component constraint. For a pair
//! of S²-valued maps `A, B` (in the right-invariant frame) the constraint is
//! `h(x) = (B·e1(A), B·e2(A))`, where `(A, e1, e2)` is a positive orthonormal
//! basis. The zero set is `{B = ±A}`. Collinearity of fields `X, Y` uses
//! `A = X̂, B = Ŷ`; the preimage of a value `v` under `m` uses `A ≡ v, B = m`.
//!
//! Orientation: at a zero, let `g1, g2` be the gradients of `h` in the
//! right-invariant frame. The loop is traversed along `s·(g1 × g2)` with
//! `s = sign(A·B)`. This is the preimage orientation of `±★` under `Y` in a
//! framing completing `X` (S² oriented outward-normal first).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Field, FieldSpec};
use crate::quat::{
    axpy4, cross3, dot3, from_right_frame, least_aligned_axis, norm3, norm4, right_frame, scale4, tangent_basis_with,
    Chart, S3Point, Vec3,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionParams {
    /// Grid vertices per axis and chart.
    pub resolution: usize,
    /// Residual accepted by Newton refinement.
    pub eps: f64,
    /// Continuation step (chordal).
    pub step: f64,
    pub max_steps: usize,
    /// Loops closer than this are the same component.
    pub dedup: f64,
    /// Half side of the seeding cube in each stereographic chart.
    pub grid_radius: f64,
    /// Smallest singular value of the constraint Jacobian for transversality.
    pub min_singular: f64,
}

impl Default for ExtractionParams {
    fn default() -> Self {
        Self {
            resolution: 48,
            eps: 1e-8,
            step: 0.01,
            max_steps: 100_000,
            dedup: 0.02,
            grid_radius: 1.2,
            min_singular: 1e-6,
        }
    }
}

impl ExtractionParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.resolution >= 2
            && self.eps > 0.0
            && self.step > 0.0
            && self.max_steps > 0
            && self.dedup > 0.0
            && self.grid_radius > 0.0
            && self.min_singular > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config("extraction parameters must be positive".into()))
        }
    }
}

/// Maximum gap between consecutive loop points.
pub const H_MAX: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum SignClass {
    Positive,
    Negative,
}

/// Closed polyline on S³; the last point connects back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientedLoop {
    pub points: Vec<S3Point>,
}

impl OrientedLoop {
    pub fn new(points: Vec<S3Point>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn reversed(&self) -> Self {
        let mut p = self.points.clone();
        p.reverse();
        Self { points: p }
    }

    /// Chordal length.
    pub fn length(&self) -> f64 {
        let n = self.points.len();
        (0..n).map(|k| self.points[k].chord(&self.points[(k + 1) % n])).sum()
    }

    pub fn max_gap(&self) -> f64 {
        let n = self.points.len();
        (0..n).map(|k| self.points[k].chord(&self.points[(k + 1) % n])).fold(0.0, f64::max)
    }

    /// Smallest distance from `x` to a vertex of the loop.
    pub fn distance_to(&self, x: &S3Point) -> f64 {
        self.points.iter().map(|p| p.chord(x)).fold(f64::INFINITY, f64::min)
    }

    /// Smallest vertex distance between two loops.
    pub fn distance_to_loop(&self, other: &OrientedLoop) -> f64 {
        self.points.iter().map(|p| other.distance_to(p)).fold(f64::INFINITY, f64::min)
    }

    /// Smallest distance between vertices that are more than `skip` steps apart
    /// along the loop, normalised by nothing; used as an embeddedness check.
    pub fn self_clearance(&self, skip: usize) -> f64 {
        let n = self.points.len();
        let mut best = f64::INFINITY;
        for a in 0..n {
            for b in a + skip..n {
                if n - (b - a) < skip {
                    continue;
                }
                best = best.min(self.points[a].chord(&self.points[b]));
            }
        }
        best
    }

    /// Resamples to exactly `m` points, evenly spaced in arc length.
    pub fn resample(&self, m: usize) -> OrientedLoop {
        let n = self.points.len();
        let seg: Vec<f64> = (0..n).map(|k| self.points[k].chord(&self.points[(k + 1) % n])).collect();
        let total: f64 = seg.iter().sum();
        let mut out = Vec::with_capacity(m);
        let mut k = 0;
        let mut acc = 0.0;
        for j in 0..m {
            let target = total * j as f64 / m as f64;
            while k < n - 1 && acc + seg[k] < target {
                acc += seg[k];
                k += 1;
            }
            let t = if seg[k] > 0.0 { ((target - acc) / seg[k]).clamp(0.0, 1.0) } else { 0.0 };
            let a = self.points[k].coords();
            let b = self.points[(k + 1) % n].coords();
            out.push(S3Point::normalize(axpy4(&scale4(&a, 1.0 - t), t, &b)));
        }
        OrientedLoop { points: out }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkSet {
    pub loops: Vec<OrientedLoop>,
    pub sign_class: SignClass,
}

impl LinkSet {
    pub fn empty(sign_class: SignClass) -> Self {
        Self { loops: Vec::new(), sign_class }
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    pub fn len(&self) -> usize {
        self.loops.len()
    }
}

/// A pair of S²-valued maps whose coincidence / opposition set is sought.
pub trait SpherePair: Sync {
    fn eval(&self, x: &S3Point) -> (Vec3, Vec3);
}

/// Two fields in the right-invariant frame.
pub struct FieldPair {
    pub x: Field,
    pub y: Field,
}

impl FieldPair {
    pub fn new(x: &FieldSpec, y: &FieldSpec) -> Result<Self> {
        Ok(Self { x: x.compile()?, y: y.compile()? })
    }
}

impl SpherePair for FieldPair {
    fn eval(&self, x: &S3Point) -> (Vec3, Vec3) {
        (self.x.right_frame_map(x), self.y.right_frame_map(x))
    }
}

/// A map S³ → S² against a fixed value.
pub struct ValuePair<'a> {
    pub map: &'a (dyn Fn(&S3Point) -> Vec3 + Sync),
    pub value: Vec3,
}

impl SpherePair for ValuePair<'_> {
    fn eval(&self, x: &S3Point) -> (Vec3, Vec3) {
        let v = (self.map)(x);
        let n = norm3(&v);
        (self.value, [v[0] / n, v[1] / n, v[2] / n])
    }
}

const FD_STEP: f64 = 1e-6;

/// The constraint `h` with a fixed Gram–Schmidt axis.
struct Constraint<'a, P: SpherePair + ?Sized> {
    pair: &'a P,
}

struct Local {
    h: [f64; 2],
    /// Gradients of h1, h2 in right-frame coordinates.
    g: [Vec3; 2],
    sign: f64,
}

impl<P: SpherePair + ?Sized> Constraint<'_, P> {
    fn h(&self, x: &S3Point, axis: usize) -> ([f64; 2], f64) {
        let (a, b) = self.pair.eval(x);
        let (e1, e2) = tangent_basis_with(&a, axis);
        ([dot3(&b, &e1), dot3(&b, &e2)], dot3(&a, &b))
    }

    fn axis_at(&self, x: &S3Point) -> usize {
        least_aligned_axis(&self.pair.eval(x).0)
    }

    fn local(&self, x: &S3Point, axis: usize) -> Local {
        let (h, s) = self.h(x, axis);
        let f = right_frame(x);
        let mut g = [[0.0; 3]; 2];
        for k in 0..3 {
            let xp = S3Point::normalize(axpy4(&x.coords(), FD_STEP, &f[k]));
            let xm = S3Point::normalize(axpy4(&x.coords(), -FD_STEP, &f[k]));
            let (hp, _) = self.h(&xp, axis);
            let (hm, _) = self.h(&xm, axis);
            g[0][k] = (hp[0] - hm[0]) / (2.0 * FD_STEP);
            g[1][k] = (hp[1] - hm[1]) / (2.0 * FD_STEP);
        }
        Local { h, g, sign: if s >= 0.0 { 1.0 } else { -1.0 } }
    }
}

/// Smallest singular value of the 2×3 matrix with rows `g`.
fn sigma_min(g: &[Vec3; 2]) -> f64 {
    let a = dot3(&g[0], &g[0]);
    let b = dot3(&g[0], &g[1]);
    let c = dot3(&g[1], &g[1]);
    let tr = a + c;
    let det = a * c - b * b;
    let disc = ((tr * tr / 4.0) - det).max(0.0).sqrt();
    (tr / 2.0 - disc).max(0.0).sqrt()
}

/// Minimum-norm Newton correction in right-frame coordinates.
fn newton_delta(g: &[Vec3; 2], h: &[f64; 2]) -> Option<Vec3> {
    let a = dot3(&g[0], &g[0]);
    let b = dot3(&g[0], &g[1]);
    let c = dot3(&g[1], &g[1]);
    let det = a * c - b * b;
    if det.abs() < 1e-300 {
        return None;
    }
    let l0 = (c * h[0] - b * h[1]) / det;
    let l1 = (a * h[1] - b * h[0]) / det;
    Some([-(g[0][0] * l0 + g[1][0] * l1), -(g[0][1] * l0 + g[1][1] * l1), -(g[0][2] * l0 + g[1][2] * l1)])
}

fn move_along(x: &S3Point, v: &Vec3) -> S3Point {
    S3Point::normalize(axpy4(&x.coords(), 1.0, &from_right_frame(x, v)))
}

struct Refined {
    x: S3Point,
    local: Local,
}

/// Newton refinement onto the zero set. `None` if it does not converge.
fn refine<P: SpherePair + ?Sized>(
    c: &Constraint<P>,
    start: &S3Point,
    axis: usize,
    eps: f64,
    max_move: f64,
) -> Option<Refined> {
    let mut x = *start;
    let mut moved = 0.0;
    let mut local = c.local(&x, axis);
    for _ in 0..50 {
        let r = local.h[0].hypot(local.h[1]);
        if r < eps {
            return Some(Refined { x, local });
        }
        let d = newton_delta(&local.g, &local.h)?;
        if !norm3(&d).is_finite() {
            return None;
        }
        // damped step: halve until the residual decreases
        let mut t = 1.0;
        let (next, next_local) = loop {
            let y = move_along(&x, &[d[0] * t, d[1] * t, d[2] * t]);
            let (h, _) = c.h(&y, axis);
            if h[0].hypot(h[1]) < r || t < 1e-3 {
                break (y, c.local(&y, axis));
            }
            t *= 0.5;
        };
        moved += t * norm3(&d);
        if moved > max_move {
            return None;
        }
        x = next;
        local = next_local;
    }
    None
}

/// Oriented tangent (right-frame coordinates) at a zero.
fn oriented_tangent(local: &Local) -> Vec3 {
    let t = cross3(&local.g[0], &local.g[1]);
    let n = norm3(&t);
    [local.sign * t[0] / n, local.sign * t[1] / n, local.sign * t[2] / n]
}

/// Follows the zero set from a refined seed until it closes.
///
/// Predictor along the oriented tangent, Newton corrector, step halving when
/// the corrector fails or the tangent turns too fast.
pub fn trace_curve<P: SpherePair + ?Sized>(
    pair: &P,
    seed: &S3Point,
    params: &ExtractionParams,
) -> Result<OrientedLoop> {
    let c = Constraint { pair };
    let mut axis = c.axis_at(seed);
    let first = refine(&c, seed, axis, params.eps, 0.5).ok_or(Error::IrregularValue(0.0))?;
    let mut x = first.x;
    let mut local = first.local;
    check_transverse(&local, &x, params)?;
    let start = x;
    let sign = local.sign;
    let mut points = vec![x];
    let mut h = params.step;
    let h_min = params.step * 1e-4;
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps > params.max_steps {
            return Err(Error::MaxStepsExceeded(params.max_steps));
        }
        let t = oriented_tangent(&local);
        let pred = move_along(&x, &[t[0] * h, t[1] * h, t[2] * h]);
        let accepted = refine(&c, &pred, axis, params.eps, 0.5 * h).and_then(|r| {
            let d = r.x.chord(&x);
            let t_new = oriented_tangent(&r.local);
            let turn = dot3(&t, &t_new);
            (d > 0.3 * h && d < 1.7 * h && turn > 0.95 && r.local.sign == sign).then_some(r)
        });
        let Some(r) = accepted else {
            h *= 0.5;
            if h < h_min {
                return Err(Error::TransversalityFailure { sigma: sigma_min(&local.g), at: x.coords() });
            }
            continue;
        };
        check_transverse(&r.local, &r.x, params)?;
        x = r.x;
        local = r.local;
        if points.len() >= 10 && x.chord(&start) < h.max(params.step) {
            break;
        }
        points.push(x);
        h = (h * 1.5).min(params.step);
        // keep the Gram–Schmidt axis well away from A
        let (a, _) = pair.eval(&x);
        if a[axis].abs() > 0.9 {
            axis = least_aligned_axis(&a);
            local = c.local(&x, axis);
        }
    }
    Ok(OrientedLoop { points })
}

fn check_transverse(local: &Local, x: &S3Point, params: &ExtractionParams) -> Result<()> {
    let s = sigma_min(&local.g);
    if s < params.min_singular {
        return Err(Error::TransversalityFailure { sigma: s, at: x.coords() });
    }
    Ok(())
}

/// Candidate seeds: chart grid cells where both constraint components change
/// sign across the corners. Returned in deterministic grid order.
fn seed_cells<P: SpherePair + ?Sized>(pair: &P, params: &ExtractionParams) -> Vec<S3Point> {
    let n = params.resolution;
    let r = params.grid_radius;
    let spacing = 2.0 * r / (n - 1) as f64;
    let coord = |i: usize| -r + spacing * i as f64;
    let mut seeds = Vec::new();
    for chart in Chart::standard() {
        // values at grid vertices, slice by slice
        let values: Vec<(Vec3, Vec3)> = (0..n * n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, j, k) = (idx / (n * n), (idx / n) % n, idx % n);
                pair.eval(&chart.inverse(&[coord(i), coord(j), coord(k)]))
            })
            .collect();
        let at = |i: usize, j: usize, k: usize| &values[(i * n + j) * n + k];
        let cells: Vec<S3Point> = (0..(n - 1) * (n - 1) * (n - 1))
            .into_par_iter()
            .filter_map(|idx| {
                let m = n - 1;
                let (i, j, k) = (idx / (m * m), (idx / m) % m, idx % m);
                let centre = [coord(i) + spacing / 2.0, coord(j) + spacing / 2.0, coord(k) + spacing / 2.0];
                if norm3(&centre) > r {
                    return None;
                }
                let axis = least_aligned_axis(&at(i, j, k).0);
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                // start from the corner closest to the zero set
                let mut best = (f64::INFINITY, 0);
                for c in 0..8 {
                    let (a, b) = at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
                    let (e1, e2) = tangent_basis_with(a, axis);
                    let h = [dot3(b, &e1), dot3(b, &e2)];
                    for t in 0..2 {
                        lo[t] = lo[t].min(h[t]);
                        hi[t] = hi[t].max(h[t]);
                    }
                    let r = h[0].hypot(h[1]);
                    if r < best.0 {
                        best = (r, c);
                    }
                }
                let c = best.1;
                let corner = [coord(i + (c & 1)), coord(j + ((c >> 1) & 1)), coord(k + ((c >> 2) & 1))];
                let start = if best.0 < 0.5 { corner } else { centre };
                (lo[0] <= 0.0 && hi[0] >= 0.0 && lo[1] <= 0.0 && hi[1] >= 0.0).then(|| chart.inverse(&start))
            })
            .collect();
        seeds.extend(cells);
    }
    seeds
}

/// All closed components of the zero set of `h`, split by sign class.
///
/// `keep` filters sign classes (preimages keep only the positive class).
fn extract_components<P: SpherePair + ?Sized>(
    pair: &P,
    params: &ExtractionParams,
    keep: &[SignClass],
) -> Result<(LinkSet, LinkSet)> {
    params.validate()?;
    let c = Constraint { pair };
    let seeds = seed_cells(pair, params);
    let cell = 2.0 * 2.0 * params.grid_radius / (params.resolution - 1) as f64;
    // refine every seed in parallel; the merge below is sequential and ordered
    let refined: Vec<Option<(S3Point, f64, f64)>> = seeds
        .par_iter()
        .map(|s| {
            let axis = c.axis_at(s);
            refine(&c, s, axis, params.eps, 3.0 * cell).map(|r| (r.x, r.local.sign, sigma_min(&r.local.g)))
        })
        .collect();
    let mut pos = LinkSet::empty(SignClass::Positive);
    let mut neg = LinkSet::empty(SignClass::Negative);
    for (x, sign, sigma) in refined.into_iter().flatten() {
        let class = if sign > 0.0 { SignClass::Positive } else { SignClass::Negative };
        if !keep.contains(&class) {
            continue;
        }
        let seen =
            pos.loops.iter().chain(neg.loops.iter()).any(|l| l.distance_to(&x) < params.dedup.max(params.step * 1.5));
        if seen {
            continue;
        }
        if sigma < params.min_singular {
            return Err(Error::TransversalityFailure { sigma, at: x.coords() });
        }
        let lp = trace_curve(pair, &x, params)?;
        let clearance = lp.self_clearance(6);
        if clearance < 1e-3 {
            return Err(Error::ResolutionTooCoarse(clearance));
        }
        for other in pos.loops.iter().chain(neg.loops.iter()) {
            let d = other.distance_to_loop(&lp);
            if d < 1e-3 {
                return Err(Error::ResolutionTooCoarse(d));
            }
        }
        match class {
            SignClass::Positive => pos.loops.push(lp),
            SignClass::Negative => neg.loops.push(lp),
        }
    }
    Ok((pos, neg))
}

/// `{B = A}` and `{B = −A}` of an arbitrary pair of maps to S².
pub fn pair_links<P: SpherePair + ?Sized>(pair: &P, params: &ExtractionParams) -> Result<(LinkSet, LinkSet)> {
    extract_components(pair, params, &[SignClass::Positive, SignClass::Negative])
}

/// `C₊` and `C₋` of two fields, oriented by the Gauss-map rule.
pub fn collinearity_links(x: &FieldSpec, y: &FieldSpec, params: &ExtractionParams) -> Result<(LinkSet, LinkSet)> {
    let pair = FieldPair::new(x, y)?;
    extract_components(&pair, params, &[SignClass::Positive, SignClass::Negative])
}

/// Oriented preimage `m⁻¹(value)`; orientation pulled back from S².
pub fn preimage_link(
    m: &(dyn Fn(&S3Point) -> Vec3 + Sync),
    value: &Vec3,
    params: &ExtractionParams,
) -> Result<LinkSet> {
    let v = norm3(value);
    let pair = ValuePair { map: m, value: [value[0] / v, value[1] / v, value[2] / v] };
    let p = ExtractionParams { min_singular: params.min_singular.max(1e-4), ..*params };
    match extract_components(&pair, &p, &[SignClass::Positive]) {
        Ok((pos, _)) => Ok(pos),
        Err(Error::TransversalityFailure { sigma, .. }) => Err(Error::IrregularValue(sigma)),
        Err(e) => Err(e),
    }
}

/// Orientation sign (+1 keep, −1 reverse) the rule assigns at vertex `k`.
fn orientation_vote<P: SpherePair + ?Sized>(pair: &P, l: &OrientedLoop, k: usize) -> Option<f64> {
    let c = Constraint { pair };
    let x = l.points[k];
    let local = c.local(&x, c.axis_at(&x));
    if sigma_min(&local.g) < 1e-12 {
        return None;
    }
    let t = oriented_tangent(&local);
    let n = l.points.len();
    let next = l.points[(k + 1) % n].coords();
    let prev = l.points[(k + n - 1) % n].coords();
    let dir4 = axpy4(&next, -1.0, &prev);
    let f = right_frame(&x);
    let dir = [crate::quat::dot4(&dir4, &f[0]), crate::quat::dot4(&dir4, &f[1]), crate::quat::dot4(&dir4, &f[2])];
    let d = dot3(&dir, &t);
    (d.abs() > 1e-3 * norm4(&dir4)).then_some(d.signum())
}

/// Orients a collinearity component of `(x, y)` by the Gauss-map rule,
/// checked at three well-separated points which must agree.
pub fn orient_loop(l: &OrientedLoop, x: &FieldSpec, y: &FieldSpec) -> Result<OrientedLoop> {
    let pair = FieldPair::new(x, y)?;
    orient_loop_with(&pair, l)
}

pub fn orient_loop_with<P: SpherePair + ?Sized>(pair: &P, l: &OrientedLoop) -> Result<OrientedLoop> {
    let n = l.points.len();
    if n < 3 {
        return Err(Error::OrientationAmbiguous);
    }
    let votes: Vec<Option<f64>> = [0, n / 3, 2 * n / 3].iter().map(|&k| orientation_vote(pair, l, k)).collect();
    let first = votes[0].ok_or(Error::OrientationAmbiguous)?;
    if votes.iter().any(|v| *v != Some(first)) {
        return Err(Error::OrientationAmbiguous);
    }
    Ok(if first > 0.0 { l.clone() } else { l.reversed() })
}

/// Hausdorff distance between two loops (vertex sets).
pub fn hausdorff(a: &OrientedLoop, b: &OrientedLoop) -> f64 {
    let one = |p: &OrientedLoop, q: &OrientedLoop| p.points.iter().map(|x| q.distance_to(x)).fold(0.0, f64::max);
    one(a, b).max(one(b, a))
}
