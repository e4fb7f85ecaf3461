//! Linking numbers, degrees of sampled sphere maps, Hopf invariants and the
//! degree of the rotation field between two framings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{preimage_link, ExtractionParams, LinkSet, OrientedLoop};
use crate::fields::{complete_frame, Field, FieldSpec};
use crate::quat::{
    cross3, det3, dot3, dot4, least_aligned_axis, left_frame, norm3, quat_from_rotation, right_frame, sub3,
    tangent_basis_with, Chart, Quaternion, S3Point, Vec3, Vec4,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkingResult {
    pub raw: f64,
    pub rounded: i64,
    pub residual: f64,
}

impl LinkingResult {
    fn from_raw(raw: f64) -> Self {
        let rounded = raw.round() as i64;
        Self { raw, rounded, residual: (raw - rounded as f64).abs() }
    }
}

/// Largest accepted distance from an integer.
pub const LINKING_TOLERANCE: f64 = 0.1;
const MIN_SEPARATION: f64 = 1e-3;
const POLE_CLEARANCE: f64 = 0.2;
const POLE_CANDIDATES: usize = 64;

fn pole_candidates() -> Vec<S3Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9);
    let mut out = vec![S3Point::ONE.antipode(), S3Point::ONE];
    while out.len() < POLE_CANDIDATES {
        let v: Vec4 =
            [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = dot4(&v, &v).sqrt();
        if n > 0.1 && n <= 1.0 {
            out.push(S3Point::normalize(v));
        }
    }
    out
}

/// Stereographic projection from the candidate point farthest from every
/// vertex of the given loops.
fn projection_chart(loops: &[&OrientedLoop]) -> Result<Chart> {
    let clearance = |c: &S3Point| loops.iter().map(|l| l.distance_to(c)).fold(f64::INFINITY, f64::min);
    let (best, d) = pole_candidates()
        .into_iter()
        .map(|c| {
            let d = clearance(&c);
            (c, d)
        })
        .fold((S3Point::ONE, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    if d <= POLE_CLEARANCE {
        return Err(Error::NoPoleFound);
    }
    // a chart with pole P projects from −P
    Ok(Chart::new(best.antipode(), f64::INFINITY))
}

fn project_loop(l: &OrientedLoop, chart: &Chart) -> Result<Vec<Vec3>> {
    l.points.iter().map(|p| chart.project(p)).collect()
}

/// Minimum distance between the segments of two closed polylines on S³.
pub fn loop_separation(a: &OrientedLoop, b: &OrientedLoop) -> f64 {
    let seg = |l: &OrientedLoop, k: usize| (l.points[k].coords(), l.points[(k + 1) % l.len()].coords());
    (0..a.len())
        .into_par_iter()
        .map(|i| {
            let (p0, p1) = seg(a, i);
            (0..b.len())
                .map(|j| {
                    let (q0, q1) = seg(b, j);
                    segment_distance4(&p0, &p1, &q0, &q1)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

fn segment_distance4(p0: &Vec4, p1: &Vec4, q0: &Vec4, q1: &Vec4) -> f64 {
    let d1: Vec4 = std::array::from_fn(|k| p1[k] - p0[k]);
    let d2: Vec4 = std::array::from_fn(|k| q1[k] - q0[k]);
    let r: Vec4 = std::array::from_fn(|k| p0[k] - q0[k]);
    let a = dot4(&d1, &d1);
    let e = dot4(&d2, &d2);
    let f = dot4(&d2, &r);
    let c = dot4(&d1, &r);
    let b = dot4(&d1, &d2);
    let den = a * e - b * b;
    let mut s = if den > 1e-18 { ((b * f - c * e) / den).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = if e > 1e-18 { (b * s + f) / e } else { 0.0 };
    if t < 0.0 {
        t = 0.0;
        s = if a > 1e-18 { (-c / a).clamp(0.0, 1.0) } else { 0.0 };
    } else if t > 1.0 {
        t = 1.0;
        s = if a > 1e-18 { ((b - c) / a).clamp(0.0, 1.0) } else { 0.0 };
    }
    let v: Vec4 = std::array::from_fn(|k| r[k] + s * d1[k] - t * d2[k]);
    dot4(&v, &v).sqrt()
}

/// Midpoint-rule Gauss double integral over two closed polygons in ℝ³.
pub fn gauss_integral(a: &[Vec3], b: &[Vec3]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let sum: f64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let (a0, a1) = (a[i], a[(i + 1) % n]);
            let da = sub3(&a1, &a0);
            let ma = [(a0[0] + a1[0]) / 2.0, (a0[1] + a1[1]) / 2.0, (a0[2] + a1[2]) / 2.0];
            let mut acc = 0.0;
            for j in 0..m {
                let (b0, b1) = (b[j], b[(j + 1) % m]);
                let db = sub3(&b1, &b0);
                let r = [ma[0] - (b0[0] + b1[0]) / 2.0, ma[1] - (b0[1] + b1[1]) / 2.0, ma[2] - (b0[2] + b1[2]) / 2.0];
                let d = norm3(&r);
                acc += dot3(&r, &cross3(&da, &db)) / (d * d * d);
            }
            acc
        })
        .sum();
    sum / (4.0 * std::f64::consts::PI)
}

/// Splits every segment into `k` pieces, interpolating on S³.
fn subdivide(l: &OrientedLoop, k: usize) -> OrientedLoop {
    if k <= 1 {
        return l.clone();
    }
    let n = l.len();
    let mut out = Vec::with_capacity(n * k);
    for i in 0..n {
        let (p, q) = (l.points[i].coords(), l.points[(i + 1) % n].coords());
        for s in 0..k {
            let t = s as f64 / k as f64;
            out.push(S3Point::normalize(std::array::from_fn(|c| p[c] * (1.0 - t) + q[c] * t)));
        }
    }
    OrientedLoop::new(out)
}

/// Linking number of two disjoint oriented loops on S³ via the Gauss integral
/// of their stereographic images.
pub fn gauss_linking(a: &OrientedLoop, b: &OrientedLoop) -> Result<LinkingResult> {
    let sep = loop_separation(a, b);
    if sep <= MIN_SEPARATION {
        return Err(Error::LoopsTooClose(sep));
    }
    let chart = projection_chart(&[a, b])?;
    // segments should be short compared with the separation
    let gap = a.max_gap().max(b.max_gap());
    let k = ((gap / (0.5 * sep)).ceil() as usize).clamp(1, 64);
    let mut result = None;
    for refine in [k, 2 * k] {
        let pa = project_loop(&subdivide(a, refine), &chart)?;
        let pb = project_loop(&subdivide(b, refine), &chart)?;
        let r = LinkingResult::from_raw(gauss_integral(&pa, &pb));
        if r.residual < LINKING_TOLERANCE {
            return Ok(r);
        }
        result = Some(r);
    }
    let r = result.expect("two attempts");
    Err(Error::UnreliableLinking { raw: r.raw, residual: r.residual })
}

/// Sum of pairwise linking numbers between two link sets.
pub fn link_sets_linking(a: &LinkSet, b: &LinkSet) -> Result<i64> {
    let mut total = 0;
    for la in &a.loops {
        for lb in &b.loops {
            total += gauss_linking(la, lb)?.rounded;
        }
    }
    Ok(total)
}

/// Signed crossings of `a` over `b` in the projection of their stereographic
/// images along `direction`. Directions that give near-degenerate crossings
/// are jittered, up to 32 attempts.
pub fn crossing_linking(a: &OrientedLoop, b: &OrientedLoop, direction: &Vec3) -> Result<i64> {
    let chart = projection_chart(&[a, b])?;
    let pa = project_loop(a, &chart)?;
    let pb = project_loop(b, &chart)?;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut d = *direction;
    for _ in 0..32 {
        let n = norm3(&d);
        if n > 1e-9 {
            let d_unit = [d[0] / n, d[1] / n, d[2] / n];
            if let Some(v) = crossing_count(&pa, &pb, &d_unit) {
                return Ok(v);
            }
        }
        d = [
            direction[0] + rng.gen_range(-0.3..0.3),
            direction[1] + rng.gen_range(-0.3..0.3),
            direction[2] + rng.gen_range(-0.3..0.3),
        ];
    }
    Err(Error::NoGenericProjection)
}

/// `None` when the projection is not generic.
fn crossing_count(a: &[Vec3], b: &[Vec3], d: &Vec3) -> Option<i64> {
    let (u, v) = tangent_basis_with(d, least_aligned_axis(d));
    let flat = |p: &Vec3| (dot3(p, &u), dot3(p, &v), dot3(p, d));
    let fa: Vec<_> = a.iter().map(flat).collect();
    let fb: Vec<_> = b.iter().map(flat).collect();
    let scale = a.iter().chain(b.iter()).map(norm3).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    let (n, m) = (fa.len(), fb.len());
    let partial: Vec<Option<i64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (p0, p1) = (fa[i], fa[(i + 1) % n]);
            let mut acc = 0;
            for j in 0..m {
                let (q0, q1) = (fb[j], fb[(j + 1) % m]);
                let r = (p1.0 - p0.0, p1.1 - p0.1);
                let s = (q1.0 - q0.0, q1.1 - q0.1);
                let den = r.0 * s.1 - r.1 * s.0;
                let w = (q0.0 - p0.0, q0.1 - p0.1);
                let len = (r.0.hypot(r.1)) * (s.0.hypot(s.1));
                if den.abs() <= 1e-9 * len {
                    // parallel: generic only if the segments are well apart
                    let off = (w.0 * r.1 - w.1 * r.0).abs() / r.0.hypot(r.1).max(1e-300);
                    if off < tol * 1e3 {
                        return None;
                    }
                    continue;
                }
                let t = (w.0 * s.1 - w.1 * s.0) / den;
                let uu = (w.0 * r.1 - w.1 * r.0) / den;
                let eps = 1e-9;
                let near = |x: f64| x.abs() < eps || (x - 1.0).abs() < eps;
                if near(t) || near(uu) {
                    if (-eps..=1.0 + eps).contains(&t) && (-eps..=1.0 + eps).contains(&uu) {
                        return None;
                    }
                    continue;
                }
                if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&uu) {
                    continue;
                }
                let ha = p0.2 + t * (p1.2 - p0.2);
                let hb = q0.2 + uu * (q1.2 - q0.2);
                if (ha - hb).abs() < tol {
                    return None;
                }
                if ha > hb {
                    acc += if den > 0.0 { 1 } else { -1 };
                }
            }
            Some(acc)
        })
        .collect();
    partial.into_iter().sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeResult {
    pub value: i64,
    /// Regular value used for the count.
    pub target: Vec<f64>,
    pub preimages: Vec<Vec<f64>>,
    pub signs: Vec<i8>,
}

impl DegreeResult {
    pub fn count(&self) -> usize {
        self.signs.len()
    }
}

/// Generic targets for regular values, tried in order.
fn targets<const N: usize>() -> Vec<[f64; N]> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..8)
        .map(|_| {
            let v: [f64; N] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.map(|x| x / n)
        })
        .collect()
}

fn solve2(m: &[[f64; 2]; 2], h: &[f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-300 {
        return None;
    }
    Some([(m[1][1] * h[0] - m[0][1] * h[1]) / det, (m[0][0] * h[1] - m[1][0] * h[0]) / det])
}

fn det3m(m: &[[f64; 3]; 3]) -> f64 {
    det3(&m[0], &m[1], &m[2])
}

fn solve3(m: &[[f64; 3]; 3], h: &[f64; 3]) -> Option<[f64; 3]> {
    let det = det3m(m);
    if det.abs() < 1e-300 {
        return None;
    }
    // Cramer on rows: m x = h
    let col = |k: usize| -> [[f64; 3]; 3] {
        let mut c = *m;
        for r in 0..3 {
            c[r][k] = h[r];
        }
        c
    };
    Some([det3m(&col(0)) / det, det3m(&col(1)) / det, det3m(&col(2)) / det])
}

/// Smallest singular value of a square matrix, via the smallest eigenvalue of
/// `MᵀM` by inverse power iteration.
fn smallest_singular<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    let mut g = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..N {
            g[i][j] = (0..N).map(|k| m[k][i] * m[k][j]).sum();
        }
    }
    let tr: f64 = (0..N).map(|i| g[i][i]).sum();
    // power iteration on tr·I − G gives the largest of tr − λ
    let mut v = [1.0 / (N as f64).sqrt(); N];
    let mut lam = 0.0;
    for _ in 0..200 {
        let mut w = [0.0; N];
        for i in 0..N {
            w[i] = tr * v[i] - (0..N).map(|j| g[i][j] * v[j]).sum::<f64>();
        }
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return 0.0;
        }
        lam = n;
        v = w.map(|x| x / n);
    }
    (tr - lam).max(0.0).sqrt()
}

const DEG_FD: f64 = 1e-6;
const DEG_SINGULAR: f64 = 1e-4;
const DEG_DEDUP: f64 = 1e-5;

/// Positive tangent basis of S² at `x`.
fn s2_basis(x: &Vec3) -> (Vec3, Vec3) {
    tangent_basis_with(x, least_aligned_axis(x))
}

fn s2_move(x: &Vec3, e: &(Vec3, Vec3), d: &[f64; 2]) -> Vec3 {
    let v = [
        x[0] + d[0] * e.0[0] + d[1] * e.1[0],
        x[1] + d[0] * e.0[1] + d[1] * e.1[1],
        x[2] + d[0] * e.0[2] + d[1] * e.1[2],
    ];
    let n = norm3(&v);
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Point of S² in one of the two stereographic charts about `±e₀`.
fn s2_chart(sign: f64, y: &[f64; 2]) -> Vec3 {
    let r2 = y[0] * y[0] + y[1] * y[1];
    [sign * (1.0 - r2) / (1.0 + r2), 2.0 * y[0] / (1.0 + r2), 2.0 * y[1] / (1.0 + r2)]
}

struct Count {
    points: Vec<Vec<f64>>,
    signs: Vec<i8>,
}

/// Refined preimages of `w` under `m: S² → S²` with their signs.
fn count_s2(m: &(dyn Fn(&Vec3) -> Vec3 + Sync), w: &Vec3, resolution: usize) -> Result<Count> {
    let (f1, f2) = s2_basis(w);
    let h = |x: &Vec3| {
        let y = m(x);
        ([dot3(&y, &f1), dot3(&y, &f2)], dot3(&y, w))
    };
    let n = resolution.max(4);
    let r = 1.2;
    let sp = 2.0 * r / (n - 1) as f64;
    let c = |i: usize| -r + sp * i as f64;
    let mut seeds = Vec::new();
    for sign in [1.0, -1.0] {
        let vals: Vec<([f64; 2], f64)> =
            (0..n * n).into_par_iter().map(|k| h(&s2_chart(sign, &[c(k / n), c(k % n)]))).collect();
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let corners = [vals[i * n + j], vals[i * n + j + 1], vals[(i + 1) * n + j], vals[(i + 1) * n + j + 1]];
                let straddles =
                    |t: usize| corners.iter().any(|v| v.0[t] <= 0.0) && corners.iter().any(|v| v.0[t] >= 0.0);
                if straddles(0) && straddles(1) && corners.iter().any(|v| v.1 > 0.0) {
                    seeds.push(s2_chart(sign, &[c(i) + sp / 2.0, c(j) + sp / 2.0]));
                }
            }
        }
    }
    let refined: Vec<Option<(Vec3, f64, f64)>> = seeds
        .par_iter()
        .map(|s| {
            let mut x = *s;
            for _ in 0..40 {
                let (hv, pos) = h(&x);
                let e = s2_basis(&x);
                let mut jac = [[0.0; 2]; 2];
                for k in 0..2 {
                    let mut d = [0.0; 2];
                    d[k] = DEG_FD;
                    let (hp, _) = h(&s2_move(&x, &e, &d));
                    d[k] = -DEG_FD;
                    let (hm, _) = h(&s2_move(&x, &e, &d));
                    jac[0][k] = (hp[0] - hm[0]) / (2.0 * DEG_FD);
                    jac[1][k] = (hp[1] - hm[1]) / (2.0 * DEG_FD);
                }
                if hv[0].hypot(hv[1]) < 1e-11 {
                    return (pos > 0.0)
                        .then(|| (x, jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0], smallest_singular(&jac)));
                }
                let step = solve2(&jac, &hv)?;
                if step[0].hypot(step[1]) > 4.0 * sp {
                    return None;
                }
                x = s2_move(&x, &e, &[-step[0], -step[1]]);
            }
            None
        })
        .collect();
    let mut out = Count { points: Vec::new(), signs: Vec::new() };
    for (x, det, sigma) in refined.into_iter().flatten() {
        if out
            .points
            .iter()
            .any(|p| ((p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2) + (p[2] - x[2]).powi(2)).sqrt() < DEG_DEDUP)
        {
            continue;
        }
        if sigma < DEG_SINGULAR {
            return Err(Error::IrregularValue(sigma));
        }
        out.points.push(x.to_vec());
        out.signs.push(if det > 0.0 { 1 } else { -1 });
    }
    Ok(out)
}

/// Refined preimages of `w` under `m: S³ → S³` with their signs, in the
/// right-invariant frames of source and target.
fn count_s3(m: &(dyn Fn(&S3Point) -> S3Point + Sync), w: &S3Point, resolution: usize) -> Result<Count> {
    let fw = right_frame(w);
    let wc = w.coords();
    let h = |x: &S3Point| {
        let y = m(x).coords();
        ([dot4(&y, &fw[0]), dot4(&y, &fw[1]), dot4(&y, &fw[2])], dot4(&y, &wc))
    };
    let n = resolution.max(4);
    let r = 1.2;
    let sp = 2.0 * r / (n - 1) as f64;
    let c = |i: usize| -r + sp * i as f64;
    let mut seeds = Vec::new();
    for chart in Chart::standard() {
        let vals: Vec<([f64; 3], f64)> = (0..n * n * n)
            .into_par_iter()
            .map(|k| h(&chart.inverse(&[c(k / (n * n)), c((k / n) % n), c(k % n)])))
            .collect();
        let at = |i: usize, j: usize, k: usize| vals[(i * n + j) * n + k];
        let cells: Vec<S3Point> = (0..(n - 1).pow(3))
            .into_par_iter()
            .filter_map(|idx| {
                let q = n - 1;
                let (i, j, k) = (idx / (q * q), (idx / q) % q, idx % q);
                let corners: Vec<([f64; 3], f64)> =
                    (0..8).map(|b| at(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1))).collect();
                let straddles =
                    |t: usize| corners.iter().any(|v| v.0[t] <= 0.0) && corners.iter().any(|v| v.0[t] >= 0.0);
                (straddles(0) && straddles(1) && straddles(2) && corners.iter().any(|v| v.1 > 0.0))
                    .then(|| chart.inverse(&[c(i) + sp / 2.0, c(j) + sp / 2.0, c(k) + sp / 2.0]))
            })
            .collect();
        seeds.extend(cells);
    }
    let step_along = |x: &S3Point, d: &[f64; 3]| {
        let f = right_frame(x);
        let v = x.coords();
        S3Point::normalize(std::array::from_fn(|c| v[c] + d[0] * f[0][c] + d[1] * f[1][c] + d[2] * f[2][c]))
    };
    let refined: Vec<Option<(S3Point, f64, f64)>> = seeds
        .par_iter()
        .map(|s| {
            let mut x = *s;
            for _ in 0..40 {
                let (hv, pos) = h(&x);
                let mut jac = [[0.0; 3]; 3];
                for k in 0..3 {
                    let mut d = [0.0; 3];
                    d[k] = DEG_FD;
                    let (hp, _) = h(&step_along(&x, &d));
                    d[k] = -DEG_FD;
                    let (hm, _) = h(&step_along(&x, &d));
                    for r in 0..3 {
                        jac[r][k] = (hp[r] - hm[r]) / (2.0 * DEG_FD);
                    }
                }
                if norm3(&hv) < 1e-11 {
                    return (pos > 0.0).then(|| (x, det3m(&jac), smallest_singular(&jac)));
                }
                let step = solve3(&jac, &hv)?;
                if norm3(&step) > 4.0 * sp {
                    return None;
                }
                x = step_along(&x, &[-step[0], -step[1], -step[2]]);
            }
            None
        })
        .collect();
    let mut out = Count { points: Vec::new(), signs: Vec::new() };
    for (x, det, sigma) in refined.into_iter().flatten() {
        let xc = x.coords();
        if out.points.iter().any(|p| {
            let d: f64 = (0..4).map(|k| (p[k] - xc[k]).powi(2)).sum();
            d.sqrt() < DEG_DEDUP
        }) {
            continue;
        }
        if sigma < DEG_SINGULAR {
            return Err(Error::IrregularValue(sigma));
        }
        out.points.push(xc.to_vec());
        out.signs.push(if det > 0.0 { 1 } else { -1 });
    }
    Ok(out)
}

/// Counts at regular values until two agree; irregular targets are skipped.
fn degree_by_counting<const N: usize>(count: impl Fn(&[f64; N]) -> Result<Count>) -> Result<DegreeResult> {
    let mut first: Option<DegreeResult> = None;
    let mut last_err = Error::IrregularValue(0.0);
    for t in targets::<N>() {
        match count(&t) {
            Ok(c) => {
                let r = DegreeResult {
                    value: c.signs.iter().map(|&s| s as i64).sum(),
                    target: t.to_vec(),
                    preimages: c.points,
                    signs: c.signs,
                };
                match &first {
                    None => first = Some(r),
                    Some(f) if f.value == r.value => return Ok(first.unwrap()),
                    Some(f) => return Err(Error::RegularValueDependence(f.value, r.value)),
                }
            }
            Err(e @ Error::IrregularValue(_)) => last_err = e,
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

/// Degree of `m: S² → S²` by signed preimage counting, confirmed at a second
/// regular value.
pub fn degree_s2(m: &(dyn Fn(&Vec3) -> Vec3 + Sync), resolution: usize) -> Result<DegreeResult> {
    degree_by_counting::<3>(|t| count_s2(m, t, resolution))
}

/// Degree of `m: S³ → S³` by signed preimage counting, confirmed at a second
/// regular value.
pub fn degree_s3(m: &(dyn Fn(&S3Point) -> S3Point + Sync), resolution: usize) -> Result<DegreeResult> {
    degree_by_counting::<4>(|t| count_s3(m, &S3Point::normalize(*t), resolution))
}

/// Candidate regular values: the 26 cube directions, tilted off the
/// coordinate planes so that symmetric maps do not hit critical values.
pub fn regular_value_candidates() -> Vec<Vec3> {
    let tilt = [0.0123, 0.0317, -0.0211];
    let mut out = Vec::with_capacity(26);
    for a in [-1.0, 0.0, 1.0] {
        for b in [-1.0, 0.0, 1.0] {
            for c in [-1.0, 0.0, 1.0] {
                if a == 0.0 && b == 0.0 && c == 0.0 {
                    continue;
                }
                let v: Vec3 = [a + tilt[0], b + tilt[1], c + tilt[2]];
                let n = norm3(&v);
                out.push([v[0] / n, v[1] / n, v[2] / n]);
            }
        }
    }
    // axes first: their preimages are usually the simplest
    out.sort_by_key(|v| {
        let nz = v.iter().filter(|x| x.abs() > 0.1).count();
        nz
    });
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfInvariantResult {
    pub value: i64,
    pub values: [Vec3; 2],
    pub check_values: [Vec3; 2],
    pub components: [usize; 2],
}

/// Hopf invariant of `m: S³ → S²` as the linking number of two regular
/// preimages, cross-checked with a second pair of regular values.
pub fn hopf_invariant(m: &(dyn Fn(&S3Point) -> Vec3 + Sync), params: &ExtractionParams) -> Result<HopfInvariantResult> {
    let mut regular: Vec<(Vec3, LinkSet)> = Vec::new();
    let mut last_err = None;
    for v in regular_value_candidates() {
        match preimage_link(m, &v, params) {
            Ok(l) => regular.push((v, l)),
            Err(e @ Error::IrregularValue(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
        if regular.len() == 4 {
            break;
        }
    }
    if regular.len() < 4 {
        return Err(last_err.unwrap_or(Error::IrregularValue(0.0)));
    }
    let first = link_sets_linking(&regular[0].1, &regular[1].1)?;
    let second = link_sets_linking(&regular[2].1, &regular[3].1)?;
    if first != second {
        return Err(Error::RegularValueDependence(first, second));
    }
    Ok(HopfInvariantResult {
        value: first,
        values: [regular[0].0, regular[1].0],
        check_values: [regular[2].0, regular[3].0],
        components: [regular[0].1.len(), regular[1].1.len()],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FramingMethod {
    /// Degree of the lifted rotation field between two completed framings.
    RotationLift,
    /// Through the right-invariant framing, using twice the Hopf invariant of
    /// the field's map to S² for fields with no global completion.
    GaussMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FramingResult {
    /// `[τ_X − τ_Y]`, always even.
    pub value: i64,
    pub method: FramingMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FramingParams {
    /// Grid vertices per axis and chart for the lift and the degree count.
    pub resolution: usize,
    /// Minimum of `X·r₀` over the grid for completing against a reference frame.
    pub min_alignment: f64,
    pub extraction: ExtractionParams,
}

impl Default for FramingParams {
    fn default() -> Self {
        Self { resolution: 24, min_alignment: 0.05, extraction: ExtractionParams::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reference {
    Right,
    Left,
}

impl Reference {
    fn frame(self, x: &S3Point) -> [Vec4; 3] {
        match self {
            Reference::Right => right_frame(x),
            Reference::Left => left_frame(x),
        }
    }
}

/// Sample grid on S³: two stereographic cubes.
struct Grid {
    n: usize,
    radius: f64,
    charts: [Chart; 2],
}

impl Grid {
    fn new(n: usize) -> Self {
        Self { n: n.max(4), radius: 1.2, charts: Chart::standard() }
    }

    fn spacing(&self) -> f64 {
        2.0 * self.radius / (self.n - 1) as f64
    }

    fn coord(&self, i: usize) -> f64 {
        -self.radius + self.spacing() * i as f64
    }

    fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    fn point(&self, chart: usize, idx: usize) -> S3Point {
        let n = self.n;
        self.charts[chart].inverse(&[self.coord(idx / (n * n)), self.coord((idx / n) % n), self.coord(idx % n)])
    }

    fn neighbours(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.n;
        let (i, j, k) = (idx / (n * n), (idx / n) % n, idx % n);
        let steps: [(isize, isize, isize); 6] = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)];
        steps.into_iter().filter_map(move |(a, b, c)| {
            let (ii, jj, kk) = (i as isize + a, j as isize + b, k as isize + c);
            let ok = |v: isize| v >= 0 && v < n as isize;
            (ok(ii) && ok(jj) && ok(kk)).then(|| (ii as usize * n + jj as usize) * n + kk as usize)
        })
    }

    /// Nearest vertex, if `x` projects inside the cube of `chart`.
    fn nearest(&self, chart: usize, x: &S3Point) -> Option<usize> {
        let y = self.charts[chart].project(x).ok()?;
        let idx = |v: f64| {
            let t = ((v + self.radius) / self.spacing()).round();
            (t >= 0.0 && t <= (self.n - 1) as f64).then_some(t as usize)
        };
        Some((idx(y[0])? * self.n + idx(y[1])?) * self.n + idx(y[2])?)
    }
}

/// A reference frame against which the field has a global completion.
fn choose_reference(field: &Field, grid: &Grid, min_alignment: f64) -> Option<Reference> {
    [Reference::Right, Reference::Left].into_iter().find(|r| {
        (0..2).all(|c| {
            (0..grid.len()).into_par_iter().all(|idx| {
                let x = grid.point(c, idx);
                dot4(&field.eval(&x).vec, &r.frame(&x)[0]) > min_alignment
            })
        })
    })
}

/// Continuous unit-quaternion lift of a rotation field on S³.
struct RotationLift<'a> {
    grid: Grid,
    rotation: &'a (dyn Fn(&S3Point) -> Quaternion + Sync),
    lifted: [Vec<Quaternion>; 2],
}

impl RotationLift<'_> {
    /// Sign-consistent lift along a breadth-first spanning tree of each chart
    /// grid; every non-tree edge and the chart overlap must agree.
    fn build<'a>(grid: Grid, rotation: &'a (dyn Fn(&S3Point) -> Quaternion + Sync)) -> Result<RotationLift<'a>> {
        let raw: [Vec<Quaternion>; 2] =
            std::array::from_fn(|c| (0..grid.len()).into_par_iter().map(|idx| rotation(&grid.point(c, idx))).collect());
        let centre = {
            let m = grid.n / 2;
            (m * grid.n + m) * grid.n + m
        };
        let mut lifted: [Vec<Quaternion>; 2] = [Vec::new(), Vec::new()];
        for c in 0..2 {
            let mut out = raw[c].clone();
            let mut seen = vec![false; grid.len()];
            let root = if c == 0 {
                // nonnegative real part at the chart origin
                if out[centre].real() < 0.0 {
                    out[centre] = -out[centre];
                }
                centre
            } else {
                // a vertex in the overlap, signed against the first chart
                let target = (grid.radius / grid.spacing()).round() as usize;
                let root = ((grid.n / 2 + target.min(grid.n / 2 - 1)) * grid.n + grid.n / 2) * grid.n + grid.n / 2;
                let x = grid.point(1, root);
                let near = grid.nearest(0, &x).ok_or(Error::LiftInconsistent(usize::MAX))?;
                if out[root].dot(lifted[0][near]) < 0.0 {
                    out[root] = -out[root];
                }
                root
            };
            seen[root] = true;
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for w in grid.neighbours(v).collect::<Vec<_>>() {
                    if !seen[w] {
                        seen[w] = true;
                        if out[w].dot(out[v]) < 0.0 {
                            out[w] = -out[w];
                        }
                        queue.push_back(w);
                    }
                }
            }
            lifted[c] = out;
        }
        let bad_edges: usize = (0..2)
            .map(|c| {
                (0..grid.len())
                    .into_par_iter()
                    .map(|v| grid.neighbours(v).filter(|&w| lifted[c][v].dot(lifted[c][w]) <= 0.0).count())
                    .sum::<usize>()
            })
            .sum();
        let bad_overlap = (0..grid.len())
            .into_par_iter()
            .filter(|&v| {
                let x = grid.point(1, v);
                grid.nearest(0, &x).is_some_and(|u| lifted[1][v].dot(lifted[0][u]) <= 0.0)
            })
            .count();
        if bad_edges + bad_overlap > 0 {
            return Err(Error::LiftInconsistent(bad_edges + bad_overlap));
        }
        Ok(RotationLift { grid, rotation, lifted })
    }

    fn eval(&self, x: &S3Point) -> S3Point {
        let q = (self.rotation)(x);
        let anchor = self
            .grid
            .nearest(0, x)
            .map(|v| self.lifted[0][v])
            .or_else(|| self.grid.nearest(1, x).map(|v| self.lifted[1][v]))
            .unwrap_or(q);
        let q = if q.dot(anchor) < 0.0 { -q } else { q };
        S3Point::normalize(q.to_array())
    }
}

/// Frame of a field in right-frame coordinates (columns), completed against
/// the given reference.
fn framing_columns(field: &Field, reference: Reference, x: &S3Point) -> [Vec3; 3] {
    let f = complete_frame(&field.eval(x).vec, &reference.frame(x));
    let rf = right_frame(x);
    f.map(|v| [dot4(&v, &rf[0]), dot4(&v, &rf[1]), dot4(&v, &rf[2])])
}

/// `[τ_X − τ_Y]` by lifting the rotation `τ_X τ_Y⁻¹`, which takes `τ_Y` to `τ_X`.
fn rotation_lift_degree(x: (&Field, Reference), y: (&Field, Reference), params: &FramingParams) -> Result<i64> {
    let rotation = |p: &S3Point| {
        let fx = framing_columns(x.0, x.1, p);
        let fy = framing_columns(y.0, y.1, p);
        // R = F_X F_Yᵀ; column k is Σ_l F_X[l] F_Y[l][k]
        let col = |k: usize| -> Vec3 { std::array::from_fn(|r| (0..3).map(|l| fx[l][r] * fy[l][k]).sum()) };
        quat_from_rotation(&[col(0), col(1), col(2)])
    };
    let lift = RotationLift::build(Grid::new(params.resolution), &rotation)?;
    let deg = degree_s3(&|p: &S3Point| lift.eval(p), params.resolution)?;
    Ok(2 * deg.value)
}

/// `[τ_X − τ_Y]`, the degree of the map S³ → SO(3) between framings completing
/// `X` and `Y`. Always even.
pub fn framing_difference_degree(x: &FieldSpec, y: &FieldSpec, params: &FramingParams) -> Result<FramingResult> {
    let fx = x.compile()?;
    let fy = y.compile()?;
    let grid = Grid::new(params.resolution);
    let rx = choose_reference(&fx, &grid, params.min_alignment);
    let ry = choose_reference(&fy, &grid, params.min_alignment);
    if let (Some(rx), Some(ry)) = (rx, ry) {
        let value = rotation_lift_degree((&fx, rx), (&fy, ry), params)?;
        return Ok(FramingResult { value, method: FramingMethod::RotationLift });
    }
    let value = right_framing_class(&fx, rx, params)? - right_framing_class(&fy, ry, params)?;
    Ok(FramingResult { value, method: FramingMethod::GaussMap })
}

/// `[τ_Z − τ_R]` against the right-invariant framing `τ_R`.
fn right_framing_class(z: &Field, reference: Option<Reference>, params: &FramingParams) -> Result<i64> {
    let hopf_plus = FieldSpec::HopfPlus.compile()?;
    match reference {
        Some(r) => rotation_lift_degree((z, r), (&hopf_plus, Reference::Right), params),
        None => {
            let m = |p: &S3Point| z.right_frame_map(p);
            Ok(-2 * hopf_invariant(&m, &params.extraction)?.value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{flow_loop, seifert_fiber_point, seifert_map};
    use crate::quat::{hopf_fiber, hopf_map, S2Point};

    fn hopf_fibre(y: Vec3, m: usize) -> OrientedLoop {
        let s = hopf_fiber(&S2Point::normalize(y), 0.0);
        OrientedLoop::new(flow_loop(1, 1, &s, m))
    }

    fn circle(c: Vec3, r: f64, m: usize) -> OrientedLoop {
        // small circle in the chart around 1, mapped back to S³
        let chart = Chart::standard()[0];
        OrientedLoop::new(
            (0..m)
                .map(|k| {
                    let t = std::f64::consts::TAU * k as f64 / m as f64;
                    chart.inverse(&[c[0] + r * t.cos(), c[1] + r * t.sin(), c[2]])
                })
                .collect(),
        )
    }

    #[test]
    fn hopf_fibres_link_once() {
        let a = hopf_fibre([1.0, 0.0, 0.0], 256);
        let b = hopf_fibre([0.0, 1.0, 0.0], 256);
        let r = gauss_linking(&a, &b).unwrap();
        assert_eq!(r.rounded, 1, "{r:?}");
        assert!(r.residual < 0.02, "{r:?}");
        assert_eq!(crossing_linking(&a, &b, &[0.3, 0.2, 0.9]).unwrap(), 1);
        assert_eq!(gauss_linking(&b, &a).unwrap().rounded, 1);
        assert_eq!(gauss_linking(&a.reversed(), &b).unwrap().rounded, -1);
        assert_eq!(crossing_linking(&a.reversed(), &b, &[0.3, 0.2, 0.9]).unwrap(), -1);
    }

    #[test]
    fn split_circles_do_not_link() {
        let a = circle([-0.5, 0.0, 0.0], 0.2, 100);
        let b = circle([0.5, 0.0, 0.0], 0.2, 100);
        assert_eq!(gauss_linking(&a, &b).unwrap().rounded, 0);
        assert_eq!(crossing_linking(&a, &b, &[0.0, 0.0, 1.0]).unwrap(), 0);
    }

    #[test]
    fn trefoil_fibres_link_six_times() {
        let a = OrientedLoop::new(flow_loop(2, 3, &seifert_fiber_point(2, 3, &[0.0, 1.0, 0.0]), 600));
        let b = OrientedLoop::new(flow_loop(2, 3, &seifert_fiber_point(2, 3, &[0.0, -0.6, 0.8]), 600));
        let g = gauss_linking(&a, &b).unwrap();
        assert_eq!(g.rounded.abs(), 6, "{g:?}");
        assert_eq!(crossing_linking(&a, &b, &[0.1, 0.7, 0.3]).unwrap(), g.rounded);
    }

    #[test]
    fn touching_loops_are_rejected() {
        let a = hopf_fibre([1.0, 0.0, 0.0], 64);
        assert!(matches!(gauss_linking(&a, &a.clone()), Err(Error::LoopsTooClose(_))));
    }

    #[test]
    fn degrees_on_s2() {
        let id = |x: &Vec3| *x;
        assert_eq!(degree_s2(&id, 40).unwrap().value, 1);
        let anti = |x: &Vec3| [-x[0], -x[1], -x[2]];
        assert_eq!(degree_s2(&anti, 40).unwrap().value, -1);
        let r = degree_s2(&double_azimuth, 40).unwrap();
        assert_eq!(r.value, 2);
        assert_eq!(r.count(), 2);
    }

    /// (φ, θ) ↦ (φ, 2θ) with θ the azimuth about e₀.
    fn double_azimuth(x: &Vec3) -> Vec3 {
        let r = x[1].hypot(x[2]);
        if r < 1e-15 {
            return *x;
        }
        let (c, s) = (x[1] / r, x[2] / r);
        [x[0], r * (c * c - s * s), r * 2.0 * s * c]
    }

    #[test]
    fn degrees_on_s3() {
        let id = |x: &S3Point| *x;
        assert_eq!(degree_s3(&id, 16).unwrap().value, 1);
        let c = S3Point::normalize([0.3, -0.5, 0.7, 0.4]).q();
        let right = move |x: &S3Point| S3Point::normalize((x.q() * c).to_array());
        assert_eq!(degree_s3(&right, 16).unwrap().value, 1);
        let square = |x: &S3Point| S3Point::normalize((x.q() * x.q()).to_array());
        let r = degree_s3(&square, 20).unwrap();
        assert_eq!(r.value, 2);
        assert_eq!(r.count(), 2);
        let conj = |x: &S3Point| S3Point::normalize(x.q().conj().to_array());
        assert_eq!(degree_s3(&conj, 16).unwrap().value, -1);
    }

    #[test]
    fn hopf_invariants() {
        let params = ExtractionParams::default();
        let h = |x: &S3Point| hopf_map(x).v();
        assert_eq!(hopf_invariant(&h, &params).unwrap().value, 1);
        let constant = |_: &S3Point| [0.0, 0.0, 1.0];
        assert_eq!(hopf_invariant(&constant, &params).unwrap().value, 0);
        let s = |x: &S3Point| seifert_map(2, 3, x).v();
        assert_eq!(hopf_invariant(&s, &params).unwrap().value.abs(), 6);
    }

    #[test]
    fn framing_of_a_field_with_itself_is_trivial() {
        let r =
            framing_difference_degree(&FieldSpec::HopfMinus, &FieldSpec::HopfMinus, &FramingParams::default()).unwrap();
        assert_eq!(r.value, 0);
    }

    #[test]
    fn framing_hopf_pair() {
        let p = FramingParams::default();
        let r = framing_difference_degree(&FieldSpec::HopfPlus, &FieldSpec::HopfMinus, &p).unwrap();
        assert_eq!(r.method, FramingMethod::RotationLift);
        assert_eq!(r.value.abs(), 2);
        let back = framing_difference_degree(&FieldSpec::HopfMinus, &FieldSpec::HopfPlus, &p).unwrap();
        assert_eq!(back.value, -r.value);
        // the Gauss-map route agrees with the lift on H₋
        let hm = FieldSpec::HopfMinus.compile().unwrap();
        let m = |x: &S3Point| hm.right_frame_map(x);
        let via_gauss = 2 * hopf_invariant(&m, &p.extraction).unwrap().value;
        assert_eq!(via_gauss, r.value);
        // H_X(Y) = ½[τ_X − τ_Y]
        assert_eq!(r.value, -2);
    }
}
