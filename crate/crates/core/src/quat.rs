//! Quaternion arithmetic and the geometry of S³ and S².
//!
//! Coordinates follow the identification ℝ⁴ = ℍ = ℂ²:
//! `(x1, x2, x3, x4) = x1 + x2·i + x3·j + x4·k = (x1 + i·x2) + (x3 + i·x4)·j`,
//! so `z1 = x1 + i·x2` and `z2 = x3 + i·x4`.
//!
//! Orientation of S³ is "outward normal first": a basis `(a, b, c)` of
//! `T_xS³` is positive when `det(x, a, b, c) > 0`. The right-invariant frame
//! `(i·q, j·q, k·q)` is positive everywhere. S² is oriented the same way.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];
pub type Vec4 = [f64; 4];

pub const UNIT_TOL: f64 = 1e-10;

#[inline]
pub fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

#[inline]
pub fn scale3(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn det3(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    dot3(a, &cross3(b, c))
}

#[inline]
pub fn dot4(a: &Vec4, b: &Vec4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[inline]
pub fn norm4(a: &Vec4) -> f64 {
    dot4(a, a).sqrt()
}

#[inline]
pub fn axpy4(a: &Vec4, s: f64, b: &Vec4) -> Vec4 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]]
}

#[inline]
pub fn scale4(a: &Vec4, s: f64) -> Vec4 {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

pub fn det4(m: [&Vec4; 4]) -> f64 {
    // cofactor expansion along the first row
    let minor = |c: usize| -> f64 {
        let cols: Vec<usize> = (0..4).filter(|&k| k != c).collect();
        let r = |row: usize| -> Vec3 { [m[row][cols[0]], m[row][cols[1]], m[row][cols[2]]] };
        det3(&r(1), &r(2), &r(3))
    };
    m[0][0] * minor(0) - m[0][1] * minor(1) + m[0][2] * minor(2) - m[0][3] * minor(3)
}

/// A quaternion `x1 + x2 i + x3 j + x4 k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Self { x1, x2, x3, x4 }
    }

    pub fn from_array(a: Vec4) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn pure(v: &Vec3) -> Self {
        Self::new(0.0, v[0], v[1], v[2])
    }

    pub fn to_array(self) -> Vec4 {
        [self.x1, self.x2, self.x3, self.x4]
    }

    /// Real part.
    pub fn real(self) -> f64 {
        self.x1
    }

    /// Pure (imaginary) part as a 3-vector.
    pub fn im(self) -> Vec3 {
        [self.x2, self.x3, self.x4]
    }

    pub fn conj(self) -> Self {
        Self::new(self.x1, -self.x2, -self.x3, -self.x4)
    }

    pub fn norm(self) -> f64 {
        norm4(&self.to_array())
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.x1 * s, self.x2 * s, self.x3 * s, self.x4 * s)
    }

    pub fn dot(self, o: Self) -> f64 {
        dot4(&self.to_array(), &o.to_array())
    }

    /// Complex coordinates `(z1, z2)` as `(re, im)` pairs.
    pub fn complex(self) -> ((f64, f64), (f64, f64)) {
        ((self.x1, self.x2), (self.x3, self.x4))
    }

    pub fn from_complex(z1: (f64, f64), z2: (f64, f64)) -> Self {
        Self::new(z1.0, z1.1, z2.0, z2.1)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, b: Quaternion) -> Quaternion {
        qmul(self, b)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, b: Quaternion) -> Quaternion {
        Quaternion::new(self.x1 + b.x1, self.x2 + b.x2, self.x3 + b.x3, self.x4 + b.x4)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, b: Quaternion) -> Quaternion {
        Quaternion::new(self.x1 - b.x1, self.x2 - b.x2, self.x3 - b.x3, self.x4 - b.x4)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

/// Hamilton product.
pub fn qmul(a: Quaternion, b: Quaternion) -> Quaternion {
    Quaternion::new(
        a.x1 * b.x1 - a.x2 * b.x2 - a.x3 * b.x3 - a.x4 * b.x4,
        a.x1 * b.x2 + a.x2 * b.x1 + a.x3 * b.x4 - a.x4 * b.x3,
        a.x1 * b.x3 - a.x2 * b.x4 + a.x3 * b.x1 + a.x4 * b.x2,
        a.x1 * b.x4 + a.x2 * b.x3 - a.x3 * b.x2 + a.x4 * b.x1,
    )
}

/// A point of the unit 3-sphere. Always unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S3Point(Quaternion);

impl S3Point {
    pub const ONE: S3Point = S3Point(Quaternion::ONE);

    /// Renormalizes `q`; fails only for (near) zero input.
    pub fn new(q: Quaternion) -> Result<Self> {
        let n = q.norm();
        if n < 1e-300 {
            return Err(Error::DegenerateVector(n));
        }
        if (n - 1.0).abs() < UNIT_TOL {
            Ok(Self(q))
        } else {
            Ok(Self(q.scale(1.0 / n)))
        }
    }

    /// Like [`S3Point::new`] but panics on the zero vector. For internal use on
    /// values that are unit up to rounding.
    pub fn normalize(a: Vec4) -> Self {
        Self::new(Quaternion::from_array(a)).expect("zero vector is not a point of S3")
    }

    pub fn q(&self) -> Quaternion {
        self.0
    }

    pub fn coords(&self) -> Vec4 {
        self.0.to_array()
    }

    pub fn antipode(&self) -> Self {
        Self(-self.0)
    }

    /// Euclidean (chordal) distance in ℝ⁴.
    pub fn chord(&self, o: &S3Point) -> f64 {
        (self.0 - o.0).norm()
    }

    pub fn z1_abs2(&self) -> f64 {
        self.0.x1 * self.0.x1 + self.0.x2 * self.0.x2
    }

    pub fn z2_abs2(&self) -> f64 {
        self.0.x3 * self.0.x3 + self.0.x4 * self.0.x4
    }
}

/// A point of the unit 2-sphere in ℝ³ = Im ℍ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S2Point(Vec3);

impl S2Point {
    pub fn new(v: Vec3) -> Result<Self> {
        let n = norm3(&v);
        if n < 1e-300 {
            return Err(Error::DegenerateVector(n));
        }
        if (n - 1.0).abs() < UNIT_TOL {
            Ok(Self(v))
        } else {
            Ok(Self(scale3(&v, 1.0 / n)))
        }
    }

    pub fn normalize(v: Vec3) -> Self {
        Self::new(v).expect("zero vector is not a point of S2")
    }

    pub fn v(&self) -> Vec3 {
        self.0
    }

    /// Orthonormal basis `(e1, e2)` of the tangent plane with `(self, e1, e2)`
    /// positively oriented, built from the coordinate axis least aligned with
    /// the point.
    pub fn tangent_basis(&self) -> (Vec3, Vec3) {
        tangent_basis_with(&self.0, least_aligned_axis(&self.0))
    }
}

/// Index of the coordinate axis least aligned with `v`.
pub fn least_aligned_axis(v: &Vec3) -> usize {
    let a = [v[0].abs(), v[1].abs(), v[2].abs()];
    if a[0] <= a[1] && a[0] <= a[2] {
        0
    } else if a[1] <= a[2] {
        1
    } else {
        2
    }
}

/// Gram–Schmidt of axis `axis` against unit `v`; returns `(e1, e2)` with
/// `det(v, e1, e2) = +1`. Smooth in `v` as long as `v` stays away from the axis.
pub fn tangent_basis_with(v: &Vec3, axis: usize) -> (Vec3, Vec3) {
    let mut r = [0.0; 3];
    r[axis] = 1.0;
    let e = sub3(&r, &scale3(v, dot3(&r, v)));
    let e1 = scale3(&e, 1.0 / norm3(&e));
    let e2 = cross3(v, &e1);
    (e1, e2)
}

/// A 4-vector attached to a point of S³ and orthogonal to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: S3Point,
    pub vec: Vec4,
}

impl TangentVector {
    pub fn norm(&self) -> f64 {
        norm4(&self.vec)
    }

    pub fn unit(&self) -> Result<TangentVector> {
        let n = self.norm();
        if n < 1e-12 {
            return Err(Error::DegenerateVector(n));
        }
        Ok(TangentVector { base: self.base, vec: scale4(&self.vec, 1.0 / n) })
    }

    /// Coordinates in the right-invariant frame `(i·q, j·q, k·q)`, i.e. the
    /// pure quaternion `vec · q̄`.
    pub fn in_right_frame(&self) -> Vec3 {
        (Quaternion::from_array(self.vec) * self.base.q().conj()).im()
    }
}

/// Orthogonal projection of `w` onto `T_xS³`.
pub fn tangent_project(x: &S3Point, w: Vec4) -> TangentVector {
    let xa = x.coords();
    TangentVector { base: *x, vec: axpy4(&w, -dot4(&xa, &w), &xa) }
}

/// [`tangent_project`] followed by normalization.
pub fn tangent_project_unit(x: &S3Point, w: Vec4) -> Result<TangentVector> {
    tangent_project(x, w).unit()
}

/// Right-invariant orthonormal frame `(i·q, j·q, k·q)` of `T_qS³`.
pub fn right_frame(q: &S3Point) -> [Vec4; 3] {
    let q = q.q();
    [(Quaternion::I * q).to_array(), (Quaternion::J * q).to_array(), (Quaternion::K * q).to_array()]
}

/// Left-invariant orthonormal frame `(q·i, q·j, q·k)` of `T_qS³`.
pub fn left_frame(q: &S3Point) -> [Vec4; 3] {
    let q = q.q();
    [(q * Quaternion::I).to_array(), (q * Quaternion::J).to_array(), (q * Quaternion::K).to_array()]
}

/// Tangent vector with right-frame coordinates `v`.
pub fn from_right_frame(q: &S3Point, v: &Vec3) -> Vec4 {
    (Quaternion::pure(v) * q.q()).to_array()
}

/// `ρ_s(v) = s·v·s⁻¹` on pure quaternions.
pub fn rho(s: &S3Point, v: &Vec3) -> Vec3 {
    let s = s.q();
    (s * Quaternion::pure(v) * s.conj()).im()
}

/// The 3×3 matrix of `ρ_s` (columns are images of the basis vectors).
pub fn rho_matrix(s: &S3Point) -> [Vec3; 3] {
    [rho(s, &[1.0, 0.0, 0.0]), rho(s, &[0.0, 1.0, 0.0]), rho(s, &[0.0, 0.0, 1.0])]
}

/// The base point ★ = i.
pub const STAR: Vec3 = [1.0, 0.0, 0.0];

/// Hopf map `s ↦ s̄·i·s`, constant on the circles `{c_u · s}` with
/// `c_u = cos u + i sin u`, i.e. on the complex lines of ℂ².
pub fn hopf_map(s: &S3Point) -> S2Point {
    S2Point::normalize(rho(&S3Point(s.q().conj()), &STAR))
}

/// Point of the Hopf fiber over `y`, parameterized by `u`:
/// `c_u · s_y` with `s_y` a fixed preimage of `y`.
pub fn hopf_fiber(y: &S2Point, u: f64) -> S3Point {
    let s = fiber_base(y);
    let c = Quaternion::new(u.cos(), u.sin(), 0.0, 0.0);
    S3Point::normalize((c * s.q()).to_array())
}

/// The preimage `s_y` of `y = (a, b, c)`: `((1 + a), 0, c, −b)/√(2(1 + a))`,
/// and `j` over the antipode of ★.
pub fn fiber_base(y: &S2Point) -> S3Point {
    let [a, b, c] = y.v();
    if 1.0 + a < 1e-12 {
        return S3Point(Quaternion::J);
    }
    S3Point::normalize([1.0 + a, 0.0, c, -b])
}

/// Stereographic chart centred at `pole`, projecting from `−pole`.
///
/// Chart coordinates are taken in the right-invariant frame at the pole, which
/// makes every chart orientation-preserving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    pub pole: S3Point,
    pub r_max: f64,
    frame: [Vec4; 3],
}

impl Chart {
    pub const DEFAULT_RADIUS: f64 = 2.5;

    pub fn new(pole: S3Point, r_max: f64) -> Self {
        Self { pole, r_max, frame: right_frame(&pole) }
    }

    /// The two standard charts around `±1`.
    pub fn standard() -> [Chart; 2] {
        [Chart::new(S3Point::ONE, Self::DEFAULT_RADIUS), Chart::new(S3Point::ONE.antipode(), Self::DEFAULT_RADIUS)]
    }

    pub fn project(&self, p: &S3Point) -> Result<Vec3> {
        let x = p.coords();
        let pa = self.pole.coords();
        let d = norm4(&axpy4(&x, 1.0, &pa));
        if d < 1e-6 {
            return Err(Error::ProjectionPole(d));
        }
        let den = 1.0 + dot4(&x, &pa);
        Ok([dot4(&x, &self.frame[0]) / den, dot4(&x, &self.frame[1]) / den, dot4(&x, &self.frame[2]) / den])
    }

    pub fn inverse(&self, y: &Vec3) -> S3Point {
        let r2 = dot3(y, y);
        let pa = self.pole.coords();
        let mut x = scale4(&pa, (1.0 - r2) / (1.0 + r2));
        for (yk, e) in y.iter().zip(&self.frame) {
            x = axpy4(&x, 2.0 * yk / (1.0 + r2), e);
        }
        S3Point::normalize(x)
    }

    pub fn in_domain(&self, y: &Vec3) -> bool {
        norm3(y) <= self.r_max
    }
}

/// Stereographic projection in the given chart.
pub fn stereographic(p: &S3Point, chart: &Chart) -> Result<Vec3> {
    chart.project(p)
}

/// Unit quaternion `t` with `ρ_t` equal to the rotation matrix `m`
/// (columns are images of basis vectors). The sign of `t` is arbitrary.
pub fn quat_from_rotation(m: &[Vec3; 3]) -> Quaternion {
    // m[c][r] = entry (r, c)
    let e = |r: usize, c: usize| m[c][r];
    let tr = e(0, 0) + e(1, 1) + e(2, 2);
    let q = if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        Quaternion::new(0.25 * s, (e(2, 1) - e(1, 2)) / s, (e(0, 2) - e(2, 0)) / s, (e(1, 0) - e(0, 1)) / s)
    } else if e(0, 0) > e(1, 1) && e(0, 0) > e(2, 2) {
        let s = (1.0 + e(0, 0) - e(1, 1) - e(2, 2)).sqrt() * 2.0;
        Quaternion::new((e(2, 1) - e(1, 2)) / s, 0.25 * s, (e(0, 1) + e(1, 0)) / s, (e(0, 2) + e(2, 0)) / s)
    } else if e(1, 1) > e(2, 2) {
        let s = (1.0 + e(1, 1) - e(0, 0) - e(2, 2)).sqrt() * 2.0;
        Quaternion::new((e(0, 2) - e(2, 0)) / s, (e(0, 1) + e(1, 0)) / s, 0.25 * s, (e(1, 2) + e(2, 1)) / s)
    } else {
        let s = (1.0 + e(2, 2) - e(0, 0) - e(1, 1)).sqrt() * 2.0;
        Quaternion::new((e(1, 0) - e(0, 1)) / s, (e(0, 2) + e(2, 0)) / s, (e(1, 2) + e(2, 1)) / s, 0.25 * s)
    };
    q.scale(1.0 / q.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close4(a: Vec4, b: Vec4, tol: f64) -> bool {
        (0..4).all(|k| (a[k] - b[k]).abs() < tol)
    }

    fn random_s3(rng: &mut ChaCha8Rng) -> S3Point {
        S3Point::normalize([
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ])
    }

    #[test]
    fn basis_relations() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        let q = Quaternion::new(0.3, -1.2, 2.0, 0.5);
        assert_eq!(q * Quaternion::ONE, q);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = Quaternion::new(h, h, 0.0, 0.0);
        assert!(close4((a * a).to_array(), [0.0, 1.0, 0.0, 0.0], 1e-15));
    }

    #[test]
    fn rho_examples() {
        let v = [0.2, -0.4, 0.9];
        assert_eq!(rho(&S3Point::ONE, &v), v);
        let i = S3Point::new(Quaternion::I).unwrap();
        let r = rho(&i, &[0.0, 1.0, 0.0]);
        assert_abs_diff_eq!(r[1], -1.0, epsilon = 1e-15);
        // (1+i)/√2 rotates by π/2 about i: j ↦ k, computed by hand
        let s = S3Point::normalize([1.0, 1.0, 0.0, 0.0]);
        let r = rho(&s, &[0.0, 1.0, 0.0]);
        assert!((r[0]).abs() < 1e-15 && (r[1]).abs() < 1e-15 && (r[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hopf_map_examples() {
        assert_eq!(hopf_map(&S3Point::ONE).v(), [1.0, 0.0, 0.0]);
        for k in 0..16 {
            let u = k as f64 * 0.41;
            let c = S3Point::normalize([u.cos(), u.sin(), 0.0, 0.0]);
            let y = hopf_map(&c).v();
            assert!((y[0] - 1.0).abs() < 1e-14);
        }
        let j = S3Point::new(Quaternion::J).unwrap();
        let y = hopf_map(&j).v();
        assert!((y[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn hopf_fiber_round_trip() {
        for u in [0.0, 0.7, 2.0, 4.5] {
            let p = hopf_fiber(&S2Point::normalize([1.0, 0.0, 0.0]), u).coords();
            assert!(close4(p, [u.cos(), u.sin(), 0.0, 0.0], 1e-15));
        }
        let y = S2Point::normalize([0.6, 0.0, 0.8]);
        let back = hopf_map(&hopf_fiber(&y, 1.3)).v();
        assert!((0..3).all(|k| (back[k] - y.v()[k]).abs() < 1e-9));
        // z2/z1 is constant along the fiber (complex line)
        let slope = |p: S3Point| {
            let ((a, b), (c, d)) = p.q().complex();
            let den = a * a + b * b;
            ((c * a + d * b) / den, (d * a - c * b) / den)
        };
        let y = S2Point::normalize([0.2, -0.5, 0.7]);
        let s0 = slope(hopf_fiber(&y, 0.0));
        for k in 1..10 {
            let s = slope(hopf_fiber(&y, k as f64 * 0.6));
            assert!((s.0 - s0.0).abs() < 1e-12 && (s.1 - s0.1).abs() < 1e-12);
        }
        // antipode
        let a = hopf_fiber(&y, 0.9).coords();
        let b = hopf_fiber(&y, 0.9 + std::f64::consts::PI).coords();
        assert!(close4(a, scale4(&b, -1.0), 1e-14));
        // fiber over the antipode of ★
        let m = S2Point::normalize([-1.0, 0.0, 0.0]);
        assert!((hopf_map(&hopf_fiber(&m, 2.2)).v()[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn chart_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for chart in Chart::standard() {
            let o = chart.project(&chart.pole).unwrap();
            assert!(norm3(&o) < 1e-15);
            let mut max_err: f64 = 0.0;
            for _ in 0..1000 {
                let p = random_s3(&mut rng);
                if let Ok(y) = chart.project(&p) {
                    let back = chart.inverse(&y);
                    max_err = max_err.max(back.chord(&p));
                }
            }
            assert!(max_err < 1e-9, "{max_err}");
            assert!(matches!(chart.project(&chart.pole.antipode()), Err(Error::ProjectionPole(_))));
        }
    }

    #[test]
    fn charts_preserve_orientation() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let pole = random_s3(&mut rng);
            let chart = Chart::new(pole, 2.5);
            let p = random_s3(&mut rng);
            let Ok(y0) = chart.project(&p) else { continue };
            let f = right_frame(&p);
            let h = 1e-6;
            let mut cols = [[0.0; 3]; 3];
            for k in 0..3 {
                let y = chart.project(&S3Point::normalize(axpy4(&p.coords(), h, &f[k]))).unwrap();
                cols[k] = scale3(&sub3(&y, &y0), 1.0 / h);
            }
            assert!(det3(&cols[0], &cols[1], &cols[2]) > 0.0);
        }
    }

    #[test]
    fn right_frame_is_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let q = random_s3(&mut rng);
            let f = right_frame(&q);
            let l = left_frame(&q);
            let qa = q.coords();
            assert!((det4([&qa, &f[0], &f[1], &f[2]]) - 1.0).abs() < 1e-12);
            assert!((det4([&qa, &l[0], &l[1], &l[2]]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tangent_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let x = random_s3(&mut rng);
            assert!(tangent_project(&x, x.coords()).norm() < 1e-15);
            let w = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
            let t = tangent_project(&x, w);
            assert!(dot4(&t.vec, &x.coords()).abs() < 1e-14);
            let t2 = tangent_project(&x, t.vec);
            assert!(close4(t.vec, t2.vec, 1e-14));
        }
        assert!(matches!(tangent_project_unit(&S3Point::ONE, [1.0, 0.0, 0.0, 0.0]), Err(Error::DegenerateVector(_))));
    }

    #[test]
    fn rotation_to_quaternion() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let s = random_s3(&mut rng);
            let t = quat_from_rotation(&rho_matrix(&s));
            assert!((t.dot(s.q()).abs() - 1.0).abs() < 1e-10);
        }
    }
}
