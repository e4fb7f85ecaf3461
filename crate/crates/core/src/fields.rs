//! Catalog of non-singular vector fields on S³.
//!
//! Every field evaluates to a unit tangent vector. The building blocks are the
//! Seifert fields `H_{p,q} ∝ (i·q·z1, i·p·z2)`, orthogonal lifts of two model
//! fields on S² through the Seifert maps, and the reflection
//! `R(x1, x2, x3, x4) = (x1, x2, x3, −x4)`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quat::{
    axpy4, dot4, norm4, right_frame, scale4, tangent_project, S2Point, S3Point, TangentVector, Vec3, Vec4,
};

pub const DEFAULT_PERTURBATION: f64 = 1e-3;

/// Radius (chordal, on S²) of the blending discs used for orientation flips.
pub const FLIP_RADIUS: f64 = 0.6;

/// Symbolic description of a field.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    HopfPlus,
    HopfMinus,
    Seifert { p: i64, q: i64 },
    TubularTwist { n: i64 },
    MorseSmale { n: i64 },
    PushForwardR(Box<FieldSpec>),
    Perturbed { inner: Box<FieldSpec>, seed: u64, amplitude: f64 },
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn check_seifert(p: i64, q: i64) -> Result<()> {
    if p == 0 || q <= 0 || gcd(p.abs(), q) != 1 {
        return Err(Error::InvalidSeifert { p, q });
    }
    Ok(())
}

impl FieldSpec {
    pub fn seifert(p: i64, q: i64) -> Result<Self> {
        check_seifert(p, q)?;
        Ok(FieldSpec::Seifert { p, q })
    }

    pub fn push_forward_r(self) -> Self {
        FieldSpec::PushForwardR(Box::new(self))
    }

    pub fn perturbed(self, seed: u64, amplitude: f64) -> Self {
        FieldSpec::Perturbed { inner: Box::new(self), seed, amplitude }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::HopfPlus | FieldSpec::HopfMinus => Ok(()),
            FieldSpec::Seifert { p, q } => check_seifert(*p, *q),
            FieldSpec::TubularTwist { n } | FieldSpec::MorseSmale { n } if *n < 1 => {
                Err(Error::Parse(self.to_string(), "index must be >= 1".into()))
            }
            FieldSpec::TubularTwist { .. } | FieldSpec::MorseSmale { .. } => Ok(()),
            FieldSpec::PushForwardR(inner) => inner.validate(),
            FieldSpec::Perturbed { inner, amplitude, .. } => {
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(Error::Parse(self.to_string(), "amplitude must be finite and >= 0".into()));
                }
                inner.validate()
            }
        }
    }

    /// Precomputes whatever the field needs for fast repeated evaluation.
    pub fn compile(&self) -> Result<Field> {
        self.validate()?;
        Ok(Field::build(self))
    }

    /// One-off evaluation. Use [`FieldSpec::compile`] in loops.
    pub fn eval(&self, x: &S3Point) -> TangentVector {
        Field::build(self).eval(x)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::HopfPlus => write!(f, "hopf+"),
            FieldSpec::HopfMinus => write!(f, "hopf-"),
            FieldSpec::Seifert { p, q } => write!(f, "seifert:{p},{q}"),
            FieldSpec::TubularTwist { n } => write!(f, "xn:{n}"),
            FieldSpec::MorseSmale { n } => write!(f, "ms:{n}"),
            FieldSpec::PushForwardR(inner) => write!(f, "R({inner})"),
            FieldSpec::Perturbed { inner, seed, amplitude } => {
                write!(f, "perturb({inner};seed={seed};amp={amplitude:e})")
            }
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Grammar:
    ///
    /// ```text
    /// spec := "hopf+" | "hopf-" | "seifert:" INT "," INT | "xn:" INT | "ms:" INT
    ///       | "R(" spec ")" | "perturb(" spec [";seed=" INT] [";amp=" FLOAT] ")"
    /// ```
    ///
    /// Whitespace is ignored. `seed` defaults to 1 and `amp` to 1e-3.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let spec = parse_spec(&compact).map_err(|msg| Error::Parse(s.to_string(), msg))?;
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_int(s: &str) -> std::result::Result<i64, String> {
    s.parse::<i64>().map_err(|e| format!("bad integer `{s}`: {e}"))
}

fn parse_spec(s: &str) -> std::result::Result<FieldSpec, String> {
    match s {
        "hopf+" => return Ok(FieldSpec::HopfPlus),
        "hopf-" => return Ok(FieldSpec::HopfMinus),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("seifert:") {
        let (p, q) = rest.split_once(',').ok_or("expected seifert:P,Q")?;
        return Ok(FieldSpec::Seifert { p: parse_int(p)?, q: parse_int(q)? });
    }
    if let Some(rest) = s.strip_prefix("xn:") {
        return Ok(FieldSpec::TubularTwist { n: parse_int(rest)? });
    }
    if let Some(rest) = s.strip_prefix("ms:") {
        return Ok(FieldSpec::MorseSmale { n: parse_int(rest)? });
    }
    if let Some(rest) = s.strip_prefix("R(") {
        let body = rest.strip_suffix(')').ok_or("unbalanced R(...)")?;
        return Ok(FieldSpec::PushForwardR(Box::new(parse_spec(body)?)));
    }
    if let Some(rest) = s.strip_prefix("perturb(") {
        let body = rest.strip_suffix(')').ok_or("unbalanced perturb(...)")?;
        // options follow the last top-level ';'-separated inner spec
        let mut depth = 0i32;
        let mut cut = body.len();
        for (k, ch) in body.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ';' if depth == 0 => {
                    cut = k;
                    break;
                }
                _ => {}
            }
        }
        let inner = parse_spec(&body[..cut])?;
        let mut seed = 1u64;
        let mut amplitude = DEFAULT_PERTURBATION;
        if cut < body.len() {
            for opt in body[cut + 1..].split(';') {
                let (key, val) = opt.split_once('=').ok_or_else(|| format!("bad option `{opt}`"))?;
                match key {
                    "seed" => seed = val.parse().map_err(|e| format!("bad seed `{val}`: {e}"))?,
                    "amp" => amplitude = val.parse().map_err(|e| format!("bad amp `{val}`: {e}"))?,
                    _ => return Err(format!("unknown option `{key}`")),
                }
            }
        }
        return Ok(FieldSpec::Perturbed { inner: Box::new(inner), seed, amplitude });
    }
    Err("unknown field".to_string())
}

/// Model fields on S² (north pole `N = (1, 0, 0)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sphere2Field {
    /// Gradient-like field, source at N and sink at S.
    X0,
    /// Sources at both poles; saddle at `(0, 1, 0)` and sink at `(0, −1, 0)`
    /// on the invariant equator.
    X1,
}

impl Sphere2Field {
    pub const SADDLE: Vec3 = [0.0, 1.0, 0.0];
    pub const SINK: Vec3 = [0.0, -1.0, 0.0];

    pub fn eval(&self, y: &S2Point) -> Vec3 {
        let [y1, y2, y3] = y.v();
        // y1·y − N is sin φ ∂φ (unit ∂φ) for the polar angle φ from N
        let merid = [y1 * y1 - 1.0, y1 * y2, y1 * y3];
        match self {
            Sphere2Field::X0 => merid,
            Sphere2Field::X1 => [y1 * merid[0], y1 * merid[1] - y3 * y3, y1 * merid[2] + y3 * y2],
        }
    }

    /// The field written as `ẇ = c·w` in the affine coordinate `w` of S² with
    /// `w = 0` at S and `w = ∞` at N. Returns `(Re c, Im c)`.
    pub fn log_rate(&self, y: &S2Point) -> (f64, f64) {
        let [y1, _, y3] = y.v();
        match self {
            Sphere2Field::X0 => (-1.0, 0.0),
            Sphere2Field::X1 => (-y1, y3),
        }
    }
}

/// Map from the homogeneous pair `[U : V]` to S², `N = [0 : 1]`, `S = [1 : 0]`.
fn projective_to_s2(u: (f64, f64), v: (f64, f64)) -> S2Point {
    let uu = u.0 * u.0 + u.1 * u.1;
    let vv = v.0 * v.0 + v.1 * v.1;
    // ū·v
    let re = u.0 * v.0 + u.1 * v.1;
    let im = u.0 * v.1 - u.1 * v.0;
    S2Point::normalize([vv - uu, 2.0 * re, 2.0 * im])
}

fn cpow(z: (f64, f64), n: u32) -> (f64, f64) {
    let mut acc = (1.0, 0.0);
    for _ in 0..n {
        acc = (acc.0 * z.0 - acc.1 * z.1, acc.0 * z.1 + acc.1 * z.0);
    }
    acc
}

/// The Seifert fibration `(z1, z2) ↦ [z2^q / z1^p]`.
///
/// For `p < 0` the invariant ratio is `z2^q / z̄1^|p|`. `{z1 = 0}` maps to
/// `N = (1, 0, 0)` and `{z2 = 0}` to `S = (−1, 0, 0)`.
pub fn seifert_map(p: i64, q: i64, x: &S3Point) -> S2Point {
    let ((a, b), (c, d)) = x.q().complex();
    let z1 = if p > 0 { (a, b) } else { (a, -b) };
    projective_to_s2(cpow(z1, p.unsigned_abs() as u32), cpow((c, d), q as u32))
}

/// The twist field in the framing completing `H_{n,1}`: `[P : Q̄]` with
/// `P = z2 − z1ⁿ`, `Q = z2 + z1ⁿ`. `★` is hit exactly on the fibre `{P = 0}`
/// over `(0, 1, 0)`, `−★` exactly on `{Q = 0}` over `(0, −1, 0)`; the
/// conjugate on `Q` reverses the preimage orientation of the second fibre
/// relative to the Seifert map.
pub fn twist_map(n: i64, x: &S3Point) -> Vec3 {
    let ((a, b), (c, d)) = x.q().complex();
    let u = cpow((a, b), n as u32);
    let pz = (c - u.0, d - u.1);
    let qz = (c + u.0, d + u.1);
    let pp = pz.0 * pz.0 + pz.1 * pz.1;
    let qq = qz.0 * qz.0 + qz.1 * qz.1;
    let prod = (pz.0 * qz.0 - pz.1 * qz.1, pz.0 * qz.1 + pz.1 * qz.0);
    let s = pp + qq;
    [(qq - pp) / s, 2.0 * prod.0 / s, 2.0 * prod.1 / s]
}

/// Unit Seifert field `H_{p,q}` at `x`.
pub fn seifert_vector(p: i64, q: i64, x: &S3Point) -> Vec4 {
    let [x1, x2, x3, x4] = x.coords();
    let (p, q) = (p as f64, q as f64);
    let v = [-q * x2, q * x1, -p * x4, p * x3];
    scale4(&v, 1.0 / norm4(&v))
}

/// Closed loop `t ↦ (e^{iqt} z1, e^{ipt} z2)`, `t ∈ [0, 2π)`, through `x0`.
pub fn seifert_regular_fiber(p: i64, q: i64, x0: &S3Point, m: usize) -> Result<Vec<S3Point>> {
    check_seifert(p, q)?;
    if x0.z1_abs2().sqrt() < 1e-6 || x0.z2_abs2().sqrt() < 1e-6 {
        return Err(Error::SingularFiber { p, q });
    }
    Ok(flow_loop(p, q, x0, m))
}

/// The flow loop of `H_{p,q}` through any point, including singular fibers.
pub fn flow_loop(p: i64, q: i64, x0: &S3Point, m: usize) -> Vec<S3Point> {
    let ((a, b), (c, d)) = x0.q().complex();
    (0..m)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / m as f64;
            let (s1, c1) = (q as f64 * t).sin_cos();
            let (s2, c2) = (p as f64 * t).sin_cos();
            S3Point::normalize([a * c1 - b * s1, a * s1 + b * c1, c * c2 - d * s2, c * s2 + d * c2])
        })
        .collect()
}

/// Lift of a model field on S² through `seifert_map(p, q)` to a field
/// orthogonal to `H_{p,q}`. Zero on the two singular fibers. Requires `p > 0`.
pub fn orthogonal_lift(p: i64, q: i64, f: Sphere2Field, x: &S3Point) -> Result<TangentVector> {
    check_seifert(p, q)?;
    if p < 0 {
        return Err(Error::InvalidSeifert { p, q });
    }
    Ok(TangentVector { base: *x, vec: lift_vec(p as f64, q as f64, f, x, &seifert_map(p, q, x)) })
}

fn lift_vec(p: f64, q: f64, f: Sphere2Field, x: &S3Point, y: &S2Point) -> Vec4 {
    let [x1, x2, x3, x4] = x.coords();
    let r1 = x1 * x1 + x2 * x2;
    let r2 = x3 * x3 + x4 * x4;
    let (cr, ci) = f.log_rate(y);
    let d_re = q * r1 + p * r2;
    let d_im = q * q * r1 + p * p * r2;
    let a = (-r2 * cr / d_re, -p * r2 * ci / d_im);
    let b = (r1 * cr / d_re, q * r1 * ci / d_im);
    // ż1 = a·z1, ż2 = b·z2
    [a.0 * x1 - a.1 * x2, a.0 * x2 + a.1 * x1, b.0 * x3 - b.1 * x4, b.0 * x4 + b.1 * x3]
}

/// `R(x1, x2, x3, x4) = (x1, x2, x3, −x4)`.
pub fn reflect(v: &Vec4) -> Vec4 {
    [v[0], v[1], v[2], -v[3]]
}

/// Smooth bump in `t = d²/r²`: 1 at `t = 0`, 0 for `t ≥ 1`, C¹ at both ends.
fn bump(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        (1.0 - t) * (1.0 - t) * (1.0 + 2.0 * t)
    }
}

fn bump_at(y: &S2Point, centre: &Vec3) -> f64 {
    let v = y.v();
    let d2 = (v[0] - centre[0]).powi(2) + (v[1] - centre[1]).powi(2) + (v[2] - centre[2]).powi(2);
    bump(d2 / (FLIP_RADIUS * FLIP_RADIUS))
}

/// Smooth pseudo-random trigonometric polynomial ℝ⁴ → ℝ⁴.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    terms: Vec<(Vec4, Vec4, f64)>,
}

impl Perturbation {
    const TERMS: usize = 8;

    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (0..Self::TERMS)
            .map(|_| {
                let amp: Vec4 = [0; 4].map(|_| rng.gen_range(-1.0..1.0));
                let freq: Vec4 = [0; 4].map(|_| rng.gen_range(-2.0..2.0));
                (amp, freq, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        Self { terms }
    }

    pub fn eval(&self, x: &Vec4) -> Vec4 {
        let mut out = [0.0; 4];
        for (amp, freq, phase) in &self.terms {
            out = axpy4(&out, (dot4(freq, x) + phase).sin(), amp);
        }
        scale4(&out, 1.0 / Self::TERMS as f64)
    }
}

/// A compiled field, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Field {
    spec: FieldSpec,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Seifert(f64, f64),
    HopfLift,
    MorseSmale { p: i64, flip_north: bool },
    MorseSmale2,
    Twist(i64),
    Reflected(Box<Field>),
    Perturbed(Box<Field>, Perturbation, f64),
}

impl Field {
    fn build(spec: &FieldSpec) -> Field {
        let kind = match spec {
            FieldSpec::HopfPlus => Kind::Seifert(1.0, 1.0),
            FieldSpec::HopfMinus => Kind::Seifert(-1.0, 1.0),
            FieldSpec::Seifert { p, q } => Kind::Seifert(*p as f64, *q as f64),
            FieldSpec::TubularTwist { n } => Kind::Twist(*n),
            FieldSpec::MorseSmale { n: 1 } => Kind::HopfLift,
            FieldSpec::MorseSmale { n: 2 } => Kind::MorseSmale2,
            FieldSpec::MorseSmale { n } => Kind::MorseSmale { p: (n - 1) / 2, flip_north: n % 2 == 0 },
            FieldSpec::PushForwardR(inner) => Kind::Reflected(Box::new(Field::build(inner))),
            FieldSpec::Perturbed { inner, seed, amplitude } => {
                Kind::Perturbed(Box::new(Field::build(inner)), Perturbation::from_seed(*seed), *amplitude)
            }
        };
        Field { spec: spec.clone(), kind }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    /// Unnormalized representative (never zero).
    fn raw(&self, x: &S3Point) -> Vec4 {
        match &self.kind {
            Kind::Seifert(p, q) => {
                let [x1, x2, x3, x4] = x.coords();
                [-q * x2, q * x1, -p * x4, p * x3]
            }
            Kind::HopfLift => {
                let y = seifert_map(1, 1, x);
                axpy4(&seifert_vector(1, 1, x), 1.0, &lift_vec(1.0, 1.0, Sphere2Field::X0, x, &y))
            }
            Kind::MorseSmale { p, flip_north } => {
                let y = seifert_map(*p, 1, x);
                let mut alpha = 1.0 - 2.0 * bump_at(&y, &Sphere2Field::SINK);
                if *flip_north {
                    alpha -= 2.0 * bump_at(&y, &[1.0, 0.0, 0.0]);
                }
                let h = seifert_vector(*p, 1, x);
                let a = lift_vec(*p as f64, 1.0, Sphere2Field::X1, x, &y);
                axpy4(&a, alpha, &h)
            }
            Kind::MorseSmale2 => morse_smale_2(x),
            Kind::Twist(n) => {
                let g = twist_map(*n, x);
                let [h, f1, f2] = completed_seifert_frame(*n, 1, x);
                let v = scale4(&h, g[0]);
                let v = axpy4(&v, g[1], &f1);
                axpy4(&v, g[2], &f2)
            }
            Kind::Reflected(inner) => {
                let rx = S3Point::normalize(reflect(&x.coords()));
                reflect(&inner.eval(&rx).vec)
            }
            Kind::Perturbed(inner, pert, amp) => {
                let v = inner.eval(x).vec;
                axpy4(&v, *amp, &pert.eval(&x.coords()))
            }
        }
    }

    /// Unit tangent vector of the field at `x`.
    pub fn eval(&self, x: &S3Point) -> TangentVector {
        let t = tangent_project(x, self.raw(x));
        let n = t.norm();
        TangentVector { base: *x, vec: scale4(&t.vec, 1.0 / n) }
    }

    /// The field in the right-invariant frame, `X(q)·q̄ ∈ S²`.
    pub fn right_frame_map(&self, x: &S3Point) -> Vec3 {
        let v = self.eval(x).in_right_frame();
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    }
}

/// `ℳ₂`: repelling Hopf link on the two cores; on the attracting Clifford
/// torus `|z1| = |z2|` the flow is `θ2' ∝ −sin θ2`, so the attractor (`z2`
/// real positive) and the saddle (`z2` real negative) are unlinked `(1, 0)`
/// curves running in opposite `θ1` directions.
fn morse_smale_2(x: &S3Point) -> Vec4 {
    let [x1, x2, x3, x4] = x.coords();
    let r1 = x1 * x1 + x2 * x2;
    let r2 = x3 * x3 + x4 * x4;
    let d = r1 - r2;
    let a = 2.0 * x3 + M2_CORE.0 * d;
    let b = -2.0 * x4 + M2_CORE.1 * d;
    // a·(i z1, 0) + b·(0, i z2) + d·(−r2 z1, r1 z2)
    [-a * x2 - d * r2 * x1, a * x1 - d * r2 * x2, -b * x4 + d * r1 * x3, b * x3 + d * r1 * x4]
}

/// Core rotation coefficients of `ℳ₂` on `{z2 = 0}` and `{z1 = 0}`; magnitude
/// above 2 keeps the cores non-singular, signs select the homotopy class.
const M2_CORE: (f64, f64) = (3.0, -3.0);

/// Orthonormal frame `(H, F1, F2)` completing the unit Seifert field `H_{p,q}`
/// (`p, q > 0`), obtained by projecting `j·q`, `k·q` onto `H^⊥`. Valid because
/// `H_{p,q}` is never orthogonal to `i·q` when `p > 0`.
pub fn completed_seifert_frame(p: i64, q: i64, x: &S3Point) -> [Vec4; 3] {
    let h = seifert_vector(p, q, x);
    complete_frame(&h, &right_frame(x))
}

/// Gram–Schmidt completion of a unit tangent `h` using the 2nd and 3rd vectors
/// of a reference orthonormal tangent frame.
pub fn complete_frame(h: &Vec4, reference: &[Vec4; 3]) -> [Vec4; 3] {
    let f1 = axpy4(&reference[1], -dot4(&reference[1], h), h);
    let f1 = scale4(&f1, 1.0 / norm4(&f1));
    let f2 = axpy4(&reference[2], -dot4(&reference[2], h), h);
    let f2 = axpy4(&f2, -dot4(&f2, &f1), &f1);
    let f2 = scale4(&f2, 1.0 / norm4(&f2));
    [*h, f1, f2]
}

/// `R_*` of a field spec.
pub fn push_forward_r(spec: &FieldSpec) -> FieldSpec {
    spec.clone().push_forward_r()
}

/// Morse–Smale field `ℳ_n`.
pub fn morse_smale(n: i64) -> Result<FieldSpec> {
    let s = FieldSpec::MorseSmale { n };
    s.validate()?;
    Ok(s)
}

/// Field `X_n`, collinear with `H_{n,1}` exactly along two regular fibres.
pub fn tubular_twist(n: i64) -> Result<FieldSpec> {
    let s = FieldSpec::TubularTwist { n };
    s.validate()?;
    Ok(s)
}

/// Coordinates of `spec` in the right-invariant frame, `X(q)·q̄`.
pub fn express_in_right_frame(spec: &FieldSpec, x: &S3Point) -> S2Point {
    S2Point::normalize(Field::build(spec).right_frame_map(x))
}

/// The periodic orbits of `ℳ_n` for `n ≥ 3` (`p = ⌊(n−1)/2⌋`), as closed
/// flow loops of `H_{p,1}` with `m` samples: `(L_N, L_S, L_1, L_0)`.
pub fn morse_smale_orbits(n: i64, m: usize) -> [Vec<S3Point>; 4] {
    let p = (n - 1) / 2;
    let north = S3Point::normalize([0.0, 0.0, 1.0, 0.0]);
    let south = S3Point::ONE;
    [
        flow_loop(p, 1, &north, m),
        flow_loop(p, 1, &south, m),
        flow_loop(p, 1, &seifert_fiber_point(p, 1, &Sphere2Field::SADDLE), m),
        flow_loop(p, 1, &seifert_fiber_point(p, 1, &Sphere2Field::SINK), m),
    ]
}

/// A point on the regular fibre of `seifert_map(p, q)` over `y` (`p > 0`,
/// `y` not a pole): solves `|z1|² + |z2|² = 1` with `z2^q = w·z1^p`.
pub fn seifert_fiber_point(p: i64, q: i64, y: &Vec3) -> S3Point {
    // w = (y2 + i y3)/(1 − y1) in the coordinate with w = ∞ at N
    let den = 1.0 - y[0];
    let w = (y[1] / den, y[2] / den);
    let wabs = (w.0 * w.0 + w.1 * w.1).sqrt();
    let warg = w.1.atan2(w.0);
    // z1 = s real > 0, |z2| = (wabs s^p)^{1/q}
    let (pf, qf) = (p as f64, q as f64);
    let f = |s: f64| s * s + (wabs * s.powf(pf)).powf(2.0 / qf) - 1.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    let r = (wabs * s.powf(pf)).powf(1.0 / qf);
    let ang = warg / qf;
    S3Point::normalize([s, 0.0, r * ang.cos(), r * ang.sin()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{cross3, det4, dot3, hopf_map, norm3, sub3, Quaternion};
    use rand_chacha::ChaCha8Rng;

    fn random_s3(rng: &mut ChaCha8Rng) -> S3Point {
        S3Point::normalize([0; 4].map(|_| rng.gen_range(-1.0..1.0)))
    }

    fn catalog() -> Vec<FieldSpec> {
        vec![
            FieldSpec::HopfPlus,
            FieldSpec::HopfMinus,
            FieldSpec::Seifert { p: 3, q: 2 },
            FieldSpec::Seifert { p: -2, q: 1 },
            FieldSpec::TubularTwist { n: 2 },
            FieldSpec::TubularTwist { n: 3 },
            FieldSpec::MorseSmale { n: 1 },
            FieldSpec::MorseSmale { n: 2 },
            FieldSpec::MorseSmale { n: 3 },
            FieldSpec::MorseSmale { n: 4 },
            FieldSpec::MorseSmale { n: 5 },
            FieldSpec::HopfPlus.push_forward_r(),
            FieldSpec::MorseSmale { n: 3 }.perturbed(7, 1e-3),
        ]
    }

    #[test]
    fn every_field_is_unit_and_tangent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fields: Vec<Field> = catalog().iter().map(|s| s.compile().unwrap()).collect();
        for _ in 0..2000 {
            let x = random_s3(&mut rng);
            for f in &fields {
                let raw = f.raw(&x);
                assert!(norm4(&raw) > 1e-6, "{} vanishes at {:?}", f.spec(), x);
                let v = f.eval(&x);
                assert!((v.norm() - 1.0).abs() < 1e-12);
                assert!(dot4(&v.vec, &x.coords()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn hopf_plus_examples() {
        let v = FieldSpec::HopfPlus.eval(&S3Point::ONE).vec;
        assert_eq!(v, [0.0, 1.0, 0.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let x = random_s3(&mut rng);
            let y = express_in_right_frame(&FieldSpec::HopfPlus, &x).v();
            assert!((y[0] - 1.0).abs() < 1e-12);
            // Seifert(±1, 1) are the Hopf fields exactly
            assert_eq!(FieldSpec::Seifert { p: 1, q: 1 }.eval(&x), FieldSpec::HopfPlus.eval(&x));
            assert_eq!(FieldSpec::Seifert { p: -1, q: 1 }.eval(&x), FieldSpec::HopfMinus.eval(&x));
            // ℋ₋ is right multiplication by i
            let qi = (x.q() * Quaternion::I).to_array();
            let hm = FieldSpec::HopfMinus.eval(&x).vec;
            assert!((0..4).all(|k| (qi[k] - hm[k]).abs() < 1e-14));
            // and its right-frame coordinates are ρ_q(i)
            let r = express_in_right_frame(&FieldSpec::HopfMinus, &x).v();
            let e = crate::quat::rho(&x, &[1.0, 0.0, 0.0]);
            assert!(norm3(&sub3(&r, &e)) < 1e-12);
        }
    }

    #[test]
    fn hopf_fields_collinear_on_z2_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..500 {
            let x = random_s3(&mut rng);
            let d = dot4(&FieldSpec::HopfPlus.eval(&x).vec, &FieldSpec::HopfMinus.eval(&x).vec);
            // dot = |z1|² − |z2|²
            assert!((d - (x.z1_abs2() - x.z2_abs2())).abs() < 1e-12);
        }
        let on = S3Point::normalize([0.6, 0.8, 0.0, 0.0]);
        let d = dot4(&FieldSpec::HopfPlus.eval(&on).vec, &FieldSpec::HopfMinus.eval(&on).vec);
        assert!((d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn seifert_21_closed_form() {
        let x = S3Point::normalize([0.3, -0.2, 0.5, 0.7]);
        let v = FieldSpec::Seifert { p: 2, q: 1 }.eval(&x).vec;
        // normalize(i·z1, i·2·z2)
        let e = [0.2, 0.3, -1.4, 1.0];
        let n = norm4(&e);
        assert!((0..4).all(|k| (v[k] - e[k] / n).abs() < 1e-14));
    }

    #[test]
    fn invalid_seifert_rejected() {
        for (p, q) in [(0, 1), (2, 4), (1, 0), (3, -2), (6, 9)] {
            assert!(FieldSpec::seifert(p, q).is_err());
        }
        assert!(FieldSpec::seifert(-3, 2).is_ok());
    }

    #[test]
    fn seifert_map_poles_and_fibers() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for (p, q) in [(1, 1), (2, 1), (3, 2), (-2, 1), (-1, 3)] {
            let y = seifert_map(p, q, &S3Point::normalize([0.6, -0.8, 0.0, 0.0])).v();
            assert!((y[0] + 1.0).abs() < 1e-12);
            let y = seifert_map(p, q, &S3Point::normalize([0.0, 0.0, 0.6, 0.8])).v();
            assert!((y[0] - 1.0).abs() < 1e-12);
            for _ in 0..50 {
                let x = random_s3(&mut rng);
                let y0 = seifert_map(p, q, &x).v();
                for pt in flow_loop(p, q, &x, 17) {
                    let y = seifert_map(p, q, &pt).v();
                    assert!(norm3(&sub3(&y, &y0)) < 1e-8, "({p},{q})");
                }
            }
        }
    }

    #[test]
    fn seifert_map_invariant_along_integrated_flow() {
        // RK4 integration of the unit field H_{3,2}
        let f = FieldSpec::Seifert { p: 3, q: 2 }.compile().unwrap();
        let mut x = S3Point::normalize([0.5, 0.1, -0.4, 0.6]);
        let y0 = seifert_map(3, 2, &x).v();
        let h = 0.01;
        let mut drift: f64 = 0.0;
        for _ in 0..1000 {
            let step = |p: &S3Point, k: &Vec4, s: f64| S3Point::normalize(axpy4(&p.coords(), s, k));
            let k1 = f.eval(&x).vec;
            let k2 = f.eval(&step(&x, &k1, h / 2.0)).vec;
            let k3 = f.eval(&step(&x, &k2, h / 2.0)).vec;
            let k4 = f.eval(&step(&x, &k3, h)).vec;
            let mut v = x.coords();
            for k in 0..4 {
                v[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
            }
            x = S3Point::normalize(v);
            drift = drift.max(norm3(&sub3(&seifert_map(3, 2, &x).v(), &y0)));
        }
        assert!(drift < 1e-6, "{drift}");
    }

    #[test]
    fn seifert_11_is_hopf_up_to_isometry() {
        // solve the orthogonal map from three points, then check 1000 points
        let pts = [
            S3Point::normalize([0.3, 0.5, -0.2, 0.7]),
            S3Point::normalize([-0.6, 0.1, 0.4, 0.2]),
            S3Point::normalize([0.1, -0.9, 0.3, 0.3]),
        ];
        let a: Vec<Vec3> = pts.iter().map(|p| hopf_map(p).v()).collect();
        let b: Vec<Vec3> = pts.iter().map(|p| seifert_map(1, 1, p).v()).collect();
        // orthonormal frames from the first two points; map frame to frame
        let frame = |u: &Vec3, v: &Vec3| {
            let e1 = *u;
            let w = sub3(v, &crate::quat::scale3(u, dot3(u, v)));
            let e2 = crate::quat::scale3(&w, 1.0 / norm3(&w));
            [e1, e2, cross3(&e1, &e2)]
        };
        let fa = frame(&a[0], &a[1]);
        let fb = frame(&b[0], &b[1]);
        let map = |v: &Vec3| {
            let c = [dot3(v, &fa[0]), dot3(v, &fa[1]), dot3(v, &fa[2])];
            let mut sign = 1.0;
            // the third point fixes a possible reflection
            let c3 = [dot3(&a[2], &fa[0]), dot3(&a[2], &fa[1]), dot3(&a[2], &fa[2])];
            if (c3[2] * dot3(&b[2], &fb[2])) < 0.0 {
                sign = -1.0;
            }
            let mut out = [0.0; 3];
            for k in 0..3 {
                out[k] = c[0] * fb[0][k] + c[1] * fb[1][k] + sign * c[2] * fb[2][k];
            }
            out
        };
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..1000 {
            let x = random_s3(&mut rng);
            let e = sub3(&map(&hopf_map(&x).v()), &seifert_map(1, 1, &x).v());
            assert!(norm3(&e) < 1e-9);
        }
    }

    #[test]
    fn regular_fibers() {
        let x0 = S3Point::normalize([1.0, 0.0, 1.0, 0.0]);
        let l = seifert_regular_fiber(2, 3, &x0, 400).unwrap();
        // t = 2π closes the loop: the point after the last sample is the first
        let next = flow_loop(2, 3, &x0, 400);
        assert!(next[0].chord(&l[0]) < 1e-12);
        let gap = l[399].chord(&l[0]);
        assert!(gap < 0.1);
        assert!(matches!(seifert_regular_fiber(2, 3, &S3Point::ONE, 10), Err(Error::SingularFiber { .. })));
        // (1,1) fibres are great circles
        let c = seifert_regular_fiber(1, 1, &S3Point::normalize([0.4, 0.2, 0.1, -0.3]), 64).unwrap();
        for p in &c {
            let d = dot4(&p.coords(), &c[0].coords());
            assert!(d <= 1.0 + 1e-12);
        }
        let opposite = &c[32];
        assert!(opposite.chord(&c[0].antipode()) < 1e-12);
    }

    #[test]
    fn sphere_fields() {
        let n = S2Point::normalize([1.0, 0.0, 0.0]);
        assert_eq!(Sphere2Field::X0.eval(&n), [0.0, 0.0, 0.0]);
        for z in [Sphere2Field::SADDLE, Sphere2Field::SINK, [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]] {
            assert!(norm3(&Sphere2Field::X1.eval(&S2Point::normalize(z))) < 1e-15);
        }
        // tangent to the equator at θ = π/2
        let v = Sphere2Field::X1.eval(&S2Point::normalize([0.0, 0.0, 1.0]));
        assert!(norm3(&v) > 0.5 && v[0].abs() < 1e-15);
        // flows away from N between N and the equator
        for k in 1..100 {
            let phi = k as f64 / 100.0 * std::f64::consts::FRAC_PI_2;
            let theta = k as f64 * 0.37;
            let y = [phi.cos(), phi.sin() * theta.cos(), phi.sin() * theta.sin()];
            let v = Sphere2Field::X1.eval(&S2Point::normalize(y));
            assert!(v[0] < 0.0);
            assert!(dot3(&v, &y).abs() < 1e-14);
        }
    }

    /// Finite-difference push-forward of a tangent vector through the Seifert map.
    fn push(p: i64, q: i64, x: &S3Point, v: &Vec4) -> Vec3 {
        let h = 1e-6;
        let a = seifert_map(p, q, &S3Point::normalize(axpy4(&x.coords(), h, v))).v();
        let b = seifert_map(p, q, &S3Point::normalize(axpy4(&x.coords(), -h, v))).v();
        crate::quat::scale3(&sub3(&a, &b), 0.5 / h)
    }

    #[test]
    fn lifts_push_forward_to_the_model_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for (p, q, f) in
            [(1, 1, Sphere2Field::X0), (1, 1, Sphere2Field::X1), (2, 1, Sphere2Field::X1), (3, 2, Sphere2Field::X1)]
        {
            let mut worst: f64 = 0.0;
            for _ in 0..500 {
                let x = random_s3(&mut rng);
                let a = orthogonal_lift(p, q, f, &x).unwrap();
                let h = seifert_vector(p, q, &x);
                assert!(dot4(&a.vec, &h).abs() < 1e-9);
                assert!(dot4(&a.vec, &x.coords()).abs() < 1e-12);
                let y = seifert_map(p, q, &x);
                let e = sub3(&push(p, q, &x, &a.vec), &f.eval(&y));
                worst = worst.max(norm3(&e));
            }
            assert!(worst < 1e-7, "({p},{q}) {f:?}: {worst}");
        }
        // zero over the poles
        let core = S3Point::normalize([0.6, 0.8, 0.0, 0.0]);
        assert!(orthogonal_lift(1, 1, Sphere2Field::X0, &core).unwrap().norm() < 1e-15);
        let core = S3Point::normalize([0.0, 0.0, 0.6, 0.8]);
        assert!(orthogonal_lift(2, 1, Sphere2Field::X1, &core).unwrap().norm() < 1e-15);
    }

    #[test]
    fn reflection_is_an_involution() {
        let spec = FieldSpec::MorseSmale { n: 3 };
        let once = spec.clone().push_forward_r().compile().unwrap();
        let twice = spec.clone().push_forward_r().push_forward_r().compile().unwrap();
        let base = spec.compile().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let x = random_s3(&mut rng);
            let a = twice.eval(&x).vec;
            let b = base.eval(&x).vec;
            assert!((0..4).all(|k| (a[k] - b[k]).abs() < 1e-14));
            let _ = once.eval(&x);
        }
        // R_*(ℋ₊) = (i z1, −i z2) = ℋ₋
        let r = FieldSpec::HopfPlus.push_forward_r().compile().unwrap();
        for _ in 0..100 {
            let x = random_s3(&mut rng);
            let a = r.eval(&x).vec;
            let b = FieldSpec::HopfMinus.eval(&x).vec;
            assert!((0..4).all(|k| (a[k] - b[k]).abs() < 1e-14));
        }
    }

    #[test]
    fn seifert_never_opposite_to_hopf_plus() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for (p, q) in [(1, 1), (2, 1), (3, 1), (3, 2)] {
            for _ in 0..2000 {
                let x = random_s3(&mut rng);
                let d = dot4(&seifert_vector(p, q, &x), &seifert_vector(1, 1, &x));
                assert!(d > -1.0 + 1e-6);
            }
        }
    }

    #[test]
    fn completed_frame_is_positive_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..500 {
            let x = random_s3(&mut rng);
            let [h, f1, f2] = completed_seifert_frame(3, 1, &x);
            for (a, b) in [(&h, &f1), (&h, &f2), (&f1, &f2)] {
                assert!(dot4(a, b).abs() < 1e-12);
            }
            assert!(det4([&x.coords(), &h, &f1, &f2]) > 0.99);
        }
    }

    #[test]
    fn morse_smale_orbits_are_zeros_of_the_lift() {
        for n in [3, 4, 5] {
            let p = (n - 1) / 2;
            let field = FieldSpec::MorseSmale { n }.compile().unwrap();
            let orbits = morse_smale_orbits(n, 50);
            for (k, orbit) in orbits.iter().enumerate() {
                for x in orbit {
                    let d = dot4(&field.eval(x).vec, &seifert_vector(p, 1, x));
                    let flipped = k == 3 || (k == 0 && n % 2 == 0);
                    let want = if flipped { -1.0 } else { 1.0 };
                    assert!((d - want).abs() < 1e-9, "n={n} orbit {k}: {d}");
                }
            }
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        let mut all = catalog();
        all.push(FieldSpec::Seifert { p: 3, q: 2 }.perturbed(7, 2.5e-4).push_forward_r());
        for s in all {
            let text = s.to_string();
            let back: FieldSpec = text.parse().unwrap();
            assert_eq!(back, s, "{text}");
        }
        let p: FieldSpec = "perturb(seifert:2,1;seed=7;amp=1e-3)".parse().unwrap();
        assert_eq!(p, FieldSpec::Seifert { p: 2, q: 1 }.perturbed(7, 1e-3));
        let p: FieldSpec = "perturb(R(ms:5))".parse().unwrap();
        assert_eq!(p, FieldSpec::MorseSmale { n: 5 }.push_forward_r().perturbed(1, 1e-3));
        for bad in ["hopf", "seifert:2", "seifert:2,4", "ms:0", "R(hopf+", "perturb(hopf+;x=1)"] {
            assert!(bad.parse::<FieldSpec>().is_err(), "{bad}");
        }
    }
}
