//! Hyperbolic-plane primitives in the upper half-plane model.
//!
//! Isometries are real 2×2 matrices of determinant one acting by
//! `z ↦ (az + b)/(cz + d)`, taken modulo sign. Two families of isometries do
//! all the work in the pants machinery:
//!
//! * [`Isometry::translation`]: hyperbolic translation along the imaginary
//!   axis, moving `i` to `e^s i`;
//! * [`Isometry::rotation`]: counterclockwise elliptic rotation about `i`.
//!
//! A *frame* is an isometry `g`, read as the unit tangent vector at `g(i)`
//! pointing along `g` applied to the upward direction. Right-multiplying a
//! frame by `translation(s)` walks forward a distance `s`; right-multiplying by
//! `rotation(θ)` turns left by `θ`.
//!
//! The closed-form right-angled polygon solvers at the bottom of the module
//! are the trigonometric inputs of the pants assembly.

use crate::error::{Error, Result};
use std::ops::Mul;

/// `|trace| - 2` scale below which the trace formula is replaced by the
/// discriminant form of the translation length.
const SMALL_TRACE: f64 = 3.0;

/// A hyperbolic element must have `tr² − 4` above this.
const HYPERBOLIC_DISC: f64 = 1e-20;

/// Determinant drift tolerated before renormalizing a product.
const DET_TOL: f64 = 1e-12;

/// Renormalizing is only meaningful when the determinant itself is known to
/// about `DET_TOL`, i.e. when `|ad| + |bc|` is moderate.
const DET_RELIABLE: f64 = 1e4;

/// `acosh` accurate near 1 and free of overflow for large arguments.
pub fn acosh(x: f64) -> f64 {
    if x < 1.0 {
        return f64::NAN;
    }
    if x > 1e8 {
        return x.ln() + std::f64::consts::LN_2;
    }
    let e = x - 1.0;
    (e + (e * (x + 1.0)).sqrt()).ln_1p()
}

/// Orientation-preserving isometry of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// A point of the upper half-plane, `x + iy` with `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const I: Point = Point { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Hyperbolic distance.
    pub fn distance(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let sq = dx * dx + dy * dy;
        // cosh d = 1 + |p - q|² / (2 y_p y_q)
        acosh(1.0 + sq / (2.0 * self.y * other.y))
    }
}

/// A point of the boundary circle `ℝ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

/// An oriented complete geodesic, given by its two ideal endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic {
    pub from: BoundaryPoint,
    pub to: BoundaryPoint,
}

impl Geodesic {
    pub fn new(from: BoundaryPoint, to: BoundaryPoint) -> Result<Self> {
        if from == to {
            return Err(Error::InvalidArgument(
                "geodesic endpoints must be distinct".into(),
            ));
        }
        if let BoundaryPoint::Finite(x) = from {
            if !x.is_finite() {
                return Err(Error::InvalidArgument("non-finite endpoint".into()));
            }
        }
        if let BoundaryPoint::Finite(x) = to {
            if !x.is_finite() {
                return Err(Error::InvalidArgument("non-finite endpoint".into()));
            }
        }
        Ok(Geodesic { from, to })
    }

    /// The imaginary axis, oriented from 0 to ∞.
    pub fn imaginary_axis() -> Self {
        Geodesic {
            from: BoundaryPoint::Finite(0.0),
            to: BoundaryPoint::Infinity,
        }
    }

    /// An isometry carrying the oriented imaginary axis onto this geodesic.
    pub fn standard_frame(&self) -> Isometry {
        use BoundaryPoint::*;
        match (self.from, self.to) {
            (Finite(p), Infinity) => Isometry::raw(1.0, p, 0.0, 1.0),
            (Infinity, Finite(q)) => Isometry::raw(q, -1.0, 1.0, 0.0),
            (Finite(p), Finite(q)) => {
                // z ↦ (q z + m p)/(z + m), det = m (q - p)
                let m = if q > p { 1.0 } else { -1.0 };
                Isometry::raw(q, m * p, 1.0, m).normalized()
            }
            (Infinity, Infinity) => unreachable!("endpoints are distinct"),
        }
    }
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    const fn raw(a: f64, b: f64, c: f64, d: f64) -> Self {
        Isometry { a, b, c, d }
    }

    /// Builds an isometry from arbitrary entries with positive determinant,
    /// scaling them to determinant one.
    pub fn from_entries(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let m = Isometry::raw(a, b, c, d);
        let det = m.det();
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "matrix determinant {det} is not positive"
            )));
        }
        Ok(m.scaled(1.0 / det.sqrt()))
    }

    /// Translation by `s` along the imaginary axis (towards ∞ for `s > 0`).
    pub fn translation(s: f64) -> Self {
        let h = 0.5 * s;
        Isometry::raw(h.exp(), 0.0, 0.0, (-h).exp())
    }

    /// Counterclockwise rotation by `theta` about `i`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        Isometry::raw(c, s, -s, c)
    }

    /// Determinant, evaluated with Kahan's fused-multiply-add scheme.
    pub fn det(&self) -> f64 {
        let w = self.b * self.c;
        let err = (-self.b).mul_add(self.c, w);
        let f = self.a.mul_add(self.d, -w);
        f + err
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    fn scaled(&self, k: f64) -> Self {
        Isometry::raw(self.a * k, self.b * k, self.c * k, self.d * k)
    }

    fn normalized(self) -> Self {
        let cond = (self.a * self.d).abs() + (self.b * self.c).abs();
        if cond > DET_RELIABLE {
            return self;
        }
        let det = self.det();
        if det > 0.0 && (det - 1.0).abs() > DET_TOL {
            self.scaled(1.0 / det.sqrt())
        } else {
            self
        }
    }

    pub fn inverse(&self) -> Self {
        Isometry::raw(self.d, -self.b, -self.c, self.a)
    }

    /// Product `self · rhs` without renormalization.
    fn product(&self, rhs: &Isometry) -> Isometry {
        Isometry::raw(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }

    pub fn compose(&self, rhs: &Isometry) -> Isometry {
        self.product(rhs).normalized()
    }

    pub fn conjugate_by(&self, g: &Isometry) -> Isometry {
        g.compose(self).compose(&g.inverse())
    }

    /// Largest entrywise distance to `+I` or `-I`, whichever is closer.
    pub fn distance_to_identity(&self) -> f64 {
        let plus = (self.a - 1.0)
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max((self.d - 1.0).abs());
        let minus = (self.a + 1.0)
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max((self.d + 1.0).abs());
        plus.min(minus)
    }

    pub fn apply(&self, p: Point) -> Point {
        // (a z + b)/(c z + d) with z = x + iy
        let nr = self.a * p.x + self.b;
        let ni = self.a * p.y;
        let dr = self.c * p.x + self.d;
        let di = self.c * p.y;
        let den = dr * dr + di * di;
        Point {
            x: (nr * dr + ni * di) / den,
            y: (ni * dr - nr * di) / den,
        }
    }

    pub fn apply_boundary(&self, p: BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => {
                if self.c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
            BoundaryPoint::Finite(x) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((self.a * x + self.b) / den)
                }
            }
        }
    }

    /// `sqrt(tr² − 4)`, i.e. `2 sinh(ℓ/2)` for a hyperbolic element.
    ///
    /// Near `|tr| = 2` the discriminant `(a − d)² + 4bc` is used, which keeps
    /// full relative accuracy for translations of length down to ~1e-10.
    pub fn sqrt_discriminant(&self) -> f64 {
        let tr = self.trace().abs();
        if tr >= SMALL_TRACE {
            ((tr - 2.0) * (tr + 2.0)).sqrt()
        } else {
            let diff = self.a - self.d;
            let disc = diff * diff + 4.0 * self.b * self.c;
            disc.max(0.0).sqrt()
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        let s = self.sqrt_discriminant();
        s * s > HYPERBOLIC_DISC
    }

    /// Translation length `2 arccosh(|tr|/2)`.
    pub fn translation_length(&self) -> Result<f64> {
        if !self.is_hyperbolic() {
            return Err(Error::NotHyperbolic {
                trace: self.trace(),
            });
        }
        let tr = self.trace().abs();
        if tr >= SMALL_TRACE {
            Ok(2.0 * acosh(0.5 * tr))
        } else {
            Ok(2.0 * (0.5 * self.sqrt_discriminant()).asinh())
        }
    }

    /// Cosine of the angle at which the axis of `self` crosses the imaginary
    /// axis, measured between the upward direction and the direction of
    /// translation. Equals `(x₊ + x₋)/(x₊ − x₋)` for attracting and repelling
    /// fixed points `x₊`, `x₋`; the magnitude exceeds 1 when the axes do not
    /// meet.
    pub fn axis_cosine(&self) -> Result<f64> {
        if !self.is_hyperbolic() {
            return Err(Error::NotHyperbolic {
                trace: self.trace(),
            });
        }
        let sign = self.trace().signum();
        Ok(sign * (self.a - self.d) / self.sqrt_discriminant())
    }

    /// Repelling and attracting fixed points, in that order.
    pub fn fixed_points(&self) -> Result<(BoundaryPoint, BoundaryPoint)> {
        if !self.is_hyperbolic() {
            return Err(Error::NotHyperbolic {
                trace: self.trace(),
            });
        }
        let sign = self.trace().signum();
        let root = self.sqrt_discriminant();
        // eigenvalues λ = (tr ± root)/2, fixed point x = (λ - d)/c
        let big = 0.5 * (self.trace() + sign * root);
        let small = 0.5 * (self.trace() - sign * root);
        if self.c == 0.0 {
            // fixed points b/(d - a) and ∞; ∞ attracts when |a| > |d|
            let finite = BoundaryPoint::Finite(self.b / (self.d - self.a));
            return Ok(if self.a.abs() > self.d.abs() {
                (finite, BoundaryPoint::Infinity)
            } else {
                (BoundaryPoint::Infinity, finite)
            });
        }
        Ok((
            BoundaryPoint::Finite((small - self.d) / self.c),
            BoundaryPoint::Finite((big - self.d) / self.c),
        ))
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, rhs: Isometry) -> Isometry {
        self.compose(&rhs)
    }
}

impl Mul<&Isometry> for &Isometry {
    type Output = Isometry;

    fn mul(self, rhs: &Isometry) -> Isometry {
        self.compose(rhs)
    }
}

/// Translation length of `m`.
pub fn translation_length(m: &Isometry) -> Result<f64> {
    m.translation_length()
}

/// Hyperbolic isometry with the given axis and signed translation length;
/// positive `dist` moves towards `axis.to`.
pub fn axis_translation(axis: &Geodesic, dist: f64) -> Isometry {
    let g = axis.standard_frame();
    Isometry::translation(dist).conjugate_by(&g)
}

/// Side opposite `gamma` in a right-angled hexagon with consecutive sides
/// `a, gamma, b`.
pub fn hexagon_side(a: f64, gamma: f64, b: f64) -> Result<f64> {
    let arg = a.sinh() * b.sinh() * gamma.cosh() - a.cosh() * b.cosh();
    if !(arg > 1.0) {
        return Err(Error::DegenerateHexagon { arg });
    }
    Ok(acosh(arg))
}

/// Side of a right-angled hexagon opposite `opposite`, given the other two
/// alternate sides `a` and `b`. Always defined for positive inputs.
pub fn alternate_side(opposite: f64, a: f64, b: f64) -> f64 {
    let arg = (opposite.cosh() + a.cosh() * b.cosh()) / (a.sinh() * b.sinh());
    acosh(arg)
}

/// Side `z` of a right-angled pentagon opposite the consecutive pair `x, y`:
/// `cosh z = sinh x sinh y`.
pub fn pentagon_side(x: f64, y: f64) -> Result<f64> {
    let arg = x.sinh() * y.sinh();
    if arg >= 1.0 {
        Ok(acosh(arg))
    } else if arg >= 1.0 - DET_TOL {
        Ok(0.0)
    } else {
        Err(Error::DegeneratePentagon { arg })
    }
}

/// Inverse of [`pentagon_side`] in its second argument: the `y` with
/// `cosh z = sinh x sinh y`.
pub fn pentagon_leg(z: f64, x: f64) -> f64 {
    (z.cosh() / x.sinh()).asinh()
}

/// Side of a Lambert-type quadrilateral: `sinh d = sinh(leg) cosh(offset)`.
pub fn quad_opposite(leg: f64, base_offset: f64) -> f64 {
    (leg.sinh() * base_offset.cosh()).asinh()
}

/// Width of the standard embedded collar about a simple closed geodesic of
/// length `l`.
pub fn collar_width(l: f64) -> f64 {
    (1.0 / (0.5 * l).sinh()).asinh()
}
