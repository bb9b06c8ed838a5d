//! Scalar function classes: functions on the extended line, trigonometric
//! polynomials, and finite sums of their products.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::SymbolError;

/// Half-width of the transition zone of the catalog step functions.
pub const TRANSITION_HALF_WIDTH: f64 = 0.2;

/// A point of the two-point compactified line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Maps a compactified coordinate `p` in [-1, 1] to the extended line via
    /// the inverse of `x / (1 + |x|)`.
    pub fn from_compact(p: f64) -> Self {
        if p <= -1.0 {
            ExtReal::NegInf
        } else if p >= 1.0 {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(p / (1.0 - p.abs()))
        }
    }
}

/// Smooth transition: 0 for `y <= 0`, 1 for `y >= 1`, C-infinity in between.
pub fn transition(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let a = f(y);
    let b = f(1.0 - y);
    a / (a + b)
}

/// `exp(coef * v)`, with purely imaginary exponents reduced modulo 2π so
/// that integer turns give exactly 1.
fn exp_scaled(coef: C64, v: C64) -> C64 {
    if coef.re == 0.0 && v.im == 0.0 {
        let phase = (coef.im * v.re).rem_euclid(2.0 * PI);
        C64::from_polar(1.0, phase)
    } else {
        (coef * v).exp()
    }
}

/// Support bookkeeping: the set outside of which a function equals its limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    /// Constant everywhere.
    Empty,
    /// Equal to the limits outside `[lo, hi]`.
    Bounded(f64, f64),
}

impl Support {
    fn union(self, other: Support) -> Support {
        match (self, other) {
            (Support::Empty, s) | (s, Support::Empty) => s,
            (Support::Bounded(a, b), Support::Bounded(c, d)) => Support::Bounded(a.min(c), b.max(d)),
        }
    }

    fn shifted(self, k: f64) -> Support {
        match self {
            Support::Empty => Support::Empty,
            Support::Bounded(a, b) => Support::Bounded(a + k, b + k),
        }
    }
}

/// A continuous function on the line with limits at both infinities.
///
/// Functions are closed-form trees so they can be conjugated, shifted,
/// printed back into the expression language and compared structurally.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtendedFunction {
    Const(C64),
    /// Smooth step over `[center - width/2, center + width/2]`, rising from 0
    /// to 1 or falling from 1 to 0.
    Step { center: f64, width: f64, rising: bool },
    /// Plateau bump: 1 on `|x| <= radius/2`, 0 on `|x| >= radius`.
    Chi { radius: f64 },
    /// `exp(coef * f(x))`.
    Exp { coef: C64, arg: Box<ExtendedFunction> },
    Add(Box<ExtendedFunction>, Box<ExtendedFunction>),
    Mul(Box<ExtendedFunction>, Box<ExtendedFunction>),
    Scale(C64, Box<ExtendedFunction>),
    Conj(Box<ExtendedFunction>),
    /// `x -> f(x - k)`.
    Shift(Box<ExtendedFunction>, f64),
}

use ExtendedFunction as F;

impl ExtendedFunction {
    pub fn constant(z: C64) -> Self {
        F::Const(z)
    }

    pub fn real(v: f64) -> Self {
        F::Const(C64::new(v, 0.0))
    }

    /// The catalog `c`: 1 for `x <= -1/5`, 0 for `x >= 1/5`.
    pub fn c() -> Self {
        F::Step { center: 0.0, width: 2.0 * TRANSITION_HALF_WIDTH, rising: false }
    }

    /// The catalog `b = 1 - c`.
    pub fn b() -> Self {
        F::Step { center: 0.0, width: 2.0 * TRANSITION_HALF_WIDTH, rising: true }
    }

    /// The catalog `t = exp(2 pi i c)`.
    pub fn t() -> Self {
        F::Exp { coef: C64::new(0.0, 2.0 * PI), arg: Box::new(F::c()) }
    }

    pub fn smoothstep(center: f64, width: f64) -> Self {
        F::Step { center, width, rising: true }
    }

    pub fn chi(radius: f64) -> Self {
        F::Chi { radius }
    }

    /// `exp(2 pi i f)`.
    pub fn exp2pi(f: ExtendedFunction) -> Self {
        F::Exp { coef: C64::new(0.0, 2.0 * PI), arg: Box::new(f) }
    }

    pub fn add(self, other: ExtendedFunction) -> Self {
        F::Add(Box::new(self), Box::new(other))
    }

    pub fn mul(self, other: ExtendedFunction) -> Self {
        F::Mul(Box::new(self), Box::new(other))
    }

    pub fn scale(self, z: C64) -> Self {
        F::Scale(z, Box::new(self))
    }

    /// `x -> f(x - k)`, the translation used by the crossed-product action.
    pub fn shift(self, k: f64) -> Self {
        if k == 0.0 {
            return self;
        }
        match self {
            F::Const(z) => F::Const(z),
            F::Shift(inner, j) => {
                if j + k == 0.0 {
                    *inner
                } else {
                    F::Shift(inner, j + k)
                }
            }
            other => F::Shift(Box::new(other), k),
        }
    }

    pub fn eval(&self, x: f64) -> C64 {
        match self {
            F::Const(z) => *z,
            F::Step { center, width, rising } => {
                let s = transition((x - center + width / 2.0) / width);
                C64::new(if *rising { s } else { 1.0 - s }, 0.0)
            }
            F::Chi { radius } => {
                let r = *radius;
                let y = (r - x.abs()) / (r / 2.0);
                C64::new(transition(y), 0.0)
            }
            F::Exp { coef, arg } => exp_scaled(*coef, arg.eval(x)),
            F::Add(a, b) => a.eval(x) + b.eval(x),
            F::Mul(a, b) => a.eval(x) * b.eval(x),
            F::Scale(z, a) => z * a.eval(x),
            F::Conj(a) => a.eval(x).conj(),
            F::Shift(a, k) => a.eval(x - k),
        }
    }

    /// Evaluation on the extended line, using the limits at the infinities.
    pub fn eval_ext(&self, x: ExtReal) -> C64 {
        match x {
            ExtReal::NegInf => self.limit_minus(),
            ExtReal::PosInf => self.limit_plus(),
            ExtReal::Finite(v) => self.eval(v),
        }
    }

    pub fn limit_minus(&self) -> C64 {
        self.limit(false)
    }

    pub fn limit_plus(&self) -> C64 {
        self.limit(true)
    }

    fn limit(&self, plus: bool) -> C64 {
        match self {
            F::Const(z) => *z,
            F::Step { rising, .. } => C64::new(if *rising == plus { 1.0 } else { 0.0 }, 0.0),
            F::Chi { .. } => C64::new(0.0, 0.0),
            F::Exp { coef, arg } => exp_scaled(*coef, arg.limit(plus)),
            F::Add(a, b) => a.limit(plus) + b.limit(plus),
            F::Mul(a, b) => a.limit(plus) * b.limit(plus),
            F::Scale(z, a) => z * a.limit(plus),
            F::Conj(a) => a.limit(plus).conj(),
            F::Shift(a, _) => a.limit(plus),
        }
    }

    /// Interval outside of which the function equals its limits exactly.
    pub fn support_hint(&self) -> Support {
        match self {
            F::Const(_) => Support::Empty,
            F::Step { center, width, .. } => Support::Bounded(center - width / 2.0, center + width / 2.0),
            F::Chi { radius } => Support::Bounded(-radius, *radius),
            F::Exp { arg, .. } => arg.support_hint(),
            F::Add(a, b) | F::Mul(a, b) => a.support_hint().union(b.support_hint()),
            F::Scale(_, a) | F::Conj(a) => a.support_hint(),
            F::Shift(a, k) => a.support_hint().shifted(*k),
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            F::Const(z) => z.im == 0.0,
            F::Step { .. } | F::Chi { .. } => true,
            F::Exp { coef, arg } => coef.im == 0.0 && arg.is_real(),
            F::Add(a, b) | F::Mul(a, b) => a.is_real() && b.is_real(),
            F::Scale(z, a) => z.im == 0.0 && a.is_real(),
            F::Conj(a) | F::Shift(a, _) => a.is_real(),
        }
    }

    /// Pointwise complex conjugate, simplified structurally where possible.
    pub fn conj(&self) -> Self {
        if self.is_real() {
            return self.clone();
        }
        match self {
            F::Const(z) => F::Const(z.conj()),
            F::Exp { coef, arg } if arg.is_real() => F::Exp { coef: coef.conj(), arg: arg.clone() },
            F::Add(a, b) => F::Add(Box::new(a.conj()), Box::new(b.conj())),
            F::Mul(a, b) => F::Mul(Box::new(a.conj()), Box::new(b.conj())),
            F::Scale(z, a) => F::Scale(z.conj(), Box::new(a.conj())),
            F::Conj(a) => (**a).clone(),
            F::Shift(a, k) => F::Shift(Box::new(a.conj()), *k),
            other => F::Conj(Box::new(other.clone())),
        }
    }

    /// True if the function is a constant node.
    pub fn as_const(&self) -> Option<C64> {
        match self {
            F::Const(z) => Some(*z),
            _ => None,
        }
    }

    /// True if the function vanishes at both infinities, i.e. lies in C0.
    pub fn vanishes_at_infinity(&self) -> bool {
        self.limit_minus() == C64::new(0.0, 0.0) && self.limit_plus() == C64::new(0.0, 0.0)
    }
}

fn fmt_c64(z: C64) -> String {
    format!("{:?},{:?}", z.re, z.im)
}

impl fmt::Display for ExtendedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == F::c() {
            return write!(f, "c");
        }
        if *self == F::b() {
            return write!(f, "b");
        }
        if *self == F::t() {
            return write!(f, "t");
        }
        match self {
            F::Const(z) => write!(f, "const({})", fmt_c64(*z)),
            F::Step { center, width, rising: true } => write!(f, "smoothstep({center:?},{width:?})"),
            F::Step { center, width, rising: false } => write!(f, "stepdown({center:?},{width:?})"),
            F::Chi { radius } => write!(f, "chi({radius:?})"),
            F::Exp { coef, arg } => write!(f, "exp({},{})", fmt_c64(*coef), arg),
            F::Add(a, b) => write!(f, "sum({a},{b})"),
            F::Mul(a, b) => write!(f, "prod({a},{b})"),
            F::Scale(z, a) => write!(f, "scale({},{})", fmt_c64(*z), a),
            F::Conj(a) => write!(f, "conj({a})"),
            F::Shift(a, k) => write!(f, "shift({a},{k:?})"),
        }
    }
}

/// A trigonometric polynomial `sum_k c_k e^{ikx}`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PeriodicFunction {
    coeffs: BTreeMap<i64, C64>,
}

impl PeriodicFunction {
    pub fn from_coeffs<I: IntoIterator<Item = (i64, C64)>>(it: I) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in it {
            *coeffs.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| *c != C64::new(0.0, 0.0));
        PeriodicFunction { coeffs }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(z: C64) -> Self {
        Self::from_coeffs([(0, z)])
    }

    /// `e_k(x) = e^{ikx}`.
    pub fn e(k: i64) -> Self {
        Self::from_coeffs([(k, C64::new(1.0, 0.0))])
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, C64> {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.coeffs.iter().map(|(k, c)| c * C64::from_polar(1.0, *k as f64 * x)).sum()
    }

    pub fn mul(&self, other: &PeriodicFunction) -> Self {
        let mut out = Vec::new();
        for (k, a) in &self.coeffs {
            for (m, b) in &other.coeffs {
                out.push((k + m, a * b));
            }
        }
        Self::from_coeffs(out)
    }

    pub fn add(&self, other: &PeriodicFunction) -> Self {
        Self::from_coeffs(self.coeffs.iter().chain(other.coeffs.iter()).map(|(k, c)| (*k, *c)))
    }

    pub fn conj(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|(k, c)| (-k, c.conj())))
    }

    pub fn scale(&self, z: C64) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|(k, c)| (*k, c * z)))
    }

    /// The value if the polynomial has no nonconstant coefficient.
    pub fn constant_value(&self) -> Option<C64> {
        if self.coeffs.keys().all(|k| *k == 0) {
            Some(self.coeffs.get(&0).copied().unwrap_or(C64::new(0.0, 0.0)))
        } else {
            None
        }
    }

    /// Largest `|k|` with a nonzero coefficient.
    pub fn degree(&self) -> u64 {
        self.coeffs.keys().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for PeriodicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            let (k, c) = self.coeffs.iter().next().unwrap();
            if *c == C64::new(1.0, 0.0) {
                return write!(f, "e_k({k})");
            }
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(k, c)| format!("{k},{}", fmt_c64(*c))).collect();
        write!(f, "trig({})", parts.join(","))
    }
}

/// A finite sum `sum_i a_i(x) p_i(x)` of extended-line functions times
/// trigonometric polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct SharpElement {
    pub terms: Vec<(ExtendedFunction, PeriodicFunction)>,
}

impl SharpElement {
    pub fn new(terms: Vec<(ExtendedFunction, PeriodicFunction)>) -> Self {
        SharpElement { terms }
    }

    pub fn from_extended(a: ExtendedFunction) -> Self {
        SharpElement { terms: vec![(a, PeriodicFunction::one())] }
    }

    pub fn from_periodic(p: PeriodicFunction) -> Self {
        SharpElement { terms: vec![(F::real(1.0), p)] }
    }

    /// Surrogate for `l`: 1 for `x <= -1/5`, `e^{ix}` for `x >= 1/5`.
    pub fn l() -> Self {
        SharpElement { terms: vec![(F::c(), PeriodicFunction::one()), (F::b(), PeriodicFunction::e(1))] }
    }

    /// Mirror surrogate for `l~`: 1 for `x >= 1/5`, `e^{ix}` for `x <= -1/5`.
    pub fn ltilde() -> Self {
        SharpElement { terms: vec![(F::b(), PeriodicFunction::one()), (F::c(), PeriodicFunction::e(1))] }
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.terms.iter().map(|(a, p)| a.eval(x) * p.eval(x)).sum()
    }

    /// Value on the circle at `+inf` (`plus`) or `-inf`, at angle `theta`.
    pub fn eval_circle(&self, plus: bool, theta: f64) -> C64 {
        self.terms
            .iter()
            .map(|(a, p)| {
                let lim = if plus { a.limit_plus() } else { a.limit_minus() };
                lim * p.eval(theta)
            })
            .sum()
    }

    pub fn conj(&self) -> Self {
        SharpElement { terms: self.terms.iter().map(|(a, p)| (a.conj(), p.conj())).collect() }
    }

    pub fn mul(&self, other: &SharpElement) -> Self {
        let mut terms = Vec::new();
        for (a, p) in &self.terms {
            for (b, q) in &other.terms {
                terms.push((a.clone().mul(b.clone()), p.mul(q)));
            }
        }
        SharpElement { terms }
    }

    /// The sharp element with every extended factor replaced by its limit.
    pub fn at_infinity(&self, plus: bool) -> Self {
        SharpElement {
            terms: self
                .terms
                .iter()
                .map(|(a, p)| (F::Const(if plus { a.limit_plus() } else { a.limit_minus() }), p.clone()))
                .collect(),
        }
    }

    /// The value if the element is a constant function.
    pub fn constant_value(&self) -> Option<C64> {
        let mut total = C64::new(0.0, 0.0);
        for (a, p) in &self.terms {
            total += a.as_const()? * p.constant_value()?;
        }
        Some(total)
    }

    /// True if every extended factor is a constant.
    pub fn has_constant_extended_parts(&self) -> bool {
        self.terms.iter().all(|(a, _)| a.as_const().is_some())
    }

    /// True if every periodic factor is a constant.
    pub fn has_constant_periodic_parts(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.constant_value().is_some())
    }

    /// The collapse `sum_i a_i * p_i(0)` used when all periodic parts are
    /// constant.
    pub fn to_extended(&self) -> Option<ExtendedFunction> {
        let mut acc: Option<ExtendedFunction> = None;
        for (a, p) in &self.terms {
            let k = p.constant_value()?;
            let term = if k == C64::new(1.0, 0.0) { a.clone() } else { a.clone().scale(k) };
            acc = Some(match acc {
                None => term,
                Some(prev) => prev.add(term),
            });
        }
        Some(acc.unwrap_or(F::real(0.0)))
    }

    pub fn degree(&self) -> u64 {
        self.terms.iter().map(|(_, p)| p.degree()).max().unwrap_or(0)
    }

    pub fn support_hint(&self) -> Support {
        self.terms.iter().fold(Support::Empty, |s, (a, _)| s.union(a.support_hint()))
    }
}

impl fmt::Display for SharpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == SharpElement::l() {
            return write!(f, "l");
        }
        if *self == SharpElement::ltilde() {
            return write!(f, "ltilde");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, p)| {
                if *p == PeriodicFunction::one() {
                    format!("{a}")
                } else if *a == F::real(1.0) {
                    format!("{p}")
                } else {
                    format!("{a} . {p}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A catalog entry.
#[derive(Clone, Debug, PartialEq)]
pub enum CatalogItem {
    Extended(ExtendedFunction),
    Periodic(PeriodicFunction),
    Sharp(SharpElement),
}

/// Looks up a named function with real parameters.
pub fn catalog(name: &str, params: &[f64]) -> Result<CatalogItem, SymbolError> {
    let arity = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(SymbolError::BadParameters(format!("{name} expects {n} parameter(s), got {}", params.len())))
        }
    };
    match name {
        "c" => arity(0).map(|_| CatalogItem::Extended(F::c())),
        "b" => arity(0).map(|_| CatalogItem::Extended(F::b())),
        "t" => arity(0).map(|_| CatalogItem::Extended(F::t())),
        "l" => arity(0).map(|_| CatalogItem::Sharp(SharpElement::l())),
        "ltilde" => arity(0).map(|_| CatalogItem::Sharp(SharpElement::ltilde())),
        "e_k" => {
            arity(1)?;
            let k = params[0];
            if k.fract() != 0.0 || !k.is_finite() {
                return Err(SymbolError::BadParameters(format!("e_k needs an integer frequency, got {k}")));
            }
            Ok(CatalogItem::Periodic(PeriodicFunction::e(k as i64)))
        }
        "chi" => {
            arity(1)?;
            if !(params[0] > 0.0 && params[0].is_finite()) {
                return Err(SymbolError::BadParameters("chi needs a positive radius".into()));
            }
            Ok(CatalogItem::Extended(F::chi(params[0])))
        }
        "smoothstep" | "stepdown" => {
            arity(2)?;
            if !(params[1] > 0.0 && params[1].is_finite() && params[0].is_finite()) {
                return Err(SymbolError::BadParameters(format!("{name} needs a finite center and positive width")));
            }
            Ok(CatalogItem::Extended(F::Step { center: params[0], width: params[1], rising: name == "smoothstep" }))
        }
        "const" => {
            let z = match params.len() {
                1 => C64::new(params[0], 0.0),
                2 => C64::new(params[0], params[1]),
                n => return Err(SymbolError::BadParameters(format!("const expects 1 or 2 parameters, got {n}"))),
            };
            Ok(CatalogItem::Extended(F::Const(z)))
        }
        other => Err(SymbolError::UnknownName(other.to_string())),
    }
}

/// Evaluates a sharp element at a point.
pub fn eval_sharp(s: &SharpElement, x: f64) -> C64 {
    s.eval(x)
}
