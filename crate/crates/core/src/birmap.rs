//! Words in the generators `GL₂(Z)` and `E`, their realizations as exact
//! birational maps of the torus, and the derived invariants: equality,
//! volume character, tropicalization and the induced action on boundary
//! components.
//!
//! Conventions:
//!
//! * `A[a,b;c,d]` acts by `(x,y) ↦ (x^a y^c, x^b y^d)`; its action on
//!   one-parameter subgroups (rays) is the transpose matrix.
//! * `E` acts by `(x,y) ↦ (x, y/(1+x))`.
//! * `E[n]` is `φ⁻¹ ∘ E ∘ φ` where `φ` is the monomial map whose ray action
//!   is `complement_matrix(n)`; it moves a blow-up from ray `n` to ray `-n`.
//! * In a word the leftmost letter acts last.
//!
//! Word grammar (whitespace insignificant, empty text is the identity):
//!
//! ```text
//! word := term ("*" term)*
//! term := atom ("^" int)?
//! atom := "E" | "E[" int "," int "]" | "A[" int "," int ";" int "," int "]"
//!       | "P" | "r1" | "r2" | "r3" | "id" | "(" word ")"
//! ```
//!
//! Macros: `P = E^-1 * A[0,-1;1,0]`, `r2 = A[1,0;0,-1] * E^2`, and with
//! `R = A[0,1;-1,-1]` (rays rotate `(1,0) → (0,1) → (-1,-1)`),
//! `r3 = R * r2 * R^-1`, `r1 = R^-1 * r2 * R`.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::lattice::{complement_matrix, LatticeError, LatticeVector, PLMap, UnimodularMatrix};
use crate::polyrat::{Monomial, Poly2, PolyError, RatFunc2, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BirError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("map is not volume preserving: character {0}")]
    NotVolumePreserving(String),
    #[error("arc along {0} is not generic: {1}")]
    NonGenericArc(LatticeVector, String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    Linear(UnimodularMatrix),
    Elementary(LatticeVector),
}

/// A generator raised to `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: Generator, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn linear(m: UnimodularMatrix) -> Self {
        Letter::new(Generator::Linear(m), false)
    }

    pub fn elementary(n: LatticeVector) -> Result<Self, LatticeError> {
        n.primitive()?;
        Ok(Letter::new(Generator::Elementary(n), false))
    }

    pub fn e() -> Self {
        Letter::new(Generator::Elementary(LatticeVector::new(0, 1)), false)
    }

    pub fn exponent(&self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inverted(&self) -> Self {
        Letter::new(self.generator, !self.inverse)
    }

    /// Determinant of the ray action; `E` letters contribute `+1`.
    pub fn det(&self) -> i64 {
        match self.generator {
            Generator::Linear(m) => m.det(),
            Generator::Elementary(_) => 1,
        }
    }

    pub fn tropicalize(&self) -> PLMap {
        match self.generator {
            Generator::Linear(m) => {
                let t = m.transpose();
                PLMap::linear(if self.inverse { t.inverse() } else { t })
            }
            Generator::Elementary(n) => {
                let k = PLMap::linear(complement_matrix(&n).expect("letters hold primitive rays"));
                let e = e_tropical();
                let e = if self.inverse { e.inverse() } else { e };
                k.inverse().compose(&e).compose(&k)
            }
        }
    }

    /// Applies this letter to the map `(f, g)`, i.e. returns `letter ∘ (f, g)`.
    fn act(&self, f: &RatFunc2, g: &RatFunc2) -> (RatFunc2, RatFunc2) {
        match self.generator {
            Generator::Linear(m) => {
                let m = if self.inverse { m.inverse() } else { m };
                monomial_act(&m, f, g)
            }
            Generator::Elementary(n) => {
                let phi = complement_matrix(&n).expect("letters hold primitive rays").transpose();
                let (f, g) = monomial_act(&phi, f, g);
                let one_plus = &RatFunc2::one() + &f;
                let g = if self.inverse {
                    &g * &one_plus
                } else {
                    g.checked_div(&one_plus).expect("1 + f is not identically zero")
                };
                monomial_act(&phi.inverse(), &f, &g)
            }
        }
    }

    fn act_at(&self, p: &(BigRational, BigRational)) -> Option<(BigRational, BigRational)> {
        match self.generator {
            Generator::Linear(m) => {
                let m = if self.inverse { m.inverse() } else { m };
                monomial_at(&m, p)
            }
            Generator::Elementary(n) => {
                let phi = complement_matrix(&n).expect("letters hold primitive rays").transpose();
                let (f, g) = monomial_at(&phi, p)?;
                let one_plus = BigRational::one() + &f;
                if one_plus.is_zero() {
                    return None;
                }
                let g = if self.inverse { g * one_plus } else { g / one_plus };
                monomial_at(&phi.inverse(), &(f, g))
            }
        }
    }
}

/// The tropicalization of `E`: identity on `{n₁ ≥ 0}`, `(1,0;-1,1)` on `{n₁ ≤ 0}`.
pub fn e_tropical() -> PLMap {
    PLMap::from_pieces([
        (LatticeVector::new(0, 1), UnimodularMatrix::lower_shear(-1)),
        (LatticeVector::new(0, -1), UnimodularMatrix::IDENTITY),
    ])
    .expect("valid pieces")
}

fn monomial_act(m: &UnimodularMatrix, f: &RatFunc2, g: &RatFunc2) -> (RatFunc2, RatFunc2) {
    let [a, b, c, d] = m.entries();
    let pw = |r: &RatFunc2, k: i64| r.powi(k).expect("coordinates of a dominant map are nonzero");
    (&pw(f, a) * &pw(g, c), &pw(f, b) * &pw(g, d))
}

fn qpow(q: &BigRational, k: i64) -> Option<BigRational> {
    if k < 0 && q.is_zero() {
        return None;
    }
    let base = if k < 0 { q.recip() } else { q.clone() };
    Some(num_traits::pow(base, k.unsigned_abs() as usize))
}

fn monomial_at(m: &UnimodularMatrix, p: &(BigRational, BigRational)) -> Option<(BigRational, BigRational)> {
    let [a, b, c, d] = m.entries();
    let (x, y) = p;
    Some((qpow(x, a)? * qpow(y, c)?, qpow(x, b)? * qpow(y, d)?))
}

/// A freely reduced word; the leftmost letter acts last.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut reduced: Vec<Letter> = Vec::new();
        for l in letters {
            if reduced.last() == Some(&l.inverted()) {
                reduced.pop();
            } else {
                reduced.push(l);
            }
        }
        Word { letters: reduced }
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(Letter::inverted).collect() }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        Word::new((0..k.unsigned_abs()).flat_map(|_| base.letters.iter().copied()))
    }

    /// Expansion of a named macro (`E`, `P`, `r1`, `r2`, `r3`, `id`).
    pub fn named(name: &str) -> Option<Word> {
        let parse = |s: &str| s.parse::<Word>().expect("macro body parses");
        Some(match name {
            "id" => Word::identity(),
            "E" => Word::letter(Letter::e()),
            "P" => parse("E^-1 * A[0,-1;1,0]"),
            "r2" => parse("A[1,0;0,-1] * E^2"),
            "r3" => parse("A[0,1;-1,-1] * A[1,0;0,-1] * E^2 * A[0,1;-1,-1]^-1"),
            "r1" => parse("A[0,1;-1,-1]^-1 * A[1,0;0,-1] * E^2 * A[0,1;-1,-1]"),
            _ => return None,
        })
    }

    /// Product of the ray-action determinants of the letters.
    pub fn det(&self) -> i64 {
        self.letters.iter().map(Letter::det).product()
    }

    pub fn realize(&self) -> BirationalMap {
        let (mut f, mut g) = (RatFunc2::x(), RatFunc2::y());
        for l in self.letters.iter().rev() {
            (f, g) = l.act(&f, &g);
        }
        BirationalMap { f, g }
    }

    /// Evaluates the word at a point letter by letter; `None` if some
    /// intermediate step hits a pole.
    pub fn evaluate(&self, x: &BigRational, y: &BigRational) -> Option<(BigRational, BigRational)> {
        let mut p = (x.clone(), y.clone());
        for l in self.letters.iter().rev() {
            p = l.act_at(&p)?;
        }
        Some(p)
    }

    pub fn tropicalize(&self) -> PLMap {
        self.letters.iter().fold(PLMap::identity(), |acc, l| acc.compose(&l.tropicalize()))
    }

    pub fn volume_character(&self) -> Result<i64, BirError> {
        self.realize().volume_character()
    }

    pub fn boundary_limit(&self, n: &LatticeVector) -> Result<BoundaryAction, BirError> {
        self.realize().boundary_limit(n)
    }
}

impl std::ops::Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        Word::new(self.letters.iter().chain(&rhs.letters).copied())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.generator {
            Generator::Linear(m) => {
                let [a, b, c, d] = m.entries();
                write!(f, "A[{a},{b};{c},{d}]")?;
            }
            Generator::Elementary(n) if n == LatticeVector::new(0, 1) => write!(f, "E")?,
            Generator::Elementary(n) => write!(f, "E[{},{}]", n.x, n.y)?,
        }
        if self.inverse {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "id");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = BirError;
    fn from_str(s: &str) -> Result<Word, BirError> {
        let mut p = WordParser { src: s.as_bytes(), pos: 0 };
        if p.peek().is_none() {
            return Ok(Word::identity());
        }
        let w = p.word()?;
        if p.peek().is_some() {
            return Err(p.error("unexpected input"));
        }
        Ok(w)
    }
}

struct WordParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl WordParser<'_> {
    fn error(&self, msg: &str) -> BirError {
        BirError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn peek(&mut self) -> Option<u8> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<(), BirError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn word(&mut self) -> Result<Word, BirError> {
        let mut w = self.term()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            w = &w * &self.term()?;
        }
        Ok(w)
    }

    fn term(&mut self) -> Result<Word, BirError> {
        let a = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let k = self.int()?;
            return Ok(a.pow(k));
        }
        Ok(a)
    }

    fn int(&mut self) -> Result<i64, BirError> {
        self.peek();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse().map_err(|_| BirError::Syntax { pos: start, msg: "expected integer".into() })
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn atom(&mut self) -> Result<Word, BirError> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let w = self.word()?;
            self.eat(b')')?;
            return Ok(w);
        }
        let start = self.pos;
        let name = self.ident().to_string();
        match name.as_str() {
            "E" if self.peek() == Some(b'[') => {
                self.pos += 1;
                let x = self.int()?;
                self.eat(b',')?;
                let y = self.int()?;
                self.eat(b']')?;
                Ok(Word::letter(Letter::elementary(LatticeVector::new(x, y))?))
            }
            "A" => {
                self.eat(b'[')?;
                let a = self.int()?;
                self.eat(b',')?;
                let b = self.int()?;
                self.eat(b';')?;
                let c = self.int()?;
                self.eat(b',')?;
                let d = self.int()?;
                self.eat(b']')?;
                Ok(Word::letter(Letter::linear(UnimodularMatrix::new(a, b, c, d)?)))
            }
            _ => Word::named(&name).ok_or(BirError::Syntax {
                pos: start,
                msg: if name.is_empty() { "expected generator".into() } else { format!("unknown generator '{name}'") },
            }),
        }
    }
}

/// A pair of rational functions `(f, g)` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BirationalMap {
    pub f: RatFunc2,
    pub g: RatFunc2,
}

impl BirationalMap {
    pub fn identity() -> Self {
        BirationalMap { f: RatFunc2::x(), g: RatFunc2::y() }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &BirationalMap) -> Result<BirationalMap, PolyError> {
        Ok(BirationalMap {
            f: self.f.substitute(&inner.f, &inner.g)?,
            g: self.g.substitute(&inner.f, &inner.g)?,
        })
    }

    pub fn evaluate(&self, x: &BigRational, y: &BigRational) -> Result<(BigRational, BigRational), PolyError> {
        Ok((self.f.evaluate(x, y)?, self.g.evaluate(x, y)?))
    }

    /// The constant `c` with `φ*(dlog x ∧ dlog y) = c · dlog x ∧ dlog y`.
    pub fn volume_character(&self) -> Result<i64, BirError> {
        let (a, b) = (self.f.numerator(), self.f.denominator());
        let (c, d) = (self.g.numerator(), self.g.denominator());
        if let Some(s) = crate::polyrat::dlog_jacobian_sign(a, b, c, d) {
            return Ok(s);
        }
        // not ±1: report the actual Jacobian xy·W/(abcd)
        let dq = |num: &Poly2, den: &Poly2, var: Var| {
            &(&num.derivative(var) * den) - &(num * &den.derivative(var))
        };
        let w = &(&dq(a, b, Var::X) * &dq(c, d, Var::Y)) - &(&dq(a, b, Var::Y) * &dq(c, d, Var::X));
        let lhs = &(&Poly2::x() * &Poly2::y()) * &w;
        let abcd = &(a * b) * &(c * d);
        let j = RatFunc2::normalize(lhs, abcd)?;
        Err(BirError::NotVolumePreserving(j.to_string()))
    }

    /// Limit of the map along the arc `x = λ^d t^{n₁}, y = λ^{-c} t^{n₂}` as
    /// `t → 0`, where `(c, d)` is the second row of `complement_matrix(n)`.
    /// The boundary divisor of ray `n` carries the coordinate
    /// `λ = x^{n₂} y^{-n₁}` restricted to the arc.
    pub fn boundary_limit(&self, n: &LatticeVector) -> Result<BoundaryAction, BirError> {
        let k = complement_matrix(n)?;
        let [_, _, c, d] = k.entries();
        let arc = Arc { n: *n, lx: d, ly: -c };
        let (alpha, a) = arc.leading(&self.f)?;
        let (beta, b) = arc.leading(&self.g)?;
        let ray = LatticeVector::new(a, b);
        if !ray.is_primitive() {
            return Err(BirError::NonGenericArc(*n, format!("image direction {ray} is not primitive")));
        }
        let mu = &alpha.powi(b)? * &beta.powi(-a)?;
        let lambda = RatFunc2::x();
        for exponent in [1i64, -1] {
            let base = lambda.powi(exponent)?;
            if let Some(coeff) = mu.checked_div(&base)?.as_constant() {
                return Ok(BoundaryAction { ray, coefficient: coeff.clone(), exponent });
            }
        }
        Err(BirError::NonGenericArc(*n, format!("boundary action {mu} is not c·λ^±1")))
    }
}

impl fmt::Display for BirationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.f, self.g)
    }
}

/// The map `λ ↦ coefficient · λ^exponent` from the boundary divisor of the
/// source ray to the boundary divisor of `ray`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryAction {
    pub ray: LatticeVector,
    pub coefficient: BigRational,
    pub exponent: i64,
}

impl BoundaryAction {
    pub fn apply(&self, lambda: &BigRational) -> BigRational {
        &self.coefficient * qpow(lambda, self.exponent).expect("nonzero boundary coordinate")
    }

    /// Whether the distinguished point `λ = -1` is sent to `-1`.
    pub fn preserves_distinguished_point(&self) -> bool {
        self.coefficient.is_one()
    }
}

struct Arc {
    n: LatticeVector,
    lx: i64,
    ly: i64,
}

impl Arc {
    /// Leading `t`-coefficient (a Laurent polynomial in λ, returned as a
    /// rational function in `x = λ`) and `t`-order of a polynomial on the arc.
    fn leading_poly(&self, p: &Poly2) -> (RatFunc2, i64) {
        let order = |m: &Monomial| m.x as i64 * self.n.x + m.y as i64 * self.n.y;
        let e = p.terms().map(|(m, _)| order(m)).min().expect("nonzero polynomial");
        let lam = |m: &Monomial| m.x as i64 * self.lx + m.y as i64 * self.ly;
        let lead: Vec<_> = p.terms().filter(|(m, _)| order(m) == e).collect();
        // distinct monomials of equal t-order have distinct λ-exponents
        let shift = lead.iter().map(|(m, _)| lam(m)).min().unwrap();
        let poly = Poly2::from_terms(
            lead.iter().map(|(m, c)| (Monomial::new((lam(m) - shift) as u32, 0), (*c).clone())),
        );
        let coeff = &RatFunc2::from_poly(poly) * &RatFunc2::x().powi(shift).expect("λ is nonzero");
        (coeff, e)
    }

    fn leading(&self, r: &RatFunc2) -> Result<(RatFunc2, i64), BirError> {
        if r.is_zero() {
            return Err(BirError::NonGenericArc(self.n, "coordinate vanishes".into()));
        }
        let (nc, ne) = self.leading_poly(r.numerator());
        let (dc, de) = self.leading_poly(r.denominator());
        Ok((nc.checked_div(&dc)?, ne - de))
    }
}

/// Realizes `φ⁻¹ ∘ E ∘ φ` for the monomial map `φ` whose ray action is `k`.
///
/// With `k = complement_matrix(n)` this is `E[n]`; any other `k` with
/// `k·n = (0,1)` gives the same map.
pub fn elementary_with_complement(n: &LatticeVector, k: &UnimodularMatrix) -> Result<BirationalMap, BirError> {
    n.primitive()?;
    if k.apply(n) != LatticeVector::new(0, 1) {
        return Err(BirError::NonGenericArc(*n, format!("{k} does not send {n} to (0,1)")));
    }
    let phi = Letter::linear(k.transpose());
    Ok(Word::new([phi.inverted(), Letter::e(), phi]).realize())
}

/// Fixed sample points for the refutation step of [`equal`].
fn sample_points() -> Vec<(BigRational, BigRational)> {
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    vec![(q(2, 3), q(5, 7)), (q(-3, 11), q(13, 5)), (q(7, 2), q(-2, 9)), (q(17, 19), q(23, 29))]
}

/// Decides whether two words realize the same birational map.
///
/// A single point where both words are defined and differ certifies
/// inequality; otherwise the canonical realizations are compared.
pub fn equal(w1: &Word, w2: &Word) -> bool {
    if w1 == w2 {
        return true;
    }
    for (x, y) in sample_points() {
        if let (Some(a), Some(b)) = (w1.evaluate(&x, &y), w2.evaluate(&x, &y)) {
            if a != b {
                return false;
            }
        }
    }
    w1.realize() == w2.realize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyrat::rat;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn r(s: &str) -> RatFunc2 {
        s.parse().unwrap()
    }

    fn v(x: i64, y: i64) -> LatticeVector {
        LatticeVector::new(x, y)
    }

    fn map(f: &str, g: &str) -> BirationalMap {
        BirationalMap { f: r(f), g: r(g) }
    }

    #[test]
    fn parse_examples() {
        assert_eq!(w("E").letters(), &[Letter::e()]);
        assert!(w("E * E^-1").is_empty());
        assert!(w("  ").is_empty());
        let two = w("A[1,0;1,1] * E[0,1]^2");
        assert_eq!(two.len(), 3);
        assert_eq!(two.to_string(), "A[1,0;1,1] * E * E");
        assert_eq!(w(&two.to_string()), two);
        assert_eq!(w("(E * A[0,1;1,0])^-1").to_string(), "A[0,1;1,0]^-1 * E^-1");
        assert_eq!(w("E^0"), Word::identity());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("E *".parse::<Word>(), Err(BirError::Syntax { pos: 3, .. })));
        assert!(matches!("Q".parse::<Word>(), Err(BirError::Syntax { pos: 0, .. })));
        assert!(matches!("A[2,0;0,1]".parse::<Word>(), Err(BirError::Lattice(LatticeError::NonUnimodular(..)))));
        assert!(matches!("E[2,4]".parse::<Word>(), Err(BirError::Lattice(LatticeError::NonPrimitive(_)))));
        assert!(matches!("(E".parse::<Word>(), Err(BirError::Syntax { .. })));
    }

    #[test]
    fn realize_examples() {
        assert_eq!(w("E").realize(), map("x", "y/(1+x)"));
        assert_eq!(w("E^-1").realize(), map("x", "y*(1+x)"));
        assert_eq!(w("A[-1,0;0,1]").realize(), map("1/x", "y"));
        assert_eq!(w("P").realize(), map("y", "(1+y)/x"));
        assert_eq!(w("r2").realize(), map("x", "(1+x)^2/y"));
        assert_eq!(w("r3").realize(), map("x/(x+y)^2", "y/(x+y)^2"));
        assert_eq!(w("r1").realize(), map("(1+y)^2/x", "y"));
        assert_eq!(w("id").realize(), BirationalMap::identity());
    }

    #[test]
    fn relations() {
        let id = Word::identity();
        assert!(equal(&w("E * E^-1"), &id));
        assert!(equal(&w("P^5"), &id));
        for k in 1..5 {
            assert!(!equal(&w("P").pow(k), &id), "P^{k}");
        }
        assert!(!equal(&w("P^3"), &id));
        for ri in ["r1", "r2", "r3"] {
            assert!(equal(&w(ri).pow(2), &id), "{ri}^2");
        }
        let lhs = w("A[-1,0;0,1] * E * A[-1,0;0,1]");
        assert!(equal(&lhs, &w("A[1,1;0,1] * E")));
    }

    #[test]
    fn composition_matches_substitution() {
        let (a, b) = (w("E * A[0,-1;1,0]"), w("P * E^-1"));
        let composed = a.realize().compose(&b.realize()).unwrap();
        assert_eq!((&a * &b).realize(), composed);
    }

    #[test]
    fn volume_character_examples() {
        assert_eq!(w("E").volume_character(), Ok(1));
        assert_eq!(w("A[-1,0;0,1]").volume_character(), Ok(-1));
        assert_eq!(Word::identity().volume_character(), Ok(1));
        let bad = map("x + y", "y");
        assert!(matches!(bad.volume_character(), Err(BirError::NotVolumePreserving(_))));
    }

    #[test]
    fn tropical_examples() {
        let e = w("E").tropicalize();
        assert_eq!(e.apply(&v(-1, 0)), v(-1, 1));
        assert_eq!(e.apply(&v(0, 1)), v(0, 1));
        assert_eq!(e.apply(&v(1, 5)), v(1, 5));
        assert!(w("E * E^-1").tropicalize().is_linear());
        let pair = w("A[0,-1;1,0] * E");
        let t = pair.tropicalize();
        for n in [v(-1, 0), v(2, 3), v(-3, -1)] {
            assert_eq!(t.apply(&n), pair.boundary_limit(&n).unwrap().ray);
        }
    }

    #[test]
    fn e_n_moves_n_to_minus_n() {
        for n in [v(1, 0), v(2, 3), v(-1, -1), v(3, -5)] {
            let t = Word::letter(Letter::elementary(n).unwrap()).tropicalize();
            assert_eq!(t.apply(&n), n);
            assert_eq!(t.apply(&-n), -n);
            let ti = Word::letter(Letter::elementary(n).unwrap().inverted()).tropicalize();
            assert_eq!(ti.compose(&t), PLMap::identity());
        }
    }

    #[test]
    fn boundary_limit_examples() {
        let lam = BigRational::new(5.into(), 3.into());
        for n in [v(0, 1), v(-1, 0), v(2, 3), v(-3, -2)] {
            let act = Word::identity().boundary_limit(&n).unwrap();
            assert_eq!(act.ray, n);
            assert_eq!(act.apply(&lam), lam);
        }
        let m1 = rat(-1);
        let top = w("E").boundary_limit(&v(0, 1)).unwrap();
        assert_eq!(top.ray, v(0, 1));
        assert_eq!(top.apply(&m1), m1);
        let left = w("E").boundary_limit(&v(-1, 0)).unwrap();
        assert_eq!(left.ray, v(-1, 1));
        assert_eq!(left.apply(&m1), m1);
        // A[-1,0;0,1] = (1/x, y) flips the chart on horizontal rays
        let flip = w("A[-1,0;0,1]").boundary_limit(&v(1, 0)).unwrap();
        assert_eq!(flip.ray, v(-1, 0));
        assert_eq!(flip.exponent, -1);
    }

    #[test]
    fn elementary_independent_of_complement() {
        for n in [v(0, 1), v(1, 0), v(2, 3), v(-5, 2)] {
            let k = complement_matrix(&n).unwrap();
            let canonical = Word::letter(Letter::elementary(n).unwrap()).realize();
            for s in [-2, 1, 3] {
                let other = UnimodularMatrix::lower_shear(s) * k;
                assert_eq!(elementary_with_complement(&n, &other).unwrap(), canonical);
            }
        }
        assert!(elementary_with_complement(&v(1, 0), &UnimodularMatrix::IDENTITY).is_err());
    }

    #[test]
    fn evaluate_agrees_with_realize() {
        let word = w("r1 * r2 * P");
        let (x, y) = (BigRational::new(3.into(), 7.into()), BigRational::new((-2).into(), 5.into()));
        let direct = word.evaluate(&x, &y).unwrap();
        assert_eq!(word.realize().evaluate(&x, &y).unwrap(), direct);
        assert_eq!(w("E").evaluate(&rat(-1), &rat(2)), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn letter() -> impl Strategy<Value = Letter> {
            let mats = [[0, -1, 1, 0], [1, 1, 0, 1], [-1, 0, 0, 1], [0, 1, 1, 0], [1, 0, -2, 1], [0, 1, -1, -1]];
            let rays = [(0, 1), (1, 0), (-1, 0), (0, -1), (1, 1), (1, -1)];
            let gen = prop_oneof![
                (0..mats.len()).prop_map(move |i| {
                    let [a, b, c, d] = mats[i];
                    Generator::Linear(UnimodularMatrix::new(a, b, c, d).unwrap())
                }),
                (0..rays.len()).prop_map(move |i| Generator::Elementary(v(rays[i].0, rays[i].1))),
            ];
            (gen, any::<bool>()).prop_map(|(g, inv)| Letter::new(g, inv))
        }

        fn word(max: usize) -> impl Strategy<Value = Word> {
            prop::collection::vec(letter(), 0..=max).prop_map(Word::new)
        }

        fn primitive() -> impl Strategy<Value = LatticeVector> {
            (-6i64..=6, -6i64..=6).prop_filter("primitive", |(x, y)| v(*x, *y).is_primitive()).prop_map(|(x, y)| v(x, y))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn oracle_sound(a in word(3), b in word(3)) {
                let lhs = equal(&(&a * &b.inverse()), &Word::identity());
                prop_assert_eq!(lhs, equal(&a, &b));
                prop_assert_eq!(equal(&a, &b), a.realize() == b.realize());
            }

            #[test]
            fn realize_is_homomorphism(a in word(4), b in word(4)) {
                let composed = a.realize().compose(&b.realize()).unwrap();
                prop_assert_eq!((&a * &b).realize(), composed);
            }

            #[test]
            fn character_is_product_of_dets(a in word(6)) {
                prop_assert_eq!(a.volume_character().unwrap(), a.det());
            }

            #[test]
            fn tropical_functoriality(a in word(4), b in word(4), x in -30i64..30, y in -30i64..30) {
                let n = v(x, y);
                let lhs = (&a * &b).tropicalize().apply(&n);
                prop_assert_eq!(lhs, a.tropicalize().apply(&b.tropicalize().apply(&n)));
                prop_assert_eq!(a.tropicalize().compose(&b.tropicalize()).apply(&n), lhs);
            }

            #[test]
            fn boundary_ray_matches_tropicalization(a in word(4), n in primitive()) {
                let act = a.boundary_limit(&n).unwrap();
                prop_assert_eq!(act.ray, a.tropicalize().apply(&n));
                prop_assert!(act.exponent == 1 || act.exponent == -1);
            }

            #[test]
            fn print_parse_round_trip(a in word(6)) {
                prop_assert_eq!(a.to_string().parse::<Word>().unwrap(), a);
            }
        }
    }
}
