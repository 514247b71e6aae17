//! Polynomial gcd over Z[x][y].
//!
//! The working algorithm is dense and modular: reduce modulo word-sized
//! primes, evaluate the minor variable, take univariate gcds over F_p,
//! interpolate, combine primes by Chinese remaindering and accept a
//! candidate once it is stable and divides both inputs. A subresultant
//! remainder sequence with content recursion serves as the fallback when the
//! prime supply runs out, and as the reference in tests.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Monomial, Poly2};

pub(super) mod modular;

/// Dense univariate polynomial over Z, lowest degree first, no trailing zeros.
type UPoly = Vec<BigInt>;

fn trim(mut p: UPoly) -> UPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn udeg(p: &UPoly) -> usize {
    p.len() - 1
}

fn uone() -> UPoly {
    vec![BigInt::one()]
}

fn uadd(a: &UPoly, b: &UPoly) -> UPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect())
}

fn uneg(a: &UPoly) -> UPoly {
    a.iter().map(|c| -c).collect()
}

fn umul(a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    trim(r)
}

fn upow(a: &UPoly, k: usize) -> UPoly {
    (0..k).fold(uone(), |acc, _| umul(&acc, a))
}

fn uscale(a: &UPoly, c: &BigInt) -> UPoly {
    trim(a.iter().map(|x| x * c).collect())
}

fn ucontent(a: &UPoly) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn uprimitive(a: &UPoly) -> UPoly {
    if a.is_empty() {
        return Vec::new();
    }
    let mut c = ucontent(a);
    if a.last().unwrap().is_negative() {
        c = -c;
    }
    a.iter().map(|x| x / &c).collect()
}

/// `lc(b)^(deg a - deg b + 1) · a mod b`.
fn uprem(a: &UPoly, b: &UPoly) -> UPoly {
    let lb = b.last().unwrap();
    let mut r = a.clone();
    while !r.is_empty() && r.len() >= b.len() {
        let shift = r.len() - b.len();
        let lr = r.last().unwrap().clone();
        r = r.iter().map(|c| c * lb).collect();
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &lr * c;
        }
        r = trim(r);
    }
    r
}

/// Exact quotient `a / b` in Z[x]; panics if `b` does not divide `a`.
fn uexact_div(a: &UPoly, b: &UPoly) -> UPoly {
    udiv(a, b).expect("inexact polynomial division")
}

/// `a / b` when the division is exact in Z[x].
fn udiv(a: &UPoly, b: &UPoly) -> Option<UPoly> {
    if a.is_empty() {
        return Some(Vec::new());
    }
    if a.len() < b.len() {
        return None;
    }
    let lb = b.last().unwrap();
    let mut r = a.clone();
    let mut q = vec![BigInt::zero(); a.len() + 1 - b.len()];
    while !r.is_empty() {
        if r.len() < b.len() {
            return None;
        }
        let shift = r.len() - b.len();
        let (c, rem) = r.last().unwrap().div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &c * bc;
        }
        q[shift] = c;
        r = trim(r);
    }
    Some(trim(q))
}

fn ugcd(a: &UPoly, b: &UPoly) -> UPoly {
    if a.is_empty() {
        return uprimitive_signed(b);
    }
    if b.is_empty() {
        return uprimitive_signed(a);
    }
    let c = ucontent(a).gcd(&ucontent(b));
    let (u, v) = (uprimitive(a), uprimitive(b));
    if u.len() == 1 || v.len() == 1 {
        return vec![c];
    }
    let g = modular::ugcd(&u, &v).unwrap_or_else(|| ugcd_prs(&u, &v));
    uscale(&g, &c)
}

/// Primitive remainder sequence over Z.
fn ugcd_prs(a: &UPoly, b: &UPoly) -> UPoly {
    let c = ucontent(a).gcd(&ucontent(b));
    let (mut u, mut v) = (uprimitive(a), uprimitive(b));
    if u.len() < v.len() {
        std::mem::swap(&mut u, &mut v);
    }
    while !v.is_empty() {
        let r = uprem(&u, &v);
        u = v;
        v = uprimitive(&r);
    }
    uscale(&uprimitive(&u), &c)
}

fn uprimitive_signed(a: &UPoly) -> UPoly {
    if a.last().is_some_and(|c| c.is_negative()) {
        uneg(a)
    } else {
        a.clone()
    }
}

/// Element of Z[x][y]: `coeffs[j]` is the coefficient of `y^j`.
#[derive(Clone, Debug)]
struct ZPoly2 {
    coeffs: Vec<UPoly>,
}

impl ZPoly2 {
    fn trim(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_empty()) {
            self.coeffs.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn deg(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn lc(&self) -> &UPoly {
        self.coeffs.last().unwrap()
    }

    fn transpose(&self) -> Self {
        let width = self.coeffs.iter().map(|c| c.len()).max().unwrap_or(0);
        let coeffs = (0..width)
            .map(|i| {
                trim(self.coeffs.iter().map(|c| c.get(i).cloned().unwrap_or_default()).collect())
            })
            .collect();
        ZPoly2 { coeffs }.trim()
    }

    fn map(&self, f: impl Fn(&UPoly) -> UPoly) -> Self {
        ZPoly2 { coeffs: self.coeffs.iter().map(f).collect() }.trim()
    }

    fn content(&self) -> UPoly {
        self.coeffs.iter().fold(Vec::new(), |g, c| if g.len() == 1 && g[0].is_one() { g } else { ugcd(&g, c) })
    }

    fn primitive(&self) -> Self {
        let c = self.content();
        self.map(|p| uexact_div(p, &c))
    }

    fn prem(&self, v: &ZPoly2) -> ZPoly2 {
        let lv = v.lc();
        let mut r = self.clone();
        let mut e = self.deg() + 1 - v.deg();
        while !r.is_zero() && r.deg() >= v.deg() {
            let shift = r.deg() - v.deg();
            let lr = r.lc().clone();
            let mut next: Vec<UPoly> = r.coeffs.iter().map(|c| umul(c, lv)).collect();
            for (i, c) in v.coeffs.iter().enumerate() {
                next[i + shift] = uadd(&next[i + shift], &uneg(&umul(&lr, c)));
            }
            r = ZPoly2 { coeffs: next }.trim();
            e -= 1;
        }
        if e > 0 {
            let f = upow(lv, e);
            r = r.map(|c| umul(c, &f));
        }
        r
    }

    fn exact_div(&self, g: &ZPoly2) -> ZPoly2 {
        self.div(g).expect("inexact bivariate division")
    }

    fn div(&self, g: &ZPoly2) -> Option<ZPoly2> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if self.deg() < g.deg() {
            return None;
        }
        let mut r = self.clone();
        let mut q = vec![Vec::new(); self.coeffs.len() + 1 - g.coeffs.len()];
        while !r.is_zero() {
            if r.deg() < g.deg() {
                return None;
            }
            let shift = r.deg() - g.deg();
            let c = udiv(r.lc(), g.lc())?;
            for (i, gc) in g.coeffs.iter().enumerate() {
                r.coeffs[i + shift] = uadd(&r.coeffs[i + shift], &uneg(&umul(&c, gc)));
            }
            q[shift] = c;
            r = r.trim();
        }
        Some(ZPoly2 { coeffs: q }.trim())
    }

    fn deg_x(&self) -> usize {
        self.coeffs.iter().map(|c| c.len()).max().unwrap_or(1) - 1
    }

    fn one() -> Self {
        ZPoly2 { coeffs: vec![uone()] }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].len() == 1
    }
}

/// Reference gcd: content recursion plus a subresultant remainder sequence.
fn gcd2_prs(a: &ZPoly2, b: &ZPoly2) -> ZPoly2 {
    let (ca, cb) = (a.content(), b.content());
    let c = ugcd(&ca, &cb);
    let mut u = a.map(|p| uexact_div(p, &ca));
    let mut v = b.map(|p| uexact_div(p, &cb));
    if u.deg() < v.deg() {
        std::mem::swap(&mut u, &mut v);
    }
    let g = if v.deg() == 0 {
        ZPoly2::one()
    } else {
        subresultant(u, v).primitive()
    };
    g.map(|p| umul(p, &c))
}

fn subresultant(mut u: ZPoly2, mut v: ZPoly2) -> ZPoly2 {
    let mut g = uone();
    let mut h = uone();
    loop {
        let delta = u.deg() - v.deg();
        let r = u.prem(&v);
        if r.is_zero() {
            return v;
        }
        if r.deg() == 0 {
            return ZPoly2 { coeffs: vec![uone()] };
        }
        let divisor = umul(&g, &upow(&h, delta));
        u = v;
        v = r.map(|c| uexact_div(c, &divisor));
        g = u.lc().clone();
        if delta > 0 {
            h = uexact_div(&upow(&g, delta), &upow(&h, delta - 1));
        }
    }
}

fn to_z(p: &Poly2) -> (ZPoly2, BigInt) {
    let l = p.terms().fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
    let dy = p.degree(super::Var::Y) as usize;
    let mut coeffs: Vec<UPoly> = vec![Vec::new(); dy + 1];
    for (m, c) in p.terms() {
        let row = &mut coeffs[m.y as usize];
        if row.len() <= m.x as usize {
            row.resize(m.x as usize + 1, BigInt::zero());
        }
        row[m.x as usize] = (c * BigRational::from_integer(l.clone())).to_integer();
    }
    (ZPoly2 { coeffs }.trim(), l)
}

fn from_z(z: &ZPoly2, scale: &BigRational) -> Poly2 {
    Poly2::from_terms(z.coeffs.iter().enumerate().flat_map(|(j, row)| {
        row.iter().enumerate().map(move |(i, c)| {
            (Monomial::new(i as u32, j as u32), BigRational::from_integer(c.clone()) * scale)
        })
    }))
}

/// Quotients of `a` and `b` by their gcd, or `None` when the gcd is a constant.
fn cancel_z(a: &ZPoly2, b: &ZPoly2) -> Option<(ZPoly2, ZPoly2)> {
    let g = gcd2(a, b);
    if g.is_constant() {
        return None;
    }
    Some((a.exact_div(&g), b.exact_div(&g)))
}

fn gcd2(a: &ZPoly2, b: &ZPoly2) -> ZPoly2 {
    // y is the main variable; evaluate in the one of smaller degree
    if a.deg_x().max(b.deg_x()) > a.deg().max(b.deg()) {
        return gcd2(&a.transpose(), &b.transpose()).transpose();
    }
    let (ca, cb) = (a.content(), b.content());
    let c = ugcd(&ca, &cb);
    let u = a.map(|p| uexact_div(p, &ca));
    let v = b.map(|p| uexact_div(p, &cb));
    let g = if u.deg() == 0 || v.deg() == 0 {
        ZPoly2::one()
    } else {
        modular::gcd2(&u, &v).unwrap_or_else(|| gcd2_prs(&u, &v))
    };
    g.map(|p| umul(p, &c))
}

/// Divides `n` and `d` by their gcd; the ratio `n/d` is preserved.
pub(super) fn cancel(n: &Poly2, d: &Poly2) -> (Poly2, Poly2) {
    let (zn, ln) = to_z(n);
    let (zd, ld) = to_z(d);
    match cancel_z(&zn, &zd) {
        None => (n.clone(), d.clone()),
        Some((qn, qd)) => {
            let ratio = BigRational::new(ld, ln);
            (from_z(&qn, &ratio), from_z(&qd, &BigRational::one()))
        }
    }
}
