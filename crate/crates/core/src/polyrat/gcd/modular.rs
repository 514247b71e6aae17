//! Brown-style dense modular gcd.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::{trim, udiv, udeg, uprimitive, UPoly, ZPoly2};

/// Univariate polynomial over F_p, lowest degree first, no trailing zeros.
type Fp = Vec<u64>;

const PRIME_COUNT: usize = 256;

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'bases: for b in BASES {
        let mut x = powmod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// The largest primes below 2^62, descending.
pub(crate) fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(PRIME_COUNT);
        let mut n = (1u64 << 62) - 1;
        while out.len() < PRIME_COUNT {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

pub(crate) fn reduce(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).try_into().expect("reduced below the modulus")
}

fn fp_trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_reduce(a: &UPoly, p: u64) -> Fp {
    fp_trim(a.iter().map(|c| reduce(c, p)).collect())
}

fn fp_eval(a: &Fp, x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, c| (mulmod(acc, x, p) + c) % p)
}

/// Monic gcd over F_p.
fn fp_gcd(mut u: Fp, mut v: Fp, p: u64) -> Fp {
    while !v.is_empty() {
        let li = inv(*v.last().unwrap(), p);
        while u.len() >= v.len() {
            let shift = u.len() - v.len();
            let q = mulmod(*u.last().unwrap(), li, p);
            for (i, c) in v.iter().enumerate() {
                u[i + shift] = (u[i + shift] + p - mulmod(q, *c, p)) % p;
            }
            u = fp_trim(u);
        }
        std::mem::swap(&mut u, &mut v);
    }
    let li = inv(*u.last().expect("gcd of nonzero inputs"), p);
    u.iter().map(|c| mulmod(*c, li, p)).collect()
}

/// Newton interpolation through `(xs[k], ys[k])`.
fn fp_interpolate(xs: &[u64], ys: &[u64], p: u64) -> Fp {
    let mut poly: Fp = vec![ys[0]];
    let mut basis: Fp = vec![(p - xs[0]) % p, 1];
    for k in 1..xs.len() {
        let val = fp_eval(&poly, xs[k], p);
        let den = fp_eval(&basis, xs[k], p);
        let c = mulmod((ys[k] + p - val) % p, inv(den, p), p);
        poly.resize(basis.len(), 0);
        for (i, b) in basis.iter().enumerate() {
            poly[i] = (poly[i] + mulmod(c, *b, p)) % p;
        }
        let mut next = vec![0; basis.len() + 1];
        for (i, b) in basis.iter().enumerate() {
            next[i + 1] = (next[i + 1] + b) % p;
            next[i] = (next[i] + mulmod(*b, (p - xs[k]) % p, p)) % p;
        }
        basis = next;
    }
    fp_trim(poly)
}

/// Incremental Chinese remaindering of integer coefficients, kept in the
/// symmetric range of the running modulus.
struct Crt {
    values: Vec<BigInt>,
    modulus: BigInt,
}

impl Crt {
    fn new(residues: &[u64], p: u64) -> Self {
        let m = BigInt::from(p);
        let values = residues.iter().map(|r| symmetric(BigInt::from(*r), &m)).collect();
        Crt { values, modulus: m }
    }

    /// Folds in residues modulo `p`; returns whether any value changed.
    fn add(&mut self, residues: &[u64], p: u64) -> bool {
        let m_inv = inv(reduce(&self.modulus, p), p);
        let new_mod = &self.modulus * p;
        let mut changed = false;
        for (v, r) in self.values.iter_mut().zip(residues) {
            let t = mulmod((r + p - reduce(v, p)) % p, m_inv, p);
            if t != 0 {
                changed = true;
                *v = symmetric(&*v + &self.modulus * t, &new_mod);
            }
        }
        self.modulus = new_mod;
        changed
    }
}

fn symmetric(v: BigInt, m: &BigInt) -> BigInt {
    let v = v.mod_floor(m);
    if &v * 2 > *m {
        v - m
    } else {
        v
    }
}

/// Primitive gcd of two primitive univariate polynomials of positive degree.
pub(super) fn ugcd(a: &UPoly, b: &UPoly) -> Option<UPoly> {
    let (la, lb) = (a.last().unwrap(), b.last().unwrap());
    let gamma = la.gcd(lb);
    let mut best = usize::MAX;
    let mut acc: Option<Crt> = None;
    for &p in primes() {
        if reduce(la, p) == 0 || reduce(lb, p) == 0 {
            continue;
        }
        let g = fp_gcd(fp_reduce(a, p), fp_reduce(b, p), p);
        if g.len() == 1 {
            return Some(vec![BigInt::one()]);
        }
        let d = g.len() - 1;
        if d > best {
            continue;
        }
        let scale = reduce(&gamma, p);
        let g: Fp = g.iter().map(|c| mulmod(*c, scale, p)).collect();
        let stable = match (&mut acc, d < best) {
            (Some(crt), false) => !crt.add(&g, p),
            _ => {
                acc = Some(Crt::new(&g, p));
                best = d;
                false
            }
        };
        if stable {
            let cand = uprimitive(&trim(acc.as_ref().unwrap().values.clone()));
            if udiv(a, &cand).is_some() && udiv(b, &cand).is_some() {
                return Some(cand);
            }
        }
    }
    None
}

/// Image of the gcd modulo `p`, scaled to have leading y-coefficient
/// `gamma`, as dense rows `[y^j][x^i]`. `None` if the prime runs out of
/// usable evaluation points.
fn gcd2_mod_p(a: &[Fp], b: &[Fp], gamma: &Fp, bound: usize, p: u64) -> Option<Vec<Fp>> {
    let (la, lb) = (a.last().unwrap(), b.last().unwrap());
    let mut xs: Vec<u64> = Vec::new();
    let mut images: Vec<Fp> = Vec::new();
    let mut best = usize::MAX;
    let mut x0 = 0u64;
    while xs.len() <= bound {
        x0 += 1;
        if x0 >= p {
            return None;
        }
        if fp_eval(la, x0, p) == 0 || fp_eval(lb, x0, p) == 0 {
            continue;
        }
        let ea = fp_trim(a.iter().map(|r| fp_eval(r, x0, p)).collect());
        let eb = fp_trim(b.iter().map(|r| fp_eval(r, x0, p)).collect());
        let g = fp_gcd(ea, eb, p);
        let d = g.len() - 1;
        if d == 0 {
            return Some(vec![vec![1]]);
        }
        if d > best {
            continue;
        }
        if d < best {
            best = d;
            xs.clear();
            images.clear();
        }
        let s = fp_eval(gamma, x0, p);
        xs.push(x0);
        images.push(g.iter().map(|c| mulmod(*c, s, p)).collect());
    }
    let rows = (0..=best)
        .map(|j| {
            let ys: Vec<u64> = images.iter().map(|g| g[j]).collect();
            fp_interpolate(&xs, &ys, p)
        })
        .collect();
    Some(rows)
}

/// Gcd of two polynomials that are primitive over Z[x] and have positive
/// degree in y.
pub(super) fn gcd2(a: &ZPoly2, b: &ZPoly2) -> Option<ZPoly2> {
    let gamma = super::ugcd(a.lc(), b.lc());
    let bound = udeg(&gamma) + a.deg_x().min(b.deg_x());
    let width = bound + 1;
    let mut best = usize::MAX;
    let mut acc: Option<Crt> = None;
    for &p in primes() {
        let ap: Vec<Fp> = a.coeffs.iter().map(|c| fp_reduce(c, p)).collect();
        let bp: Vec<Fp> = b.coeffs.iter().map(|c| fp_reduce(c, p)).collect();
        if ap.last().unwrap().is_empty() || bp.last().unwrap().is_empty() {
            continue;
        }
        let Some(rows) = gcd2_mod_p(&ap, &bp, &fp_reduce(&gamma, p), bound, p) else {
            continue;
        };
        if rows.len() == 1 {
            return Some(ZPoly2::one());
        }
        let d = rows.len() - 1;
        if d > best {
            continue;
        }
        // flatten to a fixed [y][x] grid for remaindering
        let mut flat = vec![0u64; rows.len() * width];
        for (j, r) in rows.iter().enumerate() {
            if r.len() > width {
                return None;
            }
            flat[j * width..j * width + r.len()].copy_from_slice(r);
        }
        let stable = match (&mut acc, d < best) {
            (Some(crt), false) => !crt.add(&flat, p),
            _ => {
                acc = Some(Crt::new(&flat, p));
                best = d;
                false
            }
        };
        if stable {
            let values = &acc.as_ref().unwrap().values;
            let cand = ZPoly2 { coeffs: values.chunks(width).map(|c| trim(c.to_vec())).collect() }
                .trim()
                .primitive();
            if a.div(&cand).is_some() && b.div(&cand).is_some() {
                return Some(cand);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_are_prime() {
        let ps = primes();
        assert_eq!(ps.len(), PRIME_COUNT);
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(ps[0], (1 << 62) - 57);
        assert!(!is_prime(561) && !is_prime(1 << 61) && is_prime((1 << 61) - 1));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = primes()[0];
        let poly: Fp = vec![5, 0, 3, 7];
        let xs: Vec<u64> = (1..=4).collect();
        let ys: Vec<u64> = xs.iter().map(|x| fp_eval(&poly, *x, p)).collect();
        assert_eq!(fp_interpolate(&xs, &ys, p), poly);
    }

    #[test]
    fn crt_recovers_negative_values() {
        let ps = primes();
        let target = [BigInt::from(-123456789012345678i64) * BigInt::from(987654321u64), BigInt::from(42)];
        let res = |p: u64| -> Vec<u64> { target.iter().map(|t| reduce(t, p)).collect() };
        let mut crt = Crt::new(&res(ps[0]), ps[0]);
        crt.add(&res(ps[1]), ps[1]);
        assert!(!crt.add(&res(ps[2]), ps[2]));
        assert_eq!(crt.values, target.to_vec());
    }
}
