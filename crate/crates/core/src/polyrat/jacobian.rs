//! Exact multi-modular test of `xy·(f_x g_y − f_y g_x) = ±f g` for
//! `f = a/b`, `g = c/d`.
//!
//! Clearing denominators the identity reads `xy·W = s·abcd` with
//! `W = (a_x b − a b_x)(c_y d − c d_y) − (a_y b − a b_y)(c_x d − c d_x)`.
//! Modulo a prime the difference is checked identically in `y` at more
//! points `x` than its `x`-degree; once the primes multiply past twice an
//! L1 bound on its coefficients it vanishes over Z.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::gcd::modular::{mulmod, primes, reduce};
use super::{Poly2, Var};

type Fp = Vec<u64>;

struct IntPoly {
    terms: Vec<(u32, u32, BigInt)>,
    deg_x: u32,
    deg_y: u32,
    total: u32,
    norm: BigInt,
}

/// `(a, b)` scaled by a common positive integer so both are integral,
/// with the variables exchanged if `swap`.
fn integral_pair(a: &Poly2, b: &Poly2, swap: bool) -> [IntPoly; 2] {
    let l = a.terms().chain(b.terms()).fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
    [a, b].map(|p| {
        let terms: Vec<_> = p
            .terms()
            .map(|(m, c)| {
                let (i, j) = if swap { (m.y, m.x) } else { (m.x, m.y) };
                (i, j, (c.numer() * &l) / c.denom())
            })
            .collect();
        let (dx, dy) = (p.degree(Var::X), p.degree(Var::Y));
        IntPoly {
            deg_x: if swap { dy } else { dx },
            deg_y: if swap { dx } else { dy },
            total: p.terms().map(|(m, _)| m.degree()).max().unwrap_or(0),
            norm: terms.iter().map(|t| t.2.abs()).sum(),
            terms,
        }
    })
}

/// Value at `x = x0` and the `x`-derivative there, both as polynomials in `y`.
/// `pows[i] = x0^i`.
fn specialize(p: &IntPoly, coeffs: &[u64], pows: &[u64], q: u64) -> (Fp, Fp) {
    let n = p.deg_y as usize + 1;
    let (mut v, mut dx) = (vec![0; n], vec![0; n]);
    for ((i, j, _), c) in p.terms.iter().zip(coeffs) {
        let (i, j) = (*i as usize, *j as usize);
        v[j] = (v[j] + mulmod(*c, pows[i], q)) % q;
        if i > 0 {
            let t = mulmod(mulmod(*c, i as u64 % q, q), pows[i - 1], q);
            dx[j] = (dx[j] + t) % q;
        }
    }
    (v, dx)
}

fn mul(a: &Fp, b: &Fp, q: u64) -> Fp {
    // products of residues below 2^62 leave room for 16 terms in a u128
    let n = a.len() + b.len() - 1;
    let q = q as u128;
    (0..n)
        .map(|k| {
            let lo = k.saturating_sub(b.len() - 1);
            let hi = k.min(a.len() - 1);
            let mut acc = 0u128;
            for (t, i) in (lo..=hi).enumerate() {
                acc += a[i] as u128 * b[k - i] as u128;
                if t % 8 == 7 {
                    acc %= q;
                }
            }
            (acc % q) as u64
        })
        .collect()
}

fn sub(a: &Fp, b: &Fp, q: u64) -> Fp {
    let n = a.len().max(b.len());
    (0..n).map(|i| (a.get(i).copied().unwrap_or(0) + q - b.get(i).copied().unwrap_or(0)) % q).collect()
}

fn dy(a: &Fp, q: u64) -> Fp {
    if a.len() <= 1 {
        return vec![0];
    }
    a.iter().enumerate().skip(1).map(|(j, c)| mulmod(*c, j as u64 % q, q)).collect()
}

/// Sign `s` with `xy·(f_x g_y − f_y g_x) = s·f·g`, or `None` if neither sign
/// satisfies the identity.
pub(crate) fn dlog_jacobian_sign(a: &Poly2, b: &Poly2, c: &Poly2, d: &Poly2) -> Option<i64> {
    // run over the variable that makes the univariate work smaller
    let cost = |outer: Var, inner: Var| {
        let n: u64 = [a, b, c, d].iter().map(|p| p.degree(outer) as u64).sum();
        let m = [a, b, c, d].iter().map(|p| p.degree(inner) as u64).max().unwrap();
        (n + 2) * (m + 1) * (m + 1)
    };
    let swap = cost(Var::Y, Var::X) < cost(Var::X, Var::Y);
    // exchanging x and y negates the Jacobian
    let flip = if swap { -1 } else { 1 };
    let [a, b] = integral_pair(a, b, swap);
    let [c, d] = integral_pair(c, d, swap);
    let polys = [&a, &b, &c, &d];
    let max_x = polys.iter().map(|p| p.deg_x as usize).max().unwrap();
    let norm: BigInt = polys.iter().map(|p| &p.norm).product();
    let bound = &norm * (1 + 2 * (a.total + b.total) as u64 * (c.total + d.total) as u64);
    let deg_x = polys.iter().map(|p| p.deg_x as u64).sum::<u64>() + 1;
    let mut alive = [true, true];
    let mut modulus = BigInt::one();
    for &q in primes() {
        if modulus > &bound * 2 {
            return alive.iter().position(|s| *s).map(|i| flip * (1 - 2 * i as i64));
        }
        let reduced: Vec<Vec<u64>> = polys.iter().map(|p| p.terms.iter().map(|t| reduce(&t.2, q)).collect()).collect();
        for x0 in 0..=deg_x {
            let pows: Vec<u64> = std::iter::successors(Some(1), |p| Some(mulmod(*p, x0, q))).take(max_x + 1).collect();
            let [(av, ax), (bv, bx), (cv, cx), (dv, dx_)] =
                [0, 1, 2, 3].map(|k| specialize(polys[k], &reduced[k], &pows, q));
            let fx = sub(&mul(&ax, &bv, q), &mul(&av, &bx, q), q);
            let fy = sub(&mul(&dy(&av, q), &bv, q), &mul(&av, &dy(&bv, q), q), q);
            let gx = sub(&mul(&cx, &dv, q), &mul(&cv, &dx_, q), q);
            let gy = sub(&mul(&dy(&cv, q), &dv, q), &mul(&cv, &dy(&dv, q), q), q);
            let w = sub(&mul(&fx, &gy, q), &mul(&fy, &gx, q), q);
            // x0·y·w
            let mut lhs = vec![0; w.len() + 1];
            for (j, c) in w.iter().enumerate() {
                lhs[j + 1] = mulmod(*c, x0, q);
            }
            let rhs = mul(&mul(&av, &bv, q), &mul(&cv, &dv, q), q);
            let neg: Fp = rhs.iter().map(|c| (q - c) % q).collect();
            for (i, s) in alive.iter_mut().enumerate() {
                let r = if i == 0 { &rhs } else { &neg };
                if *s && sub(&lhs, r, q).iter().any(|c| *c != 0) {
                    *s = false;
                }
            }
            if !alive.iter().any(|s| *s) {
                return None;
            }
        }
        modulus *= q;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly2 {
        let r: super::super::RatFunc2 = s.parse().unwrap();
        r.numerator().clone()
    }

    #[test]
    fn signs_of_simple_maps() {
        // (x, y/(1+x))
        assert_eq!(dlog_jacobian_sign(&p("x"), &p("1"), &p("y"), &p("1 + x")), Some(1));
        // (1/x, y)
        assert_eq!(dlog_jacobian_sign(&p("1"), &p("x"), &p("y"), &p("1")), Some(-1));
        // (y, x) with rational coefficients
        assert_eq!(dlog_jacobian_sign(&p("(1/2)*y"), &p("1/2"), &p("3*x"), &p("3")), Some(-1));
        // (x + y, y) does not preserve the form
        assert_eq!(dlog_jacobian_sign(&p("x + y"), &p("1"), &p("y"), &p("1")), None);
        // constant rescalings are invisible to dlog
        assert_eq!(dlog_jacobian_sign(&p("2*x"), &p("1"), &p("y"), &p("1")), Some(1));
        // (y/(1+y²), x), where y is the cheaper outer variable
        assert_eq!(dlog_jacobian_sign(&p("y"), &p("1 + y^2"), &p("x"), &p("1")), None);
        assert_eq!(dlog_jacobian_sign(&p("x^2*y^2"), &p("x*y"), &p("x^3*y"), &p("x")), Some(-1));
    }
}
