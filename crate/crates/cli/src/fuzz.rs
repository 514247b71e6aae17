//! Seeded random inputs shared by `verify relations` and the test suites.

use logcy2::{Fan, LatticeVector, Letter, Surface, UnimodularMatrix, Word};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED_VAR: &str = "LOGCY2_SEED";
pub const DEFAULT_SEED: u64 = 20240;

/// Seed from `LOGCY2_SEED`, falling back to [`DEFAULT_SEED`].
pub fn seed_from_env() -> Result<u64, String> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| format!("{SEED_VAR}={s:?} is not an unsigned integer")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn v(x: i64, y: i64) -> LatticeVector {
    LatticeVector::new(x, y)
}

/// Primitive vectors with coordinates in `{-1, 0, 1}`.
pub fn small_rays() -> Vec<LatticeVector> {
    vec![v(1, 0), v(1, 1), v(0, 1), v(-1, 1), v(-1, 0), v(-1, -1), v(0, -1), v(1, -1)]
}

fn linear_pool() -> Vec<UnimodularMatrix> {
    [[0, -1, 1, 0], [1, 1, 0, 1], [1, 0, 1, 1], [-1, 0, 0, 1], [0, 1, 1, 0], [0, 1, -1, -1]]
        .iter()
        .map(|&[a, b, c, d]| UnimodularMatrix::new(a, b, c, d).expect("unimodular"))
        .collect()
}

pub fn random_letter(rng: &mut impl Rng) -> Letter {
    let l = if rng.gen_bool(0.5) {
        Letter::linear(*linear_pool().choose(rng).unwrap())
    } else {
        Letter::elementary(*small_rays().choose(rng).unwrap()).expect("primitive")
    };
    if rng.gen_bool(0.5) {
        l.inverted()
    } else {
        l
    }
}

/// A freely reduced word whose length is uniform in `1..=max_len`
/// (empty when `max_len` is 0).
pub fn random_word(rng: &mut impl Rng, max_len: usize) -> Word {
    if max_len == 0 {
        return Word::identity();
    }
    let len = rng.gen_range(1..=max_len);
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = random_letter(rng);
        if letters.last() != Some(&l.inverted()) {
            letters.push(l);
        }
    }
    Word::new(letters)
}

/// P² with a few extra rays (corner blow-ups) and random interior blow-ups.
pub fn random_surface(rng: &mut impl Rng) -> Surface {
    let mut s = Surface::toric(Fan::p2());
    for _ in 0..rng.gen_range(0..5) {
        let n = v(rng.gen_range(-3..=3), rng.gen_range(-3..=3));
        if let Ok(t) = s.insert_ray(&n) {
            s = t;
        }
    }
    let rays = s.rays().to_vec();
    for r in rays {
        for _ in 0..rng.gen_range(0..4) {
            s = s.interior_blowup(&r).expect("ray of the fan");
        }
    }
    s
}
