//! Symbolic bookkeeping for the exceptional collection of `Coh(Y)` attached
//! to a toric model and the matching distinguished collection of vanishing
//! cycles, with count-level checks.
//!
//! Ray indices are 1-based positions in the surface's canonical ray order.

use serde::Serialize;

use crate::atf::visible_spheres;
use crate::cy2::Surface;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ExceptionalItem {
    /// `O_Γ(Γ)` for the `j`-th exceptional curve over the `i`-th divisor.
    SheafOnException { ray: usize, blowup: usize },
    StructureSheaf,
    /// `p*O(D_1 + … + D_ℓ)`.
    LineBundle { prefix: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum VanishingCycleItem {
    /// A copy of the `i`-th meridian.
    Meridian { ray: usize, blowup: usize },
    /// The reference longitude twisted `twists[i]` times along meridian `i`.
    Longitude { index: usize, twists: Vec<i64> },
}

/// Sheaves on exceptional curves from the last ray down to the first, each
/// ray's curves from the last blow-up down, then `O` and the line bundles.
pub fn exceptional_collection(s: &Surface) -> Vec<ExceptionalItem> {
    let mut out: Vec<ExceptionalItem> = exceptional_indices(s)
        .map(|(ray, blowup)| ExceptionalItem::SheafOnException { ray, blowup })
        .collect();
    out.push(ExceptionalItem::StructureSheaf);
    out.extend((1..s.rays().len()).map(|prefix| ExceptionalItem::LineBundle { prefix }));
    out
}

fn exceptional_indices(s: &Surface) -> impl Iterator<Item = (usize, usize)> + '_ {
    let k = s.rays().len();
    (1..=k).rev().flat_map(move |i| (1..=s.m()[i - 1] as usize).rev().map(move |j| (i, j)))
}

/// Meridians paired one-for-one with the exceptional sheaves, then the
/// longitudes `V_0, …, V_{k-1}`.
pub fn vanishing_cycles(s: &Surface) -> Vec<VanishingCycleItem> {
    let mut out: Vec<VanishingCycleItem> = exceptional_indices(s)
        .map(|(ray, blowup)| VanishingCycleItem::Meridian { ray, blowup })
        .collect();
    let k = s.rays().len();
    out.extend((0..k).map(|index| VanishingCycleItem::Longitude { index, twists: twist_vector(s, index) }));
    out
}

/// `D̄_i · (D̄_1 + … + D̄_ℓ)` on the toric model.
pub fn twist_vector(s: &Surface, l: usize) -> Vec<i64> {
    let k = s.rays().len();
    let a = s.fan().toric_self_intersections();
    let dot = |i: usize, j: usize| -> i64 {
        if i == j {
            a[i]
        } else if (i + 1) % k == j || (j + 1) % k == i {
            1
        } else {
            0
        }
    };
    (0..k).map(|i| (0..l).map(|j| dot(i, j)).sum()).collect()
}

/// Result of the count-level consistency checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub exceptional: usize,
    pub vanishing: usize,
    pub chi_y: u64,
    pub visible_spheres: usize,
    /// `Σ max(m_n − 1, 0)`: strict transforms of differences of exceptional curves.
    pub minus_two_classes: u64,
    pub pass: bool,
}

pub fn check_counts(s: &Surface) -> CountReport {
    let exceptional = exceptional_collection(s).len();
    let vanishing = vanishing_cycles(s).len();
    let chi_y = s.numeric_invariants().chi_y;
    let spheres = visible_spheres(s).len();
    let minus_two_classes = s.m().iter().map(|&m| m.saturating_sub(1) as u64).sum();
    let pass = exceptional as u64 == chi_y && vanishing as u64 == chi_y && spheres as u64 == minus_two_classes;
    CountReport { exceptional, vanishing, chi_y, visible_spheres: spheres, minus_two_classes, pass }
}

/// JSON document with both collections.
pub fn to_json(s: &Surface) -> String {
    #[derive(Serialize)]
    struct Dump {
        exceptional_collection: Vec<ExceptionalItem>,
        vanishing_cycles: Vec<VanishingCycleItem>,
    }
    serde_json::to_string_pretty(&Dump { exceptional_collection: exceptional_collection(s), vanishing_cycles: vanishing_cycles(s) })
        .expect("plain data serializes")
}
