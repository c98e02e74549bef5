//! Diophantine statistics of integral packings: prime and twin-prime circle
//! counts, residue classes, distinct-curvature density and local-global
//! exceptions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::primes::is_prime_i128;
use crate::quad::{is_primitive, PackingOrbit};

/// Curvature multiset of an orbit, by unsigned curvature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureTally {
    pub multiset: BTreeMap<u128, u64>,
    pub bound: u128,
    /// Signed curvature of the bounding circle, if the packing has one. Its
    /// residue classes are taken from the signed value.
    pub bounding: Option<i128>,
}

impl CurvatureTally {
    pub fn distinct(&self) -> impl Iterator<Item = u128> + '_ {
        self.multiset.keys().copied()
    }

    pub fn distinct_count(&self) -> usize {
        self.multiset.len()
    }

    pub fn total(&self) -> u64 {
        self.multiset.values().sum()
    }

    /// Restriction to curvatures at most `t`.
    pub fn truncate(&self, t: u128) -> CurvatureTally {
        CurvatureTally {
            multiset: self.multiset.range(..=t).map(|(&k, &v)| (k, v)).collect(),
            bound: t.min(self.bound),
            bounding: self.bounding.filter(|b| b.unsigned_abs() <= t),
        }
    }
}

/// Tally of the positive (unsigned) curvatures of the member circles; lines
/// carry curvature zero and are left out.
pub fn tally(orbit: &PackingOrbit) -> CurvatureTally {
    let mut multiset = BTreeMap::new();
    let mut bounding = None;
    for (_, c) in orbit.members() {
        if c.curvature == 0 {
            continue;
        }
        if c.curvature < 0 {
            bounding = Some(c.curvature);
        }
        *multiset.entry(c.unsigned()).or_insert(0) += 1;
    }
    CurvatureTally { multiset, bound: orbit.bound.max(0) as u128, bounding }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeStats {
    /// Circles with prime curvature, with multiplicity.
    pub pi: u64,
    /// Tangent pairs of prime circles.
    pub pi2: u64,
    /// All circles counted, for reference.
    pub circles: u64,
    pub bound: u128,
}

fn require_tangency(orbit: &PackingOrbit) -> Result<&[(u32, u32)]> {
    orbit
        .tangency
        .as_deref()
        .ok_or_else(|| Error::domain("orbit was enumerated without the tangency graph"))
}

/// Prime statistics of the subpacking with curvatures at most `t`.
///
/// Every tangency between two circles of curvature at most `t` is recorded
/// when the later circle is born alongside its three smaller parents, so the
/// edges with both ends below `t` are exactly the tangencies of the
/// truncated packing.
pub fn prime_stats_at(orbit: &PackingOrbit, t: u128) -> Result<PrimeStats> {
    if !is_primitive(&orbit.root) {
        return Err(Error::domain(format!("packing {} is not primitive", orbit.root)));
    }
    if t > orbit.bound.max(0) as u128 {
        return Err(Error::domain(format!("bound {t} exceeds enumeration bound {}", orbit.bound)));
    }
    let edges = require_tangency(orbit)?;
    let prime: Vec<bool> = orbit
        .circles
        .iter()
        .enumerate()
        .map(|(i, c)| orbit.is_member(i as u32) && c.unsigned() <= t && is_prime_i128(c.curvature))
        .collect();
    let pi = prime.iter().filter(|&&p| p).count() as u64;
    let pi2 = edges.iter().filter(|(a, b)| prime[*a as usize] && prime[*b as usize]).count() as u64;
    let circles = orbit.members().filter(|(_, c)| c.unsigned() <= t).count() as u64;
    Ok(PrimeStats { pi, pi2, circles, bound: t })
}

/// `Π_T` and `Π_T^(2)` at the orbit's own bound.
pub fn prime_stats(orbit: &PackingOrbit) -> Result<PrimeStats> {
    prime_stats_at(orbit, orbit.bound.max(0) as u128)
}

/// CSV with header `T,pi,pi2,N`.
pub fn prime_stats_csv(rows: &[PrimeStats]) -> String {
    let mut s = String::from("T,pi,pi2,N\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.bound, r.pi, r.pi2, r.circles);
    }
    s
}

/// One row of the Fuchs–Sanden comparison: `Π_T·log T / N(T)` and the
/// Kontorovich–Oh shape `Π_T·log T / T^α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimeShapeRow {
    pub bound: u128,
    pub pi: u64,
    pub circles: u64,
    pub fuchs_sanden: f64,
    pub upper_shape: f64,
}

pub fn prime_shape_report(orbit: &PackingOrbit, bounds: &[u128], alpha: f64) -> Result<Vec<PrimeShapeRow>> {
    bounds
        .iter()
        .map(|&t| {
            if t < 2 {
                return Err(Error::domain("prime shape report needs T ≥ 2"));
            }
            let s = prime_stats_at(orbit, t)?;
            let lt = (t as f64).ln();
            Ok(PrimeShapeRow {
                bound: t,
                pi: s.pi,
                circles: s.circles,
                fuchs_sanden: s.pi as f64 * lt / s.circles as f64,
                upper_shape: s.pi as f64 * lt / (t as f64).powf(alpha),
            })
        })
        .collect()
}

/// Residue classes attained by a packing's curvatures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSet {
    pub modulus: u64,
    pub residues: BTreeSet<u64>,
}

impl ResidueSet {
    pub fn contains(&self, n: u128) -> bool {
        self.residues.contains(&((n % self.modulus as u128) as u64))
    }

    /// CSV with header `residue,present`, one row per class.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("residue,present\n");
        for r in 0..self.modulus {
            let _ = writeln!(s, "{r},{}", u8::from(self.residues.contains(&r)));
        }
        s
    }
}

/// Residues of the distinct curvatures modulo `m`. The bounding circle
/// contributes the residue of its signed curvature.
pub fn residues_mod(tally: &CurvatureTally, m: u64) -> Result<ResidueSet> {
    if m == 0 {
        return Err(Error::domain("modulus must be at least 1"));
    }
    let mm = m as u128;
    let mut residues = BTreeSet::new();
    for (&k, &count) in &tally.multiset {
        let is_bounding_only = tally.bounding.is_some_and(|b| b.unsigned_abs() == k) && count == 1;
        if !is_bounding_only {
            residues.insert((k % mm) as u64);
        }
    }
    if let Some(b) = tally.bounding {
        residues.insert(b.rem_euclid(m as i128) as u64);
    }
    Ok(ResidueSet { modulus: m, residues })
}

/// Distinct curvatures per unit of bound.
pub fn distinct_density(tally: &CurvatureTally) -> Result<f64> {
    if tally.bound < 24 {
        return Err(Error::domain("distinct density needs T ≥ 24"));
    }
    Ok(tally.distinct_count() as f64 / tally.bound as f64)
}

/// Integers `n ≤ T` in an admissible residue class that are not curvatures:
/// the empirical local-global exceptions.
pub fn missing_integers(tally: &CurvatureTally, admissible: &ResidueSet) -> Vec<u128> {
    (1..=tally.bound)
        .filter(|&n| admissible.contains(n) && !tally.multiset.contains_key(&n))
        .collect()
}

/// One `missing_n` per line under that header.
pub fn missing_csv(missing: &[u128]) -> String {
    let mut s = String::from("missing_n\n");
    for n in missing {
        let _ = writeln!(s, "{n}");
    }
    s
}

fn is_odd_prime(k: i128) -> bool {
    k != 2 && is_prime_i128(k)
}

/// Whether the graph has no triangle whose three vertices all carry odd prime
/// curvatures. Vertex `i` has curvature `curvatures[i]`.
pub fn no_odd_prime_triple_graph(curvatures: &[i128], edges: &[(u32, u32)]) -> bool {
    let odd: Vec<bool> = curvatures.iter().map(|&k| is_odd_prime(k)).collect();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); curvatures.len()];
    for &(a, b) in edges {
        if a != b && odd[a as usize] && odd[b as usize] {
            let (lo, hi) = (a.min(b), a.max(b));
            adj[lo as usize].push(hi);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    // Each triangle u < v < w is found from u via the pair (v, w).
    for u in 0..adj.len() {
        let nu = &adj[u];
        for (i, &v) in nu.iter().enumerate() {
            let nv = &adj[v as usize];
            if nu[i + 1..].iter().any(|w| nv.binary_search(w).is_ok()) {
                return false;
            }
        }
    }
    true
}

/// [`no_odd_prime_triple_graph`] on the orbit's tangency graph.
pub fn no_odd_prime_triple(orbit: &PackingOrbit) -> Result<bool> {
    let edges = require_tangency(orbit)?;
    let curv: Vec<i128> = orbit
        .circles
        .iter()
        .enumerate()
        .map(|(i, c)| if orbit.is_member(i as u32) { c.curvature } else { 0 })
        .collect();
    Ok(no_odd_prime_triple_graph(&curv, edges))
}

/// Histogram of the number of odd entries over every enumerated quadruple.
/// Each swap fixes all entries modulo 2, so a single bin is expected.
pub fn odd_entry_histogram(orbit: &PackingOrbit) -> Result<BTreeMap<usize, u64>> {
    let quads = orbit
        .quads
        .as_ref()
        .ok_or_else(|| Error::domain("orbit was enumerated without quadruples"))?;
    let mut hist = BTreeMap::new();
    for q in quads {
        let odd = orbit.quad_entries(q).iter().filter(|k| *k % 2 != 0).count();
        *hist.entry(odd).or_insert(0) += 1;
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{enumerate_orbit, enumerate_orbit_with, DescartesQuadruple, Embedding, EnumerateOptions};
    use crate::geometry::Rect;

    fn orbit(root: [i128; 4], t: i128) -> PackingOrbit {
        enumerate_orbit(&DescartesQuadruple::new(root).unwrap(), t).unwrap()
    }

    #[test]
    fn tallies() {
        let t = tally(&orbit([-1, 2, 2, 3], 6));
        let expected: BTreeMap<u128, u64> = [(1, 1), (2, 2), (3, 2), (6, 4)].into_iter().collect();
        assert_eq!(t.multiset, expected);
        assert_eq!(tally(&orbit([-1, 2, 2, 3], 1)).multiset, [(1, 1)].into_iter().collect());

        let root = DescartesQuadruple::new([0, 0, 1, 1]).unwrap();
        let opts = EnumerateOptions {
            embedding: Embedding::standard_for(&root),
            region: Some(Rect::new(0.0, 2.0, -1.0, 3.0).unwrap()),
            ..Default::default()
        };
        let strip = enumerate_orbit_with(&root, 1, &opts).unwrap();
        assert_eq!(tally(&strip).multiset, [(1, 2)].into_iter().collect());
    }

    #[test]
    fn small_prime_stats() {
        let s = prime_stats(&orbit([-1, 2, 2, 3], 3)).unwrap();
        assert_eq!((s.pi, s.pi2), (4, 5));
        let s = prime_stats(&orbit([-1, 2, 2, 3], 1)).unwrap();
        assert_eq!((s.pi, s.pi2), (0, 0));
        assert!(prime_stats(&orbit([-2, 4, 4, 6], 20)).is_err());
    }

    #[test]
    fn truncated_stats_match_fresh_enumeration() {
        let big = orbit([-1, 2, 2, 3], 400);
        for t in [10, 57, 200] {
            let fresh = prime_stats(&orbit([-1, 2, 2, 3], t as i128)).unwrap();
            assert_eq!(prime_stats_at(&big, t).unwrap(), fresh);
        }
    }

    #[test]
    fn residues() {
        let t = tally(&orbit([-1, 2, 2, 3], 1000));
        assert_eq!(residues_mod(&t, 1).unwrap().residues, [0].into_iter().collect());
        assert_eq!(residues_mod(&t, 2).unwrap().residues, [0, 1].into_iter().collect());
        let r24 = residues_mod(&t, 24).unwrap();
        assert_eq!(r24.residues, [2, 3, 6, 11, 14, 15, 18, 23].into_iter().collect());
        assert!(r24.to_csv().starts_with("residue,present\n0,0\n1,0\n2,1\n"));
        assert!(residues_mod(&t, 0).is_err());
    }

    #[test]
    fn missing_respects_residues() {
        let t = tally(&orbit([-1, 2, 2, 3], 1000));
        let r = residues_mod(&t, 24).unwrap();
        let miss = missing_integers(&t, &r);
        assert!(miss.iter().all(|&n| r.contains(n) && !t.multiset.contains_key(&n)));
        // Below every curvature nothing is present, so every admissible
        // integer is missing.
        let empty = CurvatureTally { multiset: BTreeMap::new(), bound: 30, bounding: None };
        let all: Vec<u128> = (1..=30).filter(|&n| r.contains(n)).collect();
        assert_eq!(missing_integers(&empty, &r), all);
    }

    #[test]
    fn odd_prime_triangles() {
        assert!(no_odd_prime_triple(&orbit([-1, 2, 2, 3], 1000)).unwrap());
        let curv = [3, 5, 7, 2];
        assert!(!no_odd_prime_triple_graph(&curv, &[(0, 1), (1, 2), (0, 2)]));
        assert!(no_odd_prime_triple_graph(&[3, 5, 2], &[(0, 1), (1, 2), (0, 2)]));
        assert!(no_odd_prime_triple_graph(&[], &[]));
    }

    #[test]
    fn parity_is_invariant() {
        let h = odd_entry_histogram(&orbit([-1, 2, 2, 3], 2000)).unwrap();
        assert_eq!(h.keys().copied().collect::<Vec<_>>(), vec![2]);
    }
}
