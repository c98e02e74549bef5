//! Brun sieve bookkeeping over orbit data: value series, congruence slices,
//! density estimates from the orbit modulo `q`, and sifted counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::congruence::orbit_mod;
use crate::error::{Error, Result};
use crate::primes::{big_omega, is_square_free, primes_below};
use crate::quad::{DescartesQuadruple, PackingOrbit};

/// The polynomial `f` evaluated on each quadruple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    /// Entry `i` (0-based slot).
    Coordinate(usize),
    /// Product of entries `i` and `j`.
    Product(usize, usize),
    /// Largest entry, the curvature of the newest circle.
    Max,
}

impl Selector {
    pub fn eval(&self, v: &[i128; 4]) -> Result<i128> {
        match *self {
            Selector::Coordinate(i) => Ok(v[i]),
            Selector::Product(i, j) => v[i].checked_mul(v[j]).ok_or(Error::Overflow("product selector")),
            Selector::Max => Ok(*v.iter().max().unwrap()),
        }
    }

    /// Polynomial degree of `f`.
    pub fn degree(&self) -> u32 {
        match self {
            Selector::Product(..) => 2,
            _ => 1,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Selector::Coordinate(i) => i < 4,
            Selector::Product(i, j) => i < 4 && j < 4,
            Selector::Max => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("selector {self:?} indexes past the quadruple")))
        }
    }
}

impl std::str::FromStr for Selector {
    type Err = Error;

    /// Parses `x1`…`x4`, `x1*x2`-style products, or `max`.
    fn from_str(s: &str) -> Result<Self> {
        let coord = |t: &str| -> Result<usize> {
            t.trim()
                .strip_prefix('x')
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|d| (1..=4).contains(d))
                .map(|d| d - 1)
                .ok_or_else(|| Error::Config(format!("bad selector {s:?}; expected x1..x4, xi*xj or max")))
        };
        let s = s.trim();
        if s == "max" {
            Ok(Selector::Max)
        } else if let Some((a, b)) = s.split_once('*') {
            Ok(Selector::Product(coord(a)?, coord(b)?))
        } else {
            Ok(Selector::Coordinate(coord(s)?))
        }
    }
}

/// Where the density `g(q)` comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum DensityModel {
    /// Proportion of the root's orbit modulo `q` with `f ≡ 0`.
    Orbit { root: DescartesQuadruple, selector: Selector },
    /// `g(q) = 1/q`, for synthetic series equidistributed modulo every `q`.
    Uniform,
}

/// The values `f(v)` over enumerated quadruples with `‖v‖_max ≤ T`.
#[derive(Clone, Debug, PartialEq)]
pub struct SieveSeries {
    pub values: Vec<i128>,
    pub bound: i128,
    pub density: DensityModel,
}

impl SieveSeries {
    /// Total mass `X = |A(T)|`.
    pub fn mass(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn from_values(values: Vec<i128>, bound: i128) -> Self {
        SieveSeries { values, bound, density: DensityModel::Uniform }
    }
}

/// Evaluates `f` on every enumerated quadruple with maximal entry at most `t`.
pub fn build_series(orbit: &PackingOrbit, f: Selector, t: i128) -> Result<SieveSeries> {
    f.validate()?;
    if t > orbit.bound {
        return Err(Error::domain(format!("bound {t} exceeds enumeration bound {}", orbit.bound)));
    }
    let quads = orbit
        .quads
        .as_ref()
        .ok_or_else(|| Error::domain("orbit was enumerated without quadruples"))?;
    let mut values = Vec::with_capacity(quads.len());
    for q in quads {
        let v = orbit.quad_entries(q);
        if v.iter().max().is_some_and(|&m| m <= t) {
            values.push(f.eval(&v)?);
        }
    }
    Ok(SieveSeries { values, bound: t, density: DensityModel::Orbit { root: orbit.root, selector: f } })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CongruenceSlice {
    pub q: u64,
    /// `|A_q| = #{v : f(v) ≡ 0 mod q}`.
    pub mass: u64,
    pub g_hat: f64,
    /// `|A_q| − g(q)·X`.
    pub r_hat: f64,
}

/// `g(q)` under the series' density model.
pub fn density(series: &SieveSeries, q: u64) -> Result<f64> {
    match &series.density {
        DensityModel::Uniform => Ok(1.0 / q as f64),
        DensityModel::Orbit { selector: Selector::Max, .. } => {
            Err(Error::domain("the max selector is not a polynomial; its density modulo q is undefined"))
        }
        DensityModel::Orbit { root, selector } => {
            let q32 = u32::try_from(q).map_err(|_| Error::domain("modulus too large"))?;
            let orbit = orbit_mod(root, q32)?;
            let mut hits = 0usize;
            for v in &orbit {
                let x = selector.eval(&v.map(|e| e as i128))?;
                if x.rem_euclid(q as i128) == 0 {
                    hits += 1;
                }
            }
            Ok(hits as f64 / orbit.len() as f64)
        }
    }
}

pub fn slice(series: &SieveSeries, q: u64) -> Result<CongruenceSlice> {
    if q < 2 || !is_square_free(q) {
        return Err(Error::domain(format!("slice modulus must be square-free and at least 2, got {q}")));
    }
    let qi = q as i128;
    let mass = series.values.par_iter().filter(|&&m| m.rem_euclid(qi) == 0).count() as u64;
    let g_hat = density(series, q)?;
    Ok(CongruenceSlice { q, mass, g_hat, r_hat: mass as f64 - g_hat * series.mass() as f64 })
}

/// Masses of every residue class modulo `q`; they sum to `X`.
pub fn residue_masses(series: &SieveSeries, q: u64) -> Vec<u64> {
    let mut out = vec![0u64; q as usize];
    for &m in &series.values {
        out[m.rem_euclid(q as i128) as usize] += 1;
    }
    out
}

/// CSV with header `q,mass,g_hat,r_hat`.
pub fn slices_csv(rows: &[CongruenceSlice]) -> String {
    let mut s = String::from("q,mass,g_hat,r_hat\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{:.10},{:.6}", r.q, r.mass, r.g_hat, r.r_hat);
    }
    s
}

/// Primes below `z` outside `excluded`, i.e. the prime factors of `P_z`.
pub fn sieving_primes(z: u64, excluded: &[u64]) -> Vec<u64> {
    primes_below(z).into_iter().filter(|p| !excluded.contains(p)).collect()
}

fn coprime_to(m: i128, primes: &[u64]) -> bool {
    let m = m.unsigned_abs();
    primes.iter().all(|&p| !m.is_multiple_of(p as u128))
}

/// `S(A, P_z)`: values coprime to every prime below `z` outside `excluded`.
/// Zero is divisible by every prime, so it survives only the empty sieve.
pub fn almost_prime_count(series: &SieveSeries, z: u64, excluded: &[u64]) -> Result<u64> {
    if z < 2 {
        return Err(Error::domain("sieve level z must be at least 2"));
    }
    let primes = sieving_primes(z, excluded);
    Ok(series.values.par_iter().filter(|&&m| coprime_to(m, &primes)).count() as u64)
}

/// `{2}` when every value is even, as product selectors force; otherwise
/// nothing is excluded.
pub fn default_excluded(series: &SieveSeries) -> Vec<u64> {
    if !series.values.is_empty() && series.values.iter().all(|m| m % 2 == 0) {
        vec![2]
    } else {
        Vec::new()
    }
}

/// CSV with header `z,S`.
pub fn sifted_csv(rows: &[(u64, u64)]) -> String {
    let mut s = String::from("z,S\n");
    for (z, v) in rows {
        let _ = writeln!(s, "{z},{v}");
    }
    s
}

/// Histogram of `Ω(m)` over the survivors of the sieve at level `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlmostPrimeCensus {
    pub z: u64,
    pub survivors: u64,
    /// `Ω → count`.
    pub omega: BTreeMap<u32, u64>,
    /// Survivor bound `R` on the prime-factor count, `9·deg f`.
    pub r: u32,
    /// Survivors with more than `R` prime factors.
    pub above_r: u64,
}

/// Factors each survivor at `z = T^{1/9}` and tallies its prime-factor count.
pub fn census(series: &SieveSeries, selector_degree: u32, excluded: &[u64]) -> Result<AlmostPrimeCensus> {
    let z = ((series.bound.max(2) as f64).powf(1.0 / 9.0).floor() as u64).max(2);
    let primes = sieving_primes(z, excluded);
    let mut omega = BTreeMap::new();
    let mut survivors = 0;
    for &m in &series.values {
        if coprime_to(m, &primes) {
            survivors += 1;
            *omega.entry(big_omega(m.unsigned_abs())).or_insert(0) += 1;
        }
    }
    let r = 9 * selector_degree;
    let above_r = omega.range(r + 1..).map(|(_, c)| c).sum();
    Ok(AlmostPrimeCensus { z, survivors, omega, r, above_r })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelReport {
    pub level: u64,
    pub mass: u64,
    pub slices: Vec<CongruenceSlice>,
    /// `Σ_{q<D} |r(q)|` over square-free `q ≥ 2`.
    pub remainder_sum: f64,
    /// `log Σ|r| / log X`; zero for an empty sum.
    pub exponent: f64,
}

/// Remainder sums over square-free moduli below `d`.
pub fn level_distribution_report(series: &SieveSeries, d: u64) -> Result<LevelReport> {
    if d < 2 {
        return Err(Error::domain("level of distribution must be at least 2"));
    }
    let moduli: Vec<u64> = (2..d).filter(|&q| is_square_free(q)).collect();
    let slices = moduli.par_iter().map(|&q| slice(series, q)).collect::<Result<Vec<_>>>()?;
    let remainder_sum: f64 = slices.iter().map(|s| s.r_hat.abs()).sum();
    let x = series.mass() as f64;
    let exponent = if remainder_sum > 0.0 && x > 1.0 { remainder_sum.ln() / x.ln() } else { 0.0 };
    Ok(LevelReport { level: d, mass: series.mass(), slices, remainder_sum, exponent })
}

/// Least-squares slope of `Σ_{p<y} g(p) log p` against `log y` over primes
/// `p < y_max`: the empirical sieve dimension.
pub fn sieve_dimension(series: &SieveSeries, y_max: u64, excluded: &[u64]) -> Result<f64> {
    let primes = sieving_primes(y_max, excluded);
    if primes.len() < 3 {
        return Err(Error::domain("sieve dimension needs at least three primes"));
    }
    let mut acc = 0.0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &p in &primes {
        acc += density(series, p)? * (p as f64).ln();
        xs.push((p as f64).ln());
        ys.push(acc);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::prime_stats;
    use crate::quad::enumerate_orbit;

    fn standard(t: i128) -> PackingOrbit {
        enumerate_orbit(&DescartesQuadruple::new([-1, 2, 2, 3]).unwrap(), t).unwrap()
    }

    #[test]
    fn max_series() {
        let orbit = standard(6);
        let s = build_series(&orbit, Selector::Max, 6).unwrap();
        let mut v = s.values.clone();
        v.sort();
        assert_eq!(v, vec![3, 3, 6, 6, 6, 6]);
        assert_eq!(s.mass(), orbit.quad_count);
        assert!(slice(&s, 3).is_err());
        let root_only = build_series(&orbit, Selector::Coordinate(0), 3).unwrap();
        // The root and its mirror image under S₄ both have maximum 3.
        assert_eq!(root_only.values, vec![-1, -1]);
    }

    #[test]
    fn selector_parsing() {
        assert_eq!("x2".parse::<Selector>().unwrap(), Selector::Coordinate(1));
        assert_eq!("x1*x4".parse::<Selector>().unwrap(), Selector::Product(0, 3));
        assert_eq!("max".parse::<Selector>().unwrap(), Selector::Max);
        assert!("x5".parse::<Selector>().is_err());
    }

    #[test]
    fn slices_and_sifting() {
        let s = build_series(&standard(500), Selector::Coordinate(3), 500).unwrap();
        let even = s.values.iter().filter(|m| *m % 2 == 0).count() as u64;
        assert_eq!(slice(&s, 2).unwrap().mass, even);
        assert!(slice(&s, 4).is_err());
        assert!(slice(&s, 1).is_err());
        assert_eq!(almost_prime_count(&s, 2, &[]).unwrap(), s.mass());
        assert_eq!(almost_prime_count(&s, 3, &[]).unwrap(), s.mass() - even);
        assert_eq!(residue_masses(&s, 6).iter().sum::<u64>(), s.mass());
        let mut last = u64::MAX;
        for z in 2..60 {
            let v = almost_prime_count(&s, z, &[]).unwrap();
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn degenerate_selector() {
        let s = SieveSeries::from_values(vec![0; 40], 10);
        for q in [2, 3, 5, 6] {
            assert_eq!(slice(&s, q).unwrap().mass, 40);
        }
        assert_eq!(almost_prime_count(&s, 2, &[]).unwrap(), 40);
        assert_eq!(almost_prime_count(&s, 3, &[]).unwrap(), 0);
    }

    #[test]
    fn uniform_synthetic_has_no_remainder() {
        // 0..lcm(2..50) would be huge; a multiple of every squarefree q < 12
        // suffices for an exact check at that level.
        let s = SieveSeries::from_values((0..27720).collect(), 27720);
        let rep = level_distribution_report(&s, 12).unwrap();
        assert!(rep.slices.iter().all(|x| x.r_hat.abs() < 1e-9));
        assert_eq!(level_distribution_report(&s, 2).unwrap().remainder_sum, 0.0);
    }

    #[test]
    fn prime_count_cross_check() {
        let orbit = standard(300);
        let s = build_series(&orbit, Selector::Max, 300).unwrap();
        // The max entry of each non-root quadruple is its new circle, so the
        // series is the curvature list minus the three smallest root circles.
        // Sifting by every prime up to the square root of the largest value
        // leaves exactly the units and the primes at or above the level.
        let z = 18;
        let survivors = almost_prime_count(&s, z, &[]).unwrap();
        let ones = s.values.iter().filter(|m| m.abs() == 1).count() as u64;
        let is_prime = |m: i128| crate::primes::is_prime_i128(m);
        let large = s.values.iter().filter(|&&m| is_prime(m) && m >= z as i128).count() as u64;
        assert_eq!(survivors, large + ones);
        let primes = s.values.iter().filter(|&&m| is_prime(m)).count() as u64;
        // Root circles -1, 2, 2 never appear as a maximum; 3 does.
        assert_eq!(primes + 2, prime_stats(&orbit).unwrap().pi);
    }

    #[test]
    fn orbit_density() {
        let s = build_series(&standard(100), Selector::Coordinate(0), 100).unwrap();
        // Everything is fixed modulo 2, and the first slot starts odd.
        assert_eq!(density(&s, 2).unwrap(), 0.0);
        let g3 = density(&s, 3).unwrap();
        assert!(g3 > 0.0 && g3 < 1.0);
        let k = sieve_dimension(&s, 50, &[]).unwrap();
        assert!(k > 0.0 && k < 3.0, "{k}");
    }
}
