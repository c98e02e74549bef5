//! Integer Descartes quadruples, the Apollonian group action and exhaustive
//! orbit enumeration up to a curvature bound.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{self, Circle, CircleCoords, Rect};

/// Descartes form `2(a²+b²+c²+d²) − (a+b+c+d)²` with overflow checking.
pub fn descartes_form(v: &[i128; 4]) -> Result<i128> {
    let of = || Error::Overflow("descartes_form");
    let mut sum: i128 = 0;
    let mut squares: i128 = 0;
    for &x in v {
        sum = sum.checked_add(x).ok_or_else(of)?;
        squares = squares.checked_add(x.checked_mul(x).ok_or_else(of)?).ok_or_else(of)?;
    }
    let lhs = squares.checked_mul(2).ok_or_else(of)?;
    let rhs = sum.checked_mul(sum).ok_or_else(of)?;
    lhs.checked_sub(rhs).ok_or_else(of)
}

/// One of the four generating reflections `S₁ … S₄`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SwapGenerator(u8);

impl SwapGenerator {
    pub const ALL: [SwapGenerator; 4] = [SwapGenerator(1), SwapGenerator(2), SwapGenerator(3), SwapGenerator(4)];

    /// Generator by its 1-based index.
    pub fn new(index: u8) -> Result<Self> {
        if (1..=4).contains(&index) {
            Ok(SwapGenerator(index))
        } else {
            Err(Error::domain(format!("generator index must be 1..=4, got {index}")))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Zero-based position of the entry this generator replaces.
    pub fn slot(self) -> usize {
        self.0 as usize - 1
    }

    /// The 4×4 integer matrix acting on row vectors: identity except that
    /// column `i` is `2` off the diagonal and `−1` on it.
    pub fn matrix(self) -> [[i64; 4]; 4] {
        let i = self.slot();
        let mut m = [[0i64; 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            row[r] = 1;
            row[i] = if r == i { -1 } else { 2 };
        }
        m
    }
}

/// `v` with entry `i` replaced by `2·(sum of the others) − vᵢ`, i.e. `v·Sᵢ`.
pub fn apply_swap(v: &[i128; 4], g: SwapGenerator) -> Result<[i128; 4]> {
    let of = || Error::Overflow("apply_swap");
    let i = g.slot();
    let mut others: i128 = 0;
    for (j, &x) in v.iter().enumerate() {
        if j != i {
            others = others.checked_add(x).ok_or_else(of)?;
        }
    }
    let mut out = *v;
    out[i] = others.checked_mul(2).ok_or_else(of)?.checked_sub(v[i]).ok_or_else(of)?;
    Ok(out)
}

/// Signed curvatures of four mutually tangent circles (bounding circle
/// negative), lying on the cone `Q = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DescartesQuadruple([i128; 4]);

impl DescartesQuadruple {
    pub fn new(entries: [i128; 4]) -> Result<Self> {
        let residual = descartes_form(&entries)?;
        if residual != 0 {
            return Err(Error::NotDescartes { entries, residual });
        }
        if entries.iter().filter(|&&x| x < 0).count() > 1 {
            return Err(Error::domain(format!("{entries:?} has more than one negative entry")));
        }
        if entries.iter().filter(|&&x| x == 0).count() > 2 {
            return Err(Error::domain(format!("{entries:?} has more than two zero entries")));
        }
        Ok(DescartesQuadruple(entries))
    }

    pub fn entries(&self) -> [i128; 4] {
        self.0
    }

    pub fn max_entry(&self) -> i128 {
        *self.0.iter().max().expect("four entries")
    }

    pub fn swap(&self, g: SwapGenerator) -> Result<Self> {
        apply_swap(&self.0, g).map(DescartesQuadruple)
    }

    /// A packing is bounded iff it has a bounding circle (a negative entry).
    pub fn is_bounded(&self) -> bool {
        self.0.iter().any(|&x| x < 0)
    }
}

impl fmt::Display for DescartesQuadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a},{b},{c},{d}")
    }
}

const REDUCTION_CAP: usize = 10_000_000;

/// Applies maximum-decreasing swaps (smallest index first) until none
/// decreases the maximal entry.
pub fn reduce_to_root(v: &DescartesQuadruple) -> Result<DescartesQuadruple> {
    if v.0 == [0; 4] {
        return Err(Error::domain("the zero quadruple has no root"));
    }
    let mut cur = *v;
    for _ in 0..REDUCTION_CAP {
        let max = cur.max_entry();
        let mut moved = false;
        for g in SwapGenerator::ALL {
            let next = cur.swap(g)?;
            if next.max_entry() < max {
                cur = next;
                moved = true;
                break;
            }
        }
        if !moved {
            return Ok(cur);
        }
    }
    Err(Error::ReductionDiverged { start: v.0, steps: REDUCTION_CAP })
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i128
}

/// Whether the packing through `root` is primitive (curvature gcd 1).
pub fn is_primitive(root: &DescartesQuadruple) -> bool {
    root.0.iter().fold(0, |g, &x| gcd(g, x)) == 1
}

/// Exact pencil coordinates `(b̄, b, m)` of four root circles, stored scaled
/// by a common positive `scale` in the `b̄` and `m` columns so that strongly
/// integral and merely rational placements both fit in integers. Every swap
/// acts on these rows by the same linear rule as on curvatures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub rows: [AugmentedCircle; 4],
    pub scale: i128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AugmentedCircle {
    pub bbar: i128,
    pub b: i128,
    pub mx: i128,
    pub my: i128,
}

impl AugmentedCircle {
    fn combine(rows: &[AugmentedCircle; 4], slot: usize) -> Result<AugmentedCircle> {
        let of = || Error::Overflow("embedding swap");
        let pick = |f: fn(&AugmentedCircle) -> i128| -> Result<i128> {
            let mut others: i128 = 0;
            for (j, r) in rows.iter().enumerate() {
                if j != slot {
                    others = others.checked_add(f(r)).ok_or_else(of)?;
                }
            }
            others.checked_mul(2).ok_or_else(of)?.checked_sub(f(&rows[slot])).ok_or_else(of)
        };
        Ok(AugmentedCircle { bbar: pick(|r| r.bbar)?, b: pick(|r| r.b)?, mx: pick(|r| r.mx)?, my: pick(|r| r.my)? })
    }

    pub fn to_coords(&self, scale: i128) -> CircleCoords {
        let s = scale as f64;
        CircleCoords { b: self.b as f64, bbar: self.bbar as f64 / s, m: [self.mx as f64 / s, self.my as f64 / s] }
    }

    /// Float circle; centers are computed as exact-ratio quotients.
    pub fn to_circle(&self, scale: i128) -> Circle {
        if self.b == 0 {
            let s = scale as f64;
            Circle::Line { normal: [self.mx as f64 / s, self.my as f64 / s], offset: self.bbar as f64 / (2.0 * s) }
        } else {
            let den = (self.b * scale) as f64;
            Circle::Proper { center: [self.mx as f64 / den, self.my as f64 / den], curvature: self.b as f64 }
        }
    }
}

impl Embedding {
    /// Checks `⟨Xᵢ, Xᵢ⟩ = 1`, `⟨Xᵢ, Xⱼ⟩ = −1` exactly and that curvatures match.
    pub fn new(root: &DescartesQuadruple, rows: [AugmentedCircle; 4], scale: i128) -> Result<Self> {
        if scale <= 0 {
            return Err(Error::domain("embedding scale must be positive"));
        }
        for (r, &b) in rows.iter().zip(root.0.iter()) {
            if r.b != b {
                return Err(Error::domain("embedding curvatures differ from the root"));
            }
        }
        let of = || Error::Overflow("embedding check");
        // scale² · ⟨X, Y⟩ = mx·mx' + my·my' − scale·(b·b̄' + b̄·b')/2
        let inner2 = |x: &AugmentedCircle, y: &AugmentedCircle| -> Result<i128> {
            let mm = x.mx.checked_mul(y.mx).ok_or_else(of)?.checked_add(x.my.checked_mul(y.my).ok_or_else(of)?).ok_or_else(of)?;
            let bb = x.b.checked_mul(y.bbar).ok_or_else(of)?.checked_add(x.bbar.checked_mul(y.b).ok_or_else(of)?).ok_or_else(of)?;
            mm.checked_mul(2).ok_or_else(of)?.checked_sub(bb.checked_mul(scale).ok_or_else(of)?).ok_or_else(of)
        };
        let s2 = scale.checked_mul(scale).ok_or_else(of)?.checked_mul(2).ok_or_else(of)?;
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { s2 } else { -s2 };
                if inner2(&rows[i], &rows[j])? != want {
                    return Err(Error::domain(format!(
                        "embedding rows {i},{j} are not a tangent configuration"
                    )));
                }
            }
        }
        Ok(Embedding { rows, scale })
    }

    /// Known placements: (−1,2,2,3) matching [`geometry::SeedConfiguration::standard`]
    /// and (0,0,1,1) matching [`geometry::SeedConfiguration::strip`].
    pub fn standard_for(root: &DescartesQuadruple) -> Option<Embedding> {
        let row = |bbar, b, mx, my| AugmentedCircle { bbar, b, mx, my };
        let rows = match root.0 {
            [-1, 2, 2, 3] => [row(1, -1, 0, 0), row(0, 2, 1, 0), row(0, 2, -1, 0), row(1, 3, 0, 2)],
            [0, 0, 1, 1] => [row(0, 0, 0, -1), row(4, 0, 0, 1), row(0, 1, 0, 1), row(4, 1, 2, 1)],
            _ => return None,
        };
        Embedding::new(root, rows, 1).ok()
    }

    pub fn circles(&self) -> [Circle; 4] {
        self.rows.map(|r| r.to_circle(self.scale))
    }
}

/// Options for [`enumerate_orbit_with`].
#[derive(Clone, Debug, Default)]
pub struct EnumerateOptions {
    /// Record every enumerated quadruple as circle ids.
    pub keep_quads: bool,
    /// Record tangency edges (pairs co-occurring in a quadruple).
    pub keep_tangency: bool,
    /// Exact placement of the root circles; enables positions and regions.
    pub embedding: Option<Embedding>,
    /// Keep only circles meeting this rectangle and prune branches whose
    /// interstice misses it. Requires an embedding.
    pub region: Option<Rect>,
    /// Verify with a hash set that no circle is produced twice (needs an
    /// embedding, since equal curvatures alone do not identify circles).
    pub dedup_check: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitCircle {
    /// Signed curvature.
    pub curvature: i128,
    /// Word length of the quadruple that created it; 0 for root circles.
    pub depth: u32,
}

impl OrbitCircle {
    pub fn unsigned(&self) -> u128 {
        self.curvature.unsigned_abs()
    }
}

/// An enumerated quadruple, as ids into [`PackingOrbit::circles`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadRecord {
    pub ids: [u32; 4],
    pub depth: u32,
}

/// All circles of a packing up to a curvature bound.
#[derive(Clone, Debug)]
pub struct PackingOrbit {
    pub root: DescartesQuadruple,
    pub bound: i128,
    /// Indexed by circle id.
    pub circles: Vec<OrbitCircle>,
    /// Per-circle exact placement when enumerated with an embedding.
    pub positions: Option<Vec<AugmentedCircle>>,
    pub scale: i128,
    /// Sorted unordered pairs `(lo, hi)` of circle ids.
    pub tangency: Option<Vec<(u32, u32)>>,
    pub quads: Option<Vec<QuadRecord>>,
    pub quad_count: u64,
    pub region: Option<Rect>,
    /// Ids whose circle is reported (all, unless a region filters).
    included: Vec<bool>,
}

impl PackingOrbit {
    /// Circles with unsigned curvature at most the bound (and meeting the
    /// region, if any), in id order.
    pub fn members(&self) -> impl Iterator<Item = (u32, &OrbitCircle)> + '_ {
        self.circles
            .iter()
            .enumerate()
            .filter(move |(i, _)| self.included[*i])
            .map(|(i, c)| (i as u32, c))
    }

    pub fn is_member(&self, id: u32) -> bool {
        self.included.get(id as usize).copied().unwrap_or(false)
    }

    pub fn circle_count(&self) -> usize {
        self.included.iter().filter(|&&b| b).count()
    }

    /// Unsigned curvatures of the member circles, sorted ascending.
    pub fn sorted_curvatures(&self) -> Vec<u128> {
        let mut v: Vec<u128> = self.members().map(|(_, c)| c.unsigned()).collect();
        v.sort_unstable();
        v
    }

    /// Geometric circles of the members; requires an embedding.
    pub fn geometric_circles(&self) -> Option<Vec<Circle>> {
        let pos = self.positions.as_ref()?;
        Some(self.members().map(|(i, _)| pos[i as usize].to_circle(self.scale)).collect())
    }

    /// Signed entries of an enumerated quadruple.
    pub fn quad_entries(&self, q: &QuadRecord) -> [i128; 4] {
        q.ids.map(|id| self.circles[id as usize].curvature)
    }

    /// Writes one line per enumerated quadruple: depth, then the four signed
    /// entries comma-separated, e.g. `2 -1,6,2,3`.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        let quads = self
            .quads
            .as_ref()
            .ok_or_else(|| Error::domain("orbit was enumerated without quadruples"))?;
        for q in quads {
            let [a, b, c, d] = self.quad_entries(q);
            writeln!(w, "{} {a},{b},{c},{d}", q.depth)?;
        }
        Ok(())
    }
}

/// Parses one dump line back into `(depth, quadruple entries)`.
pub fn parse_dump_line(line: &str) -> Result<(u32, [i128; 4])> {
    let bad = || Error::domain(format!("malformed orbit dump line {line:?}"));
    let (depth, rest) = line.trim().split_once(' ').ok_or_else(bad)?;
    let depth: u32 = depth.parse().map_err(|_| bad())?;
    let parts: Vec<i128> = rest
        .split(',')
        .map(|s| s.trim().parse::<i128>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let entries: [i128; 4] = parts.try_into().map_err(|_| bad())?;
    Ok((depth, entries))
}

/// [`enumerate_orbit_with`] keeping quadruples and tangency.
pub fn enumerate_orbit(root: &DescartesQuadruple, bound: i128) -> Result<PackingOrbit> {
    let options = EnumerateOptions {
        keep_quads: true,
        keep_tangency: true,
        embedding: Embedding::standard_for(root),
        ..Default::default()
    };
    enumerate_orbit_with(root, bound, &options)
}

#[derive(Clone, Copy)]
struct Node {
    quad: [i128; 4],
    ids: [u32; 4],
    last: u8,
    rows: Option<[AugmentedCircle; 4]>,
}

struct Child {
    node: Node,
    slot: usize,
}

/// Breadth-first expansion of reduced words in `S₁ … S₄` from `root`.
///
/// Each nonempty reduced word replaces one entry by a new maximal entry, the
/// curvature of exactly one new circle, and new entries never decrease along
/// a word, so a branch stops once its new entry exceeds `bound`. The result
/// holds the root circles and one circle per reduced word whose quadruple has
/// maximal entry at most `bound`; `quad_count` counts those words, root
/// included.
pub fn enumerate_orbit_with(
    root: &DescartesQuadruple,
    bound: i128,
    options: &EnumerateOptions,
) -> Result<PackingOrbit> {
    if bound <= 0 {
        return Err(Error::domain(format!("curvature bound must be positive, got {bound}")));
    }
    if reduce_to_root(root)? != *root {
        return Err(Error::domain(format!("{root} is not a root quadruple")));
    }
    if options.region.is_some() && options.embedding.is_none() {
        return Err(Error::domain("region-restricted enumeration needs an embedding"));
    }
    if options.dedup_check && options.embedding.is_none() {
        return Err(Error::domain("dedup check needs an embedding"));
    }
    if !root.is_bounded() && options.region.is_none() {
        return Err(Error::domain(format!(
            "{root} generates an unbounded packing; counting requires a region"
        )));
    }
    if let Some(e) = &options.embedding {
        if e.rows.map(|r| r.b) != root.0 {
            return Err(Error::domain("embedding does not match the root"));
        }
    }

    let region = options.region;
    let scale = options.embedding.map_or(1, |e| e.scale);
    let mut circles: Vec<OrbitCircle> = root.0.iter().map(|&k| OrbitCircle { curvature: k, depth: 0 }).collect();
    let mut positions = options.embedding.map(|e| e.rows.to_vec());
    let mut included: Vec<bool> = Vec::with_capacity(4);
    for (i, c) in circles.iter().enumerate() {
        let in_region = match (&region, &positions) {
            (Some(r), Some(p)) => geometry::circle_meets_region(&p[i].to_circle(scale), r),
            _ => true,
        };
        included.push(c.unsigned() <= bound as u128 && in_region);
    }
    let mut tangency = options.keep_tangency.then(Vec::new);
    let mut quads = options.keep_quads.then(Vec::new);
    let mut seen: Option<HashSet<AugmentedCircle>> = options.dedup_check.then(|| {
        options.embedding.expect("checked above").rows.into_iter().collect()
    });

    let mut quad_count = 0u64;
    if root.max_entry() <= bound {
        quad_count = 1;
        if let Some(t) = tangency.as_mut() {
            push_pairs(t, [0, 1, 2, 3]);
        }
        if let Some(q) = quads.as_mut() {
            q.push(QuadRecord { ids: [0, 1, 2, 3], depth: 0 });
        }
        let mut frontier = vec![Node { quad: root.0, ids: [0, 1, 2, 3], last: 0, rows: options.embedding.map(|e| e.rows) }];
        let mut depth = 0u32;
        while !frontier.is_empty() {
            depth += 1;
            let expanded: Vec<Result<Vec<Child>>> = frontier
                .par_iter()
                .with_min_len(1024)
                .map(|n| expand(n, bound, region.as_ref(), scale))
                .collect();
            let mut next = Vec::new();
            for children in expanded {
                for Child { mut node, slot } in children? {
                    let id = u32::try_from(circles.len()).map_err(|_| Error::SizeCap { what: "circles", cap: u32::MAX as usize })?;
                    let k = node.quad[slot];
                    circles.push(OrbitCircle { curvature: k, depth });
                    let mut in_region = true;
                    if let (Some(rows), Some(pos)) = (node.rows, positions.as_mut()) {
                        let row = rows[slot];
                        if let Some(s) = seen.as_mut() {
                            if !s.insert(row) {
                                return Err(Error::domain(format!(
                                    "circle {row:?} produced twice: reduced words revisited a circle"
                                )));
                            }
                        }
                        if let Some(r) = &region {
                            in_region = geometry::circle_meets_region(&row.to_circle(scale), r);
                        }
                        pos.push(row);
                    }
                    included.push(in_region);
                    node.ids[slot] = id;
                    quad_count += 1;
                    if let Some(t) = tangency.as_mut() {
                        for (j, &other) in node.ids.iter().enumerate() {
                            if j != slot {
                                t.push((other.min(id), other.max(id)));
                            }
                        }
                    }
                    if let Some(q) = quads.as_mut() {
                        q.push(QuadRecord { ids: node.ids, depth });
                    }
                    next.push(node);
                }
            }
            frontier = next;
        }
    }
    if let Some(t) = tangency.as_mut() {
        t.sort_unstable();
        t.dedup();
    }
    Ok(PackingOrbit {
        root: *root,
        bound,
        circles,
        positions,
        scale,
        tangency,
        quads,
        quad_count,
        region,
        included,
    })
}

fn push_pairs(t: &mut Vec<(u32, u32)>, ids: [u32; 4]) {
    for i in 0..4 {
        for j in i + 1..4 {
            t.push((ids[i].min(ids[j]), ids[i].max(ids[j])));
        }
    }
}

fn expand(node: &Node, bound: i128, region: Option<&Rect>, scale: i128) -> Result<Vec<Child>> {
    let mut out = Vec::with_capacity(3);
    for g in SwapGenerator::ALL {
        if g.index() == node.last {
            continue;
        }
        let quad = apply_swap(&node.quad, g)?;
        let slot = g.slot();
        if quad[slot] > bound {
            continue;
        }
        let mut rows = node.rows;
        if let Some(r) = rows.as_mut() {
            let new = AugmentedCircle::combine(r, slot)?;
            if let Some(region) = region {
                // Dual circle of the retained triple: (Σ others − old)/2 = (new − old)/4.
                let old = r[slot].to_coords(scale);
                let newc = new.to_coords(scale);
                let mirror = CircleCoords {
                    b: 0.25 * (newc.b - old.b),
                    bbar: 0.25 * (newc.bbar - old.bbar),
                    m: [0.25 * (newc.m[0] - old.m[0]), 0.25 * (newc.m[1] - old.m[1])],
                };
                if new.b != 0 {
                    let c = new.to_circle(scale).center().expect("proper");
                    if !geometry::side_meets_region(&mirror, c, region) {
                        continue;
                    }
                }
            }
            r[slot] = new;
        }
        out.push(Child { node: Node { quad, ids: node.ids, last: g.index(), rows }, slot });
    }
    Ok(out)
}

/// Histogram-only enumeration for large bounds: returns the sorted unsigned
/// curvatures of all circles up to `bound` without storing the orbit
/// structure. Equivalent to `enumerate_orbit(..).sorted_curvatures()`.
pub fn orbit_curvatures(root: &DescartesQuadruple, bound: i128) -> Result<(Vec<u128>, u64)> {
    if bound <= 0 {
        return Err(Error::domain(format!("curvature bound must be positive, got {bound}")));
    }
    if !root.is_bounded() {
        return Err(Error::domain(format!("{root} generates an unbounded packing")));
    }
    if reduce_to_root(root)? != *root {
        return Err(Error::domain(format!("{root} is not a root quadruple")));
    }
    let mut out: Vec<u128> = root.0.iter().map(|k| k.unsigned_abs()).filter(|&k| k <= bound as u128).collect();
    let mut quads = 0u64;
    if root.max_entry() <= bound {
        quads = 1;
        // Depth-first with an explicit stack: memory stays proportional to depth.
        let mut stack: Vec<([i128; 4], u8)> = vec![(root.0, 0)];
        while let Some((quad, last)) = stack.pop() {
            for g in SwapGenerator::ALL {
                if g.index() == last {
                    continue;
                }
                let next = apply_swap(&quad, g)?;
                let k = next[g.slot()];
                if k <= bound {
                    out.push(k as u128);
                    quads += 1;
                    stack.push((next, g.index()));
                }
            }
        }
    }
    out.sort_unstable();
    Ok((out, quads))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: [i128; 4]) -> DescartesQuadruple {
        DescartesQuadruple::new(v).unwrap()
    }

    fn times_matrix(v: &[i128; 4], m: &[[i64; 4]; 4]) -> [i128; 4] {
        let mut out = [0i128; 4];
        for (c, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|r| v[r] * m[r][c] as i128).sum();
        }
        out
    }

    #[test]
    fn form_examples() {
        assert_eq!(descartes_form(&[-1, 2, 2, 3]).unwrap(), 0);
        assert_eq!(descartes_form(&[1, -2, -2, -3]).unwrap(), 0);
        assert_eq!(descartes_form(&[1, 1, 1, 1]).unwrap(), -8);
        assert_eq!(descartes_form(&[0, 0, 1, 1]).unwrap(), 0);
        assert!(matches!(descartes_form(&[i128::MAX, 0, 0, 0]), Err(Error::Overflow(_))));
    }

    #[test]
    fn matrices_match_printed_generators() {
        let s1 = [[-1, 0, 0, 0], [2, 1, 0, 0], [2, 0, 1, 0], [2, 0, 0, 1]];
        let s4 = [[1, 0, 0, 2], [0, 1, 0, 2], [0, 0, 1, 2], [0, 0, 0, -1]];
        assert_eq!(SwapGenerator::new(1).unwrap().matrix(), s1);
        assert_eq!(SwapGenerator::new(4).unwrap().matrix(), s4);
        assert!(SwapGenerator::new(0).is_err() && SwapGenerator::new(5).is_err());
    }

    #[test]
    fn swap_examples() {
        let v = [-1, 2, 2, 3];
        let g = |i| SwapGenerator::new(i).unwrap();
        assert_eq!(apply_swap(&v, g(1)).unwrap(), [15, 2, 2, 3]);
        assert_eq!(times_matrix(&v, &g(1).matrix()), [15, 2, 2, 3]);
        assert_eq!(apply_swap(&v, g(4)).unwrap(), [-1, 2, 2, 3]);
        assert_eq!(apply_swap(&v, g(2)).unwrap(), [-1, 6, 2, 3]);
        assert!(matches!(apply_swap(&[i128::MAX, 1, 0, 0], g(2)), Err(Error::Overflow(_))));
    }

    #[test]
    fn reduce_examples() {
        let root = q([-1, 2, 2, 3]);
        assert_eq!(reduce_to_root(&q([15, 2, 2, 3])).unwrap(), root);
        assert_eq!(reduce_to_root(&root).unwrap(), root);
        assert_eq!(reduce_to_root(&q([-1, 6, 2, 3])).unwrap(), root);
        assert_eq!(reduce_to_root(&q([0, 0, 1, 1])).unwrap(), q([0, 0, 1, 1]));
    }

    #[test]
    fn validation() {
        assert!(matches!(DescartesQuadruple::new([1, 1, 1, 1]), Err(Error::NotDescartes { residual: -8, .. })));
        assert!(DescartesQuadruple::new([0, 0, 0, 0]).is_err());
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(&q([-1, 2, 2, 3])));
        assert!(!is_primitive(&q([-2, 4, 4, 6])));
        assert!(is_primitive(&q([0, 0, 1, 1])));
    }

    #[test]
    fn small_orbits() {
        let root = q([-1, 2, 2, 3]);
        let o3 = enumerate_orbit(&root, 3).unwrap();
        assert_eq!(o3.sorted_curvatures(), vec![1, 2, 2, 3, 3]);
        assert_eq!(o3.quad_count, 2);
        let o6 = enumerate_orbit(&root, 6).unwrap();
        assert_eq!(o6.sorted_curvatures(), vec![1, 2, 2, 3, 3, 6, 6, 6, 6]);
        assert_eq!(o6.circle_count() as u64, o6.quad_count + 3);
        let o1 = enumerate_orbit(&root, 1).unwrap();
        assert_eq!(o1.sorted_curvatures(), vec![1]);
        assert_eq!(o1.quad_count, 0);
        assert!(enumerate_orbit(&root, 0).is_err());
    }

    #[test]
    fn non_root_rejected() {
        assert!(enumerate_orbit(&q([15, 2, 2, 3]), 100).is_err());
    }

    #[test]
    fn strip_requires_region() {
        let strip = q([0, 0, 1, 1]);
        assert!(enumerate_orbit(&strip, 10).is_err());
        let opts = EnumerateOptions {
            embedding: Embedding::standard_for(&strip),
            region: Some(Rect::new(0.0, 2.0, -1.0, 3.0).unwrap()),
            ..Default::default()
        };
        let o = enumerate_orbit_with(&strip, 1, &opts).unwrap();
        let inner: Vec<u128> = o.sorted_curvatures().into_iter().filter(|&k| k > 0).collect();
        assert_eq!(inner, vec![1, 1]);
    }

    #[test]
    fn embedding_tracks_geometry() {
        let root = q([-1, 2, 2, 3]);
        let e = Embedding::standard_for(&root).unwrap();
        let seed = geometry::SeedConfiguration::standard();
        for (a, b) in e.circles().iter().zip(seed.circles.iter()) {
            assert_eq!(a, b);
        }
        let opts = EnumerateOptions { embedding: Some(e), dedup_check: true, keep_tangency: true, ..Default::default() };
        let o = enumerate_orbit_with(&root, 200, &opts).unwrap();
        let circles = o.geometric_circles().unwrap();
        let tangency = o.tangency.as_ref().unwrap();
        for &(a, b) in tangency.iter().take(500) {
            assert!(circles[a as usize].is_tangent(&circles[b as usize]), "{a} {b}");
        }
    }

    #[test]
    fn dump_roundtrip_line() {
        let o = enumerate_orbit(&q([-1, 2, 2, 3]), 6).unwrap();
        let mut buf = Vec::new();
        o.write_dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count() as u64, o.quad_count);
        assert_eq!(text.lines().next().unwrap(), "0 -1,2,2,3");
        for line in text.lines() {
            let (_, v) = parse_dump_line(line).unwrap();
            assert_eq!(descartes_form(&v).unwrap(), 0);
        }
    }

    #[test]
    fn histogram_path_agrees() {
        let root = q([-1, 2, 2, 3]);
        let o = enumerate_orbit(&root, 500).unwrap();
        let (k, quads) = orbit_curvatures(&root, 500).unwrap();
        assert_eq!(k, o.sorted_curvatures());
        assert_eq!(quads, o.quad_count);
    }
}
