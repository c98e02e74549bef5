//! Reductions of the Apollonian group modulo `q`, their Cayley graphs,
//! adjacency spectra and Cheeger constants.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::primes::is_square_free;
use crate::quad::{DescartesQuadruple, SwapGenerator};

pub const DEFAULT_GROUP_CAP: usize = 10_000_000;
pub const DEFAULT_DENSE_CAP: usize = 5_000;
pub const EXACT_CHEEGER_CAP: usize = 20;
pub const LANCZOS_TOL: f64 = 1e-8;

/// A 4×4 matrix over `Z/q` packed one byte per entry, row-major.
pub type PackedMatrix = u128;

fn entry(m: PackedMatrix, r: usize, c: usize) -> u32 {
    ((m >> (8 * (4 * r + c))) & 0xff) as u32
}

fn pack(rows: [[u32; 4]; 4]) -> PackedMatrix {
    let mut m = 0u128;
    for (r, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            m |= (v as u128) << (8 * (4 * r + c));
        }
    }
    m
}

pub fn unpack(m: PackedMatrix) -> [[u32; 4]; 4] {
    let mut rows = [[0; 4]; 4];
    for (r, row) in rows.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = entry(m, r, c);
        }
    }
    rows
}

fn check_modulus(q: u32) -> Result<()> {
    if !(1..=255).contains(&q) {
        return Err(Error::domain(format!("modulus {q} outside the supported range 1..=255")));
    }
    Ok(())
}

/// `Sᵢ` reduced modulo `q`.
pub fn generator_mod(g: SwapGenerator, q: u32) -> PackedMatrix {
    let m = g.matrix();
    pack(m.map(|row| row.map(|v| v.rem_euclid(q as i64) as u32)))
}

pub fn mat_mul_mod(a: PackedMatrix, b: PackedMatrix, q: u32) -> PackedMatrix {
    let mut rows = [[0u32; 4]; 4];
    for (r, row) in rows.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = (0..4).map(|k| entry(a, r, k) * entry(b, k, c)).sum::<u32>() % q;
        }
    }
    pack(rows)
}

/// `g·Sᵢ`: column `i` becomes twice the sum of the other columns minus itself.
fn right_swap(g: PackedMatrix, slot: usize, q: u32) -> PackedMatrix {
    let mut out = g;
    for r in 0..4 {
        let others: u32 = (0..4).filter(|&c| c != slot).map(|c| entry(g, r, c)).sum();
        let v = (2 * others + q - entry(g, r, slot)) % q;
        let shift = 8 * (4 * r + slot);
        out = (out & !(0xffu128 << shift)) | ((v as u128) << shift);
    }
    out
}

/// The image of the Apollonian group in `GL₄(Z/q)`.
#[derive(Clone, Debug)]
pub struct FiniteGroupImage {
    pub modulus: u32,
    /// Elements in breadth-first order from the identity.
    pub elements: Vec<PackedMatrix>,
    pub generators: [PackedMatrix; 4],
    /// `right_mul[4·g + i]` is the index of `g·Sᵢ`.
    pub right_mul: Vec<u32>,
}

impl FiniteGroupImage {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Breadth-first closure of `{S₁ … S₄}` modulo `q`, capped at `cap` elements.
pub fn reduce_group_mod(q: u32, cap: usize) -> Result<FiniteGroupImage> {
    check_modulus(q)?;
    if q > 1 && !is_square_free(q as u64) {
        log::warn!("modulus {q} is not square-free");
    }
    let generators = SwapGenerator::ALL.map(|g| generator_mod(g, q));
    let identity = pack(std::array::from_fn(|r| std::array::from_fn(|c| u32::from(r == c) % q)));
    let mut index: HashMap<PackedMatrix, u32> = HashMap::new();
    let mut elements = vec![identity];
    index.insert(identity, 0);
    let mut right_mul: Vec<u32> = Vec::new();
    let mut head = 0;
    while head < elements.len() {
        let g = elements[head];
        for slot in 0..4 {
            let h = right_swap(g, slot, q);
            let id = match index.get(&h) {
                Some(&id) => id,
                None => {
                    if elements.len() >= cap {
                        return Err(Error::SizeCap { what: "group elements", cap });
                    }
                    let id = elements.len() as u32;
                    elements.push(h);
                    index.insert(h, id);
                    id
                }
            };
            right_mul.push(id);
        }
        head += 1;
    }
    Ok(FiniteGroupImage { modulus: q, elements, generators, right_mul })
}

/// A `degree`-regular multigraph stored as flattened neighbor lists. A vertex
/// listed as its own neighbor carries a weight-one self-loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularGraph {
    pub degree: usize,
    pub neighbors: Vec<u32>,
}

impl RegularGraph {
    /// Validates that every vertex has `degree` entries and that edge
    /// multiplicities are symmetric.
    pub fn new(degree: usize, neighbors: Vec<u32>) -> Result<Self> {
        if degree == 0 || !neighbors.len().is_multiple_of(degree) {
            return Err(Error::domain("neighbor list length is not a multiple of the degree"));
        }
        let n = neighbors.len() / degree;
        if neighbors.iter().any(|&u| u as usize >= n) {
            return Err(Error::domain("neighbor index out of range"));
        }
        let g = RegularGraph { degree, neighbors };
        if n <= 100_000 {
            let mut count: HashMap<(u32, u32), i64> = HashMap::new();
            for v in 0..n as u32 {
                for &u in g.nbrs(v) {
                    *count.entry((v, u)).or_insert(0) += 1;
                }
            }
            if count.iter().any(|(&(v, u), &c)| count.get(&(u, v)) != Some(&c)) {
                return Err(Error::domain("adjacency is not symmetric"));
            }
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.neighbors.len() / self.degree
    }

    pub fn nbrs(&self, v: u32) -> &[u32] {
        let d = self.degree;
        &self.neighbors[v as usize * d..(v as usize + 1) * d]
    }

    /// Undirected edges counted with multiplicity, self-loops once each.
    pub fn edge_count(&self) -> usize {
        let loops = (0..self.vertex_count() as u32)
            .map(|v| self.nbrs(v).iter().filter(|&&u| u == v).count())
            .sum::<usize>();
        (self.neighbors.len() - loops) / 2 + loops
    }

    pub fn component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut comps = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            comps += 1;
            seen[s] = true;
            let mut queue = VecDeque::from([s as u32]);
            while let Some(v) = queue.pop_front() {
                for &u in self.nbrs(v) {
                    if !seen[u as usize] {
                        seen[u as usize] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        comps
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(v, out)| {
            *out = self.nbrs(v as u32).iter().map(|&u| x[u as usize]).sum();
        });
    }

    pub fn complete(n: usize) -> Result<Self> {
        let nb = (0..n as u32).flat_map(|v| (0..n as u32).filter(move |&u| u != v)).collect();
        RegularGraph::new(n - 1, nb)
    }

    /// Circulant graph on `Z/n` joining `v` to `v ± s` for each step `s`.
    pub fn circulant(n: usize, steps: &[usize]) -> Result<Self> {
        let nb = (0..n)
            .flat_map(|v| steps.iter().flat_map(move |&s| [(v + s) % n, (v + n - s % n) % n]))
            .map(|u| u as u32)
            .collect();
        RegularGraph::new(2 * steps.len(), nb)
    }
}

/// The right Cayley graph of the image with respect to `{S₁ … S₄}`.
/// Generators fixing an element only occur for `q ≤ 2`, where they become
/// self-loops.
pub fn build_cayley(img: &FiniteGroupImage) -> RegularGraph {
    RegularGraph { degree: 4, neighbors: img.right_mul.clone() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralMethod {
    Dense,
    Lanczos,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralReport {
    pub vertices: usize,
    pub lambda0: f64,
    /// Second largest eigenvalue; undefined on a single vertex.
    pub lambda1: Option<f64>,
    pub lambda_min: f64,
    pub cheeger_lower: Option<f64>,
    pub cheeger_upper: Option<f64>,
    pub exact_cheeger: Option<f64>,
    pub components: usize,
    pub method: SpectralMethod,
    /// Largest Ritz residual for the iterative solver; zero for dense.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    pub dense_cap: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { dense_cap: DEFAULT_DENSE_CAP, tol: LANCZOS_TOL, max_iter: 3000, seed: 0x5eed }
    }
}

/// Adjacency eigenvalues in descending order.
pub fn dense_eigenvalues(g: &RegularGraph) -> Vec<f64> {
    let n = g.vertex_count();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        for &u in g.nbrs(v as u32) {
            a[(v, u as usize)] += 1.0;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Largest and smallest eigenvalues of the adjacency operator restricted to
/// the complement of the constant vector, by Lanczos without stored basis.
/// The constant vector is projected out at every step. Returns the two
/// extremes and the larger Ritz residual.
fn lanczos_extremes(g: &RegularGraph, opts: &SpectrumOptions) -> Result<(f64, f64, f64)> {
    let n = g.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let deflate = |x: &mut [f64]| {
        let mean = x.iter().sum::<f64>() / n as f64;
        x.iter_mut().for_each(|v| *v -= mean);
    };
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();

    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    deflate(&mut v);
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut v_prev = vec![0.0; n];
    let mut w = vec![0.0; n];
    let (mut alphas, mut betas) = (Vec::new(), Vec::new());
    let mut beta_prev = 0.0;
    let mut last_residual = f64::INFINITY;
    for j in 0..opts.max_iter.min(n - 1) {
        g.matvec(&v, &mut w);
        w.iter_mut().zip(&v_prev).for_each(|(a, b)| *a -= beta_prev * b);
        let alpha = dot(&w, &v);
        w.iter_mut().zip(&v).for_each(|(a, b)| *a -= alpha * b);
        deflate(&mut w);
        let c = dot(&w, &v);
        w.iter_mut().zip(&v).for_each(|(a, b)| *a -= c * b);
        let beta = norm(&w);
        alphas.push(alpha);
        let done = beta < 1e-12 || j + 2 >= n;
        if done || (j + 1) % 10 == 0 {
            let k = alphas.len();
            let t = DMatrix::from_fn(k, k, |r, c| {
                if r == c {
                    alphas[r]
                } else if r + 1 == c {
                    betas[r]
                } else if c + 1 == r {
                    betas[c]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let (mut imax, mut imin) = (0, 0);
            for i in 0..k {
                if eig.eigenvalues[i] > eig.eigenvalues[imax] {
                    imax = i;
                }
                if eig.eigenvalues[i] < eig.eigenvalues[imin] {
                    imin = i;
                }
            }
            let res = |i: usize| beta * eig.eigenvectors[(k - 1, i)].abs();
            let residual = res(imax).max(res(imin));
            last_residual = residual;
            if done || residual < opts.tol {
                return Ok((eig.eigenvalues[imax], eig.eigenvalues[imin], residual));
            }
        }
        betas.push(beta);
        std::mem::swap(&mut v_prev, &mut v);
        v.iter_mut().zip(&w).for_each(|(a, b)| *a = b / beta);
        beta_prev = beta;
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: last_residual })
}

/// Adjacency spectrum summary with Cheeger bounds `(k − λ₁)/2 ≤ h ≤
/// √(2k(k − λ₁))`. Small graphs also get the exact Cheeger constant.
pub fn spectrum(g: &RegularGraph, opts: &SpectrumOptions) -> Result<SpectralReport> {
    let n = g.vertex_count();
    let k = g.degree as f64;
    let components = g.component_count();
    let (lambda0, lambda1, lambda_min, method, residual) = if n <= opts.dense_cap {
        let ev = dense_eigenvalues(g);
        (ev[0], ev.get(1).copied(), *ev.last().unwrap(), SpectralMethod::Dense, 0.0)
    } else {
        // Regularity makes the constant vector an exact eigenvector.
        let (top, bottom, residual) = lanczos_extremes(g, opts)?;
        (k, Some(top), bottom.min(top), SpectralMethod::Lanczos, residual)
    };
    let cheeger_lower = lambda1.map(|l| (k - l) / 2.0);
    let cheeger_upper = lambda1.map(|l| (2.0 * k * (k - l).max(0.0)).sqrt());
    let exact = if (2..=EXACT_CHEEGER_CAP).contains(&n) { Some(exact_cheeger(g)?) } else { None };
    Ok(SpectralReport {
        vertices: n,
        lambda0,
        lambda1,
        lambda_min,
        cheeger_lower,
        cheeger_upper,
        exact_cheeger: exact,
        components,
        method,
        residual,
    })
}

/// `min #∂W / #W` over nonempty `W` with `#W ≤ #V/2`, by walking all
/// subsets in Gray-code order.
pub fn exact_cheeger(g: &RegularGraph) -> Result<f64> {
    let n = g.vertex_count();
    if n > EXACT_CHEEGER_CAP {
        return Err(Error::SizeCap { what: "vertices for exact Cheeger", cap: EXACT_CHEEGER_CAP });
    }
    if n < 2 {
        return Err(Error::domain("Cheeger constant is undefined on fewer than two vertices"));
    }
    let mut set: u32 = 0;
    let mut size = 0usize;
    let mut cut: i64 = 0;
    let mut best = f64::INFINITY;
    for i in 1u32..(1 << n) {
        let v = i.trailing_zeros();
        let cur = set;
        let inside = |u: u32| cur >> u & 1 == 1;
        let links = g.nbrs(v).iter().filter(|&&u| u != v);
        let (to_set, total) = links.fold((0i64, 0i64), |(a, t), &u| (a + i64::from(inside(u)), t + 1));
        if inside(v) {
            cut += 2 * to_set - total;
            set &= !(1 << v);
            size -= 1;
        } else {
            cut += total - 2 * to_set;
            set |= 1 << v;
            size += 1;
        }
        if 2 * size <= n {
            best = best.min(cut as f64 / size as f64);
        }
    }
    Ok(best)
}

/// Orbit of `root` modulo `q` under the reduced swaps, sorted.
pub fn orbit_mod(root: &DescartesQuadruple, q: u32) -> Result<Vec<[u32; 4]>> {
    check_modulus(q)?;
    let start = root.entries().map(|v| v.rem_euclid(q as i128) as u32);
    let code = |v: &[u32; 4]| v.iter().fold(0u32, |acc, &x| acc << 8 | x);
    let mut seen = std::collections::HashSet::from([code(&start)]);
    let mut out = vec![start];
    let mut head = 0;
    while head < out.len() {
        let v = out[head];
        head += 1;
        for slot in 0..4 {
            let others: u32 = (0..4).filter(|&j| j != slot).map(|j| v[j]).sum();
            let mut w = v;
            w[slot] = (2 * others + q - v[slot]) % q;
            if seen.insert(code(&w)) {
                out.push(w);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpanderRow {
    pub q: u32,
    pub group_order: usize,
    pub report: SpectralReport,
}

/// Spectral rows for each modulus.
pub fn expander_table(moduli: &[u32], cap: usize, opts: &SpectrumOptions) -> Result<Vec<ExpanderRow>> {
    moduli
        .iter()
        .map(|&q| {
            let img = reduce_group_mod(q, cap)?;
            let report = spectrum(&build_cayley(&img), opts)?;
            Ok(ExpanderRow { q, group_order: img.order(), report })
        })
        .collect()
}

/// CSV with header `q,group_order,lambda1,cheeger_lower,cheeger_upper`;
/// undefined values are left empty.
pub fn expander_csv(rows: &[ExpanderRow]) -> String {
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.10}")).unwrap_or_default();
    let mut s = String::from("q,group_order,lambda1,cheeger_lower,cheeger_upper\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.q,
            r.group_order,
            opt(r.report.lambda1),
            opt(r.report.cheeger_lower),
            opt(r.report.cheeger_upper)
        );
    }
    s
}

/// `4 − max λ₁` over the rows with a defined `λ₁`.
pub fn expander_gap(rows: &[ExpanderRow]) -> Option<f64> {
    rows.iter()
        .filter_map(|r| r.report.lambda1)
        .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |a| a.max(l))))
        .map(|l| 4.0 - l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::descartes_form;

    #[test]
    fn generators_are_involutions() {
        for q in [2, 3, 5, 7, 12] {
            for g in SwapGenerator::ALL {
                let s = generator_mod(g, q);
                let id = pack(std::array::from_fn(|r| std::array::from_fn(|c| u32::from(r == c))));
                assert_eq!(mat_mul_mod(s, s, q), id);
                assert_eq!(right_swap(id, g.slot(), q), s);
            }
        }
    }

    #[test]
    fn small_images() {
        let g1 = reduce_group_mod(1, 10).unwrap();
        assert_eq!(g1.order(), 1);
        let g2 = reduce_group_mod(2, 100).unwrap();
        assert_eq!(g2.order(), 1);
        let cay = build_cayley(&g2);
        assert_eq!(cay.nbrs(0), &[0, 0, 0, 0]);
        let g3 = reduce_group_mod(3, 100_000).unwrap();
        let gl4_3: u64 = (81 - 1) * (81 - 3) * (81 - 9) * (81 - 27);
        assert_eq!(gl4_3 % g3.order() as u64, 0);
        let g6 = reduce_group_mod(6, 100_000).unwrap();
        assert_eq!(g6.order(), g2.order() * g3.order());
        assert!(matches!(reduce_group_mod(5, 10), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn cayley_is_regular_and_connected() {
        let img = reduce_group_mod(3, 100_000).unwrap();
        let g = RegularGraph::new(4, build_cayley(&img).neighbors).unwrap();
        assert_eq!(g.component_count(), 1);
        assert_eq!(g.edge_count(), 2 * img.order());
        // Every element preserves the form modulo q.
        let v = [-1i128, 2, 2, 3];
        for &m in &img.elements {
            let rows = unpack(m);
            let w: [i128; 4] = std::array::from_fn(|c| (0..4).map(|r| v[r] * rows[r][c] as i128).sum::<i128>());
            assert_eq!(descartes_form(&w).unwrap().rem_euclid(3), 0);
        }
    }

    #[test]
    fn complete_graph_spectrum() {
        let k5 = RegularGraph::complete(5).unwrap();
        let r = spectrum(&k5, &SpectrumOptions::default()).unwrap();
        assert!((r.lambda0 - 4.0).abs() < 1e-9);
        assert!((r.lambda1.unwrap() + 1.0).abs() < 1e-9);
        assert!((r.exact_cheeger.unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn circulant_closed_form() {
        let n = 12;
        let g = RegularGraph::circulant(n, &[1, 2]).unwrap();
        let mut expected: Vec<f64> = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                2.0 * t.cos() + 2.0 * (2.0 * t).cos()
            })
            .collect();
        expected.sort_by(|a, b| b.total_cmp(a));
        let got = dense_eigenvalues(&g);
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn doubled_cycle_cheeger() {
        let g = RegularGraph::new(4, (0..6u32).flat_map(|v| [(v + 5) % 6, (v + 5) % 6, (v + 1) % 6, (v + 1) % 6]).collect()).unwrap();
        assert!((exact_cheeger(&g).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        let single = RegularGraph::new(4, vec![0, 0, 0, 0]).unwrap();
        assert!(exact_cheeger(&single).is_err());
    }

    #[test]
    fn lanczos_matches_dense() {
        let img = reduce_group_mod(3, 100_000).unwrap();
        let g = build_cayley(&img);
        let dense = spectrum(&g, &SpectrumOptions::default()).unwrap();
        let iter = spectrum(&g, &SpectrumOptions { dense_cap: 0, ..Default::default() }).unwrap();
        assert_eq!(iter.method, SpectralMethod::Lanczos);
        assert!((dense.lambda1.unwrap() - iter.lambda1.unwrap()).abs() < 1e-7, "{dense:?} {iter:?}");
        assert!((dense.lambda_min - iter.lambda_min).abs() < 1e-7);
    }

    #[test]
    fn orbits_mod_q() {
        let root = DescartesQuadruple::new([-1, 2, 2, 3]).unwrap();
        assert_eq!(orbit_mod(&root, 1).unwrap(), vec![[0, 0, 0, 0]]);
        assert_eq!(orbit_mod(&root, 2).unwrap(), vec![[1, 0, 0, 1]]);
        let o3 = orbit_mod(&root, 3).unwrap();
        let g3 = reduce_group_mod(3, 100_000).unwrap();
        assert_eq!(g3.order() % o3.len(), 0);
        assert!(o3.iter().all(|v| descartes_form(&v.map(|x| x as i128)).unwrap() % 3 == 0));
    }
}
