//! Run configuration, read from TOML.
//!
//! ```toml
//! root = [-1, 2, 2, 3]
//! bound = 10000
//!
//! [grid]                     # count-curve sample points, log spaced
//! t_min = 10.0              # defaults to min(10, bound/10)
//! points = 41                # t_max defaults to bound
//!
//! [fit]
//! windows = [[100.0, 10000.0]]
//!
//! [window]                   # region for unbounded packings and renders
//! x_min = 0.0
//! x_max = 2.0
//! y_min = -1.0
//! y_max = 3.0
//!
//! [[regions]]                # N(T, E) tables
//! name = "left"
//! x_min = -1.0
//! x_max = 0.0
//! y_min = -1.0
//! y_max = 1.0
//!
//! [render]
//! bound = 100.0
//! width = 800.0
//!
//! [arithmetic]
//! bounds = [100, 1000, 10000]
//! modulus = 24
//!
//! [spectral]
//! moduli = [2, 3, 5, 7]
//!
//! [sieve]
//! selectors = ["x1", "x1*x2"]
//! level = 50
//!
//! [boxcount]
//! bound = 10000.0
//! eps = [0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125]
//!
//! [[seed.circles]]           # explicit geometric seed (optional)
//! center = [0.0, 0.0]
//! curvature = -1.0
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::congruence::{DEFAULT_DENSE_CAP, DEFAULT_GROUP_CAP};
use crate::error::{Error, Result};
use crate::geometry::{Circle, Rect, SeedConfiguration};
use crate::quad::{reduce_to_root, DescartesQuadruple, Embedding};
use crate::sieve::Selector;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub root: [i64; 4],
    pub bound: i64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub fit: FitSpec,
    pub window: Option<RegionSpec>,
    #[serde(default)]
    pub regions: Vec<NamedRegion>,
    /// Curvature bound for region tables; defaults to `min(bound, 10⁴)`.
    pub region_bound: Option<i64>,
    #[serde(default)]
    pub render: RenderSpec,
    #[serde(default)]
    pub arithmetic: ArithmeticSpec,
    #[serde(default)]
    pub spectral: SpectralSpec,
    #[serde(default)]
    pub sieve: SieveSpec,
    pub boxcount: Option<BoxcountSpec>,
    pub seed: Option<SeedSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    /// Defaults to `min(10, bound/10)`.
    pub t_min: Option<f64>,
    /// Defaults to `bound`.
    pub t_max: Option<f64>,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { t_min: None, t_max: None, points: 41 }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSpec {
    pub windows: Vec<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl RegionSpec {
    pub fn rect(&self) -> Result<Rect> {
        Rect::new(self.x_min, self.x_max, self.y_min, self.y_max).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedRegion {
    pub name: String,
    #[serde(flatten)]
    pub rect: RegionSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderSpec {
    /// Curvature bound of the rendered circles; defaults to `min(bound, 100)`.
    pub bound: Option<f64>,
    pub width: f64,
    pub stroke_width: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec { bound: None, width: 800.0, stroke_width: 0.5 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArithmeticSpec {
    /// Bounds at which prime statistics are tabulated; clipped to `bound`.
    pub bounds: Vec<u64>,
    pub modulus: u64,
    /// Exponent in the `Π_T·log T / T^α` shape column.
    pub alpha: f64,
}

impl Default for ArithmeticSpec {
    fn default() -> Self {
        ArithmeticSpec { bounds: vec![100, 1000, 10_000], modulus: 24, alpha: 1.3057 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralSpec {
    pub moduli: Vec<u32>,
    pub group_cap: usize,
    pub dense_cap: usize,
}

impl Default for SpectralSpec {
    fn default() -> Self {
        SpectralSpec { moduli: vec![2, 3, 5, 7], group_cap: DEFAULT_GROUP_CAP, dense_cap: DEFAULT_DENSE_CAP }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SieveSpec {
    pub selectors: Vec<String>,
    /// Series bound; defaults to `min(bound, 10⁴)`.
    pub bound: Option<i64>,
    pub level: u64,
    pub z: Vec<u64>,
    /// Primes below this enter the sieve-dimension fit.
    pub dimension_primes: u64,
}

impl Default for SieveSpec {
    fn default() -> Self {
        SieveSpec {
            selectors: vec!["x1".into()],
            bound: None,
            level: 50,
            z: vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29],
            dimension_primes: 50,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxcountSpec {
    pub bound: f64,
    pub eps: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    pub circles: Vec<SeedCircle>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SeedCircle {
    Proper { center: [f64; 2], curvature: f64 },
    Line { normal: [f64; 2], offset: f64 },
}

impl SeedCircle {
    fn circle(&self) -> Result<Circle> {
        match *self {
            SeedCircle::Proper { center, curvature } => Circle::proper(center, curvature),
            SeedCircle::Line { normal, offset } => Circle::line(normal, offset),
        }
    }
}

/// Relative Descartes-form tolerance for explicit seeds.
pub const SEED_TOL: f64 = 1e-6;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The configured quadruple, checked against the Descartes form.
    pub fn quadruple(&self) -> Result<DescartesQuadruple> {
        DescartesQuadruple::new(self.root.map(i128::from))
    }

    /// Root of the configured quadruple's packing.
    pub fn root_quadruple(&self) -> Result<DescartesQuadruple> {
        let q = self.quadruple()?;
        let root = reduce_to_root(&q)?;
        if root != q {
            log::info!("reduced {q} to its root {root}");
        }
        Ok(root)
    }

    /// Count-curve range `(t_min, t_max)` with defaults applied.
    pub fn grid_range(&self) -> (f64, f64) {
        let b = self.bound as f64;
        (self.grid.t_min.unwrap_or((b / 10.0).min(10.0)), self.grid.t_max.unwrap_or(b))
    }

    pub fn window_rect(&self) -> Result<Option<Rect>> {
        self.window.as_ref().map(|w| w.rect()).transpose()
    }

    fn validate(&self) -> Result<()> {
        let q = self.quadruple()?;
        if self.bound <= 0 {
            return Err(Error::Config(format!("bound must be positive, got {}", self.bound)));
        }
        if !q.is_bounded() && self.window.is_none() {
            return Err(Error::Config("unbounded packing requires a region: set [window]".into()));
        }
        let (t_min, t_max) = self.grid_range();
        if !(t_min > 0.0 && t_max > t_min && t_max <= self.bound as f64) || self.grid.points < 2 {
            return Err(Error::Config("grid needs 0 < t_min < t_max ≤ bound and at least 2 points".into()));
        }
        for w in &self.fit.windows {
            if !(w[0] > 0.0 && w[1] > w[0] && w[1] <= t_max) {
                return Err(Error::Config(format!("fit window {w:?} must lie inside the grid")));
            }
        }
        if let Some(w) = &self.window {
            w.rect()?;
        }
        for r in &self.regions {
            r.rect.rect()?;
        }
        if self.arithmetic.modulus == 0 {
            return Err(Error::Config("arithmetic.modulus must be at least 1".into()));
        }
        if self.spectral.moduli.iter().any(|&m| !(1..=255).contains(&m)) {
            return Err(Error::Config("spectral moduli must lie in 1..=255".into()));
        }
        for s in &self.sieve.selectors {
            s.parse::<Selector>()?;
        }
        if self.sieve.level < 2 || self.sieve.z.iter().any(|&z| z < 2) {
            return Err(Error::Config("sieve level and z values must be at least 2".into()));
        }
        if let Some(b) = &self.boxcount {
            if !(b.bound > 0.0) || b.eps.len() < 2 || b.eps.iter().any(|e| !(*e > 0.0)) {
                return Err(Error::Config("boxcount needs a positive bound and at least two positive eps".into()));
            }
        }
        if let Some(seed) = &self.seed {
            if seed.circles.len() != 4 {
                return Err(Error::Config("seed needs exactly four circles".into()));
            }
        }
        Ok(())
    }

    pub fn selectors(&self) -> Result<Vec<Selector>> {
        self.sieve.selectors.iter().map(|s| s.parse()).collect()
    }

    /// Geometric seed: the explicit `[seed]`, or the known placement of the
    /// root.
    pub fn geometric_seed(&self) -> Result<SeedConfiguration> {
        if let Some(spec) = &self.seed {
            let circles: Vec<Circle> = spec.circles.iter().map(|c| c.circle()).collect::<Result<_>>()?;
            let seed = SeedConfiguration::new(circles.try_into().expect("validated length"))?;
            self.check_seed(&seed)?;
            return Ok(seed);
        }
        let root = self.root_quadruple()?;
        match Embedding::standard_for(&root) {
            Some(e) => SeedConfiguration::new(e.circles()),
            None => Err(Error::Config(format!(
                "no built-in geometric seed for root {root}; provide [seed] circles"
            ))),
        }
    }

    /// Seed curvatures must satisfy the Descartes relation and match the
    /// configured quadruple up to order.
    pub fn check_seed(&self, seed: &SeedConfiguration) -> Result<()> {
        let mut ks = seed.circles.map(|c| c.curvature());
        let scale = ks.iter().map(|k| k * k).sum::<f64>().max(1.0);
        let residual = seed.descartes_residual();
        if residual.abs() > SEED_TOL * scale {
            return Err(Error::Config(format!("seed curvatures violate the Descartes relation: Q = {residual:e}")));
        }
        ks.sort_by(f64::total_cmp);
        let mut want = self.root.map(|v| v as f64);
        want.sort_by(f64::total_cmp);
        if ks.iter().zip(&want).any(|(a, b)| (a - b).abs() > SEED_TOL * (1.0 + b.abs())) {
            return Err(Error::Config(format!("seed curvatures {ks:?} do not match root {want:?}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = RunConfig::parse("root = [-1, 2, 2, 3]\nbound = 100\n").unwrap();
        assert_eq!(c.grid.points, 41);
        assert_eq!(c.spectral.moduli, vec![2, 3, 5, 7]);
        assert!(c.geometric_seed().is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        let e = RunConfig::parse("root = [1, 1, 1, 1]\nbound = 100\n").unwrap_err();
        assert!(e.to_string().contains("Q = -8"), "{e}");
        assert_eq!(e.exit_code(), 2);
        assert!(RunConfig::parse("root = [0, 0, 1, 1]\nbound = 10\n").unwrap_err().to_string().contains("region"));
        assert!(RunConfig::parse("root = [-1, 2, 2, 3]\nbound = 10\nbogus = 1\n").is_err());
        assert!(RunConfig::parse("root = [-1, 2, 2, 3]\nbound = 10\n[sieve]\nselectors = [\"y\"]\n").is_err());
    }

    #[test]
    fn explicit_seed() {
        let text = r#"
root = [-1, 2, 2, 3]
bound = 10
[[seed.circles]]
center = [0.0, 0.0]
curvature = -1.0
[[seed.circles]]
center = [0.5, 0.0]
curvature = 2.0
[[seed.circles]]
center = [-0.5, 0.0]
curvature = 2.0
[[seed.circles]]
center = [0.0, -0.6666666666666666]
curvature = 3.0
"#;
        let c = RunConfig::parse(text).unwrap();
        let seed = c.geometric_seed().unwrap();
        assert!(seed.circles[3].center().unwrap()[1] < 0.0);
        let bad = text.replace("curvature = 3.0", "curvature = 4.0");
        assert!(RunConfig::parse(&bad).unwrap().geometric_seed().is_err());
    }
}
