//! Command-line driver: `generate`, `render` and `report`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::arithmetic::{
    distinct_density, missing_csv, missing_integers, no_odd_prime_triple, odd_entry_histogram, prime_shape_report,
    prime_stats_at, prime_stats_csv, residues_mod, tally,
};
use crate::config::RunConfig;
use crate::congruence::{expander_csv, expander_gap, expander_table, SpectrumOptions};
use crate::counting::{
    apollonian_constant_proxy, boxcount_dimension, count_curve_from_sorted, count_in_region, fit_exponent, log_grid,
    CountCurve, ExponentFit,
};
use crate::error::{Error, Result};
use crate::geometry::{generate_packing_geometric, Circle, Rect, SeedConfiguration};
use crate::quad::{enumerate_orbit_with, orbit_curvatures, DescartesQuadruple, Embedding, EnumerateOptions, PackingOrbit};
use crate::render::{render_svg, RenderOptions};
use crate::sieve::{
    almost_prime_count, build_series, census, default_excluded, level_distribution_report, sieve_dimension,
    sifted_csv, slices_csv,
};

#[derive(Debug, Parser)]
#[command(name = "apollonian", version, about = "Apollonian circle packing generator and statistics")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Validate the geometric seed against the configured root first.
    #[arg(long, global = true)]
    pub seed_check: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate the orbit; write the quadruple dump and circle list.
    Generate,
    /// Draw the packing as SVG.
    Render,
    /// Compute every statistic and write CSV tables plus a summary.
    Report,
}

/// Runs the parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    if let Some(n) = cli.threads {
        // A global pool can only be installed once per process.
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already initialized: {e}");
        }
    }
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let cfg = RunConfig::load(path)?;
    if cli.seed_check {
        let seed = cfg.geometric_seed()?;
        cfg.check_seed(&seed)?;
        println!("seed ok: Descartes residual {:e}", seed.descartes_residual());
    }
    let Some(command) = &cli.command else {
        if cli.seed_check {
            return Ok(0);
        }
        return Err(Error::Config("no command given; use generate, render or report".into()));
    };
    fs::create_dir_all(&cli.out)?;
    match command {
        Command::Generate => cmd_generate(&cfg, &cli.out).map(|_| 0),
        Command::Render => cmd_render(&cfg, &cli.out).map(|_| 0),
        Command::Report => cmd_report(&cfg, &cli.out),
    }
}

fn enumerate(root: &DescartesQuadruple, bound: i128, window: Option<Rect>, tangency: bool) -> Result<PackingOrbit> {
    let embedding = Embedding::standard_for(root);
    let region = if root.is_bounded() { None } else { window };
    let opts = EnumerateOptions { keep_quads: true, keep_tangency: tangency, embedding, region, dedup_check: false };
    enumerate_orbit_with(root, bound, &opts)
}

/// Writes `orbit.dump` and `circles.csv`; prints `N_P(T)` and the quadruple
/// count.
pub fn cmd_generate(cfg: &RunConfig, out: &Path) -> Result<PackingOrbit> {
    let root = cfg.root_quadruple()?;
    let orbit = enumerate(&root, cfg.bound as i128, cfg.window_rect()?, false)?;
    let mut dump = Vec::new();
    orbit.write_dump(&mut dump)?;
    fs::write(out.join("orbit.dump"), dump)?;
    let mut csv = String::from("id,curvature,depth\n");
    for (id, c) in orbit.members() {
        let _ = writeln!(csv, "{id},{},{}", c.curvature, c.depth);
    }
    fs::write(out.join("circles.csv"), csv)?;
    println!("N_P(T) = {}", orbit.circle_count());
    println!("quad_count = {}", orbit.quad_count);
    Ok(orbit)
}

fn render_window(cfg: &RunConfig, seed: &SeedConfiguration) -> Result<Rect> {
    if let Some(w) = cfg.window_rect()? {
        return Ok(w);
    }
    match seed.circles.iter().find(|c| c.curvature() < 0.0) {
        Some(c @ Circle::Proper { center, .. }) => {
            let r = c.radius();
            Rect::new(center[0] - r, center[0] + r, center[1] - r, center[1] + r)
        }
        _ => Err(Error::Config("rendering an unbounded packing needs [window]".into())),
    }
}

fn bounded_region(seed: &SeedConfiguration, window: &Rect) -> Option<Rect> {
    seed.circles.iter().all(|c| c.curvature() >= 0.0).then_some(*window)
}

/// Writes `packing.svg`.
pub fn cmd_render(cfg: &RunConfig, out: &Path) -> Result<usize> {
    let seed = cfg.geometric_seed()?;
    let bound = cfg.render.bound.unwrap_or((cfg.bound as f64).min(100.0));
    let window = render_window(cfg, &seed)?;
    let circles = generate_packing_geometric(&seed, bound, bounded_region(&seed, &window).as_ref())?;
    let opts = RenderOptions { width: cfg.render.width, stroke_width: cfg.render.stroke_width };
    fs::write(out.join("packing.svg"), render_svg(&circles, &window, &opts)?)?;
    println!("rendered {} circles", circles.len());
    Ok(circles.len())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "undefined".into())
}

fn selector_label(s: &str) -> String {
    s.chars().filter(|c| c.is_ascii_alphanumeric()).collect()
}

struct Report<'a> {
    cfg: &'a RunConfig,
    out: &'a Path,
    root: DescartesQuadruple,
    summary: String,
    fits: Vec<ExponentFit>,
}

impl Report<'_> {
    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.summary, "{key}: {value}");
    }

    fn write(&self, name: &str, body: String) -> Result<()> {
        fs::write(self.out.join(name), body)?;
        Ok(())
    }

    fn counts(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let (t_min, t_max) = cfg.grid_range();
        let grid = log_grid(t_min, t_max, cfg.grid.points)?;
        let sorted = if self.root.is_bounded() {
            orbit_curvatures(&self.root, cfg.bound as i128)?.0
        } else {
            enumerate(&self.root, cfg.bound as i128, cfg.window_rect()?, false)?.sorted_curvatures()
        };
        let curve = count_curve_from_sorted(&sorted, cfg.bound as f64, &grid, &self.root.to_string())?;
        self.write("counts.csv", curve.to_csv())?;
        self.line("N_P(T)", curve.samples.last().map_or(0, |s| s.1));
        let windows = if cfg.fit.windows.is_empty() { vec![[t_min, t_max]] } else { cfg.fit.windows.clone() };
        for w in windows {
            let fit = fit_exponent(&curve, (w[0], w[1]))?;
            self.line(
                &format!("alpha_hat[{},{}]", w[0], w[1]),
                format!("{:.6} (stderr {:.6}, c_hat {:.6}, points {})", fit.alpha_hat, fit.stderr, fit.c_hat, fit.points),
            );
            self.fits.push(fit);
        }
        Ok(())
    }

    fn regions(&mut self) -> Result<()> {
        let cfg = self.cfg;
        if cfg.regions.is_empty() {
            return Ok(());
        }
        let bound = cfg.region_bound.unwrap_or(cfg.bound.min(10_000)).min(cfg.bound) as f64;
        let seed = cfg.geometric_seed()?;
        let window = cfg.window_rect()?;
        let region = window.filter(|_| seed.circles.iter().all(|c| c.curvature() >= 0.0));
        let circles = generate_packing_geometric(&seed, bound, region.as_ref())?;
        let grid: Vec<f64> = log_grid(cfg.grid_range().0.min(bound / 2.0), bound, cfg.grid.points)?;
        for r in &cfg.regions {
            let rect = r.rect.rect()?;
            let samples = grid.iter().map(|&t| (t, count_in_region(&circles, t, &rect))).collect();
            let curve = CountCurve::new(samples, r.name.clone())?;
            self.write(&format!("counts_{}.csv", selector_label(&r.name)), curve.to_csv())?;
            self.line(&format!("N_P(T,{})", r.name), curve.samples.last().map_or(0, |s| s.1));
        }
        Ok(())
    }

    fn arithmetic(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let mut bounds: Vec<u64> = cfg.arithmetic.bounds.iter().copied().filter(|&b| b as i64 <= cfg.bound).collect();
        if bounds.is_empty() {
            bounds.push(cfg.bound as u64);
        }
        let top = *bounds.iter().max().unwrap();
        let orbit = enumerate(&self.root, top as i128, cfg.window_rect()?, true)?;
        let t = tally(&orbit);
        let residues = residues_mod(&t, cfg.arithmetic.modulus)?;
        self.write("residues.csv", residues.to_csv())?;
        self.write("missing.csv", missing_csv(&missing_integers(&t, &residues)))?;
        self.line(&format!("kappa(mod {})", cfg.arithmetic.modulus), residues.residues.len());
        if top >= 24 {
            let kappa_density = residues.residues.len() as f64 / cfg.arithmetic.modulus as f64;
            self.line("distinct_density", format!("{:.6} (kappa/m {:.6})", distinct_density(&t)?, kappa_density));
        }
        self.line("no_odd_prime_triple", no_odd_prime_triple(&orbit)?);
        let hist = odd_entry_histogram(&orbit)?;
        self.line("odd_entries_per_quadruple", format!("{hist:?}"));
        let rows = bounds.iter().map(|&b| prime_stats_at(&orbit, b as u128)).collect::<Result<Vec<_>>>()?;
        self.write("primes.csv", prime_stats_csv(&rows))?;
        let shape_bounds: Vec<u128> = bounds.iter().filter(|&&b| b >= 2).map(|&b| b as u128).collect();
        for r in prime_shape_report(&orbit, &shape_bounds, cfg.arithmetic.alpha)? {
            self.line(
                &format!("prime_shape[T={}]", r.bound),
                format!("pi*logT/N {:.6}, pi*logT/T^alpha {:.6}", r.fuchs_sanden, r.upper_shape),
            );
        }
        Ok(())
    }

    fn spectral(&mut self) -> Result<()> {
        let cfg = self.cfg;
        if cfg.spectral.moduli.is_empty() {
            return Ok(());
        }
        let opts = SpectrumOptions { dense_cap: cfg.spectral.dense_cap, ..Default::default() };
        let rows = expander_table(&cfg.spectral.moduli, cfg.spectral.group_cap, &opts)?;
        self.write("spectral.csv", expander_csv(&rows))?;
        self.line("expander_gap", fmt_opt(expander_gap(&rows)));
        Ok(())
    }

    fn sieve(&mut self) -> Result<()> {
        let cfg = self.cfg;
        if cfg.sieve.selectors.is_empty() {
            return Ok(());
        }
        let bound = cfg.sieve.bound.unwrap_or(cfg.bound.min(10_000)).min(cfg.bound) as i128;
        let orbit = enumerate(&self.root, bound, cfg.window_rect()?, false)?;
        for (name, sel) in cfg.sieve.selectors.iter().zip(cfg.selectors()?) {
            let label = selector_label(name);
            let series = build_series(&orbit, sel, bound)?;
            let excluded = default_excluded(&series);
            let level = level_distribution_report(&series, cfg.sieve.level)?;
            self.write(&format!("sieve_{label}_slices.csv"), slices_csv(&level.slices))?;
            let mut zs = cfg.sieve.z.clone();
            zs.sort_unstable();
            zs.dedup();
            let sifted = zs
                .iter()
                .map(|&z| almost_prime_count(&series, z, &excluded).map(|s| (z, s)))
                .collect::<Result<Vec<_>>>()?;
            self.write(&format!("sieve_{label}_sifted.csv"), sifted_csv(&sifted))?;
            self.line(
                &format!("sieve[{name}].level_exponent"),
                format!("{:.6} (D {}, X {}, sum|r| {:.3})", level.exponent, level.level, level.mass, level.remainder_sum),
            );
            self.line(&format!("sieve[{name}].excluded"), format!("{excluded:?}"));
            let dim = sieve_dimension(&series, cfg.sieve.dimension_primes, &excluded)?;
            self.line(&format!("sieve[{name}].dimension"), format!("{dim:.6}"));
            let c = census(&series, sel.degree(), &excluded)?;
            self.line(
                &format!("sieve[{name}].census"),
                format!("z {}, survivors {}, R {}, above R {}, omega {:?}", c.z, c.survivors, c.r, c.above_r, c.omega),
            );
        }
        Ok(())
    }

    fn boxcount(&mut self) -> Result<()> {
        let Some(spec) = &self.cfg.boxcount else {
            return Ok(());
        };
        let seed = self.cfg.geometric_seed()?;
        let window = self.cfg.window_rect()?;
        let region = window.filter(|_| seed.circles.iter().all(|c| c.curvature() >= 0.0));
        let circles = generate_packing_geometric(&seed, spec.bound, region.as_ref())?;
        let b = boxcount_dimension(&circles, &spec.eps, window.as_ref())?;
        self.write("boxcount.csv", b.to_csv())?;
        self.line("boxcount_dimension", format!("{:.6} (stderr {:.6})", b.dimension, b.stderr));
        for w in &b.warnings {
            self.line("boxcount_warning", w);
        }
        if let Some(fit) = self.fits.first() {
            let proxy = apollonian_constant_proxy(fit, &b, fit.alpha_hat)?;
            self.line("c_A_proxy (uncontrolled estimate)", format!("{proxy:.6}"));
        }
        Ok(())
    }
}

/// Writes every CSV table and `summary.txt`. Each section fails on its own;
/// the summary lists failures and the exit code is that of the first one.
pub fn cmd_report(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let root = cfg.root_quadruple()?;
    let mut rep = Report { cfg, out, root, summary: String::new(), fits: Vec::new() };
    rep.line("root", root);
    rep.line("bound", cfg.bound);
    type Section<'a> = (&'static str, fn(&mut Report<'a>) -> Result<()>);
    let sections: [Section; 6] = [
        ("counts", Report::counts),
        ("regions", Report::regions),
        ("arithmetic", Report::arithmetic),
        ("spectral", Report::spectral),
        ("sieve", Report::sieve),
        ("boxcount", Report::boxcount),
    ];
    let mut failures: Vec<(&str, Error)> = Vec::new();
    for (name, f) in sections {
        if let Err(e) = f(&mut rep) {
            log::error!("{name} report failed: {e}");
            failures.push((name, e));
        }
    }
    if failures.is_empty() {
        rep.line("failures", "none");
    } else {
        let _ = writeln!(rep.summary, "failures:");
        for (name, e) in &failures {
            let _ = writeln!(rep.summary, "  {name}: {e}");
        }
    }
    rep.write("summary.txt", rep.summary.clone())?;
    print!("{}", rep.summary);
    Ok(failures.first().map_or(0, |(_, e)| e.exit_code()))
}
