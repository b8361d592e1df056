//! Experiment configuration, drivers for the δ- and aperture sweeps, slope
//! fitting, and result persistence (CSV tables, VTK meshes, text reports).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::asymptotics::{
    expansion_check_full, expansion_check_partial, leading_partial_far_field, unit_segment,
    ScreenMesh,
};
use crate::geometry::{
    slab_domain, sphere_mesh, tube_domain, PartialGeneratorSpec, SlabResolution, TubeResolution,
};
use crate::potentials::rwg::EdgeBasis;
use crate::solver::{
    solve_pec_many,
    direction_grid, far_field, mie_far_field, solve_pec, FarFieldPattern, PlaneWave,
    DEFAULT_DIRECTIONS,
};
use crate::transform::{
    cloak_exponents, physical_cloak_materials, CloakGenerator, CloakRadii,
};
use crate::{io, Error, Result, V3};

/// The experiments the CLI can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    ValidateSphere,
    SweepFull,
    SweepPartial,
    ApertureSweep,
    ExpansionCheck,
    LeadingOrderCheck,
    ExportMaterials,
    Rates,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::ValidateSphere => "validate_sphere",
            ExperimentKind::SweepFull => "sweep_full",
            ExperimentKind::SweepPartial => "sweep_partial",
            ExperimentKind::ApertureSweep => "aperture_sweep",
            ExperimentKind::ExpansionCheck => "expansion_check",
            ExperimentKind::LeadingOrderCheck => "leading_order_check",
            ExperimentKind::ExportMaterials => "export_materials",
            ExperimentKind::Rates => "rates",
        }
    }

    pub fn from_str(s: &str) -> Result<ExperimentKind> {
        Ok(match s {
            "validate_sphere" => ExperimentKind::ValidateSphere,
            "sweep_full" => ExperimentKind::SweepFull,
            "sweep_partial" => ExperimentKind::SweepPartial,
            "aperture_sweep" => ExperimentKind::ApertureSweep,
            "expansion_check" => ExperimentKind::ExpansionCheck,
            "leading_order_check" => ExperimentKind::LeadingOrderCheck,
            "export_materials" => ExperimentKind::ExportMaterials,
            "rates" => ExperimentKind::Rates,
            other => return Err(Error::Config(format!("unknown experiment kind `{other}`"))),
        })
    }
}

/// Validated configuration of one experiment run. Parsed from a flat
/// key=value file; unknown keys are rejected.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub omega: f64,
    pub deltas: Vec<f64>,
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub p: V3,
    pub d: V3,
    pub epsilons: Vec<f64>,
    /// Circumferential (tube) / angular (slab rim) panel count.
    pub resolution: usize,
    /// Extra panels added for the per-δ self-convergence gate.
    pub refinement: usize,
    pub directions: usize,
    pub sphere_levels: usize,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Canonical text the config hash is computed from.
    canonical: String,
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("key `{key}`: expected a real number, got `{v}`")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_f64(key, s)).collect()
}

fn parse_vec3(key: &str, v: &str) -> Result<V3> {
    let xs = parse_list(key, v)?;
    if xs.len() != 3 {
        return Err(Error::Config(format!("key `{key}`: expected three comma-separated reals")));
    }
    Ok(V3::new(xs[0], xs[1], xs[2]))
}

impl ExperimentConfig {
    /// Parse a flat key=value config for the given experiment kind. Lines
    /// starting with `#` and blank lines are skipped; unknown keys error.
    pub fn parse(kind: ExperimentKind, text: &str) -> Result<ExperimentConfig> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", ln + 1)))?;
            if map.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("duplicate key `{}`", k.trim())));
            }
        }
        let mut cfg = ExperimentConfig {
            kind,
            omega: 1.0,
            deltas: vec![0.2, 0.1, 0.05],
            r: 0.0,
            s: 2.0,
            t: 0.0,
            p: V3::new(0.0, 0.0, 1.0),
            d: V3::new(0.0, 1.0, 0.0),
            epsilons: vec![0.2, 0.4, 0.8],
            resolution: 12,
            refinement: 4,
            directions: DEFAULT_DIRECTIONS,
            sphere_levels: 3,
            out_dir: PathBuf::from("out"),
            seed: 0,
            canonical: String::new(),
        };
        for (k, v) in &map {
            match k.as_str() {
                "kind" => {
                    if ExperimentKind::from_str(v)? != kind {
                        return Err(Error::Config(format!(
                            "config kind `{v}` does not match the `{}` subcommand",
                            kind.as_str()
                        )));
                    }
                }
                "omega" => cfg.omega = parse_f64(k, v)?,
                "deltas" => cfg.deltas = parse_list(k, v)?,
                "r" => cfg.r = parse_f64(k, v)?,
                "s" => cfg.s = parse_f64(k, v)?,
                "t" => cfg.t = parse_f64(k, v)?,
                "p" => cfg.p = parse_vec3(k, v)?,
                "d" => cfg.d = parse_vec3(k, v)?,
                "epsilons" => cfg.epsilons = parse_list(k, v)?,
                "resolution" => {
                    cfg.resolution = parse_f64(k, v)? as usize;
                }
                "refinement" => {
                    cfg.refinement = parse_f64(k, v)? as usize;
                }
                "directions" => {
                    cfg.directions = parse_f64(k, v)? as usize;
                }
                "sphere_levels" => {
                    cfg.sphere_levels = parse_f64(k, v)? as usize;
                }
                "out_dir" => cfg.out_dir = PathBuf::from(v),
                "seed" => {
                    cfg.seed = v
                        .parse::<u64>()
                        .map_err(|_| Error::Config(format!("key `seed`: expected a u64")))?;
                }
                other => {
                    return Err(Error::Config(format!("unknown config key `{other}`")));
                }
            }
        }
        let mut canonical = format!("kind={}\n", kind.as_str());
        for (k, v) in &map {
            if k != "kind" {
                canonical.push_str(&format!("{k}={v}\n"));
            }
        }
        cfg.canonical = canonical;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega <= 0.0 {
            return Err(Error::Config("omega must be positive".into()));
        }
        if self.deltas.is_empty() {
            return Err(Error::Config("delta list must be nonempty".into()));
        }
        if !self.deltas.windows(2).all(|w| w[0] > w[1]) || self.deltas.iter().any(|&d| d <= 0.0) {
            return Err(Error::Config("delta list must be positive and strictly decreasing".into()));
        }
        if self.p.norm() == 0.0 || self.d.norm() == 0.0 {
            return Err(Error::Config("polarization and direction must be nonzero".into()));
        }
        let p = self.p.normalize();
        let d = self.d.normalize();
        if p.dot(&d).abs() > 1e-9 {
            return Err(Error::Config("polarization must be orthogonal to the direction".into()));
        }
        if self.resolution < 8 {
            return Err(Error::Config("resolution must be at least 8 panels".into()));
        }
        if self.directions < 16 {
            return Err(Error::Config("need at least 16 far-field directions".into()));
        }
        Ok(())
    }

    /// SHA-256 of the canonical config text plus the seed.
    pub fn config_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical.as_bytes());
        h.update(self.seed.to_le_bytes());
        let digest = h.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Row of a sweep result table.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub sweep_var: f64,
    pub norm_linf: f64,
    pub norm_l2: f64,
    pub n_edges: usize,
    pub solve_residual: f64,
    /// True when the per-δ self-convergence gate failed and the row is
    /// excluded from the slope fit.
    pub gated: bool,
    pub wall_ms: u128,
}

/// Least-squares fit on (log x, log y).
#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Outcome of one experiment run.
#[derive(Debug, Clone)]
pub struct ResultTable {
    pub rows: Vec<SweepRow>,
    pub fit: Option<SlopeFit>,
    pub config_hash: String,
    /// Acceptance-band verdict; `false` maps to exit code 2.
    pub passed: bool,
    pub notes: Vec<String>,
}

/// Log-log least squares. Requires at least three strictly positive points.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 3 {
        return Err(Error::Numerical(format!(
            "slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::Numerical("slope fit requires positive data".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-14 {
        return Err(Error::Numerical("degenerate abscissae in slope fit".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for &(lx, ly) in &logs {
        let pred = slope * lx + intercept;
        ss_res += (ly - pred) * (ly - pred);
        ss_tot += (ly - mean_y) * (ly - mean_y);
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((slope, intercept, r2))
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_results_csv(path: &Path, rows: &[SweepRow], config_hash: &str) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# config_hash {config_hash}")?;
    writeln!(w, "sweep_var,norm_linf,norm_l2,n_edges,solve_residual,gated,wall_ms")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt(r.sweep_var),
            fmt(r.norm_linf),
            fmt(r.norm_l2),
            r.n_edges,
            fmt(r.solve_residual),
            r.gated as u8,
            r.wall_ms
        )?;
    }
    w.flush()?;
    Ok(())
}

fn write_report(path: &Path, table: &ResultTable, kind: ExperimentKind) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "experiment: {}", kind.as_str())?;
    writeln!(w, "config_hash: {}", table.config_hash)?;
    if let Some(fit) = table.fit {
        writeln!(w, "slope: {}", fmt(fit.slope))?;
        writeln!(w, "intercept: {}", fmt(fit.intercept))?;
        writeln!(w, "r2: {}", fmt(fit.r2))?;
    }
    for n in &table.notes {
        writeln!(w, "{n}")?;
    }
    writeln!(w, "verdict: {}", if table.passed { "pass" } else { "fail" })?;
    w.flush()?;
    Ok(())
}

/// One PEC solve + far field on a given mesh; returns the pattern, the edge
/// count and the linear-solve residual.
fn solve_far_field(
    mesh: &crate::geometry::SurfaceMesh,
    wave: &PlaneWave,
    directions: &[V3],
) -> Result<(FarFieldPattern, usize, f64)> {
    let basis = EdgeBasis::build(mesh)?;
    let sol = solve_pec(mesh, &basis, wave)?;
    let ff = far_field(mesh, &basis, &sol.density, wave.omega, directions);
    Ok((ff, basis.edges.len(), sol.residual))
}

enum SweepGeometry {
    Tube,
    Slab,
}

/// Shared driver for the full- and partial-cloak δ-sweeps: per δ, solve at
/// the base resolution and once more at a refined resolution; the row is
/// gated out of the fit when the two far-field norms differ by ≥ 5%.
fn run_delta_sweep(
    cfg: &ExperimentConfig,
    geometry: SweepGeometry,
    wave: &PlaneWave,
) -> Result<Vec<SweepRow>> {
    let directions = direction_grid(cfg.directions);
    let curve = unit_segment()?;
    let spec = PartialGeneratorSpec::unit();
    let mut rows = Vec::new();
    for (i, &delta) in cfg.deltas.iter().enumerate() {
        let t0 = Instant::now();
        let build = |panels: usize| -> Result<crate::geometry::SurfaceMesh> {
            match geometry {
                SweepGeometry::Tube => {
                    let res = TubeResolution::for_delta(curve.length, delta, panels);
                    tube_domain(&curve, delta, res)
                }
                SweepGeometry::Slab => {
                    let res = SlabResolution::for_delta(spec.side, delta, panels);
                    slab_domain(&spec, delta, res)
                }
            }
        };
        let mesh = build(cfg.resolution)?;
        let (ff, n_edges, residual) = solve_far_field(&mesh, wave, &directions)?;
        let fine = build(cfg.resolution + cfg.refinement)?;
        let (ff_fine, _, _) = solve_far_field(&fine, wave, &directions)?;
        let base_norm = ff.norm_linf();
        let gate = (ff_fine.norm_linf() - base_norm).abs() / base_norm.max(1e-300);
        let row = SweepRow {
            sweep_var: delta,
            norm_linf: base_norm,
            norm_l2: ff.norm_l2(),
            n_edges,
            solve_residual: residual,
            gated: gate >= 0.05,
            wall_ms: t0.elapsed().as_millis(),
        };
        io::write_mesh_vtk(
            &cfg.out_dir.join(format!("mesh_{i}.vtk")),
            &mesh,
            &format!("domain delta={delta}"),
        )?;
        io::write_farfield_csv(
            &cfg.out_dir.join(format!("farfield_{i}.csv")),
            &ff,
            wave.p,
            wave.d,
            mesh.content_hash(),
        )?;
        rows.push(row);
    }
    Ok(rows)
}

fn fit_ungated(rows: &[SweepRow]) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| !r.gated).map(|r| (r.sweep_var, r.norm_linf)).collect();
    let (slope, intercept, r2) = fit_loglog_slope(&pts)?;
    Ok(SlopeFit { slope, intercept, r2 })
}

/// Run one experiment end to end and persist artifacts into the out dir.
pub fn run(cfg: &ExperimentConfig) -> Result<ResultTable> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let hash = cfg.config_hash();
    let mut table = ResultTable {
        rows: Vec::new(),
        fit: None,
        config_hash: hash.clone(),
        passed: true,
        notes: Vec::new(),
    };
    match cfg.kind {
        ExperimentKind::ValidateSphere => {
            let t0 = Instant::now();
            let mesh = sphere_mesh(V3::zeros(), 1.0, cfg.sphere_levels)?;
            let wave = PlaneWave::new(cfg.p, cfg.d, cfg.omega)?;
            let directions = direction_grid(cfg.directions);
            let (ff, n_edges, residual) = solve_far_field(&mesh, &wave, &directions)?;
            let mie = mie_far_field(1.0, &wave, &directions)?;
            let err = ff.rel_l2_diff(&mie);
            table.rows.push(SweepRow {
                sweep_var: cfg.omega,
                norm_linf: ff.norm_linf(),
                norm_l2: ff.norm_l2(),
                n_edges,
                solve_residual: residual,
                gated: false,
                wall_ms: t0.elapsed().as_millis(),
            });
            table.notes.push(format!("mie_rel_l2_error: {}", fmt(err)));
            table.passed = err < 0.02;
            io::write_mesh_vtk(&cfg.out_dir.join("mesh_0.vtk"), &mesh, "unit sphere")?;
            io::write_farfield_csv(
                &cfg.out_dir.join("farfield_0.csv"),
                &ff,
                wave.p,
                wave.d,
                mesh.content_hash(),
            )?;
        }
        ExperimentKind::SweepFull => {
            let wave = PlaneWave::new(cfg.p, cfg.d, cfg.omega)?;
            table.rows = run_delta_sweep(cfg, SweepGeometry::Tube, &wave)?;
            let fit = fit_ungated(&table.rows)?;
            table.passed = (1.6..=2.4).contains(&fit.slope) && fit.r2 >= 0.98;
            table.notes.push(format!("band: slope in [1.6, 2.4], r2 >= 0.98"));
            table.fit = Some(fit);
        }
        ExperimentKind::SweepPartial => {
            let wave = PlaneWave::new(cfg.p, cfg.d, cfg.omega)?;
            table.rows = run_delta_sweep(cfg, SweepGeometry::Slab, &wave)?;
            let n = PartialGeneratorSpec::unit().normal;
            let aligned = wave.p.cross(&n).norm() < 1e-9;
            if aligned {
                let fit = fit_ungated(&table.rows)?;
                table.passed = (0.7..=1.3).contains(&fit.slope) && fit.r2 >= 0.95;
                table.notes.push(format!("band: slope in [0.7, 1.3], r2 >= 0.95"));
                table.fit = Some(fit);
            } else {
                // Worst-aperture control: the norms must not decay.
                let first = table.rows.first().map(|r| r.norm_linf).unwrap_or(0.0);
                let last = table.rows.last().map(|r| r.norm_linf).unwrap_or(0.0);
                let ratio = last / first.max(1e-300);
                table.passed = ratio > 0.5;
                table.notes.push(format!("plateau_last_over_first: {}", fmt(ratio)));
            }
        }
        ExperimentKind::ApertureSweep => {
            let delta = *cfg.deltas.first().unwrap();
            let spec = PartialGeneratorSpec::unit();
            let n = spec.normal;
            let (e1, e2) = spec.plane_axes();
            let res = SlabResolution::for_delta(spec.side, delta, cfg.resolution);
            let mesh = slab_domain(&spec, delta, res)?;
            let directions = direction_grid(cfg.directions);
            let fine = slab_domain(
                &spec,
                delta,
                SlabResolution::for_delta(spec.side, delta, cfg.resolution + cfg.refinement),
            )?;
            io::write_mesh_vtk(&cfg.out_dir.join("mesh_0.vtk"), &mesh, "slab domain")?;
            // p tilted off the normal by ε in the e1 plane; d stays in the
            // plane, orthogonal to p with d·n = 0. All excitations share the
            // mesh and frequency, so the system is assembled once.
            let mut waves = Vec::new();
            for &eps in &cfg.epsilons {
                if !(0.0..=1.0).contains(&eps) {
                    return Err(Error::Config(format!("aperture parameter {eps} outside [0,1]")));
                }
                let p = n * (1.0 - eps * eps).sqrt() + e1 * eps;
                waves.push(PlaneWave::new(p, e2, cfg.omega)?);
            }
            let t0 = Instant::now();
            let basis = EdgeBasis::build(&mesh)?;
            let sols = solve_pec_many(&mesh, &basis, &waves)?;
            let basis_fine = EdgeBasis::build(&fine)?;
            let sols_fine = solve_pec_many(&fine, &basis_fine, &waves)?;
            let wall = t0.elapsed().as_millis() / cfg.epsilons.len().max(1) as u128;
            for (i, ((&eps, wave), (sol, sol_fine))) in cfg
                .epsilons
                .iter()
                .zip(&waves)
                .zip(sols.iter().zip(&sols_fine))
                .enumerate()
            {
                let ff = far_field(&mesh, &basis, &sol.density, cfg.omega, &directions);
                let ff_fine =
                    far_field(&fine, &basis_fine, &sol_fine.density, cfg.omega, &directions);
                let base_norm = ff.norm_linf();
                let gate = (ff_fine.norm_linf() - base_norm).abs() / base_norm.max(1e-300);
                table.rows.push(SweepRow {
                    sweep_var: eps,
                    norm_linf: base_norm,
                    norm_l2: ff.norm_l2(),
                    n_edges: basis.edges.len(),
                    solve_residual: sol.residual,
                    gated: gate >= 0.05,
                    wall_ms: wall,
                });
                io::write_farfield_csv(
                    &cfg.out_dir.join(format!("farfield_{i}.csv")),
                    &ff,
                    wave.p,
                    wave.d,
                    mesh.content_hash(),
                )?;
            }
            // Doubling check on consecutive ε pairs well above the δ floor.
            let mut checked = 0;
            for w in table.rows.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                if a.sweep_var >= 4.0 * delta && (b.sweep_var / a.sweep_var - 2.0).abs() < 1e-9 {
                    let ratio = b.norm_linf / a.norm_linf.max(1e-300);
                    table.notes.push(format!(
                        "doubling eps={} -> {}: ratio {}",
                        a.sweep_var,
                        b.sweep_var,
                        fmt(ratio)
                    ));
                    if !(1.6..=2.4).contains(&ratio) {
                        table.passed = false;
                    }
                    checked += 1;
                }
            }
            if checked == 0 {
                table.notes.push("no epsilon pair in the linear regime (need eps >= 4 delta and doubling)".into());
                table.passed = false;
            }
        }
        ExperimentKind::ExpansionCheck => {
            let full = expansion_check_full(&cfg.deltas, cfg.omega)?;
            let partial = expansion_check_partial(&cfg.deltas, cfg.omega)?;
            let mut w = BufWriter::new(File::create(cfg.out_dir.join("expansion_full.csv"))?);
            writeln!(w, "# config_hash {hash}")?;
            writeln!(w, "delta,residual_facade,residual_cap,ratio")?;
            for (i, row) in full.iter().enumerate() {
                let ratio = if i + 1 < full.len() {
                    row.residual_facade / full[i + 1].residual_facade.max(1e-300)
                } else {
                    0.0
                };
                writeln!(
                    w,
                    "{},{},{},{}",
                    fmt(row.delta),
                    fmt(row.residual_facade),
                    fmt(row.residual_cap),
                    fmt(ratio)
                )?;
                if i + 1 < full.len() && !(3.0..=5.0).contains(&ratio) {
                    table.passed = false;
                }
            }
            w.flush()?;
            let mut w = BufWriter::new(File::create(cfg.out_dir.join("expansion_partial.csv"))?);
            writeln!(w, "# config_hash {hash}")?;
            writeln!(w, "delta,residual,ratio")?;
            for (i, row) in partial.iter().enumerate() {
                let ratio = if i + 1 < partial.len() {
                    row.residual / partial[i + 1].residual.max(1e-300)
                } else {
                    0.0
                };
                writeln!(w, "{},{},{}", fmt(row.delta), fmt(row.residual), fmt(ratio))?;
                if i + 1 < partial.len() && !(1.5..=2.5).contains(&ratio) {
                    table.passed = false;
                }
            }
            w.flush()?;
            table.notes.push(format!(
                "facade residuals: {:?}",
                full.iter().map(|r| r.residual_facade).collect::<Vec<_>>()
            ));
            table.notes.push(format!(
                "slab residuals: {:?}",
                partial.iter().map(|r| r.residual).collect::<Vec<_>>()
            ));
        }
        ExperimentKind::LeadingOrderCheck => {
            let spec = PartialGeneratorSpec::unit();
            let wave = PlaneWave::new(cfg.p, cfg.d, cfg.omega)?;
            let directions = direction_grid(cfg.directions);
            let screen = ScreenMesh::build(&spec, 8, 4)?;
            let lead = leading_partial_far_field(&screen, cfg.omega, &wave, &directions)?;
            let mut diffs = Vec::new();
            for &delta in &cfg.deltas {
                let t0 = Instant::now();
                let res = SlabResolution::for_delta(spec.side, delta, cfg.resolution);
                let mesh = slab_domain(&spec, delta, res)?;
                let (ff, n_edges, residual) = solve_far_field(&mesh, &wave, &directions)?;
                // The leading model is δ-independent; the BEM pattern is
                // compared against it directly, with the difference measured
                // relative to the fixed asymptotic reference.
                let diff = ff.rel_l2_diff(&lead);
                diffs.push(diff);
                table.rows.push(SweepRow {
                    sweep_var: delta,
                    norm_linf: ff.norm_linf(),
                    norm_l2: diff,
                    n_edges,
                    solve_residual: residual,
                    gated: false,
                    wall_ms: t0.elapsed().as_millis(),
                });
            }
            table.notes.push(format!("leading_order_rel_diffs: {diffs:?}"));
            table.passed = diffs.windows(2).all(|w| w[1] < w[0]);
        }
        ExperimentKind::ExportMaterials => {
            let delta = *cfg.deltas.first().unwrap();
            let curve = unit_segment()?;
            let gen = CloakGenerator::Curve(curve);
            let radii = CloakRadii { inner: 0.5, outer: 1.0 };
            // Deterministic shell of sample points across the annulus.
            let mut points = Vec::new();
            let nsh = 4;
            for ish in 0..nsh {
                let rho = radii.inner
                    + (radii.outer - radii.inner) * (ish as f64 + 0.5) / nsh as f64;
                for ia in 0..8 {
                    let xi = (ia as f64 + 0.5) / 8.0;
                    for it in 0..12 {
                        let th = 2.0 * std::f64::consts::PI * it as f64 / 12.0;
                        points.push(V3::new(xi, rho * th.cos(), rho * th.sin()));
                    }
                }
            }
            let field = physical_cloak_materials(&gen, delta, radii, &points)?;
            io::write_materials_vtk(&cfg.out_dir.join("materials.vtk"), &field, "cloak materials")?;
            io::write_materials_csv(&cfg.out_dir.join("materials.csv"), &field, &hash)?;
            table.notes.push(format!("material samples: {}", field.len()));
        }
        ExperimentKind::Rates => {
            let e = cloak_exponents(cfg.r, cfg.s, cfg.t);
            table.notes.push(format!("r: {}, s: {}, t: {}", fmt(e.r), fmt(e.s), fmt(e.t)));
            table.notes.push(format!("beta: {}", fmt(e.beta)));
            table.notes.push(format!("beta_prime: {}", fmt(e.beta_prime)));
            table.notes.push(format!("full_rate: {}", fmt(e.full_rate)));
            table.notes.push(format!("partial_rate: {}", fmt(e.partial_rate)));
            table.notes.push(format!(
                "admissible_full: {}, admissible_partial: {}",
                e.admissible_full, e.admissible_partial
            ));
        }
    }
    write_results_csv(&cfg.out_dir.join("results.csv"), &table.rows, &hash)?;
    write_report(&cfg.out_dir.join("report.txt"), &table, cfg.kind)?;
    Ok(table)
}
