//! Per-run state: output directory, manifest and helpers shared by commands.

use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::time::Instant;

use quartic_helmholtz::kernels::{GammaSpec, ProblemParams};
use quartic_helmholtz::spectral::io::load_any;
use quartic_helmholtz::spectral::SpectralGrid;

use crate::args::{LinearArgs, NonlinearArgs};
use crate::error::{usage, CliResult};
use crate::manifest::{digest_file, OutDir, OutputDigest, RunManifest};

pub struct Ctx {
    pub out: OutDir,
    pub manifest: RunManifest,
    manifest_path: PathBuf,
    start: Instant,
    artifacts: Vec<PathBuf>,
}

impl Ctx {
    pub fn new(out: OutDir, manifest: RunManifest, manifest_name: &str) -> Self {
        let manifest_path = out.path(manifest_name);
        Self { out, manifest, manifest_path, start: Instant::now(), artifacts: vec![] }
    }

    /// Registers an output and returns its resolved path.
    pub fn artifact(&mut self, name: &str) -> CliResult<PathBuf> {
        let p = self.out.path(name);
        if let Some(d) = p.parent() {
            std::fs::create_dir_all(d)?;
        }
        if !self.artifacts.contains(&p) {
            self.artifacts.push(p.clone());
        }
        Ok(p)
    }

    pub fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub fn manifest_label(&self) -> String {
        self.out.label(&self.manifest_path)
    }

    /// Writes a JSON report stamped with schema, manifest reference and wall time.
    pub fn write_report(&mut self, name: &str, schema: &str, mut body: Value) -> CliResult<PathBuf> {
        let path = self.artifact(name)?;
        if let Value::Object(map) = &mut body {
            map.insert("schema".into(), json!(schema));
            map.insert("manifest".into(), json!(self.manifest_label()));
            map.insert("wall_time_s".into(), json!(self.elapsed()));
        }
        std::fs::write(&path, serde_json::to_string_pretty(&body)?)?;
        Ok(path)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> CliResult<PathBuf> {
        let path = self.artifact(name)?;
        std::fs::write(&path, text)?;
        Ok(path)
    }

    /// Digests every artifact and writes the manifest.
    pub fn finish(mut self) -> CliResult<PathBuf> {
        self.manifest.wall_time_s = self.elapsed();
        let mut outputs = Vec::new();
        for p in &self.artifacts {
            if p.exists() {
                outputs.push(OutputDigest { path: self.out.label(p), sha256: digest_file(p)? });
            }
        }
        self.manifest.outputs = outputs;
        if let Some(d) = self.manifest_path.parent() {
            std::fs::create_dir_all(d)?;
        }
        std::fs::write(&self.manifest_path, serde_json::to_string_pretty(&self.manifest)?)?;
        Ok(self.manifest_path)
    }
}

/// `value` with a named companion (tolerance or error estimate).
pub fn measured(value: f64, companion: &str, c: f64) -> Value {
    json!({ "value": value, companion: c })
}

pub fn parse_grid(spec: &str) -> CliResult<(usize, f64)> {
    let bad = || usage(format!("grid '{spec}' must be M,L (points per axis, half width)"));
    let Some((m, l)) = spec.split_once(',') else { return bad() };
    match (m.trim().parse::<usize>(), l.trim().parse::<f64>()) {
        (Ok(m), Ok(l)) => Ok((m, l)),
        _ => bad(),
    }
}

pub fn parse_list(spec: &str, what: &str) -> CliResult<Vec<f64>> {
    let v: Result<Vec<f64>, _> = spec.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => usage(format!("{what} '{spec}' must be a comma separated list of numbers")),
    }
}

pub fn linear_params(a: &LinearArgs) -> CliResult<ProblemParams> {
    Ok(ProblemParams::linear(a.alpha, a.beta, a.dim)?)
}

pub enum GammaSource {
    Constant(f64),
    File(PathBuf),
}

pub fn parse_gamma(spec: &str) -> CliResult<GammaSource> {
    if let Some(v) = spec.strip_prefix("const:") {
        return match v.trim().parse::<f64>() {
            Ok(c) => Ok(GammaSource::Constant(c)),
            Err(_) => usage(format!("gamma '{spec}': bad constant")),
        };
    }
    if let Some(p) = spec.strip_prefix("file:") {
        return Ok(GammaSource::File(PathBuf::from(p)));
    }
    usage(format!("gamma '{spec}' must be const:VALUE or file:PATH"))
}

/// Γ sampled on a grid: a constant or the real part of a stored field.
pub fn grid_gamma(spec: &str, grid: &SpectralGrid) -> CliResult<GammaSpec> {
    match parse_gamma(spec)? {
        GammaSource::Constant(c) => Ok(GammaSpec::Constant(c)),
        GammaSource::File(p) => {
            let f = load_any(&p)?;
            if f.grid.len() != grid.len() {
                return usage(format!(
                    "gamma file {} has {} samples, grid has {}",
                    p.display(),
                    f.grid.len(),
                    grid.len()
                ));
            }
            Ok(GammaSpec::Grid(f.real_part()))
        }
    }
}

pub fn nonlinear_params(a: &NonlinearArgs, gamma: GammaSpec) -> CliResult<ProblemParams> {
    let l = &a.linear;
    Ok(ProblemParams::new(l.alpha, l.beta, a.p, l.dim, gamma)?)
}

/// Reads `r,value` rows (header optional) for a radial Γ profile.
pub fn read_radial_table(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut r = Vec::new();
    let mut v = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split(',').map(str::trim);
        match (it.next().map(str::parse::<f64>), it.next().map(str::parse::<f64>)) {
            (Some(Ok(a)), Some(Ok(b))) => {
                r.push(a);
                v.push(b);
            }
            _ if n == 0 => continue,
            _ => return usage(format!("{}: line {} is not r,value", path.display(), n + 1)),
        }
    }
    Ok((r, v))
}

/// Least-squares slope of log y against log x over positive pairs, with its
/// standard error.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let (lx, ly): (Vec<f64>, Vec<f64>) =
        x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (a.ln(), b.ln())).unzip();
    if lx.len() < 2 {
        return None;
    }
    Some(quartic_helmholtz::analysis::decay::least_squares(&lx, &ly))
}
