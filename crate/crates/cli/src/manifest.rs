//! Run manifests, artifact digests and output paths.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use quartic_helmholtz::kernels::ProblemParams;
use quartic_helmholtz::resolvent::EpsSchedule;
use quartic_helmholtz::spectral::SpectralGrid;

pub const MANIFEST_SCHEMA: &str = "qhelm.manifest.v1";

/// Key left out of JSON digests, so that replays compare bitwise.
pub const VOLATILE_KEY: &str = "wall_time_s";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub dim: usize,
    pub m: usize,
    pub half_width: f64,
    pub h: f64,
    pub offset: bool,
    /// min over lattice points of ||ξ|² − a_j|
    pub shell_clearance: f64,
    /// |G| tail ratio between the nearest periodic image of an inner
    /// half-box point and the inner half-box radius
    pub wrap_alias_estimate: f64,
}

impl GridMeta {
    pub fn new(grid: &SpectralGrid, params: &ProblemParams) -> Self {
        let l = grid.half_width;
        let decay = (grid.dim as f64 - 1.0) / 2.0;
        Self {
            dim: grid.dim,
            m: grid.m,
            half_width: l,
            h: grid.h(),
            offset: grid.offset,
            shell_clearance: grid.shell_clearance(&[params.a1, params.a2]),
            wrap_alias_estimate: (1.5 * l / (0.5 * l)).powf(-decay),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    /// path relative to the output directory when it lies inside it
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub command: String,
    /// effective argument vector after config merging
    pub argv: Vec<String>,
    pub cwd: String,
    pub out_dir: String,
    pub params: Option<Value>,
    pub grid: Option<GridMeta>,
    pub eps_schedule: Option<EpsSchedule>,
    pub seeds: Vec<u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub version: String,
    pub parallel: bool,
    pub wall_time_s: f64,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn new(command: &str, argv: &[String], out_dir: &Path) -> Self {
        Self {
            schema: MANIFEST_SCHEMA.into(),
            command: command.into(),
            argv: argv.to_vec(),
            cwd: std::env::current_dir().map(|p| p.display().to_string()).unwrap_or_default(),
            out_dir: out_dir.display().to_string(),
            params: None,
            grid: None,
            eps_schedule: None,
            seeds: vec![],
            tolerances: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").into(),
            parallel: cfg!(feature = "parallel"),
            wall_time_s: 0.0,
            outputs: vec![],
        }
    }

    pub fn set_params(&mut self, p: &ProblemParams) {
        self.params = serde_json::to_value(p).ok();
    }

    pub fn tolerance(&mut self, key: &str, v: f64) {
        self.tolerances.insert(key.into(), v);
    }
}

/// Removes every `wall_time_s` entry from a JSON tree.
pub fn strip_volatile(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove(VOLATILE_KEY);
            for x in map.values_mut() {
                strip_volatile(x);
            }
        }
        Value::Array(a) => a.iter_mut().for_each(strip_volatile),
        _ => {}
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// SHA-256 of an artifact; JSON files are hashed without volatile keys.
pub fn digest_file(path: &Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        if let Ok(mut v) = serde_json::from_slice::<Value>(&bytes) {
            strip_volatile(&mut v);
            return Ok(sha256_hex(serde_json::to_string(&v).unwrap_or_default().as_bytes()));
        }
    }
    Ok(sha256_hex(&bytes))
}

/// Resolves artifact paths against the output directory.
#[derive(Debug, Clone)]
pub struct OutDir {
    pub root: PathBuf,
}

impl OutDir {
    pub fn new(root: PathBuf) -> std::io::Result<Self> {
        std::fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        let p = Path::new(name);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.root.join(p)
        }
    }

    pub fn label(&self, path: &Path) -> String {
        path.strip_prefix(&self.root).unwrap_or(path).display().to_string()
    }
}

/// `name` with its final extension replaced by `ext`.
pub fn sibling(name: &str, ext: &str) -> String {
    let p = Path::new(name);
    let stem = p.file_stem().map(|s| s.to_string_lossy().to_string()).unwrap_or_else(|| name.to_string());
    match p.parent().filter(|d| !d.as_os_str().is_empty()) {
        Some(d) => d.join(format!("{stem}.{ext}")).display().to_string(),
        None => format!("{stem}.{ext}"),
    }
}
