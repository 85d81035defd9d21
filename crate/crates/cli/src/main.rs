#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod cmd;
mod config;
mod context;
mod error;
mod manifest;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use args::{Cli, Command, OUT_DIR_ENV};
use context::Ctx;
use error::{CliError, CliResult};
use manifest::{sibling, OutDir, RunManifest};

/// Argument vector as recorded in manifests: no program name and no flags
/// that only locate files (config contents are already merged in).
fn recorded_argv(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 1;
    while i < argv.len() {
        let a = &argv[i];
        let located = ["--config", "--out-dir", "--replay"];
        if located.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if located.iter().any(|f| a.starts_with(&format!("{f}="))) {
            i += 1;
            continue;
        }
        out.push(a.clone());
        i += 1;
    }
    out
}

fn manifest_name(cmd: &Command) -> String {
    let primary = match cmd {
        Command::Solve(a) => return format!("{}.manifest.json", a.out),
        Command::ResolventApply(a) => &a.out,
        Command::Farfield(a) => &a.out,
        Command::RadiationCheck(a) => &a.out,
        Command::NormProbe(a) => &a.out,
        Command::TailCheck(a) => &a.out,
        Command::SteinTomas(a) => &a.out,
        Command::RadialShoot(a) => &a.out,
        Command::RadialSweep(a) => &a.out,
        Command::KernelTable(a) => &a.out,
        Command::Selfcheck(a) => &a.out,
    };
    sibling(primary, "manifest.json")
}

fn out_root(flag: Option<&PathBuf>) -> PathBuf {
    flag.cloned().or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."))
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> CliResult<()> {
    match cmd {
        Command::Solve(a) => cmd::solve::run(a, ctx),
        Command::ResolventApply(a) => cmd::linear::resolvent_apply(a, ctx),
        Command::Farfield(a) => cmd::linear::farfield(a, ctx),
        Command::RadiationCheck(a) => cmd::linear::radiation_check(a, ctx),
        Command::NormProbe(a) => cmd::probes::norm(a, ctx),
        Command::TailCheck(a) => cmd::probes::tail(a, ctx),
        Command::SteinTomas(a) => cmd::probes::stein_tomas(a, ctx),
        Command::RadialShoot(a) => cmd::radial::shoot(a, ctx),
        Command::RadialSweep(a) => cmd::radial::sweep(a, ctx),
        Command::KernelTable(a) => cmd::linear::kernel_table(a, ctx),
        Command::Selfcheck(a) => cmd::selfcheck::run(a, ctx),
    }
}

/// Runs one parsed command; the manifest is written even when the command fails.
fn execute(cli: &Cli, cmd: &Command, argv: &[String]) -> CliResult<PathBuf> {
    let out = OutDir::new(out_root(cli.out_dir.as_ref()))?;
    let manifest = RunManifest::new(cmd.name(), &recorded_argv(argv), &out.root);
    let mut ctx = Ctx::new(out.clone(), manifest, &manifest_name(cmd));
    let result = dispatch(cmd, &mut ctx);
    let path = ctx.finish()?;
    result.map(|_| path)
}

fn replay(path: &Path, out_dir: Option<&PathBuf>) -> CliResult<()> {
    let old: RunManifest = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if Path::new(&old.cwd).is_dir() {
        std::env::set_current_dir(&old.cwd)?;
    }
    let root = out_dir.cloned().unwrap_or_else(|| PathBuf::from(&old.out_dir));
    let mut argv = vec!["qhelm".to_string(), "--out-dir".into(), root.display().to_string()];
    argv.extend(old.argv.iter().cloned());
    let cli = Cli::try_parse_from(&argv).map_err(|e| CliError::Usage(e.to_string()))?;
    let Some(cmd) = &cli.command else {
        return Err(CliError::Usage("manifest holds no subcommand".into()));
    };
    let new_path = execute(&cli, cmd, &argv)?;
    let new: RunManifest = serde_json::from_str(&std::fs::read_to_string(&new_path)?)?;
    let mut rows = Vec::new();
    let mut mismatched = Vec::new();
    for o in &old.outputs {
        let now = new.outputs.iter().find(|n| n.path == o.path).map(|n| n.sha256.clone());
        let same = now.as_deref() == Some(o.sha256.as_str());
        if !same {
            mismatched.push(o.path.clone());
        }
        rows.push(json!({"path": o.path, "recorded": o.sha256, "replayed": now, "identical": same}));
    }
    println!(
        "{}",
        json!({"schema": "qhelm.replay.v1", "manifest": path.display().to_string(), "outputs": rows, "identical": mismatched.is_empty()})
    );
    if mismatched.is_empty() {
        Ok(())
    } else {
        Err(CliError::ReplayMismatch(mismatched.join(", ")))
    }
}

fn fail(command: &str, e: &CliError, out_dir: Option<&PathBuf>) -> ExitCode {
    let report = e.report(command);
    eprintln!("qhelm {command}: {e}");
    println!("{report}");
    if e.exit_code() == 1 {
        if let Ok(out) = OutDir::new(out_root(out_dir)) {
            let _ = std::fs::write(out.path(&format!("{command}.error.json")), report.to_string());
        }
    }
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let argv = match config::load_and_merge(&raw) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    if let Some(m) = &cli.replay {
        if cli.command.is_some() {
            eprintln!("error: --replay takes no subcommand");
            return ExitCode::from(2);
        }
        return match replay(m, cli.out_dir.as_ref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail("replay", &e, cli.out_dir.as_ref()),
        };
    }
    let Some(cmd) = &cli.command else {
        let _ = Cli::command().print_help();
        return ExitCode::from(2);
    };
    match execute(&cli, cmd, &argv) {
        Ok(path) => {
            println!("{}", json!({"status": "ok", "command": cmd.name(), "manifest": path.display().to_string()}));
            ExitCode::SUCCESS
        }
        Err(e) => fail(cmd.name(), &e, cli.out_dir.as_ref()),
    }
}
