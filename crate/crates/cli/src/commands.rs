use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use vsys_core::physics::ExperimentalInputs;
use vsys_core::{
    beat_contrast, build, run_validation, steady_state, trajectory, uniform_times, DetectorKind,
    DetectorSignal, Error, Fault, Generator, SignalMethod, Solver, StateVector, Trajectory,
    ValidationReport,
};

use crate::config::RunConfig;
use crate::csv;
use crate::error::{CliError, CliResult};
use crate::svg;

pub const SCAN_HEADER: [&str; 9] = [
    "delta_over_gamma",
    "rho_e1e1_ss",
    "rho_e2e2_ss",
    "coh_re_ss",
    "coh_im_ss",
    "peak_coh_abs",
    "beat_contrast",
    "diff_re_late",
    "diff_im_late",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    #[value(name = "csv+svg")]
    CsvSvg,
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn prepare_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Matrix exponential, falling back to RK when the generator has a zero
/// mode (isotropic pumping with full alignment at Δ = 0).
pub fn solve(gen: &Generator<f64>, times: &[f64]) -> CliResult<Trajectory<f64>> {
    match trajectory(gen, times, Solver::MatrixExp) {
        Err(Error::Singular { .. }) => Ok(trajectory(gen, times, Solver::AdaptiveRK)?),
        other => Ok(other?),
    }
}

fn steady_or_last(gen: &Generator<f64>, traj: &Trajectory<f64>) -> StateVector<f64> {
    match steady_state(gen) {
        Ok(s) => s,
        Err(_) => *traj.states.last().expect("at least two samples"),
    }
}

pub fn simulate_trajectories(cfg: &RunConfig) -> CliResult<(Trajectory<f64>, Trajectory<f64>)> {
    let p = cfg.params()?;
    let variant = cfg.variant()?;
    let times = uniform_times(cfg.t_end_over_tau, cfg.samples)?;
    let main = solve(&build(variant, &p, cfg.alignment)?, &times)?;
    let partner = solve(&build(variant.partner(), &p, cfg.alignment)?, &times)?;
    Ok((main, partner))
}

fn detectors_csv(cfg: &RunConfig, traj: &Trajectory<f64>) -> CliResult<String> {
    let sig = DetectorSignal::from_trajectory(traj, SignalMethod::ClosedForm)?;
    let kinds = cfg.detector_kinds()?;
    let names: Vec<String> = kinds.iter().map(|k| format!("I_{}", k.name())).collect();
    let mut header = vec!["t_over_tau"];
    header.extend(names.iter().map(String::as_str));
    header.extend(["diff_re", "diff_im"]);
    let rows: Vec<Vec<f64>> = (0..sig.times.len())
        .map(|i| {
            let mut row = vec![sig.times[i]];
            for k in &kinds {
                row.push(match k {
                    DetectorKind::FullSphere => sig.i_z[i],
                    DetectorKind::WedgeA => sig.i_a[i],
                    DetectorKind::WedgeAPrime => sig.i_a_prime[i],
                    DetectorKind::WedgeB => sig.i_b[i],
                    DetectorKind::WedgeBPrime => sig.i_b_prime[i],
                    DetectorKind::Custom => unreachable!("named detectors only"),
                });
            }
            row.extend([sig.diff_re[i], sig.diff_im[i]]);
            row
        })
        .collect();
    Ok(csv::table(&header, &rows))
}

fn coherence_svg(cfg: &RunConfig, main: &Trajectory<f64>, partner: &Trajectory<f64>) -> String {
    let (ns, sec) = if main.generator_variant.is_secular() {
        (partner, main)
    } else {
        (main, partner)
    };
    let col = |t: &Trajectory<f64>, f: fn(&StateVector<f64>) -> f64| -> Vec<f64> {
        t.states.iter().map(f).collect()
    };
    let (ns_re, ns_im) = (col(ns, |s| s.coh_re), col(ns, |s| s.coh_im));
    let (s_re, s_im) = (col(sec, |s| s.coh_re), col(sec, |s| s.coh_im));
    let ns_label = format!("non-secular ({})", ns.generator_variant);
    let s_label = format!("secular ({})", sec.generator_variant);
    let title = |part: &str| {
        format!(
            "{part} ρ12, Δ/γ = {}, n̄ = {}",
            cfg.delta_over_gamma, cfg.nbar
        )
    };
    let (t_re, t_im) = (title("Re"), title("Im"));
    fn panel<'a>(
        title: &'a str,
        labels: [&'a str; 2],
        x: [&'a [f64]; 2],
        y: [&'a [f64]; 2],
    ) -> svg::Panel<'a> {
        let colors = ["#1f77b4", "#d62728"];
        svg::Panel {
            title,
            series: (0..2)
                .map(|k| svg::Series {
                    label: labels[k],
                    color: colors[k],
                    x: x[k],
                    y: y[k],
                })
                .collect(),
        }
    }
    let labels = [ns_label.as_str(), s_label.as_str()];
    let x = [ns.times.as_slice(), sec.times.as_slice()];
    svg::two_panel(
        &panel(&t_re, labels, x, [&ns_re, &s_re]),
        &panel(&t_im, labels, x, [&ns_im, &s_im]),
        "t / τ",
    )
}

pub fn run_simulate(cfg: &RunConfig, out: &Path, format: Format) -> CliResult<Vec<PathBuf>> {
    let (main, partner) = simulate_trajectories(cfg)?;
    prepare_dir(out)?;
    let mut written = Vec::new();

    let path = out.join("trajectory.csv");
    write(&path, &csv::trajectory_csv(&main))?;
    written.push(path);

    if !cfg.detectors.is_empty() {
        let path = out.join("detectors.csv");
        write(&path, &detectors_csv(cfg, &main)?)?;
        written.push(path);
    }
    if format == Format::CsvSvg {
        let path = out.join("coherences.svg");
        write(&path, &coherence_svg(cfg, &main, &partner))?;
        written.push(path);
    }
    Ok(written)
}

fn scan_row(cfg: &RunConfig, delta: f64, times: &[f64]) -> CliResult<Vec<f64>> {
    let p = cfg.params_at(delta)?;
    let gen = build(cfg.variant()?, &p, cfg.alignment)?;
    let traj = solve(&gen, times)?;
    let ss = steady_or_last(&gen, &traj);
    let sig = DetectorSignal::from_trajectory(&traj, SignalMethod::ClosedForm)?;
    let last = sig.times.len() - 1;
    Ok(vec![
        delta,
        ss.rho_ee1,
        ss.rho_ee2,
        ss.coh_re,
        ss.coh_im,
        traj.peak_coherence(),
        beat_contrast(&ss).unwrap_or(f64::NAN),
        sig.diff_re[last],
        sig.diff_im[last],
    ])
}

pub fn scan_table(cfg: &RunConfig) -> CliResult<String> {
    let times = uniform_times(cfg.t_end_over_tau, cfg.samples)?;
    let rows = cfg
        .deltas
        .par_iter()
        .map(|&d| scan_row(cfg, d, &times))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(csv::table(&SCAN_HEADER, &rows))
}

pub fn run_scan(cfg: &RunConfig, out: &Path) -> CliResult<PathBuf> {
    let table = scan_table(cfg)?;
    prepare_dir(out)?;
    let path = out.join("scan.csv");
    write(&path, &table)?;
    Ok(path)
}

pub fn color_enabled() -> bool {
    std::env::var_os("VSYS_NO_COLOR").is_none()
}

pub fn render_report(rep: &ValidationReport, color: bool) -> String {
    use std::fmt::Write as _;
    use vsys_core::validation::Status;

    let paint = |s: &str, code: &str| {
        if color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    };
    let mut out = String::new();
    let mut module = "";
    for e in &rep.entries {
        if e.module != module {
            module = e.module;
            let _ = writeln!(out, "[{module}]");
        }
        let tag = match e.status {
            Status::Pass => paint("PASS", "32"),
            Status::Fail => paint("FAIL", "31"),
            Status::Info => paint("INFO", "33"),
        };
        let bound = match e.limit {
            Some(l) => format!(" (limit {l:.1e})"),
            None => String::new(),
        };
        let _ = writeln!(out, "  {tag} {}: {:.4e}{bound}", e.name, e.value);
        if !e.detail.is_empty() {
            let _ = writeln!(out, "       {}", e.detail);
        }
    }
    let _ = writeln!(
        out,
        "{} passed, {} failed, {} informational",
        rep.count(Status::Pass),
        rep.count(Status::Fail),
        rep.count(Status::Info)
    );
    out
}

pub fn run_validate(
    fault: Option<Fault>,
    json: bool,
    out: Option<&Path>,
) -> CliResult<ValidationReport> {
    let rep = run_validation(fault);
    let json_text = serde_json::to_string_pretty(&rep).expect("report serialises");
    if json {
        println!("{json_text}");
    } else {
        print!("{}", render_report(&rep, color_enabled()));
    }
    if let Some(dir) = out {
        prepare_dir(dir)?;
        write(&dir.join("validation.json"), &(json_text + "\n"))?;
    }
    let failures = rep.failures().count();
    if failures > 0 {
        return Err(CliError::Validation(failures));
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParamsArgs {
    pub nbar: Option<f64>,
    pub b_field: Option<f64>,
    pub t_transit: Option<f64>,
}

pub fn params_report(args: ParamsArgs) -> CliResult<serde_json::Value> {
    let mut inputs = ExperimentalInputs::calcium_table();
    if let Some(n) = args.nbar {
        inputs.nbar = n;
    }
    if let Some(b) = args.b_field {
        inputs.b_field = b;
    }
    if let Some(t) = args.t_transit {
        inputs.t_transit = t;
    }
    let si = inputs.si_rates()?;
    Ok(serde_json::json!({
        "inputs": inputs,
        "rates": si,
        "delta_over_gamma": si.delta / si.gamma,
        "r_over_gamma": si.r / si.gamma,
    }))
}

pub fn print_params(args: ParamsArgs, json: bool) -> CliResult<()> {
    let v = params_report(args)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
        return Ok(());
    }
    let f = |path: &[&str]| {
        let mut x = &v;
        for k in path {
            x = &x[*k];
        }
        x.as_f64().unwrap_or(f64::NAN)
    };
    println!(
        "dipole moment      {:.6e} C m",
        f(&["inputs", "dipole_moment"])
    );
    println!("omega0             {:.6e} rad/s", f(&["inputs", "omega0"]));
    println!("B                  {:.6e} T", f(&["inputs", "b_field"]));
    println!("nbar               {}", f(&["inputs", "nbar"]));
    println!("T_transit          {:.6e} s", f(&["inputs", "t_transit"]));
    println!("gamma              {:.6e} rad/s", f(&["rates", "gamma"]));
    println!("tau                {:.6e} s", f(&["rates", "tau"]));
    println!("r                  {:.6e} rad/s", f(&["rates", "r"]));
    println!("Delta              {:.6e} rad/s", f(&["rates", "delta"]));
    println!("Delta/gamma        {:.6}", f(&["delta_over_gamma"]));
    println!("r/gamma            {:.6e}", f(&["r_over_gamma"]));
    println!(
        "T_transit/tau      {:.1}",
        f(&["rates", "lifetimes_in_transit"])
    );
    Ok(())
}
