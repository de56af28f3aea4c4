use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use peakon_core::evolution::{collision_scan, collision_windows, solution_at, sup_u, FlowState};
use peakon_core::forward::{interior_data, ladder_rank, spectral_data, zero_count_at};
use peakon_core::interior::{enumerate_solutions, feasibility, modulus_family_count, solution_family};
use peakon_core::inverse::measure_from_spectral_data;
use peakon_core::io::{
    measure_json, read_interior, read_measure, read_spectral, to_json, trajectory_csv, InteriorFile, MeasureFile,
};
use peakon_core::{Error, ErrorClass, Tolerances};

#[derive(Parser)]
#[command(name = "peakon", version, about = "Spectral toolkit for discrete peakon measures")]
#[command(after_help = "Tolerances: --tol.<name> <value> for any of pos, zero, coef, root, pf, cf, inv, phi, ab, trace, cons, g, collision.\nPEAKON_CONFIG may name a JSON file with keys tol, t, x, format, splits; flags take precedence.")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spectrum, norming constants and oscillation counts of a measure.
    Forward {
        file: PathBuf,
        /// Also report normalized eigenfunction values at this point.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<f64>,
    },
    /// Measure from eigenvalues and norming constants.
    Inverse { file: PathBuf },
    /// Feasibility, solution count and reconstructions from interior data.
    Interior {
        file: PathBuf,
        /// Reconstruct every branch.
        #[arg(long)]
        enumerate: bool,
        /// Split parameters in (0, 1), one per shared pole.
        #[arg(long, value_delimiter = ',')]
        splits: Option<Vec<f64>>,
        /// Count the data sets sharing these moduli |phi_i(a)|.
        #[arg(long)]
        moduli: bool,
    },
    /// Multipeakon trajectory on a (t, x) grid.
    Evolve {
        file: PathBuf,
        /// start:stop:step
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        /// start:stop:step
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

/// Contents of the PEAKON_CONFIG file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    #[serde(default)]
    tol: Option<Tolerances>,
    t: Option<String>,
    x: Option<String>,
    format: Option<Format>,
    splits: Option<Vec<f64>>,
}

enum Failure {
    Core(Error),
    Usage(String),
    /// Data rejected by the existence test; the report still goes out.
    Infeasible(String),
    Code(u8, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Out<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Out<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Pulls `--tol.<name> v` and `--tol.<name>=v` out of argv.
fn split_tolerances(args: Vec<String>) -> Out<(Vec<String>, Vec<(String, f64)>)> {
    let mut rest = Vec::new();
    let mut tols = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(spec) = a.strip_prefix("--tol.") else {
            rest.push(a);
            continue;
        };
        let (name, value) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => (spec.to_string(), it.next().ok_or_else(|| Failure::Usage(format!("{a} needs a value")))?),
        };
        let v: f64 = value.parse().map_err(|_| Failure::Usage(format!("bad value {value:?} for --tol.{name}")))?;
        tols.push((name, v));
    }
    Ok((rest, tols))
}

fn load_config() -> Out<RunConfig> {
    match std::env::var_os("PEAKON_CONFIG") {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = read(Path::new(&p))?;
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", Path::new(&p).display())))
        }
    }
}

/// Inclusive grid from "start:stop:step".
fn parse_grid(spec: &str) -> Out<Vec<f64>> {
    let bad = || Failure::Usage(format!("grid {spec:?} is not start:stop:step with step > 0"));
    let parts: Vec<f64> = spec.split(':').map(|s| s.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let [start, stop, step] = parts[..] else { return Err(bad()) };
    if !(step > 0.0 && start.is_finite() && stop.is_finite() && stop >= start) {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + k as f64 * step).collect())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Out<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_line(v: &impl Serialize) -> Out<String> {
    Ok(to_json(v)? + "\n")
}

fn forward(file: &Path, at: Option<f64>, tol: &Tolerances) -> Out<String> {
    let m = read_measure(&read(file)?, tol)?;
    let sd = spectral_data(&m, tol)?;
    let oscillation: Vec<Value> = sd
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let zeros = zero_count_at(&m, l);
            let rank = ladder_rank(&sd.eigenvalues, i);
            json!({"lambda": l, "zeros": zeros, "ladder_rank": rank, "ok": zeros + 1 == rank})
        })
        .collect();
    let mut report = json!({
        "eigenvalues": sd.eigenvalues,
        "norming": sd.norming,
        "counts": m.counts(),
        "oscillation": oscillation,
    });
    if let Some(a) = at {
        let d = interior_data(&m, a, tol)?;
        report["a"] = json!(a);
        report["phi"] = json!(d.phi);
        report["pairs"] = serde_json::to_value(InteriorFile::from(&d).pairs).expect("plain data");
    }
    json_line(&report)
}

fn inverse(file: &Path, tol: &Tolerances) -> Out<String> {
    let sd = read_spectral(&read(file)?)?;
    let m = measure_from_spectral_data(&sd, tol)?;
    Ok(measure_json(&m)? + "\n")
}

fn interior(file: &Path, enumerate: bool, splits: &[f64], moduli: bool, tol: &Tolerances) -> Out<String> {
    let d = read_interior(&read(file)?)?;
    let report = feasibility(&d.eigenvalues, &d.phi, tol);
    let mut out = json!({"feasibility": report});
    if moduli {
        out["modulus_count"] = json!(modulus_family_count(&d, tol)?);
    }
    if !report.ok {
        return Err(Failure::Infeasible(json_line(&out)?));
    }
    let family = solution_family(&d, tol)?;
    out["count"] = serde_json::to_value(family.count()).expect("plain data");
    out["branches"] = serde_json::to_value(&family.branches).expect("plain data");
    out["solutions"] = json!([]);
    if enumerate {
        let outcomes = enumerate_solutions(&d, splits, tol)?;
        let mut solutions = Vec::new();
        let mut failures = Vec::new();
        for o in outcomes {
            match o.result {
                Ok(m) => solutions.push(serde_json::to_value(MeasureFile::from(&m)).expect("plain data")),
                Err(e) => {
                    solutions.push(Value::Null);
                    failures.push(json!({"branch": o.branch, "error": e.to_string()}));
                }
            }
        }
        if solutions.iter().all(Value::is_null) {
            return Err(Failure::Code(3, format!("no branch reconstructed: {}", to_json(&failures)?)));
        }
        out["solutions"] = Value::Array(solutions);
        if !failures.is_empty() {
            out["failures"] = Value::Array(failures);
        }
    }
    json_line(&out)
}

fn evolve(file: &Path, ts: &[f64], xs: &[f64], format: Format, tol: &Tolerances) -> Out<String> {
    let m = read_measure(&read(file)?, tol)?;
    let fs = FlowState::new(spectral_data(&m, tol)?, 0.0)?;
    match format {
        Format::Csv => {
            let mut rows = Vec::with_capacity(ts.len() * xs.len());
            let mut failed = 0;
            for &t in ts {
                match solution_at(&fs, t, xs, tol) {
                    Ok((u, _)) => rows.extend(xs.iter().zip(u).map(|(&x, u)| (t, x, u))),
                    Err(e) => {
                        eprintln!("warning: t={t}: {e}");
                        failed += 1;
                    }
                }
            }
            if failed == ts.len() {
                return Err(Failure::Code(3, "no time sample reconstructed".into()));
            }
            Ok(trajectory_csv(&rows))
        }
        Format::Json => {
            let scan = collision_scan(&fs, ts, tol);
            let measures: Vec<Value> = ts
                .iter()
                .map(|&t| match fs.measure_at(t, tol) {
                    Ok(m) => json!({"t": t, "points": MeasureFile::from(&m).points}),
                    Err(e) => json!({"t": t, "points": null, "error": e.to_string()}),
                })
                .collect();
            let flagged: Vec<_> = scan.iter().filter(|s| s.v_mass.map_or(true, |v| v > 0.0)).collect();
            let (sup, attained) = sup_u(&fs);
            json_line(&json!({
                "sup_u": {"value": sup, "attained": attained},
                "measures": measures,
                "collisions": {"windows": collision_windows(&scan), "samples": flagged},
            }))
        }
    }
}

fn run(args: Vec<String>) -> Out<()> {
    let (args, overrides) = split_tolerances(args)?;
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            print!("{e}");
            std::process::exit(0)
        }
        _ => Failure::Usage(e.to_string()),
    })?;
    let config = load_config()?;
    let mut tol = config.tol.unwrap_or_default();
    for (name, v) in overrides {
        *tol.get_mut(&name).ok_or_else(|| Failure::Usage(format!("unknown tolerance {name:?}")))? = v;
    }
    tol.validate()?;
    let text = match &cli.cmd {
        Cmd::Forward { file, at } => forward(file, *at, &tol)?,
        Cmd::Inverse { file } => match inverse(file, &tol) {
            // a spectrum that admits no measure counts as a numerical failure here
            Err(Failure::Core(e @ Error::Infeasible(_))) => return Err(Failure::Code(3, e.to_string())),
            r => r?,
        },
        Cmd::Interior { file, enumerate, splits, moduli } => {
            let splits = splits.clone().or(config.splits).unwrap_or_default();
            match interior(file, *enumerate, &splits, *moduli, &tol) {
                Err(Failure::Infeasible(report)) => {
                    emit(&cli.out, &report)?;
                    return Err(Failure::Infeasible(report));
                }
                r => r?,
            }
        }
        Cmd::Evolve { file, t, x, format } => {
            let need = |flag: &str, v: Option<String>| v.ok_or_else(|| Failure::Usage(format!("--{flag} grid required")));
            let ts = parse_grid(&need("t", t.clone().or(config.t))?)?;
            let xs = parse_grid(&need("x", x.clone().or(config.x))?)?;
            evolve(file, &ts, &xs, format.or(config.format).unwrap_or(Format::Csv), &tol)?
        }
    };
    emit(&cli.out, &text)
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Infeasible(_)) => {
            eprintln!("error: interior data violate the existence conditions");
            ExitCode::from(4)
        }
        Err(Failure::Code(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
        Err(Failure::Core(e)) => {
            let debug = format!("{e:?}");
            let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default();
            eprintln!("error[{kind}]: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Validation => 2,
                ErrorClass::Numerical => 3,
                ErrorClass::Infeasible => 4,
            })
        }
    }
}
