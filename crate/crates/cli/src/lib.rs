//! Command-line surface: framework files in, analysis reports out.

pub mod document;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num::complex::Complex64;

use crystalflex::flexes::{
    flex_space_dimension_with, pg_flex_space, rigidity_verdict_with, FlexDimension, Rigidity,
};
use crystalflex::framework::{gallery, CrystalFramework, GalleryName};
use crystalflex::numeric::DEFAULT_TOL;
use crystalflex::spectrum::{
    geometric_spectrum_with, rum_rational_scan, rum_samples_csv, rum_scan, SpectrumOptions,
};
use crystalflex::transfer::transfer_function;

use document::{parse_framework, serialize_framework, DocError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FLEXIBLE: i32 = 10;
pub const EXIT_UNKNOWN: i32 = 20;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FILE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser)]
#[command(name = "crystalflex", version, about = "first-order rigidity of crystal frameworks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a framework document
    Validate { file: PathBuf },
    /// Print the transfer function rows as Laurent polynomials
    Transfer { file: PathBuf },
    /// Scan the torus (or rational points) for rigid unit modes
    Rum {
        file: PathBuf,
        /// Uniform grid order per torus coordinate
        #[arg(long)]
        grid: Option<i64>,
        /// Scan roots of unity of order dividing Q instead of a grid
        #[arg(long)]
        rational_order: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Write drop samples as CSV to this path
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compute the geometric flex spectrum
    Spectrum {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Decide first-order rigidity (exit 0 rigid, 10 flexible, 20 unknown)
    Rigidity {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Print a basis of pg-flexes at a given multi-factor omega
    Flexes {
        file: PathBuf,
        /// Comma-separated complex components, e.g. "-1+0i,1+0i"
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long, default_value_t = 0)]
        deg: i64,
        /// Half-width of the listing window
        #[arg(long, default_value_t = 1)]
        window: i64,
    },
    /// Flex-space dimension per the finite-spectrum decision
    Dimension {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        cap: i64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Emit a gallery fixture as a framework document
    Gallery {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<CrystalFramework, (i32, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (EXIT_FILE, format!("{}: {e}", path.display())))?;
    parse_framework(&text).map_err(|e| match e {
        DocError::Json(_) | DocError::Schema(_) | DocError::Validation(_) => {
            (EXIT_FILE, e.to_string())
        }
    })
}

fn spectrum_options(seed: Option<u64>) -> SpectrumOptions {
    let mut opts = SpectrumOptions::default();
    if let Some(s) = seed {
        opts.seed = s;
    }
    opts
}

/// Parse one complex literal like "1", "-1+0i", "0.5-0.25i", "i", "-2i".
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    if let Some(body) = t.strip_suffix(['i', 'I']) {
        // split body into real and imaginary coefficient at the last +/-
        // that is not a leading sign or an exponent sign
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        let (re_str, im_str) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("", body),
        };
        let im = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => im_str.parse::<f64>().map_err(|e| e.to_string())?,
        };
        let re = if re_str.is_empty() {
            0.0
        } else {
            re_str.parse::<f64>().map_err(|e| e.to_string())?
        };
        Ok(Complex64::new(re, im))
    } else {
        t.parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|e| e.to_string())
    }
}

fn parse_omega(s: &str, dim: usize) -> Result<Vec<Complex64>, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != dim {
        return Err(format!(
            "omega has {} components, framework dimension is {dim}",
            parts.len()
        ));
    }
    parts.iter().map(|p| parse_complex(p)).collect()
}

pub fn run_command<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn internal(e: impl std::fmt::Display) -> (i32, String) {
    (EXIT_INTERNAL, format!("internal error: {e}"))
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Result<i32, (i32, String)> {
    let mut emit = |s: String| {
        let _ = write!(out, "{s}");
    };
    match cmd {
        Cmd::Validate { file } => {
            let fw = load(&file)?;
            let report = fw.validate();
            emit(format!(
                "valid: d={} joints={} edges={}\n",
                fw.dim,
                fw.n_joints(),
                fw.n_edges()
            ));
            for w in &report.warnings {
                emit(format!("warning: {w}\n"));
            }
            Ok(EXIT_OK)
        }
        Cmd::Transfer { file } => {
            let fw = load(&file)?;
            let tf = transfer_function(&fw).map_err(internal)?;
            for i in 0..tf.psi.rows {
                let entries: Vec<String> =
                    tf.psi.row(i).iter().map(|p| p.to_string()).collect();
                emit(format!(
                    "{}: [{}]\n",
                    tf.psi.row_labels[i],
                    entries.join(", ")
                ));
            }
            Ok(EXIT_OK)
        }
        Cmd::Rum {
            file,
            grid,
            rational_order,
            tol,
            csv,
        } => {
            let fw = load(&file)?;
            let samples = match (grid, rational_order) {
                (_, Some(q)) => rum_rational_scan(&fw, q, tol).map_err(internal)?,
                (Some(n), None) => rum_scan(&fw, n, tol).map_err(internal)?,
                (None, None) => {
                    return Err((
                        EXIT_USAGE,
                        "one of --grid or --rational-order is required".into(),
                    ))
                }
            };
            emit(format!("{} rank-drop samples\n", samples.len()));
            for s in &samples {
                emit(format!(
                    "  omega={} rank={} kernel_dim={}\n",
                    report::fmt_point(&s.omega),
                    s.rank,
                    s.kernel_dim
                ));
            }
            if let Some(path) = csv {
                std::fs::write(&path, rum_samples_csv(fw.dim, &samples))
                    .map_err(|e| (EXIT_FILE, format!("{}: {e}", path.display())))?;
            }
            Ok(EXIT_OK)
        }
        Cmd::Spectrum { file, seed, json } => {
            let fw = load(&file)?;
            let opts = spectrum_options(seed);
            let gs = geometric_spectrum_with(&fw, &opts).map_err(internal)?;
            if json {
                emit(format!(
                    "{}\n",
                    serde_json::to_string_pretty(&report::spectrum_json(&gs))
                        .map_err(internal)?
                ));
            } else {
                emit(report::spectrum_text(&gs));
            }
            Ok(EXIT_OK)
        }
        Cmd::Rigidity { file, seed, json } => {
            let fw = load(&file)?;
            let opts = spectrum_options(seed);
            let v = rigidity_verdict_with(&fw, &opts).map_err(internal)?;
            if json {
                let doc = report::analysis_json(&fw, &v, None, opts.tol);
                emit(format!(
                    "{}\n",
                    serde_json::to_string_pretty(&doc).map_err(internal)?
                ));
            } else {
                emit(report::verdict_text(&v));
            }
            Ok(match v.first_order_rigid {
                Rigidity::Rigid => EXIT_OK,
                Rigidity::Flexible => EXIT_FLEXIBLE,
                Rigidity::Unknown => EXIT_UNKNOWN,
            })
        }
        Cmd::Flexes {
            file,
            omega,
            deg,
            window,
        } => {
            let fw = load(&file)?;
            let w = parse_omega(&omega, fw.dim).map_err(|m| (EXIT_USAGE, m))?;
            let basis = pg_flex_space(&fw, &w, deg, DEFAULT_TOL).map_err(internal)?;
            emit(format!(
                "pg-flex space at omega={} with deg <= {deg}: dimension {}\n",
                report::fmt_point(&w),
                basis.len()
            ));
            let lo = vec![-window; fw.dim];
            let hi = vec![window; fw.dim];
            for (i, f) in basis.iter().enumerate() {
                emit(format!("flex {i}:\n{}", f.coefficient_table()));
                emit(f.window_field(&lo, &hi).listing(&fw));
            }
            Ok(EXIT_OK)
        }
        Cmd::Dimension { file, cap, seed } => {
            let fw = load(&file)?;
            let opts = spectrum_options(seed);
            let r = flex_space_dimension_with(&fw, cap, &opts).map_err(internal)?;
            match r.dimension {
                FlexDimension::Infinite => emit("infinite\n".into()),
                FlexDimension::Finite(n) => emit(format!("{n}\n")),
                FlexDimension::Unknown => emit("unknown\n".into()),
            }
            Ok(EXIT_OK)
        }
        Cmd::Gallery { name, out: dest } => {
            let g = GalleryName::parse(&name)
                .map_err(|e| (EXIT_USAGE, e.to_string()))?;
            let text = serialize_framework(&gallery(g));
            match dest {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| (EXIT_FILE, format!("{}: {e}", path.display())))?,
                None => emit(format!("{text}\n")),
            }
            Ok(EXIT_OK)
        }
    }
}
