//! Command-line front end for the `dris` binary. Parsing and output only;
//! the work happens in [`crate::commands`].
//!
//! Exit codes: 0 success, 2 bad input, 3 a move script step failed,
//! 4 the linear algebra failed.

use std::ffi::OsString;
use std::f64::consts::FRAC_PI_4;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{
    converge, converge_table, parse_script, periods, run_moves, special, Domain, Source, Special,
};
use crate::error::Error;
use crate::io::{format_e12, parse_complex, to_json};

#[derive(Debug, Parser)]
#[command(name = "dris", version, about = "Periods, special functions and electrical moves on discrete Riemann surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gram matrix, period matrices and residuals of a closed surface (JSON).
    Periods {
        #[command(flatten)]
        source: SourceArgs,
        /// Random closed-form pairs for the bilinear relations.
        #[arg(long, default_value_t = 50)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// ‖Π_Γ − Π_Γ*‖ over successive refinements of a critical torus (CSV).
    Converge {
        #[command(flatten)]
        torus: TorusArgs,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Multiply each ρ by e^{eps·u}, u uniform in [−1, 1].
        #[arg(long, default_value_t = 0.0)]
        perturb: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Discrete exponential or power against the continuous one (CSV).
    Special {
        kind: SpecialKind,
        /// λ of the exponential, e.g. `1+0.5i`.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        lambda: String,
        /// Exponent of the power.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        domain: DomainArgs,
    },
    /// Apply a JSON move script and trace the invariants (JSON).
    Moves {
        #[command(flatten)]
        source: SourceArgs,
        /// A JSON list of `{kind, site, direction?, param?}` steps.
        #[arg(long)]
        script: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpecialKind {
    Exp,
    Power,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct TorusArgs {
    /// Flat square torus with periods 2p e^{−iθ}, 2q e^{iθ}.
    #[arg(long, num_args = 3, value_names = ["P", "Q", "THETA"], allow_hyphen_values = true)]
    pub square_torus: Option<Vec<String>>,
    /// Triangular/hexagonal torus of n1 × n2 cells; see `--angles`.
    #[arg(long, num_args = 2, value_names = ["N1", "N2"])]
    pub tri_hex: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// A complex in the JSON format.
    #[arg(long, group = "surface")]
    pub input: Option<PathBuf>,
    /// Flat square torus with periods 2p e^{−iθ}, 2q e^{iθ}.
    #[arg(long, num_args = 3, value_names = ["P", "Q", "THETA"], allow_hyphen_values = true, group = "surface")]
    pub square_torus: Option<Vec<String>>,
    /// Triangular/hexagonal torus of n1 × n2 cells; see `--angles`.
    #[arg(long, num_args = 2, value_names = ["N1", "N2"], group = "surface")]
    pub tri_hex: Option<Vec<usize>>,
    /// Two tori glued through a quad, with seeded random ρ.
    #[arg(long, value_name = "SEED", group = "surface")]
    pub genus_two: Option<u64>,
    /// Planar square-lattice patch of the given radius; see `--theta`.
    #[arg(long, value_name = "R", group = "surface")]
    pub square_patch: Option<usize>,
    /// First sextant of the triangular lattice; see `--angles`.
    #[arg(long, value_name = "R", group = "surface")]
    pub sextant: Option<usize>,
    /// Half rhombus angle of square lattices.
    #[arg(long, default_value_t = FRAC_PI_4)]
    pub theta: f64,
    /// Triangle angles opposite the horizontal, "/" and "\" edges (default equilateral).
    #[arg(long, num_args = 3, value_names = ["A", "B", "C"])]
    pub angles: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
pub struct DomainArgs {
    /// First sextant of the equilateral triangular lattice (the default, radius 8).
    #[arg(long, value_name = "R")]
    pub sextant: Option<usize>,
    /// Square-lattice patch with rhombus half angle π/4.
    #[arg(long, value_name = "R")]
    pub square: Option<usize>,
    /// The real points 0, 1/n, …, 1.
    #[arg(long, value_name = "N")]
    pub chain: Option<usize>,
}

/// Exit code for a library error outside a script.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SolverFail { .. } | Error::SingularC => 4,
        Error::BadConfiguration(_) => 3,
        _ => 2,
    }
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn square_torus_args(v: &[String]) -> Result<Source, Failure> {
    let bad = || invalid(format!("--square-torus expects P Q THETA, got {v:?}"));
    let p = v[0].parse().map_err(|_| bad())?;
    let q = v[1].parse().map_err(|_| bad())?;
    let theta = v[2].parse().map_err(|_| bad())?;
    Ok(Source::SquareTorus { p, q, theta })
}

fn angles(v: &Option<Vec<f64>>) -> Option<[f64; 3]> {
    v.as_ref().map(|a| [a[0], a[1], a[2]])
}

impl SourceArgs {
    fn source(&self) -> Result<Source, Failure> {
        let angles = angles(&self.angles);
        if let Some(path) = &self.input {
            Ok(Source::Json(read(path)?))
        } else if let Some(v) = &self.square_torus {
            square_torus_args(v)
        } else if let Some(v) = &self.tri_hex {
            Ok(Source::TriHex { n1: v[0], n2: v[1], angles })
        } else if let Some(seed) = self.genus_two {
            Ok(Source::GenusTwo { seed })
        } else if let Some(radius) = self.square_patch {
            Ok(Source::SquarePatch { radius, theta: self.theta })
        } else if let Some(radius) = self.sextant {
            Ok(Source::Sextant { radius, angles })
        } else {
            Err(invalid("no surface given: use --input or a generator flag"))
        }
    }
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Periods { source, pairs, seed } => {
            let fx = source.source()?.load()?;
            Ok(to_json(&periods(&fx, *pairs, *seed)?))
        }
        Command::Converge { torus, levels, perturb, seed } => {
            let src = match (&torus.square_torus, &torus.tri_hex) {
                (Some(v), _) => square_torus_args(v)?,
                (_, Some(v)) => Source::TriHex { n1: v[0], n2: v[1], angles: None },
                _ => return Err(invalid("converge needs --square-torus or --tri-hex")),
            };
            let map = src.load()?.map.expect("generators carry a critical map");
            Ok(converge_table(&converge(&map, *levels, *perturb, *seed)?).to_csv())
        }
        Command::Special { kind, lambda, k, domain } => {
            let f = match kind {
                SpecialKind::Exp => Special::Exp(parse_complex(lambda)?),
                SpecialKind::Power => Special::Power(*k),
            };
            let domain = match (domain.sextant, domain.square, domain.chain) {
                (_, Some(radius), _) => Domain::Square { radius, theta: FRAC_PI_4 },
                (_, _, Some(n)) => Domain::Chain(n),
                (r, _, _) => Domain::Sextant { radius: r.unwrap_or(8), angles: None },
            };
            let pc = special(f, domain)?;
            let mut csv = pc.table().to_csv();
            csv.push_str(&format!(
                "# max_abs_error={} max_rel_error={}\n",
                format_e12(pc.max_error()),
                format_e12(pc.max_relative_error())
            ));
            Ok(csv)
        }
        Command::Moves { source, script } => {
            let fx = source.source()?.load()?;
            let steps = parse_script(&read(script)?)?;
            let report = run_moves(&fx, &steps).map_err(|e| Failure { code: 3, message: e.to_string() })?;
            Ok(to_json(&report))
        }
    }
}

/// Runs the driver on `args` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = execute(&cli).and_then(|text| match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| invalid(format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| invalid(e.to_string())),
    });
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point of the binary.
pub fn main() -> ! {
    let code = run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("dris").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn periods_of_the_unit_square_torus() {
        let (code, out, _) = call(&["periods", "--square-torus", "1", "1", "0.7853981634", "--pairs", "3"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["pi_gamma"][0][0]["im"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!(v["residuals"]["identities"]["duality"].as_f64().unwrap() < 1e-8);
        assert_eq!(call(&["periods", "--square-torus", "1", "1", "0.7853981634", "--pairs", "3"]).1, out);
    }

    #[test]
    fn bad_input_exits_two() {
        let dir = std::env::temp_dir().join("dris-cli-test-malformed.json");
        std::fs::write(&dir, "{\"vertices\": [").unwrap();
        let (code, _, err) = call(&["periods", "--input", dir.to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(err.contains("malformed complex JSON"), "{err}");
        assert_eq!(call(&["periods"]).0, 2);
        assert_eq!(call(&["periods", "--square-torus", "1", "x", "0.5"]).0, 2);
        assert_eq!(call(&["periods", "--square-patch", "2"]).0, 2);
    }

    #[test]
    fn converge_and_special_emit_csv() {
        let (code, out, _) = call(&["converge", "--square-torus", "1", "1", "0.7853981634", "--levels", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 3);
        assert!(out.starts_with("level,delta,quads,gap,ref_error\n"));
        let (code, out, _) = call(&["special", "power", "--k", "3", "--chain", "10"]);
        assert_eq!(code, 0);
        let last = out.lines().nth(11).unwrap();
        assert!(last.starts_with("10,1.000000000000e+00,"), "{last}");
        assert!(last.contains(",1.005000000000e+00,"), "{last}");
        let (code, out, _) = call(&["special", "exp", "--lambda", "-1+0.5i", "--square", "2"]);
        assert_eq!(code, 0);
        assert!(out.lines().last().unwrap().starts_with("# max_abs_error="));
    }

    #[test]
    fn failing_script_exits_three() {
        let script = std::env::temp_dir().join("dris-cli-test-script.json");
        std::fs::write(&script, r#"[{"kind": "II", "site": 0}]"#).unwrap();
        let (code, _, err) = call(&["moves", "--square-torus", "2", "2", "0.7", "--script", script.to_str().unwrap()]);
        assert_eq!(code, 3);
        assert!(err.contains("step 0"), "{err}");
        std::fs::write(&script, "[]").unwrap();
        assert_eq!(call(&["moves", "--genus-two", "1", "--script", script.to_str().unwrap()]).0, 0);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::SingularC), 4);
        assert_eq!(exit_code(&Error::SolverFail { residual: 1.0, iterations: 3 }), 4);
        assert_eq!(exit_code(&Error::NotClosedSurface), 2);
    }
}
