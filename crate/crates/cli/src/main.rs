//! `freemoments`: moment-level free (de)convolution, information-plus-noise
//! denoising, the G² estimator and seeded Monte Carlo from the command line.
//!
//! Exit codes: 0 success, 1 domain/solver error, 2 malformed input or usage.

mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use freemoments::estimators::{
    check_g2_routes, check_info_noise_routes, g2_fixed_point, g2_moment_route, info_noise_forward,
    info_noise_inverse, CrossCheck, InfoNoiseParams,
};
use freemoments::freeconv::{add_conv, add_deconv, mp_conv, mp_deconv, mult_conv, mult_deconv};
use freemoments::rmtsim::{
    mixed_moment_decay, simulate_info_noise, DecaySpec, EnsembleSpec, Factor, MixedTerm,
};
use freemoments::{ExecMode, MomentSequence};

use io::{fmt_num, read_record, CliError, Record, Table};

/// Order used when a measure is expanded and `--order` is not given.
const DEFAULT_ORDER: usize = 10;
/// Series-based routes need more terms.
const SERIES_ORDER: usize = 40;

#[derive(Debug, Parser)]
#[command(name = "freemoments", version, about = "Free probability on truncated moment sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Files {
    /// Input file (`format: 1` records); repeat for binary operations.
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Truncation order K [default: length of the input sequence, or 10 for
    /// a measure; 40 for `g2` and `validate`].
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Debug, Args)]
struct Ratio {
    /// Aspect ratio c = n/N.
    #[arg(long)]
    c: f64,
}

#[derive(Debug, Args)]
struct Noise {
    #[command(flatten)]
    ratio: Ratio,
    /// Noise variance σ².
    #[arg(long)]
    sigma2: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// First input ⊞ second input.
    ConvAdd(#[command(flatten)] Files),
    /// Solve for a with a ⊞ (second input) = first input.
    DeconvAdd(#[command(flatten)] Files),
    /// First input ⊠ second input.
    ConvMult(#[command(flatten)] Files),
    /// Solve for a with a ⊠ (second input) = first input.
    DeconvMult(#[command(flatten)] Files),
    /// Multiplicative free convolution with the Marčenko–Pastur law.
    MpConv {
        #[command(flatten)]
        files: Files,
        #[command(flatten)]
        ratio: Ratio,
    },
    /// Multiplicative free deconvolution by the Marčenko–Pastur law.
    MpDeconv {
        #[command(flatten)]
        files: Files,
        #[command(flatten)]
        ratio: Ratio,
    },
    /// Moments of the noisy spectrum from the signal spectrum.
    InfoNoise {
        #[command(flatten)]
        files: Files,
        #[command(flatten)]
        noise: Noise,
    },
    /// Moments of the signal spectrum from the noisy spectrum.
    Denoise {
        #[command(flatten)]
        files: Files,
        #[command(flatten)]
        noise: Noise,
    },
    /// G²(z) from a sample spectrum: the fixed point for a measure, or the
    /// moment route when `--support-bound` is given.
    G2 {
        #[command(flatten)]
        files: Files,
        #[command(flatten)]
        ratio: Ratio,
        /// Evaluation point(s), negative; repeatable.
        #[arg(long, required = true, allow_negative_numbers = true)]
        z: Vec<f64>,
        /// Bound on the support of the population law (moment route).
        #[arg(long)]
        support_bound: Option<f64>,
    },
    /// Monte Carlo moments of W = (1/N)(R + σX)(R + σX)*; the input is the
    /// spectrum of (1/N) R R*.
    Simulate {
        #[arg(long, required = true)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long)]
        sigma2: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 6)]
        order: usize,
        /// Rotate the signal by a seeded Haar unitary per repetition.
        #[arg(long)]
        rotate: bool,
    },
    /// Centered mixed-moment statistic at increasing dimensions.
    MixedDecay {
        #[arg(long, required = true)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        ratio: Ratio,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        /// Dimension(s) n; repeatable.
        #[arg(long, default_values_t = [64, 128, 256])]
        n: Vec<usize>,
        /// Comma-separated factors: `noise`, `noise-copy`, `signal`.
        #[arg(long, default_value = "noise,signal")]
        pattern: String,
    },
    /// Cross-route checks on a signal spectrum: moment pipeline vs fixed
    /// point for the noisy spectrum, and both G² routes.
    Validate {
        #[arg(long, required = true)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        noise: Noise,
        #[arg(long, default_values_t = [-8.0, -10.0, -15.0], allow_negative_numbers = true)]
        z: Vec<f64>,
        #[arg(long, default_value_t = SERIES_ORDER)]
        order: usize,
        /// Population support bound for the G² moment route [default:
        /// largest atom of the input].
        #[arg(long)]
        support_bound: Option<f64>,
    },
}

impl Files {
    fn inputs(&self, count: usize) -> Result<Vec<Record>, CliError> {
        if self.input.len() != count {
            return Err(CliError::Usage(format!(
                "expected {count} --input file(s), got {}",
                self.input.len()
            )));
        }
        self.input.iter().map(|p| read_record(p)).collect()
    }

    fn one(&self) -> Result<MomentSequence, CliError> {
        self.inputs(1)?[0].moments(self.order, DEFAULT_ORDER)
    }

    /// Both operands at a common order.
    fn two(&self) -> Result<(MomentSequence, MomentSequence), CliError> {
        let r = self.inputs(2)?;
        let a = r[0].moments(self.order, DEFAULT_ORDER)?;
        let b = r[1].moments(self.order, DEFAULT_ORDER)?;
        Ok((a, b))
    }

    fn emit(&self, m: &MomentSequence) -> Result<(), CliError> {
        Table::moments(m).write(self.output.as_deref())
    }
}

fn parse_pattern(s: &str) -> Result<Vec<MixedTerm>, CliError> {
    s.split(',')
        .map(|f| match f.trim() {
            "noise" => Ok(MixedTerm::linear(Factor::Noise)),
            "noise-copy" => Ok(MixedTerm::linear(Factor::NoiseCopy)),
            "signal" => Ok(MixedTerm::linear(Factor::Signal)),
            other => Err(CliError::Usage(format!("unknown factor {other:?} in --pattern"))),
        })
        .collect()
}

fn check_rows(table: &mut Table, checks: &[CrossCheck]) {
    for c in checks {
        table.row(&[
            c.name.to_string(),
            fmt_num(c.z),
            fmt_num(c.first),
            fmt_num(c.second),
            fmt_num(c.diff()),
            fmt_num(c.tolerance),
            c.passed().to_string(),
        ]);
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    let mode = ExecMode::default();
    match command {
        Command::ConvAdd(f) => {
            let (a, b) = f.two()?;
            f.emit(&add_conv(&a, &b)?)
        }
        Command::DeconvAdd(f) => {
            let (a, b) = f.two()?;
            f.emit(&add_deconv(&a, &b)?)
        }
        Command::ConvMult(f) => {
            let (a, b) = f.two()?;
            f.emit(&mult_conv(&a, &b)?)
        }
        Command::DeconvMult(f) => {
            let (a, b) = f.two()?;
            f.emit(&mult_deconv(&a, &b)?)
        }
        Command::MpConv { files, ratio } => files.emit(&mp_conv(&files.one()?, ratio.c)?),
        Command::MpDeconv { files, ratio } => files.emit(&mp_deconv(&files.one()?, ratio.c)?),
        Command::InfoNoise { files, noise } => {
            let m = files.one()?;
            let p = InfoNoiseParams::new(noise.ratio.c, noise.sigma2, m.order())?;
            files.emit(&info_noise_forward(&m, &p)?)
        }
        Command::Denoise { files, noise } => {
            let m = files.one()?;
            let p = InfoNoiseParams::new(noise.ratio.c, noise.sigma2, m.order())?;
            files.emit(&info_noise_inverse(&m, &p)?)
        }
        Command::G2 {
            files,
            ratio,
            z,
            support_bound,
        } => {
            let record = files.inputs(1)?.remove(0);
            let mut table = Table::new(&["z", "g2"]);
            for &z in &z {
                let v = match support_bound {
                    Some(bound) => {
                        let m = record.moments(files.order, SERIES_ORDER)?;
                        g2_moment_route(&m, ratio.c, z, bound)?
                    }
                    None => g2_fixed_point(record.atoms(&files.input[0])?, ratio.c, z)?,
                };
                table.row(&[fmt_num(z), fmt_num(v)]);
            }
            table.write(files.output.as_deref())
        }
        Command::Simulate {
            input,
            output,
            n,
            big_n,
            sigma2,
            seed,
            reps,
            order,
            rotate,
        } => {
            let gamma = read_record(&input)?.atoms(&input)?.clone();
            let mut spec = EnsembleSpec::new(n, big_n, sigma2, gamma, seed);
            spec.reps = reps;
            spec.order = order;
            spec.rotate = rotate;
            let est = simulate_info_noise(&spec, mode)?;
            let mut table = Table::new(&["k", "m_k", "stderr"]);
            for k in 1..=order {
                table.row(&[k.to_string(), fmt_num(est.mean.get(k)), fmt_num(est.stderr[k - 1])]);
            }
            table.write(output.as_deref())
        }
        Command::MixedDecay {
            input,
            output,
            ratio,
            seed,
            reps,
            n,
            pattern,
        } => {
            let spec = DecaySpec {
                c: ratio.c,
                gamma: read_record(&input)?.atoms(&input)?.clone(),
                seed,
                reps,
            };
            let points = mixed_moment_decay(&n, &spec, &parse_pattern(&pattern)?, mode)?;
            let mut table = Table::new(&["n", "mean", "stderr"]);
            for p in points {
                table.row(&[p.n.to_string(), fmt_num(p.mean), fmt_num(p.stderr)]);
            }
            table.write(output.as_deref())
        }
        Command::Validate {
            input,
            output,
            noise,
            z,
            order,
            support_bound,
        } => {
            let gamma = read_record(&input)?.atoms(&input)?.clone();
            let p = InfoNoiseParams::new(noise.ratio.c, noise.sigma2, order)?;
            let mut checks = check_info_noise_routes(&gamma, &p, &z)?;
            let bound = support_bound.unwrap_or_else(|| gamma.max_abs_position());
            let g2_points: Vec<f64> = z.iter().copied().filter(|z| z.abs() >= 2.0 * bound).collect();
            if g2_points.is_empty() {
                eprintln!("note: no z with |z| >= 2 x support bound {bound}; G² check skipped");
            }
            checks.extend(check_g2_routes(&gamma, p.c, &g2_points, order, bound)?);
            let mut table = Table::new(&["check", "z", "first", "second", "diff", "tolerance", "pass"]);
            check_rows(&mut table, &checks);
            table.write(output.as_deref())?;
            let failed = checks.iter().filter(|c| !c.passed()).count();
            if failed > 0 {
                return Err(CliError::Validation {
                    failed,
                    total: checks.len(),
                });
            }
            Ok(())
        }
    }
}

/// Runs the tool on `argv` (including the program name) and returns the
/// process exit code.
fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()) as u8)
}
