use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fvcond::comparator::{
    comp, select, CircuitConstants, ComparatorConfig, EvalBackend, FvBackend, OracleBackend,
    Variant,
};
use fvcond::encoder::{EncodingParams, FractionalEncoder};
use fvcond::fv::serialize::{keyset_from_bytes, keyset_to_bytes};
use fvcond::fv::{keygen, Evaluator, KeySet, Plaintext, SchemeParams};
use fvcond::harness::{
    gen_pairs, key_seed, run_encrypted_eval_with_keys, run_table1, simple_error_csv, sweep,
    FailureThresholds, PairDataset, SweepGrid, SweepMode,
};
use fvcond::Error;
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "fvcond", version, about = "Comparison and selection on FV-encrypted reals")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Parameter preset: paper-r3 or insecure-test.
    #[arg(long, global = true, default_value = "paper-r3")]
    preset: String,
    /// Master seed for keys, datasets and encryption randomness.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Number of doubling iterations in the comparison.
    #[arg(long, global = true, default_value_t = 3)]
    r: u32,
    /// Selection variant: gt_half, lt_half, eq, gt or lt.
    #[arg(long, global = true, default_value = "gt_half")]
    variant: String,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Allow presets that are not meant for real use.
    #[arg(long, global = true)]
    insecure_ok: bool,
    /// Encoding base.
    #[arg(long, global = true, default_value_t = 7)]
    base: u32,
    /// Integer digit budget.
    #[arg(long, global = true, default_value_t = 8)]
    int_digits: usize,
    /// Fractional digit budget.
    #[arg(long, global = true, default_value_t = 8)]
    frac_digits: usize,
    /// Compute w21 by negating w12 instead of a second comparison.
    #[arg(long, global = true)]
    dependent_weights: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key set and write it in the binary key format.
    Keygen,
    /// Show the fractional encoding of a value.
    Encode {
        #[arg(allow_hyphen_values = true)]
        value: f64,
    },
    /// Encrypted comparison weight w12 ~ sgn(x1 - x2).
    Comp(PairArgs),
    /// Encrypted selection on one pair.
    Select(PairArgs),
    /// Oracle errors on the fixed grid for r = 1..=8.
    Table1 {
        /// Also write simple-error curves as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Encrypted evaluation over a dataset.
    Eval {
        /// Number of random pairs when no dataset file is given.
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        /// Minimum gap between the values of a random pair.
        #[arg(long)]
        min_gap: Option<f64>,
        /// Dataset file: one pair per line, `#` comments.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Key set written by `keygen`.
        #[arg(long)]
        keys: Option<PathBuf>,
        /// Error against the oracle at which an instance counts as failed.
        #[arg(long, default_value_t = 1.0)]
        accuracy_limit: f64,
    },
    /// Evaluate and rank parameter combinations.
    Sweep {
        /// Run real encryption, or simulate the circuit in the plaintext ring.
        #[arg(long, value_enum, default_value_t = Mode::NoiseFree)]
        mode: Mode,
        /// Number of random pairs per grid point.
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        /// Ring degrees, comma separated.
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<usize>>,
        /// Ciphertext modulus sizes in bits.
        #[arg(long, value_delimiter = ',')]
        modulus_bits: Option<Vec<u32>>,
        /// Plaintext moduli.
        #[arg(long, value_delimiter = ',')]
        plain_moduli: Option<Vec<u64>>,
        /// Encoding bases.
        #[arg(long, value_delimiter = ',')]
        bases: Option<Vec<u32>>,
        /// Fractional digit budgets.
        #[arg(long, value_delimiter = ',')]
        frac_digit_grid: Option<Vec<usize>>,
        /// Integer digit budgets.
        #[arg(long, value_delimiter = ',')]
        int_digit_grid: Option<Vec<usize>>,
    },
    /// Time the scheme primitives.
    Bench {
        /// Repetitions per primitive.
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
}

#[derive(Args)]
struct PairArgs {
    #[arg(allow_hyphen_values = true)]
    x1: f64,
    #[arg(allow_hyphen_values = true)]
    x2: f64,
    #[arg(long)]
    keys: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Encrypted,
    NoiseFree,
}

enum Failure {
    Validation(String),
    Infeasible(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(_) => Failure::Infeasible(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Infeasible(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

impl Global {
    fn params(&self) -> CliResult<Arc<SchemeParams>> {
        if self.preset != "paper-r3" && !self.insecure_ok {
            return Err(Failure::Validation(format!(
                "preset `{}` is not secure; pass --insecure-ok to use it",
                self.preset
            )));
        }
        Ok(SchemeParams::preset(&self.preset)?)
    }

    fn encoding(&self) -> EncodingParams {
        EncodingParams::new(self.base, self.int_digits, self.frac_digits)
    }

    fn config(&self) -> CliResult<ComparatorConfig> {
        let variant: Variant = self.variant.parse()?;
        Ok(ComparatorConfig::new(self.r, variant)?
            .with_independent_weights(!self.dependent_weights))
    }

    fn keys(&self, params: &Arc<SchemeParams>, path: Option<&Path>) -> CliResult<KeySet> {
        match path {
            Some(p) => Ok(keyset_from_bytes(params, &fs::read(p)?)?),
            None => {
                info!("generating keys");
                Ok(keygen(params, &mut ChaCha20Rng::seed_from_u64(key_seed(self.seed)))?)
            }
        }
    }

    fn emit(&self, value: &serde_json::Value) -> CliResult<()> {
        self.emit_text(&serde_json::to_string_pretty(value).expect("json"))
    }

    fn emit_text(&self, text: &str) -> CliResult<()> {
        match &self.out {
            Some(p) => fs::write(p, format!("{text}\n"))?,
            None => {
                let mut out = std::io::stdout().lock();
                match writeln!(out, "{text}") {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                    r => r?,
                }
            }
        }
        Ok(())
    }
}

fn check_input(x: f64) -> CliResult<()> {
    if !x.is_finite() || x.abs() > fvcond::harness::VALUE_BOUND {
        return Err(Failure::Validation(format!(
            "input {x} outside [-{b}, {b}]",
            b = fvcond::harness::VALUE_BOUND
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Keygen => {
            let params = g.params()?;
            let keys = g.keys(&params, None)?;
            let bytes = keyset_to_bytes(&keys);
            let out = g.out.as_ref().ok_or_else(|| {
                Failure::Validation("keygen writes binary output; pass --out".into())
            })?;
            fs::write(out, bytes)?;
            eprintln!("wrote key set for {} to {}", params.name(), out.display());
        }
        Command::Encode { value } => {
            let params = g.params()?;
            let enc = FractionalEncoder::new(params.clone(), g.encoding())?;
            let coeffs = enc.digits(*value)?;
            let nonzero: Vec<(usize, i64)> =
                coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect();
            let decoded = enc.decode(&enc.encode(*value)?)?;
            g.emit(&json!({
                "value": value,
                "decoded": decoded,
                "degree": params.degree(),
                "encoding": g.encoding(),
                "nonzero_coefficients": nonzero,
            }))?;
        }
        Command::Comp(args) | Command::Select(args) => {
            check_input(args.x1)?;
            check_input(args.x2)?;
            let params = g.params()?;
            let cfg = g.config()?;
            let keys = g.keys(&params, args.keys.as_deref())?;
            let enc = FractionalEncoder::new(params.clone(), g.encoding())?;
            let backend = FvBackend::new(enc, &keys.public, &keys.relin, g.seed);
            let a = backend.inject(args.x1)?;
            let b = backend.inject(args.x2)?;
            let start = Instant::now();
            let value = if matches!(cli.command, Command::Comp(_)) {
                let consts = CircuitConstants::new(&backend)?;
                let w = comp(&backend, &consts, &a, &b, cfg.r)?;
                let o = comp(&OracleBackend, &CircuitConstants::new(&OracleBackend)?, &args.x1, &args.x2, cfg.r)?;
                json!({
                    "x1": args.x1, "x2": args.x2, "r": cfg.r,
                    "w12": backend.reveal(&keys.secret, &w)?,
                    "oracle_w12": o,
                    "noise_budget": keys.secret.noise_budget(&w)?,
                    "mult_depth": w.mult_depth(),
                    "seconds": start.elapsed().as_secs_f64(),
                })
            } else {
                let s = select(&backend, &a, &b, &cfg)?;
                let o = select(&OracleBackend, &args.x1, &args.x2, &cfg)?;
                let reveal = |c| backend.reveal(&keys.secret, c);
                json!({
                    "x1": args.x1, "x2": args.x2, "r": cfg.r, "variant": cfg.variant,
                    "weights": [reveal(&s.weight_first)?, reveal(&s.weight_second)?],
                    "scaled": [reveal(&s.scaled_first)?, reveal(&s.scaled_second)?],
                    "oracle_weights": [o.weight_first, o.weight_second],
                    "oracle_scaled": [o.scaled_first, o.scaled_second],
                    "noise_budget": keys.secret.noise_budget(&s.scaled_first)?,
                    "weight_depth": [s.weight_first.mult_depth(), s.weight_first.plain_mult_count()],
                    "seconds": start.elapsed().as_secs_f64(),
                })
            };
            g.emit(&value)?;
        }
        Command::Table1 { csv } => {
            let report = run_table1(&[1, 2, 3, 4, 5, 6, 7, 8])?;
            if let Some(path) = csv {
                fs::write(path, simple_error_csv(&[1, 2, 3, 4, 5, 6, 7, 8], 401, 0.2)?)?;
            }
            g.emit(&serde_json::to_value(&report).expect("json"))?;
        }
        Command::Eval { pairs, min_gap, dataset, keys, accuracy_limit } => {
            let params = g.params()?;
            let cfg = g.config()?;
            FractionalEncoder::new(params.clone(), g.encoding())?;
            let ds = match dataset {
                Some(p) => PairDataset::parse(&fs::read_to_string(p)?)?,
                None => gen_pairs(*pairs, g.seed, *min_gap)?,
            };
            let keys = g.keys(&params, keys.as_deref())?;
            let thresholds = FailureThresholds { accuracy_limit: *accuracy_limit, ..Default::default() };
            let report =
                run_encrypted_eval_with_keys(&keys, g.encoding(), &cfg, &ds, g.seed, thresholds)?;
            g.emit_text(&report.to_json())?;
        }
        Command::Sweep {
            mode,
            pairs,
            degrees,
            modulus_bits,
            plain_moduli,
            bases,
            frac_digit_grid,
            int_digit_grid,
        } => {
            let cfg = g.config()?;
            let full = SweepGrid::published();
            let grid = SweepGrid {
                degrees: degrees.clone().unwrap_or(full.degrees),
                modulus_bits: modulus_bits.clone().unwrap_or(full.modulus_bits),
                plain_moduli: plain_moduli.clone().unwrap_or(full.plain_moduli),
                bases: bases.clone().unwrap_or(full.bases),
                frac_digits: frac_digit_grid.clone().unwrap_or(full.frac_digits),
                int_digits: int_digit_grid.clone().unwrap_or(full.int_digits),
            };
            let mode = match mode {
                Mode::Encrypted => SweepMode::Encrypted,
                Mode::NoiseFree => SweepMode::NoiseFree,
            };
            let ds = gen_pairs(*pairs, g.seed, None)?;
            let report = sweep(&grid, &cfg, &ds, mode, g.seed)?;
            g.emit(&serde_json::to_value(&report).expect("json"))?;
        }
        Command::Bench { reps } => {
            let params = g.params()?;
            let mut rng = ChaCha20Rng::seed_from_u64(g.seed);
            let time = |f: &mut dyn FnMut() -> fvcond::Result<()>| -> CliResult<f64> {
                let start = Instant::now();
                for _ in 0..(*reps).max(1) {
                    f()?;
                }
                Ok(start.elapsed().as_secs_f64() / (*reps).max(1) as f64)
            };
            let start = Instant::now();
            let keys = keygen(&params, &mut rng)?;
            let t_keygen = start.elapsed().as_secs_f64();
            let ev = Evaluator::new(params.clone());
            let m = Plaintext::constant(&params, 3);
            let ct = keys.public.encrypt(&m, &mut rng)?;
            let t_enc = time(&mut || keys.public.encrypt(&m, &mut rng).map(drop))?;
            let t_dec = time(&mut || keys.secret.decrypt(&ct).map(drop))?;
            let t_add = time(&mut || ev.add(&ct, &ct).map(drop))?;
            let t_mul_plain = time(&mut || ev.mul_plain(&ct, &m).map(drop))?;
            let t_mul = time(&mut || ev.mul(&ct, &ct, &keys.relin).map(drop))?;
            g.emit(&json!({
                "preset": params.name(),
                "degree": params.degree(),
                "modulus_bits": params.modulus().bits(),
                "reps": reps,
                "seconds": {
                    "keygen": t_keygen,
                    "encrypt": t_enc,
                    "decrypt": t_dec,
                    "add": t_add,
                    "mul_plain": t_mul_plain,
                    "mul_relin": t_mul,
                },
            }))?;
        }
    }
    Ok(())
}
