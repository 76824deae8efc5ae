//! Command-line front end: stream generation, chaos analysis, kernel grid
//! simulation, the statistical battery, throughput probes and the
//! Blum-Goldwasser tools.
//!
//! Every subcommand is deterministic given `--seed`; there is no silent
//! entropy source. Exit codes: 0 success, 1 domain/data error, 2 usage
//! error.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ciprng::{
    bg, BbsGrid, BbsGridConfig, BgCiphertext, BgKeyPair, BitBuffer, BooleanFunction, CiSequential,
    EmitFormat, GridConfig, ImprovedGrid, NaiveGrid, SeedExpander, Word32Source, Xor128, XorShift32,
    XorShift64, XorWow,
};

#[derive(Parser)]
#[command(name = "ciprng", version, about = "Chaotic-iterations PRNG toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit words from a sequential generator.
    Gen(GenArgs),
    /// Chaos report for a Boolean function table file.
    Analyze(AnalyzeArgs),
    /// Run a kernel grid simulation and emit its output block.
    Kernel(KernelArgs),
    /// Run the internal statistical battery over a generator stream.
    Battery(BatteryArgs),
    /// Measure generator throughput.
    Bench(BenchArgs),
    /// Blum-Goldwasser key generation, encryption and decryption.
    #[command(subcommand)]
    Bg(BgCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum GeneratorId {
    Xorshift32,
    Xorshift64,
    Xor128,
    Xorwow,
    CiSeq,
}

impl GeneratorId {
    fn name(self) -> &'static str {
        match self {
            Self::Xorshift32 => "xorshift32",
            Self::Xorshift64 => "xorshift64",
            Self::Xor128 => "xor128",
            Self::Xorwow => "xorwow",
            Self::CiSeq => "ci-seq",
        }
    }
}

/// All generators are seeded through the deterministic seed expander, each
/// with its documented register draw order.
fn make_generator(id: GeneratorId, seed: u64) -> Box<dyn Word32Source> {
    let mut exp = SeedExpander::new(seed);
    match id {
        GeneratorId::Xorshift32 => Box::new(XorShift32::new(exp.next_nonzero_u32()).unwrap()),
        GeneratorId::Xorshift64 => Box::new(XorShift64::new(exp.next_nonzero_u64()).unwrap()),
        GeneratorId::Xor128 => Box::new(
            Xor128::new([
                exp.next_nonzero_u64(),
                exp.next_u64(),
                exp.next_u64(),
                exp.next_u64(),
            ])
            .unwrap(),
        ),
        GeneratorId::Xorwow => Box::new(
            XorWow::new([
                exp.next_nonzero_u64(),
                exp.next_u64(),
                exp.next_u64(),
                exp.next_u64(),
                exp.next_u64(),
                exp.next_u64(),
            ])
            .unwrap(),
        ),
        GeneratorId::CiSeq => Box::new(CiSequential::seed_from_expander(&mut exp)),
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    generator: GeneratorId,
    /// 64-bit master seed.
    #[arg(long)]
    seed: u64,
    /// Number of 32-bit words to emit.
    #[arg(long)]
    count: u64,
    /// raw-le32 | hex | bits
    #[arg(long, default_value = "raw-le32")]
    format: String,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Boolean-function table file: first line n, then 2^n hex values.
    fn_file: PathBuf,
    /// Number of matrix powers averaged for the uniformity figure.
    #[arg(long, default_value_t = 64)]
    cesaro_k: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelKind {
    Naive,
    Improved,
    Bbs,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, value_enum)]
    kind: KernelKind,
    #[arg(long)]
    seed: u64,
    /// Logical grid threads.
    #[arg(long)]
    threads: usize,
    /// Outputs per thread (rounds).
    #[arg(long)]
    count: usize,
    /// Combination block size for the improved and bbs kernels.
    #[arg(long, default_value_t = 2)]
    comb_size: usize,
    /// Combination arrays, one line of indices per array (2 lines for
    /// improved, 16 for bbs). Defaults to the documented block layouts.
    #[arg(long)]
    comb_file: Option<PathBuf>,
    #[arg(long, default_value = "raw-le32")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BatteryArgs {
    #[arg(long, value_enum)]
    generator: GeneratorId,
    #[arg(long)]
    seed: u64,
    /// Stream length in bits (>= 10^6).
    #[arg(long)]
    count: u64,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    generator: GeneratorId,
    #[arg(long)]
    seed: u64,
    /// Measurement window in whole seconds (>= 1).
    #[arg(long, default_value_t = 1)]
    seconds: u64,
}

#[derive(Subcommand)]
enum BgCommand {
    /// Generate a key pair and write <out>.pub / <out>.sec.
    Keygen {
        #[arg(long)]
        seed: u64,
        /// Also draw the public mask word S0 (block-variant keys).
        #[arg(long)]
        chaotic: bool,
        /// Base path for the two key files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt a bit string under a public key file.
    Encrypt {
        /// Public key file (N, optionally S0).
        #[arg(long)]
        key: PathBuf,
        /// Plaintext bits, e.g. 10110.
        #[arg(long)]
        message: String,
        /// Explicit random value r coprime to N. Drawn from --seed when omitted.
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Use the cumulative-keystream block variant (requires S0 in the key).
        #[arg(long)]
        chaotic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decrypt a ciphertext file under a secret key file.
    Decrypt {
        /// Secret key file (p, q, optionally S0).
        #[arg(long)]
        key: PathBuf,
        /// Ciphertext file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long)]
        chaotic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse(); // clap exits with 2 on usage errors
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gen(args) => gen(args),
        Command::Analyze(args) => analyze(args),
        Command::Kernel(args) => kernel(args),
        Command::Battery(args) => battery(args),
        Command::Bench(args) => bench(args),
        Command::Bg(cmd) => bg_command(cmd),
    }
}

/// Worker cap: CIPRNG_THREADS when set, otherwise the available parallelism.
fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var("CIPRNG_THREADS") {
        Ok(v) => v.parse::<usize>().map_or(available, |n| n.clamp(1, 1024)),
        Err(_) => available,
    }
}

fn write_output(out: Option<PathBuf>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?
        }
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn gen(args: GenArgs) -> anyhow::Result<()> {
    let format: EmitFormat = args.format.parse()?;
    let mut generator = make_generator(args.generator, args.seed);
    let mut bytes = Vec::new();
    ciprng::emit(generator.as_mut(), args.count, format, &mut bytes)?;
    write_output(args.out, &bytes)
}

fn analyze(args: AnalyzeArgs) -> anyhow::Result<()> {
    let f = BooleanFunction::from_file(&args.fn_file)
        .with_context(|| format!("reading {}", args.fn_file.display()))?;
    let report = ciprng::analyze(&f, args.cesaro_k)?;
    let json = serde_json::to_string_pretty(&report)?;
    write_output(args.out, format!("{json}\n").as_bytes())
}

fn parse_comb_file(path: &PathBuf, expected_rows: usize) -> anyhow::Result<Vec<Vec<usize>>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rows: Vec<Vec<usize>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|line| {
            line.split_whitespace()
                .map(|tok| tok.parse::<usize>().map_err(|e| anyhow!("bad index {tok:?}: {e}")))
                .collect()
        })
        .collect::<anyhow::Result<_>>()?;
    if rows.len() != expected_rows {
        bail!("expected {expected_rows} combination rows, found {}", rows.len());
    }
    Ok(rows)
}

fn kernel(args: KernelArgs) -> anyhow::Result<()> {
    let format: EmitFormat = args.format.parse()?;
    let workers = worker_count();
    let words = match args.kind {
        KernelKind::Naive => NaiveGrid::new(args.seed, args.threads)?.run(args.count, workers),
        KernelKind::Improved => {
            let config = match &args.comb_file {
                Some(path) => {
                    let rows = parse_comb_file(path, 2)?;
                    GridConfig::new(args.threads, rows[0].clone(), rows[1].clone())?
                }
                None => GridConfig::with_default_combs(args.threads, args.comb_size)?,
            };
            ImprovedGrid::new(args.seed, config)?.run(args.count, workers)
        }
        KernelKind::Bbs => {
            let config = match &args.comb_file {
                Some(path) => BbsGridConfig::new(args.threads, parse_comb_file(path, 16)?)?,
                None => BbsGridConfig::with_default_combs(args.threads, args.comb_size)?,
            };
            BbsGrid::new(config, args.seed)?.run(args.count, workers)
        }
    };
    let mut replay = Buffered(words, 0);
    let mut bytes = Vec::new();
    let count = replay.0.len() as u64;
    ciprng::emit(&mut replay, count, format, &mut bytes)?;
    write_output(args.out, &bytes)
}

struct Buffered(Vec<u32>, usize);

impl Word32Source for Buffered {
    fn next_word(&mut self) -> u32 {
        let w = self.0[self.1];
        self.1 += 1;
        w
    }
}

fn battery(args: BatteryArgs) -> anyhow::Result<()> {
    let words = args.count.div_ceil(32);
    let mut generator = make_generator(args.generator, args.seed);
    let stream = BitBuffer::from_source(generator.as_mut(), words as usize);
    let reports = ciprng::run_battery(&stream, args.alpha)?;
    let all_pass = reports.iter().all(|r| r.pass);
    let doc = serde_json::json!({
        "generator": args.generator.name(),
        "bits": words * 32,
        "alpha": args.alpha,
        "all_pass": all_pass,
        "reports": reports,
    });
    write_output(args.out, format!("{}\n", serde_json::to_string_pretty(&doc)?).as_bytes())
}

fn bench(args: BenchArgs) -> anyhow::Result<()> {
    let mut generator = make_generator(args.generator, args.seed);
    let report = ciprng::benchmark(
        generator.as_mut(),
        args.generator.name(),
        Duration::from_secs(args.seconds),
    )?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn parse_bits(s: &str) -> anyhow::Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => bail!("message must be a bit string, found {other:?}"),
        })
        .collect()
}

fn bg_command(cmd: BgCommand) -> anyhow::Result<()> {
    match cmd {
        BgCommand::Keygen { seed, chaotic, out } => {
            let mut rng = XorShift32::new(SeedExpander::new(seed).next_nonzero_u32())?;
            let pair = BgKeyPair::generate(&mut rng, chaotic)?;
            let pub_path = out.with_extension("pub");
            let sec_path = out.with_extension("sec");
            fs::write(&pub_path, pair.public_text())?;
            fs::write(&sec_path, pair.secret_text())?;
            println!("{}", pub_path.display());
            println!("{}", sec_path.display());
            Ok(())
        }
        BgCommand::Encrypt { key, message, r, seed, chaotic, out } => {
            let public = bg::BgPublicKey::from_text(
                &fs::read_to_string(&key).with_context(|| format!("reading {}", key.display()))?,
            )?;
            let bits = parse_bits(&message)?;
            let r = match (r, seed) {
                (Some(r), _) => r,
                (None, Some(seed)) => draw_r(public.n, seed),
                (None, None) => bail!("encrypt needs --r or --seed"),
            };
            let ct = if chaotic {
                let s0 = public
                    .s0
                    .ok_or_else(|| anyhow!("public key has no S0; generate with --chaotic"))?;
                let nu = bg::block_bits(public.n)?;
                let blocks = bg::bits_to_blocks(&bits, nu)?;
                bg::cbg_encrypt(public.n, s0, &blocks, r)?
            } else {
                bg::bg_encrypt(public.n, &bits, r)?
            };
            write_output(out, ct.to_text().as_bytes())
        }
        BgCommand::Decrypt { key, input, chaotic, out } => {
            let pair = BgKeyPair::from_secret_text(
                &fs::read_to_string(&key).with_context(|| format!("reading {}", key.display()))?,
            )?;
            let ct = BgCiphertext::from_text(
                &fs::read_to_string(&input)
                    .with_context(|| format!("reading {}", input.display()))?,
            )?;
            let bits = if chaotic {
                let s0 = pair.s0.ok_or_else(|| anyhow!("secret key has no S0"))?;
                let blocks = bg::cbg_decrypt(pair.p, pair.q, s0, &ct)?;
                bg::blocks_to_bits(&blocks, ct.unit_bits)
            } else {
                bg::bg_decrypt(pair.p, pair.q, &ct)?
            };
            let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
            write_output(out, format!("{text}\n").as_bytes())
        }
    }
}

/// Deterministic r from a master seed: rejection into [1, N] coprime to N.
fn draw_r(n: u64, seed: u64) -> u64 {
    let mut exp = SeedExpander::new(seed);
    loop {
        let r = 1 + exp.next_below(n);
        if gcd(r, n) == 1 {
            return r;
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
