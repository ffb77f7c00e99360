//! `drw`: exact arithmetic for truncated de Rham-Witt complexes of
//! Laurent towers: normal forms, ramification filtration, the Cartier
//! operator, and Swan/refined-Swan conductors of Artin-Schreier-Witt
//! characters.

use clap::{Args, Parser, Subcommand};
use drw_cli::commands::{self, CmdError, MathCtx, VerifyArgs};
use drw_cli::{EXIT_MATH, EXIT_OK, EXIT_USAGE};
use std::collections::BTreeMap;

#[derive(Parser)]
#[command(name = "drw", version, about, max_term_width = 100)]
struct Cli {
    #[command(flatten)]
    ctx: CtxArgs,
    /// Read context defaults from a key=value file (flags take precedence)
    #[arg(long, global = true)]
    config: Option<String>,
    /// Pretty text output instead of JSON
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CtxArgs {
    /// Characteristic (2, 3, 5 or 7)
    #[arg(short = 'p', long = "prime", global = true)]
    p: Option<u8>,
    /// Extension degree of the coefficient field F_{p^r}
    #[arg(short = 'r', long = "power", global = true)]
    r: Option<u8>,
    /// Number of Laurent variables (0..=2)
    #[arg(long, global = true)]
    depth: Option<u8>,
    /// Witt length m
    #[arg(short = 'm', long = "length", global = true)]
    m: Option<u8>,
}

#[derive(Subcommand)]
enum Command {
    /// Witt-coordinate view of degree-0 expressions
    Witt {
        #[command(subcommand)]
        sub: WittCmd,
    },
    /// Evaluate expressions to normal forms
    Drw {
        #[command(subcommand)]
        sub: DrwCmd,
    },
    /// Filtration levels, membership and graded pieces
    Fil {
        #[command(subcommand)]
        sub: FilCmd,
    },
    /// Cartier operator and the higher Z/B groups
    Cartier {
        #[command(subcommand)]
        sub: CartierCmd,
    },
    /// Swan conductor of a character
    Swan(InputArgs),
    /// Refined Swan conductor of a wild character
    Rsw(InputArgs),
    /// Run a registered verification suite
    Verify {
        /// Suite name (see `verify --suite help`)
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: u32,
        /// Exponent window for sampled supports
        #[arg(long = "max-exp", default_value_t = 12)]
        max_exp: i64,
        /// Include p = 2 grid points (experimental)
        #[arg(long = "experimental-p2")]
        experimental_p2: bool,
        /// Inject a registered mutation (meta-testing)
        #[arg(long)]
        mutate: Option<String>,
        /// Report wall time (breaks byte-for-byte determinism)
        #[arg(long)]
        timing: bool,
    },
    /// Emit the universal Witt polynomial table
    GenPolys {
        /// Output format (only json)
        #[arg(long, default_value = "json")]
        format: String,
    },
}

#[derive(Subcommand)]
enum WittCmd {
    /// Evaluate a degree-0 expression to Witt coordinates
    Eval { expr: String },
}

#[derive(Subcommand)]
enum DrwCmd {
    /// Evaluate an expression to a normal form
    Eval { expr: String },
}

#[derive(Args)]
struct InputArgs {
    /// Expression for the representative
    #[arg(long, conflicts_with = "input")]
    expr: Option<String>,
    /// JSON file with a form or Witt vector
    #[arg(long)]
    input: Option<String>,
}

#[derive(Subcommand)]
enum FilCmd {
    /// Minimal n with the element in fil_n
    Level {
        #[command(flatten)]
        input: InputArgs,
        /// Report the (outer, inner) multi-level (m = 1, depth 2)
        #[arg(long)]
        multi: bool,
    },
    /// Membership in fil_n (comma-separated multi-index allowed)
    Member {
        #[command(flatten)]
        input: InputArgs,
        #[arg(short = 'n', long, value_delimiter = ',', required = true)]
        n: Vec<i64>,
    },
    /// Shape of the graded piece gr_n
    Gr {
        #[arg(short = 'n', long)]
        n: i64,
        /// Form degree q
        #[arg(short = 'q', long, default_value_t = 0)]
        q: u8,
    },
}

#[derive(Subcommand)]
enum CartierCmd {
    /// Apply the Cartier operator (requires a Z_1 argument)
    Apply {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Test membership in Z_1, optionally inside fil_n
    Z1 {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Membership flags for Z_i and B_i (m = 1)
    Zb {
        #[command(flatten)]
        input: InputArgs,
        #[arg(short = 'i', long, default_value_t = 1)]
        i: u8,
    },
}

fn load_config(path: &str) -> Result<BTreeMap<String, String>, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::Usage(format!("cannot read config {path}: {e}")))?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CmdError::Usage(format!("{path}:{}: expected key=value", lineno + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn resolve_ctx(args: &CtxArgs, config: &Option<String>) -> Result<MathCtx, CmdError> {
    let cfg = match config {
        Some(path) => load_config(path)?,
        None => BTreeMap::new(),
    };
    let get = |flag: Option<u8>, key: &str| -> Result<Option<u8>, CmdError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match cfg.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<u8>()
                .map(Some)
                .map_err(|_| CmdError::Usage(format!("config key {key} must be an integer"))),
        }
    };
    let p = get(args.p, "p")?
        .ok_or_else(|| CmdError::Usage("the prime p is required (-p or config)".into()))?;
    let r = get(args.r, "r")?.unwrap_or(1);
    let depth = get(args.depth, "depth")?.unwrap_or(1);
    let m = get(args.m, "m")?.unwrap_or(1);
    MathCtx::new(p, r, depth, m)
}

fn run(cli: Cli) -> Result<(String, i32), CmdError> {
    match cli.command {
        Command::Witt { sub } => {
            let ctx = resolve_ctx(&cli.ctx, &cli.config)?;
            match sub {
                WittCmd::Eval { expr } => {
                    Ok((commands::cmd_witt_eval(&ctx, &expr, cli.pretty)?, EXIT_OK))
                }
            }
        }
        Command::Drw { sub } => {
            let ctx = resolve_ctx(&cli.ctx, &cli.config)?;
            match sub {
                DrwCmd::Eval { expr } => {
                    Ok((commands::cmd_drw_eval(&ctx, &expr, cli.pretty)?, EXIT_OK))
                }
            }
        }
        Command::Fil { sub } => {
            let ctx = resolve_ctx(&cli.ctx, &cli.config)?;
            match sub {
                FilCmd::Level { input, multi } => Ok((
                    commands::cmd_fil_level(
                        &ctx,
                        input.expr.as_deref(),
                        input.input.as_deref(),
                        multi,
                        cli.pretty,
                    )?,
                    EXIT_OK,
                )),
                FilCmd::Member { input, n } => Ok((
                    commands::cmd_fil_member(
                        &ctx,
                        input.expr.as_deref(),
                        input.input.as_deref(),
                        &n,
                        cli.pretty,
                    )?,
                    EXIT_OK,
                )),
                FilCmd::Gr { n, q } => {
                    Ok((commands::cmd_fil_gr(&ctx, n, q, cli.pretty)?, EXIT_OK))
                }
            }
        }
        Command::Cartier { sub } => {
            let ctx = resolve_ctx(&cli.ctx, &cli.config)?;
            match sub {
                CartierCmd::Apply { input } => Ok((
                    commands::cmd_cartier_apply(
                        &ctx,
                        input.expr.as_deref(),
                        input.input.as_deref(),
                        cli.pretty,
                    )?,
                    EXIT_OK,
                )),
                CartierCmd::Z1 { input, bound } => Ok((
                    commands::cmd_cartier_z1(
                        &ctx,
                        input.expr.as_deref(),
                        input.input.as_deref(),
                        bound,
                        cli.pretty,
                    )?,
                    EXIT_OK,
                )),
                CartierCmd::Zb { input, i } => Ok((
                    commands::cmd_cartier_zb(
                        &ctx,
                        input.expr.as_deref(),
                        input.input.as_deref(),
                        i,
                        cli.pretty,
                    )?,
                    EXIT_OK,
                )),
            }
        }
        Command::Swan(input) => {
            let ctx = resolve_ctx(&cli.ctx, &cli.config)?;
            Ok((
                commands::cmd_swan(&ctx, input.expr.as_deref(), input.input.as_deref(), cli.pretty)?,
                EXIT_OK,
            ))
        }
        Command::Rsw(input) => {
            let ctx = resolve_ctx(&cli.ctx, &cli.config)?;
            Ok((
                commands::cmd_rsw(&ctx, input.expr.as_deref(), input.input.as_deref(), cli.pretty)?,
                EXIT_OK,
            ))
        }
        Command::Verify { suite, seed, samples, max_exp, experimental_p2, mutate, timing } => {
            let (report, ok) = commands::cmd_verify(&VerifyArgs {
                suite,
                seed,
                samples,
                max_exp,
                experimental_p2,
                mutate,
                timing,
            })?;
            Ok((report, if ok { EXIT_OK } else { EXIT_MATH }))
        }
        Command::GenPolys { format } => {
            if format != "json" {
                return Err(CmdError::Usage(format!("unsupported format '{format}'")));
            }
            let ctx = resolve_ctx(&cli.ctx, &cli.config)?;
            Ok((commands::cmd_gen_polys(ctx.tower.spec.p, ctx.m)?, EXIT_OK))
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok((output, code)) => {
            println!("{output}");
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("{e}");
            let code = match e {
                CmdError::Math { .. } => EXIT_MATH,
                CmdError::Usage(_) => EXIT_USAGE,
            };
            std::process::exit(code);
        }
    }
}
