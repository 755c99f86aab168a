use std::io::Read;
use std::process::ExitCode;

use biext_cli::{CliError, CliResult, Outcome, RunConfig};
use biext_core::Caps;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "biext-witt", version, about = "Metric groups of skew isogenies: Witt classes and Gauss sums")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Emit JSON (the default).
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,
    /// Emit a plain-text table where the command has one.
    #[arg(long, global = true)]
    table: bool,
}

#[derive(Args, Clone, Copy)]
struct CapArgs {
    /// Largest splitting field searched, as a multiple of the coefficient degree.
    #[arg(long, default_value_t = 64)]
    max_ext: usize,
    /// Largest group on which subgroups are enumerated.
    #[arg(long, default_value_t = 4096)]
    enum_cap: usize,
    /// Largest group on which isomorphisms are searched.
    #[arg(long, default_value_t = 1024)]
    iso_cap: usize,
}

impl CapArgs {
    fn caps(self) -> Caps {
        Caps {
            max_ext: self.max_ext,
            enum_cap: self.enum_cap,
            iso_cap: self.iso_cap,
            ..Caps::default()
        }
    }
}

#[derive(Args, Clone, Copy)]
struct CampaignArgs {
    #[arg(long, default_value_t = 3)]
    p: u32,
    /// Coefficients lie in F_{p^m}.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Largest tau-degree drawn.
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Matrix dimension.
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 25)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    caps: CapArgs,
}

impl CampaignArgs {
    fn config(self) -> RunConfig {
        RunConfig {
            p: self.p,
            m: self.m,
            n: self.n,
            d: self.d,
            trials: self.trials,
            seed: self.seed,
            caps: self.caps.caps(),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run f = tau - tau^-1 end to end and check the trace and norm forms.
    Example {
        #[arg(long, default_value_t = 3)]
        p: u32,
    },
    /// Random campaign: even kernel order, Witt class by parity of d.
    VerifyTheorem1(CampaignArgs),
    /// Random campaign: Gauss sum equals (-1)^d p^(log_p|A|/2).
    VerifyGauss(CampaignArgs),
    /// Kernel of an isogeny (JSON file, or - for stdin).
    Kernel {
        input: String,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Full report for a skew isogeny: q on the kernel, Witt class, Gauss sum.
    Model {
        input: String,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Quotient of a skew isogeny by an isotropic subspace of its kernel.
    Descend { f: String, l: String },
    /// Pull a skew isogeny back along a diagonal isogeny.
    Pullback { f: String, phi: String },
    /// Witt class of a metric group.
    Witt {
        input: String,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Exact Gauss sum of a metric group.
    Gauss { input: String },
    /// Emit the norm-form group on F_{p^2}.
    NormForm {
        #[arg(long, default_value_t = 3)]
        p: u32,
    },
    /// Emit the hyperbolic plane Z/p + Z/p.
    Hyperbolic {
        #[arg(long, default_value_t = 3)]
        p: u32,
    },
    /// Emit the random instance a campaign draws for --seed.
    Random(CampaignArgs),
}

fn read_input(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))
    }
}

fn dispatch(cmd: Cmd) -> CliResult<Outcome> {
    match cmd {
        Cmd::Example { p } => biext_cli::example(p, &Caps::default()),
        Cmd::VerifyTheorem1(a) => biext_cli::verify_theorem1(&a.config()),
        Cmd::VerifyGauss(a) => biext_cli::verify_gauss(&a.config()),
        Cmd::Kernel { input, caps } => biext_cli::kernel(&read_input(&input)?, &caps.caps()),
        Cmd::Model { input, caps } => biext_cli::model(&read_input(&input)?, &caps.caps()),
        Cmd::Descend { f, l } => biext_cli::descend_cmd(&read_input(&f)?, &read_input(&l)?),
        Cmd::Pullback { f, phi } => biext_cli::pullback_cmd(&read_input(&f)?, &read_input(&phi)?),
        Cmd::Witt { input, caps } => biext_cli::witt(&read_input(&input)?, &caps.caps()),
        Cmd::Gauss { input } => biext_cli::gauss(&read_input(&input)?, &Caps::default()),
        Cmd::NormForm { p } => biext_cli::norm_form(p),
        Cmd::Hyperbolic { p } => biext_cli::hyperbolic(p),
        Cmd::Random(a) => biext_cli::random(&a.config()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(out) => {
            match (&out.table, cli.table) {
                (Some(t), true) => print!("{t}"),
                _ => println!("{}", serde_json::to_string_pretty(&out.value).expect("serializable")),
            }
            ExitCode::from(out.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("biext-witt: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
