use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use koszul_core::cli::{render_text, run, Command, Format, Model, RunConfig};

#[derive(Parser)]
#[command(name = "koszul", version, about = "Exact checks for differential g-modules and Koszul duality")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Common {
    /// Builtin (su2, sl2, su2xsu2, abelian:N) or algebra JSON file
    #[arg(long, default_value = "su2")]
    algebra: String,
    /// trivial | exterior | forms:<coadjoint|adjoint>:<d> | sym-invariants:<a> | file:PATH, joined by '*'
    #[arg(long, default_value = "trivial")]
    module: String,
    #[arg(long, default_value_t = 8)]
    max_degree: i32,
    #[arg(long, value_enum, default_value_t = Fmt::Json)]
    format: Fmt,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fmt {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Plain,
    Invariant,
    Cartan,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify the algebra and check the K(g) identities on the module
    Validate(Common),
    /// Cohomology of the module, its invariants, or its Cartan model
    Cohomology {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = ModelArg::Plain)]
        model: ModelArg,
    },
    /// Maurer-Cartan residuals, Weil acyclicity and structure maps
    WeilCheck(Common),
    /// Primitive forms and their distinguished transgression
    Transgress {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        corrupt_transgression: bool,
    },
    /// Both legs of the duality zig-zag, checked through max-degree - 1
    Duality {
        #[command(flatten)]
        common: Common,
        /// Replace each ω(ξ) by 1⊗ξ
        #[arg(long)]
        corrupt_transgression: bool,
    },
}

fn config(cmd: Cmd) -> RunConfig {
    let (command, c, model, corrupt) = match cmd {
        Cmd::Validate(c) => (Command::Validate, c, ModelArg::Plain, false),
        Cmd::Cohomology { common, model } => (Command::Cohomology, common, model, false),
        Cmd::WeilCheck(c) => (Command::WeilCheck, c, ModelArg::Plain, false),
        Cmd::Transgress { common, corrupt_transgression } => {
            (Command::Transgress, common, ModelArg::Plain, corrupt_transgression)
        }
        Cmd::Duality { common, corrupt_transgression } => {
            (Command::Duality, common, ModelArg::Plain, corrupt_transgression)
        }
    };
    let mut cfg = RunConfig::new(command, &c.algebra, &c.module, c.max_degree);
    cfg.format = match c.format {
        Fmt::Json => Format::Json,
        Fmt::Text => Format::Text,
    };
    cfg.model = match model {
        ModelArg::Plain => Model::Plain,
        ModelArg::Invariant => Model::Invariant,
        ModelArg::Cartan => Model::Cartan,
    };
    cfg.corrupt_transgression = corrupt;
    cfg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("KOSZUL_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // fails only if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = config(cli.command);
    match run(&cfg) {
        Ok(env) => {
            match cfg.format {
                Format::Json => println!("{}", env.to_json()),
                Format::Text => print!("{}", render_text(&env)),
            }
            ExitCode::from(env.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("koszul: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
