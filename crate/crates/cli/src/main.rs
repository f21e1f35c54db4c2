//! `teig`: conductive transmission eigenvalues from the command line.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};
use teig_core::Error;

use config::Settings;
use output::{Format, Table};

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

fn subcommand(name: &'static str, about: &'static str) -> Command {
    let mut cmd = Command::new(name)
        .about(about)
        .arg(Arg::new("config").long("config").value_name("FILE").help("key=value config file; flags override it"))
        .arg(Arg::new("out").long("out").value_name("PATH").help("write output here instead of stdout"))
        .arg(Arg::new("json").long("json").action(ArgAction::SetTrue).help("JSON instead of CSV"))
        .arg(
            Arg::new("paper-format")
                .long("paper-format")
                .action(ArgAction::SetTrue)
                .help("round eigenvalue and EOC columns to 4 decimals"),
        );
    for (key, help) in commands::KEYS {
        cmd = cmd.arg(Arg::new(*key).long(*key).value_name("VALUE").help(*help).allow_hyphen_values(true));
    }
    cmd
}

fn cli() -> Command {
    Command::new("teig")
        .about("Conductive interior transmission eigenvalues by boundary integrals and Bessel oracles")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(subcommand("eig", "eigenvalues by the BIE solver or a disk oracle"))
        .subcommand(subcommand("sweep", "track eigenvalues over a geometric conductivity sweep"))
        .subcommand(subcommand("invert", "estimate the refractive index from a first eigenvalue"))
        .subcommand(subcommand("validate", "compare BIE and oracle eigenvalues on a disk"))
        .subcommand(subcommand("oracle", "direct oracle queries"))
}

fn settings(m: &ArgMatches) -> Result<Settings, Error> {
    let mut given = match m.get_one::<String>("config") {
        Some(path) => Settings::parse_file(&PathBuf::from(path))?,
        None => Default::default(),
    };
    given = given.into_iter().map(|(k, v)| (k.replace('_', "-"), v)).collect();
    for (key, _) in commands::KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            given.insert(key.to_string(), v.clone());
        }
    }
    let mut s = Settings::new(given);
    if let Some(bad) = s.given_keys().find(|k| !commands::is_known(k)) {
        return Err(Error::Config(format!("unknown setting `{bad}`")));
    }
    commands::expand_curve(&mut s)?;
    Ok(s)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Geometry(_) => EXIT_CONFIG,
        _ => EXIT_SOLVER,
    }
}

fn init_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("TEIG_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("TEIG_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn emit(name: &str, m: &ArgMatches, s: &Settings, table: &Table) -> Result<(), Error> {
    let fmt = Format {
        json: m.get_flag("json"),
        paper: m.get_flag("paper-format"),
    };
    let bytes = output::render(name, &s.echo(), table, &fmt).map_err(|e| Error::Config(format!("output: {e}")))?;
    match m.get_one::<String>("out") {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Error::Config(format!("cannot write {path}: {e}"))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| Error::Config(format!("stdout: {e}")))
        }
    }
}

fn run(name: &str, m: &ArgMatches) -> Result<u8, Error> {
    init_threads()?;
    let s = settings(m)?;
    let table = match name {
        "eig" => commands::eig(&s)?,
        "sweep" => commands::sweep(&s)?,
        "invert" => commands::invert(&s)?,
        "oracle" => commands::oracle(&s)?,
        "validate" => {
            let (table, ok, msg) = commands::validate(&s)?;
            emit(name, m, &s, &table)?;
            eprintln!("{msg}");
            return Ok(if ok { 0 } else { EXIT_VALIDATION });
        }
        _ => unreachable!("clap rejects unknown subcommands"),
    };
    emit(name, m, &s, &table)?;
    Ok(0)
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    match run(name, sub) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
