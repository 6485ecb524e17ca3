use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches, Command};
use desitter::run::run;
use desitter::spec::{ExperimentSpec, ParamValue, Subcommand};
use desitter::Error;

fn help(key: &str) -> &'static str {
    match key {
        "kernel" => "k0, k1 or e",
        "t" => "time, or comma-separated times",
        "z-grid" | "x-grid" | "r-grid" => "lo:hi:n",
        "b" => "source time of E",
        "phi0" | "phi1" | "source" => "gaussian:k, bump[:R], constant-truncated[:R] or zero",
        "n" => "space dimension",
        "case" => "gaussian or bump",
        "k" => "Gaussian exponent",
        "radius" => "support radius of the bump",
        "datum" => "which datum carries the data",
        "nx" => "FD grid points",
        "samples" => "random points per time",
        "seed" => "random seed",
        "estimate" => "line-source, line-lq-lq, line-lp-lq, source or cauchy",
        "bound" => "k1-power, k1-weighted, k0-power, k0-weighted or k0-mass",
        "param" => "ρ or the weight exponent a",
        "abs-tol" | "rel-tol" => "quadrature tolerance",
        _ => "",
    }
}

fn about(cmd: Subcommand) -> &'static str {
    match cmd {
        Subcommand::EvalKernel => "Tabulate K0, K1 or E",
        Subcommand::Solve1d => "Solve the line problem on a grid",
        Subcommand::SolveNd => "Solve the radial problem on R^2 or R^3",
        Subcommand::CompareFd => "Compare the closed form with the finite-difference solver",
        Subcommand::Identities => "Ledger of propagator identities at random points",
        Subcommand::AuditDecay => "Empirical constant of a decay estimate",
        Subcommand::AuditBounds => "Empirical constant of a kernel integral bound",
        Subcommand::Huygens => "Tail of the R^3 solution after the front has passed",
    }
}

fn cli() -> Command {
    let mut app = Command::new("desitter")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Wave equation on de Sitter space: kernels, solvers and audits")
        .arg(Arg::new("config").long("config").value_name("FILE").help("Run a JSON experiment spec instead of a subcommand"))
        .subcommand_negates_reqs(true);
    for cmd in Subcommand::ALL {
        let mut sub = Command::new(cmd.name()).about(about(cmd)).arg(
            Arg::new("out-dir").long("out-dir").value_name("DIR").default_value("out").help("Output directory"),
        );
        for key in cmd.keys() {
            sub = sub.arg(Arg::new(*key).long(*key).value_name("VALUE").allow_hyphen_values(true).action(ArgAction::Set).help(help(key)));
        }
        app = app.subcommand(sub);
    }
    app
}

fn spec_from(matches: &ArgMatches) -> Result<ExperimentSpec, Error> {
    if let Some(path) = matches.get_one::<String>("config") {
        if matches.subcommand().is_some() {
            return Err(Error::validation("--config replaces the subcommand; give one or the other"));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        return ExperimentSpec::from_json(&text);
    }
    let Some((name, sub)) = matches.subcommand() else {
        return Err(Error::validation("no subcommand given (see --help)"));
    };
    let subcommand: Subcommand = name.parse()?;
    let params: BTreeMap<String, ParamValue> = subcommand
        .keys()
        .iter()
        .filter_map(|k| sub.get_one::<String>(k).map(|v| (k.to_string(), ParamValue::Text(v.clone()))))
        .collect();
    let out_dir = PathBuf::from(sub.get_one::<String>("out-dir").expect("defaulted"));
    Ok(ExperimentSpec { subcommand, params, out_dir })
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let result = spec_from(&matches).and_then(|spec| run(&spec));
    match result {
        Ok(out) => {
            println!("{}", out.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
