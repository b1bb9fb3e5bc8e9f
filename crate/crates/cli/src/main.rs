use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod output;
mod params;

use commands::*;

/// Quadratic volume-preserving maps: classification, normal forms and
/// dynamics of the generic family.
#[derive(Parser, Debug)]
#[command(name = "quadvp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the predicate chain on a map file.
    Classify(ClassifyArgs),
    /// Reduce a map of R³ to its normal form.
    NormalForm(NormalFormArgs),
    /// Fixed points, stability and the escape bound.
    FixedPoints(FixedPointsArgs),
    /// Stability diagram in the (τ, α) or (t, s) plane.
    Diagram(DiagramArgs),
    /// Iterate an orbit.
    Iterate(IterateArgs),
    /// Grow 2D stable and unstable manifolds and intersect them.
    Manifold(ManifoldArgs),
    /// Symmetric periodic and heteroclinic orbits of a reversible map.
    Symmetric(SymmetricArgs),
    /// Check the 2ⁿ bound on period-n orbits for a quadratic form.
    PeriodicBound(PeriodicBoundArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.command {
        Command::Classify(a) => classify(a),
        Command::NormalForm(a) => normal_form(a),
        Command::FixedPoints(a) => fixed_points(a),
        Command::Diagram(a) => diagram(a),
        Command::Iterate(a) => iterate(a),
        Command::Manifold(a) => manifold(a),
        Command::Symmetric(a) => symmetric(a),
        Command::PeriodicBound(a) => periodic_bound(a),
    };
    match res {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::PredicateFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
