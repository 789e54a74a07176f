use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use strata::bie::{Assembly, Options};
use strata::fields::Incident;
use strata::harness::checks::{describe_incident, oracle_pattern, parse_incident, solution_pattern};
use strata::harness::suite::CONVERGENCE_HEADER;
use strata::harness::{
    convergence_table, farfield_distance, load_scene, run_checks, scene_hash, CheckKind, DirectionGrid,
    FarFieldPattern, PatternMeta,
};
use strata::media::Scene;
use strata::Error;

/// Electromagnetic scattering by an obstacle inside a layered background.
#[derive(Parser)]
#[command(name = "strata", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the boundary integral system and write the far-field pattern.
    Solve {
        scene: PathBuf,
        /// `plane:dx,dy,dz:qx,qy,qz` or `dipole:outer|inner:zx,zy,zz:px,py,pz`.
        #[arg(long)]
        incident: String,
        #[arg(long)]
        out: PathBuf,
        /// Polar nodes of the output direction grid.
        #[arg(long, default_value_t = 16)]
        grid: usize,
        /// Override the quadrature order of the scene file.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Far-field pattern of the series solution (concentric spheres only).
    Oracle {
        scene: PathBuf,
        #[arg(long)]
        incident: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 16)]
        grid: usize,
    },
    /// Relative L2 distance between two far-field files.
    Distance { a: PathBuf, b: PathBuf },
    /// Run the identity checks and print a verification report.
    Verify {
        scene: PathBuf,
        /// Comma-separated subset of checks.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Residuals and far-field errors over several quadrature orders.
    Converge {
        scene: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "12,16,24")]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the quadrature nodes of both surfaces as CSV.
    GeometryDump {
        scene: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Checks,
    Runtime(anyhow::Error),
}

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Runtime(e.into())
}

fn scene(path: &Path, order: Option<usize>) -> Result<Scene<f64>, Failure> {
    let s = load_scene(path).with_context(|| format!("reading scene {}", path.display())).map_err(usage)?;
    Ok(match order {
        Some(o) => s.with_order(o),
        None => s,
    })
}

fn incident(spec: &str) -> Result<Incident<f64>, Failure> {
    parse_incident(spec).map_err(usage)
}

fn write_pattern(p: &FarFieldPattern, out: &Path) -> Result<(), Failure> {
    let f = File::create(out).with_context(|| format!("creating {}", out.display())).map_err(runtime)?;
    let mut w = BufWriter::new(f);
    p.write_csv(&mut w).map_err(runtime)?;
    w.flush().map_err(runtime)
}

fn read_pattern(path: &Path) -> Result<FarFieldPattern, Failure> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display())).map_err(usage)?;
    FarFieldPattern::read_csv(BufReader::new(f)).with_context(|| format!("reading {}", path.display())).map_err(usage)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { scene: path, incident: spec, out, grid, order } => {
            let scene = scene(&path, order)?;
            let inc = incident(&spec)?;
            let disc = scene.discretize().map_err(usage)?;
            let asm = Assembly::new(disc, Options::default()).map_err(runtime)?;
            let sol = asm.solve_incident(&inc).map_err(runtime)?;
            for w in &sol.diagnostics.warnings {
                eprintln!("warning: {w}");
            }
            let meta = PatternMeta { scene_hash: scene_hash(&scene), incidence: describe_incident(&inc), order: scene.order, source: "bie".into() };
            let p = solution_pattern(&sol, DirectionGrid::new(grid).map_err(usage)?, meta).map_err(runtime)?;
            write_pattern(&p, &out)?;
            let d = &sol.diagnostics;
            eprintln!(
                "solved: unknowns={} condition={:.3e} residual={:.3e} assembly_s={:.2} factor_s={:.2}",
                d.unknowns, d.condition, d.residual, d.assembly_seconds, d.factor_seconds
            );
        }
        Command::Oracle { scene: path, incident: spec, out, grid } => {
            let scene = scene(&path, None)?;
            let Incident::PlaneWave { direction, polarization } = incident(&spec)? else {
                return Err(usage(anyhow::anyhow!("the oracle supports plane-wave incidence only")));
            };
            let inc = Incident::PlaneWave { direction, polarization };
            let meta = PatternMeta { scene_hash: scene_hash(&scene), incidence: describe_incident(&inc), order: 0, source: "series".into() };
            let grid = DirectionGrid::new(grid).map_err(usage)?;
            let p = oracle_pattern(&scene, direction, polarization, grid, meta).map_err(|e| match e {
                Error::OracleUnsupported(_) => usage(e),
                e => runtime(e),
            })?;
            write_pattern(&p, &out)?;
        }
        Command::Distance { a, b } => {
            let (pa, pb) = (read_pattern(&a)?, read_pattern(&b)?);
            let d = farfield_distance(&pa, &pb).map_err(usage)?;
            println!("{d:.6e}");
        }
        Command::Verify { scene: path, checks, seed, order } => {
            let scene = scene(&path, order)?;
            let kinds = match checks {
                Some(list) => Some(list.iter().map(|s| s.trim().parse::<CheckKind>()).collect::<Result<Vec<_>, _>>().map_err(usage)?),
                None => None,
            };
            scene.discretize().map_err(usage)?;
            let report = run_checks(&scene, kinds.as_deref(), seed).map_err(runtime)?;
            println!("{report}");
            if !report.passed() {
                return Err(Failure::Checks);
            }
        }
        Command::Converge { scene: path, orders, seed } => {
            let scene = scene(&path, None)?;
            if orders.is_empty() {
                return Err(usage(anyhow::anyhow!("at least one order is required")));
            }
            scene.with_order(orders[0]).discretize().map_err(usage)?;
            let rows = convergence_table(&scene, &orders, seed).map_err(runtime)?;
            println!("{CONVERGENCE_HEADER}");
            for r in rows {
                println!("{r}");
            }
        }
        Command::GeometryDump { scene: path, out } => {
            let scene = scene(&path, None)?;
            let disc = scene.discretize().map_err(usage)?;
            let sink: Box<dyn Write> = match &out {
                Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display())).map_err(runtime)?),
                None => Box::new(io::stdout().lock()),
            };
            let mut w = BufWriter::new(sink);
            dump(&mut w, &disc).map_err(runtime)?;
        }
    }
    Ok(())
}

fn dump<W: Write>(w: &mut W, disc: &strata::media::DiscreteScene<f64>) -> Result<()> {
    writeln!(w, "surface,index,x,y,z,nx,ny,nz,weight,boundary")?;
    let mut label = vec![""; disc.s1.len()];
    for &n in &disc.gamma1 {
        label[n] = "conducting";
    }
    for &n in &disc.gamma2 {
        label[n] = "impedance";
    }
    for (name, s) in [("interface", &disc.s0), ("obstacle", &disc.s1)] {
        for n in 0..s.len() {
            let (x, nu) = (s.points[n], s.normals[n]);
            let b = if name == "interface" { "transmission" } else { label[n] };
            writeln!(w, "{name},{n},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{b}", x[0], x[1], x[2], nu[0], nu[1], nu[2], s.weights[n])?;
        }
    }
    if disc.s1.is_empty() {
        bail!("empty obstacle grid");
    }
    w.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
