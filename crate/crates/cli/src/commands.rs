use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hlsloop::dsl::library::{gaussian_graph, identity_graph};
use hlsloop::dsl::KernelGraph;
use hlsloop::matcher::{build_pipeline, match_reference, match_streaming, CostFunction, MatchConfig};
use hlsloop::optimize::{
    optimize, pareto_front, read_design_points, write_design_points, DesignPoint, OptimizeError, OptimizeOptions,
    SearchDirection,
};
use hlsloop::pgm::{load_pgm, store_pgm};
use hlsloop::stream::{lower, simulate, total_latency_seconds, total_latency_with_fill_seconds};
use hlsloop::synth::{Constraints, MockBackend, MockModelParams, ResourceBudget};
use hlsloop::{BoundaryMode, Image};

use crate::error::CliError;
use crate::svg;

#[derive(Debug, Parser)]
#[command(
    name = "hlsloop",
    version,
    about = "Streaming image pipelines, stereo matching and clock tuning"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a disparity map from a rectified stereo pair.
    #[command(args_override_self = true)]
    Match(MatchArgs),
    /// Stream a pipeline through the cycle simulator and report latency.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Search for the shortest clock period that meets the constraints.
    #[command(args_override_self = true)]
    Optimize(OptimizeArgs),
    /// Reduce a design-point CSV to its frequency/resource Pareto front.
    #[command(args_override_self = true)]
    Pareto(ParetoArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cost {
    Sad,
    Census,
}

impl From<Cost> for CostFunction {
    fn from(c: Cost) -> Self {
        match c {
            Cost::Sad => CostFunction::Sad,
            Cost::Census => CostFunction::Census,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Reference,
    Stream,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Pipeline {
    Identity,
    Gaussian,
    Sad,
    Census,
}

impl Pipeline {
    fn name(self) -> String {
        self.to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Boundary {
    Clamp,
    Mirror,
    Repeat,
}

impl From<Boundary> for BoundaryMode {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Clamp => BoundaryMode::Clamp,
            Boundary::Mirror => BoundaryMode::Mirror,
            Boundary::Repeat => BoundaryMode::Repeat,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Search {
    Period,
    Frequency,
}

/// Parses `RxC`, with `x`, `X` or `×` as separator.
fn parse_block(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s
        .split_once(['x', 'X', '×'])
        .ok_or_else(|| format!("expected ROWSxCOLS, got {s:?}"))?;
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid block extent {t:?}"))
    };
    Ok((num(r)?, num(c)?))
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// File of `key=value` lines used as defaults for this command's flags.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MatchParams {
    /// Block size as ROWSxCOLS.
    #[arg(long, value_parser = parse_block, default_value = "5x5")]
    block: (usize, usize),
    /// Number of candidate disparities.
    #[arg(long, default_value_t = 60)]
    max_disparity: u32,
}

#[derive(Debug, Args)]
struct MatchArgs {
    left: PathBuf,
    right: PathBuf,
    #[arg(long, value_enum, default_value_t = Cost::Census)]
    cost: Cost,
    #[command(flatten)]
    params: MatchParams,
    #[arg(long, value_enum, default_value_t = Engine::Reference)]
    engine: Engine,
    /// Scale disparities to 0..255.
    #[arg(long)]
    normalize: bool,
    #[arg(short, long, value_name = "PGM")]
    output: PathBuf,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    pipeline: Pipeline,
    /// Input PGM files; random images of --width x --height when omitted.
    inputs: Vec<PathBuf>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long, default_value_t = 1)]
    ii: u32,
    #[arg(long, default_value_t = 100.0)]
    clock_mhz: f64,
    #[command(flatten)]
    params: MatchParams,
    /// Boundary handling of the gaussian pipeline.
    #[arg(long, value_enum, default_value_t = Boundary::Clamp)]
    boundary: Boundary,
    /// Seed for generated inputs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the first output stream as PGM.
    #[arg(short, long, value_name = "PGM")]
    output: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[arg(long, value_enum)]
    pipeline: Pipeline,
    #[arg(long, default_value_t = 450)]
    width: usize,
    #[arg(long, default_value_t = 375)]
    height: usize,
    #[command(flatten)]
    params: MatchParams,
    #[arg(long, default_value_t = 1)]
    max_ii: u32,
    /// Largest allowed utilization of any resource, in percent.
    #[arg(long, default_value_t = 6.0)]
    max_resource_pct: f64,
    #[arg(long)]
    min_freq_mhz: Option<f64>,
    #[arg(long, value_enum, default_value_t = Search::Period)]
    search: Search,
    /// Bisection resolution (ns, or MHz with --search frequency).
    #[arg(long, default_value_t = 0.005)]
    step_ns: f64,
    /// Starting point of the search (ns, or MHz with --search frequency).
    #[arg(long, default_value_t = 1.0)]
    default_low_ns: f64,
    #[arg(long, default_value_t = 32)]
    max_doublings: u32,
    /// Amplitude of the timing noise of the mock backend.
    #[arg(long, default_value_t = 0.0)]
    noise_ns: f64,
    #[arg(long, default_value_t = 0)]
    noise_seed: u64,
    #[arg(long)]
    lut_total: Option<u64>,
    #[arg(long)]
    ff_total: Option<u64>,
    #[arg(long)]
    dsp_total: Option<u64>,
    #[arg(long)]
    bram_total: Option<u64>,
    /// Write every design point as CSV.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
    /// Write a frequency/resource scatter plot.
    #[arg(long, value_name = "FILE")]
    svg: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Debug, Args)]
struct ParetoArgs {
    /// Design-point CSV as written by `optimize --csv`.
    input: PathBuf,
    /// Output CSV; stdout when omitted.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArg,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Match(a) => run_match(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Optimize(a) => run_optimize(a),
        Command::Pareto(a) => run_pareto(a),
    }
}

fn read_pgm(path: &Path) -> Result<Image, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    load_pgm(&bytes).map_err(|source| CliError::Pgm {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn match_config(cost: CostFunction, p: &MatchParams) -> Result<MatchConfig, CliError> {
    Ok(MatchConfig::new(cost, p.block.0, p.block.1, p.max_disparity)?)
}

fn run_match(a: MatchArgs) -> Result<(), CliError> {
    let cfg = match_config(a.cost.into(), &a.params)?;
    let left = read_pgm(&a.left)?;
    let right = read_pgm(&a.right)?;
    let map = match a.engine {
        Engine::Reference => match_reference(&left, &right, &cfg)?,
        Engine::Stream => {
            let (map, stats) = match_streaming(&left, &right, &cfg)?;
            println!("{stats}");
            map
        }
    };
    let img = map.to_image(a.normalize)?;
    write_file(&a.output, &store_pgm(&img))?;
    println!(
        "{} {}x{} block {}x{} D={} -> {}",
        cfg.cost,
        map.width(),
        map.height(),
        cfg.block_rows,
        cfg.block_cols,
        cfg.max_disparity,
        a.output.display()
    );
    Ok(())
}

fn pipeline_graph(pipeline: Pipeline, params: &MatchParams, boundary: BoundaryMode) -> Result<KernelGraph, CliError> {
    Ok(match pipeline {
        Pipeline::Identity => identity_graph(),
        Pipeline::Gaussian => gaussian_graph(boundary),
        Pipeline::Sad => build_pipeline(&match_config(CostFunction::Sad, params)?)?,
        Pipeline::Census => build_pipeline(&match_config(CostFunction::Census, params)?)?,
    })
}

fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Result<Image, CliError> {
    Image::from_fn(w, h, |_, _| rng.gen()).map_err(|e| CliError::Config(e.to_string()))
}

fn run_simulate(a: SimulateArgs) -> Result<(), CliError> {
    total_latency_seconds(1, 1, a.clock_mhz).map_err(|e| CliError::Config(e.to_string()))?;
    let graph = pipeline_graph(a.pipeline, &a.params, a.boundary.into())?;
    let needed = graph.sources().len();
    let sources = if a.inputs.is_empty() {
        let (w, h) = (a.width.unwrap_or(450), a.height.unwrap_or(375));
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        (0..needed)
            .map(|_| random_image(&mut rng, w, h))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        if a.inputs.len() != needed {
            return Err(CliError::Config(format!(
                "pipeline {} takes {needed} input image(s), got {}",
                a.pipeline.name(),
                a.inputs.len()
            )));
        }
        let imgs = a.inputs.iter().map(|p| read_pgm(p)).collect::<Result<Vec<_>, _>>()?;
        let (w, h) = imgs[0].dims();
        for (img, path) in imgs.iter().zip(&a.inputs).skip(1) {
            if img.dims() != (w, h) {
                return Err(CliError::Dimensions(format!(
                    "{} is {}x{} but {} is {w}x{h}",
                    path.display(),
                    img.width(),
                    img.height(),
                    a.inputs[0].display()
                )));
            }
        }
        if a.width.is_some_and(|x| x != w) || a.height.is_some_and(|y| y != h) {
            return Err(CliError::Dimensions(format!(
                "inputs are {w}x{h} but {}x{} was requested",
                a.width.unwrap_or(w),
                a.height.unwrap_or(h)
            )));
        }
        imgs
    };
    let (w, h) = sources[0].dims();
    let plan = lower(&graph, w, h)?.with_ii(a.ii)?;
    let (out, stats) = simulate(&plan, &sources)?;

    let pixels = stats.outputs_produced;
    let steady = total_latency_seconds(pixels, stats.ii, a.clock_mhz).map_err(|e| CliError::Config(e.to_string()))?;
    let with_fill = total_latency_with_fill_seconds(pixels, stats.ii, stats.fill_cycles, a.clock_mhz)
        .map_err(|e| CliError::Config(e.to_string()))?;
    println!("pipeline={} width={w} height={h}", a.pipeline.name());
    println!("{stats}");
    println!(
        "clock_mhz={} latency_us={:.3} latency_with_fill_us={:.3}",
        a.clock_mhz,
        steady * 1e6,
        with_fill * 1e6
    );
    if let Some(path) = &a.output {
        let img = out[0]
            .to_gray()
            .ok_or_else(|| CliError::Failed("output values exceed 255; cannot store as PGM".into()))?;
        write_file(path, &store_pgm(&img))?;
    }
    Ok(())
}

fn csv_bytes(points: &[DesignPoint]) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write_design_points(&mut buf, points).map_err(|e| CliError::Failed(e.to_string()))?;
    Ok(buf)
}

fn write_outputs(a: &OptimizeArgs, points: &[DesignPoint]) -> Result<(), CliError> {
    if let Some(path) = &a.csv {
        write_file(path, &csv_bytes(points)?)?;
    }
    if let Some(path) = &a.svg {
        let front = pareto_front(points);
        write_file(path, svg::scatter(points, &front, a.max_resource_pct).as_bytes())?;
    }
    Ok(())
}

fn run_optimize(a: OptimizeArgs) -> Result<(), CliError> {
    let graph = pipeline_graph(a.pipeline, &a.params, BoundaryMode::Clamp)?;
    let plan = lower(&graph, a.width, a.height)?;
    let mut budget = ResourceBudget::zynq_7100();
    budget.lut_total = a.lut_total.unwrap_or(budget.lut_total);
    budget.ff_total = a.ff_total.unwrap_or(budget.ff_total);
    budget.dsp_total = a.dsp_total.unwrap_or(budget.dsp_total);
    budget.bram_blocks_total = a.bram_total.unwrap_or(budget.bram_blocks_total);
    budget.validate()?;
    let constraints = Constraints::new(a.max_ii, a.max_resource_pct, a.min_freq_mhz)?;
    let backend = MockBackend::new(MockModelParams::default().with_noise(a.noise_ns, a.noise_seed))?;
    let opts = OptimizeOptions {
        step: a.step_ns,
        default_low: a.default_low_ns,
        max_doublings: a.max_doublings,
        direction: match a.search {
            Search::Period => SearchDirection::Period,
            Search::Frequency => SearchDirection::Frequency,
        },
    };

    let res = match optimize(&plan, &constraints, &budget, &backend, &opts) {
        Ok(res) => res,
        Err(OptimizeError::Infeasible { doublings, points }) => {
            for p in &points {
                println!("{p}");
            }
            write_outputs(&a, &points)?;
            return Err(OptimizeError::Infeasible { doublings, points }.into());
        }
        Err(e) => return Err(e.into()),
    };
    for p in &res.points {
        println!("{p}");
    }
    write_outputs(&a, &res.points)?;
    println!(
        "synthesis_calls={} doublings={} interval=[{}, {}]",
        res.synthesis_calls, res.doublings, res.interval.0, res.interval.1
    );
    if let Some(best) = res.best_point() {
        println!("best: {best}");
        println!("{}", best.report);
    }
    Ok(())
}

fn run_pareto(a: ParetoArgs) -> Result<(), CliError> {
    let text = fs::read(&a.input).map_err(|e| CliError::io(&a.input, e))?;
    let points = read_design_points(text.as_slice()).map_err(|e| match e {
        OptimizeError::Csv { .. } => CliError::Config(format!("{}: {e}", a.input.display())),
        other => other.into(),
    })?;
    let out = csv_bytes(&pareto_front(&points))?;
    match &a.output {
        Some(path) => write_file(path, &out),
        None => io::stdout()
            .write_all(&out)
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_syntax() {
        assert_eq!(parse_block("5x5"), Ok((5, 5)));
        assert_eq!(parse_block("3×7"), Ok((3, 7)));
        assert_eq!(parse_block(" 9X1 "), Ok((9, 1)));
        assert!(parse_block("5").is_err());
        assert!(parse_block("ax5").is_err());
    }

    #[test]
    fn cli_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn later_flags_override() {
        let cli = Cli::try_parse_from(["hlsloop", "pareto", "a.csv", "-o", "x", "-o", "y"]).unwrap();
        let Command::Pareto(p) = cli.command else { panic!() };
        assert_eq!(p.output, Some(PathBuf::from("y")));
    }
}
