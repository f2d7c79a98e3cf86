use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use covering_core::lab::generate::crossing_strips_fixture;
use covering_core::lab::report::{class_section, section, section_csv};
use covering_core::lab::{emit_report, generate_family, run_experiment, ExperimentConfig, FamilyKind};
use covering_core::maximal::{hl_maximal_1d, level_set_measure, weak_type_check, FieldValues, ScalarField3};
use covering_core::measure::Grid3;
use covering_core::selection::{product_bound_check, select, verify_selection, SelectionResult, SieveParams};
use covering_core::{maximal, Axis, Box3, BoxFamily};

/// Box-covering laboratory: generate families, run the exponential sieve and check it.
#[derive(Parser)]
#[command(name = "covering", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random family as JSON.
    Generate(GenerateArgs),
    /// Run the sieve on a family and print the selection as JSON.
    Select(SelectArgs),
    /// Re-check a selection against its family.
    Verify(VerifyArgs),
    /// Directional maximal function of a field, its level set and the weak-type bound.
    Maximal(MaximalArgs),
    /// Run a batch of trials and write the report bundle.
    Experiment(ExperimentArgs),
    /// Export a horizontal section as CSV.
    Section(SectionArgs),
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    /// Acceptance threshold on the exponential average.
    #[arg(long, default_value_t = 3.0)]
    threshold: f64,
    /// Odd dilation factor applied to selected boxes.
    #[arg(long, default_value_t = 3)]
    dilation: u32,
    /// Exponent scale.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
}

impl From<ParamArgs> for SieveParams {
    fn from(p: ParamArgs) -> Self {
        SieveParams {
            threshold: p.threshold,
            dilation: p.dilation,
            c: p.c,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Zygmund,
    Adversarial,
}

impl From<Kind> for FamilyKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Zygmund => FamilyKind::Zygmund,
            Kind::Adversarial => FamilyKind::Adversarial,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Boxes are placed inside [0, range]³.
    #[arg(long, default_value_t = 256)]
    range: i64,
    #[arg(long, value_enum, default_value = "zygmund")]
    kind: Kind,
    /// Trial number; selects the random stream.
    #[arg(long, default_value_t = 0)]
    trial: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long)]
    family: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    result: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MaximalArgs {
    /// JSON field: {"xs","ys","zs","values"} for integers or {"xs","ys","zs","depth","c"}.
    #[arg(long)]
    field: PathBuf,
    /// Direction of the maximal operator: 1, 2 or 3.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    axis: u8,
    #[arg(long)]
    lambda: f64,
    /// Constant of the weak-type bound.
    #[arg(long, default_value_t = maximal::default_weak_type_constant())]
    constant: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON configuration; flags given alongside override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    range: Option<i64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SectionArgs {
    #[arg(long, required_unless_present = "fixture")]
    family: Option<PathBuf>,
    /// Use the built-in crossing-strips region instead of a family.
    #[arg(long, conflicts_with_all = ["family", "region"])]
    fixture: bool,
    /// Height of the plane; a box meets it when lo ≤ z < hi.
    #[arg(long, required_unless_present_any = ["region", "fixture"])]
    z: Option<i64>,
    /// Dilation of the boxes drawn: 1 for a plain depth section, 3 with --region or --fixture.
    #[arg(long)]
    dilation: Option<u32>,
    /// Enlistment index of a box; its prior selections are split into the two classes.
    #[arg(long)]
    region: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure that maps to an exit code.
enum Failure {
    /// Some check did not hold; the output was still written.
    Check,
    Usage(String),
}

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

impl From<covering_core::Error> for Failure {
    fn from(e: covering_core::Error) -> Self {
        usage(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        usage(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        usage(e)
    }
}

type Outcome = Result<(), Failure>;

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Outcome {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, &text)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn generate(a: GenerateArgs) -> Outcome {
    let cfg = ExperimentConfig {
        seed: a.seed,
        n_boxes: a.n,
        coordinate_range: a.range,
        family: a.kind.into(),
        trial_count: a.trial + 1,
        ..Default::default()
    };
    cfg.validate()?;
    let family = generate_family(&cfg, a.trial)?;
    let mut text = family.to_json()?;
    text.push('\n');
    emit(a.out.as_deref(), &text)
}

fn run_select(a: SelectArgs) -> Outcome {
    let family = BoxFamily::load(&a.family)?;
    let result = select(&family, &a.params.into())?;
    let mut text = result.to_json()?;
    text.push('\n');
    emit(a.out.as_deref(), &text)
}

fn verify(a: VerifyArgs) -> Outcome {
    let family = BoxFamily::load(&a.family)?;
    let result = SelectionResult::from_json(&read(&a.result)?)?;
    let params: SieveParams = a.params.into();
    let report = verify_selection(&result, &family, &params)?;
    let mut product = Vec::new();
    for (idx, prior) in result.rejections() {
        let prior: Vec<Box3> = prior.iter().map(|&i| family.boxes[i]).collect();
        let r = product_bound_check(&family.boxes[idx], &prior, &params)?;
        product.push(json!({
            "index": idx,
            "pairs_checked": r.pairs_checked,
            "violations": r.violations,
            "unclassified": r.split.unclassified.len(),
        }));
    }
    let inclusion = maximal::rejected_inclusion_check(&result, &family, &params)?;
    let product_ok = product.iter().all(|p| p["violations"].as_array().is_some_and(Vec::is_empty));
    let passed = report.passed && product_ok && inclusion.holds();
    emit_json(
        a.out.as_deref(),
        &json!({
            "passed": passed,
            "verification": report,
            "product_bound": product,
            "inclusion": inclusion,
        }),
    )?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

#[derive(Deserialize)]
struct FieldFile {
    xs: Vec<i64>,
    ys: Vec<i64>,
    zs: Vec<i64>,
    values: Option<Vec<u64>>,
    depth: Option<Vec<u32>>,
    c: Option<f64>,
}

fn load_field(path: &Path) -> Result<ScalarField3, Failure> {
    let f: FieldFile = serde_json::from_str(&read(path)?)?;
    let grid = Grid3::from_breakpoints(f.xs, f.ys, f.zs)?;
    let values = match (f.values, f.depth) {
        (Some(v), None) => FieldValues::Integer(v),
        (None, Some(depth)) => FieldValues::ExpDepth {
            depth,
            c: f.c.unwrap_or(1.0),
        },
        _ => return Err(Failure::Usage("field needs exactly one of \"values\" or \"depth\"".into())),
    };
    Ok(ScalarField3::new(grid, values)?)
}

fn run_maximal(a: MaximalArgs) -> Outcome {
    let field = load_field(&a.field)?;
    let axis = Axis::from_number(a.axis).expect("clap restricts the range");
    let mf = hl_maximal_1d(&field, axis);
    let weak = weak_type_check(&field, axis, a.lambda, a.constant)?;
    let values: Vec<f64> = (0..field.grid().cell_count()).map(|n| mf.value(n)).collect();
    emit_json(
        a.out.as_deref(),
        &json!({
            "axis": axis,
            "lambda": a.lambda,
            "level_set_measure": level_set_measure(&mf, a.lambda),
            "max": mf.max_value(),
            "values": values,
            "weak_type": weak,
        }),
    )?;
    if weak.passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn experiment(a: ExperimentArgs) -> Outcome {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.n {
        cfg.n_boxes = v;
    }
    if let Some(v) = a.range {
        cfg.coordinate_range = v;
    }
    if let Some(v) = a.trials {
        cfg.trial_count = v;
    }
    if let Some(v) = a.kind {
        cfg.family = v.into();
    }
    let bundle = run_experiment(&cfg)?;
    let files = emit_report(&bundle, &a.out)?;
    let s = &bundle.summary;
    eprintln!(
        "{} trials, {} passed, {} aborted; max measure ratio {}, max exp ratio {}; {} files in {}",
        s.trials,
        s.passed,
        s.aborted,
        s.measure_ratio.max.unwrap_or(f64::NAN),
        s.exp_ratio.max.unwrap_or(f64::NAN),
        files.len(),
        a.out.display()
    );
    if s.all_passed() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn run_section(a: SectionArgs) -> Outcome {
    let text = if a.fixture {
        let (region, prior) = crossing_strips_fixture();
        let z = a.z.unwrap_or(region.z.lo() + region.z.len() / 2);
        section_csv(&class_section(&region, &prior, a.dilation.unwrap_or(3), z)?, &["r", "s"])
    } else {
        let family = BoxFamily::load(a.family.as_deref().expect("clap requires a family"))?;
        match a.region {
            Some(i) => {
                let region = *family
                    .boxes
                    .get(i)
                    .ok_or_else(|| Failure::Usage(format!("region {i} out of range")))?;
                let dilation = a.dilation.unwrap_or(3);
                let params = SieveParams {
                    dilation,
                    ..Default::default()
                };
                let result = select(&family, &params)?;
                let prior: Vec<Box3> = result
                    .trace
                    .iter()
                    .zip(result.priors())
                    .find(|(t, _)| t.index == i)
                    .map(|(_, p)| p.iter().map(|&j| family.boxes[j]).collect())
                    .unwrap_or_default();
                let z = a.z.unwrap_or(region.z.lo() + region.z.len() / 2);
                section_csv(&class_section(&region, &prior, dilation, z)?, &["r", "s"])
            }
            None => {
                let boxes = family
                    .boxes
                    .iter()
                    .map(|b| b.dilate(a.dilation.unwrap_or(1)))
                    .collect::<Result<Vec<_>, _>>()?;
                let Some(hull) = boxes.iter().copied().reduce(|h, b| h.hull(&b)) else {
                    return emit(a.out.as_deref(), "x_lo,x_hi,y_lo,y_hi,depth\n");
                };
                let z = a.z.expect("clap requires a plane without a region");
                section_csv(&section(&hull, &[&boxes], z), &["depth"])
            }
        }
    };
    emit(a.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Select(a) => run_select(a),
        Command::Verify(a) => verify(a),
        Command::Maximal(a) => run_maximal(a),
        Command::Experiment(a) => experiment(a),
        Command::Section(a) => run_section(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
