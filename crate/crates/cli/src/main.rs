use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polar_core::affective::{affective_level, AffectiveModel, AnimosityFunction, TiePolicy};
use polar_core::distribution::{PolicyScale, WeightedDistribution};
use polar_core::order::{
    cleavage_point_with, default_centers, dominance_region, dominates_at, index_with,
    oracle_dominates_at, IndexConvention,
};
use polar_core::report::{matrix_csv, svg_line_chart, Report, Series};
use polar_core::salience::{salience_dominance, salience_sweep, SalienceModel};
use polar_core::survey::{
    fixtures, parse_csv, select, select_one, Axis, Schema, ShareUnit, SurveyTable, Wave,
};
use polar_core::verify::Property;
use polar_core::Error;

#[derive(Parser)]
#[command(
    name = "polar",
    version,
    about = "Polarization orders and indices on survey distributions"
)]
struct Cli {
    /// Survey CSV to analyse instead of the embedded tables.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = SchemaArg::Auto)]
    schema: SchemaArg,

    /// Override share-unit detection.
    #[arg(long, global = true, value_enum)]
    share_unit: Option<UnitArg>,

    #[arg(long, global = true, value_enum, default_value_t = ConventionArg::Step)]
    convention: ConventionArg,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Directory against which relative input paths are resolved.
    #[arg(long, global = true, env = "POLAR_DATA_DIR")]
    data_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemaArg {
    Auto,
    Long,
    Wide,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Percent,
    Proportion,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Step,
    GridSum,
}

impl ConventionArg {
    fn convention(self) -> IndexConvention {
        match self {
            ConventionArg::Step => IndexConvention::StepIntegral,
            ConventionArg::GridSum => IndexConvention::GridSum,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ConventionArg::Step => "step",
            ConventionArg::GridSum => "grid-sum",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Mean and variance of each selected table.
    Moments {
        #[arg(long)]
        table: String,
    },
    /// Polarization index of one table at one center.
    Index {
        #[arg(long)]
        table: String,
        #[arg(long, allow_negative_numbers = true)]
        center: f64,
    },
    /// Index profile over a list of centers.
    Profile {
        #[arg(long)]
        table: String,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        centers: Option<Vec<f64>>,
        /// Also write an SVG line chart to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Wave × center matrix of index values for one axis.
    Evolution {
        #[arg(long)]
        axis: String,
        #[arg(long, value_delimiter = ',')]
        centers: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Pre- and post-election index values on the liberal-conservative scale.
    Election {
        #[arg(long)]
        year: u16,
        #[arg(long, value_delimiter = ',')]
        centers: Option<Vec<f64>>,
    },
    /// Percentage change profile between two waves and its argmax.
    Cleavage {
        #[arg(long)]
        axis: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, value_delimiter = ',')]
        centers: Option<Vec<f64>>,
    },
    /// Dominance verdict at a center, or the region of centers where the hat
    /// table dominates.
    Dominance {
        #[arg(long)]
        base: String,
        #[arg(long)]
        hat: String,
        #[arg(long, allow_negative_numbers = true)]
        center: Option<f64>,
        /// Decide by enumerating intervals instead of the crossing test.
        #[arg(long)]
        oracle: bool,
    },
    /// Affective polarization around a cutoff.
    Affective {
        #[arg(long)]
        table: String,
        #[arg(long, allow_negative_numbers = true)]
        cutoff: f64,
        /// identity, power:<p>, or plf:<file> with `distance,value` rows.
        #[arg(long, default_value = "identity")]
        g: String,
        /// exclude, left, right, or split.
        #[arg(long, default_value = "exclude")]
        ties: String,
    },
    /// Index surface and pairwise dominance of the salience-induced
    /// distributions.
    Salience {
        /// `position,weight` rows of the common-value distribution.
        #[arg(long)]
        gc: PathBuf,
        /// `position,weight` rows of the divisive-issue distribution.
        #[arg(long)]
        gd: PathBuf,
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        centers: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        min: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        max: f64,
    },
    /// Seeded randomized checks of the structural properties.
    Verify {
        /// oracle, bounds, order, affective, or salience; all when omitted.
        #[arg(long)]
        property: Option<String>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Session {
    tables: Vec<SurveyTable>,
    convention: ConventionArg,
    data_dir: Option<PathBuf>,
    from_file: bool,
}

impl Session {
    fn resolve(&self, path: &Path) -> PathBuf {
        match &self.data_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 3 unknown selector, 4 center on or beyond the scale bounds, 5 empty
/// group, 6 invalid input data, 1 anything else. Usage errors exit with 2.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::UnknownSelector(_) | Error::UnknownAxis(_)) => 3,
        Some(Error::CenterOnBoundary { .. } | Error::OutOfScale { .. }) => 4,
        Some(Error::EmptyGroup { .. }) => 5,
        Some(
            Error::MalformedHeader(_)
            | Error::NonNumericCell { .. }
            | Error::NegativeShare { .. }
            | Error::InvalidShare { .. }
            | Error::AmbiguousTotal { .. }
            | Error::PositionOffGrid(_)
            | Error::EmptyDistribution
            | Error::Csv(_),
        ) => 6,
        _ => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut ctx = Session {
        tables: Vec::new(),
        convention: cli.convention,
        data_dir: cli.data_dir.clone(),
        from_file: cli.input.is_some(),
    };
    ctx.tables = match &cli.input {
        Some(path) => load(&ctx.resolve(path), cli.schema, cli.share_unit)?,
        None => fixtures().to_vec(),
    };

    let text = match cli.command {
        Command::Evolution {
            axis,
            centers,
            format: Format::Csv,
        } => evolution_csv(&ctx, &axis, centers)?,
        command => dispatch(&ctx, command)?.to_json() + "\n",
    };
    match cli.output {
        Some(path) => {
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn load(path: &Path, schema: SchemaArg, unit: Option<UnitArg>) -> anyhow::Result<Vec<SurveyTable>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let schema = match schema {
        SchemaArg::Auto => Schema::detect(text.lines().next().unwrap_or("")),
        SchemaArg::Long => Schema::Long,
        SchemaArg::Wide => Schema::Wide,
    };
    let unit = unit.map(|u| match u {
        UnitArg::Percent => ShareUnit::Percent,
        UnitArg::Proportion => ShareUnit::Proportion,
    });
    Ok(parse_csv(text.as_bytes(), schema, unit)?)
}

fn args(pairs: Value) -> BTreeMap<String, Value> {
    match pairs {
        Value::Object(map) => map.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => BTreeMap::new(),
    }
}

fn centers_or_default(centers: Option<Vec<f64>>, scale: &PolicyScale) -> Vec<f64> {
    centers.unwrap_or_else(|| default_centers(scale))
}

fn dispatch(ctx: &Session, command: Command) -> anyhow::Result<Report> {
    let convention = ctx.convention.convention();
    let conv = ctx.convention.name();
    let mut report = match command {
        Command::Moments { table } => {
            let picked = select(&ctx.tables, &table)?;
            let results = picked
                .iter()
                .map(|t| {
                    let d = t.distribution()?;
                    Ok(json!({
                        "table": t.label(),
                        "mean": d.mean(),
                        "variance": d.variance(),
                        "unit": t.unit,
                    }))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            Report::new(
                "moments",
                args(json!({"table": table})),
                &picked,
                json!(results),
            )
        }
        Command::Index { table, center } => {
            let t = select_one(&ctx.tables, &table)?;
            let p = index_with(&t.distribution()?, center, convention)?;
            Report::new(
                "index",
                args(json!({"table": table, "center": center, "convention": conv})),
                &[t],
                json!({"table": t.label(), "center": center, "value": p.value}),
            )
        }
        Command::Profile {
            table,
            centers,
            svg,
        } => {
            let picked = select(&ctx.tables, &table)?;
            let mut series = Vec::new();
            let mut results = Vec::new();
            for t in &picked {
                let d = t.distribution()?;
                let cs = centers_or_default(centers.clone(), d.scale());
                let points = cs
                    .iter()
                    .map(|&c| Ok((c, index_with(&d, c, convention)?.value)))
                    .collect::<polar_core::Result<Vec<_>>>()?;
                results.push(json!({
                    "table": t.label(),
                    "centers": cs,
                    "values": points.iter().map(|p| p.1).collect::<Vec<_>>(),
                }));
                series.push(Series {
                    name: t.label(),
                    points,
                });
            }
            if let Some(path) = &svg {
                let chart =
                    svg_line_chart(&format!("Polarization profile ({conv})"), "center", &series);
                fs::write(path, chart).with_context(|| format!("writing {}", path.display()))?;
            }
            Report::new(
                "profile",
                args(
                    json!({"table": table, "centers": centers, "convention": conv,
                            "svg": svg.map(|p| p.display().to_string())}),
                ),
                &picked,
                json!(results),
            )
        }
        Command::Evolution { axis, centers, .. } => {
            let (picked, cs, rows) = evolution(ctx, &axis, centers.clone())?;
            let results: Vec<Value> = rows
                .iter()
                .map(|(wave, values)| json!({"wave": wave, "values": values}))
                .collect();
            Report::new(
                "evolution",
                args(json!({"axis": axis, "centers": centers, "convention": conv})),
                &picked,
                json!({"centers": cs, "waves": results}),
            )
        }
        Command::Election { year, centers } => {
            let pre = select_one(&ctx.tables, &format!("lc:{}", Wave::pre(year)))?;
            let post = select_one(&ctx.tables, &format!("lc:{}", Wave::post(year)))?;
            let (a, b) = (pre.distribution()?, post.distribution()?);
            let cs = centers_or_default(centers.clone(), a.scale());
            let rows = cs
                .iter()
                .map(|&c| {
                    let before = index_with(&a, c, convention)?.value;
                    let after = index_with(&b, c, convention)?.value;
                    Ok(json!({"center": c, "pre": before, "post": after, "delta": after - before}))
                })
                .collect::<polar_core::Result<Vec<_>>>()?;
            Report::new(
                "election",
                args(json!({"year": year, "centers": centers, "convention": conv})),
                &[pre, post],
                json!(rows),
            )
        }
        Command::Cleavage {
            axis,
            from,
            to,
            centers,
        } => {
            let a = select_one(&ctx.tables, &format!("{axis}:{from}"))?;
            let b = select_one(&ctx.tables, &format!("{axis}:{to}"))?;
            let (da, db) = (a.distribution()?, b.distribution()?);
            let cs = centers_or_default(centers.clone(), da.scale());
            let cl = cleavage_point_with(&da, &db, &cs, convention)?;
            Report::new(
                "cleavage",
                args(
                    json!({"axis": axis, "from": from, "to": to, "centers": centers,
                            "convention": conv}),
                ),
                &[a, b],
                serde_json::to_value(&cl)?,
            )
        }
        Command::Dominance {
            base,
            hat,
            center,
            oracle,
        } => {
            let a = select_one(&ctx.tables, &base)?;
            let b = select_one(&ctx.tables, &hat)?;
            let (da, db) = (a.distribution()?, b.distribution()?);
            let results = match (center, oracle) {
                (Some(c), false) => serde_json::to_value(dominates_at(&da, &db, c)?)?,
                (Some(c), true) => json!({
                    "center": c,
                    "hat_dominates": oracle_dominates_at(&da, &db, c)?,
                    "base_dominates": oracle_dominates_at(&db, &da, c)?,
                }),
                (None, false) => json!({"region": dominance_region(&da, &db)?}),
                (None, true) => {
                    let region = default_centers(da.scale())
                        .into_iter()
                        .filter_map(|c| match oracle_dominates_at(&da, &db, c) {
                            Ok(true) => Some(Ok(c)),
                            Ok(false) => None,
                            Err(e) => Some(Err(e)),
                        })
                        .collect::<polar_core::Result<Vec<_>>>()?;
                    json!({"region": region})
                }
            };
            Report::new(
                "dominance",
                args(json!({"base": base, "hat": hat, "center": center, "oracle": oracle})),
                &[a, b],
                results,
            )
        }
        Command::Affective {
            table,
            cutoff,
            g,
            ties,
        } => {
            let t = select_one(&ctx.tables, &table)?;
            let func = animosity(ctx, &g)?;
            let policy: TiePolicy = ties.parse()?;
            let model = AffectiveModel::new(cutoff, func).with_ties(policy);
            let r = affective_level(&t.distribution()?, &model)?;
            let mut report = Report::new(
                "affective",
                args(json!({"table": table, "cutoff": cutoff, "g": g, "ties": policy.to_string()})),
                &[t],
                serde_json::to_value(r)?,
            );
            if r.excluded_mass > 0.0 {
                report.warn(format!(
                    "{:.4} of the mass sits at the cutoff and was excluded",
                    r.excluded_mass
                ));
            }
            report
        }
        Command::Salience {
            gc,
            gd,
            alphas,
            centers,
            min,
            max,
        } => {
            if alphas.is_empty() {
                bail!("--alphas needs at least one value");
            }
            let common = weights_file(&ctx.resolve(&gc), min, max)?;
            let divisive = weights_file(&ctx.resolve(&gd), min, max)?;
            let model = SalienceModel::new(common, divisive, alphas[0])?;
            let cs = centers_or_default(centers.clone(), model.divisive().scale());
            let surface = salience_sweep(&model, &alphas, &cs)?;
            let mut sorted = surface.alphas.clone();
            sorted.dedup();
            let mut pairs = Vec::new();
            for (i, &lo) in sorted.iter().enumerate() {
                for &hi in &sorted[i + 1..] {
                    pairs.push(serde_json::to_value(salience_dominance(&model, lo, hi)?)?);
                }
            }
            Report::new(
                "salience",
                args(
                    json!({"gc": gc.display().to_string(), "gd": gd.display().to_string(),
                            "alphas": alphas, "centers": centers, "min": min, "max": max}),
                ),
                &[],
                json!({"surface": surface, "pairs": pairs}),
            )
        }
        Command::Verify {
            property,
            trials,
            seed,
        } => {
            let props = match &property {
                Some(p) => vec![p.parse::<Property>()?],
                None => Property::ALL.to_vec(),
            };
            let outcomes: Vec<_> = props.iter().map(|p| p.run(seed, trials)).collect();
            let mut report = Report::new(
                "verify",
                args(json!({"property": property, "trials": trials, "seed": seed})),
                &[],
                serde_json::to_value(&outcomes)?,
            );
            for o in outcomes.iter().filter(|o| !o.passed()) {
                report.warn(format!(
                    "{} failed in {} of {} trials",
                    o.property, o.failures, o.trials
                ));
            }
            report
        }
    };
    if ctx.convention.convention() == IndexConvention::GridSum {
        report.warn("grid-sum index values are not confined to [0, 1]");
    }
    if ctx.from_file {
        report.inputs.args.insert("input".into(), json!(true));
    }
    Ok(report)
}

type EvolutionRows<'a> = (Vec<&'a SurveyTable>, Vec<f64>, Vec<(String, Vec<f64>)>);

/// Year-labelled waves of one axis, excluding pre/post splits.
fn evolution<'a>(
    ctx: &'a Session,
    axis: &str,
    centers: Option<Vec<f64>>,
) -> anyhow::Result<EvolutionRows<'a>> {
    let axis: Axis = axis.parse()?;
    let picked: Vec<&SurveyTable> = select(&ctx.tables, axis.code())?
        .into_iter()
        .filter(|t| t.wave.phase.is_none())
        .collect();
    if picked.is_empty() {
        return Err(Error::UnknownSelector(format!("{axis} (no year-labelled waves)")).into());
    }
    let cs = centers_or_default(centers, &axis.scale());
    let rows = picked
        .iter()
        .map(|t| {
            let d = t.distribution()?;
            let values = cs
                .iter()
                .map(|&c| Ok(index_with(&d, c, ctx.convention.convention())?.value))
                .collect::<polar_core::Result<Vec<_>>>()?;
            Ok((t.wave.to_string(), values))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok((picked, cs, rows))
}

fn evolution_csv(ctx: &Session, axis: &str, centers: Option<Vec<f64>>) -> anyhow::Result<String> {
    let (_, cs, rows) = evolution(ctx, axis, centers)?;
    let columns: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
    Ok(matrix_csv("wave", &columns, &rows))
}

fn animosity(ctx: &Session, spec: &str) -> anyhow::Result<AnimosityFunction> {
    match spec.strip_prefix("plf:") {
        Some(path) => {
            let knots = pairs_file(&ctx.resolve(Path::new(path)))?;
            Ok(AnimosityFunction::piecewise_linear(knots)?)
        }
        None => Ok(spec.parse()?),
    }
}

/// Two numeric columns per line; a non-numeric first line is a header.
fn pairs_file(path: &Path) -> anyhow::Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match cells.as_slice() {
            [a, b] => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
            _ => None,
        };
        match parsed {
            Some(pair) => out.push(pair),
            None if i == 0 => continue,
            None => {
                return Err(Error::NonNumericCell {
                    line: i as u64 + 1,
                    column: "1-2".into(),
                    value: line.to_string(),
                }
                .into())
            }
        }
    }
    Ok(out)
}

fn weights_file(path: &Path, min: f64, max: f64) -> anyhow::Result<WeightedDistribution> {
    let shares = pairs_file(path)?;
    let mut grid: Vec<f64> = shares.iter().map(|s| s.0).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let scale = PolicyScale::new(min, max, grid)?;
    Ok(WeightedDistribution::from_shares(scale, &shares)?)
}
