use std::fs;
use std::path::PathBuf;

use clap::Args;
use helmbie::billiards::{escape_statistics, ObstacleSpec, Scene, SceneSpec, MIN_SAMPLES};
use serde::{Deserialize, Serialize};

use crate::config::positive;
use crate::error::CliError;
use crate::table::{Cell, Table};

const COLUMNS: [&str; 8] =
    ["samples", "escaped", "vertex_hits", "budget_exhausted", "fraction_escaped", "max_escape_time", "witnesses", "classification"];

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BilliardsArgs {
    /// Scene JSON file: {"R": .., "obstacles": [..]}.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Built-in scene: kite or two-discs.
    #[arg(long)]
    pub preset: Option<String>,
    /// Inline scene (config file only).
    #[arg(skip)]
    pub scene_spec: Option<SceneSpec>,
    /// Number of random rays (default 10000).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Time budget per ray (default 200).
    #[arg(long)]
    pub budget: Option<f64>,
    /// Random seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
}

fn preset(name: &str) -> Result<SceneSpec, CliError> {
    let curve = |name: &str, params: Vec<f64>, center| ObstacleSpec::Curve { name: name.into(), params, scale: 1.0, center };
    match name {
        "kite" => Ok(SceneSpec { radius: 5.0, obstacles: vec![curve("kite", vec![], [0.0, 0.0])] }),
        "two-discs" => Ok(SceneSpec {
            radius: 5.0,
            obstacles: vec![curve("circle", vec![1.0], [2.0, 0.0]), curve("circle", vec![1.0], [-2.0, 0.0])],
        }),
        other => Err(CliError::Config(format!("unknown preset '{other}' (expected kite or two-discs)"))),
    }
}

fn scene(args: &BilliardsArgs) -> Result<Scene, CliError> {
    let spec = match (&args.scene, &args.preset, &args.scene_spec) {
        (Some(path), None, None) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        (None, Some(name), None) => preset(name)?,
        (None, None, Some(spec)) => spec.clone(),
        (None, None, None) => return Err(CliError::Config("one of scene, preset or scene_spec is required".into())),
        _ => return Err(CliError::Config("give only one of scene, preset or scene_spec".into())),
    };
    Scene::from_spec(&spec).map_err(|e| CliError::Config(e.to_string()))
}

pub fn run(args: &BilliardsArgs) -> Result<Table, CliError> {
    let scene = scene(args)?;
    let samples = args.samples.unwrap_or(10_000);
    if samples < MIN_SAMPLES {
        return Err(CliError::Config(format!("sample count {samples} < {MIN_SAMPLES}")));
    }
    let budget = positive("budget", args.budget.unwrap_or(200.0))?;
    let seed = args.seed.unwrap_or(0);
    let st = escape_statistics(&scene, samples, budget, seed)?;
    let class = serde_json::to_value(st.classification).expect("enum serialises");
    let mut table = Table::new("billiards", &COLUMNS);
    table.push(vec![
        st.samples.into(),
        st.escaped.into(),
        st.vertex_hits.into(),
        st.budget_exhausted.into(),
        st.fraction_escaped.into(),
        Cell::opt_float(st.max_escape_time),
        st.witnesses.len().into(),
        class.as_str().unwrap_or_default().into(),
    ]);
    table.summary("seed", seed.to_string());
    table.summary("time_budget", budget);
    for (i, w) in st.witnesses.iter().enumerate() {
        table.summary(
            &format!("witness_{i}"),
            format!("obstacles {}-{} from ({:.9}, {:.9}) to ({:.9}, {:.9}), length {:.9}", w.obstacles.0, w.obstacles.1, w.a[0], w.a[1], w.b[0], w.b[1], w.length),
        );
    }
    Ok(table)
}
