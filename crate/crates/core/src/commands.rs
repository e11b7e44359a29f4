//! The batch commands behind the `okounkov` binary. Each returns the text
//! of its report plus any files it would write; nothing here touches the
//! filesystem or depends on the thread count.
//!
//! JSON reports keep exact data (rational strings, integers) under
//! `"exact"` and floating-point data under `"float"`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::body::{approximate_body, lattice_points, LatticePointSet, RationalPolytope};
use crate::degeneration::{
    distinct_coordinate_values, family_coordinates, special_fiber, verify_hypotheses, DegenerationSpec,
    HypothesisReport, Status,
};
use crate::exact::{ratio_literal, to_f64};
use crate::problem::ProblemFile;
use crate::quant::{convergence_run, QuadratureGrid};
use crate::semigroup::{finite_generation_probe, khovanskii_check, ValueSemigroup};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Body,
    Semigroup,
    Khovanskii,
    Degenerate,
    Verify,
    Quantize,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Body,
        Command::Semigroup,
        Command::Khovanskii,
        Command::Degenerate,
        Command::Verify,
        Command::Quantize,
    ];
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Body => "body",
            Command::Semigroup => "semigroup",
            Command::Khovanskii => "khovanskii",
            Command::Degenerate => "degenerate",
            Command::Verify => "verify",
            Command::Quantize => "quantize",
        })
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::Input(format!("unknown command `{s}`")))
    }
}

/// Command-line values that take precedence over the problem file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub d: Option<u32>,
    pub d_max: Option<u32>,
    pub resolution: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub report: String,
    /// `(file name, contents)` pairs for an output directory.
    pub files: Vec<(String, String)>,
    /// 0 on success, 3 when the report records a failed check.
    pub exit_code: i32,
}

impl CommandOutput {
    fn json(name: &str, value: Value, exit_code: i32) -> Self {
        let report = serde_json::to_string_pretty(&value).expect("serializable") + "\n";
        CommandOutput {
            files: vec![(format!("{name}.json"), report.clone())],
            report,
            exit_code,
        }
    }
}

pub fn run(cmd: Command, problem: &ProblemFile, ov: Overrides) -> Result<CommandOutput> {
    match cmd {
        Command::Body => cmd_body(problem, ov),
        Command::Semigroup => cmd_semigroup(problem, ov),
        Command::Khovanskii => cmd_khovanskii(problem, ov),
        Command::Degenerate => cmd_degenerate(problem, ov),
        Command::Verify => cmd_verify(problem, ov),
        Command::Quantize => cmd_quantize(problem, ov),
    }
}

fn resolve(problem: &ProblemFile, ov: Overrides) -> Result<(u32, u32)> {
    let d = ov.d.unwrap_or(problem.d);
    let d_max = ov.d_max.unwrap_or(problem.d_max);
    if d == 0 || d_max == 0 {
        return Err(Error::Input("d and d_max must be positive".into()));
    }
    Ok((d, d_max))
}

fn polytope_json(p: &RationalPolytope) -> Value {
    let halfspaces = |hs: &[crate::body::Halfspace]| -> Value {
        hs.iter()
            .map(|h| {
                json!({
                    "normal": h.normal.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "offset": ratio_literal(&h.offset),
                })
            })
            .collect()
    };
    json!({
        "summary": p.summary(),
        "vertices": p.vertices().iter().map(|v| v.iter().map(ratio_literal).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "facets": halfspaces(p.facets()),
        "equalities": halfspaces(p.equalities()),
        "affine_dim": p.affine_dim(),
        "volume": p.volume().map(|v| ratio_literal(&v)),
    })
}

fn lattice_json(set: &LatticePointSet) -> Value {
    json!({
        "count": set.len(),
        "interior": set.interior().len(),
        "points": set.points.iter().map(|(e, c)| json!({"point": e, "class": c})).collect::<Vec<_>>(),
    })
}

pub fn cmd_body(problem: &ProblemFile, ov: Overrides) -> Result<CommandOutput> {
    let (d, d_max) = resolve(problem, ov)?;
    let val = problem.valuation()?;
    let e = problem.section_space()?;
    let sg = ValueSemigroup::compute(&val, &e, d_max)?;
    let approx = approximate_body(&sg.levels)?;
    let lattice = lattice_points(&approx.body, d)?;
    let value = json!({
        "command": "body",
        "exact": {
            "body": polytope_json(&approx.body),
            "d_max": d_max,
            "stable": approx.stable,
            "monotone": approx.monotone,
            "cone_rays": approx.cone.rays().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "scale": d,
            "lattice_points": lattice_json(&lattice),
        },
        "float": {
            "volume": approx.body.volume().map(|v| to_f64(&v)),
        },
    });
    Ok(CommandOutput::json("body", value, 0))
}

pub fn cmd_semigroup(problem: &ProblemFile, ov: Overrides) -> Result<CommandOutput> {
    let (_, d_max) = resolve(problem, ov)?;
    let val = problem.valuation()?;
    let e = problem.section_space()?;
    let sg = ValueSemigroup::compute(&val, &e, d_max)?;
    let probe = if d_max >= 2 {
        Some(finite_generation_probe(&val, &e, d_max)?)
    } else {
        None
    };
    let levels: Value = sg
        .levels
        .iter()
        .map(|(d, vals)| json!({"d": d, "dim": sg.dims[d], "values": vals}))
        .collect();
    let value = json!({
        "command": "semigroup",
        "exact": {
            "levels": levels,
            "generators": sg.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "additivity_violations": sg.additivity_violations(),
            "lattice_index": val.value_lattice_index(&sg.levels.values().flatten().cloned().collect()).map(|i| i.to_string()),
            "generation_probe": probe,
        },
    });
    let mut out = CommandOutput::json("semigroup", value, 0);
    out.files.push(("semigroup.csv".into(), sg.to_csv()));
    Ok(out)
}

pub fn cmd_khovanskii(problem: &ProblemFile, ov: Overrides) -> Result<CommandOutput> {
    let (_, d_max) = resolve(problem, ov)?;
    let val = problem.valuation()?;
    let e = problem.section_space()?;
    let basis = problem.khovanskii_basis(&val)?;
    let report = khovanskii_check(&basis, &val, &e, d_max)?;
    let elements: Value = basis
        .elements()
        .iter()
        .zip(basis.values())
        .map(|((deg, f), v)| json!({"degree": deg, "element": f.to_string(), "value": v.to_string()}))
        .collect();
    let code = if report.pass { 0 } else { 3 };
    let value = json!({
        "command": "khovanskii",
        "exact": {"basis": elements, "report": report},
    });
    Ok(CommandOutput::json("khovanskii", value, code))
}

fn build_spec(problem: &ProblemFile, d: u32) -> Result<DegenerationSpec> {
    let val = problem.valuation()?;
    let e = problem.section_space()?;
    let basis = problem.khovanskii_basis(&val)?;
    DegenerationSpec::build(&val, &e, basis, d, problem.covector.as_deref())
}

fn hypotheses_json(h: &HypothesisReport) -> Value {
    h.entries()
        .iter()
        .map(|(k, entry)| (k.to_string(), json!({"status": entry.status.to_string(), "witness": entry.witness})))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

pub fn cmd_degenerate(problem: &ProblemFile, ov: Overrides) -> Result<CommandOutput> {
    let (d, _) = resolve(problem, ov)?;
    let spec = build_spec(problem, d)?;
    let fiber = special_fiber(&spec)?;
    let hyp = verify_hypotheses(&spec, problem.dim_h0)?;
    let coords: Value = family_coordinates(&spec)
        .iter()
        .zip(&spec.lifts)
        .map(|(c, l)| json!({"label": c.label, "exponents": l.exponents, "weight": c.weight, "formula": c.formula}))
        .collect();
    let basis: Value = spec
        .basis
        .elements()
        .iter()
        .zip(spec.basis.values())
        .zip(&spec.weights.weights)
        .map(|(((deg, f), v), w)| json!({"degree": deg, "element": f.to_string(), "value": v.to_string(), "weight": w}))
        .collect();
    let value = json!({
        "command": "degenerate",
        "exact": {
            "d": d,
            "dim_ed": spec.dim_ed,
            "basis": basis,
            "covector": spec.weights.covector,
            "coordinates": coords,
            "w0": fiber.w0.points.iter().map(|(e, c)| json!({"point": e, "class": c})).collect::<Vec<_>>(),
            "delta0": polytope_json(&fiber.delta0),
            "delta0_lattice": lattice_json(&fiber.delta0_lattice),
            "strict_inclusion": fiber.strict_inclusion,
            "matches_scaled_body": fiber.matches_scaled_body,
            "torus_weights": fiber.torus_weights,
            "hypotheses": hypotheses_json(&hyp),
            "value_mismatches": spec.value_mismatches()?,
            "weight_collisions": spec.weight_collisions(),
            "distinct_values": distinct_coordinate_values(&spec)?,
        },
    });
    Ok(CommandOutput::json("degenerate", value, 0))
}

pub fn cmd_verify(problem: &ProblemFile, ov: Overrides) -> Result<CommandOutput> {
    let (d, _) = resolve(problem, ov)?;
    let spec = build_spec(problem, d)?;
    let hyp = verify_hypotheses(&spec, problem.dim_h0)?;
    let mismatches = spec.value_mismatches()?;
    let distinct = distinct_coordinate_values(&spec)?;
    let failed = hyp.entries().iter().any(|(_, e)| e.status == Status::Fail) || !mismatches.is_empty() || !distinct;
    let value = json!({
        "command": "verify",
        "exact": {
            "d": d,
            "hypotheses": hypotheses_json(&hyp),
            "value_mismatches": mismatches,
            "distinct_values": distinct,
            "pass": !failed,
        },
    });
    Ok(CommandOutput::json("verify", value, if failed { 3 } else { 0 }))
}

pub fn cmd_quantize(problem: &ProblemFile, ov: Overrides) -> Result<CommandOutput> {
    let (d, _) = resolve(problem, ov)?;
    let mut config = problem
        .quantize
        .clone()
        .ok_or_else(|| Error::Config("the problem file has no [quantize] table".into()))?;
    if let Some(r) = ov.resolution {
        config.resolution = r;
    }
    config.validate()?;
    let spec = build_spec(problem, d)?;
    let fiber = special_fiber(&spec)?;
    let grid = Arc::new(QuadratureGrid::new(&fiber.delta0, config.resolution)?);
    let report = convergence_run(&grid, &fiber.w0, &config)?;
    let csv = report.to_csv();
    let mut summary = format!("delta0 = {}, d = {d}, nodes = {}\n", fiber.delta0.summary(), grid.len());
    summary.push_str(&report.summary());
    let mut text = csv.clone();
    for line in summary.lines() {
        text.push_str("# ");
        text.push_str(line);
        text.push('\n');
    }
    Ok(CommandOutput {
        report: text,
        files: vec![("trace.csv".into(), csv), ("summary.txt".into(), summary)],
        exit_code: 0,
    })
}
