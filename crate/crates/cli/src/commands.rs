use std::fmt;
use std::fs;

use flatjet::calculus::{compose_jet, power_jet, AxisBox, JetOracle, PowerOracle};
use flatjet::finiteness::{
    finiteness_scan, fuzz_whitney_convexity, summarize, verify_witness, ScanOptions, ShapeFieldSpec,
    SurrogateOptions, MAX_SCAN_POINTS,
};
use flatjet::instance::{jet_to_map, FamilyMember, Instance};
use flatjet::norms::{sampled_norms, whitney_field_norm_parts, NormReport};
use flatjet::whitney::{whitney_decompose_with, whitney_extend_with, DecomposeOptions, Extension};
use flatjet::{Error, Jet, Smoothness};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::output::Run;
use crate::{Command, Common};

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> CliError {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: if e.is_numeric() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

struct Loaded {
    instance: Instance,
    run: Run,
}

fn load(name: &'static str, args: &Common) -> Result<Loaded> {
    let bytes = fs::read(&args.input)
        .map_err(|e| CliError::data(format!("reading {}: {e}", args.input.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::data(format!("{} is not UTF-8", args.input.display())))?;
    let mut instance = Instance::from_json(&text)
        .map_err(|e| CliError::data(format!("{}: {e}", args.input.display())))?;
    if let Some(s) = args.s {
        instance.s = s;
        instance.validate()?;
    }
    if let Some(g) = args.grid {
        if g == 0 {
            return Err(CliError::usage("--grid must be positive"));
        }
        instance.grid = Some(g);
    }
    if let Some(r) = args.r {
        instance.r = Some(r);
        instance.validate()?;
    }
    let run = Run::start(name, &args.input, &bytes, args.seed, &args.out)?;
    Ok(Loaded { instance, run })
}

pub fn run(command: &Command) -> Result<()> {
    match command {
        Command::Decompose(a) => decompose(a),
        Command::Extend(a) => extend(a),
        Command::EvalGrid(a) => eval_grid(a),
        Command::EvalJets(a) => eval_jets(a),
        Command::Norms(a) => norms(a),
        Command::Root(a) => root(a),
        Command::Fdb(a) => fdb(a),
        Command::Finiteness(a) => finiteness(a),
        Command::FuzzConvexity(a) => fuzz(a),
    }
}

fn decompose_options(args: &Common) -> DecomposeOptions {
    let mut options = DecomposeOptions::default();
    if let Some(level) = args.max_level {
        options.max_level = level;
    }
    options
}

fn default_grid(n: usize) -> usize {
    match n {
        1 => 257,
        2 => 65,
        3 => 17,
        _ => 9,
    }
}

/// Uniform grid with `grid` points per axis, endpoints included.
fn grid_points(bx: &AxisBox, grid: usize) -> Vec<Vec<f64>> {
    let n = bx.dim();
    let axis = |k: usize, i: usize| {
        if grid == 1 {
            0.5 * (bx.lo[k] + bx.hi[k])
        } else {
            bx.lo[k] + (bx.hi[k] - bx.lo[k]) * i as f64 / (grid - 1) as f64
        }
    };
    let total = grid.pow(n as u32);
    (0..total)
        .map(|mut flat| {
            let mut x = vec![0.0; n];
            for (k, xk) in x.iter_mut().enumerate() {
                *xk = axis(k, flat % grid);
                flat /= grid;
            }
            x
        })
        .collect()
}

fn coordinate_header(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("x{k}")).collect()
}

fn build_extension(inst: &Instance, args: &Common) -> Result<(Extension, Smoothness)> {
    let s = inst.smoothness()?;
    let field = inst.field()?;
    let ext = whitney_extend_with(&field, s, &inst.bound_box(), decompose_options(args))?;
    Ok((ext, s))
}

fn decompose(args: &Common) -> Result<()> {
    let Loaded { instance, mut run } = load("decompose", args)?;
    let d = whitney_decompose_with(&instance.points(), &instance.bound_box(), decompose_options(args))?;
    run.json(
        "decomposition.json",
        &json!({
            "n": d.dim(),
            "region": d.region(),
            "deepest_level": d.deepest_level(),
            "cube_count": d.len(),
            "cubes": d.dump(),
        }),
    )?;
    run.finish()
}

#[derive(Serialize)]
struct PointMatch {
    x: Vec<f64>,
    error: f64,
}

fn extend(args: &Common) -> Result<()> {
    let Loaded { instance, mut run } = load("extend", args)?;
    let (ext, _) = build_extension(&instance, args)?;
    let grid = instance.grid.unwrap_or_else(|| default_grid(instance.n));
    let xs = grid_points(&instance.bound_box(), grid);
    let values = xs
        .par_iter()
        .map(|x| ext.value(x))
        .collect::<flatjet::Result<Vec<f64>>>()?;
    let rows: Vec<Vec<f64>> = xs
        .iter()
        .zip(&values)
        .map(|(x, &v)| x.iter().copied().chain([v]).collect())
        .collect();
    let mut header = coordinate_header(instance.n);
    header.push("F".into());
    run.csv("extension_grid.csv", &header, &rows)?;

    let mut points = Vec::new();
    let mut scale = 0.0f64;
    for p in ext.field().jets() {
        let got = ext.jet(p.basepoint(), p.degree())?;
        points.push(PointMatch {
            x: p.basepoint().to_vec(),
            error: got.max_coeff_diff(p)?,
        });
        scale = scale.max(p.coeffs().values().fold(0.0, |a, c| a.max(c.abs())));
    }
    let max_error = points.iter().map(|p| p.error).fold(0.0, f64::max);
    run.json(
        "jet_match.json",
        &json!({
            "max_error": max_error,
            "normalized_max_error": if scale > 0.0 { max_error / scale } else { max_error },
            "min_grid_value": values.iter().copied().fold(f64::INFINITY, f64::min),
            "points": points,
        }),
    )?;
    run.finish()
}

fn eval_grid(args: &Common) -> Result<()> {
    let Loaded { instance, mut run } = load("eval-grid", args)?;
    let (ext, s) = build_extension(&instance, args)?;
    let d = s.floor();
    let grid = instance.grid.unwrap_or_else(|| default_grid(instance.n));
    let xs = grid_points(&instance.bound_box(), grid);
    let rows = xs
        .par_iter()
        .map(|x| {
            let jet = ext.jet(x, d)?;
            Ok(x.iter().copied().chain(jet.order_norms()).collect())
        })
        .collect::<flatjet::Result<Vec<Vec<f64>>>>()?;
    let mut header = coordinate_header(instance.n);
    header.push("F".into());
    header.extend((1..=d).map(|m| format!("grad{m}")));
    run.csv("eval_grid.csv", &header, &rows)?;
    run.finish()
}

fn eval_jets(args: &Common) -> Result<()> {
    let Loaded { instance, mut run } = load("eval-jets", args)?;
    let points = instance
        .eval_points
        .clone()
        .ok_or_else(|| CliError::data("eval-jets needs `eval_points` in the instance"))?;
    let (ext, s) = build_extension(&instance, args)?;
    let jets = points
        .iter()
        .map(|x| Ok(json!({"x": x, "jet": jet_to_map(&ext.jet(x, s.floor())?)})))
        .collect::<flatjet::Result<Vec<_>>>()?;
    run.json("eval_jets.json", &jets)?;
    run.finish()
}

fn family_box(instance: &Instance) -> AxisBox {
    instance
        .bound_box
        .clone()
        .unwrap_or_else(|| AxisBox::cube(instance.n, -1.0, 1.0))
}

#[derive(Serialize)]
struct MemberNorms<'a> {
    member: &'a FamilyMember,
    norms: NormReport,
}

fn norms(args: &Common) -> Result<()> {
    let Loaded { instance, mut run } = load("norms", args)?;
    let s = instance.smoothness()?;
    let grid = instance.grid.unwrap_or_else(|| default_grid(instance.n));
    let bx = family_box(&instance);
    let mut members = Vec::new();
    for m in &instance.family {
        members.push(MemberNorms {
            member: m,
            norms: sampled_norms(m.oracle()?.as_ref(), &bx, grid, s)?,
        });
    }
    let field = if instance.points.is_empty() {
        None
    } else {
        let parts = whitney_field_norm_parts(&instance.field()?, s)?;
        Some(json!({
            "sup": parts.sup,
            "pair": parts.pair,
            "flat": float_or_inf(parts.flat),
            "total": float_or_inf(parts.total()),
        }))
    };
    run.json(
        "norms.json",
        &json!({"s": s.s(), "grid": grid, "box": bx, "family": members, "field": field}),
    )?;
    run.finish()
}

fn float_or_inf(v: f64) -> serde_json::Value {
    if v.is_infinite() {
        json!("inf")
    } else {
        json!(v)
    }
}

fn root(args: &Common) -> Result<()> {
    let Loaded { instance, mut run } = load("root", args)?;
    let s = instance.smoothness()?;
    let r = instance
        .r
        .ok_or_else(|| CliError::data("root needs an exponent: `r` in the instance or --r"))?;
    if r > 1.0 {
        return Err(CliError::data(format!("exponent r = {r} must lie in (0, 1]")));
    }
    let rs = Smoothness::new(r * s.s())?;
    let grid = instance.grid.unwrap_or_else(|| default_grid(instance.n));
    let bx = family_box(&instance);
    let mut members = Vec::new();
    let mut max_ratio = 0.0f64;
    for m in &instance.family {
        let f = m.oracle()?;
        let base = sampled_norms(f.as_ref(), &bx, grid, s)?;
        let root_fn = PowerOracle::new(f, r)?;
        let powered = sampled_norms(&root_fn as &dyn JetOracle, &bx, grid, rs)?;
        let ratio = if powered.fs == 0.0 {
            0.0
        } else {
            powered.fs / base.fs.powf(r)
        };
        max_ratio = max_ratio.max(ratio);
        members.push(json!({
            "member": m,
            "fs": float_or_inf(base.fs),
            "fs_root": float_or_inf(powered.fs),
            "ratio": float_or_inf(ratio),
        }));
    }
    run.json(
        "root.json",
        &json!({
            "s": s.s(),
            "r": r,
            "rs": rs.s(),
            "grid": grid,
            "box": bx,
            "members": members,
            "max_ratio": float_or_inf(max_ratio),
        }),
    )?;
    run.finish()
}

fn fdb(args: &Common) -> Result<()> {
    let Loaded { instance, mut run } = load("fdb", args)?;
    let input: Jet = instance
        .jet
        .clone()
        .ok_or_else(|| CliError::data("fdb needs `jet` in the instance"))?;
    let (output, r) = if args.identity {
        let id = |k: usize, t: f64| match k {
            0 => t,
            1 => 1.0,
            _ => 0.0,
        };
        (compose_jet(&input, &id), None)
    } else {
        let r = instance
            .r
            .ok_or_else(|| CliError::data("fdb needs `r` in the instance, --r, or --identity"))?;
        (power_jet(&input, r)?, Some(r))
    };
    run.json("fdb.json", &json!({"r": r, "identity": args.identity, "input": input, "output": output}))?;
    run.finish()
}

fn shape_spec(instance: &Instance, args: &Common) -> Result<ShapeFieldSpec> {
    let mut points = instance.points();
    let mut values = instance.values()?;
    if let Some(size) = args.sample {
        if size == 0 || size > MAX_SCAN_POINTS {
            return Err(CliError::usage(format!("--sample must be in 1..={MAX_SCAN_POINTS}")));
        }
        if points.len() > size {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let mut chosen = sample(&mut rng, points.len(), size).into_vec();
            chosen.sort_unstable();
            points = chosen.iter().map(|&i| points[i].clone()).collect();
            values = chosen.iter().map(|&i| values[i]).collect();
        }
    }
    Ok(ShapeFieldSpec::new(points, values, instance.smoothness()?)?)
}

fn finiteness(args: &Common) -> Result<()> {
    let Loaded { instance, mut run } = load("finiteness", args)?;
    let spec = shape_spec(&instance, args)?;
    let mut surrogate = SurrogateOptions::default();
    if let Some(b) = args.budget {
        surrogate.budget = b;
    }
    let report = finiteness_scan(
        &spec,
        ScanOptions {
            k: args.k,
            c_cap: args.c_cap,
            surrogate,
        },
    )?;
    run.json("finiteness.json", &report)?;
    run.finish()
}

fn fuzz(args: &Common) -> Result<()> {
    let Loaded { instance, mut run } = load("fuzz-convexity", args)?;
    let spec = shape_spec(&instance, args)?;
    let witnesses = fuzz_whitney_convexity(&spec, args.trials, args.seed)?;
    let failures: Vec<String> = witnesses
        .iter()
        .filter_map(|w| verify_witness(w, spec.smoothness()).err())
        .collect();
    run.json(
        "fuzz.json",
        &json!({
            "seed": args.seed,
            "summary": summarize(&witnesses),
            "verification_failures": failures,
            "witnesses": witnesses,
        }),
    )?;
    run.finish()
}
