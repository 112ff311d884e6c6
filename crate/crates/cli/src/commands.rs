use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::Args;
use serde_json::json;

use hyperdisc::adjoint::{calibrate, write_history, CalibrationProblem};
use hyperdisc::fem::{synth_dic, DicDataset, Mesh2D};
use hyperdisc::io::{read_labeled, write_labeled};
use hyperdisc::kinematics::{InvariantTriplet, LoadingMode};
use hyperdisc::materials::{AnalyticSet, Potential};
use hyperdisc::matpoint::{run_validation, uniaxial_curve};
use hyperdisc::model::{load_model, save_model, AnyModel};
use hyperdisc::pann::{IcnnConfig, SparseModel, Variant};
use hyperdisc::polyconvexity::{indicator, violation_fractions};
use hyperdisc::sampling::{canonical_range, canonical_test_data, label_with, sample_triplets, TripletSet};
use hyperdisc::training::{pretrain, write_telemetry, LabeledSample, PretrainConfig};

use crate::config::RunConfig;
use crate::manifest::{sha256_hex, Manifest};
use crate::{Cli, Command};

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// Reference material: gent-gent, neo-hookean or ogden.
    #[arg(long, default_value = "gent-gent")]
    pub material: String,
}

#[derive(Debug, Args)]
pub struct PretrainArgs {
    /// Labeled-data CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// polyconvex, relaxed, unconstrained or all.
    #[arg(long, default_value = "all")]
    pub variant: String,
}

#[derive(Debug, Args)]
pub struct IndicatorArgs {
    /// Model file or built-in name (gent-gent, neo-hookean, ogden, set1, set2, set3).
    #[arg(long)]
    pub model: String,
    /// Labeled-data CSV whose invariant triplets are checked.
    #[arg(long)]
    pub data: PathBuf,
    /// Values above `-tol` count as satisfied.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Model file or built-in name.
    #[arg(long)]
    pub model: String,
    /// Reference material or model.
    #[arg(long, default_value = "gent-gent")]
    pub truth: String,
}

#[derive(Debug, Args)]
pub struct SynthDicArgs {
    /// Reference material or model.
    #[arg(long, default_value = "neo-hookean")]
    pub material: String,
    /// Mesh JSON; the configured specimen when omitted.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Noise amplitude relative to the peak displacement of each frame.
    #[arg(long)]
    pub noise: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    /// Starting model file or built-in name.
    #[arg(long, default_value = "set2")]
    pub model: String,
    /// Full-field dataset JSON.
    #[arg(long)]
    pub dic: PathBuf,
    /// Mesh JSON; the configured specimen when omitted.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Force-misfit weight, or `auto` to balance it at the start.
    #[arg(long, default_value = "auto")]
    pub alpha1: String,
    /// Calibrated model output (default `<out-dir>/calibrated.json`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Iteration history CSV (default `<out-dir>/history.csv`).
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory with manifests; defaults to the output directory.
    #[arg(long)]
    pub run_dir: Option<PathBuf>,
}

struct Ctx<'a> {
    cfg: RunConfig,
    seed: u64,
    out: &'a Path,
    outputs: Vec<String>,
}

impl Ctx<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.out.join(name)
    }

    fn create(&mut self, name: &str) -> anyhow::Result<BufWriter<File>> {
        let p = self.path(name);
        Ok(BufWriter::new(File::create(&p).with_context(|| format!("creating {}", p.display()))?))
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    let cfg = RunConfig::load(cli.global.config.as_deref())?;
    let out = &cli.global.out_dir;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let config_hash = sha256_hex(serde_json::to_string(&cfg)?.as_bytes());
    let mut ctx = Ctx { cfg, seed: cli.global.seed, out, outputs: Vec::new() };
    let (name, summary) = match &cli.command {
        Command::Sample => ("sample", sample(&mut ctx)?),
        Command::GenData(a) => ("gen-data", gen_data(&mut ctx, a)?),
        Command::Pretrain(a) => ("pretrain", pretrain_cmd(&mut ctx, a)?),
        Command::Indicator(a) => ("indicator", indicator_cmd(&mut ctx, a)?),
        Command::Validate(a) => ("validate", validate(&mut ctx, a)?),
        Command::Mesh => ("mesh", mesh_cmd(&mut ctx)?),
        Command::SynthDic(a) => ("synth-dic", synth_dic_cmd(&mut ctx, a)?),
        Command::Transfer(a) => ("transfer", transfer(&mut ctx, a)?),
        Command::Report(a) => ("report", report(&mut ctx, a)?),
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Manifest {
        command: name.into(),
        seed: ctx.seed,
        config_hash,
        version: env!("CARGO_PKG_VERSION").into(),
        outputs: ctx.outputs,
        summary,
    }
    .write(out)
}

/// Built-in material or pretrained set, or a model file.
pub fn resolve_model(spec: &str) -> anyhow::Result<AnyModel> {
    let shipped = AnalyticSet::shipped();
    let set = |v| AnyModel::sparse(SparseModel::pretrained(v)).normalized();
    Ok(match spec {
        "gent-gent" => AnyModel::gent_gent(shipped.gent_gent).normalized(),
        "neo-hookean" => AnyModel::neo_hookean(shipped.neo_hookean).normalized(),
        "ogden" => AnyModel::ogden(shipped.ogden).normalized(),
        "set1" => set(Variant::Polyconvex),
        "set2" => set(Variant::Relaxed),
        "set3" => set(Variant::Unconstrained),
        path => load_model(Path::new(path)).with_context(|| format!("loading model `{path}`"))?,
    })
}

fn label_of(spec: &str) -> String {
    let stem = Path::new(spec).file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
    stem.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn load_mesh(ctx: &Ctx<'_>, path: Option<&Path>) -> anyhow::Result<Mesh2D> {
    Ok(match path {
        Some(p) => Mesh2D::read(p).with_context(|| format!("reading mesh {}", p.display()))?,
        None => ctx.cfg.mesh.build()?,
    })
}

fn read_data(path: &Path) -> anyhow::Result<Vec<LabeledSample>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_labeled(BufReader::new(f))?)
}

fn triplets(ctx: &Ctx<'_>) -> anyhow::Result<TripletSet> {
    Ok(sample_triplets(&ctx.cfg.sampler, &ctx.cfg.sa, ctx.seed)?)
}

fn sample(ctx: &mut Ctx<'_>) -> anyhow::Result<serde_json::Value> {
    let set = triplets(ctx)?;
    let mut w = ctx.create("triplets.csv")?;
    writeln!(w, "i1,i2,j,source")?;
    for (t, s) in set.selection.points.iter().zip(&set.selection.source) {
        let src = s.map_or_else(|| "anchor".to_string(), |i| i.to_string());
        writeln!(w, "{},{},{},{src}", t.i1, t.i2, t.j)?;
    }
    w.flush()?;
    let sel = &set.selection;
    Ok(json!({
        "points": sel.points.len(),
        "d_min": sel.d_min,
        "mean_nn": sel.mean_nn,
        "objective": sel.objective,
        "iterations": sel.iterations,
    }))
}

fn gen_data(ctx: &mut Ctx<'_>, a: &GenDataArgs) -> anyhow::Result<serde_json::Value> {
    let truth = resolve_model(&a.material)?;
    let set = triplets(ctx)?;
    let mut data = label_with(&truth, &set.selection.points)?;
    for (s, f) in data.iter_mut().zip(&set.sources) {
        s.f = *f;
    }
    let mut w = ctx.create("labeled.csv")?;
    write_labeled(&mut w, &data)?;
    w.flush()?;
    let mut w = ctx.create("canonical.csv")?;
    writeln!(w, "mode,control,i1,i2,j,energy,s11,s22,s33,s12,s13,s23")?;
    for mode in LoadingMode::ALL {
        let (lo, hi) = canonical_range(mode);
        for p in canonical_test_data(&truth, mode, lo, hi, ctx.cfg.validate.steps)? {
            let s = p.s;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                mode.name(),
                p.control,
                p.t.i1,
                p.t.i2,
                p.t.j,
                p.energy,
                s[(0, 0)],
                s[(1, 1)],
                s[(2, 2)],
                s[(0, 1)],
                s[(0, 2)],
                s[(1, 2)]
            )?;
        }
    }
    w.flush()?;
    let range = |k: usize| {
        let v = data.iter().map(|s| s.s_diag[k]);
        [v.clone().fold(f64::INFINITY, f64::min), v.fold(f64::NEG_INFINITY, f64::max)]
    };
    Ok(json!({
        "material": truth.name(),
        "samples": data.len(),
        "d_min": set.selection.d_min,
        "s_range": [range(0), range(1), range(2)],
    }))
}

fn pretrain_cmd(ctx: &mut Ctx<'_>, a: &PretrainArgs) -> anyhow::Result<serde_json::Value> {
    let data = read_data(&a.data)?;
    let variants: Vec<Variant> = if a.variant == "all" { Variant::ALL.to_vec() } else { vec![a.variant.parse()?] };
    let sec = ctx.cfg.pretrain.clone();
    let mut out = serde_json::Map::new();
    for v in variants {
        let cfg = PretrainConfig {
            net: IcnnConfig { layers: sec.layers, hidden: sec.hidden, variant: v },
            schedule: sec.schedule(),
            seed: ctx.seed,
            test_fraction: sec.test_fraction,
            input_penalty: sec.input_penalty,
            gate_init: sec.gate_init,
        };
        let ckpt = ctx.path(&format!("checkpoint_{}.json", v.name()));
        let res = pretrain(&cfg, &data, Some(&ckpt))?;
        ctx.outputs.pop();
        save_model(&res.model, &ctx.path(&format!("pretrained_{}.json", v.name())))?;
        res.dense_file().write(&ctx.path(&format!("dense_{}.json", v.name())))?;
        let mut w = ctx.create(&format!("telemetry_{}.csv", v.name()))?;
        write_telemetry(&mut w, &res.telemetry)?;
        w.flush()?;
        out.insert(
            v.name().into(),
            json!({
                "r2_train": res.r2_train,
                "r2_test": res.r2_test,
                "closed_fraction": res.closed_fraction,
                "initial_params": res.extraction.initial,
                "surviving_params": res.extraction.surviving,
                "formula": res.model.formula(),
            }),
        );
    }
    Ok(out.into())
}

fn indicator_cmd(ctx: &mut Ctx<'_>, a: &IndicatorArgs) -> anyhow::Result<serde_json::Value> {
    let m = resolve_model(&a.model)?;
    let pts: Vec<InvariantTriplet> = read_data(&a.data)?.iter().map(|s| s.t).collect();
    let mut w = ctx.create(&format!("indicator_{}.csv", label_of(&a.model)))?;
    writeln!(w, "i1,i2,j,g1,g2,g_j")?;
    for t in &pts {
        let g = indicator(&m, t)?;
        writeln!(w, "{},{},{},{},{},{}", t.i1, t.i2, t.j, g.g1, g.g2, g.g_j)?;
    }
    w.flush()?;
    let [f1, f2, fj] = violation_fractions(&m, &pts, a.tol)?;
    Ok(json!({ "model": m.name(), "points": pts.len(), "violations": { "i1": f1, "i2": f2, "j": fj } }))
}

fn validate(ctx: &mut Ctx<'_>, a: &ValidateArgs) -> anyhow::Result<serde_json::Value> {
    let m = resolve_model(&a.model)?;
    let truth = resolve_model(&a.truth)?;
    let label = label_of(&a.model);
    let report = run_validation(&m, &truth, &LoadingMode::ALL, canonical_range, ctx.cfg.validate.steps)?;
    let mut w = ctx.create(&format!("validation_{label}.csv"))?;
    report.write_csv(&mut w)?;
    w.flush()?;
    let v = &ctx.cfg.validate;
    let lambdas: Vec<f64> =
        (0..=v.uniaxial_steps).map(|k| 1.0 + (v.uniaxial_max - 1.0) * k as f64 / v.uniaxial_steps as f64).collect();
    let mine = uniaxial_curve(&m, &lambdas)?;
    let want = uniaxial_curve(&truth, &lambdas)?;
    let mut w = ctx.create(&format!("uniaxial_{label}.csv"))?;
    writeln!(w, "lambda,model_lambda2,model_s11,truth_lambda2,truth_s11")?;
    for (p, q) in mine.iter().zip(&want) {
        writeln!(w, "{},{},{},{},{}", p.lambda, p.lambda2, p.s11, q.lambda2, q.s11)?;
    }
    w.flush()?;
    let scores: serde_json::Map<String, serde_json::Value> = report
        .scores
        .iter()
        .map(|s| (s.mode.name().to_string(), json!({ "r2_inside": s.r2_inside, "r2_outside": s.r2_outside })))
        .collect();
    Ok(json!({ "model": m.name(), "truth": truth.name(), "scores": scores }))
}

fn mesh_cmd(ctx: &mut Ctx<'_>) -> anyhow::Result<serde_json::Value> {
    let mesh = load_mesh(ctx, None)?;
    mesh.write(&ctx.path("mesh.json"))?;
    let mut w = ctx.create("mesh.vtk")?;
    mesh.write_vtk(&mut w, &[])?;
    w.flush()?;
    Ok(json!({ "nodes": mesh.n_nodes(), "elements": mesh.elements.len(), "boundary_edges": mesh.boundary_edges().len() }))
}

fn synth_dic_cmd(ctx: &mut Ctx<'_>, a: &SynthDicArgs) -> anyhow::Result<serde_json::Value> {
    let m = resolve_model(&a.material)?;
    let mesh = load_mesh(ctx, a.mesh.as_deref())?;
    let mut noise = ctx.cfg.noise;
    if let Some(n) = a.noise {
        noise.relative_amplitude = n;
    }
    let ds = synth_dic(&mesh, &m, &ctx.cfg.load, &noise, ctx.seed)?;
    ds.write(&ctx.path("dic.json"))?;
    if let Some(last) = ds.steps.last() {
        let mut w = ctx.create("dic_last.vtk")?;
        mesh.write_vtk(&mut w, &[("u", &last.u)])?;
        w.flush()?;
    }
    let steps: Vec<_> = ds.steps.iter().map(|s| json!({ "strain": s.strain, "force": s.force })).collect();
    Ok(json!({ "material": m.name(), "elements": mesh.elements.len(), "steps": steps }))
}

fn transfer(ctx: &mut Ctx<'_>, a: &TransferArgs) -> anyhow::Result<serde_json::Value> {
    let model = resolve_model(&a.model)?;
    let mesh = load_mesh(ctx, a.mesh.as_deref())?;
    let dic = DicDataset::read(&a.dic).with_context(|| format!("reading {}", a.dic.display()))?;
    let mut weights = ctx.cfg.calibration.clone();
    weights.alpha1 = match a.alpha1.as_str() {
        "auto" => None,
        v => Some(v.parse().map_err(|_| anyhow!("--alpha1 expects `auto` or a number, got `{v}`"))?),
    };
    let problem = CalibrationProblem::new(&mesh, model.clone(), &dic, &weights)?;
    let res = calibrate(&problem, &model.params(), &ctx.cfg.lbfgs)?;
    let calibrated = model.with_params(&res.theta)?;
    let out = a.out.clone().unwrap_or_else(|| ctx.path("calibrated.json"));
    if a.out.is_some() {
        ctx.outputs.push(out.display().to_string());
    }
    save_model(&calibrated, &out)?;
    let hist = a.history.clone().unwrap_or_else(|| ctx.path("history.csv"));
    if a.history.is_some() {
        ctx.outputs.push(hist.display().to_string());
    }
    let mut w = BufWriter::new(File::create(&hist)?);
    write_history(&mut w, &res.history)?;
    w.flush()?;
    let first = &res.history[0];
    let last = res.history.last().unwrap_or(first);
    Ok(json!({
        "model": model.name(),
        "alpha1": problem.alpha1,
        "iterations": last.iteration,
        "reason": res.reason,
        "initial_displacement_misfit": first.displacement,
        "final_displacement_misfit": last.displacement,
        "theta": res.theta,
    }))
}

fn report(ctx: &mut Ctx<'_>, a: &ReportArgs) -> anyhow::Result<serde_json::Value> {
    let dir = a.run_dir.clone().unwrap_or_else(|| ctx.out.to_path_buf());
    let mut entries: Vec<PathBuf> = std::fs::read_dir(&dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("manifest_") && n != "manifest_report.json")
        })
        .collect();
    entries.sort();
    if entries.is_empty() {
        bail!("no manifests in {}", dir.display());
    }
    let mut rows = Vec::new();
    let mut md = String::from("# Run summary\n");
    for p in &entries {
        let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p)?)?;
        let cmd = m["command"].as_str().unwrap_or("?").to_string();
        md.push_str(&format!("\n## {cmd}\n\nseed {}, config {}\n\n", m["seed"], m["config_hash"]));
        let mut flat = Vec::new();
        flatten("", &m["summary"], &mut flat);
        md.push_str("| key | value |\n|---|---|\n");
        for (k, v) in flat {
            md.push_str(&format!("| {k} | {v} |\n"));
            rows.push((cmd.clone(), k, v));
        }
    }
    std::fs::write(ctx.path("summary.md"), md)?;
    let mut w = ctx.create("summary.csv")?;
    writeln!(w, "command,key,value")?;
    for (c, k, v) in &rows {
        writeln!(w, "{c},{k},\"{}\"", v.replace('"', "\"\""))?;
    }
    w.flush()?;
    Ok(json!({ "manifests": entries.len(), "rows": rows.len() }))
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut Vec<(String, String)>) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
