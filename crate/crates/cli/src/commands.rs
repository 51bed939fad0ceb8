use std::fmt::Write as _;

use num_complex::Complex64;
use serde_json::{json, Value};
use tlm_core::interp::{
    boundary_lipschitz, derivative_convergence, lipschitz_spread, sum_space_proxy, AnalyticFamily,
    FamilyKind, InterpSetup, DEFAULT_NODES, LIPSCHITZ_SPREAD,
};
use tlm_core::io::{read_grid_function, write_atomic};
use tlm_core::morrey::{morrey_norm_of_magnitudes, morrey_scan};
use tlm_core::report::{Baseline, VerificationReport, REPORT_SCHEMA_VERSION};
use tlm_core::smoothness::{
    diamond_criterion, diamond_tail, persistent_block_profile, Blocks, DiamondVerdict, SpaceParams,
};
use tlm_core::suites::{calibrate, derive_seed, run_suites, standard_setups, Suite, SuiteConfig};
use tlm_core::{
    random_bandlimited, BallSampler, Error, Flavor, GridFunction, GridSpec, LebesguePair, LpFamily,
    WindowShape,
};

use crate::{
    CalibrateArgs, Command, DiamondArgs, Failure, Family, Format, GridArgs, InputArgs, InterpArgs,
    MorreyArgs, OutputArgs, Radii, Sample, SamplerArgs, SuiteArgs, TlmArgs, Windows,
};

type Outcome = Result<bool, Failure>;

pub(crate) fn run(command: Command) -> Outcome {
    match command {
        Command::VerifyAll(a) => suites(&Suite::ALL, "verify-all", a),
        Command::ScalarSuite(a) => suites(
            &[Suite::ScalarExact, Suite::ScalarConstants],
            "scalar-suite",
            a,
        ),
        Command::MaximalSuite(a) => suites(&[Suite::Maximal], "maximal-suite", a),
        Command::Calibrate(a) => calibrate_cmd(a),
        Command::MorreyNorm(a) => morrey_cmd(a),
        Command::TlmNorm(a) => tlm_cmd(a),
        Command::DiamondCheck(a) => diamond_cmd(a),
        Command::InterpDemo(a) => interp_cmd(a),
    }
}

fn grid_spec(grid: &GridArgs) -> Result<GridSpec, Failure> {
    Ok(GridSpec::new(grid.dim, grid.points, grid.length)?)
}

fn radii_values(radii: &Radii, spec: &GridSpec, shape: WindowShape) -> Option<Vec<f64>> {
    match radii {
        Radii::Dyadic => None,
        Radii::Linear => Some(BallSampler::linear(spec, shape).radii().to_vec()),
        Radii::List(v) => Some(v.clone()),
    }
}

fn suite_config(
    grid: &GridArgs,
    windows: Windows,
    radii: &Radii,
    functions: usize,
    baseline_tolerance: f64,
) -> Result<SuiteConfig, Failure> {
    let spec = grid_spec(grid)?;
    let shape = windows.into();
    let cfg = SuiteConfig {
        dim: grid.dim,
        points: grid.points,
        length: grid.length,
        j_max: grid.j_max,
        seed: grid.seed,
        functions,
        shape,
        radii: radii_values(radii, &spec, shape),
        baseline_tolerance,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Drops wall-clock fields so identical runs print identical bytes.
fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.retain(|k, _| !k.ends_with("runtime_s"));
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn emit_text(text: &str, out: &OutputArgs) -> Result<(), Failure> {
    match &out.out {
        Some(path) => write_atomic(path, text.as_bytes()).map_err(Failure::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(mut value: Value, out: &OutputArgs) -> Result<(), Failure> {
    if !out.timing {
        strip_timing(&mut value);
    }
    let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
    text.push('\n');
    emit_text(&text, out)
}

fn suites(which: &[Suite], name: &str, a: SuiteArgs) -> Outcome {
    let cfg = suite_config(
        &a.grid,
        a.windows,
        &a.radii,
        a.functions,
        a.baseline_tolerance,
    )?;
    let baseline = match &a.baseline {
        Some(path) => Baseline::load(path)?,
        None => Baseline::bundled(),
    };
    let report = run_suites(which, name, &cfg, Some(&baseline))?;
    summarize(&report);
    emit(
        serde_json::to_value(&report).expect("report serializes"),
        &a.output,
    )?;
    Ok(report.all_passed())
}

fn summarize(report: &VerificationReport) {
    let t = report.summary;
    eprintln!(
        "{}: {}/{} passed, {} failed, {} not decided",
        report.suite, t.passed, t.total, t.failed, t.not_decided
    );
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!(
            "  {:?} {} (lhs {:.6e}, rhs {:.6e})",
            c.verdict, c.check, c.lhs, c.rhs
        );
    }
}

fn calibrate_cmd(a: CalibrateArgs) -> Outcome {
    let cfg = suite_config(&a.grid, a.windows, &a.radii, a.functions, 0.0)?;
    // Check before the (long) run so a refusal is immediate.
    if a.out.exists() && !a.force {
        return Err(Error::BaselineExists(a.out.display().to_string()).into());
    }
    let date = a
        .date
        .unwrap_or_else(|| chrono::Local::now().format("%Y-%m-%d").to_string());
    let baseline = calibrate(&cfg, &date)?;
    baseline.save(&a.out, a.force)?;
    eprintln!(
        "wrote {} constants to {}",
        baseline.constants.len(),
        a.out.display()
    );
    Ok(true)
}

/// The function under study and a short description of where it came from.
fn load_function(
    grid: &GridArgs,
    input: &InputArgs,
    default: Sample,
    profile: (f64, f64),
) -> Result<(GridFunction, Value), Failure> {
    if let Some(path) = &input.input {
        let f = read_grid_function(path)?;
        return Ok((f, json!({"file": path.display().to_string()})));
    }
    let spec = grid_spec(grid)?;
    match input.sample.unwrap_or(default) {
        Sample::BallIndicator => {
            if !(input.sample_radius > 0.0) {
                return Err(Failure::Usage("sample radius > 0".into()));
            }
            let f = GridFunction::ball_indicator(spec, input.sample_radius);
            Ok((
                f,
                json!({"sample": "ball-indicator", "radius": input.sample_radius}),
            ))
        }
        Sample::Random => {
            let band = input.band.unwrap_or(grid.j_max as i32 - 1);
            let seed = derive_seed(grid.seed, "cli.sample", 0);
            let f = random_bandlimited(spec, band, seed, true)?;
            Ok((
                f,
                json!({"sample": "random", "band": band, "seed": grid.seed}),
            ))
        }
        Sample::PersistentBlock => {
            let family = LpFamily::build(spec, grid.j_max, Flavor::Plain)?;
            let f = persistent_block_profile(&family, profile.0, profile.1)?;
            Ok((f, json!({"sample": "persistent-block"})))
        }
    }
}

fn sampler(
    args: &SamplerArgs,
    spec: &GridSpec,
    windows: Windows,
    radii: Radii,
) -> Result<BallSampler, Failure> {
    let shape: WindowShape = args.windows.unwrap_or(windows).into();
    let radii = args.radii.clone().unwrap_or(radii);
    let s = match radii_values(&radii, spec, shape) {
        Some(r) => BallSampler::new(r, args.stride, shape)?,
        None => BallSampler::dyadic(spec, shape).with_stride(args.stride)?,
    };
    s.validate(spec)?;
    Ok(s)
}

fn sampler_json(s: &BallSampler) -> Value {
    json!({
        "shape": s.shape(),
        "radii": s.radii().len(),
        "min_radius": s.radii().iter().cloned().fold(f64::INFINITY, f64::min),
        "max_radius": s.radii().iter().cloned().fold(0.0, f64::max),
        "center_stride": s.center_stride(),
    })
}

fn morrey_cmd(a: MorreyArgs) -> Outcome {
    let pq = LebesguePair::new(a.p, a.q)?;
    let (f, source) = load_function(&a.grid, &a.input, Sample::BallIndicator, (2.0, 0.0))?;
    let spec = *f.spec();
    let s = sampler(&a.sampler, &spec, Windows::Ball, Radii::Linear)?;
    let w = morrey_scan(&spec, &f.magnitudes(), pq, &s)?;
    emit(
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "command": "morrey-norm",
            "params": {"p": a.p, "q": a.q},
            "input": source,
            "sampler": sampler_json(&s),
            "value": w.value,
            "witness": {"radius": w.radius, "center": spec.unravel(w.center)[..spec.dim()].to_vec()},
        }),
        &a.output,
    )?;
    Ok(true)
}

fn space_params(p: f64, q: f64, r: f64, s: f64) -> Result<SpaceParams, Failure> {
    Ok(SpaceParams::new(p, q, r, s)?)
}

fn tlm_cmd(a: TlmArgs) -> Outcome {
    let sp = &a.space;
    let params = space_params(sp.p, sp.q, sp.r, sp.s)?;
    let (f, source) = load_function(&a.grid, &a.input, Sample::Random, (sp.r, sp.s))?;
    let spec = *f.spec();
    let s = sampler(&a.sampler, &spec, Windows::Cube, Radii::Dyadic)?;
    let family = LpFamily::build(spec, a.grid.j_max, Flavor::Plain)?;
    let blocks = Blocks::new(&f, &family)?;
    let mut norms = Vec::with_capacity(blocks.len());
    for j in 0..blocks.len() {
        let weight = 2f64.powf(j as f64 * params.s());
        let weighted: Vec<f64> = blocks.block(j).iter().map(|v| weight * v).collect();
        norms.push(morrey_norm_of_magnitudes(
            &spec,
            &weighted,
            params.pq(),
            &s,
        )?);
    }
    let value = blocks.tlm_norm(params, &s)?;
    if a.format == Format::Csv {
        let mut text = String::from("j,norm\n");
        for (j, v) in norms.iter().enumerate() {
            writeln!(text, "{j},{v:e}").expect("string write");
        }
        emit_text(&text, &a.output)?;
        return Ok(true);
    }
    emit(
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "command": "tlm-norm",
            "params": params,
            "input": source,
            "sampler": sampler_json(&s),
            "j": (0..norms.len()).collect::<Vec<_>>(),
            "norms": norms,
            "value": value,
            "verdict": "pass",
        }),
        &a.output,
    )?;
    Ok(true)
}

fn diamond_cmd(a: DiamondArgs) -> Outcome {
    let sp = &a.space;
    let params = space_params(sp.p, sp.q, sp.r, sp.s)?;
    let (f, source) = load_function(&a.grid, &a.input, Sample::Random, (sp.r, sp.s))?;
    let spec = *f.spec();
    let s = sampler(&a.sampler, &spec, Windows::Cube, Radii::Dyadic)?;
    let family = LpFamily::build(spec, a.grid.j_max, Flavor::Plain)?;
    let j_list =
        a.j.clone()
            .unwrap_or_else(|| (0..=family.j_max()).collect());
    let report = diamond_criterion(&f, &family, params, &s, &a.a, &j_list)?;
    let tails = (0..=family.j_max())
        .map(|n| diamond_tail(&f, &family, params, &s, n))
        .collect::<tlm_core::Result<Vec<f64>>>()?;
    let decided = report.verdict == DiamondVerdict::ConsistentWithMembership;
    if a.format == Format::Csv {
        let mut text = String::from("a,j,norm\n");
        for seq in &report.sequences {
            for (j, v) in seq.j.iter().zip(&seq.norms) {
                writeln!(text, "{},{j},{v:e}", seq.a).expect("string write");
            }
        }
        emit_text(&text, &a.output)?;
        return Ok(decided);
    }
    emit(
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "command": "diamond-check",
            "params": params,
            "input": source,
            "sampler": sampler_json(&s),
            "partial_sum_tails": {"n": (0..tails.len()).collect::<Vec<_>>(), "norms": tails},
            "sequences": report.sequences,
            "tolerance": report.tolerance,
            "verdict": report.verdict,
        }),
        &a.output,
    )?;
    Ok(decided)
}

fn interp_setup(a: &InterpArgs) -> Result<InterpSetup, Failure> {
    let ends = [a.p0, a.q0, a.r0, a.s0, a.p1, a.q1, a.r1, a.s1];
    if a.theta.is_none() && ends.iter().all(Option::is_none) {
        let all = standard_setups();
        return all.get(a.setup).copied().ok_or_else(|| {
            Failure::Usage(format!("setup index 0..{} (got {})", all.len(), a.setup))
        });
    }
    let names = ["p0", "q0", "r0", "s0", "p1", "q1", "r1", "s1"];
    let mut v = [0.0; 8];
    for ((slot, value), name) in v.iter_mut().zip(ends).zip(names) {
        *slot = value.ok_or_else(|| Failure::Usage(format!("--{name} is required")))?;
    }
    let theta = a
        .theta
        .ok_or_else(|| Failure::Usage("--theta is required".into()))?;
    Ok(InterpSetup::make(
        theta, v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7],
    )?)
}

fn interp_cmd(a: InterpArgs) -> Outcome {
    let setup = interp_setup(&a)?;
    let d = setup.derived();
    let (f, source) = load_function(&a.grid, &a.input, Sample::Random, (d.r(), d.s()))?;
    let spec = *f.spec();
    let s = sampler(&a.sampler, &spec, Windows::Cube, Radii::Dyadic)?;
    let family = LpFamily::build(spec, a.grid.j_max, Flavor::SquareRoot)?;
    let kind = match a.family {
        Family::Rho => FamilyKind::RhoWeighted,
        Family::Aggregate => FamilyKind::PartialAggregate,
    };
    let fam = AnalyticFamily::new(kind, setup, &f, &family, &s)?;
    let theta = setup.theta();
    let reconstruction = fam.reconstruction_error()?;

    let zs = [
        Complex64::new(theta, 0.0),
        Complex64::new(theta, 1.0),
        Complex64::new(theta, -2.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(0.0, -4.0),
        Complex64::new(1.0, 4.0),
    ];
    let mut samples = Vec::with_capacity(zs.len());
    for z in zs {
        let g = fam.family_g(z, DEFAULT_NODES)?;
        let split = sum_space_proxy(&g, &setup, &family, &s)?;
        samples.push(json!({"z": [z.re, z.im], "primitive_sum_norm": split}));
    }

    let pairs: Vec<(f64, f64)> = (0..5)
        .map(|i| {
            let d = 10f64.powf(-2.0 + 0.5 * i as f64);
            (-d / 2.0, d / 2.0)
        })
        .collect();
    let mut lipschitz = Vec::new();
    let mut spread_ok = true;
    for side in [0usize, 1] {
        let rows = boundary_lipschitz(&fam, side, &pairs, &s, DEFAULT_NODES)?;
        let spread = lipschitz_spread(&rows);
        spread_ok &= spread <= LIPSCHITZ_SPREAD;
        lipschitz.push(json!({"side": side, "samples": rows, "spread": spread}));
    }
    let h_max = theta.min(1.0 - theta).min(1e-2);
    let study = derivative_convergence(&fam, &[h_max, h_max / 10.0, h_max / 100.0], DEFAULT_NODES)?;

    let pass = reconstruction <= 1e-10 && spread_ok;
    emit(
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "command": "interp-demo",
            "setup": setup,
            "family": fam.kind(),
            "input": source,
            "sampler": sampler_json(&s),
            "scale": fam.scale(),
            "base_norm": fam.base_norm(),
            "z_samples": samples,
            "lipschitz": lipschitz,
            "derivative": study,
            "reconstruction_error": reconstruction,
            "pass": pass,
        }),
        &a.output,
    )?;
    Ok(pass)
}
