use std::f64::consts::PI;
use std::sync::Arc;

use anyhow::{bail, Result};
use needlet_core::cutoff::{
    assemble_cutoff, check_partition_of_unity, derivative_bound, estimate_derivative_norms, CutoffFunction, CutoffKind,
    DeltaSchedule,
};
use needlet_core::decay::{
    build_wavelet, compare_cutoffs, counterexample_suite, fit_bound, measure_envelope, BoundForm, DecayEnvelope,
    SamplingPlan, WaveletConfig,
};
use needlet_core::kernels::{Family, KernelInstance, TensorVariant};
use needlet_core::needlets::{build_needlet_system, random_band_limited, NeedletFamily, NeedletSystem};
use needlet_core::quadrature::{gauss_rule, verify_exactness, WeightId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::context::{parse_list, parse_variant, Ctx};
use crate::{CutoffCmd, DecayCmd, EnvelopeArgs, FrameArgs, KernelCmd, NeedletCmd, QuadArgs, QuadCmd, Status};

fn verdict(ok: bool) -> (&'static str, Status) {
    if ok {
        ("PASS", Status::Ok)
    } else {
        ("FAIL", Status::VerificationFailed)
    }
}

fn build_cutoff(ctx: &Ctx, default: CutoffKind) -> Result<Arc<CutoffFunction>> {
    Ok(Arc::new(assemble_cutoff(&ctx.cutoff_spec(default)?)?))
}

pub fn cutoff(ctx: &Ctx, cmd: CutoffCmd) -> Result<Status> {
    match cmd {
        CutoffCmd::Build => {
            let c = build_cutoff(ctx, CutoffKind::TypeA)?;
            let csv = ctx.write("cutoff.csv", &c.to_csv())?;
            ctx.write_json("cutoff.json", &serde_json::to_value(c.spec)?)?;
            println!(
                "cutoff build: type {} epsilon {} grid {} -> {}",
                c.spec.kind.tag(),
                c.spec.epsilon,
                c.spec.grid,
                csv.display()
            );
            Ok(Status::Ok)
        }
        CutoffCmd::Check { t_max, k_max } => {
            let c = build_cutoff(ctx, CutoffKind::TypeC)?;
            let tol = ctx.tolerance(1e-8);
            let kind = c.spec.kind;
            let mut shape = 0.0f64;
            for i in 0..=20_000 {
                let t = 3.0 * i as f64 / 20_000.0;
                let v = c.eval(t);
                if t >= 2.0 || (kind != CutoffKind::TypeA && t <= 0.5) {
                    shape = shape.max(v.abs());
                }
                if kind == CutoffKind::TypeA && t <= 1.0 {
                    shape = shape.max((v - 1.0).abs());
                }
                if kind == CutoffKind::TypeC && (1.0..=2.0).contains(&t) {
                    shape = shape.max((v * v + c.eval(t / 2.0).powi(2) - 1.0).abs());
                }
            }
            let partition = if kind == CutoffKind::TypeC { Some(check_partition_of_unity(&c, 1.0, t_max)?) } else { None };
            let derivs: Vec<_> = estimate_derivative_norms(&c, k_max)?
                .into_iter()
                .filter(|e| e.k >= 1)
                .map(|e| {
                    let bound = derivative_bound(c.spec.epsilon, e.k);
                    let within = e.spectral <= bound && (!e.reliable || e.finite_difference <= bound);
                    json!({"k": e.k, "spectral": e.spectral, "finite_difference": e.finite_difference,
                           "reliable": e.reliable, "bound": bound, "within_bound": within})
                })
                .collect();
            let derivs_ok = derivs.iter().all(|d| d["within_bound"] == json!(true));
            let ok = shape < tol && partition.map_or(true, |p| p < tol) && derivs_ok;
            let (word, status) = verdict(ok);
            ctx.write_json(
                "cutoff_check.json",
                &json!({"spec": c.spec, "shape_error": shape, "partition_deviation": partition,
                        "t_max": t_max, "tolerance": tol, "derivatives": derivs, "passed": ok}),
            )?;
            let pou = partition.map_or("n/a".to_string(), |p| format!("{p:.3e}"));
            println!(
                "cutoff check: type {} epsilon {}: partition deviation {pou}, shape error {shape:.3e}, derivative bound {}, {word}",
                kind.tag(),
                c.spec.epsilon,
                if derivs_ok { "held" } else { "violated" }
            );
            Ok(status)
        }
    }
}

fn parse_point(s: &str) -> Result<Vec<f64>> {
    parse_list::<f64>(s)
}

fn unbounded_radius(family: &Family, n: usize) -> f64 {
    let nf = n as f64;
    match family {
        Family::Laguerre { alpha } => (4.0 * nf + 2.0 * alpha.iter().cloned().fold(0.0, f64::max) + 2.0).sqrt() + 3.0,
        _ => (4.0 * nf + 2.0).sqrt() + 3.0,
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// A point drawn from the domain of `family`.
fn random_point(family: &Family, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let unit = |v: Vec<f64>| {
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.into_iter().map(|a| a / r).collect::<Vec<f64>>()
    };
    match family {
        Family::Trig => vec![rng.gen_range(-PI..PI)],
        Family::Chebyshev | Family::Jacobi { .. } => vec![rng.gen_range(0.0..PI).cos()],
        Family::Sphere { dim } => unit((0..=*dim).map(|_| gaussian(rng)).collect()),
        Family::Ball { dim, .. } => {
            let r = rng.gen::<f64>().powf(1.0 / *dim as f64);
            unit((0..*dim).map(|_| gaussian(rng)).collect()).into_iter().map(|a| a * r).collect()
        }
        Family::Simplex { kappa } => {
            let e: Vec<f64> = (0..kappa.len()).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let s: f64 = e.iter().sum();
            e[..kappa.len() - 1].iter().map(|v| v / s).collect()
        }
        Family::Hermite { dim } => {
            let r = unbounded_radius(family, n);
            (0..*dim).map(|_| rng.gen_range(-r..r)).collect()
        }
        Family::Laguerre { alpha } => {
            let r = unbounded_radius(family, n);
            (0..alpha.len()).map(|_| rng.gen_range(0.0..r)).collect()
        }
        Family::TensorLegendre2d | Family::TensorChebyshev2d | Family::MixedChebLegendre2d => {
            (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect()
        }
    }
}

/// Tensor grid for 1-d families, seeded random pairs otherwise.
fn grid_pairs(family: &Family, n: usize, points: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let points = points.max(2);
    let axis: Option<Vec<f64>> = match family {
        Family::Trig => Some((0..points).map(|i| -PI + 2.0 * PI * i as f64 / (points - 1) as f64).collect()),
        Family::Chebyshev | Family::Jacobi { .. } => {
            Some((0..points).map(|i| (PI * i as f64 / (points - 1) as f64).cos()).collect())
        }
        Family::Hermite { dim: 1 } => {
            let r = unbounded_radius(family, n);
            Some((0..points).map(|i| -r + 2.0 * r * i as f64 / (points - 1) as f64).collect())
        }
        Family::Laguerre { alpha } if alpha.len() == 1 => {
            let r = unbounded_radius(family, n);
            Some((0..points).map(|i| r * i as f64 / (points - 1) as f64).collect())
        }
        _ => None,
    };
    match axis {
        Some(a) => a.iter().flat_map(|&x| a.iter().map(move |&y| (vec![x], vec![y]))).collect(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..points).map(|_| (random_point(family, n, &mut rng), random_point(family, n, &mut rng))).collect()
        }
    }
}

pub fn kernel(ctx: &Ctx, cmd: KernelCmd) -> Result<Status> {
    let family = ctx.family("chebyshev")?;
    let n = ctx.n(32);
    let k = KernelInstance::new(family.clone(), build_cutoff(ctx, CutoffKind::TypeA)?, n)?;
    match cmd {
        KernelCmd::Eval { x, y } => {
            let (x, y) = (parse_point(&x)?, parse_point(&y)?);
            let v = k.eval(&x, &y)?;
            println!("kernel eval: {} n {n} L(x, y) = {v:.15e}", family.tag());
        }
        KernelCmd::Grid { points } => {
            let pairs: Vec<(Vec<f64>, Vec<f64>)> = match ctx.cfg.get("pairs") {
                Some(p) => serde_json::from_value(p.clone())?,
                None => grid_pairs(&family, n, points, ctx.seed()),
            };
            let csv = ctx.write("kernel_grid.csv", &k.grid_csv(&pairs)?)?;
            ctx.write_json("kernel.json", &k.descriptor())?;
            println!("kernel grid: {} n {n}, {} pairs -> {}", family.tag(), pairs.len(), csv.display());
        }
    }
    Ok(Status::Ok)
}

fn weight_id(args: &QuadArgs) -> Result<WeightId> {
    Ok(match args.weight.to_ascii_lowercase().as_str() {
        "jacobi" => WeightId::Jacobi { alpha: args.alpha, beta: args.beta },
        "chebyshev" => WeightId::Jacobi { alpha: -0.5, beta: -0.5 },
        "legendre" => WeightId::Jacobi { alpha: 0.0, beta: 0.0 },
        "hermite" => WeightId::Hermite,
        "laguerre" => WeightId::Laguerre { alpha: args.alpha },
        other => bail!("unknown weight '{other}'"),
    })
}

pub fn quad(ctx: &Ctx, cmd: QuadCmd) -> Result<Status> {
    match cmd {
        QuadCmd::Build(args) => {
            let rule = gauss_rule(weight_id(&args)?, args.m)?;
            let csv = ctx.write("quad.csv", &rule.to_csv())?;
            ctx.write_json("quad.json", &rule.descriptor())?;
            println!("quad build: {} m {} -> {}", args.weight, rule.m, csv.display());
            Ok(Status::Ok)
        }
        QuadCmd::Verify(args) => {
            let rule = gauss_rule(weight_id(&args)?, args.m)?;
            let tol = ctx.tolerance(1e-10);
            let err = verify_exactness(&rule, rule.exactness)?;
            let (word, status) = verdict(err < tol);
            ctx.write_json(
                "quad_verify.json",
                &json!({"rule": rule.descriptor(), "degree": rule.exactness, "max_relative_error": err,
                        "weight_crosscheck": rule.weight_crosscheck, "tolerance": tol, "passed": err < tol}),
            )?;
            println!(
                "quad verify: {} m {} exact to degree {}: error {err:.3e} (crosscheck {:.3e}), {word}",
                args.weight, rule.m, rule.exactness, rule.weight_crosscheck
            );
            Ok(status)
        }
    }
}

fn frame(ctx: &Ctx, args: &FrameArgs) -> Result<NeedletSystem> {
    let family = ctx.needlet_family("jacobi(0,0)")?;
    let default_j = if matches!(family, NeedletFamily::Jacobi { .. }) { 5 } else { 4 };
    let j_max = args.jmax.or_else(|| ctx.cfg_usize("jmax")).unwrap_or(default_j);
    Ok(build_needlet_system(family, build_cutoff(ctx, CutoffKind::TypeC)?, j_max)?)
}

/// Evaluation points covering the bulk of the top level.
fn frame_points(s: &NeedletSystem, count: usize) -> Vec<f64> {
    let count = count.max(2);
    let top = s.levels.last().map(|l| l.nodes.clone()).unwrap_or_default();
    let hi = top.iter().cloned().fold(0.0f64, f64::max) + 2.0;
    let (lo, hi) = match s.family {
        NeedletFamily::Jacobi { .. } => (-1.0, 1.0),
        NeedletFamily::Hermite => (-hi, hi),
        NeedletFamily::Laguerre { .. } => (0.0, hi),
    };
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

pub fn needlet(ctx: &Ctx, cmd: NeedletCmd) -> Result<Status> {
    match cmd {
        NeedletCmd::Build(args) => {
            let s = frame(ctx, &args)?;
            let p = ctx.write_json("frame.json", &s.descriptor())?;
            let nodes: usize = s.levels.iter().map(|l| l.nodes.len()).sum();
            println!(
                "needlet build: {} j_max {} capacity {} with {nodes} needlets, partition deviation {:.3e} -> {}",
                s.family.tag(),
                s.j_max,
                s.capacity(),
                s.partition_deviation,
                p.display()
            );
            Ok(Status::Ok)
        }
        NeedletCmd::Parseval { frame: args, trials } => {
            let s = frame(ctx, &args)?;
            let tol = ctx.tolerance(1e-8);
            let seed = ctx.seed();
            let defects = (0..trials as u64)
                .map(|t| s.parseval_check(&random_band_limited(s.capacity(), seed.wrapping_add(t))))
                .collect::<needlet_core::Result<Vec<f64>>>()?;
            let worst = defects.iter().cloned().fold(0.0, f64::max);
            let ok = worst < tol;
            let (word, status) = verdict(ok);
            ctx.write_json(
                "parseval.json",
                &json!({"family": s.family, "j_max": s.j_max, "seed": seed, "defects": defects,
                        "max_defect": worst, "tolerance": tol, "passed": ok}),
            )?;
            println!("needlet parseval: {} j_max {}, {trials} inputs: max defect {worst:.3e}, {word}", s.family.tag(), s.j_max);
            Ok(status)
        }
        NeedletCmd::Roundtrip { frame: args, points } => {
            let s = frame(ctx, &args)?;
            let tol = ctx.tolerance(1e-7);
            let f = random_band_limited(s.capacity(), ctx.seed());
            let c = s.analyze_spectral(&f)?;
            let xs = frame_points(&s, points);
            let got = s.synthesize_many(&c, &xs)?;
            let want = xs.iter().map(|&x| s.expansion_value(&f, x)).collect::<needlet_core::Result<Vec<f64>>>()?;
            let scale = want.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            let err = got.iter().zip(&want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max) / scale;
            let ok = err < tol;
            let (word, status) = verdict(ok);
            let csv = ctx.write("coefficients.csv", &s.coefficients_csv(&c)?)?;
            ctx.write_json(
                "roundtrip.json",
                &json!({"family": s.family, "j_max": s.j_max, "seed": ctx.seed(), "points": xs.len(),
                        "relative_error": err, "energy": c.energy(), "tolerance": tol, "passed": ok}),
            )?;
            println!(
                "needlet roundtrip: {} j_max {}: reconstruction error {err:.3e}, {word} -> {}",
                s.family.tag(),
                s.j_max,
                csv.display()
            );
            Ok(status)
        }
    }
}

fn plan(ctx: &Ctx, args: &EnvelopeArgs) -> SamplingPlan {
    let mut p = SamplingPlan::default().with_seed(ctx.seed()).weighted(args.weighted);
    if let Some(b) = args.bins.or_else(|| ctx.cfg_usize("bins")) {
        p.bins = b;
    }
    if let Some(k) = args.pairs.or_else(|| ctx.cfg_usize("pairs_per_bin")) {
        p.pairs_per_bin = k;
    }
    p.rho_max = args.rho_max.or_else(|| ctx.cfg.get("rho_max").and_then(|v| v.as_f64()));
    p
}

fn envelope(ctx: &Ctx, args: &EnvelopeArgs) -> Result<DecayEnvelope> {
    let k = KernelInstance::new(ctx.family("chebyshev")?, build_cutoff(ctx, CutoffKind::TypeA)?, ctx.n(64))?;
    Ok(measure_envelope(&k, &plan(ctx, args))?)
}

pub fn decay(ctx: &Ctx, cmd: DecayCmd) -> Result<Status> {
    match cmd {
        DecayCmd::Envelope(args) => {
            let env = envelope(ctx, &args)?;
            let csv = ctx.write("envelope.csv", &env.to_csv())?;
            ctx.write_json("envelope.json", &serde_json::to_value(&env)?)?;
            let peak = env.bins.iter().map(|b| b.max_abs).fold(0.0, f64::max);
            println!(
                "decay envelope: {} n {}: {} bins, peak {peak:.6e}, {} empty -> {}",
                env.family,
                env.n,
                env.bins.len(),
                env.empty_bins(),
                csv.display()
            );
            Ok(Status::Ok)
        }
        DecayCmd::Fit { env: args, form, sigma, log_depth } => {
            let env = envelope(ctx, &args)?;
            let form = match form.to_ascii_lowercase().as_str() {
                "polynomial" | "poly" => BoundForm::Polynomial { sigma },
                "subexp" | "sub_exponential" => BoundForm::SubExponential { epsilon: ctx.epsilon(), log_depth },
                other => bail!("unknown bound form '{other}'"),
            };
            let fit = fit_bound(&env, form)?;
            let ok = fit.satisfied() && (matches!(form, BoundForm::Polynomial { .. }) || fit.c_rate.is_some());
            let (word, status) = verdict(ok);
            ctx.write("envelope.csv", &env.to_csv())?;
            ctx.write_json("fit.json", &fit.report())?;
            let rate = fit.c_rate.map_or("n/a".to_string(), |r| format!("{r:.4}"));
            println!(
                "decay fit: {} n {}: c {:.4e}, rate {rate}, {} violations, {word}",
                env.family, env.n, fit.c, fit.violations
            );
            Ok(status)
        }
        DecayCmd::Compare { env: args, rough_exponent } => {
            let smooth = build_cutoff(ctx, CutoffKind::TypeA)?;
            let rough_spec = smooth.spec.with_schedule(DeltaSchedule::Power { exponent: rough_exponent });
            let rough = Arc::new(assemble_cutoff(&rough_spec)?);
            let family = ctx.family("chebyshev")?;
            let n = ctx.n(128);
            let rows = compare_cutoffs(&family, n, &[smooth, rough], ctx.epsilon(), &plan(ctx, &args))?;
            let rate = |i: usize| rows[i].fit.c_rate.unwrap_or(0.0);
            let ok = rate(0) > 0.0 && rows[0].fit.satisfied() && rate(0) > rate(1);
            let (word, status) = verdict(ok);
            ctx.write_json(
                "compare.json",
                &json!({"family": family, "n": n,
                        "rows": rows.iter().map(|r| json!({"cutoff": r.cutoff, "fit": r.fit.report()})).collect::<Vec<_>>(),
                        "passed": ok}),
            )?;
            println!(
                "decay compare: {} n {n}: small-derivative rate {:.4} vs rough rate {:.4}, {word}",
                family.tag(),
                rate(0),
                rate(1)
            );
            Ok(status)
        }
        DecayCmd::Wavelet { length, points } => {
            let spec = ctx.cutoff_spec(CutoffKind::TypeC)?;
            let cfg = WaveletConfig { epsilon: spec.epsilon, log_depth: Some(spec.log_depth), length, points };
            let w = build_wavelet(&cfg)?;
            let tol = ctx.tolerance(1e-8);
            let fit = fit_bound(&w.envelope, BoundForm::SubExponential { epsilon: spec.epsilon, log_depth: spec.log_depth })?;
            let ok = w.plancherel_defect < tol && w.mean.abs() < tol && fit.satisfied() && fit.c_rate.is_some();
            let (word, status) = verdict(ok);
            let csv = ctx.write("wavelet.csv", &w.to_csv())?;
            ctx.write_json(
                "wavelet.json",
                &json!({"config": cfg, "energy_space": w.energy_space, "energy_frequency": w.energy_frequency,
                        "plancherel_defect": w.plancherel_defect, "mean": w.mean, "boundary_ratio": w.boundary_ratio,
                        "fit": fit.report(), "tolerance": tol, "passed": ok}),
            )?;
            println!(
                "decay wavelet: epsilon {}: plancherel {:.3e}, mean {:.3e}, rate {}, {word} -> {}",
                spec.epsilon,
                w.plancherel_defect,
                w.mean.abs(),
                fit.c_rate.map_or("n/a".to_string(), |r| format!("{r:.4}")),
                csv.display()
            );
            Ok(status)
        }
        DecayCmd::Counterexample { variant, n_list } => {
            let variants: Vec<TensorVariant> = if variant.eq_ignore_ascii_case("all") {
                vec![TensorVariant::LegLeg, TensorVariant::ChebCheb, TensorVariant::ChebLeg]
            } else {
                vec![parse_variant(&variant)?]
            };
            let n_list: Vec<usize> = match ctx.global.n {
                Some(n) => vec![n],
                None => parse_list(&n_list)?,
            };
            let c = build_cutoff(ctx, CutoffKind::TypeA)?;
            let report = counterexample_suite(&c, &n_list)?;
            let tag = |v: TensorVariant| match v {
                TensorVariant::LegLeg => "legleg",
                TensorVariant::ChebCheb => "chebcheb",
                TensorVariant::ChebLeg => "chebleg",
            };
            let relevant: Vec<_> = report
                .checks
                .iter()
                .filter(|ch| ch.name == "block_identities" || variants.iter().any(|v| ch.name.starts_with(tag(*v))))
                .collect();
            let ok = relevant.iter().all(|ch| ch.passed);
            let (word, status) = verdict(ok);
            ctx.write_json(
                "counterexample.json",
                &json!({"report": report, "variants": variants, "passed": ok}),
            )?;
            for v in &variants {
                let row = report.rows_for(*v).next().expect("n_list is non-empty");
                println!(
                    "decay counterexample: {} type {} n {}: value {:.12} reference {:.12} ({})",
                    tag(*v),
                    c.spec.kind.tag(),
                    row.n,
                    row.value,
                    row.reference,
                    if (row.value - row.reference).abs() < 1e-10 { "match" } else { "asymptotic" }
                );
            }
            println!(
                "decay counterexample: {} of {} checks passed, {word}",
                relevant.iter().filter(|c| c.passed).count(),
                relevant.len()
            );
            Ok(status)
        }
    }
}
