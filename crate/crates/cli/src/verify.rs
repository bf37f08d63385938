use anyhow::bail;
use clap::ValueEnum;
use serde_json::{json, Value};
use stairstab::diagonal::{fsd, theorem2_path};
use stairstab::grid::recfsg;
use stairstab::transfer::{
    build_stretched, census_segment, mc_estimate_fsd, mc_estimate_recfsg, pi_map,
    stab_census_with_limit, transference_check, SetKind,
};
use stairstab::{Point, Rational};

use crate::record::TOOL_VERSION;
use crate::{point_of, EvalFamily, Outcome};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Mc,
    Census,
    Transference,
}

pub struct Args {
    pub mode: Mode,
    pub dim: usize,
    pub sizes: Vec<usize>,
    pub samples: u64,
    pub trials: usize,
    pub seed: u64,
    pub family: EvalFamily,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub limit: u128,
    pub expect: Option<String>,
}

/// Default stair-path per dimension when --q/--p are omitted.
fn default_path(family: EvalFamily, d: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    match (family, d) {
        (EvalFamily::Grid, 2) => Some((vec![0.5, 0.9], vec![0.2, 0.4])),
        (EvalFamily::Grid, 3) => Some((vec![1.0, 1.0, 0.8], vec![0.5, 0.5, 0.0])),
        (EvalFamily::Diag, 2) => Some((vec![1.0, 0.75], vec![0.25, 0.5])),
        (EvalFamily::Diag, d) if d >= 3 => theorem2_path(d).ok().map(|c| {
            let c = c.to_f64();
            (c.q, c.p)
        }),
        _ => None,
    }
}

fn endpoints(args: &Args, family: EvalFamily) -> anyhow::Result<(Point, Point)> {
    let (q, p) = if args.q.is_empty() && args.p.is_empty() {
        match default_path(family, args.dim) {
            Some(qp) => qp,
            None => bail!("--q and --p are required for d = {}", args.dim),
        }
    } else {
        (args.q.clone(), args.p.clone())
    };
    Ok((point_of("q", &q, args.dim)?, point_of("p", &p, args.dim)?))
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

fn mc(args: &Args) -> anyhow::Result<(bool, Value)> {
    let (q, p) = endpoints(args, args.family)?;
    let (est, expected) = match args.family {
        EvalFamily::Grid => (
            mc_estimate_recfsg(&q, &p, args.samples, args.seed)?,
            recfsg(&q, &p)?,
        ),
        EvalFamily::Diag => (
            mc_estimate_fsd(&q, &p, args.samples, args.seed)?,
            factorial(args.dim) * fsd(q.as_slice(), p.as_slice())?,
        ),
    };
    let deviation = (est.estimate - expected).abs();
    let sigma = (expected * (1.0 - expected) / args.samples as f64).sqrt();
    let pass = deviation <= 4.0 * sigma;
    Ok((
        pass,
        json!({
            "family": format!("{:?}", args.family).to_lowercase(),
            "q": q.as_slice(),
            "p": p.as_slice(),
            "samples": args.samples,
            "seed": args.seed,
            "estimate": est.estimate,
            "std_error": est.std_error,
            "expected": expected,
            "deviation": deviation,
            "deviation_sigmas": if sigma > 0.0 { deviation / sigma } else { 0.0 },
        }),
    ))
}

fn parse_fraction(s: &str) -> anyhow::Result<Rational> {
    match s.trim().parse::<Rational>() {
        Ok(r) => Ok(r),
        Err(_) => bail!("--expect must look like a/b, got {s:?}"),
    }
}

fn census(args: &Args) -> anyhow::Result<(bool, Value)> {
    let (q, p) = endpoints(args, EvalFamily::Grid)?;
    let reference = recfsg(&q, &p)?;
    let expect = args.expect.as_deref().map(parse_fraction).transpose()?;
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut pass = true;
    for &m in &args.sizes {
        let s = build_stretched(SetKind::Grid, args.dim, m)?;
        let (qs, ps) = census_segment(&s, &q, &p)?;
        let c = stab_census_with_limit(&s, &qs, &ps, args.limit)?;
        let fraction = c.fraction_f64();
        let image_reference = recfsg(&pi_map(&s, &qs)?, &pi_map(&s, &ps)?)?;
        let error = (fraction - reference).abs();
        if let Some(e) = &expect {
            pass &= c.fraction == *e;
        }
        errors.push(error);
        rows.push(json!({
            "size": m,
            "total_simplices": c.total_simplices,
            "stabbed": c.stabbed,
            "far_apart": c.far_apart,
            "fraction": c.fraction.to_string(),
            "fraction_value": fraction,
            "abs_error": error,
            "image_reference": image_reference,
            "q": c.segment.0.to_string(),
            "p": c.segment.1.to_string(),
        }));
    }
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    if errors.len() > 1 {
        pass &= decreasing;
    }
    Ok((
        pass,
        json!({
            "q": q.as_slice(),
            "p": p.as_slice(),
            "reference": reference,
            "errors_strictly_decreasing": decreasing,
            "expected_fraction": expect.map(|e| e.to_string()),
            "sizes": rows,
        }),
    ))
}

fn transference(args: &Args) -> anyhow::Result<(bool, Value)> {
    let mut rows = Vec::new();
    let mut pass = true;
    for &m in &args.sizes {
        let r = transference_check(args.dim, m, args.trials, args.seed)?;
        pass &= r.mismatches == 0;
        rows.push(json!({
            "size": m,
            "trials": r.trials,
            "mismatches": r.mismatches,
            "stabbed": r.stabbed,
            "first_mismatch": r.first_mismatch.map(|i| json!({
                "q": i.q.to_string(),
                "p": i.p.to_string(),
                "z": i.zs.iter().map(|z| z.to_string()).collect::<Vec<_>>(),
            })),
        }));
    }
    Ok((pass, json!({ "seed": args.seed, "sizes": rows })))
}

pub fn run(args: &Args) -> anyhow::Result<Outcome> {
    let start = std::time::Instant::now();
    let (pass, detail) = match args.mode {
        Mode::Mc => mc(args)?,
        Mode::Census => census(args)?,
        Mode::Transference => transference(args)?,
    };
    let report = json!({
        "command": "verify",
        "mode": format!("{:?}", args.mode).to_lowercase(),
        "dim": args.dim,
        "pass": pass,
        "detail": detail,
        "wall_ms": start.elapsed().as_secs_f64() * 1e3,
        "tool_version": TOOL_VERSION,
    });
    println!("{report}");
    Ok(if pass {
        Outcome::Passed
    } else {
        Outcome::Failed
    })
}
