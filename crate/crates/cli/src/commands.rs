use std::path::Path;

use hardylt_core::deltabound::{beta_of_r, lower_bound_alpha, minimize_beta};
use hardylt_core::green::diagonal_profile;
use hardylt_core::partition::{Certifier, KChoice, DEFAULT_K_ALPHA0};
use hardylt_core::poincare::phi_profile;
use hardylt_core::potential::{Potential, Segment};
use hardylt_core::sigma::{evaluate_params, map_sigma2, sigma2_bound, sigma_bound, transform_potential};
use hardylt_core::spectral::{
    assemble_halfline, assemble_interval, assemble_sigma, negative_spectrum, Discretization, RefinePolicy,
    SpectrumResult,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{
    BoundArgs, Cli, Command, ConstantsCommand, CurveArgs, GreenArgs, Operator, PotentialArgs, RegressArgs, SigmaArgs,
    SpectrumArgs, VerifyArgs,
};
use crate::config::{FileConfig, Resolved};
use crate::report::{Provenance, Report, Source};
use crate::spec::{load_potential, to_spec_text};
use crate::CliError;

/// Reference values checked by `regress` and echoed as provenance.
pub const REF_S0: f64 = 1.0 / 3.0;
pub const REF_C0_AT_DEFAULT_K: f64 = 0.333316;
pub const REF_CONSTANT_HALF: f64 = 1.185;
pub const REF_DELTA_R: f64 = 1.075;
pub const REF_DELTA_BOUND: f64 = 0.533;
/// Sharp whole-line constant at `γ = 1/2`.
pub const L_HALF: f64 = 0.5;

struct Ctx {
    config: Resolved,
    certifier: Certifier,
    provenance: Vec<Provenance>,
}

impl Ctx {
    fn note(&mut self, name: &str, value: f64, source: Source) {
        self.provenance.push(Provenance::new(name, value, source));
    }

    fn policy(&self) -> RefinePolicy {
        RefinePolicy { doubling: self.config.tolerances.doubling, extend_domain: self.config.tolerances.extend_domain }
    }
}

/// Parses the config layers and runs the command. `env_profile` is the value
/// of the profile environment variable.
pub fn run(cli: &Cli, env_profile: Option<&str>) -> Result<Report, CliError> {
    let config = resolve(cli, env_profile)?;
    let mut ctx = Ctx {
        config,
        certifier: Certifier::new(config.tolerances.opt_tol, config.tolerances.opt_grid),
        provenance: Vec::new(),
    };
    let (result, pass) = match &cli.command {
        Command::Bound(a) => (bound(&mut ctx, a)?, true),
        Command::Verify(a) => verify(&mut ctx, a)?,
        Command::Spectrum(a) => (spectrum(&mut ctx, a)?, true),
        Command::Constants(ConstantsCommand::Green(a)) => (green(&mut ctx, a)?, true),
        Command::Constants(ConstantsCommand::Sobolev(a)) => (sobolev(&mut ctx, a)?, true),
        Command::Constants(ConstantsCommand::Lower(a)) => (lower(&mut ctx, a)?, true),
        Command::SigmaMap(a) => (sigma_map(&mut ctx, a)?, true),
        Command::Regress(a) => regress(&mut ctx, a)?,
    };
    Ok(Report {
        tool: "hardylt".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cli.command.name().into(),
        arguments: serde_json::to_value(&cli.command).expect("arguments serialise"),
        config: ctx.config,
        result,
        provenance: ctx.provenance,
        pass,
    })
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialise")
}

fn load(src: &PotentialArgs) -> Result<Option<Potential>, CliError> {
    if let Some(p) = &src.potential {
        return Ok(Some(load_potential(p)?));
    }
    let Some(r) = src.delta_at else { return Ok(None) };
    let (s, w) = (src.delta_strength, src.delta_width);
    if !(w > 0.0 && r - w / 2.0 > 0.0 && s.is_finite()) {
        return Err(CliError::Input(format!("delta box of width {w} at {r} must lie in r > 0")));
    }
    Ok(Some(Potential::piecewise(vec![Segment { lo: r - w / 2.0, hi: r + w / 2.0, value: s / w }])?))
}

fn require(src: &PotentialArgs) -> Result<Potential, CliError> {
    load(src)?.ok_or_else(|| CliError::Input("a potential is required: pass --potential FILE or --delta-at R".into()))
}

fn note_certificate(ctx: &mut Ctx, c: &hardylt_core::partition::BoundCertificate) {
    let k_source = match c.k_choice {
        KChoice::Default => Source::Paper,
        KChoice::User => Source::Input,
        KChoice::Optimized => Source::Computed,
    };
    ctx.note("k", c.k, k_source);
    ctx.note("S_alpha", c.s_alpha, Source::Computed);
    ctx.note("C_alpha(k)", c.c_alpha_k, Source::Computed);
    ctx.note("constant_used", c.constant_used, Source::Computed);
    if c.alpha == 0.0 && c.gamma == 0.5 && c.k_choice == KChoice::Default {
        ctx.note("C_{1/2,0} reference", REF_CONSTANT_HALF, Source::Paper);
    }
}

fn bound(ctx: &mut Ctx, a: &BoundArgs) -> Result<Value, CliError> {
    let v = require(&a.source)?;
    let v = if a.plain { v.hardy_excess() } else { v };
    let cert = ctx.certifier.certify(&v, a.gamma, a.alpha, a.k, ctx.config.tolerances.quad_tol)?;
    note_certificate(ctx, &cert);
    Ok(json!({ "plain": a.plain, "certificate": to_value(&cert) }))
}

fn halfline_spectrum(ctx: &Ctx, v: &Potential, gamma: f64, rmax: Option<f64>) -> Result<SpectrumResult, CliError> {
    let d = Discretization { r_max: rmax, ..Discretization::halfline(ctx.config.tolerances.grid) };
    Ok(negative_spectrum(&assemble_halfline(v, &d)?, gamma, ctx.policy())?)
}

fn verify(ctx: &mut Ctx, a: &VerifyArgs) -> Result<(Value, bool), CliError> {
    let v = require(&a.source)?;
    let cert = ctx.certifier.certify(&v, a.gamma, a.alpha, a.k, ctx.config.tolerances.quad_tol)?;
    note_certificate(ctx, &cert);
    let spec = halfline_spectrum(ctx, &v, a.gamma, None)?;
    let ratio = if cert.total > 0.0 { spec.riesz_mean / cert.total } else { 0.0 };
    let pass = spec.riesz_mean <= cert.total + 3.0 * spec.riesz_error;
    Ok((json!({ "certificate": to_value(&cert), "spectrum": to_value(&spec), "ratio": ratio, "pass": pass }), pass))
}

fn spectrum(ctx: &mut Ctx, a: &SpectrumArgs) -> Result<Value, CliError> {
    let v = require(&a.source)?;
    let n = ctx.config.tolerances.grid;
    let problem = match a.operator {
        Operator::Halfline => {
            assemble_halfline(&v, &Discretization { r_max: a.rmax, ..Discretization::halfline(n) })?
        }
        Operator::Interval { b } => {
            if a.rmax.is_some() {
                return Err(CliError::Input("--rmax does not apply to interval operators".into()));
            }
            assemble_interval(&v, b, &Discretization::interval(b, n))?
        }
        Operator::Sigma { sigma } => {
            assemble_sigma(&v, sigma, &Discretization { r_max: a.rmax, ..Discretization::sigma(sigma, n) })?
        }
    };
    let spec = negative_spectrum(&problem, a.gamma, ctx.policy())?;
    Ok(json!({ "operator": a.operator.to_string(), "spectrum": to_value(&spec) }))
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|x| format!("{x:?}"))).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn green(ctx: &mut Ctx, a: &GreenArgs) -> Result<Value, CliError> {
    let alpha = a.common.alpha;
    let (k, choice) = match a.k {
        Some(k) => (k, KChoice::User),
        None => ctx.certifier.default_k(alpha)?,
    };
    let c = ctx.certifier.c_alpha(alpha, k)?;
    ctx.note("k", k, if choice == KChoice::Default { Source::Paper } else if choice == KChoice::User { Source::Input } else { Source::Computed });
    ctx.note("C_alpha(k)", c.c_alpha_k, Source::Computed);
    if let Some(s) = c.conjectured_sharp {
        ctx.note("I0(k)/(k I1(k))", s, Source::Computed);
    }
    if alpha == 0.0 && k == DEFAULT_K_ALPHA0 {
        ctx.note("C_0(3.555) reference", REF_C0_AT_DEFAULT_K, Source::Paper);
    }
    if let Some(path) = &a.common.curve {
        let n = 200;
        let rows = (0..=n)
            .map(|i| {
                let x = i as f64 / n as f64;
                Ok(vec![x, diagonal_profile(alpha, c.argmax_b, k, x)?])
            })
            .collect::<Result<Vec<_>, hardylt_core::Error>>()?;
        write_csv(path, &["x", "g"], &rows)?;
    }
    Ok(json!({ "k_choice": to_value(&choice), "bound": to_value(&c) }))
}

fn sobolev(ctx: &mut Ctx, a: &CurveArgs) -> Result<Value, CliError> {
    let s = ctx.certifier.s_alpha(a.alpha)?;
    ctx.note("S_alpha", s.s_alpha, Source::Computed);
    if a.alpha == 0.0 {
        ctx.note("S_0 reference", REF_S0, Source::Paper);
    }
    if let Some(path) = &a.curve {
        let n = 200;
        let rows = (0..=n)
            .map(|i| {
                let x = i as f64 / n as f64;
                Ok(vec![x, phi_profile(a.alpha, x, s.argmax_b)?])
            })
            .collect::<Result<Vec<_>, hardylt_core::Error>>()?;
        write_csv(path, &["x", "phi"], &rows)?;
    }
    Ok(to_value(&s))
}

fn lower(ctx: &mut Ctx, a: &CurveArgs) -> Result<Value, CliError> {
    let tol = ctx.config.tolerances.opt_tol.min(1e-8);
    let best = lower_bound_alpha(a.alpha, tol)?;
    let delta = if a.alpha == 0.0 { minimize_beta(tol)? } else { beta_of_r(best.r_star)? };
    ctx.note("lower bound", best.value, Source::Computed);
    ctx.note("R*", best.r_star, Source::Computed);
    if a.alpha == 0.0 {
        ctx.note("R* reference", REF_DELTA_R, Source::Paper);
        ctx.note("1/beta reference", REF_DELTA_BOUND, Source::Paper);
    }
    if let Some(path) = &a.curve {
        let n = 400;
        let rows = (0..=n)
            .map(|i| {
                let r = 10f64.powf(-3.0 + 6.0 * i as f64 / n as f64);
                let d = beta_of_r(r)?;
                Ok(vec![r, d.beta, d.lower_bound(a.alpha)])
            })
            .collect::<Result<Vec<_>, hardylt_core::Error>>()?;
        write_csv(path, &["R", "beta", "bound"], &rows)?;
    }
    Ok(json!({ "lower_bound": to_value(&best), "delta": to_value(&delta) }))
}

fn sigma_map(ctx: &mut Ctx, a: &SigmaArgs) -> Result<Value, CliError> {
    let v = load(&a.source)?;
    let tol = ctx.config.tolerances.quad_tol;
    if a.sigma == 2.0 {
        if a.write_potential.is_some() {
            return Err(CliError::Input("sigma = 2 maps to the whole line; there is no half-line potential to write".into()));
        }
        let c_ek = match a.c_ek {
            Some(c) => {
                ctx.note("c_ek", c, Source::Input);
                c
            }
            None if a.gamma == 0.5 && a.alpha == 0.0 => {
                ctx.note("c_ek", L_HALF, Source::Paper);
                L_HALF
            }
            None => return Err(CliError::Input("sigma = 2 needs --c-ek unless gamma = 1/2 and alpha = 0".into())),
        };
        let Some(v) = v else {
            return Ok(json!({ "sigma": 2.0, "reduces_to": "whole-line", "c_ek": c_ek }));
        };
        let w = map_sigma2(&v.positive_part())?;
        let b = sigma2_bound(&v, a.gamma, a.alpha, c_ek, tol)?;
        ctx.note("integral", b.integral, Source::Computed);
        return Ok(json!({ "sigma": 2.0, "reduces_to": "whole-line", "support": [w.support.0, w.support.1], "bound": to_value(&b) }));
    }
    let params = evaluate_params(a.sigma, a.gamma, a.alpha)?;
    let mut out = json!({ "params": to_value(&params) });
    if let Some(v) = v {
        let b = sigma_bound(&v, &params, &ctx.certifier, tol)?;
        ctx.note("half_line_constant", b.half_line_constant, Source::Computed);
        out["bound"] = to_value(&b);
        if let Some(path) = &a.write_potential {
            let mapped = transform_potential(&v, a.sigma)?;
            let text = to_spec_text(&mapped).map_err(CliError::Input)?;
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            out["written"] = json!(path);
        }
    } else if a.write_potential.is_some() {
        return Err(CliError::Input("--write-potential needs a potential".into()));
    }
    Ok(out)
}

struct Check {
    name: &'static str,
    expected: f64,
    computed: f64,
    tolerance: f64,
}

fn regress(ctx: &mut Ctx, a: &RegressArgs) -> Result<(Value, bool), CliError> {
    let s0 = ctx.certifier.s_alpha(0.0)?.sup_value;
    let c0 = ctx.certifier.c_alpha(0.0, DEFAULT_K_ALPHA0)?.sup_value;
    let constant = ctx.certifier.constant(0.5, 0.0)?;
    let delta = minimize_beta(1e-10)?;
    let checks = [
        Check { name: "S_0", expected: REF_S0, computed: s0, tolerance: 1e-5 },
        Check { name: "C_0(3.555)", expected: REF_C0_AT_DEFAULT_K, computed: c0, tolerance: 1e-5 },
        Check { name: "C_{1/2,0}", expected: REF_CONSTANT_HALF, computed: constant, tolerance: 1e-3 },
        Check { name: "delta R*", expected: REF_DELTA_R, computed: delta.r, tolerance: 5e-3 },
        Check { name: "delta 1/beta", expected: REF_DELTA_BOUND, computed: 1.0 / delta.beta, tolerance: 1e-3 },
    ];
    let mut pass = true;
    let checks: Vec<Value> = checks
        .iter()
        .map(|c| {
            let ok = (c.computed - c.expected).abs() <= c.tolerance;
            pass &= ok;
            ctx.note(c.name, c.expected, Source::Paper);
            json!({ "name": c.name, "expected": c.expected, "computed": c.computed, "tolerance": c.tolerance, "pass": ok })
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.config.seed);
    let mut cases = Vec::new();
    let mut violations = 0;
    for _ in 0..a.cases {
        let v = random_box_potential(&mut rng)?;
        let gamma = [0.5, 1.0, 1.5][rng.gen_range(0..3)];
        let cert = ctx.certifier.certify(&v, gamma, 0.0, None, ctx.config.tolerances.quad_tol)?;
        let spec = halfline_spectrum(ctx, &v, gamma, None)?;
        let ok = spec.riesz_mean - spec.riesz_error <= cert.total;
        violations += usize::from(!ok);
        cases.push(json!({
            "potential": to_value(&v),
            "gamma": gamma,
            "riesz_mean": spec.riesz_mean,
            "riesz_error": spec.riesz_error,
            "bound": cert.total,
            "pass": ok,
        }));
    }
    pass &= violations == 0;
    Ok((json!({ "checks": checks, "random": { "seed": ctx.config.seed, "cases": cases, "violations": violations }, "pass": pass }), pass))
}

fn random_box_potential(rng: &mut ChaCha8Rng) -> Result<Potential, CliError> {
    let mut segs = Vec::new();
    let mut at = rng.gen_range(0.1..2.0);
    for _ in 0..rng.gen_range(1..4) {
        let w = rng.gen_range(0.1..1.5);
        segs.push(Segment { lo: at, hi: at + w, value: rng.gen_range(0.5..20.0) });
        at += w + rng.gen_range(0.1..1.5);
    }
    Ok(Potential::piecewise(segs)?)
}

/// The configuration a run would use.
pub fn resolve(cli: &Cli, env_profile: Option<&str>) -> Result<Resolved, CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(CliError::Config)?,
        None => FileConfig::default(),
    };
    Resolved::resolve(cli.profile, env_profile, &file, &cli.tolerances, cli.seed).map_err(CliError::Config)
}
