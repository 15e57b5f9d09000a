//! The experiment registry behind the subcommands.

use anyhow::Context;
use cocycle_lab::base::{find_homoclinic, FiberCoord, SkewPoint};
use cocycle_lab::cocycle::{lyapunov_spectrum, restrict_to_leaf, sampler_by_name, LinearCocycle};
use cocycle_lab::diagnostics::{
    epsilon_monotonicity_test, positivity_search, rotation_sweep, weak_pinching_test, weak_twisting_test,
    Verdict,
};
use cocycle_lab::holonomy::{certify_fiber_bunching, HomoclinicLoop};
use serde_json::json;

use crate::output::{OutDir, Table};
use crate::report::{Outcome, Report};
use crate::scenario::{self, Scenario};

/// State shared by one invocation.
pub struct RunContext {
    pub scenario: Scenario,
    pub report: Report,
    pub out: OutDir,
    pub generated_at: String,
}

impl RunContext {
    pub fn log(&mut self, line: impl Into<String>) {
        self.report.log.push(line.into());
    }

    fn seed(&mut self, stage: &str, seed: u64) {
        self.report.seeds.insert(stage.into(), seed);
    }
}

/// A subcommand.
pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;

    fn about(&self) -> &'static str;

    fn run(&self, ctx: &mut RunContext) -> anyhow::Result<Outcome>;
}

/// Every registered experiment, in help order.
pub fn registry() -> Vec<Box<dyn Experiment>> {
    vec![
        Box::new(Spectrum),
        Box::new(Bunching),
        Box::new(Pinching),
        Box::new(Twisting),
        Box::new(Monotone),
        Box::new(Perturb),
        Box::new(Sweep),
    ]
}

pub fn experiment_by_name(name: &str) -> Option<Box<dyn Experiment>> {
    registry().into_iter().find(|e| e.name() == name)
}

fn verdict_outcome(verdicts: &[Verdict]) -> Outcome {
    if verdicts.iter().any(Verdict::is_positive) {
        Outcome::Success
    } else if verdicts.iter().all(|v| *v == Verdict::Negative) {
        Outcome::Negative
    } else {
        Outcome::Inconclusive
    }
}

struct Spectrum;

impl Experiment for Spectrum {
    fn name(&self) -> &'static str {
        "spectrum"
    }

    fn about(&self) -> &'static str {
        "Full Lyapunov spectrum of the cocycle"
    }

    fn run(&self, ctx: &mut RunContext) -> anyhow::Result<Outcome> {
        let s = &ctx.scenario;
        let cfg = s.lyapunov_config();
        let sampler = sampler_by_name::<SkewPoint>(&s.spectrum.sampler)?;
        let r = lyapunov_spectrum(&s.cocycle(), sampler.as_ref(), &cfg)?;
        let mut table = Table::spectrum(s.field.dim(), &[]);
        table.push(&s.name, &r, Vec::new());
        let pairing = if r.pairing_within(3.0) {
            Verdict::Positive
        } else {
            Verdict::Negative
        };
        ctx.seed("spectrum", cfg.seed);
        ctx.log(format!("spectrum: {:?} ± {:.2e}", r.exponents, r.max_stderr()));
        ctx.report.lyapunov("spectrum", &r);
        ctx.report.verdict(
            "spectrum",
            "pairing",
            pairing,
            &json!({"defects": r.pairing_defects, "max_stderr": r.max_stderr(), "multiple": 3.0}),
        );
        let generated = ctx.generated_at.clone();
        ctx.out.table("spectrum.csv", &table, &generated)?;
        Ok(Outcome::Success)
    }
}

struct Bunching;

impl Experiment for Bunching {
    fn name(&self) -> &'static str {
        "bunching"
    }

    fn about(&self) -> &'static str {
        "Fiber-bunching certificate"
    }

    fn run(&self, ctx: &mut RunContext) -> anyhow::Result<Outcome> {
        let s = &ctx.scenario;
        let cert = certify_fiber_bunching(&s.cocycle(), s.bunching.horizon, s.bunching.grid)?;
        ctx.log(format!("bunching: rate {:.4}, pass {}", cert.theta_rate, cert.pass));
        ctx.report.certificate("bunching", &cert);
        Ok(Outcome::from_pass(cert.pass))
    }
}

struct Pinching;

impl Experiment for Pinching {
    fn name(&self) -> &'static str {
        "pinching"
    }

    fn about(&self) -> &'static str {
        "Weak pinching test on the selected center leaf"
    }

    fn run(&self, ctx: &mut RunContext) -> anyhow::Result<Outcome> {
        let s = &ctx.scenario;
        let leaf = s.leaf()?;
        let cfg = s.pinching_config();
        let sampler = sampler_by_name::<FiberCoord>(&s.spectrum.sampler)?;
        let v = weak_pinching_test(&s.field, &s.skew, &leaf, sampler.as_ref(), &cfg)?;
        ctx.seed("pinching", cfg.seed);
        ctx.log(format!(
            "pinching: {:?} route, estimate {:.4e} ± {:.2e}, {}",
            v.route,
            v.estimate,
            v.error,
            v.verdict.as_str()
        ));
        if let Some(l) = &v.lyapunov {
            ctx.report.lyapunov("pinching", l);
        }
        ctx.report.verdict("pinching", "pinching", v.verdict, &v);
        Ok(Outcome::from_verdict(v.verdict))
    }
}

struct Twisting;

impl Experiment for Twisting {
    fn name(&self) -> &'static str {
        "twisting"
    }

    fn about(&self) -> &'static str {
        "Weak twisting test on the homoclinic loops of the selected leaf"
    }

    fn run(&self, ctx: &mut RunContext) -> anyhow::Result<Outcome> {
        let s = ctx.scenario.clone();
        let c = s.cocycle();
        let cert = certify_fiber_bunching(&c, s.bunching.horizon, s.bunching.grid)?;
        ctx.report.certificate("bunching", &cert);
        if !cert.pass {
            anyhow::bail!(
                "twisting needs a fiber-bunched cocycle; certificate rate {:.4} fails",
                cert.theta_rate
            );
        }
        let leaf = s.leaf()?;
        let cfg = s.twisting_config();
        ctx.seed("twisting", cfg.seed);
        ctx.seed("frames", cfg.frame.seed);
        let sampler = sampler_by_name::<FiberCoord>(&s.spectrum.sampler)?;
        let mut verdicts = Vec::new();
        for &index in &s.homoclinic {
            let z = find_homoclinic(s.skew.base(), &leaf, index)
                .with_context(|| format!("homoclinic point {index}"))?;
            let lp = HomoclinicLoop::new(&s.skew, leaf.clone(), z);
            let v = weak_twisting_test(&c, &cert, &lp, sampler.as_ref(), &cfg)?;
            ctx.log(format!(
                "twisting[{index}]: {} (j {:?}, fraction {:.3})",
                v.verdict.as_str(),
                v.j,
                v.fraction
            ));
            ctx.report.verdict(&format!("homoclinic_{index}"), "twisting", v.verdict, &v);
            verdicts.push(v.verdict);
        }
        Ok(verdict_outcome(&verdicts))
    }
}

struct Monotone;

impl Experiment for Monotone {
    fn name(&self) -> &'static str {
        "monotone"
    }

    fn about(&self) -> &'static str {
        "ε-monotonicity of the leaf return cocycle t ↦ B(t)"
    }

    fn run(&self, ctx: &mut RunContext) -> anyhow::Result<Outcome> {
        let s = &ctx.scenario;
        let b = restrict_to_leaf(&s.field, &s.skew, &s.leaf()?);
        let cfg = s.monotone_config();
        let v = epsilon_monotonicity_test(&|t| b.matrix(&FiberCoord::new(t)), &cfg)?;
        ctx.seed("monotone", cfg.seed);
        ctx.log(format!("monotone: margin {:.9}, ε {}, pass {}", v.margin, v.epsilon, v.pass));
        let verdict = if v.pass { Verdict::Positive } else { Verdict::Negative };
        ctx.report.verdict("monotone", "monotone", verdict, &v);
        Ok(Outcome::from_pass(v.pass))
    }
}

struct Perturb;

impl Experiment for Perturb {
    fn name(&self) -> &'static str {
        "perturb"
    }

    fn about(&self) -> &'static str {
        "Positivity search: rotation block, generic factor, transvections"
    }

    fn run(&self, ctx: &mut RunContext) -> anyhow::Result<Outcome> {
        let s = ctx.scenario.clone();
        let cfg = s.search_config();
        ctx.seed("perturb", cfg.seed);
        ctx.seed("spectrum", cfg.global.seed);
        ctx.seed("pinching", cfg.pinching.seed);
        ctx.seed("twisting", cfg.twisting.seed);
        let r = positivity_search(&s.cocycle(), &s.leaf()?, &cfg)?;
        for line in &r.log {
            ctx.log(line.clone());
        }
        ctx.report.lyapunov("before", &r.before);
        ctx.report.lyapunov("after", &r.after);
        ctx.report.certificate("search", &r.certificate);
        ctx.report
            .verdict("initial", "pinching", r.initial_pinching.verdict, &r.initial_pinching);
        ctx.report.verdict("final", "pinching", r.final_pinching.verdict, &r.final_pinching);
        for (i, v) in r.twisting_before.iter().enumerate() {
            ctx.report.verdict(&format!("before_{i}"), "twisting", v.verdict, v);
        }
        for (i, v) in r.twisting_after.iter().enumerate() {
            ctx.report.verdict(&format!("after_{i}"), "twisting", v.verdict, v);
        }
        let fin = if r.final_positive {
            Verdict::Positive
        } else {
            Verdict::Inconclusive
        };
        ctx.report.verdict(
            "search",
            "search",
            fin,
            &json!({
                "obstruction": r.obstruction,
                "theta": r.theta,
                "budget_used": r.budget_used,
                "budget": r.budget,
                "top_exponent": r.after.top(),
                "top_stderr": r.after.top_stderr(),
            }),
        );
        ctx.report.perturbations = r.perturbations.clone();
        let mut table = Table::spectrum(s.field.dim(), &[]);
        table.push("before", &r.before, Vec::new());
        table.push("after", &r.after, Vec::new());
        let generated = ctx.generated_at.clone();
        ctx.out.table("perturb.csv", &table, &generated)?;
        Ok(if r.final_positive {
            Outcome::Success
        } else {
            Outcome::Inconclusive
        })
    }
}

struct Sweep;

impl Experiment for Sweep {
    fn name(&self) -> &'static str {
        "sweep"
    }

    fn about(&self) -> &'static str {
        "λ⁺ and the leaf pinching verdict over a parameter grid"
    }

    fn run(&self, ctx: &mut RunContext) -> anyhow::Result<Outcome> {
        let s = ctx.scenario.clone();
        let extra = ["leaf_estimate", "leaf_error", "leaf_verdict"];
        let mut table = Table::spectrum(s.field.dim(), &extra);
        let mut verdicts = Vec::new();
        let cfg = s.search_config();
        ctx.seed("spectrum", cfg.global.seed);
        ctx.seed("pinching", cfg.pinching.seed);
        if s.sweep.parameter == "theta" {
            let (record, rows) = rotation_sweep(&s.cocycle(), &s.leaf()?, &s.sweep.values, &cfg)?;
            if let Some(r) = record {
                ctx.log(format!("sweep: {}", r.detail));
                ctx.report.perturbations.push(r);
            }
            for row in rows {
                let p = &row.pinching;
                let label = format!("theta={}", row.theta);
                table.push(
                    &row.theta.to_string(),
                    &row.global,
                    vec![p.estimate.to_string(), p.error.to_string(), p.verdict.as_str().into()],
                );
                ctx.log(format!("sweep {label}: λ⁺ {:.4e}, leaf {}", row.global.top(), p.verdict.as_str()));
                ctx.report.lyapunov(&label, &row.global);
                ctx.report.verdict(&label, "pinching", p.verdict, p);
                verdicts.push(p.verdict);
            }
        } else {
            let fiber_sampler = sampler_by_name::<FiberCoord>(&s.spectrum.sampler)?;
            let point_sampler = sampler_by_name::<SkewPoint>(&s.spectrum.sampler)?;
            for &value in &s.sweep.values {
                let mut doc = s.document.clone();
                scenario::set_path(&mut doc, &s.sweep.parameter, toml::Value::Float(value))?;
                let sv = scenario::validate(doc)
                    .with_context(|| format!("{} = {value} gives an invalid scenario", s.sweep.parameter))?;
                let global = lyapunov_spectrum(&sv.cocycle(), point_sampler.as_ref(), &sv.lyapunov_config())?;
                let p = weak_pinching_test(&sv.field, &sv.skew, &sv.leaf()?, fiber_sampler.as_ref(), &sv.pinching_config())?;
                let label = format!("{}={value}", s.sweep.parameter);
                table.push(
                    &value.to_string(),
                    &global,
                    vec![p.estimate.to_string(), p.error.to_string(), p.verdict.as_str().into()],
                );
                ctx.log(format!("sweep {label}: λ⁺ {:.4e}, leaf {}", global.top(), p.verdict.as_str()));
                ctx.report.lyapunov(&label, &global);
                ctx.report.verdict(&label, "pinching", p.verdict, &p);
                verdicts.push(p.verdict);
            }
        }
        let generated = ctx.generated_at.clone();
        ctx.out.table("sweep.csv", &table, &generated)?;
        Ok(verdict_outcome(&verdicts))
    }
}
