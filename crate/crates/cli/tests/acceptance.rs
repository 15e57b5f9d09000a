//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use cocycle_lab::base::{find_homoclinic, leaf_partner, Anchor, FiberCoord, LeafKind, LeafPoint, SkewPoint, TorusPoint, TrigPoly};
use cocycle_lab::cocycle::{cocycle_product, lyapunov_spectrum, sampler_by_name, CocycleField, Factor, ScalarField, SkewCocycle};
use cocycle_lab::diagnostics::{
    epsilon_monotonicity_test, transvection_perturbation, weak_twisting_test, MonotoneConfig, Side, Verdict,
};
use cocycle_lab::holonomy::{certify_fiber_bunching, leaf_holonomy, HomoclinicLoop};
use cocycle_lab::linalg::{standard_j, symplectic_drift};
use cocycle_lab::seeding;
use cocycle_lab::symplectic::{separate_pair, Subspace, SymplecticMatrix, Transvection};
use cocycle_lab_cli::output::csv_body;
use cocycle_lab_cli::Scenario;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.toml"))
}

fn scenario(name: &str) -> Scenario {
    Scenario::load(&scenario_path(name), None, &[]).expect("scenario loads")
}

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

struct Cli {
    code: i32,
    out: tempfile::TempDir,
}

impl Cli {
    fn run(cmd: &str, name: &str, extra: &[&str]) -> Cli {
        let out = tempfile::tempdir().expect("temp dir");
        let status = Command::new(env!("CARGO_BIN_EXE_cocycle-lab"))
            .arg(cmd)
            .arg("--scenario")
            .arg(scenario_path(name))
            .arg("--out")
            .arg(out.path())
            .args(extra)
            .output()
            .expect("binary runs");
        Cli {
            code: status.status.code().unwrap_or(-1),
            out,
        }
    }

    fn report(&self) -> Value {
        let text = std::fs::read_to_string(self.out.path().join("report.json")).unwrap_or_default();
        serde_json::from_str(&text).unwrap_or(Value::Null)
    }

    fn csv(&self, file: &str) -> String {
        std::fs::read_to_string(self.out.path().join(file)).unwrap_or_default()
    }
}

fn random_sp_generator(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(2 * d, 2 * d, |_, _| rng.random::<f64>() - 0.5);
    standard_j(d) * (&a + a.transpose()) * scale
}

fn random_trig(rng: &mut ChaCha8Rng) -> TrigPoly {
    let mut p = TrigPoly::constant(3, rng.random::<f64>() - 0.5);
    for _ in 0..3 {
        let w = [rng.random_range(-2..=2), rng.random_range(-2..=2), rng.random_range(-1..=1)];
        p = p.with_cos(&w, rng.random::<f64>() - 0.5).with_sin(&w, rng.random::<f64>() - 0.5);
    }
    p
}

fn random_field(rng: &mut ChaCha8Rng, d: usize) -> CocycleField {
    let factors = (0..rng.random_range(1..=3))
        .map(|_| Factor::Exp {
            generator: random_sp_generator(rng, d, 0.5),
            field: ScalarField::Trig { poly: random_trig(rng) },
        })
        .collect();
    CocycleField::new(d, factors, 1.0).expect("generators lie in the Lie algebra")
}

fn random_point(rng: &mut ChaCha8Rng) -> SkewPoint {
    SkewPoint::new(rng.random(), rng.random(), rng.random())
}

fn criterion_1() -> Check {
    let mut rng = seeding::rng(101);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let field = random_field(&mut rng, 1 + k % 3);
        let a = field.evaluate(&random_point(&mut rng)).map_err(|e| e.to_string())?;
        worst = worst.max(symplectic_drift(a.entries()));
    }
    let mut worst_t: f64 = 0.0;
    for k in 0..200 {
        let d = 1 + k % 3;
        let mut prod = SymplecticMatrix::identity(d);
        for _ in 0..rng.random_range(1..=20) {
            let v = DVector::from_fn(2 * d, |_, _| rng.random::<f64>() - 0.5);
            let t = Transvection::new(&v, rng.random::<f64>() * 2.0 - 1.0).map_err(|e| e.to_string())?;
            prod = &prod * &t.matrix();
        }
        worst_t = worst_t.max(symplectic_drift(prod.entries()));
    }
    ensure(
        worst <= 1e-10 && worst_t <= 1e-10,
        format!("max drift {worst:.2e} over 1000 evaluations, {worst_t:.2e} over 200 products"),
    )
}

fn rank_oracle(v: &Subspace, w: &Subspace) -> usize {
    let n = v.ambient_dim();
    let mut m = DMatrix::zeros(n, v.dim() + w.dim());
    m.view_mut((0, 0), (n, v.dim())).copy_from(v.basis());
    m.view_mut((0, v.dim()), (n, w.dim())).copy_from(w.basis());
    let sv = m.svd(false, false).singular_values;
    let max = sv.max();
    v.dim() + w.dim() - sv.iter().filter(|&&s| s > 1e-8 * max).count()
}

fn criterion_2() -> Check {
    let mut rng = seeding::rng(202);
    let mut failures = Vec::new();
    let mut worst_factor: f64 = 0.0;
    for trial in 0..100 {
        let (n, k) = if trial < 50 { (4, 1 + trial % 2) } else { (6, 1 + trial % 3) };
        let half = n / 2;
        let common = DMatrix::from_fn(n, k, |_, _| rng.random::<f64>() - 0.5);
        let mut vb = common.clone().resize_horizontally(half, 0.0);
        let mut wb = common.resize_horizontally(half, 0.0);
        for c in k..half {
            vb.set_column(c, &DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5));
            wb.set_column(c, &DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5));
        }
        let (v, w) = (Subspace::span(&vb), Subspace::span(&wb));
        let initial = rank_oracle(&v, &w);
        match separate_pair(&v, &w, 0.05, trial as u64) {
            Ok((sigma, trace)) => {
                let after = rank_oracle(&v.transformed(&sigma), &w);
                let factors = trace.factors();
                for f in &factors {
                    worst_factor = worst_factor.max(f.matrix().distance_to_identity());
                }
                if initial != k || after != 0 || factors.len() != k {
                    failures.push(format!("pair {trial}: k {k}, oracle {initial}→{after}, {} factors", factors.len()));
                }
            }
            Err(e) => failures.push(format!("pair {trial}: {e}")),
        }
    }
    ensure(
        failures.is_empty() && worst_factor <= 0.05,
        format!("{} failures {:?}, worst factor ‖τ − I‖ {worst_factor:.10}", failures.len(), failures),
    )
}

fn criterion_3() -> Check {
    let mut rng = seeding::rng(303);
    let s = scenario("generic_d2");
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let c = SkewCocycle::new(random_field(&mut rng, 1 + k % 2), s.skew.clone());
        let x = random_point(&mut rng);
        let m = rng.random_range(1..=20i64);
        let n = rng.random_range(1..=20i64);
        let run = || -> cocycle_lab::error::Result<f64> {
            let mn = cocycle_product(&c, &x, m + n)?.matrix;
            let an = cocycle_product(&c, &x, n)?.matrix;
            let am = cocycle_product(&c, &c.skew.iterate(&x, n), m)?.matrix;
            let rhs = am.entries() * an.entries();
            Ok((mn.entries() - &rhs).norm() / rhs.norm())
        };
        worst = worst.max(run().map_err(|e| e.to_string())?);
    }
    ensure(worst <= 1e-9, format!("max relative residual {worst:.2e} over 100 triples"))
}

fn spectrum(name: &str) -> Result<cocycle_lab::cocycle::LyapunovReport, String> {
    let s = scenario(name);
    let sampler = sampler_by_name::<SkewPoint>(&s.spectrum.sampler).map_err(|e| e.to_string())?;
    let cfg = s.lyapunov_config();
    if cfg.iterations != 100_000 {
        return Err(format!("{name} runs {} iterations", cfg.iterations));
    }
    lyapunov_spectrum(&s.cocycle(), sampler.as_ref(), &cfg).map_err(|e| e.to_string())
}

fn criterion_4() -> Check {
    let diag = spectrum("diag")?;
    let cat = spectrum("cat_constant")?;
    let rot = spectrum("rotation")?;
    let ln2 = 2f64.ln();
    let e_diag = (diag.exponents[0] - ln2).abs().max((diag.exponents[1] + ln2).abs());
    let e_cat = (cat.exponents[0] - 0.9624).abs();
    let e_rot = rot.exponents.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    ensure(
        e_diag <= 1e-3 && e_cat <= 1e-3 && e_rot <= 2e-3,
        format!(
            "diag {:?} (err {e_diag:.1e}), cat λ⁺ {:.6} (err {e_cat:.1e}), rotation max |λ| {e_rot:.1e}",
            diag.exponents, cat.exponents[0]
        ),
    )
}

fn criterion_5() -> Check {
    let r = spectrum("generic_d2")?;
    let n = r.exponents.len();
    let worst = (0..r.pairing_defects.len())
        .map(|i| r.pairing_defects[i] / (3.0 * r.stderr[i].max(r.stderr[n - 1 - i])))
        .fold(0.0f64, f64::max);
    ensure(
        n == 4 && r.pairing_within(3.0),
        format!("exponents {:?}, defects {:?}, worst defect/(3·stderr) {worst:.3}", r.exponents, r.pairing_defects),
    )
}

fn criterion_6() -> Check {
    let s = scenario("bunched");
    let c = s.cocycle();
    let cert = certify_fiber_bunching(&c, s.bunching.horizon, s.bunching.grid).map_err(|e| e.to_string())?;
    if !cert.pass {
        return Err(format!("certificate fails with rate {:.4}", cert.theta_rate));
    }
    let l = cert.holder_constant;
    let mut rng = seeding::rng(606);
    let (mut groupoid, mut equiv, mut identity, mut holder_ratio) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let err = |e: cocycle_lab::error::LabError| e.to_string();
    for _ in 0..50 {
        let anchor = Anchor::Lattice(TorusPoint::new(rng.random(), rng.random()));
        let t = FiberCoord::new(rng.random());
        let p = LeafPoint::new(anchor.clone(), LeafKind::Stable, 0.0, t);
        let off = 0.2 * (rng.random::<f64>() - 0.5);
        let q = leaf_partner(&c.skew, &anchor, LeafKind::Stable, t, off);
        let w = leaf_partner(&c.skew, &anchor, LeafKind::Stable, t, off * rng.random::<f64>());
        let hpq = leaf_holonomy(&c, &cert, &p, &q).map_err(err)?;
        let hpw = leaf_holonomy(&c, &cert, &p, &w).map_err(err)?;
        let hwq = leaf_holonomy(&c, &cert, &w, &q).map_err(err)?;
        let hpp = leaf_holonomy(&c, &cert, &p, &p).map_err(err)?;
        identity = identity.max((hpp.matrix.entries() - DMatrix::identity(2, 2)).amax());
        groupoid = groupoid.max((hpq.matrix.entries() - hwq.matrix.entries() * hpw.matrix.entries()).amax());
        let h1 = leaf_holonomy(&c, &cert, &p.iterate(&c.skew, 1), &q.iterate(&c.skew, 1)).map_err(err)?;
        let aq = cocycle_product(&c, &hpq.q, 1).map_err(err)?.matrix;
        let ap = cocycle_product(&c, &hpq.p, 1).map_err(err)?.matrix;
        let rhs = aq.entries() * hpq.matrix.entries() * ap.inverse().entries();
        equiv = equiv.max((h1.matrix.entries() - rhs).amax());
        if hpq.holder_constant != l {
            return Err("holonomies report different Hölder constants".into());
        }
        let bound = l * hpq.distance.powf(cert.alpha);
        holder_ratio = holder_ratio.max(hpq.matrix.distance_to_identity() / bound.max(f64::MIN_POSITIVE));
    }
    ensure(
        identity <= 1e-7 && groupoid <= 1e-7 && equiv <= 1e-7 && holder_ratio <= 1.0,
        format!(
            "identity {identity:.1e}, groupoid {groupoid:.1e}, equivariance {equiv:.1e}, \
             max ‖H − I‖/(L·d^α) {holder_ratio:.3} with L = {l:.3}"
        ),
    )
}

fn criterion_7() -> Check {
    let run = Cli::run("twisting", "hyperbolic_twist", &[]);
    let report = run.report();
    let cli_ok = run.code == 2
        && report["verdicts"]
            .as_array()
            .is_some_and(|v| v.iter().all(|x| x["verdict"] == "negative"));
    let s = scenario("hyperbolic_twist");
    let c = s.cocycle();
    let leaf = s.leaf().map_err(|e| e.to_string())?;
    let z = find_homoclinic(c.skew.base(), &leaf, 0).map_err(|e| e.to_string())?;
    let lp = HomoclinicLoop::new(&c.skew, leaf, z);
    let Factor::Fixed { matrix } = &c.field.factors()[0] else {
        return Err("hyperbolic scenario has no fixed factor".into());
    };
    // σ along the bisector of the eigendirections mixes them.
    let e = matrix.entries().clone().symmetric_eigen();
    let v: DVector<f64> = e.eigenvectors.column(0) + e.eigenvectors.column(1);
    let tau = Transvection::new(&v, 0.05).map_err(|e| e.to_string())?;
    let p = transvection_perturbation(&c.field, &lp, c.skew.base(), &[tau], 0.05, None, Side::Left)
        .map_err(|e| e.to_string())?;
    let hat = SkewCocycle::new(p.field, c.skew.clone());
    let cert = certify_fiber_bunching(&hat, s.bunching.horizon, s.bunching.grid).map_err(|e| e.to_string())?;
    let cfg = s.twisting_config();
    let sampler = sampler_by_name::<FiberCoord>("lebesgue").map_err(|e| e.to_string())?;
    let v = weak_twisting_test(&hat, &cert, &lp, sampler.as_ref(), &cfg).map_err(|e| e.to_string())?;
    ensure(
        cli_ok && v.verdict == Verdict::Positive && v.j == Some(1) && v.fraction >= 0.05 && cfg.epsilon_angle >= 1e-2,
        format!(
            "CLI exit {} on the constant matrix; after σ: {} at j = {:?} with {:.1}% of samples above {} rad",
            run.code,
            v.verdict.as_str(),
            v.j,
            100.0 * v.fraction,
            cfg.epsilon_angle
        ),
    )
}

fn criterion_8() -> Check {
    let run = Cli::run("monotone", "monotone_rotation", &["--set", "monotone.epsilon=6.0"]);
    let report = run.report();
    let detail = &report["verdicts"][0]["detail"];
    let margin = detail["margin"].as_f64().unwrap_or(f64::NAN);
    let cli_ok = run.code == 0 && detail["grid"] == 2048 && margin >= 6.28 - 1e-6;
    let constant = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
    let mut constant_fails = true;
    for eps in [1e-9, 1e-3, 1.0, 6.0] {
        let cfg = MonotoneConfig {
            epsilon: eps,
            ..MonotoneConfig::default()
        };
        let v = epsilon_monotonicity_test(&|_| constant.clone(), &cfg).map_err(|e| e.to_string())?;
        constant_fails &= !v.pass;
    }
    let cli_const = Cli::run("monotone", "diag", &["--set", "monotone.epsilon=1e-9"]);
    ensure(
        cli_ok && constant_fails && cli_const.code == 2,
        format!(
            "rotation margin {margin:.9} (exit {}), constant fails ε ∈ {{1e-9, 1e-3, 1, 6}}: {constant_fails} (CLI exit {})",
            run.code, cli_const.code
        ),
    )
}

fn criterion_9() -> Check {
    let sweep = Cli::run("sweep", "identity", &[]);
    let csv = sweep.csv("sweep.csv");
    let mut rdr = csv::ReaderBuilder::new().from_reader(csv_body(&csv).as_bytes());
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(pc), Some(vc)) = (col("parameter"), col("leaf_verdict")) else {
        return Err(format!("sweep.csv lacks columns (exit {})", sweep.code));
    };
    let rows: Vec<csv::StringRecord> = rdr.records().filter_map(Result::ok).collect();
    let positive: Vec<f64> = rows
        .iter()
        .filter(|r| &r[vc] == "positive")
        .filter_map(|r| r[pc].parse::<f64>().ok())
        .filter(|&t| t <= 0.5)
        .collect();
    let perturb = Cli::run("perturb", "identity", &[]);
    let report = perturb.report();
    let search = report["verdicts"]
        .as_array()
        .and_then(|v| v.iter().find(|x| x["test"] == "search").cloned())
        .unwrap_or(Value::Null);
    let top = search["detail"]["top_exponent"].as_f64().unwrap_or(f64::NAN);
    let err = search["detail"]["top_stderr"].as_f64().unwrap_or(f64::NAN);
    ensure(
        sweep.code == 0 && rows.len() == 11 && !positive.is_empty() && perturb.code == 0 && top > 3.0 * err,
        format!(
            "sweep rows {}, positive leaf verdicts at θ = {:?}; search λ⁺ {top:.4} ± {err:.4} (exit {})",
            rows.len(),
            positive,
            perturb.code
        ),
    )
}

fn criterion_10() -> Check {
    let a = Cli::run("spectrum", "generic_d2", &["--set", "spectrum.iterations=5000", "--jobs", "1"]);
    let b = Cli::run("spectrum", "generic_d2", &["--set", "spectrum.iterations=5000", "--jobs", "4"]);
    let sa = Cli::run("sweep", "identity", &["--set", "spectrum.iterations=2000", "--set", "sweep.count=4"]);
    std::thread::sleep(Duration::from_millis(1100));
    let sb = Cli::run("sweep", "identity", &["--set", "spectrum.iterations=2000", "--set", "sweep.count=4"]);
    let (ca, cb) = (a.csv("spectrum.csv"), b.csv("spectrum.csv"));
    let (wa, wb) = (sa.csv("sweep.csv"), sb.csv("sweep.csv"));
    let same = !ca.is_empty() && csv_body(&ca) == csv_body(&cb) && !wa.is_empty() && csv_body(&wa) == csv_body(&wb);
    ensure(
        same,
        format!(
            "spectrum bodies identical across 1 and 4 threads, sweep bodies identical across runs: {same} ({} + {} bytes)",
            csv_body(&ca).len(),
            csv_body(&wa).len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Check, u64); 10] = [
        ("symplecticity", criterion_1, 10),
        ("separation", criterion_2, 30),
        ("cocycle identity", criterion_3, 10),
        ("exponent ground truths", criterion_4, 60),
        ("symplectic pairing", criterion_5, 120),
        ("holonomy properties", criterion_6, 120),
        ("loop diagnostics", criterion_7, 180),
        ("monotonicity", criterion_8, 10),
        ("rotation-block pipeline", criterion_9, 300),
        ("determinism", criterion_10, 300),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs < *budget as f64;
        let (tag, msg) = match (&result, in_time) {
            (Ok(m), true) => ("PASS", m.clone()),
            (Ok(m), false) => ("FAIL", format!("{m}; exceeded the {budget} s budget")),
            (Err(m), _) => ("FAIL", m.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} criterion {:>2} ({name}): {msg} [{secs:.1} s]", i + 1);
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
