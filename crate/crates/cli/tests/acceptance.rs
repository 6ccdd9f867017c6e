//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::{PI, SQRT_2};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{median, random_matrix, random_real_matrix, subsets, support_deviation};
use corsing_core::analysis::{rip_exact, rip_monte_carlo, weighted_rip_exact};
use corsing_core::corsing::{h1_error, AdrProblem, CorsingConfig, CorsingPlan, PetrovGalerkinSetup};
use corsing_core::numkit::{least_squares, ComplexMatrix, RandomStream};
use corsing_core::recovery::{basis_pursuit, omp, weighted_basis_pursuit, WeightVector};
use corsing_core::systems::{fourier_system, hat_hierarchical_system, sample_riesz_matrix, H10Basis};
use corsing_core::C64;
use serde_json::Value;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_corsing-lab"))
        .args(args)
        .env_remove("CORSING_LAB_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("corsing-lab {args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn csv_column(text: &[u8], name: &str) -> Result<Vec<String>, String> {
    let mut rdr = csv::Reader::from_reader(text);
    let idx = rdr.headers().map_err(|e| e.to_string())?.iter().position(|h| h == name).ok_or(format!("no column {name}"))?;
    rdr.records().map(|r| r.map(|r| r[idx].to_string()).map_err(|e| e.to_string())).collect()
}

fn floats(v: Vec<String>) -> Vec<f64> {
    v.iter().map(|s| s.parse().unwrap()).collect()
}

fn l2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// CSV payloads kept for the determinism check.
#[derive(Default)]
struct Payloads {
    sweep: Vec<u8>,
    recover: Vec<u8>,
    corsing: Vec<Vec<u8>>,
}

fn criterion_1() -> Check {
    let r: Value = serde_json::from_slice(&cli(&["constants"])?).map_err(|e| e.to_string())?;
    let c = &r["result"];
    let f = |k: &str| c[k].as_f64().unwrap_or(f64::NAN);
    let kappa = (10.0 - 7.0 * SQRT_2) / 28.0;
    let c0 = 1600.0 * (99.0 + 70.0 * SQRT_2);
    let checks = [
        ("kappa", (f("kappa") - kappa).abs() <= 1e-12),
        ("c0", ((f("c0") - c0) / c0).abs() <= 1e-6),
        ("c1", f("c1") == 492.0),
        ("K_bar", c["K_bar"] == 12),
        ("C", f("C_omp") == 49.0),
        ("eps*", f("eps_star_normalized") == 1.0 / 6.0 && f("eps_star") == 1.0 / 13.0),
        ("kappa limit", f("kappa_cond_limit") == 13.0 / 12.0),
    ];
    let bad: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    ensure(bad.is_empty(), format!("kappa = {:.10}, c0 = {:.4}, mismatches {bad:?}", f("kappa"), f("c0")))
}

fn criterion_2() -> Check {
    let mut worst_exact = 0.0f64;
    let mut worst_ratio = f64::INFINITY;
    let mut above = false;
    for seed in 0..20u64 {
        let rows = 4 + (seed % 5) as usize;
        let cols = rows + (seed % 5) as usize;
        let (rows, cols) = (rows, cols.min(12));
        let s = 1 + (seed % 3) as usize;
        let a = random_matrix(rows, cols, 1000 + seed);
        let exact = rip_exact(&a, s).map_err(|e| e.to_string())?.epsilon_s;
        let oracle = subsets(cols, s).iter().map(|sup| support_deviation(&a, sup)).fold(0.0, f64::max);
        worst_exact = worst_exact.max((exact - oracle).abs());
        let mc = rip_monte_carlo(&a, s, 100_000, &RandomStream::new(seed, 1)).map_err(|e| e.to_string())?.epsilon_s;
        above |= mc > exact + 1e-12;
        worst_ratio = worst_ratio.min(mc / exact);
    }
    ensure(
        worst_exact <= 1e-10 && !above && worst_ratio >= 0.8,
        format!("max |exact - oracle| = {worst_exact:.2e}, min mc/exact = {worst_ratio:.4}, mc above exact: {above}"),
    )
}

fn sweep_args(threads: &'static str) -> Vec<&'static str> {
    vec!["--threads", threads, "sweep", "--system", "fourier", "--N", "64", "--m", "128,512", "--s", "3", "--seeds", "20", "--no-timing"]
}

fn criterion_3(p: &mut Payloads) -> Check {
    let out = cli(&sweep_args("1"))?;
    let m = floats(csv_column(&out, "m")?);
    let eps = floats(csv_column(&out, "epsilon_s")?);
    let pick = |mm: f64| median(&m.iter().zip(&eps).filter(|(a, _)| **a == mm).map(|(_, e)| *e).collect::<Vec<_>>());
    let (lo, hi) = (pick(128.0), pick(512.0));
    p.sweep = out;
    let ratio = hi / lo;
    ensure(
        (0.35..=0.70).contains(&ratio),
        format!("median eps_3: m=128 {lo:.4}, m=512 {hi:.4}, ratio {ratio:.3}"),
    )
}

fn recover_args(threads: &'static str) -> Vec<&'static str> {
    // m = ceil(8 s ln N) = ceil(194.08)
    vec!["--threads", threads, "recover", "--algo", "omp", "--system", "fourier", "--N", "128", "--m", "195", "--s", "5", "--replicas", "100"]
}

fn criterion_4(p: &mut Payloads) -> Check {
    let out = cli(&recover_args("1"))?;
    let hits = csv_column(&out, "support_recovered")?;
    let rate = hits.iter().filter(|v| *v == "true").count() as f64 / hits.len() as f64;
    p.recover = out;

    let mut mismatches = 0;
    let mut instances = 0;
    for n in [8usize, 12, 16, 20] {
        let sys = fourier_system(n).unwrap();
        for s in 1..=2 {
            let m = (8.0 * s as f64 * (n as f64).ln()).ceil() as usize;
            for seed in 0..25u64 {
                let a = sample_riesz_matrix(&sys, m, &mut RandomStream::new(seed, 0)).unwrap().matrix;
                let mut r = RandomStream::new(seed, 1);
                let mut f = vec![C64::new(0.0, 0.0); n];
                for j in r.subset(n, s) {
                    f[j] = r.complex_normal();
                }
                let y = a.matvec(&f).unwrap();
                let got = omp(&a, &y, s).map_err(|e| e.to_string())?;
                let best = subsets(n, s)
                    .into_iter()
                    .map(|sup| {
                        let ls = least_squares(&a.select_columns(&sup), &y).unwrap();
                        let res = l2(&a.select_columns(&sup).matvec(&ls.solution).unwrap().iter().zip(&y).map(|(u, v)| u - v).collect::<Vec<_>>());
                        (res, sup)
                    })
                    .min_by(|x, y| x.0.total_cmp(&y.0))
                    .unwrap();
                if got.support != best.1 {
                    mismatches += 1;
                }
                instances += 1;
            }
        }
    }
    ensure(
        rate >= 0.90 && mismatches == 0,
        format!("support recovery rate {rate:.2} over {} seeds; OMP vs exhaustive: {mismatches}/{instances} mismatches", hits.len()),
    )
}

fn criterion_5() -> Check {
    let tol = 1e-9;
    let mut worst_obj = f64::NEG_INFINITY;
    let mut worst_res = 0.0f64;
    let mut fixtures = 0;
    let mut run = |a: &ComplexMatrix<f64>, f: &[C64], y: &[C64], zeta: f64| -> Result<Vec<C64>, String> {
        let out = basis_pursuit(a, y, zeta, tol).map_err(|e| e.to_string())?;
        let truth: f64 = f.iter().map(|z| z.norm()).sum();
        worst_obj = worst_obj.max(out.objective - truth);
        worst_res = worst_res.max(out.residual_l2 - zeta);
        fixtures += 1;
        Ok(out.estimate)
    };
    for seed in 0..10 {
        let a = random_real_matrix(5, 12, seed);
        let f: Vec<C64> = (0..12).map(|j| C64::new(if j % 4 == 1 { 1.0 + j as f64 } else { 0.0 }, 0.0)).collect();
        let y = a.matvec(&f).unwrap();
        run(&a, &f, &y, 0.0)?;
        let b = random_matrix(6, 10, seed);
        let g: Vec<C64> = (0..10).map(|j| C64::new(j as f64, -1.0)).collect();
        let yb = b.matvec(&g).unwrap();
        run(&b, &g, &yb, 0.1)?;
    }
    // Noisy recovery on subsampled Fourier (orthonormal: C/c = 1).
    let sys = fourier_system(32).unwrap();
    let (s, zeta) = (2, 0.05);
    let mut worst_err = 0.0f64;
    let mut eligible = 0;
    for seed in 0..10 {
        let e = sample_riesz_matrix(&sys, 64, &mut RandomStream::new(seed, 0)).unwrap();
        let delta_2s = rip_exact(&e.matrix, 2 * s).map_err(|e| e.to_string())?.epsilon_s;
        if delta_2s >= 4.0 / 41f64.sqrt() {
            continue;
        }
        eligible += 1;
        let mut r = RandomStream::new(seed, 1);
        let mut f = vec![C64::new(0.0, 0.0); 32];
        for j in r.subset(32, s) {
            f[j] = r.complex_normal();
        }
        let noise: Vec<C64> = (0..64).map(|_| r.complex_normal()).collect();
        let scale = zeta / l2(&noise);
        let y: Vec<C64> = e.matrix.matvec(&f).unwrap().iter().zip(&noise).map(|(a, b)| a + b * scale).collect();
        let est = run(&e.matrix, &f, &y, zeta)?;
        let err = l2(&est.iter().zip(&f).map(|(a, b)| a - b).collect::<Vec<_>>());
        worst_err = worst_err.max(err);
    }
    ensure(
        worst_obj <= 1e-6 && worst_res <= tol && eligible >= 5 && worst_err <= 14.0 * zeta,
        format!(
            "{fixtures} fixtures: max(obj - ||f||_1) = {worst_obj:.2e}, max constraint excess = {worst_res:.2e}; \
             noisy ({eligible} RIP-eligible): max error {worst_err:.4} <= {:.2}",
            14.0 * zeta
        ),
    )
}

/// Sine coefficients of `x(1-x)/2` and `||u'||^2 = 1/12`.
fn sine_reference(n: usize) -> Vec<f64> {
    (1..=n).map(|q| if q % 2 == 1 { 2.0 * SQRT_2 / (q as f64 * PI).powi(2) } else { 0.0 }).collect()
}

/// `||u - best s-term||` in H^1_0 given the leading coefficients of `u` in
/// an orthonormal basis (the neglected coefficients are no larger).
fn best_s_term_error(x: &[f64], s: usize) -> f64 {
    let mut sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    sq.sort_by(|a, b| b.total_cmp(a));
    (1.0 / 12.0 - sq[..s].iter().sum::<f64>()).max(0.0).sqrt()
}

fn corsing_args(threads: &'static str, s: &'static str, json: &Path, csv: &Path) -> Vec<String> {
    let mut v: Vec<String> = ["--threads", threads, "corsing", "--problem"].iter().map(|x| x.to_string()).collect();
    v.push(fixture("diffusion_sine.json").display().to_string());
    v.extend(["--s", s, "--replicas", "20", "--out"].iter().map(|x| x.to_string()));
    v.push(json.display().to_string());
    v.push("--csv".into());
    v.push(csv.display().to_string());
    v
}

fn criterion_6(p: &mut Payloads) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let n = 63;
    let x_ref = sine_reference(n);
    let tail = 1.0 / 12.0 - x_ref.iter().map(|v| v * v).sum::<f64>();
    let mut lines = Vec::new();
    let mut ok = true;
    let mut medians = Vec::new();
    for s in ["4", "8", "16"] {
        let (json, csv) = (dir.path().join(format!("s{s}.json")), dir.path().join(format!("s{s}.csv")));
        let args = corsing_args("1", s, &json, &csv);
        cli(&args.iter().map(String::as_str).collect::<Vec<_>>())?;
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).map_err(|e| e.to_string())?;
        let mut errs = Vec::new();
        let mut kappa_one = true;
        for sol in doc["result"]["solutions"].as_array().unwrap() {
            kappa_one &= sol["kappa"].as_f64() == Some(1.0);
            let mut x = vec![0.0; n];
            for e in sol["x_hat"].as_array().unwrap() {
                x[e[0].as_u64().unwrap() as usize] = e[1].as_f64().unwrap();
            }
            let d2: f64 = x.iter().zip(&x_ref).map(|(a, b)| (a - b).powi(2)).sum();
            errs.push((d2 + tail).sqrt());
        }
        let med = median(&errs);
        let s_val: usize = s.parse().unwrap();
        let best = best_s_term_error(&x_ref, s_val);
        ok &= kappa_one && errs.len() == 20 && med <= 10.0 * best;
        medians.push(med);
        lines.push(format!("s={s}: median {med:.3e} vs best {best:.3e} (ratio {:.2}), kappa=1: {kappa_one}", med / best));
        p.corsing.push(std::fs::read(&csv).unwrap());
    }
    ok &= medians.windows(2).all(|w| w[1] < w[0]);
    ensure(ok, lines.join("; "))
}

fn criterion_7() -> Check {
    let levels = 5;
    let trial = H10Basis::Hat(hat_hierarchical_system(levels).unwrap());
    let n = trial.len();
    let pb = AdrProblem::diffusion(1.0, 1.0);
    let setup = PetrovGalerkinSetup::new(trial.clone(), 1 << 20, &pb).map_err(|e| e.to_string())?;
    let s = 8;
    let m = (4.0 * s as f64 * (n as f64).ln()).ceil() as usize;
    let base = CorsingConfig { s, n, gamma: 0.5, m, seed: 0, k: None, l_bound: None, epsilon: None };
    let plan = CorsingPlan::prepare(&setup, &pb, &base).map_err(|e| e.to_string())?;

    let t = &plan.truncation;
    let tail_at = |k: usize| plan.mu[k..].iter().sum::<f64>() + t.tail_beyond_scan;
    let minimal = tail_at(t.m) <= t.threshold && (t.m == 0 || tail_at(t.m - 1) > t.threshold);

    // Hierarchical surplus of x(1-x)/2 is h^2/2 at every node.
    let hats = hat_hierarchical_system(levels).unwrap();
    let x_ref: Vec<f64> = (0..n).map(|j| {
        let (_, _, h, peak) = hats.geometry(j);
        h * peak
    }).collect();
    let tail = 1.0 / 12.0 - x_ref.iter().map(|v| v * v).sum::<f64>();
    let x_ref_c: Vec<C64> = x_ref.iter().map(|&v| C64::new(v, 0.0)).collect();
    let mut errs = Vec::new();
    for seed in 0..20 {
        let sol = plan.solve(&CorsingConfig { seed, ..base.clone() }).map_err(|e| e.to_string())?;
        let d = h1_error(&sol.coefficients(), &x_ref_c, &trial).map_err(|e| e.to_string())?;
        errs.push((d * d + tail).sqrt());
    }
    let med = median(&errs);
    let best = best_s_term_error(&x_ref, s);
    ensure(
        minimal && med <= 20.0 * best,
        format!(
            "M = {} minimal: {minimal} (tail {:.3e} <= {:.3e} < tail(M-1) {:.3e}); median {med:.3e} vs best {best:.3e} (ratio {:.2})",
            t.m,
            t.tail,
            t.threshold,
            t.tail_before.unwrap_or(f64::NAN),
            med / best
        ),
    )
}

fn criterion_8() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("cover.json");
    cli(&["cover", "--N", "32", "--m", "128", "--s", "4", "--delta", "0.25", "--targets", "50", "--out", path.to_str().unwrap()])?;
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).map_err(|e| e.to_string())?;
    let c = &doc["result"];
    let (n, m, s, delta, k): (f64, f64, f64, f64, f64) = (32.0, 128.0, 4.0, 0.25, 1.0);
    let sk2 = s * k * k;
    let cap = 4.0 * delta * m / (sk2 * (sk2 / delta).log2());
    let rho = s.sqrt() / 2.0;
    let l = (sk2 * (sk2 * (sk2 / delta).log2() / delta).log2() / (rho * rho)).floor();
    let per = c["per_target"].as_array().unwrap();
    let max_exc = per.iter().map(|t| t["exceptions"].as_array().unwrap().len()).max().unwrap_or(0);
    let within = per.len() == 50 && per.iter().all(|t| t["exceptions"].as_array().unwrap().len() as f64 <= cap);
    let net = c["net_points"].as_array().unwrap().len() as f64;
    let net_ok = net.log2() <= l * (2.0 * n).log2();
    let verified = cli(&["cover", "--verify", path.to_str().unwrap()]).is_ok();
    ensure(
        within && net_ok && verified && c["L"].as_f64() == Some(l),
        format!(
            "max |J| = {max_exc} <= {cap:.3}; net {net} points, log2 = {:.2} <= L log2(2N) = {:.1} (L = {l}), \
             covering-number estimate log2 <= {:.1}; verify round trip: {verified}",
            net.log2(),
            l * (2.0 * n).log2(),
            c["covering_log_bound"].as_f64().unwrap_or(f64::NAN)
        ),
    )
}

fn criterion_9() -> Check {
    let mut rip_equal = 0;
    let mut worst_bp = 0.0f64;
    for seed in 0..10 {
        let a = random_matrix(6, 10, 500 + seed);
        let s = 1 + (seed % 3) as usize;
        let plain = rip_exact(&a, s).map_err(|e| e.to_string())?;
        let weighted = weighted_rip_exact(&a, s as f64, &WeightVector::ones(10)).map_err(|e| e.to_string())?;
        if plain.epsilon_s.to_bits() == weighted.epsilon_s.to_bits() {
            rip_equal += 1;
        }
        let mut r = RandomStream::new(seed, 4);
        let y: Vec<C64> = (0..6).map(|_| r.complex_normal()).collect();
        let zeta = 0.1 * seed as f64 / 10.0;
        let bp = basis_pursuit(&a, &y, zeta, 1e-12).map_err(|e| e.to_string())?;
        let wbp = weighted_basis_pursuit(&a, &y, &WeightVector::ones(10), zeta, 1e-12).map_err(|e| e.to_string())?;
        worst_bp = worst_bp.max((bp.objective - wbp.objective).abs());
    }
    ensure(
        rip_equal == 10 && worst_bp <= 1e-8,
        format!("weighted RIP bitwise equal on {rip_equal}/10; max |BP - WBP objective| = {worst_bp:.2e}"),
    )
}

fn criterion_10(p: &Payloads) -> Check {
    let sweep = cli(&sweep_args("8"))? == p.sweep;
    let recover = cli(&recover_args("8"))? == p.recover;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut corsing = p.corsing.len() == 3;
    for (i, s) in ["4", "8", "16"].into_iter().enumerate() {
        let (json, csv) = (dir.path().join("c.json"), dir.path().join("c.csv"));
        let args = corsing_args("8", s, &json, &csv);
        cli(&args.iter().map(String::as_str).collect::<Vec<_>>())?;
        corsing &= p.corsing.get(i).is_some_and(|prev| *prev == std::fs::read(&csv).unwrap());
    }
    ensure(
        sweep && recover && corsing,
        format!("--threads 1 vs 8 byte-identical: sweep {sweep}, recover {recover}, corsing {corsing}"),
    )
}

fn main() {
    let mut payloads = Payloads::default();
    let mut failed = 0;
    let mut report = |id: usize, limit: Duration, f: &mut dyn FnMut() -> Check| {
        let start = Instant::now();
        let res = f();
        let took = start.elapsed();
        let in_time = took <= limit;
        let (ok, msg) = match res {
            Ok(m) => (in_time, m),
            Err(m) => (false, m),
        };
        if !ok {
            failed += 1;
        }
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("criterion {id:>2}: {verdict} [{:.2} s / {} s] {msg}", took.as_secs_f64(), limit.as_secs());
    };
    let secs = Duration::from_secs;
    report(1, secs(1), &mut criterion_1);
    report(2, secs(30), &mut criterion_2);
    report(3, secs(60), &mut || criterion_3(&mut payloads));
    report(4, secs(60), &mut || criterion_4(&mut payloads));
    report(5, secs(60), &mut criterion_5);
    report(6, secs(60), &mut || criterion_6(&mut payloads));
    report(7, secs(120), &mut criterion_7);
    report(8, secs(60), &mut criterion_8);
    report(9, secs(30), &mut criterion_9);
    report(10, secs(300), &mut || criterion_10(&payloads));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
