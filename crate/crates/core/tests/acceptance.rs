//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//! Run with `cargo test -p mixedvol --test acceptance`.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use mixedvol::bodies::{self, ConvexPolytope};
use mixedvol::functionals::{circumradius, mixed_volume_1, mixed_volume_oracle, v1, volume};
use mixedvol::inequalities::{self, loglog_slope};
use mixedvol::oracle::{meb_exhaustive, mc_v1};
use mixedvol::rng::split_seed;
use mixedvol::spherical::{self, kappa, monte_carlo_quadrature, sample_sphere, PaperConstants};
use mixedvol::sweeps::{run_sweep, Family, Grid, SweepOptions};
use mixedvol::{Direction, Result};

const ROOT_SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn rand_body(n: usize, stream: u64) -> Result<ConvexPolytope> {
    let s = split_seed(ROOT_SEED, stream);
    let k = n + 1 + (s % 9) as usize;
    bodies::random_polytope(n, k, s)
}

fn dir(v: &[f64]) -> Direction {
    Direction::new(v.to_vec()).unwrap()
}

fn equality_cases() -> Result<Outcome> {
    let mut notes = Vec::new();
    let mut ok = true;

    // orthogonal segments in the plane
    let k = bodies::segment(&dir(&[1.0, 0.0]), 2.0)?;
    let m = bodies::segment(&dir(&[0.0, 1.0]), 3.0)?;
    let r = inequalities::check_betke_weil(&k, &m, 1e-12)?;
    let rel = (r.lhs - r.rhs).abs() / r.rhs;
    ok &= rel < 1e-12 && r.equality_witness.is_some();
    notes.push(format!("(a) rel {rel:.1e}"));

    // segment orthogonal to a square, n = 3
    let k = bodies::segment(&dir(&[0.0, 0.0, 1.0]), 2.0)?;
    let m = bodies::box_body(&[1.0, 1.0, 0.0])?;
    let r = inequalities::check_reverse_minkowski(&k, &m, 1e-12)?;
    ok &= r.deficit.abs() < 1e-12 && r.equality_witness.is_some();
    notes.push(format!("(b) deficit {:.1e}", r.deficit));

    // Linhart equality on segments in several dimensions
    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        let mut e = vec![1.0; n];
        e[0] = -0.5;
        let seg = bodies::segment(&dir(&e), 1.7)?;
        let r = inequalities::check_linhart(&seg, 1e-12)?;
        worst = worst.max((r.lhs / r.rhs - 1.0).abs());
    }
    ok &= worst < 1e-12;
    notes.push(format!("(c) rel {worst:.1e}"));

    // equilateral triangle, V(K,-K) from the Minkowski sum
    let tri = bodies::regular_polygon(3)?;
    let r = inequalities::check_betke_weil_self(&tri, 1e-10)?;
    let diff = tri.minkowski_sum(&tri.negate())?;
    let v_mixed = (volume(&diff) - 2.0 * volume(&tri)) / 2.0;
    let oracle_deficit = 1.0 - v_mixed / r.rhs;
    ok &= r.deficit.abs() < 1e-10 && oracle_deficit.abs() < 1e-10 && r.equality_witness.is_some();
    notes.push(format!("(d) deficit {:.1e}, sum oracle {:.1e}", r.deficit, oracle_deficit));
    outcome(ok, notes.join(", "))
}

fn inequality_sweeps() -> Result<Outcome> {
    let tol = 1e-9;
    let mut worst = [f64::INFINITY; 4];
    let mut fails = 0;
    for n in [2usize, 3] {
        for i in 0..500u64 {
            let k = rand_body(n, 2 * (1000 * n as u64 + i))?;
            let m = rand_body(n, 2 * (1000 * n as u64 + i) + 1)?;
            let mut reps = vec![
                (0, inequalities::check_minkowski(&k, &m, tol)?),
                (2, inequalities::check_reverse_minkowski(&k, &m, tol)?),
                (3, inequalities::check_linhart(&k, tol)?),
            ];
            if n == 2 {
                reps.push((1, inequalities::check_betke_weil(&k, &m, tol)?));
            }
            for (j, r) in reps {
                worst[j] = worst[j].min(r.deficit);
                fails += usize::from(r.deficit < -tol);
            }
        }
    }
    outcome(
        fails == 0,
        format!(
            "1000 pairs, min deficits minkowski {:.2e}, betke-weil {:.2e}, reverse {:.2e}, linhart {:.2e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn oracle_equivalence() -> Result<Outcome> {
    let mut mv_worst: f64 = 0.0;
    let mut r_worst: f64 = 0.0;
    let mut z_worst: f64 = 0.0;
    for i in 0..200u64 {
        let n = 2 + (i % 2) as usize;
        let k = rand_body(n, 50_000 + 2 * i)?;
        let m = rand_body(n, 50_001 + 2 * i)?;
        let fast = mixed_volume_1(&k, &m)?;
        let slow = mixed_volume_oracle(&k, &m)?;
        mv_worst = mv_worst.max((fast - slow).abs() / slow.abs().max(1e-300));
        let (_, r) = meb_exhaustive(k.vertices());
        r_worst = r_worst.max((circumradius(&k) - r).abs());
        if i < 100 {
            let est = mc_v1(&k, 100_000, split_seed(ROOT_SEED, 70_000 + i))?;
            z_worst = z_worst.max((v1(&k)? - est.value).abs() / est.std_error);
        }
    }
    outcome(
        mv_worst <= 1e-7 && r_worst <= 1e-9 && z_worst <= 4.0,
        format!("mixed rel {mv_worst:.1e}, circumradius abs {r_worst:.1e}, v1 max |z| {z_worst:.2} over 100 bodies"),
    )
}

fn spherical_profile() -> Result<Outcome> {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 2..=6 {
        let t = spherical::f_table(n, 500)?;
        let decreasing = t.windows(2).all(|w| w[0][1] > w[1][1]);
        let target = 2.0 * kappa(n - 1) / (n as f64 * kappa(n));
        let end = spherical::f_profile(n, PI / 2.0)?;
        let c1 = spherical::c1_estimate(n)?;
        let bound = spherical::c1_closed_form_bound(n)?;
        let good = decreasing && (end - target).abs() < 1e-10 && c1 > 0.0 && c1 >= bound;
        ok &= good;
        if !good {
            notes.push(format!("n={n} decreasing={decreasing} f(pi/2) err {:.1e} c1 {c1} bound {bound}", (end - target).abs()));
        }
    }
    let tau = spherical::tau(3)?;
    let tau_err = (tau - (PI / 12.0).sin()).abs();
    ok &= tau_err < 1e-10;
    notes.push(format!("n=2..6 monotone, tau(3) err {tau_err:.1e}"));
    outcome(ok, notes.join("; "))
}

fn diameter(points: &[Direction]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let s: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum();
            d = d.max(s.sqrt());
        }
    }
    d
}

fn normalise(v: Vec<f64>) -> Direction {
    Direction::new(v).unwrap()
}

/// Jittered regular simplex on the sphere; small diameter with the origin inside.
fn jittered_simplex(n: usize, noise: f64, seed: u64) -> Result<Vec<Direction>> {
    let s = bodies::simplex_regular(n)?;
    let gauss = sample_sphere(n, s.vertices().len(), seed);
    Ok(s
        .vertices()
        .iter()
        .zip(gauss)
        .map(|(v, g)| normalise(v.iter().zip(&g).map(|(a, b)| a + noise * b).collect()))
        .collect())
}

fn dv_lower_bound() -> Result<Outcome> {
    let pairs = 50_000;
    let mut ok = true;
    let mut min_margin = f64::INFINITY;
    let mut min_value = f64::INFINITY;
    for n in [2usize, 3] {
        let mut found = 0;
        let mut attempt = 0u64;
        while found < 100 {
            attempt += 1;
            let seed = split_seed(ROOT_SEED, 90_000 + 1000 * n as u64 + attempt);
            let k = n + 1 + (seed % 6) as usize;
            let pts: Vec<Direction> = sample_sphere(n, k, seed).into_iter().map(normalise).collect();
            let quad = monte_carlo_quadrature(n, pairs, seed ^ 1)?;
            let Ok(est) = spherical::v1_spherical_hull(&pts, &quad) else {
                continue;
            };
            found += 1;
            min_value = min_value.min(est.value);
            ok &= est.value >= 2.0 - 3.0 * est.std_error;
        }
    }
    let mut vacuous = Vec::new();
    for n in [2usize, 3] {
        let c3 = PaperConstants::compute(n)?.c3_est;
        let simplex_diam = diameter(&jittered_simplex(n, 0.0, 0)?);
        for step in 1..=10 {
            let eta = 0.05 * step as f64;
            if 2.0 - eta < simplex_diam - 1e-12 {
                vacuous.push(format!("n={n} eta={eta:.2}"));
                continue;
            }
            let mut found = 0;
            let mut attempt = 0u64;
            while found < 10 && attempt < 10_000 {
                attempt += 1;
                let seed = split_seed(ROOT_SEED, 200_000 + 10_000 * n as u64 + 100 * step + attempt);
                let noise = 0.3 * (seed % 1000) as f64 / 1000.0;
                let pts = jittered_simplex(n, noise, seed)?;
                if diameter(&pts) > 2.0 - eta {
                    continue;
                }
                let quad = monte_carlo_quadrature(n, pairs, seed ^ 2)?;
                let Ok(est) = spherical::v1_spherical_hull(&pts, &quad) else {
                    continue;
                };
                found += 1;
                let margin = est.value - (2.0 + c3 * eta.sqrt() - 3.0 * est.std_error);
                min_margin = min_margin.min(margin);
                ok &= margin >= 0.0;
            }
            ok &= found == 10;
        }
    }
    outcome(
        ok,
        format!(
            "min V1 {min_value:.4} over 200 sets; eta bound margin >= {min_margin:.3}; no admissible set for {}",
            vacuous.join(", ")
        ),
    )
}

fn stability_scaling() -> Result<Outcome> {
    let opts = SweepOptions { dim: 2, ..SweepOptions::default() };
    let res = run_sweep(Family::Isosceles, &Grid::parse("0.02:0.3:15", false)?, &opts)?;
    let slope = res.fitted.get("tube_vs_eps").copied().flatten();
    let pass = matches!(slope, Some(s) if (s - 0.5).abs() <= 0.05);
    outcome(pass, format!("tube radius vs eps slope {slope:?}"))
}

fn remark_instances() -> Result<Vec<(f64, inequalities::SurfaceStabilityResult, f64, f64)>> {
    let eps = 0.01;
    let e = bodies::remark_direction(3, eps)?;
    let mut out = Vec::new();
    for lambda in [10.0, 30.0, 100.0] {
        let m = bodies::remark_body(3, lambda, eps)?;
        let s = mixedvol::measures::surface_area_measure(&m)?;
        let ratio = s.integrate_abs_cos(&e)? / s.total_mass();
        let p = inequalities::surface_stability_check(&m, &e, eps, 1e-9)?;
        out.push((lambda, p, ratio, m.width(&e)?));
    }
    Ok(out)
}

fn reverse_stability() -> Result<Outcome> {
    let opts = SweepOptions { dim: 3, ..SweepOptions::default() };
    let res = run_sweep(Family::ThinBox, &Grid::parse("0.001:0.02:8", true)?, &opts)?;
    let slab = res.fitted.get("slab_vs_eps").copied().flatten();
    let cos = res.fitted.get("cos_deficit_vs_eps").copied().flatten();
    let rows_ok = res.rows.iter().all(|r| r.passed);
    let remark_ok = remark_instances()?
        .iter()
        .all(|(_, p, _, _)| p.bound_checks.iter().all(|c| c.pass != Some(false)));
    let pass = rows_ok
        && remark_ok
        && matches!(slab, Some(s) if s >= 0.25 - 0.05)
        && matches!(cos, Some(c) if c >= 0.5 - 0.1);
    outcome(
        pass,
        format!(
            "thin-box {} instances all pass={rows_ok}, slab exponent {slab:?}, cos exponent {cos:?}; remark c4/c5 pass={remark_ok}",
            res.rows.len()
        ),
    )
}

fn remark_reproduction() -> Result<Outcome> {
    let eps: f64 = 0.01;
    let inst = remark_instances()?;
    let mut ok = true;
    for (_, p, ratio, _) in &inst {
        ok &= p.r > 1.0 && p.r < 3.0 && *ratio >= 1.0 - eps;
    }
    let lambdas: Vec<f64> = inst.iter().map(|x| x.0).collect();
    let widths: Vec<f64> = inst.iter().map(|x| x.3).collect();
    let slope = loglog_slope(&lambdas, &widths);
    ok &= matches!(slope, Some(s) if (s - 1.0).abs() <= 0.1);
    let rs: Vec<String> = inst.iter().map(|x| format!("{:.3}", x.1.r)).collect();
    let ratios: Vec<String> = inst.iter().map(|x| format!("{:.5}", x.2)).collect();
    let scaled: Vec<String> = inst.iter().map(|x| format!("{:.3}", x.3 / (x.0 * eps.sqrt()))).collect();
    outcome(
        ok,
        format!(
            "r = [{}], projection ratio = [{}], w/(lambda sqrt eps) = [{}], width exponent {slope:?}",
            rs.join(", "),
            ratios.join(", "),
            scaled.join(", ")
        ),
    )
}

fn cli(threads: &str, args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_mixedvol"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .expect("binary runs");
    let mut bytes = out.stdout;
    bytes.extend_from_slice(&out.stderr);
    bytes.extend_from_slice(format!("exit {:?}", out.status.code()).as_bytes());
    bytes
}

fn determinism() -> Result<Outcome> {
    let dir = std::env::temp_dir().join(format!("mixedvol-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, p: &ConvexPolytope| {
        let path = dir.join(name);
        std::fs::write(&path, p.to_json()).unwrap();
        path.to_string_lossy().into_owned()
    };
    let k = write("k.json", &rand_body(3, 1)?);
    let m = write("m.json", &rand_body(3, 2)?);
    let swap = vec![vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]];
    let seg = write("seg.json", &bodies::perturbed_segment(3, 2.0, 1e-4, 5)?.linear_image(&swap)?);
    let sq = write("sq.json", &bodies::thin_box(3, 1e-3, 1e-3)?);
    let runs: Vec<Vec<&str>> = vec![
        vec!["--seed", "7", "compute", "--body", &k],
        vec!["--seed", "7", "oracle", "--body", &k, "--m", &m],
        vec!["--seed", "7", "mixed", "--k", &k, "--m", &m, "--oracle"],
        vec!["--seed", "7", "check", "minkowski", "--k", &k, "--m", &m],
        vec!["--seed", "7", "certify", "reverse", "--k", &seg, "--m", &sq],
        vec!["--seed", "7", "--format", "csv", "sweep", "thin-box", "--grid", "0.001:0.02:6", "--log"],
        vec!["--seed", "7", "--format", "csv", "sweep", "perturbed-segment", "--grid", "0.001:0.05:6", "--log"],
        vec!["constants", "--dim", "4"],
        vec!["--format", "csv", "sphere-profile", "--dim", "5", "--alpha-steps", "50"],
    ];
    let mut differing = Vec::new();
    for args in &runs {
        let a = cli("1", args);
        let b = cli("4", args);
        let c = cli("4", args);
        if a != b || b != c {
            differing.push(args.iter().find(|s| !s.starts_with('-') && s.parse::<f64>().is_err()).copied().unwrap_or("?"));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        differing.is_empty(),
        format!("{} commands x (1, 4, 4 threads); differing: {:?}", runs.len(), differing),
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome>, Duration);

fn main() {
    let criteria: [Criterion; 9] = [
        ("equality cases exact", equality_cases, Duration::from_secs(1)),
        ("inequality sweeps", inequality_sweeps, Duration::from_secs(60)),
        ("oracle equivalence", oracle_equivalence, Duration::from_secs(120)),
        ("spherical profile", spherical_profile, Duration::from_secs(10)),
        ("DV lower bound", dv_lower_bound, Duration::from_secs(120)),
        ("stability scaling", stability_scaling, Duration::from_secs(5)),
        ("reverse Minkowski stability", reverse_stability, Duration::from_secs(120)),
        ("remark reproduction", remark_reproduction, Duration::from_secs(30)),
        ("determinism", determinism, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = f();
        let dt = t.elapsed();
        let (pass, detail) = match res {
            Ok(o) => (o.pass && dt <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {}: {} {name} ({:.2}s, budget {}s): {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            dt.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
