//! Acceptance criteria 1 to 9.
//!
//! Each criterion prints one `criterion N: PASS|FAIL` line; run with
//! `cargo test -p locgame-cli --test acceptance -- --nocapture` to see them.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use locgame_cli::oracle;
use locgame_core::dynamics::{
    convergence_certificate, g_alpha, linearized_model, run_brd, sequential_update_matrix, spectral_radius,
    spread_start, BrdMode, SPECTRAL_TOL,
};
use locgame_core::equilibria::{
    check_concavity, check_dsc, price_of_anarchy, social_optimum, solve_ne, solve_ne_from, solve_stackelberg,
    stackelberg_limit, EquilibriumKind,
};
use locgame_core::learning::{convergence_time_sweep, discrete_equilibria, LearningConfig};
use locgame_core::{grad_utility, random_ordered_profile, LocationProfile, ScenarioConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const L: f64 = 100.0;
const TOL: f64 = 1e-10 * L;
const MAX_ITER: usize = 100_000;

fn cfg(k: usize, alpha: f64, eps: f64) -> ScenarioConfig {
    ScenarioConfig::new(L, eps, alpha, 1e4, k).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn criterion_1() -> Verdict {
    let t = Instant::now();
    let c = cfg(2, 2.0, 0.1);
    let r = solve_ne(&c, TOL, MAX_ITER).unwrap();
    let elapsed = t.elapsed();
    let x2 = 0.5 * (2.0 * L * L - 4.0 * 0.01f64).sqrt();
    let p = r.profile.positions();
    let err = rel(p[0], L - x2).max(rel(p[1], x2));
    verdict(
        err < 1e-6 && within(elapsed, 1.0),
        format!("x=({:.6},{:.6}) rel err {err:.1e} in {elapsed:.2?}", p[0], p[1]),
    )
}

fn criterion_2() -> Verdict {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut sym, mut spread) = (0.0f64, 0.0f64);
    for k in 2..=4 {
        for alpha in [2.0, 3.0] {
            let c = cfg(k, alpha, 0.1);
            let ne = solve_ne(&c, TOL, MAX_ITER).unwrap().profile;
            let p = ne.positions();
            for i in 0..k {
                sym = sym.max((p[i] + p[k - 1 - i] - L).abs());
            }
            for _ in 0..20 {
                let start = random_ordered_profile(&c, &mut rng);
                let other = solve_ne_from(&c, &start, TOL, MAX_ITER).unwrap().profile;
                spread = spread.max(other.max_distance(&ne));
            }
        }
    }
    let elapsed = t.elapsed();
    verdict(
        sym < 1e-6 * L && spread < 1e-6 * L && within(elapsed, 10.0),
        format!("symmetry gap {sym:.1e}, start spread {spread:.1e} in {elapsed:.2?}"),
    )
}

fn criterion_3() -> Verdict {
    let t = Instant::now();
    let c = cfg(2, 2.0, 0.1);
    let se = solve_stackelberg(&c, 1e-10 * L).unwrap();
    let ne = solve_ne(&c, TOL, MAX_ITER).unwrap();
    let elapsed = t.elapsed();
    let (l1, l2) = stackelberg_limit(L);
    let p = se.profile.positions();
    let err = rel(p[0], l1).max(rel(p[1], l2));
    let (us, un) = (&se.utilities.u_hat, &ne.utilities.u_hat);
    let ordered = us[0] >= un[0] && us[1] <= un[1];
    verdict(
        err < 1e-3 && ordered && within(elapsed, 5.0),
        format!(
            "x=({:.4},{:.4}) vs ({l1:.4},{l2:.4}) rel err {err:.1e}, leader {:.4}>={:.4}, follower {:.4}<={:.4} in {elapsed:.2?}",
            p[0], p[1], us[0], un[0], us[1], un[1]
        ),
    )
}

fn criterion_4() -> Verdict {
    let t = Instant::now();
    let so = social_optimum(&cfg(2, 2.0, 0.1)).unwrap();
    let exact = so.profile.positions() == [25.0, 75.0];
    let mut ok = exact;
    let mut notes = Vec::new();
    for eps in [0.1, 1.0, 10.0] {
        let c = cfg(2, 2.0, eps);
        let ne = price_of_anarchy(&solve_ne(&c, TOL, MAX_ITER).unwrap(), EquilibriumKind::Nash, &c);
        let se = price_of_anarchy(&solve_stackelberg(&c, 1e-10 * L).unwrap(), EquilibriumKind::Stackelberg, &c);
        let grid = oracle::social_max_grid(&c, 0.05);
        let gap = rel(ne.social_max, grid.value).max(rel(se.social_max, grid.value));
        ok &= ne.poa >= 1.0 - 1e-9 && se.poa >= ne.poa && gap < 1e-3;
        notes.push(format!("eps {eps}: ne {:.6} se {:.6} gap {gap:.1e}", ne.poa, se.poa));
    }
    let elapsed = t.elapsed();
    verdict(
        ok && within(elapsed, 60.0),
        format!("SO exact {exact}; {} in {elapsed:.2?}", notes.join("; ")),
    )
}

fn criterion_5() -> Verdict {
    let t = Instant::now();
    let g = g_alpha(2.0);
    let mut ok = true;
    let mut worst = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 3..=10 {
        let rho = spectral_radius(&linearized_model(&cfg(k, 2.0, 0.1)).unwrap().matrix, SPECTRAL_TOL).unwrap();
        ok &= rho > g && rho < 1.0;
        worst = (worst.0.min(rho), worst.1.max(rho));
    }
    let rho2 = spectral_radius(&linearized_model(&cfg(2, 2.0, 0.1)).unwrap().matrix, SPECTRAL_TOL).unwrap();
    ok &= (rho2 - g).abs() < 1e-9 && (g - (2f64.sqrt() - 1.0)).abs() < 1e-15;
    ok &= convergence_certificate(&cfg(4, 2.0, 0.1), SPECTRAL_TOL).unwrap().holds();
    let beta = 1e-8 * L;
    let mut dist = 0.0f64;
    for k in 2..=4 {
        for alpha in [2.0, 3.0] {
            let c = cfg(k, alpha, 0.1);
            let ne = solve_ne(&c, TOL, MAX_ITER).unwrap().profile;
            for mode in [BrdMode::Simultaneous, BrdMode::Sequential] {
                let log = run_brd(&c, mode, &spread_start(&c), beta, 100_000).unwrap();
                ok &= log.converged;
                let end = LocationProfile::new(log.final_profile().to_vec(), &c).unwrap();
                dist = dist.max(end.max_distance(&ne));
            }
        }
    }
    let elapsed = t.elapsed();
    verdict(
        ok && dist < 10.0 * beta && within(elapsed, 10.0),
        format!(
            "rho(K=3..10) in [{:.4},{:.4}] with g={g:.6}, rho(K=2)={rho2:.12}, BRD to NE {dist:.1e} in {elapsed:.2?}",
            worst.0, worst.1
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut worst = 0.0f64;
    for k in 2..=6 {
        for alpha in [2.0, 3.0] {
            let c = cfg(k, alpha, 1e-6 * L);
            let x0 = spread_start(&c).into_inner();
            // Simultaneous: one affine step against one true step.
            let model = linearized_model(&c).unwrap();
            let truth = run_brd(&c, BrdMode::Simultaneous, &spread_start(&c), 1e-300, 1).unwrap();
            for i in 0..k {
                let y = model.offset[i] + (0..k).map(|j| model.matrix[(i, j)] * x0[j]).sum::<f64>();
                worst = worst.max(rel(y, truth.steps[1].profile[i]));
            }
            // Sequential: the per-station affine maps composed in index order.
            let truth = run_brd(&c, BrdMode::Sequential, &spread_start(&c), 1e-300, 1).unwrap();
            let mut x = x0.clone();
            for s in 0..k {
                let (m, a) = sequential_update_matrix(s, &c).unwrap();
                x = (0..k).map(|i| a[i] + (0..k).map(|j| m[(i, j)] * x[j]).sum::<f64>()).collect();
            }
            for i in 0..k {
                worst = worst.max(rel(x[i], truth.steps[1].profile[i]));
            }
        }
    }
    verdict(worst < 1e-4, format!("worst per-coordinate rel gap {worst:.1e}"))
}

fn criterion_7() -> Verdict {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut grad_err = 0.0f64;
    let mut count = 0;
    for (k, alpha) in [(2, 2.0), (3, 3.0), (4, 2.0), (2, 3.0)] {
        let c = cfg(k, alpha, 0.1);
        for _ in 0..25 {
            let x = random_ordered_profile(&c, &mut rng);
            for i in 0..k {
                let a = grad_utility(i, &x, &c).unwrap();
                let f = oracle::fd_gradient(i, x.positions(), &c, 1e-5 * L);
                grad_err = grad_err.max((a - f).abs() / a.abs().max(1e-300));
            }
            count += 1;
        }
    }
    let mut ok = grad_err < 1e-6;
    let mut worst_h = f64::NEG_INFINITY;
    let mut worst_dsc = f64::INFINITY;
    for (k, alpha) in [(4, 2.0), (3, 3.0)] {
        let c = cfg(k, alpha, 0.1);
        let conc = check_concavity(&c, 1000, 71).unwrap();
        let dsc = check_dsc(&c, 1000, 72).unwrap();
        ok &= conc.passed && dsc.passed;
        worst_h = worst_h.max(conc.worst_margin);
        worst_dsc = worst_dsc.min(dsc.min_value);
    }
    let elapsed = t.elapsed();
    verdict(
        ok && within(elapsed, 30.0),
        format!(
            "gradient rel err {grad_err:.1e} on {count} profiles, max hessian {worst_h:.3e}, min DSC {worst_dsc:.3e} in {elapsed:.2?}"
        ),
    )
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_locgame"))
}

/// Location sets flagged as pure equilibria in the harness payoff table.
fn oracle_equilibria(dir: &Path) -> Vec<Vec<f64>> {
    let cfg_path = dir.join("c8.cfg");
    fs::write(&cfg_path, "L=100\nepsilon=0.1\nalpha=2\nsigma2=1e4\nK=2\ngrid_step=1\n").unwrap();
    let out = bin()
        .args(["oracle", "--config", cfg_path.to_str().unwrap(), "--out", dir.join("c8").to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.join("c8/oracle_payoff.csv")).unwrap();
    let mut sets: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|f| f[6] == "1")
        .map(|f| {
            let mut s = vec![f[2].parse::<f64>().unwrap(), f[3].parse().unwrap()];
            s.sort_by(f64::total_cmp);
            s
        })
        .collect();
    sets.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sets.dedup();
    sets
}

fn criterion_8(dir: &Path) -> Verdict {
    let t = Instant::now();
    let c = cfg(2, 2.0, 0.1);
    let grid = vec![10.0, 30.0, 50.0, 70.0, 90.0];
    let lcfg = LearningConfig::shared_grid(grid, 2, 0.01, 1);
    let identified = oracle_equilibria(dir);
    let core = discrete_equilibria(&lcfg, &c);
    let agree = identified == core && identified == vec![vec![30.0, 70.0]];
    let rows = convergence_time_sweep(&[0.005, 0.01, 0.02], 100, &lcfg, &c).unwrap();
    let elapsed = t.elapsed();
    let hit = rows[1].ne_hit_fraction;
    let means: Vec<f64> = rows.iter().map(|r| r.mean_steps).collect();
    let decreasing = means[0] > means[1] && means[1] > means[2];
    verdict(
        agree && hit >= 0.70 && decreasing && within(elapsed, 300.0),
        format!(
            "oracle NE {identified:?}, hit rate {hit:.2} at b=0.01, mean steps {:.0} > {:.0} > {:.0} in {elapsed:.2?}",
            means[0], means[1], means[2]
        ),
    )
}

fn criterion_9(dir: &Path) -> Verdict {
    let cfg_path = dir.join("c9.cfg");
    fs::write(
        &cfg_path,
        "L=100\nepsilon=0.1\nalpha=2\nsigma2=1e4\nK=2\nseed=42\nvalues=0.05,0.1\nseeds=6\nb=0.05\ngrid_step=1\nfd_profiles=20\n",
    )
    .unwrap();
    let commands = ["ne", "stackelberg", "social", "poa", "brd", "learn", "sweep", "oracle"];
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for cmd in commands {
        let mut runs = Vec::new();
        for (i, config) in [cfg_path.clone(), dir.join(format!("{cmd}-0/manifest.txt"))].iter().enumerate() {
            for rep in 0..2 {
                let out = dir.join(format!("{cmd}-{}", 2 * i + rep));
                let status = bin()
                    .args([cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
                    .output()
                    .unwrap();
                assert!(status.status.success(), "{cmd}: {}", String::from_utf8_lossy(&status.stderr));
                runs.push(out);
            }
        }
        let mut names: Vec<_> = fs::read_dir(&runs[0])
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .filter(|n| n.to_string_lossy().ends_with(".csv"))
            .collect();
        names.sort();
        for name in names {
            let first = fs::read(runs[0].join(&name)).unwrap();
            for r in &runs[1..] {
                compared += 1;
                if fs::read(r.join(&name)).unwrap() != first {
                    mismatches.push(format!("{cmd}/{}", name.to_string_lossy()));
                }
            }
        }
    }
    verdict(
        mismatches.is_empty() && compared > 0,
        format!("{compared} rerun comparisons, mismatches {mismatches:?}"),
    )
}

#[test]
fn acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let results = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(dir.path()),
        criterion_9(dir.path()),
    ];
    let mut report = String::new();
    for (i, v) in results.iter().enumerate() {
        let line = format!("criterion {}: {} {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        println!("{line}");
        report.push_str(&line);
        report.push('\n');
    }
    assert!(results.iter().all(|v| v.pass), "acceptance failures:\n{report}");
}
