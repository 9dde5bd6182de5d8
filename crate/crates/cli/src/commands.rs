//! Experiment commands. Each returns its CSV documents together with the
//! outcome of the invariant checks embedded in the command.

use locgame_core::dynamics::{run_brd, spread_start};
use locgame_core::equilibria::{
    poa_from_max, social_max, social_optimum, solve_ne, solve_stackelberg, EquilibriumKind, EquilibriumResult,
};
use locgame_core::learning::{convergence_time_sweep, discrete_equilibria, payoff_table, run_learning, LearningConfig};
use locgame_core::{grad_utility, random_ordered_profile, LocationProfile, ScenarioConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::csv::{Cell, Csv};
use crate::error::{CliError, Result};
use crate::manifest::{Command, RunManifest, StartSpec, SweepParam};
use crate::oracle;

/// Documents produced by a command and the first failed check, if any.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<Csv>,
    pub failure: Option<CliError>,
}

/// Collects failed invariant checks.
#[derive(Debug, Default)]
struct Checks {
    failed: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failed.push(msg());
        }
    }

    fn finish(self, files: Vec<Csv>) -> Outcome {
        let failure = (!self.failed.is_empty()).then(|| CliError::Invariant(self.failed.join("; ")));
        Outcome { files, failure }
    }
}

pub fn run_command(m: &RunManifest) -> Result<Outcome> {
    match m.command {
        Command::Ne => ne(m),
        Command::Stackelberg => stackelberg(m),
        Command::Social => social(m),
        Command::Poa => poa(m),
        Command::Brd => brd(m),
        Command::Learn => learn(m),
        Command::Sweep => sweep(m),
        Command::Oracle => oracle_tables(m),
    }
}

const NE_HEADER: [&str; 7] = ["K", "alpha", "epsilon", "L", "k", "x_k", "u_hat_k"];

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn profile_rows(csv: &mut Csv, cfg: &ScenarioConfig, eq: &EquilibriumResult) {
    for (k, (&x, &u)) in eq.profile.positions().iter().zip(&eq.utilities.u_hat).enumerate() {
        csv.row(&[
            cfg.players().into(),
            cfg.alpha().into(),
            cfg.epsilon().into(),
            cfg.length().into(),
            (k + 1).into(),
            x.into(),
            u.into(),
        ]);
    }
}

fn check_symmetry(checks: &mut Checks, cfg: &ScenarioConfig, x: &[f64], what: &str) {
    let l = cfg.length();
    let worst = (0..x.len()).map(|i| (x[i] + x[x.len() - 1 - i] - l).abs()).fold(0.0, f64::max);
    checks.check(worst <= 1e-6 * l, || {
        format!("{what} K={} alpha={}: mirror symmetry off by {worst:e}", cfg.players(), cfg.alpha())
    });
}

fn solve(cfg: &ScenarioConfig, m: &RunManifest) -> Result<EquilibriumResult> {
    Ok(solve_ne(cfg, m.settings.tol * cfg.length(), m.settings.max_iter)?)
}

/// Scenarios of the `K_list × alpha_list` grid, sorted by `(K, alpha)`.
fn scenario_grid(m: &RunManifest) -> Result<Vec<ScenarioConfig>> {
    let mut ks = m.settings.k_list.clone();
    ks.sort_unstable();
    ks.dedup();
    let alphas = sorted_unique(m.settings.alpha_list.clone());
    let mut out = Vec::new();
    for &k in &ks {
        for &a in &alphas {
            out.push(m.scenario.with_players(k)?.with_alpha(a)?);
        }
    }
    Ok(out)
}

fn ne(m: &RunManifest) -> Result<Outcome> {
    let cfgs = scenario_grid(m)?;
    let results = cfgs.par_iter().map(|c| solve(c, m)).collect::<Result<Vec<_>>>()?;
    let mut csv = Csv::new("ne.csv", &m.echo(), &NE_HEADER);
    let mut checks = Checks::default();
    for (c, eq) in cfgs.iter().zip(&results) {
        profile_rows(&mut csv, c, eq);
        check_symmetry(&mut checks, c, eq.profile.positions(), "ne");
    }
    Ok(checks.finish(vec![csv]))
}

fn social(m: &RunManifest) -> Result<Outcome> {
    let cfgs = scenario_grid(m)?;
    let mut csv = Csv::new("social.csv", &m.echo(), &NE_HEADER);
    let mut checks = Checks::default();
    for c in &cfgs {
        let so = social_optimum(c)?;
        profile_rows(&mut csv, c, &so);
        let (_, best) = social_max(c);
        let sum = so.utilities.sum_u_hat();
        checks.check(best <= sum * (1.0 + 1e-9), || {
            format!("social K={} alpha={}: ascent found {best} above equal cells {sum}", c.players(), c.alpha())
        });
    }
    Ok(checks.finish(vec![csv]))
}

fn stackelberg(m: &RunManifest) -> Result<Outcome> {
    let eps = sorted_unique(m.settings.epsilon_list.clone());
    let pairs = eps
        .par_iter()
        .map(|&e| {
            let c = m.scenario.with_epsilon(e)?;
            Ok((c, solve(&c, m)?, solve_stackelberg(&c, m.settings.se_tol)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut csv = Csv::new(
        "stackelberg.csv",
        &m.echo(),
        &["epsilon", "x1_ne", "x2_ne", "x1_se", "x2_se", "u1_ne", "u2_ne", "u1_se", "u2_se", "leader_ratio"],
    );
    let mut checks = Checks::default();
    for (c, ne, se) in &pairs {
        let (xn, xs) = (ne.profile.positions(), se.profile.positions());
        let (un, us) = (&ne.utilities.u_hat, &se.utilities.u_hat);
        csv.row(&[
            c.epsilon().into(),
            xn[0].into(),
            xn[1].into(),
            xs[0].into(),
            xs[1].into(),
            un[0].into(),
            un[1].into(),
            us[0].into(),
            us[1].into(),
            (us[0] / un[0]).into(),
        ]);
        checks.check(us[0] >= un[0] * (1.0 - 1e-12), || format!("epsilon={}: leader loses", c.epsilon()));
        checks.check(us[1] <= un[1] * (1.0 + 1e-12), || format!("epsilon={}: follower gains", c.epsilon()));
    }
    Ok(checks.finish(vec![csv]))
}

fn poa(m: &RunManifest) -> Result<Outcome> {
    let eps = sorted_unique(m.settings.epsilon_list.clone());
    let rows = eps
        .par_iter()
        .map(|&e| {
            let c = m.scenario.with_epsilon(e)?;
            let ne = solve(&c, m)?;
            let se = solve_stackelberg(&c, m.settings.se_tol)?;
            let (argmax, max) = social_max(&c);
            let pn = poa_from_max(&ne, EquilibriumKind::Nash, argmax.clone(), max);
            let ps = poa_from_max(&se, EquilibriumKind::Stackelberg, argmax, max);
            Ok((e, pn, ps))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut csv = Csv::new(
        "poa.csv",
        &m.echo(),
        &["epsilon", "poa_ne", "poa_se", "sum_ne", "sum_se", "social_max"],
    );
    let mut checks = Checks::default();
    for (e, pn, ps) in &rows {
        csv.row(&[
            (*e).into(),
            pn.poa.into(),
            ps.poa.into(),
            pn.eq_sum.into(),
            ps.eq_sum.into(),
            pn.social_max.into(),
        ]);
        checks.check(pn.poa >= 1.0 - 1e-9, || format!("epsilon={e}: poa_ne = {} < 1", pn.poa));
        checks.check(ps.poa >= pn.poa, || format!("epsilon={e}: poa_se {} < poa_ne {}", ps.poa, pn.poa));
    }
    Ok(checks.finish(vec![csv]))
}

fn brd(m: &RunManifest) -> Result<Outcome> {
    let c = &m.scenario;
    let x0 = match &m.settings.x0 {
        StartSpec::Spread => spread_start(c),
        StartSpec::Random => random_ordered_profile(c, &mut ChaCha8Rng::seed_from_u64(m.seed)),
        StartSpec::Explicit(x) => LocationProfile::new(x.clone(), c)?,
    };
    let beta = m.settings.beta * c.length();
    let log = run_brd(c, m.settings.mode, &x0, beta, m.settings.max_steps)?;
    let mut csv = Csv::new("brd.csv", &m.echo(), &["t", "k", "x_k", "u_hat_k", "step_norm"]);
    for s in &log.steps {
        for (k, (&x, &u)) in s.profile.iter().zip(&s.u_hat).enumerate() {
            csv.row(&[s.t.into(), (k + 1).into(), x.into(), u.into(), s.step_norm.into()]);
        }
    }
    if !log.converged {
        return Ok(Outcome {
            files: vec![csv],
            failure: Some(CliError::NoConvergence(format!(
                "best-response dynamics still moving after {} steps",
                m.settings.max_steps
            ))),
        });
    }
    let mut checks = Checks::default();
    let ne = solve_ne(c, 1e-13 * c.length(), m.settings.max_steps.max(100_000))?;
    let last = LocationProfile::new(log.final_profile().to_vec(), c)?;
    let d = last.max_distance(&ne.profile);
    checks.check(d <= 10.0 * beta, || format!("brd limit {d:e} away from the equilibrium"));
    Ok(checks.finish(vec![csv]))
}

fn learning_config(m: &RunManifest) -> LearningConfig {
    let s = &m.settings;
    LearningConfig {
        grids: vec![s.grid.clone(); m.scenario.players()],
        step: s.b,
        max_steps: s.max_steps,
        seed: m.seed,
        delta: s.delta,
        reward: s.reward,
        normalization: s.normalization,
        log_every: s.log_every,
    }
}

fn learn(m: &RunManifest) -> Result<Outcome> {
    let lcfg = learning_config(m);
    let (_, log) = run_learning(&lcfg, &m.scenario)?;
    let mut csv = Csv::new("learn.csv", &m.echo(), &["t", "player", "action_index", "action_pos", "prob"]);
    let mut checks = Checks::default();
    for r in &log.records {
        for (k, p) in r.probs.iter().enumerate() {
            let sum: f64 = p.iter().sum();
            checks.check(p.iter().all(|&v| v >= 0.0) && (sum - 1.0).abs() < 1e-12, || {
                format!("t={} player {}: probabilities leave the simplex", r.t, k + 1)
            });
            for (i, &v) in p.iter().enumerate() {
                csv.row(&[r.t.into(), (k + 1).into(), (i + 1).into(), lcfg.grids[k][i].into(), v.into()]);
            }
        }
    }
    let mut outcome = checks.finish(vec![csv]);
    if !log.converged && outcome.failure.is_none() {
        outcome.failure = Some(CliError::NoConvergence(format!(
            "learning not concentrated after {} steps",
            log.steps
        )));
    }
    Ok(outcome)
}

fn sweep(m: &RunManifest) -> Result<Outcome> {
    let values = sorted_unique(m.settings.values.clone());
    if m.settings.sweep == SweepParam::Step {
        let lcfg = learning_config(m);
        let rows = convergence_time_sweep(&values, m.settings.seeds, &lcfg, &m.scenario)?;
        let mut csv = Csv::new(
            "sweep_b.csv",
            &m.echo(),
            &["b", "mean_steps", "median_steps", "ne_hit_fraction"],
        );
        for r in rows {
            csv.row(&[r.step.into(), r.mean_steps.into(), r.median_steps.into(), r.ne_hit_fraction.into()]);
        }
        return Ok(Outcome {
            files: vec![csv],
            failure: None,
        });
    }
    let cfgs = values
        .iter()
        .map(|&v| match m.settings.sweep {
            SweepParam::Epsilon => m.scenario.with_epsilon(v),
            SweepParam::Alpha => m.scenario.with_alpha(v),
            _ => m.scenario.with_players(v as usize),
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let results = cfgs.par_iter().map(|c| solve(c, m)).collect::<Result<Vec<_>>>()?;
    let name = format!("sweep_{}.csv", m.settings.sweep.key());
    let mut csv = Csv::new(&name, &m.echo(), &NE_HEADER);
    let mut checks = Checks::default();
    for (c, eq) in cfgs.iter().zip(&results) {
        profile_rows(&mut csv, c, eq);
        check_symmetry(&mut checks, c, eq.profile.positions(), "sweep");
    }
    Ok(checks.finish(vec![csv]))
}

/// Largest relative error tolerated by the gradient table.
const GRADIENT_TOL: f64 = 1e-6;
/// Largest relative error tolerated by the quadrature table.
const QUADRATURE_TOL: f64 = 1e-9;
/// Largest relative gap between the grid and ascent social maxima.
const SOCIAL_GAP_TOL: f64 = 1e-3;
const RIEMANN_PANELS: usize = 100_000;

fn oracle_tables(m: &RunManifest) -> Result<Outcome> {
    let c = &m.scenario;
    let s = &m.settings;
    let mut checks = Checks::default();

    // Payoff table of the discretised game.
    let lcfg = learning_config(m);
    let mut payoff = Csv::new(
        "oracle_payoff.csv",
        &m.echo(),
        &["a1", "a2", "x1", "x2", "u_hat_1", "u_hat_2", "pure_ne"],
    );
    let table = payoff_table(&lcfg, c);
    let ne_sets = discrete_equilibria(&lcfg, c);
    let pure = locgame_core::learning::pure_nash_profiles(&table, &lcfg);
    for e in &table {
        let (a1, a2) = (e.actions[0], e.actions[1]);
        csv_payoff_row(&mut payoff, a1, a2, &s.grid, &e.utilities, pure.contains(&e.actions));
    }
    checks.check(ne_sets.len() == 1, || {
        format!("discretised game has {} pure equilibrium location sets", ne_sets.len())
    });

    // Fine-grid social maximum against the multi-start ascent.
    let mut social = Csv::new(
        "oracle_social.csv",
        &m.echo(),
        &["epsilon", "grid_step", "x1", "x2", "social_max_grid", "social_max_ascent", "rel_gap"],
    );
    for &e in &sorted_unique(s.epsilon_list.clone()) {
        let ce = c.with_epsilon(e)?;
        let grid = oracle::social_max_grid(&ce, s.grid_step);
        let (_, ascent) = social_max(&ce);
        let gap = (ascent - grid.value) / grid.value;
        social.row(&[
            e.into(),
            s.grid_step.into(),
            grid.argmax[0].into(),
            grid.argmax[1].into(),
            grid.value.into(),
            ascent.into(),
            gap.into(),
        ]);
        checks.check(gap >= -1e-9 && gap < SOCIAL_GAP_TOL, || {
            format!("epsilon={e}: ascent {ascent} vs grid {} (gap {gap:e})", grid.value)
        });
    }

    // Quadrature against Riemann sums, and gradients against finite differences.
    let mut rng = ChaCha8Rng::seed_from_u64(m.seed);
    let profiles: Vec<LocationProfile> = (0..s.fd_profiles).map(|_| random_ordered_profile(c, &mut rng)).collect();
    let mut quad = Csv::new(
        "oracle_quadrature.csv",
        &m.echo(),
        &["profile", "k", "lo", "hi", "x_k", "library", "riemann", "panels", "rel_err"],
    );
    let quad_rows: Vec<_> = profiles
        .par_iter()
        .take(5)
        .enumerate()
        .flat_map_iter(|(p, x)| {
            let cells = locgame_core::partition(x, c).expect("profile is ordered");
            (0..x.len())
                .map(|k| {
                    let (lo, hi) = cells.cell(k);
                    (p, k, oracle::quadrature_check(lo, hi, x.positions()[k], c, RIEMANN_PANELS))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    for (p, k, q) in quad_rows {
        quad.row(&[
            (p + 1).into(),
            (k + 1).into(),
            q.lo.into(),
            q.hi.into(),
            q.xk.into(),
            q.library.into(),
            q.riemann.into(),
            q.panels.into(),
            q.rel_err().into(),
        ]);
        checks.check(q.rel_err() < QUADRATURE_TOL, || {
            format!("profile {} k {}: quadrature rel err {:e}", p + 1, k + 1, q.rel_err())
        });
    }

    let mut grad = Csv::new(
        "oracle_gradient.csv",
        &m.echo(),
        &["profile", "k", "x_k", "analytic", "finite_difference", "rel_err"],
    );
    let h = s.fd_h * c.length();
    let mut worst = 0.0f64;
    for (p, x) in profiles.iter().enumerate() {
        for k in 0..x.len() {
            let g = grad_utility(k, x, c)?;
            let fd = oracle::fd_gradient(k, x.positions(), c, h);
            let rel = (g - fd).abs() / g.abs().max(fd.abs());
            worst = worst.max(rel);
            grad.row(&[
                (p + 1).into(),
                (k + 1).into(),
                x.positions()[k].into(),
                g.into(),
                fd.into(),
                rel.into(),
            ]);
        }
    }
    checks.check(worst < GRADIENT_TOL, || format!("gradient max rel err {worst:e}"));

    Ok(checks.finish(vec![payoff, social, quad, grad]))
}

fn csv_payoff_row(csv: &mut Csv, a1: usize, a2: usize, grid: &[f64], u: &[f64], ne: bool) {
    csv.row(&[
        (a1 + 1).into(),
        (a2 + 1).into(),
        grid[a1].into(),
        grid[a2].into(),
        u[0].into(),
        u[1].into(),
        Cell::from(ne),
    ]);
}
