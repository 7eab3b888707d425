//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured margins (run with `--nocapture` to see them).

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ruelle::calculus::{
    asymptotic_variance, hessian_fd_log_lambda, monte_carlo_variance, variance_metric,
};
use ruelle::equilibria::{constrained_equilibrium, entropy_surface};
use ruelle::flow::{flow_state, flow_trace};
use ruelle::geometry2::{curvature2, grid_scan, ChartPoint, Quantity, Region};
use ruelle::gibbs::{gibbs_measure, legendre_gap, p_functional, pressure};
use ruelle::sft::{add_coboundary, lift_memory, word_index, FnTable};
use ruelle::transfer::{dn_projection, normalize, transfer_matrix};
use ruelle::wasserstein::{project_dyadic, w_distance, Topology};

fn random_table(rng: &mut ChaCha8Rng, m: usize, memory: u32, scale: f64) -> FnTable {
    let len = m.pow(memory);
    let values = (0..len).map(|_| rng.gen_range(-scale..scale)).collect();
    FnTable::new(m, memory, values).unwrap()
}

fn indicator(m: usize, syms: &[usize]) -> FnTable {
    FnTable::indicator(m, word_index(m, syms).unwrap()).unwrap()
}

fn pass(id: u32, name: &str, detail: String) {
    println!("acceptance {id:02} {name}: PASS ({detail})");
}

/// Criterion 1: the second constrained-equilibrium example. Solving B = 0
/// under μ(01*) = 2 μ(11*) returns the Markov chain with P(1→0) = 2/3 and
/// P(0→1) = a solving (1-a)^5 = (4/27) a².
#[test]
fn criterion_01_constrained_equilibrium_example() {
    let start = Instant::now();
    let zero = FnTable::constant(2, 1, 0.0).unwrap();
    let phi = indicator(2, &[0, 1])
        .sub(&indicator(2, &[1, 1]).scale(2.0))
        .unwrap();
    let eq = constrained_equilibrium(&zero, &[phi]).unwrap();
    let elapsed = start.elapsed();

    let trans = eq.measure.transitions();
    let a = trans.get(1, 0);
    let poly = ((1.0 - a).powi(5) - 4.0 / 27.0 * a * a).abs();
    let p10 = (trans.get(0, 1) - 2.0 / 3.0).abs();
    assert!(poly < 1e-12, "FAIL: |(1-a)^5 - (4/27)a²| = {poly:e}");
    assert!((a - 0.487803).abs() < 1e-6, "FAIL: a = {a}");
    assert!(p10 < 1e-12, "FAIL: |P(1→0) - 2/3| = {p10:e}");
    assert!(elapsed.as_secs_f64() < 1.0, "FAIL: runtime {elapsed:?}");
    pass(
        1,
        "constrained-equilibrium example",
        format!("a = {a:.9}, poly residual {poly:.2e}, P(1→0) off by {p10:.2e}, {elapsed:?}"),
    );
}

/// Criterion 2: prescribing μ(0*) = 0.9 under B = 0 yields Bernoulli(0.9).
#[test]
fn criterion_02_bernoulli_prescription() {
    let zero = FnTable::constant(2, 1, 0.0).unwrap();
    let phi = indicator(2, &[0]).add_scalar(-0.9);
    let eq = constrained_equilibrium(&zero, &[phi]).unwrap();
    let mut worst = 0.0_f64;
    for c in 0..2 {
        worst = worst.max((eq.measure.transitions().get(0, c) - 0.9).abs());
        worst = worst.max((eq.measure.transitions().get(1, c) - 0.1).abs());
    }
    assert!(worst < 1e-8, "FAIL: column deviation {worst:e}");
    pass(2, "Bernoulli prescription", format!("columns off by {worst:.2e}"));
}

/// Criterion 3: numerically evaluated Gaussian curvature matches
/// 1/(2-x-y) to 1e-5 on a 9x9 grid over [0.1, 0.9]².
#[test]
fn criterion_03_curvature_reproduction() {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for i in 0..9 {
        for j in 0..9 {
            let x = 0.1 + 0.1 * i as f64;
            let y = 0.1 + 0.1 * j as f64;
            let k = curvature2(ChartPoint::new(x, y).unwrap()).unwrap();
            worst = worst.max((k - 1.0 / (2.0 - x - y)).abs());
        }
    }
    let elapsed = start.elapsed();
    assert!(worst < 1e-5, "FAIL: curvature deviation {worst:e}");
    assert!(elapsed.as_secs_f64() < 5.0, "FAIL: runtime {elapsed:?}");
    pass(3, "curvature reproduction", format!("worst deviation {worst:.2e}, {elapsed:?}"));
}

/// Criterion 4: the variance metric agrees across its five routes on 50
/// random instances with m ∈ {2,3}, n ∈ {2,3}.
#[test]
fn criterion_04_metric_route_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(4001);
    let mut worst_hess = 0.0_f64;
    let mut worst_fd = 0.0_f64;
    let mut worst_av = 0.0_f64;
    let mut worst_mc = 0.0_f64;
    for i in 0..50 {
        let m = if i % 2 == 0 { 2 } else { 3 };
        let n = if (i / 2) % 2 == 0 { 2 } else { 3 };
        let a = random_table(&mut rng, m, n, 0.8);
        let zeta = random_table(&mut rng, m, n, 0.25);
        let eta = random_table(&mut rng, m, n, 0.25);

        // exact series, cross and diagonal
        let vm = variance_metric(&a, &zeta, &eta).unwrap();
        let vm_d = variance_metric(&a, &zeta, &zeta).unwrap();

        // Hessian finite difference of log Λ (Richardson-combined)
        let coarse = hessian_fd_log_lambda(&a, &zeta, &eta, 2e-3).unwrap();
        let fine = hessian_fd_log_lambda(&a, &zeta, &eta, 1e-3).unwrap();
        let rich = (4.0 * fine - coarse) / 3.0;
        let rel = (rich - vm).abs() / vm.abs();
        assert!(rel < 1e-5, "FAIL: instance {i}: hessian rel {rel:e} (vm {vm:e})");
        worst_hess = worst_hess.max(rel);

        // Gibbs-map finite difference
        let t = 1e-5;
        let up = gibbs_measure(&a.add(&zeta.scale(t)).unwrap()).unwrap();
        let dn = gibbs_measure(&a.sub(&zeta.scale(t)).unwrap()).unwrap();
        let fd = (up.integrate(&eta).unwrap() - dn.integrate(&eta).unwrap()) / (2.0 * t);
        let gap = (fd - vm).abs();
        assert!(gap < 1e-5, "FAIL: instance {i}: gibbs-map fd gap {gap:e}");
        worst_fd = worst_fd.max(gap);

        // finite-horizon variance at n = 10^4
        let av = asymptotic_variance(&a, &zeta, 10_000).unwrap();
        let gap = (av - vm_d).abs();
        assert!(gap <= 10.0 / 1e4, "FAIL: instance {i}: asymptotic gap {gap:e}");
        worst_av = worst_av.max(gap);

        // Monte Carlo Birkhoff variance, 10^6 steps
        let (est, se) = monte_carlo_variance(&a, &zeta, 1_000_000, 1000, 9000 + i).unwrap();
        let sigmas = (est - vm_d).abs() / se;
        assert!(sigmas <= 3.0, "FAIL: instance {i}: MC at {sigmas:.2} sigma");
        worst_mc = worst_mc.max(sigmas);
    }
    pass(
        4,
        "metric route agreement",
        format!(
            "hessian rel ≤ {worst_hess:.2e}, gibbs-fd ≤ {worst_fd:.2e}, asymptotic ≤ {worst_av:.2e}, MC ≤ {worst_mc:.2}σ"
        ),
    );
}

/// Criterion 5: |FD(log λ) - ∫ζ dμ_A| < 1e-7 over 100 random instances.
#[test]
fn criterion_05_first_derivative_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5001);
    let mut worst = 0.0_f64;
    for i in 0..100 {
        let m = if i % 2 == 0 { 2 } else { 3 };
        let n = if (i / 2) % 2 == 0 { 2 } else { 3 };
        let a = random_table(&mut rng, m, n, 1.0);
        let zeta = random_table(&mut rng, m, n, 1.0);
        let t = 1e-5;
        let fd = (pressure(&a.add(&zeta.scale(t)).unwrap()).unwrap()
            - pressure(&a.sub(&zeta.scale(t)).unwrap()).unwrap())
            / (2.0 * t);
        let exact = gibbs_measure(&a).unwrap().integrate(&zeta).unwrap();
        let gap = (fd - exact).abs();
        assert!(gap < 1e-7, "FAIL: instance {i}: gap {gap:e}");
        worst = worst.max(gap);
    }
    pass(5, "first-derivative identity", format!("worst gap {worst:.2e}"));
}

/// Criterion 6: the variational principle. Random Markov measures score
/// strictly below the pressure, equality holds at the Gibbs measure, and
/// Legendre gaps are nonnegative with zero at A = B.
#[test]
fn criterion_06_variational_principle() {
    let mut rng = ChaCha8Rng::seed_from_u64(6001);
    let mut closest = f64::INFINITY;
    for _ in 0..5 {
        let b = random_table(&mut rng, 2, 2, 1.0);
        let pr = pressure(&b).unwrap();
        let mu_b = gibbs_measure(&b).unwrap();
        let eq_gap = (p_functional(&b, &mu_b).unwrap() - pr).abs();
        assert!(eq_gap < 1e-10, "FAIL: equality gap {eq_gap:e}");
        assert!(legendre_gap(&mu_b, &b).unwrap().abs() < 1e-10);
        for _ in 0..100 {
            let mu = gibbs_measure(&random_table(&mut rng, 2, 2, 1.2)).unwrap();
            let p = p_functional(&b, &mu).unwrap();
            assert!(p < pr, "FAIL: P_B(μ) = {p} not below pressure {pr}");
            closest = closest.min(pr - p);
        }
    }
    // Legendre-gap sweep over independent pairs
    let mut min_gap = f64::INFINITY;
    for _ in 0..1000 {
        let nu = gibbs_measure(&random_table(&mut rng, 2, 2, 1.2)).unwrap();
        let a = random_table(&mut rng, 2, 2, 1.2);
        let g = legendre_gap(&nu, &a).unwrap();
        assert!(g >= -1e-10, "FAIL: Legendre gap {g:e}");
        min_gap = min_gap.min(g);
    }
    pass(
        6,
        "variational principle",
        format!("strictness margin ≥ {closest:.2e}, min Legendre gap {min_gap:.2e}"),
    );
}

/// Criterion 7: normalization laws — idempotence, column stochasticity,
/// invariance under 100 random coboundary-plus-constant perturbations.
#[test]
fn criterion_07_normalization_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(7001);
    let mut worst_col = 0.0_f64;
    let mut worst_idem = 0.0_f64;
    let mut worst_inv = 0.0_f64;
    for i in 0..100 {
        let m = if i % 2 == 0 { 2 } else { 3 };
        let a = random_table(&mut rng, m, 2, 1.0);
        let n1 = normalize(&a).unwrap();
        worst_col = worst_col.max(transfer_matrix(&n1).unwrap().max_column_sum_deviation());
        worst_idem = worst_idem.max(normalize(&n1).unwrap().max_abs_diff(&n1).unwrap());

        let g = random_table(&mut rng, m, 2, 1.0);
        let c = rng.gen_range(-2.0..2.0);
        let perturbed = normalize(&add_coboundary(&a, &g, c).unwrap()).unwrap();
        let lifted = lift_memory(&n1, perturbed.memory()).unwrap();
        worst_inv = worst_inv.max(perturbed.max_abs_diff(&lifted).unwrap());
    }
    assert!(worst_col < 1e-12, "FAIL: column sums off by {worst_col:e}");
    assert!(worst_idem < 1e-12, "FAIL: idempotence off by {worst_idem:e}");
    assert!(worst_inv < 1e-10, "FAIL: C-invariance off by {worst_inv:e}");
    pass(
        7,
        "normalization laws",
        format!("columns {worst_col:.2e}, idempotence {worst_idem:.2e}, invariance {worst_inv:.2e}"),
    );
}

/// Criterion 8: gradient flow — monotone pressure, correct limit, and
/// temperature-change collinearity.
#[test]
fn criterion_08_gradient_flow() {
    let mut rng = ChaCha8Rng::seed_from_u64(8001);
    let grid: Vec<f64> = (0..=60).map(|i| i as f64 * 0.25).collect();
    let mut worst_mono = 0.0_f64;
    let mut worst_terminal = 0.0_f64;
    let mut worst_mass = 0.0_f64;
    for _ in 0..20 {
        let a0 = random_table(&mut rng, 2, 2, 1.0);
        let b = random_table(&mut rng, 2, 2, 1.0);
        let rows = flow_trace(&a0, &b, &grid).unwrap();
        for win in rows.windows(2) {
            let drop = win[0].pressure - win[1].pressure;
            assert!(drop <= 1e-11, "FAIL: pressure decreased by {drop:e}");
            worst_mono = worst_mono.max(drop);
        }
        let terminal = flow_state(&a0, &b, 40.0).unwrap();
        let mu_t = gibbs_measure(&terminal.potential).unwrap();
        let p_gap = (p_functional(&b, &mu_t).unwrap() - pressure(&b).unwrap()).abs();
        worst_terminal = worst_terminal.max(p_gap);
        assert!(p_gap < 1e-10, "FAIL: terminal pressure gap {p_gap:e}");
        let mu_b = gibbs_measure(&b).unwrap();
        for depth in 1..=3u32 {
            for (x, y) in mu_t
                .cylinder_masses(depth)
                .unwrap()
                .iter()
                .zip(&mu_b.cylinder_masses(depth).unwrap())
            {
                let gap = (x - y).abs();
                assert!(gap < 1e-8, "FAIL: terminal mass gap {gap:e}");
                worst_mass = worst_mass.max(gap);
            }
        }
    }

    // temperature change: A0 = 2φ, B = φ evolves only along [φ]
    let mut worst_orth = 0.0_f64;
    for _ in 0..5 {
        let phi = random_table(&mut rng, 2, 2, 0.7);
        let a0 = phi.scale(2.0);
        for t in [0.3, 1.0, 3.0] {
            let state = flow_state(&a0, &phi, t).unwrap();
            let diff = state.potential.sub(&phi).unwrap();
            let num = variance_metric(&state.potential, &diff, &phi).unwrap();
            let den = variance_metric(&state.potential, &phi, &phi).unwrap();
            let resid = diff.sub(&phi.scale(num / den)).unwrap();
            // metric norm of the class, computed through the kernel
            // representative to avoid cancellation
            let kernel = dn_projection(&state.potential, &resid).unwrap();
            let mu = gibbs_measure(&state.potential).unwrap();
            let norm = mu.integrate(&kernel.mul(&kernel).unwrap()).unwrap().max(0.0).sqrt();
            assert!(norm < 1e-8, "FAIL: orthogonal component {norm:e}");
            worst_orth = worst_orth.max(norm);
        }
    }
    pass(
        8,
        "gradient flow",
        format!(
            "monotonicity slack {worst_mono:.2e}, terminal pressure {worst_terminal:.2e}, terminal masses {worst_mass:.2e}, collinearity {worst_orth:.2e}"
        ),
    );
}

/// Criterion 9: constrained equilibria computed at memory n and at memory
/// n+1 agree on all depth-(n+1) cylinder masses.
#[test]
fn criterion_09_memory_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(9001);
    let mut worst = 0.0_f64;

    // the μ(01*) = 2 μ(11*) entropy maximizer, n = 2 vs 3
    let zero = FnTable::constant(2, 1, 0.0).unwrap();
    let phi = indicator(2, &[0, 1]).sub(&indicator(2, &[1, 1]).scale(2.0)).unwrap();
    let eq2 = constrained_equilibrium(&zero, std::slice::from_ref(&phi)).unwrap();
    let eq3 = constrained_equilibrium(
        &lift_memory(&zero, 3).unwrap(),
        &[lift_memory(&phi, 3).unwrap()],
    )
    .unwrap();
    for (x, y) in eq2
        .measure
        .cylinder_masses(3)
        .unwrap()
        .iter()
        .zip(&eq3.measure.cylinder_masses(3).unwrap())
    {
        worst = worst.max((x - y).abs());
    }

    // a random two-constraint problem, n = 2 vs 3
    let b = random_table(&mut rng, 2, 2, 0.6);
    let phis = vec![
        indicator(2, &[0]).add_scalar(-0.55),
        indicator(2, &[1, 1]).add_scalar(-0.2),
    ];
    let eq2 = constrained_equilibrium(&b, &phis).unwrap();
    let phis3: Vec<FnTable> = phis.iter().map(|p| lift_memory(p, 3).unwrap()).collect();
    let eq3 = constrained_equilibrium(&lift_memory(&b, 3).unwrap(), &phis3).unwrap();
    for (x, y) in eq2
        .measure
        .cylinder_masses(3)
        .unwrap()
        .iter()
        .zip(&eq3.measure.cylinder_masses(3).unwrap())
    {
        worst = worst.max((x - y).abs());
    }
    assert!(worst < 1e-9, "FAIL: depth-(n+1) masses differ by {worst:e}");
    pass(9, "memory bound", format!("masses differ by ≤ {worst:.2e}"));
}

/// Criterion 10: the entropy-rescaled curvature takes both signs on a
/// 50x50 grid (magnitudes are figure-only data and not asserted).
#[test]
fn criterion_10_rescaled_curvature_sign_mixture() {
    let region = Region { x0: 0.02, x1: 0.98, y0: 0.02, y1: 0.98 };
    let rows = grid_scan(region, 0.96 / 49.0, Quantity::KTilde).unwrap();
    assert_eq!(rows.len(), 2500);
    let max = rows.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    assert!(max > 1e-6, "FAIL: no positive values (max {max:e})");
    assert!(min < -1e-6, "FAIL: no negative values (min {min:e})");
    pass(
        10,
        "rescaled curvature sign mixture",
        format!("range [{min:.4}, {max:.4}] over 2500 points"),
    );
}

/// Criterion 11: Wasserstein module — metric axioms, the Hölder chain,
/// and level-refinement consistency.
#[test]
fn criterion_11_wasserstein_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(11001);
    let random_dyadic = |rng: &mut ChaCha8Rng, level: u32| {
        let n = 1usize << level;
        let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let s: f64 = w.iter().sum();
        for v in w.iter_mut() {
            *v /= s;
        }
        ruelle::wasserstein::DyadicMeasure::new(level, w).unwrap()
    };

    let mut worst_axiom = 0.0_f64;
    for i in 0..200 {
        let level = 4 + (i % 2) as u32;
        let a = random_dyadic(&mut rng, level);
        let b = random_dyadic(&mut rng, level);
        let c = random_dyadic(&mut rng, level);
        for topology in [Topology::Interval, Topology::Circle] {
            for order in [1u32, 2] {
                let dab = w_distance(&a, &b, order, topology).unwrap();
                let dba = w_distance(&b, &a, order, topology).unwrap();
                worst_axiom = worst_axiom.max((dab - dba).abs());
                worst_axiom = worst_axiom.max(w_distance(&a, &a, order, topology).unwrap());
                let dac = w_distance(&a, &c, order, topology).unwrap();
                let dbc = w_distance(&b, &c, order, topology).unwrap();
                worst_axiom = worst_axiom.max(dac - dab - dbc);
            }
            // Hölder chain at the topology's diameter
            let diam = if topology == Topology::Interval { 1.0 } else { 0.5 };
            let w1 = w_distance(&a, &b, 1, topology).unwrap();
            let w2 = w_distance(&a, &b, 2, topology).unwrap();
            assert!(w1 <= w2 + 1e-12, "FAIL: W1 {w1} > W2 {w2}");
            assert!(w2 <= (w1 * diam).sqrt() + 1e-12, "FAIL: W2 {w2} above chain bound");
        }
    }
    assert!(worst_axiom < 1e-12, "FAIL: metric axiom violation {worst_axiom:e}");

    // refinement: distances at level L and L+2 within 2^(1-L)
    let mut worst_refine = 0.0_f64;
    for _ in 0..10 {
        let a = random_table(&mut rng, 2, 2, 1.0);
        let b = random_table(&mut rng, 2, 2, 1.0);
        let mu_a = gibbs_measure(&a).unwrap();
        let mu_b = gibbs_measure(&b).unwrap();
        for level in [4u32, 6] {
            for topology in [Topology::Interval, Topology::Circle] {
                for order in [1u32, 2] {
                    let coarse = w_distance(
                        &project_dyadic(&mu_a, level).unwrap(),
                        &project_dyadic(&mu_b, level).unwrap(),
                        order,
                        topology,
                    )
                    .unwrap();
                    let fine = w_distance(
                        &project_dyadic(&mu_a, level + 2).unwrap(),
                        &project_dyadic(&mu_b, level + 2).unwrap(),
                        order,
                        topology,
                    )
                    .unwrap();
                    let bound = 2.0 * 0.5_f64.powi(level as i32);
                    let excess = (coarse - fine).abs() / bound;
                    assert!(excess <= 1.0, "FAIL: refinement excess {excess}");
                    worst_refine = worst_refine.max(excess);
                }
            }
        }
    }
    pass(
        11,
        "wasserstein properties",
        format!("axiom slack {worst_axiom:.2e}, refinement at {worst_refine:.2}x bound"),
    );
}

/// Criterion 12: the entropy surface over the Bernoulli sweep is positive,
/// concave, and matches the closed form to 1e-10.
#[test]
fn criterion_12_entropy_surface() {
    let zero = FnTable::constant(2, 1, 0.0).unwrap();
    let phis = vec![indicator(2, &[0])];
    let grid: Vec<Vec<f64>> = (1..20).map(|i| vec![i as f64 * 0.05]).collect();
    let rows = entropy_surface(&zero, &phis, &grid).unwrap();
    let mut worst = 0.0_f64;
    let mut values = Vec::new();
    for row in &rows {
        let w = row.w[0];
        let point = row.point.as_ref().expect("interior grid point");
        assert!(point.entropy > 0.0, "FAIL: H({w}) not positive");
        let oracle = -(w * w.ln() + (1.0 - w) * (1.0 - w).ln());
        let gap = (point.entropy - oracle).abs();
        assert!(gap < 1e-10, "FAIL: H({w}) off by {gap:e}");
        worst = worst.max(gap);
        values.push(point.entropy);
    }
    for win in values.windows(3) {
        let second = win[0] - 2.0 * win[1] + win[2];
        assert!(second <= 1e-9, "FAIL: convex kink {second:e}");
    }
    pass(12, "entropy surface", format!("closed form within {worst:.2e}, concave"));
}
