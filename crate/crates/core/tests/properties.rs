//! Randomised invariants checked against independent computations.

use gdpm_core::eig::jacobi_eigen;
use gdpm_core::gdeig::run_gdeig_with;
use gdpm_core::gdm::{run_gdm_with, StepSchedule};
use gdpm_core::kick::{run_kick, KickConfig};
use gdpm_core::linops::{apply_shifted, eval_f, eval_g, shifted_spectrum};
use gdpm_core::pmm::{pmm_step, PmmState};
use gdpm_core::probgen::{gen_initial_point, gen_problem, EigLaw, GroundTruth, PointLaw, Rhs, SpectrumSpec};
use gdpm_core::vecops::{dot, norm, unsigned_angle};
use gdpm_core::{QuadraticProblem, ShiftedOperator, SolverConfig};
use proptest::prelude::*;

fn law(kind: u8, n: usize) -> EigLaw {
    match kind % 3 {
        0 => EigLaw::UniformPd { lo: 0.05, hi: 2.0 },
        1 => EigLaw::Psd { zero_count: 1 + n / 4, pos_range: (0.05, 2.0) },
        _ => EigLaw::indefinite_default(n),
    }
}

fn problem(n: usize, kind: u8, seed: u64) -> (QuadraticProblem, GroundTruth, Vec<f64>) {
    let (p, t) = gen_problem(&SpectrumSpec::new(n, law(kind, n), seed), Rhs::FromSolution(seed ^ 0x5a5a)).unwrap();
    let x0 = gen_initial_point(n, seed.wrapping_add(17), PointLaw::StandardGaussian).unwrap();
    (p, t, x0)
}

/// Gradients of a fixed-step run, each with the size of the rounding error
/// expected in evaluating `Ax − b` at that iterate.
fn gradients(p: &QuadraticProblem, t: &GroundTruth, x0: &[f64], alpha: f64, beta: f64, iters: usize) -> Vec<(Vec<f64>, f64)> {
    let cfg = SolverConfig::with_step(alpha, beta).max_iter(iters).g_tol(0.0);
    let radius = t.lambda1().abs().max(t.lambda_n().abs());
    let mut gs = Vec::new();
    run_gdm_with(p, x0, &cfg, &StepSchedule::Fixed(alpha), |st| {
        gs.push((st.g.clone(), 1e-15 * (radius * norm(&st.x) + norm(p.b()))))
    })
    .unwrap();
    gs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gradient_matches_central_differences(n in 2usize..12, kind in 0u8..3, seed in 0u64..1000, i in 0usize..12) {
        let (p, _, x) = problem(n, kind, seed);
        let i = i % n;
        let h = 1e-3;
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[i] += h;
        xm[i] -= h;
        // exact for a quadratic up to rounding
        let fd = (eval_f(&p, &xp).unwrap() - eval_f(&p, &xm).unwrap()) / (2.0 * h);
        let g = eval_g(&p, &x).unwrap();
        prop_assert!((fd - g[i]).abs() <= 1e-8 * (1.0 + g[i].abs() + norm(&x).powi(2)));
    }

    #[test]
    fn operator_is_symmetric(n in 2usize..20, kind in 0u8..3, seed in 0u64..1000) {
        let (p, _, u) = problem(n, kind, seed);
        let v = gen_initial_point(n, seed + 99, PointLaw::StandardGaussian).unwrap();
        let lhs = dot(&u, &p.op().matvec(&v).unwrap());
        let rhs = dot(&v, &p.op().matvec(&u).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * norm(&u) * norm(&v) * 4.0);
    }

    #[test]
    fn gradients_follow_the_shifted_recurrence(
        n in 2usize..30, kind in 0u8..3, seed in 0u64..1000,
        step in 0.1f64..1.0, beta in 0.0f64..0.9,
    ) {
        let (p, t, x0) = problem(n, kind, seed);
        let alpha = step / t.lambda1();
        let gs = gradients(&p, &t, &x0, alpha, beta, 25);
        let h = ShiftedOperator::new(p.op().clone(), alpha, beta).unwrap();
        for k in 1..gs.len() - 1 {
            let hg = apply_shifted(&h, &gs[k].0).unwrap();
            let pred: Vec<f64> = hg.iter().zip(&gs[k - 1].0).map(|(a, b)| a - beta * b).collect();
            let err: f64 = pred.iter().zip(&gs[k + 1].0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let scale = norm(&hg) + beta * norm(&gs[k - 1].0) + norm(&gs[k + 1].0);
            let floor = 100.0 * (gs[k - 1].1 + gs[k].1 + gs[k + 1].1);
            prop_assert!(err <= 1e-10 * scale + floor, "k={} err={:e}", k, err);
        }
    }

    #[test]
    fn shifted_operator_spectrum(n in 2usize..16, kind in 0u8..3, seed in 0u64..1000, alpha in 0.05f64..1.5, beta in 0.0f64..0.9) {
        let (p, t, _) = problem(n, kind, seed);
        let h = ShiftedOperator::new(p.op().clone(), alpha, beta).unwrap();
        let nu = shifted_spectrum(&t.eigenvalues, alpha, beta);
        for (i, want) in t.eigenvalues.iter().map(|l| 1.0 + beta - alpha * l).enumerate() {
            let v = t.eigenvector(i);
            let hv = apply_shifted(&h, &v).unwrap();
            let resid: f64 = hv.iter().zip(&v).map(|(a, b)| (a - want * b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(resid <= 1e-12 * (1.0 + want.abs() + alpha * t.lambda1().abs()) * 10.0);
            prop_assert!(nu.iter().any(|m| (m - want).abs() <= 1e-14 * (1.0 + want.abs())));
        }
    }

    #[test]
    fn normalised_gradients_are_power_iterates(n in 2usize..30, kind in 0u8..3, seed in 0u64..1000, beta in 0.0f64..0.8) {
        let (p, t, x0) = problem(n, kind, seed);
        let alpha = 1.0 / t.lambda1();
        let gs = gradients(&p, &t, &x0, alpha, beta, 20);
        let h = ShiftedOperator::new(p.op().clone(), alpha, beta).unwrap();
        let mut st = PmmState::new(&gs[0].0, beta).unwrap();
        st.w_prev = st.w.clone();
        for (g, noise) in gs.iter().skip(1) {
            // once the gradient is down at rounding level its direction is noise
            if norm(g) < 1e8 * noise {
                break;
            }
            st = pmm_step(&h, &st).unwrap();
            prop_assert!(unsigned_angle(&st.w, g) <= 1e-7);
        }
    }

    #[test]
    fn generated_basis_is_orthonormal_and_diagonalises(n in 2usize..25, kind in 0u8..3, seed in 0u64..1000) {
        let (p, t, _) = problem(n, kind, seed);
        for i in 0..n {
            let qi = t.eigenvector(i);
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot(&qi, &t.eigenvector(j)) - want).abs() <= 1e-12);
            }
            let aq = p.op().matvec(&qi).unwrap();
            let resid: f64 = aq.iter().zip(&qi).map(|(a, b)| (a - t.eigenvalues[i] * b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(resid <= 1e-12 * 10.0);
        }
        let oracle = jacobi_eigen(&p.op().to_dense()).unwrap();
        for (a, b) in oracle.values.iter().zip(&t.eigenvalues) {
            prop_assert!((a - b).abs() <= 1e-11);
        }
    }

    #[test]
    fn eigen_estimate_stays_inside_the_spectrum(n in 2usize..30, kind in 0u8..3, seed in 0u64..1000, step in 0.2f64..1.0) {
        let (p, t, x0) = problem(n, kind, seed);
        let alpha = step / t.lambda1();
        let cfg = SolverConfig::with_step(alpha, 0.0).max_iter(30).g_tol(0.0).f_floor(f64::NEG_INFINITY);
        let (lo, hi) = (t.lambda_n(), t.lambda1());
        let slack = 1e-9 * (hi - lo).max(1.0);
        let mut bad = None;
        run_gdeig_with(&p, &x0, &cfg, |_, est| {
            if let Some(e) = est {
                if e.lambda_n < lo - slack || e.lambda_n > hi + slack {
                    bad = Some(e.lambda_n);
                }
            }
        })
        .unwrap();
        prop_assert!(bad.is_none(), "estimate {:?} outside [{}, {}]", bad, lo, hi);
    }

    #[test]
    fn kick_with_inverse_lambda1_never_increases_f(n in 3usize..30, kind in 0u8..3, seed in 0u64..1000, s in 1usize..12) {
        let (p, t, x0) = problem(n, kind, seed);
        let p = p.with_lambda1(t.lambda1()).unwrap();
        let cfg = SolverConfig::with_step(1.0 / t.lambda1(), 0.0).max_iter(200).f_floor(-1e12);
        let run = run_kick(&p, &x0, &KickConfig::new(s), &cfg).unwrap();
        for w in run.trace.windows(2) {
            prop_assert!(w[1].f <= w[0].f + 1e-12 * w[0].f.abs().max(1.0), "f rose from {} to {} at k={}", w[0].f, w[1].f, w[1].k);
        }
    }
}
