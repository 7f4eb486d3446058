//! End-to-end acceptance checks. Prints one `PASS`/`FAIL` line per
//! criterion and exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use degenlab::config::{FamilyKind, NoncrossConfig};
use degenlab::noncross::run_family;
use degenlab_core::galerkin::{
    nearest_cluster, solve, spectrum, GalerkinOptions, Grid, MetricField, PerturbationTensor,
};
use degenlab_core::linalg::{pair_count, SymMatrix};
use degenlab_core::perturb::{
    classify_from_samples, default_radius, first_order_validation, function_relation_test,
    normalize_pointwise, random_direction, sah_cokernel_test_with, splitting_matrix,
    EigenspaceBasis, SahMode, SplittingContext, PATH_AGREEMENT_TOL,
};
use degenlab_core::sphere::{
    first_guaranteed_kernel, harmonic_basis, product_map_certificate, s3_dimension_count,
};
use degenlab_core::torus::{
    enumerate_spectrum, relation_to_eigenbasis_matrix, torus_degeneracy, Classification, Lattice,
    TorusEigenvalue, Witness,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn square() -> Lattice {
    Lattice::integer(2).unwrap()
}

fn shells(lattice: &Lattice, norm_sq_max: f64) -> Vec<TorusEigenvalue> {
    enumerate_spectrum(lattice, norm_sq_max).unwrap()
}

fn shell(lattice: &Lattice, norm_sq: f64) -> TorusEigenvalue {
    shells(lattice, norm_sq + 0.5)
        .into_iter()
        .find(|e| (e.norm_sq - norm_sq).abs() < 1e-9)
        .unwrap_or_else(|| panic!("|kappa|^2 = {norm_sq} not attained"))
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    match (out, limit) {
        (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:.1?}, limit {l:?}")),
        (Ok(d), _) => Ok(format!("{d} ({elapsed:.1?})")),
        (Err(e), _) => Err(format!("{e} ({elapsed:.1?})")),
    }
}

fn torus_table() -> Outcome {
    let spec = shells(&square(), 100.0);
    for e in &spec {
        let n = e.norm_sq.round() as i64;
        let brute = (-10i64..=10)
            .flat_map(|a| (-10i64..=10).map(move |b| a * a + b * b))
            .filter(|&s| s == n)
            .count();
        check(e.multiplicity == brute, format!("|kappa|^2={n}: mult {} vs {brute}", e.multiplicity))?;
        let r = torus_degeneracy(e).map_err(|x| x.to_string())?;
        if e.multiplicity < 7 {
            check(r.full_nullity == 0, format!("|kappa|^2={n}: k_f={} at mult {}", r.full_nullity, e.multiplicity))?;
        }
        if e.multiplicity >= 8 {
            check(r.full_nullity >= 1, format!("|kappa|^2={n}: k_f=0 at mult {}", e.multiplicity))?;
        }
    }
    let one = torus_degeneracy(&shell(&square(), 1.0)).unwrap();
    check(
        one.classification == Classification::ConformallyDegenerate && one.full_nullity == 0,
        "|kappa|^2=1 is not conformally degenerate with k_f=0",
    )?;
    let five_eig = shell(&square(), 5.0);
    let five = torus_degeneracy(&five_eig).unwrap();
    check(five_eig.multiplicity == 8 && five.classification == Classification::Degenerate, "|kappa|^2=5 is not degenerate with mult 8")?;
    let Some(Witness::PairCoefficients(mu)) = five.witnesses.first() else {
        return Err("|kappa|^2=5 has no pair witness".into());
    };
    let expected = [1.0, -1.0, -1.0, 1.0];
    let c = mu[0] / expected[0];
    check(
        mu.iter().zip(expected).all(|(x, y)| (x - c * y).abs() < 1e-12),
        format!("|kappa|^2=5 witness {mu:?}"),
    )?;
    Ok(format!("{} eigenvalues with |kappa|^2 <= 100", spec.len()))
}

fn sphere_certificates() -> Outcome {
    for ell in 1..=5 {
        let cert = product_map_certificate(&harmonic_basis(3, ell).unwrap()).map_err(|e| e.to_string())?;
        let dim = (ell + 1) * (2 * ell + 1);
        check(
            cert.nullity == 0 && cert.domain == dim && cert.rank == dim,
            format!("S^2 ell={ell}: {cert:?}"),
        )?;
        let e2l = 2 * (2 * ell) + 1;
        let sum_even: usize = (0..=ell).map(|j| 2 * (2 * j) + 1).sum();
        check(dim == sum_even && e2l <= dim, format!("S^2 ell={ell}: dimension identity"))?;
    }
    let s3_1 = product_map_certificate(&harmonic_basis(4, 1).unwrap()).map_err(|e| e.to_string())?;
    let s3_2 = product_map_certificate(&harmonic_basis(4, 2).unwrap()).map_err(|e| e.to_string())?;
    check(s3_1.nullity == 0, format!("S^3 ell=1 nullity {}", s3_1.nullity))?;
    check(s3_2.nullity >= 10, format!("S^3 ell=2 nullity {}", s3_2.nullity))?;
    let first = first_guaranteed_kernel(40);
    check(first == Some(23), format!("first guaranteed kernel {first:?}"))?;
    let c22 = s3_dimension_count(22).map_err(|e| e.to_string())?;
    check(!c22.kernel_guaranteed, "ell=22 already guaranteed")?;
    Ok(format!("S^3 ell=2 nullity {}, first guaranteed kernel ell=23", s3_2.nullity))
}

fn random_orthogonal(m: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0)).qr().q()
}

fn splitting_correctness() -> Outcome {
    let lattices = [square(), Lattice::triangular(), Lattice::diagonal(&[1.0, 1.7]).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_301);
    let mut worst_path = 0.0f64;
    let mut worst_scaling = 0.0f64;
    let mut worst_invariant = 0.0f64;
    for case in 0..50 {
        let lattice = &lattices[case % lattices.len()];
        let spec = shells(lattice, 12.0);
        let eig = &spec[rng.random_range(0..spec.len())];
        let metric = MetricField::flat(lattice.clone());
        let basis = EigenspaceBasis::flat_torus(lattice, eig);
        let conformal = case % 2 == 1;
        let h1 = random_direction(&metric, conformal, 3.0, &mut rng).map_err(|e| e.to_string())?;
        let h2 = random_direction(&metric, false, 3.0, &mut rng).map_err(|e| e.to_string())?;
        let s1 = splitting_matrix(&metric, &basis, &h1, None).map_err(|e| format!("case {case}: {e}"))?;
        let s2 = splitting_matrix(&metric, &basis, &h2, None).map_err(|e| format!("case {case}: {e}"))?;
        for s in [&s1, &s2] {
            let diff = s.path_difference.ok_or("dual path not run")?;
            let allowed = PATH_AGREEMENT_TOL * s.entries.max_abs().max(eig.lambda.abs());
            worst_path = worst_path.max(diff / allowed * PATH_AGREEMENT_TOL);
            check(diff <= allowed, format!("case {case}: paths differ by {diff:e}"))?;
        }
        let g = splitting_matrix(&metric, &basis, &PerturbationTensor::metric_itself(&metric), None)
            .map_err(|e| e.to_string())?;
        let err = g.entries.axpy(1.0, &SymMatrix::identity(basis.m()).scale(eig.lambda)).max_abs() / eig.lambda.abs();
        worst_scaling = worst_scaling.max(err);
        check(err <= 1e-9, format!("case {case}: M(g) + lambda I = {err:e} |lambda|"))?;

        let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let mc = splitting_matrix(&metric, &basis, &h1.scale(a).axpy(b, &h2), None)
            .map_err(|e| e.to_string())?
            .entries;
        let lin = s1.entries.scale(a).axpy(b, &s2.entries);
        let lin_err = mc.axpy(-1.0, &lin).max_abs() / lin.max_abs().max(1e-300);
        let q = random_orthogonal(basis.m(), &mut rng);
        let mq = splitting_matrix(&metric, &basis.rotated(&q), &h1, None).map_err(|e| e.to_string())?.entries;
        let cov_err = mq.axpy(-1.0, &s1.entries.congruence(&q)).max_abs() / s1.entries.max_abs().max(1e-300);
        worst_invariant = worst_invariant.max(lin_err).max(cov_err);
        check(lin_err <= 1e-10, format!("case {case}: linearity {lin_err:e}"))?;
        check(cov_err <= 1e-10, format!("case {case}: covariance {cov_err:e}"))?;
    }
    Ok(format!(
        "50 cases; path {worst_path:.1e}, scaling {worst_scaling:.1e}, invariants {worst_invariant:.1e}"
    ))
}

fn validation_max_freq(norm_sq: f64) -> f64 {
    (2.0 * norm_sq.sqrt() + 6.0).max(8.0)
}

fn validation_directions(metric: &MetricField, seed: u64) -> Vec<PerturbationTensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..5)
        .map(|_| {
            let raw = random_direction(metric, false, 3.0, &mut rng).unwrap();
            normalize_pointwise(metric, &raw).unwrap()
        })
        .collect()
}

fn first_order() -> Outcome {
    let t_grid: Vec<f64> = (0..=6).map(|i| 10f64.powf(-3.0 + 0.25 * i as f64)).collect();
    let metric = MetricField::flat(square());
    let mut worst_slope = f64::INFINITY;
    let mut worst_dev = 0.0f64;
    for norm_sq in [1.0, 2.0, 5.0] {
        let eig = shell(&square(), norm_sq);
        let basis = EigenspaceBasis::flat_torus(&square(), &eig);
        let opts = GalerkinOptions::new(validation_max_freq(norm_sq));
        for (i, h) in validation_directions(&metric, norm_sq as u64).iter().enumerate() {
            let r = first_order_validation(&metric, &basis, h, &t_grid, &opts).map_err(|e| e.to_string())?;
            let slope = r.slope.ok_or("no slope")?;
            let dev = r.rows.iter().find(|row| (row.t - 1e-3).abs() < 1e-12).ok_or("t=1e-3 missing")?.deviation;
            let rel = dev / eig.lambda.abs();
            worst_slope = worst_slope.min(slope);
            worst_dev = worst_dev.max(rel);
            check(slope >= 1.9, format!("|kappa|^2={norm_sq} h#{i}: slope {slope:.3}"))?;
            check(rel < 1e-4, format!("|kappa|^2={norm_sq} h#{i}: deviation {rel:e} |lambda| at t=1e-3"))?;
        }
    }
    Ok(format!("15 directions; min slope {worst_slope:.3}, max deviation {worst_dev:.1e} |lambda|"))
}

fn sah_cross_check() -> Outcome {
    let metric = MetricField::flat(square());
    let mut checked = 0;
    for (i, eig) in shells(&square(), 50.0).iter().enumerate() {
        let exact = torus_degeneracy(eig).map_err(|e| e.to_string())?;
        let basis = EigenspaceBasis::flat_torus(&square(), eig);
        let directions = (pair_count(eig.multiplicity) + 10).max(60);
        for (mode, expected) in [(SahMode::Full, exact.full_nullity), (SahMode::Conformal, exact.conformal_nullity)] {
            let r = sah_cokernel_test_with(&metric, &basis, mode, directions, 100 + i as u64, 1e-8, None)
                .map_err(|e| e.to_string())?;
            check(
                r.cokernel_dim == expected,
                format!("|kappa|^2={} {}: cokernel {} vs {expected}", eig.norm_sq, mode.as_str(), r.cokernel_dim),
            )?;
            checked += 1;
        }
    }
    let five = shell(&square(), 5.0);
    let report = torus_degeneracy(&five).unwrap();
    let Some(Witness::PairCoefficients(mu)) = report.witnesses.first() else {
        return Err("no witness at |kappa|^2=5".into());
    };
    let a = relation_to_eigenbasis_matrix(&five, mu).map_err(|e| e.to_string())?;
    let basis = EigenspaceBasis::flat_torus(&square(), &five);
    let radius = default_radius(five.lambda);
    let extent = radius.ceil() as i64;
    let ctx = SplittingContext::new(&metric, &basis, &[extent, extent], None).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let h = random_direction(&metric, false, radius, &mut rng).map_err(|e| e.to_string())?;
        let m = ctx.tensor_matrix(&h).map_err(|e| e.to_string())?.entries;
        let rel = a.frobenius_dot(&m).abs() / (a.frobenius_norm() * m.frobenius_norm());
        worst = worst.max(rel);
        check(rel <= 1e-8, format!("witness direction {k}: {rel:e}"))?;
    }
    Ok(format!("{checked} cokernel dimensions match; witness max {worst:.1e}"))
}

/// `max_x |sum A_ab u_a u_b| / (|A|_F max_a |u_a|^2)` on a grid resolving
/// the products.
fn relation_residual(metric: &MetricField, basis: &EigenspaceBasis, a: &SymMatrix) -> f64 {
    let grid = Grid::new(basis.extents().iter().map(|e| (4 * e + 4) as usize).collect());
    let s = basis.sample(&metric.dual(), &grid);
    let m = basis.m();
    let scale = s.values.iter().map(|v| v.iter().fold(0.0f64, |x, y| x.max(y.abs())).powi(2)).fold(0.0, f64::max);
    let worst = (0..grid.len())
        .map(|i| {
            let mut acc = 0.0;
            for p in 0..m {
                for q in 0..m {
                    acc += a.get(p, q) * s.values[p][i] * s.values[q][i];
                }
            }
            acc.abs()
        })
        .fold(0.0, f64::max);
    worst / (a.frobenius_norm() * scale)
}

fn relation_property() -> Outcome {
    let cases: Vec<(Lattice, f64)> = shells(&square(), 50.0)
        .iter()
        .map(|e| (square(), e.norm_sq))
        .chain(shells(&Lattice::triangular(), 7.0).iter().map(|e| (Lattice::triangular(), e.norm_sq)))
        .collect();
    let mut witnesses = 0;
    let mut worst = 0.0f64;
    for (lattice, norm_sq) in cases {
        let eig = shell(&lattice, norm_sq);
        let metric = MetricField::flat(lattice.clone());
        let basis = EigenspaceBasis::flat_torus(&lattice, &eig);
        let exact = torus_degeneracy(&eig).map_err(|e| e.to_string())?;
        let sampled = classify_from_samples(&metric, &basis, 1e-8).map_err(|e| e.to_string())?;
        check(
            exact.full_nullity <= exact.conformal_nullity && sampled.full_nullity <= sampled.conformal_nullity,
            format!("|kappa|^2={norm_sq}: k_f > k_c"),
        )?;
        let mut mats: Vec<SymMatrix> = Vec::new();
        for w in exact.witnesses.iter().chain(&sampled.witnesses) {
            match w {
                Witness::PairCoefficients(mu) => {
                    mats.push(relation_to_eigenbasis_matrix(&eig, mu).map_err(|e| e.to_string())?)
                }
                Witness::Relation(a) => mats.push(a.clone()),
            }
        }
        for a in &mats {
            let r = relation_residual(&metric, &basis, a);
            worst = worst.max(r);
            check(r <= 1e-8, format!("|kappa|^2={norm_sq}: function relation residual {r:e}"))?;
            witnesses += 1;
        }
        let t = function_relation_test(&metric, &basis, 5, 7, 1e-8).map_err(|e| e.to_string())?;
        check(t.passed, format!("|kappa|^2={norm_sq}: {t:?}"))?;
        check(
            t.gradient_nullity == sampled.full_nullity && t.conformal_nullity == sampled.conformal_nullity,
            format!("|kappa|^2={norm_sq}: relation test nullities disagree with classification"),
        )?;
    }
    check(witnesses > 0, "no witnesses in corpus")?;
    Ok(format!("{witnesses} witnesses; max residual {worst:.1e}"))
}

fn galerkin_fidelity() -> Outcome {
    let lattices = [square(), Lattice::triangular(), Lattice::diagonal(&[1.0, 1.7]).unwrap(), Lattice::integer(3).unwrap()];
    let mut modes = 0;
    for lattice in &lattices {
        let max_freq = if lattice.dim() == 3 { 3.0 } else { 6.0 };
        let got = spectrum(&MetricField::flat(lattice.clone()), &GalerkinOptions::new(max_freq), None)
            .map_err(|e| e.to_string())?
            .eigenvalues;
        let mut expected = vec![0.0];
        for e in shells(lattice, max_freq * max_freq) {
            expected.extend(std::iter::repeat_n(e.lambda, e.multiplicity));
        }
        check(got.len() == expected.len(), format!("{} modes vs {}", got.len(), expected.len()))?;
        for (g, e) in got.iter().zip(&expected) {
            check((g - e).abs() <= 1e-10 * e.abs().max(1.0), format!("flat mode {g} vs {e}"))?;
        }
        modes += got.len();
    }
    // refinement on the perturbed metrics of the first-order runs, at the
    // largest step where the perturbation is strongest
    let flat = MetricField::flat(square());
    let t = 10f64.powf(-1.5);
    let mut worst = 0.0f64;
    for norm_sq in [1.0, 2.0, 5.0] {
        let eig = shell(&square(), norm_sq);
        let k = (4.0 * 3.0 + norm_sq.sqrt()).ceil();
        for h in validation_directions(&flat, norm_sq as u64) {
            let metric = flat.perturbed(t, &h);
            let cluster = |max_freq: f64| -> Result<Vec<f64>, String> {
                let e = solve(&metric, &GalerkinOptions::new(max_freq)).map_err(|e| e.to_string())?;
                let c = nearest_cluster(&e.lambdas, eig.lambda, eig.multiplicity).ok_or("no cluster")?;
                Ok(c.values)
            };
            let (coarse, fine) = (cluster(k)?, cluster(k + 2.0)?);
            for (c, f) in coarse.iter().zip(&fine) {
                let rel = (c - f).abs() / f.abs();
                worst = worst.max(rel);
                check(rel < 1e-9, format!("|kappa|^2={norm_sq}: refinement change {rel:e}"))?;
            }
        }
    }
    Ok(format!("{modes} flat modes exact; refinement max {worst:.1e}"))
}

fn non_crossing() -> Outcome {
    let cfg = NoncrossConfig::default();
    let mut min_gap = f64::INFINITY;
    for seed in 0..10u64 {
        let run = run_family(&cfg, seed).map_err(|e| e.to_string())?;
        check(run.simple_start, format!("seed {seed}: start spectrum not simple"))?;
        check(
            run.zero_gaps == 0 && run.min_gap > 0.0,
            format!("seed {seed}: min gap {:e} at s={}", run.min_gap, run.min_gap_s),
        )?;
        min_gap = min_gap.min(run.min_gap);
    }
    let counter = NoncrossConfig {
        family: FamilyKind::Constant,
        samples: 20,
        ..NoncrossConfig::default()
    };
    let run = run_family(&counter, 0).map_err(|e| e.to_string())?;
    check(run.zero_gaps > 0, "constant flat family shows no zero gaps")?;
    Ok(format!(
        "10 runs x {} samples, min gap {min_gap:.3e}; counter family {} zero gaps",
        cfg.samples, run.zero_gaps
    ))
}

fn main() {
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 8] = [
        ("1 torus classification table", Some(Duration::from_secs(10)), torus_table),
        ("2 sphere certificates", Some(Duration::from_secs(60)), sphere_certificates),
        ("3 splitting-matrix correctness", None, splitting_correctness),
        ("4 first-order validation", Some(Duration::from_secs(300)), first_order),
        ("5 cokernel cross-check", None, sah_cross_check),
        ("6 gradient relations imply function relations", None, relation_property),
        ("7 Galerkin oracle fidelity", None, galerkin_fidelity),
        ("8 non-crossing probe", None, non_crossing),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, limit, f) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.starts_with(o.as_str())) {
            continue;
        }
        match timed(limit, f) {
            Ok(d) => println!("PASS {name}: {d}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name}: {e}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
