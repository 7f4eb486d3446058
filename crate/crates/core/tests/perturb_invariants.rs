use degenlab_core::galerkin::{eigenspace_samples, GalerkinOptions, MetricField, PerturbationTensor, SymTensorField};
use degenlab_core::linalg::{sym_eig, SymMatrix};
use degenlab_core::perturb::{
    classify_from_samples, function_relation_test, random_direction, splitting_matrix,
    EigenspaceBasis, SplittingContext,
};
use degenlab_core::torus::{enumerate_spectrum, relation_to_eigenbasis_matrix, torus_degeneracy, Lattice, TorusEigenvalue, Witness};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shell(norm_sq: f64) -> (MetricField, TorusEigenvalue, EigenspaceBasis) {
    let lattice = Lattice::integer(2).unwrap();
    let eig = enumerate_spectrum(&lattice, norm_sq + 0.5)
        .unwrap()
        .into_iter()
        .find(|e| (e.norm_sq - norm_sq).abs() < 1e-9)
        .unwrap();
    let basis = EigenspaceBasis::flat_torus(&lattice, &eig);
    (MetricField::flat(lattice), eig, basis)
}

fn random_orthogonal(m: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
    a.qr().q()
}

#[test]
fn splitting_is_linear_in_direction() {
    let (metric, _, basis) = shell(2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h1 = random_direction(&metric, false, 3.0, &mut rng).unwrap();
    let h2 = random_direction(&metric, false, 3.0, &mut rng).unwrap();
    let (a, b) = (0.7, -1.3);
    let combined = h1.scale(a).axpy(b, &h2);
    let m1 = splitting_matrix(&metric, &basis, &h1, None).unwrap().entries;
    let m2 = splitting_matrix(&metric, &basis, &h2, None).unwrap().entries;
    let mc = splitting_matrix(&metric, &basis, &combined, None).unwrap().entries;
    let lin = m1.scale(a).axpy(b, &m2);
    assert!(mc.axpy(-1.0, &lin).max_abs() < 1e-10 * lin.max_abs());
}

#[test]
fn splitting_transforms_covariantly() {
    let (metric, _, basis) = shell(5.0);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let h = random_direction(&metric, false, 3.0, &mut rng).unwrap();
    let q = random_orthogonal(basis.m(), &mut rng);
    let m = splitting_matrix(&metric, &basis, &h, None).unwrap().entries;
    let mq = splitting_matrix(&metric, &basis.rotated(&q), &h, None).unwrap().entries;
    let expected = m.congruence(&q);
    assert!(mq.axpy(-1.0, &expected).max_abs() < 1e-10 * m.max_abs());
    let (s1, s2) = (sym_eig(&m).values, sym_eig(&mq).values);
    for (x, y) in s1.iter().zip(&s2) {
        assert!((x - y).abs() < 1e-10 * m.max_abs());
    }
}

#[test]
fn scaling_direction_on_curved_metric_cluster() {
    // Galerkin eigenbasis of a perturbed metric: M(g) = -lambda I up to the
    // eigen-equation residual
    let mut t = SymTensorField::identity(2);
    t.add_term(0, 0, &[1, 0], 0.05, 0.0);
    let metric = MetricField::new(Lattice::integer(2).unwrap(), t).unwrap();
    let target = -4.0 * std::f64::consts::PI.powi(2);
    let eig = degenlab_core::galerkin::solve(&metric, &GalerkinOptions::new(10.0)).unwrap();
    let lambda1 = eig.lambdas[1];
    let basis = eigenspace_samples(&metric, &GalerkinOptions::new(10.0), lambda1, 1).unwrap();
    let m = splitting_matrix(&metric, &basis, &PerturbationTensor::metric_itself(&metric), None)
        .unwrap()
        .entries;
    assert!((m.get(0, 0) + basis.lambda).abs() < 1e-9 * basis.lambda.abs());
    assert!((lambda1 - target).abs() < 0.2 * target.abs());
}

#[test]
fn lattice_witness_is_orthogonal_to_every_direction() {
    let (metric, eig, basis) = shell(5.0);
    let report = torus_degeneracy(&eig).unwrap();
    let Witness::PairCoefficients(mu) = &report.witnesses[0] else { panic!() };
    let a = relation_to_eigenbasis_matrix(&eig, mu).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let dirs: Vec<PerturbationTensor> =
        (0..20).map(|_| random_direction(&metric, false, 4.5, &mut rng).unwrap()).collect();
    let ctx = SplittingContext::new(&metric, &basis, &[5, 5], None).unwrap();
    for h in &dirs {
        let m = ctx.tensor_matrix(h).unwrap().entries;
        let dot = a.frobenius_dot(&m).abs();
        assert!(dot <= 1e-8 * a.frobenius_norm() * m.frobenius_norm());
    }
}

#[test]
fn sampled_basis_classification_matches_lattice() {
    let metric = MetricField::flat(Lattice::integer(2).unwrap());
    for (norm_sq, mult) in [(1.0, 4usize), (2.0, 4), (5.0, 8), (25.0, 12)] {
        let lambda = -4.0 * std::f64::consts::PI.powi(2) * norm_sq;
        let opts = GalerkinOptions::new(norm_sq.sqrt() + 0.5);
        let basis = eigenspace_samples(&metric, &opts, lambda, mult).unwrap();
        let sampled = classify_from_samples(&metric, &basis, 1e-8).unwrap();
        let (_, eig, _) = shell(norm_sq);
        let exact = torus_degeneracy(&eig).unwrap();
        assert_eq!(sampled.full_nullity, exact.full_nullity, "|kappa|^2 = {norm_sq}");
        assert_eq!(sampled.conformal_nullity, exact.conformal_nullity, "|kappa|^2 = {norm_sq}");
        let rel = function_relation_test(&metric, &basis, 3, 1, 1e-8).unwrap();
        assert!(rel.passed, "{rel:?}");
    }
}

#[test]
fn zero_matrix_for_zero_direction_at_any_cluster() {
    let (metric, _, basis) = shell(25.0);
    let m = splitting_matrix(&metric, &basis, &PerturbationTensor::zero(2), None).unwrap();
    assert_eq!(m.entries, SymMatrix::zeros(12));
}
