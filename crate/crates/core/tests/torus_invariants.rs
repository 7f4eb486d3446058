use degenlab_core::torus::{
    enumerate_spectrum, relation_to_eigenbasis_matrix, torus_degeneracy, Classification, Lattice,
    Witness,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of integer points on the circle `a^2 + b^2 = n`.
fn brute_force_count(n: i64) -> usize {
    let r = (n as f64).sqrt().ceil() as i64 + 1;
    (-r..=r)
        .flat_map(|a| (-r..=r).map(move |b| (a, b)))
        .filter(|(a, b)| a * a + b * b == n)
        .count()
}

#[test]
fn square_lattice_multiplicities_match_brute_force() {
    let spec = enumerate_spectrum(&Lattice::integer(2).unwrap(), 100.0).unwrap();
    let attained: Vec<i64> = (1..=100).filter(|n| brute_force_count(*n) > 0).collect();
    assert_eq!(spec.len(), attained.len());
    for (eig, n) in spec.iter().zip(attained) {
        assert_eq!(eig.norm_sq, n as f64);
        assert_eq!(eig.multiplicity, brute_force_count(n));
        assert_eq!(eig.multiplicity, 2 * eig.coefficients.len());
        assert!(eig.exact);
    }
}

#[test]
fn square_lattice_multiplicity_thresholds() {
    for eig in enumerate_spectrum(&Lattice::integer(2).unwrap(), 100.0).unwrap() {
        let r = torus_degeneracy(&eig).unwrap();
        if eig.multiplicity < 7 {
            assert_eq!(r.full_nullity, 0, "|kappa|^2 = {}", eig.norm_sq);
        }
        if eig.multiplicity >= 8 {
            assert!(r.full_nullity >= 1, "|kappa|^2 = {}", eig.norm_sq);
            assert_eq!(r.classification, Classification::Degenerate);
        }
        assert_eq!(r.conformal_nullity, eig.coefficients.len() - 1);
        assert!(r.full_nullity <= r.conformal_nullity);
    }
}

#[test]
fn unit_and_five_shells() {
    let spec = enumerate_spectrum(&Lattice::integer(2).unwrap(), 5.0).unwrap();
    let one = spec.iter().find(|e| e.norm_sq == 1.0).unwrap();
    let r = torus_degeneracy(one).unwrap();
    assert_eq!((one.multiplicity, r.classification, r.full_nullity), (4, Classification::ConformallyDegenerate, 0));

    let five = spec.iter().find(|e| e.norm_sq == 5.0).unwrap();
    let r = torus_degeneracy(five).unwrap();
    assert_eq!(five.multiplicity, 8);
    assert_eq!(r.classification, Classification::Degenerate);
    let Witness::PairCoefficients(mu) = &r.witnesses[0] else {
        panic!("expected pair coefficients")
    };
    assert_eq!(mu, &vec![1.0, -1.0, -1.0, 1.0]);
    let a = relation_to_eigenbasis_matrix(five, mu).unwrap();
    assert_eq!(a.vectorize().len(), 36);
}

/// Every witness satisfies `sum mu_j kappa_j kappa_j^T = 0` and
/// `sum mu_j = 0` in Cartesian coordinates.
fn assert_witnesses_hold(eig: &degenlab_core::torus::TorusEigenvalue, witnesses: &[Witness]) {
    let n = eig.representatives[0].len();
    for w in witnesses {
        let Witness::PairCoefficients(mu) = w else { continue };
        let mut sum = DMatrix::<f64>::zeros(n, n);
        for (m, kappa) in mu.iter().zip(&eig.representatives) {
            let k = nalgebra::DVector::from_column_slice(kappa);
            sum += &k * k.transpose() * *m;
        }
        assert!(sum.amax() < 1e-9 * eig.norm_sq.max(1.0));
        assert!(mu.iter().sum::<f64>().abs() < 1e-12);
    }
}

#[test]
fn random_lattices_obey_thresholds() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut lattices = 0;
    while lattices < 20 {
        // small integer bases give rational duals with large shells
        let b = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-3i64..=3) as f64);
        let Ok(lattice) = Lattice::new(b) else { continue };
        lattices += 1;
        let covol = lattice.covolume();
        let bound = 40.0 / (covol * covol);
        for eig in enumerate_spectrum(&lattice, bound).unwrap() {
            let r = torus_degeneracy(&eig).unwrap();
            if eig.multiplicity < 7 {
                assert_eq!(r.full_nullity, 0);
            }
            if eig.multiplicity >= 8 {
                assert!(r.full_nullity >= 1);
            }
            assert_witnesses_hold(&eig, &r.witnesses);
        }
    }
}

#[test]
fn scaling_preserves_classification() {
    let base = Lattice::triangular();
    let scaled = base.scaled(2.5).unwrap();
    let a = enumerate_spectrum(&base, 13.0).unwrap();
    let b = enumerate_spectrum(&scaled, 13.0 / 6.25).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x.norm_sq / 6.25 - y.norm_sq).abs() < 1e-9 * x.norm_sq);
        assert_eq!(x.multiplicity, y.multiplicity);
        let (rx, ry) = (torus_degeneracy(x).unwrap(), torus_degeneracy(y).unwrap());
        assert_eq!(rx.classification, ry.classification);
        assert_eq!(rx.full_nullity, ry.full_nullity);
    }
}

#[test]
fn multiplicities_are_even() {
    for lattice in [Lattice::integer(2).unwrap(), Lattice::triangular(), Lattice::integer(3).unwrap()] {
        for eig in enumerate_spectrum(&lattice, 12.0).unwrap() {
            assert_eq!(eig.multiplicity % 2, 0);
        }
    }
}

#[test]
fn cubic_lattice_small_shells_are_nondegenerate() {
    for eig in enumerate_spectrum(&Lattice::integer(3).unwrap(), 6.0).unwrap() {
        let r = torus_degeneracy(&eig).unwrap();
        if eig.multiplicity < 7 {
            assert_eq!(r.full_nullity, 0);
        }
        assert_witnesses_hold(&eig, &r.witnesses);
    }
}
