use rand::Rng;
use rand_distr::StandardNormal;

use crate::galerkin::{
    sample_tensor, GalerkinError, Grid, MetricField, MetricSamples, PerturbationTensor,
    SymTensorField, TrigField,
};
use crate::torus::{enumerate_spectrum, Lattice};

/// Dual-coordinate frequencies `k` with `|kappa| <= radius`, one per
/// antipodal pair, the zero frequency first.
fn frequencies(lattice: &Lattice, radius: f64) -> Result<Vec<Vec<i64>>, GalerkinError> {
    let mut out = vec![vec![0; lattice.dim()]];
    if radius > 0.0 {
        for eig in enumerate_spectrum(lattice, radius * radius)? {
            out.extend(eig.coefficients);
        }
    }
    Ok(out)
}

/// Scalar field with independent standard normal cosine and sine
/// coefficients on every frequency with `|kappa| <= radius`.
pub fn random_conformal_factor(
    lattice: &Lattice,
    radius: f64,
    rng: &mut impl Rng,
) -> Result<TrigField, GalerkinError> {
    let mut f = TrigField::zero(lattice.dim());
    for k in frequencies(lattice, radius)? {
        let c: f64 = rng.sample(StandardNormal);
        let s: f64 = if k.iter().all(|x| *x == 0) {
            0.0
        } else {
            rng.sample(StandardNormal)
        };
        f.add_term(&k, c, s);
    }
    Ok(f)
}

/// Symmetric tensor field with every component drawn like
/// [`random_conformal_factor`].
pub fn random_tensor(
    lattice: &Lattice,
    radius: f64,
    rng: &mut impl Rng,
) -> Result<SymTensorField, GalerkinError> {
    let n = lattice.dim();
    let mut t = SymTensorField::zero(n);
    for (j, k) in crate::linalg::pairs(n) {
        t.set_component(j, k, random_conformal_factor(lattice, radius, rng)?);
    }
    Ok(t)
}

/// A random general direction, or `f g` for a random factor `f` when
/// `conformal` is set.
pub fn random_direction(
    metric: &MetricField,
    conformal: bool,
    radius: f64,
    rng: &mut impl Rng,
) -> Result<PerturbationTensor, GalerkinError> {
    Ok(if conformal {
        PerturbationTensor::conformal(metric, &random_conformal_factor(metric.lattice(), radius, rng)?)
    } else {
        PerturbationTensor::general(random_tensor(metric.lattice(), radius, rng)?)
    })
}

/// Rescales `h` so that the largest eigenvalue magnitude of `g^{-1} h` over
/// a fine grid is 1; a zero direction is returned unchanged.
pub fn normalize_pointwise(
    metric: &MetricField,
    h: &PerturbationTensor,
) -> Result<PerturbationTensor, GalerkinError> {
    let shape: Vec<usize> = metric
        .extents()
        .iter()
        .zip(h.extents())
        .map(|(a, b)| (4 * (a + b) + 8) as usize)
        .collect();
    let grid = Grid::new(shape);
    let g = MetricSamples::new(metric, &grid)?;
    let hs = sample_tensor(h.tensor(), &grid);
    let mut peak = 0.0f64;
    for (gi, hi) in g.g.iter().zip(&hs) {
        // eigenvalues of g^{-1} h = those of L^{-1} h L^{-T}
        let l = gi.clone().cholesky().expect("checked positive definite").l();
        let l_inv = l.try_inverse().expect("triangular factor is invertible");
        let c = &l_inv * hi * l_inv.transpose();
        peak = peak.max(c.symmetric_eigenvalues().amax());
    }
    Ok(if peak > 0.0 { h.scale(1.0 / peak) } else { h.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frequencies_within_radius() {
        let lattice = Lattice::integer(2).unwrap();
        let f = random_conformal_factor(&lattice, 1.5, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        // zero, (1,0), (0,1), (1,1), (1,-1)
        assert_eq!(f.len(), 5);
        assert!(f.terms().all(|t| t.freq.iter().map(|x| x * x).sum::<i64>() <= 2));
    }

    #[test]
    fn seeded_draws_repeat() {
        let lattice = Lattice::triangular();
        let a = random_tensor(&lattice, 3.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = random_tensor(&lattice, 3.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn normalized_scaling_direction_is_unit() {
        let metric = MetricField::flat(Lattice::integer(2).unwrap());
        let h = PerturbationTensor::metric_itself(&metric).scale(-3.0);
        let n = normalize_pointwise(&metric, &h).unwrap();
        let expected = PerturbationTensor::metric_itself(&metric).scale(-1.0);
        assert!(n.tensor().add(&expected.tensor().scale(-1.0)).components().iter().all(|c| c.max_abs_coefficient() < 1e-15));
    }
}
