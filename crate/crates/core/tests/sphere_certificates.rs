use degenlab_core::sphere::{
    first_guaranteed_kernel, gradient_map_certificate, gradient_map_kernel, harmonic_basis,
    pair_combination, product_map_certificate, product_map_kernel, HarmonicBasis, HomogPoly,
};

#[test]
fn two_sphere_products_are_injective() {
    for ell in 1..=6 {
        let basis = harmonic_basis(3, ell).unwrap();
        let cert = product_map_certificate(&basis).unwrap();
        assert_eq!(cert.nullity, 0, "ell = {ell}");
        assert_eq!(cert.domain, (ell + 1) * (2 * ell + 1));
        assert!(cert.exact);
    }
}

#[test]
fn harmonic_dimensions_match_formula() {
    for n in [3usize, 4, 5] {
        for ell in 0..=8 {
            if n == 5 && ell > 6 {
                continue;
            }
            let basis = harmonic_basis(n, ell).unwrap();
            assert_eq!(basis.len() as u128, HarmonicBasis::expected_dimension(n, ell), "n = {n}, ell = {ell}");
            for p in &basis.polys {
                assert!(p.laplacian().is_zero());
            }
        }
    }
}

#[test]
fn gradient_kernel_lies_in_product_kernel() {
    for (n, ell) in [(3usize, 1usize), (3, 2), (4, 1), (4, 2)] {
        let basis = harmonic_basis(n, ell).unwrap();
        let grad = gradient_map_kernel(&basis).unwrap();
        let prod = product_map_kernel(&basis).unwrap();
        assert!(grad.len() <= prod.len());
        for c in &grad {
            assert!(pair_combination(&basis, c).is_zero(), "n = {n}, ell = {ell}");
        }
        for c in &prod {
            let p: HomogPoly = pair_combination(&basis, c);
            assert!(p.is_zero());
        }
    }
}

#[test]
fn three_sphere_low_degrees() {
    let one = product_map_certificate(&harmonic_basis(4, 1).unwrap()).unwrap();
    assert_eq!(one.nullity, 0);
    let two = product_map_certificate(&harmonic_basis(4, 2).unwrap()).unwrap();
    assert!(two.nullity >= 10);
    assert_eq!(two.domain, 45);
    let grad = gradient_map_certificate(&harmonic_basis(4, 1).unwrap()).unwrap();
    assert_eq!(grad.nullity, 0);
}

#[test]
fn dimension_count_threshold() {
    assert_eq!(first_guaranteed_kernel(30), Some(23));
}
