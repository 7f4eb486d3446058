use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exponent tuple of a monomial.
pub type Exponents = Vec<u16>;

/// Homogeneous polynomial with exact rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogPoly {
    num_vars: usize,
    degree: usize,
    coeffs: BTreeMap<Exponents, BigRational>,
}

impl HomogPoly {
    pub fn zero(num_vars: usize, degree: usize) -> Self {
        Self {
            num_vars,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(num_vars, 0);
        p.add_term(vec![0; num_vars], c);
        p
    }

    /// `c * x^exps`.
    pub fn monomial(exps: Exponents, c: BigRational) -> Self {
        let degree = exps.iter().map(|&e| e as usize).sum();
        let mut p = Self::zero(exps.len(), degree);
        p.add_term(exps, c);
        p
    }

    /// The coordinate `x_j`.
    pub fn var(num_vars: usize, j: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[j] = 1;
        Self::monomial(e, BigRational::one())
    }

    /// `x_0^2 + .. + x_{v-1}^2`.
    pub fn radius_sq(num_vars: usize) -> Self {
        let mut p = Self::zero(num_vars, 2);
        for j in 0..num_vars {
            let mut e = vec![0; num_vars];
            e[j] = 2;
            p.add_term(e, BigRational::one());
        }
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, exps: &[u16]) -> BigRational {
        self.coeffs.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_term(&mut self, exps: Exponents, c: BigRational) {
        debug_assert_eq!(exps.len(), self.num_vars);
        debug_assert_eq!(exps.iter().map(|&e| e as usize).sum::<usize>(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(exps) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.num_vars, other.num_vars);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(self.degree, other.degree, "adding polys of different degree");
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars, self.degree);
        }
        Self {
            num_vars: self.num_vars,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.num_vars, other.num_vars);
        let mut acc: BTreeMap<Exponents, BigRational> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Self {
            num_vars: self.num_vars,
            degree: self.degree + other.degree,
            coeffs: acc,
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::constant(self.num_vars, BigRational::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// `d/dx_j`; the derivative of a constant is the zero polynomial of degree 0.
    pub fn derivative(&self, j: usize) -> Self {
        let mut out = Self::zero(self.num_vars, self.degree.saturating_sub(1));
        for (e, c) in &self.coeffs {
            if e[j] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[j] -= 1;
            out.coeffs.insert(d, c * BigRational::from_integer(e[j].into()));
        }
        out
    }

    /// Euclidean Laplacian `sum_j d^2/dx_j^2`.
    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.num_vars, self.degree.saturating_sub(2));
        for j in 0..self.num_vars {
            out = out.add(&self.derivative(j).derivative(j));
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|(e, c)| {
                let m: f64 = e.iter().zip(x).map(|(&p, &xi)| xi.powi(p as i32)).product();
                c.to_f64().unwrap_or(f64::NAN) * m
            })
            .sum()
    }

    /// Coefficients in the order of `index`.
    pub fn coefficient_vector(&self, index: &MonomialIndex) -> Vec<BigRational> {
        assert_eq!(index.degree, self.degree);
        let mut v = vec![BigRational::zero(); index.len()];
        for (e, c) in &self.coeffs {
            v[index.position(e)] = c.clone();
        }
        v
    }

    pub fn from_coefficients(index: &MonomialIndex, coeffs: &[BigInt]) -> Self {
        let mut p = Self::zero(index.num_vars, index.degree);
        for (e, c) in index.monomials().iter().zip(coeffs) {
            if !c.is_zero() {
                p.coeffs.insert(e.clone(), BigRational::from_integer(c.clone()));
            }
        }
        p
    }

    /// Largest coefficient magnitude, for diagnostics.
    pub fn max_abs_coeff(&self) -> BigRational {
        self.coeffs
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

/// All monomials of fixed degree in fixed variables, lexicographically
/// descending (`x_0^d` first), with reverse lookup.
#[derive(Debug, Clone)]
pub struct MonomialIndex {
    num_vars: usize,
    degree: usize,
    monomials: Vec<Exponents>,
    lookup: HashMap<Exponents, usize>,
}

impl MonomialIndex {
    pub fn new(num_vars: usize, degree: usize) -> Self {
        let mut monomials = Vec::new();
        let mut current = vec![0u16; num_vars];
        fill(&mut current, 0, degree, &mut monomials);
        let lookup = monomials
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Self {
            num_vars,
            degree,
            monomials,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn monomials(&self) -> &[Exponents] {
        &self.monomials
    }

    pub fn position(&self, exps: &[u16]) -> usize {
        self.lookup[exps]
    }
}

fn fill(current: &mut Exponents, pos: usize, remaining: usize, out: &mut Vec<Exponents>) {
    let last = current.len() - 1;
    if pos == last {
        current[pos] = remaining as u16;
        out.push(current.clone());
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e as u16;
        fill(current, pos + 1, remaining - e, out);
    }
    current[pos] = 0;
}

/// Binomial coefficient as u128; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
