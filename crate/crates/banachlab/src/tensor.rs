//! Tensors over a pair of algebras kept in decomposed form: a list of
//! elementary terms x (x) y. The list is the certificate; every norm bound
//! reported here is a function of the stored decomposition, never of an
//! abstract limit.

use crate::algebra::{AlgebraElement, AlgebraHandle, FiniteBanachAlgebra, NormKind};
use crate::error::{Error, Result};
use crate::scalar::{all_zero, Scalar, ScalarField};

/// An element of the projective tensor product of two algebras, stored as an
/// explicit finite decomposition.
#[derive(Debug, Clone)]
pub struct DecomposedTensor<S: Scalar> {
    left: AlgebraHandle<S>,
    right: AlgebraHandle<S>,
    terms: Vec<(Vec<S>, Vec<S>)>,
}

impl<S: Scalar> DecomposedTensor<S> {
    pub fn zero(left: &AlgebraHandle<S>, right: &AlgebraHandle<S>) -> Self {
        DecomposedTensor {
            left: left.clone(),
            right: right.clone(),
            terms: Vec::new(),
        }
    }

    pub fn from_pairs(
        left: &AlgebraHandle<S>,
        right: &AlgebraHandle<S>,
        pairs: &[(AlgebraElement<S>, AlgebraElement<S>)],
    ) -> Result<Self> {
        let mut t = Self::zero(left, right);
        for (a, b) in pairs {
            if !FiniteBanachAlgebra::same(a.algebra(), left) {
                return Err(Error::AlgebraMismatch(
                    "left factor lives in the wrong algebra".to_string(),
                ));
            }
            if !FiniteBanachAlgebra::same(b.algebra(), right) {
                return Err(Error::AlgebraMismatch(
                    "right factor lives in the wrong algebra".to_string(),
                ));
            }
            t.terms.push((a.coeffs().to_vec(), b.coeffs().to_vec()));
        }
        Ok(t)
    }

    pub fn simple(a: &AlgebraElement<S>, b: &AlgebraElement<S>) -> Self {
        DecomposedTensor {
            left: a.algebra().clone(),
            right: b.algebra().clone(),
            terms: vec![(a.coeffs().to_vec(), b.coeffs().to_vec())],
        }
    }

    pub fn left_algebra(&self) -> &AlgebraHandle<S> {
        &self.left
    }

    pub fn right_algebra(&self) -> &AlgebraHandle<S> {
        &self.right
    }

    pub fn terms(&self) -> &[(Vec<S>, Vec<S>)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Term i as a pair of elements carrying their algebra handles.
    pub fn term_pair(&self, i: usize) -> Result<(AlgebraElement<S>, AlgebraElement<S>)> {
        let (a, b) = self.terms.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            dim: self.terms.len(),
        })?;
        Ok((
            AlgebraElement::new(&self.left, a.clone())?,
            AlgebraElement::new(&self.right, b.clone())?,
        ))
    }

    fn check_compatible(&self, other: &Self, op: &str) -> Result<()> {
        if FiniteBanachAlgebra::same(&self.left, &other.left)
            && FiniteBanachAlgebra::same(&self.right, &other.right)
        {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch(format!(
                "{op} needs tensors over the same algebra pair"
            )))
        }
    }

    /// Concatenation of decompositions; represents the sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "add")?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(DecomposedTensor {
            left: self.left.clone(),
            right: self.right.clone(),
            terms,
        })
    }

    /// Scales every left factor.
    pub fn scale(&self, s: S) -> Self {
        DecomposedTensor {
            left: self.left.clone(),
            right: self.right.clone(),
            terms: self
                .terms
                .iter()
                .map(|(a, b)| (a.iter().map(|&x| s * x).collect(), b.clone()))
                .collect(),
        }
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(S::from_re(x))
    }

    /// Left module action a . (x (x) y) = (ax) (x) y, termwise.
    pub fn act_left(&self, a: &AlgebraElement<S>) -> Result<Self> {
        if !FiniteBanachAlgebra::same(a.algebra(), &self.left) {
            return Err(Error::AlgebraMismatch(
                "act_left needs an element of the left algebra".to_string(),
            ));
        }
        Ok(DecomposedTensor {
            left: self.left.clone(),
            right: self.right.clone(),
            terms: self
                .terms
                .iter()
                .map(|(x, y)| (self.left.product(a.coeffs(), x), y.clone()))
                .collect(),
        })
    }

    /// Right module action (x (x) y) . a = x (x) (ya), termwise.
    pub fn act_right(&self, a: &AlgebraElement<S>) -> Result<Self> {
        if !FiniteBanachAlgebra::same(a.algebra(), &self.right) {
            return Err(Error::AlgebraMismatch(
                "act_right needs an element of the right algebra".to_string(),
            ));
        }
        Ok(DecomposedTensor {
            left: self.left.clone(),
            right: self.right.clone(),
            terms: self
                .terms
                .iter()
                .map(|(x, y)| (x.clone(), self.right.product(y, a.coeffs())))
                .collect(),
        })
    }

    /// a . u - u . a as one decomposition with twice the terms.
    pub fn commutator(&self, a: &AlgebraElement<S>) -> Result<Self> {
        let l = self.act_left(a)?;
        let r = self.act_right(a)?.scale_re(-1.0);
        l.add(&r)
    }

    /// The multiplication map applied termwise: sum of x_i y_i. Defined when
    /// both factors live in the same algebra.
    pub fn product_map(&self) -> Result<AlgebraElement<S>> {
        if !FiniteBanachAlgebra::same(&self.left, &self.right) {
            return Err(Error::AlgebraMismatch(
                "product_map needs both factors in the same algebra".to_string(),
            ));
        }
        let mut acc = AlgebraElement::zero(&self.left);
        for (x, y) in &self.terms {
            let p = self.left.product(x, y);
            acc = acc.add(&AlgebraElement::new(&self.left, p)?)?;
        }
        Ok(acc)
    }

    /// Dense coefficient array, row-major over (left basis, right basis).
    /// Decomposition independent up to rounding in the sums.
    pub fn coefficient_matrix(&self) -> Vec<S> {
        let dl = self.left.dim();
        let dr = self.right.dim();
        let mut m = vec![S::from_re(0.0); dl * dr];
        for (x, y) in &self.terms {
            for (p, &xp) in x.iter().enumerate() {
                if xp.is_zero_exact() {
                    continue;
                }
                for (q, &yq) in y.iter().enumerate() {
                    if !yq.is_zero_exact() {
                        m[p * dr + q] += xp * yq;
                    }
                }
            }
        }
        m
    }

    /// Largest modulus of a difference of coefficient entries.
    pub fn max_coeff_diff(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other, "max_coeff_diff")?;
        let a = self.coefficient_matrix();
        let b = other.coefficient_matrix();
        Ok(a.iter()
            .zip(b.iter())
            .fold(0.0f64, |m, (&x, &y)| m.max((x - y).mag())))
    }

    /// True when every coefficient sums to exactly zero. Holds in floating
    /// point whenever the decomposition pairs up identical terms with
    /// opposite signs, which is how the lifting routines arrange their
    /// cancellations.
    pub fn is_coeff_zero(&self) -> bool {
        all_zero(&self.coefficient_matrix())
    }

    /// Projective norm upper bound: sum over terms of the factor norm
    /// product, after a cleanup pass that drops zero terms and merges terms
    /// whose left factors are exact scalar multiples of each other. The
    /// cleanup only rewrites the decomposition into one representing the same
    /// tensor, so the value stays a valid upper bound.
    pub fn norm_upper(&self) -> Result<f64> {
        let mut terms: Vec<(Vec<S>, Vec<S>)> = self
            .terms
            .iter()
            .filter(|(x, y)| !all_zero(x) && !all_zero(y))
            .cloned()
            .collect();
        // Merge exactly proportional left factors: if x_j == c x_i entrywise
        // in exact arithmetic on the stored bits, replace the pair by
        // x_i (x) (y_i + c y_j).
        let mut i = 0;
        while i < terms.len() {
            let mut j = i + 1;
            while j < terms.len() {
                if let Some(c) = exact_ratio(&terms[i].0, &terms[j].0) {
                    let (yi, yj) = {
                        let (a, b) = terms.split_at_mut(j);
                        (&mut a[i].1, &b[0].1)
                    };
                    for (u, &v) in yi.iter_mut().zip(yj.iter()) {
                        *u += c * v;
                    }
                    terms.remove(j);
                } else {
                    j += 1;
                }
            }
            i += 1;
        }
        terms.retain(|(x, y)| !all_zero(x) && !all_zero(y));
        let mut sum = 0.0f64;
        for (x, y) in &terms {
            sum += self.left.norm_of(x)? * self.right.norm_of(y)?;
        }
        Ok(sum)
    }

    /// Square-sum statistics used by the Grothendieck-type bound: the largest
    /// per-coordinate sum of squared moduli of the left factors, and the same
    /// for the right factors. Sums run in term order.
    fn square_sums(&self) -> (f64, f64) {
        let mut a = 0.0f64;
        for p in 0..self.left.dim() {
            let mut s = 0.0f64;
            for (x, _) in &self.terms {
                s += x[p].mag_sq();
            }
            a = a.max(s);
        }
        let mut b = 0.0f64;
        for q in 0..self.right.dim() {
            let mut s = 0.0f64;
            for (_, y) in &self.terms {
                s += y[q].mag_sq();
            }
            b = b.max(s);
        }
        (a, b)
    }

    /// Upper bound on the projective norm for tensors over sup-norm function
    /// algebras: (k/2) (A + B) with A and B the square-sum statistics and k
    /// the Grothendieck-type constant for the scalar field.
    pub fn grothendieck_bound(&self, k: &GrothendieckConstant) -> Result<f64> {
        self.require_sup_factors("grothendieck_bound")?;
        if k.field() != S::FIELD {
            return Err(Error::InvalidConstant(format!(
                "constant is for the {} field, tensor is over the {} field",
                k.field(),
                S::FIELD
            )));
        }
        let (a, b) = self.square_sums();
        Ok((k.value() / 2.0) * (a + b))
    }

    /// Rescales terms (x, y) -> (t x, y / t) with t = (B/A)^(1/4), making the
    /// two square-sum statistics agree; the additive bound then turns into
    /// the product form k sqrt(A B). Returns the tensor unchanged when either
    /// statistic vanishes.
    pub fn balanced(&self) -> Result<Self> {
        self.require_sup_factors("balanced")?;
        let (a, b) = self.square_sums();
        if a == 0.0 || b == 0.0 {
            return Ok(self.clone());
        }
        let t = (b / a).powf(0.25);
        let inv = 1.0 / t;
        Ok(DecomposedTensor {
            left: self.left.clone(),
            right: self.right.clone(),
            terms: self
                .terms
                .iter()
                .map(|(x, y)| {
                    (
                        x.iter().map(|&v| S::from_re(t) * v).collect(),
                        y.iter().map(|&v| S::from_re(inv) * v).collect(),
                    )
                })
                .collect(),
        })
    }

    fn require_sup_factors(&self, op: &str) -> Result<()> {
        let ok = matches!(self.left.norm_kind(), NormKind::Sup)
            && matches!(self.right.norm_kind(), NormKind::Sup);
        if ok {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "{op} is only defined over sup-norm function algebras"
            )))
        }
    }

    /// Lift of a pair of decompositions to the algebra of base-valued
    /// functions: terms (f_i a_j) (x) (g_i b_j) for u = sum f_i (x) g_i over
    /// the scalar functions on n points and alpha = sum a_j (x) b_j over the
    /// base algebra. Builds the target algebra and returns it with the
    /// tensor. The projective norm of the result is at most the product of
    /// the two norm_upper values.
    pub fn mixed(u: &Self, alpha: &Self) -> Result<(Self, AlgebraHandle<S>)> {
        u.require_sup_factors("mixed")?;
        if !FiniteBanachAlgebra::same(&u.left, &u.right) {
            return Err(Error::AlgebraMismatch(
                "mixed needs both scalar factors over the same point set".to_string(),
            ));
        }
        if !FiniteBanachAlgebra::same(&alpha.left, &alpha.right) {
            return Err(Error::AlgebraMismatch(
                "mixed needs both base factors in the same algebra".to_string(),
            ));
        }
        let target = FiniteBanachAlgebra::vector_valued(u.left.dim(), &alpha.left)?;
        let t = Self::mixed_into(u, alpha, &target)?;
        Ok((t, target))
    }

    /// Same as [`DecomposedTensor::mixed`] but writing into an existing
    /// target algebra, validated against the factors.
    pub fn mixed_into(u: &Self, alpha: &Self, target: &AlgebraHandle<S>) -> Result<Self> {
        u.require_sup_factors("mixed_into")?;
        let (base, points) = match target.norm_kind() {
            NormKind::VectorValued { base, points } => (base.clone(), *points),
            _ => {
                return Err(Error::Unsupported(
                    "mixed_into needs a vector-valued target".to_string(),
                ))
            }
        };
        if points != u.left.dim() || !FiniteBanachAlgebra::same(&u.left, &u.right) {
            return Err(Error::SpaceMismatch(format!(
                "scalar factors live on {} points, target has {}",
                u.left.dim(),
                points
            )));
        }
        if !FiniteBanachAlgebra::same(&alpha.left, &base)
            || !FiniteBanachAlgebra::same(&alpha.right, &base)
        {
            return Err(Error::AlgebraMismatch(
                "base factors do not match the target's base algebra".to_string(),
            ));
        }
        let bd = base.dim();
        let mut out = Self::zero(target, target);
        for (f, g) in &u.terms {
            for (a, b) in &alpha.terms {
                let mut lc = Vec::with_capacity(points * bd);
                for &fx in f.iter() {
                    lc.extend(a.iter().map(|&v| fx * v));
                }
                let mut rc = Vec::with_capacity(points * bd);
                for &gx in g.iter() {
                    rc.extend(b.iter().map(|&v| gx * v));
                }
                out.terms.push((lc, rc));
            }
        }
        Ok(out)
    }
}

/// Returns c with y == c x entrywise, exactly on the stored floating-point
/// values, or None. The zero vector is never matched (callers drop those
/// first).
fn exact_ratio<S: Scalar>(x: &[S], y: &[S]) -> Option<S> {
    let pivot = x
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.mag().total_cmp(&b.mag()))?
        .0;
    if x[pivot].is_zero_exact() {
        return None;
    }
    let c = y[pivot] / x[pivot];
    if !c.mag().is_finite() {
        return None;
    }
    for (&xv, &yv) in x.iter().zip(y.iter()) {
        let lhs = c * xv;
        if lhs.re_part() != yv.re_part() || lhs.im_part() != yv.im_part() {
            return None;
        }
    }
    Some(c)
}

/// A constant k >= 1 for the Grothendieck-type inequality over one scalar
/// field, carried explicitly so certificates can record which value they
/// used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrothendieckConstant {
    value: f64,
    field: ScalarField,
}

impl GrothendieckConstant {
    pub fn new(value: f64, field: ScalarField) -> Result<Self> {
        if !value.is_finite() || value < 1.0 {
            return Err(Error::InvalidConstant(format!(
                "a Grothendieck-type constant must be finite and at least 1, got {value}"
            )));
        }
        Ok(GrothendieckConstant { value, field })
    }

    /// Default complex-field value.
    pub fn complex_default() -> Self {
        GrothendieckConstant {
            value: 1.405,
            field: ScalarField::Complex,
        }
    }

    /// Default real-field value.
    pub fn real_default() -> Self {
        GrothendieckConstant {
            value: 1.783,
            field: ScalarField::Real,
        }
    }

    /// The default constant for the scalar type in use.
    pub fn for_field(field: ScalarField) -> Self {
        match field {
            ScalarField::Real => Self::real_default(),
            ScalarField::Complex => Self::complex_default(),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    /// k/2, the factor that multiplies each square-sum statistic.
    pub fn half(&self) -> f64 {
        self.value / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteBanachAlgebra;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sup2() -> AlgebraHandle<f64> {
        FiniteBanachAlgebra::sup(2).unwrap()
    }

    fn z3() -> AlgebraHandle<f64> {
        FiniteBanachAlgebra::group(&[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap()
    }

    fn rand_elem(alg: &AlgebraHandle<f64>, rng: &mut ChaCha8Rng) -> AlgebraElement<f64> {
        AlgebraElement::new(
            alg,
            (0..alg.dim()).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn balanced_two_term_decomposition_certifies_norm_one() {
        // e1 (x) e1 - e2 (x) e2 written naively costs 2; the rotated
        // decomposition (1/2)(e1+e2) (x) (e1-e2) + (1/2)(e1-e2) (x) (e1+e2)
        // certifies 1, which is the exact projective norm.
        let a = sup2();
        let plus = AlgebraElement::new(&a, vec![0.5, 0.5]).unwrap();
        let minus = AlgebraElement::new(&a, vec![0.5, -0.5]).unwrap();
        let pm = AlgebraElement::new(&a, vec![1.0, -1.0]).unwrap();
        let pp = AlgebraElement::new(&a, vec![1.0, 1.0]).unwrap();
        let clever =
            DecomposedTensor::from_pairs(&a, &a, &[(plus, pm), (minus, pp)]).unwrap();
        assert_eq!(clever.norm_upper().unwrap(), 1.0);

        let e1 = AlgebraElement::basis(&a, 0).unwrap();
        let e2 = AlgebraElement::basis(&a, 1).unwrap();
        let naive = DecomposedTensor::simple(&e1, &e1)
            .add(&DecomposedTensor::simple(&e2, &e2).scale_re(-1.0))
            .unwrap();
        assert_eq!(naive.norm_upper().unwrap(), 2.0);

        // both decompose the same tensor
        assert_eq!(clever.max_coeff_diff(&naive).unwrap(), 0.0);
    }

    #[test]
    fn adding_a_negated_copy_cancels_exactly() {
        let a = sup2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = DecomposedTensor::from_pairs(
            &a,
            &a,
            &[
                (rand_elem(&a, &mut rng), rand_elem(&a, &mut rng)),
                (rand_elem(&a, &mut rng), rand_elem(&a, &mut rng)),
            ],
        )
        .unwrap();
        let z = u.add(&u.scale_re(-1.0)).unwrap();
        assert!(z.is_coeff_zero());
        assert_eq!(z.norm_upper().unwrap(), 0.0);
    }

    #[test]
    fn module_actions_compose_and_intertwine_with_product_map() {
        let alg = FiniteBanachAlgebra::<f64>::matrix(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let u = DecomposedTensor::from_pairs(
                &alg,
                &alg,
                &[
                    (rand_elem(&alg, &mut rng), rand_elem(&alg, &mut rng)),
                    (rand_elem(&alg, &mut rng), rand_elem(&alg, &mut rng)),
                ],
            )
            .unwrap();
            let a = rand_elem(&alg, &mut rng);
            let b = rand_elem(&alg, &mut rng);
            let ab = a.mul(&b).unwrap();
            let d1 = u
                .act_left(&ab)
                .unwrap()
                .max_coeff_diff(&u.act_left(&b).unwrap().act_left(&a).unwrap())
                .unwrap();
            assert!(d1 < 1e-12);
            let d2 = u
                .act_right(&ab)
                .unwrap()
                .max_coeff_diff(&u.act_right(&a).unwrap().act_right(&b).unwrap())
                .unwrap();
            assert!(d2 < 1e-12);
            // pi(a.u) = a pi(u) and pi(u.a) = pi(u) a
            let lhs = u.act_left(&a).unwrap().product_map().unwrap();
            let rhs = a.mul(&u.product_map().unwrap()).unwrap();
            assert!(lhs.sub(&rhs).unwrap().norm().unwrap() < 1e-12);
            let lhs2 = u.act_right(&a).unwrap().product_map().unwrap();
            let rhs2 = u.product_map().unwrap().mul(&a).unwrap();
            assert!(lhs2.sub(&rhs2).unwrap().norm().unwrap() < 1e-12);
        }
    }

    #[test]
    fn group_diagonal_commutators_cancel_to_the_last_bit() {
        // alpha = (1/3) sum over g of d_g (x) d_{g^-1} commutes with every
        // element; termwise the two action sides produce bitwise identical
        // coefficient contributions, so the commutator decomposition has an
        // exactly zero coefficient array.
        let g = z3();
        let inv = [0usize, 2, 1];
        let mut pairs = Vec::new();
        for x in 0..3 {
            let l = AlgebraElement::basis(&g, x).unwrap().scale_re(1.0 / 3.0);
            let r = AlgebraElement::basis(&g, inv[x]).unwrap();
            pairs.push((l, r));
        }
        let alpha = DecomposedTensor::from_pairs(&g, &g, &pairs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let b = rand_elem(&g, &mut rng);
            let c = alpha.commutator(&b).unwrap();
            assert!(c.is_coeff_zero());
        }
        // and the product map gives 1/|G| times |G| copies of the identity
        let p = alpha.product_map().unwrap();
        let u = AlgebraElement::unit(&g).unwrap();
        assert!(p.sub(&u).unwrap().norm().unwrap() < 1e-12);
    }

    #[test]
    fn grothendieck_bound_dominates_single_term_norm() {
        let a = FiniteBanachAlgebra::<f64>::sup(4).unwrap();
        let k = GrothendieckConstant::real_default();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let x = rand_elem(&a, &mut rng);
            let y = rand_elem(&a, &mut rng);
            let u = DecomposedTensor::simple(&x, &y);
            let gb = u.grothendieck_bound(&k).unwrap();
            let upper = u.norm_upper().unwrap();
            // (k/2)(|x|^2 + |y|^2) >= k |x||y| >= |x||y|
            assert!(gb >= upper - 1e-12);
            let bal = u.balanced().unwrap();
            let gbal = bal.grothendieck_bound(&k).unwrap();
            assert_relative_eq!(gbal, k.value() * upper, max_relative = 1e-12);
            assert!(gbal <= gb + 1e-12);
            assert!(bal.max_coeff_diff(&u).unwrap() < 1e-12);
        }
    }

    #[test]
    fn balancing_never_raises_the_bound_on_multi_term_tensors() {
        let a = FiniteBanachAlgebra::<f64>::sup(3).unwrap();
        let k = GrothendieckConstant::real_default();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..100 {
            let pairs: Vec<_> = (0..4)
                .map(|_| (rand_elem(&a, &mut rng), rand_elem(&a, &mut rng)))
                .collect();
            let u = DecomposedTensor::from_pairs(&a, &a, &pairs).unwrap();
            let raw = u.grothendieck_bound(&k).unwrap();
            let bal = u.balanced().unwrap().grothendieck_bound(&k).unwrap();
            assert!(bal <= raw * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn grothendieck_bound_rejects_field_and_norm_mismatches() {
        let a = FiniteBanachAlgebra::<f64>::sup(2).unwrap();
        let e = AlgebraElement::basis(&a, 0).unwrap();
        let u = DecomposedTensor::simple(&e, &e);
        assert!(matches!(
            u.grothendieck_bound(&GrothendieckConstant::complex_default()),
            Err(Error::InvalidConstant(_))
        ));
        let m = FiniteBanachAlgebra::<f64>::matrix(2).unwrap();
        let em = AlgebraElement::basis(&m, 0).unwrap();
        let v = DecomposedTensor::simple(&em, &em);
        assert!(matches!(
            v.grothendieck_bound(&GrothendieckConstant::real_default()),
            Err(Error::Unsupported(_))
        ));
        assert!(GrothendieckConstant::new(0.5, ScalarField::Real).is_err());
        assert!(GrothendieckConstant::new(f64::NAN, ScalarField::Real).is_err());
    }

    #[test]
    fn mixed_lift_multiplies_norm_bounds() {
        let pts = FiniteBanachAlgebra::<f64>::sup(5).unwrap();
        let base = z3();
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..50 {
            let u = DecomposedTensor::from_pairs(
                &pts,
                &pts,
                &(0..3)
                    .map(|_| (rand_elem(&pts, &mut rng), rand_elem(&pts, &mut rng)))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let alpha = DecomposedTensor::from_pairs(
                &base,
                &base,
                &(0..2)
                    .map(|_| (rand_elem(&base, &mut rng), rand_elem(&base, &mut rng)))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let (t, _target) = DecomposedTensor::mixed(&u, &alpha).unwrap();
            assert_eq!(t.num_terms(), 6);
            let bound =
                u.norm_upper().unwrap() * alpha.norm_upper().unwrap() * (1.0 + 1e-12) + 1e-12;
            assert!(t.norm_upper().unwrap() <= bound);
        }
    }

    #[test]
    fn mixed_lift_product_map_is_pointwise() {
        // pi(T(u, alpha)) at x equals (sum_i f_i(x) g_i(x)) pi(alpha)
        let pts = FiniteBanachAlgebra::<f64>::sup(3).unwrap();
        let base = z3();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let u = DecomposedTensor::from_pairs(
            &pts,
            &pts,
            &[(rand_elem(&pts, &mut rng), rand_elem(&pts, &mut rng))],
        )
        .unwrap();
        let alpha = DecomposedTensor::from_pairs(
            &base,
            &base,
            &[
                (rand_elem(&base, &mut rng), rand_elem(&base, &mut rng)),
                (rand_elem(&base, &mut rng), rand_elem(&base, &mut rng)),
            ],
        )
        .unwrap();
        let (t, _) = DecomposedTensor::mixed(&u, &alpha).unwrap();
        let pt = t.product_map().unwrap();
        let pu = u.product_map().unwrap();
        let pa = alpha.product_map().unwrap();
        for x in 0..3 {
            let lhs = pt.evaluate_at(x).unwrap();
            let rhs = pa.scale(pu.coeffs()[x]);
            assert!(lhs.sub(&rhs).unwrap().norm().unwrap() < 1e-12);
        }
    }

    #[test]
    fn mixed_into_validates_target_shape() {
        let pts = FiniteBanachAlgebra::<f64>::sup(3).unwrap();
        let base = z3();
        let e = AlgebraElement::basis(&pts, 0).unwrap();
        let a = AlgebraElement::basis(&base, 0).unwrap();
        let u = DecomposedTensor::simple(&e, &e);
        let alpha = DecomposedTensor::simple(&a, &a);
        let wrong_points = FiniteBanachAlgebra::vector_valued(4, &base).unwrap();
        assert!(DecomposedTensor::mixed_into(&u, &alpha, &wrong_points).is_err());
        let wrong_base =
            FiniteBanachAlgebra::vector_valued(3, &FiniteBanachAlgebra::<f64>::sup(2).unwrap())
                .unwrap();
        assert!(DecomposedTensor::mixed_into(&u, &alpha, &wrong_base).is_err());
        let good = FiniteBanachAlgebra::vector_valued(3, &base).unwrap();
        assert!(DecomposedTensor::mixed_into(&u, &alpha, &good).is_ok());
    }

    #[test]
    fn complex_grothendieck_default_values() {
        let kc = GrothendieckConstant::complex_default();
        assert_eq!(kc.value(), 1.405);
        assert_eq!(kc.half(), 0.7025);
        let kr = GrothendieckConstant::real_default();
        assert_eq!(kr.value(), 1.783);
        let a = FiniteBanachAlgebra::<Complex64>::sup(2).unwrap();
        let e = AlgebraElement::basis(&a, 0).unwrap();
        let u = DecomposedTensor::simple(&e, &e);
        // A = B = 1 exactly, so the bound is k/2 * 2 = k on the nose
        assert_eq!(u.grothendieck_bound(&kc).unwrap(), 1.405);
    }

    #[test]
    fn product_map_requires_matching_factors() {
        let a = sup2();
        let b = FiniteBanachAlgebra::<f64>::sup(3).unwrap();
        let ea = AlgebraElement::basis(&a, 0).unwrap();
        let eb = AlgebraElement::basis(&b, 0).unwrap();
        let t = DecomposedTensor::simple(&ea, &eb);
        assert!(matches!(
            t.product_map(),
            Err(Error::AlgebraMismatch(_))
        ));
    }
}
