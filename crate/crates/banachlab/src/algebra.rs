//! Finite-dimensional Banach algebras given by dense structure constants,
//! together with the element arithmetic and norm evaluation everything else
//! is built on.
//!
//! Supported families: sup-norm function algebras on n points, full matrix
//! algebras with the operator norm, group convolution algebras with the l1
//! norm, the truncated polynomial algebra span{1, x} with x^2 = 0, and
//! algebras of functions on a finite point set with values in any of these
//! (pointwise operations, sup of the base norm).

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{all_zero, Scalar, ScalarField};
use std::sync::Arc;

/// Shared handle to an algebra. Elements hold one of these; two handles are
/// interchangeable when they are pointer-equal or structurally equal.
pub type AlgebraHandle<S> = Arc<FiniteBanachAlgebra<S>>;

/// How norms are evaluated on coefficient vectors.
#[derive(Debug, Clone)]
pub enum NormKind<S: Scalar> {
    /// Largest modulus of a coefficient.
    Sup,
    /// Largest singular value of the coefficient vector read as a rows x rows
    /// matrix in row-major order.
    MatrixOperator { rows: usize },
    /// Sum of moduli.
    GroupL1,
    /// Weighted sum of moduli.
    WeightedL1 { weights: Vec<f64> },
    /// Coefficients chunked per point; sup over points of the base norm.
    VectorValued {
        base: AlgebraHandle<S>,
        points: usize,
    },
}

/// A finite-dimensional Banach algebra: structure constants plus a norm rule
/// and an optional unit.
#[derive(Debug)]
pub struct FiniteBanachAlgebra<S: Scalar> {
    dim: usize,
    /// Dense rank-3 array; entry (i, j, k) is the coefficient of basis
    /// element k in the product of basis elements i and j.
    mult: Vec<S>,
    norm_kind: NormKind<S>,
    unit: Option<Vec<S>>,
}

impl<S: Scalar> FiniteBanachAlgebra<S> {
    fn from_parts(dim: usize, mult: Vec<S>, norm_kind: NormKind<S>, unit: Option<Vec<S>>) -> Self {
        debug_assert_eq!(mult.len(), dim * dim * dim);
        FiniteBanachAlgebra {
            dim,
            mult,
            norm_kind,
            unit,
        }
    }

    /// Functions on n points with pointwise product and sup norm.
    pub fn sup(n: usize) -> Result<AlgebraHandle<S>> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        let mut mult = vec![S::from_re(0.0); n * n * n];
        for i in 0..n {
            mult[(i * n + i) * n + i] = S::from_re(1.0);
        }
        let unit = vec![S::from_re(1.0); n];
        Ok(Arc::new(Self::from_parts(
            n,
            mult,
            NormKind::Sup,
            Some(unit),
        )))
    }

    /// Full n x n matrix algebra with the operator norm. Basis element
    /// p*n + q is the matrix unit with a single 1 in row p, column q.
    pub fn matrix(n: usize) -> Result<AlgebraHandle<S>> {
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        let d = n * n;
        let mut mult = vec![S::from_re(0.0); d * d * d];
        for p in 0..n {
            for q in 0..n {
                for s in 0..n {
                    // e_(p,q) e_(q,s) = e_(p,s)
                    let i = p * n + q;
                    let j = q * n + s;
                    let k = p * n + s;
                    mult[(i * d + j) * d + k] = S::from_re(1.0);
                }
            }
        }
        let mut unit = vec![S::from_re(0.0); d];
        for p in 0..n {
            unit[p * n + p] = S::from_re(1.0);
        }
        Ok(Arc::new(Self::from_parts(
            d,
            mult,
            NormKind::MatrixOperator { rows: n },
            Some(unit),
        )))
    }

    /// Group convolution algebra from a Cayley table. The table is validated
    /// (closure, identity, associativity, inverses) and rejected with a
    /// diagnostic naming the first failure found.
    pub fn group(cayley: &[Vec<usize>]) -> Result<AlgebraHandle<S>> {
        let n = cayley.len();
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        for (g, row) in cayley.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotAGroup(format!(
                    "row {g} has length {} but the table has {n} rows",
                    row.len()
                )));
            }
            for (h, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::NotAGroup(format!(
                        "entry ({g}, {h}) is {v}, outside 0..{n}"
                    )));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| cayley[e][g] == g && cayley[g][e] == g))
            .ok_or_else(|| Error::NotAGroup("no two-sided identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if cayley[cayley[a][b]][c] != cayley[a][cayley[b][c]] {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        for g in 0..n {
            if !(0..n).any(|h| cayley[g][h] == identity && cayley[h][g] == identity) {
                return Err(Error::NotAGroup(format!("element {g} has no inverse")));
            }
        }
        let mut mult = vec![S::from_re(0.0); n * n * n];
        for g in 0..n {
            for h in 0..n {
                mult[(g * n + h) * n + cayley[g][h]] = S::from_re(1.0);
            }
        }
        let mut unit = vec![S::from_re(0.0); n];
        unit[identity] = S::from_re(1.0);
        Ok(Arc::new(Self::from_parts(
            n,
            mult,
            NormKind::GroupL1,
            Some(unit),
        )))
    }

    /// span{1, x} with x^2 = 0 and the l1 norm on coefficients.
    pub fn truncated_poly() -> AlgebraHandle<S> {
        let d = 2;
        let mut mult = vec![S::from_re(0.0); d * d * d];
        mult[(0 * d + 0) * d + 0] = S::from_re(1.0);
        mult[(0 * d + 1) * d + 1] = S::from_re(1.0);
        mult[(1 * d + 0) * d + 1] = S::from_re(1.0);
        // x * x = 0
        let unit = vec![S::from_re(1.0), S::from_re(0.0)];
        Arc::new(Self::from_parts(
            d,
            mult,
            NormKind::WeightedL1 {
                weights: vec![1.0, 1.0],
            },
            Some(unit),
        ))
    }

    /// Functions on `points` points with values in `base`: pointwise product,
    /// sup over points of the base norm. Coefficients are stored point-major.
    pub fn vector_valued(points: usize, base: &AlgebraHandle<S>) -> Result<AlgebraHandle<S>> {
        if points == 0 {
            return Err(Error::EmptyDimension);
        }
        let bd = base.dim;
        let d = points * bd;
        let mut mult = vec![S::from_re(0.0); d * d * d];
        for p in 0..points {
            for i in 0..bd {
                for j in 0..bd {
                    let row = &base.mult[(i * bd + j) * bd..(i * bd + j) * bd + bd];
                    for (k, &c) in row.iter().enumerate() {
                        if !c.is_zero_exact() {
                            let gi = p * bd + i;
                            let gj = p * bd + j;
                            let gk = p * bd + k;
                            mult[(gi * d + gj) * d + gk] = c;
                        }
                    }
                }
            }
        }
        let unit = base.unit.as_ref().map(|u| {
            let mut v = Vec::with_capacity(d);
            for _ in 0..points {
                v.extend_from_slice(u);
            }
            v
        });
        Ok(Arc::new(Self::from_parts(
            d,
            mult,
            NormKind::VectorValued {
                base: base.clone(),
                points,
            },
            unit,
        )))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> ScalarField {
        S::FIELD
    }

    pub fn norm_kind(&self) -> &NormKind<S> {
        &self.norm_kind
    }

    pub fn is_unital(&self) -> bool {
        self.unit.is_some()
    }

    pub fn unit_coeffs(&self) -> Option<&[S]> {
        self.unit.as_deref()
    }

    /// Structure constant (i, j, k).
    pub fn mult_constant(&self, i: usize, j: usize, k: usize) -> S {
        self.mult[(i * self.dim + j) * self.dim + k]
    }

    /// Raw structure-constant product of two coefficient vectors.
    pub(crate) fn product(&self, a: &[S], b: &[S]) -> Vec<S> {
        let d = self.dim;
        let mut out = vec![S::from_re(0.0); d];
        for (i, &ai) in a.iter().enumerate() {
            if ai.is_zero_exact() {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj.is_zero_exact() {
                    continue;
                }
                let s = ai * bj;
                let row = &self.mult[(i * d + j) * d..(i * d + j) * d + d];
                for (k, &c) in row.iter().enumerate() {
                    if !c.is_zero_exact() {
                        out[k] += s * c;
                    }
                }
            }
        }
        out
    }

    /// Norm of a coefficient vector under this algebra's rule.
    pub(crate) fn norm_of(&self, coeffs: &[S]) -> Result<f64> {
        match &self.norm_kind {
            NormKind::Sup => Ok(coeffs.iter().fold(0.0f64, |m, x| m.max(x.mag()))),
            NormKind::MatrixOperator { rows } => linalg::operator_norm(*rows, *rows, coeffs),
            NormKind::GroupL1 => Ok(coeffs.iter().map(|x| x.mag()).sum()),
            NormKind::WeightedL1 { weights } => Ok(coeffs
                .iter()
                .zip(weights.iter())
                .map(|(x, w)| w * x.mag())
                .sum()),
            NormKind::VectorValued { base, points } => {
                let bd = base.dim;
                let mut m = 0.0f64;
                for p in 0..*points {
                    m = m.max(base.norm_of(&coeffs[p * bd..(p + 1) * bd])?);
                }
                Ok(m)
            }
        }
    }

    /// True when the structure constants are symmetric in the first two slots.
    pub fn is_commutative(&self) -> bool {
        let d = self.dim;
        for i in 0..d {
            for j in (i + 1)..d {
                for k in 0..d {
                    if self.mult[(i * d + j) * d + k] != self.mult[(j * d + i) * d + k] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Structural equality: same dimension, structure constants, norm rule
    /// and unit. Used to accept elements built against a different but
    /// identical handle.
    pub fn structurally_eq(&self, other: &Self) -> bool {
        if self.dim != other.dim || self.unit != other.unit || self.mult != other.mult {
            return false;
        }
        match (&self.norm_kind, &other.norm_kind) {
            (NormKind::Sup, NormKind::Sup) => true,
            (NormKind::MatrixOperator { rows: a }, NormKind::MatrixOperator { rows: b }) => a == b,
            (NormKind::GroupL1, NormKind::GroupL1) => true,
            (NormKind::WeightedL1 { weights: a }, NormKind::WeightedL1 { weights: b }) => a == b,
            (
                NormKind::VectorValued {
                    base: a,
                    points: pa,
                },
                NormKind::VectorValued {
                    base: b,
                    points: pb,
                },
            ) => pa == pb && a.structurally_eq(b),
            _ => false,
        }
    }

    /// Handle compatibility: pointer equality with a structural fallback.
    pub fn same(a: &AlgebraHandle<S>, b: &AlgebraHandle<S>) -> bool {
        Arc::ptr_eq(a, b) || a.structurally_eq(b)
    }
}

/// An element of a [`FiniteBanachAlgebra`]: a coefficient vector plus the
/// handle of the algebra it lives in.
#[derive(Debug, Clone)]
pub struct AlgebraElement<S: Scalar> {
    algebra: AlgebraHandle<S>,
    coeffs: Vec<S>,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn new(algebra: &AlgebraHandle<S>, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != algebra.dim {
            return Err(Error::InvalidElement(format!(
                "coefficient vector has length {}, algebra dimension is {}",
                coeffs.len(),
                algebra.dim
            )));
        }
        if coeffs.iter().any(|x| !x.mag().is_finite()) {
            return Err(Error::InvalidElement(
                "coefficients must be finite".to_string(),
            ));
        }
        Ok(AlgebraElement {
            algebra: algebra.clone(),
            coeffs,
        })
    }

    pub fn zero(algebra: &AlgebraHandle<S>) -> Self {
        AlgebraElement {
            algebra: algebra.clone(),
            coeffs: vec![S::from_re(0.0); algebra.dim],
        }
    }

    pub fn basis(algebra: &AlgebraHandle<S>, i: usize) -> Result<Self> {
        if i >= algebra.dim {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: algebra.dim,
            });
        }
        let mut coeffs = vec![S::from_re(0.0); algebra.dim];
        coeffs[i] = S::from_re(1.0);
        Ok(AlgebraElement {
            algebra: algebra.clone(),
            coeffs,
        })
    }

    pub fn unit(algebra: &AlgebraHandle<S>) -> Result<Self> {
        let u = algebra.unit.as_ref().ok_or(Error::NoUnit)?;
        Ok(AlgebraElement {
            algebra: algebra.clone(),
            coeffs: u.clone(),
        })
    }

    pub fn algebra(&self) -> &AlgebraHandle<S> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        all_zero(&self.coeffs)
    }

    fn check_same(&self, other: &Self, op: &str) -> Result<()> {
        if FiniteBanachAlgebra::same(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch(format!(
                "{op} needs both elements in the same algebra"
            )))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "add")?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(&a, &b)| a + b)
            .collect();
        Ok(AlgebraElement {
            algebra: self.algebra.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "sub")?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(&a, &b)| a - b)
            .collect();
        Ok(AlgebraElement {
            algebra: self.algebra.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, s: S) -> Self {
        AlgebraElement {
            algebra: self.algebra.clone(),
            coeffs: self.coeffs.iter().map(|&x| s * x).collect(),
        }
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(S::from_re(x))
    }

    /// Algebra product through the structure constants.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "mul")?;
        Ok(AlgebraElement {
            algebra: self.algebra.clone(),
            coeffs: self.algebra.product(&self.coeffs, &other.coeffs),
        })
    }

    pub fn norm(&self) -> Result<f64> {
        self.algebra.norm_of(&self.coeffs)
    }

    /// Evaluation at a point of a vector-valued algebra; a homomorphism onto
    /// the base algebra.
    pub fn evaluate_at(&self, point: usize) -> Result<Self> {
        match self.algebra.norm_kind() {
            NormKind::VectorValued { base, points } => {
                if point >= *points {
                    return Err(Error::IndexOutOfRange {
                        index: point,
                        dim: *points,
                    });
                }
                let bd = base.dim();
                AlgebraElement::new(base, self.coeffs[point * bd..(point + 1) * bd].to_vec())
            }
            _ => Err(Error::Unsupported(
                "evaluation is only defined on vector-valued algebras".to_string(),
            )),
        }
    }

    /// Embed a base-algebra element as the constant function in `target`.
    pub fn constant(target: &AlgebraHandle<S>, a: &Self) -> Result<Self> {
        match target.norm_kind() {
            NormKind::VectorValued { base, points } => {
                if !FiniteBanachAlgebra::same(base, &a.algebra) {
                    return Err(Error::AlgebraMismatch(
                        "constant embedding needs an element of the base algebra".to_string(),
                    ));
                }
                let mut coeffs = Vec::with_capacity(target.dim());
                for _ in 0..*points {
                    coeffs.extend_from_slice(&a.coeffs);
                }
                AlgebraElement::new(target, coeffs)
            }
            _ => Err(Error::Unsupported(
                "constant embedding needs a vector-valued target".to_string(),
            )),
        }
    }

    /// The function x -> f(x) a in `target`, for a scalar function f on the
    /// point set and a base-algebra element a.
    pub fn scalar_times_base(target: &AlgebraHandle<S>, f: &Self, a: &Self) -> Result<Self> {
        match target.norm_kind() {
            NormKind::VectorValued { base, points } => {
                if !FiniteBanachAlgebra::same(base, &a.algebra) {
                    return Err(Error::AlgebraMismatch(
                        "scalar_times_base needs an element of the base algebra".to_string(),
                    ));
                }
                if f.coeffs.len() != *points {
                    return Err(Error::SpaceMismatch(format!(
                        "scalar factor has {} values, target has {} points",
                        f.coeffs.len(),
                        points
                    )));
                }
                let mut coeffs = Vec::with_capacity(target.dim());
                for p in 0..*points {
                    let fp = f.coeffs[p];
                    coeffs.extend(a.coeffs.iter().map(|&x| fp * x));
                }
                AlgebraElement::new(target, coeffs)
            }
            _ => Err(Error::Unsupported(
                "scalar_times_base needs a vector-valued target".to_string(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z3_table() -> Vec<Vec<usize>> {
        vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]
    }

    fn random_element<S: Scalar>(
        alg: &AlgebraHandle<S>,
        rng: &mut ChaCha8Rng,
    ) -> AlgebraElement<S> {
        let coeffs = (0..alg.dim())
            .map(|_| {
                let re: f64 = rng.random_range(-1.0..1.0);
                let im: f64 = match S::FIELD {
                    ScalarField::Real => 0.0,
                    ScalarField::Complex => rng.random_range(-1.0..1.0),
                };
                S::from_re_im(re, im)
            })
            .collect();
        AlgebraElement::new(alg, coeffs).unwrap()
    }

    #[test]
    fn sup_algebra_basics() {
        let a = FiniteBanachAlgebra::<f64>::sup(3).unwrap();
        let x = AlgebraElement::new(&a, vec![1.0, -2.0, 0.5]).unwrap();
        let y = AlgebraElement::new(&a, vec![2.0, 3.0, -1.0]).unwrap();
        assert_eq!(x.norm().unwrap(), 2.0);
        let p = x.mul(&y).unwrap();
        assert_eq!(p.coeffs(), &[2.0, -6.0, -0.5]);
        let u = AlgebraElement::unit(&a).unwrap();
        assert_eq!(u.mul(&x).unwrap().coeffs(), x.coeffs());
    }

    #[test]
    fn matrix_units_multiply_correctly() {
        let a = FiniteBanachAlgebra::<f64>::matrix(2).unwrap();
        let e12 = AlgebraElement::basis(&a, 1).unwrap();
        let e21 = AlgebraElement::basis(&a, 2).unwrap();
        let e11 = AlgebraElement::basis(&a, 0).unwrap();
        assert_eq!(e12.mul(&e21).unwrap().coeffs(), e11.coeffs());
        assert!(e12.mul(&e12).unwrap().is_zero());
    }

    #[test]
    fn matrix_operator_norm_oracle() {
        // [[1,1],[0,1]] has operator norm (1+sqrt 5)/2.
        let a = FiniteBanachAlgebra::<f64>::matrix(2).unwrap();
        let m = AlgebraElement::new(&a, vec![1.0, 1.0, 0.0, 1.0]).unwrap();
        assert_relative_eq!(
            m.norm().unwrap(),
            (1.0 + 5.0f64.sqrt()) / 2.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn group_algebra_convolution() {
        let a = FiniteBanachAlgebra::<f64>::group(&z3_table()).unwrap();
        let d1 = AlgebraElement::basis(&a, 1).unwrap();
        let d2 = AlgebraElement::basis(&a, 2).unwrap();
        let p = d1.mul(&d2).unwrap();
        assert_eq!(p.coeffs(), &[1.0, 0.0, 0.0]);
        let x = AlgebraElement::new(&a, vec![1.0, -2.0, 3.0]).unwrap();
        assert_eq!(x.norm().unwrap(), 6.0);
    }

    #[test]
    fn group_table_rejections_name_the_failure() {
        // no identity: neither row acts as one on the left
        let t1 = vec![vec![1, 0], vec![1, 0]];
        match FiniteBanachAlgebra::<f64>::group(&t1) {
            Err(Error::NotAGroup(msg)) => assert!(msg.contains("identity")),
            other => panic!("expected NotAGroup, got {other:?}"),
        }
        // broken associativity (and worse), entries valid, row 0 acts as
        // identity on the left and right
        let t2 = vec![vec![0, 1, 2], vec![1, 0, 0], vec![2, 0, 1]];
        match FiniteBanachAlgebra::<f64>::group(&t2) {
            Err(Error::NotAGroup(msg)) => assert!(msg.contains("associativity")),
            other => panic!("expected NotAGroup, got {other:?}"),
        }
        // out-of-range entry
        let t3 = vec![vec![0, 1], vec![1, 7]];
        match FiniteBanachAlgebra::<f64>::group(&t3) {
            Err(Error::NotAGroup(msg)) => assert!(msg.contains("outside")),
            other => panic!("expected NotAGroup, got {other:?}"),
        }
    }

    #[test]
    fn truncated_poly_squares_to_zero() {
        let a = FiniteBanachAlgebra::<f64>::truncated_poly();
        let x = AlgebraElement::basis(&a, 1).unwrap();
        assert!(x.mul(&x).unwrap().is_zero());
        let e = AlgebraElement::new(&a, vec![2.0, -3.0]).unwrap();
        assert_eq!(e.norm().unwrap(), 5.0);
        assert!(a.is_commutative());
    }

    #[test]
    fn vector_valued_norm_is_sup_of_base_norms() {
        let base = FiniteBanachAlgebra::<f64>::matrix(2).unwrap();
        let vv = FiniteBanachAlgebra::vector_valued(3, &base).unwrap();
        assert_eq!(vv.dim(), 12);
        let mut coeffs = vec![0.0; 12];
        // point 1 carries [[1,1],[0,1]], the rest are zero
        coeffs[4] = 1.0;
        coeffs[5] = 1.0;
        coeffs[7] = 1.0;
        let f = AlgebraElement::new(&vv, coeffs).unwrap();
        assert_relative_eq!(
            f.norm().unwrap(),
            (1.0 + 5.0f64.sqrt()) / 2.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn one_point_vector_valued_matches_base_norm_exactly() {
        let base = FiniteBanachAlgebra::<f64>::matrix(2).unwrap();
        let vv = FiniteBanachAlgebra::vector_valued(1, &base).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let coeffs: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
            let a = AlgebraElement::new(&base, coeffs.clone()).unwrap();
            let f = AlgebraElement::new(&vv, coeffs).unwrap();
            // identical arithmetic on both sides, so the values agree to the
            // last bit
            assert_eq!(a.norm().unwrap(), f.norm().unwrap());
        }
    }

    #[test]
    fn evaluation_is_multiplicative() {
        let base = FiniteBanachAlgebra::<f64>::group(&z3_table()).unwrap();
        let vv = FiniteBanachAlgebra::vector_valued(4, &base).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let f = random_element(&vv, &mut rng);
            let g = random_element(&vv, &mut rng);
            let prod = f.mul(&g).unwrap();
            for p in 0..4 {
                let left = prod.evaluate_at(p).unwrap();
                let right = f
                    .evaluate_at(p)
                    .unwrap()
                    .mul(&g.evaluate_at(p).unwrap())
                    .unwrap();
                let diff = left.sub(&right).unwrap();
                assert!(diff.norm().unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn evaluation_rejects_out_of_range_points() {
        let base = FiniteBanachAlgebra::<f64>::sup(2).unwrap();
        let vv = FiniteBanachAlgebra::vector_valued(3, &base).unwrap();
        let f = AlgebraElement::zero(&vv);
        assert!(matches!(
            f.evaluate_at(3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn associativity_on_all_basis_triples() {
        let algs: Vec<AlgebraHandle<f64>> = vec![
            FiniteBanachAlgebra::sup(4).unwrap(),
            FiniteBanachAlgebra::matrix(3).unwrap(),
            FiniteBanachAlgebra::group(&z3_table()).unwrap(),
            FiniteBanachAlgebra::truncated_poly(),
            FiniteBanachAlgebra::vector_valued(
                3,
                &FiniteBanachAlgebra::truncated_poly(),
            )
            .unwrap(),
        ];
        for alg in &algs {
            let d = alg.dim();
            assert!(d <= 12);
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        let ei = AlgebraElement::basis(alg, i).unwrap();
                        let ej = AlgebraElement::basis(alg, j).unwrap();
                        let ek = AlgebraElement::basis(alg, k).unwrap();
                        let left = ei.mul(&ej).unwrap().mul(&ek).unwrap();
                        let right = ei.mul(&ej.mul(&ek).unwrap()).unwrap();
                        let diff = left.sub(&right).unwrap();
                        assert!(
                            diff.coeffs().iter().all(|x| x.abs() < 1e-12),
                            "associativity fails at ({i}, {j}, {k})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn norms_are_submultiplicative() {
        let algs: Vec<AlgebraHandle<f64>> = vec![
            FiniteBanachAlgebra::sup(5).unwrap(),
            FiniteBanachAlgebra::matrix(2).unwrap(),
            FiniteBanachAlgebra::group(&z3_table()).unwrap(),
            FiniteBanachAlgebra::truncated_poly(),
            FiniteBanachAlgebra::vector_valued(2, &FiniteBanachAlgebra::matrix(2).unwrap())
                .unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for alg in &algs {
            for _ in 0..200 {
                let a = random_element(alg, &mut rng);
                let b = random_element(alg, &mut rng);
                let pn = a.mul(&b).unwrap().norm().unwrap();
                let bound = a.norm().unwrap() * b.norm().unwrap() * (1.0 + 1e-12);
                assert!(
                    pn <= bound + 1e-12,
                    "product norm {pn} exceeds {bound}"
                );
            }
        }
    }

    #[test]
    fn submultiplicative_in_complex_mode_too() {
        let alg = FiniteBanachAlgebra::<Complex64>::matrix(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = AlgebraElement::new(
                &alg,
                (0..4)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect(),
            )
            .unwrap();
            let b = AlgebraElement::new(
                &alg,
                (0..4)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect(),
            )
            .unwrap();
            let pn = a.mul(&b).unwrap().norm().unwrap();
            assert!(pn <= a.norm().unwrap() * b.norm().unwrap() * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn structural_equality_accepts_separately_built_twins() {
        let a = FiniteBanachAlgebra::<f64>::sup(3).unwrap();
        let b = FiniteBanachAlgebra::<f64>::sup(3).unwrap();
        assert!(FiniteBanachAlgebra::same(&a, &b));
        let x = AlgebraElement::new(&a, vec![1.0, 0.0, 0.0]).unwrap();
        let y = AlgebraElement::new(&b, vec![0.0, 1.0, 0.0]).unwrap();
        assert!(x.add(&y).is_ok());
        let c = FiniteBanachAlgebra::<f64>::sup(4).unwrap();
        assert!(!FiniteBanachAlgebra::same(&a, &c));
        let z = AlgebraElement::zero(&c);
        assert!(matches!(x.add(&z), Err(Error::AlgebraMismatch(_))));
    }

    #[test]
    fn mismatched_coefficient_length_is_rejected() {
        let a = FiniteBanachAlgebra::<f64>::sup(3).unwrap();
        assert!(matches!(
            AlgebraElement::new(&a, vec![1.0, 2.0]),
            Err(Error::InvalidElement(_))
        ));
        assert!(matches!(
            AlgebraElement::new(&a, vec![1.0, f64::NAN, 0.0]),
            Err(Error::InvalidElement(_))
        ));
    }
}
