//! Exact diagonals for the base algebra families, certified lifts of a base
//! diagonal to the algebra of base-valued functions on a finite metric
//! space, the evaluation pushforward, and an independent verifier.
//!
//! Every certificate produced here separates two kinds of numbers. Product
//! residuals are exact sup-norm evaluations of pi(U)a - a. Commutator
//! numbers are certified upper bounds: they come from decomposition norm
//! sums, Grothendieck-type estimates on the scalar side, and exact
//! coefficient cancellations on the base side, so they can be trusted even
//! though the true projective norm is out of reach at these sizes.

use crate::algebra::{AlgebraElement, AlgebraHandle, FiniteBanachAlgebra, NormKind};
use crate::error::{Error, Result};
use crate::lp::norm_exact_lp;
use crate::scalar::{max_mag, Scalar};
use crate::space::{
    ball_cover, elementary_approximation, oscillation, partition_of_unity, pou_commutator_bound,
    sqrt_diagonal, CompactSpaceModel, Cover, PartitionOfUnity,
};
use crate::tensor::{DecomposedTensor, GrothendieckConstant};

/// Sup-norm slack allowed between a test function and its declared
/// elementary decomposition.
const ELEMENTARY_TOL: f64 = 1e-10;

/// Safety cap on cover refinement. Cells shrink to single points long
/// before this many halvings on any reasonable space.
const MAX_RADIUS_HALVINGS: usize = 300;

/// A lifting request: the tolerance, the test functions the lifted diagonal
/// must serve, and the base diagonal to lift.
#[derive(Debug, Clone)]
pub struct DiagonalRequest<S: Scalar> {
    target_eps: f64,
    test_set: Vec<AlgebraElement<S>>,
    base_diagonal: DecomposedTensor<S>,
    base_residual: f64,
    central: bool,
}

impl<S: Scalar> DiagonalRequest<S> {
    /// `base_residual` is the caller's own bound on the base unit residuals
    /// over the region they verified; it is recorded for audit while the
    /// lifts recheck the exact residuals they depend on. `central` declares
    /// that the base diagonal commutes exactly; lifts validate the claim
    /// wherever they rely on it.
    pub fn new(
        target_eps: f64,
        test_set: Vec<AlgebraElement<S>>,
        base_diagonal: DecomposedTensor<S>,
        base_residual: f64,
        central: bool,
    ) -> Result<Self> {
        if !(target_eps > 0.0 && target_eps.is_finite()) {
            return Err(Error::InvalidConstant(format!(
                "tolerance must be positive and finite, got {target_eps}"
            )));
        }
        if !(base_residual >= 0.0 && base_residual.is_finite()) {
            return Err(Error::InvalidConstant(format!(
                "base residual must be nonnegative and finite, got {base_residual}"
            )));
        }
        if !FiniteBanachAlgebra::same(
            base_diagonal.left_algebra(),
            base_diagonal.right_algebra(),
        ) {
            return Err(Error::AlgebraMismatch(
                "base diagonal must have equal factor algebras".to_string(),
            ));
        }
        if let Some(first) = test_set.first() {
            for a in test_set.iter().skip(1) {
                if !FiniteBanachAlgebra::same(a.algebra(), first.algebra()) {
                    return Err(Error::AlgebraMismatch(
                        "test functions must share one algebra".to_string(),
                    ));
                }
            }
        }
        Ok(DiagonalRequest {
            target_eps,
            test_set,
            base_diagonal,
            base_residual,
            central,
        })
    }

    pub fn target_eps(&self) -> f64 {
        self.target_eps
    }

    pub fn test_set(&self) -> &[AlgebraElement<S>] {
        &self.test_set
    }

    pub fn base_diagonal(&self) -> &DecomposedTensor<S> {
        &self.base_diagonal
    }

    pub fn base_residual(&self) -> f64 {
        self.base_residual
    }

    pub fn central(&self) -> bool {
        self.central
    }
}

/// The internal constants a lifting run committed to, recorded for audit.
/// Each lift documents how it instantiates the count parameter N and the
/// norm parameters L and M; c is always half the Grothendieck-type
/// constant and radius is the accepted cover radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub term_bound: usize,
    pub piece_norm_bound: f64,
    pub base_norm: f64,
    pub c: f64,
    pub radius: f64,
}

/// Residuals for one test function: a certified upper bound on the
/// projective norm of a U - U a and the exact sup norm of pi(U)a - a.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementReport {
    pub commutator_bound: f64,
    pub pi_residual: f64,
}

/// Outcome of a lifting run or a verification: the diagonal itself,
/// per-function residuals, the constants behind them, and the verdict.
#[derive(Debug, Clone)]
pub struct DiagonalCertificate<S: Scalar> {
    tensor: DecomposedTensor<S>,
    eps: f64,
    norm_bound: f64,
    elements: Vec<ElementReport>,
    schedule: Option<Schedule>,
    centers: Vec<String>,
    pass: bool,
    alpha_cancellation_max: Option<f64>,
    approximation_errors: Option<Vec<f64>>,
    seed: Option<u64>,
}

impl<S: Scalar> DiagonalCertificate<S> {
    pub fn tensor(&self) -> &DecomposedTensor<S> {
        &self.tensor
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Certified upper bound on the projective norm of the diagonal.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn elements(&self) -> &[ElementReport] {
        &self.elements
    }

    pub fn schedule(&self) -> Option<&Schedule> {
        self.schedule.as_ref()
    }

    /// Labels of the cover centers behind the partition of unity; empty for
    /// verification-only reports.
    pub fn centers(&self) -> &[String] {
        &self.centers
    }

    pub fn pass(&self) -> bool {
        self.pass
    }

    /// Largest base-side commutator coefficient observed when the run
    /// depended on exact centrality; 0.0 there means the cancellation was
    /// exact to the last bit.
    pub fn alpha_cancellation_max(&self) -> Option<f64> {
        self.alpha_cancellation_max
    }

    /// Exact sup-norm distances between each test function and the
    /// elementary stand-in the lift actually served, when one was used.
    pub fn approximation_errors(&self) -> Option<&[f64]> {
        self.approximation_errors.as_deref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Stamps the randomness seed the test functions came from, so the
    /// certificate records everything needed to reproduce the run.
    pub fn set_seed(&mut self, seed: Option<u64>) {
        self.seed = seed;
    }

    /// Serializes the certificate without the tensor. Keys are emitted in
    /// sorted order, so equal certificates print identically.
    pub fn to_json(&self) -> String {
        let mut root = serde_json::Map::new();
        root.insert("eps".to_string(), serde_json::json!(self.eps));
        root.insert("norm_bound".to_string(), serde_json::json!(self.norm_bound));
        if let Some(s) = &self.schedule {
            root.insert(
                "schedule".to_string(),
                serde_json::json!({
                    "N": s.term_bound,
                    "L": s.piece_norm_bound,
                    "M": s.base_norm,
                    "c": s.c,
                    "radius": s.radius,
                }),
            );
        }
        let elements: Vec<serde_json::Value> = self
            .elements
            .iter()
            .map(|e| {
                serde_json::json!({
                    "commutator_bound": e.commutator_bound,
                    "pi_residual": e.pi_residual,
                })
            })
            .collect();
        root.insert("elements".to_string(), serde_json::Value::Array(elements));
        root.insert("pass".to_string(), serde_json::json!(self.pass));
        root.insert("centers".to_string(), serde_json::json!(self.centers));
        if let Some(v) = self.alpha_cancellation_max {
            root.insert("alpha_cancellation_max".to_string(), serde_json::json!(v));
        }
        if let Some(v) = &self.approximation_errors {
            root.insert("approximation_errors".to_string(), serde_json::json!(v));
        }
        if let Some(v) = self.seed {
            root.insert("seed".to_string(), serde_json::json!(v));
        }
        serde_json::to_string_pretty(&serde_json::Value::Object(root))
            .expect("certificate serialization cannot fail")
    }
}

/// The coordinate diagonal of a pointwise function algebra: the sum of
/// e_i (x) e_i over the coordinate basis. Exactly central, with product map
/// equal to the unit.
pub fn exact_diagonal_sup<S: Scalar>(alg: &AlgebraHandle<S>) -> Result<DecomposedTensor<S>> {
    if !matches!(alg.norm_kind(), NormKind::Sup) {
        return Err(Error::Unsupported(
            "the coordinate diagonal needs a sup-norm algebra".to_string(),
        ));
    }
    let pairs = (0..alg.dim())
        .map(|i| {
            let e = AlgebraElement::basis(alg, i)?;
            Ok((e.clone(), e))
        })
        .collect::<Result<Vec<_>>>()?;
    DecomposedTensor::from_pairs(alg, alg, &pairs)
}

/// The averaged matrix-unit diagonal of a full matrix algebra: the sum of
/// (1/n) e_ij (x) e_ji over all index pairs. Its product map is the
/// identity matrix, and its commutator coefficients cancel exactly because
/// both module actions route the same products to the same slots.
pub fn exact_diagonal_matrix<S: Scalar>(alg: &AlgebraHandle<S>) -> Result<DecomposedTensor<S>> {
    let n = match alg.norm_kind() {
        NormKind::MatrixOperator { rows } => *rows,
        _ => {
            return Err(Error::Unsupported(
                "the matrix-unit diagonal needs a matrix algebra".to_string(),
            ))
        }
    };
    let w = 1.0 / n as f64;
    let mut pairs = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            pairs.push((
                AlgebraElement::basis(alg, i * n + j)?.scale_re(w),
                AlgebraElement::basis(alg, j * n + i)?,
            ));
        }
    }
    DecomposedTensor::from_pairs(alg, alg, &pairs)
}

/// The averaged group diagonal of a finite group convolution algebra: the
/// sum of (1/|G|) delta_g (x) delta_{g inverse}. Exactly central, with
/// product map the identity element.
pub fn exact_diagonal_group<S: Scalar>(alg: &AlgebraHandle<S>) -> Result<DecomposedTensor<S>> {
    if !matches!(alg.norm_kind(), NormKind::GroupL1) {
        return Err(Error::Unsupported(
            "the group diagonal needs a group convolution algebra".to_string(),
        ));
    }
    let m = alg.dim();
    let unit = alg.unit_coeffs().ok_or(Error::NoUnit)?;
    let e = (0..m)
        .find(|&i| unit[i].re_part() == 1.0 && unit[i].im_part() == 0.0)
        .ok_or(Error::NoUnit)?;
    let w = 1.0 / m as f64;
    let mut pairs = Vec::with_capacity(m);
    for g in 0..m {
        let inv = (0..m)
            .find(|&h| alg.mult_constant(g, h, e).re_part() == 1.0)
            .ok_or_else(|| Error::NotAGroup(format!("element {g} has no inverse in the table")))?;
        pairs.push((
            AlgebraElement::basis(alg, g)?.scale_re(w),
            AlgebraElement::basis(alg, inv)?,
        ));
    }
    DecomposedTensor::from_pairs(alg, alg, &pairs)
}

/// Resolves the function algebra the lift works in: the common algebra of
/// the test functions when there are any, otherwise a fresh one over the
/// space with the base diagonal's value algebra.
fn function_algebra_of<S: Scalar>(
    test_set: &[AlgebraElement<S>],
    base: &AlgebraHandle<S>,
    space: &CompactSpaceModel,
) -> Result<AlgebraHandle<S>> {
    let first = match test_set.first() {
        None => return FiniteBanachAlgebra::vector_valued(space.len(), base),
        Some(first) => first,
    };
    let target = first.algebra().clone();
    match target.norm_kind() {
        NormKind::VectorValued { base: b, points } => {
            if *points != space.len() {
                return Err(Error::SpaceMismatch(format!(
                    "test functions are defined on {points} points, the space has {}",
                    space.len()
                )));
            }
            if !FiniteBanachAlgebra::same(b, base) {
                return Err(Error::AlgebraMismatch(
                    "test functions take values outside the base diagonal's algebra".to_string(),
                ));
            }
        }
        _ => {
            return Err(Error::Unsupported(
                "test functions must be vector-valued".to_string(),
            ))
        }
    }
    for a in test_set.iter().skip(1) {
        if !FiniteBanachAlgebra::same(a.algebra(), &target) {
            return Err(Error::AlgebraMismatch(
                "test functions must share one algebra".to_string(),
            ));
        }
    }
    Ok(target)
}

fn check_field<S: Scalar>(k: &GrothendieckConstant) -> Result<()> {
    if k.field() != S::FIELD {
        return Err(Error::InvalidConstant(format!(
            "constant for the {} field used in a {} computation",
            k.field(),
            S::FIELD
        )));
    }
    Ok(())
}

/// Halves the cover radius until the partition of unity builds and the
/// caller's acceptance test passes. Always terminates on a finite space:
/// once the radius drops below the smallest distance every cell is a single
/// point, where oscillations vanish, scalar-side commutators cancel
/// exactly, and every tent is positive.
fn refine_cover<S, F>(space: &CompactSpaceModel, mut accept: F) -> Result<(Cover, PartitionOfUnity<S>)>
where
    S: Scalar,
    F: FnMut(&Cover, &PartitionOfUnity<S>) -> Result<bool>,
{
    let mut radius = (2.0 * space.diameter()).max(1.0);
    for _ in 0..MAX_RADIUS_HALVINGS {
        let cover = ball_cover(space, radius)?;
        match partition_of_unity::<S>(space, &cover) {
            Ok(pou) => {
                if accept(&cover, &pou)? {
                    return Ok((cover, pou));
                }
            }
            // a point sitting exactly on its cell boundary; a smaller
            // radius moves the boundary
            Err(Error::UncoveredPoint(_)) => {}
            Err(e) => return Err(e),
        }
        radius /= 2.0;
    }
    Err(Error::InvalidCover(
        "radius shrank to single points without meeting the targets".to_string(),
    ))
}

/// Lifts a base diagonal to the function algebra for test functions given
/// in elementary form, one list of (scalar piece, base piece) pairs per
/// test function.
///
/// The run derives its schedule from the data: N strictly exceeds every
/// term count, L caps the piece norms (at least 1), M is the certified
/// norm bound of the base diagonal, and c is half the Grothendieck-type
/// constant. The base diagonal must beat the residual targets eps/(4cNL)
/// and eps/(NL) on every base piece, else the run stops and names the
/// failing constant. The cover is refined until every scalar piece
/// oscillates less than eps/(8cMLN) within each cell.
///
/// Each reported commutator bound sums, over the pieces of the
/// decomposition, the base-side commutator residual weighted by the scalar
/// piece and the diagonal norm, plus the scalar-side commutator bound
/// weighted by the base action norm, plus twice the reconstruction slack
/// times the norm bound. Product residuals are evaluated exactly on the
/// given functions.
pub fn lift_elementary<S: Scalar>(
    req: &DiagonalRequest<S>,
    decompositions: &[Vec<(AlgebraElement<S>, AlgebraElement<S>)>],
    space: &CompactSpaceModel,
    k: &GrothendieckConstant,
) -> Result<DiagonalCertificate<S>> {
    check_field::<S>(k)?;
    let alpha = req.base_diagonal();
    let eps = req.target_eps();
    let base = alpha.left_algebra().clone();
    let target = function_algebra_of(req.test_set(), &base, space)?;
    if decompositions.len() != req.test_set().len() {
        return Err(Error::ElementaryMismatch(format!(
            "{} decompositions for {} test functions",
            decompositions.len(),
            req.test_set().len()
        )));
    }

    let mut recon_errors = Vec::with_capacity(decompositions.len());
    for (i, (a, decomp)) in req.test_set().iter().zip(decompositions).enumerate() {
        let mut recon = AlgebraElement::zero(&target);
        for (f, b) in decomp {
            match f.algebra().norm_kind() {
                NormKind::Sup if f.algebra().dim() == space.len() => {}
                _ => {
                    return Err(Error::ElementaryMismatch(format!(
                        "scalar piece in decomposition {i} is not a function on the space"
                    )))
                }
            }
            if !FiniteBanachAlgebra::same(b.algebra(), &base) {
                return Err(Error::ElementaryMismatch(format!(
                    "base piece in decomposition {i} lives in the wrong algebra"
                )));
            }
            recon = recon.add(&AlgebraElement::scalar_times_base(&target, f, b)?)?;
        }
        let err = a.sub(&recon)?.norm()?;
        if !(err <= ELEMENTARY_TOL) {
            return Err(Error::ElementaryMismatch(format!(
                "decomposition {i} misses its function by {err:.3e}"
            )));
        }
        recon_errors.push(err);
    }

    let n_big = 1 + decompositions.iter().map(Vec::len).max().unwrap_or(0);
    let mut l_big = 1.0f64;
    for decomp in decompositions {
        for (f, b) in decomp {
            l_big = l_big.max(f.norm()?).max(b.norm()?);
        }
    }
    let c = k.half();
    let m_big = alpha.norm_upper()?;

    let commutator_target = eps / (4.0 * c * n_big as f64 * l_big);
    let pi_target = eps / (n_big as f64 * l_big);
    let pi_alpha = alpha.product_map()?;
    let mut base_commutator_bounds: Vec<Vec<f64>> = Vec::with_capacity(decompositions.len());
    let mut base_action_norms: Vec<Vec<f64>> = Vec::with_capacity(decompositions.len());
    let mut cancellation_max = 0.0f64;
    for decomp in decompositions {
        let mut r_row = Vec::with_capacity(decomp.len());
        let mut a_row = Vec::with_capacity(decomp.len());
        for (_, b) in decomp {
            let comm = alpha.commutator(b)?;
            let coeff_zero = comm.is_coeff_zero();
            let coeff_max = max_mag(&comm.coefficient_matrix());
            cancellation_max = cancellation_max.max(coeff_max);
            if req.central() && !coeff_zero {
                return Err(Error::NotCentral(format!(
                    "commutator coefficients reach {coeff_max:.3e} against a declared-central diagonal"
                )));
            }
            let r = if coeff_zero { 0.0 } else { comm.norm_upper()? };
            if !(r < commutator_target) {
                return Err(Error::SchedulePrecondition {
                    constant: "eps/(4cNL)",
                    needed: commutator_target,
                    got: r,
                });
            }
            let pres = pi_alpha.mul(b)?.sub(b)?.norm()?;
            if !(pres < pi_target) {
                return Err(Error::SchedulePrecondition {
                    constant: "eps/(NL)",
                    needed: pi_target,
                    got: pres,
                });
            }
            r_row.push(r);
            a_row.push(alpha.act_right(b)?.norm_upper()?);
        }
        base_commutator_bounds.push(r_row);
        base_action_norms.push(a_row);
    }

    let osc_target = eps / (8.0 * c * m_big * l_big * n_big as f64);
    let (cover, pou) = refine_cover::<S, _>(space, |cover, _pou| {
        for decomp in decompositions {
            for (f, _) in decomp {
                if !(oscillation(f, space, cover)? < osc_target) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    })?;

    let u = sqrt_diagonal(&pou)?;
    let gb_u = u.grothendieck_bound(k)?;
    let lifted = DecomposedTensor::mixed_into(&u, alpha, &target)?;
    let norm_bound = lifted.norm_upper()?.min(gb_u * m_big);
    assert!(
        norm_bound <= 2.0 * c * m_big,
        "norm bound {norm_bound} exceeded the guaranteed ceiling {}",
        2.0 * c * m_big
    );

    let pi_lifted = lifted.product_map()?;
    let mut elements = Vec::with_capacity(req.test_set().len());
    for (i, (a, decomp)) in req.test_set().iter().zip(decompositions).enumerate() {
        let mut bound = 2.0 * recon_errors[i] * norm_bound;
        for (t, (f, _)) in decomp.iter().enumerate() {
            let scalar_side = pou_commutator_bound(f, &pou, &u, k)?;
            bound += f.norm()? * gb_u * base_commutator_bounds[i][t]
                + scalar_side * base_action_norms[i][t];
        }
        let pi_res = pi_lifted.mul(a)?.sub(a)?.norm()?;
        elements.push(ElementReport {
            commutator_bound: bound,
            pi_residual: pi_res,
        });
    }

    let pass = elements
        .iter()
        .all(|e| e.commutator_bound < eps && e.pi_residual < eps);
    Ok(DiagonalCertificate {
        tensor: lifted,
        eps,
        norm_bound,
        elements,
        schedule: Some(Schedule {
            term_bound: n_big,
            piece_norm_bound: l_big,
            base_norm: m_big,
            c,
            radius: cover.radius(),
        }),
        centers: cover
            .centers()
            .iter()
            .map(|&i| space.label(i).to_string())
            .collect(),
        pass,
        alpha_cancellation_max: req.central().then_some(cancellation_max),
        approximation_errors: None,
        seed: None,
    })
}

/// Lifts a base diagonal for arbitrary test functions: each is first
/// replaced by an elementary stand-in within min(eps/4, eps/(8Mc)), the
/// stand-ins are lifted at eps/2, and the reported commutator bounds add
/// twice the stand-in distance times the norm bound. Product residuals are
/// evaluated exactly on the original functions.
pub fn lift_general<S: Scalar>(
    req: &DiagonalRequest<S>,
    space: &CompactSpaceModel,
    k: &GrothendieckConstant,
) -> Result<DiagonalCertificate<S>> {
    check_field::<S>(k)?;
    let alpha = req.base_diagonal();
    let eps = req.target_eps();
    let base = alpha.left_algebra().clone();
    function_algebra_of(req.test_set(), &base, space)?;
    let c = k.half();
    let m_big = alpha.norm_upper()?;
    let approx_target = (eps / 4.0).min(eps / (8.0 * m_big * c));

    let (_cover, pou) = refine_cover::<S, _>(space, |_cover, pou| {
        for a in req.test_set() {
            if !(elementary_approximation(a, pou)?.error < approx_target) {
                return Ok(false);
            }
        }
        Ok(true)
    })?;

    let mut reconstructions = Vec::with_capacity(req.test_set().len());
    let mut decomps = Vec::with_capacity(req.test_set().len());
    let mut errors = Vec::with_capacity(req.test_set().len());
    for a in req.test_set() {
        let ea = elementary_approximation(a, &pou)?;
        errors.push(ea.error);
        reconstructions.push(ea.reconstruction);
        decomps.push(ea.pairs);
    }

    let tightened = DiagonalRequest::new(
        eps / 2.0,
        reconstructions,
        alpha.clone(),
        req.base_residual(),
        req.central(),
    )?;
    let inner = lift_elementary(&tightened, &decomps, space, k)?;

    let pi_lifted = inner.tensor().product_map()?;
    let mut elements = Vec::with_capacity(req.test_set().len());
    for (i, a) in req.test_set().iter().enumerate() {
        let bound = inner.elements()[i].commutator_bound + 2.0 * errors[i] * inner.norm_bound();
        let pi_res = pi_lifted.mul(a)?.sub(a)?.norm()?;
        elements.push(ElementReport {
            commutator_bound: bound,
            pi_residual: pi_res,
        });
    }
    let pass = elements
        .iter()
        .all(|e| e.commutator_bound < eps && e.pi_residual < eps);
    Ok(DiagonalCertificate {
        tensor: inner.tensor.clone(),
        eps,
        norm_bound: inner.norm_bound,
        elements,
        schedule: inner.schedule.clone(),
        centers: inner.centers.clone(),
        pass,
        alpha_cancellation_max: inner.alpha_cancellation_max,
        approximation_errors: Some(errors),
        seed: None,
    })
}

/// Lifts an exactly central base diagonal against a finite family of
/// functions, without any norm bound on the base diagonal entering the
/// residual targets beyond max(1, its norm bound).
///
/// The base diagonal must commute exactly, to the last coefficient bit,
/// with every value a(x) of every test function; the largest coefficient
/// observed is recorded in the certificate, so a passing run shows 0.0
/// there. Base unit residuals must stay under eps/2 on the same values.
/// One cover then serves both jobs: cells small enough that every test
/// function oscillates less than eps/(8c max(1, M_alpha)), and bumps whose
/// scalar-side commutators stay under eps/(2 n M max(1, M_alpha)) with n
/// the cell count and M the largest sampled value norm. The base-side
/// block of each commutator vanishes identically, so the reported bound is
/// the scalar-side sum plus twice the stand-in distance times the norm
/// bound.
pub fn lift_central<S: Scalar>(
    test_set: &[AlgebraElement<S>],
    alpha: &DecomposedTensor<S>,
    eps: f64,
    space: &CompactSpaceModel,
    k: &GrothendieckConstant,
) -> Result<DiagonalCertificate<S>> {
    check_field::<S>(k)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidConstant(format!(
            "tolerance must be positive and finite, got {eps}"
        )));
    }
    if !FiniteBanachAlgebra::same(alpha.left_algebra(), alpha.right_algebra()) {
        return Err(Error::AlgebraMismatch(
            "base diagonal must have equal factor algebras".to_string(),
        ));
    }
    let base = alpha.left_algebra().clone();
    let target = function_algebra_of(test_set, &base, space)?;

    let mut sampled = Vec::with_capacity(test_set.len() * space.len());
    for a in test_set {
        for x in 0..space.len() {
            sampled.push(a.evaluate_at(x)?);
        }
    }

    let mut cancellation_max = 0.0f64;
    for b in &sampled {
        let comm = alpha.commutator(b)?;
        cancellation_max = cancellation_max.max(max_mag(&comm.coefficient_matrix()));
        if !comm.is_coeff_zero() {
            return Err(Error::NotCentral(format!(
                "commutator coefficients reach {cancellation_max:.3e} on the sampled values"
            )));
        }
    }
    let pi_alpha = alpha.product_map()?;
    for b in &sampled {
        let r = pi_alpha.mul(b)?.sub(b)?.norm()?;
        if !(r < eps / 2.0) {
            return Err(Error::SchedulePrecondition {
                constant: "eps/2",
                needed: eps / 2.0,
                got: r,
            });
        }
    }

    let alpha_norm = alpha.norm_upper()?;
    let anorm = alpha_norm.max(1.0);
    let mut m_big = 0.0f64;
    for b in &sampled {
        m_big = m_big.max(b.norm()?);
    }
    let c = k.half();
    let osc_target = eps / (8.0 * c * anorm);

    let (cover, pou) = refine_cover::<S, _>(space, |cover, pou| {
        for a in test_set {
            if !(oscillation(a, space, cover)? < osc_target) {
                return Ok(false);
            }
        }
        let u = sqrt_diagonal(pou)?;
        let scalar_target = eps / (2.0 * cover.len() as f64 * m_big * anorm);
        for i in 0..pou.len() {
            let f = pou.element(i)?;
            if !(pou_commutator_bound(&f, pou, &u, k)? < scalar_target) {
                return Ok(false);
            }
        }
        Ok(true)
    })?;

    let u = sqrt_diagonal(&pou)?;
    let lifted = DecomposedTensor::mixed_into(&u, alpha, &target)?;
    let norm_bound = lifted
        .norm_upper()?
        .min(u.grothendieck_bound(k)? * alpha_norm);

    let pi_lifted = lifted.product_map()?;
    let mut elements = Vec::with_capacity(test_set.len());
    let mut errors = Vec::with_capacity(test_set.len());
    for a in test_set {
        let ea = elementary_approximation(a, &pou)?;
        let mut bound = 2.0 * ea.error * norm_bound;
        for (f, b) in &ea.pairs {
            bound += pou_commutator_bound(f, &pou, &u, k)? * alpha.act_right(b)?.norm_upper()?;
        }
        let pi_res = pi_lifted.mul(a)?.sub(a)?.norm()?;
        errors.push(ea.error);
        elements.push(ElementReport {
            commutator_bound: bound,
            pi_residual: pi_res,
        });
    }
    let pass = elements
        .iter()
        .all(|e| e.commutator_bound < eps && e.pi_residual < eps);
    Ok(DiagonalCertificate {
        tensor: lifted,
        eps,
        norm_bound,
        elements,
        schedule: Some(Schedule {
            term_bound: cover.len(),
            piece_norm_bound: anorm,
            base_norm: m_big,
            c,
            radius: cover.radius(),
        }),
        centers: cover
            .centers()
            .iter()
            .map(|&i| space.label(i).to_string())
            .collect(),
        pass,
        alpha_cancellation_max: Some(cancellation_max),
        approximation_errors: Some(errors),
        seed: None,
    })
}

/// Evaluates both factors of a function-algebra tensor at one point,
/// producing a tensor over the value algebras. Evaluation never increases
/// factor norms, so term-by-term the norm budget only shrinks.
pub fn pushforward_diagonal<S: Scalar>(
    u: &DecomposedTensor<S>,
    point: usize,
) -> Result<DecomposedTensor<S>> {
    let extract = |handle: &AlgebraHandle<S>| -> Result<AlgebraHandle<S>> {
        match handle.norm_kind() {
            NormKind::VectorValued { base, points } => {
                if point >= *points {
                    return Err(Error::IndexOutOfRange {
                        index: point,
                        dim: *points,
                    });
                }
                Ok(base.clone())
            }
            _ => Err(Error::Unsupported(
                "pushforward needs function-valued tensor factors".to_string(),
            )),
        }
    };
    let lbase = extract(u.left_algebra())?;
    let rbase = extract(u.right_algebra())?;
    let mut pairs = Vec::with_capacity(u.num_terms());
    for i in 0..u.num_terms() {
        let (f, g) = u.term_pair(i)?;
        pairs.push((f.evaluate_at(point)?, g.evaluate_at(point)?));
    }
    DecomposedTensor::from_pairs(&lbase, &rbase, &pairs)
}

/// Recomputes residuals for a diagonal from scratch, with no knowledge of
/// how it was built. Commutator bounds use exact coefficient cancellation
/// when it occurs, the exact small-instance oracle when it applies, and the
/// decomposition norm sum otherwise; the last is loose for diagonals whose
/// smallness lives in structure the raw decomposition does not expose.
/// Product residuals are exact either way.
pub fn verify_diagonal<S: Scalar>(
    u: &DecomposedTensor<S>,
    test_set: &[AlgebraElement<S>],
    eps: f64,
) -> Result<DiagonalCertificate<S>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidConstant(format!(
            "tolerance must be positive and finite, got {eps}"
        )));
    }
    if !FiniteBanachAlgebra::same(u.left_algebra(), u.right_algebra()) {
        return Err(Error::AlgebraMismatch(
            "verification needs equal factor algebras".to_string(),
        ));
    }
    for a in test_set {
        if !FiniteBanachAlgebra::same(a.algebra(), u.left_algebra()) {
            return Err(Error::AlgebraMismatch(
                "test elements must live in the diagonal's algebra".to_string(),
            ));
        }
    }
    let norm_bound = u.norm_upper()?;
    let pi_u = u.product_map()?;
    let mut elements = Vec::with_capacity(test_set.len());
    for a in test_set {
        let comm = u.commutator(a)?;
        let bound = if comm.is_coeff_zero() {
            0.0
        } else {
            let upper = comm.norm_upper()?;
            match norm_exact_lp(&comm) {
                Ok(exact) => exact.min(upper),
                Err(Error::Unsupported(_)) => upper,
                Err(e) => return Err(e),
            }
        };
        let pi_res = pi_u.mul(a)?.sub(a)?.norm()?;
        elements.push(ElementReport {
            commutator_bound: bound,
            pi_residual: pi_res,
        });
    }
    let pass = elements
        .iter()
        .all(|e| e.commutator_bound < eps && e.pi_residual < eps);
    Ok(DiagonalCertificate {
        tensor: u.clone(),
        eps,
        norm_bound,
        elements,
        schedule: None,
        centers: Vec::new(),
        pass,
        alpha_cancellation_max: None,
        approximation_errors: None,
        seed: None,
    })
}
