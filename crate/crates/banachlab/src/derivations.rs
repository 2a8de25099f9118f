//! Weak-amenability testing in finite dimensions: the dual of an algebra as
//! a bimodule over it, the linear system cutting out derivations into that
//! dual, and the transfer of the answer between a value algebra and its
//! function algebra.
//!
//! Norms play no part here. Every linear map on a finite-dimensional space
//! is bounded, so the whole question reduces to the dimension of a
//! nullspace, decided at a relative singular-value threshold of 1e-9.

use nalgebra::DMatrix;

use crate::algebra::{AlgebraElement, AlgebraHandle, FiniteBanachAlgebra, NormKind};
use crate::error::{Error, Result};
use crate::linalg::nullspace;
use crate::scalar::{max_mag, Scalar};
use crate::space::CompactSpaceModel;

/// Tolerance for the derivation identity on computed maps.
pub const LEIBNIZ_TOL: f64 = 1e-10;

/// The dual space of an algebra as a bimodule over it, in the dual basis:
/// (a phi)(b) = phi(ba) and (phi a)(b) = phi(ab).
#[derive(Debug, Clone)]
pub struct DualBimodule<S: Scalar> {
    algebra: AlgebraHandle<S>,
    // matrix i sends dual coefficients of phi to those of e_i phi
    left_action: Vec<Vec<S>>,
    // matrix i sends dual coefficients of phi to those of phi e_i
    right_action: Vec<Vec<S>>,
}

/// Assembles both module actions on the dual from the structure constants.
pub fn dual_bimodule<S: Scalar>(alg: &AlgebraHandle<S>) -> DualBimodule<S> {
    let d = alg.dim();
    let mut left_action = Vec::with_capacity(d);
    let mut right_action = Vec::with_capacity(d);
    for i in 0..d {
        let mut l = vec![S::from_re(0.0); d * d];
        let mut r = vec![S::from_re(0.0); d * d];
        for k in 0..d {
            for m in 0..d {
                // e_i e_m* = sum_k c(k, i, m) e_k*, e_m* e_i = sum_k c(i, k, m) e_k*
                l[k * d + m] = alg.mult_constant(k, i, m);
                r[k * d + m] = alg.mult_constant(i, k, m);
            }
        }
        left_action.push(l);
        right_action.push(r);
    }
    DualBimodule {
        algebra: alg.clone(),
        left_action,
        right_action,
    }
}

impl<S: Scalar> DualBimodule<S> {
    pub fn algebra(&self) -> &AlgebraHandle<S> {
        &self.algebra
    }

    /// Row-major matrix of phi -> e_i phi on dual coefficients.
    pub fn left_matrix(&self, i: usize) -> Result<&[S]> {
        self.left_action
            .get(i)
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange {
                index: i,
                dim: self.algebra.dim(),
            })
    }

    /// Row-major matrix of phi -> phi e_i on dual coefficients.
    pub fn right_matrix(&self, i: usize) -> Result<&[S]> {
        self.right_action
            .get(i)
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange {
                index: i,
                dim: self.algebra.dim(),
            })
    }

    fn act(&self, matrices: &[Vec<S>], a: &AlgebraElement<S>, phi: &[S]) -> Result<Vec<S>> {
        if !FiniteBanachAlgebra::same(a.algebra(), &self.algebra) {
            return Err(Error::AlgebraMismatch(
                "module action by an element of a different algebra".to_string(),
            ));
        }
        let d = self.algebra.dim();
        if phi.len() != d {
            return Err(Error::InvalidElement(format!(
                "dual vector has {} coefficients, the algebra has {d}",
                phi.len()
            )));
        }
        let mut out = vec![S::from_re(0.0); d];
        for (i, &ai) in a.coeffs().iter().enumerate() {
            if ai.is_zero_exact() {
                continue;
            }
            let m = &matrices[i];
            for k in 0..d {
                for q in 0..d {
                    out[k] += ai * m[k * d + q] * phi[q];
                }
            }
        }
        Ok(out)
    }

    /// Dual coefficients of a phi.
    pub fn act_left(&self, a: &AlgebraElement<S>, phi: &[S]) -> Result<Vec<S>> {
        self.act(&self.left_action, a, phi)
    }

    /// Dual coefficients of phi a.
    pub fn act_right(&self, phi: &[S], a: &AlgebraElement<S>) -> Result<Vec<S>> {
        self.act(&self.right_action, a, phi)
    }

    /// True when both actions agree coefficient for coefficient, which is
    /// exact for commutative algebras.
    pub fn is_symmetric(&self) -> bool {
        self.left_action
            .iter()
            .zip(&self.right_action)
            .all(|(l, r)| l.iter().zip(r).all(|(x, y)| x.re_part() == y.re_part() && x.im_part() == y.im_part()))
    }
}

/// Rows index triples (p, q, j): the e_j* coefficient of
/// D(e_p e_q) - e_p D(e_q) - D(e_p) e_q. Columns index the unknown matrix
/// entries D_{j q} (row-major), where D(e_q) = sum_j D_{j q} e_j*.
fn leibniz_matrix<S: Scalar>(d: usize, c: &dyn Fn(usize, usize, usize) -> S) -> DMatrix<S> {
    let mut m = DMatrix::from_element(d * d * d, d * d, S::from_re(0.0));
    for p in 0..d {
        for q in 0..d {
            for j in 0..d {
                let row = (p * d + q) * d + j;
                for t in 0..d {
                    m[(row, j * d + t)] += c(p, q, t);
                    m[(row, t * d + q)] -= c(j, p, t);
                    m[(row, t * d + p)] -= c(q, j, t);
                }
            }
        }
    }
    m
}

/// Largest violation of the derivation identity over all basis pairs, for a
/// candidate map given as a row-major dual-by-source matrix.
pub fn leibniz_defect<S: Scalar>(alg: &AlgebraHandle<S>, matrix: &[S]) -> Result<f64> {
    let d = alg.dim();
    if matrix.len() != d * d {
        return Err(Error::InvalidElement(format!(
            "derivation matrix has {} entries, the algebra needs {}",
            matrix.len(),
            d * d
        )));
    }
    let mut worst = 0.0f64;
    for p in 0..d {
        for q in 0..d {
            for j in 0..d {
                let mut acc = S::from_re(0.0);
                for t in 0..d {
                    acc += alg.mult_constant(p, q, t) * matrix[j * d + t];
                    acc -= alg.mult_constant(j, p, t) * matrix[t * d + q];
                    acc -= alg.mult_constant(q, j, t) * matrix[t * d + p];
                }
                worst = worst.max(acc.mag());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
fn nullspace_dim_of_system<S: Scalar>(
    d: usize,
    c: &dyn Fn(usize, usize, usize) -> S,
) -> Result<usize> {
    Ok(nullspace(&leibniz_matrix(d, c))?.len())
}

/// All solutions of the derivation identity into the dual bimodule. Basis
/// entries are row-major d x d matrices with rows indexing the dual basis.
#[derive(Debug, Clone)]
pub struct DerivationSpace<S: Scalar> {
    algebra: AlgebraHandle<S>,
    basis: Vec<Vec<S>>,
}

impl<S: Scalar> DerivationSpace<S> {
    pub fn algebra(&self) -> &AlgebraHandle<S> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    pub fn basis_matrix(&self, i: usize) -> Result<&[S]> {
        self.basis
            .get(i)
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange {
                index: i,
                dim: self.basis.len(),
            })
    }

    /// Dual coefficients of the i-th basis derivation applied to a.
    pub fn apply(&self, i: usize, a: &AlgebraElement<S>) -> Result<Vec<S>> {
        if !FiniteBanachAlgebra::same(a.algebra(), &self.algebra) {
            return Err(Error::AlgebraMismatch(
                "derivation applied outside its algebra".to_string(),
            ));
        }
        let m = self.basis_matrix(i)?;
        let d = self.algebra.dim();
        let mut out = vec![S::from_re(0.0); d];
        for j in 0..d {
            for q in 0..d {
                out[j] += m[j * d + q] * a.coeffs()[q];
            }
        }
        Ok(out)
    }
}

fn unit_defect<S: Scalar>(d: usize, u: &[S], b: &[S]) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..d {
        let mut acc = S::from_re(0.0);
        for q in 0..d {
            acc += u[q] * b[j * d + q];
        }
        worst = worst.max(acc.mag());
    }
    worst
}

/// Solves the derivation system for the dual bimodule.
///
/// For unital algebras the identity forces D(1) = 0, so the solver first
/// substitutes that constraint away: one unknown column per dual row is
/// eliminated in favor of the others and reconstructed afterwards with the
/// same summation order the defect check uses. When the chosen unit
/// coefficient is exactly 1 the reconstruction makes D(1) vanish to the
/// last bit, and the solver asserts it.
pub fn derivation_space<S: Scalar>(alg: &AlgebraHandle<S>) -> Result<DerivationSpace<S>> {
    let d = alg.dim();
    let c = |i: usize, j: usize, k: usize| alg.mult_constant(i, j, k);
    let basis = match alg.unit_coeffs() {
        None => nullspace(&leibniz_matrix(d, &c))?,
        Some(u) => {
            let u = u.to_vec();
            let ql = (0..d)
                .rev()
                .find(|&q| !u[q].is_zero_exact())
                .expect("a unit has a nonzero coefficient");
            let full = leibniz_matrix(d, &c);
            // substitute D_{j,ql} = -(sum_{q != ql} u_q D_{j,q}) / u_ql
            let mut reduced = DMatrix::from_element(d * d * d, d * (d - 1), S::from_re(0.0));
            let red_col = |j: usize, q: usize| j * (d - 1) + if q < ql { q } else { q - 1 };
            for j in 0..d {
                for q in 0..d {
                    let src = full.column(j * d + q);
                    if q == ql {
                        for q2 in 0..d {
                            if q2 == ql || u[q2].is_zero_exact() {
                                continue;
                            }
                            let w = u[q2] / u[ql];
                            let mut dst = reduced.column_mut(red_col(j, q2));
                            for r in 0..src.len() {
                                dst[r] -= src[r] * w;
                            }
                        }
                    } else {
                        let mut dst = reduced.column_mut(red_col(j, q));
                        for r in 0..src.len() {
                            dst[r] += src[r];
                        }
                    }
                }
            }
            let mut expanded = Vec::new();
            for v in nullspace(&reduced)? {
                let mut b = vec![S::from_re(0.0); d * d];
                for j in 0..d {
                    for q in 0..d {
                        if q != ql {
                            b[j * d + q] = v[red_col(j, q)];
                        }
                    }
                }
                for j in 0..d {
                    let mut s = S::from_re(0.0);
                    for q in 0..ql {
                        s += u[q] * b[j * d + q];
                    }
                    b[j * d + ql] = -s / u[ql];
                }
                if u[ql].re_part() == 1.0 && u[ql].im_part() == 0.0 {
                    assert_eq!(
                        unit_defect(d, &u, &b),
                        0.0,
                        "reconstruction left the unit alive"
                    );
                } else {
                    let scale = 1.0 + max_mag(&b);
                    assert!(unit_defect(d, &u, &b) <= 1e-12 * scale);
                }
                expanded.push(b);
            }
            expanded
        }
    };
    for b in &basis {
        let defect = leibniz_defect(alg, b)?;
        assert!(
            defect <= LEIBNIZ_TOL,
            "nullspace vector misses the derivation identity by {defect:.3e}"
        );
    }
    Ok(DerivationSpace {
        algebra: alg.clone(),
        basis,
    })
}

/// For a commutative algebra, true exactly when no nonzero derivation into
/// the dual exists.
pub fn weakly_amenable_commutative<S: Scalar>(alg: &AlgebraHandle<S>) -> Result<bool> {
    if !alg.is_commutative() {
        return Err(Error::NotCommutative);
    }
    Ok(derivation_space(alg)?.dim() == 0)
}

/// Dimension of the span of the inner derivations phi-conjugation maps
/// a -> a phi - phi a, from the rank of phi -> that map.
pub fn inner_derivation_span_dim<S: Scalar>(alg: &AlgebraHandle<S>) -> Result<usize> {
    let d = alg.dim();
    let mut m = DMatrix::from_element(d * d, d, S::from_re(0.0));
    for t in 0..d {
        for j in 0..d {
            for q in 0..d {
                m[(j * d + q, t)] = alg.mult_constant(j, q, t) - alg.mult_constant(q, j, t);
            }
        }
    }
    Ok(d - nullspace(&m)?.len())
}

/// Restriction of a function-algebra derivation to the scalar functions:
/// one dual-coefficient column per scalar basis function, the image of that
/// function times the constant unit.
#[derive(Debug, Clone)]
pub struct TildeExtension<S: Scalar> {
    columns: Vec<Vec<S>>,
    defect: f64,
}

impl<S: Scalar> TildeExtension<S> {
    /// Dual coefficients over the function algebra, one column per scalar
    /// basis function.
    pub fn columns(&self) -> &[Vec<S>] {
        &self.columns
    }

    /// Largest violation of the derivation identity over scalar basis
    /// pairs, actions taken through the embedded scalars.
    pub fn defect(&self) -> f64 {
        self.defect
    }
}

/// Restricts a derivation on a function algebra with unital value algebra
/// to the scalar functions, f mapping to D(f 1), and checks the derivation
/// identity of the restriction on scalar basis pairs.
pub fn tilde_extension<S: Scalar>(
    deriv: &[S],
    algebra: &AlgebraHandle<S>,
) -> Result<TildeExtension<S>> {
    let (base, points) = match algebra.norm_kind() {
        NormKind::VectorValued { base, points } => (base.clone(), *points),
        _ => {
            return Err(Error::Unsupported(
                "the scalar restriction needs a function algebra".to_string(),
            ))
        }
    };
    if base.unit_coeffs().is_none() {
        return Err(Error::NoUnit);
    }
    let d = algebra.dim();
    if deriv.len() != d * d {
        return Err(Error::InvalidElement(format!(
            "derivation matrix has {} entries, the algebra needs {}",
            deriv.len(),
            d * d
        )));
    }
    let input_defect = leibniz_defect(algebra, deriv)?;
    if input_defect > LEIBNIZ_TOL {
        return Err(Error::InvalidElement(format!(
            "map misses the derivation identity by {input_defect:.3e}"
        )));
    }
    let scalars = FiniteBanachAlgebra::<S>::sup(points)?;
    let base_unit = AlgebraElement::unit(&base)?;
    let mut embedded = Vec::with_capacity(points);
    let mut columns = Vec::with_capacity(points);
    for p in 0..points {
        let f = AlgebraElement::basis(&scalars, p)?;
        let e = AlgebraElement::scalar_times_base(algebra, &f, &base_unit)?;
        let mut col = vec![S::from_re(0.0); d];
        for j in 0..d {
            for q in 0..d {
                col[j] += deriv[j * d + q] * e.coeffs()[q];
            }
        }
        embedded.push(e);
        columns.push(col);
    }
    let module = dual_bimodule(algebra);
    let mut defect = 0.0f64;
    for p in 0..points {
        for q in 0..points {
            // scalar basis functions are idempotent and orthogonal
            let lhs = if p == q {
                columns[p].clone()
            } else {
                vec![S::from_re(0.0); d]
            };
            let r1 = module.act_left(&embedded[p], &columns[q])?;
            let r2 = module.act_right(&columns[p], &embedded[q])?;
            for j in 0..d {
                defect = defect.max((lhs[j] - r1[j] - r2[j]).mag());
            }
        }
    }
    assert!(
        defect <= LEIBNIZ_TOL,
        "scalar restriction misses the derivation identity by {defect:.3e}"
    );
    Ok(TildeExtension { columns, defect })
}

/// Outcome of comparing derivation spaces upstairs and downstairs.
#[derive(Debug, Clone)]
pub struct TransferReport<S: Scalar> {
    base_dim: usize,
    lifted_dim: usize,
    transfer_holds: bool,
    witness: Option<Vec<S>>,
    witness_defect: Option<f64>,
}

impl<S: Scalar> TransferReport<S> {
    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn lifted_dim(&self) -> usize {
        self.lifted_dim
    }

    /// True when the dimensions behave as the theory demands: zero upstairs
    /// forces zero downstairs, and a nonzero space upstairs produces an
    /// explicit nonzero derivation downstairs.
    pub fn transfer_holds(&self) -> bool {
        self.transfer_holds
    }

    /// A nonzero derivation on the function algebra, present whenever the
    /// value algebra has one: the base witness pulled back through
    /// evaluation at the first point.
    pub fn witness(&self) -> Option<&[S]> {
        self.witness.as_deref()
    }

    pub fn witness_defect(&self) -> Option<f64> {
        self.witness_defect
    }
}

/// Computes derivation-space dimensions for a commutative unital value
/// algebra and for its function algebra over the given space, and checks
/// that weak amenability transfers: dimension zero upstairs forces zero
/// downstairs, while a witness upstairs pulls back to a nonzero derivation
/// downstairs.
pub fn weak_amenability_transfer_check<S: Scalar>(
    space: &CompactSpaceModel,
    alg: &AlgebraHandle<S>,
) -> Result<TransferReport<S>> {
    if !alg.is_commutative() {
        return Err(Error::NotCommutative);
    }
    if alg.unit_coeffs().is_none() {
        return Err(Error::NoUnit);
    }
    let base_space = derivation_space(alg)?;
    let lifted_alg = FiniteBanachAlgebra::vector_valued(space.len(), alg)?;
    let lifted_space = derivation_space(&lifted_alg)?;
    let base_dim = base_space.dim();
    let lifted_dim = lifted_space.dim();
    if base_dim == 0 {
        return Ok(TransferReport {
            base_dim,
            lifted_dim,
            transfer_holds: lifted_dim == 0,
            witness: None,
            witness_defect: None,
        });
    }
    // pull the first base witness back through evaluation at point 0: the
    // lifted map reads off the value there, applies the witness, and lands
    // in the dual coordinates supported at the same point
    let w = base_space.basis_matrix(0)?;
    let db = alg.dim();
    let dd = lifted_alg.dim();
    let mut lifted = vec![S::from_re(0.0); dd * dd];
    for j in 0..db {
        for q in 0..db {
            lifted[j * dd + q] = w[j * db + q];
        }
    }
    let defect = leibniz_defect(&lifted_alg, &lifted)?;
    let transfer_holds = lifted_dim >= 1 && max_mag(&lifted) > 0.0 && defect <= LEIBNIZ_TOL;
    Ok(TransferReport {
        base_dim,
        lifted_dim,
        transfer_holds,
        witness: Some(lifted),
        witness_defect: Some(defect),
    })
}
