//! JSON models for experiment files.
//!
//! An experiment file names an algebra, the point space it lives over, and a
//! recipe for the test functions handed to the lift routines. The structs
//! here parse that format and build the live objects. Scalars are written as
//! plain numbers in real mode and as `[re, im]` pairs in complex mode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::Value;

use crate::algebra::{AlgebraElement, AlgebraHandle, FiniteBanachAlgebra, NormKind};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarField};
use crate::space::CompactSpaceModel;

/// Algebra description as written in experiment files. Which keys are
/// required depends on `kind`; unknown kinds are rejected at build time so a
/// spec can be parsed before choosing the scalar type.
#[derive(Debug, Clone, Deserialize)]
pub struct AlgebraSpec {
    kind: String,
    n: Option<usize>,
    cayley: Option<Vec<Vec<usize>>>,
    space: Option<SpaceSpec>,
    base: Option<Box<AlgebraSpec>>,
    field: Option<String>,
}

impl AlgebraSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    /// The scalar field the file declares, if it declares one.
    pub fn declared_field(&self) -> Result<Option<ScalarField>> {
        match self.field.as_deref() {
            None => Ok(None),
            Some("real") => Ok(Some(ScalarField::Real)),
            Some("complex") => Ok(Some(ScalarField::Complex)),
            Some(other) => Err(Error::InvalidSpec(format!("unknown field {other:?}"))),
        }
    }

    /// The point space of a vector-valued spec.
    pub fn space(&self) -> Option<&SpaceSpec> {
        self.space.as_ref()
    }

    /// The base algebra of a vector-valued spec.
    pub fn base(&self) -> Option<&AlgebraSpec> {
        self.base.as_deref()
    }

    fn require_n(&self) -> Result<usize> {
        self.n
            .ok_or_else(|| Error::InvalidSpec(format!("algebra kind {:?} needs \"n\"", self.kind)))
    }

    /// Builds the algebra over the scalar type of the run. A `field` tag that
    /// disagrees with `S` is an error rather than a silent cast, at every
    /// nesting level.
    pub fn build<S: Scalar>(&self) -> Result<AlgebraHandle<S>> {
        if let Some(declared) = self.declared_field()? {
            if declared != S::FIELD {
                return Err(Error::InvalidSpec(format!(
                    "file declares the {declared} field but the run uses {}",
                    S::FIELD
                )));
            }
        }
        match self.kind.as_str() {
            "sup" => FiniteBanachAlgebra::sup(self.require_n()?),
            "matrix" => FiniteBanachAlgebra::matrix(self.require_n()?),
            "group" => {
                let cayley = self.cayley.as_ref().ok_or_else(|| {
                    Error::InvalidSpec("group algebras need a \"cayley\" table".to_string())
                })?;
                FiniteBanachAlgebra::group(cayley)
            }
            "truncpoly" => Ok(FiniteBanachAlgebra::truncated_poly()),
            "vector_valued" => {
                let space = self.space.as_ref().ok_or_else(|| {
                    Error::InvalidSpec("vector_valued algebras need a \"space\"".to_string())
                })?;
                let base_spec = self.base.as_ref().ok_or_else(|| {
                    Error::InvalidSpec("vector_valued algebras need a \"base\"".to_string())
                })?;
                let model = space.build()?;
                let base = base_spec.build::<S>()?;
                FiniteBanachAlgebra::vector_valued(model.len(), &base)
            }
            other => Err(Error::InvalidSpec(format!("unknown algebra kind {other:?}"))),
        }
    }
}

/// Point-space description: an evenly spaced segment of a line, or an
/// explicit labelled distance table.
#[derive(Debug, Clone, Deserialize)]
pub struct SpaceSpec {
    kind: String,
    n: Option<usize>,
    spacing: Option<f64>,
    labels: Option<Vec<String>>,
    dist: Option<Vec<Vec<f64>>>,
}

impl SpaceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn build(&self) -> Result<CompactSpaceModel> {
        match self.kind.as_str() {
            "grid" => {
                let n = self
                    .n
                    .ok_or_else(|| Error::InvalidSpec("grid spaces need \"n\"".to_string()))?;
                CompactSpaceModel::grid(n, self.spacing.unwrap_or(1.0))
            }
            "metric" => {
                let labels = self.labels.clone().ok_or_else(|| {
                    Error::InvalidSpec("metric spaces need \"labels\"".to_string())
                })?;
                let dist = self
                    .dist
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSpec("metric spaces need \"dist\"".to_string()))?;
                let n = labels.len();
                if dist.len() != n || dist.iter().any(|row| row.len() != n) {
                    return Err(Error::InvalidSpec(format!(
                        "distance table must be {n} x {n} to match the labels"
                    )));
                }
                let flat = dist.iter().flatten().copied().collect();
                CompactSpaceModel::new(labels, flat)
            }
            other => Err(Error::InvalidSpec(format!("unknown space kind {other:?}"))),
        }
    }
}

/// Reads one scalar from a JSON value: a number, or an `[re, im]` pair. A
/// nonzero imaginary part in a real-mode run is an error, not a truncation.
pub fn scalar_from_value<S: Scalar>(v: &Value) -> Result<S> {
    if let Some(x) = v.as_f64() {
        return Ok(S::from_re(x));
    }
    if let Some(pair) = v.as_array() {
        if let [re, im] = pair.as_slice() {
            if let (Some(re), Some(im)) = (re.as_f64(), im.as_f64()) {
                if S::FIELD == ScalarField::Real && im != 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "entry [{re}, {im}] has an imaginary part but the run is real"
                    )));
                }
                return Ok(S::from_re_im(re, im));
            }
        }
    }
    Err(Error::InvalidSpec(format!(
        "expected a number or an [re, im] pair, got {v}"
    )))
}

/// Writes one scalar as JSON in the convention `scalar_from_value` reads.
pub fn scalar_to_value<S: Scalar>(x: S) -> Value {
    match S::FIELD {
        ScalarField::Real => Value::from(x.re_part()),
        ScalarField::Complex => Value::from(vec![x.re_part(), x.im_part()]),
    }
}

/// Parses a JSON array of scalars.
pub fn coeffs_from_values<S: Scalar>(vals: &[Value]) -> Result<Vec<S>> {
    vals.iter().map(|v| scalar_from_value(v)).collect()
}

/// Serializes a coefficient vector.
pub fn coeffs_to_value<S: Scalar>(coeffs: &[S]) -> Value {
    Value::Array(coeffs.iter().map(|&x| scalar_to_value(x)).collect())
}

/// Recipe for the test functions of an experiment.
///
/// `constant` embeds one base element as a constant function and comes with
/// its own one-term elementary decomposition. `lipschitz-random` draws
/// `count` functions whose coefficient fields each obey the stated Lipschitz
/// bound in the space metric, from a named seed. `elementary` lists explicit
/// decompositions into scalar-function/base-element pairs.
#[derive(Debug, Clone, Deserialize)]
pub struct FunctionSpec {
    kind: String,
    seed: Option<u64>,
    bound: Option<f64>,
    count: Option<usize>,
    coeffs: Option<Vec<Value>>,
    decompositions: Option<Vec<Vec<TermSpec>>>,
}

/// One scalar-function/base-element pair inside an elementary decomposition.
#[derive(Debug, Clone, Deserialize)]
pub struct TermSpec {
    scalar: Vec<Value>,
    base: Vec<Value>,
}

/// Test functions built from a [`FunctionSpec`], with whatever side data the
/// recipe guarantees: decompositions when the recipe is elementary by
/// construction, the seed when randomness was involved.
#[derive(Debug, Clone)]
pub struct GeneratedFunctions<S: Scalar> {
    functions: Vec<AlgebraElement<S>>,
    decompositions: Option<Vec<Vec<(AlgebraElement<S>, AlgebraElement<S>)>>>,
    seed: Option<u64>,
}

impl<S: Scalar> GeneratedFunctions<S> {
    pub fn functions(&self) -> &[AlgebraElement<S>] {
        &self.functions
    }

    pub fn decompositions(&self) -> Option<&[Vec<(AlgebraElement<S>, AlgebraElement<S>)>]> {
        self.decompositions.as_deref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

impl FunctionSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    /// Replaces the recipe's seed, for a command-line override.
    pub fn override_seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    /// Builds the functions in `target`, a vector-valued algebra whose points
    /// are the points of `space`.
    pub fn generate<S: Scalar>(
        &self,
        space: &CompactSpaceModel,
        target: &AlgebraHandle<S>,
    ) -> Result<GeneratedFunctions<S>> {
        let (base, points) = match target.norm_kind() {
            NormKind::VectorValued { base, points } => (base.clone(), *points),
            _ => {
                return Err(Error::Unsupported(
                    "function generation needs a vector-valued target".to_string(),
                ))
            }
        };
        if points != space.len() {
            return Err(Error::SpaceMismatch(format!(
                "target has {points} points, space has {}",
                space.len()
            )));
        }
        match self.kind.as_str() {
            "constant" => {
                let vals = self.coeffs.as_ref().ok_or_else(|| {
                    Error::InvalidSpec("constant functions need \"coeffs\"".to_string())
                })?;
                let a = AlgebraElement::new(&base, coeffs_from_values::<S>(vals)?)?;
                let function = AlgebraElement::constant(target, &a)?;
                let scalars = FiniteBanachAlgebra::<S>::sup(points)?;
                let one = AlgebraElement::new(&scalars, vec![S::from_re(1.0); points])?;
                Ok(GeneratedFunctions {
                    functions: vec![function],
                    decompositions: Some(vec![vec![(one, a)]]),
                    seed: None,
                })
            }
            "lipschitz-random" => {
                let seed = self.seed.ok_or_else(|| {
                    Error::InvalidSpec("lipschitz-random needs \"seed\"".to_string())
                })?;
                let bound = self.bound.unwrap_or(1.0);
                if !(bound.is_finite() && bound >= 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "lipschitz bound must be finite and nonnegative, got {bound}"
                    )));
                }
                let count = self.count.unwrap_or(1);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let functions = (0..count)
                    .map(|_| lipschitz_field(space, target, &base, bound, &mut rng))
                    .collect::<Result<Vec<_>>>()?;
                Ok(GeneratedFunctions {
                    functions,
                    decompositions: None,
                    seed: Some(seed),
                })
            }
            "elementary" => {
                let listed = self.decompositions.as_ref().ok_or_else(|| {
                    Error::InvalidSpec("elementary functions need \"decompositions\"".to_string())
                })?;
                let scalars = FiniteBanachAlgebra::<S>::sup(points)?;
                let mut functions = Vec::with_capacity(listed.len());
                let mut decompositions = Vec::with_capacity(listed.len());
                for terms in listed {
                    let mut sum = AlgebraElement::zero(target);
                    let mut decomp = Vec::with_capacity(terms.len());
                    for term in terms {
                        let f =
                            AlgebraElement::new(&scalars, coeffs_from_values::<S>(&term.scalar)?)?;
                        let b = AlgebraElement::new(&base, coeffs_from_values::<S>(&term.base)?)?;
                        sum = sum.add(&AlgebraElement::scalar_times_base(target, &f, &b)?)?;
                        decomp.push((f, b));
                    }
                    functions.push(sum);
                    decompositions.push(decomp);
                }
                Ok(GeneratedFunctions {
                    functions,
                    decompositions: Some(decompositions),
                    seed: None,
                })
            }
            other => Err(Error::InvalidSpec(format!(
                "unknown generator kind {other:?}"
            ))),
        }
    }
}

/// One random function whose coefficient fields are each `bound`-Lipschitz:
/// coordinate k is offset + dir * bound * dist(x, anchor) for a random
/// anchor point, a random offset, and a random unit direction, so the
/// Lipschitz bound holds exactly by the triangle inequality.
fn lipschitz_field<S: Scalar>(
    space: &CompactSpaceModel,
    target: &AlgebraHandle<S>,
    base: &AlgebraHandle<S>,
    bound: f64,
    rng: &mut ChaCha8Rng,
) -> Result<AlgebraElement<S>> {
    let points = space.len();
    let bd = base.dim();
    let mut coeffs = vec![S::from_re(0.0); points * bd];
    for k in 0..bd {
        let anchor = rng.random_range(0..points);
        let offset = match S::FIELD {
            ScalarField::Real => S::from_re(rng.random_range(-0.5..0.5)),
            ScalarField::Complex => S::from_re_im(
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
            ),
        };
        let dir = match S::FIELD {
            ScalarField::Real => {
                if rng.random_range(0..2) == 0 {
                    S::from_re(1.0)
                } else {
                    S::from_re(-1.0)
                }
            }
            ScalarField::Complex => {
                let theta = rng.random_range(0.0..std::f64::consts::TAU);
                S::from_re_im(theta.cos(), theta.sin())
            }
        };
        for p in 0..points {
            coeffs[p * bd + k] = offset + dir * S::from_re(bound * space.dist(p, anchor));
        }
    }
    AlgebraElement::new(target, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn algebra_specs_build_every_declared_kind() {
        let cases = [
            (r#"{"kind": "sup", "n": 3}"#, 3),
            (r#"{"kind": "matrix", "n": 2}"#, 4),
            (r#"{"kind": "group", "cayley": [[0, 1], [1, 0]]}"#, 2),
            (r#"{"kind": "truncpoly"}"#, 2),
            (
                r#"{"kind": "vector_valued",
                    "space": {"kind": "grid", "n": 3, "spacing": 0.5},
                    "base": {"kind": "sup", "n": 2}}"#,
                6,
            ),
        ];
        for (text, dim) in cases {
            let spec = AlgebraSpec::from_json(text).unwrap();
            assert_eq!(spec.build::<f64>().unwrap().dim(), dim, "spec {text}");
            assert_eq!(spec.build::<Complex64>().unwrap().dim(), dim);
        }

        let bad = AlgebraSpec::from_json(r#"{"kind": "hilbert", "n": 2}"#).unwrap();
        assert!(matches!(bad.build::<f64>(), Err(Error::InvalidSpec(_))));
        let missing = AlgebraSpec::from_json(r#"{"kind": "sup"}"#).unwrap();
        assert!(matches!(missing.build::<f64>(), Err(Error::InvalidSpec(_))));
        assert!(matches!(
            AlgebraSpec::from_json("{\"kind\": 3}"),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn field_tags_are_checked_against_the_run() {
        let spec = AlgebraSpec::from_json(r#"{"kind": "sup", "n": 2, "field": "complex"}"#).unwrap();
        assert!(spec.build::<Complex64>().is_ok());
        assert!(matches!(spec.build::<f64>(), Err(Error::InvalidSpec(_))));

        let nested = AlgebraSpec::from_json(
            r#"{"kind": "vector_valued",
                "space": {"kind": "grid", "n": 2, "spacing": 1.0},
                "base": {"kind": "matrix", "n": 2, "field": "real"}}"#,
        )
        .unwrap();
        assert!(nested.build::<f64>().is_ok());
        assert!(matches!(
            nested.build::<Complex64>(),
            Err(Error::InvalidSpec(_))
        ));

        let odd = AlgebraSpec::from_json(r#"{"kind": "sup", "n": 2, "field": "rational"}"#).unwrap();
        assert!(matches!(odd.build::<f64>(), Err(Error::InvalidSpec(_))));
        assert!(matches!(odd.declared_field(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn space_specs_build_grids_and_metric_tables() {
        let grid = SpaceSpec::from_json(r#"{"kind": "grid", "n": 4, "spacing": 0.25}"#)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(grid.len(), 4);
        assert_eq!(grid.diameter(), 0.75);

        let metric = SpaceSpec::from_json(
            r#"{"kind": "metric",
                "labels": ["a", "b", "c"],
                "dist": [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]]}"#,
        )
        .unwrap()
        .build()
        .unwrap();
        assert_eq!(metric.len(), 3);
        assert_eq!(metric.dist(0, 2), 2.0);
        assert_eq!(metric.label(1), "b");

        let ragged = SpaceSpec::from_json(
            r#"{"kind": "metric", "labels": ["a", "b"], "dist": [[0.0, 1.0]]}"#,
        )
        .unwrap();
        assert!(matches!(ragged.build(), Err(Error::InvalidSpec(_))));
        let odd = SpaceSpec::from_json(r#"{"kind": "torus", "n": 2}"#).unwrap();
        assert!(matches!(odd.build(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn scalar_entries_parse_in_both_fields() {
        let num = serde_json::json!(1.5);
        assert_eq!(scalar_from_value::<f64>(&num).unwrap(), 1.5);
        assert_eq!(
            scalar_from_value::<Complex64>(&num).unwrap(),
            Complex64::new(1.5, 0.0)
        );

        let pair = serde_json::json!([2.0, -1.0]);
        assert_eq!(
            scalar_from_value::<Complex64>(&pair).unwrap(),
            Complex64::new(2.0, -1.0)
        );
        assert!(matches!(
            scalar_from_value::<f64>(&pair),
            Err(Error::InvalidSpec(_))
        ));
        let real_pair = serde_json::json!([2.0, 0.0]);
        assert_eq!(scalar_from_value::<f64>(&real_pair).unwrap(), 2.0);

        let text = serde_json::json!("three");
        assert!(matches!(
            scalar_from_value::<f64>(&text),
            Err(Error::InvalidSpec(_))
        ));

        let z = Complex64::new(0.25, -0.5);
        assert_eq!(scalar_from_value::<Complex64>(&scalar_to_value(z)).unwrap(), z);
        assert_eq!(scalar_to_value(2.0f64), serde_json::json!(2.0));
    }

    #[test]
    fn constant_generator_embeds_base_elements() {
        let space = CompactSpaceModel::grid(3, 0.5).unwrap();
        let base = FiniteBanachAlgebra::<f64>::matrix(2).unwrap();
        let target = FiniteBanachAlgebra::vector_valued(3, &base).unwrap();
        let spec =
            FunctionSpec::from_json(r#"{"kind": "constant", "coeffs": [1.0, 0.0, 0.0, 1.0]}"#)
                .unwrap();
        let generated = spec.generate::<f64>(&space, &target).unwrap();
        assert_eq!(generated.functions().len(), 1);
        assert_eq!(generated.seed(), None);
        let f = &generated.functions()[0];
        for p in 0..3 {
            assert_eq!(f.evaluate_at(p).unwrap().coeffs(), &[1.0, 0.0, 0.0, 1.0]);
        }

        let decomps = generated.decompositions().unwrap();
        assert_eq!(decomps.len(), 1);
        assert_eq!(decomps[0].len(), 1);
        let (ref one, ref a) = decomps[0][0];
        assert_eq!(one.coeffs(), &[1.0, 1.0, 1.0]);
        let recon = AlgebraElement::scalar_times_base(&target, one, a).unwrap();
        assert_eq!(recon.coeffs(), f.coeffs());

        let missing = FunctionSpec::from_json(r#"{"kind": "constant"}"#).unwrap();
        assert!(matches!(
            missing.generate::<f64>(&space, &target),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            spec.generate::<f64>(&space, &base),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn seeded_lipschitz_fields_are_deterministic_and_flat() {
        let space = CompactSpaceModel::grid(6, 0.2).unwrap();
        let base = FiniteBanachAlgebra::<f64>::matrix(2).unwrap();
        let target = FiniteBanachAlgebra::vector_valued(6, &base).unwrap();
        let spec = FunctionSpec::from_json(
            r#"{"kind": "lipschitz-random", "seed": 7, "bound": 1.0, "count": 3}"#,
        )
        .unwrap();

        let first = spec.generate::<f64>(&space, &target).unwrap();
        let second = spec.generate::<f64>(&space, &target).unwrap();
        assert_eq!(first.functions().len(), 3);
        assert_eq!(first.seed(), Some(7));
        assert!(first.decompositions().is_none());
        for (f, g) in first.functions().iter().zip(second.functions()) {
            assert_eq!(f.coeffs(), g.coeffs());
        }

        let other = FunctionSpec::from_json(
            r#"{"kind": "lipschitz-random", "seed": 8, "bound": 1.0, "count": 3}"#,
        )
        .unwrap()
        .generate::<f64>(&space, &target)
        .unwrap();
        assert!(first.functions()[0].coeffs() != other.functions()[0].coeffs());

        for f in first.functions() {
            for p in 0..5 {
                let here = f.evaluate_at(p).unwrap();
                let next = f.evaluate_at(p + 1).unwrap();
                for (a, b) in here.coeffs().iter().zip(next.coeffs()) {
                    assert!((a - b).abs() <= 1.0 * 0.2 + 1e-12);
                }
            }
        }

        let complex = spec.generate::<Complex64>(&space, &target_c(&space)).unwrap();
        let again = spec.generate::<Complex64>(&space, &target_c(&space)).unwrap();
        for (f, g) in complex.functions().iter().zip(again.functions()) {
            assert_eq!(f.coeffs(), g.coeffs());
        }
        for f in complex.functions() {
            for p in 0..5 {
                let here = f.evaluate_at(p).unwrap();
                let next = f.evaluate_at(p + 1).unwrap();
                for (a, b) in here.coeffs().iter().zip(next.coeffs()) {
                    assert!((a - b).norm() <= 1.0 * 0.2 + 1e-12);
                }
            }
        }
    }

    fn target_c(space: &CompactSpaceModel) -> AlgebraHandle<Complex64> {
        let base = FiniteBanachAlgebra::<Complex64>::matrix(2).unwrap();
        FiniteBanachAlgebra::vector_valued(space.len(), &base).unwrap()
    }

    mod parse_properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn scalar_values_round_trip(re in -1e6f64..1e6, im in -1e6f64..1e6) {
                let z = Complex64::new(re, im);
                prop_assert_eq!(
                    scalar_from_value::<Complex64>(&scalar_to_value(z)).unwrap(),
                    z
                );
                prop_assert_eq!(scalar_from_value::<f64>(&scalar_to_value(re)).unwrap(), re);
            }

            #[test]
            fn real_mode_never_truncates_imaginary_parts(
                re in -10.0f64..10.0,
                im in 0.1f64..10.0,
            ) {
                let v = serde_json::json!([re, im]);
                prop_assert!(matches!(
                    scalar_from_value::<f64>(&v),
                    Err(Error::InvalidSpec(_))
                ));
                prop_assert!(matches!(
                    scalar_from_value::<f64>(&serde_json::json!([re, -im])),
                    Err(Error::InvalidSpec(_))
                ));
            }
        }
    }

    #[test]
    fn elementary_generator_reconstructs_its_terms() {
        let space = CompactSpaceModel::grid(3, 0.5).unwrap();
        let base = FiniteBanachAlgebra::<f64>::sup(2).unwrap();
        let target = FiniteBanachAlgebra::vector_valued(3, &base).unwrap();
        let spec = FunctionSpec::from_json(
            r#"{"kind": "elementary",
                "decompositions": [[
                    {"scalar": [1.0, 0.5, 0.0], "base": [1.0, 0.0]},
                    {"scalar": [0.0, 0.5, 1.0], "base": [0.0, 2.0]}
                ]]}"#,
        )
        .unwrap();
        let generated = spec.generate::<f64>(&space, &target).unwrap();
        assert_eq!(generated.functions().len(), 1);
        let f = &generated.functions()[0];
        assert_eq!(f.coeffs(), &[1.0, 0.0, 0.5, 1.0, 0.0, 2.0]);

        let decomps = generated.decompositions().unwrap();
        assert_eq!(decomps[0].len(), 2);
        let mut recon = AlgebraElement::zero(&target);
        for (s, b) in &decomps[0] {
            recon = recon
                .add(&AlgebraElement::scalar_times_base(&target, s, b).unwrap())
                .unwrap();
        }
        assert_eq!(recon.coeffs(), f.coeffs());
    }
}
