//! The five commands, generic over the scalar field. Every command writes
//! its outputs into the resolved directory and returns whether the run
//! passed; callers map that to the exit status.

use std::fs;
use std::path::Path;

use banachlab::algebra::{AlgebraElement, AlgebraHandle, FiniteBanachAlgebra, NormKind};
use banachlab::space::CompactSpaceModel;
use banachlab::{
    coeffs_from_values, coeffs_to_value, derivation_space, exact_diagonal_group,
    exact_diagonal_matrix, exact_diagonal_sup, lift_central, lift_elementary, lift_general,
    norm_exact_lp, verify_diagonal, weak_amenability_transfer_check, weakly_amenable_commutative,
    Complex64, DecomposedTensor, DiagonalCertificate, DiagonalRequest, Error, GeneratedFunctions,
    GrothendieckConstant, Scalar, ScalarField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::experiment::{CliError, CommandKind, Experiment};

pub fn dispatch(exp: &Experiment) -> Result<bool, CliError> {
    match exp.field {
        ScalarField::Real => run::<f64>(exp),
        ScalarField::Complex => run::<Complex64>(exp),
    }
}

fn run<S: Scalar>(exp: &Experiment) -> Result<bool, CliError> {
    fs::create_dir_all(&exp.out_dir)
        .map_err(|e| CliError::input(format!("cannot create output directory: {e}")))?;
    match exp.command {
        CommandKind::BuildDiagonal => build_diagonal::<S>(exp),
        CommandKind::Certify => certify::<S>(exp),
        CommandKind::GrothendieckCheck => grothendieck_check::<S>(exp),
        CommandKind::Derivations => derivations_report::<S>(exp),
        CommandKind::TransferCheck => transfer_check::<S>(exp),
    }
}

fn lib(e: Error) -> CliError {
    CliError::from_lib(e)
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    fs::write(dir.join(name), text)
        .map_err(|e| CliError::input(format!("cannot write {name}: {e}")))
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::input(format!("cannot serialize {name}: {e}")))?;
    text.push('\n');
    write_text(dir, name, &text)
}

/// The generated test functions together with the algebras they live in.
struct FunctionRun<S: Scalar> {
    base: AlgebraHandle<S>,
    target: AlgebraHandle<S>,
    space: CompactSpaceModel,
    generated: GeneratedFunctions<S>,
}

fn function_run<S: Scalar>(exp: &Experiment) -> Result<FunctionRun<S>, CliError> {
    if exp.algebra.kind() == "vector_valued" {
        return Err(CliError::input(
            "give the base algebra under \"algebra\" and the point space under \"space\"",
        ));
    }
    let space_spec = exp
        .space
        .as_ref()
        .ok_or_else(|| CliError::input("this command needs a \"space\""))?;
    let space = space_spec.build().map_err(lib)?;
    let base = exp.algebra.build::<S>().map_err(lib)?;
    let target = FiniteBanachAlgebra::vector_valued(space.len(), &base).map_err(lib)?;
    let spec = exp
        .functions
        .as_ref()
        .ok_or_else(|| CliError::input("this command needs \"test_functions\""))?;
    let generated = spec.generate::<S>(&space, &target).map_err(lib)?;
    Ok(FunctionRun {
        base,
        target,
        space,
        generated,
    })
}

/// Term pairs as stored on disk: an array of [left, right] coefficient
/// vectors.
fn tensor_from_pairs_json<S: Scalar>(
    pairs: &[Value],
    left: &AlgebraHandle<S>,
    right: &AlgebraHandle<S>,
) -> Result<DecomposedTensor<S>, CliError> {
    let mut terms = Vec::with_capacity(pairs.len());
    for (i, pair) in pairs.iter().enumerate() {
        let slots = pair
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| CliError::input(format!("term {i} is not a [left, right] pair")))?;
        let l = slots[0]
            .as_array()
            .ok_or_else(|| CliError::input(format!("term {i}: left side is not an array")))?;
        let r = slots[1]
            .as_array()
            .ok_or_else(|| CliError::input(format!("term {i}: right side is not an array")))?;
        let lc = AlgebraElement::new(left, coeffs_from_values::<S>(l).map_err(lib)?).map_err(lib)?;
        let rc =
            AlgebraElement::new(right, coeffs_from_values::<S>(r).map_err(lib)?).map_err(lib)?;
        terms.push((lc, rc));
    }
    DecomposedTensor::from_pairs(left, right, &terms).map_err(lib)
}

fn diagonal_json<S: Scalar>(u: &DecomposedTensor<S>, seed: Option<u64>) -> Value {
    let terms: Vec<Value> = u
        .terms()
        .iter()
        .map(|(l, r)| json!([coeffs_to_value::<S>(l), coeffs_to_value::<S>(r)]))
        .collect();
    let mut m = Map::new();
    m.insert("field".to_string(), json!(S::FIELD.to_string()));
    m.insert("left_dim".to_string(), json!(u.left_algebra().dim()));
    m.insert("right_dim".to_string(), json!(u.right_algebra().dim()));
    m.insert("terms".to_string(), Value::Array(terms));
    if let Some(s) = seed {
        m.insert("seed".to_string(), json!(s));
    }
    Value::Object(m)
}

fn certificate_table<S: Scalar>(
    command: &str,
    lift: &str,
    cert: &DiagonalCertificate<S>,
    note: Option<&str>,
) -> String {
    let mut t = String::new();
    t.push_str(&format!("command: {command}\n"));
    t.push_str(&format!("field: {}\n", S::FIELD));
    t.push_str(&format!("lift: {lift}\n"));
    t.push_str(&format!("eps: {}\n", cert.eps()));
    if let Some(seed) = cert.seed() {
        t.push_str(&format!("seed: {seed}\n"));
    }
    t.push_str(&format!("pass: {}\n", cert.pass()));
    t.push_str(&format!("norm bound: {}\n", cert.norm_bound()));
    t.push_str(&format!("terms: {}\n", cert.tensor().num_terms()));
    if let Some(s) = cert.schedule() {
        t.push_str(&format!(
            "schedule: N={} L={} M={} c={} radius={}\n",
            s.term_bound, s.piece_norm_bound, s.base_norm, s.c, s.radius
        ));
    }
    if !cert.centers().is_empty() {
        t.push_str(&format!("cover centers: {}\n", cert.centers().join(" ")));
    }
    if let Some(x) = cert.alpha_cancellation_max() {
        t.push_str(&format!("alpha cancellation max: {x}\n"));
    }
    if let Some(errs) = cert.approximation_errors() {
        let listed: Vec<String> = errs.iter().map(f64::to_string).collect();
        t.push_str(&format!("approximation errors: {}\n", listed.join(" ")));
    }
    if let Some(note) = note {
        t.push_str(&format!("note: {note}\n"));
    }
    t.push('\n');
    t.push_str(&format!(
        "{:>7}  {:<24}  {}\n",
        "element", "commutator_bound", "pi_residual"
    ));
    for (i, e) in cert.elements().iter().enumerate() {
        t.push_str(&format!(
            "{i:>7}  {:<24}  {}\n",
            e.commutator_bound, e.pi_residual
        ));
    }
    t
}

fn parsed_certificate<S: Scalar>(cert: &DiagonalCertificate<S>) -> Result<Value, CliError> {
    serde_json::from_str(&cert.to_json())
        .map_err(|e| CliError::input(format!("cannot serialize certificate: {e}")))
}

fn build_diagonal<S: Scalar>(exp: &Experiment) -> Result<bool, CliError> {
    let eps = exp.require_eps()?;
    let run = function_run::<S>(exp)?;
    let (alpha, alpha_source) = match &exp.base_diagonal {
        Some(pairs) => (
            tensor_from_pairs_json::<S>(pairs, &run.base, &run.base)?,
            "experiment file",
        ),
        None => (exact_base_diagonal(exp, &run.base)?, "exact construction"),
    };
    let k = GrothendieckConstant::for_field(S::FIELD);
    let functions = run.generated.functions().to_vec();

    let (mut cert, lift_name) = if exp.central {
        (
            lift_central(&functions, &alpha, eps, &run.space, &k).map_err(lib)?,
            "central",
        )
    } else if let Some(decomps) = run.generated.decompositions() {
        let req = DiagonalRequest::new(eps, functions, alpha, exp.base_residual, false)
            .map_err(lib)?;
        (
            lift_elementary(&req, decomps, &run.space, &k).map_err(lib)?,
            "elementary",
        )
    } else {
        let req = DiagonalRequest::new(eps, functions, alpha, exp.base_residual, false)
            .map_err(lib)?;
        (lift_general(&req, &run.space, &k).map_err(lib)?, "general")
    };
    if let Some(seed) = run.generated.seed() {
        cert.set_seed(Some(seed));
    }

    write_json(&exp.out_dir, "certificate.json", &parsed_certificate(&cert)?)?;
    write_json(
        &exp.out_dir,
        "diagonal.json",
        &diagonal_json(cert.tensor(), run.generated.seed()),
    )?;
    let note = format!("base diagonal from {alpha_source}");
    write_text(
        &exp.out_dir,
        "table.txt",
        &certificate_table("build-diagonal", lift_name, &cert, Some(&note)),
    )?;
    Ok(cert.pass())
}

fn exact_base_diagonal<S: Scalar>(
    exp: &Experiment,
    base: &AlgebraHandle<S>,
) -> Result<DecomposedTensor<S>, CliError> {
    match base.norm_kind() {
        NormKind::Sup => exact_diagonal_sup(base).map_err(lib),
        NormKind::MatrixOperator { .. } => exact_diagonal_matrix(base).map_err(lib),
        NormKind::GroupL1 => exact_diagonal_group(base).map_err(lib),
        _ => Err(CliError::input(format!(
            "no exact diagonal construction for algebra kind {:?}; supply \"base_diagonal\"",
            exp.algebra.kind()
        ))),
    }
}

fn certify<S: Scalar>(exp: &Experiment) -> Result<bool, CliError> {
    let eps = exp.require_eps()?;
    let run = function_run::<S>(exp)?;
    let path = exp.out_dir.join("diagonal.json");
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let stored: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if let Some(field) = stored.get("field").and_then(Value::as_str) {
        if field != S::FIELD.to_string() {
            return Err(CliError::input(format!(
                "stored diagonal is {field} but the run is {}",
                S::FIELD
            )));
        }
    }
    let terms = stored
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::input("diagonal file has no \"terms\""))?;
    let u = tensor_from_pairs_json::<S>(terms, &run.target, &run.target)?;

    let mut cert = verify_diagonal(&u, run.generated.functions(), eps).map_err(lib)?;
    cert.set_seed(run.generated.seed());
    write_json(
        &exp.out_dir,
        "verify_certificate.json",
        &parsed_certificate(&cert)?,
    )?;
    let note = "commutator bounds come from a decomposition estimate without the cover \
                structure; they are conservative for diagonals built by the general lift";
    write_text(
        &exp.out_dir,
        "verify_table.txt",
        &certificate_table("certify", "verify", &cert, Some(note)),
    )?;
    Ok(cert.pass())
}

fn grothendieck_check<S: Scalar>(exp: &Experiment) -> Result<bool, CliError> {
    if S::FIELD != ScalarField::Real {
        return Err(CliError::input(
            "the exact dual program runs in real mode only; pass --field real",
        ));
    }
    let alg = exp.algebra.build::<S>().map_err(lib)?;
    if !matches!(alg.norm_kind(), NormKind::Sup) {
        return Err(CliError::input(
            "grothendieck-check needs a sup-norm algebra",
        ));
    }
    let count = exp.count.unwrap_or(100);
    let seed = exp.seed_override.unwrap_or(0);
    let k = GrothendieckConstant::for_field(S::FIELD);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut rows = String::new();
    rows.push_str(&format!(
        "{:>5}  {:<24}  {:<24}  {}\n",
        "idx", "exact_lp", "decomposition_upper", "grothendieck_bound"
    ));
    let mut pass = true;
    let mut max_lp_minus_bound = f64::NEG_INFINITY;
    let mut max_lp_minus_upper = f64::NEG_INFINITY;
    for i in 0..count {
        let terms = rng.random_range(1..=4);
        let pairs: Vec<_> = (0..terms)
            .map(|_| (random_element(&alg, &mut rng), random_element(&alg, &mut rng)))
            .collect();
        let u = DecomposedTensor::from_pairs(&alg, &alg, &pairs).map_err(lib)?;
        let lp = norm_exact_lp(&u).map_err(lib)?;
        let upper = u.norm_upper().map_err(lib)?;
        let bound = u.grothendieck_bound(&k).map_err(lib)?;
        pass = pass && lp <= bound + 1e-9 && lp <= upper + 1e-9;
        max_lp_minus_bound = max_lp_minus_bound.max(lp - bound);
        max_lp_minus_upper = max_lp_minus_upper.max(lp - upper);
        rows.push_str(&format!("{i:>5}  {lp:<24}  {upper:<24}  {bound}\n"));
    }

    let mut table = String::new();
    table.push_str(&format!(
        "command: grothendieck-check\nfield: {}\ncoordinates: {}\ncount: {count}\nseed: {seed}\nk: {}\n",
        S::FIELD,
        alg.dim(),
        k.value()
    ));
    table.push_str(&format!("pass: {pass}\n\n"));
    table.push_str(&rows);
    write_text(&exp.out_dir, "table.txt", &table)?;

    let report = json!({
        "command": "grothendieck-check",
        "coordinates": alg.dim(),
        "count": count,
        "seed": seed,
        "k": k.value(),
        "max_lp_minus_bound": max_lp_minus_bound,
        "max_lp_minus_upper": max_lp_minus_upper,
        "pass": pass,
    });
    write_json(&exp.out_dir, "report.json", &report)?;
    Ok(pass)
}

fn random_element<S: Scalar>(alg: &AlgebraHandle<S>, rng: &mut ChaCha8Rng) -> AlgebraElement<S> {
    let coeffs = (0..alg.dim())
        .map(|_| match S::FIELD {
            ScalarField::Real => S::from_re(rng.random_range(-1.0..1.0)),
            ScalarField::Complex => {
                S::from_re_im(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            }
        })
        .collect();
    AlgebraElement::new(alg, coeffs).expect("random coefficients are finite")
}

/// The algebra a report runs on: the named algebra itself, or the function
/// algebra over the named space when one is given.
fn report_algebra<S: Scalar>(exp: &Experiment) -> Result<(AlgebraHandle<S>, Value), CliError> {
    match (&exp.space, exp.algebra.kind()) {
        (Some(_), "vector_valued") => Err(CliError::input(
            "give either a vector_valued algebra or a base algebra with a \"space\", not both",
        )),
        (Some(space_spec), _) => {
            let space = space_spec.build().map_err(lib)?;
            let base = exp.algebra.build::<S>().map_err(lib)?;
            let alg = FiniteBanachAlgebra::vector_valued(space.len(), &base).map_err(lib)?;
            let raw = json!({
                "kind": "vector_valued",
                "space": exp.space_raw.clone().unwrap_or(Value::Null),
                "base": exp.algebra_raw.clone(),
            });
            Ok((alg, raw))
        }
        (None, _) => Ok((exp.algebra.build::<S>().map_err(lib)?, exp.algebra_raw.clone())),
    }
}

fn derivations_report<S: Scalar>(exp: &Experiment) -> Result<bool, CliError> {
    let (alg, raw) = report_algebra::<S>(exp)?;
    let ds = derivation_space(&alg).map_err(lib)?;
    let weakly = match weakly_amenable_commutative(&alg) {
        Ok(b) => Some(b),
        Err(Error::NotCommutative) => None,
        Err(e) => return Err(lib(e)),
    };
    let witness = if ds.dim() > 0 {
        let w = ds.basis_matrix(0).map_err(lib)?;
        let d = alg.dim();
        Value::Array(
            (0..d)
                .map(|j| coeffs_to_value::<S>(&w[j * d..(j + 1) * d]))
                .collect(),
        )
    } else {
        Value::Null
    };

    let report = json!({
        "algebra": raw,
        "derivation_dim": ds.dim(),
        "weakly_amenable": weakly,
        "witness": witness,
        "rank_threshold": 1e-9,
    });
    write_json(&exp.out_dir, "report.json", &report)?;

    let weakly_text = match weakly {
        Some(b) => b.to_string(),
        None => "n/a (not commutative)".to_string(),
    };
    let table = format!(
        "command: derivations\nfield: {}\ndimension: {}\nderivation space dim: {}\nweakly amenable: {}\nrank threshold: 1e-9\nwitness: {}\n",
        S::FIELD,
        alg.dim(),
        ds.dim(),
        weakly_text,
        if ds.dim() > 0 { "first basis matrix in report.json" } else { "none" },
    );
    write_text(&exp.out_dir, "table.txt", &table)?;
    Ok(true)
}

fn transfer_check<S: Scalar>(exp: &Experiment) -> Result<bool, CliError> {
    if exp.algebra.kind() == "vector_valued" {
        return Err(CliError::input(
            "give the base algebra under \"algebra\" and the point space under \"space\"",
        ));
    }
    let space_spec = exp
        .space
        .as_ref()
        .ok_or_else(|| CliError::input("transfer-check needs a \"space\""))?;
    let space = space_spec.build().map_err(lib)?;
    let base = exp.algebra.build::<S>().map_err(lib)?;
    let report = weak_amenability_transfer_check(&space, &base).map_err(lib)?;

    let witness = match report.witness() {
        Some(w) => coeffs_to_value::<S>(w),
        None => Value::Null,
    };
    let body = json!({
        "algebra": exp.algebra_raw.clone(),
        "space": exp.space_raw.clone().unwrap_or(Value::Null),
        "base_dim": report.base_dim(),
        "lifted_dim": report.lifted_dim(),
        "transfer_holds": report.transfer_holds(),
        "witness": witness,
        "witness_defect": report.witness_defect(),
        "rank_threshold": 1e-9,
    });
    write_json(&exp.out_dir, "report.json", &body)?;

    let table = format!(
        "command: transfer-check\nfield: {}\npoints: {}\nbase derivation dim: {}\nlifted derivation dim: {}\ntransfer holds: {}\nwitness defect: {}\n",
        S::FIELD,
        space.len(),
        report.base_dim(),
        report.lifted_dim(),
        report.transfer_holds(),
        report
            .witness_defect()
            .map(|d| d.to_string())
            .unwrap_or_else(|| "n/a".to_string()),
    );
    write_text(&exp.out_dir, "table.txt", &table)?;
    Ok(report.transfer_holds())
}
