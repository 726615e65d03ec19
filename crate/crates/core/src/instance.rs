//! Problem instances and the JSON instance file format.
//!
//! An instance bundles the matrix set, the initial vector, the horizon,
//! and the objective. The file schema is a UTF-8 JSON document:
//!
//! ```json
//! {"n":2,"m":2,"K":8,"arithmetic":"exact",
//!  "matrices":[[[1,1],[1,0]],[[1,1],[0,1]]],
//!  "a":[2,1],
//!  "objective":{"kind":"l2sq"}}
//! ```
//!
//! Exact-mode scalars may be integers, decimal literals, or `"p/q"`
//! strings; floats are plain JSON numbers and are emitted as shortest
//! round-trip decimals. `matrices[i][r][c]` is row `r`, column `c` of the
//! matrix with index `i`.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::num::{format_rational, parse_rational, Num, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    Float,
}

/// Convex objective to maximize over the final state.
#[derive(Clone, Debug, PartialEq)]
pub enum Objective<T: Num> {
    /// `c . x`
    Linear(Vector<T>),
    /// `sum |x_i|`
    L1,
    /// `sum x_i^2`
    L2Sq,
    /// `max |x_i|`
    LInf,
    /// Value supplied through a registered callback at solve time.
    External(String),
}

impl<T: Num> Objective<T> {
    /// Positive-homogeneity degree, when known. Licenses per-layer
    /// rescaling: `f(s x) = s^d f(x)` for `s > 0`.
    pub fn homogeneity_degree(&self) -> Option<u32> {
        match self {
            Objective::Linear(_) | Objective::L1 | Objective::LInf => Some(1),
            Objective::L2Sq => Some(2),
            Objective::External(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Instance<T: Num> {
    pub dim: usize,
    pub horizon: usize,
    pub matrices: Vec<Matrix<T>>,
    pub start: Vector<T>,
    pub objective: Objective<T>,
}

impl<T: Num> Instance<T> {
    pub fn new(
        matrices: Vec<Matrix<T>>,
        start: Vector<T>,
        horizon: usize,
        objective: Objective<T>,
    ) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::Schema { field: "matrices".into(), message: "m >= 1 required".into() });
        }
        let dim = start.dim();
        if dim == 0 {
            return Err(Error::Schema { field: "a".into(), message: "n >= 1 required".into() });
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::Schema {
                    field: format!("matrices[{i}]"),
                    message: format!("dimension {} does not match n = {}", m.dim(), dim),
                });
            }
        }
        if let Objective::Linear(c) = &objective {
            if c.dim() != dim {
                return Err(Error::Schema {
                    field: "objective.c".into(),
                    message: format!("dimension {} does not match n = {}", c.dim(), dim),
                });
            }
        }
        Ok(Instance { dim, horizon, matrices, start, objective })
    }

    pub fn num_matrices(&self) -> usize {
        self.matrices.len()
    }

    /// Applies a switching sequence in time order: `seq[0]` is the matrix
    /// applied first, so the result is `T_{k-1} ... T_0 a`.
    pub fn apply_sequence(&self, seq: &[usize]) -> Result<Vector<T>> {
        let mut x = self.start.clone();
        for &idx in seq {
            let m = self
                .matrices
                .get(idx)
                .ok_or(Error::IndexOutOfRange { index: idx, m: self.matrices.len() })?;
            x = m.mat_vec(&x)?;
        }
        Ok(x)
    }
}

/// A parsed instance in either scalar domain.
#[derive(Clone, Debug)]
pub enum AnyInstance {
    Exact(Instance<Rational>),
    Float(Instance<f64>),
}

impl AnyInstance {
    pub fn arithmetic(&self) -> Arithmetic {
        match self {
            AnyInstance::Exact(_) => Arithmetic::Exact,
            AnyInstance::Float(_) => Arithmetic::Float,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyInstance::Exact(i) => i.dim,
            AnyInstance::Float(i) => i.dim,
        }
    }

    pub fn horizon(&self) -> usize {
        match self {
            AnyInstance::Exact(i) => i.horizon,
            AnyInstance::Float(i) => i.horizon,
        }
    }

    pub fn num_matrices(&self) -> usize {
        match self {
            AnyInstance::Exact(i) => i.num_matrices(),
            AnyInstance::Float(i) => i.num_matrices(),
        }
    }
}

fn schema_err(field: &str, message: impl Into<String>) -> Error {
    Error::Schema { field: field.to_string(), message: message.into() }
}

fn get_usize(obj: &Map<String, Value>, field: &str) -> Result<usize> {
    let v = obj.get(field).ok_or_else(|| schema_err(field, "missing field"))?;
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| schema_err(field, format!("expected a non-negative integer, got {v}")))
}

fn parse_scalar_exact(v: &Value, field: &str) -> Result<Rational> {
    match v {
        Value::String(s) => {
            parse_rational(s).ok_or_else(|| schema_err(field, format!("invalid rational {s:?}")))
        }
        Value::Number(n) => parse_rational(&n.to_string())
            .ok_or_else(|| schema_err(field, format!("invalid number {n}"))),
        other => Err(schema_err(field, format!("expected number or \"p/q\" string, got {other}"))),
    }
}

fn parse_scalar_float(v: &Value, field: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| schema_err(field, format!("number {n} not representable as f64"))),
        Value::String(_) => Err(Error::MixedArithmetic(format!(
            "{field}: \"p/q\" scalars are only allowed in exact mode"
        ))),
        other => Err(schema_err(field, format!("expected number, got {other}"))),
    }
}

fn parse_vector<T: Num>(
    v: &Value,
    field: &str,
    parse: &dyn Fn(&Value, &str) -> Result<T>,
) -> Result<Vector<T>> {
    let arr = v
        .as_array()
        .ok_or_else(|| schema_err(field, "expected an array"))?;
    let mut out = Vec::with_capacity(arr.len());
    for (i, e) in arr.iter().enumerate() {
        out.push(parse(e, &format!("{field}[{i}]"))?);
    }
    Ok(Vector::new(out))
}

fn parse_typed<T: Num>(
    obj: &Map<String, Value>,
    parse: &dyn Fn(&Value, &str) -> Result<T>,
) -> Result<Instance<T>> {
    let n = get_usize(obj, "n")?;
    let m = get_usize(obj, "m")?;
    let horizon = get_usize(obj, "K")?;
    if n == 0 {
        return Err(schema_err("n", "n >= 1 required"));
    }

    let mats_val = obj
        .get("matrices")
        .and_then(Value::as_array)
        .ok_or_else(|| schema_err("matrices", "expected an array of matrices"))?;
    if mats_val.len() != m {
        return Err(schema_err("matrices", format!("m = {m} but {} matrices given", mats_val.len())));
    }
    let mut matrices = Vec::with_capacity(m);
    for (i, mat) in mats_val.iter().enumerate() {
        let rows = mat
            .as_array()
            .ok_or_else(|| schema_err(&format!("matrices[{i}]"), "expected an array of rows"))?;
        if rows.len() != n {
            return Err(schema_err(
                &format!("matrices[{i}]"),
                format!("{} rows, expected n = {n}", rows.len()),
            ));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            let field = format!("matrices[{i}][{r}]");
            let row = parse_vector(row, &field, parse)?;
            if row.dim() != n {
                return Err(schema_err(&field, format!("{} columns, expected n = {n}", row.dim())));
            }
            entries.extend(row.entries().iter().cloned());
        }
        matrices.push(Matrix::new(n, entries)?);
    }

    let a = parse_vector(
        obj.get("a").ok_or_else(|| schema_err("a", "missing field"))?,
        "a",
        parse,
    )?;
    if a.dim() != n {
        return Err(schema_err("a", format!("dimension {} does not match n = {n}", a.dim())));
    }

    let obj_val = obj
        .get("objective")
        .and_then(Value::as_object)
        .ok_or_else(|| schema_err("objective", "expected an object"))?;
    let kind = obj_val
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| schema_err("objective.kind", "expected a string"))?;
    let objective = match kind {
        "linear" => {
            let c = obj_val
                .get("c")
                .ok_or_else(|| schema_err("objective.c", "linear objective requires c"))?;
            Objective::Linear(parse_vector(c, "objective.c", parse)?)
        }
        "l1" => Objective::L1,
        "l2sq" => Objective::L2Sq,
        "linf" => Objective::LInf,
        other => return Err(schema_err("objective.kind", format!("unknown kind {other:?}"))),
    };

    Instance::new(matrices, a, horizon, objective)
}

/// Parses an instance file. Schema violations carry the offending field
/// path; JSON syntax errors carry serde's line/column diagnostics.
pub fn parse_instance(text: &str) -> Result<AnyInstance> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| schema_err("<document>", e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| schema_err("<document>", "expected a JSON object"))?;
    let arithmetic = obj
        .get("arithmetic")
        .and_then(Value::as_str)
        .ok_or_else(|| schema_err("arithmetic", "expected \"exact\" or \"float\""))?;
    match arithmetic {
        "exact" => Ok(AnyInstance::Exact(parse_typed(obj, &parse_scalar_exact)?)),
        "float" => Ok(AnyInstance::Float(parse_typed(obj, &parse_scalar_float)?)),
        other => Err(schema_err("arithmetic", format!("unknown mode {other:?}"))),
    }
}

fn emit_scalar_exact(r: &Rational) -> Value {
    if r.is_integer() {
        if let Ok(i) = i64::try_from(r.numer().clone()) {
            return json!(i);
        }
    }
    Value::String(format_rational(r))
}

fn emit_typed<T: Num>(inst: &Instance<T>, arithmetic: &str, emit: &dyn Fn(&T) -> Value) -> String {
    let vec_val = |v: &Vector<T>| Value::Array(v.entries().iter().map(emit).collect());
    let mut root = Map::new();
    root.insert("n".into(), json!(inst.dim));
    root.insert("m".into(), json!(inst.num_matrices()));
    root.insert("K".into(), json!(inst.horizon));
    root.insert("arithmetic".into(), json!(arithmetic));
    let mats: Vec<Value> = inst
        .matrices
        .iter()
        .map(|m| {
            Value::Array(
                (0..m.dim())
                    .map(|r| Value::Array(m.row(r).iter().map(emit).collect()))
                    .collect(),
            )
        })
        .collect();
    root.insert("matrices".into(), Value::Array(mats));
    root.insert("a".into(), vec_val(&inst.start));
    let objective = match &inst.objective {
        Objective::Linear(c) => json!({"kind": "linear", "c": vec_val(c)}),
        Objective::L1 => json!({"kind": "l1"}),
        Objective::L2Sq => json!({"kind": "l2sq"}),
        Objective::LInf => json!({"kind": "linf"}),
        Objective::External(name) => json!({"kind": "external", "name": name}),
    };
    root.insert("objective".into(), objective);
    Value::Object(root).to_string()
}

/// Serializes an instance so that `parse_instance(emit_instance(i))`
/// yields an equal instance.
pub fn emit_instance(inst: &AnyInstance) -> String {
    match inst {
        AnyInstance::Exact(i) => emit_typed(i, "exact", &emit_scalar_exact),
        AnyInstance::Float(i) => emit_typed(i, "float", &|v| json!(v)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib_pair() -> Instance<Rational> {
        Instance::new(
            vec![
                Matrix::from_rows_i64(&[&[1, 1], &[1, 0]]),
                Matrix::from_rows_i64(&[&[1, 1], &[0, 1]]),
            ],
            Vector::from_i64(&[2, 1]),
            8,
            Objective::L2Sq,
        )
        .unwrap()
    }

    #[test]
    fn minimal_instance_round_trips() {
        let text = r#"{"n":1,"m":1,"K":0,"arithmetic":"exact","matrices":[[[1]]],"a":[1],"objective":{"kind":"l1"}}"#;
        let inst = parse_instance(text).unwrap();
        let emitted = emit_instance(&inst);
        let again = parse_instance(&emitted).unwrap();
        assert_eq!(emit_instance(&again), emitted);
    }

    #[test]
    fn exact_round_trip_preserves_rationals() {
        let inst = AnyInstance::Exact(Instance::new(
            vec![Matrix::new(1, vec![parse_rational("2/3").unwrap()]).unwrap()],
            Vector::new(vec![parse_rational("-7/5").unwrap()]),
            3,
            Objective::L1,
        )
        .unwrap());
        let text = emit_instance(&inst);
        match parse_instance(&text).unwrap() {
            AnyInstance::Exact(i) => {
                assert_eq!(*i.start.get(0), parse_rational("-7/5").unwrap());
                assert_eq!(*i.matrices[0].get(0, 0), parse_rational("2/3").unwrap());
            }
            _ => panic!("expected exact"),
        }
    }

    #[test]
    fn negative_horizon_is_schema_error() {
        let text = r#"{"n":1,"m":1,"K":-1,"arithmetic":"exact","matrices":[[[1]]],"a":[1],"objective":{"kind":"l1"}}"#;
        match parse_instance(text) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "K"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn rational_string_in_float_mode_rejected() {
        let text = r#"{"n":1,"m":1,"K":0,"arithmetic":"float","matrices":[[["1/2"]]],"a":[1],"objective":{"kind":"l1"}}"#;
        assert!(matches!(parse_instance(text), Err(Error::MixedArithmetic(_))));
    }

    #[test]
    fn apply_sequence_fibonacci() {
        let inst = fib_pair();
        // B^k a = (2+k, 1)
        assert_eq!(inst.apply_sequence(&[1; 8]).unwrap(), Vector::from_i64(&[10, 1]));
        // A^8 a follows the Fibonacci recurrence from (2,1)
        assert_eq!(inst.apply_sequence(&[0; 8]).unwrap(), Vector::from_i64(&[89, 55]));
        assert_eq!(inst.apply_sequence(&[]).unwrap(), Vector::from_i64(&[2, 1]));
    }

    #[test]
    fn apply_sequence_index_out_of_range() {
        let inst = fib_pair();
        assert!(matches!(
            inst.apply_sequence(&[0, 2]),
            Err(Error::IndexOutOfRange { index: 2, m: 2 })
        ));
    }

    #[test]
    fn composition_law() {
        let inst = fib_pair();
        let s1 = [0, 1, 1, 0];
        let s2 = [1, 0, 0];
        let whole: Vec<usize> = s1.iter().chain(s2.iter()).copied().collect();
        let mid = Instance::new(
            inst.matrices.clone(),
            inst.apply_sequence(&s1).unwrap(),
            0,
            Objective::L2Sq,
        )
        .unwrap();
        assert_eq!(inst.apply_sequence(&whole).unwrap(), mid.apply_sequence(&s2).unwrap());
    }
}
