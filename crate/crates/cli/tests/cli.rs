use std::process::{Command, Output};

use serde_json::Value;

use purity_cli::commands::Figure1Row;
use purity_cli::CliError;

fn purity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_purity")).args(args).env_remove("PURITY_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema() -> Value {
    serde_json::from_str(include_str!("../schema/output.schema.json")).unwrap()
}

/// Subset of JSON Schema used by the shipped schema: `type`, `enum`, `pattern`
/// (anchored digit patterns only), `minimum`, `required`, `properties`,
/// `additionalProperties: false`, `items`, `oneOf` and local `$ref`.
fn validate(v: &Value, s: &Value, root: &Value) -> Result<(), String> {
    if let Some(r) = s.get("$ref").and_then(Value::as_str) {
        let name = r.strip_prefix("#/$defs/").ok_or("only local refs")?;
        return validate(v, &root["$defs"][name], root);
    }
    if let Some(alts) = s.get("oneOf").and_then(Value::as_array) {
        let ok = alts.iter().filter(|a| validate(v, a, root).is_ok()).count();
        return if ok == 1 { Ok(()) } else { Err(format!("{ok} oneOf branches match")) };
    }
    if let Some(t) = s.get("type") {
        let types: Vec<&str> = match t {
            Value::String(x) => vec![x.as_str()],
            Value::Array(xs) => xs.iter().filter_map(Value::as_str).collect(),
            _ => return Err("bad type".into()),
        };
        let matches = |t: &str| match t {
            "null" => v.is_null(),
            "boolean" => v.is_boolean(),
            "integer" => v.is_i64() || v.is_u64(),
            "number" => v.is_number(),
            "string" => v.is_string(),
            "array" => v.is_array(),
            "object" => v.is_object(),
            _ => false,
        };
        if !types.iter().any(|t| matches(t)) {
            return Err(format!("{v} is not {types:?}"));
        }
    }
    if let Some(e) = s.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            return Err(format!("{v} not in enum"));
        }
    }
    if let (Some(p), Some(x)) = (s.get("pattern").and_then(Value::as_str), v.as_str()) {
        assert_eq!(p, "^-?[0-9]+$", "validator only knows the integer pattern");
        let digits = x.strip_prefix('-').unwrap_or(x);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("{x} is not an integer string"));
        }
    }
    if let (Some(min), Some(x)) = (s.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            return Err(format!("{x} < {min}"));
        }
    }
    if let Some(obj) = v.as_object() {
        for r in s.get("required").and_then(Value::as_array).into_iter().flatten() {
            if !obj.contains_key(r.as_str().unwrap()) {
                return Err(format!("missing {r}"));
            }
        }
        let props = s.get("properties").and_then(Value::as_object);
        for (k, val) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(ps) => validate(val, ps, root).map_err(|e| format!("{k}: {e}"))?,
                None if s.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    return Err(format!("unexpected property {k}"))
                }
                None => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (s.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            validate(x, items, root).map_err(|e| format!("[{i}]: {e}"))?;
        }
    }
    Ok(())
}

fn check_schema(out: &str) {
    let v: Value = serde_json::from_str(out).unwrap();
    let s = schema();
    validate(&v, &s, &s).unwrap();
}

#[test]
fn moments_examples() {
    let o = purity(&["moments", "--m", "2", "--n", "2", "--k", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("7/8"));
    assert_eq!(stdout(&purity(&["moments", "--m", "1", "--n", "9", "--k", "3"])).lines().next(), Some("1"));
    let o = purity(&["moments", "--m", "2", "--n", "2", "--k", "3", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["numerator"], "363");
    assert_eq!(v["denominator"], "512");
    assert_eq!(v["decimal"], "0.708984375000000000000000000000");
    check_schema(&stdout(&o));
    let o = purity(&["moments", "--m", "3", "--alpha", "7/3", "--k", "1", "--format", "json"]);
    check_schema(&stdout(&o));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["moments", "--m", "2", "--n", "3", "--alpha", "1/2", "--k", "1"],
        vec!["moments", "--m", "2", "--n", "2", "--k", "4"],
        vec!["moments", "--m", "3", "--n", "2", "--k", "1"],
        vec!["moments", "--m", "2", "--alpha", "-1", "--k", "1"],
        vec!["moments", "--m", "2", "--alpha", "x/2", "--k", "1"],
        vec!["mc", "--m", "3", "--alpha", "7/3", "--method", "matrix", "--samples", "10"],
        vec!["kernels", "--m", "2", "--n", "2", "--points", "-1"],
    ] {
        assert_eq!(purity(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn exit_code_contract() {
    assert_eq!(CliError::Verification(String::new()).exit_code(), 1);
    assert_eq!(CliError::Usage(String::new()).exit_code(), 2);
    assert_eq!(CliError::Precision(String::new()).exit_code(), 3);
}

#[test]
fn verify_suites() {
    let o = purity(&["verify", "--suite", "recurrence", "--m-max", "4", "--format", "json"]);
    assert!(o.status.success());
    check_schema(&stdout(&o));
    let o = purity(&["verify", "--suite", "identities", "--m-max", "4"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = purity(&["verify", "--suite", "appendix", "--m", "2", "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["suites"][0]["checks"].as_array().unwrap().len(), 12);
    // a 6-bit rule cannot meet the appendix tolerance
    let o = purity(&["verify", "--suite", "appendix", "--m", "2", "--quad-bits", "6"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn mc_reports() {
    let o = purity(&["mc", "--alpha", "7/3", "--m", "3", "--method", "mcmc", "--samples", "20000", "--format", "json"]);
    assert!(o.status.success());
    check_schema(&stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["estimates"][0]["exact_numerator"], "367");
    assert!(v["estimates"][0]["z"].as_f64().unwrap().abs() < 4.0);
    let a = purity(&["mc", "--m", "2", "--n", "4", "--method", "matrix", "--samples", "100"]);
    let b = purity(&["mc", "--m", "2", "--n", "4", "--method", "matrix", "--samples", "100", "--threads", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("k,exact_num,exact_den,exact_float,mean,stderr,ess,z\n"));
    let o = purity(&["mc", "--m", "4", "--n", "8", "--samples", "2000"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: importance-weight ESS"));
}

#[test]
fn figure1_table() {
    let o = purity(&["figure1", "--m-list", "1,2,3,4,5,6", "--samples", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("m,n,k,exact_num,exact_den,exact_float,mc_mean,mc_stderr,samples,seed\n"));
    let rows: Vec<Figure1Row> = csv::Reader::from_reader(text.as_bytes()).deserialize().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6 * 2 * 3);
    for r in rows.iter().filter(|r| r.m == 1) {
        assert_eq!((r.exact_num.as_str(), r.exact_den.as_str()), ("1", "1"));
    }
    for r in rows.iter().filter(|r| r.m > 1 && r.n == r.m) {
        let wide = rows.iter().find(|s| s.m == r.m && s.n == 2 * r.m && s.k == r.k).unwrap();
        assert!(wide.exact_float < r.exact_float);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).unwrap();
    }
    assert_eq!(String::from_utf8(w.into_inner().unwrap()).unwrap(), text);

    let o = purity(&["figure1", "--m-list", "2", "--k-list", "1", "--samples", "2000", "--seed", "9"]);
    let rows: Vec<Figure1Row> = csv::Reader::from_reader(o.stdout.as_slice()).deserialize().map(Result::unwrap).collect();
    assert!(rows.iter().all(|r| r.mc_mean.is_some() && r.samples == 2000 && r.seed == 9));
}

#[test]
fn kernel_table() {
    let o = purity(&["kernels", "--m", "2", "--n", "2", "--points", "0.7"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);

    let o = purity(&["kernels", "--m", "3", "--alpha", "3/2", "--x-min", "0.01", "--x-max", "30", "--count", "4", "--log"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name| header.iter().position(|h| *h == name).unwrap();
    let mut rows = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[col("h1_x")] >= 0.0);
        let (s, l) = (v[col("K00_sym")], v[col("l1x_l1y")]);
        assert!((s - l).abs() <= 1e-12 * s.abs().max(1.0), "{s} vs {l}");
        rows += 1;
    }
    assert_eq!(rows, 16);

    let o = purity(&["kernels", "--m", "2", "--n", "3", "--count", "2", "--layout", "long"]);
    assert_eq!(stdout(&o).lines().next(), Some("x,y,kernel_ab,value"));
    assert_eq!(stdout(&o).lines().count(), 1 + 4 * 4);
}
