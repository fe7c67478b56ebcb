use iofpar_demo::{count, inspect, normalize};
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn normalize_reports_steps() {
    let v = parse(normalize(6, "u1 u1"));
    assert_eq!(v["normal_form"], "v1 v2 v3 v4");
    assert!(!v["steps"].as_array().unwrap().is_empty());
    assert_eq!(v["map"], "{5->5, 6->6}");
    assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
    assert!(normalize(6, "u7").is_err());
    assert!(normalize(30, "v1").is_err());
}

#[test]
fn inspect_members_and_non_members() {
    let v = parse(inspect(8, "1->5, 7->7, 8->8"));
    assert_eq!((v["member"].clone(), v["normal_form"].clone()), (Value::Bool(true), "u1 u3".into()));
    let v = parse(inspect(6, "1->2"));
    assert_eq!(v["member"], false);
    assert_eq!(v["failed_condition"], "PARITY");
    assert!(v["normal_form"].is_null());
    let v = parse(inspect(3, ""));
    assert_eq!(v["normal_form"], "v1 v2 v3");
    assert!(inspect(3, "1->9").is_err());
}

#[test]
fn counts_agree() {
    let v = parse(count(5));
    assert_eq!(v["monoid_size"], 52);
    assert_eq!(v["wn_size"], 52);
}
