use pairwl_web::{distinguish_json, fixtures_json, refine_json};

#[test]
fn refine_cycle() {
    let v = refine_json("0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n", "WL1", "", true).unwrap();
    assert_eq!(v["stable_at"], 1);
    assert_eq!(v["nodes"].as_array().unwrap().len(), 6);
    let local = refine_json("0 1\n1 2\n2 3\n3 0\n", "FWL2_Local", "0,2", true).unwrap();
    assert!(local["pairs"].as_array().unwrap().len() >= 8);
    assert!(local["target_colors"].is_array());
}

#[test]
fn distinguish_rows_cover_all_tests() {
    let rows = distinguish_json("0 1\n", "0,1", "0 1\n2 3\n", "0,1", true).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0]["test"], "WL1");
    assert!(rows[0]["distinguished_at"].is_null());
    assert_eq!(rows[2]["test"], "WL2");
    assert_eq!(rows[2]["distinguished_at"], 1);
}

#[test]
fn fixtures_agree() {
    let v = fixtures_json();
    for f in v.as_array().unwrap() {
        for row in f["verdicts"].as_array().unwrap() {
            assert_eq!(row["agrees"], true, "{} {}", f["name"], row["test"]);
        }
    }
}

#[test]
fn bad_input_is_reported() {
    assert!(refine_json("0 x\n", "WL1", "", true).is_err());
    assert!(refine_json("0 1\n", "NOPE", "", true).is_err());
    assert!(refine_json("0 1\n", "WL1", "0,5", true).is_err());
    assert!(distinguish_json("0 1\n", "", "0 1\n", "0,1", true).is_err());
    assert!(refine_json("0 99\n", "WL1", "", true).unwrap_err().contains("at most"));
}
