use gevrey_nets_wasm::{assoc_curve_json, mollifier_json, wavefront_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn assoc_curve_is_monotone_and_saturates() {
    let v = parse(assoc_curve_json(2.0, 0.1, 1e8, 50).unwrap());
    let m: Vec<Option<f64>> = serde_json::from_value(v["m"].clone()).unwrap();
    assert_eq!(m.len(), 50);
    assert_eq!(m[0], Some(0.0));
    let finite: Vec<f64> = m.iter().flatten().cloned().collect();
    assert!(finite.windows(2).all(|w| w[1] >= w[0]));
    assert!(m.last().unwrap().is_none());
    assert!(assoc_curve_json(2.0, 10.0, 1.0, 50).is_err());
}

#[test]
fn mollifier_meets_its_contract() {
    let v = parse(mollifier_json(1.5, 4096).unwrap());
    assert!(v["report"]["plateau_deviation"].as_f64().unwrap() <= 1e-6);
    assert!(v["report"]["mass_defect"].as_f64().unwrap() <= 1e-6);
    let psi: Vec<f64> = serde_json::from_value(v["psi"].clone()).unwrap();
    assert!(psi.iter().all(|p| (-1e-12..=1.0 + 1e-12).contains(p)));
    assert!(mollifier_json(1.5, 1000).is_err());
}

#[test]
fn heaviside_is_singular_only_at_the_jump() {
    let v = parse(wavefront_json("heaviside", false, &[-2.0, 0.0, 2.0], 0.5).unwrap());
    let windows = v["windows"].as_array().unwrap();
    assert_eq!(windows.len(), 3);
    for w in windows {
        let singular = w["verdicts"].as_array().unwrap().iter().all(|s| s == "singular");
        let regular = w["verdicts"].as_array().unwrap().iter().all(|s| s == "regular");
        if w["center"] == 0.0 {
            assert!(singular, "{w}");
        } else {
            assert!(regular, "{w}");
        }
    }
    assert!(wavefront_json("nonsense", false, &[0.0], 0.5).is_err());
}
