use specpot::fit::{fit_curve, FitModel};
use specpot::presets::{Preset, PRESETS};
use specpot::reconstruct::{add_orbital, reconstruct_potential, PotentialCurve};
use specpot::Error;

fn fig(name: &str, order: usize) -> PotentialCurve {
    let pre = Preset::by_name(name).unwrap();
    let p = pre.poly_params().unwrap();
    let spec = pre.basis_spec().unwrap();
    reconstruct_potential(&p, &spec, order, 0, &pre.grid().xs()).unwrap()
}

#[test]
fn curve_json_round_trip_is_bit_identical() {
    for pre in PRESETS {
        let curve = fig(pre.name, 40);
        let text = serde_json::to_string(&curve).unwrap();
        let back: PotentialCurve = serde_json::from_str(&text).unwrap();
        assert_eq!(back.xs.len(), curve.xs.len());
        for (a, b) in back.vs.iter().zip(&curve.vs) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

#[test]
fn reconstruction_is_deterministic() {
    let a = fig("fig3", 80);
    let b = fig("fig3", 80);
    assert!(a
        .vs
        .iter()
        .zip(&b.vs)
        .all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn preset_pipeline_end_to_end() {
    let pre = Preset::by_name("fig2").unwrap();
    let curve = add_orbital(&fig("fig2", 60), 2).unwrap();
    let rep = fit_curve(&curve, &FitModel::new(pre.model, pre.lambda, pre.ell)).unwrap();
    assert!(rep.relative_rms < 1e-12);
    assert!(matches!(
        add_orbital(&curve, 2),
        Err(Error::FlagMismatch(_))
    ));
}
