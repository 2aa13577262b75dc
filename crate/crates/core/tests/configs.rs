use std::path::PathBuf;

use arithdyn::config::{LoadedConfig, RunConfig};
use arithdyn::dynsys::System;
use arithdyn::serde_util::BigIntRepr;

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn shipped_configs_load_and_assert_invariants() {
    for name in ["wehler_222.json", "monomial_fib.json", "power2.json", "bundle_examples.json", "hk4_rank2.json"] {
        let c = LoadedConfig::load(&config_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(c.doc.name, name.trim_end_matches(".json"));
    }
}

#[test]
fn wehler_config_carries_lattice_data() {
    let c = LoadedConfig::load(&config_path("wehler_222.json")).unwrap();
    assert!(matches!(c.system, Some(System::Wehler(_))));
    assert_eq!(c.points.len(), 3);
    let ks = c.ks_options().unwrap();
    assert!(ks.cone.is_some() && ks.form.is_some());
    assert_eq!(c.bundles.len(), 0);
}

#[test]
fn tampered_invariant_is_rejected() {
    let mut doc = RunConfig::read(&config_path("wehler_222.json")).unwrap();
    doc.invariants.char_poly = Some(vec![1, -17, -17, 2]);
    assert!(doc.validate().is_err());
    let mut doc = RunConfig::read(&config_path("wehler_222.json")).unwrap();
    // ([1:1], [1:1], [1:1]) is not on the surface
    let one = || vec![BigIntRepr(1.into()), BigIntRepr(1.into())];
    doc.points.push(vec![one(), one(), one()]);
    assert!(doc.validate().is_err());
}
