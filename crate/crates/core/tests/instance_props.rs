//! Property checks for the instance layer: generated instances always
//! validate cleanly, and serialization round-trips exactly.

use cem_core::{generate_synthetic, load_instance, save_instance, validate_instance, GeneratorSpec};

#[test]
fn generated_instances_always_validate() {
    let specs = [
        GeneratorSpec::tiny(),
        GeneratorSpec::small(),
        GeneratorSpec::medium(),
    ];
    for seed in 0..120u64 {
        let spec = &specs[(seed % 3) as usize];
        let inst = generate_synthetic(spec, seed).unwrap();
        let rep = validate_instance(&inst);
        assert!(
            rep.is_empty(),
            "seed {seed}: {:?}",
            rep.violations
        );
    }
}

#[test]
fn serialization_round_trips_across_seeds() {
    let dir = tempfile::tempdir().unwrap();
    for seed in [0u64, 7, 11, 42, 99] {
        let inst = generate_synthetic(&GeneratorSpec::small(), seed).unwrap();
        let sub = dir.path().join(format!("seed{seed}"));
        save_instance(&inst, &sub).unwrap();
        assert_eq!(inst, load_instance(&sub).unwrap(), "seed {seed}");
    }
}
