use proptest::prelude::*;
use qlsflow::io::{read_snapshot, write_snapshot};
use qlsflow::{Field3D, GridSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn snapshots_round_trip_bitwise(
        half in 0.5..20.0f64,
        n in prop::sample::select(vec![8usize, 10, 16]),
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let grid = GridSpec::new(half, n).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let values: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1e3..1e3)).collect();
        let field = Field3D::new(grid, values).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.bin");
        write_snapshot(&path, &field).unwrap();
        let back = read_snapshot(&path).unwrap();
        prop_assert_eq!(back.grid(), field.grid());
        for (a, b) in back.values().iter().zip(field.values()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
