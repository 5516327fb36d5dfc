//! Property tests of the environment transition.

mod common;

use hmes::env::{decode_action, step, EnvConfig, HmesEnv};
use hmes::data::{generate_synthetic, GeneratorConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn levels_stay_in_bounds_over_a_day(seed in any::<u64>(), day_seed in 0u64..1000) {
        let cfg = EnvConfig::default();
        let d = &cfg.devices;
        let set = generate_synthetic(&GeneratorConfig { seed: day_seed, ..Default::default() }, 1).unwrap();
        let mut env = HmesEnv::new(cfg, &set.days[0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while !env.is_done() {
            let (out, _) = env.step(&common::random_action(&mut rng)).unwrap();
            let s = &out.next_state;
            prop_assert!((d.ess.s_min..=d.ess.s_max).contains(&s.s_ess));
            prop_assert!((d.tes.s_min..=d.tes.s_max).contains(&s.s_tes));
            prop_assert!((d.ces.s_min..=d.ces.s_max).contains(&s.s_ces));
            prop_assert!((d.hss.s_min..=d.hss.s_max).contains(&s.s_hss));
            prop_assert!(s.el_overload >= 0.0);
        }
    }

    #[test]
    fn storage_flows_are_complementary(seed in any::<u64>()) {
        let cfg = EnvConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = common::random_state(&mut rng, &cfg);
        let d = decode_action(&s, &common::random_action(&mut rng), &cfg);
        for f in [d.ess, d.tes, d.ces, d.hss] {
            prop_assert!(f.ch >= 0.0 && f.dis <= 0.0);
            prop_assert_eq!(f.ch * f.dis, 0.0);
        }
    }

    #[test]
    fn identical_inputs_give_identical_outcomes(seed in any::<u64>()) {
        let cfg = EnvConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = common::random_state(&mut rng, &cfg);
        let a = common::random_action(&mut rng);
        let next = common::random_record(&mut rng);
        prop_assert_eq!(step(&s, &a, next, &cfg), step(&s, &a, next, &cfg));
    }
}
