mod common;

use classmatch::cpm::{solve_cpm, verify_popular_characterization, CpmOutcome};
use classmatch::crmm::solve_crmm;
use classmatch::gen::{generate, GenParams};
use classmatch::oracle::{oracle_is_popular, oracle_popular, oracle_rmm_signature, DEFAULT_CAP};
use classmatch::{is_feasible, signature_of};

#[test]
fn crmm_matches_oracle() {
    let p = common::small_params();
    for seed in 1000..1150 {
        let inst = generate(seed, &p);
        let out = solve_crmm(&inst).unwrap();
        let (best, _) = oracle_rmm_signature(&inst, DEFAULT_CAP).unwrap();
        assert_eq!(out.signature, best, "seed {seed}\n{}", inst.to_text());
        assert!(is_feasible(&inst, &out.matching));
        assert_eq!(signature_of(&inst, &out.matching), out.signature);
    }
}

#[test]
fn crmm_without_classes_matches_oracle() {
    let p = GenParams {
        class_prob: 0.0,
        max_quota: 1,
        ..GenParams::default()
    };
    for seed in 0..100 {
        let inst = generate(seed, &p);
        assert!(inst.classes().is_empty());
        let (best, _) = oracle_rmm_signature(&inst, DEFAULT_CAP).unwrap();
        assert_eq!(solve_crmm(&inst).unwrap().signature, best, "seed {seed}");
    }
}

#[test]
fn cpm_matches_oracle() {
    let mut none = 0;
    for seed in 2000..2120 {
        let inst = generate(seed, &common::many_to_one_params(seed));
        let found = solve_cpm(&inst).unwrap();
        let exists = oracle_popular(&inst, DEFAULT_CAP).unwrap().is_some();
        match &found {
            CpmOutcome::Popular { matching, .. } => {
                assert!(exists, "seed {seed}");
                assert!(oracle_is_popular(&inst, matching, DEFAULT_CAP).unwrap());
                assert!(verify_popular_characterization(&inst, matching).unwrap());
            }
            CpmOutcome::None => {
                assert!(!exists, "seed {seed}\n{}", inst.to_text());
                none += 1;
            }
        }
    }
    assert!(none > 0, "no instance without a popular matching was drawn");
}
