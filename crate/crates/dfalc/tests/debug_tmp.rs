use dfalc::harness::*;
use dfalc::learner::{LossKind, TNorm, TrainConfig};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

#[test]
fn debug_runs() {
    let cfg = TrainConfig {
        loss_kind: LossKind::Hierarchical,
        learning_rate: 2e-4,
        patience: 10,
        max_epochs: 20_000,
        alpha_prime: 0.8,
        tnorm: TNorm::Product,
        seed: 0,
        clamp_evidence: true,
        tolerance: 1e-9,
    };
    let sampler_seed: u64 = std::env::var("SAMPLER_SEED").map(|v| v.parse().unwrap()).unwrap_or(44);
    let mut sampler = ChaCha12Rng::seed_from_u64(sampler_seed);
    let mut baseline = vec![];
    let mut revised = vec![];
    for case in 0..20u64 {
        let individuals = sampler.gen_range(8..=16usize);
        let concepts = sampler.gen_range(5..=8usize);
        let roles = sampler.gen_range(1..=2usize);
        let axioms = sampler.gen_range(10..=20usize);
        let density = sampler.gen_range(0.3..=0.5);
        let (o, ideal, _) = match gen_synthetic_auto(individuals, concepts, roles, axioms, density, 4000 + case) {
            Ok(x) => x,
            Err(e) => { println!("case {case}: GEN FAILED {e}"); continue; }
        };
        for (i, rate) in [0.2, 0.4, 0.6, 0.8].into_iter().enumerate() {
            let mask = MaskSpec::new(rate, 0.2, 0.8, 9000 + 17 * case + i as u64);
            let r = run_mask_revision(&o, &ideal, &mask, &cfg, None).unwrap();
            baseline.push(r.masked_success_crisp);
            revised.push(r.revised_success_crisp);
            if r.revised_success_crisp < 100.0 {
                println!("case {case} rate {rate}: revised {:.1}% loss {:.2e} epochs {}", r.revised_success_crisp, r.final_loss, r.epochs);
            }
        }
    }
    let avg = baseline.iter().sum::<f64>() / baseline.len() as f64;
    let perfect = revised.iter().filter(|&&r| r == 100.0).count();
    let min = revised.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("baseline avg {avg:.1}%, perfect {perfect}/{}, min {min:.1}%", revised.len());
}

#[test]
fn debug_case_9_10() {
    let cfg = TrainConfig {
        loss_kind: LossKind::Hierarchical,
        learning_rate: 2e-4,
        patience: 10,
        max_epochs: 20_000,
        alpha_prime: 0.8,
        tnorm: TNorm::Product,
        seed: 0,
        clamp_evidence: true,
        tolerance: 1e-9,
    };
    let mut sampler = ChaCha12Rng::seed_from_u64(44);
    let mut params = vec![];
    for _ in 0..20u64 {
        let a = sampler.gen_range(8..=16usize);
        let b = sampler.gen_range(5..=8usize);
        let c = sampler.gen_range(1..=2usize);
        let d = sampler.gen_range(10..=20usize);
        let e = sampler.gen_range(0.3..=0.5);
        params.push((a, b, c, d, e));
    }
    use dfalc::grounding::{crispify, crisp_eval_axiom, eval_concept, CrispConfig, ThreeValued};
    use dfalc::normalizer::{normalize, seed_fresh_assertions};
    use dfalc::learner::train;
    for (case, rate, mask_i) in [(9u64, 0.8, 3u64), (10, 0.6, 2)] {
        let (individuals, concepts, roles, axioms, density) = params[case as usize];
        let (o, ideal, _) = gen_synthetic_auto(individuals, concepts, roles, axioms, density, 4000 + case).unwrap();
        let mask = MaskSpec::new(rate, 0.2, 0.8, 9000 + 17 * case + mask_i);
        let masked = mask_grounding(&ideal, &mask).unwrap();
        let nt = normalize(&o);
        let seeded = seed_fresh_assertions(&nt, &masked).unwrap();
        let result = train(seeded, &nt, &cfg).unwrap();
        let ci = crispify(&result.grounding, CrispConfig::new(0.5).unwrap());
        println!("case {case} rate {rate} ({} axioms):", o.tbox.len());
        for ax in &o.tbox {
            if crisp_eval_axiom(&ci, ax).unwrap() == ThreeValued::False {
                let (l, r) = ax.sides();
                let lv = eval_concept(&result.grounding, l).unwrap();
                let rv = eval_concept(&result.grounding, r).unwrap();
                println!("  violated {ax:?}");
                for (i, (x, y)) in lv.iter().zip(&rv).enumerate() {
                    if x > &0.5 && y < &0.5 {
                        println!("    idx {i}: left {x:.6} right {y:.6}");
                    }
                }
            }
        }
    }
}
