use prsbench::attacks::{
    bayes_decision, collect_records, distinguishing_experiment, np_oracle_key_search, BayesOptions,
    CollisionSampler, DistinguishOptions,
};
use prsbench::clifford::{measure_in_clifford_basis, sample_uniform_clifford, tableau_to_unitary};
use prsbench::ensembles::{make_prs_family, PrfFamily, PrsKind};
use prsbench::haar::sample_haar_state;
use prsbench::qcore::{apply, PureState, C64};
use prsbench::shadows::{estimate_fidelity, ShadowSet};
use prsbench::stats::binomial_consistent;
use prsbench::RandomStream;

fn orthogonal_to(psi: &PureState, rng: &mut RandomStream) -> PureState {
    let chi = sample_haar_state(psi.n(), rng).unwrap();
    let overlap = psi.inner(&chi).unwrap();
    let amps: Vec<C64> = chi.amplitudes().iter().zip(psi.amplitudes()).map(|(c, p)| c - p * overlap).collect();
    PureState::normalized(amps).unwrap()
}

#[test]
fn shadow_estimates_track_fidelity_one_and_zero() {
    let mut rng = RandomStream::from_seed(400);
    let (mut same, mut orth) = (Vec::new(), Vec::new());
    for _ in 0..100 {
        let psi = sample_haar_state(4, &mut rng).unwrap();
        let chi = orthogonal_to(&psi, &mut rng);
        let shadows = ShadowSet::collect(&psi, 500, &mut rng).unwrap();
        same.push(estimate_fidelity(&shadows, &psi, 10).unwrap());
        orth.push(estimate_fidelity(&shadows, &chi, 10).unwrap());
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!((mean(&same) - 1.0).abs() < 0.05, "mean at fidelity 1: {}", mean(&same));
    assert!(mean(&orth).abs() < 0.05, "mean at fidelity 0: {}", mean(&orth));
    assert!(same.iter().filter(|e| (*e - 1.0).abs() < 0.3).count() >= 95);
    assert!(orth.iter().filter(|e| e.abs() < 0.3).count() >= 95);
}

#[test]
fn shadow_estimate_of_a_mixture_is_linear() {
    // Records from two states in equal proportion estimate the average fidelity.
    let mut rng = RandomStream::from_seed(401);
    let a = sample_haar_state(3, &mut rng).unwrap();
    let b = sample_haar_state(3, &mut rng).unwrap();
    let phi = sample_haar_state(3, &mut rng).unwrap();
    let mut records = ShadowSet::collect(&a, 20_000, &mut rng).unwrap().records;
    records.extend(ShadowSet::collect(&b, 20_000, &mut rng).unwrap().records);
    let mixed = ShadowSet::new(3, records, "mixture").unwrap();
    let want = 0.5 * (prsbench::qcore::fidelity(&a, &phi).unwrap() + prsbench::qcore::fidelity(&b, &phi).unwrap());
    let got = estimate_fidelity(&mixed, &phi, 1).unwrap();
    assert!((got - want).abs() < 0.03, "{got} vs {want}");
}

#[test]
fn zero_copies_give_a_coin_flip() {
    let mut rng = RandomStream::from_seed(402);
    let family = make_prs_family(PrsKind::HaarTable, 3, 8, &mut rng).unwrap();
    let report = distinguishing_experiment(&family, 0, 2000, &DistinguishOptions::default(), &rng).unwrap();
    assert!((report.bayes_success - 0.5).abs() < 4.0 * 0.5 / (2000f64).sqrt(), "{}", report.bayes_success);
    assert!(report.outcomes.iter().all(|o| o.bayes == 1 && o.shadow == 1));
}

#[test]
fn bayes_dominates_shadow_when_hidden_bit_is_zero() {
    let mut rng = RandomStream::from_seed(403);
    let family = make_prs_family(PrsKind::HaarTable, 4, 8, &mut rng).unwrap();
    let opts = DistinguishOptions { forced_hidden: Some(0), ..DistinguishOptions::default() };
    let report = distinguishing_experiment(&family, 12, 300, &opts, &rng).unwrap();
    assert!(report.outcomes.iter().all(|o| o.hidden == 0));
    assert!(report.bayes_success >= report.shadow_success - 0.03, "{report:?}");
}

#[test]
fn posterior_is_normalized() {
    let mut rng = RandomStream::from_seed(404);
    let family = make_prs_family(PrsKind::HaarTable, 3, 4, &mut rng).unwrap();
    let psi = family.state(2).unwrap();
    let records = collect_records(&psi, 6, &mut rng).unwrap();
    let out = bayes_decision(&records, &family, &BayesOptions::default(), &mut rng).unwrap();
    assert!((out.p0 + out.p1 - 1.0).abs() < 1e-12);
    assert_eq!(out.guess, u8::from(out.p0 <= out.p1));
}

#[test]
fn haar_collision_pairs_match_no_key() {
    let mut rng = RandomStream::from_seed(405);
    let family = PrfFamily::balanced(6, 64, 405).unwrap();
    let psi = sample_haar_state(6, &mut rng).unwrap();
    let sampler = CollisionSampler::new(&psi).unwrap();
    let pairs: Vec<_> = (0..30).map(|_| sampler.sample(&mut rng).unwrap().pair).collect();
    assert_eq!(np_oracle_key_search(&pairs, &family).unwrap(), None);
}

#[test]
fn single_record_outcomes_follow_the_born_rule() {
    let mut rng = RandomStream::from_seed(406);
    let psi = sample_haar_state(2, &mut rng).unwrap();
    let c = sample_uniform_clifford(2, &mut rng);
    let rotated = apply(&tableau_to_unitary(&c).unwrap(), &psi).unwrap();
    let trials = 20_000u64;
    let mut counts = [0u64; 4];
    for _ in 0..trials {
        counts[measure_in_clifford_basis(&psi, &c, &mut rng).unwrap().outcome.value as usize] += 1;
    }
    for (x, p) in rotated.probabilities().into_iter().enumerate() {
        assert!(binomial_consistent(counts[x], trials, p), "outcome {x}: {} vs {p}", counts[x]);
    }
}
