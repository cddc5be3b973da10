use std::collections::HashMap;

use rand::Rng;

use super::{ExperimentConfig, Outcome, Params};
use crate::attacks::{
    collect_records, distinguishing_experiment, haar_log_likelihood, mc_log_likelihood,
    pru_advantage_experiment, binary_phase_attack_experiment, Adversary, BayesOptions, CollisionSampler,
    DistinguishOptions, KEY_SEARCH_CAP, PERMANENT_CAP,
};
use crate::clifford::{
    clifford_group_order, sample_uniform_clifford, symplectic_group_order, tableau_to_unitary, CliffordTableau,
    PauliRow,
};
use crate::ensembles::{
    binary_phase_state, kwise_eval, make_prs_family, sample_design_circuit, DesignSchedule, KWiseFamily,
    PrfBackend, PrfFamily, PrsKind,
};
use crate::haar::{frame_potential, haar_frame_potential, overlap_tail_experiment, sample_haar_state, sample_haar_unitary};
use crate::qcore::{apply, diamond_distance_unitary, fidelity, frobenius_distance, PureState, UnitaryOp, C64, MAX_QUBITS};
use crate::shadows::{default_batches, estimate_many_with, required_snapshots, ShadowSet};
use crate::stats::{binomial_at_most, binomial_consistent, chi_square_uniform, mean_stderr};
use crate::{derive_seed, Error, RandomStream, Result};

pub const EXPERIMENTS: &[&str] = &[
    "haar-tail",
    "clifford-uniformity",
    "design-frame-potential",
    "shadows-bench",
    "distinguish",
    "binary-phase-attack",
    "pru-advantage",
    "norms-check",
    "likelihood-check",
    "kwise-exact",
];

fn unknown(name: &str) -> Error {
    Error::UnknownExperiment { name: name.to_string(), registered: EXPERIMENTS.join(", ") }
}

pub(super) fn defaults(name: &str) -> Result<Params> {
    let mut p = Params::default();
    match name {
        "haar-tail" => {
            p.n = Some(8);
            p.samples = Some(100_000);
            p.epsilons = Some(vec![0.02, 0.05]);
        }
        "clifford-uniformity" => {
            p.n = Some(3);
            p.samples = Some(100_000);
            p.pairs = Some(20_000);
        }
        "design-frame-potential" => {
            p.n = Some(4);
            p.t = Some(2);
            p.eps = Some(0.1);
            p.samples = Some(2000);
            p.design_c = Some(DesignSchedule::default().c);
        }
        "shadows-bench" => {
            p.n = Some(6);
            p.observables = Some(64);
            p.eps = Some(0.33);
            p.delta = Some(0.05);
            p.trials = Some(100);
            p.c_shadow = Some(crate::shadows::DEFAULT_C_SHADOW);
        }
        "distinguish" => {
            p.n = Some(8);
            p.key_count = Some(32);
            p.t = Some(60);
            p.trials = Some(200);
            p.backend = Some(PrfBackend::Balanced);
            p.threshold = Some(2.0 / 3.0);
            p.mc_samples = Some(100_000);
            p.permanent_cap = Some(PERMANENT_CAP);
        }
        "binary-phase-attack" => {
            p.n = Some(10);
            p.key_count = Some(4096);
            p.pairs = Some(30);
            p.trials = Some(100);
            p.backends = Some(vec![PrfBackend::Balanced, PrfBackend::Mixer]);
            p.collision_samples = Some(10_000);
            p.uniformity_n = Some(4);
            p.uniformity_samples = Some(100_000);
        }
        "pru-advantage" => {
            p.family_sizes = Some(vec![8, 16]);
            p.queries = Some(1);
            p.adversary = Some(Adversary::SwapTest);
            p.trials = Some(200_000);
        }
        "norms-check" => {
            p.n = Some(3);
            p.samples = Some(200);
        }
        "likelihood-check" => {
            p.n = Some(4);
            p.t = Some(6);
            p.trials = Some(3);
            p.mc_samples = Some(100_000);
            p.eps = Some(0.1);
            p.tolerance = Some(0.1);
            p.design_c = Some(DesignSchedule::default().c);
        }
        "kwise-exact" => {
            p.n = Some(2);
            p.m = Some(2);
            p.t = Some(2);
        }
        other => return Err(unknown(other)),
    }
    Ok(p)
}

struct Checker<'a> {
    errors: &'a mut Vec<String>,
}

impl Checker<'_> {
    fn fail(&mut self, msg: String) {
        self.errors.push(msg);
    }

    fn qubits(&mut self, what: &str, v: Option<usize>, cap: usize) {
        match v {
            Some(0) => self.fail(format!("{what} = 0: need at least one qubit")),
            Some(n) if n > cap => self.fail(format!("{what} = {n} exceeds the capacity of {cap} for this experiment")),
            None => self.fail(format!("{what} is required")),
            _ => {}
        }
    }

    fn positive(&mut self, what: &str, v: Option<usize>) {
        match v {
            Some(0) => self.fail(format!("{what} must be positive")),
            None => self.fail(format!("{what} is required")),
            _ => {}
        }
    }

    fn open_unit(&mut self, what: &str, v: Option<f64>) {
        match v {
            Some(x) if !(x > 0.0 && x < 1.0) => self.fail(format!("{what} = {x} must lie in (0, 1)")),
            None => self.fail(format!("{what} is required")),
            _ => {}
        }
    }

    fn positive_real(&mut self, what: &str, v: Option<f64>) {
        match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => self.fail(format!("{what} = {x} must be positive")),
            None => self.fail(format!("{what} is required")),
            _ => {}
        }
    }
}

pub(super) fn validate(name: &str, p: &Params, errors: &mut Vec<String>) {
    let mut c = Checker { errors };
    match name {
        "haar-tail" => {
            c.qubits("n", p.n, MAX_QUBITS);
            c.positive("samples", p.samples);
            match &p.epsilons {
                Some(es) if es.is_empty() => c.fail("epsilons must be non-empty".into()),
                Some(es) => {
                    for &e in es {
                        if !(e > 0.0 && e <= 1.0) {
                            c.fail(format!("epsilon {e} must lie in (0, 1]"));
                        }
                    }
                }
                None => c.fail("epsilons is required".into()),
            }
        }
        "clifford-uniformity" => {
            c.qubits("n", p.n, 10);
            c.positive("samples", p.samples);
            c.positive("pairs", p.pairs);
        }
        "design-frame-potential" => {
            c.qubits("n", p.n, 12);
            c.positive("t", p.t);
            c.open_unit("eps", p.eps);
            c.positive_real("design_c", p.design_c);
            if p.samples.is_some_and(|s| s < 2) {
                c.fail("samples must be at least 2".into());
            }
        }
        "shadows-bench" => {
            c.qubits("n", p.n, 12);
            c.positive("observables", p.observables);
            c.positive("trials", p.trials);
            c.positive_real("eps", p.eps);
            c.open_unit("delta", p.delta);
            c.positive_real("c_shadow", p.c_shadow);
            if p.t == Some(0) {
                c.fail("t must be positive when set".into());
            }
        }
        "distinguish" => {
            c.qubits("n", p.n, 16);
            c.positive("trials", p.trials);
            c.positive("mc_samples", p.mc_samples);
            match p.key_count {
                Some(0) | None => c.fail("key_count must be positive".into()),
                Some(k) if k > 1 << 16 => c.fail(format!("key_count = {k} exceeds the likelihood cap of 65536")),
                _ => {}
            }
            if p.t.is_none() {
                c.fail("t is required".into());
            }
            if let Some(cap) = p.permanent_cap {
                if cap > PERMANENT_CAP {
                    c.fail(format!("permanent_cap = {cap} exceeds {PERMANENT_CAP}"));
                }
            }
            if p.forced_hidden.is_some_and(|x| x > 1) {
                c.fail("forced_hidden must be 0 or 1".into());
            }
            if p.batches == Some(0) {
                c.fail("batches must be positive when set".into());
            }
            if p.backend.is_none() {
                c.fail("backend is required".into());
            }
            if p.backend == Some(PrfBackend::Balanced) && p.n.is_some_and(|n| n > 16) {
                c.fail("the balanced backend supports n ≤ 16".into());
            }
        }
        "binary-phase-attack" => {
            // the circuit acts on 2n + 1 qubits
            c.qubits("n", p.n, (MAX_QUBITS - 1) / 2);
            c.qubits("uniformity_n", p.uniformity_n, 6);
            c.positive("trials", p.trials);
            c.positive("pairs", p.pairs);
            c.positive("collision_samples", p.collision_samples);
            c.positive("uniformity_samples", p.uniformity_samples);
            match p.key_count {
                Some(0) | None => c.fail("key_count must be positive".into()),
                Some(k) if k > KEY_SEARCH_CAP => {
                    c.fail(format!("key_count = {k} exceeds the brute-force cap of {KEY_SEARCH_CAP}"))
                }
                _ => {}
            }
            if p.backends.as_ref().is_none_or(|b| b.is_empty()) {
                c.fail("backends must be non-empty".into());
            }
        }
        "pru-advantage" => {
            c.positive("trials", p.trials);
            c.positive("queries", p.queries);
            match &p.family_sizes {
                Some(s) if s.is_empty() => c.fail("family_sizes must be non-empty".into()),
                Some(s) => {
                    for &n in s {
                        if n < 2 || !n.is_power_of_two() {
                            c.fail(format!("family size {n} must be a power of two ≥ 2"));
                        } else if 2 * n.trailing_zeros() as usize + 1 > MAX_QUBITS {
                            c.fail(format!("family size {n} exceeds the swap-test capacity"));
                        }
                    }
                }
                None => c.fail("family_sizes is required".into()),
            }
            if p.adversary.is_none() {
                c.fail("adversary is required".into());
            }
        }
        "norms-check" => {
            c.qubits("n", p.n, 8);
            c.positive("samples", p.samples);
        }
        "likelihood-check" => {
            c.qubits("n", p.n, 10);
            c.positive("trials", p.trials);
            c.positive("mc_samples", p.mc_samples);
            c.open_unit("eps", p.eps);
            c.positive_real("tolerance", p.tolerance);
            c.positive_real("design_c", p.design_c);
            match p.t {
                Some(0) | None => c.fail("t must be positive".into()),
                Some(t) if t > PERMANENT_CAP => c.fail(format!("t = {t} exceeds the permanent cap of {PERMANENT_CAP}")),
                _ => {}
            }
        }
        "kwise-exact" => {
            c.positive("t", p.t);
            c.positive("m", p.m);
            c.positive("n", p.n);
            if let (Some(n), Some(m), Some(t)) = (p.n, p.m, p.t) {
                let k = n.max(m);
                if k > 16 {
                    c.fail(format!("field degree {k} exceeds 16"));
                } else if n * t + k * t > 26 {
                    c.fail(format!("exhaustive enumeration too large: 2^({n}·{t}) tuples × 2^({k}·{t}) keys"));
                } else if t > 1 << n {
                    c.fail(format!("t = {t} exceeds the number of distinct inputs 2^{n}"));
                }
            }
        }
        other => c.fail(unknown(other).to_string()),
    }
}

fn req<T: Clone>(v: &Option<T>, what: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::InvalidParameter(format!("{what} is required")))
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let rng = RandomStream::from_seed(derive_seed(cfg.seed, &cfg.experiment, 0));
    let p = &cfg.params;
    let mut out = Outcome::default();
    match cfg.experiment.as_str() {
        "haar-tail" => haar_tail(p, &rng, &mut out)?,
        "clifford-uniformity" => clifford_uniformity(p, &rng, &mut out)?,
        "design-frame-potential" => design_frame(p, &rng, &mut out)?,
        "shadows-bench" => shadows_bench(p, &rng, &mut out)?,
        "distinguish" => distinguish(p, &rng, &mut out)?,
        "binary-phase-attack" => attack(p, &rng, &mut out)?,
        "pru-advantage" => pru(p, &rng, &mut out)?,
        "norms-check" => norms(p, &rng, &mut out)?,
        "likelihood-check" => likelihood(p, &rng, &mut out)?,
        "kwise-exact" => kwise(p, &mut out)?,
        other => return Err(unknown(other)),
    }
    Ok(out)
}

fn haar_tail(p: &Params, rng: &RandomStream, out: &mut Outcome) -> Result<()> {
    let n = req(&p.n, "n")?;
    let epsilons = req(&p.epsilons, "epsilons")?;
    let r = overlap_tail_experiment(n, &epsilons, req(&p.samples, "samples")?, &mut rng.derive("samples", 0))?;
    let samples = r.samples as u64;
    for (i, e) in epsilons.iter().enumerate() {
        let sigma = r.binomial_sigma(i);
        let hits = (r.empirical_tail[i] * r.samples as f64).round() as u64;
        out.metric_se(&format!("tail_{e}"), r.empirical_tail[i], sigma);
        out.metric(&format!("exact_{e}"), r.exact_tail[i]);
        out.metric(&format!("bound_{e}"), r.tail_bound[i]);
        out.target(
            &format!("exact_{e}"),
            format!("tail consistent with (1-ε)^(N-1) at binomial 3σ, ε = {e}"),
            binomial_consistent(hits, samples, r.exact_tail[i]),
        );
        if r.bound_holds(i) {
            out.target(
                &format!("bound_{e}"),
                format!("tail ≤ e^(-εN) at binomial 3σ, ε = {e}"),
                binomial_at_most(hits, samples, r.tail_bound[i]),
            );
        }
    }
    out.detail("tail", &r)
}

fn tableau_key(c: &CliffordTableau) -> Vec<PauliRow> {
    c.rows().to_vec()
}

fn all_tableaus(n: usize) -> Result<Vec<CliffordTableau>> {
    let order = symplectic_group_order(n).ok_or(Error::Capacity { requested: n, max: 3 })?;
    let phases = 1u64 << (2 * n);
    let mut v = Vec::new();
    for s in 0..order {
        for ph in 0..phases {
            v.push(CliffordTableau::from_index(n, s, ph));
        }
    }
    Ok(v)
}

fn clifford_uniformity(p: &Params, rng: &RandomStream, out: &mut Outcome) -> Result<()> {
    let classes = all_tableaus(1)?;
    let index: HashMap<Vec<PauliRow>, usize> =
        classes.iter().enumerate().map(|(i, c)| (tableau_key(c), i)).collect();
    out.metric("n1_classes", index.len() as f64);
    out.target("n1_enumeration", "24 distinct single-qubit Cliffords", index.len() == 24);

    let mut counts = vec![0u64; classes.len()];
    let mut r = rng.derive("n1-draws", 0);
    for _ in 0..req(&p.samples, "samples")? {
        let c = sample_uniform_clifford(1, &mut r);
        let i = *index.get(&tableau_key(&c)).ok_or_else(|| Error::InvalidParameter("sampled an invalid tableau".into()))?;
        counts[i] += 1;
    }
    let (stat, pval) = chi_square_uniform(&counts);
    out.metric("n1_chi_square", stat);
    out.metric("n1_p_value", pval);
    out.target("n1_uniform", "chi-square p > 0.001 over the 24 classes", pval > 0.001);

    let distinct: std::collections::HashSet<Vec<PauliRow>> = all_tableaus(2)?.iter().map(tableau_key).collect();
    out.metric("n2_classes", distinct.len() as f64);
    out.target(
        "n2_class_count",
        "11520 distinct two-qubit Cliffords by enumeration",
        Some(distinct.len() as u128) == clifford_group_order(2),
    );

    let n = req(&p.n, "n")?;
    let pairs = req(&p.pairs, "pairs")?;
    let mut r = rng.derive("frame-pairs", 0);
    let mut values = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let a = tableau_to_unitary(&sample_uniform_clifford(n, &mut r))?.column(0);
        let b = tableau_to_unitary(&sample_uniform_clifford(n, &mut r))?.column(0);
        values.push(fidelity(&a, &b)?.powi(2));
    }
    let (fp, se) = mean_stderr(&values);
    let want = haar_frame_potential(1 << n, 2);
    out.metric_se("frame_potential_t2", fp, se);
    out.metric("haar_frame_potential_t2", want);
    out.target("frame_potential_t2", format!("t = 2 frame potential within 3σ of 2/(N(N+1)) at n = {n}"), (fp - want).abs() <= 3.0 * se);
    Ok(())
}

fn design_frame(p: &Params, rng: &RandomStream, out: &mut Outcome) -> Result<()> {
    let n = req(&p.n, "n")?;
    let t = req(&p.t, "t")?;
    let eps = req(&p.eps, "eps")?;
    let schedule = DesignSchedule { c: req(&p.design_c, "design_c")? };
    let mut r = rng.derive("circuits", 0);
    let states = (0..req(&p.samples, "samples")?)
        .map(|_| Ok(sample_design_circuit(n, t, eps, schedule, &mut r)?.output_state()))
        .collect::<Result<Vec<_>>>()?;
    let fp = frame_potential(&states, t as u32)?;
    let want = haar_frame_potential(1 << n, t as u32);
    out.metric("frame_potential", fp);
    out.metric("haar_frame_potential", want);
    out.metric("ratio", fp / want);
    out.metric("gate_count", crate::ensembles::design_gate_count(n, t, eps, schedule) as f64);
    out.target("sandwich", format!("frame potential within (1 ± {eps}) of the Haar value"), (fp / want - 1.0).abs() <= eps);
    Ok(())
}

/// Average of the single-snapshot estimator over the full Clifford group and
/// all outcomes; returns the largest deviation from the true fidelity.
fn exhaustive_unbiasedness(n: usize, rng: &mut RandomStream) -> Result<f64> {
    let rho = sample_haar_state(n, rng)?;
    let phi = sample_haar_state(n, rng)?;
    let dim = 1usize << n;
    let tableaus = all_tableaus(n)?;
    let targets = [rho.clone(), phi.clone()];
    let mut sums = [0.0; 2];
    for c in &tableaus {
        let u = tableau_to_unitary(c)?;
        let rotated = apply(&u, &rho)?.probabilities();
        for (s, target) in sums.iter_mut().zip(&targets) {
            let overlaps = apply(&u, target)?.probabilities();
            for x in 0..dim {
                *s += rotated[x] * ((dim as f64 + 1.0) * overlaps[x] - 1.0);
            }
        }
    }
    let count = tableaus.len() as f64;
    let exact = [1.0, fidelity(&rho, &phi)?];
    Ok(sums.iter().zip(exact).map(|(s, e)| (s / count - e).abs()).fold(0.0, f64::max))
}

/// `cos θ |ψ⟩ + sin θ |χ⟩` with `χ ⟂ ψ` Haar and `θ` uniform, so true
/// fidelities spread over `[0, 1]`.
fn spread_observable(psi: &PureState, rng: &mut RandomStream) -> Result<PureState> {
    let chi = sample_haar_state(psi.n(), rng)?;
    let overlap = psi.inner(&chi)?;
    let perp: Vec<C64> = chi.amplitudes().iter().zip(psi.amplitudes()).map(|(c, p)| c - overlap * p).collect();
    let perp = PureState::normalized(perp)?;
    let theta = rng.random::<f64>() * std::f64::consts::FRAC_PI_2;
    let amps = psi
        .amplitudes()
        .iter()
        .zip(perp.amplitudes())
        .map(|(a, b)| a * theta.cos() + b * theta.sin())
        .collect();
    PureState::normalized(amps)
}

fn shadows_bench(p: &Params, rng: &RandomStream, out: &mut Outcome) -> Result<()> {
    let mut er = rng.derive("exhaustive", 0);
    let worst = exhaustive_unbiasedness(1, &mut er)?.max(exhaustive_unbiasedness(2, &mut er)?);
    out.metric("unbiasedness_error", worst);
    out.target("unbiased", "group-averaged snapshot equals fidelity at n = 1, 2 within 1e-9", worst <= 1e-9);

    let n = req(&p.n, "n")?;
    let m = req(&p.observables, "observables")?;
    let eps = req(&p.eps, "eps")?;
    let delta = req(&p.delta, "delta")?;
    let c_shadow = req(&p.c_shadow, "c_shadow")?;
    let trials = req(&p.trials, "trials")?;
    let t_min = required_snapshots(m, eps, delta, c_shadow);
    let t = p.t.unwrap_or(t_min);
    let mut all_correct = Vec::with_capacity(trials);
    let mut max_errors = Vec::with_capacity(trials);
    for i in 0..trials {
        let mut r = rng.derive("run", i as u64);
        let psi = sample_haar_state(n, &mut r)?;
        let observables = (0..m).map(|_| spread_observable(&psi, &mut r)).collect::<Result<Vec<_>>>()?;
        let shadows = ShadowSet::collect(&psi, t, &mut r)?;
        let report = estimate_many_with(&shadows, &observables, eps, delta, c_shadow)?;
        let mut worst: f64 = 0.0;
        for (e, o) in report.estimates.iter().zip(&observables) {
            worst = worst.max((e - fidelity(&psi, o)?).abs());
        }
        max_errors.push(worst);
        all_correct.push(f64::from(u8::from(worst <= eps)));
    }
    let (rate, se) = mean_stderr(&all_correct);
    out.metric("T_min", t_min as f64);
    out.metric("T", t as f64);
    out.metric("batches", default_batches(m, delta) as f64);
    out.metric_se("all_correct_rate", rate, se);
    out.metric("mean_max_error", mean_stderr(&max_errors).0);
    out.metric("worst_max_error", max_errors.iter().copied().fold(0.0, f64::max));
    out.target("all_correct", format!("all {m} estimates within ε in ≥ {} of runs", 1.0 - delta), rate >= 1.0 - delta);
    Ok(())
}

fn distinguish(p: &Params, rng: &RandomStream, out: &mut Outcome) -> Result<()> {
    let n = req(&p.n, "n")?;
    let key_count = req(&p.key_count, "key_count")?;
    let backend = req(&p.backend, "backend")?;
    let family = make_prs_family(PrsKind::BinaryPhase(backend), n, key_count, &mut rng.derive("family", 0))?;
    let opts = DistinguishOptions {
        bayes: BayesOptions {
            permanent_cap: p.permanent_cap.unwrap_or(PERMANENT_CAP),
            mc_samples: req(&p.mc_samples, "mc_samples")?,
        },
        threshold: p.threshold.unwrap_or(2.0 / 3.0),
        batches: p.batches,
        forced_hidden: p.forced_hidden,
    };
    let r = distinguishing_experiment(&family, req(&p.t, "t")?, req(&p.trials, "trials")?, &opts, &rng.derive("trials", 0))?;
    out.metric_se("bayes_success", r.bayes_success, r.bayes_stderr);
    out.metric_se("shadow_success", r.shadow_success, r.shadow_stderr);
    out.metric_se("paired_difference", r.paired_difference, r.paired_stderr);
    out.metric("confident_fraction", r.confident_fraction);
    out.metric("batches", r.batches as f64);
    out.target("bayes", "Bayes-rule success ≥ 0.90", r.bayes_success >= 0.9);
    out.target("shadow", "shadow-rule success ≥ 0.85", r.shadow_success >= 0.85);
    out.target("dominance", "Bayes success ≥ shadow success - 0.03", r.paired_difference >= -0.03);
    out.detail("haar_method", r.haar_method)?;
    out.detail("trials", &r.outcomes)
}

fn attack(p: &Params, rng: &RandomStream, out: &mut Outcome) -> Result<()> {
    let n = req(&p.n, "n")?;
    let family = PrfFamily::balanced(n as u32, 1, rng.derive("check-family", 0).seed())?;
    let sampler = CollisionSampler::new(&binary_phase_state(&family, 0)?)?;
    let mut r = rng.derive("check-samples", 0);
    let table = family.truth_table(0)?;
    let mut bad = 0u64;
    for _ in 0..req(&p.collision_samples, "collision_samples")? {
        let s = sampler.sample(&mut r)?.pair;
        if table[s.x.value as usize] != table[s.y.value as usize] {
            bad += 1;
        }
    }
    out.metric("non_collision_pairs", bad as f64);
    out.metric("control_zero_probability", sampler.control_zero_probability());
    out.target("zero_non_collision", "no pair with f(x) ≠ f(y) under the balanced backend", bad == 0);

    let un = req(&p.uniformity_n, "uniformity_n")?;
    let family = PrfFamily::balanced(un as u32, 1, rng.derive("uniformity-family", 0).seed())?;
    let table = family.truth_table(0)?;
    let dim = 1usize << un;
    let mut bins: HashMap<(usize, usize), usize> = HashMap::new();
    for x in 0..dim {
        for y in 0..dim {
            if table[x] == table[y] {
                let len = bins.len();
                bins.insert((x, y), len);
            }
        }
    }
    let sampler = CollisionSampler::new(&binary_phase_state(&family, 0)?)?;
    let mut counts = vec![0u64; bins.len()];
    let mut stray = 0u64;
    let mut r = rng.derive("uniformity-samples", 0);
    for _ in 0..req(&p.uniformity_samples, "uniformity_samples")? {
        let s = sampler.sample(&mut r)?.pair;
        match bins.get(&(s.x.value as usize, s.y.value as usize)) {
            Some(&i) => counts[i] += 1,
            None => stray += 1,
        }
    }
    let (stat, pval) = chi_square_uniform(&counts);
    out.metric("uniformity_bins", bins.len() as f64);
    out.metric("uniformity_chi_square", stat);
    out.metric("uniformity_p_value", pval);
    out.target("uniform_pairs", format!("chi-square p > 0.001 over collision pairs at n = {un}"), pval > 0.001 && stray == 0);

    let backends = req(&p.backends, "backends")?;
    let report = binary_phase_attack_experiment(
        n,
        req(&p.key_count, "key_count")?,
        req(&p.pairs, "pairs")?,
        req(&p.trials, "trials")?,
        &backends,
        &rng.derive("game", 0),
    )?;
    for b in &report.backends {
        let name = match b.backend {
            PrfBackend::Balanced => "balanced",
            PrfBackend::Mixer => "mixer",
        };
        out.metric_se(&format!("{name}_prs_accept"), b.prs.accept_rate, b.prs.accept_stderr);
        out.metric_se(&format!("{name}_haar_accept"), b.haar.accept_rate, b.haar.accept_stderr);
        out.metric(&format!("{name}_prs_control_zero"), b.prs.mean_control_zero);
        out.metric(&format!("{name}_haar_control_zero"), b.haar.mean_control_zero);
        out.metric(&format!("{name}_prs_non_collision_pairs"), b.prs.non_collision_pairs as f64);
        match b.backend {
            PrfBackend::Balanced => {
                out.target("balanced_prs_accept", "PRS branch accept rate = 1.0 (balanced)", b.prs.accept_rate == 1.0)
            }
            PrfBackend::Mixer => {
                out.target("mixer_prs_accept", "PRS branch accept rate ≥ 0.9 (mixer)", b.prs.accept_rate >= 0.9)
            }
        }
        out.target(&format!("{name}_haar_accept"), format!("Haar branch accept rate ≤ 0.05 ({name})"), b.haar.accept_rate <= 0.05);
    }
    out.detail("game", &report)
}

fn pru(p: &Params, rng: &RandomStream, out: &mut Outcome) -> Result<()> {
    let sizes = req(&p.family_sizes, "family_sizes")?;
    let adversary = req(&p.adversary, "adversary")?;
    let queries = req(&p.queries, "queries")?;
    let trials = req(&p.trials, "trials")?;
    let mut results = Vec::new();
    for (i, &size) in sizes.iter().enumerate() {
        let r = pru_advantage_experiment(size, queries, adversary, trials, &rng.derive("size", i as u64))?;
        out.metric_se(&format!("adv_{size}"), r.adv_hat, r.adv_stderr);
        if let Some(pred) = r.predicted {
            out.metric(&format!("predicted_{size}"), pred);
            out.target(
                &format!("closed_form_{size}"),
                format!("advantage within 3σ of its closed form at N = {size}"),
                (r.adv_hat - pred).abs() <= 3.0 * r.adv_stderr,
            );
        }
        results.push(r);
    }
    if adversary == Adversary::SwapTest {
        for a in &results {
            if let Some(b) = results.iter().find(|b| b.family_size == 2 * a.family_size) {
                let sigma = (b.adv_stderr.powi(2) + a.adv_stderr.powi(2) / 4.0).sqrt();
                out.target(
                    &format!("halving_{}_{}", a.family_size, b.family_size),
                    format!("advantage halves within 3σ from N = {} to N = {}", a.family_size, b.family_size),
                    (b.adv_hat - a.adv_hat / 2.0).abs() <= 3.0 * sigma,
                );
            }
        }
    }
    out.detail("reports", &results)
}

fn norms(p: &Params, rng: &RandomStream, out: &mut Outcome) -> Result<()> {
    let max_n = req(&p.n, "n")?;
    let mut r = rng.derive("pairs", 0);
    let mut excess = f64::NEG_INFINITY;
    let mut largest: f64 = 0.0;
    for i in 0..req(&p.samples, "samples")? {
        let n = 1 + i % max_n;
        let u = sample_haar_unitary(n, &mut r)?;
        let v = sample_haar_unitary(n, &mut r)?;
        let d = diamond_distance_unitary(&u, &v)?;
        excess = excess.max(d - 2.0 * frobenius_distance(&u, &v)?);
        largest = largest.max(d);
    }
    let id = UnitaryOp::identity(1)?;
    let z = diamond_distance_unitary(&id, &UnitaryOp::pauli_z())?;
    let minus = diamond_distance_unitary(&id, &id.with_phase(std::f64::consts::PI))?;
    out.metric("max_diamond_minus_2frobenius", excess);
    out.metric("max_diamond", largest);
    out.metric("diamond_i_z", z);
    out.metric("diamond_i_minus_i", minus);
    out.target("frobenius_bound", "diamond ≤ 2·Frobenius + 1e-7 on every pair", excess <= 1e-7);
    out.target("range", "diamond ≤ 2 on every pair", largest <= 2.0 + 1e-12);
    out.target("i_z", "diamond(I, Z) = 2 ± 1e-9", (z - 2.0).abs() <= 1e-9);
    out.target("i_minus_i", "diamond(I, -I) = 0 ± 1e-9", minus.abs() <= 1e-9);
    Ok(())
}

fn likelihood(p: &Params, rng: &RandomStream, out: &mut Outcome) -> Result<()> {
    let n = req(&p.n, "n")?;
    let t = req(&p.t, "t")?;
    let eps = req(&p.eps, "eps")?;
    let tol = req(&p.tolerance, "tolerance")?;
    let samples = req(&p.mc_samples, "mc_samples")?;
    let schedule = DesignSchedule { c: req(&p.design_c, "design_c")? };
    let mut design_ratios = Vec::new();
    let mut haar_ratios = Vec::new();
    for i in 0..req(&p.trials, "trials")? {
        let mut r = rng.derive("records", i as u64);
        let psi = sample_haar_state(n, &mut r)?;
        let records = collect_records(&psi, t, &mut r)?;
        let exact = haar_log_likelihood(&records)?;
        let mut dr = rng.derive("design", i as u64);
        let design = mc_log_likelihood(&records, samples, |buf| {
            let circuit = sample_design_circuit(n, t, eps, schedule, &mut dr)?;
            buf.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            buf[0] = C64::new(1.0, 0.0);
            circuit.apply_in_place(buf);
            Ok(())
        })?;
        let mut hr = rng.derive("haar", i as u64);
        let haar = mc_log_likelihood(&records, samples, |buf| {
            buf.copy_from_slice(sample_haar_state(n, &mut hr)?.amplitudes());
            Ok(())
        })?;
        design_ratios.push((design - exact).exp());
        haar_ratios.push((haar - exact).exp());
    }
    let worst = design_ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    out.metric("worst_design_deviation", worst);
    out.metric("mean_design_ratio", mean_stderr(&design_ratios).0);
    out.metric("mean_haar_mc_ratio", mean_stderr(&haar_ratios).0);
    out.target("sandwich", format!("design Monte Carlo within 1 ± {tol} of the permanent formula"), worst <= tol);
    out.detail("design_ratios", &design_ratios)?;
    out.detail("haar_mc_ratios", &haar_ratios)
}

fn kwise(p: &Params, out: &mut Outcome) -> Result<()> {
    let (n, m, t) = (req(&p.n, "n")?, req(&p.m, "m")?, req(&p.t, "t")?);
    let family = KWiseFamily::new(t, n as u32, m as u32)?;
    let keys = family.key_count().ok_or_else(|| Error::InvalidParameter("key space too large".into()))?;
    let outputs = 1usize << (m * t);
    let inputs = 1u64 << n;
    let key_list = (0..keys).map(|k| family.key_from_index(k)).collect::<Result<Vec<_>>>()?;
    let mut tuple = vec![0u64; t];
    let mut checked = 0u64;
    let mut worst = 0.0f64;
    let mut exact = true;
    loop {
        let distinct = (0..t).all(|i| (i + 1..t).all(|j| tuple[i] != tuple[j]));
        if distinct {
            let mut counts = vec![0u64; outputs];
            for key in &key_list {
                let mut idx = 0usize;
                for &x in &tuple {
                    idx = (idx << m) | kwise_eval(&family, key, x)? as usize;
                }
                counts[idx] += 1;
            }
            for &c in &counts {
                exact &= c * outputs as u64 == keys;
                worst = worst.max((c as f64 / keys as f64 - 1.0 / outputs as f64).abs());
            }
            checked += 1;
        }
        let mut i = 0;
        while i < t {
            tuple[i] += 1;
            if tuple[i] < inputs {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
        if i == t {
            break;
        }
    }
    out.metric("tuples_checked", checked as f64);
    out.metric("keys", keys as f64);
    out.metric("max_deviation", worst);
    out.target("exact", format!("every distinct {t}-tuple maps to each output tuple with probability exactly 2^-{}", m * t), exact);
    Ok(())
}
