//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each operation has a plain Rust form returning JSON (used by native tests)
//! and a `wasm_bindgen` wrapper.

use prsbench::attacks::CollisionSampler;
use prsbench::ensembles::{binary_phase_state, PrfFamily};
use prsbench::haar::{exact_overlap_tail, sample_haar_state, sample_haar_unitary};
use prsbench::qcore::{diamond_distance_unitary, fidelity, frobenius_distance, relative_eigenvalues};
use prsbench::RandomStream;
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Tail {
    n: usize,
    samples: usize,
    epsilons: Vec<f64>,
    empirical: Vec<f64>,
    exact: Vec<f64>,
    bound: Vec<f64>,
}

/// Empirical tail of `|⟨ψ|φ⟩|²` for Haar `ψ` on a grid of `points` thresholds
/// in `(0, max_eps]`, with the exact curve and `e^{-εN}`.
pub fn haar_tail_json(n: usize, samples: usize, points: usize, max_eps: f64, seed: u64) -> Result<String, String> {
    if n == 0 || n > 12 || samples == 0 || points == 0 || !(max_eps > 0.0 && max_eps <= 1.0) {
        return Err("need 1 ≤ n ≤ 12, samples ≥ 1, points ≥ 1 and max_eps in (0, 1]".into());
    }
    let mut rng = RandomStream::from_seed(seed);
    let phi = sample_haar_state(n, &mut rng).map_err(|e| e.to_string())?;
    let mut overlaps = Vec::with_capacity(samples);
    for _ in 0..samples {
        let psi = sample_haar_state(n, &mut rng).map_err(|e| e.to_string())?;
        overlaps.push(fidelity(&psi, &phi).map_err(|e| e.to_string())?);
    }
    let dim = 1usize << n;
    let epsilons: Vec<f64> = (1..=points).map(|i| max_eps * i as f64 / points as f64).collect();
    let empirical = epsilons
        .iter()
        .map(|&e| overlaps.iter().filter(|&&f| f >= e).count() as f64 / samples as f64)
        .collect();
    let tail = Tail {
        n,
        samples,
        exact: epsilons.iter().map(|&e| exact_overlap_tail(dim, e)).collect(),
        bound: epsilons.iter().map(|&e| (-e * dim as f64).exp()).collect(),
        epsilons,
        empirical,
    };
    serde_json::to_string(&tail).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Polygon {
    n: usize,
    eigenvalues: Vec<[f64; 2]>,
    diamond: f64,
    frobenius: f64,
}

/// Eigenvalues of `UV†` for two Haar unitaries, with both distances.
pub fn diamond_polygon_json(n: usize, seed: u64) -> Result<String, String> {
    if n == 0 || n > 6 {
        return Err("need 1 ≤ n ≤ 6".into());
    }
    let mut rng = RandomStream::from_seed(seed);
    let u = sample_haar_unitary(n, &mut rng).map_err(|e| e.to_string())?;
    let v = sample_haar_unitary(n, &mut rng).map_err(|e| e.to_string())?;
    let eig = relative_eigenvalues(&u, &v).map_err(|e| e.to_string())?;
    let polygon = Polygon {
        n,
        eigenvalues: eig.iter().map(|z| [z.re, z.im]).collect(),
        diamond: diamond_distance_unitary(&u, &v).map_err(|e| e.to_string())?,
        frobenius: frobenius_distance(&u, &v).map_err(|e| e.to_string())?,
    };
    serde_json::to_string(&polygon).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Pairs {
    n: usize,
    truth_table: Vec<bool>,
    pairs: Vec<[u64; 2]>,
    control_zero_probability: f64,
    non_collision: usize,
}

/// Collision pairs sampled from one balanced binary-phase state.
pub fn collision_pairs_json(n: usize, samples: usize, seed: u64) -> Result<String, String> {
    if n == 0 || n > 6 || samples == 0 || samples > 100_000 {
        return Err("need 1 ≤ n ≤ 6 and 1 ≤ samples ≤ 100000".into());
    }
    let family = PrfFamily::balanced(n as u32, 1, seed).map_err(|e| e.to_string())?;
    let table = family.truth_table(0).map_err(|e| e.to_string())?;
    let state = binary_phase_state(&family, 0).map_err(|e| e.to_string())?;
    let sampler = CollisionSampler::new(&state).map_err(|e| e.to_string())?;
    let mut rng = RandomStream::from_seed(seed ^ 0x5EED);
    let mut pairs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let p = sampler.sample(&mut rng).map_err(|e| e.to_string())?.pair;
        pairs.push([p.x.value, p.y.value]);
    }
    let non_collision = pairs.iter().filter(|[x, y]| table[*x as usize] != table[*y as usize]).count();
    let out = Pairs { n, truth_table: table, pairs, control_zero_probability: sampler.control_zero_probability(), non_collision };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn haar_tail(n: u32, samples: u32, points: u32, max_eps: f64, seed: u32) -> Result<String, JsError> {
    haar_tail_json(n as usize, samples as usize, points as usize, max_eps, u64::from(seed)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn diamond_polygon(n: u32, seed: u32) -> Result<String, JsError> {
    diamond_polygon_json(n as usize, u64::from(seed)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn collision_pairs(n: u32, samples: u32, seed: u32) -> Result<String, JsError> {
    collision_pairs_json(n as usize, samples as usize, u64::from(seed)).map_err(|e| JsError::new(&e))
}
