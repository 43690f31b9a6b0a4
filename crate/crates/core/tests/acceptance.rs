//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qbody_core::cone::{interpolation_observable, ConeSection, SurfaceClass};
use qbody_core::model::{
    mix, to_matrix, witness_point_closed_form, witness_point_combination,
    witness_point_from_mixture,
};
use qbody_core::numerics::hermitian_eigenvalues;
use qbody_core::realize::{behavior_of, chsh_realization, gamma_generators, realize_from_vectors};
use qbody_core::sdp::{
    analytic_certificate, build_w, gram_from_configuration, primal_value, structured_determinant,
    structured_eigenvalues, StructuredMatrixSpec,
};
use qbody_core::seesaw::{
    bell_matrix, bell_value, best_over_trials, seesaw_optimize_traced, VectorConfiguration,
};
use qbody_core::witness::dimension_witness;

fn report(criterion: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("acceptance: {criterion}: PASS");
    } else {
        println!("acceptance: {criterion}: FAIL ({})", failures.join("; "));
    }
    assert!(failures.is_empty(), "{criterion} failed: {failures:?}");
}

#[test]
fn criterion_1_witness_construction() {
    let mut failures = Vec::new();
    let start = Instant::now();
    for m in [2usize, 4, 6, 8] {
        let mixture = to_matrix(&witness_point_from_mixture(m).expect("mixture"));
        let closed = witness_point_closed_form(m).expect("closed form");
        let diff = mixture.max_abs_difference(&closed);
        if diff > 1e-12 {
            failures.push(format!("m={m}: mixture vs closed form differ by {diff:e}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 1.0 {
        failures.push(format!("construction took {elapsed:?}, limit 1 s"));
    }
    report("criterion 1 (witness construction, m in {2,4,6,8}, 1e-12)", &failures);
}

#[test]
fn criterion_2_concavity_witness() {
    let mut failures = Vec::new();
    let eps = 1e-8;

    let b4 = witness_point_from_mixture(4).expect("witness point m=4");
    let v4 = dimension_witness(&b4, 2, eps).expect("verdict m=4");
    if v4.rank != 5 {
        failures.push(format!("m=4 rank {} != 5", v4.rank));
    }
    if !v4.excluded {
        failures.push("m=4 must exclude d=2".into());
    }

    let b8 = witness_point_from_mixture(8).expect("witness point m=8");
    let v8 = dimension_witness(&b8, 2, eps).expect("verdict m=8");
    if v8.rank != 9 {
        failures.push(format!("m=8 rank {} != 9", v8.rank));
    }
    if !v8.excluded {
        failures.push("m=8 must exclude d=2".into());
    }

    report("criterion 2 (rank witness excludes d=2 for m=4 and m=8)", &failures);
}

#[test]
fn criterion_3_bell_maximum_by_seesaw() {
    let mut failures = Vec::new();
    for m in [2usize, 4, 6] {
        let bell = bell_matrix(m).expect("bell matrix");
        let best = best_over_trials(&bell, 50, 2024, 1e-15, 10_000).expect("seesaw");
        let target = (m * m) as f64 / 2.0;
        if (best.value - target).abs() > 1e-6 {
            failures.push(format!("m={m}: best value {} vs {target}", best.value));
        }
        if best.stationarity_residual > 1e-8 {
            failures.push(format!(
                "m={m}: stationarity residual {:e} above 1e-8",
                best.stationarity_residual
            ));
        }
    }
    report("criterion 3 (see-saw reaches m^2/2 within 1e-6, residual <= 1e-8)", &failures);
}

#[test]
fn criterion_4_sdp_certificate() {
    let mut failures = Vec::new();

    for m in (2..=12).step_by(2) {
        let cert = analytic_certificate(m).expect("analytic certificate");
        let target = (m * m) as f64 / 2.0;
        if (cert.primal_value - target).abs() > 1e-9 || (cert.dual_value - target).abs() > 1e-9 {
            failures.push(format!(
                "m={m}: primal {} dual {} vs {target}",
                cert.primal_value, cert.dual_value
            ));
        }
        if cert.gap.abs() > 1e-9 {
            failures.push(format!("m={m}: gap {:e}", cert.gap));
        }
        if cert.min_eig_slack < -1e-9 {
            failures.push(format!("m={m}: slack min eigenvalue {:e}", cert.min_eig_slack));
        }

        // Structured spectrum of the Bell matrix itself.
        let spec = StructuredMatrixSpec { m, p: 1.0 - m as f64 / 2.0, q: 1.0 };
        let spectrum = structured_eigenvalues(&spec);
        let half = m as f64 / 2.0;
        if (spectrum[0] - half).abs() > 1e-10 {
            failures.push(format!("m={m}: leading eigenvalue {} != {half}", spectrum[0]));
        }
        if spectrum[1..].iter().any(|&e| (e + half).abs() > 1e-10) {
            failures.push(format!("m={m}: repeated eigenvalue differs from {}", -half));
        }
    }

    // Determinant closed form vs an LU oracle on random parameters.
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..100 {
        let spec = StructuredMatrixSpec {
            m: rng.random_range(1..=8),
            p: rng.random_range(-3.0..3.0),
            q: rng.random_range(-3.0..3.0),
        };
        let closed = structured_determinant(&spec);
        let numeric = spec.build().determinant();
        let scale = closed.abs().max(numeric.abs()).max(1.0);
        if (closed - numeric).abs() > 1e-8 * scale {
            failures.push(format!("determinant mismatch at {spec:?}: {closed} vs {numeric}"));
        }
    }

    report(
        "criterion 4 (analytic SDP certificate, gap <= 1e-9, structured spectra)",
        &failures,
    );
}

#[test]
fn criterion_5_generator_realization() {
    let mut failures = Vec::new();

    let m = 4usize;
    let b_vectors: Vec<DVector<f64>> =
        (0..m).map(|k| DVector::from_fn(m, |i, _| if i == k { 1.0 } else { 0.0 })).collect();
    let s: DVector<f64> = b_vectors.iter().sum();
    let a_vectors: Vec<DVector<f64>> =
        (0..m).map(|i| &s * (2.0 / m as f64) - &b_vectors[i]).collect();

    let realization = realize_from_vectors(&a_vectors, &b_vectors).expect("realization");
    if realization.dim_a != 4 {
        failures.push(format!("local dimension {} != 4", realization.dim_a));
    }
    let behavior = behavior_of(&realization).expect("behavior");
    let deviation = to_matrix(&behavior).max_abs_difference(&witness_point_closed_form(m).unwrap());
    if deviation > 1e-10 {
        failures.push(format!("deviation from closed form {deviation:e}"));
    }
    for v in behavior.a_marginals.iter().chain(&behavior.b_marginals) {
        if v.abs() > 1e-10 {
            failures.push(format!("marginal {v:e} not zero"));
        }
    }

    // Generator contract up to n = 8.
    for n in 1..=8usize {
        let g = gamma_generators(n).expect("generators");
        let dim = g[0].nrows();
        let identity = DMatrix::<Complex64>::identity(dim, dim);
        for i in 0..n {
            let inv = (&g[i] * &g[i]) - &identity;
            if inv.iter().any(|c| c.norm() > 1e-12) {
                failures.push(format!("n={n}: generator {i} is not an involution"));
            }
            for j in (i + 1)..n {
                let anti = &g[i] * &g[j] + &g[j] * &g[i];
                if anti.iter().any(|c| c.norm() > 1e-12) {
                    failures.push(format!("n={n}: generators {i},{j} do not anticommute"));
                }
            }
        }
    }

    report("criterion 5 (generator realization reproduces the witness point)", &failures);
}

#[test]
fn criterion_6_chsh_block() {
    let mut failures = Vec::new();
    let behavior = behavior_of(&chsh_realization()).expect("CHSH behavior");
    let chsh = behavior.joint(0, 0) + behavior.joint(0, 1) + behavior.joint(1, 0)
        - behavior.joint(1, 1);
    if (chsh - 2.0 * 2.0_f64.sqrt()).abs() > 1e-10 {
        failures.push(format!("CHSH value {chsh}"));
    }
    let target = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..2 {
        for j in 0..2 {
            let magnitude = behavior.joint(i, j).abs();
            if (magnitude - target).abs() > 1e-10 {
                failures.push(format!("joint ({i},{j}) magnitude {magnitude}"));
            }
        }
    }
    report("criterion 6 (pinned CHSH block: 2*sqrt(2) and 1/sqrt(2) joints)", &failures);
}

#[test]
fn criterion_7_cone_separation() {
    let mut failures = Vec::new();
    let grid = 64usize;
    let cone = ConeSection::new();

    let projective = cone.projective_scan(grid).expect("projective scan");
    let mut open_lateral = 0usize;
    let mut unquantized = 0usize;
    for sp in &projective {
        let z = sp.point.z;
        if sp.class == SurfaceClass::LateralSurface && z.abs() > 1e-6 && z.abs() < 1.0 - 1e-6 {
            open_lateral += 1;
        }
        if !(z.abs() <= 1e-10 || (z.abs() - 1.0).abs() <= 1e-10) {
            unquantized += 1;
        }
    }
    if open_lateral > 0 {
        failures.push(format!("{open_lateral} projective points on the open lateral surface"));
    }
    if unquantized > 0 {
        failures.push(format!("{unquantized} projective z values outside {{-1, 0, +1}}"));
    }

    // Surface coverage by the POVM family within grid resolution.
    let povm = cone.povm_scan(grid).expect("povm scan");
    let surface: Vec<_> = povm.iter().filter(|sp| sp.class == SurfaceClass::LateralSurface).collect();
    let resolution = 4.0 / grid as f64;
    for r in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for k in 0..12 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 12.0;
            for sign in [1.0, -1.0] {
                let target = (r * theta.cos(), r * theta.sin(), sign * (1.0 - r));
                let nearest = surface
                    .iter()
                    .map(|sp| {
                        let dx = sp.point.x - target.0;
                        let dy = sp.point.y - target.1;
                        let dz = sp.point.z - target.2;
                        (dx * dx + dy * dy + dz * dz).sqrt()
                    })
                    .fold(f64::INFINITY, f64::min);
                if nearest > resolution {
                    failures.push(format!(
                        "surface target ({:.2}, {:.2}, {:.2}) missed by {nearest:e}",
                        target.0, target.1, target.2
                    ));
                }
            }
        }
    }

    // Interpolation axis produced exactly.
    for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let p = cone
            .cone_point(&interpolation_observable(lambda).expect("interpolation"))
            .expect("cone point");
        if p.x.abs() > 1e-15 || p.y.abs() > 1e-15 || (p.z - (2.0 * lambda - 1.0)).abs() > 1e-14 {
            failures.push(format!("interpolation at lambda={lambda} gave ({}, {}, {})", p.x, p.y, p.z));
        }
    }

    report("criterion 7 (cone separation at grid 64)", &failures);
}

#[test]
fn criterion_8_property_suites() {
    let mut failures = Vec::new();

    // See-saw monotonicity across iterations.
    for m in [2usize, 4, 6] {
        let bell = bell_matrix(m).expect("bell matrix");
        for seed in 0..10u64 {
            let (_, trace) = seesaw_optimize_traced(&bell, seed, 1e-12, 10_000).expect("seesaw");
            for pair in trace.windows(2) {
                if pair[1] < pair[0] - 1e-12 {
                    failures.push(format!("m={m} seed={seed}: value decreased {} -> {}", pair[0], pair[1]));
                }
            }
        }
    }

    // Weak duality on 100 random feasible Gram matrices.
    let m = 4usize;
    let bell = bell_matrix(m).expect("bell matrix");
    let w = build_w(&bell);
    let dual = analytic_certificate(m).expect("certificate");
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    for trial in 0..100 {
        let dim = rng.random_range(1..=2 * m);
        let vectors: Vec<DVector<f64>> = (0..2 * m)
            .map(|_| {
                let v = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0_f64));
                let norm = v.norm();
                if norm < 1e-9 {
                    DVector::from_fn(dim, |k, _| if k == 0 { 1.0 } else { 0.0 })
                } else {
                    v / norm
                }
            })
            .collect();
        let mut gamma = DMatrix::from_fn(2 * m, 2 * m, |i, j| vectors[i].dot(&vectors[j]));
        for i in 0..2 * m {
            gamma[(i, i)] = 1.0;
        }
        match primal_value(&gamma, &w, 1e-9) {
            Ok(p) => {
                if p > dual.dual_value + 1e-9 {
                    failures.push(format!("trial {trial}: primal {p} above dual {}", dual.dual_value));
                }
            }
            Err(e) => failures.push(format!("trial {trial}: unexpected infeasibility: {e}")),
        }
    }

    // Gram factorization round trip.
    let mut rng = ChaCha8Rng::seed_from_u64(888);
    for _ in 0..20 {
        let n = rng.random_range(2..=8);
        let vectors: Vec<DVector<f64>> = (0..n)
            .map(|_| {
                let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0_f64));
                let norm = v.norm();
                if norm < 1e-9 {
                    DVector::from_fn(n, |k, _| if k == 0 { 1.0 } else { 0.0 })
                } else {
                    v / norm
                }
            })
            .collect();
        let g = DMatrix::from_fn(n, n, |i, j| vectors[i].dot(&vectors[j]));
        let recovered = qbody_core::numerics::gram_factorize(&g, 1e-9).expect("factorization");
        for i in 0..n {
            for j in 0..n {
                if (recovered[i].dot(&recovered[j]) - g[(i, j)]).abs() > 1e-10 {
                    failures.push(format!("gram round trip off at ({i},{j})"));
                }
            }
        }
    }

    // Mix affinity.
    let combo = witness_point_combination(4).expect("combination");
    let uniform: Vec<_> = combo
        .terms
        .iter()
        .map(|(_, s)| (1.0 / combo.terms.len() as f64, s.clone()))
        .collect();
    let uniform = qbody_core::model::ConvexCombination { terms: uniform };
    let base = mix(&combo).expect("mix");
    let other = mix(&uniform).expect("mix");
    for blend in [0.0, 0.25, 0.5, 1.0] {
        let blended = qbody_core::model::ConvexCombination {
            terms: combo
                .terms
                .iter()
                .zip(&uniform.terms)
                .map(|((w1, s), (w2, _))| (blend * w1 + (1.0 - blend) * w2, s.clone()))
                .collect(),
        };
        let mixed = mix(&blended).expect("mix");
        for idx in 0..mixed.joints.len() {
            let expected = blend * base.joints[idx] + (1.0 - blend) * other.joints[idx];
            if (mixed.joints[idx] - expected).abs() > 1e-14 {
                failures.push(format!("mix affinity off at joint {idx} (blend {blend})"));
            }
        }
    }

    // Spot check: a converged configuration is feasible for the primal via
    // its Gram matrix and never beats the certificate.
    let best = best_over_trials(&bell, 10, 3, 1e-12, 10_000).expect("seesaw");
    let gamma = gram_from_configuration(&best.config);
    let p = primal_value(&gamma, &w, 1e-9).expect("primal at seesaw point");
    if p > dual.dual_value + 1e-9 {
        failures.push(format!("seesaw Gram value {p} above dual {}", dual.dual_value));
    }
    if (p - bell_value(&bell, &best.config).expect("bell value")).abs() > 1e-9 {
        failures.push("Gram primal and direct Bell value disagree".into());
    }

    // Eigenvalue sum sanity on the slack matrix route used above.
    let slack_spectrum = hermitian_eigenvalues(&w.map(|x| Complex64::new(x, 0.0))).expect("spectrum");
    if (slack_spectrum.iter().sum::<f64>()).abs() > 1e-9 {
        failures.push("W spectrum does not sum to its zero trace".into());
    }
    let _ = VectorConfiguration::new(
        best.config.a_vectors.clone(),
        best.config.b_vectors.clone(),
    )
    .expect("configuration invariants hold");

    report("criterion 8 (property suites)", &failures);
}
