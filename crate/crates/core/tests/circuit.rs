//! Verifier circuits: preprocessing, amplification and the acceptance oracle.

use depth_forge::circuit::{
    accept_probability, amplify, majority_gate_count, majority_probability, min_satisfying_weight, preprocess, reference, Gate, QmsaInstance,
    VerifierCircuit,
};
use depth_forge::linalg::{c, pauli_x, Mat, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Haar-ish unitary from the QR factorization of a complex Gaussian-like matrix.
fn random_unitary(dim: usize, rng: &mut impl Rng) -> Mat {
    let m = Mat::from_fn(dim, dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let qr = m.qr();
    let (q, r) = (qr.q(), qr.r());
    // fix column phases so the distribution does not depend on QR conventions
    let phases = Mat::from_fn(dim, dim, |i, j| if i == j { C64::from_polar(1.0, -r[(i, i)].arg()) } else { C64::from(0.0) });
    q * phases
}

fn random_circuit(n_proof: usize, n_ancilla: usize, gates: usize, seed: u64) -> VerifierCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = n_proof + n_ancilla;
    let list = (0..gates)
        .map(|_| {
            if w >= 2 && rng.gen_bool(0.6) {
                let a = rng.gen_range(0..w);
                let mut b = rng.gen_range(0..w - 1);
                if b >= a {
                    b += 1;
                }
                Gate::new(vec![a, b], random_unitary(4, &mut rng))
            } else {
                Gate::single(rng.gen_range(0..w), random_unitary(2, &mut rng))
            }
        })
        .collect();
    VerifierCircuit::new(n_proof, n_ancilla, list, n_proof + rng.gen_range(0..n_ancilla)).unwrap()
}

#[test]
fn preprocessing_an_empty_core() {
    let c = preprocess(&reference::empty(2, 1)).unwrap();
    assert_eq!(c.len(), 3);
    assert_eq!(c.n_ancilla, 4);
    assert!(c.flags.read_only_proof && c.flags.delayed_output);
    for y in 0..4 {
        assert_eq!(accept_probability(&c, y).unwrap(), 0.0);
    }
}

#[test]
fn preprocessing_is_idempotent_on_compliant_circuits() {
    let c = preprocess(&reference::and_acceptor(2)).unwrap();
    assert_eq!(preprocess(&c).unwrap(), c);
}

#[test]
fn y1_acceptor_truth_table_survives_preprocessing() {
    let c = preprocess(&reference::y1_acceptor(2)).unwrap();
    // little-endian: y = 0b01 means y₁ = 1
    let accepted: Vec<u64> = (0..4).filter(|&y| accept_probability(&c, y).unwrap() > 1.0 - 1e-12).collect();
    assert_eq!(accepted, vec![0b01, 0b11]);
    for y in [0b00, 0b10] {
        assert!(accept_probability(&c, y).unwrap() < 1e-12);
    }
}

#[test]
fn acceptance_of_trivial_circuits() {
    let identity = VerifierCircuit::new(2, 1, vec![Gate::identity(2)], 2).unwrap();
    let flip = VerifierCircuit::new(2, 1, vec![Gate::single(2, pauli_x())], 2).unwrap();
    for y in 0..4 {
        assert_eq!(accept_probability(&identity, y).unwrap(), 0.0);
        assert!((accept_probability(&flip, y).unwrap() - 1.0).abs() < 1e-15);
    }
    let y1 = reference::y1_acceptor(2);
    assert!((accept_probability(&y1, 0b01).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(accept_probability(&y1, 0b10).unwrap(), 0.0);
}

#[test]
fn minimum_satisfying_weights() {
    let q = |c| QmsaInstance::new(c, 0, 0, 0.1).unwrap();
    assert_eq!(min_satisfying_weight(&q(reference::y1_acceptor(3)), 2.0 / 3.0).unwrap(), Some(1));
    assert_eq!(min_satisfying_weight(&q(reference::and_acceptor(2)), 2.0 / 3.0).unwrap(), Some(2));
    assert_eq!(min_satisfying_weight(&q(reference::empty(2, 1)), 2.0 / 3.0).unwrap(), None);
}

#[test]
fn amplification_of_a_biased_acceptor() {
    let base = preprocess(&reference::biased_y1_acceptor(1, 0.75)).unwrap();
    let amp = amplify(&base, 3).unwrap();
    let p = accept_probability(&amp, 1).unwrap();
    let binomial = 0.75f64.powi(3) + 3.0 * 0.75f64.powi(2) * 0.25;
    assert!((binomial - 0.84375).abs() < 1e-15);
    assert!((p - 0.84375).abs() < 1e-10, "{p}");
    assert!(accept_probability(&amp, 0).unwrap() < 1e-10);
    let rec = amp.amplification.unwrap();
    assert_eq!(amp.len(), 3 * base.len() + majority_gate_count(3));
    assert_eq!(rec.majority_gates, majority_gate_count(3));
}

#[test]
fn amplifying_deterministic_circuits_changes_nothing() {
    let base = preprocess(&reference::y1_acceptor(2)).unwrap();
    let amp = amplify(&base, 3).unwrap();
    for y in 0..4 {
        assert!((accept_probability(&amp, y).unwrap() - accept_probability(&base, y).unwrap()).abs() < 1e-10);
    }
    let one = amplify(&base, 1).unwrap();
    assert_eq!(one.gates, base.gates);
    assert!(one.flags.amplified);
    assert!(amplify(&base, 2).is_err());
}

#[test]
fn monotone_reference_circuits_are_monotone() {
    for c in [reference::y1_acceptor(3), reference::and_acceptor(3), reference::or_acceptor(3)] {
        let c = preprocess(&c).unwrap();
        for y in 0..8u64 {
            if accept_probability(&c, y).unwrap() >= 2.0 / 3.0 {
                for z in 0..8u64 {
                    if z & y == y {
                        assert!(accept_probability(&c, z).unwrap() >= 2.0 / 3.0, "y={y:03b} z={z:03b}");
                    }
                }
            }
        }
    }
}

#[test]
fn invalid_gates_are_rejected() {
    let bad = Gate::new(vec![0, 1, 2], Mat::identity(8, 8));
    assert!(VerifierCircuit::new(2, 1, vec![bad], 2).is_err());
    let nonunitary = Gate::single(0, Mat::from_element(2, 2, c(1.0, 0.0)));
    assert!(VerifierCircuit::new(2, 1, vec![nonunitary], 2).is_err());
    assert!(VerifierCircuit::new(2, 1, vec![Gate::cnot(1, 1)], 2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn preprocessing_preserves_acceptance(n_proof in 1usize..=3, n_ancilla in 1usize..=2, gates in 0usize..6, seed in any::<u64>()) {
        let raw = random_circuit(n_proof, n_ancilla, gates, seed);
        let pre = preprocess(&raw).unwrap();
        prop_assert_eq!(pre.len(), raw.len() + n_proof + 1);
        prop_assert_eq!(pre.n_ancilla, n_ancilla + n_proof + 1);
        prop_assert!(pre.reads_proof_only() && pre.output_is_delayed());
        for y in 0..(1u64 << n_proof) {
            let d = (accept_probability(&raw, y).unwrap() - accept_probability(&pre, y).unwrap()).abs();
            prop_assert!(d <= 1e-12, "y={} deviation {}", y, d);
        }
    }

    #[test]
    fn majority_vote_matches_binomial(p in 0.0f64..1.0) {
        let base = preprocess(&reference::biased_y1_acceptor(1, p)).unwrap();
        let amp = amplify(&base, 3).unwrap();
        let simulated = accept_probability(&amp, 1).unwrap();
        let binomial = 3.0 * p * p * (1.0 - p) + p.powi(3);
        prop_assert!((simulated - binomial).abs() <= 1e-10);
        prop_assert!((majority_probability(p, 3) - binomial).abs() <= 1e-12);
    }
}
