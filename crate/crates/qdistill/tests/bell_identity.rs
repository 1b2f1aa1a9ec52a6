//! A Clifford on Alice's half of a Bell bundle equals its transpose on
//! Bob's half. With the H/S/CNOT/Pauli gate set the transpose is the
//! reversed gate sequence (every generator here is symmetric up to a global
//! phase), so the two circuits must produce identical signed stabilizer
//! groups.

use qdistill::tableau::{BellRegister, Gate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_circuit(n: usize, len: usize, rng: &mut ChaCha8Rng) -> Vec<(Gate, Vec<usize>)> {
    let mut gates = Vec::with_capacity(len);
    for _ in 0..len {
        let gate = match rng.random_range(0..6) {
            0 => Gate::H,
            1 => Gate::S,
            2 => Gate::X,
            3 => Gate::Y,
            4 => Gate::Z,
            _ => Gate::Cnot,
        };
        let targets = if gate == Gate::Cnot && n > 1 {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n);
            while b == a {
                b = rng.random_range(0..n);
            }
            vec![a, b]
        } else if gate == Gate::Cnot {
            vec![0, 0] // degenerate; skipped below
        } else {
            vec![rng.random_range(0..n)]
        };
        if gate == Gate::Cnot && targets[0] == targets[1] {
            continue;
        }
        gates.push((gate, targets));
    }
    gates
}

#[test]
fn bell_state_matrix_identity_for_200_random_cliffords() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..200 {
        let n = rng.random_range(1..=6);
        let circuit = random_circuit(n, 12 + 3 * n, &mut rng);

        // (C ⊗ I) applied to Alice's half
        let mut left = BellRegister::new(n).unwrap();
        for (gate, targets) in &circuit {
            left.tab.apply(*gate, targets).unwrap();
        }

        // (I ⊗ C^T): reversed sequence on Bob's half
        let mut right = BellRegister::new(n).unwrap();
        for (gate, targets) in circuit.iter().rev() {
            let shifted: Vec<usize> = targets.iter().map(|&q| n + q).collect();
            right.tab.apply(*gate, &shifted).unwrap();
        }

        let lhs = left.tab.canonical_stabilizers();
        let rhs = right.tab.canonical_stabilizers();
        assert_eq!(lhs, rhs, "trial {trial}, n={n}, circuit {circuit:?}");
    }
}
