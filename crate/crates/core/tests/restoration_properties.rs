use cauchon_core::diagrams::{build_w_r, enumerate_w, Diagram, Grid};
use cauchon_core::qtorus::{check_jbeta_quantum, check_q_quantum};
use cauchon_core::restoration::{
    delete_derivations, delete_derivations_through, restore, restore_through, zero_pattern,
};
use cauchon_core::{Position, QuantumMatrix, RVector, StepIndex, TorusPresentation};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn restored(n: usize) -> Vec<(Diagram, QuantumMatrix)> {
    let p = TorusPresentation::new(n);
    enumerate_w(n)
        .unwrap()
        .map(|w| {
            let m = restore(&p, &w).unwrap();
            (w, m)
        })
        .collect()
}

#[test]
fn restored_matrices_are_q_quantum() {
    for n in 1..=3 {
        let p = TorusPresentation::new(n);
        for (w, m) in restored(n) {
            let report = check_q_quantum(&p, &m);
            assert!(report.is_empty(), "w={w}: {:?}", report.violations);
        }
    }
}

#[test]
fn intermediate_matrices_are_step_quantum() {
    for n in 2..=3 {
        let p = TorusPresentation::new(n);
        let steps = StepIndex::new(n);
        for w in enumerate_w(n).unwrap() {
            for &s in steps.steps() {
                let m = restore_through(&p, &w, s).unwrap();
                assert!(check_jbeta_quantum(&p, &m, s).is_empty(), "w={w} step={s}");
            }
        }
    }
}

#[test]
fn round_trip_exhaustive() {
    for n in 1..=3 {
        let p = TorusPresentation::new(n);
        for (w, m) in restored(n) {
            assert_eq!(delete_derivations(&p, &m).unwrap(), QuantumMatrix::initial(&p, w.grid()), "w={w}");
        }
    }
}

#[test]
fn round_trip_sampled_n4() {
    let p = TorusPresentation::new(4);
    let all: Vec<Diagram> = enumerate_w(4).unwrap().collect();
    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..500 {
        let w = &all[rng.gen_range(0..all.len())];
        let m = restore(&p, w).unwrap();
        assert_eq!(delete_derivations(&p, &m).unwrap(), QuantumMatrix::initial(&p, w.grid()), "w={w}");
    }
}

#[test]
fn partial_deletion_retraces_restoration() {
    let p = TorusPresentation::new(3);
    let steps = StepIndex::new(3);
    for (w, m) in restored(3) {
        for &s in steps.steps() {
            assert_eq!(delete_derivations_through(&p, &m, s).unwrap(), restore_through(&p, &w, s).unwrap());
        }
    }
}

#[test]
fn non_vanishing_outside_diagram() {
    for n in 1..=3 {
        for (w, m) in restored(n) {
            assert!(zero_pattern(&m).is_subset(w.grid()), "w={w}");
            for pos in Position::all(n).filter(|pos| !w.contains(*pos)) {
                assert!(!m.get(pos.row, pos.col).is_zero());
            }
        }
    }
}

#[test]
fn vanishing_on_w_r() {
    for n in 1..=3 {
        let all = restored(n);
        for t in 0..=n {
            for r in RVector::all(n, t) {
                let w_r = build_w_r(&r);
                let mut containing = 0;
                for (w, m) in all.iter().filter(|(w, _)| w_r.is_subset(w.grid())) {
                    containing += 1;
                    for c in w_r.cells() {
                        assert!(m.get(c.row, c.col).is_zero(), "r={r} w={w} cell={c}");
                    }
                }
                assert!(containing >= 1, "w_r itself is a diagram");
            }
        }
    }
}

#[test]
fn full_grid_restores_to_zero() {
    for n in 1..=4 {
        let p = TorusPresentation::new(n);
        let m = restore(&p, &Diagram::full(n)).unwrap();
        assert_eq!(m, QuantumMatrix::zero(n));
        assert_eq!(zero_pattern(&m), Grid::full(n));
    }
}
