use super::*;
use crate::haupt::j_coefficients;

fn rat(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

#[test]
fn j_satisfies_every_relation() {
    let j = j_coefficients(45);
    let r = check_solution(&j, &j, 1_000_003, Bounds::default()).unwrap();
    assert!(r.violations.is_empty());
    assert!(r.unconstrained.is_empty());
    assert!(r.checked > 50);
}

#[test]
fn perturbed_j_is_caught() {
    let mut j = j_coefficients(45);
    j[7] += 1;
    let r = check_solution(&j, &j, 1_000_003, Bounds::default()).unwrap();
    assert!(!r.violations.is_empty());
}

#[test]
fn divisor_sum_matches_definition() {
    let j = j_coefficients(20);
    let pair = CoeffPair { p: 17, cplus: j.clone(), cminus: j.iter().map(rat).collect::<Vec<_>>() };
    let d: BigRational = divisor_sum(&pair, 2, 4).unwrap();
    let want = rat(&j[8]) + rat(&j[2]) / BigRational::from_integer(2.into());
    assert_eq!(d, want);
}

#[test]
fn log_coeffs_ladders_for_j() {
    let j = j_coefficients(30);
    let pair = CoeffPair { p: 1_000_003, cplus: j.clone(), cminus: j.iter().map(rat).collect::<Vec<_>>() };
    let b = Bounds { max_r: 4, max_index: 30 };
    let p = log_coeffs(&pair, b).unwrap();
    for (m, n) in [(1, 3), (2, 5), (3, 4), (1, 10)] {
        assert_eq!(p.coeff(m + 1, n), p.coeff(m, n + 1));
    }
}

#[test]
fn affine_constraint_vanishes_on_j() {
    let j = j_coefficients(45);
    let known: BTreeMap<u32, BigRational> = (1..=45).map(|k| (k, rat(&j[k as usize]))).collect();
    for c in build_constraints(1_000_003, Bounds::default()).into_iter().filter(|c| c.kind == ConstraintKind::Vanish) {
        let a = c.affine(&known, &j).unwrap();
        assert!(a.is_constant() && a.constant.is_zero(), "{c:?}");
    }
    let mut partial = known.clone();
    partial.remove(&12);
    let a = Constraint { kind: ConstraintKind::Vanish, m: 2, n: 5 }.affine(&partial, &j).unwrap();
    assert_eq!(a.eval(&known), Some(BigRational::zero()));
}

#[test]
fn twin_solver_rejects_bad_seed() {
    let j = j_coefficients(10);
    let mut seeds: Vec<(u32, BigInt)> = (1..=5).map(|k| (k, j[k as usize].clone())).collect();
    seeds[2].1 += 3;
    let r = solve_series(Mode::Twin, &seeds, 10, Bounds { max_r: 5, max_index: 45 });
    assert!(matches!(r, Err(ReplicateError::Inconsistent { .. })), "{r:?}");
}
