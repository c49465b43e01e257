use std::time::Instant;

use modmoon_core::haupt::{extend_class, j_coefficients, parse_seeds};
use modmoon_core::replicate::{check_solution, extend_cminus, Bounds};
use modmoon_core::BigInt;

const ROW: &str = "Γ0(17)+\t17\t1,7,14,29,50,92\nΓ0(34)+\t17\t1,3,2,5,6,12\n";

#[test]
fn class_17a_matches_j_identity() {
    let seeds = parse_seeds(ROW).unwrap();
    let t = Instant::now();
    let g = extend_class(&seeds[0], 40).unwrap();
    eprintln!("extend 40 took {:?}", t.elapsed());
    assert_eq!(g[17], BigInt::from(11581));
    let j = j_coefficients(2);
    for n in 1..=2 {
        assert_eq!(j[n], &g[n] + BigInt::from(17) * &g[17 * n]);
    }
}

#[test]
fn pair_extension_for_17() {
    let seeds = parse_seeds(ROW).unwrap();
    let cplus = extend_class(&seeds[0], 120).unwrap();
    let t = Instant::now();
    let own = extend_cminus(seeds[0].sieve_seeds(), &cplus, 17, 45).unwrap();
    eprintln!("pair 45 took {:?}", t.elapsed());
    assert_eq!(own[..], cplus[..46]);
    let other = extend_cminus(seeds[1].sieve_seeds(), &cplus, 17, 45).unwrap();
    assert_eq!(other[3], BigInt::from(5));
    let r = check_solution(&other, &cplus, 17, Bounds::default()).unwrap();
    assert!(r.violations.is_empty());
    eprintln!("unconstrained {}", r.unconstrained.len());
}
