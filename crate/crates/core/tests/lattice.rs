use modmoon_core::lattice::{e8, exterior_power_lattice, theta_counts};
use modmoon_core::BigInt;

#[test]
fn wedge_square_of_e8() {
    let l = exterior_power_lattice(&e8(), 2).unwrap();
    assert_eq!(l.rank(), 28);
    assert_eq!(l.det(), BigInt::from(1));
    assert!(!l.is_even());
    let t = std::time::Instant::now();
    let c = theta_counts(&l, 4).unwrap();
    eprintln!("norm<=4 took {:?}", t.elapsed());
    assert_eq!(c.get(&1), None);
    assert_eq!(c.get(&2), None);
    assert_eq!(c[&3], 2240);
    assert_eq!(c[&4], 98280);
}

#[test]
#[ignore]
fn wedge_square_of_e8_norms_5_6() {
    let l = exterior_power_lattice(&e8(), 2).unwrap();
    let t = std::time::Instant::now();
    let c = theta_counts(&l, 6).unwrap();
    eprintln!("norm<=6 took {:?}", t.elapsed());
    assert_eq!(c[&5], 1790208);
    assert_eq!(c[&6], 19138560);
}
