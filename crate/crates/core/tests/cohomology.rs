use modmoon_core::supersplit::{brute_force_kind, cohomology_series, Kind};

#[test]
fn closed_forms_match_brute_force() {
    for p in [3, 5] {
        for kind in Kind::ALL {
            let t = std::time::Instant::now();
            let b = brute_force_kind(kind, p, 6).unwrap();
            eprintln!("p={p} {} {:?} {:?}", kind.name(), b.dims, t.elapsed());
            assert_eq!(b, cohomology_series(kind, p, 6).unwrap(), "p={p} {}", kind.name());
        }
    }
}
