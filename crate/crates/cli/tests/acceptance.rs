use std::collections::BTreeMap;
use std::process::Command;
use std::sync::OnceLock;

use modmoon_core::haupt::{extend_class, find_seed, j_coefficients, parse_seeds, HauptSeed};
use modmoon_core::kring::{KElement, Indecomposable};
use modmoon_core::lattice::{e8, exterior_power_lattice, theta_counts};
use modmoon_core::modrep::ConcreteModule;
use modmoon_core::replicate::{check_solution, extend_cminus, Bounds};
use modmoon_core::series::PadicApprox;
use modmoon_core::sieve::{conclude, filter_inequalities, run, Conclusion, Schedule, SieveNode, Verdict, PRIMES};
use modmoon_core::supersplit::{brute_force_kind, cohomology_series, split, Kind};
use modmoon_core::{BigInt, BigRational};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const SEEDS: &str = include_str!("../../../data/haupt_seeds.tsv");

fn table() -> &'static [HauptSeed] {
    static T: OnceLock<Vec<HauptSeed>> = OnceLock::new();
    T.get_or_init(|| parse_seeds(SEEDS).unwrap())
}

fn cplus(p: u32) -> &'static [BigInt] {
    static C: OnceLock<BTreeMap<u32, Vec<BigInt>>> = OnceLock::new();
    C.get_or_init(|| {
        PRIMES
            .iter()
            .map(|&p| (p, extend_class(find_seed(table(), &format!("{p}A")).unwrap(), 100).unwrap()))
            .collect()
    })[&p]
        .as_slice()
}

fn report(n: u32, ok: bool, detail: &str) {
    println!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
}

fn modmoon(args: &[&str]) -> (bool, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_modmoon"))
        .args(args)
        .env_remove("MODMOON_CACHE_DIR")
        .output()
        .expect("binary runs");
    (out.status.success(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn criterion_1_sieve_table_at_depth_12() {
    let expected = [(71, 1), (59, 1), (47, 2), (41, 2), (31, 2), (29, 2), (23, 3), (19, 3), (17, 3), (13, 3)];
    let (ok, out) = modmoon(&["sieve", "all", "--depth", "12"]);
    let mut problems = Vec::new();
    if !ok {
        problems.push("command failed".to_string());
    }
    let rows: Vec<Vec<&str>> = out.lines().skip(1).filter(|l| !l.starts_with('#')).map(|l| l.split('\t').collect()).collect();
    let m = BigInt::from(3u64.pow(12));
    for (p, want) in expected {
        let ps = p.to_string();
        let got: Vec<Vec<BigInt>> = rows
            .iter()
            .filter(|r| r[0] == ps)
            .map(|r| r[2].split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        let count_ok = if p == 13 { got.len() >= want } else { got.len() == want };
        if !count_ok {
            problems.push(format!("p={p}: {} survivors", got.len()));
        }
        for row in table().iter().filter(|r| r.p == p) {
            let seeds = row.sieve_seeds();
            let hit = got.iter().any(|g| g.iter().zip(&seeds).all(|(a, b)| ((a - b) % &m) == BigInt::from(0)));
            if !hit {
                problems.push(format!("{} not among survivors", row.label));
            }
        }
    }
    report(1, problems.is_empty(), &format!("{problems:?}"));
    assert!(problems.is_empty(), "{problems:?}");
}

#[test]
fn criterion_2_endgame_at_depth_29() {
    let j = j_coefficients(5);
    let mut problems = Vec::new();
    for p in PRIMES {
        let c = cplus(p);
        let s = Schedule::new(p, c, Bounds::default()).unwrap();
        let (surv, _) = run(&s, 29).unwrap();
        let kept = filter_inequalities(p, &surv, c, &j).unwrap();
        let seeds = [c[1].clone(), c[2].clone(), c[4].clone(), c[5].clone()];
        if kept.len() != 1 || !kept[0].matches(&seeds) {
            problems.push(format!("p={p}: {} kept", kept.len()));
        }
        match conclude(p, &kept, c, 45) {
            Conclusion::H1Vanishes { caveat } if caveat.is_some() == (p == 13) => {}
            other => problems.push(format!("p={p}: {other:?}")),
        }
    }
    let (ok, out) = modmoon(&["verify-theorem41", "--depth", "29"]);
    if !ok || !out.contains("# status\tH1_vanishes") {
        problems.push("verify-theorem41 did not report H1_vanishes".to_string());
    }
    report(2, problems.is_empty(), &format!("{problems:?}"));
    assert!(problems.is_empty(), "{problems:?}");
}

#[test]
fn criterion_3_pair_extension_to_45() {
    let bounds = Bounds { max_r: 6, max_index: 45 };
    let mut problems = Vec::new();
    for p in PRIMES.into_iter().filter(|&p| p >= 17) {
        let c = cplus(p);
        let seeds = find_seed(table(), &format!("{p}A")).unwrap().sieve_seeds();
        match extend_cminus(seeds, c, p, 45) {
            Ok(cm) => {
                if cm[..] != c[..46] {
                    problems.push(format!("p={p}: extension differs from the pA series"));
                }
                match check_solution(&cm, c, p, bounds) {
                    Ok(r) if r.violations.is_empty() => {}
                    Ok(r) => problems.push(format!("p={p}: {} violations", r.violations.len())),
                    Err(e) => problems.push(format!("p={p}: {e}")),
                }
            }
            Err(e) => problems.push(format!("p={p}: {e}")),
        }
    }
    report(3, problems.is_empty(), &format!("{problems:?}"));
    assert!(problems.is_empty(), "{problems:?}");
}

#[test]
fn criterion_4_wedge_square_of_e8() {
    let l = exterior_power_lattice(&e8(), 2).unwrap();
    let full = std::env::var_os("MODMOON_FULL_THETA").is_some();
    let counts = theta_counts(&l, if full { 6 } else { 4 }).unwrap();
    let mut want = vec![(0, 1), (3, 2240), (4, 98280)];
    if full {
        want.extend([(5, 1790208), (6, 19138560)]);
    }
    let got: Vec<(i64, u64)> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
    let ok = l.rank() == 28 && l.det() == BigInt::from(1) && got == want;
    report(4, ok, &format!("rank {} det {} counts {got:?}", l.rank(), l.det()));
    assert!(ok);
}

fn as_element(p: u32, m: &ConcreteModule) -> KElement {
    let d = m.decompose().unwrap();
    KElement::from_ints(p, d.n_triv as i64, d.n_reg as i64, d.n_i as i64).unwrap()
}

#[test]
fn criterion_5_module_oracles() {
    let mut problems = Vec::new();
    for p in [3u32, 5, 7] {
        for (which, m) in [
            (Indecomposable::Regular, ConcreteModule::regular(p).unwrap()),
            (Indecomposable::Augmentation, ConcreteModule::augmentation(p).unwrap()),
        ] {
            let x = KElement::basis(p, which).unwrap();
            for n in 1..=6u32 {
                if as_element(p, &m.exterior_power(n as usize).unwrap()) != x.lambda_n(n).unwrap() {
                    problems.push(format!("p={p} {which:?} lambda^{n}"));
                }
                if as_element(p, &m.symmetric_power(n as usize).unwrap()) != x.sym_n(n).unwrap() {
                    problems.push(format!("p={p} {which:?} sym^{n}"));
                }
            }
        }
    }

    let module = |p: u32, k: [u8; 3]| {
        let mut m: Option<ConcreteModule> = None;
        for (count, base) in k.into_iter().zip([
            ConcreteModule::trivial(p).unwrap(),
            ConcreteModule::regular(p).unwrap(),
            ConcreteModule::augmentation(p).unwrap(),
        ]) {
            for _ in 0..count {
                m = Some(match m {
                    None => base.clone(),
                    Some(acc) => acc.direct_sum(&base).unwrap(),
                });
            }
        }
        m.unwrap()
    };
    let pair = (prop::sample::select(vec![3u32, 5, 7]), [0u8..3, 0..3, 0..3], [0u8..3, 0..3, 0..3])
        .prop_filter("nonzero", |(_, a, b)| a.iter().any(|&x| x > 0) && b.iter().any(|&x| x > 0));
    let mut runner = TestRunner::new(Config { cases: 50, failure_persistence: None, ..Config::default() });
    let kunneth = runner.run(&pair, |(p, a, b)| {
        let (ma, mb) = (module(p, a), module(p, b));
        let t = ma.tensor(&mb).unwrap();
        let (a0, a1) = ma.tate_cohomology().unwrap();
        let (b0, b1) = mb.tate_cohomology().unwrap();
        prop_assert_eq!(t.tate_cohomology().unwrap(), (a0 * b0 + a1 * b1, a0 * b1 + a1 * b0));
        prop_assert_eq!(as_element(p, &t), as_element(p, &ma).mul(&as_element(p, &mb)).unwrap());
        Ok(())
    });
    if let Err(e) = kunneth {
        problems.push(format!("tensor pairs: {e}"));
    }
    report(5, problems.is_empty(), &format!("{problems:?}"));
    assert!(problems.is_empty(), "{problems:?}");
}

#[test]
fn criterion_6_algebra_oracles() {
    let mut problems = Vec::new();
    for p in [3, 5] {
        for kind in Kind::ALL {
            let brute = brute_force_kind(kind, p, 6).unwrap();
            if brute != cohomology_series(kind, p, 6).unwrap() {
                problems.push(format!("p={p} {}", kind.name()));
            }
        }
    }
    report(6, problems.is_empty(), &format!("{problems:?}"));
    assert!(problems.is_empty(), "{problems:?}");
}

#[test]
fn criterion_7_split_of_3b_and_6b() {
    let t = |name: &str| find_seed(table(), name).unwrap().coeffs.clone();
    let (ordinary, sup) = split(&t("3B"), &t("6B")).unwrap();
    let series = |m: &BTreeMap<i32, BigInt>| (-1..=5).filter(|n| *n != 0).map(|n| m[&n].to_string()).collect::<Vec<_>>();
    let (o, s) = (series(&ordinary), series(&sup));
    let ok = o == ["1", "66", "144", "561", "2784", "5568"] && s == ["0", "12", "220", "804", "1596", "6952"];
    report(7, ok, &format!("ordinary {o:?} super {s:?}"));
    assert!(ok);
}

#[derive(Clone, Debug)]
enum Expr {
    Leaf { residue: i64, prec: u8, lift: i64 },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Div3(Box<Expr>),
    DivInt(Box<Expr>, i64),
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = (-500i64..500, 0u8..=12, -20i64..20).prop_map(|(residue, prec, lift)| Expr::Leaf { residue, prec, lift });
    leaf.prop_recursive(5, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), 1u32..=4).prop_map(|(a, e)| Expr::Pow(Box::new(a), e)),
            inner.clone().prop_map(|a| Expr::Div3(Box::new(a))),
            (inner, prop::sample::select(vec![-6i64, -2, 2, 3, 5, 9])).prop_map(|(a, d)| Expr::DivInt(Box::new(a), d)),
        ]
    })
}

fn is_3_integral(x: &BigRational) -> bool {
    x.denom() % BigInt::from(3) != BigInt::from(0)
}

fn rpow(x: &BigRational, k: u32) -> BigRational {
    (0..k).fold(BigRational::from_integer(BigInt::from(1)), |acc, _| acc * x)
}

fn agrees(exact: &BigRational, u: &PadicApprox) -> bool {
    if u.prec() == 0 {
        return true;
    }
    let m = BigInt::from(3u64.pow(u.prec() as u32));
    is_3_integral(exact) && (exact.numer() - exact.denom() * BigInt::from(u.residue())) % m == BigInt::from(0)
}

/// Exact value and approximation of every node, checked on the way up. Once an exact
/// quotient leaves the 3-adic integers the approximation side is dropped (`None`).
fn check(e: &Expr) -> Result<(BigRational, Option<PadicApprox>), String> {
    let int = |n: i64| BigRational::from_integer(BigInt::from(n));
    let (exact, approx) = match e {
        Expr::Leaf { residue, prec, lift } => {
            let exact = residue + 3i64.pow(*prec as u32) * lift;
            (int(exact), Some(PadicApprox::new(*residue as i128, *prec)))
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            let ((x, px), (y, py)) = (check(a)?, check(b)?);
            let exact = match e {
                Expr::Add(..) => &x + &y,
                Expr::Sub(..) => &x - &y,
                _ => &x * &y,
            };
            let approx = px.zip(py).map(|(u, v)| match e {
                Expr::Add(..) => u.add(&v),
                Expr::Sub(..) => u.sub(&v),
                _ => u.mul(&v),
            });
            (exact, approx)
        }
        Expr::Neg(a) => {
            let (x, px) = check(a)?;
            (-x, px.map(|u| u.neg()))
        }
        Expr::Pow(a, k) => {
            let (x, px) = check(a)?;
            (rpow(&x, *k), px.map(|u| u.pow_sharp(*k)))
        }
        Expr::Div3(a) | Expr::DivInt(a, _) => {
            let (x, px) = check(a)?;
            let d = if let Expr::DivInt(_, d) = e { *d } else { 3 };
            let q = x / int(d);
            let approx = match px {
                None => None,
                Some(u) => {
                    let r = if d == 3 { u.div3() } else { u.div_int(d) };
                    match r {
                        Ok(v) if is_3_integral(&q) => Some(v),
                        Ok(v) if v.prec() > 0 => return Err(format!("{u:?} / {d} claims {v:?}")),
                        Err(_) if is_3_integral(&q) => return Err(format!("refused division of {u:?} by {d}")),
                        _ => None,
                    }
                }
            };
            (q, approx)
        }
    };
    match approx {
        Some(u) if !agrees(&exact, &u) => Err(format!("{exact} vs {u:?}")),
        _ => Ok((exact, approx)),
    }
}

#[test]
fn criterion_8_padic_soundness_and_true_branch() {
    let mut problems = Vec::new();
    let mut runner = TestRunner::new(Config { cases: 10_000, failure_persistence: None, ..Config::default() });
    let trees = runner.run(&expr(), |e| {
        if let Err(msg) = check(&e) {
            return Err(TestCaseError::fail(format!("{e:?}: {msg}")));
        }
        Ok(())
    });
    if let Err(e) = trees {
        problems.push(format!("expression trees: {e}"));
    }
    for p in PRIMES {
        let c = cplus(p);
        let s = Schedule::new(p, c, Bounds::default()).unwrap();
        let seeds = [c[1].clone(), c[2].clone(), c[4].clone(), c[5].clone()];
        for level in 1..=29 {
            if s.evaluate(&SieveNode::containing(&seeds, level)) != Verdict::Survives {
                problems.push(format!("true branch of p={p} pruned at level {level}"));
            }
        }
    }
    report(8, problems.is_empty(), &format!("{problems:?}"));
    assert!(problems.is_empty(), "{problems:?}");
}
