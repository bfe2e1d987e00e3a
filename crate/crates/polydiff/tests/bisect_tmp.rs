use polydiff::verify::{run_suite, SuiteConfig};

fn timed(trials: u32) {
    let cfg = SuiteConfig {
        trials,
        ..SuiteConfig::default()
    };
    let t0 = std::time::Instant::now();
    let report = run_suite("insertion", &cfg).unwrap();
    println!(
        "trials={trials}: {} checks in {:?}",
        report.checks.len(),
        t0.elapsed()
    );
}

#[test]
fn stage_a() {
    timed(999);
}

#[test]
fn stage_b() {
    timed(998);
}

#[test]
fn stage_c() {
    timed(997);
}

#[test]
fn stage_d() {
    timed(996);
}

use polydiff::model::{nested_bracket_concrete, phi_concrete, symbolic_points, ConcretePolyDiff};
use polydiff::phi::TableWeights;
use polydiff::scalar::{rat, Scalar};
use polydiff::seq::Idx;

#[test]
fn one_deep_case() {
    let pts1 = symbolic_points(1);
    let j4: Vec<Idx> = (0..4u16).map(|o| Idx::new(11, o)).collect();
    let o_b = Idx::new(12, 0);
    let u1 = Idx::new(9, 0);
    let u2 = Idx::new(9, 1);
    let mut universe = j4.clone();
    universe.extend([o_b, u1, u2]);
    let mut w = TableWeights::new();
    let mut c = 0i64;
    for &x in &universe {
        c += 1;
        w.set_p(0, x, Scalar::from_rat(rat(c % 5 - 2, 1 + (c % 3))));
        for &y in &universe {
            if x != y {
                c += 1;
                w.set_c(x, y, Scalar::from_rat(rat(c % 7 - 3, 1 + (c % 2))));
            }
        }
    }
    for n in [3usize, 4] {
        let word: Vec<Idx> = j4[..n].to_vec();
        let v = ConcretePolyDiff::one();
        let t0 = std::time::Instant::now();
        let boxed: Vec<Box<dyn Fn(&ConcretePolyDiff) -> ConcretePolyDiff>> = word
            .iter()
            .chain([&o_b])
            .map(|&i| {
                let w = &w;
                let pts = &pts1;
                Box::new(move |x: &ConcretePolyDiff| phi_concrete(i, w, pts, x))
                    as Box<dyn Fn(&ConcretePolyDiff) -> ConcretePolyDiff>
            })
            .collect();
        let refs: Vec<&dyn Fn(&ConcretePolyDiff) -> ConcretePolyDiff> =
            boxed.iter().map(|b| b.as_ref()).collect();
        let lhs = nested_bracket_concrete(&refs, &v);
        println!("depth {n}: {:?}, terms {}", t0.elapsed(), lhs.terms.len());
    }
}

use polydiff::model::{realize, simple_fraction};
use polydiff::phi::phi_nested_bracket;
use polydiff::ratfunc::{RPoint, RatFunc};
use polydiff::scalar::{rat_int, Rat, Var};
use polydiff::seq::{Key, Seq};
use polydiff::shuffle::PolyDiff;
use num_traits::One;
use rand_core::{RngCore, SeedableRng};

#[test]
fn replicate_nested_block() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let mut rat_small = |rng: &mut rand_chacha::ChaCha8Rng| -> Rat {
        let n = (rng.next_u64() % 13) as i64 - 6;
        let d = (rng.next_u64() % 3) as i64 + 1;
        rat(n, d)
    };
    let pts1 = symbolic_points(1);
    let j4: Vec<Idx> = (0..4u16).map(|o| Idx::new(11, o)).collect();
    let o_b = Idx::new(12, 0);
    let u1 = Idx::new(9, 0);
    let u2 = Idx::new(9, 1);
    let mut big_universe = j4.clone();
    big_universe.extend([o_b, u1, u2]);
    for &c_val in &[-1i64] {
        for a_choice in 0..1 {
            let a_val = rat_int(2);
            let _ = a_choice;
            let c_hat = rat(5, 3);
            let mut w = TableWeights::new();
            for &x in &big_universe {
                w.set_p(0, x, Scalar::from_rat(rat_small(&mut rng)));
                for &y in &big_universe {
                    if x == y {
                        continue;
                    }
                    let both_j = j4.contains(&x) && j4.contains(&y);
                    let v = if both_j {
                        Scalar::from_rat(a_val.clone())
                    } else if j4.contains(&x) && y == o_b {
                        Scalar::from_rat(rat_int(c_val))
                    } else if x == o_b && j4.contains(&y) {
                        Scalar::from_rat(c_hat.clone())
                    } else {
                        Scalar::from_rat(rat_small(&mut rng))
                    };
                    w.set_c(x, y, v);
                }
            }
            let formal_tests = [
                PolyDiff::unit(1),
                PolyDiff::zeta(Key(vec![Seq(vec![u1])])),
                PolyDiff::zeta(Key(vec![Seq(vec![u1, u2])])),
            ];
            let pin = |v: &ConcretePolyDiff| -> ConcretePolyDiff {
                v.subst_coeffs(u1, &RPoint::C(rat(9, 2)))
                    .and_then(|v| v.subst_coeffs(u2, &RPoint::C(rat(-7, 3))))
                    .unwrap()
            };
            for n in 3..=4usize {
                let word: Vec<Idx> = j4[..n].to_vec();
                let tail = word[n - 1];
                for (ti, a_f) in formal_tests.iter().enumerate() {
                    let t0 = std::time::Instant::now();
                    let ra = pin(&realize(a_f, &pts1).unwrap());
                    let boxed: Vec<Box<dyn Fn(&ConcretePolyDiff) -> ConcretePolyDiff>> = word
                        .iter()
                        .chain([&o_b])
                        .map(|&i| {
                            let w = &w;
                            let pts = &pts1;
                            Box::new(move |v: &ConcretePolyDiff| pin(&phi_concrete(i, w, pts, v)))
                                as Box<dyn Fn(&ConcretePolyDiff) -> ConcretePolyDiff>
                        })
                        .collect();
                    let refs: Vec<&dyn Fn(&ConcretePolyDiff) -> ConcretePolyDiff> =
                        boxed.iter().map(|b| b.as_ref()).collect();
                    let lhs = nested_bracket_concrete(&refs, &ra);
                    let t1 = t0.elapsed();
                    println!("n={n} test={ti}: lhs {t1:?}");
                    let mut pref = simple_fraction(Var::T(o_b), &RPoint::V(Var::T(tail)));
                    for (m, &k) in word.iter().enumerate() {
                        if m == n - 1 {
                            continue;
                        }
                        let mut factor = simple_fraction(Var::T(o_b), &RPoint::V(Var::T(k)));
                        factor.scale_rat(&rat_int(c_val));
                        for &l in &word[m + 1..] {
                            let mut t = simple_fraction(Var::T(l), &RPoint::V(Var::T(k)));
                            t.scale_rat(&a_val);
                            factor = factor.add(&t);
                        }
                        pref = pref.mul(&factor);
                    }
                    let mut head_term = pin(&phi_concrete(o_b, &w, &pts1, &ra));
                    for &i in &word {
                        head_term = head_term.mul_dt(i);
                    }
                    head_term = head_term.scale_rat(&rat_int(c_val));
                    let mut tail_term = ConcretePolyDiff::zero();
                    for &i in &word {
                        let mut t = pin(&phi_concrete(i, &w, &pts1, &ra));
                        for &k in &word {
                            if k != i {
                                t = t.mul_dt(k);
                            }
                        }
                        t = t.mul_dt(o_b);
                        tail_term = tail_term.add(&t);
                    }
                    tail_term = tail_term.scale_rat(&c_hat);
                    let rhs = head_term.add(&tail_term).mul_func(&pref);
                    let t2 = t0.elapsed();
                    println!("n={n} test={ti}: rhs {:?}", t2 - t1);
                    let ok = lhs.eq_exact(&rhs);
                    let t3 = t0.elapsed();
                    println!(
                        "n={n} test={ti}: lhs {t1:?}, rhs {:?}, eq {:?} -> {ok}",
                        t2 - t1,
                        t3 - t2
                    );
                }
            }
        }
    }
}
