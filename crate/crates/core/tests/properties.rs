//! Property tests across the evaluator, catalog and transforms.

use num_rational::BigRational;
use proptest::prelude::*;

use oldsum::catalog::catalog_entries;
use oldsum::eval::{eval_exact, eval_predicate, guard_fires};
use oldsum::numeric;
use oldsum::numeric_eval::eval_numeric;
use oldsum::transform::{apply, input_form, input_names, Op};
use oldsum::verify::{numeric_threshold, verify_instance, Mode};
use oldsum::{Error, ParamBinding, SumExpr};

fn binding_for(entry: usize, picks: &[usize], n_cap: i64) -> ParamBinding {
    let e = &catalog_entries()[entry];
    let mut b = ParamBinding::new();
    for (i, (name, vals)) in e.ranges.iter().enumerate() {
        let pool: Vec<&BigRational> = vals.iter().filter(|v| **v <= BigRational::from_integer(n_cap.into())).collect();
        b.set(name, pool[picks[i] % pool.len()].clone());
    }
    b
}

fn arb_entry() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (0..catalog_entries().len(), proptest::collection::vec(0usize..64, 4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn numeric_tracks_exact((entry, picks) in arb_entry(), digits in prop::sample::select(vec![20u32, 30, 50])) {
        let e = &catalog_entries()[entry];
        let b = binding_for(entry, &picks, 10);
        prop_assume!(eval_predicate(&e.identity.validity, &b).unwrap_or(false));
        match eval_exact(&e.identity.lhs, &b) {
            Ok(x) => {
                let f = eval_numeric(&e.identity.lhs, &b, digits).unwrap();
                let rel = numeric::relerr(&f, &x.to_float(digits + 10));
                prop_assert!(rel <= numeric_threshold(digits), "{} {b}: {}", e.id(), rel);
            }
            Err(Error::OffGrid(_)) => {}
            Err(err) => prop_assert!(false, "{} {b}: {err}", e.id()),
        }
    }

    #[test]
    fn exactly_one_guard_fires((entry, picks) in arb_entry()) {
        let e = &catalog_entries()[entry];
        let b = binding_for(entry, &picks, 15);
        let fired = e.identity.rhs.iter().filter(|c| guard_fires(&c.guard, &b).unwrap()).count();
        prop_assert_eq!(fired, 1);
    }

    #[test]
    fn empty_sums_vanish(lo in 0i64..20, gap in 1i64..5, (entry, _picks) in arb_entry()) {
        let e = &catalog_entries()[entry];
        let body = e.identity.lhs.clone();
        let s = SumExpr::sum("zz", SumExpr::int(lo), SumExpr::int(lo - gap), body);
        let b = binding_for(entry, &[0, 0, 0, 0], 15);
        prop_assert!(eval_exact(&s, &b).unwrap().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn emitted_identities_hold(input in 0usize..6, op in 0usize..7, v2 in 0i64..5, n in 0i64..9) {
        let sf = input_form(input_names()[input]).unwrap();
        let v = SumExpr::rat(BigRational::new(v2.into(), 2.into()));
        let ids = match apply(&sf, Op::all()[op], None, Some(v)) {
            Ok(ids) => ids,
            Err(Error::ShapeMismatch(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        for id in ids {
            let mut b = ParamBinding::new();
            for p in &id.params {
                let val = match p.name.as_str() {
                    "n" => BigRational::from_integer(n.into()),
                    "u" => BigRational::from_integer(3.into()),
                    _ => BigRational::new(1.into(), 2.into()),
                };
                b.set(&p.name, val);
            }
            let r = verify_instance(&id, &b, Mode::Exact);
            prop_assert!(!r.status.is_bad(), "{} {b}: {:?}", id.id, r.status);
        }
    }
}
