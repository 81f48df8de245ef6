//! Values are immutable and every operation is a pure function, so shared
//! inputs can be evaluated from many threads at once.

use std::sync::Arc;
use std::thread;

use bellcalc::bell::{bell_exp_alg91, bell_exp_recurrence};
use bellcalc::cost::table1;
use bellcalc::{OpCounter, Rational, Sequence};

#[test]
fn concurrent_evaluations_agree() {
    let x = Arc::new(Sequence::new(
        1,
        (1..=24i64).map(|i| Rational::new(i % 7 - 3, i)).collect(),
    ));
    let expected: Vec<Rational> = (1..=8u64)
        .map(|k| bell_exp_recurrence(&x, 24, k).value)
        .collect();

    let handles: Vec<_> = (1..=8u64)
        .map(|k| {
            let x = Arc::clone(&x);
            thread::spawn(move || {
                // each thread owns its counter; results must match the
                // single-threaded reference
                let mut counter = OpCounter::new();
                let r = bell_exp_alg91(&x, 24, k, Some(&mut counter));
                assert_eq!(Some(counter.count()), r.cost.as_ref().unwrap().measured);
                r.value
            })
        })
        .collect();

    for (handle, want) in handles.into_iter().zip(expected) {
        assert_eq!(handle.join().unwrap(), want);
    }
}

#[test]
fn concurrent_table_cells_match_serial() {
    let serial = table1(&[100, 250], &[10, 50]);
    let handles: Vec<_> = (0..4)
        .map(|_| thread::spawn(|| table1(&[100, 250], &[10, 50])))
        .collect();
    for handle in handles {
        let rows = handle.join().unwrap();
        for (a, b) in rows.iter().zip(&serial) {
            assert_eq!(a.e_percent, b.e_percent);
        }
    }
}
