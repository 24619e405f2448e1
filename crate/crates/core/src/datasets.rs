//! Small reference sets used by the tests, examples and the CLI docs.

use crate::model::{Activity, ReferenceSet};

/// Three DMUs with two inputs and one unit output:
/// D1 = (10, 40), D2 = (15, 25), D3 = (30, 20).
pub fn three_unit() -> ReferenceSet {
    ReferenceSet::from_matrices(
        vec!["D1".into(), "D2".into(), "D3".into()],
        &[vec![10.0, 15.0, 30.0], vec![40.0, 25.0, 20.0]],
        &[vec![1.0, 1.0, 1.0]],
    )
    .expect("static data is valid")
}

/// Six DMUs with four inputs and two outputs.
pub fn six_unit() -> ReferenceSet {
    ReferenceSet::from_matrices(
        (1..=6).map(|k| format!("D{k}")).collect(),
        &[
            vec![80.0, 65.0, 83.0, 40.0, 52.0, 94.0],
            vec![600.0, 200.0, 400.0, 1000.0, 600.0, 700.0],
            vec![54.0, 97.0, 72.0, 75.0, 20.0, 36.0],
            vec![8.0, 1.0, 4.0, 7.0, 3.0, 5.0],
        ],
        &[
            vec![90.0, 58.0, 60.0, 80.0, 72.0, 96.0],
            vec![5.0, 1.0, 7.0, 10.0, 8.0, 6.0],
        ],
    )
    .expect("static data is valid")
}

/// DMU `j` of [`six_unit`] and the other five as its reference set.
pub fn six_unit_loo(j: usize) -> (ReferenceSet, Activity) {
    let all = six_unit();
    (all.without(j).expect("n > 1"), all.activity(j).clone())
}
