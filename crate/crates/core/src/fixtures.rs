//! The seven-individual, five-test example instance used in docs and demos.

use crate::model::{Configuration, TestResults};
use crate::pooling::PoolingGraph;

/// Tests of the example, zero-based. Individual 1 sits twice in test 2 and
/// individual 5 twice in test 3.
pub const FIG1_TESTS: [&[u32]; 5] = [
    &[0, 1, 2],
    &[0, 2, 4, 5],
    &[0, 1, 1, 2, 3, 6],
    &[3, 4, 5, 5, 6],
    &[3, 4, 6],
];

pub const FIG1_INFECTED: [usize; 3] = [0, 1, 4];

/// Returns `(graph, planted configuration, test results)`.
pub fn fig1() -> (PoolingGraph, Configuration, TestResults) {
    let tests: Vec<Vec<u32>> = FIG1_TESTS.iter().map(|t| t.to_vec()).collect();
    let graph = PoolingGraph::from_tests(7, 3, &tests).expect("fixture indices are in range");
    let truth = Configuration::from_support(7, &FIG1_INFECTED).expect("fixture indices are in range");
    let y = crate::model::encode(&graph, &truth).expect("fixture dimensions agree");
    (graph, truth, y)
}
