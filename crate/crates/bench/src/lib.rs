//! Shared fixtures for the criterion benchmarks.

use swapcluster::harness::{generate, GeneratorKind, GeneratorSpec};
use swapcluster::{Instance, ObjectiveSpec};

/// Uniform-cube instance with candidates at the points.
pub fn cube_instance(n: usize, k: usize, seed: u64) -> Instance {
    generate(
        &GeneratorSpec {
            kind: GeneratorKind::UniformCube { d: 2, n },
            seed,
        },
        ObjectiveSpec::Lq { q: 2.0, k },
    )
    .expect("generator parameters are valid")
}
