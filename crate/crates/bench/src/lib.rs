//! Fixtures for the solver benchmarks in `benches/`.

use viscodg::{AssembledSystem, DgSpace, InitialData, ManufacturedCase, TriMesh};

/// Manufactured problem on an `n × n` mesh with degree `k`, assembled with
/// the default penalty.
pub struct Fixture {
    pub case: ManufacturedCase,
    pub space: DgSpace,
    pub sys: AssembledSystem,
    pub init: InitialData,
}

impl Fixture {
    pub fn new(n: usize, k: usize) -> Self {
        let case = ManufacturedCase::new();
        let space = DgSpace::new(TriMesh::structured(n).expect("mesh"), k).expect("space");
        let sys = AssembledSystem::assemble(&space, case.material(), 10.0, 1.0).expect("assembly");
        let init = InitialData::compute(&space, &sys, case.material(), &case.initial_displacement(), &case.initial_velocity())
            .expect("initial data");
        Self { case, space, sys, init }
    }
}
