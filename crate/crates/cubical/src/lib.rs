//! Cubical homology on the integer lattice, random cubical filtrations, and
//! a Monte Carlo harness for their large-window limit behavior.

pub mod chain;
pub mod complex;
pub mod cube;
pub mod experiment;
pub mod filtration;
pub mod homology;
pub mod model;
pub mod persistence;
pub mod rng;
pub mod stats;

pub use chain::Chain;
pub use complex::CubicalSet;
pub use cube::{ElementaryCube, Window};
pub use filtration::{build_filtration, Configuration, Filtration};
pub use homology::{betti, euler_characteristic, BettiVector, BoundaryMatrix, CoefficientField};
pub use model::{sample_configuration, ModelKind, ModelSpec, SampleSeed};
pub use persistence::{
    betti_curve, lifetime_sum_from_curve, lifetime_sum_from_diagram, persistence_diagram,
    BettiCurve, LifetimeSum, PersistenceDiagram, PersistenceInterval,
};

// The guide's code blocks are compiled and run with the test suite, so the
// book cannot drift from the crate.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(cubes_and_chains, "../../../book/src/cubes-and-chains.md");
    chapter!(homology, "../../../book/src/homology.md");
    chapter!(
        filtrations_and_persistence,
        "../../../book/src/filtrations-and-persistence.md"
    );
    chapter!(random_models, "../../../book/src/random-models.md");
    chapter!(experiments, "../../../book/src/experiments.md");
}
