//! Binary observables, sequential measurements and measurement
//! compatibility.

pub mod compatibility;
pub mod procedure;

pub use compatibility::{
    change_frame, default_state_set, difference_observable, epsilon_exact, epsilon_from_process, epsilon_uv,
    sampled_sequential_expectation, sequential_expectation, EpsilonEstimate, ProcessEpsilon, Record,
};
pub use procedure::{BinaryObservable, MeasurementProcedure};
