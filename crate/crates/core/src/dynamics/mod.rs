//! Hamiltonian evolution in the instant, front and extended front forms,
//! covariant proper-time evolution, Poisson brackets and drift monitoring.

pub mod evolve;
pub mod export;
pub mod hamiltonian;
pub mod jet;
pub mod quantities;
pub mod state;

pub use evolve::{
    covariant_acceleration, evolve, evolve_covariant, evolve_nonrel, monitor, DriftEntry, DriftReport,
    EvolveOptions, Sample, StateEvent, Trajectory,
};
pub use hamiltonian::{
    hamiltonian_extended, hamiltonian_front, hamiltonian_instant, hamiltonian_jet, hamiltonian_nonrel,
};
pub use jet::Jet;
pub use quantities::{charge_jet, poisson_bracket, ConservedQuantity};
pub use state::{Form, PhaseSpaceState};
