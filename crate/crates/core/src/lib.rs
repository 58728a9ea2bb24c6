pub mod cli;
pub mod expansion;
pub mod finite_models;
pub mod ground_solver;
pub mod normal_forms;
pub mod prover;
pub mod sound_fn;
pub mod syntax;
