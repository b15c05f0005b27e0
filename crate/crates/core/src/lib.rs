pub mod complex;
pub mod error;
pub mod calculus;
pub mod critical;
pub mod homology;
pub mod solver;
pub mod harmonic;
pub mod fixtures;
pub mod moves;
pub mod io;
pub mod commands;
pub mod cli;
