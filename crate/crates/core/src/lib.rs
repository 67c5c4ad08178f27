pub mod exec;
pub mod graph;
pub mod growth;
pub mod linalg;
pub mod selftest;
pub mod spectra;
pub mod subgroups;
pub mod torus;
pub mod word;
