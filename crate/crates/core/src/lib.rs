pub mod audit;
pub mod error;
pub mod filtration;
pub mod graded;
pub mod intlat;
pub mod lattice;
pub mod linalg;
pub mod measure;
pub mod models;
pub mod real;
