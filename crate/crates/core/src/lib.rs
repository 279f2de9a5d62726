pub mod disaster;
pub mod evaluation;
pub mod fixture;
pub mod format;
pub mod model;
pub mod rational;
pub mod solver;
pub mod topology;
