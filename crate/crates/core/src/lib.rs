pub mod cones;
pub mod harness;
pub mod instance;
pub mod interval;
pub mod kelley;
pub mod linalg;
pub mod lp;
pub mod measures;
pub mod norms;
pub mod oracle;
pub mod par;
pub mod renegar;
pub mod report;
pub mod subspace;
pub mod suites;
