pub mod error;
pub mod linalg;
pub mod seeding;
pub mod symplectic;
pub mod base;
pub mod cocycle;
pub mod holonomy;
pub mod diagnostics;
