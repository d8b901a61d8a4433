//! Exact exterior calculus for hyperKahler structures, twists and the
//! hyperKahler/quaternionic Kahler correspondence.

pub mod catalog;
pub mod chart;
pub mod correspondence;
pub mod coeff;
pub mod error;
pub mod expr;
pub mod forms;
pub mod hk;
pub mod jet;
pub mod linalg;
pub mod models;
pub mod pipeline;
pub mod poly;
pub mod rational;
pub mod relations;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod twist;
pub mod verify;

pub use chart::{Chart, Frame};
pub use coeff::CoefficientFunction;
pub use error::{Error, Result};
pub use forms::{DifferentialForm, EndomorphismField, MetricTensor, Point, VectorField};
pub use rational::Rational;
pub use report::{CheckEntry, Status, VerificationReport};
