pub mod acceptance;
pub mod ep;
pub mod error;
pub mod gpe;
pub mod linalg;
pub mod matrix_model;
pub mod newton;
pub mod ode;
pub mod scalar;

pub use error::{Error, Result};
