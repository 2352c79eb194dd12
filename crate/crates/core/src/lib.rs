pub mod branch;
pub mod cache;
pub mod elliptic;
pub mod cy;
pub mod error;
pub mod genus0;
pub mod graphs;
pub mod linear;
pub mod parallel;
pub mod params;
pub mod pipeline;
pub mod poly;
pub mod ratexpr;
pub mod series;
pub mod rational;

pub use error::{Error, Result};
