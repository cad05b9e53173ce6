pub mod cli;
pub mod conditions;
pub mod error;
pub mod formulas;
pub mod generator;
pub mod ginv;
pub mod matrix;
pub mod oracle;
pub mod report;
