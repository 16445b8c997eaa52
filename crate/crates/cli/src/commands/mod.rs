pub mod evaluate;
pub mod extract;
pub mod measure;
pub mod report;
pub mod roc;
pub mod sweep;
pub mod synth;
