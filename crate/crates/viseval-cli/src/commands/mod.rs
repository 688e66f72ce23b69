pub mod corrupt;
pub mod evaluate;
pub mod pairs;
pub mod report;
pub mod stats;
pub mod synth;
