//! Fixtures shared by the benchmarks in `benches/`.

use qwalk_core::noise::SgadParams;
use qwalk_core::{ChannelSpec, Geometry, WalkSetup, WalkState};

/// Line walk with `t_max = 100` (joint dimension 402) under the standard
/// bath at squeezing `r`.
pub fn line_setup(r: f64) -> WalkSetup {
    WalkSetup::noiseless(Geometry::line(100).expect("valid line"))
        .with_channel(&ChannelSpec::Sgad(SgadParams::standard_bath().with_squeezing(r)))
        .expect("valid channel")
}

/// State of [`line_setup`] after `t` steps.
pub fn line_state(r: f64, t: usize) -> WalkState {
    line_setup(r).run(t, |_| Ok(())).expect("walk runs")
}
