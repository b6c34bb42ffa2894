//! Fixtures shared by the criterion benchmarks.

use relay_bounds::DiscreteChannel;

/// A fixed 3×3 channel with all entries positive.
pub fn ternary_channel() -> DiscreteChannel {
    DiscreteChannel::new(vec![
        vec![0.7, 0.2, 0.1],
        vec![0.15, 0.6, 0.25],
        vec![0.05, 0.25, 0.7],
    ])
    .expect("rows are stochastic")
}
