//! Benchmark fixtures shared by the criterion targets in `benches/`.

use blf_core::catalog::{family_x, family_y};
use blf_core::FibrationDiagram;

/// Mid-sized diagrams exercising multi-circle canonicalization.
pub fn fixtures() -> Vec<FibrationDiagram> {
    vec![
        family_x(6, 3).expect("admissible").diagram,
        family_y(4, 5, 2).expect("admissible").diagram,
    ]
}
