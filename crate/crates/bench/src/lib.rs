//! Shared inputs for the benchmarks.

use perctree::{EdgeConfig, Vertex, Window};

pub const P: f64 = 0.8;

/// Environment used by every benchmark; fixed so runs are comparable.
pub fn env() -> EdgeConfig {
    EdgeConfig::new(7, P)
}

pub fn origin() -> Vertex {
    Vertex::new(0, 0).unwrap()
}

/// Square window of half-width `r` starting at level 0.
pub fn window(r: i64) -> Window {
    Window::new(-r, r, 0, 2 * r).unwrap()
}
