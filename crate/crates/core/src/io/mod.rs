//! Document format and SVG rendering.

pub mod format;
pub mod render;

pub use format::{isomorphism_key, parse_diagram, serialize_diagram, FormatError};
pub use render::render;
