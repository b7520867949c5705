//! Configuration files, CSV and SVG artifacts, and the command line.

pub mod cli;
pub mod config;
pub mod svg;
pub mod table;

pub use config::RunConfig;
pub use svg::render_heatmap;
pub use table::{read_map_csv, write_map_csv};
