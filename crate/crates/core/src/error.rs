use std::path::PathBuf;

/// Errors produced by the saliency pipeline and its stages.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input not found: {0}")]
    InputNotFound(PathBuf),

    #[error("failed to decode image {path}: {source}")]
    Decode {
        path: PathBuf,
        source: image::ImageError,
    },

    #[error("image {width}x{height} is below the 16x16 minimum")]
    ImageTooSmall { width: u32, height: u32 },

    #[error("superpixel target {requested} out of range [{min}, {max}]")]
    SuperpixelCountOutOfRange {
        requested: usize,
        min: usize,
        max: usize,
    },

    #[error("degenerate graph: all edge weights are zero")]
    DegenerateGraph,

    #[error("isolated node {node}: zero total edge weight, cannot normalize")]
    IsolatedNode { node: usize },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("empty vertex set")]
    EmptyVertexSet,

    #[error("brute force solver limited to 20 nodes, got {0}")]
    BruteForceTooLarge(usize),

    #[error("dimension mismatch: {expected} vs {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("no map/ground-truth pairs found")]
    NoPairs,

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
