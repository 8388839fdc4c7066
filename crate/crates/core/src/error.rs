use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("map is not contractive: largest singular value {0} >= 1")]
    NotContractive(f64),

    #[error("invalid variation id {0}")]
    InvalidVariation(u8),

    #[error("divergent render: {resets} point resets over {iterations} iterations")]
    DivergentRender { resets: u64, iterations: u64 },

    #[error("need at least {needed} donor clips, got {got}")]
    NotEnoughDonors { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("missing file: {0}")]
    MissingFile(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}
