use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Unified error type for the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-positive camera intrinsic: {name} = {value}")]
    NonPositiveIntrinsic { name: &'static str, value: f64 },

    #[error(
        "non-square pixels: horizontal and vertical pixel pitch differ by {relative_error:.6} \
         (tolerance {tolerance})"
    )]
    NonSquarePixels {
        relative_error: f64,
        tolerance: f64,
    },

    #[error("altitude must be finite and non-negative, got {0}")]
    InvalidAltitude(f64),

    #[error("resize plan is undefined at zero altitude")]
    ZeroAltitude,

    #[error("clamping cannot produce target dimensions >= 1")]
    DegenerateTarget,

    #[error("raster is {actual_w}x{actual_h} but the plan expects {expected_w}x{expected_h}")]
    DimensionMismatch {
        actual_w: u32,
        actual_h: u32,
        expected_w: u32,
        expected_h: u32,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate image id '{0}'")]
    DuplicateImageId(String),

    #[error("line {line}: box class {class_id} is not in the class table")]
    UnknownClassId { class_id: u32, line: usize },

    #[error("no box is covered by a class-size prior")]
    NoPriorCoveredBox,

    #[error("record '{0}' has no altitude")]
    MissingAltitude(String),

    #[error("manifest has no records")]
    EmptyManifest,

    #[error("detection references unknown image id '{0}'")]
    UnknownImageId(String),

    #[error(
        "object of {object_w}x{object_h} px cannot fit inside a {frame_w}x{frame_h} px frame"
    )]
    ObjectTooLargeForFrame {
        object_w: u32,
        object_h: u32,
        frame_w: u32,
        frame_h: u32,
    },

    #[error("could not place object {object_index} after {attempts} attempts")]
    PlacementOverflow {
        object_index: usize,
        attempts: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("speedup report requires at least one plan")]
    EmptyPlans,

    #[error("image '{image_id}': {source}")]
    WithImage {
        image_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Annotates an error with the image it occurred on.
    pub fn for_image(self, image_id: impl Into<String>) -> Self {
        Error::WithImage {
            image_id: image_id.into(),
            source: Box::new(self),
        }
    }

    /// True when the root cause is an I/O failure.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::WithImage { source, .. } => source.is_io(),
            _ => false,
        }
    }
}
