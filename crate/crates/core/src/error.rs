use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("letter index {0} outside the alphabet")]
    LetterOutOfRange(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("duplicate or empty generator name `{0}`")]
    BadGeneratorName(String),
    #[error("word `{0}` is not freely cyclically reduced")]
    NotCyclicallyReduced(String),
    #[error("operation needs a nontrivial word")]
    TrivialWord,
    #[error("`{word}` lies in the elementary subgroup of U (common root `{root}`)")]
    ElementaryWitness { word: String, root: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("budget refused: {0}")]
    Budget(String),
    #[error("word `{0}` is not in the image of the encoding")]
    NotInImage(String),
    #[error("language backend: {0}")]
    Language(String),
    #[error("chain generation: {0}")]
    Chain(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
