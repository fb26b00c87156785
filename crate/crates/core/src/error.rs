use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing required column `{0}`")]
    MissingColumn(String),

    #[error("duplicate individual: family `{fam_id}` already has ID `{indiv_id}`")]
    DuplicateIndividual { fam_id: String, indiv_id: String },

    #[error("family `{fam_id}`: {message}")]
    InvalidPedigree { fam_id: String, message: String },

    #[error("row {row}: {message}")]
    InvalidRow { row: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no variable with positive weight is available for the sort key")]
    NoWeightedVariable,

    #[error("pair references unknown family `{0}`")]
    UnknownFamily(String),

    #[error("partitions cover different family universes: {0}")]
    UniverseMismatch(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("missing penetrance entry for profile `{profile}`, cancer `{cancer}`, sex {sex}")]
    MissingPenetrance {
        profile: String,
        cancer: String,
        sex: String,
    },

    #[error("{0}")]
    EmptyInput(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Configuration and usage problems, as opposed to problems with the data.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnknownVariable(_) | Error::MissingPenetrance { .. }
        )
    }
}
