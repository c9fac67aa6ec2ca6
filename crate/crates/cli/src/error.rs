use thermal_vitals::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// 2 for bad arguments or configuration, 3 for bad or insufficient data.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Core(e) => match e {
                CoreError::Spec(_)
                | CoreError::Init(_)
                | CoreError::Bounds(_)
                | CoreError::Band(_)
                | CoreError::BandResolution { .. }
                | CoreError::Argument(_) => 2,
                CoreError::Io { .. }
                | CoreError::Format(_)
                | CoreError::Corrupt(_)
                | CoreError::InvalidHeader(_)
                | CoreError::Input(_)
                | CoreError::Length { .. }
                | CoreError::NotReady { .. }
                | CoreError::Data(_)
                | CoreError::Csv(_)
                | CoreError::Json(_) => 3,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
