use thiserror::Error;
use vecticon_core::dataset::DatasetError;
use vecticon_core::metrics::MetricsError;
use vecticon_core::model::ModelError;
use vecticon_core::sampler::SampleError;
use vecticon_core::svg::SvgError;
use vecticon_core::text::TextError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Corpus(#[from] DatasetError),
    #[error(transparent)]
    Svg(#[from] SvgError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{0}")]
    Serve(String),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.as_ref().display().to_string();
        move |source| CliError::Io { path, source }
    }

    /// Stable category name printed ahead of the message.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Corpus(_) | CliError::Text(_) => "corpus",
            CliError::Svg(_) => "svg",
            CliError::Model(ModelError::Checkpoint(_)) => "checkpoint",
            CliError::Model(_) => "model",
            CliError::Sample(_) => "sample",
            CliError::Metrics(_) => "metrics",
            CliError::Serve(_) => "serve",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }

    /// `error[category]: message` with newlines folded.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error[{}]: {msg}", self.category())
    }
}
