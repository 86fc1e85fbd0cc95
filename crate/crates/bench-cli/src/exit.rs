//! Exit status mapping.

use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_EXACTNESS: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{failed} of {total} selections differ from the oracle")]
    Exactness { failed: usize, total: usize },
}

fn core_code(e: &gvr_core::Error) -> u8 {
    use gvr_core::Error as E;
    match e {
        E::Step { source, .. } => core_code(source),
        E::Io(_) | E::Json(_) | E::Csv(_) | E::BadMagic | E::Truncated { .. } | E::Format(_) => {
            EXIT_IO
        }
        E::Invariant(_) => EXIT_EXACTNESS,
        _ => EXIT_USAGE,
    }
}

/// Status for an error, from the first cause that has a known category.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return match e {
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Exactness { .. } => EXIT_EXACTNESS,
            };
        }
        if let Some(e) = cause.downcast_ref::<gvr_core::Error>() {
            return core_code(e);
        }
        if cause.is::<std::io::Error>() || cause.is::<csv::Error>() || cause.is::<serde_json::Error>() {
            return EXIT_IO;
        }
        if cause.is::<toml::de::Error>() || cause.is::<clap::Error>() {
            return EXIT_USAGE;
        }
    }
    EXIT_USAGE
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::Context;

    #[test]
    fn categories() {
        let io: anyhow::Error = std::io::Error::other("disk").into();
        assert_eq!(exit_code(&io), EXIT_IO);
        let wrapped = Err::<(), _>(gvr_core::Error::BadMagic)
            .context("reading row")
            .unwrap_err();
        assert_eq!(exit_code(&wrapped), EXIT_IO);
        let step = gvr_core::Error::Step {
            step: 3,
            source: Box::new(gvr_core::Error::Invariant("x".into())),
        };
        assert_eq!(exit_code(&step.into()), EXIT_EXACTNESS);
        let cfg = gvr_core::Error::RowTooShort { n: 1, k: 2 };
        assert_eq!(exit_code(&cfg.into()), EXIT_USAGE);
        let ex = CliError::Exactness { failed: 1, total: 9 };
        assert_eq!(exit_code(&ex.into()), EXIT_EXACTNESS);
    }
}
