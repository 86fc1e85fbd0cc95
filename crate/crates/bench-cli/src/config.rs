//! Config file loading and flag/file/default resolution. Flags win over the
//! file, the file wins over built-in defaults.

use std::path::{Path, PathBuf};

use gvr_core::baselines::RadixParams;
use gvr_core::gvr::GvrParams;
use gvr_core::rope::RopeConfig;
use gvr_core::Provenance;
use serde::Deserialize;

use crate::cli::{GvrArgs, RadixArgs, SynthArgs};
use crate::exit::CliError;

pub const DEFAULT_N: usize = 70690;
pub const DEFAULT_N_VALUES: [usize; 6] = [8192, 16384, 32768, 65536, 70690, 131072];
pub const DEFAULT_ROWS_PER_N: usize = 4;
pub const DEFAULT_ALGORITHMS: [&str; 3] = ["gvr", "radix", "oracle"];

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub k: Option<usize>,
    pub candidates: Option<usize>,
    pub bins: Option<usize>,
    pub chunks: Option<usize>,
    pub max_secant_iters: Option<u32>,
    pub damping: Option<f64>,
    pub radix_schedule: Option<Vec<u32>>,
    pub radix_early_exit: Option<usize>,
    pub amplitude: Option<f64>,
    pub standard_rope: Option<bool>,
    pub n0: Option<usize>,
    pub steps: Option<usize>,
    pub n: Option<usize>,
    pub n_values: Option<Vec<usize>>,
    pub rows_per_n: Option<usize>,
    pub algorithms: Option<Vec<String>>,
    pub provenances: Option<Vec<Provenance>>,
    pub algorithm: Option<String>,
    pub provenance: Option<Provenance>,
    pub trace: Option<PathBuf>,
    pub row: Option<PathBuf>,
    pub stride: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

pub fn k(flag: Option<usize>, file: &FileConfig) -> usize {
    pick(flag, file.k, GvrParams::default().k)
}

pub fn gvr_params(args: &GvrArgs, file: &FileConfig) -> Result<GvrParams, CliError> {
    let k = k(args.k, file);
    let base = GvrParams::with_k(k);
    let params = GvrParams {
        k,
        max_candidates: pick(args.candidates, file.candidates, base.max_candidates),
        num_bins: pick(args.bins, file.bins, base.num_bins),
        num_chunks: pick(args.chunks, file.chunks, base.num_chunks),
        max_secant_iters: pick(args.max_secant_iters, file.max_secant_iters, base.max_secant_iters),
        first_step_damping: pick(args.damping, file.damping, base.first_step_damping),
    };
    params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(params)
}

pub fn radix_params(args: &RadixArgs, file: &FileConfig) -> Result<RadixParams, CliError> {
    let base = RadixParams::default();
    let params = RadixParams {
        digit_schedule: pick(
            args.radix_schedule.clone(),
            file.radix_schedule.clone(),
            base.digit_schedule,
        ),
        early_exit_threshold: pick(
            args.radix_early_exit,
            file.radix_early_exit,
            base.early_exit_threshold,
        ),
    };
    params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(params)
}

pub fn amplitude(args: &SynthArgs, file: &FileConfig) -> f64 {
    pick(args.amplitude, file.amplitude, 0.1)
}

pub fn rope(args: &SynthArgs, file: &FileConfig) -> RopeConfig {
    if args.standard_rope || file.standard_rope == Some(true) {
        RopeConfig::standard()
    } else {
        RopeConfig::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys() {
        assert!(FileConfig::parse("seed = 3\nbogus = 1\n").is_err());
        let f = FileConfig::parse("seed = 3\nn-values = [8192]\nprovenances = [\"static-prior\"]\n")
            .unwrap();
        assert_eq!(f.seed, Some(3));
        assert_eq!(f.n_values, Some(vec![8192]));
        assert_eq!(f.provenances, Some(vec![Provenance::StaticPrior]));
    }

    #[test]
    fn flags_win_over_file() {
        let file = FileConfig::parse("k = 64\nbins = 99\n").unwrap();
        let args = GvrArgs {
            k: Some(32),
            ..GvrArgs::default()
        };
        let p = gvr_params(&args, &file).unwrap();
        assert_eq!(p.k, 32);
        assert_eq!(p.max_candidates, 96);
        assert_eq!(p.num_bins, 99);
        assert_eq!(p.num_chunks, 512);
    }

    #[test]
    fn invalid_params_are_usage_errors() {
        let file = FileConfig::parse("k = 64\ncandidates = 10\n").unwrap();
        assert!(matches!(
            gvr_params(&GvrArgs::default(), &file),
            Err(CliError::Usage(_))
        ));
        let file = FileConfig::parse("radix-schedule = [16, 8]\n").unwrap();
        assert!(radix_params(&RadixArgs::default(), &file).is_err());
    }
}
