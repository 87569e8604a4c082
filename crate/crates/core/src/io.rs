//! TOML input files.
//!
//! System file:
//!
//! ```toml
//! order = 3
//! roots = [
//!   { re = -1.0 },                       # im defaults to 0, mult to 1
//!   { re = -0.5, im = 2.0 },
//!   { re = -0.5, im = -2.0 },
//! ]
//! # exactly one of the two:
//! mode_coefficients = [{ re = 1.0 }, { re = 0.5, im = -0.25 }, { re = 0.5, im = 0.25 }]
//! # markov = [0.0, 1.0, -1.0]
//! ```
//!
//! Conjugate roots are listed separately and must carry conjugate modal
//! coefficients. Coefficients follow the root order, `mult` entries per root
//! in increasing power of `t`.
//!
//! Sequence file:
//!
//! ```toml
//! instants = [0.0, 0.7, 1.9]
//! final_instant = 2.5   # optional
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::analysis::SamplingSequence;
use crate::error::{Error, Result};
use crate::lti::{EigenStructure, ModeCoefficients, Root, SystemSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    order: usize,
    roots: Vec<RootEntry>,
    mode_coefficients: Option<Vec<ComplexEntry>>,
    markov: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RootEntry {
    re: f64,
    #[serde(default)]
    im: f64,
    #[serde(default = "one")]
    mult: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexEntry {
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceFile {
    instants: Vec<f64>,
    final_instant: Option<f64>,
}

fn one() -> usize {
    1
}

fn parse_toml<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Parse(format!("{origin}: {}", e.to_string().trim_end())))
}

pub fn parse_system(text: &str, origin: &str) -> Result<SystemSpec> {
    let file: SystemFile = parse_toml(text, origin)?;
    let bad = |msg: String| Error::Parse(format!("{origin}: {msg}"));
    let total: usize = file.roots.iter().map(|r| r.mult).sum();
    if total != file.order {
        return Err(bad(format!(
            "field `order` is {} but the multiplicities in `roots` add up to {total}",
            file.order
        )));
    }
    let roots = file.roots.iter().map(|r| Root::complex(r.re, r.im, r.mult)).collect();
    let eigen = EigenStructure::new(roots).map_err(|e| bad(format!("field `roots`: {e}")))?;
    match (file.mode_coefficients, file.markov) {
        (Some(c), None) => {
            if c.len() != file.order {
                return Err(bad(format!(
                    "field `mode_coefficients` has {} entries, expected {}",
                    c.len(),
                    file.order
                )));
            }
            let modes = ModeCoefficients(c.iter().map(|v| Complex64::new(v.re, v.im)).collect());
            SystemSpec::new(eigen, modes).map_err(|e| bad(format!("field `mode_coefficients`: {e}")))
        }
        (None, Some(h)) => {
            if h.len() != file.order {
                return Err(bad(format!("field `markov` has {} entries, expected {}", h.len(), file.order)));
            }
            SystemSpec::from_markov(eigen, &h).map_err(|e| bad(format!("field `markov`: {e}")))
        }
        (Some(_), Some(_)) => Err(bad("give either `mode_coefficients` or `markov`, not both".into())),
        (None, None) => Err(bad("missing field `mode_coefficients` or `markov`".into())),
    }
}

pub fn parse_sequence(text: &str, origin: &str) -> Result<SamplingSequence> {
    let file: SequenceFile = parse_toml(text, origin)?;
    SamplingSequence::new(file.instants, file.final_instant)
        .map_err(|e| Error::Parse(format!("{origin}: field `instants`: {e}")))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: cannot read file: {e}", path.display())))
}

pub fn load_system(path: &Path) -> Result<SystemSpec> {
    parse_system(&read(path)?, &path.display().to_string())
}

pub fn load_sequence(path: &Path) -> Result<SamplingSequence> {
    parse_sequence(&read(path)?, &path.display().to_string())
}
