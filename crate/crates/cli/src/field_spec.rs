use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use spherevol::minimizers::{canonical_field, GridField, PerturbedField, DEFAULT_PHASE};
use spherevol::AngleField;

/// `canonical:k`, `grid:<path>` or `perturbed:k:amplitude:seed`.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Canonical(i64),
    Grid(PathBuf),
    Perturbed { k: i64, amplitude: f64, seed: u64 },
}

impl FromStr for FieldSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let (kind, rest) = s.split_once(':').context("field spec needs a kind, e.g. canonical:3")?;
        match kind {
            "canonical" => Ok(Self::Canonical(rest.parse().context("canonical:k needs an integer k")?)),
            "grid" if !rest.is_empty() => Ok(Self::Grid(PathBuf::from(rest))),
            "perturbed" => {
                let parts: Vec<&str> = rest.split(':').collect();
                let [k, amplitude, seed] = parts[..] else {
                    bail!("expected perturbed:k:amplitude:seed, got {s:?}");
                };
                Ok(Self::Perturbed {
                    k: k.parse().context("bad k")?,
                    amplitude: amplitude.parse().context("bad amplitude")?,
                    seed: seed.parse().context("bad seed")?,
                })
            }
            _ => bail!("unknown field spec {s:?}; use canonical:k, grid:<path> or perturbed:k:amplitude:seed"),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Canonical(k) => write!(f, "canonical:{k}"),
            Self::Grid(p) => write!(f, "grid:{}", p.display()),
            Self::Perturbed { k, amplitude, seed } => write!(f, "perturbed:{k}:{amplitude}:{seed}"),
        }
    }
}

impl FieldSpec {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Perturbed { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn load(&self) -> anyhow::Result<Box<dyn AngleField>> {
        Ok(match self {
            Self::Canonical(k) => Box::new(canonical_field(*k, DEFAULT_PHASE)?),
            Self::Grid(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read grid file {}", path.display()))?;
                let grid: GridField = serde_json::from_str(&text)
                    .with_context(|| format!("{} is not a valid grid file", path.display()))?;
                Box::new(grid)
            }
            Self::Perturbed { k, amplitude, seed } => {
                Box::new(PerturbedField::random(*k, *amplitude, *seed)?)
            }
        })
    }
}

/// `NxM` resolutions such as `64x256`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub n_alpha: usize,
    pub n_beta: usize,
}

impl FromStr for Resolution {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let (a, b) = s.split_once('x').context("resolution must look like 64x256")?;
        Ok(Self {
            n_alpha: a.parse().context("bad latitude count")?,
            n_beta: b.parse().context("bad longitude count")?,
        })
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_alpha, self.n_beta)
    }
}
