//! Input files: nesting descriptors, pipeline scenarios and replay
//! fixtures, all JSON.

use std::path::Path;

use nestrix::geometry::Point;
use nestrix::homotopy::Caps;
use nestrix::nesting::PlNesting;
use nestrix::simplicial::{Chain, Simplex};
use nestrix::{parse_q, Int, QPoint, Q};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Largest caps accepted from flags or the environment.
pub const HARD_CAPS: Caps = Caps { k: 4, n: 8 };

pub const CAP_OVERRIDE_VAR: &str = "NESTRIX_CAP_OVERRIDE";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NestingSpec {
    Ambient,
    Balls {
        radius2: String,
    },
    BallCover {
        balls: Vec<BallSpec>,
    },
    /// Planted defect wrapper.
    Broken {
        inner: Box<NestingSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub center: Vec<String>,
    pub radius2: String,
}

pub fn rational(s: &str) -> CliResult<Q> {
    parse_q(s).ok_or_else(|| CliError::Usage(format!("not a rational number: {s:?}")))
}

pub fn point(coords: &[String]) -> CliResult<QPoint> {
    Ok(Point(
        coords
            .iter()
            .map(|c| rational(c))
            .collect::<CliResult<_>>()?,
    ))
}

impl NestingSpec {
    pub fn build(&self) -> CliResult<PlNesting> {
        Ok(match self {
            NestingSpec::Ambient => PlNesting::Ambient,
            NestingSpec::Balls { radius2 } => PlNesting::balls(rational(radius2)?)?,
            NestingSpec::BallCover { balls } => {
                let balls = balls
                    .iter()
                    .map(|b| Ok((point(&b.center)?, rational(&b.radius2)?)))
                    .collect::<CliResult<_>>()?;
                PlNesting::ball_cover(balls)?
            }
            NestingSpec::Broken { inner } => PlNesting::broken(inner.build()?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coefficient: i64,
    pub vertices: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub label: String,
    pub terms: Vec<TermSpec>,
}

impl ChainSpec {
    pub fn build(&self) -> CliResult<Chain> {
        let mut c = Chain::zero();
        for t in &self.terms {
            let pts = t
                .vertices
                .iter()
                .map(|v| point(v))
                .collect::<CliResult<Vec<_>>>()?;
            if pts.is_empty() {
                return Err(CliError::Usage(format!(
                    "chain {:?} has an empty simplex",
                    self.label
                )));
            }
            c.add_term(Simplex::Affine(pts), Int::from(t.coefficient));
        }
        Ok(c)
    }
}

/// A covering-homotopy pipeline run on `Δ^k` with a nesting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub k: usize,
    pub nesting: NestingSpec,
    /// Random points per face for the deformation audit.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Test chains for the equivalence report.
    #[serde(default)]
    pub tests: Vec<ChainSpec>,
}

fn default_samples() -> usize {
    20
}

/// A single sequence to re-check against a nesting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Replay {
    pub nesting: NestingSpec,
    pub sequence: Vec<Vec<String>>,
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.into(),
        source,
    })
}

fn parse_override(text: &str) -> CliResult<(Option<usize>, Option<usize>)> {
    let (mut k, mut n) = (None, None);
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "{CAP_OVERRIDE_VAR}: expected key=value, got {part:?}"
            ))
        })?;
        let value: usize = value.trim().parse().map_err(|_| {
            CliError::Usage(format!("{CAP_OVERRIDE_VAR}: {value:?} is not a count"))
        })?;
        match key.trim() {
            "k" => k = Some(value),
            "n" => n = Some(value),
            other => {
                return Err(CliError::Usage(format!(
                    "{CAP_OVERRIDE_VAR}: unknown cap {other:?}"
                )))
            }
        }
    }
    Ok((k, n))
}

/// Defaults, then the environment override, then explicit flags.
pub fn resolve_caps(
    env: Option<&str>,
    cap_k: Option<usize>,
    cap_n: Option<usize>,
) -> CliResult<Caps> {
    let mut caps = Caps::default();
    if let Some(text) = env {
        let (k, n) = parse_override(text)?;
        caps.k = k.unwrap_or(caps.k);
        caps.n = n.unwrap_or(caps.n);
    }
    caps.k = cap_k.unwrap_or(caps.k);
    caps.n = cap_n.unwrap_or(caps.n);
    if caps.k > HARD_CAPS.k || caps.n > HARD_CAPS.n {
        return Err(CliError::Usage(format!(
            "caps k = {}, n = {} exceed the hard limits k <= {}, n <= {}",
            caps.k, caps.n, HARD_CAPS.k, HARD_CAPS.n
        )));
    }
    Ok(caps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps_layering() {
        assert_eq!(resolve_caps(None, None, None).unwrap(), Caps::default());
        assert_eq!(
            resolve_caps(Some("k=2, n=4"), None, None).unwrap(),
            Caps { k: 2, n: 4 }
        );
        assert_eq!(
            resolve_caps(Some("k=2"), Some(1), None).unwrap(),
            Caps { k: 1, n: 6 }
        );
        assert!(resolve_caps(Some("m=2"), None, None).is_err());
        assert!(resolve_caps(None, Some(9), None).is_err());
    }

    #[test]
    fn nesting_descriptors() {
        let spec: NestingSpec =
            serde_json::from_str(r#"{"kind": "balls", "radius2": "1/4"}"#).unwrap();
        assert!(matches!(spec.build().unwrap(), PlNesting::Balls { .. }));
        let bad: NestingSpec =
            serde_json::from_str(r#"{"kind": "balls", "radius2": "x"}"#).unwrap();
        assert_eq!(bad.build().unwrap_err().exit_code(), 2);
        assert!(serde_json::from_str::<NestingSpec>(r#"{"kind": "cubes"}"#).is_err());
    }
}
