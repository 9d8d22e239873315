//! Named channel descriptions: the ingestion format for ground-truth maps.
//!
//! JSON form (internally tagged by `kind`):
//!
//! ```json
//! {"kind": "amplitude_damping", "t": 1.0, "T1": 2.0}
//! {"kind": "composed", "stages": [{"kind": "bit_flip", "p": 0.1}, {"kind": "unitary", "axis": [0, 0, 1], "angle": 0.5}]}
//! {"kind": "explicit_kraus", "n": 1, "operators": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]]}
//! ```
//!
//! Compact text form used on the command line: `kind:params`, stages of a
//! composition separated by `;`. Examples: `bit_flip:0.25`,
//! `amplitude_damping:t=1,T1=2`, `unitary:z,1.5708`, `identity`.

use serde::{Deserialize, Serialize};

use super::kraus::{compose, KrausSet};
use crate::error::{DcqdError, Result};
use crate::qcore::{c, CMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    /// `exp(-i θ n̂·σ/2)` on every qubit.
    Unitary { axis: [f64; 3], angle: f64 },
    BitFlip { p: f64 },
    PhaseFlip { p: f64 },
    Depolarizing { p: f64 },
    /// Decay probability `gamma`, or duration `t` with relaxation time `T1`.
    AmplitudeDamping {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<f64>,
        #[serde(default, rename = "T1", skip_serializing_if = "Option::is_none")]
        t1: Option<f64>,
    },
    /// Dephasing strength `lambda` (off-diagonals scaled by
    /// `sqrt(1 - lambda)`), or duration `t` with dephasing time `T2`.
    PhaseDamping {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<f64>,
        #[serde(default, rename = "T2", skip_serializing_if = "Option::is_none")]
        t2: Option<f64>,
    },
    /// Stages applied in order.
    Composed { stages: Vec<ChannelSpec> },
    /// Kraus matrices on all `n` qubits as row-major `[re, im]` pairs.
    ExplicitKraus { n: usize, operators: Vec<Vec<Vec<[f64; 2]>>> },
}

impl ChannelSpec {
    pub fn identity() -> Self {
        ChannelSpec::Unitary {
            axis: [0.0, 0.0, 1.0],
            angle: 0.0,
        }
    }

    /// Kraus set on `n` qubits. Single-qubit kinds act independently on each
    /// qubit; explicit Kraus sets must already have `n` qubits.
    pub fn to_kraus(&self, n: usize) -> Result<KrausSet> {
        if n == 0 {
            return Err(DcqdError::InvalidChannel("qubit count must be positive".into()));
        }
        match self {
            ChannelSpec::Composed { stages } => {
                let mut stages = stages.iter();
                let first = stages
                    .next()
                    .ok_or_else(|| DcqdError::InvalidChannel("composed channel has no stages".into()))?
                    .to_kraus(n)?;
                stages.try_fold(first, |acc, s| compose(&acc, &s.to_kraus(n)?))
            }
            ChannelSpec::ExplicitKraus { n: own, operators } => {
                if *own != n {
                    return Err(DcqdError::DimensionMismatch(format!(
                        "explicit Kraus set acts on {own} qubits, {n} requested"
                    )));
                }
                explicit_kraus(*own, operators)
            }
            single => Ok(single.single_qubit()?.tensor_power(n)),
        }
    }

    fn single_qubit(&self) -> Result<KrausSet> {
        match self {
            ChannelSpec::Unitary { axis, angle } => {
                if *angle == 0.0 {
                    Ok(KrausSet::identity(1))
                } else {
                    KrausSet::rotation(*axis, *angle)
                }
            }
            ChannelSpec::BitFlip { p } => KrausSet::bit_flip(*p),
            ChannelSpec::PhaseFlip { p } => KrausSet::phase_flip(*p),
            ChannelSpec::Depolarizing { p } => KrausSet::depolarizing(*p),
            ChannelSpec::AmplitudeDamping { gamma, t, t1 } => match (gamma, t, t1) {
                (Some(g), None, None) => KrausSet::amplitude_damping(*g),
                (None, Some(t), Some(t1)) => KrausSet::amplitude_damping_timed(*t, *t1),
                _ => Err(DcqdError::InvalidChannel(
                    "amplitude_damping needs either gamma or both t and T1".into(),
                )),
            },
            ChannelSpec::PhaseDamping { lambda, t, t2 } => match (lambda, t, t2) {
                (Some(l), None, None) => KrausSet::phase_damping(*l),
                (None, Some(t), Some(t2)) => KrausSet::phase_damping_timed(*t, *t2),
                _ => Err(DcqdError::InvalidChannel(
                    "phase_damping needs either lambda or both t and T2".into(),
                )),
            },
            ChannelSpec::Composed { .. } | ChannelSpec::ExplicitKraus { .. } => unreachable!(),
        }
    }

    /// Parses the compact text form.
    pub fn parse(text: &str) -> Result<Self> {
        let stages: Vec<&str> = text.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
        match stages.as_slice() {
            [] => Err(DcqdError::parse("channel", "empty channel description")),
            [one] => parse_stage(one),
            many => Ok(ChannelSpec::Composed {
                stages: many.iter().map(|s| parse_stage(s)).collect::<Result<_>>()?,
            }),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            // Type errors inside the tagged enum carry no position.
            let field = if e.line() > 0 {
                format!("channel json (line {}, column {})", e.line(), e.column())
            } else {
                "channel json".to_string()
            };
            DcqdError::parse(field, e.to_string())
        })
    }
}

fn explicit_kraus(n: usize, operators: &[Vec<Vec<[f64; 2]>>]) -> Result<KrausSet> {
    let d = 1usize << n;
    let mats = operators
        .iter()
        .enumerate()
        .map(|(i, rows)| {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(DcqdError::parse(
                    format!("operators[{i}]"),
                    format!("expected a square {d}x{d} matrix"),
                ));
            }
            let flat: Vec<_> = rows.iter().flatten().map(|[re, im]| c(*re, *im)).collect();
            Ok(CMatrix::from_row_slice(d, d, &flat))
        })
        .collect::<Result<Vec<_>>>()?;
    KrausSet::new(n, mats)
}

fn parse_stage(stage: &str) -> Result<ChannelSpec> {
    let (kind, rest) = match stage.split_once(':') {
        Some((k, r)) => (k.trim(), r.trim()),
        None => (stage.trim(), ""),
    };
    let args: Vec<&str> = if rest.is_empty() {
        Vec::new()
    } else {
        rest.split(',').map(str::trim).collect()
    };
    let field = |name: &str| format!("{kind}.{name}");
    let number = |name: &str, s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| DcqdError::parse(field(name), format!("'{s}' is not a number")))
    };
    let keyed = |args: &[&str], keys: &[&str]| -> Result<Vec<f64>> {
        keys.iter()
            .map(|key| {
                let hit = args.iter().find_map(|a| {
                    let (k, v) = a.split_once('=')?;
                    (k.trim() == *key).then_some(v.trim())
                });
                let v = hit.ok_or_else(|| DcqdError::parse(field(key), "missing"))?;
                number(key, v)
            })
            .collect()
    };
    let single = |name: &str| -> Result<f64> {
        match args.as_slice() {
            [v] if !v.contains('=') => number(name, v),
            [v] => {
                let (k, v) = v.split_once('=').unwrap();
                if k.trim() != name {
                    return Err(DcqdError::parse(field(k.trim()), format!("unknown parameter, expected {name}")));
                }
                number(name, v.trim())
            }
            _ => Err(DcqdError::parse(field(name), "expected exactly one parameter")),
        }
    };
    let timed = args.iter().any(|a| a.starts_with("t="));

    match kind {
        "identity" => {
            if !args.is_empty() {
                return Err(DcqdError::parse("identity", "takes no parameters"));
            }
            Ok(ChannelSpec::identity())
        }
        "bit_flip" => Ok(ChannelSpec::BitFlip { p: single("p")? }),
        "phase_flip" => Ok(ChannelSpec::PhaseFlip { p: single("p")? }),
        "depolarizing" => Ok(ChannelSpec::Depolarizing { p: single("p")? }),
        "amplitude_damping" if timed => {
            let v = keyed(&args, &["t", "T1"])?;
            Ok(ChannelSpec::AmplitudeDamping {
                gamma: None,
                t: Some(v[0]),
                t1: Some(v[1]),
            })
        }
        "amplitude_damping" => Ok(ChannelSpec::AmplitudeDamping {
            gamma: Some(single("gamma")?),
            t: None,
            t1: None,
        }),
        "phase_damping" if timed => {
            let v = keyed(&args, &["t", "T2"])?;
            Ok(ChannelSpec::PhaseDamping {
                lambda: None,
                t: Some(v[0]),
                t2: Some(v[1]),
            })
        }
        "phase_damping" => Ok(ChannelSpec::PhaseDamping {
            lambda: Some(single("lambda")?),
            t: None,
            t2: None,
        }),
        "unitary" => {
            let axis = match args.as_slice() {
                [a, _] => match *a {
                    "x" | "X" => [1.0, 0.0, 0.0],
                    "y" | "Y" => [0.0, 1.0, 0.0],
                    "z" | "Z" => [0.0, 0.0, 1.0],
                    other => return Err(DcqdError::parse(field("axis"), format!("unknown axis '{other}'"))),
                },
                [x, y, z, _] => [number("axis", x)?, number("axis", y)?, number("axis", z)?],
                _ => {
                    return Err(DcqdError::parse(
                        field("params"),
                        "expected 'axis,angle' or 'nx,ny,nz,angle'",
                    ))
                }
            };
            let angle = number("angle", args.last().unwrap())?;
            Ok(ChannelSpec::Unitary { axis, angle })
        }
        "composed" | "explicit_kraus" => Err(DcqdError::parse(
            kind,
            "not available in text form; use ';' between stages or a JSON channel file",
        )),
        other => Err(DcqdError::parse("channel", format!("unknown channel kind '{other}'"))),
    }
}
