//! Families of dendrograms over a finite index set (time series of
//! configurations), the forgetful and insertion maps between point counts,
//! and classifier distributions over the fibre of the forgetful map.

mod classifier;
mod insertion;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use classifier::{
    attachment_distribution, haar_weights, sample_insertion, sample_insertions, AttachmentDistribution, ClassifierMode,
    SiteSampler,
};
pub use insertion::{enumerate_sites, forget_point, insert_point, locate_site, rebuild_with, AttachmentSite};

use crate::dendrogram::{build_dendrogram, CanonicalSignature, Dendrogram, Node};
use crate::error::{Error, Result};
use crate::padic::{ExtendedPoint, Prime};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Timestamp {
    Index(i64),
    Label(String),
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Timestamp::Index(i) => write!(f, "{i}"),
            Timestamp::Label(s) => f.write_str(s),
        }
    }
}

/// The data at one time step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    #[serde(rename = "t")]
    pub timestamp: Timestamp,
    pub points: Vec<ExtendedPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TransitionKind {
    Unchanged,
    Contraction,
    Expansion,
    LevelShift,
    Other,
}

/// A level change of a vertex present in both dendrograms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelChange {
    pub cluster: Vec<usize>,
    pub from: i64,
    pub to: i64,
}

/// Clusters are given by the point indices below a vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDetail {
    /// Vertices of the earlier dendrogram absent from the later one.
    pub contracted: Vec<Vec<usize>>,
    /// Vertices of the later dendrogram absent from the earlier one.
    pub expanded: Vec<Vec<usize>>,
    pub level_changes: Vec<LevelChange>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionEvent {
    pub kind: TransitionKind,
    pub detail: TransitionDetail,
}

fn clusters(d: &Dendrogram) -> BTreeMap<Vec<usize>, i64> {
    fn go(node: &Node, out: &mut BTreeMap<Vec<usize>, i64>) {
        if let Node::Internal { level, children } = node {
            let mut leaves = node.leaves();
            leaves.sort_unstable();
            out.insert(leaves, *level);
            for c in children {
                go(c, out);
            }
        }
    }
    let mut out = BTreeMap::new();
    go(d.root(), &mut out);
    out
}

/// Compares two dendrograms on the same point indices.
///
/// Vertices are identified with the set of points below them. Contracting a
/// bounded edge deletes exactly one such set, so `later` is a contraction of
/// `earlier` iff its vertex sets form a proper subset of `earlier`'s.
pub fn classify_transition(earlier: &Dendrogram, later: &Dendrogram) -> TransitionEvent {
    let a = clusters(earlier);
    let b = clusters(later);
    let contracted: Vec<Vec<usize>> = a.keys().filter(|k| !b.contains_key(*k)).cloned().collect();
    let expanded: Vec<Vec<usize>> = b.keys().filter(|k| !a.contains_key(*k)).cloned().collect();
    let level_changes: Vec<LevelChange> = a
        .iter()
        .filter_map(|(k, &from)| {
            b.get(k).filter(|&&to| to != from).map(|&to| LevelChange {
                cluster: k.clone(),
                from,
                to,
            })
        })
        .collect();
    let same_ends = earlier.has_infinity_end() == later.has_infinity_end();
    let kind = match (contracted.is_empty(), expanded.is_empty()) {
        _ if !same_ends => TransitionKind::Other,
        (true, true) if level_changes.is_empty() => TransitionKind::Unchanged,
        (true, true) => TransitionKind::LevelShift,
        (false, true) => TransitionKind::Contraction,
        (true, false) => TransitionKind::Expansion,
        (false, false) => TransitionKind::Other,
    };
    TransitionEvent {
        kind,
        detail: TransitionDetail {
            contracted,
            expanded,
            level_changes,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySeries {
    pub prime: Prime,
    pub configurations: Vec<Configuration>,
    pub dendrograms: Vec<Dendrogram>,
    pub transitions: Vec<TransitionEvent>,
}

#[derive(Serialize, Deserialize)]
struct FamilyInput {
    p: u64,
    configs: Vec<Configuration>,
}

/// Serialized form of a [`FamilySeries`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub p: u64,
    pub steps: Vec<StepReport>,
    pub transitions: Vec<TransitionReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub t: Timestamp,
    pub points: Vec<ExtendedPoint>,
    pub signature: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub from: Timestamp,
    pub to: Timestamp,
    #[serde(flatten)]
    pub event: TransitionEvent,
}

impl FamilySeries {
    pub fn signatures(&self) -> Vec<CanonicalSignature> {
        self.dendrograms.iter().map(Dendrogram::signature).collect()
    }

    pub fn report(&self) -> FamilyReport {
        FamilyReport {
            p: self.prime.get(),
            steps: self
                .configurations
                .iter()
                .zip(&self.dendrograms)
                .map(|(c, d)| StepReport {
                    t: c.timestamp.clone(),
                    points: c.points.clone(),
                    signature: d.signature().0,
                })
                .collect(),
            transitions: self
                .configurations
                .windows(2)
                .zip(&self.transitions)
                .map(|(pair, event)| TransitionReport {
                    from: pair[0].timestamp.clone(),
                    to: pair[1].timestamp.clone(),
                    event: event.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.report()).expect("report serializes")
    }
}

/// Parses `{"p": int, "configs": [{"t": ..., "points": [...]}]}`.
pub fn parse_family_input(text: &str) -> Result<(Prime, Vec<Configuration>)> {
    let input: FamilyInput = serde_json::from_str(text).map_err(Error::from_json)?;
    Ok((Prime::new(input.p)?, input.configs))
}

pub fn build_family(configs: &[Configuration], p: Prime) -> Result<FamilySeries> {
    if let Some(first) = configs.first() {
        let expected = first.points.len();
        for c in configs {
            if c.points.len() != expected {
                return Err(Error::ConfigurationSize {
                    timestamp: c.timestamp.to_string(),
                    expected,
                    found: c.points.len(),
                });
            }
            for (j, y) in c.points.iter().enumerate() {
                if let Some(i) = c.points[..j].iter().position(|x| x == y) {
                    return Err(Error::Collision {
                        timestamp: c.timestamp.to_string(),
                        first: i,
                        second: j,
                        point: y.to_string(),
                    });
                }
            }
        }
    }
    let dendrograms = configs
        .iter()
        .map(|c| build_dendrogram(&c.points, p))
        .collect::<Result<Vec<_>>>()?;
    let transitions = dendrograms
        .windows(2)
        .map(|w| classify_transition(&w[0], &w[1]))
        .collect();
    Ok(FamilySeries {
        prime: p,
        configurations: configs.to_vec(),
        dendrograms,
        transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dendrogram::parse_points;

    fn config(t: i64, values: &[&str]) -> Configuration {
        Configuration {
            timestamp: Timestamp::Index(t),
            points: parse_points(values.iter().copied()).unwrap(),
        }
    }

    #[test]
    fn single_step_has_no_transitions() {
        let f = build_family(&[config(0, &["0", "1", "inf"])], Prime::TWO).unwrap();
        assert!(f.transitions.is_empty());
        assert_eq!(f.dendrograms.len(), 1);
    }

    #[test]
    fn level_shift_examples() {
        let f = build_family(
            &[config(0, &["0", "1", "4", "inf"]), config(1, &["0", "1", "6", "inf"])],
            Prime::TWO,
        )
        .unwrap();
        assert_eq!(f.transitions[0].kind, TransitionKind::LevelShift);
        assert_eq!(
            f.transitions[0].detail.level_changes,
            vec![LevelChange {
                cluster: vec![0, 2],
                from: 2,
                to: 1
            }]
        );

        let f = build_family(
            &[config(0, &["0", "4", "6", "inf"]), config(1, &["0", "4", "5", "inf"])],
            Prime::TWO,
        )
        .unwrap();
        assert_eq!(f.dendrograms[0].signature().0, "((0,1)@2,2)@1+inf");
        assert_eq!(f.dendrograms[1].signature().0, "((0,1)@2,2)@0+inf");
        assert_eq!(f.transitions[0].kind, TransitionKind::LevelShift);
    }

    #[test]
    fn contraction_and_expansion() {
        // (0,(1,2)@1)@0 -> (0,1,2)@0 over p = 3
        let three = Prime::new(3).unwrap();
        let f = build_family(
            &[
                config(0, &["0", "1", "4"]),
                config(1, &["0", "1", "2"]),
                config(2, &["0", "1", "4"]),
            ],
            three,
        )
        .unwrap();
        assert_eq!(f.transitions[0].kind, TransitionKind::Contraction);
        assert_eq!(f.transitions[0].detail.contracted, vec![vec![1, 2]]);
        assert_eq!(f.transitions[1].kind, TransitionKind::Expansion);
        assert_eq!(f.transitions[1].detail.expanded, vec![vec![1, 2]]);
    }

    #[test]
    fn unchanged_and_other() {
        let f = build_family(
            &[
                config(0, &["0", "1", "3"]),
                config(1, &["0", "1", "11"]),
                config(2, &["0", "1", "2"]),
            ],
            Prime::TWO,
        )
        .unwrap();
        assert_eq!(f.transitions[0].kind, TransitionKind::Unchanged);
        assert_eq!(f.transitions[1].kind, TransitionKind::Other);
    }

    #[test]
    fn errors() {
        let err = build_family(&[config(0, &["0", "1"]), config(1, &["0", "1", "2"])], Prime::TWO).unwrap_err();
        assert!(matches!(
            err,
            Error::ConfigurationSize {
                expected: 2,
                found: 3,
                ..
            }
        ));
        let err = build_family(&[config(0, &["0", "1", "2"]), config(7, &["0", "2", "2"])], Prime::TWO).unwrap_err();
        assert_eq!(
            err,
            Error::Collision {
                timestamp: "7".into(),
                first: 1,
                second: 2,
                point: "2".into()
            }
        );
    }

    #[test]
    fn input_and_report_json() {
        let text = r#"{"p": 2, "configs": [{"t": 0, "points": ["0", "1", "4", "inf"]}, {"t": "late", "points": ["0", "1", "6", "inf"]}]}"#;
        let (p, configs) = parse_family_input(text).unwrap();
        let f = build_family(&configs, p).unwrap();
        let json = f.to_json();
        let back: FamilyReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f.report());
        assert_eq!(back.transitions[0].to, Timestamp::Label("late".into()));
        assert!(json.contains("\"LEVEL_SHIFT\""));
    }
}
