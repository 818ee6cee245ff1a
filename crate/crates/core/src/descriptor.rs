//! JSON descriptors for matroids, distributions and online scenarios.
//!
//! Every document carries a `"type"` tag; rationals are `"p/q"` strings (bare integers and
//! finite decimals are accepted on input).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dist::{improving_distribution, SubsetDistribution};
use crate::error::{Error, Result};
use crate::matroid::{Family, Matroid, WeightedMatroid};
use crate::rational::{serde_rational, Rational};
use crate::subset::Subset;

/// A rational serialized as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Q(#[serde(with = "serde_rational")] pub Rational);

impl From<Rational> for Q {
    fn from(r: Rational) -> Self {
        Q(r)
    }
}

fn unwrap_all(v: &[Q]) -> Vec<Rational> {
    v.iter().map(|q| q.0.clone()).collect()
}

fn wrap_all(v: &[Rational]) -> Vec<Q> {
    v.iter().cloned().map(Q).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MatroidSpec {
    Uniform {
        n: usize,
        k: usize,
    },
    /// `n` defaults to one past the largest listed element.
    Partition {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
    },
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    Explicit {
        n: usize,
        independent: Vec<Subset>,
    },
    Linear {
        columns: Vec<Vec<Q>>,
    },
}

impl MatroidSpec {
    pub fn build(&self) -> Result<Matroid> {
        match self {
            MatroidSpec::Uniform { n, k } => {
                if *n > crate::subset::MAX_ELEMENTS {
                    return Err(Error::GroundSetTooLarge {
                        n: *n,
                        cap: crate::subset::MAX_ELEMENTS,
                        operation: "uniform matroid",
                    });
                }
                Ok(Matroid::uniform(*n, *k))
            }
            MatroidSpec::Partition { n, blocks, capacities } => {
                let inferred = blocks.iter().flatten().map(|&e| e + 1).max().unwrap_or(0);
                Matroid::partition(n.unwrap_or(inferred), blocks, capacities)
            }
            MatroidSpec::Graphic { vertices, edges } => Matroid::graphic(*vertices, edges),
            MatroidSpec::Explicit { n, independent } => Matroid::explicit(*n, independent),
            MatroidSpec::Linear { columns } => {
                Matroid::linear(columns.iter().map(|c| unwrap_all(c)).collect())
            }
        }
    }

    /// Descriptor of a matroid built from one of the public families.
    pub fn describe(m: &Matroid) -> Result<Self> {
        Ok(match m.family() {
            Family::Uniform { k } => MatroidSpec::Uniform { n: m.n(), k: *k },
            Family::Partition { blocks, capacities } => MatroidSpec::Partition {
                n: Some(m.n()),
                blocks: blocks.iter().map(|b| b.to_vec()).collect(),
                capacities: capacities.clone(),
            },
            Family::Graphic { vertices, edges } => MatroidSpec::Graphic {
                vertices: *vertices,
                edges: edges.clone(),
            },
            Family::Explicit { independent, .. } => MatroidSpec::Explicit {
                n: m.n(),
                independent: independent.clone(),
            },
            Family::Linear { columns } => MatroidSpec::Linear {
                columns: columns.iter().map(|c| wrap_all(c)).collect(),
            },
            Family::Minor { .. } => {
                return Err(Error::InvalidMatroid("minors have no descriptor".into()))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportEntry {
    pub set: Subset,
    pub p: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistributionSpec {
    Explicit {
        n: usize,
        support: Vec<SupportEntry>,
    },
    Product {
        x: Vec<Q>,
    },
    /// Without an embedded matroid, the matroid supplied alongside the descriptor is used.
    Improving {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matroid: Option<MatroidSpec>,
        weights: Vec<Q>,
        p: Q,
    },
    Mixture {
        components: Vec<DistributionSpec>,
        weights: Vec<Q>,
    },
    Subsample {
        base: Box<DistributionSpec>,
        p: Q,
    },
}

impl DistributionSpec {
    pub fn build(&self, host: Option<&Matroid>) -> Result<SubsetDistribution> {
        match self {
            DistributionSpec::Explicit { n, support } => {
                let pairs: Vec<(Subset, Rational)> =
                    support.iter().map(|e| (e.set, e.p.0.clone())).collect();
                SubsetDistribution::explicit(*n, &pairs)
            }
            DistributionSpec::Product { x } => SubsetDistribution::product(&unwrap_all(x)),
            DistributionSpec::Improving { matroid, weights, p } => {
                let m = match (matroid, host) {
                    (Some(spec), _) => spec.build()?,
                    (None, Some(m)) => m.clone(),
                    (None, None) => {
                        return Err(Error::InvalidDistribution(
                            "improving distribution needs a matroid".into(),
                        ))
                    }
                };
                let wm = WeightedMatroid::new(m, unwrap_all(weights))?;
                improving_distribution(&wm, &p.0)
            }
            DistributionSpec::Mixture { components, weights } => {
                if components.len() != weights.len() {
                    return Err(Error::InvalidDistribution(format!(
                        "{} components but {} weights",
                        components.len(),
                        weights.len()
                    )));
                }
                let parts = components
                    .iter()
                    .zip(weights)
                    .map(|(c, w)| Ok((c.build(host)?, w.0.clone())))
                    .collect::<Result<Vec<_>>>()?;
                SubsetDistribution::mixture(&parts)
            }
            DistributionSpec::Subsample { base, p } => base.build(host)?.subsample(&p.0),
        }
    }

    pub fn describe(d: &SubsetDistribution) -> Self {
        DistributionSpec::Explicit {
            n: d.n(),
            support: d
                .support()
                .iter()
                .map(|(s, p)| SupportEntry {
                    set: *s,
                    p: Q(p.clone()),
                })
                .collect(),
        }
    }
}

/// Arrival order of an online scenario: `"random"` or `"fixed:[0,1,2]"`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum OrderSpec {
    #[default]
    Random,
    Fixed(Vec<usize>),
}

impl FromStr for OrderSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "random" {
            return Ok(OrderSpec::Random);
        }
        let Some(rest) = s.strip_prefix("fixed:") else {
            return Err(Error::Parse(format!("order {s:?} is neither random nor fixed:[...]")));
        };
        let body = rest.trim().trim_start_matches('[').trim_end_matches(']');
        let order = body
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("order entry {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(OrderSpec::Fixed(order))
    }
}

impl fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderSpec::Random => f.write_str("random"),
            OrderSpec::Fixed(order) => {
                let items: Vec<String> = order.iter().map(usize::to_string).collect();
                write!(f, "fixed:[{}]", items.join(","))
            }
        }
    }
}

impl Serialize for OrderSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OrderSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmSpec {
    #[default]
    Dynkin,
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSpec {
    #[default]
    Exact,
    Mc,
}

impl FromStr for ModeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ModeSpec::Exact),
            "mc" => Ok(ModeSpec::Mc),
            other => Err(Error::Parse(format!("mode {other:?} is neither exact nor mc"))),
        }
    }
}

/// Which online pipeline a scenario runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskSpec {
    PhiW,
    Mixture,
    LowerBound,
    Blueprint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub matroid: MatroidSpec,
    /// Not needed by the blueprint task, which derives its own improving distribution.
    #[serde(default)]
    pub distribution: Option<DistributionSpec>,
    #[serde(default)]
    pub algorithm: AlgorithmSpec,
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub order: OrderSpec,
    /// Defaults to `lower_bound` for a fixed order and `mixture` otherwise.
    #[serde(default)]
    pub task: Option<TaskSpec>,
    /// Weight vector for `phi_w` and `blueprint`.
    #[serde(default)]
    pub weights: Option<Vec<Q>>,
    /// Sampling probability for `blueprint`.
    #[serde(default)]
    pub p: Option<Q>,
    /// Secretary ratio; computed by enumeration for the cutoff rule on rank-one uniform matroids.
    #[serde(default)]
    pub gamma: Option<Q>,
    #[serde(default)]
    pub eps: Option<Q>,
}

fn default_trials() -> u64 {
    10_000
}

impl Scenario {
    pub fn task(&self) -> TaskSpec {
        self.task.unwrap_or(match self.order {
            OrderSpec::Fixed(_) => TaskSpec::LowerBound,
            OrderSpec::Random => TaskSpec::Mixture,
        })
    }
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Reads and parses a descriptor file, returning the raw bytes alongside for hashing.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<(T, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let value = from_json(text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((value, bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn matroid_descriptors_parse() {
        let u: MatroidSpec = from_json(r#"{"type":"uniform","n":4,"k":2}"#).unwrap();
        assert_eq!(u.build().unwrap().rank(Subset::full(4)), 2);
        let p: MatroidSpec =
            from_json(r#"{"type":"partition","blocks":[[0,1],[2]],"capacities":[1,1]}"#).unwrap();
        assert_eq!(p.build().unwrap().n(), 3);
        let g: MatroidSpec =
            from_json(r#"{"type":"graphic","vertices":3,"edges":[[0,1],[1,2],[2,0]]}"#).unwrap();
        assert_eq!(g.build().unwrap().rank(Subset::full(3)), 2);
        let e: MatroidSpec =
            from_json(r#"{"type":"explicit","n":2,"independent":[[],[0],[1]]}"#).unwrap();
        assert_eq!(e.build().unwrap().rank(Subset::full(2)), 1);
        let l: MatroidSpec =
            from_json(r#"{"type":"linear","columns":[["1","0"],["0","1"],["1/2","1/2"]]}"#).unwrap();
        assert_eq!(l.build().unwrap().rank(Subset::full(3)), 2);
    }

    #[test]
    fn rejects_unknown_types_and_fields() {
        assert!(from_json::<MatroidSpec>(r#"{"type":"cycle","n":3}"#).is_err());
        assert!(from_json::<MatroidSpec>(r#"{"type":"uniform","n":3,"k":1,"x":0}"#).is_err());
        assert!(from_json::<DistributionSpec>(r#"{"type":"product","x":["a"]}"#).is_err());
    }

    #[test]
    fn distribution_descriptors_build() {
        let d: DistributionSpec = from_json(
            r#"{"type":"explicit","n":2,"support":[{"set":[],"p":"1/2"},{"set":[0],"p":"1/4"},{"set":[0,1],"p":"1/4"}]}"#,
        )
        .unwrap();
        let built = d.build(None).unwrap();
        assert_eq!(built.marginals(), vec![ratio(1, 2), ratio(1, 4)]);

        let mix: DistributionSpec = from_json(
            r#"{"type":"mixture","components":[{"type":"product","x":["1","0"]},{"type":"product","x":["0","1"]}],"weights":["1/2","1/2"]}"#,
        )
        .unwrap();
        assert_eq!(mix.build(None).unwrap().marginals(), vec![ratio(1, 2), ratio(1, 2)]);

        let sub: DistributionSpec =
            from_json(r#"{"type":"subsample","base":{"type":"product","x":["1"]},"p":"1/3"}"#).unwrap();
        assert_eq!(sub.build(None).unwrap().marginals(), vec![ratio(1, 3)]);

        let imp: DistributionSpec =
            from_json(r#"{"type":"improving","weights":[3,2,1],"p":"1/2"}"#).unwrap();
        assert!(imp.build(None).is_err());
        let host = Matroid::uniform(3, 1);
        // the heaviest element improves whenever it is not sampled
        assert_eq!(imp.build(Some(&host)).unwrap().marginals()[0], ratio(1, 2));
    }

    #[test]
    fn mismatched_mixture_weights_are_rejected() {
        let mix: DistributionSpec = from_json(
            r#"{"type":"mixture","components":[{"type":"product","x":["1"]}],"weights":["1/2","1/2"]}"#,
        )
        .unwrap();
        assert!(mix.build(None).is_err());
    }

    #[test]
    fn describe_round_trips() {
        let m = Matroid::partition(4, &[vec![0, 1], vec![2, 3]], &[1, 2]).unwrap();
        let spec = MatroidSpec::describe(&m).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(from_json::<MatroidSpec>(&text).unwrap().build().unwrap(), m);

        let d = SubsetDistribution::product(&[ratio(1, 3), int(1)]).unwrap();
        let text = serde_json::to_string(&DistributionSpec::describe(&d)).unwrap();
        assert_eq!(from_json::<DistributionSpec>(&text).unwrap().build(None).unwrap(), d);
    }

    #[test]
    fn scenario_defaults_and_orders() {
        let s: Scenario = from_json(
            r#"{"matroid":{"type":"uniform","n":3,"k":1},"distribution":{"type":"product","x":["1/2","1/2","1/2"]},"order":"fixed:[2,0,1]"}"#,
        )
        .unwrap();
        assert_eq!(s.order, OrderSpec::Fixed(vec![2, 0, 1]));
        assert_eq!(s.task(), TaskSpec::LowerBound);
        assert_eq!(s.algorithm, AlgorithmSpec::Dynkin);
        assert_eq!(s.mode, ModeSpec::Exact);
        assert_eq!("fixed:1,0".parse::<OrderSpec>().unwrap(), OrderSpec::Fixed(vec![1, 0]));
        assert_eq!(OrderSpec::Fixed(vec![1, 0]).to_string(), "fixed:[1,0]");
        assert!("sorted".parse::<OrderSpec>().is_err());
    }
}
