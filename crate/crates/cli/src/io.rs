//! JSON wire formats and their mapping onto the solver types.
//!
//! Numbers may be given as JSON numbers or as strings holding a decimal or a
//! fraction ("0.25" or "1/4"), which keeps hand-written instances exact and
//! readable. States, actions, and receivers are referred to by name in the
//! files and resolved to dense indices on load.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use persuasion::instance::Receiver;
use persuasion::mfs::MfsInstance;
use persuasion::voting::KVotingObjective;
use persuasion::{DirectScheme64, Instance64, MfsInstance64};

use crate::Failure;

/// A number that deserializes from a JSON number, a decimal string, or a
/// fraction string, and always serializes as a JSON number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct NumVisitor;

        impl Visitor<'_> for NumVisitor {
            type Value = Num;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, a decimal string, or a fraction string like \"1/4\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                let parsed = match v.split_once('/') {
                    Some((num, den)) => {
                        let num: f64 = num.trim().parse().map_err(|_| bad(v))?;
                        let den: f64 = den.trim().parse().map_err(|_| bad(v))?;
                        if den == 0.0 {
                            return Err(bad(v));
                        }
                        num / den
                    }
                    None => v.trim().parse().map_err(|_| bad(v))?,
                };
                return Ok(Num(parsed));

                fn bad<E: de::Error>(v: &str) -> E {
                    E::custom(format!("cannot read `{v}` as a number"))
                }
            }
        }

        deserializer.deserialize_any(NumVisitor)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceJson {
    pub states: Vec<StateJson>,
    pub receivers: Vec<ReceiverJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub objective: Option<ObjectiveJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub name: String,
    pub prior: Num,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverJson {
    pub name: String,
    pub actions: Vec<String>,
    /// `utilities[state][action]`, states and actions in listed order.
    pub utilities: Vec<Vec<Num>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ObjectiveJson {
    #[serde(rename = "k-voting")]
    KVoting {
        threshold: usize,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        preferred: Option<String>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeJson {
    pub signals: Vec<SignalJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalJson {
    /// Recommended action per receiver, by action name, in receiver order.
    pub profile: Vec<String>,
    /// Probability of this signal per state name; omitted states mean zero.
    pub prob_per_state: BTreeMap<String, Num>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub lo: Num,
    pub hi: Num,
    pub matrix: Vec<Vec<Num>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportJson {
    pub trials: u64,
    pub seed: u64,
    pub empirical_sender_utility: f64,
    pub deviation_gain: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MfsResultJson {
    pub k: u64,
    pub satisfied: usize,
    pub rows: usize,
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<usize>,
}

pub fn instance_from_json(json: &InstanceJson) -> Result<Instance64, Failure> {
    let states = json.states.iter().map(|s| s.name.clone()).collect();
    let prior = json.states.iter().map(|s| s.prior.0).collect();
    let receivers = json
        .receivers
        .iter()
        .map(|r| {
            let utilities = r
                .utilities
                .iter()
                .map(|row| row.iter().map(|n| n.0).collect())
                .collect();
            Receiver::new(r.name.clone(), r.actions.clone(), utilities)
        })
        .collect();
    Instance64::new(states, prior, receivers).map_err(Failure::from)
}

pub fn instance_to_json(instance: &Instance64, objective: Option<ObjectiveJson>) -> InstanceJson {
    let states = instance
        .state_names()
        .iter()
        .zip(instance.prior())
        .map(|(name, &prior)| StateJson {
            name: name.clone(),
            prior: Num(prior),
        })
        .collect();
    let receivers = instance
        .receivers()
        .iter()
        .map(|r| ReceiverJson {
            name: r.name().to_string(),
            actions: r.actions().to_vec(),
            utilities: (0..instance.num_states())
                .map(|s| (0..r.num_actions()).map(|a| Num(r.utility(s, a))).collect())
                .collect(),
        })
        .collect();
    InstanceJson {
        states,
        receivers,
        objective,
    }
}

/// Builds the objective named in the file, or simple majority over first
/// listed actions when the file names none.
pub fn objective_from_json(
    instance: &Instance64,
    json: &Option<ObjectiveJson>,
) -> Result<KVotingObjective, Failure> {
    match json {
        Some(ObjectiveJson::KVoting {
            threshold,
            preferred,
        }) => KVotingObjective::new(instance, *threshold, preferred.as_deref())
            .map_err(Failure::from),
        None => KVotingObjective::majority(instance).map_err(Failure::from),
    }
}

pub fn scheme_from_json(instance: &Instance64, json: &SchemeJson) -> Result<DirectScheme64, Failure> {
    let state_index: BTreeMap<&str, usize> = instance
        .state_names()
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut signals = Vec::with_capacity(json.signals.len());
    for signal in &json.signals {
        if signal.profile.len() != instance.num_receivers() {
            return Err(Failure::Validation(format!(
                "signal profile has {} entries for {} receivers",
                signal.profile.len(),
                instance.num_receivers()
            )));
        }
        let mut profile = Vec::with_capacity(signal.profile.len());
        for (r, action_name) in signal.profile.iter().enumerate() {
            let recv = instance.receiver(r);
            let a = recv
                .actions()
                .iter()
                .position(|a| a == action_name)
                .ok_or_else(|| {
                    Failure::Validation(format!(
                        "receiver `{}` has no action named `{action_name}`",
                        recv.name()
                    ))
                })?;
            profile.push(a);
        }
        let mut probs = vec![0.0; instance.num_states()];
        for (state_name, p) in &signal.prob_per_state {
            match state_index.get(state_name.as_str()) {
                Some(&s) => probs[s] = p.0,
                None => {
                    return Err(Failure::Validation(format!(
                        "unknown state `{state_name}` in prob_per_state"
                    )))
                }
            }
        }
        signals.push((profile, probs));
    }
    DirectScheme64::new(instance, signals).map_err(Failure::from)
}

pub fn scheme_to_json(instance: &Instance64, scheme: &DirectScheme64) -> SchemeJson {
    let signals = scheme
        .support()
        .iter()
        .enumerate()
        .map(|(idx, profile)| {
            let names = profile
                .iter()
                .enumerate()
                .map(|(r, &a)| instance.receiver(r).actions()[a].clone())
                .collect();
            let prob_per_state = instance
                .state_names()
                .iter()
                .enumerate()
                .filter(|&(s, _)| scheme.prob(s, idx) > 0.0)
                .map(|(s, name)| (name.clone(), Num(scheme.prob(s, idx))))
                .collect();
            SignalJson {
                profile: names,
                prob_per_state,
            }
        })
        .collect();
    SchemeJson { signals }
}

pub fn matrix_from_json(json: &MatrixJson) -> Result<MfsInstance64, Failure> {
    let rows = json
        .matrix
        .iter()
        .map(|row| row.iter().map(|n| n.0).collect())
        .collect();
    MfsInstance::new(rows, json.lo.0, json.hi.0).map_err(Failure::from)
}

pub fn matrix_to_json(m: &MfsInstance64) -> MatrixJson {
    MatrixJson {
        lo: Num(m.lo()),
        hi: Num(m.hi()),
        matrix: m
            .rows()
            .iter()
            .map(|row| row.iter().map(|&v| Num(v)).collect())
            .collect(),
    }
}
