//! Combinatorial task-instance enumeration over lab configurations.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taskspec::Primitive;

pub const OBJECTS_PER_LAB: usize = 7;
pub const CONTAINERS_PER_LAB: usize = 2;
pub const CAMERA_BINS_PER_LAB: usize = 5;
pub const DEFAULT_SPATIAL_COMBINATIONS: usize = 90;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lab `{lab}`: {message}")]
pub struct ConfigError {
    pub lab: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Appliances {
    pub drawer: bool,
    pub microwave: bool,
    pub stove: bool,
    pub coffee_machine: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabConfig {
    pub lab: String,
    /// Graspable objects (X in the templates).
    pub objects: Vec<String>,
    /// Openable containers (Y in the templates), each backed by an appliance flag.
    pub containers: Vec<String>,
    pub appliances: Appliances,
    pub camera_bins: Vec<String>,
    pub spatial_combinations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Template {
    PickPlaceBin,
    Open,
    Close,
    OpenPickPlace,
    PickPlaceClose,
    TurnOnStove,
    TurnOffStove,
    MakeCoffee,
}

impl Template {
    pub const ALL: [Template; 8] = [
        Template::PickPlaceBin,
        Template::Open,
        Template::Close,
        Template::OpenPickPlace,
        Template::PickPlaceClose,
        Template::TurnOnStove,
        Template::TurnOffStove,
        Template::MakeCoffee,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Template::PickPlaceBin => "pick-place-bin",
            Template::Open => "open",
            Template::Close => "close",
            Template::OpenPickPlace => "open-pick-place",
            Template::PickPlaceClose => "pick-place-close",
            Template::TurnOnStove => "turn-on-stove",
            Template::TurnOffStove => "turn-off-stove",
            Template::MakeCoffee => "make-coffee",
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One base task of a lab, before camera and spatial variation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub lab: String,
    pub template: Template,
    pub object: Option<String>,
    pub container: Option<String>,
    pub goal: Vec<Primitive>,
    pub instruction: String,
}

/// A base task paired with one camera bin and one spatial arrangement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariedInstance {
    pub lab: String,
    /// Index into the lab's base instances.
    pub base: usize,
    pub camera_bin: String,
    pub spatial_combination: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabCounts {
    pub lab: String,
    pub per_template: Vec<(Template, usize)>,
    pub base: usize,
    pub varied: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Enumeration {
    pub base: Vec<InstanceDescriptor>,
    pub labs: Vec<LabCounts>,
    pub total_base: usize,
    pub total_varied: usize,
}

impl LabConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |message: String| ConfigError {
            lab: self.lab.clone(),
            message,
        };
        if self.objects.len() != OBJECTS_PER_LAB {
            return Err(err(format!("expected {OBJECTS_PER_LAB} objects, found {}", self.objects.len())));
        }
        if self.containers.len() != CONTAINERS_PER_LAB {
            return Err(err(format!(
                "expected {CONTAINERS_PER_LAB} containers, found {}",
                self.containers.len()
            )));
        }
        if self.camera_bins.len() != CAMERA_BINS_PER_LAB {
            return Err(err(format!(
                "expected {CAMERA_BINS_PER_LAB} camera bins, found {}",
                self.camera_bins.len()
            )));
        }
        for c in &self.containers {
            let present = match c.as_str() {
                "drawer" => self.appliances.drawer,
                "microwave" => self.appliances.microwave,
                _ => true,
            };
            if !present {
                return Err(err(format!("container `{c}` has no matching appliance flag")));
            }
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = self.objects.iter().find(|o| !seen.insert(o.as_str())) {
            return Err(err(format!("object `{dup}` listed twice")));
        }
        if self.spatial_combinations == 0 {
            return Err(err("spatial combination count must be positive".into()));
        }
        Ok(())
    }

    /// Base task instances in template order.
    pub fn base_instances(&self) -> Vec<InstanceDescriptor> {
        use Primitive::*;
        let mut out = Vec::new();
        let mut push = |template, object: Option<&String>, container: Option<&String>, goal: Vec<Primitive>, instruction: String| {
            out.push(InstanceDescriptor {
                lab: self.lab.clone(),
                template,
                object: object.cloned(),
                container: container.cloned(),
                goal,
                instruction,
            })
        };
        for x in &self.objects {
            push(
                Template::PickPlaceBin,
                Some(x),
                None,
                vec![Pick, PlaceBin],
                format!("pick the {x} and place it in the bin"),
            );
        }
        for y in &self.containers {
            push(Template::Open, None, Some(y), vec![Open], format!("open the {y}"));
        }
        for y in &self.containers {
            push(Template::Close, None, Some(y), vec![Close], format!("close the {y}"));
        }
        for y in &self.containers {
            for x in &self.objects {
                push(
                    Template::OpenPickPlace,
                    Some(x),
                    Some(y),
                    vec![Open, Pick, Place],
                    format!("open the {y}, pick the {x} and place it in the {y}"),
                );
            }
        }
        for y in &self.containers {
            for x in &self.objects {
                push(
                    Template::PickPlaceClose,
                    Some(x),
                    Some(y),
                    vec![Pick, Place, Close],
                    format!("pick the {x}, place it in the {y} and close the {y}"),
                );
            }
        }
        if self.appliances.stove {
            let stove = "stove".to_string();
            push(
                Template::TurnOnStove,
                None,
                Some(&stove),
                vec![Custom("turnOn".into())],
                "turn on the stove".into(),
            );
            push(
                Template::TurnOffStove,
                None,
                Some(&stove),
                vec![Custom("turnOff".into())],
                "turn off the stove".into(),
            );
        }
        if self.appliances.coffee_machine {
            let pod = "coffee pod".to_string();
            let machine = "coffee machine".to_string();
            push(
                Template::MakeCoffee,
                Some(&pod),
                Some(&machine),
                vec![Pick, Place, Close],
                "pick up the coffee pod, place it in the coffee machine and close the lid".into(),
            );
        }
        out
    }

    /// Camera bins crossed with spatial arrangements; base tasks are assigned
    /// round-robin so each receives a near-equal share of the variations.
    pub fn varied_instances(&self) -> Vec<VariedInstance> {
        let n_base = self.base_instances().len().max(1);
        let mut out = Vec::with_capacity(self.camera_bins.len() * self.spatial_combinations);
        for (b, bin) in self.camera_bins.iter().enumerate() {
            for s in 0..self.spatial_combinations {
                let k = b * self.spatial_combinations + s;
                out.push(VariedInstance {
                    lab: self.lab.clone(),
                    base: k % n_base,
                    camera_bin: bin.clone(),
                    spatial_combination: s,
                });
            }
        }
        out
    }
}

/// The default eight labs: seven objects each, a drawer and a microwave, a
/// stove, five camera bins, 90 spatial arrangements, and a coffee machine in
/// the first lab only.
pub fn default_labs() -> Vec<LabConfig> {
    const POOL: &[&str] = &[
        "carrot", "bowl", "mug", "teapot", "banana", "apple", "cup", "sponge", "spoon", "lemon", "can",
        "marker", "plate", "ketchup", "milk", "butter", "pepper", "tomato", "cheese", "bread",
    ];
    let bins = ["agent-front", "agent-left", "agent-right", "shoulder-left", "shoulder-right"];
    (0..8)
        .map(|i| LabConfig {
            lab: format!("lab{}", i + 1),
            objects: (0..OBJECTS_PER_LAB).map(|k| POOL[(i * 3 + k) % POOL.len()].to_string()).collect(),
            containers: vec!["drawer".into(), "microwave".into()],
            appliances: Appliances {
                drawer: true,
                microwave: true,
                stove: true,
                coffee_machine: i == 0,
            },
            camera_bins: bins.iter().map(|s| s.to_string()).collect(),
            spatial_combinations: DEFAULT_SPATIAL_COMBINATIONS,
        })
        .collect()
}

/// Enumerate every lab's base instances and count the camera x spatial
/// variations. A pure function of the configuration.
pub fn enumerate_instances(labs: &[LabConfig]) -> Result<Enumeration, ConfigError> {
    let mut base = Vec::new();
    let mut counts = Vec::new();
    for lab in labs {
        lab.validate()?;
        let instances = lab.base_instances();
        let per_template = Template::ALL
            .iter()
            .map(|t| (*t, instances.iter().filter(|d| d.template == *t).count()))
            .collect();
        counts.push(LabCounts {
            lab: lab.lab.clone(),
            per_template,
            base: instances.len(),
            varied: lab.camera_bins.len() * lab.spatial_combinations,
        });
        base.extend(instances);
    }
    Ok(Enumeration {
        total_base: base.len(),
        total_varied: counts.iter().map(|c| c.varied).sum(),
        base,
        labs: counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_lab_template_counts() {
        let e = enumerate_instances(&default_labs()).unwrap();
        for (i, lab) in e.labs.iter().enumerate() {
            let counts: Vec<usize> = lab.per_template.iter().map(|(_, n)| *n).collect();
            let coffee = usize::from(i == 0);
            assert_eq!(counts, vec![7, 2, 2, 14, 14, 1, 1, coffee]);
            assert_eq!(lab.varied, 450);
        }
        let coffee_labs = e.labs.iter().filter(|l| l.per_template[7].1 == 1).count();
        assert_eq!(coffee_labs, 1);
        assert!(e.total_varied > 3000);
        assert_eq!(e.total_base, 8 * 41 + 1);
    }

    #[test]
    fn pure_function() {
        let labs = default_labs();
        assert_eq!(enumerate_instances(&labs).unwrap(), enumerate_instances(&labs).unwrap());
    }

    #[test]
    fn roster_mismatch() {
        let mut labs = default_labs();
        labs[3].objects.pop();
        let err = enumerate_instances(&labs).unwrap_err();
        assert_eq!(err.lab, "lab4");
        let mut labs = default_labs();
        labs[0].appliances.microwave = false;
        assert!(enumerate_instances(&labs).is_err());
    }

    #[test]
    fn varied_instances_cover_bins_and_bases() {
        let lab = &default_labs()[1];
        let v = lab.varied_instances();
        assert_eq!(v.len(), 450);
        let n_base = lab.base_instances().len();
        let mut per_base = vec![0; n_base];
        for x in &v {
            per_base[x.base] += 1;
        }
        let (lo, hi) = (per_base.iter().min().unwrap(), per_base.iter().max().unwrap());
        assert!(hi - lo <= 1, "{per_base:?}");
    }

    #[test]
    fn instructions_name_their_objects() {
        let lab = &default_labs()[0];
        for d in lab.base_instances() {
            if let Some(x) = &d.object {
                assert!(d.instruction.contains(x.as_str()), "{}", d.instruction);
            }
        }
    }
}
