use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::scenario_detect::{ScenarioParameters, TriggerRule};

use super::OpenXError;

pub const EGO: &str = "Ego";
pub const ADVERSARY: &str = "Adversary";

#[derive(Debug, Clone, PartialEq)]
pub struct FileHeader {
    pub rev_major: u32,
    pub rev_minor: u32,
    pub date: String,
    pub description: String,
    pub author: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterDeclaration {
    pub name: String,
    pub parameter_type: String,
    pub value: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub center: [f64; 3],
    pub dimensions: [f64; 3],
}

impl Default for BoundingBox {
    fn default() -> Self {
        Self {
            center: [1.4, 0.0, 0.75],
            dimensions: [4.5, 1.8, 1.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entity {
    pub name: String,
    pub vehicle_name: String,
    pub category: String,
    pub bounding_box: BoundingBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitState {
    pub entity: String,
    pub speed: f64,
    pub road_id: String,
    pub lane_id: i32,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    /// The entity has driven at least `value` metres since the start.
    TraveledDistance { entity: String, value: f64 },
    /// Signed longitudinal road distance `entity − reference` compared to `value`.
    RelativeDistance {
        entity: String,
        reference: String,
        value: f64,
        rule: TriggerRule,
    },
}

impl Condition {
    pub fn entity(&self) -> &str {
        match self {
            Condition::TraveledDistance { entity, .. } | Condition::RelativeDistance { entity, .. } => entity,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    /// Linear transition to `speed` over `duration` seconds.
    AbsoluteSpeed { speed: f64, duration: f64 },
    /// Cubic lateral transition to the centre of `target_lane`.
    LaneChange { target_lane: i32, duration: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub name: String,
    pub condition: Condition,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManeuverGroup {
    pub name: String,
    pub actor: String,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscDocument {
    pub header: FileHeader,
    pub parameters: Vec<ParameterDeclaration>,
    pub road_network: String,
    pub entities: Vec<Entity>,
    pub init: Vec<InitState>,
    pub story_name: String,
    pub maneuver_groups: Vec<ManeuverGroup>,
}

impl OscDocument {
    pub fn events(&self) -> impl Iterator<Item = (&ManeuverGroup, &Event)> {
        self.maneuver_groups.iter().flat_map(|g| g.events.iter().map(move |e| (g, e)))
    }

    pub fn parameter(&self, name: &str) -> Option<&str> {
        self.parameters.iter().find(|p| p.name == name).map(|p| p.value.as_str())
    }

    /// Checks entity references, event ordering and the lane-change count.
    pub fn validate(&self) -> Result<(), OpenXError> {
        if self.entities.is_empty() {
            return Err(OpenXError::Missing("Entities"));
        }
        if self.init.is_empty() {
            return Err(OpenXError::Missing("Init"));
        }
        if self.events().next().is_none() {
            return Err(OpenXError::EmptyStory);
        }
        let known = |name: &str| self.entities.iter().any(|e| e.name == name);
        for init in &self.init {
            if !known(&init.entity) {
                return Err(OpenXError::UnknownEntity(init.entity.clone()));
            }
        }
        let mut lane_changes = 0;
        for group in &self.maneuver_groups {
            if !known(&group.actor) {
                return Err(OpenXError::UnknownEntity(group.actor.clone()));
            }
            let mut last_distance = f64::NEG_INFINITY;
            for event in &group.events {
                match &event.condition {
                    Condition::TraveledDistance { entity, value } => {
                        if !known(entity) {
                            return Err(OpenXError::UnknownEntity(entity.clone()));
                        }
                        if *value < last_distance {
                            return Err(OpenXError::Invalid(format!("speed events of {} are not ordered by distance", group.actor)));
                        }
                        last_distance = *value;
                    }
                    Condition::RelativeDistance { entity, reference, .. } => {
                        for name in [entity, reference] {
                            if !known(name) {
                                return Err(OpenXError::UnknownEntity(name.clone()));
                            }
                        }
                    }
                }
                if let Action::LaneChange { .. } = event.action {
                    if group.actor == ADVERSARY {
                        lane_changes += 1;
                    }
                }
            }
        }
        if lane_changes != 1 {
            return Err(OpenXError::Invalid(format!("expected one adversary lane change, found {lane_changes}")));
        }
        Ok(())
    }
}

fn entity(name: &str) -> Entity {
    Entity {
        name: name.to_string(),
        vehicle_name: String::from("car"),
        category: String::from("car"),
        bounding_box: BoundingBox::default(),
    }
}

fn speed_events(actor: &str, distance: &[f64], speed: &[f64], step: f64) -> Vec<Event> {
    // event i ramps towards sample i once the actor has covered the distance of
    // sample i − 1, so each ramp spans the interval the two samples bound
    (1..speed.len())
        .map(|i| Event {
            name: format!("{actor}Speed{i}"),
            condition: Condition::TraveledDistance {
                entity: actor.to_string(),
                value: distance[i - 1],
            },
            action: Action::AbsoluteSpeed {
                speed: speed[i],
                duration: step,
            },
        })
        .collect()
}

fn param(name: &str, parameter_type: &str, value: String) -> ParameterDeclaration {
    ParameterDeclaration {
        name: name.to_string(),
        parameter_type: parameter_type.to_string(),
        value,
    }
}

/// Builds the scenario document for one extracted parameter set.
pub fn build_openscenario(params: &ScenarioParameters, odr_file: &str, name: &str) -> Result<OscDocument, OpenXError> {
    if params.final_lane == params.adversary.initial_lane {
        return Err(OpenXError::NoLaneChange { lane: params.final_lane });
    }
    let step = params.window_length() / (params.m - 1) as f64;
    let init = |entity: &str, a: &crate::scenario_detect::ActorParameters| InitState {
        entity: entity.to_string(),
        speed: a.initial_speed,
        road_id: String::from("1"),
        lane_id: a.initial_lane,
        s: a.initial_position,
    };
    let mut adversary_events = speed_events(ADVERSARY, &params.adversary.distance, &params.adversary.speed, step);
    adversary_events.push(Event {
        name: String::from("AdversaryLaneChange"),
        condition: Condition::RelativeDistance {
            entity: ADVERSARY.to_string(),
            reference: EGO.to_string(),
            value: params.triggering_distance,
            rule: params.trigger_rule,
        },
        action: Action::LaneChange {
            target_lane: params.final_lane,
            duration: params.lane_change_duration,
        },
    });
    let doc = OscDocument {
        header: FileHeader {
            rev_major: 1,
            rev_minor: 1,
            date: String::from("2000-01-01T00:00:00"),
            description: format!("{} {}", params.kind.as_str(), name),
            author: String::from("scenex"),
        },
        parameters: alloc::vec![
            param("Kind", "string", params.kind.as_str().to_string()),
            param("SourceTrack", "integer", params.adversary_id.to_string()),
            param("WindowStart", "double", format!("{}", params.window_start)),
            param("WindowEnd", "double", format!("{}", params.window_end)),
            param("TCut", "double", format!("{}", params.t_cut)),
        ],
        road_network: odr_file.to_string(),
        entities: alloc::vec![entity(EGO), entity(ADVERSARY)],
        init: alloc::vec![init(EGO, &params.ego), init(ADVERSARY, &params.adversary)],
        story_name: name.to_string(),
        maneuver_groups: alloc::vec![
            ManeuverGroup {
                name: String::from("EgoManeuvers"),
                actor: EGO.to_string(),
                events: speed_events(EGO, &params.ego.distance, &params.ego.speed, step),
            },
            ManeuverGroup {
                name: String::from("AdversaryManeuvers"),
                actor: ADVERSARY.to_string(),
                events: adversary_events,
            },
        ],
    };
    doc.validate()?;
    Ok(doc)
}
