//! Take-off concepts behind a common trait, registered by name.
//!
//! Each concept turns an [`Aircraft`] into the four quantities compared
//! across concepts: peak ground power, peak on-board power, added on-board
//! mass and occupied ground area. The registry maps a name to a factory
//! that builds the concept from a [`Scenario`], so the command-line
//! front-end can select concepts at runtime.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::criteria::{criteria_from_assessment, CriteriaScalings};
use crate::crosswind::{Aircraft, Environment};
use crate::error::{Error, Result};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptAssessment {
    pub concept: String,
    /// Peak power of additional ground machinery [W].
    pub peak_ground_power: f64,
    /// Peak power of additional on-board machinery [W].
    pub peak_onboard_power: f64,
    /// Additional on-board mass [kg].
    pub added_mass: f64,
    /// Total ground area occupied during take-off [m^2].
    pub ground_area: f64,
    /// Part of the ground area that does not scale with wing area [m^2].
    pub area_floor: f64,
    /// Concept-specific intermediate results (SI units, angles in radians).
    pub details: BTreeMap<String, f64>,
}

impl ConceptAssessment {
    pub fn criteria(&self, ac: &Aircraft, env: &Environment) -> Result<CriteriaScalings> {
        criteria_from_assessment(
            self.peak_ground_power,
            self.peak_onboard_power,
            self.added_mass,
            self.ground_area,
            self.area_floor,
            ac,
            env,
        )
    }
}

pub trait TakeoffConcept: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn assess(&self, env: &Environment, ac: &Aircraft) -> Result<ConceptAssessment>;
}

impl fmt::Debug for dyn TakeoffConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TakeoffConcept")
            .field("name", &self.name())
            .finish()
    }
}

/// Builds a concept for the aircraft at the given index of a scenario;
/// some concepts carry size-dependent settings.
pub type ConceptFactory = fn(&Scenario, usize) -> Result<Box<dyn TakeoffConcept>>;

#[derive(Clone, Default)]
pub struct ConceptRegistry {
    entries: Vec<(&'static str, ConceptFactory)>,
}

impl ConceptRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding the vertical, rotational and linear concepts, in
    /// that order.
    pub fn builtin() -> Self {
        let mut reg = Self::new();
        reg.register("vertical", |s, _| {
            Ok(Box::new(crate::vertical::VerticalConcept::from_scenario(
                s,
            )?))
        });
        reg.register("rotational", |s, _| {
            Ok(Box::new(
                crate::rotational::RotationalConcept::from_scenario(s)?,
            ))
        });
        reg.register("linear", |s, i| {
            Ok(Box::new(crate::linear::LinearConcept::from_scenario(s, i)?))
        });
        reg
    }

    /// Adds a concept; a later registration under the same name replaces
    /// the earlier one but keeps its position.
    pub fn register(&mut self, name: &'static str, factory: ConceptFactory) {
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(entry) => entry.1 = factory,
            None => self.entries.push((name, factory)),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|(n, _)| *n)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| *n == name)
    }

    pub fn build(
        &self,
        name: &str,
        scenario: &Scenario,
        aircraft_index: usize,
    ) -> Result<Box<dyn TakeoffConcept>> {
        let (_, factory) = self
            .entries
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown take-off concept '{name}' (available: {})",
                    self.names().collect::<Vec<_>>().join(", ")
                ))
            })?;
        factory(scenario, aircraft_index)
    }

    pub fn build_all(
        &self,
        scenario: &Scenario,
        aircraft_index: usize,
    ) -> Result<Vec<Box<dyn TakeoffConcept>>> {
        self.entries
            .iter()
            .map(|(_, f)| f(scenario, aircraft_index))
            .collect()
    }
}

impl fmt::Debug for ConceptRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}
