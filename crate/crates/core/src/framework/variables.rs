//! The action-capacity variable set and the three-level measurement boundary.
//!
//! These are enumerations only. Nothing here is estimated.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionCapacityVariable {
    /// Human judgement and responsibility.
    H,
    /// Physical capital.
    K,
    /// Model and software-agent capacity.
    M,
    /// Robotic and cyber-physical capacity.
    R,
    /// Protocol quality.
    P,
    /// Compute availability.
    C,
    /// Energy availability.
    En,
    /// Auditable trust.
    T,
    /// Uncertainty and institutional constraints.
    Omega,
}

impl ActionCapacityVariable {
    pub const ALL: [ActionCapacityVariable; 9] = [
        ActionCapacityVariable::H,
        ActionCapacityVariable::K,
        ActionCapacityVariable::M,
        ActionCapacityVariable::R,
        ActionCapacityVariable::P,
        ActionCapacityVariable::C,
        ActionCapacityVariable::En,
        ActionCapacityVariable::T,
        ActionCapacityVariable::Omega,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            ActionCapacityVariable::H => "H",
            ActionCapacityVariable::K => "K",
            ActionCapacityVariable::M => "M",
            ActionCapacityVariable::R => "R",
            ActionCapacityVariable::P => "P",
            ActionCapacityVariable::C => "C",
            ActionCapacityVariable::En => "En",
            ActionCapacityVariable::T => "T",
            ActionCapacityVariable::Omega => "Omega",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ActionCapacityVariable::H => "human judgement and responsibility",
            ActionCapacityVariable::K => "physical capital",
            ActionCapacityVariable::M => "model and software-agent capacity",
            ActionCapacityVariable::R => "robotic and cyber-physical capacity",
            ActionCapacityVariable::P => "protocol quality",
            ActionCapacityVariable::C => "compute availability",
            ActionCapacityVariable::En => "energy availability",
            ActionCapacityVariable::T => "auditable trust",
            ActionCapacityVariable::Omega => "uncertainty and institutional constraints",
        }
    }
}

impl fmt::Display for ActionCapacityVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for ActionCapacityVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        ActionCapacityVariable::ALL
            .into_iter()
            .find(|v| v.symbol().eq_ignore_ascii_case(t))
            .ok_or_else(|| format!("unknown action-capacity variable `{s}`"))
    }
}

/// How far an adoption statistic reaches. Aggregate statistics establish the
/// first level at most; the third needs delegation and audit data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementLevel {
    AiUse,
    AiIntegration,
    AgenticTransformation,
}

impl MeasurementLevel {
    pub fn definition(self) -> &'static str {
        match self {
            MeasurementLevel::AiUse => "AI tools used in at least one business function",
            MeasurementLevel::AiIntegration => {
                "AI embedded in recurring processes that stay mainly human-directed"
            }
            MeasurementLevel::AgenticTransformation => {
                "agents, robots or protocols prepare, execute, verify or coordinate tasks under audit and override"
            }
        }
    }

    pub fn observable_evidence(self) -> &'static str {
        match self {
            MeasurementLevel::AiUse => "survey adoption and enterprise AI-use statistics",
            MeasurementLevel::AiIntegration => {
                "workflow tools, AI-assisted scoring or programming, human approval loops"
            }
            MeasurementLevel::AgenticTransformation => {
                "agent logs, delegated workflows, protocol settlement, traceable decisions"
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_symbols_round_trip() {
        assert_eq!(ActionCapacityVariable::ALL.len(), 9);
        for v in ActionCapacityVariable::ALL {
            assert_eq!(v.symbol().parse::<ActionCapacityVariable>().unwrap(), v);
        }
        assert_eq!("omega".parse::<ActionCapacityVariable>().unwrap(), ActionCapacityVariable::Omega);
        assert!("AC".parse::<ActionCapacityVariable>().is_err());
    }

    #[test]
    fn levels_are_ordered() {
        assert!(MeasurementLevel::AiUse < MeasurementLevel::AgenticTransformation);
    }
}
