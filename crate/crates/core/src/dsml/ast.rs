use std::fmt;

use serde::Serialize;

use crate::demand::DeparturePolicy;
use crate::transit::DayType;

/// Source position. Compares equal to every other span so that ASTs parsed
/// from differently formatted sources compare structurally.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ImportKind {
    Network,
    Vehicle,
    Gtfs,
    Td,
}

impl ImportKind {
    pub const ALL: [ImportKind; 4] = [ImportKind::Network, ImportKind::Vehicle, ImportKind::Gtfs, ImportKind::Td];

    pub fn as_str(self) -> &'static str {
        match self {
            ImportKind::Network => "network",
            ImportKind::Vehicle => "vehicle",
            ImportKind::Gtfs => "gtfs",
            ImportKind::Td => "td",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ImportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportDecl {
    pub kind: ImportKind,
    /// Everything after the first dot of the quoted string.
    pub resource: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "id", rename_all = "lowercase")]
pub enum AssignmentTarget {
    Block(String),
    Trip(String),
}

impl fmt::Display for AssignmentTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentTarget::Block(id) => write!(f, "block {id}"),
            AssignmentTarget::Trip(id) => write!(f, "trip {id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    pub target: AssignmentTarget,
    pub vehicle_type_id: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub id: u32,
    /// Half-open window `[start_s, end_s)` in seconds from midnight.
    pub start_s: u32,
    pub end_s: u32,
    pub schedule_day: DayType,
    pub output_sampling_period: u32,
    pub assignments: Vec<Assignment>,
    pub demand_scale: Option<f64>,
    pub departure: Option<DeparturePolicy>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ScenarioProgram {
    pub imports: Vec<ImportDecl>,
    pub configurations: Vec<SimulationConfig>,
}

impl ScenarioProgram {
    pub fn import(&self, kind: ImportKind) -> Option<&ImportDecl> {
        self.imports.iter().find(|i| i.kind == kind)
    }
}
