//! The scenario language.
//!
//! ```text
//! import "network.toy"
//! import "vehicle.fleet.json"
//! import "gtfs.latest"
//! import "td.demand.od"
//!
//! simulation configuration 1 {
//!     time [0700:1000]          # HHMM, end may be 2400
//!     schedule weekday
//!     output_sampling_period 900
//!     demand_scale 0.8          # optional, (0, 1]
//!     departure uniform         # optional, uniform | random
//!     vehicleassignment {
//!         block 101: "Gillig_103"
//!         trip 4_0700: "BYD_K9"
//!     }
//! }
//! ```

mod ast;
mod interpret;
mod lexer;
mod parser;
mod printer;
mod validate;

use std::fmt;

pub use ast::{Assignment, AssignmentTarget, ImportDecl, ImportKind, ScenarioProgram, SimulationConfig, Span};
pub use interpret::{
    interpret, interpret_with, load_resources, DirectoryWorkspace, NetworkData, ResolvedConfig, ResourceResolver,
    Resources,
};
pub use parser::{parse_scenario, parse_time_literal};
pub use printer::print_scenario;
pub use validate::{resolve_trip_types, validate_scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownKeyword,
    MalformedTime,
    DuplicateConfig,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::UnknownKeyword => "unknown keyword",
            ParseErrorKind::MalformedTime => "malformed time literal",
            ParseErrorKind::DuplicateConfig => "duplicate configuration id",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {kind}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(at: Span, kind: ParseErrorKind, message: impl Into<String>) -> Self {
        Self {
            line: at.line,
            col: at.col,
            kind,
            message: message.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transit::DayType;

    const LISTING: &str = r#"import "network.Chattanooga"
import "vehicle.BUS_type.xlsx"
import "gtfs.latest"
import "td.OD_person.od"

simulation configuration 1 {
    time [0000:1200]
    schedule weekday
    output_sampling_period 3600
    vehicleassignment {
        block 101: "Gillig_103"
    }
}
"#;

    #[test]
    fn parses_listing() {
        let p = parse_scenario(LISTING).unwrap();
        let kinds: Vec<(ImportKind, &str)> = p.imports.iter().map(|i| (i.kind, i.resource.as_str())).collect();
        assert_eq!(
            kinds,
            [
                (ImportKind::Network, "Chattanooga"),
                (ImportKind::Vehicle, "BUS_type.xlsx"),
                (ImportKind::Gtfs, "latest"),
                (ImportKind::Td, "OD_person.od")
            ]
        );
        let c = &p.configurations[0];
        assert_eq!((c.id, c.start_s, c.end_s), (1, 0, 43_200));
        assert_eq!(c.schedule_day, DayType::Weekday);
        assert_eq!(c.output_sampling_period, 3600);
        assert_eq!(c.assignments[0].target, AssignmentTarget::Block("101".into()));
        assert_eq!(c.assignments[0].vehicle_type_id, "Gillig_103");
        assert_eq!(c.assignments[0].span.line, 11);
    }

    #[test]
    fn empty_body_misses_time() {
        let err = parse_scenario("simulation configuration 1 { }").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert!(err.to_string().contains("missing required `time` clause"), "{err}");
    }

    #[test]
    fn bad_minutes_rejected() {
        let src = "simulation configuration 1 {\n  time [0900:0860]\n}";
        let err = parse_scenario(src).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MalformedTime);
        assert_eq!((err.line, err.col), (2, 14));
    }

    #[test]
    fn time_window_rules() {
        let cfg = |t: &str| {
            format!("simulation configuration 1 {{ time [{t}] schedule weekday output_sampling_period 60 }}")
        };
        assert_eq!(parse_scenario(&cfg("0000:2400")).unwrap().configurations[0].end_s, 86_400);
        for bad in ["2400:2400", "1200:1100", "1200:1200", "900:1000", "0000:2401"] {
            assert_eq!(parse_scenario(&cfg(bad)).unwrap_err().kind, ParseErrorKind::MalformedTime, "{bad}");
        }
    }

    #[test]
    fn structural_errors() {
        let base = "simulation configuration 1 { time [0000:0100] schedule weekday output_sampling_period 60 }\n";
        let dup = format!("{base}{base}");
        assert_eq!(parse_scenario(&dup).unwrap_err().kind, ParseErrorKind::DuplicateConfig);
        let unknown = base.replace("schedule weekday", "schedule weekday\nspeed 5");
        assert_eq!(parse_scenario(&unknown).unwrap_err().kind, ParseErrorKind::UnknownKeyword);
        assert_eq!(parse_scenario("import \"map.X\"").unwrap_err().kind, ParseErrorKind::UnknownKeyword);
        assert!(parse_scenario(&base.replace("configuration 1", "configuration 0")).is_err());
        assert!(parse_scenario(&base.replace("schedule weekday", "schedule holiday")).is_err());
        assert!(parse_scenario(&base.replace("}", "")).is_err());
    }

    #[test]
    fn comments_and_extensions() {
        let src = "# fleet study\nsimulation configuration 3 { # trailing\n time [0700:1000]\n schedule weekend\n \
                   output_sampling_period 900\n demand_scale 0.8\n departure random\n vehicleassignment { trip \"T-1 a\": \"E\" }\n}";
        let p = parse_scenario(src).unwrap();
        let c = &p.configurations[0];
        assert_eq!(c.demand_scale, Some(0.8));
        assert_eq!(c.departure, Some(crate::demand::DeparturePolicy::Random));
        assert_eq!(c.assignments[0].target, AssignmentTarget::Trip("T-1 a".into()));
        assert_eq!(parse_scenario(&print_scenario(&p)).unwrap(), p);
    }

    #[test]
    fn listing_round_trips() {
        let p = parse_scenario(LISTING).unwrap();
        assert_eq!(parse_scenario(&print_scenario(&p)).unwrap(), p);
    }
}
