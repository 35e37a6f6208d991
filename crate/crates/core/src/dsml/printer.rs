use std::fmt::Write;

use super::ast::*;
use super::lexer::is_word_char;
use crate::demand::DeparturePolicy;

fn hhmm(t: u32) -> String {
    format!("{:02}{:02}", t / 3600, (t / 60) % 60)
}

fn ident(id: &str) -> String {
    if !id.is_empty() && id.chars().all(is_word_char) {
        id.to_string()
    } else {
        format!("\"{id}\"")
    }
}

/// Canonical source text; parses back to an equal program.
pub fn print_scenario(p: &ScenarioProgram) -> String {
    let mut out = String::new();
    for i in &p.imports {
        let _ = writeln!(out, "import \"{}.{}\"", i.kind, i.resource);
    }
    for c in &p.configurations {
        out.push('\n');
        let _ = writeln!(out, "simulation configuration {} {{", c.id);
        let _ = writeln!(out, "    time [{}:{}]", hhmm(c.start_s), hhmm(c.end_s));
        let _ = writeln!(out, "    schedule {}", c.schedule_day.as_str());
        let _ = writeln!(out, "    output_sampling_period {}", c.output_sampling_period);
        if let Some(s) = c.demand_scale {
            let _ = writeln!(out, "    demand_scale {s:?}");
        }
        if let Some(d) = c.departure {
            let word = match d {
                DeparturePolicy::Uniform => "uniform",
                DeparturePolicy::Random => "random",
            };
            let _ = writeln!(out, "    departure {word}");
        }
        if !c.assignments.is_empty() {
            out.push_str("    vehicleassignment {\n");
            for a in &c.assignments {
                let (kw, id) = match &a.target {
                    AssignmentTarget::Block(id) => ("block", id),
                    AssignmentTarget::Trip(id) => ("trip", id),
                };
                let _ = writeln!(out, "        {kw} {}: \"{}\"", ident(id), a.vehicle_type_id);
            }
            out.push_str("    }\n");
        }
        out.push_str("}\n");
    }
    out
}
