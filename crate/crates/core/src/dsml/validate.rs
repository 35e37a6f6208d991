use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use crate::diagnostics::Diagnostic;
use crate::transit::TransitSchedule;
use crate::vehicles::{VehicleCatalog, VehicleClass};

/// Vehicle type of every schedule trip: catalog default, then block and trip assignments.
pub fn resolve_trip_types(
    config: &SimulationConfig,
    schedule: &TransitSchedule,
    catalog: &VehicleCatalog,
) -> BTreeMap<String, String> {
    let default = catalog.default_bus_type().id.clone();
    let mut map: BTreeMap<String, String> = schedule.trips.keys().map(|t| (t.clone(), default.clone())).collect();
    for a in &config.assignments {
        if let AssignmentTarget::Block(b) = &a.target {
            for t in schedule.trips_in_block(b) {
                map.insert(t.id.clone(), a.vehicle_type_id.clone());
            }
        }
    }
    for a in &config.assignments {
        if let AssignmentTarget::Trip(t) = &a.target {
            if let Some(slot) = map.get_mut(t) {
                *slot = a.vehicle_type_id.clone();
            }
        }
    }
    map
}

/// Checks imports, assignment references and block consistency.
///
/// Returns an empty list iff the program is valid against this schedule and catalog.
pub fn validate_scenario(
    program: &ScenarioProgram,
    schedule: &TransitSchedule,
    catalog: &VehicleCatalog,
) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for kind in ImportKind::ALL {
        let decls: Vec<&ImportDecl> = program.imports.iter().filter(|i| i.kind == kind).collect();
        match decls.as_slice() {
            [] => diags.push(Diagnostic::error(
                format!("import {kind}"),
                format!("missing `import \"{kind}.<name>\"`"),
            )),
            [_] => {}
            [_, second, ..] => diags.push(
                Diagnostic::error(format!("import {kind}"), format!("more than one {kind} import"))
                    .at_line(second.span.line),
            ),
        }
    }

    for cfg in &program.configurations {
        if let Some(s) = cfg.demand_scale {
            if !(s > 0.0 && s <= 1.0) {
                diags.push(
                    Diagnostic::error("demand_scale", format!("demand scale must be in (0, 1], got {s}"))
                        .in_config(cfg.id)
                        .at_line(cfg.span.line),
                );
            }
        }
        for a in &cfg.assignments {
            let construct = a.target.to_string();
            let at = |d: Diagnostic| d.in_config(cfg.id).at_line(a.span.line);
            match catalog.get(&a.vehicle_type_id) {
                None => diags.push(at(Diagnostic::error(
                    construct.clone(),
                    format!("unknown vehicle type \"{}\"", a.vehicle_type_id),
                ))),
                Some(t) if t.class != VehicleClass::Bus => diags.push(at(Diagnostic::error(
                    construct.clone(),
                    format!("vehicle type \"{}\" is not a bus type", a.vehicle_type_id),
                ))),
                Some(_) => {}
            }
            match &a.target {
                AssignmentTarget::Block(b) if !schedule.has_block(b) => {
                    diags.push(at(Diagnostic::error(construct, format!("unknown block {b}"))));
                }
                AssignmentTarget::Trip(t) if !schedule.trips.contains_key(t) => {
                    diags.push(at(Diagnostic::error(construct, format!("unknown trip {t}"))));
                }
                _ => {}
            }
        }

        let types = resolve_trip_types(cfg, schedule, catalog);
        let mut per_block: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for t in schedule.trips.values() {
            if let Some(b) = &t.block_id {
                per_block.entry(b).or_default().insert(types[&t.id].as_str());
            }
        }
        for (block, set) in per_block {
            if set.len() < 2 {
                continue;
            }
            let line = cfg
                .assignments
                .iter()
                .find(|a| match &a.target {
                    AssignmentTarget::Block(b) => b == block,
                    AssignmentTarget::Trip(t) => schedule
                        .trips
                        .get(t.as_str())
                        .is_some_and(|tr| tr.block_id.as_deref() == Some(block)),
                })
                .map_or(cfg.span.line, |a| a.span.line);
            let names: Vec<String> = set.iter().map(|s| format!("\"{s}\"")).collect();
            diags.push(
                Diagnostic::error(
                    format!("block {block}"),
                    format!(
                        "inconsistent block assignment: trips of block {block} resolve to {}",
                        names.join(" and ")
                    ),
                )
                .in_config(cfg.id)
                .at_line(line),
            );
        }
    }
    diags
}
