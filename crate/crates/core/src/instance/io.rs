//! Instance directory serialization: one CSV table per entity kind plus
//! per-sub-period time series under `series/` with header
//! `hour,entity_id,value`. Floats use Rust's shortest round-trip formatting
//! so parse(save(inst)) == inst field-for-field.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{
    CEMInstance, PenaltyConfig, PlanningPeriod, Policy, PolicyKind, Resource, ResourceKind,
    Scenario, SubPeriod, TransmissionLink, Zone,
};
use crate::InstanceError;

fn kind_tag(kind: ResourceKind) -> &'static str {
    match kind {
        ResourceKind::ThermalUc => "thermal-uc-linear",
        ResourceKind::Vre => "vre",
        ResourceKind::ShortStorage => "short-storage",
        ResourceKind::MdsStorage => "mds-storage",
        ResourceKind::ReservoirHydro => "reservoir-hydro",
    }
}

fn parse_kind(s: &str) -> Option<ResourceKind> {
    Some(match s {
        "thermal-uc-linear" => ResourceKind::ThermalUc,
        "vre" => ResourceKind::Vre,
        "short-storage" => ResourceKind::ShortStorage,
        "mds-storage" => ResourceKind::MdsStorage,
        "reservoir-hydro" => ResourceKind::ReservoirHydro,
        _ => return None,
    })
}

pub fn save_instance(inst: &CEMInstance, dir: &Path) -> Result<(), InstanceError> {
    std::fs::create_dir_all(dir.join("series"))?;
    let write = |name: &str, content: String| -> Result<(), InstanceError> {
        std::fs::write(dir.join(name), content)?;
        Ok(())
    };

    let mut s = String::from("id,probability\n");
    for sc in &inst.scenarios {
        let _ = writeln!(s, "{},{}", sc.id, sc.probability);
    }
    write("scenarios.csv", s)?;

    let mut s = String::from("id\n");
    for z in &inst.zones {
        let _ = writeln!(s, "{}", z.id);
    }
    write("zones.csv", s)?;

    let mut s = String::from(
        "id,zone,kind,existing_cap,max_build,max_retire,invest_cost,retire_cost,var_cost,\
         co2_rate,ramp_frac,min_stable,eta_self,eta_c,eta_d,energy_ratio,integer_build,unit_size\n",
    );
    for r in &inst.resources {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.id,
            r.zone,
            kind_tag(r.kind),
            r.existing_cap,
            r.max_build,
            r.max_retire,
            r.invest_cost,
            r.retire_cost,
            r.var_cost,
            r.co2_rate,
            r.ramp_frac,
            r.min_stable,
            r.eta_self,
            r.eta_c,
            r.eta_d,
            r.energy_ratio,
            r.integer_build,
            r.unit_size
        );
    }
    write("resources.csv", s)?;

    let mut s = String::from("id,from,to,capacity,loss\n");
    for l in &inst.links {
        let _ = writeln!(s, "{},{},{},{},{}", l.id, l.from, l.to, l.capacity, l.loss);
    }
    write("links.csv", s)?;

    let mut s = String::from("id,fixed_cost_scale\n");
    for p in &inst.periods {
        let _ = writeln!(s, "{},{}", p.id, p.fixed_cost_scale);
    }
    write("periods.csv", s)?;

    let mut s = String::from("id,period,scenario,hours,cost_scale\n");
    for p in &inst.periods {
        for w in &p.subperiods {
            let _ = writeln!(s, "{},{},{},{},{}", w.id, p.id, w.scenario, w.hours, w.cost_scale);
        }
    }
    write("subperiods.csv", s)?;

    let mut s = String::from("id,kind,cap,penalty,scope\n");
    for pol in &inst.policies {
        let scope: Vec<String> = pol
            .scope
            .iter()
            .map(|(p, sc)| format!("{p}:{sc}"))
            .collect();
        let kind = match pol.kind {
            PolicyKind::Co2Cap => "co2-cap",
            PolicyKind::MinShare => "min-share",
        };
        let _ = writeln!(s, "{},{},{},{},{}", pol.id, kind, pol.cap, pol.penalty, scope.join(";"));
    }
    write("policies.csv", s)?;

    write(
        "penalties.csv",
        format!(
            "co2_penalty,nse_cost,mds_boundary_penalty\n{},{},{}\n",
            inst.penalties.co2_penalty, inst.penalties.nse_cost, inst.penalties.mds_boundary_penalty
        ),
    )?;

    for p in &inst.periods {
        for w in &p.subperiods {
            for (tag, map) in [
                ("demand", &w.demand),
                ("availability", &w.availability),
                ("inflow", &w.inflow),
            ] {
                let mut s = String::from("hour,entity_id,value\n");
                for (entity, series) in map {
                    for (t, v) in series.iter().enumerate() {
                        let _ = writeln!(s, "{t},{entity},{v}");
                    }
                }
                write(&format!("series/w{}_{tag}.csv", w.id), s)?;
            }
        }
    }
    Ok(())
}

struct Table {
    file: String,
    header: Vec<String>,
    rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    fn read(dir: &Path, name: &str) -> Result<Table, InstanceError> {
        let path = dir.join(name);
        let text = std::fs::read_to_string(&path).map_err(|e| InstanceError::Parse {
            file: name.into(),
            line: 0,
            message: format!("cannot read: {e}"),
        })?;
        let mut lines = text.lines().enumerate();
        let header = match lines.next() {
            Some((_, h)) => h.split(',').map(|c| c.trim().to_string()).collect(),
            None => {
                return Err(InstanceError::Parse {
                    file: name.into(),
                    line: 1,
                    message: "empty file".into(),
                })
            }
        };
        let rows = lines
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| (i + 1, l.split(',').map(|c| c.trim().to_string()).collect()))
            .collect();
        Ok(Table {
            file: name.into(),
            header,
            rows,
        })
    }

    fn col(&self, row: &(usize, Vec<String>), name: &str) -> Result<String, InstanceError> {
        let idx = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| InstanceError::Parse {
                file: self.file.clone(),
                line: 1,
                message: format!("missing column '{name}'"),
            })?;
        row.1.get(idx).cloned().ok_or_else(|| InstanceError::Parse {
            file: self.file.clone(),
            line: row.0,
            message: format!("row too short for column '{name}'"),
        })
    }

    fn num(&self, row: &(usize, Vec<String>), name: &str) -> Result<f64, InstanceError> {
        let raw = self.col(row, name)?;
        raw.parse().map_err(|_| InstanceError::Parse {
            file: self.file.clone(),
            line: row.0,
            message: format!("'{raw}' is not a number (column '{name}')"),
        })
    }

    fn int(&self, row: &(usize, Vec<String>), name: &str) -> Result<usize, InstanceError> {
        let raw = self.col(row, name)?;
        raw.parse().map_err(|_| InstanceError::Parse {
            file: self.file.clone(),
            line: row.0,
            message: format!("'{raw}' is not an integer (column '{name}')"),
        })
    }
}

pub fn load_instance(dir: &Path) -> Result<CEMInstance, InstanceError> {
    let t = Table::read(dir, "scenarios.csv")?;
    let mut scenarios = Vec::new();
    for row in &t.rows {
        scenarios.push(Scenario {
            id: t.col(row, "id")?,
            probability: t.num(row, "probability")?,
        });
    }

    let t = Table::read(dir, "zones.csv")?;
    let zones: Vec<Zone> = t
        .rows
        .iter()
        .map(|row| t.col(row, "id").map(|id| Zone { id }))
        .collect::<Result<_, _>>()?;

    let t = Table::read(dir, "resources.csv")?;
    let mut resources = Vec::new();
    for row in &t.rows {
        let kind_raw = t.col(row, "kind")?;
        let kind = parse_kind(&kind_raw).ok_or_else(|| InstanceError::Parse {
            file: "resources.csv".into(),
            line: row.0,
            message: format!("unknown resource kind '{kind_raw}'"),
        })?;
        let mut r = Resource::new(t.col(row, "id")?, t.col(row, "zone")?, kind);
        r.existing_cap = t.num(row, "existing_cap")?;
        r.max_build = t.num(row, "max_build")?;
        r.max_retire = t.num(row, "max_retire")?;
        r.invest_cost = t.num(row, "invest_cost")?;
        r.retire_cost = t.num(row, "retire_cost")?;
        r.var_cost = t.num(row, "var_cost")?;
        r.co2_rate = t.num(row, "co2_rate")?;
        r.ramp_frac = t.num(row, "ramp_frac")?;
        r.min_stable = t.num(row, "min_stable")?;
        r.eta_self = t.num(row, "eta_self")?;
        r.eta_c = t.num(row, "eta_c")?;
        r.eta_d = t.num(row, "eta_d")?;
        r.energy_ratio = t.num(row, "energy_ratio")?;
        r.integer_build = t.col(row, "integer_build")? == "true";
        r.unit_size = t.num(row, "unit_size")?;
        resources.push(r);
    }

    let t = Table::read(dir, "links.csv")?;
    let mut links = Vec::new();
    for row in &t.rows {
        links.push(TransmissionLink {
            id: t.col(row, "id")?,
            from: t.col(row, "from")?,
            to: t.col(row, "to")?,
            capacity: t.num(row, "capacity")?,
            loss: t.num(row, "loss")?,
        });
    }

    let t = Table::read(dir, "policies.csv")?;
    let mut policies = Vec::new();
    for row in &t.rows {
        let kind_raw = t.col(row, "kind")?;
        let kind = match kind_raw.as_str() {
            "co2-cap" => PolicyKind::Co2Cap,
            "min-share" => PolicyKind::MinShare,
            other => {
                return Err(InstanceError::Parse {
                    file: "policies.csv".into(),
                    line: row.0,
                    message: format!("unknown policy kind '{other}'"),
                })
            }
        };
        let scope_raw = t.col(row, "scope")?;
        let mut scope = Vec::new();
        for pair in scope_raw.split(';').filter(|p| !p.is_empty()) {
            let (p, s) = pair.split_once(':').ok_or_else(|| InstanceError::Parse {
                file: "policies.csv".into(),
                line: row.0,
                message: format!("bad scope entry '{pair}'"),
            })?;
            let pid: usize = p.parse().map_err(|_| InstanceError::Parse {
                file: "policies.csv".into(),
                line: row.0,
                message: format!("bad period id in scope '{pair}'"),
            })?;
            scope.push((pid, s.to_string()));
        }
        policies.push(Policy {
            id: t.col(row, "id")?,
            kind,
            scope,
            cap: t.num(row, "cap")?,
            penalty: t.num(row, "penalty")?,
        });
    }

    let t = Table::read(dir, "penalties.csv")?;
    let row = t.rows.first().ok_or_else(|| InstanceError::Parse {
        file: "penalties.csv".into(),
        line: 2,
        message: "missing penalties row".into(),
    })?;
    let penalties = PenaltyConfig {
        co2_penalty: t.num(row, "co2_penalty")?,
        nse_cost: t.num(row, "nse_cost")?,
        mds_boundary_penalty: t.num(row, "mds_boundary_penalty")?,
    };

    // Periods and sub-periods, then attach series.
    let t = Table::read(dir, "periods.csv")?;
    let mut periods: Vec<PlanningPeriod> = Vec::new();
    for row in &t.rows {
        periods.push(PlanningPeriod {
            id: t.int(row, "id")?,
            subperiods: Vec::new(),
            fixed_cost_scale: t.num(row, "fixed_cost_scale")?,
        });
    }
    periods.sort_by_key(|p| p.id);

    let t = Table::read(dir, "subperiods.csv")?;
    for row in &t.rows {
        let pid = t.int(row, "period")?;
        let wid = t.int(row, "id")?;
        let mut w = SubPeriod {
            id: wid,
            scenario: t.col(row, "scenario")?,
            hours: t.int(row, "hours")?,
            demand: BTreeMap::new(),
            availability: BTreeMap::new(),
            inflow: BTreeMap::new(),
            cost_scale: t.num(row, "cost_scale")?,
        };
        for (tag, map) in [
            ("demand", &mut w.demand),
            ("availability", &mut w.availability),
            ("inflow", &mut w.inflow),
        ] {
            let name = format!("series/w{wid}_{tag}.csv");
            let st = Table::read(dir, &name)?;
            for srow in &st.rows {
                let hour = st.int(srow, "hour")?;
                let entity = st.col(srow, "entity_id")?;
                let value = st.num(srow, "value")?;
                let series = map.entry(entity).or_default();
                if series.len() != hour {
                    return Err(InstanceError::Parse {
                        file: name.clone(),
                        line: srow.0,
                        message: format!("hours out of order (got {hour}, expected {})", series.len()),
                    });
                }
                series.push(value);
            }
        }
        let period = periods.iter_mut().find(|p| p.id == pid).ok_or_else(|| {
            InstanceError::Parse {
                file: "subperiods.csv".into(),
                line: row.0,
                message: format!("sub-period {wid} references unknown period {pid}"),
            }
        })?;
        period.subperiods.push(w);
    }
    for p in &mut periods {
        p.subperiods.sort_by_key(|w| w.id);
    }

    Ok(CEMInstance {
        periods,
        scenarios,
        zones,
        resources,
        links,
        policies,
        penalties,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{generate_synthetic, tiny1, GeneratorSpec};
    use super::*;

    #[test]
    fn round_trip_tiny1() {
        let dir = tempfile::tempdir().unwrap();
        let inst = tiny1();
        save_instance(&inst, dir.path()).unwrap();
        let back = load_instance(dir.path()).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn round_trip_generated() {
        let dir = tempfile::tempdir().unwrap();
        let inst = generate_synthetic(&GeneratorSpec::medium(), 11).unwrap();
        save_instance(&inst, dir.path()).unwrap();
        let back = load_instance(dir.path()).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn parse_error_carries_location() {
        let dir = tempfile::tempdir().unwrap();
        save_instance(&tiny1(), dir.path()).unwrap();
        std::fs::write(
            dir.path().join("scenarios.csv"),
            "id,probability\ns0,not_a_number\n",
        )
        .unwrap();
        match load_instance(dir.path()) {
            Err(InstanceError::Parse { file, line, message }) => {
                assert_eq!(file, "scenarios.csv");
                assert_eq!(line, 2);
                assert!(message.contains("not_a_number"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
