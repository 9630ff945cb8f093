//! Instance validation. Never aborts: every violated invariant is reported
//! with a machine-readable code and a human-readable message.

use super::{CEMInstance, ResourceKind};

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    fn push(&mut self, code: &'static str, message: String) {
        self.violations.push(Violation { code, message });
    }
}

pub fn validate_instance(inst: &CEMInstance) -> ValidationReport {
    let mut rep = ValidationReport::default();

    // Scenario probabilities: strictly positive, summing to 1.
    let mut prob_sum = 0.0;
    for s in &inst.scenarios {
        if !(s.probability > 0.0) {
            rep.push(
                "PROB_POS",
                format!("scenario '{}' has non-positive probability {}", s.id, s.probability),
            );
        }
        prob_sum += s.probability;
    }
    if inst.scenarios.is_empty() {
        rep.push("PROB_SUM", "instance has no scenarios".into());
    } else if (prob_sum - 1.0).abs() > 1e-9 {
        rep.push(
            "PROB_SUM",
            format!("scenario probabilities sum to {prob_sum}, expected 1"),
        );
    }

    // Uniform sub-period length and series shapes.
    let mut hour_count: Option<usize> = None;
    let mut sub_ids = std::collections::BTreeSet::new();
    for (p, w) in inst.subperiods() {
        if !sub_ids.insert(w.id) {
            rep.push("DUP_ID", format!("duplicate sub-period id {}", w.id));
        }
        match hour_count {
            None => hour_count = Some(w.hours),
            Some(h) if h != w.hours => rep.push(
                "HOURS_UNIFORM",
                format!(
                    "sub-period {} has {} hours, expected uniform {}",
                    w.id, w.hours, h
                ),
            ),
            _ => {}
        }
        if w.hours == 0 {
            rep.push("HOURS_UNIFORM", format!("sub-period {} has zero hours", w.id));
        }
        if !inst.scenarios.iter().any(|s| s.id == w.scenario) {
            rep.push(
                "SCEN_REF",
                format!("sub-period {} references unknown scenario '{}'", w.id, w.scenario),
            );
        }
        for zone in &inst.zones {
            match w.demand.get(&zone.id) {
                None => rep.push(
                    "SERIES_LEN",
                    format!("sub-period {} missing demand series for zone '{}'", w.id, zone.id),
                ),
                Some(series) => {
                    if series.len() != w.hours {
                        rep.push(
                            "SERIES_LEN",
                            format!(
                                "demand series for zone '{}' in sub-period {} has {} values, expected {}",
                                zone.id, w.id, series.len(), w.hours
                            ),
                        );
                    }
                    if series.iter().any(|&d| !d.is_finite() || d < 0.0) {
                        rep.push(
                            "DEMAND_NEG",
                            format!("negative or non-finite demand in sub-period {} zone '{}'", w.id, zone.id),
                        );
                    }
                }
            }
        }
        for (rid, series) in &w.availability {
            if inst.resource(rid).is_none() {
                rep.push(
                    "ZONE_REF",
                    format!("availability series for unknown resource '{rid}' in sub-period {}", w.id),
                );
            }
            if series.len() != w.hours {
                rep.push(
                    "SERIES_LEN",
                    format!("availability series for '{rid}' in sub-period {} has wrong length", w.id),
                );
            }
            if series.iter().any(|&a| !(0.0..=1.0).contains(&a)) {
                rep.push(
                    "AVAIL_RANGE",
                    format!("availability for '{rid}' in sub-period {} outside [0,1]", w.id),
                );
            }
        }
        for (rid, series) in &w.inflow {
            if series.len() != w.hours {
                rep.push(
                    "SERIES_LEN",
                    format!("inflow series for '{rid}' in sub-period {} has wrong length", w.id),
                );
            }
            if series.iter().any(|&v| !v.is_finite() || v < 0.0) {
                rep.push(
                    "DEMAND_NEG",
                    format!("negative or non-finite inflow for '{rid}' in sub-period {}", w.id),
                );
            }
        }
        let _ = p;
    }

    // Resources.
    let mut res_ids = std::collections::BTreeSet::new();
    for r in &inst.resources {
        if !res_ids.insert(r.id.as_str()) {
            rep.push("DUP_ID", format!("duplicate resource id '{}'", r.id));
        }
        if !inst.zones.iter().any(|z| z.id == r.zone) {
            rep.push(
                "ZONE_REF",
                format!("resource '{}' references unknown zone '{}'", r.id, r.zone),
            );
        }
        for (name, v) in [
            ("existing_cap", r.existing_cap),
            ("max_build", r.max_build),
            ("max_retire", r.max_retire),
            ("invest_cost", r.invest_cost),
            ("retire_cost", r.retire_cost),
            ("var_cost", r.var_cost),
        ] {
            if !v.is_finite() {
                rep.push(
                    "COST_FINITE",
                    format!("resource '{}': {name} is not finite", r.id),
                );
            }
        }
        if r.existing_cap < 0.0 || r.max_build < 0.0 || r.max_retire < 0.0 {
            rep.push("CAP_RANGE", format!("resource '{}' has negative capacity bound", r.id));
        }
        if r.co2_rate < 0.0 || !r.co2_rate.is_finite() {
            rep.push("CAP_RANGE", format!("resource '{}' has invalid co2_rate", r.id));
        }
        if r.kind.is_storage() {
            for (name, v) in [("eta_c", r.eta_c), ("eta_d", r.eta_d)] {
                if !(v > 0.0 && v <= 1.0) {
                    rep.push(
                        "EFF_RANGE",
                        format!("resource '{}': {name} = {v} outside (0, 1]", r.id),
                    );
                }
            }
            if !(0.0..1.0).contains(&r.eta_self) {
                rep.push(
                    "EFF_RANGE",
                    format!("resource '{}': eta_self = {} outside [0, 1)", r.id, r.eta_self),
                );
            }
            if !(r.energy_ratio > 0.0 && r.energy_ratio.is_finite()) {
                rep.push(
                    "CAP_RANGE",
                    format!("resource '{}': energy_ratio must be positive", r.id),
                );
            }
        }
        if r.kind == ResourceKind::ThermalUc && !(0.0..=1.0).contains(&r.min_stable) {
            rep.push(
                "CAP_RANGE",
                format!("resource '{}': min_stable outside [0,1]", r.id),
            );
        }
        if r.integer_build && !(r.unit_size > 0.0) {
            rep.push(
                "CAP_RANGE",
                format!("resource '{}': integer build requires positive unit_size", r.id),
            );
        }
    }

    // Links.
    for l in &inst.links {
        if l.from == l.to {
            rep.push("LINK_REF", format!("link '{}' connects a zone to itself", l.id));
        }
        for z in [&l.from, &l.to] {
            if !inst.zones.iter().any(|zz| &zz.id == z) {
                rep.push(
                    "LINK_REF",
                    format!("link '{}' references unknown zone '{z}'", l.id),
                );
            }
        }
        if !(0.0..1.0).contains(&l.loss) || l.capacity < 0.0 || !l.capacity.is_finite() {
            rep.push("LINK_REF", format!("link '{}' has invalid capacity/loss", l.id));
        }
    }

    // Policies and penalties.
    for pol in &inst.policies {
        if pol.cap < 0.0 || !pol.cap.is_finite() {
            rep.push("POLICY_CAP", format!("policy '{}' has invalid cap {}", pol.id, pol.cap));
        }
        if !(pol.penalty > 0.0) {
            rep.push("PENALTY_POS", format!("policy '{}' penalty must be positive", pol.id));
        }
        for (pid, sid) in &pol.scope {
            if !inst.periods.iter().any(|p| p.id == *pid)
                || !inst.scenarios.iter().any(|s| &s.id == sid)
            {
                rep.push(
                    "POLICY_CAP",
                    format!("policy '{}' scopes unknown (period {pid}, scenario '{sid}')", pol.id),
                );
            }
        }
    }
    for (name, v) in [
        ("co2_penalty", inst.penalties.co2_penalty),
        ("nse_cost", inst.penalties.nse_cost),
        ("mds_boundary_penalty", inst.penalties.mds_boundary_penalty),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            rep.push("PENALTY_POS", format!("penalty {name} must be positive and finite"));
        }
    }

    rep
}
