//! Turns a `CEMInstance` into block-structured problem data: per-sub-period
//! operational blocks over dispatch variables, a planning skeleton over
//! capacity (y) and coupling (z) variables, and the two equivalent
//! monolithic assemblies used as oracles.
//!
//! The `decomposed` form splits multi-day storage state at sub-period
//! boundaries into z_start/z_end variables chained by coupling equalities,
//! and splits annual policy caps into per-sub-period budgets z_b tied
//! together by one budget equality. The `chained` form keeps storage state
//! and policy caps coupled directly across sub-periods; both have the same
//! optimal value, which the test suite leans on throughout.
//!
//! Naming scheme (also used in MPS exports and solution files):
//! operational rows/columns are `w<id>_<kind>_<entity>_<hour>`, planning
//! columns are `y_*_<resource>_p<period>` and `z_*_<entity>_w<id>`.

use std::collections::BTreeMap;

use crate::instance::{CEMInstance, PlanningPeriod, PolicyKind, ResourceKind, SubPeriod};
use crate::lp::{LpProblem, RowSense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingMode {
    /// Block-structured form with z_start/z_end/z_b coupling variables.
    Decomposed,
    /// Original form: storage state and policy caps chained across
    /// sub-periods directly.
    Chained,
}

#[derive(Debug, Clone)]
pub struct ReformOptions {
    /// Close the multi-day storage chain from the last sub-period of each
    /// (period, scenario) back to the first.
    pub mds_wrap: bool,
}

impl Default for ReformOptions {
    fn default() -> Self {
        ReformOptions { mds_wrap: true }
    }
}

/// One operational sub-period block. The LP holds the dispatch (x) columns
/// first, then local copies of every planning column the block touches; its
/// objective is the unweighted variable cost c_w.
#[derive(Debug, Clone)]
pub struct SubBlock {
    pub w: usize,
    pub period: usize,
    pub scenario: String,
    /// Scenario probability weight applied to this block's cost.
    pub beta: f64,
    pub lp: LpProblem,
    /// Number of dispatch columns; columns nx.. are planning locals.
    pub nx: usize,
    /// Global planning-column names for columns nx.. (same order).
    pub linked_names: Vec<String>,
    /// Global planning-column indices, filled by `assemble_block_problem`.
    pub linked: Vec<usize>,
}

/// Fully assembled block problem: planning skeleton plus all sub-blocks.
#[derive(Debug, Clone)]
pub struct BlockProblem {
    /// Planning columns (y then z) with bounds and fixed/penalty costs,
    /// plus every linking, coupling, and multi-period row. No cuts and no
    /// value-function variables; those belong to the decomposition driver.
    pub planning: LpProblem,
    /// Columns 0..n_y are capacity (y) variables; the rest are coupling (z)
    /// variables and coupling-row slacks.
    pub n_y: usize,
    /// Planning columns restricted to integers (unit-build counts).
    pub integers: Vec<usize>,
    pub blocks: Vec<SubBlock>,
    /// Planning-column catalog: name to column index.
    pub catalog: BTreeMap<String, usize>,
}

impl BlockProblem {
    pub fn planning_col(&self, name: &str) -> Option<usize> {
        self.catalog.get(name).copied()
    }
}

/// A constraint expressed over named columns, resolved later against
/// whichever LP (sub-block or monolithic) it lands in.
struct NamedRow {
    name: String,
    terms: Vec<(String, f64)>,
    sense: RowSense,
    rhs: f64,
}

/// Emission accumulation for chained-mode policies: policy index, then the
/// named terms this sub-period contributes to the aggregate row.
struct PolicyContribution {
    policy: usize,
    terms: Vec<(String, f64)>,
}

fn clean_supply(kind: ResourceKind, co2_rate: f64) -> bool {
    co2_rate == 0.0 && matches!(kind, ResourceKind::Vre | ResourceKind::ReservoirHydro)
}

/// Dispatch columns of sub-period `w`: (name, lb, ub, unweighted cost).
fn op_columns(
    inst: &CEMInstance,
    period: &PlanningPeriod,
    w: &SubPeriod,
    mode: CouplingMode,
) -> Vec<(String, f64, f64, f64)> {
    let mut cols = Vec::new();
    let wid = w.id;
    let inf = f64::INFINITY;
    for r in &inst.resources {
        let vc = r.var_cost * w.cost_scale;
        match r.kind {
            ResourceKind::ThermalUc => {
                for t in 0..w.hours {
                    cols.push((format!("w{wid}_x_gen_{}_{t}", r.id), 0.0, inf, vc));
                }
                for t in 0..w.hours {
                    cols.push((format!("w{wid}_x_commit_{}_{t}", r.id), 0.0, inf, 0.0));
                }
            }
            ResourceKind::Vre => {
                for t in 0..w.hours {
                    cols.push((format!("w{wid}_x_gen_{}_{t}", r.id), 0.0, inf, vc));
                }
            }
            ResourceKind::ShortStorage | ResourceKind::MdsStorage | ResourceKind::ReservoirHydro => {
                let charge_ub = if r.kind == ResourceKind::ReservoirHydro {
                    0.0
                } else {
                    inf
                };
                for t in 0..w.hours {
                    cols.push((format!("w{wid}_x_c_{}_{t}", r.id), 0.0, charge_ub, 0.0));
                }
                for t in 0..w.hours {
                    cols.push((format!("w{wid}_x_d_{}_{t}", r.id), 0.0, inf, vc));
                }
                for t in 0..w.hours {
                    cols.push((format!("w{wid}_x_soc_{}_{t}", r.id), 0.0, inf, 0.0));
                }
                if r.kind == ResourceKind::ReservoirHydro {
                    for t in 0..w.hours {
                        cols.push((format!("w{wid}_x_spill_{}_{t}", r.id), 0.0, inf, 0.0));
                    }
                }
                if mode == CouplingMode::Decomposed && r.kind.is_mds() {
                    // Boundary mismatch slack pair on the z_end definition.
                    let pen = inst.penalties.mds_boundary_penalty;
                    cols.push((format!("w{wid}_x_bnd_pos_{}", r.id), 0.0, inf, pen));
                    cols.push((format!("w{wid}_x_bnd_neg_{}", r.id), 0.0, inf, pen));
                }
            }
        }
    }
    for l in &inst.links {
        for t in 0..w.hours {
            cols.push((format!("w{wid}_x_flow_f_{}_{t}", l.id), 0.0, l.capacity, 0.0));
        }
        for t in 0..w.hours {
            cols.push((format!("w{wid}_x_flow_b_{}_{t}", l.id), 0.0, l.capacity, 0.0));
        }
    }
    for z in &inst.zones {
        for t in 0..w.hours {
            cols.push((
                format!("w{wid}_x_nse_{}_{t}", z.id),
                0.0,
                inf,
                inst.penalties.nse_cost,
            ));
        }
        for t in 0..w.hours {
            cols.push((format!("w{wid}_x_sur_{}_{t}", z.id), 0.0, inf, 0.0));
        }
    }
    if mode == CouplingMode::Decomposed {
        for (pi, pol) in inst.policies.iter().enumerate() {
            if pol.scope.contains(&(period.id, w.scenario.clone())) {
                cols.push((
                    format!("w{wid}_x_pol_slack_{pi}"),
                    0.0,
                    inf,
                    pol.penalty,
                ));
            }
        }
    }
    cols
}

/// Operational rows of sub-period `w` in the documented order. In chained
/// mode, `prev_w` names the preceding sub-period of the same (period,
/// scenario) whose last-hour state feeds this one (None disables the
/// cross-boundary link, leaving the boundary state free), and policy
/// emissions are returned as contributions instead of per-w rows.
fn op_rows(
    inst: &CEMInstance,
    period: &PlanningPeriod,
    w: &SubPeriod,
    mode: CouplingMode,
    prev_w: Option<usize>,
) -> (Vec<NamedRow>, Vec<PolicyContribution>) {
    let wid = w.id;
    let h = w.hours;
    let pid = period.id;
    let mut rows = Vec::new();
    let mut contribs = Vec::new();

    // Zonal balance, one equality per zone-hour.
    for z in &inst.zones {
        for t in 0..h {
            let mut terms: Vec<(String, f64)> = Vec::new();
            for r in inst.resources.iter().filter(|r| r.zone == z.id) {
                match r.kind {
                    ResourceKind::ThermalUc | ResourceKind::Vre => {
                        terms.push((format!("w{wid}_x_gen_{}_{t}", r.id), 1.0));
                    }
                    _ => {
                        terms.push((format!("w{wid}_x_d_{}_{t}", r.id), 1.0));
                        terms.push((format!("w{wid}_x_c_{}_{t}", r.id), -1.0));
                    }
                }
            }
            for l in &inst.links {
                if l.from == z.id {
                    terms.push((format!("w{wid}_x_flow_f_{}_{t}", l.id), -1.0));
                    terms.push((format!("w{wid}_x_flow_b_{}_{t}", l.id), 1.0 - l.loss));
                } else if l.to == z.id {
                    terms.push((format!("w{wid}_x_flow_f_{}_{t}", l.id), 1.0 - l.loss));
                    terms.push((format!("w{wid}_x_flow_b_{}_{t}", l.id), -1.0));
                }
            }
            terms.push((format!("w{wid}_x_nse_{}_{t}", z.id), 1.0));
            terms.push((format!("w{wid}_x_sur_{}_{t}", z.id), -1.0));
            rows.push(NamedRow {
                name: format!("w{wid}_balance_{}_{t}", z.id),
                terms,
                sense: RowSense::Eq,
                rhs: w.demand.get(&z.id).map_or(0.0, |d| d[t]),
            });
        }
    }

    for r in &inst.resources {
        let cap = format!("y_cap_{}_p{pid}", r.id);
        match r.kind {
            ResourceKind::ThermalUc => {
                for t in 0..h {
                    rows.push(NamedRow {
                        name: format!("w{wid}_commitcap_{}_{t}", r.id),
                        terms: vec![
                            (format!("w{wid}_x_commit_{}_{t}", r.id), 1.0),
                            (cap.clone(), -1.0),
                        ],
                        sense: RowSense::Le,
                        rhs: 0.0,
                    });
                    rows.push(NamedRow {
                        name: format!("w{wid}_genmax_{}_{t}", r.id),
                        terms: vec![
                            (format!("w{wid}_x_gen_{}_{t}", r.id), 1.0),
                            (format!("w{wid}_x_commit_{}_{t}", r.id), -1.0),
                        ],
                        sense: RowSense::Le,
                        rhs: 0.0,
                    });
                    if r.min_stable > 0.0 {
                        rows.push(NamedRow {
                            name: format!("w{wid}_genmin_{}_{t}", r.id),
                            terms: vec![
                                (format!("w{wid}_x_gen_{}_{t}", r.id), 1.0),
                                (format!("w{wid}_x_commit_{}_{t}", r.id), -r.min_stable),
                            ],
                            sense: RowSense::Ge,
                            rhs: 0.0,
                        });
                    }
                }
                if r.ramp_frac < 1.0 {
                    // Cyclic ramping: hour 0 follows the last hour.
                    for t in 0..h {
                        let tp = if t == 0 { h - 1 } else { t - 1 };
                        let up = vec![
                            (format!("w{wid}_x_gen_{}_{t}", r.id), 1.0),
                            (format!("w{wid}_x_gen_{}_{tp}", r.id), -1.0),
                            (cap.clone(), -r.ramp_frac),
                        ];
                        rows.push(NamedRow {
                            name: format!("w{wid}_rampup_{}_{t}", r.id),
                            terms: up,
                            sense: RowSense::Le,
                            rhs: 0.0,
                        });
                        let dn = vec![
                            (format!("w{wid}_x_gen_{}_{tp}", r.id), 1.0),
                            (format!("w{wid}_x_gen_{}_{t}", r.id), -1.0),
                            (cap.clone(), -r.ramp_frac),
                        ];
                        rows.push(NamedRow {
                            name: format!("w{wid}_rampdn_{}_{t}", r.id),
                            terms: dn,
                            sense: RowSense::Le,
                            rhs: 0.0,
                        });
                    }
                }
            }
            ResourceKind::Vre => {
                for t in 0..h {
                    let avail = w.availability.get(&r.id).map_or(1.0, |a| a[t]);
                    rows.push(NamedRow {
                        name: format!("w{wid}_avail_{}_{t}", r.id),
                        terms: vec![
                            (format!("w{wid}_x_gen_{}_{t}", r.id), 1.0),
                            (cap.clone(), -avail),
                        ],
                        sense: RowSense::Le,
                        rhs: 0.0,
                    });
                }
            }
            ResourceKind::ShortStorage | ResourceKind::MdsStorage | ResourceKind::ReservoirHydro => {
                for t in 0..h {
                    rows.push(NamedRow {
                        name: format!("w{wid}_chargecap_{}_{t}", r.id),
                        terms: vec![
                            (format!("w{wid}_x_c_{}_{t}", r.id), 1.0),
                            (cap.clone(), -1.0),
                        ],
                        sense: RowSense::Le,
                        rhs: 0.0,
                    });
                    rows.push(NamedRow {
                        name: format!("w{wid}_dischargecap_{}_{t}", r.id),
                        terms: vec![
                            (format!("w{wid}_x_d_{}_{t}", r.id), 1.0),
                            (cap.clone(), -1.0),
                        ],
                        sense: RowSense::Le,
                        rhs: 0.0,
                    });
                    rows.push(NamedRow {
                        name: format!("w{wid}_energycap_{}_{t}", r.id),
                        terms: vec![
                            (format!("w{wid}_x_soc_{}_{t}", r.id), 1.0),
                            (cap.clone(), -r.energy_ratio),
                        ],
                        sense: RowSense::Le,
                        rhs: 0.0,
                    });
                }
                // State of charge: soc[t] = (1-eta_self)*prev + eta_c*c[t]
                // - d[t]/eta_d - spill[t] + inflow[t], stored with the
                // carried-over coefficient written positively.
                let keep = 1.0 - r.eta_self;
                for t in 0..h {
                    let mut terms = vec![
                        (format!("w{wid}_x_c_{}_{t}", r.id), r.eta_c),
                        (format!("w{wid}_x_d_{}_{t}", r.id), -1.0 / r.eta_d),
                        (format!("w{wid}_x_soc_{}_{t}", r.id), -1.0),
                    ];
                    if r.kind == ResourceKind::ReservoirHydro {
                        terms.push((format!("w{wid}_x_spill_{}_{t}", r.id), -1.0));
                    }
                    if t > 0 {
                        terms.push((format!("w{wid}_x_soc_{}_{}", r.id, t - 1), keep));
                    } else if r.kind == ResourceKind::ShortStorage {
                        // Cyclic closure: hour 0 follows the last hour.
                        terms.push((format!("w{wid}_x_soc_{}_{}", r.id, h - 1), keep));
                    } else {
                        match (mode, prev_w) {
                            (CouplingMode::Decomposed, _) => {
                                terms.push((format!("z_start_{}_w{wid}", r.id), keep));
                            }
                            (CouplingMode::Chained, Some(pw)) => {
                                terms.push((format!("w{pw}_x_soc_{}_{}", r.id, h - 1), keep));
                            }
                            (CouplingMode::Chained, None) => {}
                        }
                    }
                    let inflow = w.inflow.get(&r.id).map_or(0.0, |s| s[t]);
                    rows.push(NamedRow {
                        name: format!("w{wid}_soc_{}_{t}", r.id),
                        terms,
                        sense: RowSense::Eq,
                        rhs: -inflow,
                    });
                }
                if mode == CouplingMode::Decomposed && r.kind.is_mds() {
                    // z_end definition with the boundary slack pair.
                    rows.push(NamedRow {
                        name: format!("w{wid}_end_{}_0", r.id),
                        terms: vec![
                            (format!("w{wid}_x_soc_{}_{}", r.id, h - 1), 1.0),
                            (format!("z_end_{}_w{wid}", r.id), -1.0),
                            (format!("w{wid}_x_bnd_pos_{}", r.id), 1.0),
                            (format!("w{wid}_x_bnd_neg_{}", r.id), -1.0),
                        ],
                        sense: RowSense::Eq,
                        rhs: 0.0,
                    });
                }
            }
        }
    }

    // Policy accounting.
    for (pi, pol) in inst.policies.iter().enumerate() {
        if !pol.scope.contains(&(pid, w.scenario.clone())) {
            continue;
        }
        let mut terms: Vec<(String, f64)> = Vec::new();
        match pol.kind {
            PolicyKind::Co2Cap => {
                for r in inst.resources.iter().filter(|r| r.co2_rate > 0.0) {
                    let var = match r.kind {
                        ResourceKind::ThermalUc | ResourceKind::Vre => "x_gen",
                        _ => "x_d",
                    };
                    for t in 0..h {
                        terms.push((format!("w{wid}_{var}_{}_{t}", r.id), r.co2_rate));
                    }
                }
            }
            PolicyKind::MinShare => {
                for r in &inst.resources {
                    if !clean_supply(r.kind, r.co2_rate) {
                        continue;
                    }
                    let var = if r.kind == ResourceKind::Vre { "x_gen" } else { "x_d" };
                    for t in 0..h {
                        terms.push((format!("w{wid}_{var}_{}_{t}", r.id), 1.0));
                    }
                }
            }
        }
        match mode {
            CouplingMode::Decomposed => {
                // Budgeted per-sub-period row against z_b with a penalized
                // slack; a cap bounds emissions above, a share requirement
                // bounds clean supply below.
                terms.push((format!("z_b_{pi}_w{wid}"), -1.0));
                let (sense, slack_sign) = match pol.kind {
                    PolicyKind::Co2Cap => (RowSense::Le, -1.0),
                    PolicyKind::MinShare => (RowSense::Ge, 1.0),
                };
                terms.push((format!("w{wid}_x_pol_slack_{pi}"), slack_sign));
                rows.push(NamedRow {
                    name: format!("w{wid}_emis_{pi}_0"),
                    terms,
                    sense,
                    rhs: 0.0,
                });
            }
            CouplingMode::Chained => {
                contribs.push(PolicyContribution { policy: pi, terms });
            }
        }
    }

    (rows, contribs)
}

/// Build one operational sub-block: dispatch columns, local planning-column
/// copies, and all operational rows. `linked` indices are filled in by
/// `assemble_block_problem`.
pub fn build_operational_block(inst: &CEMInstance, wid: usize) -> SubBlock {
    let (period, w) = inst
        .subperiods()
        .find(|(_, w)| w.id == wid)
        .unwrap_or_else(|| panic!("unknown sub-period id {wid}"));
    let cols = op_columns(inst, period, w, CouplingMode::Decomposed);
    let (rows, _) = op_rows(inst, period, w, CouplingMode::Decomposed, None);

    let mut lp = LpProblem::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for (name, lb, ub, cost) in &cols {
        let j = lp.add_col(name.clone(), *lb, *ub, *cost);
        index.insert(name.clone(), j);
    }
    let nx = lp.num_cols();

    // Planning locals: any referenced column not created above. Collect in
    // first-reference order for reproducibility, then keep them free — the
    // fixing rows added at solve time pin them.
    let mut linked_names: Vec<String> = Vec::new();
    for row in &rows {
        for (name, _) in &row.terms {
            if !index.contains_key(name) {
                let j = lp.add_col(name.clone(), f64::NEG_INFINITY, f64::INFINITY, 0.0);
                index.insert(name.clone(), j);
                linked_names.push(name.clone());
            }
        }
    }
    for row in rows {
        let terms: Vec<(usize, f64)> = row
            .terms
            .iter()
            .map(|(name, v)| (index[name], *v))
            .collect();
        lp.add_row(row.name, terms, row.sense, row.rhs);
    }

    SubBlock {
        w: wid,
        period: period.id,
        scenario: w.scenario.clone(),
        beta: inst.scenario_probability(&w.scenario),
        lp,
        nx,
        linked_names,
        linked: Vec::new(),
    }
}

/// Planning skeleton: y and z columns, linking rows, scenario coupling rows
/// (MDS chain/wrap and policy budgets), and multi-period carry-over rows.
pub fn build_coupling_blocks(inst: &CEMInstance, opts: &ReformOptions) -> (LpProblem, usize, Vec<usize>) {
    let mut lp = LpProblem::new();
    let inf = f64::INFINITY;
    let mut integers = Vec::new();

    // y columns: cap, build, retire per (resource, period).
    for p in &inst.periods {
        for r in &inst.resources {
            lp.add_col(
                format!("y_cap_{}_p{}", r.id, p.id),
                0.0,
                inf,
                r.invest_cost * p.fixed_cost_scale,
            );
            let build_ub = if r.integer_build {
                (r.max_build / r.unit_size).floor()
            } else {
                r.max_build
            };
            let j = lp.add_col(format!("y_build_{}_p{}", r.id, p.id), 0.0, build_ub, 0.0);
            if r.integer_build {
                integers.push(j);
            }
            lp.add_col(
                format!("y_retire_{}_p{}", r.id, p.id),
                0.0,
                r.max_retire,
                r.retire_cost * p.fixed_cost_scale,
            );
        }
    }
    let n_y = lp.num_cols();

    // z columns per sub-period: storage boundaries and policy budgets.
    for (p, w) in inst.subperiods() {
        for r in inst.resources.iter().filter(|r| r.kind.is_mds()) {
            lp.add_col(format!("z_start_{}_w{}", r.id, w.id), 0.0, inf, 0.0);
            lp.add_col(format!("z_end_{}_w{}", r.id, w.id), 0.0, inf, 0.0);
        }
        for (pi, pol) in inst.policies.iter().enumerate() {
            if pol.scope.contains(&(p.id, w.scenario.clone())) {
                lp.add_col(format!("z_b_{pi}_w{}", w.id), 0.0, inf, 0.0);
            }
        }
    }

    // Linking rows: boundary states within installed energy capacity.
    for (p, w) in inst.subperiods() {
        for r in inst.resources.iter().filter(|r| r.kind.is_mds()) {
            let cap = lp.col_index(&format!("y_cap_{}_p{}", r.id, p.id)).unwrap();
            for tag in ["start", "end"] {
                let zc = lp
                    .col_index(&format!("z_{tag}_{}_w{}", r.id, w.id))
                    .unwrap();
                lp.add_row(
                    format!("link_{tag}_{}_w{}", r.id, w.id),
                    vec![(zc, 1.0), (cap, -r.energy_ratio)],
                    RowSense::Le,
                    0.0,
                );
            }
        }
    }

    // Scenario coupling: MDS chain/wrap equalities with slack pairs, and
    // policy budget equalities with a penalized slack.
    for p in &inst.periods {
        for s in &inst.scenarios {
            let ws: Vec<&SubPeriod> = p
                .subperiods
                .iter()
                .filter(|w| w.scenario == s.id)
                .collect();
            if ws.is_empty() {
                continue;
            }
            for r in inst.resources.iter().filter(|r| r.kind.is_mds()) {
                let pen = inst.penalties.mds_boundary_penalty * s.probability;
                for (i, w) in ws.iter().enumerate() {
                    let is_wrap = i + 1 == ws.len();
                    if is_wrap && !opts.mds_wrap {
                        continue;
                    }
                    let next = ws[(i + 1) % ws.len()];
                    let sp = lp.add_col(
                        format!("z_chain_pos_{}_w{}", r.id, w.id),
                        0.0,
                        inf,
                        pen,
                    );
                    let sm = lp.add_col(
                        format!("z_chain_neg_{}_w{}", r.id, w.id),
                        0.0,
                        inf,
                        pen,
                    );
                    let zs = lp
                        .col_index(&format!("z_start_{}_w{}", r.id, next.id))
                        .unwrap();
                    let ze = lp
                        .col_index(&format!("z_end_{}_w{}", r.id, w.id))
                        .unwrap();
                    lp.add_row(
                        format!("chain_{}_w{}", r.id, w.id),
                        vec![(zs, 1.0), (ze, -1.0), (sp, 1.0), (sm, -1.0)],
                        RowSense::Eq,
                        0.0,
                    );
                }
            }
            for (pi, pol) in inst.policies.iter().enumerate() {
                if !pol.scope.contains(&(p.id, s.id.clone())) {
                    continue;
                }
                let mut terms: Vec<(usize, f64)> = ws
                    .iter()
                    .map(|w| {
                        (
                            lp.col_index(&format!("z_b_{pi}_w{}", w.id)).unwrap(),
                            1.0,
                        )
                    })
                    .collect();
                let slack = lp.add_col(
                    format!("z_budget_slack_{pi}_p{}_{}", p.id, s.id),
                    0.0,
                    inf,
                    pol.penalty * s.probability,
                );
                let (slack_sign, rhs) = match pol.kind {
                    // Cap can be exceeded by the slack amount.
                    PolicyKind::Co2Cap => (-1.0, pol.cap),
                    // Requirement can be reduced by the slack amount.
                    PolicyKind::MinShare => {
                        let total_demand: f64 = ws
                            .iter()
                            .flat_map(|w| w.demand.values())
                            .flatten()
                            .sum();
                        (1.0, pol.cap * total_demand)
                    }
                };
                terms.push((slack, slack_sign));
                lp.add_row(
                    format!("budget_{pi}_p{}_{}", p.id, s.id),
                    terms,
                    RowSense::Eq,
                    rhs,
                );
            }
        }
    }

    // Multi-period carry-over: cap[p] = cap[p-1] + unit*build[p] - retire[p].
    for (i, p) in inst.periods.iter().enumerate() {
        for r in &inst.resources {
            let cap = lp.col_index(&format!("y_cap_{}_p{}", r.id, p.id)).unwrap();
            let build = lp
                .col_index(&format!("y_build_{}_p{}", r.id, p.id))
                .unwrap();
            let retire = lp
                .col_index(&format!("y_retire_{}_p{}", r.id, p.id))
                .unwrap();
            let unit = if r.integer_build { r.unit_size } else { 1.0 };
            let mut terms = vec![(cap, 1.0), (build, -unit), (retire, 1.0)];
            let rhs = if i == 0 {
                r.existing_cap
            } else {
                let prev = lp
                    .col_index(&format!("y_cap_{}_p{}", r.id, inst.periods[i - 1].id))
                    .unwrap();
                terms.push((prev, -1.0));
                0.0
            };
            lp.add_row(format!("carry_{}_p{}", r.id, p.id), terms, RowSense::Eq, rhs);
        }
    }

    (lp, n_y, integers)
}

pub fn assemble_block_problem(inst: &CEMInstance) -> BlockProblem {
    assemble_block_problem_with(inst, &ReformOptions::default())
}

pub fn assemble_block_problem_with(inst: &CEMInstance, opts: &ReformOptions) -> BlockProblem {
    let (planning, n_y, integers) = build_coupling_blocks(inst, opts);
    let catalog: BTreeMap<String, usize> = planning
        .col_names
        .iter()
        .enumerate()
        .map(|(j, n)| (n.clone(), j))
        .collect();
    let mut blocks: Vec<SubBlock> = inst
        .subperiods()
        .map(|(_, w)| build_operational_block(inst, w.id))
        .collect();
    blocks.sort_by_key(|b| b.w);
    for b in &mut blocks {
        b.linked = b
            .linked_names
            .iter()
            .map(|n| {
                *catalog
                    .get(n)
                    .unwrap_or_else(|| panic!("block {} references unknown planning column {n}", b.w))
            })
            .collect();
    }
    BlockProblem {
        planning,
        n_y,
        integers,
        blocks,
        catalog,
    }
}

pub fn assemble_monolithic(inst: &CEMInstance, mode: CouplingMode) -> (LpProblem, Vec<usize>) {
    assemble_monolithic_with(inst, mode, &ReformOptions::default())
}

pub fn assemble_monolithic_with(
    inst: &CEMInstance,
    mode: CouplingMode,
    opts: &ReformOptions,
) -> (LpProblem, Vec<usize>) {
    match mode {
        CouplingMode::Decomposed => {
            let bp = assemble_block_problem_with(inst, opts);
            let mut lp = bp.planning.clone();
            for b in &bp.blocks {
                // Map local columns to monolithic columns: dispatch columns
                // are appended (cost weighted by beta), planning locals
                // resolve through the catalog.
                let mut map = vec![0usize; b.lp.num_cols()];
                for j in 0..b.nx {
                    map[j] = lp.add_col(
                        b.lp.col_names[j].clone(),
                        b.lp.lb[j],
                        b.lp.ub[j],
                        b.beta * b.lp.obj[j],
                    );
                }
                for (i, &g) in b.linked.iter().enumerate() {
                    map[b.nx + i] = g;
                }
                for row in &b.lp.rows {
                    let terms: Vec<(usize, f64)> =
                        row.terms.iter().map(|&(j, v)| (map[j], v)).collect();
                    lp.add_row(row.name.clone(), terms, row.sense, row.rhs);
                }
            }
            (lp, bp.integers)
        }
        CouplingMode::Chained => assemble_chained(inst, opts),
    }
}

fn assemble_chained(inst: &CEMInstance, opts: &ReformOptions) -> (LpProblem, Vec<usize>) {
    // Planning side: y columns and carry rows only (no z in chained form).
    let mut lp = LpProblem::new();
    let inf = f64::INFINITY;
    let mut integers = Vec::new();
    for p in &inst.periods {
        for r in &inst.resources {
            lp.add_col(
                format!("y_cap_{}_p{}", r.id, p.id),
                0.0,
                inf,
                r.invest_cost * p.fixed_cost_scale,
            );
            let build_ub = if r.integer_build {
                (r.max_build / r.unit_size).floor()
            } else {
                r.max_build
            };
            let j = lp.add_col(format!("y_build_{}_p{}", r.id, p.id), 0.0, build_ub, 0.0);
            if r.integer_build {
                integers.push(j);
            }
            lp.add_col(
                format!("y_retire_{}_p{}", r.id, p.id),
                0.0,
                r.max_retire,
                r.retire_cost * p.fixed_cost_scale,
            );
        }
    }
    let mut index: BTreeMap<String, usize> = lp
        .col_names
        .iter()
        .enumerate()
        .map(|(j, n)| (n.clone(), j))
        .collect();

    // Dispatch columns for every sub-period, beta-weighted costs.
    for (p, w) in inst.subperiods() {
        let beta = inst.scenario_probability(&w.scenario);
        for (name, lb, ub, cost) in op_columns(inst, p, w, CouplingMode::Chained) {
            let j = lp.add_col(name.clone(), lb, ub, beta * cost);
            index.insert(name, j);
        }
    }

    // Operational rows with direct cross-boundary storage links, plus
    // aggregate policy rows per (period, scenario).
    let mut policy_terms: BTreeMap<(usize, usize, String), Vec<(String, f64)>> = BTreeMap::new();
    for p in &inst.periods {
        for s in &inst.scenarios {
            let ws: Vec<&SubPeriod> = p
                .subperiods
                .iter()
                .filter(|w| w.scenario == s.id)
                .collect();
            for (i, w) in ws.iter().enumerate() {
                let prev = if i > 0 {
                    Some(ws[i - 1].id)
                } else if opts.mds_wrap {
                    Some(ws[ws.len() - 1].id)
                } else {
                    None
                };
                let (rows, contribs) = op_rows(inst, p, w, CouplingMode::Chained, prev);
                for row in rows {
                    let terms: Vec<(usize, f64)> = row
                        .terms
                        .iter()
                        .map(|(name, v)| (index[name], *v))
                        .collect();
                    lp.add_row(row.name, terms, row.sense, row.rhs);
                }
                for c in contribs {
                    policy_terms
                        .entry((c.policy, p.id, s.id.clone()))
                        .or_default()
                        .extend(c.terms);
                }
            }
        }
    }
    for ((pi, pid, sid), terms) in policy_terms {
        let pol = &inst.policies[pi];
        let beta = inst.scenario_probability(&sid);
        let slack = lp.add_col(
            format!("pol_slack_{pi}_p{pid}_{sid}"),
            0.0,
            inf,
            pol.penalty * beta,
        );
        let mut res: Vec<(usize, f64)> = terms.iter().map(|(n, v)| (index[n], *v)).collect();
        let (sense, slack_sign, rhs) = match pol.kind {
            PolicyKind::Co2Cap => (RowSense::Le, -1.0, pol.cap),
            PolicyKind::MinShare => {
                let total_demand: f64 = inst
                    .periods
                    .iter()
                    .filter(|p| p.id == pid)
                    .flat_map(|p| p.subperiods.iter())
                    .filter(|w| w.scenario == sid)
                    .flat_map(|w| w.demand.values())
                    .flatten()
                    .sum();
                (RowSense::Ge, 1.0, pol.cap * total_demand)
            }
        };
        res.push((slack, slack_sign));
        lp.add_row(format!("policy_{pi}_p{pid}_{sid}"), res, sense, rhs);
    }

    // Carry-over rows.
    for (i, p) in inst.periods.iter().enumerate() {
        for r in &inst.resources {
            let cap = index[&format!("y_cap_{}_p{}", r.id, p.id)];
            let build = index[&format!("y_build_{}_p{}", r.id, p.id)];
            let retire = index[&format!("y_retire_{}_p{}", r.id, p.id)];
            let unit = if r.integer_build { r.unit_size } else { 1.0 };
            let mut terms = vec![(cap, 1.0), (build, -unit), (retire, 1.0)];
            let rhs = if i == 0 {
                r.existing_cap
            } else {
                terms.push((index[&format!("y_cap_{}_p{}", r.id, inst.periods[i - 1].id)], -1.0));
                0.0
            };
            lp.add_row(format!("carry_{}_p{}", r.id, p.id), terms, RowSense::Eq, rhs);
        }
    }

    (lp, integers)
}
