//! Capacity-expansion instance schema: planning periods holding operational
//! sub-periods, stochastic scenarios, zones, resources, transmission links,
//! and policy constraints, plus the slack penalty configuration.
//!
//! Instances are immutable descriptions; all problem matrices are derived
//! from them elsewhere. Maps are BTree-based so iteration order (and hence
//! everything built from an instance) is deterministic.

mod generate;
mod io;
mod validate;

pub use generate::{generate_synthetic, GeneratorSpec};
pub use io::{load_instance, save_instance};
pub use validate::{validate_instance, ValidationReport, Violation};

use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResourceKind {
    /// Thermal generator with linearized (continuous) unit commitment.
    ThermalUc,
    /// Variable renewable driven by an hourly availability series.
    Vre,
    /// Storage whose state of charge wraps within each sub-period.
    ShortStorage,
    /// Multi-day storage chained across sub-periods via boundary variables.
    MdsStorage,
    /// Reservoir hydro: multi-day storage with exogenous inflow and no
    /// grid charging.
    ReservoirHydro,
}

impl ResourceKind {
    pub fn is_storage(self) -> bool {
        matches!(
            self,
            ResourceKind::ShortStorage | ResourceKind::MdsStorage | ResourceKind::ReservoirHydro
        )
    }

    pub fn is_mds(self) -> bool {
        matches!(self, ResourceKind::MdsStorage | ResourceKind::ReservoirHydro)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resource {
    pub id: String,
    pub zone: String,
    pub kind: ResourceKind,
    /// Installed power capacity (MW) before the first planning period.
    pub existing_cap: f64,
    /// Maximum capacity added per period (MW).
    pub max_build: f64,
    /// Maximum capacity retired per period (MW).
    pub max_retire: f64,
    /// Amortized fixed cost per MW of installed capacity, per period.
    pub invest_cost: f64,
    /// Cost per MW retired.
    pub retire_cost: f64,
    /// Dispatch cost per MWh.
    pub var_cost: f64,
    /// Emission rate, tons per MWh discharged.
    pub co2_rate: f64,
    /// Hourly ramp limit as a fraction of installed capacity (thermal).
    pub ramp_frac: f64,
    /// Minimum stable output as a fraction of committed capacity (thermal).
    pub min_stable: f64,
    /// Hourly self-discharge fraction (storage kinds).
    pub eta_self: f64,
    /// Charge efficiency in (0,1] (storage kinds).
    pub eta_c: f64,
    /// Discharge efficiency in (0,1] (storage kinds).
    pub eta_d: f64,
    /// Energy capacity as a multiple of power capacity (storage kinds).
    pub energy_ratio: f64,
    /// Builds restricted to whole units of `unit_size` MW.
    pub integer_build: bool,
    pub unit_size: f64,
}

impl Resource {
    /// A blank continuous resource; callers override what matters.
    pub fn new(id: impl Into<String>, zone: impl Into<String>, kind: ResourceKind) -> Self {
        Resource {
            id: id.into(),
            zone: zone.into(),
            kind,
            existing_cap: 0.0,
            max_build: 0.0,
            max_retire: 0.0,
            invest_cost: 0.0,
            retire_cost: 0.0,
            var_cost: 0.0,
            co2_rate: 0.0,
            ramp_frac: 1.0,
            min_stable: 0.0,
            eta_self: 0.0,
            eta_c: 1.0,
            eta_d: 1.0,
            energy_ratio: 1.0,
            integer_build: false,
            unit_size: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Zone {
    pub id: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionLink {
    pub id: String,
    pub from: String,
    pub to: String,
    /// Flow limit in each direction (MW).
    pub capacity: f64,
    /// Fraction of transported energy lost.
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub probability: f64,
}

/// One operational sub-period (e.g. a representative week) belonging to a
/// single scenario. Series maps are keyed by zone or resource id and hold
/// one value per hour.
#[derive(Debug, Clone, PartialEq)]
pub struct SubPeriod {
    /// Globally unique id, ascending across the whole instance.
    pub id: usize,
    pub scenario: String,
    pub hours: usize,
    pub demand: BTreeMap<String, Vec<f64>>,
    pub availability: BTreeMap<String, Vec<f64>>,
    pub inflow: BTreeMap<String, Vec<f64>>,
    /// Multiplier on resource variable costs within this sub-period.
    pub cost_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanningPeriod {
    pub id: usize,
    pub subperiods: Vec<SubPeriod>,
    /// Multiplier on resource fixed costs in this period.
    pub fixed_cost_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    Co2Cap,
    /// Minimum share of demand served by zero-emission resources.
    MinShare,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub id: String,
    pub kind: PolicyKind,
    /// (period id, scenario id) pairs the policy applies to.
    pub scope: Vec<(usize, String)>,
    /// Emission cap in tons (Co2Cap) or share fraction (MinShare).
    pub cap: f64,
    /// Violation penalty, currency per ton or per MWh.
    pub penalty: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyConfig {
    /// Currency per ton of emissions above a cap.
    pub co2_penalty: f64,
    /// Cost of non-served energy, currency per MWh.
    pub nse_cost: f64,
    /// Penalty on multi-day-storage boundary mismatches, currency per MWh.
    pub mds_boundary_penalty: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        let nse_cost = 9000.0;
        PenaltyConfig {
            co2_penalty: 150.0,
            nse_cost,
            mds_boundary_penalty: 2.0 * nse_cost,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CEMInstance {
    pub periods: Vec<PlanningPeriod>,
    pub scenarios: Vec<Scenario>,
    pub zones: Vec<Zone>,
    pub resources: Vec<Resource>,
    pub links: Vec<TransmissionLink>,
    pub policies: Vec<Policy>,
    pub penalties: PenaltyConfig,
}

impl CEMInstance {
    pub fn resource(&self, id: &str) -> Option<&Resource> {
        self.resources.iter().find(|r| r.id == id)
    }

    pub fn scenario_probability(&self, id: &str) -> f64 {
        self.scenarios
            .iter()
            .find(|s| s.id == id)
            .map(|s| s.probability)
            .unwrap_or(0.0)
    }

    /// All sub-periods in ascending id order with their owning period.
    pub fn subperiods(&self) -> impl Iterator<Item = (&PlanningPeriod, &SubPeriod)> {
        self.periods
            .iter()
            .flat_map(|p| p.subperiods.iter().map(move |w| (p, w)))
    }

    pub fn num_subperiods(&self) -> usize {
        self.periods.iter().map(|p| p.subperiods.len()).sum()
    }
}

/// The canonical desk fixture: one zone, one period, one scenario, two
/// 4-hour sub-periods, one emitting thermal unit, one multi-day storage,
/// and a binding CO2 cap.
pub fn tiny1() -> CEMInstance {
    let hours = 4;
    let mk_sub = |id: usize, demand: [f64; 4]| SubPeriod {
        id,
        scenario: "s0".into(),
        hours,
        demand: [("z0".to_string(), demand.to_vec())].into_iter().collect(),
        availability: BTreeMap::new(),
        inflow: BTreeMap::new(),
        cost_scale: 1.0,
    };
    let mut thermal = Resource::new("t0", "z0", ResourceKind::ThermalUc);
    thermal.existing_cap = 20.0;
    thermal.max_build = 200.0;
    thermal.max_retire = 20.0;
    thermal.invest_cost = 40.0;
    thermal.retire_cost = 5.0;
    thermal.var_cost = 30.0;
    thermal.co2_rate = 0.5;
    thermal.ramp_frac = 0.6;
    thermal.min_stable = 0.2;

    let mut mds = Resource::new("m0", "z0", ResourceKind::MdsStorage);
    mds.existing_cap = 0.0;
    mds.max_build = 100.0;
    mds.invest_cost = 12.0;
    mds.var_cost = 0.5;
    mds.eta_self = 0.01;
    mds.eta_c = 0.95;
    mds.eta_d = 0.92;
    mds.energy_ratio = 6.0;

    CEMInstance {
        periods: vec![PlanningPeriod {
            id: 0,
            subperiods: vec![
                mk_sub(0, [50.0, 70.0, 90.0, 60.0]),
                mk_sub(1, [40.0, 55.0, 110.0, 65.0]),
            ],
            fixed_cost_scale: 1.0,
        }],
        scenarios: vec![Scenario {
            id: "s0".into(),
            probability: 1.0,
        }],
        zones: vec![Zone { id: "z0".into() }],
        resources: vec![thermal, mds],
        links: vec![],
        policies: vec![Policy {
            id: "cap0".into(),
            kind: PolicyKind::Co2Cap,
            scope: vec![(0, "s0".into())],
            cap: 180.0,
            penalty: 150.0,
        }],
        penalties: PenaltyConfig::default(),
    }
}

/// TINY-1 variant with two integer build decisions (unit-sized thermal and
/// storage additions), used by the mixed-integer paths.
pub fn tiny1_integer() -> CEMInstance {
    let mut inst = tiny1();
    for r in &mut inst.resources {
        r.integer_build = true;
        r.unit_size = 25.0;
    }
    inst
}
