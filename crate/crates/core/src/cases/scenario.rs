//! Case-study scenarios: buses with demand profiles, generators, one storage
//! unit, an optional candidate line, and their assembly into one model.

use serde::{Deserialize, Serialize};

use crate::formulations::{build, pvar, BuildOptions, Family, ReserveProfile, StorageParams};
use crate::model::{Direction, ModelInstance, Objective};
use crate::numeric::{LinearForm, Rational, Var};
use crate::poly::LinearConstraint;

use super::CaseError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    /// Index into the scenario's buses.
    pub bus: usize,
    /// MW. A positive minimum output, or a positive fixed cost, gives the
    /// generator a commitment binary per period.
    #[serde(default)]
    pub p_min: Rational,
    /// MW
    pub p_max: Rational,
    /// MW/h; absent means unlimited.
    #[serde(default)]
    pub ramp_up: Option<Rational>,
    /// MW/h; absent means unlimited.
    #[serde(default)]
    pub ramp_down: Option<Rational>,
    /// $/MWh
    #[serde(default)]
    pub cost_linear: Rational,
    /// $ per committed period
    #[serde(default)]
    pub cost_fixed: Rational,
    /// MW before the first period of every day; ramps are measured from it.
    #[serde(default)]
    pub initial_output: Rational,
}

impl GeneratorSpec {
    pub fn is_committable(&self) -> bool {
        self.p_min.is_positive() || self.cost_fixed.is_positive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bus {
    pub name: String,
    /// MW per period of one day.
    pub demand: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageSite {
    pub bus: usize,
    pub params: StorageParams,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateLine {
    pub from: usize,
    pub to: usize,
    /// $
    pub cost: Rational,
    /// MW
    pub capacity: Rational,
}

/// Minimum up and down reserve the storage must offer in each period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ReserveRequirement {
    /// MW per period of one day, for both directions.
    Fixed(Vec<Rational>),
    /// Share of the demand at the storage bus, for both directions.
    DemandShare(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveKind {
    /// Generator energy and commitment costs, plus the line cost if built.
    Operational,
    /// Operational cost plus storage capacity costs per unit of `c_bar`,
    /// `d_bar` and `e_bar`.
    Investment { charge_cost: Rational, discharge_cost: Rational, energy_cost: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub buses: Vec<Bus>,
    pub generators: Vec<GeneratorSpec>,
    pub storage: StorageSite,
    #[serde(default)]
    pub reserve_req: Option<ReserveRequirement>,
    #[serde(default)]
    pub line: Option<CandidateLine>,
    pub objective: ObjectiveKind,
    /// Number of repetitions of the daily profile. Every day starts from the
    /// storage's initial state of charge and the generators' initial outputs.
    #[serde(default = "one_day")]
    pub days: usize,
}

fn one_day() -> usize {
    1
}

/// Which binaries an assembled model keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relaxation {
    /// Every binary stays binary.
    None,
    /// The storage mode binaries become continuous on `[0, 1]`; commitment and
    /// line binaries stay binary.
    Storage,
}

fn bad(msg: impl Into<String>) -> CaseError {
    CaseError::BadScenario(msg.into())
}

impl Scenario {
    /// Periods in one day.
    pub fn day_length(&self) -> usize {
        self.buses.first().map_or(0, |b| b.demand.len())
    }

    pub fn horizon(&self) -> usize {
        self.day_length() * self.days
    }

    /// Checks lengths, indices and generator data.
    pub fn check(&self) -> Result<(), CaseError> {
        let len = self.day_length();
        if len == 0 || self.days == 0 {
            return Err(bad("empty horizon"));
        }
        for b in &self.buses {
            if b.demand.len() != len {
                return Err(bad(format!("bus `{}` has {} demand periods, expected {len}", b.name, b.demand.len())));
            }
        }
        let nb = self.buses.len();
        for g in &self.generators {
            if g.bus >= nb {
                return Err(bad(format!("generator `{}` sits at unknown bus {}", g.name, g.bus)));
            }
            if g.p_min > g.p_max || g.p_min.is_negative() {
                return Err(bad(format!("generator `{}` needs 0 <= p_min <= p_max", g.name)));
            }
            if [&g.ramp_up, &g.ramp_down].into_iter().flatten().any(Rational::is_negative) {
                return Err(bad(format!("generator `{}` has a negative ramp limit", g.name)));
            }
        }
        if self.storage.bus >= nb {
            return Err(bad(format!("storage sits at unknown bus {}", self.storage.bus)));
        }
        if let Some(ReserveRequirement::Fixed(r)) = &self.reserve_req {
            if r.len() != len {
                return Err(bad(format!("reserve requirement has {} periods, expected {len}", r.len())));
            }
        }
        if let Some(l) = &self.line {
            if l.from >= nb || l.to >= nb || l.from == l.to {
                return Err(bad("candidate line must join two distinct known buses"));
            }
        }
        Ok(())
    }

    /// Reserve minima over the whole horizon.
    pub fn reserve_profile(&self) -> ReserveProfile {
        let per_day: Vec<Rational> = match &self.reserve_req {
            None => return ReserveProfile::none(),
            Some(ReserveRequirement::Fixed(r)) => r.clone(),
            Some(ReserveRequirement::DemandShare(s)) => {
                self.buses[self.storage.bus].demand.iter().map(|d| d * s).collect()
            }
        };
        let all: Vec<Rational> = per_day.iter().cycle().take(self.horizon()).cloned().collect();
        ReserveProfile { r_up_min: all.clone(), r_down_min: all }
    }

    fn demand(&self, bus: usize, t: usize) -> &Rational {
        let b = &self.buses[bus].demand;
        &b[(t - 1) % b.len()]
    }

    fn day_start(&self, t: usize) -> bool {
        (t - 1).is_multiple_of(self.day_length())
    }
}

/// Generator output variable `p_<name>[t=k]`.
pub fn gen_var(g: &GeneratorSpec, t: usize) -> Var {
    pvar(&format!("p_{}", g.name), t)
}

/// Commitment variable `u_<name>[t=k]`.
pub fn commit_var(g: &GeneratorSpec, t: usize) -> Var {
    pvar(&format!("u_{}", g.name), t)
}

/// Line flow `flow[t=k]`, positive from `from` to `to`.
pub fn flow_var(t: usize) -> Var {
    pvar("flow", t)
}

/// Line investment binary.
pub const LINE_VAR: &str = "x_line";

fn x(v: &Var) -> LinearForm {
    LinearForm::var(v.clone())
}

fn k(c: &Rational) -> LinearForm {
    LinearForm::constant(c.clone())
}

fn add(m: &mut ModelInstance, c: LinearConstraint) -> Result<(), CaseError> {
    m.add_constraint(c).map_err(|e| CaseError::Build(e.into()))
}

/// Scenario with the storage block of `family`: power balance per bus and
/// period, generator limits and ramps, the optional line investment, and the
/// scenario objective.
pub fn assemble(s: &Scenario, family: Family, relaxation: Relaxation) -> Result<ModelInstance, CaseError> {
    s.check()?;
    let investment = matches!(s.objective, ObjectiveKind::Investment { .. });
    if investment != family.is_investment() {
        return Err(bad(format!("{family} does not match the scenario's objective")));
    }
    let rp = s.reserve_profile();
    if !rp.is_none() && !family.has_reserves() {
        return Err(bad(format!("{family} cannot meet the scenario's reserve requirement")));
    }
    let horizon = s.horizon();
    let opts = BuildOptions { reset_every: (s.days > 1).then(|| s.day_length()), ..BuildOptions::default() };
    let mut m = build(family, &s.storage.params, horizon, &rp, &opts)?;
    m.name = format!("{}/{}-{}", s.name, family.name(), if relaxation == Relaxation::None { "MIP" } else { "LP" });
    let dt = s.storage.params.delta_t.clone();
    let mut cost = LinearForm::zero();
    let mut balance: Vec<Vec<LinearForm>> = vec![vec![LinearForm::zero(); horizon + 1]; s.buses.len()];

    for g in &s.generators {
        for t in 1..=horizon {
            let p = gen_var(g, t);
            if g.is_committable() {
                m.continuous(p.clone(), Some(Rational::zero()), None).map_err(|e| CaseError::Build(e.into()))?;
                let u = m.binary(commit_var(g, t)).map_err(|e| CaseError::Build(e.into()))?;
                let lab = |n: &str| format!("{n}_{}[t={t}]", g.name);
                add(&mut m, LinearConstraint::le(x(&p), LinearForm::term(g.p_max.clone(), u.clone()), lab("gen_max")))?;
                add(&mut m, LinearConstraint::ge(x(&p), LinearForm::term(g.p_min.clone(), u.clone()), lab("gen_min")))?;
                cost.add_term(g.cost_fixed.clone(), u);
            } else {
                m.continuous(p.clone(), Some(Rational::zero()), Some(g.p_max.clone()))
                    .map_err(|e| CaseError::Build(e.into()))?;
            }
            let prev = if s.day_start(t) { k(&g.initial_output) } else { x(&gen_var(g, t - 1)) };
            if let Some(ru) = &g.ramp_up {
                add(&mut m, LinearConstraint::le(x(&p) - prev.clone(), k(ru), format!("ramp_up_{}[t={t}]", g.name)))?;
            }
            if let Some(rd) = &g.ramp_down {
                add(&mut m, LinearConstraint::le(prev - x(&p), k(rd), format!("ramp_down_{}[t={t}]", g.name)))?;
            }
            cost.add_term(&g.cost_linear * &dt, p.clone());
            balance[g.bus][t].add_term(Rational::one(), p.clone());
        }
    }

    for t in 1..=horizon {
        let b = &mut balance[s.storage.bus][t];
        *b = b.clone() + x(&pvar("p_d", t)) - x(&pvar("p_c", t));
    }

    if let Some(l) = &s.line {
        let line = m.binary(LINE_VAR).map_err(|e| CaseError::Build(e.into()))?;
        cost.add_term(l.cost.clone(), line.clone());
        for t in 1..=horizon {
            let f = m.continuous(flow_var(t), None, None).map_err(|e| CaseError::Build(e.into()))?;
            let cap = LinearForm::term(l.capacity.clone(), line.clone());
            add(&mut m, LinearConstraint::le(x(&f), cap.clone(), format!("flow_max[t={t}]")))?;
            add(&mut m, LinearConstraint::ge(x(&f), LinearForm::zero() - cap, format!("flow_min[t={t}]")))?;
            balance[l.from][t] = balance[l.from][t].clone() - x(&f);
            balance[l.to][t] = balance[l.to][t].clone() + x(&f);
        }
    }

    for (bi, bus) in s.buses.iter().enumerate() {
        for t in 1..=horizon {
            let label = format!("balance_{}[t={t}]", bus.name);
            add(&mut m, LinearConstraint::eq(balance[bi][t].clone(), k(s.demand(bi, t)), label))?;
        }
    }

    if let ObjectiveKind::Investment { charge_cost, discharge_cost, energy_cost } = &s.objective {
        cost = cost
            + LinearForm::term(charge_cost.clone(), "c_bar")
            + LinearForm::term(discharge_cost.clone(), "d_bar")
            + LinearForm::term(energy_cost.clone(), "e_bar");
    }
    m.objective = Objective { direction: Direction::Minimize, form: cost };
    Ok(match relaxation {
        Relaxation::None => m,
        Relaxation::Storage => m.relaxed_where(|v| v.as_str().starts_with("delta[")),
    })
}
