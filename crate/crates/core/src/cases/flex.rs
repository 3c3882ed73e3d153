//! Reserve capacity the basic-reserve and flexible-reserve models grant at a
//! fixed schedule, compared with what the storage can physically deliver.

use serde::Serialize;

use crate::formulations::{build, pvar, BuildOptions, Family, ReserveProfile, StorageParams};
use crate::model::{Direction, Objective};
use crate::numeric::{LinearForm, Rational};
use crate::solver::{solve_mip_with, SolveOptions};

use super::CaseError;

/// Operation in one period: the state of charge before it and the scheduled
/// charge and discharge power.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchedulePoint {
    pub soc_before: Rational,
    pub p_c: Rational,
    pub p_d: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlexReport {
    pub point: SchedulePoint,
    pub bor_max_down: Rational,
    pub bor_max_up: Rational,
    pub bof_max_down: Rational,
    pub bof_max_up: Rational,
    /// Largest downward deviation of the net injection the storage can follow
    /// within its power and energy limits.
    pub realizable_down: Rational,
    pub realizable_up: Rational,
    /// The flexible model promises more reserve than can be delivered.
    pub bof_unrealizable: bool,
    /// The basic model grants less reserve than can be delivered.
    pub bor_conservative: bool,
}

/// `(down, up)`: the largest deviations of the net charge `p_c - p_d` below
/// and above the scheduled value that keep power and state of charge within
/// limits, with charge and discharge never simultaneous.
pub fn realizable_reserves(p: &StorageParams, s: &SchedulePoint) -> (Rational, Rational) {
    let net = &s.p_c - &s.p_d;
    let max_charge = p.p_c_max.clone().min(&(&p.e_max - &s.soc_before) / &(&p.eta_c * &p.delta_t));
    let max_discharge = p.p_d_max.clone().min(&(&p.eta_d * &(&s.soc_before - &p.e_min)) / &p.delta_t);
    let zero = Rational::zero();
    ((&max_charge - &net).max(zero.clone()), (&max_discharge + &net).max(zero))
}

/// Largest total reserve in `direction` ("r_down" or "r_up") the one-period
/// model of `family` admits with the schedule fixed.
fn model_max(p: &StorageParams, family: Family, s: &SchedulePoint, direction: &str) -> Result<Rational, CaseError> {
    let mut q = p.clone();
    q.e_initial = s.soc_before.clone();
    let opts = BuildOptions { validate: false, ..BuildOptions::default() };
    let mut m = build(family, &q, 1, &ReserveProfile::none(), &opts)?;
    m.set_bounds("p_c[t=1]", Some(s.p_c.clone()), Some(s.p_c.clone()));
    m.set_bounds("p_d[t=1]", Some(s.p_d.clone()), Some(s.p_d.clone()));
    m.objective = Objective { direction: Direction::Maximize, form: LinearForm::var(pvar(direction, 1)) };
    let r = solve_mip_with(&m, &SolveOptions::default())?;
    Ok(r.objective.unwrap_or_default())
}

/// Reserve bounds of the basic-reserve and flexible-reserve models at one
/// schedule point, next to the physically realizable amounts. Both models
/// use the reserve limits in `p`.
pub fn reserve_flexibility_report(p: &StorageParams, s: &SchedulePoint) -> Result<FlexReport, CaseError> {
    let (realizable_down, realizable_up) = realizable_reserves(p, s);
    let bor_max_down = model_max(p, Family::Bor, s, "r_down")?;
    let bor_max_up = model_max(p, Family::Bor, s, "r_up")?;
    let bof_max_down = model_max(p, Family::Bof, s, "r_down")?;
    let bof_max_up = model_max(p, Family::Bof, s, "r_up")?;
    Ok(FlexReport {
        bof_unrealizable: bof_max_down > realizable_down || bof_max_up > realizable_up,
        bor_conservative: bor_max_down < realizable_down || bor_max_up < realizable_up,
        point: s.clone(),
        bor_max_down,
        bor_max_up,
        bof_max_down,
        bof_max_up,
        realizable_down,
        realizable_up,
    })
}

impl FlexReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let d = |x: &Rational| x.to_decimal(1);
        format!(
            "schedule: soc_before={} p_c={} p_d={}\n\
             down reserve: BOR {} | BOF {} | realizable {}\n\
             up reserve:   BOR {} | BOF {} | realizable {}\n\
             BOF promises unrealizable reserve: {}\nBOR is conservative: {}\n",
            d(&self.point.soc_before),
            d(&self.point.p_c),
            d(&self.point.p_d),
            d(&self.bor_max_down),
            d(&self.bof_max_down),
            d(&self.realizable_down),
            d(&self.bor_max_up),
            d(&self.bof_max_up),
            d(&self.realizable_up),
            self.bof_unrealizable,
            self.bor_conservative
        )
    }
}
