//! Builders for the seven storage model families.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, ModelInstance};
use crate::numeric::{LinearForm, Rational, Var};
use crate::poly::LinearConstraint;

use super::params::{validate_params, Family, StorageParams, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("invalid parameters: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidParams(Vec<Violation>),
    #[error("horizon must be at least one period")]
    EmptyHorizon,
    #[error("reserve profile has {got} periods, expected at least {want}")]
    ShortReserveProfile { got: usize, want: usize },
    #[error("reserve minima require a family with reserves, got {0}")]
    NoReserves(Family),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Minimum total up and down reserve per period.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReserveProfile {
    pub r_up_min: Vec<Rational>,
    pub r_down_min: Vec<Rational>,
}

impl ReserveProfile {
    /// No minimum-reserve rows at all.
    pub fn none() -> Self {
        ReserveProfile::default()
    }

    pub fn constant(up: Rational, down: Rational, periods: usize) -> Self {
        ReserveProfile { r_up_min: vec![up; periods], r_down_min: vec![down; periods] }
    }

    pub fn is_none(&self) -> bool {
        self.r_up_min.is_empty() && self.r_down_min.is_empty()
    }
}

/// How the state of charge before the first period enters the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    /// `e_initial` as a constant.
    #[default]
    Fixed,
    /// A variable `e[t=0]` with the family's energy window.
    Variable,
}

/// Energy rows of the tight investment family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TirEnergyRows {
    /// `eta_C (p_c + r_cd) dt <= (1 - theta)(E0 delta + e_bar)` and
    /// `(p_d + r_du) dt / eta_D <= (1 - theta)(E0 (1 - delta) + e_bar)`.
    #[default]
    Corrected,
    /// `eta_C p_c dt <= (1 - theta)(E0 delta + e_bar)` and
    /// `p_d dt / eta_D <= (1 - theta)(E0 delta + e_bar)`, without reserve terms.
    Original,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    pub validate: bool,
    pub initial_state: InitialState,
    /// Periods `t` with `(t - 1) % k == 0` start again from the fixed
    /// `e_initial`, cutting the storage coupling into independent days.
    pub reset_every: Option<usize>,
    pub tir_energy_rows: TirEnergyRows,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            validate: true,
            initial_state: InitialState::Fixed,
            reset_every: None,
            tir_energy_rows: TirEnergyRows::Corrected,
        }
    }
}

/// Variable id `name[t=k]`.
pub fn pvar(name: &str, t: usize) -> Var {
    Var::new(format!("{name}[t={t}]"))
}

fn lab(name: &str, t: usize) -> String {
    format!("{name}[t={t}]")
}

fn x(v: &Var) -> LinearForm {
    LinearForm::var(v.clone())
}

fn k(c: &Rational) -> LinearForm {
    LinearForm::constant(c.clone())
}

fn kx(c: &Rational, v: &Var) -> LinearForm {
    LinearForm::term(c.clone(), v.clone())
}

struct Builder<'a> {
    p: &'a StorageParams,
    opts: BuildOptions,
    m: ModelInstance,
    /// `eta_C * delta_t`
    hc: Rational,
    /// `delta_t / eta_D`
    hd: Rational,
}

impl Builder<'_> {
    fn le(&mut self, lhs: LinearForm, rhs: LinearForm, label: String) -> Result<(), BuildError> {
        Ok(self.m.add_constraint(LinearConstraint::le(lhs, rhs, label))?)
    }

    fn ge(&mut self, lhs: LinearForm, rhs: LinearForm, label: String) -> Result<(), BuildError> {
        Ok(self.m.add_constraint(LinearConstraint::ge(lhs, rhs, label))?)
    }

    fn eq(&mut self, lhs: LinearForm, rhs: LinearForm, label: String) -> Result<(), BuildError> {
        Ok(self.m.add_constraint(LinearConstraint::eq(lhs, rhs, label))?)
    }

    /// `1 - delta`
    fn off(&self, delta: &Var) -> LinearForm {
        k(&Rational::one()) - x(delta)
    }

    /// State of charge before period `t`.
    fn prev(&mut self, t: usize, family: Family) -> Result<LinearForm, BuildError> {
        let reset = t > 1 && self.opts.reset_every.is_some_and(|r| r > 0 && (t - 1).is_multiple_of(r));
        if t > 1 && !reset {
            return Ok(x(&pvar("e", t - 1)));
        }
        if reset || self.opts.initial_state == InitialState::Fixed {
            if family == Family::Bir {
                // The energy window moves with e_bar, so a fixed initial
                // state constrains the investment.
                let cap = k(&self.p.e0_installed) + x(&Var::from("e_bar"));
                self.le(cap.clone() * &self.p.theta, k(&self.p.e_initial), lab("init_soc_min", t))?;
                self.ge(cap, k(&self.p.e_initial), lab("init_soc_max", t))?;
            }
            return Ok(k(&self.p.e_initial));
        }
        let e0 = self.m.nonneg(pvar("e", 0))?;
        match family {
            Family::Bo | Family::Bor | Family::Bof => {
                self.ge(x(&e0), k(&self.p.e_min), "init_soc_min".into())?;
                self.le(x(&e0), k(&self.p.e_max), "init_soc_max".into())?;
            }
            Family::Bir => {
                let cap = k(&self.p.e0_installed) + x(&Var::from("e_bar"));
                self.ge(x(&e0), cap.clone() * &self.p.theta, "init_soc_min".into())?;
                self.le(x(&e0), cap, "init_soc_max".into())?;
            }
            Family::To | Family::Tor | Family::Tir => {}
        }
        Ok(x(&e0))
    }

    fn period(&mut self, family: Family, t: usize, rp: &ReserveProfile) -> Result<(), BuildError> {
        let p = self.p;
        let e = self.m.nonneg(pvar("e", t))?;
        let pc = self.m.nonneg(pvar("p_c", t))?;
        let pd = self.m.nonneg(pvar("p_d", t))?;
        let delta = self.m.binary(pvar("delta", t))?;
        let prev = self.prev(t, family)?;
        let (hc, hd) = (self.hc.clone(), self.hd.clone());
        self.eq(x(&e), prev.clone() + kx(&hc, &pc) - kx(&hd, &pd), lab("soc_balance", t))?;

        let (r_cu, r_cd, r_du, r_dd) = if matches!(family, Family::Bor | Family::Tor | Family::Bir | Family::Tir) {
            (
                Some(self.m.nonneg(pvar("r_cu", t))?),
                Some(self.m.nonneg(pvar("r_cd", t))?),
                Some(self.m.nonneg(pvar("r_du", t))?),
                Some(self.m.nonneg(pvar("r_dd", t))?),
            )
        } else {
            (None, None, None, None)
        };
        let (r_up, r_down) = if matches!(family, Family::Bor | Family::Tor | Family::Bof) {
            (Some(self.m.nonneg(pvar("r_up", t))?), Some(self.m.nonneg(pvar("r_down", t))?))
        } else {
            (None, None)
        };

        match family {
            Family::Bo => {
                self.ge(x(&e), k(&p.e_min), lab("soc_min", t))?;
                self.le(x(&e), k(&p.e_max), lab("soc_max", t))?;
                self.le(x(&pc), x(&delta) * &p.p_c_max, lab("charge_cap", t))?;
                self.le(x(&pd), self.off(&delta) * &p.p_d_max, lab("discharge_cap", t))?;
            }
            Family::To => {
                self.ge(prev.clone(), k(&p.e_min) + kx(&hd, &pd), lab("prev_soc_min", t))?;
                self.le(prev, k(&p.e_max) - kx(&hc, &pc), lab("prev_soc_max", t))?;
                self.le(x(&pc), x(&delta) * &p.p_c_max, lab("charge_cap", t))?;
                self.le(x(&pd), self.off(&delta) * &p.p_d_max, lab("discharge_cap", t))?;
            }
            Family::Bof => {
                let (up, down) = (r_up.clone().unwrap(), r_down.clone().unwrap());
                self.ge(x(&e), k(&p.e_min) + kx(&hd, &up), lab("soc_min_flex", t))?;
                self.le(x(&e), k(&p.e_max) - kx(&hc, &down), lab("soc_max_flex", t))?;
                self.le(x(&pc), x(&delta) * &p.p_c_max, lab("charge_cap", t))?;
                self.le(x(&pd), self.off(&delta) * &p.p_d_max, lab("discharge_cap", t))?;
                self.le(x(&pc) - x(&pd) + x(&down), k(&p.p_c_max), lab("flex_down", t))?;
                self.le(x(&pd) - x(&pc) + x(&up), k(&p.p_d_max), lab("flex_up", t))?;
                self.le(x(&up), k(&p.r_up), lab("up_limit", t))?;
                self.le(x(&down), k(&p.r_down), lab("down_limit", t))?;
            }
            _ => {
                let (cu, cd, du, dd) = (r_cu.unwrap(), r_cd.unwrap(), r_du.unwrap(), r_dd.unwrap());
                self.reserve_rows(family, t, &prev, [&e, &pc, &pd, &delta], [&cu, &cd, &du, &dd])?;
                self.ge(x(&pc) - x(&cu), LinearForm::zero(), lab("charge_up_res", t))?;
                self.ge(x(&pd) - x(&dd), LinearForm::zero(), lab("discharge_down_res", t))?;
                if let (Some(up), Some(down)) = (&r_up, &r_down) {
                    self.eq(x(down), x(&cd) + x(&dd), lab("down_total", t))?;
                    self.eq(x(up), x(&cu) + x(&du), lab("up_total", t))?;
                    if family == Family::Bor {
                        self.le(x(down), k(&p.r_down), lab("down_limit", t))?;
                        self.le(x(up), k(&p.r_up), lab("up_limit", t))?;
                    }
                }
                if !rp.is_none() && family.is_investment() {
                    self.ge(x(&cu) + x(&du), k(&rp.r_up_min[t - 1]), lab("up_min", t))?;
                    self.ge(x(&cd) + x(&dd), k(&rp.r_down_min[t - 1]), lab("down_min", t))?;
                }
            }
        }
        if let (false, Some(up), Some(down)) = (rp.is_none(), &r_up, &r_down) {
            self.ge(x(up), k(&rp.r_up_min[t - 1]), lab("up_min", t))?;
            self.ge(x(down), k(&rp.r_down_min[t - 1]), lab("down_min", t))?;
        }
        Ok(())
    }

    /// Rows of the reserve and investment families other than the shared
    /// balance and reserve-sign rows.
    fn reserve_rows(
        &mut self,
        family: Family,
        t: usize,
        prev: &LinearForm,
        [e, pc, pd, delta]: [&Var; 4],
        [cu, cd, du, dd]: [&Var; 4],
    ) -> Result<(), BuildError> {
        let p = self.p;
        let (hc, hd) = (self.hc.clone(), self.hd.clone());
        let (c_bar, d_bar, e_bar) = (Var::from("c_bar"), Var::from("d_bar"), Var::from("e_bar"));
        let cap = || k(&p.e0_installed) + x(&e_bar);
        let one_minus_theta = &Rational::one() - &p.theta;
        match family {
            Family::Bor => {
                self.ge(x(e), k(&p.e_min) + kx(&hc, cu) + kx(&hd, du), lab("soc_min_res", t))?;
                self.le(x(e), k(&p.e_max) - kx(&hc, cd) - kx(&hd, dd), lab("soc_max_res", t))?;
                self.le(x(pc) + x(cd), x(delta) * &p.p_c_max, lab("charge_cap_res", t))?;
                self.le(x(pd) + x(du), self.off(delta) * &p.p_d_max, lab("discharge_cap_res", t))?;
            }
            Family::Tor => {
                self.ge(prev.clone(), k(&p.e_min) + kx(&hd, pd) + kx(&hd, du), lab("prev_soc_min_res", t))?;
                self.le(prev.clone(), k(&p.e_max) - kx(&hc, pc) - kx(&hc, cd), lab("prev_soc_max_res", t))?;
                self.le(x(pc) + x(cd), x(delta) * &p.p_c_max, lab("charge_cap_res", t))?;
                self.le(x(pd) + x(du), self.off(delta) * &p.p_d_max, lab("discharge_cap_res", t))?;
                self.le(x(cd), x(delta) * &p.r_down, lab("charge_down_split", t))?;
                self.le(x(dd), self.off(delta) * &p.r_down, lab("discharge_down_split", t))?;
                self.le(x(cu), x(delta) * &p.r_up, lab("charge_up_split", t))?;
                self.le(x(du), self.off(delta) * &p.r_up, lab("discharge_up_split", t))?;
            }
            Family::Bir => {
                self.ge(x(e), cap() * &p.theta + kx(&hc, cu) + kx(&hd, du), lab("soc_min_inv", t))?;
                self.le(x(e), cap() - kx(&hc, cd) - kx(&hd, dd), lab("soc_max_inv", t))?;
                self.le(x(pc) + x(cd), x(delta) * &(&p.pc0_installed + &p.c_max), lab("charge_cap_total", t))?;
                self.le(x(pc) + x(cd), k(&p.pc0_installed) + x(&c_bar), lab("charge_cap_inv", t))?;
                let dcap = &p.pd0_installed + &p.d_max;
                self.le(x(pd) + x(du), self.off(delta) * &dcap, lab("discharge_cap_total", t))?;
                self.le(x(pd) + x(du), k(&p.pd0_installed) + x(&d_bar), lab("discharge_cap_inv", t))?;
            }
            Family::Tir => {
                let lo = cap() * &p.theta + kx(&hd, pd) + kx(&hd, du);
                self.ge(prev.clone(), lo, lab("prev_soc_min_inv", t))?;
                self.le(prev.clone(), cap() - kx(&hc, pc) - kx(&hc, cd), lab("prev_soc_max_inv", t))?;
                self.le(x(pc) + x(cd), x(delta) * &(&p.pc0_installed + &p.c_max), lab("charge_cap_total", t))?;
                self.le(x(pc) + x(cd), x(delta) * &p.pc0_installed + x(&c_bar), lab("charge_cap_inv_tight", t))?;
                let dcap = &p.pd0_installed + &p.d_max;
                self.le(x(pd) + x(du), self.off(delta) * &dcap, lab("discharge_cap_total", t))?;
                self.le(
                    x(pd) + x(du),
                    self.off(delta) * &p.pd0_installed + x(&d_bar),
                    lab("discharge_cap_inv_tight", t),
                )?;
                let on = (x(delta) * &p.e0_installed + x(&e_bar)) * &one_minus_theta;
                match self.opts.tir_energy_rows {
                    TirEnergyRows::Corrected => {
                        let off = (self.off(delta) * &p.e0_installed + x(&e_bar)) * &one_minus_theta;
                        self.le(kx(&hc, pc) + kx(&hc, cd), on, lab("charge_energy_inv", t))?;
                        self.le(kx(&hd, pd) + kx(&hd, du), off, lab("discharge_energy_inv", t))?;
                    }
                    TirEnergyRows::Original => {
                        self.le(kx(&hc, pc), on.clone(), lab("charge_energy_inv", t))?;
                        self.le(kx(&hd, pd), on, lab("discharge_energy_inv", t))?;
                    }
                }
            }
            _ => unreachable!("reserve rows requested for {family}"),
        }
        Ok(())
    }
}

/// Builds `family` over `horizon` periods. With a non-empty reserve profile
/// the reserve families get per-period minimum total reserve rows.
pub fn build(
    family: Family,
    p: &StorageParams,
    horizon: usize,
    rp: &ReserveProfile,
    opts: &BuildOptions,
) -> Result<ModelInstance, BuildError> {
    if horizon == 0 {
        return Err(BuildError::EmptyHorizon);
    }
    if opts.validate {
        let mut v = validate_params(p, family);
        let fixed_start = opts.initial_state == InitialState::Fixed || opts.reset_every.is_some();
        if fixed_start && !family.is_investment() && !(p.e_min <= p.e_initial && p.e_initial <= p.e_max) {
            v.push(Violation {
                parameter: "e_initial",
                rule: "E_min <= e_initial <= E_max",
                detail: format!("e_initial = {}, E_min = {}, E_max = {}", p.e_initial, p.e_min, p.e_max),
            });
        }
        if !v.is_empty() {
            return Err(BuildError::InvalidParams(v));
        }
    }
    if !rp.is_none() {
        if !family.has_reserves() {
            return Err(BuildError::NoReserves(family));
        }
        let got = rp.r_up_min.len().min(rp.r_down_min.len());
        if got < horizon {
            return Err(BuildError::ShortReserveProfile { got, want: horizon });
        }
    }
    let mut b = Builder {
        p,
        opts: *opts,
        m: ModelInstance::new(format!("{}-MIP", family.name()), horizon),
        hc: &p.eta_c * &p.delta_t,
        hd: &p.delta_t / &p.eta_d,
    };
    if family.is_investment() {
        for (v, cap, label) in [("c_bar", &p.c_max, "c_bar_max"), ("d_bar", &p.d_max, "d_bar_max"), ("e_bar", &p.e_invest_max, "e_bar_max")] {
            let v = b.m.nonneg(v)?;
            b.le(x(&v), k(cap), label.into())?;
        }
    }
    for t in 1..=horizon {
        b.period(family, t, rp)?;
    }
    Ok(b.m)
}

pub fn build_bo(p: &StorageParams, horizon: usize) -> Result<ModelInstance, BuildError> {
    build(Family::Bo, p, horizon, &ReserveProfile::none(), &BuildOptions::default())
}

pub fn build_to(p: &StorageParams, horizon: usize) -> Result<ModelInstance, BuildError> {
    build(Family::To, p, horizon, &ReserveProfile::none(), &BuildOptions::default())
}

pub fn build_bor(p: &StorageParams, horizon: usize, rp: &ReserveProfile) -> Result<ModelInstance, BuildError> {
    build(Family::Bor, p, horizon, rp, &BuildOptions::default())
}

pub fn build_tor(p: &StorageParams, horizon: usize, rp: &ReserveProfile) -> Result<ModelInstance, BuildError> {
    build(Family::Tor, p, horizon, rp, &BuildOptions::default())
}

pub fn build_bir(p: &StorageParams, horizon: usize, rp: &ReserveProfile) -> Result<ModelInstance, BuildError> {
    build(Family::Bir, p, horizon, rp, &BuildOptions::default())
}

pub fn build_tir(p: &StorageParams, horizon: usize, rp: &ReserveProfile) -> Result<ModelInstance, BuildError> {
    build(Family::Tir, p, horizon, rp, &BuildOptions::default())
}

pub fn build_bof(p: &StorageParams, horizon: usize, rp: &ReserveProfile) -> Result<ModelInstance, BuildError> {
    build(Family::Bof, p, horizon, rp, &BuildOptions::default())
}

/// LP relaxation: binary marks dropped, `[0, 1]` bounds kept.
pub fn relax(m: &ModelInstance) -> ModelInstance {
    let mut r = m.relaxed();
    r.name = r.name.replace("-MIP", "-LP");
    r
}

/// Number of storage rows per period for `family` (without minimum-reserve
/// rows and initial-state window rows).
pub fn rows_per_period(family: Family) -> usize {
    match family {
        Family::Bo | Family::To => 5,
        Family::Bor => 11,
        Family::Tor => 13,
        Family::Bir => 9,
        Family::Tir => 11,
        Family::Bof => 9,
    }
}
