//! Storage parameters, model families and parameter validation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::numeric::Rational;

/// Every storage parameter symbol. Missing JSON keys default to zero, except
/// efficiencies and the period length, which default to one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StorageParams {
    #[serde(rename = "E_min")]
    pub e_min: Rational,
    #[serde(rename = "E_max")]
    pub e_max: Rational,
    #[serde(rename = "P_C_max")]
    pub p_c_max: Rational,
    #[serde(rename = "P_D_max")]
    pub p_d_max: Rational,
    #[serde(rename = "eta_C")]
    pub eta_c: Rational,
    #[serde(rename = "eta_D")]
    pub eta_d: Rational,
    pub delta_t: Rational,
    #[serde(rename = "R_up")]
    pub r_up: Rational,
    #[serde(rename = "R_down")]
    pub r_down: Rational,
    #[serde(rename = "E0_installed")]
    pub e0_installed: Rational,
    #[serde(rename = "PC0_installed")]
    pub pc0_installed: Rational,
    #[serde(rename = "PD0_installed")]
    pub pd0_installed: Rational,
    #[serde(rename = "C_max")]
    pub c_max: Rational,
    #[serde(rename = "D_max")]
    pub d_max: Rational,
    #[serde(rename = "E_invest_max")]
    pub e_invest_max: Rational,
    pub theta: Rational,
    pub e_initial: Rational,
}

impl StorageParams {
    pub fn from_json(s: &str) -> Result<StorageParams, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }

    /// `(E_max - E_min) / (eta_C * delta_t)`: the largest charge power that
    /// fits the usable energy range in one period.
    pub fn charge_limit(&self) -> Rational {
        &(&self.e_max - &self.e_min) / &(&self.eta_c * &self.delta_t)
    }

    /// `eta_D * (E_max - E_min) / delta_t`.
    pub fn discharge_limit(&self) -> Rational {
        &(&self.eta_d * &(&self.e_max - &self.e_min)) / &self.delta_t
    }

    /// `(E0_installed + E_invest_max) * (1 - theta) / (eta_C * delta_t)`.
    pub fn invest_charge_limit(&self) -> Rational {
        let usable = &(&self.e0_installed + &self.e_invest_max) * &(&Rational::one() - &self.theta);
        &usable / &(&self.eta_c * &self.delta_t)
    }

    /// `eta_D * (E0_installed + E_invest_max) * (1 - theta) / delta_t`.
    pub fn invest_discharge_limit(&self) -> Rational {
        let usable = &(&self.e0_installed + &self.e_invest_max) * &(&Rational::one() - &self.theta);
        &(&self.eta_d * &usable) / &self.delta_t
    }
}

impl Default for StorageParams {
    fn default() -> Self {
        let z = Rational::zero;
        StorageParams {
            e_min: z(),
            e_max: z(),
            p_c_max: z(),
            p_d_max: z(),
            eta_c: Rational::one(),
            eta_d: Rational::one(),
            delta_t: Rational::one(),
            r_up: z(),
            r_down: z(),
            e0_installed: z(),
            pc0_installed: z(),
            pd0_installed: z(),
            c_max: z(),
            d_max: z(),
            e_invest_max: z(),
            theta: z(),
            e_initial: z(),
        }
    }
}

/// The storage model families. Each basic family has a tight counterpart
/// except the flexible-reserve one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Bo,
    To,
    Bor,
    Tor,
    Bir,
    Tir,
    Bof,
}

impl Family {
    pub const ALL: [Family; 7] = [Family::Bo, Family::To, Family::Bor, Family::Tor, Family::Bir, Family::Tir, Family::Bof];

    pub fn name(self) -> &'static str {
        match self {
            Family::Bo => "BO",
            Family::To => "TO",
            Family::Bor => "BOR",
            Family::Tor => "TOR",
            Family::Bir => "BIR",
            Family::Tir => "TIR",
            Family::Bof => "BOF",
        }
    }

    pub fn has_reserves(self) -> bool {
        !matches!(self, Family::Bo | Family::To)
    }

    pub fn is_investment(self) -> bool {
        matches!(self, Family::Bir | Family::Tir)
    }

    pub fn is_tight(self) -> bool {
        matches!(self, Family::To | Family::Tor | Family::Tir)
    }

    /// `(basic, tight)` pair for families with a tight counterpart.
    pub fn pair(self) -> Option<(Family, Family)> {
        match self {
            Family::Bo | Family::To => Some((Family::Bo, Family::To)),
            Family::Bor | Family::Tor => Some((Family::Bor, Family::Tor)),
            Family::Bir | Family::Tir => Some((Family::Bir, Family::Tir)),
            Family::Bof => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown model family `{s}`"))
    }
}

/// A failed parameter inequality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// JSON key of the offending parameter.
    pub parameter: &'static str,
    /// The required inequality in symbols.
    pub rule: &'static str,
    /// The inequality evaluated at the given values.
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} violated ({})", self.parameter, self.rule, self.detail)
    }
}

/// All parameter inequalities the family relies on that fail for `p`.
/// An empty list means the parameters are valid for the family.
pub fn validate_params(p: &StorageParams, family: Family) -> Vec<Violation> {
    let mut out = Vec::new();
    let zero = Rational::zero();
    let one = Rational::one();
    let mut need = |ok: bool, parameter: &'static str, rule: &'static str, detail: String| {
        if !ok {
            out.push(Violation { parameter, rule, detail });
        }
    };
    need(p.eta_c.is_positive() && p.eta_c <= one, "eta_C", "0 < eta_C <= 1", format!("eta_C = {}", p.eta_c));
    need(p.eta_d.is_positive() && p.eta_d <= one, "eta_D", "0 < eta_D <= 1", format!("eta_D = {}", p.eta_d));
    need(p.delta_t.is_positive(), "delta_t", "delta_t > 0", format!("delta_t = {}", p.delta_t));
    if !(p.eta_c.is_positive() && p.eta_d.is_positive() && p.delta_t.is_positive()) {
        return out;
    }
    if family.is_investment() {
        need(zero <= p.theta && p.theta < one, "theta", "0 <= theta < 1", format!("theta = {}", p.theta));
        for (v, name, rule) in [
            (&p.e0_installed, "E0_installed", "E0_installed >= 0"),
            (&p.pc0_installed, "PC0_installed", "PC0_installed >= 0"),
            (&p.pd0_installed, "PD0_installed", "PD0_installed >= 0"),
            (&p.c_max, "C_max", "C_max >= 0"),
            (&p.d_max, "D_max", "D_max >= 0"),
            (&p.e_invest_max, "E_invest_max", "E_invest_max >= 0"),
        ] {
            need(!v.is_negative(), name, rule, format!("{name} = {v}"));
        }
        let lc = p.invest_charge_limit();
        let total_c = &p.pc0_installed + &p.c_max;
        need(
            total_c <= lc,
            "C_max",
            "PC0_installed + C_max <= (E0_installed + E_invest_max)(1 - theta)/(eta_C delta_t)",
            format!("{total_c} > {lc}"),
        );
        let ld = p.invest_discharge_limit();
        let total_d = &p.pd0_installed + &p.d_max;
        need(
            total_d <= ld,
            "D_max",
            "PD0_installed + D_max <= eta_D (E0_installed + E_invest_max)(1 - theta)/delta_t",
            format!("{total_d} > {ld}"),
        );
        return out;
    }
    need(!p.e_min.is_negative(), "E_min", "E_min >= 0", format!("E_min = {}", p.e_min));
    need(p.e_max > p.e_min, "E_max", "E_max > E_min", format!("E_max = {}, E_min = {}", p.e_max, p.e_min));
    need(!p.p_c_max.is_negative(), "P_C_max", "P_C_max >= 0", format!("P_C_max = {}", p.p_c_max));
    need(!p.p_d_max.is_negative(), "P_D_max", "P_D_max >= 0", format!("P_D_max = {}", p.p_d_max));
    let (lc, ld) = (p.charge_limit(), p.discharge_limit());
    need(
        p.p_c_max <= lc,
        "P_C_max",
        "P_C_max <= (E_max - E_min)/(eta_C delta_t)",
        format!("{} > {}", p.p_c_max, lc),
    );
    need(
        p.p_d_max <= ld,
        "P_D_max",
        "P_D_max <= eta_D (E_max - E_min)/delta_t",
        format!("{} > {}", p.p_d_max, ld),
    );
    if family.has_reserves() {
        need(!p.r_up.is_negative(), "R_up", "R_up >= 0", format!("R_up = {}", p.r_up));
        need(!p.r_down.is_negative(), "R_down", "R_down >= 0", format!("R_down = {}", p.r_down));
        need(p.r_down <= lc, "R_down", "R_down <= (E_max - E_min)/(eta_C delta_t)", format!("{} > {}", p.r_down, lc));
        need(p.r_up <= ld, "R_up", "R_up <= eta_D (E_max - E_min)/delta_t", format!("{} > {}", p.r_up, ld));
    }
    out
}
