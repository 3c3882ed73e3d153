//! Random valid storage parameters with small denominators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formulations::{validate_params, Family, StorageParams};
use crate::numeric::Rational;

fn small(rng: &mut impl Rng, lo: i64, hi: i64) -> Rational {
    let d = rng.gen_range(1..=10);
    Rational::new(rng.gen_range(lo * d..=hi * d), d)
}

/// A share of `limit`: zero, the full limit, or `k/10` of it, so that the
/// boundary cases of each parameter rule come up regularly.
fn share(rng: &mut impl Rng, limit: &Rational) -> Rational {
    match rng.gen_range(0..10) {
        0 => Rational::zero(),
        1 | 2 => limit.clone(),
        _ => limit * &Rational::new(rng.gen_range(1..10), 10),
    }
}

/// Valid parameters for `family`. Drawn values have denominators at most 10;
/// capacities are shares of the limits the rules allow, including the limits
/// themselves.
pub fn random_params(family: Family, rng: &mut impl Rng) -> StorageParams {
    let mut p = StorageParams {
        eta_c: Rational::new(rng.gen_range(1..=10), 10),
        eta_d: Rational::new(rng.gen_range(1..=10), 10),
        delta_t: Rational::new(rng.gen_range(1..=4), 2),
        ..StorageParams::default()
    };
    if family.is_investment() {
        p.theta = Rational::new(rng.gen_range(0..10), 10);
        p.e0_installed = if rng.gen_bool(0.3) { Rational::zero() } else { small(rng, 0, 20) };
        p.e_invest_max = small(rng, 1, 40);
        let total_c = share(rng, &p.invest_charge_limit());
        p.pc0_installed = share(rng, &total_c);
        p.c_max = &total_c - &p.pc0_installed;
        let total_d = share(rng, &p.invest_discharge_limit());
        p.pd0_installed = share(rng, &total_d);
        p.d_max = &total_d - &p.pd0_installed;
        p.e_initial = &p.theta * &p.e0_installed;
    } else {
        p.e_min = small(rng, 0, 20);
        p.e_max = &p.e_min + &small(rng, 1, 40);
        p.p_c_max = share(rng, &p.charge_limit());
        p.p_d_max = share(rng, &p.discharge_limit());
        if family.has_reserves() {
            p.r_down = share(rng, &p.charge_limit());
            p.r_up = share(rng, &p.discharge_limit());
        }
        p.e_initial = p.e_min.clone();
    }
    debug_assert!(validate_params(&p, family).is_empty());
    p
}

/// `n` parameter sets from `seed`; the same seed always yields the same list.
pub fn random_params_batch(family: Family, n: usize, seed: u64) -> Vec<StorageParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_params(family, &mut rng)).collect()
}
