//! Per-relay feasible scaling of the total-power optimum.

use super::PowerBudget;
use crate::beamform::{solve_total, Beamformer, Design, Method};
use crate::channel::{secrecy_rate, ChannelRealization};
use crate::error::Result;

/// `v = θ w_opt` with `w_opt` the total-power optimum at `P_T = Σ p_m` and
/// `θ = √p_k / |w_opt,k|`, `k = argmax_m |w_opt,m|²/p_m` (smallest index on
/// ties). The most overloaded relay ends exactly at its cap.
pub fn solve_suboptimal(ch: &ChannelRealization, budget: &PowerBudget) -> Result<Design> {
    budget.check(ch)?;
    let opt = solve_total(ch, budget.total())?;
    let w = opt.beamformer.w;
    let mut k = 0;
    let mut worst = 0.0;
    for (i, (c, p)) in w.iter().zip(budget.as_slice()).enumerate() {
        let load = c.norm_sqr() / p;
        if load > worst {
            worst = load;
            k = i;
        }
    }
    if worst == 0.0 {
        return Ok(Design {
            beamformer: Beamformer::zero(ch.relays(), Method::Suboptimal),
            rate: 0.0,
        });
    }
    let theta = budget.as_slice()[k].sqrt() / w[k].norm();
    let v = w.scale_real(theta);
    let rate = secrecy_rate(ch, &v)?;
    Ok(Design {
        beamformer: Beamformer::new(ch, v, Method::Suboptimal),
        rate,
    })
}
