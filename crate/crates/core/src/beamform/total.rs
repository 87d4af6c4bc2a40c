//! Designs under the total power constraint `‖w‖² ≤ P_T`.

use serde::{Deserialize, Serialize};

use super::{Beamformer, Design, Method};
use crate::channel::{secrecy_rate, ChannelRealization};
use crate::error::{Error, Result};
use crate::linalg::{gen_eig_max, herm_eig, null_space_basis, CMatrix, CVector};

/// Generalized eigenvalues this close to 1 are rounding noise.
const UNIT_RATIO_TOL: f64 = 1e-12;

fn check_power(p_t: f64) -> Result<()> {
    if !(p_t > 0.0 && p_t.is_finite()) {
        return Err(Error::invalid(
            "p_t",
            format!("total power {p_t} is not positive"),
        ));
    }
    Ok(())
}

/// Optimal weights under the total power budget.
///
/// The secrecy ratio is a generalized Rayleigh quotient of
/// `(N0 I + P_T h h†, N0 I + P_T z z†)` on the sphere `‖w‖² = P_T`, so the
/// optimum is the top generalized eigenvector scaled to full power and the
/// rate is `log2 λ_max`. When `λ_max ≤ 1` (up to rounding) no positive rate
/// exists and the zero beamformer is returned.
pub fn solve_total(ch: &ChannelRealization, p_t: f64) -> Result<Design> {
    check_power(p_t)?;
    let (lambda, u) = total_eigenpair(ch, p_t)?;
    if lambda <= 1.0 + UNIT_RATIO_TOL {
        return Ok(Design {
            beamformer: Beamformer::zero(ch.relays(), Method::Total),
            rate: 0.0,
        });
    }
    let w = u.scale_real(p_t.sqrt() / u.norm());
    Ok(Design {
        beamformer: Beamformer::new(ch, w, Method::Total),
        rate: lambda.log2(),
    })
}

/// `λ_max` and unit eigenvector of the total-power matrix pair.
pub fn total_eigenpair(ch: &ChannelRealization, p_t: f64) -> Result<(f64, CVector)> {
    let m = ch.relays();
    let n0 = ch.noise_rx;
    let a = ch.h.outer().scale(p_t).shift_diag(n0);
    let b = ch.z.outer().scale(p_t).shift_diag(n0);
    debug_assert_eq!(a.rows(), m);
    Ok(gen_eig_max(&a, &b)?)
}

/// Null-space beamforming: the best full-power beam with `z† w = 0`.
///
/// `w ∝ H H† h` where the columns of `H` span the null space of `z†`; the
/// rate is `log2(1 + P_T ‖H† h‖² / N0)`. With `z = 0` the whole space is
/// available and the beam is matched to `h`.
pub fn solve_null_space(ch: &ChannelRealization, p_t: f64) -> Result<Design> {
    check_power(p_t)?;
    let m = ch.relays();
    let projected = if ch.z.is_zero() {
        ch.h.clone()
    } else {
        let basis = null_space_basis(&ch.z)?;
        basis.matvec(&basis.adjoint_matvec(&ch.h))
    };
    // ‖H H† h‖² = h† H H† h since H H† is an orthogonal projector.
    let gain = projected.norm_sqr();
    if gain <= 1e-24 * ch.h.norm_sqr() || gain == 0.0 {
        return Ok(Design {
            beamformer: Beamformer::zero(m, Method::NullSpace),
            rate: 0.0,
        });
    }
    let w = projected.scale_real((p_t / gain).sqrt());
    Ok(Design {
        beamformer: Beamformer::new(ch, w, Method::NullSpace),
        rate: (p_t * gain / ch.noise_rx).ln_1p() / std::f64::consts::LN_2,
    })
}

/// Low-SNR design with its first-order rate approximation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowSnrDesign {
    pub design: Design,
    /// Top eigenvalue of `h h† − z z†`.
    pub lambda_max: f64,
    /// `P_T λ_max / (N0 ln 2)`, the small-power expansion of the optimal rate.
    pub approx_rate: f64,
}

/// Full-power beam along the top eigenvector of `h h† − z z†`.
pub fn solve_low_snr(ch: &ChannelRealization, p_t: f64) -> Result<LowSnrDesign> {
    check_power(p_t)?;
    let m = ch.relays();
    let diff: CMatrix = ch.h.outer().sub(&ch.z.outer());
    let eig = herm_eig(&diff)?;
    let lambda = eig.values[0];
    if lambda <= UNIT_RATIO_TOL * diff.norm() {
        return Ok(LowSnrDesign {
            design: Design {
                beamformer: Beamformer::zero(m, Method::LowSnr),
                rate: 0.0,
            },
            lambda_max: lambda.max(0.0),
            approx_rate: 0.0,
        });
    }
    let w = eig.vectors[0].scale_real(p_t.sqrt());
    let rate = secrecy_rate(ch, &w)?;
    Ok(LowSnrDesign {
        design: Design {
            beamformer: Beamformer::new(ch, w, Method::LowSnr),
            rate,
        },
        lambda_max: lambda,
        approx_rate: p_t * lambda / ch.noise_rx / std::f64::consts::LN_2,
    })
}
