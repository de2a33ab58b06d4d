use serde_json::json;

use super::{cross_polytope_volume, euclidean_ball_volume, stable_ball_volume, StableBallVolume, VolumeMethod};
use crate::error::{Error, Result};
use crate::graph::WeightedMultigraph;
use crate::report::{InequalityReport, Provenance, Sense};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StableOptions {
    pub samples: usize,
    pub seed: u64,
    /// Never fall back to sampling; oversized graphs report the checks as
    /// not applicable instead.
    pub exact_only: bool,
}

impl Default for StableOptions {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 0,
            exact_only: false,
        }
    }
}

pub fn check_stable_inequalities<T: Scalar>(g: &WeightedMultigraph<T>) -> Result<Vec<InequalityReport>> {
    check_stable_inequalities_with(g, &StableOptions::default()).map(|(r, _)| r)
}

/// The cross-polytope sandwich (unit weights), the Euclidean-ball lower bound and the
/// regular-graph lower bound, together with the volume they were evaluated on.
/// Sampled volumes only fail a bound that lies outside their 99% interval.
pub fn check_stable_inequalities_with<T: Scalar>(
    g: &WeightedMultigraph<T>,
    opts: &StableOptions,
) -> Result<(Vec<InequalityReport>, Option<StableBallVolume<T>>)> {
    g.require_connected()?;
    let b = g.betti_number();
    if b == 0 {
        return Err(Error::ZeroBetti);
    }
    let t2l = "(2^b / b!) (b / Vol)^b <= mu(B_st) (unit weights)";
    let t2u = "mu(B_st) <= 2^b / b! (unit weights)";
    let t3 = "mu_w(B_st) * Vol^(b/2) >= omega_b";
    let reg = "((v - 2) / v)^b 2^b / b! <= mu(B_st) (v-regular, unit weights)";

    let vol = match stable_ball_volume(g, opts.samples, opts.seed, opts.exact_only) {
        Ok(v) => v,
        Err(Error::SizeLimitExceeded { betti, hyperplanes }) => {
            let why = format!(
                "exact volume limited to b <= 8 and 20 hyperplanes (b = {betti}, hyperplanes = {hyperplanes}); sampling disabled"
            );
            return Ok((
                vec![
                    InequalityReport::not_applicable("thm2.lower", t2l, Sense::Lower, why.clone()),
                    InequalityReport::not_applicable("thm2.upper", t2u, Sense::Upper, why.clone()),
                    InequalityReport::not_applicable("thm3", t3, Sense::Lower, why.clone()),
                    InequalityReport::not_applicable("remark.regular", reg, Sense::Lower, why),
                ],
                None,
            ));
        }
        Err(e) => return Err(e),
    };

    let mu = vol.value.to_f64_lossy();
    let hw = vol.half_width.to_f64_lossy();
    let provenance = match vol.method {
        VolumeMethod::Exact => Provenance::Exact,
        VolumeMethod::MonteCarlo => Provenance::Mc,
    };
    let sampled = |r: InequalityReport, width: f64| match vol.method {
        VolumeMethod::Exact => r,
        VolumeMethod::MonteCarlo => r.with_uncertainty(width),
    };
    let total = g.volume().to_f64_lossy();
    let bf = b as f64;
    let cross: f64 = cross_polytope_volume(b);
    let unit = g.is_unit_weighted();
    let mut out = Vec::new();

    if unit {
        let lower = cross * (bf / total).powi(b as i32);
        out.push(sampled(
            InequalityReport::evaluate("thm2.lower", t2l, Sense::Lower, mu, lower, provenance),
            hw,
        ));
        out.push(sampled(
            InequalityReport::evaluate("thm2.upper", t2u, Sense::Upper, mu, cross, provenance),
            hw,
        ));
    } else {
        out.push(InequalityReport::not_applicable("thm2.lower", t2l, Sense::Lower, "requires unit weights"));
        out.push(InequalityReport::not_applicable("thm2.upper", t2u, Sense::Upper, "requires unit weights"));
    }

    let factor = total.powf(bf / 2.0);
    let omega: f64 = euclidean_ball_volume(b);
    out.push(
        sampled(
            InequalityReport::evaluate("thm3", t3, Sense::Lower, mu * factor, omega, provenance),
            hw * factor,
        )
        .with_witnesses(json!({ "measure": mu, "volume": total })),
    );

    let profile = g.valence_profile();
    if unit && profile.is_regular() {
        let v = profile.max as f64;
        let bound = ((v - 2.0) / v).powi(b as i32) * cross;
        out.push(sampled(
            InequalityReport::evaluate("remark.regular", reg, Sense::Lower, mu, bound, provenance),
            hw,
        ));
    } else {
        out.push(InequalityReport::not_applicable(
            "remark.regular",
            reg,
            Sense::Lower,
            "requires a regular unit-weight graph",
        ));
    }
    Ok((out, Some(vol)))
}
