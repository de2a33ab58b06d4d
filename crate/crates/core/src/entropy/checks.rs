use serde_json::json;

use super::volume_entropy;
use crate::cycles::{detect_systolic_basis, systole, CycleWitness, SystolicBasis};
use crate::error::{Error, Result};
use crate::graph::{ValenceProfile, WeightedMultigraph};
use crate::report::{InequalityReport, Provenance, Sense};
use crate::scalar::Scalar;

/// Invariants shared by the entropy inequalities, computed once.
#[derive(Debug, Clone)]
pub struct EntropyFacts<T> {
    pub betti: usize,
    pub entropy: T,
    pub systole: CycleWitness<T>,
    pub valence: ValenceProfile,
    pub unit_weights: bool,
    pub c_min_literal: T,
    pub c_min_maximal: T,
    pub c_max: T,
    pub systolic_basis: SystolicBasis<T>,
}

impl<T: Scalar> EntropyFacts<T> {
    pub fn compute(g: &WeightedMultigraph<T>) -> Result<Self> {
        g.require_connected()?;
        let betti = g.betti_number();
        if betti == 0 {
            return Err(Error::NoCycle);
        }
        Ok(Self {
            betti,
            entropy: volume_entropy(g)?,
            systole: systole(g)?,
            valence: g.valence_profile(),
            unit_weights: g.is_unit_weighted(),
            c_min_literal: g.c_min_literal().expect("b >= 1 implies an edge"),
            c_min_maximal: g.c_min_maximal().expect("b >= 1 implies an edge"),
            c_max: g.c_max().expect("b >= 1 implies an edge"),
            systolic_basis: detect_systolic_basis(g)?,
        })
    }

    pub fn reports(&self, g: &WeightedMultigraph<T>) -> Vec<InequalityReport> {
        let b = self.betti as f64;
        let h = self.entropy.to_f64_lossy();
        let sys = self.systole.length.to_f64_lossy();
        let ln2 = std::f64::consts::LN_2;
        let (delta_min, delta_max) = (self.valence.min, self.valence.max);
        let mut out = Vec::new();

        let thm1 = "h * sys <= 2 ln(8 b^3 - 1)";
        out.push(
            InequalityReport::evaluate("thm1", thm1, Sense::Upper, h * sys, 2.0 * (8.0 * b.powi(3) - 1.0).ln(), Provenance::Exact)
                .with_witnesses(json!({ "systole_cycle": self.systole.edge_ids(g) })),
        );

        let regular_unit = self.unit_weights && self.valence.is_regular();
        let prop1 = "h * sys <= 3 ln b (regular, unit weights)";
        out.push(if regular_unit {
            InequalityReport::evaluate("prop1", prop1, Sense::Upper, h * sys, 3.0 * b.ln(), Provenance::Exact)
        } else {
            InequalityReport::not_applicable("prop1", prop1, Sense::Upper, "requires a regular unit-weight graph")
        });

        let lemma2 = "sys <= 3 ln b / ln(v - 1) (regular, unit weights, b > 1, sys > 1)";
        out.push(if regular_unit && self.betti > 1 && sys > 1.0 && delta_max >= 3 {
            let v = delta_max as f64;
            InequalityReport::evaluate("lemma2", lemma2, Sense::Upper, sys, 3.0 * b.ln() / (v - 1.0).ln(), Provenance::Exact)
        } else {
            InequalityReport::not_applicable(
                "lemma2",
                lemma2,
                Sense::Upper,
                "requires a regular unit-weight graph with b > 1 and sys > 1",
            )
        });

        let p2l = "ln(delta - 1) <= h (unit weights, min valence >= 2)";
        let p2u = "h <= ln(Delta - 1) (unit weights, min valence >= 2)";
        if self.unit_weights && delta_min >= 2 {
            out.push(InequalityReport::evaluate(
                "prop2.lower",
                p2l,
                Sense::Lower,
                h,
                (delta_min as f64 - 1.0).ln(),
                Provenance::Exact,
            ));
            out.push(InequalityReport::evaluate(
                "prop2.upper",
                p2u,
                Sense::Upper,
                h,
                (delta_max as f64 - 1.0).ln(),
                Provenance::Exact,
            ));
        } else {
            let why = "requires unit weights and every valence >= 2";
            out.push(InequalityReport::not_applicable("prop2.lower", p2l, Sense::Lower, why));
            out.push(InequalityReport::not_applicable("prop2.upper", p2u, Sense::Upper, why));
        }

        let prop3 = "h * sys >= ln(2b - 1) (systolic basis)";
        out.push(match &self.systolic_basis {
            SystolicBasis::Found { base, cycles } => InequalityReport::evaluate(
                "prop3",
                prop3,
                Sense::Lower,
                h * sys,
                (2.0 * b - 1.0).ln(),
                Provenance::Exact,
            )
            .with_reason("systolic basis homology-certified (rank over Q), not pi_1-certified")
            .with_witnesses(json!({
                "base": g.vertex_ids()[*base],
                "cycles": cycles.iter().map(|c| c.edge_ids(g)).collect::<Vec<_>>(),
            })),
            SystolicBasis::NotFound => {
                InequalityReport::not_applicable("prop3", prop3, Sense::Lower, "no systolic basis found")
            }
            SystolicBasis::Inconclusive => InequalityReport::not_applicable(
                "prop3",
                prop3,
                Sense::Lower,
                "systolic basis search inconclusive (enumeration cap)",
            ),
        });

        let c_max = self.c_max.to_f64_lossy();
        let readings = [
            ("literal", self.c_min_literal.to_f64_lossy()),
            ("maximal", self.c_min_maximal.to_f64_lossy()),
        ];
        let trivalent = delta_max <= 3 && delta_min >= 2;
        for (reading, c_min) in readings {
            let lower = format!("prop4.lower.{reading}");
            let upper = format!("prop4.upper.{reading}");
            let sl = "ln 2 / C_max <= h (valences in [2, 3], b >= 2)";
            let su = "h <= ln 2 / C_min (valences in [2, 3], b >= 2)";
            if trivalent && self.betti >= 2 {
                out.push(InequalityReport::evaluate(&lower, sl, Sense::Lower, h, ln2 / c_max, Provenance::Exact));
                out.push(InequalityReport::evaluate(&upper, su, Sense::Upper, h, ln2 / c_min, Provenance::Exact));
            } else {
                let why = if self.betti < 2 && trivalent {
                    "b < 2: pure circle, lower bound degenerates (h = 0)"
                } else {
                    "requires every valence in [2, 3] and b >= 2"
                };
                out.push(InequalityReport::not_applicable(&lower, sl, Sense::Lower, why));
                out.push(InequalityReport::not_applicable(&upper, su, Sense::Upper, why));
            }
        }
        for (reading, c_min) in readings {
            out.push(InequalityReport::evaluate(
                format!("prop5.{reading}"),
                "h * C_min <= ln(2b - 1)",
                Sense::Upper,
                h * c_min,
                (2.0 * b - 1.0).ln(),
                Provenance::Exact,
            ));
        }
        out
    }
}

/// Evaluates every entropy inequality on `g` (connected, b >= 1).
pub fn check_entropy_inequalities<T: Scalar>(g: &WeightedMultigraph<T>) -> Result<Vec<InequalityReport>> {
    Ok(EntropyFacts::compute(g)?.reports(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate;

    fn find<'a>(r: &'a [InequalityReport], name: &str) -> &'a InequalityReport {
        r.iter().find(|x| x.name == name).unwrap()
    }

    #[test]
    fn bouquet_four() {
        let g = generate::unit_bouquet::<f64>(4).unwrap();
        let r = check_entropy_inequalities(&g).unwrap();
        let thm1 = find(&r, "thm1");
        assert!((thm1.left.unwrap() - 7f64.ln()).abs() < 1e-9);
        assert!((thm1.right.unwrap() - 2.0 * 511f64.ln()).abs() < 1e-12);
        assert!(thm1.slack.unwrap() > 0.0);
        let p3 = find(&r, "prop3");
        assert!(p3.applicable && p3.equality);
        assert!(find(&r, "prop5.literal").equality);
        assert!(r.iter().all(|x| !x.violated()));
    }

    #[test]
    fn k4_regular_bound() {
        let g = generate::complete::<f64>(4).unwrap();
        let r = check_entropy_inequalities(&g).unwrap();
        let p1 = find(&r, "prop1");
        assert!((p1.left.unwrap() - 3.0 * 2f64.ln()).abs() < 1e-9);
        assert!((p1.right.unwrap() - 3.0 * 3f64.ln()).abs() < 1e-12);
        assert!(r.iter().all(|x| !x.violated()));
    }

    #[test]
    fn theta_valence_bounds_are_tight() {
        let g = generate::theta(&[1.0f64; 3]).unwrap();
        let r = check_entropy_inequalities(&g).unwrap();
        assert!(find(&r, "prop2.lower").equality);
        assert!(find(&r, "prop2.upper").equality);
        assert!(find(&r, "prop4.lower.literal").equality);
    }

    #[test]
    fn weighted_graph_gates() {
        let g = generate::bouquet(&[1.0f64, 2.0]).unwrap();
        let r = check_entropy_inequalities(&g).unwrap();
        assert!(!find(&r, "prop1").applicable);
        assert!(!find(&r, "prop2.lower").applicable);
        assert!(!find(&r, "prop3").applicable);
        assert!(!find(&r, "prop4.lower.literal").applicable);
        assert!(r.iter().all(|x| !x.violated()));
    }

    #[test]
    fn circle_chain_bounds_are_gated() {
        let g = generate::cycle::<f64>(4).unwrap();
        let r = check_entropy_inequalities(&g).unwrap();
        let p4 = find(&r, "prop4.lower.literal");
        assert!(!p4.applicable);
        assert!(p4.reason.as_deref().unwrap().contains("circle"));
    }
}
