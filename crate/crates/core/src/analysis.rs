//! Whole-graph reports and seeded batch experiments, as used by the CLI.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cycles::systole;
use crate::entropy::{entropy_estimate_with_budget, EntropyFacts};
use crate::error::{Error, Result};
use crate::graph::generate;
use crate::report::InequalityReport;
use crate::stable_norm::{check_stable_inequalities_with, StableBallVolume, StableOptions, VolumeMethod};
use crate::sysvol::{bs_report, optimize_systolic_volume};
use crate::Graph;

/// Significant digits used for every printed real.
pub const SIGNIFICANT_DIGITS: usize = 12;
pub const CSV_SCHEMA: &str = "# schema=1";

/// Every inequality name a report may contain, in output order.
pub const CHECK_NAMES: [&str; 17] = [
    "thm1",
    "prop1",
    "lemma2",
    "prop2.lower",
    "prop2.upper",
    "prop3",
    "prop4.lower.literal",
    "prop4.upper.literal",
    "prop4.lower.maximal",
    "prop4.upper.maximal",
    "prop5.literal",
    "prop5.maximal",
    "thm2.lower",
    "thm2.upper",
    "thm3",
    "remark.regular",
    "bs",
];

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    /// Cutting-plane tolerance for the systolic optimiser.
    pub tolerance: f64,
    pub seed: u64,
    /// Monte-Carlo samples when the exact volume is out of reach.
    pub samples: usize,
    /// Radius for the ball-growth estimate; `None` means `25 / w_min`.
    pub r_max: Option<f64>,
    pub exact_only: bool,
    /// Run the ball-growth estimator.
    pub estimate: bool,
    /// Run the systolic optimiser and the lower-bound check.
    pub optimize: bool,
    /// Expansion-state cap for the estimator.
    pub frontier_budget: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            tolerance: crate::sysvol::DEFAULT_TOLERANCE,
            seed: 0,
            samples: 1_000_000,
            r_max: None,
            exact_only: false,
            estimate: true,
            optimize: true,
            frontier_budget: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub vertices: usize,
    pub edges: usize,
    pub betti: usize,
    pub volume: f64,
    pub valence_min: usize,
    pub valence_max: usize,
    /// `None` for a tree: the systole is infinite.
    pub systole: Option<f64>,
    pub systole_cycle: Vec<String>,
    pub h_vol: f64,
    pub h_vol_estimate: Option<f64>,
    pub residual: Option<f64>,
    pub r_max: Option<f64>,
    pub estimate_note: Option<String>,
    pub c_min_literal: Option<f64>,
    pub c_min_maximal: Option<f64>,
    pub c_max: Option<f64>,
    pub stable_ball_volume: Option<f64>,
    pub method: Option<VolumeMethod>,
    pub ci99: Option<[f64; 2]>,
    pub stable_degenerate: bool,
    pub sigma: Option<f64>,
    pub sigma_weights: Option<Vec<(String, f64)>>,
    pub checks: Vec<InequalityReport>,
}

impl Analysis {
    pub fn violations(&self) -> usize {
        self.checks.iter().filter(|r| r.violated()).count()
    }

    pub fn check(&self, name: &str) -> Option<&InequalityReport> {
        self.checks.iter().find(|r| r.name == name)
    }

    /// JSON with reals rounded to [`SIGNIFICANT_DIGITS`] and an infinite
    /// systole written as `"inf"`.
    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("analysis serializes");
        if self.systole.is_none() {
            v["systole"] = json!("inf");
        }
        if let Some(weights) = &self.sigma_weights {
            v["sigma_weights"] = weights.iter().map(|(id, w)| (id.clone(), json!(w))).collect();
        }
        round_json(&mut v);
        v
    }
}

pub fn analyze(g: &Graph, opts: &AnalysisOptions) -> Result<Analysis> {
    g.require_connected()?;
    let betti = g.betti_number();
    let profile = g.valence_profile();
    let mut checks = Vec::new();

    let (h_vol, sys, cycle) = if betti >= 1 {
        let facts = EntropyFacts::compute(g)?;
        checks.extend(facts.reports(g));
        (facts.entropy, Some(facts.systole.length), facts.systole.edge_ids(g))
    } else {
        (0.0, None, Vec::new())
    };

    let mut analysis = Analysis {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        betti,
        volume: g.volume(),
        valence_min: profile.min,
        valence_max: profile.max,
        systole: sys,
        systole_cycle: cycle,
        h_vol,
        h_vol_estimate: None,
        residual: None,
        r_max: None,
        estimate_note: None,
        c_min_literal: g.c_min_literal(),
        c_min_maximal: g.c_min_maximal(),
        c_max: g.c_max(),
        stable_ball_volume: None,
        method: None,
        ci99: None,
        stable_degenerate: false,
        sigma: None,
        sigma_weights: None,
        checks: Vec::new(),
    };

    if opts.estimate {
        if let Some(w_min) = g.min_weight() {
            let r_max = opts.r_max.unwrap_or(25.0 / w_min);
            analysis.r_max = Some(r_max);
            match entropy_estimate_with_budget(g, 0, r_max, opts.frontier_budget) {
                Ok(est) => {
                    analysis.h_vol_estimate = Some(est.slope);
                    analysis.residual = Some(est.residual);
                    if est.degenerate {
                        analysis.estimate_note = Some("b < 2: no exponential growth".into());
                    }
                }
                Err(Error::FrontierBudgetExceeded(n)) => {
                    analysis.estimate_note = Some(format!("skipped: more than {n} expansion states"));
                }
                Err(e) => return Err(e),
            }
        }
    }

    if betti == 0 {
        let point = StableBallVolume::<f64>::point();
        record_volume(&mut analysis, &point);
    } else {
        let stable_opts = StableOptions {
            samples: opts.samples,
            seed: opts.seed,
            exact_only: opts.exact_only,
        };
        let (reports, vol) = check_stable_inequalities_with(g, &stable_opts)?;
        checks.extend(reports);
        if let Some(vol) = vol {
            record_volume(&mut analysis, &vol);
        }
        if opts.optimize {
            let opt = optimize_systolic_volume(g, opts.tolerance)?;
            checks.push(bs_report(g, &opt));
            analysis.sigma = Some(opt.sigma);
            analysis.sigma_weights = Some(g.edges().iter().map(|e| e.id.clone()).zip(opt.weights).collect());
        }
    }
    analysis.checks = checks;
    Ok(analysis)
}

fn record_volume(a: &mut Analysis, v: &StableBallVolume<f64>) {
    a.stable_ball_volume = Some(v.value);
    a.method = Some(v.method);
    a.ci99 = v.ci99.map(|(lo, hi)| [lo, hi]);
    a.stable_degenerate = v.degenerate;
}

/// Random corpus families for batch runs.
#[derive(Debug, Clone, PartialEq)]
pub enum BatchKind {
    RandomWeighted { betti: (usize, usize), weight: (f64, f64) },
    /// Unit weights; `n` drawn from the range with `n * v` even and `v < n`.
    RandomRegular { n: (usize, usize), valences: Vec<usize> },
}

impl BatchKind {
    pub fn name(&self) -> &'static str {
        match self {
            BatchKind::RandomWeighted { .. } => "random-weighted",
            BatchKind::RandomRegular { .. } => "random-regular",
        }
    }
}

/// Seed of instance `index`, independent of how instances are scheduled.
pub fn instance_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.random()
}

pub fn batch_instance(kind: &BatchKind, seed: u64) -> Result<Graph> {
    match kind {
        BatchKind::RandomWeighted { betti, weight } => generate::random_weighted(*betti, *weight, seed),
        BatchKind::RandomRegular { n, valences } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if valences.is_empty() {
                return Err(Error::InfeasibleParameters("no valences given".into()));
            }
            let v = valences[rng.random_range(0..valences.len())];
            let sizes: Vec<usize> = (n.0..=n.1).filter(|&k| k > v && (k * v) % 2 == 0).collect();
            if sizes.is_empty() {
                return Err(Error::InfeasibleParameters(format!(
                    "no size in {}..={} admits a {v}-regular graph",
                    n.0, n.1
                )));
            }
            let size = sizes[rng.random_range(0..sizes.len())];
            generate::random_regular(size, v, rng.random())
        }
    }
}

#[derive(Debug, Clone)]
pub struct BatchRow {
    pub index: usize,
    pub seed: u64,
    pub graph: Graph,
    pub analysis: Analysis,
}

impl BatchRow {
    pub fn csv_fields(&self) -> Vec<String> {
        let a = &self.analysis;
        let opt = |x: Option<f64>| x.map(fmt_real).unwrap_or_default();
        let mut fields = vec![
            self.index.to_string(),
            self.seed.to_string(),
            a.vertices.to_string(),
            a.edges.to_string(),
            a.betti.to_string(),
            fmt_real(a.volume),
            a.systole.map(fmt_real).unwrap_or_else(|| "inf".into()),
            fmt_real(a.h_vol),
            opt(a.systole.map(|s| s * a.h_vol)),
            opt(a.c_min_literal),
            opt(a.c_min_maximal),
            opt(a.c_max),
            opt(a.stable_ball_volume),
            match a.method {
                Some(VolumeMethod::Exact) => "exact".into(),
                Some(VolumeMethod::MonteCarlo) => "monte-carlo".into(),
                None => String::new(),
            },
            opt(a.sigma),
        ];
        for name in CHECK_NAMES {
            fields.push(opt(a.check(name).and_then(|r| r.slack)));
        }
        fields.push(a.violations().to_string());
        fields
    }
}

pub fn csv_header() -> Vec<String> {
    let mut cols: Vec<String> = [
        "index",
        "seed",
        "vertices",
        "edges",
        "betti",
        "volume",
        "systole",
        "h_vol",
        "h_sys",
        "c_min_literal",
        "c_min_maximal",
        "c_max",
        "stable_ball_volume",
        "method",
        "sigma",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend(CHECK_NAMES.iter().map(|n| format!("slack_{}", n.replace('.', "_"))));
    cols.push("violations".into());
    cols
}

/// Generates and analyses `count` instances in parallel; rows come back in
/// instance order.
pub fn run_batch(kind: &BatchKind, count: usize, seed: u64, opts: &AnalysisOptions) -> Result<Vec<BatchRow>> {
    (0..count)
        .into_par_iter()
        .map(|index| {
            let s = instance_seed(seed, index);
            let graph = batch_instance(kind, s)?;
            let analysis = analyze(&graph, opts)?;
            Ok(BatchRow {
                index,
                seed: s,
                graph,
                analysis,
            })
        })
        .collect()
}

pub fn write_csv(rows: &[BatchRow], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_SCHEMA}")?;
    writeln!(out, "{}", csv_header().join(","))?;
    for row in rows {
        writeln!(out, "{}", row.csv_fields().join(","))?;
    }
    Ok(())
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

/// A real with at most 12 significant digits; `inf`, `-inf` and `nan` spelled out.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let r = round_sig(x);
        if r != 0.0 && (r.abs() < 1e-4 || r.abs() >= 1e15) {
            format!("{r:e}")
        } else {
            format!("{r}")
        }
    }
}

/// Rounds every float in a JSON tree in place.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = json!(round_sig(x));
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Systole of `g`, infinite for trees.
pub fn systole_or_inf(g: &Graph) -> Result<f64> {
    match systole(g) {
        Ok(c) => Ok(c.length),
        Err(Error::NoCycle) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> AnalysisOptions {
        AnalysisOptions {
            estimate: false,
            samples: 20_000,
            ..AnalysisOptions::default()
        }
    }

    #[test]
    fn theta_report() {
        let g = generate::theta(&[1.0; 3]).unwrap();
        let a = analyze(&g, &AnalysisOptions::default()).unwrap();
        assert_eq!(a.betti, 2);
        assert_eq!(a.systole, Some(2.0));
        assert!((a.h_vol - 2f64.ln()).abs() < 1e-10);
        assert!((a.h_vol_estimate.unwrap() - 2f64.ln()).abs() < 0.02);
        let thm1 = a.check("thm1").unwrap();
        assert!((thm1.right.unwrap() - 2.0 * 63f64.ln()).abs() < 1e-12);
        assert!((a.sigma.unwrap() - 1.5).abs() < 1e-6);
        assert_eq!(a.violations(), 0);
        let json = a.to_json();
        assert_eq!(json["betti"], 2);
        assert_eq!(json["method"], "exact");
        assert_eq!(json["sigma_weights"]["e0"], 0.5);
    }

    #[test]
    fn tree_report() {
        let g = generate::random_weighted::<f64>((0, 0), (1.0, 2.0), 3).unwrap();
        let a = analyze(&g, &quick()).unwrap();
        assert_eq!(a.systole, None);
        assert!(a.checks.is_empty() && a.stable_degenerate);
        assert_eq!(a.to_json()["systole"], "inf");
        assert_eq!(systole_or_inf(&g).unwrap(), f64::INFINITY);
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt_real(std::f64::consts::LN_2), "0.69314718056");
        assert_eq!(fmt_real(1.5), "1.5");
        assert_eq!(fmt_real(f64::INFINITY), "inf");
        assert_eq!(fmt_real(123456789012345.0), "123456789012000");
        assert_eq!(fmt_real(-9.547918011776346e-15), "-9.54791801178e-15");
        assert_eq!(fmt_real(2e15), "2e15");
        let mut v = json!({"a": [0.1234567890123456, 2], "b": 1.0});
        round_json(&mut v);
        assert_eq!(v, json!({"a": [0.123456789012, 2], "b": 1.0}));
    }

    #[test]
    fn batch_is_reproducible_and_ordered() {
        let kind = BatchKind::RandomWeighted {
            betti: (1, 4),
            weight: (0.1, 10.0),
        };
        let a = run_batch(&kind, 6, 9, &quick()).unwrap();
        let b = run_batch(&kind, 6, 9, &quick()).unwrap();
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        write_csv(&a, &mut ca).unwrap();
        write_csv(&b, &mut cb).unwrap();
        assert_eq!(ca, cb);
        let text = String::from_utf8(ca).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# schema=1");
        assert_eq!(lines.len(), 8);
        let width = csv_header().len();
        assert!(lines[1..].iter().all(|l| l.split(',').count() == width));
        assert!(a.iter().enumerate().all(|(i, r)| r.index == i));
    }

    #[test]
    fn empty_batch_has_header() {
        let kind = BatchKind::RandomRegular {
            n: (4, 8),
            valences: vec![3],
        };
        let mut out = Vec::new();
        write_csv(&run_batch(&kind, 0, 1, &quick()).unwrap(), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 2);
    }

    #[test]
    fn regular_instances() {
        let kind = BatchKind::RandomRegular {
            n: (4, 12),
            valences: vec![3, 4, 5],
        };
        for i in 0..20 {
            let g = batch_instance(&kind, instance_seed(5, i)).unwrap();
            assert!(g.valence_profile().is_regular() && g.is_unit_weighted() && g.is_connected());
        }
        let bad = BatchKind::RandomRegular {
            n: (3, 3),
            valences: vec![3],
        };
        assert!(matches!(batch_instance(&bad, 0), Err(Error::InfeasibleParameters(_))));
    }
}
