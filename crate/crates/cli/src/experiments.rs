//! Deterministic experiment runner shared by the `bench` subcommand and the tests.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use matfrechet::conditioning::{cond2_exact_hpd, cond2_upper_bound, KroneckerOptions};
use matfrechet::engine::{frechet, quadrature_action, DirectionSet, FrechetOptions};
use matfrechet::functions::{catalog_lookup, FunctionClass, FunctionId, ScalarFunction};
use matfrechet::gallery::{random_directions, DirectionKind};
use matfrechet::linalg::{rel_error, vec_norm};
use matfrechet::matfun::matfun;
use matfrechet::quadrature::{build_rule, scalar_check, RuleKind};
use matfrechet::reference::{frechet_complex_step, frechet_hr_with_cap, frechet_inverse_closed_form};
use matfrechet::{Complex64, ComplexMatrix, Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::inputs::parse_matrix;
use crate::record::{BenchRecord, Summary, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    AccuracySweep,
    TimingK,
    TimingN,
    Cond2Ratio,
    ScalarQuad,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 5] = [
        ExperimentId::AccuracySweep,
        ExperimentId::TimingK,
        ExperimentId::TimingN,
        ExperimentId::Cond2Ratio,
        ExperimentId::ScalarQuad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::AccuracySweep => "accuracy-sweep",
            ExperimentId::TimingK => "timing-k",
            ExperimentId::TimingN => "timing-n",
            ExperimentId::Cond2Ratio => "cond2-ratio",
            ExperimentId::ScalarQuad => "scalar-quad",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::BadParams(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Quad,
    Hr,
    Cs,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Quad => "quad",
            Method::Hr => "hr",
            Method::Cs => "cs",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Method::Quad, Method::Hr, Method::Cs]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::BadParams(format!("unknown method `{s}`")))
    }
}

/// Every field has a default, so a config file only lists what it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub function: FunctionId,
    pub methods: Vec<Method>,
    /// `name` or `name:param` gallery entries, each generated at every size
    pub matrices: Vec<String>,
    pub sizes: Vec<usize>,
    pub orders: Vec<usize>,
    pub m_values: Vec<usize>,
    /// empty selects the default rule of the function
    pub rules: Vec<RuleKind>,
    pub seeds: Vec<u64>,
    pub directions: DirectionKind,
    /// `[re, im]` points for scalar-quad
    pub z_values: Vec<[f64; 2]>,
    /// largest block size `2^k n` for which HR serves as the reference
    pub reference_cap: usize,
    /// timings report the median over this many runs
    pub repeats: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            function: FunctionId::Exp,
            methods: vec![Method::Quad],
            matrices: vec!["lesp".into()],
            sizes: vec![25],
            orders: vec![1, 2, 3, 4],
            m_values: vec![8, 16, 24, 32, 40, 48],
            rules: Vec::new(),
            seeds: vec![1],
            directions: DirectionKind::Dense,
            z_values: vec![[-1.0, 0.0], [-4.5, 0.0], [-2.0, 1.0]],
            reference_cap: 800,
            repeats: 3,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::BadParams(format!("experiment config: {e}")))
    }

    fn rule_kinds(&self) -> Vec<RuleKind> {
        if self.rules.is_empty() {
            vec![RuleKind::default_for(self.function)]
        } else {
            self.rules.clone()
        }
    }

    fn check(&self) -> Result<()> {
        let empty = |what: &str| Err(Error::BadParams(format!("experiment config has no {what}")));
        if self.methods.is_empty() {
            return empty("methods");
        }
        if self.sizes.is_empty() {
            return empty("sizes");
        }
        if self.seeds.is_empty() {
            return empty("seeds");
        }
        if self.repeats == 0 {
            return Err(Error::BadParams("repeats must be positive".into()));
        }
        let f = catalog_lookup(self.function);
        for r in self.rule_kinds() {
            r.check_compatible(&f)?;
        }
        Ok(())
    }
}

fn is_stieltjes(f: &ScalarFunction) -> bool {
    f.class != FunctionClass::CauchyContour
}

/// Builds a gallery member; lesp is negated for Stieltjes-class functions so
/// its spectrum lies on the positive axis.
fn gallery_member(entry: &str, n: usize, f: &ScalarFunction) -> Result<(String, ComplexMatrix)> {
    let (name, param) = match entry.split_once(':') {
        Some((name, p)) => (name, Some(p)),
        None => (entry, None),
    };
    let spec = match param {
        Some(p) => format!("gallery:{name}:{n}:{p}"),
        None => format!("gallery:{name}:{n}"),
    };
    let a = parse_matrix(&spec)?;
    let label = match param {
        Some(p) => format!("{name}({n},{p})"),
        None => format!("{name}({n})"),
    };
    if name == "lesp" && is_stieltjes(f) {
        Ok((format!("-{label}"), a.scale_real(-1.0)))
    } else {
        Ok((label, a))
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

struct Cell<'a> {
    experiment: ExperimentId,
    f: &'a ScalarFunction,
    label: &'a str,
    n: usize,
    k: usize,
    seed: u64,
}

impl Cell<'_> {
    fn record(&self, method: &str, rule: Option<RuleKind>, m: Option<usize>, elapsed: f64) -> BenchRecord {
        BenchRecord {
            schema_version: SCHEMA_VERSION,
            experiment: self.experiment.name().into(),
            method: method.into(),
            function: self.f.name().into(),
            matrix: self.label.into(),
            rule: rule.map(|r| r.name().into()),
            n: self.n,
            k: self.k,
            m,
            seed: self.seed,
            elapsed_seconds: elapsed,
            rel_error: None,
            value: None,
        }
    }
}

fn timed<T>(repeats: usize, mut run: impl FnMut() -> Result<T>) -> Result<(T, f64)> {
    let mut times = Vec::with_capacity(repeats);
    let mut last = None;
    for _ in 0..repeats {
        let start = Instant::now();
        let out = run()?;
        times.push(start.elapsed().as_secs_f64());
        last = Some(out);
    }
    Ok((last.expect("repeats > 0"), median(times)))
}

fn quad_options(rule: RuleKind, m: usize) -> FrechetOptions {
    FrechetOptions {
        rule: Some(rule),
        m: Some(m),
        ..FrechetOptions::default()
    }
}

fn reference(f: &ScalarFunction, a: &ComplexMatrix, dirs: &DirectionSet, cap: usize) -> Result<Option<ComplexMatrix>> {
    if f.id == FunctionId::Inv {
        return frechet_inverse_closed_form(a, dirs).map(Some);
    }
    let size = (1usize << dirs.k()) * a.nrows();
    if size > cap {
        return Ok(None);
    }
    frechet_hr_with_cap(f, a, dirs, cap).map(Some)
}

fn seeded_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Complex64::new(StandardNormal.sample(&mut rng), 0.0)).collect()
}

type Sink<'a> = dyn FnMut(BenchRecord) -> Result<()> + 'a;

/// Runs `id` over the grid of `cfg`, handing each record to `sink` as soon as
/// it is complete; the returned summary holds the fitted trends.
pub fn run_experiment(id: ExperimentId, cfg: &ExperimentConfig, sink: &mut Sink<'_>) -> Result<Summary> {
    cfg.check()?;
    let f = catalog_lookup(cfg.function);
    match id {
        ExperimentId::AccuracySweep => accuracy_sweep(cfg, &f, sink),
        ExperimentId::TimingK | ExperimentId::TimingN => timing(id, cfg, &f, sink),
        ExperimentId::Cond2Ratio => cond2_ratio(cfg, &f, sink),
        ExperimentId::ScalarQuad => scalar_quad(cfg, &f, sink),
    }
}

fn accuracy_sweep(cfg: &ExperimentConfig, f: &ScalarFunction, sink: &mut Sink<'_>) -> Result<Summary> {
    let mut summary = Summary::new();
    for entry in &cfg.matrices {
        for &n in &cfg.sizes {
            let (label, a) = gallery_member(entry, n, f)?;
            for &seed in &cfg.seeds {
                // f(A)b, the k = 0 analogue
                let b = seeded_vector(n, seed);
                let exact = matfun(f, &a)?.matvec(&b);
                let cell = Cell { experiment: ExperimentId::AccuracySweep, f, label: &label, n, k: 0, seed };
                for rule in cfg.rule_kinds() {
                    for &m in &cfg.m_values {
                        let q = build_rule(rule, m)?;
                        let (x, t) = timed(1, || quadrature_action(f, &q, &a, &b, true))?;
                        let d: Vec<Complex64> = x.iter().zip(&exact).map(|(p, q)| p - q).collect();
                        let mut rec = cell.record("quad-action", Some(rule), Some(m), t);
                        rec.rel_error = Some(vec_norm(&d) / vec_norm(&exact));
                        sink(rec)?;
                    }
                }
                for &k in &cfg.orders {
                    let dirs = random_directions(cfg.directions, n, k, seed);
                    let cell = Cell { k, ..cell };
                    let exact = reference(f, &a, &dirs, cfg.reference_cap)?;
                    let err = |x: &ComplexMatrix| exact.as_ref().map(|e| rel_error(x, e));
                    for &method in &cfg.methods {
                        match method {
                            Method::Quad => {
                                for rule in cfg.rule_kinds() {
                                    for &m in &cfg.m_values {
                                        let opts = quad_options(rule, m);
                                        let (x, t) = timed(1, || frechet(f, &a, &dirs, &opts))?;
                                        let mut rec = cell.record("quad", Some(rule), Some(m), t);
                                        rec.rel_error = err(&x.value);
                                        if m == *cfg.m_values.iter().max().expect("m values") {
                                            if let Some(e) = rec.rel_error {
                                                summary.insert(format!("{label}.k{k}.seed{seed}.{rule}.final_error"), e);
                                            }
                                        }
                                        sink(rec)?;
                                    }
                                }
                            }
                            Method::Hr => {
                                let (x, t) = timed(1, || frechet_hr_with_cap(f, &a, &dirs, cfg.reference_cap))?;
                                let mut rec = cell.record("hr", None, None, t);
                                rec.rel_error = if f.id == FunctionId::Inv { err(&x) } else { Some(0.0) };
                                sink(rec)?;
                            }
                            Method::Cs => {
                                let (x, t) = timed(1, || frechet_complex_step(f, &a, &dirs, None))?;
                                let mut rec = cell.record("cs", None, None, t);
                                rec.rel_error = err(&x);
                                sink(rec)?;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(summary)
}

struct Timed<'a> {
    method: &'static str,
    entry: &'a str,
    label: String,
    n: usize,
    k: usize,
    seconds: f64,
    model_cost: Option<f64>,
}

fn timing(id: ExperimentId, cfg: &ExperimentConfig, f: &ScalarFunction, sink: &mut Sink<'_>) -> Result<Summary> {
    let rule = cfg.rule_kinds()[0];
    let m = cfg.m_values.last().copied();
    let seed = cfg.seeds[0];
    let mut cells: Vec<Timed<'_>> = Vec::new();
    for entry in &cfg.matrices {
        for &n in &cfg.sizes {
            let (label, a) = gallery_member(entry, n, f)?;
            for &k in &cfg.orders {
                let dirs = random_directions(cfg.directions, n, k, seed);
                let cell = Cell { experiment: id, f, label: &label, n, k, seed };
                for &method in &cfg.methods {
                    let rec = match method {
                        Method::Quad => {
                            let opts = FrechetOptions { rule: Some(rule), m, ..FrechetOptions::default() };
                            let (x, t) = timed(cfg.repeats, || frechet(f, &a, &dirs, &opts))?;
                            let mut rec = cell.record("quad", Some(rule), Some(x.diagnostics.m), t);
                            if x.diagnostics.model_cost > 0 {
                                rec.value = Some(x.diagnostics.model_cost as f64);
                            }
                            rec
                        }
                        Method::Hr => {
                            let (_, t) = timed(cfg.repeats, || frechet_hr_with_cap(f, &a, &dirs, cfg.reference_cap))?;
                            cell.record("hr", None, None, t)
                        }
                        Method::Cs => {
                            let (_, t) = timed(cfg.repeats, || frechet_complex_step(f, &a, &dirs, None))?;
                            cell.record("cs", None, None, t)
                        }
                    };
                    cells.push(Timed {
                        method: method.name(),
                        entry,
                        label: label.clone(),
                        n,
                        k,
                        seconds: rec.elapsed_seconds,
                        model_cost: rec.value,
                    });
                    sink(rec)?;
                }
            }
        }
    }

    let mut summary = Summary::new();
    for &method in &cfg.methods {
        let mine: Vec<_> = cells.iter().filter(|c| c.method == method.name()).collect();
        if id == ExperimentId::TimingK {
            for w in mine.windows(2) {
                let (a, b) = (w[0], w[1]);
                if a.label == b.label && b.k == a.k + 1 && a.seconds > 0.0 {
                    summary.insert(format!("{}.{}.ratio_k{}", method.name(), b.label, b.k), b.seconds / a.seconds);
                }
            }
        } else {
            for entry in &cfg.matrices {
                for &k in &cfg.orders {
                    let pts: Vec<_> = mine.iter().filter(|c| c.k == k && c.entry == entry).collect();
                    let key = format!("{}.{entry}.k{k}", method.name());
                    let time: Vec<(f64, f64)> = pts.iter().filter(|c| c.seconds > 0.0).map(|c| (c.n as f64, c.seconds)).collect();
                    if let Some(s) = loglog_slope(&time) {
                        summary.insert(format!("{key}.slope"), s);
                    }
                    let model: Vec<(f64, f64)> = pts.iter().filter_map(|c| c.model_cost.map(|v| (c.n as f64, v))).collect();
                    if let Some(s) = loglog_slope(&model) {
                        summary.insert(format!("{key}.model_slope"), s);
                    }
                }
            }
        }
    }
    Ok(summary)
}

fn cond2_ratio(cfg: &ExperimentConfig, f: &ScalarFunction, sink: &mut Sink<'_>) -> Result<Summary> {
    let opts = KroneckerOptions::default();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for entry in &cfg.matrices {
        for &n in &cfg.sizes {
            let (label, a) = gallery_member(entry, n, f)?;
            let cell = Cell { experiment: ExperimentId::Cond2Ratio, f, label: &label, n, k: 2, seed: 0 };
            let (exact, t_exact) = timed(1, || cond2_exact_hpd(f, &a))?;
            let mut rec = cell.record("exact-hpd", None, None, t_exact);
            rec.value = Some(exact.value);
            sink(rec)?;
            let (bound, t_bound) = timed(1, || cond2_upper_bound(f, &a, &opts))?;
            let ratio = bound.value / exact.value;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            let mut rec = cell.record("kronecker-bound", None, None, t_bound);
            rec.value = Some(ratio);
            sink(rec)?;
        }
    }
    let mut summary = Summary::new();
    if lo.is_finite() {
        summary.insert("ratio_min".into(), lo);
        summary.insert("ratio_max".into(), hi);
    }
    Ok(summary)
}

fn scalar_quad(cfg: &ExperimentConfig, f: &ScalarFunction, sink: &mut Sink<'_>) -> Result<Summary> {
    let mut summary = Summary::new();
    for rule in cfg.rule_kinds() {
        for &[re, im] in &cfg.z_values {
            let z = Complex64::new(re, im);
            let exact = (f.f)(z);
            let label = format!("z=({re},{im})");
            let cell = Cell { experiment: ExperimentId::ScalarQuad, f, label: &label, n: 1, k: 0, seed: 0 };
            let mut best = f64::INFINITY;
            for &m in &cfg.m_values {
                let q = build_rule(rule, m)?;
                let (s, t) = timed(1, || scalar_check(&q, f, z))?;
                let err = (s - exact).norm() / exact.norm();
                best = best.min(err);
                let mut rec = cell.record("scalar", Some(rule), Some(m), t);
                rec.rel_error = Some(err);
                rec.value = Some(re);
                sink(rec)?;
            }
            summary.insert(format!("{rule}.{label}.min_error"), best);
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(id: ExperimentId, cfg: &ExperimentConfig) -> (Vec<BenchRecord>, Summary) {
        let mut out = Vec::new();
        let s = run_experiment(id, cfg, &mut |r| {
            out.push(r);
            Ok(())
        })
        .unwrap();
        (out, s)
    }

    #[test]
    fn config_defaults_and_unknown_fields() {
        let c = ExperimentConfig::from_json(r#"{"sizes": [4, 8], "function": "invsqrt"}"#).unwrap();
        assert_eq!(c.sizes, vec![4, 8]);
        assert_eq!(c.function, FunctionId::InvSqrt);
        assert_eq!(c.reference_cap, 800);
        assert!(ExperimentConfig::from_json(r#"{"size": [4]}"#).is_err());
        let bad = ExperimentConfig { rules: vec![RuleKind::StieltjesSqrt], ..ExperimentConfig::default() };
        assert!(matches!(
            run_experiment(ExperimentId::AccuracySweep, &bad, &mut |_| Ok(())),
            Err(Error::IncompatibleRule { .. })
        ));
    }

    #[test]
    fn accuracy_sweep_converges_and_is_reproducible() {
        let cfg = ExperimentConfig {
            sizes: vec![8],
            orders: vec![2],
            m_values: vec![16, 40],
            methods: vec![Method::Quad, Method::Cs],
            ..ExperimentConfig::default()
        };
        let (recs, summary) = collect(ExperimentId::AccuracySweep, &cfg);
        assert_eq!(recs.len(), 2 + 2 + 1);
        let last_quad = recs.iter().rfind(|r| r.method == "quad").unwrap();
        assert!(last_quad.rel_error.unwrap() < 1e-11);
        let action = recs.iter().rfind(|r| r.method == "quad-action").unwrap();
        assert!(action.rel_error.unwrap() < 1e-11);
        assert!(summary.values().all(|&e| e < 1e-11));
        let (again, _) = collect(ExperimentId::AccuracySweep, &cfg);
        let bits = |rs: &[BenchRecord]| rs.iter().map(|r| r.rel_error.map(f64::to_bits)).collect::<Vec<_>>();
        assert_eq!(bits(&recs), bits(&again));
    }

    #[test]
    fn stieltjes_sweep_uses_negated_lesp() {
        let cfg = ExperimentConfig {
            function: FunctionId::InvSqrt,
            sizes: vec![6],
            orders: vec![1],
            m_values: vec![48],
            ..ExperimentConfig::default()
        };
        let (recs, _) = collect(ExperimentId::AccuracySweep, &cfg);
        assert!(recs.iter().all(|r| r.matrix == "-lesp(6)"));
        assert!(recs.iter().all(|r| r.rel_error.unwrap() < 1e-8), "{recs:?}");
    }

    #[test]
    fn timing_summaries() {
        let cfg = ExperimentConfig {
            sizes: vec![10, 20],
            orders: vec![1, 2],
            m_values: vec![16],
            directions: DirectionKind::UnitPairs,
            repeats: 1,
            ..ExperimentConfig::default()
        };
        let (recs, s) = collect(ExperimentId::TimingN, &cfg);
        assert_eq!(recs.len(), 4);
        assert!(recs.iter().all(|r| r.value.unwrap() > 0.0 && r.elapsed_seconds >= 0.0));
        assert!(s.contains_key("quad.lesp.k2.model_slope"));
        let (_, s) = collect(ExperimentId::TimingK, &cfg);
        assert!(s.contains_key("quad.lesp(20).ratio_k2"));
    }

    #[test]
    fn cond2_ratio_range() {
        let cfg = ExperimentConfig {
            function: FunctionId::InvSqrt,
            matrices: vec!["kms:0.5".into(), "minij".into()],
            sizes: vec![3],
            ..ExperimentConfig::default()
        };
        let (recs, s) = collect(ExperimentId::Cond2Ratio, &cfg);
        assert_eq!(recs.len(), 4);
        assert_eq!(recs[0].matrix, "kms(3,0.5)");
        assert!(s["ratio_min"] >= 1.0 - 1e-10 && s["ratio_max"] <= 2.5, "{s:?}");
    }

    #[test]
    fn scalar_quad_errors_fall() {
        let (recs, s) = collect(ExperimentId::ScalarQuad, &ExperimentConfig::default());
        assert_eq!(recs.len(), 3 * 6);
        assert!(s.values().all(|&e| e < 1e-12), "{s:?}");
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0].iter().map(|&n: &f64| (n, 3.0 * n.powi(2))).collect();
        assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert!(loglog_slope(&pts[..1]).is_none());
    }

    #[test]
    fn experiment_names_round_trip() {
        for e in ExperimentId::ALL {
            assert_eq!(e.name().parse::<ExperimentId>().unwrap(), e);
        }
        assert!("nope".parse::<ExperimentId>().is_err());
    }
}
