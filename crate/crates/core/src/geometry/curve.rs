use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

/// Per-sample labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Cool,
    Hot,
    Cusp,
    Perestroika,
    Subcaustic,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Cool => "cool",
            Label::Hot => "hot",
            Label::Cusp => "cusp",
            Label::Perestroika => "perestroika",
            Label::Subcaustic => "subcaustic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Caustic,
    LevelSurface,
    Maxwell,
    PreMaxwell,
}

/// One sample of a pre-parameterised curve (or surface).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveSample {
    pub param: Vec<f64>,
    pub point: Vec<f64>,
    /// ∂x/∂λ_k for each parameter k.
    pub d1: Vec<Vec<f64>>,
    /// ∂²x/∂λ₁².
    pub d2: Vec<f64>,
    pub branch: usize,
    /// Pre-image of the sample.
    pub preimage: Vec<f64>,
    pub labels: Vec<Label>,
}

impl CurveSample {
    pub fn speed(&self) -> f64 {
        self.d1[0].iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Evaluates a curve at an arbitrary parameter; used for sub-grid refinement.
pub trait CurveEval: Send + Sync {
    /// Sample at `lambda` on `branch`, continuing from `near` (a nearby sample).
    fn eval(&self, lambda: f64, near: &CurveSample) -> Option<CurveSample>;
}

#[derive(Clone)]
pub struct ParamCurve {
    pub kind: CurveKind,
    pub t: f64,
    pub dim: usize,
    pub samples: Vec<CurveSample>,
    pub evaluator: Option<Arc<dyn CurveEval>>,
}

impl std::fmt::Debug for ParamCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamCurve")
            .field("kind", &self.kind)
            .field("t", &self.t)
            .field("dim", &self.dim)
            .field("samples", &self.samples.len())
            .finish()
    }
}

/// Cusp threshold on |dx/dλ| after refinement.
pub const TOL_CUSP: f64 = 1e-7;

impl ParamCurve {
    pub fn new(kind: CurveKind, t: f64, dim: usize) -> Self {
        ParamCurve { kind, t, dim, samples: Vec::new(), evaluator: None }
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn branches(&self) -> Vec<usize> {
        let mut b: Vec<usize> = self.samples.iter().map(|s| s.branch).collect();
        b.sort_unstable();
        b.dedup();
        b
    }

    /// Samples of one branch in parameter order.
    pub fn branch(&self, b: usize) -> Vec<&CurveSample> {
        let mut v: Vec<&CurveSample> = self.samples.iter().filter(|s| s.branch == b).collect();
        v.sort_by(|x, y| x.param[0].partial_cmp(&y.param[0]).unwrap());
        v
    }

    pub fn nparams(&self) -> usize {
        self.samples.first().map_or(1, |s| s.param.len())
    }

    /// CSV with λ columns, point, first derivatives, branch and labels.
    pub fn to_csv(&self) -> String {
        let np = self.nparams();
        let axes = ["x", "y", "z"];
        let mut head: Vec<String> = if np == 1 { vec!["lambda".into()] } else { (1..=np).map(|k| format!("lambda{k}")).collect() };
        head.extend(axes[..self.dim].iter().map(|s| s.to_string()));
        for k in 0..np {
            let suffix = if np == 1 { String::new() } else { (k + 1).to_string() };
            head.extend(axes[..self.dim].iter().map(|s| format!("d{s}/dlambda{suffix}")));
        }
        head.push("branch".into());
        head.push("label".into());
        let mut out = head.join(",");
        out.push('\n');
        for s in &self.samples {
            let mut row: Vec<String> = s.param.iter().map(|v| fmt_num(*v)).collect();
            row.extend(s.point.iter().map(|v| fmt_num(*v)));
            for d in &s.d1 {
                row.extend(d.iter().map(|v| fmt_num(*v)));
            }
            row.push(s.branch.to_string());
            row.push(s.labels.iter().map(Label::as_str).collect::<Vec<_>>().join(";"));
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Shortest round-trip float formatting, stable across runs.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:e}")
    }
}

/// A detected generalised cusp.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspHit {
    pub lambda: f64,
    pub branch: usize,
    pub point: Vec<f64>,
    pub preimage: Vec<f64>,
    pub speed: f64,
}

/// Generalised cusps (dx/dλ = 0) on single-parameter curves.
///
/// Candidates are sign changes of a velocity component between consecutive
/// samples, plus local minima of |dx/dλ|; each is refined with the curve
/// evaluator and accepted when |dx/dλ| < [`TOL_CUSP`].
pub fn detect_generalised_cusps(curve: &ParamCurve) -> Vec<CuspHit> {
    let mut hits: Vec<CuspHit> = Vec::new();
    for b in curve.branches() {
        let s = curve.branch(b);
        if s.len() < 2 {
            continue;
        }
        let mut cands: Vec<(usize, usize)> = Vec::new();
        for i in 0..s.len() - 1 {
            if (0..curve.dim).any(|k| s[i].d1[0][k] * s[i + 1].d1[0][k] <= 0.0) {
                cands.push((i, i + 1));
            }
        }
        for i in 1..s.len() - 1 {
            if s[i].speed() <= s[i - 1].speed() && s[i].speed() <= s[i + 1].speed() {
                cands.push((i - 1, i + 1));
            }
        }
        for (i, j) in cands {
            if let Some(h) = refine_cusp(curve, s[i], s[j]) {
                if !hits.iter().any(|o| o.branch == h.branch && (o.lambda - h.lambda).abs() < 1e-6) {
                    hits.push(h);
                }
            }
        }
    }
    hits.sort_by(|a, b| a.branch.cmp(&b.branch).then(a.lambda.partial_cmp(&b.lambda).unwrap()));
    hits
}

fn refine_cusp(curve: &ParamCurve, a: &CurveSample, b: &CurveSample) -> Option<CuspHit> {
    let accept = |s: &CurveSample| {
        (s.speed() < TOL_CUSP).then(|| CuspHit {
            lambda: s.param[0],
            branch: s.branch,
            point: s.point.clone(),
            preimage: s.preimage.clone(),
            speed: s.speed(),
        })
    };
    let Some(ev) = curve.evaluator.as_ref() else {
        return accept(a).or_else(|| accept(b));
    };
    // a component whose sign changes gives a bracket for bisection
    for k in 0..curve.dim {
        if a.d1[0][k] * b.d1[0][k] < 0.0 {
            let (mut lo, mut hi) = (a.clone(), b.clone());
            for _ in 0..200 {
                let m = 0.5 * (lo.param[0] + hi.param[0]);
                let Some(s) = ev.eval(m, &lo) else { break };
                if s.d1[0][k] == 0.0 || hi.param[0] - lo.param[0] < 1e-15 * m.abs().max(1.0) {
                    lo = s;
                    break;
                }
                if s.d1[0][k] * lo.d1[0][k] < 0.0 {
                    hi = s;
                } else {
                    lo = s;
                }
            }
            let s = if lo.speed() < hi.speed() { lo } else { hi };
            if let Some(h) = accept(&s) {
                return Some(h);
            }
        }
    }
    // golden-section search on |dx/dλ|
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a.param[0], b.param[0]);
    let mut near = a.clone();
    let mut best: Option<CurveSample> = None;
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        let (Some(s1), Some(s2)) = (ev.eval(m1, &near), ev.eval(m2, &near)) else { break };
        if s1.speed() < s2.speed() {
            hi = m2;
            near = s1.clone();
            best = Some(s1);
        } else {
            lo = m1;
            near = s2.clone();
            best = Some(s2);
        }
        if hi - lo < 1e-15 * lo.abs().max(1.0) {
            break;
        }
    }
    best.and_then(|s| accept(&s))
}
