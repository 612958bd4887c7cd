use crate::error::{Error, Result};

/// Accuracy controls for [`uniform_expectation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-10, max_subdivisions: 1 << 20 }
    }
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct Sum {
    sum: f64,
    comp: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const INITIAL_PANELS: usize = 32;

/// Mean of `f` over the uniform distribution on `[a, b]`, by adaptive
/// Simpson quadrature with interval bisection.
///
/// The tolerance is relative to the integral of `|f|`. `a == b` is reported
/// as [`Error::DegenerateInterval`]; callers evaluate `f(a)` instead.
pub fn uniform_expectation(f: impl Fn(f64) -> f64, a: f64, b: f64, spec: QuadratureSpec) -> Result<f64> {
    if a == b {
        return Err(Error::DegenerateInterval(a));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain { function: "uniform_expectation", value: b - a });
    }
    if !(spec.rel_tol > 0.0) {
        return Err(Error::Domain { function: "uniform_expectation (rel_tol)", value: spec.rel_tol });
    }

    let width = b - a;
    let node = |i: usize| if i == 2 * INITIAL_PANELS { b } else { a + width * i as f64 / (2 * INITIAL_PANELS) as f64 };
    let values: Vec<f64> = (0..=2 * INITIAL_PANELS).map(|i| f(node(i))).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Convergence("uniform_expectation (non-finite integrand)"));
    }

    let mut stack = Vec::with_capacity(64);
    let mut scale = 0.0;
    for p in (0..INITIAL_PANELS).rev() {
        let (pa, pb) = (node(2 * p), node(2 * p + 2));
        let (fa, fm, fb) = (values[2 * p], values[2 * p + 1], values[2 * p + 2]);
        scale += simpson(pa, pb, fa.abs(), fm.abs(), fb.abs());
        stack.push(Panel { a: pa, b: pb, fa, fm, fb, whole: simpson(pa, pb, fa, fm, fb) });
    }
    let tol = spec.rel_tol * scale.max(f64::MIN_POSITIVE);

    let mut total = Sum::default();
    let mut splits = 0usize;
    while let Some(p) = stack.pop() {
        let mid = 0.5 * (p.a + p.b);
        let flm = f(0.5 * (p.a + mid));
        let frm = f(0.5 * (mid + p.b));
        let left = simpson(p.a, mid, p.fa, flm, p.fm);
        let right = simpson(mid, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        let local_tol = tol * (p.b - p.a) / width;
        if delta.abs() <= 15.0 * local_tol || mid <= p.a || mid >= p.b {
            total.add(left + right + delta / 15.0);
            continue;
        }
        splits += 1;
        if splits > spec.max_subdivisions || !flm.is_finite() || !frm.is_finite() {
            return Err(Error::Convergence("uniform_expectation"));
        }
        stack.push(Panel { a: mid, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right });
        stack.push(Panel { a: p.a, b: mid, fa: p.fa, fm: flm, fb: p.fm, whole: left });
    }
    Ok(total.value() / width)
}
