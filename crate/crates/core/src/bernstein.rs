//! Binomials, Bernstein polynomials and 2D Bezier curves.
//!
//! Evaluation uses the closed form `C(n,k) t^k (1-t)^(n-k)` with exact integer
//! binomials, which is exact at the endpoints `t = 0` and `t = 1`.

use crate::error::{Error, Result};

/// Largest supported degree. `C(60, 30)` still fits in a `u64`.
pub const MAX_DEGREE: u32 = 60;

/// Exact binomial coefficient `C(n, k)`; zero when `k < 0` or `k > n`.
pub fn binomial(n: u32, k: i64) -> Result<u64> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeTooLarge(n));
    }
    if k < 0 || k > n as i64 {
        return Ok(0);
    }
    let k = (k as u64).min(n as u64 - k as u64);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) / (i + 1) is exact at every step
        c = c * (n as u128 - i as u128) / (i as u128 + 1);
    }
    u64::try_from(c).map_err(|_| Error::DegreeTooLarge(n))
}

fn check_parameter(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(t))
    }
}

/// The Bernstein basis of a fixed degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BernsteinBasis {
    degree: u32,
}

impl BernsteinBasis {
    pub fn new(degree: u32) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::DegreeTooLarge(degree));
        }
        Ok(Self { degree })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.degree as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, k: u32, t: f64) -> Result<f64> {
        bernstein_value(self.degree, k, t)
    }

    /// Writes `(B_n^0(t), ..., B_n^n(t))` into `out`, which must have `n + 1` slots.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        check_parameter(t)?;
        if out.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "basis buffer has {} slots, degree {} needs {}",
                out.len(),
                self.degree,
                self.len()
            )));
        }
        let n = self.degree;
        let s = 1.0 - t;
        for (k, slot) in out.iter_mut().enumerate() {
            let k = k as u32;
            *slot = binomial(n, k as i64)? as f64 * t.powi(k as i32) * s.powi((n - k) as i32);
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }
}

/// `B_n^k(t) = C(n,k) t^k (1-t)^(n-k)`.
pub fn bernstein_value(n: u32, k: u32, t: f64) -> Result<f64> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeTooLarge(n));
    }
    if k > n {
        return Err(Error::IndexOutOfRange {
            index: k as i64,
            degree: n,
        });
    }
    check_parameter(t)?;
    Ok(binomial(n, k as i64)? as f64 * t.powi(k as i32) * (1.0 - t).powi((n - k) as i32))
}

/// The vector `B_n(t)` of all degree-`n` Bernstein polynomials at `t`.
pub fn basis_vector(n: u32, t: f64) -> Result<Vec<f64>> {
    BernsteinBasis::new(n)?.eval(t)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A planar Bezier curve split into its support (abscissas) and design (ordinates).
#[derive(Debug, Clone, PartialEq)]
pub struct BezierCurve2D {
    support: Vec<f64>,
    design: Vec<f64>,
}

impl BezierCurve2D {
    /// Builds a curve over an admissible support: strictly increasing, `x_0 = 0`, `x_n = 1`.
    pub fn new(support: Vec<f64>, design: Vec<f64>) -> Result<Self> {
        if support.len() != design.len() {
            return Err(Error::InvalidCurve(format!(
                "support has {} entries but design has {}",
                support.len(),
                design.len()
            )));
        }
        check_admissible(&support).map_err(|e| match e {
            Error::InadmissibleSupport(msg) => Error::InvalidCurve(msg),
            other => other,
        })?;
        if design.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidCurve("design has non-finite entries".into()));
        }
        Ok(Self { support, design })
    }

    /// A curve over the uniform support `x_k = k / n`.
    pub fn with_uniform_support(design: Vec<f64>) -> Result<Self> {
        if design.len() < 2 {
            return Err(Error::InvalidCurve("need at least two control points".into()));
        }
        let n = design.len() - 1;
        Self::new(uniform_support(n as u32), design)
    }

    pub fn degree(&self) -> u32 {
        (self.support.len() - 1) as u32
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn design(&self) -> &[f64] {
        &self.design
    }

    pub fn point(&self, t: f64) -> Result<(f64, f64)> {
        let b = basis_vector(self.degree(), t)?;
        Ok((dot(&b, &self.support), dot(&b, &self.design)))
    }

    /// Evaluates `y` at abscissa `x` by inverting the monotone map `x(t)`.
    pub fn y_at(&self, x: f64) -> Result<f64> {
        let t = self.parameter_at(x)?;
        Ok(self.point(t)?.1)
    }

    /// Solves `x(t) = x` by bisection; `x(t)` is strictly increasing for admissible supports.
    pub fn parameter_at(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::ParameterOutOfRange(x));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        if x == 1.0 {
            return Ok(1.0);
        }
        let basis = BernsteinBasis::new(self.degree())?;
        let mut buf = vec![0.0; basis.len()];
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            basis.eval_into(mid, &mut buf)?;
            if dot(&buf, &self.support) < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// `x_k = k / n` for `k = 0..=n`.
pub fn uniform_support(n: u32) -> Vec<f64> {
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

/// Checks that a support is strictly increasing from 0 to 1.
pub fn check_admissible(support: &[f64]) -> Result<()> {
    if support.len() < 2 {
        return Err(Error::InadmissibleSupport(
            "need at least two abscissas".into(),
        ));
    }
    if support.len() - 1 > MAX_DEGREE as usize {
        return Err(Error::DegreeTooLarge((support.len() - 1) as u32));
    }
    if support[0] != 0.0 || support[support.len() - 1] != 1.0 {
        return Err(Error::InadmissibleSupport(
            "endpoints must be exactly 0 and 1".into(),
        ));
    }
    if let Some(w) = support.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::InadmissibleSupport(format!(
            "abscissas not strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}
