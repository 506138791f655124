//! Central finite differences with Richardson extrapolation.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffError<E> {
    #[error("function evaluation failed: {0}")]
    Evaluation(E),
    #[error("derivative estimates did not settle: best {value:e} ± {error:e} after {halvings} halvings")]
    Unstable {
        value: f64,
        error: f64,
        halvings: usize,
    },
    #[error("invalid step {0}")]
    InvalidStep(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    /// Estimated absolute error: the larger of the extrapolation spread and
    /// the propagated evaluation noise at the accepted step.
    pub error: f64,
    pub step: f64,
    pub halvings: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffOptions {
    pub rel_tol: f64,
    pub max_halvings: usize,
}

impl Default for DiffOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            max_halvings: 6,
        }
    }
}

/// `df/dx` at `x` from central differences with steps `h0 / 2^i`,
/// Richardson-extrapolated in `h²`.
///
/// `f` returns a value together with its absolute error estimate; the latter
/// sets a noise floor `(δf₊ + δf₋) / 2h` below which successive extrapolants
/// are not expected to agree.
pub fn central_derivative<F, E>(
    mut f: F,
    x: f64,
    h0: f64,
    opts: DiffOptions,
) -> Result<Derivative, DiffError<E>>
where
    F: FnMut(f64) -> Result<(f64, f64), E>,
{
    if !(h0 > 0.0 && h0.is_finite()) {
        return Err(DiffError::InvalidStep(h0));
    }
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(opts.max_halvings + 1);
    let mut best: Option<Derivative> = None;

    for i in 0..=opts.max_halvings {
        let h = h0 / f64::powi(2.0, i as i32);
        let (fp, ep) = f(x + h).map_err(DiffError::Evaluation)?;
        let (fm, em) = f(x - h).map_err(DiffError::Evaluation)?;
        let noise = (ep.abs() + em.abs()) / (2.0 * h);

        let mut row = Vec::with_capacity(i + 1);
        row.push((fp - fm) / (2.0 * h));
        for j in 1..=i {
            let factor = f64::powi(4.0, j as i32) - 1.0;
            let prev = row[j - 1];
            row.push(prev + (prev - table[i - 1][j - 1]) / factor);
        }

        if i > 0 {
            let diag = row[i];
            let spread = (diag - table[i - 1][i - 1])
                .abs()
                .max((diag - row[i - 1]).abs());
            let candidate = Derivative {
                value: diag,
                error: spread.max(noise),
                step: h,
                halvings: i,
            };
            let improved = best.map_or(true, |b| candidate.error <= b.error);
            if improved {
                best = Some(candidate);
            }
            let b = best.expect("set above");
            if b.error <= opts.rel_tol * b.value.abs() || b.error <= noise {
                return Ok(b);
            }
            // Once the spread has doubled relative to the best level, noise
            // dominates and further halving only makes things worse.
            if !improved && candidate.error > 2.0 * b.error {
                break;
            }
        }
        table.push(row);
    }

    let b = best.expect("at least one extrapolation level");
    if b.error <= opts.rel_tol * b.value.abs() {
        Ok(b)
    } else {
        Err(DiffError::Unstable {
            value: b.value,
            error: b.error,
            halvings: b.halvings,
        })
    }
}
