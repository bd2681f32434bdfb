use crate::error::{Error, Result};

/// One-sided nonnegative kernel on `(-inf, 0]` with unit mass.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `exp(s / eta) / eta` for `s <= 0`.
    Exponential {
        eta: f64,
    },
    TabulatedBV(TabulatedKernel),
}

impl KernelSpec {
    pub fn exponential(eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "eta must be positive, got {eta}"
            )));
        }
        Ok(KernelSpec::Exponential { eta })
    }

    pub fn tabulated(support_length: f64, samples: Vec<f64>) -> Result<Self> {
        TabulatedKernel::new(support_length, samples).map(KernelSpec::TabulatedBV)
    }

    /// Kernel weight at `s <= 0`; zero for `s > 0`.
    pub fn eval(&self, s: f64) -> f64 {
        if s > 0.0 {
            return 0.0;
        }
        match self {
            KernelSpec::Exponential { eta } => (s / eta).exp() / eta,
            KernelSpec::TabulatedBV(k) => k.eval(s),
        }
    }

    /// Length scale of the nonlocality: `eta`, or the tabulated support.
    pub fn length_scale(&self) -> f64 {
        match self {
            KernelSpec::Exponential { eta } => *eta,
            KernelSpec::TabulatedBV(k) => k.support_length(),
        }
    }
}

/// Piecewise-linear kernel through uniformly spaced samples on
/// `[-support_length, 0]`, zero outside. Samples are rescaled at construction
/// so the trapezoidal (= exact) mass is one.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedKernel {
    support_length: f64,
    samples: Vec<f64>,
    raw_samples: Vec<f64>,
    spacing: f64,
    /// Cumulative mass at each node, `cumulative[0] = 0`, last = 1.
    cumulative: Vec<f64>,
}

impl TabulatedKernel {
    pub fn new(support_length: f64, samples: Vec<f64>) -> Result<Self> {
        if !(support_length.is_finite() && support_length > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "support length must be positive, got {support_length}"
            )));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidKernel("need at least two samples".into()));
        }
        if let Some(s) = samples.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::InvalidKernel(format!(
                "samples must be finite and nonnegative, got {s}"
            )));
        }
        let spacing = support_length / (samples.len() - 1) as f64;
        let raw_mass: f64 = samples
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]) * spacing)
            .sum();
        if raw_mass <= 0.0 {
            return Err(Error::InvalidKernel("kernel has zero mass".into()));
        }
        let raw_samples = samples;
        let samples: Vec<f64> = raw_samples.iter().map(|s| s / raw_mass).collect();
        let mut cumulative = Vec::with_capacity(samples.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in samples.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * spacing;
            cumulative.push(acc);
        }
        Ok(Self {
            support_length,
            samples,
            raw_samples,
            spacing,
            cumulative,
        })
    }

    pub fn support_length(&self) -> f64 {
        self.support_length
    }

    /// Normalized samples.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Samples as given, before normalization.
    pub fn raw_samples(&self) -> &[f64] {
        &self.raw_samples
    }

    /// Node abscissae `-support_length + k * spacing`.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.samples.len() - 1;
        (0..=n).map(move |k| {
            if k == n {
                0.0
            } else {
                -self.support_length + k as f64 * self.spacing
            }
        })
    }

    pub fn mass(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn total_variation(&self) -> f64 {
        let ends = self.samples[0] + self.samples.last().unwrap();
        ends + self
            .samples
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .sum::<f64>()
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let u = (s + self.support_length) / self.spacing;
        let k = (u.floor() as usize).min(self.samples.len() - 2);
        (k, u - k as f64)
    }

    pub fn eval(&self, s: f64) -> f64 {
        if s > 0.0 || s < -self.support_length {
            return 0.0;
        }
        let (k, t) = self.locate(s);
        self.samples[k] * (1.0 - t) + self.samples[k + 1] * t
    }

    /// `∫_{-support_length}^{s} kernel`, clamped to `[0, 1]` outside the support.
    pub fn antiderivative(&self, s: f64) -> f64 {
        if s <= -self.support_length {
            return 0.0;
        }
        if s >= 0.0 {
            return self.mass();
        }
        let (k, t) = self.locate(s);
        let (a, b) = (self.samples[k], self.samples[k + 1]);
        self.cumulative[k] + self.spacing * t * (a + 0.5 * (b - a) * t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_is_normalized() {
        let k = TabulatedKernel::new(0.3, vec![0.0, 2.0, 5.0, 1.0, 7.0]).unwrap();
        assert!((k.mass() - 1.0).abs() < 1e-12);
        assert!(k.samples().iter().all(|&s| s >= 0.0));
        assert!(k.total_variation().is_finite());
        assert!((k.antiderivative(0.0) - 1.0).abs() < 1e-12);
        assert_eq!(k.antiderivative(-0.3), 0.0);
    }

    #[test]
    fn antiderivative_matches_fine_trapezoid() {
        let k = TabulatedKernel::new(1.0, vec![1.0, 3.0, 0.5, 2.0]).unwrap();
        for &s in &[-0.9, -0.5, -0.34, -0.1, -0.01] {
            let n = 200_000;
            let h = (s + 1.0) / n as f64;
            let mut acc = 0.0;
            for j in 0..n {
                let a = -1.0 + j as f64 * h;
                acc += 0.5 * (k.eval(a) + k.eval(a + h)) * h;
            }
            assert!((acc - k.antiderivative(s)).abs() < 1e-8, "s = {s}");
        }
    }

    #[test]
    fn exponential_weights() {
        let k = KernelSpec::exponential(0.5).unwrap();
        assert_eq!(k.eval(0.0), 2.0);
        assert_eq!(k.eval(0.1), 0.0);
        assert!((k.eval(-0.5) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_kernels() {
        assert!(KernelSpec::exponential(0.0).is_err());
        assert!(KernelSpec::exponential(-1.0).is_err());
        assert!(KernelSpec::tabulated(1.0, vec![1.0, -0.1]).is_err());
        assert!(KernelSpec::tabulated(1.0, vec![0.0, 0.0]).is_err());
        assert!(KernelSpec::tabulated(0.0, vec![1.0, 1.0]).is_err());
        assert!(KernelSpec::tabulated(1.0, vec![1.0]).is_err());
    }
}
