//! Godunov finite-volume solver for the local law `∂t q + ∂x(V(|q|) q) = 0`.
//!
//! The numerical flux is the exact Riemann flux
//! `F(a, b) = min_{[a,b]} f` if `a <= b`, `max_{[b,a]} f` otherwise, which
//! stays correct when `f` is neither convex nor concave.

use crate::error::Result;
use crate::model::{sample_datum, CellField, SimConfig, VelocityModel};
use crate::operator::FaceField;
use crate::run::{march, FluxScheme, Guards, RunResult};

/// Dense samples used to bracket the extremum in [`godunov_flux`].
pub const DENSE_SAMPLES: usize = 1 << 10;

/// Interval width at which golden-section refinement stops.
pub const GOLDEN_TOL: f64 = 1e-12;

/// Extra margin around `‖q₀‖∞` on which the flux is validated and tabulated.
pub const RANGE_MARGIN: f64 = 0.1;

pub trait ScalarFlux {
    fn value(&self, u: f64) -> f64;
    fn derivative(&self, u: f64) -> f64;

    /// Positive `|u|` where `f'` may jump; empty for smooth fluxes.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// `f(u) = u V(|u|)`, `f'(u) = V(|u|) + |u| V'(|u|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxFunction {
    velocity: VelocityModel,
}

impl FluxFunction {
    pub fn new(velocity: VelocityModel) -> Self {
        Self { velocity }
    }

    pub fn velocity(&self) -> &VelocityModel {
        &self.velocity
    }
}

impl ScalarFlux for FluxFunction {
    fn value(&self, u: f64) -> f64 {
        u * self.velocity.eval(u.abs())
    }

    fn derivative(&self, u: f64) -> f64 {
        let w = u.abs();
        self.velocity.eval(w) + w * self.velocity.derivative(w)
    }

    fn kinks(&self) -> Vec<f64> {
        match &self.velocity {
            VelocityModel::Tabulated(t) => {
                t.abscissae().iter().copied().filter(|&x| x > 0.0).collect()
            }
            _ => Vec::new(),
        }
    }
}

fn golden_min<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    while hi - lo > GOLDEN_TOL {
        if g1 <= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        }
        if x1 >= x2 {
            break;
        }
    }
    if g1 <= g2 {
        (x1, g1)
    } else {
        (x2, g2)
    }
}

/// Minimum of `g` on `[lo, hi]`: dense sampling with both endpoints, then
/// golden-section refinement around the best sample.
fn bracketed_min<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return g(lo);
    }
    let n = DENSE_SAMPLES;
    let h = (hi - lo) / (n - 1) as f64;
    let at = |k: usize| if k == n - 1 { hi } else { lo + k as f64 * h };
    let (mut best_k, mut best) = (0, g(lo));
    for k in 1..n {
        let v = g(at(k));
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let a = at(best_k.saturating_sub(1));
    let b = at((best_k + 1).min(n - 1));
    let (_, refined) = golden_min(&g, a, b);
    best.min(refined).min(g(lo)).min(g(hi))
}

/// Exact Riemann (Godunov) flux between left state `a` and right state `b`.
pub fn godunov_flux<F: ScalarFlux + ?Sized>(a: f64, b: f64, flux: &F) -> f64 {
    if a <= b {
        bracketed_min(|u| flux.value(u), a, b)
    } else {
        -bracketed_min(|u| -flux.value(u), b, a)
    }
}

/// Godunov flux with the interior extrema of `f` located once, up front, on a
/// fixed range. Inside that range the flux reduces to comparing the two
/// endpoint values with the values at the critical points in between.
#[derive(Debug, Clone)]
pub struct GodunovTable {
    flux: FluxFunction,
    range: f64,
    critical: Vec<f64>,
}

impl GodunovTable {
    const LATTICE: usize = 4097;

    pub fn new(flux: FluxFunction, range: f64) -> Self {
        let n = Self::LATTICE;
        let h = 2.0 * range / (n - 1) as f64;
        let us: Vec<f64> = (0..n).map(|k| -range + k as f64 * h).collect();
        let sign = |u: f64| {
            let d = flux.derivative(u);
            if d > 0.0 {
                1
            } else if d < 0.0 {
                -1
            } else {
                0
            }
        };
        let signs: Vec<i32> = us.iter().map(|&u| sign(u)).collect();

        let mut critical = Vec::new();
        let mut last: Option<usize> = None;
        for k in 0..n {
            if signs[k] == 0 {
                continue;
            }
            if let Some(p) = last {
                if signs[p] != signs[k] {
                    if let Some(z) = (p + 1..k).find(|&z| signs[z] == 0) {
                        critical.push(us[z]);
                    } else {
                        let (mut lo, mut hi) = (us[p], us[k]);
                        while hi - lo > GOLDEN_TOL {
                            let mid = 0.5 * (lo + hi);
                            if sign(mid) == signs[p] {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        critical.push(0.5 * (lo + hi));
                    }
                }
            }
            last = Some(k);
        }
        Self {
            flux,
            range,
            critical,
        }
    }

    pub fn flux(&self) -> &FluxFunction {
        &self.flux
    }

    pub fn critical_points(&self) -> &[f64] {
        &self.critical
    }

    pub fn eval(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if lo < -self.range || hi > self.range {
            return godunov_flux(a, b, &self.flux);
        }
        let fa = self.flux.value(a);
        let fb = self.flux.value(b);
        let start = self.critical.partition_point(|&c| c <= lo);
        let inner = self.critical[start..]
            .iter()
            .take_while(|&&c| c < hi)
            .map(|&c| self.flux.value(c));
        if a <= b {
            inner.fold(fa.min(fb), f64::min)
        } else {
            inner.fold(fa.max(fb), f64::max)
        }
    }
}

/// `max |f'|` on `[-bound, bound]`, sampled on a lattice.
pub fn max_characteristic_speed<F: ScalarFlux + ?Sized>(flux: &F, bound: f64) -> f64 {
    let n = 2001;
    (0..n)
        .map(|k| -bound + 2.0 * bound * k as f64 / (n - 1) as f64)
        .map(|u| flux.derivative(u).abs())
        .fold(0.0, f64::max)
}

struct GodunovScheme {
    table: GodunovTable,
    speed: f64,
}

impl FluxScheme for GodunovScheme {
    fn fluxes(&mut self, q: &CellField, flux: &mut [f64]) -> Result<f64> {
        let v = q.values();
        let n = v.len();
        for (j, f) in flux.iter_mut().enumerate() {
            let left = if j == 0 { 0.0 } else { v[j - 1] };
            let right = if j == n { 0.0 } else { v[j] };
            *f = self.table.eval(left, right);
        }
        Ok(self.speed)
    }

    fn face_field(&self, _q: &CellField) -> Result<Option<FaceField>> {
        Ok(None)
    }
}

/// Entropy solution of the local law by the Godunov scheme. Any kernel in
/// `config` is ignored.
pub fn run_local(config: &SimConfig) -> Result<RunResult> {
    let q0 = sample_datum(config.datum(), config.grid());
    let bound = q0.linf_norm();
    let flux = FluxFunction::new(config.velocity().clone());
    let speed = max_characteristic_speed(&flux, bound);
    let table = GodunovTable::new(flux, bound + RANGE_MARGIN);
    let mut scheme = GodunovScheme { table, speed };
    march(config, q0, &mut scheme, Guards { linf_bound: bound })
}
