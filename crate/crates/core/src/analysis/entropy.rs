//! Entropy admissibility functional
//! `E[φ, α, q] = ∬ α(q) φ_t + β(q) φ_x dx dt + ∫ α(q₀) φ(0, ·) dx`
//! for convex `α` and `β' = α' f'`, evaluated on a discrete trajectory.

use crate::error::{Error, Result};
use crate::local::{FluxFunction, ScalarFlux};
use crate::run::RunResult;

/// Tolerance for the adaptive Simpson quadrature behind `β`.
pub const BETA_TOL: f64 = 1e-10;

const KINK_PAD: f64 = 3e-6;

/// Default smoothing of the Kružkov entropies.
pub const DEFAULT_KRUZKOV_DELTA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyPair {
    /// `α(u) = u²/2`.
    Quadratic,
    /// `α(u) = sqrt((u - k)² + δ²) - δ`, a C² stand-in for `|u - k|`.
    SmoothedKruzkov { k: f64, delta: f64 },
}

impl EntropyPair {
    pub fn kruzkov(k: f64) -> Self {
        EntropyPair::SmoothedKruzkov {
            k,
            delta: DEFAULT_KRUZKOV_DELTA,
        }
    }

    pub fn alpha(&self, u: f64) -> f64 {
        match *self {
            EntropyPair::Quadratic => 0.5 * u * u,
            EntropyPair::SmoothedKruzkov { k, delta } => (u - k).hypot(delta) - delta,
        }
    }

    pub fn alpha_prime(&self, u: f64) -> f64 {
        match *self {
            EntropyPair::Quadratic => u,
            EntropyPair::SmoothedKruzkov { k, delta } => (u - k) / (u - k).hypot(delta),
        }
    }

    pub fn alpha_second(&self, u: f64) -> f64 {
        match *self {
            EntropyPair::Quadratic => 1.0,
            EntropyPair::SmoothedKruzkov { k, delta } => {
                let r = (u - k).hypot(delta);
                delta * delta / (r * r * r)
            }
        }
    }

    /// `β(u) = ∫₀^u α'(s) f'(s) ds`.
    pub fn beta<F: ScalarFlux + ?Sized>(&self, u: f64, flux: &F) -> f64 {
        let g = |s: f64| self.alpha_prime(s) * flux.derivative(s);
        let (lo, hi) = (0.0f64.min(u), 0.0f64.max(u));
        let kinks = flux.kinks();
        // the difference stencil of a tabulated V' is about 1e-6 of the table range wide
        let pad = KINK_PAD * kinks.iter().fold(1.0f64, |m, k| m.max(*k));
        let is_kink = |c: f64| {
            !kinks.is_empty() && (c == 0.0 || kinks.iter().any(|k| (c.abs() - k).abs() <= pad))
        };
        let mut cuts = vec![lo, hi];
        cuts.extend(
            kinks
                .iter()
                .flat_map(|&k| [k, -k])
                .chain([0.0, self.center()])
                .filter(|&c| c > lo && c < hi),
        );
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let room = 0.25 * (w[1] - w[0]);
            let a = w[0] + if is_kink(w[0]) { pad.min(room) } else { 0.0 };
            let b = w[1] - if is_kink(w[1]) { pad.min(room) } else { 0.0 };
            let piece = |s: f64| g(s.clamp(a, b));
            total += adaptive_simpson(&piece, w[0], w[1], BETA_TOL);
        }
        if u < 0.0 {
            -total
        } else {
            total
        }
    }

    fn center(&self) -> f64 {
        match *self {
            EntropyPair::Quadratic => 0.0,
            EntropyPair::SmoothedKruzkov { k, .. } => k,
        }
    }
}

/// Adaptive Simpson quadrature of `g` over `[a, b]` (`a <= b`).
pub fn adaptive_simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (g(a), g(b));
    let m = 0.5 * (a + b);
    let fm = g(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(g, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<G: Fn(f64) -> f64>(
    g: &G,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm), g(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `ψ(s) = (1 - s²)²` on `|s| < 1`.
fn psi(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let r = 1.0 - s * s;
        r * r
    }
}

/// `∫_{-1}^{s} ψ`.
fn psi_integral(s: f64) -> f64 {
    let s = s.clamp(-1.0, 1.0);
    let s3 = s * s * s;
    s - 2.0 * s3 / 3.0 + s3 * s * s / 5.0 + 8.0 / 15.0
}

fn psi_prime(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        -4.0 * s * (1.0 - s * s)
    }
}

/// Separable C¹ bump `φ(t, x) = ψ((t - t₀)/r_t) ψ((x - x₀)/r_x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestBump {
    pub t0: f64,
    pub x0: f64,
    pub rt: f64,
    pub rx: f64,
}

impl TestBump {
    pub fn new(t0: f64, x0: f64, rt: f64, rx: f64) -> Result<Self> {
        if !(rt > 0.0 && rx > 0.0 && t0.is_finite() && x0.is_finite()) {
            return Err(Error::Validation(format!(
                "bump radii must be positive, got ({rt}, {rx})"
            )));
        }
        Ok(Self { t0, x0, rt, rx })
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        psi((t - self.t0) / self.rt) * psi((x - self.x0) / self.rx)
    }

    pub fn dt(&self, t: f64, x: f64) -> f64 {
        psi_prime((t - self.t0) / self.rt) / self.rt * psi((x - self.x0) / self.rx)
    }

    pub fn dx(&self, t: f64, x: f64) -> f64 {
        psi((t - self.t0) / self.rt) * psi_prime((x - self.x0) / self.rx) / self.rx
    }

    fn time_profile(&self, t: f64) -> f64 {
        psi((t - self.t0) / self.rt)
    }

    fn time_integral(&self, t: f64) -> f64 {
        self.rt * psi_integral((t - self.t0) / self.rt)
    }

    fn space_profile(&self, x: f64) -> f64 {
        psi((x - self.x0) / self.rx)
    }

    fn space_integral(&self, x: f64) -> f64 {
        self.rx * psi_integral((x - self.x0) / self.rx)
    }

    /// `∬ |φ_t| + |φ_x| = (32/15)(r_x + r_t)`; the natural size against
    /// which values of the functional are compared.
    pub fn scale(&self) -> f64 {
        32.0 / 15.0 * (self.rx + self.rt)
    }
}

/// 3×3 family of bumps used by the entropy audit. Time radius `0.3 t_end`
/// with centers `{0.1, 0.4, 0.7} t_end`, so every support closes by `t_end`;
/// space radius `0.3 (hi - lo)` with centers at `lo + {0.1, 0.5, 0.9}(hi - lo)`.
pub fn bump_lattice(t_end: f64, lo: f64, hi: f64) -> Result<Vec<TestBump>> {
    let width = hi - lo;
    let rt = 0.3 * t_end;
    let rx = 0.3 * width;
    let mut bumps = Vec::with_capacity(9);
    for ft in [0.1, 0.4, 0.7] {
        for fx in [0.1, 0.5, 0.9] {
            bumps.push(TestBump::new(ft * t_end, lo + fx * width, rt, rx)?);
        }
    }
    Ok(bumps)
}

/// Space-time quadrature of the entropy functional on a retained trajectory.
///
/// The discrete solution is piecewise constant in space; between retained
/// levels `α(q)` and `β(q)` are averaged (midpoint weights), and the bump
/// derivatives are integrated exactly over each cell and time interval.
pub fn entropy_functional(
    traj: &RunResult,
    pair: EntropyPair,
    bump: &TestBump,
    flux: &FluxFunction,
) -> Result<f64> {
    let points = &traj.trajectory;
    let grid = traj.grid;
    let t_last = points.last().map_or(0.0, |p| p.time);
    let t_lo = bump.t0 - bump.rt;
    let t_hi = bump.t0 + bump.rt;
    if t_hi > t_last * (1.0 + 1e-12) {
        return Err(Error::Validation(format!(
            "bump support ends at {t_hi}, after the trajectory ({t_last})"
        )));
    }
    if bump.x0 - bump.rx < grid.x_min() || bump.x0 + bump.rx > grid.x_max() {
        return Err(Error::Validation("bump support leaves the domain".into()));
    }
    let limit = bump.rt / 20.0;
    for w in points.windows(2) {
        if w[1].time > t_lo && w[0].time < t_hi {
            let gap = w[1].time - w[0].time;
            if gap > limit * (1.0 + 1e-9) {
                return Err(Error::InsufficientTrajectoryResolution { gap, limit });
            }
        }
    }

    // cells touching the spatial support, with exact cell integrals of φ(x)
    // and of ∂xφ(x)
    let dx = grid.dx();
    let first = (((bump.x0 - bump.rx - grid.x_min()) / dx).floor().max(0.0)) as usize;
    let last = ((((bump.x0 + bump.rx - grid.x_min()) / dx).ceil()) as usize).min(grid.n_cells());
    let cells: Vec<(usize, f64, f64)> = (first..last)
        .map(|i| {
            let (a, b) = (grid.face(i), grid.face(i + 1));
            (
                i,
                bump.space_integral(b) - bump.space_integral(a),
                bump.space_profile(b) - bump.space_profile(a),
            )
        })
        .collect();

    let level = |k: usize| -> (f64, f64) {
        let q = points[k].q.values();
        cells.iter().fold((0.0, 0.0), |(sa, sb), &(i, phi, dphi)| {
            (
                sa + pair.alpha(q[i]) * phi,
                sb + pair.beta(q[i], flux) * dphi,
            )
        })
    };

    let mut total = 0.0;
    let (alpha0, _) = level(0);
    total += alpha0 * bump.time_profile(0.0);

    let mut prev: Option<(f64, f64)> = None;
    for k in 0..points.len() - 1 {
        let (t0, t1) = (points[k].time, points[k + 1].time);
        if t1 <= t_lo || t0 >= t_hi {
            prev = None;
            continue;
        }
        let here = prev.unwrap_or_else(|| level(k));
        let next = level(k + 1);
        let d_profile = bump.time_profile(t1) - bump.time_profile(t0);
        let d_integral = bump.time_integral(t1) - bump.time_integral(t0);
        total += 0.5 * (here.0 + next.0) * d_profile + 0.5 * (here.1 + next.1) * d_integral;
        prev = Some(next);
    }
    Ok(total)
}

/// Minimum of the functional over a bump family.
pub fn entropy_min(
    traj: &RunResult,
    pair: EntropyPair,
    bumps: &[TestBump],
    flux: &FluxFunction,
) -> Result<f64> {
    bumps
        .iter()
        .map(|b| entropy_functional(traj, pair, b, flux))
        .try_fold(f64::INFINITY, |m, e| e.map(|e| m.min(e)))
}
