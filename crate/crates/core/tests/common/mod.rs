//! Independent numeric oracles shared by the integration tests.

#![allow(dead_code)]

use mlpwm::modulation::{instantaneous_pulsation, truncation_instants, CarrierSpec, ModulatingSpec};

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
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
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 48)
}

/// Carrier phase in cycles by quadrature of the instantaneous pulsation,
/// split at the truncation instants where the integrand has kinks.
pub fn numeric_carrier_phase(carrier: &CarrierSpec, m: &ModulatingSpec, t: f64) -> f64 {
    let period = m.period();
    let mut knots = vec![0.0, t];
    if let Some(k) = carrier.truncation() {
        let w = truncation_instants(k, m.f_fund()).unwrap();
        let mut base = 0.0;
        while base < t {
            for x in [w.t1, w.t2, w.t3, w.t4, period] {
                if base + x > 0.0 && base + x < t {
                    knots.push(base + x);
                }
            }
            base += period;
        }
    }
    knots.sort_by(f64::total_cmp);
    let f = |tau: f64| instantaneous_pulsation(carrier, m, tau);
    let integral: f64 = knots
        .windows(2)
        .map(|w| adaptive_simpson(&f, w[0], w[1], 1e-12))
        .sum();
    integral / (2.0 * std::f64::consts::PI) + carrier.phase_offset_cycles()
}

/// Zero of `cos²(ω t) − K` on `(0, T/4)` by bisection.
pub fn bisect_cutoff(truncation: f64, f_fund: f64) -> f64 {
    let w = 2.0 * std::f64::consts::PI * f_fund;
    let g = |t: f64| (w * t).cos().powi(2) - truncation;
    let (mut lo, mut hi) = (0.0, 0.25 / f_fund);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
