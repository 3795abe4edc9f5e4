//! Tunneling trajectories against a time-parametrized integrator of
//! `dp/dt = −U'(x)`, `dx/dt = p / √(p² − 1)` on the allowed side.

use tachyon::tunnel::{integrate_1d, integrate_2d, BarrierProfile, Outcome, SegmentTag, StepControl};

fn barrier() -> BarrierProfile {
    BarrierProfile::trapezoid(2.0, 0.0, 1.0, 2.0, 3.0).unwrap()
}

/// Classical RK4 in `t` until `x` reaches `x_stop`; returns the arrival time.
/// Steps land exactly on each kink of the barrier so every stage sees one slope.
fn time_oracle(e: f64, b: &BarrierProfile, x0: f64, x_stop: f64) -> f64 {
    // `cap` pins stages that overshoot a kink to its left side.
    let rk4 = |x: f64, p: f64, dt: f64, cap: f64| -> (f64, f64) {
        let dir = if cap.is_finite() { -1.0 } else { 1.0 };
        let rhs = |x: f64, p: f64| (p / (p * p - 1.0).sqrt(), -b.slope(x.min(cap), dir));
        let (k1x, k1p) = rhs(x, p);
        let (k2x, k2p) = rhs(x + 0.5 * dt * k1x, p + 0.5 * dt * k1p);
        let (k3x, k3p) = rhs(x + 0.5 * dt * k2x, p + 0.5 * dt * k2p);
        let (k4x, k4p) = rhs(x + dt * k3x, p + dt * k3p);
        (
            x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        )
    };
    let mut stops: Vec<f64> = b.kinks().into_iter().filter(|k| *k > x0 && *k < x_stop).collect();
    stops.push(x_stop);
    let (mut x, mut p, mut t) = (x0, ((e - b.potential(x0)).powi(2) + 1.0).sqrt(), 0.0);
    let dt = 1e-4;
    for target in stops {
        loop {
            let (nx, np) = rk4(x, p, dt, f64::INFINITY);
            if nx < target {
                (x, p, t) = (nx, np, t + dt);
                continue;
            }
            // Secant on the step length to land on the target.
            let (mut lo, mut hi) = (0.0, dt);
            let (mut x_lo, mut x_hi) = (x, nx);
            let mut h = dt * (target - x) / (nx - x);
            for _ in 0..60 {
                let (hx, _) = rk4(x, p, h, target);
                if (hx - target).abs() < 1e-15 {
                    break;
                }
                if hx < target {
                    (lo, x_lo) = (h, hx);
                } else {
                    (hi, x_hi) = (h, hx);
                }
                h = lo + (hi - lo) * (target - x_lo) / (x_hi - x_lo);
            }
            let (_, hp) = rk4(x, p, h, target);
            (x, p, t) = (target, hp, t + h);
            break;
        }
    }
    t
}

#[test]
fn incident_leg_matches_time_integration() {
    let b = barrier();
    // Turning point for E = 0.5 is x = 0.25; stop short of the infinite-speed point.
    for (e, stop) in [(0.5, 0.15), (1.2, 0.5), (3.0, 0.9)] {
        let tr = integrate_1d(e, &b, -1.0, stop, &StepControl::default()).unwrap();
        let t = tr.states.last().unwrap().coord_time;
        let oracle = time_oracle(e, &b, -1.0, stop);
        assert!((t - oracle).abs() < 1e-10, "E = {e}: {t} vs {oracle}");
    }
}

#[test]
fn transmitted_leg_travels_at_the_incident_speed() {
    let b = barrier();
    let e = 0.5;
    let tr = integrate_1d(e, &b, -1.0, 5.0, &StepControl::default()).unwrap();
    let out: Vec<_> = tr
        .states
        .iter()
        .zip(&tr.tags)
        .filter(|(s, tag)| **tag == SegmentTag::TransmittedForward && s.position[0] >= 3.0)
        .map(|(s, _)| s)
        .collect();
    let (first, last) = (out.first().unwrap(), out.last().unwrap());
    let speed = (last.position[0] - first.position[0]) / (last.coord_time - first.coord_time);
    let expected = (e * e + 1.0).sqrt() / e;
    assert!((speed - expected).abs() < 1e-9 * expected);
}

#[test]
fn oblique_and_head_on_agree_when_transverse_momentum_vanishes() {
    let b = barrier();
    let c = StepControl::default();
    let one = integrate_1d(0.8, &b, -1.0, 4.0, &c).unwrap();
    let two = integrate_2d(0.8, 0.0, &b, [-1.0, 0.0], 4.0, &c).unwrap();
    assert_eq!(one.outcome, Outcome::Tunneled);
    assert_eq!(two.outcome, Outcome::Tunneled);
    let (a, z) = (one.states.last().unwrap(), two.states.last().unwrap());
    assert!((a.coord_time - z.coord_time).abs() < 1e-8);
}

#[test]
fn trajectory_export_is_reproducible() {
    let b = barrier();
    let render = || {
        let tr = integrate_2d(1.5, 0.9, &b, [-1.0, 0.0], 4.0, &StepControl::default()).unwrap();
        let mut buf = Vec::new();
        tachyon::tunnel::write_trajectory(&tr, &mut buf).unwrap();
        buf
    };
    assert_eq!(render(), render());
}
