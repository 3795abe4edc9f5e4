use super::{BarrierProfile, Outcome, SegmentTag, StepControl, Trajectory, TunnelState};
use crate::error::{Error, Result};

fn time_direction(s: f64) -> i8 {
    if s < 0.0 {
        -1
    } else {
        1
    }
}

#[derive(Default)]
struct Tagger {
    seen_backward: bool,
    reflected: bool,
}

impl Tagger {
    fn tag(&mut self, s: f64, px: f64) -> SegmentTag {
        if px < 0.0 {
            self.reflected = true;
        }
        if self.reflected {
            SegmentTag::Reflected
        } else if s < 0.0 {
            self.seen_backward = true;
            SegmentTag::ForbiddenBackward
        } else if self.seen_backward {
            SegmentTag::TransmittedForward
        } else {
            SegmentTag::IncidentForward
        }
    }
}

fn check_energy(e_total: f64) -> Result<()> {
    if !(e_total > 0.0 && e_total.is_finite()) {
        return Err(Error::IllPosed(format!("total energy {e_total} must be positive")));
    }
    Ok(())
}

/// Simpson estimate of `∫ s/√(s²+1) dx` over one step with `s` linear.
fn splice_dt(s: f64, g: f64, h: f64) -> f64 {
    let f = |s: f64| s / (s * s + 1.0).sqrt();
    let mid = s - g * h / 2.0;
    let end = s - g * h;
    h / 6.0 * (f(s) + 4.0 * f(mid) + f(end))
}

/// Normal incidence, marched in `x` from `x_start` to `x_end`.
///
/// Kinks and turning points are hit exactly; steps are halved until the
/// step-doubling estimate of the time increment is within tolerance.
pub fn integrate_1d(
    e_total: f64,
    barrier: &BarrierProfile,
    x_start: f64,
    x_end: f64,
    control: &StepControl,
) -> Result<Trajectory> {
    barrier.validate()?;
    check_energy(e_total)?;
    if !(x_start.is_finite() && x_end.is_finite()) || x_start == x_end {
        return Err(Error::InvalidArgument("x_start and x_end must differ".into()));
    }
    let u0 = barrier.potential(x_start);
    if u0 >= e_total {
        return Err(Error::IllPosed(format!(
            "start x = {x_start} lies in the forbidden region (U = {u0} >= E = {e_total})"
        )));
    }
    let dir = (x_end - x_start).signum();
    let between = |x: f64| (x - x_start) * dir > 0.0 && (x_end - x) * dir > 0.0;
    let mut targets: Vec<f64> = barrier
        .kinks()
        .into_iter()
        .chain(barrier.crossings(e_total))
        .filter(|&x| between(x))
        .collect();
    targets.push(x_end);
    targets.sort_by(|a, b| ((a - b) * dir).total_cmp(&0.0));
    targets.dedup();

    let mut x = x_start;
    let mut s = e_total - u0;
    let mut t = 0.0;
    let mut tagger = Tagger::default();
    let mut states = Vec::new();
    let mut tags = Vec::new();
    let mut push = |x: f64, s: f64, t: f64, states: &mut Vec<TunnelState>, tags: &mut Vec<SegmentTag>| {
        states.push(TunnelState {
            position: [x, 0.0],
            momentum: [(s * s + 1.0).sqrt(), 0.0],
            coord_time: t,
            time_direction: time_direction(s),
            kinetic: s,
        });
        tags.push(tagger.tag(s, 1.0));
    };
    push(x, s, t, &mut states, &mut tags);

    let mut steps = 0usize;
    for target in targets {
        while (target - x) * dir > 0.0 {
            let remaining = (target - x).abs();
            let g = barrier.slope(x, dir);
            let mut h = control.step.min(remaining) * dir;
            let dt = loop {
                let full = splice_dt(s, g, h);
                let half = splice_dt(s, g, h / 2.0) + splice_dt(s - g * h / 2.0, g, h / 2.0);
                if (full - half).abs() <= control.tolerance || h.abs() <= control.min_step {
                    break half;
                }
                h /= 2.0;
            };
            if h.abs() >= remaining {
                s -= g * (target - x);
                x = target;
            } else {
                s -= g * h;
                x += h;
            }
            t += dt;
            push(x, s, t, &mut states, &mut tags);
            steps += 1;
            if steps > control.max_steps {
                return Err(Error::Domain("step limit exceeded".into()));
            }
        }
    }
    Ok(Trajectory {
        states,
        tags,
        outcome: Outcome::Tunneled,
        e_total,
        barrier: *barrier,
        turning_x: None,
    })
}

/// `[x, y, t, p_x, s]` advanced along the path parameter `λ` with
/// `dt/dλ = s`, so `dx/dλ = p_x` and `dy/dλ = p_y`.
type Phase = [f64; 5];

fn deriv(y: &Phase, p_y: f64, g: f64) -> Phase {
    [y[3], p_y, y[4], -g * y[4], -g * y[3]]
}

fn rk4(y: &Phase, h: f64, p_y: f64, g: f64) -> Phase {
    let add = |a: &Phase, k: &Phase, f: f64| -> Phase {
        let mut o = *a;
        for i in 0..5 {
            o[i] += f * k[i];
        }
        o
    };
    let k1 = deriv(y, p_y, g);
    let k2 = deriv(&add(y, &k1, h / 2.0), p_y, g);
    let k3 = deriv(&add(y, &k2, h / 2.0), p_y, g);
    let k4 = deriv(&add(y, &k3, h), p_y, g);
    let mut o = *y;
    for i in 0..5 {
        o[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    o
}

fn advance(y: &Phase, h: f64, p_y: f64, g: f64) -> Phase {
    rk4(&rk4(y, h / 2.0, p_y, g), h / 2.0, p_y, g)
}

#[derive(Clone, Copy, PartialEq)]
enum Event {
    Kink(f64),
    Turn,
    Splice,
}

/// Incidence with transverse momentum `p_y` on a barrier varying in `x`.
///
/// Runs until `x` reaches `x_end` (tunneled) or, after `p_x` changes sign,
/// returns to the starting `x` (reflected).
pub fn integrate_2d(
    e_total: f64,
    p_y: f64,
    barrier: &BarrierProfile,
    start: [f64; 2],
    x_end: f64,
    control: &StepControl,
) -> Result<Trajectory> {
    barrier.validate()?;
    check_energy(e_total)?;
    let x0 = start[0];
    if !(x_end > x0) {
        return Err(Error::InvalidArgument("x_end must lie beyond the start".into()));
    }
    let s0 = e_total - barrier.potential(x0);
    let px2 = s0 * s0 + 1.0 - p_y * p_y;
    if !(s0 > 0.0) || !(px2 > 0.0) {
        return Err(Error::IllPosed(format!(
            "no real incident p_x at x = {x0} with E = {e_total}, p_y = {p_y}"
        )));
    }
    let mut y: Phase = [x0, start[1], 0.0, px2.sqrt(), s0];
    let mut tagger = Tagger::default();
    let mut states = Vec::new();
    let mut tags = Vec::new();
    let mut record = |y: &Phase, states: &mut Vec<TunnelState>, tags: &mut Vec<SegmentTag>| {
        states.push(TunnelState {
            position: [y[0], y[1]],
            momentum: [y[3], p_y],
            coord_time: y[2],
            time_direction: time_direction(y[4]),
            kinetic: y[4],
        });
        tags.push(tagger.tag(y[4], y[3]));
    };
    record(&y, &mut states, &mut tags);

    let mut walls: Vec<f64> = barrier.kinks().to_vec();
    walls.push(x_end);
    let mut turning_x = None;
    let mut reflected = false;
    for _ in 0..control.max_steps {
        let dir = if y[3] != 0.0 {
            y[3].signum()
        } else {
            (-barrier.slope(y[0], 1.0) * y[4]).signum()
        };
        let g = barrier.slope(y[0], dir);
        let mut h = control.step;
        let next = loop {
            let full = rk4(&y, h, p_y, g);
            let two = advance(&y, h, p_y, g);
            let err = full.iter().zip(&two).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if err <= control.tolerance || h <= control.min_step {
                break two;
            }
            h /= 2.0;
        };

        let mut walls_here = walls.clone();
        if reflected {
            walls_here.push(x0);
        }
        let mut events = Vec::new();
        for &w in &walls_here {
            if y[0] != w && (next[0] - w) * (y[0] - w) <= 0.0 {
                events.push(Event::Kink(w));
            }
        }
        if y[3] != 0.0 && next[3] * y[3] <= 0.0 {
            events.push(Event::Turn);
        }
        if y[4] != 0.0 && next[4] * y[4] <= 0.0 {
            events.push(Event::Splice);
        }

        let (landed, event) = if events.is_empty() {
            (next, None)
        } else {
            let value = |e: Event, z: &Phase| match e {
                Event::Kink(w) => (z[0] - w) * dir,
                Event::Turn => z[3] * y[3].signum(),
                Event::Splice => z[4] * y[4].signum(),
            };
            // Earliest event along the step, each located by bisection.
            let mut best: Option<(f64, Event)> = None;
            for e in events {
                let (mut lo, mut hi) = (0.0, h);
                let before = value(e, &y).signum();
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if value(e, &advance(&y, mid, p_y, g)).signum() == before {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                if best.map_or(true, |(b, _)| hi < b) {
                    best = Some((hi, e));
                }
            }
            let (hit, e) = best.expect("at least one event");
            let mut z = advance(&y, hit, p_y, g);
            match e {
                Event::Kink(w) => z[0] = w,
                Event::Turn => z[3] = 0.0,
                Event::Splice => z[4] = 0.0,
            }
            (z, Some(e))
        };
        y = landed;
        if y[3] < 0.0 {
            reflected = true;
        }
        if event == Some(Event::Turn) {
            turning_x = Some(y[0]);
        }
        record(&y, &mut states, &mut tags);
        if y[0] >= x_end && !reflected {
            return Ok(Trajectory {
                states,
                tags,
                outcome: Outcome::Tunneled,
                e_total,
                barrier: *barrier,
                turning_x: None,
            });
        }
        if reflected && y[0] <= x0 {
            return Ok(Trajectory {
                states,
                tags,
                outcome: Outcome::Reflected,
                e_total,
                barrier: *barrier,
                turning_x,
            });
        }
    }
    Err(Error::Domain("step limit exceeded".into()))
}
