//! Tachyon trajectories through a potential barrier.
//!
//! Units: `m0 = c = 1`. A tachyon of speed `β > 1` has momentum
//! `p = β/√(β²−1)` and kinetic energy `E_k = 1/√(β²−1)`, so
//! `p² − E_k² = 1`. Approaching a turning point `E_k → 0`, `p → 1` and the
//! speed diverges. Rather than stop there, the trajectory continues with
//! the signed kinetic energy `s = E − U(x)` turning negative, and coordinate
//! time then runs backward (`dt/dx = s/√(s² + 1)`) until `s` is positive
//! again on the far side.

mod export;
mod integrate;

pub use export::write_trajectory;
pub use integrate::{integrate_1d, integrate_2d};

use crate::error::{Error, Result};

/// Kinetic energy `m0/√(β²−1)`.
pub fn kinetic_energy(beta: f64, m0: f64) -> Result<f64> {
    if beta.is_nan() || beta <= 1.0 {
        return Err(Error::Domain(format!("β = {beta} must exceed 1")));
    }
    Ok(m0 / (beta * beta - 1.0).sqrt())
}

/// Momentum magnitude `m0 β/√(β²−1)`.
pub fn momentum_scalar(beta: f64, m0: f64) -> Result<f64> {
    if beta.is_nan() || beta <= 1.0 {
        return Err(Error::Domain(format!("β = {beta} must exceed 1")));
    }
    Ok(m0 * beta / (beta * beta - 1.0).sqrt())
}

/// Speed (in units of `c`) of a tachyon with momentum `p`.
pub fn speed_from_momentum(p: f64, m0: f64) -> Result<f64> {
    if p.is_nan() || p <= m0 {
        return Err(Error::TurningPoint { momentum: p });
    }
    Ok(p / (p * p - m0 * m0).sqrt())
}

/// Trapezoidal barrier: zero outside `[x_rise, x_fall]`, rising linearly to
/// `u_max` on `[x_plateau_start, x_plateau_end]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarrierProfile {
    pub u_max: f64,
    pub x_rise: f64,
    pub x_plateau_start: f64,
    pub x_plateau_end: f64,
    pub x_fall: f64,
}

impl BarrierProfile {
    pub fn trapezoid(u_max: f64, x_rise: f64, x_plateau_start: f64, x_plateau_end: f64, x_fall: f64) -> Result<Self> {
        let b = BarrierProfile {
            u_max,
            x_rise,
            x_plateau_start,
            x_plateau_end,
            x_fall,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.u_max, self.x_rise, self.x_plateau_start, self.x_plateau_end, self.x_fall]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.u_max < 0.0 {
            return Err(Error::InvalidArgument("barrier height must be finite and non-negative".into()));
        }
        if !(self.x_rise < self.x_plateau_start
            && self.x_plateau_start <= self.x_plateau_end
            && self.x_plateau_end < self.x_fall)
        {
            return Err(Error::InvalidArgument(
                "barrier needs x_rise < x_plateau_start <= x_plateau_end < x_fall".into(),
            ));
        }
        Ok(())
    }

    pub fn potential(&self, x: f64) -> f64 {
        if x <= self.x_rise || x >= self.x_fall {
            0.0
        } else if x < self.x_plateau_start {
            self.u_max * (x - self.x_rise) / (self.x_plateau_start - self.x_rise)
        } else if x <= self.x_plateau_end {
            self.u_max
        } else {
            self.u_max * (self.x_fall - x) / (self.x_fall - self.x_plateau_end)
        }
    }

    /// `dU/dx` on the linear piece containing `x`. At a kink, the piece is
    /// the one entered when moving in direction `dir`.
    pub fn slope(&self, x: f64, dir: f64) -> f64 {
        let rise = self.u_max / (self.x_plateau_start - self.x_rise);
        let fall = -self.u_max / (self.x_fall - self.x_plateau_end);
        let inside = |a: f64, b: f64| if dir >= 0.0 { x >= a && x < b } else { x > a && x <= b };
        if inside(self.x_rise, self.x_plateau_start) {
            rise
        } else if inside(self.x_plateau_end, self.x_fall) {
            fall
        } else {
            0.0
        }
    }

    pub fn kinks(&self) -> [f64; 4] {
        [self.x_rise, self.x_plateau_start, self.x_plateau_end, self.x_fall]
    }

    /// Points on the ramps where `U = level`, ascending.
    pub fn crossings(&self, level: f64) -> Vec<f64> {
        if !(level > 0.0 && level < self.u_max) {
            return Vec::new();
        }
        let frac = level / self.u_max;
        vec![
            self.x_rise + frac * (self.x_plateau_start - self.x_rise),
            self.x_fall - frac * (self.x_fall - self.x_plateau_end),
        ]
    }
}

/// One point of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TunnelState {
    pub position: [f64; 2],
    pub momentum: [f64; 2],
    pub coord_time: f64,
    /// `+1` forward in coordinate time, `−1` on the backward splice.
    pub time_direction: i8,
    /// Signed kinetic energy `s = E − U(x)`; `|s| = E_k`.
    pub kinetic: f64,
}

impl TunnelState {
    pub fn momentum_norm(&self) -> f64 {
        self.momentum[0].hypot(self.momentum[1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SegmentTag {
    IncidentForward,
    ForbiddenBackward,
    TransmittedForward,
    Reflected,
}

impl SegmentTag {
    pub fn name(self) -> &'static str {
        match self {
            SegmentTag::IncidentForward => "incident_forward",
            SegmentTag::ForbiddenBackward => "forbidden_backward",
            SegmentTag::TransmittedForward => "transmitted_forward",
            SegmentTag::Reflected => "reflected",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Tunneled,
    Reflected,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Tunneled => "tunneled",
            Outcome::Reflected => "reflected",
        }
    }
}

/// A contiguous run of states sharing a tag, `start..=end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub tag: SegmentTag,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<TunnelState>,
    pub tags: Vec<SegmentTag>,
    pub outcome: Outcome,
    pub e_total: f64,
    pub barrier: BarrierProfile,
    /// Where `p_x` vanished, for reflected runs.
    pub turning_x: Option<f64>,
}

impl Trajectory {
    pub fn segments(&self) -> Vec<Segment> {
        let mut out: Vec<Segment> = Vec::new();
        for (i, &tag) in self.tags.iter().enumerate() {
            match out.last_mut() {
                Some(seg) if seg.tag == tag => seg.end = i,
                _ => out.push(Segment { tag, start: i, end: i }),
            }
        }
        out
    }

    /// Largest `|s + U(x) − E|` over the states.
    pub fn energy_residual(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.kinetic + self.barrier.potential(s.position[0]) - self.e_total).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|p² − E_k² − 1|` over the states.
    pub fn dispersion_residual(&self) -> f64 {
        self.states
            .iter()
            .map(|s| {
                let p = s.momentum_norm();
                (p * p - s.kinetic * s.kinetic - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Coordinate times at which the backward splice begins and ends.
    pub fn forbidden_times(&self) -> Option<(f64, f64)> {
        let segs = self.segments();
        let idx = segs.iter().position(|s| s.tag == SegmentTag::ForbiddenBackward)?;
        let seg = segs[idx];
        let entry = self.states[seg.start.saturating_sub(1)].coord_time;
        let exit = self.states[(seg.end + 1).min(self.states.len() - 1)].coord_time;
        Some((entry, exit))
    }
}

/// Closed-form outcome of an incidence with transverse momentum `p_y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Incidence {
    Tunnels,
    Reflects { turning_x: f64 },
}

/// Reflection happens iff `|p_y| > 1` and the barrier reaches
/// `E − √(p_y² − 1)`; the turning point is the first such `x`.
pub fn classify_incidence(e_total: f64, p_y: f64, barrier: &BarrierProfile) -> Result<Incidence> {
    barrier.validate()?;
    if !(e_total > 0.0) {
        return Err(Error::IllPosed(format!("total energy {e_total} must be positive")));
    }
    if p_y * p_y >= 1.0 + e_total * e_total {
        return Err(Error::IllPosed(format!(
            "p_y = {p_y} leaves no real incident p_x at E = {e_total}"
        )));
    }
    if p_y.abs() <= 1.0 {
        return Ok(Incidence::Tunnels);
    }
    let level = e_total - (p_y * p_y - 1.0).sqrt();
    if barrier.u_max > level {
        let frac = level / barrier.u_max;
        let turning_x = barrier.x_rise + frac * (barrier.x_plateau_start - barrier.x_rise);
        Ok(Incidence::Reflects { turning_x })
    } else {
        Ok(Incidence::Tunnels)
    }
}

/// Step control shared by both integrators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    /// Base step in `x` (1D) or in the path parameter (2D).
    pub step: f64,
    /// Local error bound for step-doubling.
    pub tolerance: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            step: 1e-2,
            tolerance: 1e-12,
            min_step: 1e-10,
            max_steps: 10_000_000,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn barrier(u: f64) -> BarrierProfile {
        BarrierProfile::trapezoid(u, 0.0, 1.0, 2.0, 3.0).unwrap()
    }

    #[test]
    fn kinetic_energy_limits() {
        assert!((kinetic_energy(2f64.sqrt(), 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(kinetic_energy(1e9, 1.0).unwrap() < 1e-8);
        assert!(kinetic_energy(1.0 + 1e-12, 1.0).unwrap() > 1e5);
        assert!(kinetic_energy(1.0, 1.0).is_err());
        assert!(kinetic_energy(0.3, 1.0).is_err());
    }

    #[test]
    fn momentum_examples() {
        assert!((momentum_scalar(2f64.sqrt(), 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((momentum_scalar(1e8, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((speed_from_momentum(2f64.sqrt(), 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(speed_from_momentum(1.0, 1.0), Err(Error::TurningPoint { .. })));
        assert!(matches!(speed_from_momentum(0.5, 1.0), Err(Error::TurningPoint { .. })));
    }

    #[test]
    fn dispersion_identity() {
        for beta in [1.01, 1.5, 3.0, 40.0] {
            let p = momentum_scalar(beta, 1.0).unwrap();
            let ek = kinetic_energy(beta, 1.0).unwrap();
            assert!((p * p - ek * ek - 1.0).abs() < 1e-10);
            assert!((speed_from_momentum(p, 1.0).unwrap() - beta).abs() < 1e-9 * beta);
        }
    }

    #[test]
    fn barrier_shape() {
        let b = barrier(2.0);
        assert_eq!(b.potential(-1.0), 0.0);
        assert_eq!(b.potential(0.5), 1.0);
        assert_eq!(b.potential(1.5), 2.0);
        assert_eq!(b.potential(2.75), 0.5);
        assert_eq!(b.potential(3.0), 0.0);
        assert_eq!(b.slope(0.0, 1.0), 2.0);
        assert_eq!(b.slope(0.0, -1.0), 0.0);
        assert_eq!(b.slope(3.0, -1.0), -2.0);
        assert_eq!(b.crossings(1.0), vec![0.5, 2.5]);
        assert!(b.crossings(2.5).is_empty());
        assert!(BarrierProfile::trapezoid(1.0, 0.0, 0.0, 1.0, 2.0).is_err());
        assert!(BarrierProfile::trapezoid(-1.0, 0.0, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn classification_cases() {
        assert_eq!(classify_incidence(0.5, 0.0, &barrier(10.0)).unwrap(), Incidence::Tunnels);
        assert_eq!(classify_incidence(0.5, 0.9, &barrier(10.0)).unwrap(), Incidence::Tunnels);
        match classify_incidence(3.0, 2.0, &barrier(10.0)).unwrap() {
            Incidence::Reflects { turning_x } => {
                let expect = (3.0 - 3f64.sqrt()) / 10.0;
                assert!((turning_x - expect).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        // Barrier below E − √(p_y² − 1): passes over.
        assert_eq!(classify_incidence(3.0, 2.0, &barrier(1.0)).unwrap(), Incidence::Tunnels);
        assert!(matches!(classify_incidence(1.0, 2.0, &barrier(1.0)), Err(Error::IllPosed(_))));
        assert!(matches!(classify_incidence(-1.0, 0.0, &barrier(1.0)), Err(Error::IllPosed(_))));
    }
}
