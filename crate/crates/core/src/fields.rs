//! Circular-orbit kinematics and point-charge fields.
//!
//! Units: orbit radius, `c` and the charge are one, so the angular velocity
//! equals `β` and a source delay `τ` sweeps phase `βτ`. The velocity term
//! carries `1 − β²` with its sign, which is negative for a superluminal
//! source, and `K` enters cubed with its sign.

use crate::error::{Error, Result};
use crate::nullcone::Branch;
use crate::numerics::{BigReal, Vec3};

/// Position, velocity and acceleration of the orbiting charge at one phase.
#[derive(Clone, Debug)]
pub struct Kinematics {
    pub position: Vec3,
    pub beta_vec: Vec3,
    pub beta_dot: Vec3,
    pub phase: BigReal,
}

/// Fields of one source point at the test point.
#[derive(Clone, Debug)]
pub struct FieldPair {
    pub e_field: Vec3,
    pub b_field: Vec3,
    pub k_factor: BigReal,
    /// Source-to-test distance `R`.
    pub range: BigReal,
    /// Unit vector from source to test point.
    pub n_hat: Vec3,
}

/// Kinematics at orbital phase `θ`.
pub fn kinematics_at(beta: &BigReal, phase: &BigReal) -> Kinematics {
    let (s, c) = phase.sin_cos();
    let zero = phase.constant(0);
    let beta2 = beta.square();
    Kinematics {
        position: Vec3::new(c.clone(), s.clone(), zero.clone()),
        beta_vec: Vec3::new(-(beta * &s), beta * &c, zero.clone()),
        beta_dot: Vec3::new(-(&beta2 * &c), -(&beta2 * &s), zero),
        phase: phase.clone(),
    }
}

/// `1 − n̂·β` (retarded) or `1 + n̂·β` (advanced).
pub fn k_factor(n_hat: &Vec3, beta_vec: &Vec3, branch: Branch) -> BigReal {
    let nb = n_hat.dot(beta_vec);
    nb.constant(1) - nb.mul_i64(branch.sign())
}

/// Default floor on `|K|`: `10^(10 − digits)`.
pub fn cerenkov_floor(digits: u32) -> BigReal {
    BigReal::pow10(10 - digits as i32, digits)
}

/// Velocity and acceleration fields with the default Cerenkov floor.
pub fn lw_fields(source: &Kinematics, test_point: &Vec3, branch: Branch) -> Result<FieldPair> {
    let digits = source.position.digits().max(test_point.digits());
    lw_fields_with_floor(source, test_point, branch, &cerenkov_floor(digits))
}

/// [`lw_fields`] with an explicit floor on `|K|`.
pub fn lw_fields_with_floor(
    source: &Kinematics,
    test_point: &Vec3,
    branch: Branch,
    floor: &BigReal,
) -> Result<FieldPair> {
    let sep = test_point - &source.position;
    let range = sep.norm();
    if range.is_zero() {
        return Err(Error::Domain("test point coincides with the source".into()));
    }
    let n_hat = sep.scale(&range.recip());
    let k = k_factor(&n_hat, &source.beta_vec, branch);
    if k.abs() < *floor {
        let log_k = k.log10_abs().max(-1e9);
        return Err(Error::CerenkovSingularity {
            k_abs: k.abs().to_f64(),
            log10_magnitude: -3.0 * log_k - range.log10_abs(),
        });
    }
    let s = branch.sign();
    // n̂ − β (retarded) or n̂ + β (advanced)
    let nb = &n_hat - &source.beta_vec.scale(&range.constant(s));
    let one = range.constant(1);
    let gamma_term = &one - &source.beta_vec.dot(&source.beta_vec);
    let k3 = k.powi(3);
    let velocity = nb.scale(&(&gamma_term / (&k3 * &range.square())));
    let accel = n_hat
        .cross(&nb.cross(&source.beta_dot))
        .scale(&(&k3 * &range).recip());
    let e_field = &velocity + &accel;
    let b_field = n_hat.cross(&e_field).scale(&range.constant(s));
    Ok(FieldPair {
        e_field,
        b_field,
        k_factor: k,
        range,
        n_hat,
    })
}

/// `E + β × B` for unit charge.
pub fn lorentz_force(e_field: &Vec3, b_field: &Vec3, beta_vec: &Vec3) -> Vec3 {
    e_field + &beta_vec.cross(b_field)
}

/// Source orbit for [`potential_fields_oracle`]: a circular orbit of speed
/// `beta`, or a charge at rest at `rest_position` when `beta` is zero.
#[derive(Clone, Debug)]
pub struct OracleSource {
    pub beta: BigReal,
    pub rest_position: Vec3,
}

impl OracleSource {
    pub fn circular(beta: &BigReal) -> Self {
        OracleSource {
            beta: beta.clone(),
            rest_position: Vec3::zeros(beta.digits()),
        }
    }

    pub fn at_rest(position: &Vec3) -> Self {
        OracleSource {
            beta: BigReal::zero(position.digits()),
            rest_position: position.clone(),
        }
    }

    fn state(&self, time: &BigReal) -> (Vec3, Vec3) {
        if self.beta.is_zero() {
            return (self.rest_position.clone(), Vec3::zeros(time.digits()));
        }
        let kin = kinematics_at(&self.beta, &(&self.beta * time));
        (kin.position, kin.beta_vec)
    }
}

struct Potentials {
    phi: BigReal,
    a: Vec3,
    delay: BigReal,
    k: BigReal,
}

const ORACLE_MAX_NEWTON: usize = 200;

/// Liénard-Wiechert potentials `Φ = 1/(KR)`, `A = β/(KR)` at `(x, t)`.
fn potentials(source: &OracleSource, x: &Vec3, t: &BigReal, branch: Branch, seed: &BigReal) -> Result<Potentials> {
    let digits = x.digits();
    let s = branch.sign();
    let eps = BigReal::pow10(-(digits as i32) + 8, digits);
    let mut delay = seed.clone();
    for _ in 0..ORACLE_MAX_NEWTON {
        let t_src = t - &delay.mul_i64(s);
        let (pos, vel) = source.state(&t_src);
        let sep = x - &pos;
        let r = sep.norm();
        let n = sep.scale(&r.recip());
        let k = k_factor(&n, &vel, branch);
        let resid = &r - &delay;
        if resid.abs() <= &eps * delay.abs().max_ref(&delay.constant(1)) {
            let kr = &k * &r;
            return Ok(Potentials {
                phi: kr.recip(),
                a: vel.scale(&kr.recip()),
                delay,
                k,
            });
        }
        if k.is_zero() {
            break;
        }
        delay = &delay + &(&resid / &k);
    }
    Err(Error::OracleInvalid("retardation condition did not converge".into()))
}

/// Independent field estimate from finite differences of the potentials.
///
/// `E = −∇Φ − ∂A/∂t` and `B = ∇×A` by central differences of step `h`,
/// each stencil point re-solving the retardation condition from
/// `seed_delay`. Fails when a stencil point lands on a different root.
pub fn potential_fields_oracle(
    source: &OracleSource,
    test_point: &Vec3,
    branch: Branch,
    seed_delay: &BigReal,
    h: &BigReal,
) -> Result<FieldPair> {
    let digits = test_point.digits();
    let t0 = BigReal::zero(digits);
    let centre = potentials(source, test_point, &t0, branch, seed_delay)?;
    let tolerance = (h.mul_i64(50) / centre.k.abs()).max_ref(&h.mul_i64(50)).clone();
    let sample = |x: &Vec3, t: &BigReal| -> Result<Potentials> {
        let p = potentials(source, x, t, branch, &centre.delay)?;
        if p.k.signum() != centre.k.signum() || (&p.delay - &centre.delay).abs() > tolerance {
            return Err(Error::OracleInvalid(format!(
                "root branch jumped across the stencil (delay {} vs {})",
                p.delay.to_sci_string(8),
                centre.delay.to_sci_string(8)
            )));
        }
        Ok(p)
    };
    let two_h = h.mul_i64(2);
    let axis = |i: usize| {
        let mut v = Vec3::zeros(digits);
        match i {
            0 => v.x = h.clone(),
            1 => v.y = h.clone(),
            _ => v.z = h.clone(),
        }
        v
    };
    let mut grad_phi = Vec::with_capacity(3);
    let mut grad_a = Vec::with_capacity(3);
    for i in 0..3 {
        let d = axis(i);
        let plus = sample(&(test_point + &d), &t0)?;
        let minus = sample(&(test_point - &d), &t0)?;
        grad_phi.push((&plus.phi - &minus.phi) / &two_h);
        grad_a.push((&plus.a - &minus.a).scale(&two_h.recip()));
    }
    let later = sample(test_point, h)?;
    let earlier = sample(test_point, &-h)?;
    let da_dt = (&later.a - &earlier.a).scale(&two_h.recip());
    let grad = Vec3::new(grad_phi[0].clone(), grad_phi[1].clone(), grad_phi[2].clone());
    let e_field = -&(&grad + &da_dt);
    // curl: (∂y Az − ∂z Ay, ∂z Ax − ∂x Az, ∂x Ay − ∂y Ax)
    let b_field = Vec3::new(
        &grad_a[1].z - &grad_a[2].y,
        &grad_a[2].x - &grad_a[0].z,
        &grad_a[0].y - &grad_a[1].x,
    );
    let t_src = &t0 - &centre.delay.mul_i64(branch.sign());
    let (pos, _) = source.state(&t_src);
    let sep = test_point - &pos;
    let range = sep.norm();
    Ok(FieldPair {
        e_field,
        b_field,
        k_factor: centre.k,
        n_hat: sep.scale(&range.recip()),
        range,
    })
}
