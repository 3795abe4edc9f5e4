//! Total self-force on the orbiting charge.
//!
//! The test point sits at phase 0, position `(1, 0, 0)` and velocity
//! `(0, β, 0)`. Each null root contributes a source at phase `−φ`
//! (retarded) and, in time-symmetric mode, its mirror at `+φ` (advanced).
//! Radial is along `+x` (outward), azimuthal along `+y` (the direction of
//! motion). `Z = −F_radial`, so positive `Z` is attraction.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fields::{kinematics_at, lorentz_force, lw_fields, Kinematics};
use crate::nullcone::{find_roots, Branch, NullRoot};
use crate::numerics::{escalate_with, BigReal, CompensatedVecSum, PrecisionPolicy, Vec3};

/// Which electrodynamics sums the root contributions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Half retarded plus half advanced.
    FeynmanWheeler,
    /// Retarded only.
    Retarded,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::FeynmanWheeler => "feynman_wheeler",
            Mode::Retarded => "retarded",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "feynman_wheeler" | "fw" => Ok(Mode::FeynmanWheeler),
            "retarded" | "ret" => Ok(Mode::Retarded),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

/// One evaluation of the self-force at a given `β`.
#[derive(Clone, Debug)]
pub struct ForceSample {
    pub beta: BigReal,
    pub z_value: BigReal,
    /// Azimuthal over radial force; exactly zero in time-symmetric mode.
    pub epsilon: BigReal,
    pub mode: Mode,
    pub n_roots: usize,
    pub converged: bool,
    pub digits_used: u32,
    /// Signed outward force before projection.
    pub radial: BigReal,
    /// Signed force along the velocity, as computed.
    pub azimuthal: BigReal,
}

/// The test charge: phase 0.
pub fn test_kinematics(beta: &BigReal) -> Kinematics {
    kinematics_at(beta, &beta.constant(0))
}

/// Force on the test charge from one branch of one root.
pub fn branch_force(beta: &BigReal, root: &NullRoot, branch: Branch, digits: u32) -> Result<Vec3> {
    let beta = beta.with_digits(digits);
    let phi = root.phi.with_digits(digits);
    let phase = match branch {
        Branch::Retarded => -phi,
        Branch::Advanced => phi,
    };
    let source = kinematics_at(&beta, &phase);
    let test = test_kinematics(&beta);
    let f = lw_fields(&source, &test.position, branch)?;
    Ok(lorentz_force(&f.e_field, &f.b_field, &test.beta_vec))
}

/// Half-weighted retarded plus advanced force of one mirror pair.
pub fn pair_force(beta: &BigReal, root: &NullRoot, digits: u32) -> Result<Vec3> {
    let ret = branch_force(beta, root, Branch::Retarded, digits)?;
    let adv = branch_force(beta, root, Branch::Advanced, digits)?;
    Ok((&ret + &adv).scale(&BigReal::one(digits).div_i64(2)))
}

#[derive(Clone, Debug)]
struct Rung {
    n_roots: usize,
    force: Vec3,
}

fn force_at(beta: &BigReal, mode: Mode, digits: u32) -> Result<Rung> {
    let beta = beta.with_digits(digits);
    let roots = find_roots(&beta, digits)?;
    let mut total = CompensatedVecSum::new(digits);
    for root in &roots {
        let f = match mode {
            Mode::FeynmanWheeler => pair_force(&beta, root, digits)?,
            Mode::Retarded => branch_force(&beta, root, Branch::Retarded, digits)?,
        };
        total.add(&f);
    }
    Ok(Rung {
        n_roots: roots.len(),
        force: total.value(),
    })
}

/// Self-force at `β`, escalated until two precision rungs agree on the
/// root count and on both force components.
pub fn self_force(beta: &BigReal, mode: Mode, policy: &PrecisionPolicy) -> Result<ForceSample> {
    if *beta <= beta.constant(1) {
        return Err(Error::Domain(format!("β = {} must exceed 1", beta.to_sci_string(10))));
    }
    let out = escalate_with(
        |d| force_at(beta, mode, d),
        policy,
        |a: &Rung, b: &Rung| {
            let scale = b.force.x.abs().max_ref(&b.force.y.abs()).clone();
            a.n_roots == b.n_roots
                && policy.agrees(&a.force.x, &b.force.x)
                && policy.agrees_scaled(&a.force.y, &b.force.y, &scale)
        },
    )?;
    let radial = out.value.force.x.clone();
    let azimuthal = out.value.force.y.clone();
    let epsilon = match mode {
        Mode::FeynmanWheeler => radial.constant(0),
        Mode::Retarded => &azimuthal / &radial,
    };
    Ok(ForceSample {
        beta: beta.clone(),
        z_value: -&radial,
        epsilon,
        mode,
        n_roots: out.value.n_roots,
        converged: out.converged,
        digits_used: out.digits_used,
        radial,
        azimuthal,
    })
}

/// `Z(β)` in time-symmetric mode.
pub fn z_of_beta(beta: &BigReal, policy: &PrecisionPolicy) -> Result<BigReal> {
    Ok(self_force(beta, Mode::FeynmanWheeler, policy)?.z_value)
}

/// `ε(β)` under retarded-only electrodynamics.
pub fn epsilon_of_beta(beta: &BigReal, policy: &PrecisionPolicy) -> Result<BigReal> {
    Ok(self_force(beta, Mode::Retarded, policy)?.epsilon)
}

fn require_attractive(z: &BigReal) -> Result<()> {
    if z.is_positive() {
        Ok(())
    } else {
        Err(Error::NoBoundOrbit { z: z.to_sci_string(12) })
    }
}

/// Orbit radius at which the self-force supplies the centripetal force,
/// `r = √(β²−1) q² Z / (m0 c² β²)` with `c = 1`.
pub fn equilibrium_radius_from_z(beta: &BigReal, z: &BigReal, m0: &BigReal, q: &BigReal) -> Result<BigReal> {
    require_attractive(z)?;
    let b2 = beta.square();
    Ok((&b2 - &b2.constant(1)).sqrt() * q.square() * z / (m0 * &b2))
}

/// [`equilibrium_radius_from_z`] with `Z` from [`z_of_beta`].
pub fn equilibrium_radius(beta: &BigReal, m0: &BigReal, q: &BigReal, policy: &PrecisionPolicy) -> Result<BigReal> {
    let z = z_of_beta(beta, policy)?;
    equilibrium_radius_from_z(beta, &z, m0, q)
}

/// Relative mismatch between the centripetal requirement
/// `m0 β² / (r √(β²−1))` and the attraction `q² Z / r²`.
pub fn balance_residual(beta: &BigReal, z: &BigReal, r: &BigReal, m0: &BigReal, q: &BigReal) -> BigReal {
    let b2 = beta.square();
    let centripetal = m0 * &b2 / (r * (&b2 - &b2.constant(1)).sqrt());
    let attraction = q.square() * z / r.square();
    ((&centripetal - &attraction) / &attraction).abs()
}

/// Angular momentum quantum the orbit is matched to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinChoice {
    Hbar,
    HbarHalf,
}

/// `q²/(ħc)` implied by setting the orbit's angular momentum
/// `L = q² Z / (c β)` to `ħ` or `ħ/2`.
pub fn fine_structure_from_z(beta: &BigReal, z: &BigReal, spin: SpinChoice) -> Result<BigReal> {
    require_attractive(z)?;
    let alpha = beta / z;
    Ok(match spin {
        SpinChoice::Hbar => alpha,
        SpinChoice::HbarHalf => alpha.div_i64(2),
    })
}

pub fn fine_structure_candidate(beta: &BigReal, spin: SpinChoice, policy: &PrecisionPolicy) -> Result<BigReal> {
    let z = z_of_beta(beta, policy)?;
    fine_structure_from_z(beta, &z, spin)
}
