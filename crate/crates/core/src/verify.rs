//! Self-checks run by `tachyon verify`.
//!
//! Each check is named and deterministic. The singular-velocity reference
//! values live in a [`Fixture`] so the harness itself can be tested against
//! a deliberately corrupted table.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fields::{kinematics_at, lw_fields, potential_fields_oracle, OracleSource};
use crate::nullcone::{count_roots, merging_root, singular_velocities, Branch};
use crate::numerics::{BigReal, PrecisionPolicy, Vec3};
use crate::selfforce::{self_force, Mode};
use crate::tunnel::{classify_incidence, integrate_1d, integrate_2d, BarrierProfile, Incidence, Outcome, StepControl};

/// First fifteen singular velocities to 45 significant digits.
pub const SINGULAR_BETAS: [&str; 15] = [
    "4.60333884875170035255658202910301651306739713",
    "7.78970576749272468183669822225484832970245447",
    "10.9498798698262650880872551462343658994918",
    "14.1016953304692127059523681832005479151170193",
    "17.2497655675586317458602524195892110110789432",
    "20.395832521843235986522183082363053103299563",
    "23.540701897736366210038243206834534462438324",
    "26.684798101802110568822514465334644431677422",
    "29.8283660710601197566306754550541689311839772",
    "32.9715571143391872018234324857008981857546662",
    "36.1144697653323875473246873608210098907488676",
    "39.257170954489210927041139241830340415992365",
    "42.3997077426180156626007673524282460454347305",
    "45.542114186761616274481126009252126245543072",
    "48.6844155424823656766324257855714180434887099",
];

/// The commonly quoted 16-digit values of the same spectrum.
pub const SINGULAR_BETAS_16: [&str; 15] = [
    "4.603338848751701",
    "7.789705767492714",
    "10.94987986982622",
    "14.10169533046915",
    "17.24976556755881",
    "20.39583252184294",
    "23.54070189773618",
    "26.68479810180271",
    "29.82836607105987",
    "32.97155711433862",
    "36.11446976533017",
    "39.25717095448966",
    "42.39970774262564",
    "45.54211418676631",
    "48.68441554248154",
];

/// Reference data the checks compare against.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub singular_betas: Vec<String>,
    pub singular_betas_16: Vec<String>,
    pub seed: u64,
}

impl Default for Fixture {
    fn default() -> Self {
        Fixture {
            singular_betas: SINGULAR_BETAS.iter().map(|s| s.to_string()).collect(),
            singular_betas_16: SINGULAR_BETAS_16.iter().map(|s| s.to_string()).collect(),
            seed: 0x7ac4_1011,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        let failed = self.failures().len();
        writeln!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> CheckResult {
    match outcome {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn rel(a: &BigReal, b: &BigReal) -> f64 {
    ((a - b) / b).abs().to_f64()
}

fn singular_reference(fx: &Fixture) -> Result<(bool, String)> {
    let svs = singular_velocities(fx.singular_betas.len() as u32, 50)?;
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for (sv, s) in svs.iter().zip(&fx.singular_betas) {
        let r = rel(&sv.beta, &BigReal::parse(s, 50)?);
        worst = worst.max(r);
        if r > 1e-40 {
            bad.push(sv.index);
        }
    }
    Ok((bad.is_empty(), format!("max relative deviation {worst:.1e}; mismatched k = {bad:?}")))
}

fn singular_sixteen(fx: &Fixture) -> Result<(bool, String)> {
    let svs = singular_velocities(fx.singular_betas_16.len() as u32, 30)?;
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for (sv, s) in svs.iter().zip(&fx.singular_betas_16) {
        let r = rel(&sv.beta, &BigReal::parse(s, 30)?);
        worst = worst.max(r);
        if r > 1e-12 {
            bad.push(sv.index);
        }
    }
    Ok((bad.is_empty(), format!("max relative deviation {worst:.1e}; mismatched k = {bad:?}")))
}

fn staircase() -> Result<(bool, String)> {
    let svs = singular_velocities(15, 40)?;
    let delta = BigReal::pow10(-3, 40);
    for sv in &svs {
        let below = count_roots(&(&sv.beta - &delta))?;
        let above = count_roots(&(&sv.beta + &delta))?;
        let expect = 2 * sv.index as usize - 1;
        if below != expect || above != expect + 2 {
            return Ok((false, format!("k = {}: {below} -> {above}", sv.index)));
        }
    }
    Ok((true, "N jumps by 2 across each of 15 singular velocities".into()))
}

fn tangency_k() -> Result<(bool, String)> {
    let mut worst: f64 = f64::NEG_INFINITY;
    for sv in singular_velocities(5, 50)? {
        let root = merging_root(&sv);
        worst = worst.max(root.k_factor.log10_abs());
    }
    Ok((worst < -20.0, format!("max log10|K| = {worst:.1}")))
}

const FORCE_BETAS: [&str; 6] = ["1.5", "2", "3", "5", "8", "12"];

fn fw_radiality_and_modes() -> Result<(CheckResult, CheckResult)> {
    let policy = PrecisionPolicy::default();
    let mut radial_ok = true;
    let mut modes_ok = true;
    let mut worst_ratio: f64 = f64::NEG_INFINITY;
    let mut worst_rel: f64 = 0.0;
    for b in FORCE_BETAS {
        let beta = BigReal::parse(b, 50)?;
        let fw = self_force(&beta, Mode::FeynmanWheeler, &policy)?;
        let ret = self_force(&beta, Mode::Retarded, &policy)?;
        let ratio = fw.azimuthal.log10_abs() - fw.radial.log10_abs();
        worst_ratio = worst_ratio.max(ratio);
        radial_ok &= ratio < -20.0;
        let r = rel(&ret.radial, &fw.radial);
        worst_rel = worst_rel.max(r);
        modes_ok &= r <= 1e-10 && fw.converged && ret.converged;
    }
    Ok((
        CheckResult {
            name: "fw_radiality",
            passed: radial_ok,
            detail: format!("max log10(|F_az|/|F_r|) = {worst_ratio:.1}"),
        },
        CheckResult {
            name: "mode_consistency",
            passed: modes_ok,
            detail: format!("max relative radial difference {worst_rel:.1e}"),
        },
    ))
}

/// Test point a light-travel time `φ/β` from the source at phase `−φ`,
/// placed so that `n̂·β = nb` (hence `K = 1 − nb`). Requires `|nb| < β`.
pub fn oracle_configuration(beta: &BigReal, phi: &BigReal, nb: f64) -> (Vec3, BigReal) {
    let d = beta.digits();
    let src = kinematics_at(beta, &-phi);
    let bhat = src.beta_vec.unit();
    let lift = Vec3::from_f64([0.0, 0.0, 0.3], d);
    let base = &src.position + &lift;
    let nb = BigReal::from_f64(nb, d);
    let tilt = &nb * base.norm() / (beta.square() - nb.square()).sqrt();
    let dir = &base + &bhat.scale(&tilt);
    let delay = phi / beta;
    (&src.position + &dir.unit().scale(&delay), delay)
}

/// Observed order of the finite-difference oracle between steps `h` and `h/2`.
pub fn oracle_order(beta: &BigReal, phi: &BigReal, nb: f64, h: &BigReal) -> Result<f64> {
    let (x, delay) = oracle_configuration(beta, phi, nb);
    let exact = lw_fields(&kinematics_at(beta, &-phi), &x, Branch::Retarded)?;
    let src = OracleSource::circular(beta);
    let err = |h: &BigReal| -> Result<f64> {
        let f = potential_fields_oracle(&src, &x, Branch::Retarded, &delay, h)?;
        let de = (&f.e_field - &exact.e_field).norm();
        let db = (&f.b_field - &exact.b_field).norm();
        let scale = exact.e_field.norm();
        Ok(((de + db) / scale).to_f64())
    };
    let coarse = err(h)?;
    let fine = err(&h.div_i64(2))?;
    Ok((coarse / fine).log2())
}

fn field_oracle() -> Result<(bool, String)> {
    let mut orders = Vec::new();
    for (b, p, nb) in [("2", "1.3", 0.5), ("3.5", "2.2", -0.6), ("9", "4.1", 0.4), ("1.4", "0.8", -0.3)] {
        let beta = BigReal::parse(b, 60)?;
        let phi = BigReal::parse(p, 60)?;
        let h = BigReal::pow10(-3, 60) / beta.square();
        orders.push(oracle_order(&beta, &phi, nb, &h)?);
    }
    let ok = orders.iter().all(|o| (o - 2.0).abs() <= 0.3);
    Ok((ok, format!("observed orders {orders:.2?}")))
}

fn coarse_sign() -> Result<(bool, String)> {
    let policy = PrecisionPolicy::default();
    let mut positive = Vec::new();
    for i in 0..20 {
        let beta = BigReal::from_f64(1.6 + 0.15 * f64::from(i), 50);
        if (beta.to_f64() - 4.6033).abs() < 0.05 {
            continue;
        }
        let s = self_force(&beta, Mode::FeynmanWheeler, &policy)?;
        if s.converged && !s.z_value.is_negative() {
            positive.push(beta.to_f64());
        }
    }
    Ok((positive.is_empty(), format!("non-negative Z at {positive:?}")))
}

fn epsilon_trend() -> Result<(bool, String)> {
    let policy = PrecisionPolicy::default();
    let eps = |b: &str| -> Result<f64> {
        Ok(self_force(&BigReal::parse(b, 50)?, Mode::Retarded, &policy)?.epsilon.to_f64())
    };
    let (lo, hi) = (eps("5")?, eps("15")?);
    Ok((lo > 0.0 && hi > 0.0 && hi < lo, format!("ε(5) = {lo:.6}, ε(15) = {hi:.6}")))
}

fn tunnel_conservation() -> Result<(bool, String)> {
    let barrier = BarrierProfile::trapezoid(2.0, 0.0, 1.0, 2.0, 3.0)?;
    let tr = integrate_1d(0.5, &barrier, -1.0, 4.0, &StepControl::default())?;
    let segs = tr.segments().len();
    let (e, d) = (tr.energy_residual(), tr.dispersion_residual());
    Ok((
        segs == 3 && e < 1e-12 && d < 1e-12,
        format!("{segs} segments, energy residual {e:.1e}, dispersion residual {d:.1e}"),
    ))
}

fn classify_agreement(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let control = StepControl::default();
    let mut disagreements = 0;
    let n = 100;
    for _ in 0..n {
        let (e, barrier, p_y) = random_incidence(&mut rng)?;
        let predicted = classify_incidence(e, p_y, &barrier)?;
        let tr = integrate_2d(e, p_y, &barrier, [-1.0, 0.0], barrier.x_fall + 1.0, &control)?;
        let agree = matches!(
            (predicted, tr.outcome),
            (Incidence::Tunnels, Outcome::Tunneled) | (Incidence::Reflects { .. }, Outcome::Reflected)
        );
        if !agree {
            disagreements += 1;
        }
    }
    Ok((disagreements == 0, format!("{disagreements} of {n} disagree")))
}

/// A random well-posed incidence: `(E, barrier, p_y)`.
pub fn random_incidence<R: Rng>(rng: &mut R) -> Result<(f64, BarrierProfile, f64)> {
    let e: f64 = rng.gen_range(0.1..4.0);
    let u_max = rng.gen_range(0.0..6.0);
    let rise = rng.gen_range(0.2..1.5);
    let plateau = rng.gen_range(0.0..1.5);
    let fall = rng.gen_range(0.2..1.5);
    let barrier = BarrierProfile::trapezoid(u_max, 0.0, rise, rise + plateau, rise + plateau + fall)?;
    let limit = (1.0 + e * e).sqrt();
    let p_y = rng.gen_range(-0.999..0.999) * limit;
    Ok((e, barrier, p_y))
}

/// Runs every check against `fixture`.
pub fn run_checks(fixture: &Fixture) -> Report {
    let mut checks = vec![
        check("singular_reference", singular_reference(fixture)),
        check("singular_16_digit", singular_sixteen(fixture)),
        check("staircase", staircase()),
        check("tangency_k", tangency_k()),
    ];
    match fw_radiality_and_modes() {
        Ok((a, b)) => checks.extend([a, b]),
        Err(e) => {
            for name in ["fw_radiality", "mode_consistency"] {
                checks.push(CheckResult {
                    name,
                    passed: false,
                    detail: format!("error: {e}"),
                });
            }
        }
    }
    checks.push(check("field_oracle", field_oracle()));
    checks.push(check("coarse_repulsion", coarse_sign()));
    checks.push(check("epsilon_trend", epsilon_trend()));
    checks.push(check("tunnel_conservation", tunnel_conservation()));
    checks.push(check("classify_agreement", classify_agreement(fixture.seed)));
    Report { checks }
}
