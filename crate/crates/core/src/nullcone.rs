//! Light-cone self-intersections of a circular superluminal orbit.
//!
//! With the orbit radius and `c` set to one, a source point a dimensionless
//! delay `τ` in the past lies on the test point's light cone when
//!
//! ```text
//! f(τ, β) = 2 − 2 cos(βτ) − τ² = 0,   τ > 0.
//! ```
//!
//! Writing `u = βτ/2` turns this into `|sin u| = u/β`: on every half-period
//! `[mπ, (m+1)π]` the hump `|sin u| − u/β` is concave, so it carries either
//! no root or a pair separated by its peak at `u* = mπ + acos(1/β)`. The
//! first hump always carries exactly one non-trivial root. Counting roots is
//! therefore a matter of the sign of each peak height, and a pair merges
//! (the root count jumps by two) exactly when a peak touches zero. Brackets
//! built this way resolve merging pairs however close they are, which a
//! sampling grid cannot.
//!
//! The merge velocities solve `2 − 2cos φ − φ sin φ = 0` with `φ = βτ`,
//! `β = √(φ / sin φ)`.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::numerics::{bits_for_digits, BigReal};

/// Roots with a smaller delay are the excluded present-location singularity.
pub const MIN_TAU: f64 = 1e-6;

/// Which light cone a source point sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Retarded,
    Advanced,
}

impl Branch {
    /// +1 for retarded, −1 for advanced: the upper/lower sign in `1 ∓ n̂·β`.
    pub fn sign(self) -> i64 {
        match self {
            Branch::Retarded => 1,
            Branch::Advanced => -1,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Retarded => "retarded",
            Branch::Advanced => "advanced",
        })
    }
}

/// One light-cone self-intersection.
#[derive(Clone, Debug)]
pub struct NullRoot {
    /// Dimensionless delay `c(t − t')/r`.
    pub tau: BigReal,
    /// Orbital phase swept during the delay, `β·τ`.
    pub phi: BigReal,
    pub branch: Branch,
    /// `∂f/∂τ` at the root; vanishes where two roots merge.
    pub dfdtau: BigReal,
    pub k_factor: BigReal,
    /// `|∂f/∂τ|` fell below `10^(−digits/2)`.
    pub tangent: bool,
}

impl NullRoot {
    /// The advanced partner: same delay and K, mirrored phase.
    pub fn mirror(&self) -> NullRoot {
        NullRoot {
            branch: match self.branch {
                Branch::Retarded => Branch::Advanced,
                Branch::Advanced => Branch::Retarded,
            },
            ..self.clone()
        }
    }
}

/// The k-th velocity at which a pair of null roots merges.
#[derive(Clone, Debug)]
pub struct SingularVelocity {
    pub index: u32,
    pub phi: BigReal,
    pub beta: BigReal,
}

/// `f(τ, β) = 2 − 2cos(βτ) − τ²`.
pub fn null_f(tau: &BigReal, beta: &BigReal) -> BigReal {
    let phi = beta * tau;
    tau.constant(2) - phi.cos().mul_i64(2) - tau.square()
}

/// `∂f/∂τ = 2β sin(βτ) − 2τ`.
pub fn null_f_dtau(tau: &BigReal, beta: &BigReal) -> BigReal {
    let phi = beta * tau;
    (beta * phi.sin()).mul_i64(2) - tau.mul_i64(2)
}

/// `K = 1 − β sin φ / √(2 − 2cos φ)` for a source `φ` behind on the orbit.
pub fn k_factor_at_phase(phi: &BigReal, beta: &BigReal) -> BigReal {
    let (s, c) = phi.sin_cos();
    let chord = (phi.constant(2) - c.mul_i64(2)).sqrt();
    phi.constant(1) - beta * s / chord
}

/// Peak of one hump of `|sin u| − u/β`.
#[derive(Clone, Debug)]
struct Hump {
    index: u64,
    peak_u: BigReal,
    height: BigReal,
}

/// Peak heights this small are indistinguishable from a tangency.
fn height_tolerance(digits: u32) -> BigReal {
    BigReal::pow10(-(digits as i32 - 4), digits)
}

fn derivative_tolerance(digits: u32) -> BigReal {
    BigReal::pow10(-(digits as i32 / 2), digits)
}

fn check_superluminal(beta: &BigReal) -> Result<()> {
    if beta.is_nan() || *beta <= beta.constant(1) {
        return Err(Error::Domain(format!("β = {} must exceed 1", beta.to_sci_string(10))));
    }
    Ok(())
}

fn humps(beta: &BigReal) -> Vec<Hump> {
    let pi = BigReal::pi(beta.digits());
    let inv = beta.recip();
    let offset = inv.acos();
    let crest = (inv.constant(1) - inv.square()).sqrt();
    let mut out = Vec::new();
    let mut m: u64 = 0;
    loop {
        let start = pi.mul_i64(m as i64);
        if start >= *beta {
            break;
        }
        let peak_u = &start + &offset;
        let height = &crest - &peak_u / beta;
        out.push(Hump { index: m, peak_u, height });
        m += 1;
    }
    out
}

/// `(−1)^m sin u − u/β` and its derivative.
fn hump_eval(m: u64, u: &BigReal, beta: &BigReal) -> (BigReal, BigReal) {
    let (s, c) = u.sin_cos();
    let (s, c) = if m % 2 == 0 { (s, c) } else { (-s, -c) };
    (s - u / beta, c - beta.recip())
}

/// Safeguarded Newton on a bracket where `g` changes sign exactly once.
pub(crate) fn solve_bracketed<G>(g: G, lo: &BigReal, hi: &BigReal) -> BigReal
where
    G: Fn(&BigReal) -> (BigReal, BigReal),
{
    let digits = lo.digits().max(hi.digits());
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    let lo_sign = g(&lo).0.signum();
    let eps = BigReal::from_i64(2, digits).powi(-(bits_for_digits(digits) as i32) + 4);
    let mut x = (&lo + &hi).div_i64(2);
    let loose = BigReal::from_i64(2, digits).powi(-(bits_for_digits(digits) as i32) / 2);
    let max_iter = bits_for_digits(digits) as usize + 64;
    let mut last_newton: Option<BigReal> = None;
    for _ in 0..max_iter {
        let (fx, dfx) = g(&x);
        if fx.is_zero() {
            return x;
        }
        if fx.signum() == lo_sign {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let scale = x.abs().max_ref(&x.constant(1)).clone();
        if (&hi - &lo).abs() <= &eps * &scale {
            return x;
        }
        let newton = if dfx.is_zero() { None } else { Some(&x - &fx / &dfx) };
        if let Some(n) = &newton {
            let step = (n - &x).abs();
            if step <= &eps * &scale {
                return n.clone();
            }
            // Newton steps that stop shrinking near full precision are rounding noise.
            if let Some(prev) = &last_newton {
                if step >= *prev && step <= &loose * &scale {
                    return x;
                }
            }
            last_newton = Some(step);
        }
        let (a, b) = if lo < hi { (&lo, &hi) } else { (&hi, &lo) };
        let next = match newton {
            Some(n) if n > *a && n < *b => n,
            _ => (a + b).div_i64(2),
        };
        let step = (&next - &x).abs();
        x = next;
        if step <= &eps * &scale {
            return x;
        }
    }
    x
}

fn make_root(u: BigReal, beta: &BigReal, digits: u32) -> NullRoot {
    let tau = u.mul_i64(2) / beta;
    let phi = u.mul_i64(2);
    let dfdtau = null_f_dtau(&tau, beta);
    let k_factor = k_factor_at_phase(&phi, beta);
    let tangent = dfdtau.abs() < derivative_tolerance(digits);
    NullRoot {
        tau,
        phi,
        branch: Branch::Retarded,
        dfdtau,
        k_factor,
        tangent,
    }
}

/// All retarded null roots in `(0, 2]`, ascending in `τ`.
///
/// Advanced roots are the mirror images ([`NullRoot::mirror`]). Roots whose
/// derivative is below the tangency threshold are returned with
/// `tangent = true`.
pub fn find_roots(beta: &BigReal, digits: u32) -> Result<Vec<NullRoot>> {
    check_superluminal(beta)?;
    let beta = beta.with_digits(digits);
    let digits = beta.digits();
    let pi = BigReal::pi(digits);
    let min_tau = BigReal::from_f64(MIN_TAU, digits);
    let mut roots = Vec::new();
    for hump in humps(&beta) {
        let m = hump.index;
        let g = |u: &BigReal| hump_eval(m, u, &beta);
        let start = pi.mul_i64(m as i64);
        let end = pi.mul_i64(m as i64 + 1);
        if m == 0 {
            let u = solve_bracketed(g, &hump.peak_u, &end);
            let root = make_root(u, &beta, digits);
            if root.tau >= min_tau {
                roots.push(root);
            }
        } else if hump.height.is_positive() {
            let left = solve_bracketed(g, &start, &hump.peak_u);
            let right = solve_bracketed(g, &hump.peak_u, &end);
            roots.push(make_root(left, &beta, digits));
            roots.push(make_root(right, &beta, digits));
        }
    }
    Ok(roots)
}

/// Number of null roots `N(β)`, evaluated at `β`'s own precision.
///
/// Fails with [`Error::AmbiguousCount`] when a peak height is within
/// rounding of zero, i.e. `β` is numerically on top of a singular velocity.
pub fn count_roots(beta: &BigReal) -> Result<usize> {
    check_superluminal(beta)?;
    let tol = height_tolerance(beta.digits());
    let mut n = 0;
    let mut ambiguous = 0;
    for hump in humps(beta) {
        if hump.index == 0 {
            n += 1;
        } else if hump.height.abs() <= tol {
            ambiguous += 1;
        } else if hump.height.is_positive() {
            n += 2;
        }
    }
    if ambiguous > 0 {
        return Err(Error::AmbiguousCount {
            lower: n,
            upper: n + 2 * ambiguous,
        });
    }
    Ok(n)
}

/// `g(φ) = 2 − 2cos φ − φ sin φ`; zero exactly where `f = ∂f/∂τ = 0`.
pub fn tangency_g(phi: &BigReal) -> BigReal {
    let (s, c) = phi.sin_cos();
    phi.constant(2) - c.mul_i64(2) - phi * s
}

fn tangency_g_prime(phi: &BigReal) -> BigReal {
    let (s, c) = phi.sin_cos();
    &s - phi * &c
}

/// `β = √(φ / sin φ)`.
pub fn beta_from_phi(phi: &BigReal) -> Result<BigReal> {
    let s = phi.sin();
    if !s.is_positive() {
        return Err(Error::Domain(format!(
            "sin φ = {} is not positive; β would not be real",
            s.to_sci_string(6)
        )));
    }
    Ok((phi / &s).sqrt())
}

const GUARD_DIGITS: u32 = 10;

fn singular_velocity(k: u32, digits: u32) -> Result<SingularVelocity> {
    let work = digits + GUARD_DIGITS;
    let pi = BigReal::pi(work);
    let base = pi.mul_i64(2 * i64::from(k));
    // On (2πk, 2π(k+1)) the only sign change of g with sin φ > 0 lies in
    // the first half; g vanishes trivially at the left end.
    const SAMPLES: i64 = 64;
    let step = pi.div_i64(SAMPLES);
    let mut prev = base.clone();
    let mut prev_sign = tangency_g(&(&base + &step.div_i64(1 << 20))).signum();
    for j in 1..=SAMPLES {
        let at = &base + &step.mul_i64(j);
        let sign = tangency_g(&at).signum();
        if sign != 0 && sign != prev_sign {
            let lo = if j == 1 { &base + &step.div_i64(1 << 20) } else { prev.clone() };
            let phi = solve_bracketed(|p| (tangency_g(p), tangency_g_prime(p)), &lo, &at);
            let beta = beta_from_phi(&phi)?;
            return Ok(SingularVelocity {
                index: k,
                phi: phi.with_digits(digits),
                beta: beta.with_digits(digits),
            });
        }
        prev = at;
        prev_sign = sign;
    }
    Err(Error::Domain(format!("no tangency root bracketed for k = {k}")))
}

/// The first `k_max` singular velocities, ascending.
pub fn singular_velocities(k_max: u32, digits: u32) -> Result<Vec<SingularVelocity>> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    (1..=k_max).map(|k| singular_velocity(k, digits)).collect()
}

/// Singular velocities within `[lo, hi]`.
pub fn singular_velocities_between(lo: &BigReal, hi: &BigReal, digits: u32) -> Result<Vec<SingularVelocity>> {
    let mut out = Vec::new();
    for k in 1.. {
        let sv = singular_velocity(k, digits)?;
        if sv.beta > *hi {
            break;
        }
        if sv.beta >= *lo {
            out.push(sv);
        }
    }
    Ok(out)
}

/// The double root at a singular velocity, `τ = φ_k/β_k`.
pub fn merging_root(sv: &SingularVelocity) -> NullRoot {
    make_root(sv.phi.div_i64(2), &sv.beta, sv.beta.digits())
}

/// Plain-text eigenvalue table: one `β_k` per line at `digits` significant digits.
pub fn write_eigenvalues<W: Write>(list: &[SingularVelocity], digits: u32, mut out: W) -> std::io::Result<()> {
    for sv in list {
        writeln!(out, "{}", sv.beta.to_sci_string(digits))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(s: &str) -> BigReal {
        BigReal::parse(s, 40).unwrap()
    }

    #[test]
    fn f_vanishes_at_origin() {
        assert!(null_f(&big("0"), &big("3.7")).is_zero());
    }

    #[test]
    fn f_small_tau_expansion() {
        let f = null_f(&big("1e-6"), &big("2"));
        let leading = 3e-12;
        assert!((f.to_f64() - leading).abs() < 1e-22);
    }

    #[test]
    fn f_negative_beyond_two() {
        for b in ["1.5", "7", "40.2"] {
            assert!(null_f(&big("2.5"), &big(b)).is_negative());
        }
    }

    #[test]
    fn beta_two_has_one_root_in_the_sampled_bracket() {
        let roots = find_roots(&big("2"), 40).unwrap();
        assert_eq!(roots.len(), 1);
        let tau = roots[0].tau.to_f64();
        assert!(tau > 1.89 && tau < 1.90, "tau = {tau}");
        assert!(null_f(&roots[0].tau, &big("2")).abs() < BigReal::pow10(-35, 40));
    }

    #[test]
    fn root_counts_below_and_between_eigenvalues() {
        assert_eq!(count_roots(&big("1.5")).unwrap(), 1);
        assert_eq!(find_roots(&big("1.5"), 30).unwrap().len(), 1);
        assert_eq!(count_roots(&big("2")).unwrap(), 1);
        assert_eq!(count_roots(&big("5")).unwrap(), 3);
        assert_eq!(find_roots(&big("5"), 30).unwrap().len(), 3);
        assert_eq!(count_roots(&big("8")).unwrap(), 5);
    }

    #[test]
    fn roots_are_ascending_confined_and_sign_changing() {
        let beta = big("23.1");
        let roots = find_roots(&beta, 40).unwrap();
        assert_eq!(roots.len(), count_roots(&beta).unwrap());
        let h = big("1e-20");
        for w in roots.windows(2) {
            assert!(w[0].tau < w[1].tau);
        }
        for r in &roots {
            assert!(r.tau.is_positive() && r.tau <= big("2"));
            assert!(!r.tangent);
            let before = null_f(&(&r.tau - &h), &beta);
            let after = null_f(&(&r.tau + &h), &beta);
            assert_ne!(before.signum(), after.signum());
        }
    }

    #[test]
    fn beta_must_be_superluminal() {
        assert!(matches!(find_roots(&big("1"), 30), Err(Error::Domain(_))));
        assert!(matches!(count_roots(&big("0.5")), Err(Error::Domain(_))));
    }

    #[test]
    fn merging_pair_is_resolved() {
        let b1 = singular_velocities(1, 80).unwrap().remove(0).beta;
        let beta = &b1 + &BigReal::pow10(-70, 80);
        let roots = find_roots(&beta, 80).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots[1].tau < roots[2].tau);
        // Separation and slope both scale like sqrt(δ).
        let gap = (&roots[2].tau - &roots[1].tau).to_f64();
        assert!(gap > 1e-37 && gap < 1e-33, "gap = {gap:e}");
        assert!(roots[1].dfdtau.abs() < BigReal::pow10(-30, 80));
        assert!(roots.iter().all(|r| !r.tangent));
    }

    #[test]
    fn zero_slope_is_flagged_tangent() {
        let sv = singular_velocities(1, 60).unwrap().remove(0);
        let root = make_root(sv.phi.div_i64(2), &sv.beta, 60);
        assert!(root.tangent);
        assert!(root.k_factor.abs() < BigReal::pow10(-25, 60));
        let ordinary = &find_roots(&BigReal::from_i64(2, 60), 60).unwrap()[0];
        assert!(!ordinary.tangent);
    }

    #[test]
    fn count_is_ambiguous_on_an_eigenvalue() {
        let b1 = singular_velocities(1, 60).unwrap().remove(0).beta;
        match count_roots(&b1) {
            Err(Error::AmbiguousCount { lower, upper }) => assert_eq!((lower, upper), (1, 3)),
            other => panic!("expected ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn tangency_g_values() {
        let two_pi = BigReal::pi(40).mul_i64(2);
        assert!(tangency_g(&two_pi).abs() < BigReal::pow10(-35, 40));
        let pi = BigReal::pi(40);
        assert!((tangency_g(&pi) - pi.constant(4)).abs() < BigReal::pow10(-35, 40));
    }

    #[test]
    fn tangency_g_factorization() {
        // g(φ) = 2 sin(φ/2) (2 sin(φ/2) − φ cos(φ/2))
        for s in ["0.3", "2.9", "8.98", "17.2", "33.3"] {
            let phi = big(s);
            let half = phi.div_i64(2);
            let (sh, ch) = half.sin_cos();
            let factored = sh.mul_i64(2) * (sh.mul_i64(2) - &phi * &ch);
            assert!((tangency_g(&phi) - factored).abs() < BigReal::pow10(-35, 40));
        }
        // ...so φ = 2x with tan x = x is a root. x1 from the fixed point x = π + atan(x).
        let pi = BigReal::pi(40);
        let mut x = big("4.5");
        for _ in 0..200 {
            x = &pi + &x.atan();
        }
        assert!(tangency_g(&x.mul_i64(2)).abs() < BigReal::pow10(-33, 40));
    }

    #[test]
    fn beta_from_phi_cases() {
        let phi1 = big("8.98681891581812835061576185456064416443");
        let b = beta_from_phi(&phi1).unwrap();
        assert!((b.to_f64() - 4.603338848751700).abs() < 1e-14);
        let tiny = beta_from_phi(&big("1e-20")).unwrap();
        assert!((tiny.to_f64() - 1.0).abs() < 1e-15);
        assert!(matches!(beta_from_phi(&big("3.5")), Err(Error::Domain(_))));
    }

    #[test]
    fn singular_velocities_are_increasing_tangencies() {
        let svs = singular_velocities(6, 40).unwrap();
        assert!((svs[0].beta.to_f64() - 4.603338848751700).abs() < 1e-14);
        assert!((svs[1].beta.to_f64() - 7.789705767492725).abs() < 1e-14);
        for w in svs.windows(2) {
            assert!(w[0].beta < w[1].beta);
        }
        for sv in &svs {
            assert!(tangency_g(&sv.phi).abs() < BigReal::pow10(-33, 40));
            assert!(sv.phi.sin().is_positive());
        }
        assert!(singular_velocities(0, 40).is_err());
    }

    #[test]
    fn eigenvalue_window_lookup() {
        let svs = singular_velocities_between(&big("5"), &big("15"), 30).unwrap();
        let idx: Vec<u32> = svs.iter().map(|s| s.index).collect();
        assert_eq!(idx, vec![2, 3, 4]);
    }

    #[test]
    fn eigenvalue_export_is_one_per_line() {
        let svs = singular_velocities(2, 30).unwrap();
        let mut buf = Vec::new();
        write_eigenvalues(&svs, 30, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("4.6033388487517003525565820291"), "{}", lines[0]);
    }
}
