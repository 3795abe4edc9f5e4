//! Independent route to the self-force: scalar component algebra on raw
//! `rug` floats and dense sign-sampling for the null roots.

use rug::ops::Pow;
use rug::Float;
use tachyon::selfforce::{self_force, Mode};
use tachyon::{BigReal, PrecisionPolicy};

const BITS: u32 = 256;

fn fl(v: f64) -> Float {
    Float::with_val(BITS, v)
}

fn parse(s: &str) -> Float {
    Float::with_val(BITS, Float::parse(s).unwrap())
}

fn null_residual(beta: &Float, tau: &Float) -> Float {
    let c = Float::with_val(BITS, beta * tau).cos();
    fl(2.0) - fl(2.0) * c - Float::with_val(BITS, tau * tau)
}

/// Roots of the null condition on `(0, 2]` by sampling and bisection.
fn null_roots(beta: &Float) -> Vec<Float> {
    let n = 40_000;
    let h = fl(2.0) / n;
    let mut roots = Vec::new();
    let mut prev_t = Float::with_val(BITS, &h * 0.5);
    let mut prev_f = null_residual(beta, &prev_t);
    for i in 1..=n {
        let t = Float::with_val(BITS, &h * i);
        let f = null_residual(beta, &t);
        if prev_f.is_sign_negative() != f.is_sign_negative() {
            let (mut lo, mut hi) = (prev_t.clone(), t.clone());
            let lo_neg = prev_f.is_sign_negative();
            for _ in 0..BITS {
                let mid = Float::with_val(BITS, &lo + &hi) / 2;
                if null_residual(beta, &mid).is_sign_negative() == lo_neg {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(Float::with_val(BITS, &lo + &hi) / 2);
        }
        prev_t = t;
        prev_f = f;
    }
    roots
}

/// Force `(F_x, F_y)` at `(1, 0, 0)` moving along `+y` from a source at phase
/// `sign · φ`. `sign = −1` is the retarded image, `+1` the advanced one.
fn image_force(beta: &Float, phi: &Float, sign: f64) -> (Float, Float) {
    let s_phi = Float::with_val(BITS, phi * sign);
    let (sin, cos) = (s_phi.clone().sin(), s_phi.cos());
    // Source position, velocity and acceleration on the unit circle.
    let (px, py) = (cos.clone(), sin.clone());
    let (vx, vy) = (-Float::with_val(BITS, beta * &sin), Float::with_val(BITS, beta * &cos));
    let b2 = Float::with_val(BITS, beta * beta);
    let (ax, ay) = (-Float::with_val(BITS, &b2 * &px), -Float::with_val(BITS, &b2 * &py));
    // Advanced fields follow from the retarded ones with velocity reversed.
    let t = -sign;
    let (ux, uy) = (Float::with_val(BITS, &vx * t), Float::with_val(BITS, &vy * t));

    let rx = fl(1.0) - &px;
    let ry = -py;
    let r = Float::with_val(BITS, &rx * &rx + &ry * &ry).sqrt();
    let (nx, ny) = (Float::with_val(BITS, &rx / &r), Float::with_val(BITS, &ry / &r));
    let k = fl(1.0) - Float::with_val(BITS, &nx * &ux + &ny * &uy);
    let k3 = k.clone().pow(3u32);
    let (wx, wy) = (Float::with_val(BITS, &nx - &ux), Float::with_val(BITS, &ny - &uy));
    // n × (w × a) = w (n·a) − a (n·w), all in-plane.
    let na = Float::with_val(BITS, &nx * &ax + &ny * &ay);
    let nw = Float::with_val(BITS, &nx * &wx + &ny * &wy);
    let vel = (fl(1.0) - &b2) / (Float::with_val(BITS, &k3 * &r) * &r);
    let acc = fl(1.0) / Float::with_val(BITS, &k3 * &r);
    let ex = Float::with_val(BITS, &wx * &vel) + (Float::with_val(BITS, &wx * &na) - Float::with_val(BITS, &ax * &nw)) * &acc;
    let ey = Float::with_val(BITS, &wy * &vel) + (Float::with_val(BITS, &wy * &na) - Float::with_val(BITS, &ay * &nw)) * &acc;
    // B = t · n × E has only a z component; v × B for v = (0, β, 0).
    let bz = Float::with_val(BITS, &nx * &ey - &ny * &ex) * t;
    let fx = ex + Float::with_val(BITS, beta * &bz);
    (fx, ey)
}

/// `(Z, F_x, F_y)` summed over every root.
fn oracle(beta: &str, mode: Mode) -> (Float, Float, Float) {
    let beta = parse(beta);
    let (mut fx, mut fy) = (fl(0.0), fl(0.0));
    for tau in null_roots(&beta) {
        let phi = Float::with_val(BITS, &beta * &tau);
        let (rx, ry) = image_force(&beta, &phi, -1.0);
        match mode {
            Mode::Retarded => {
                fx += rx;
                fy += ry;
            }
            Mode::FeynmanWheeler => {
                let (ax, ay) = image_force(&beta, &phi, 1.0);
                fx += (rx + ax) / 2;
                fy += (ry + ay) / 2;
            }
        }
    }
    (Float::with_val(BITS, -&fx), fx, fy)
}

fn rel(a: &BigReal, b: &Float) -> f64 {
    let a = Float::with_val(BITS, a.as_float());
    (Float::with_val(BITS, &a - b) / b).abs().to_f64()
}

#[test]
fn time_symmetric_z_matches_library() {
    let policy = PrecisionPolicy::default();
    for b in ["1.5", "2", "3", "5", "8.3", "12", "15", "20.1"] {
        let (z, _, _) = oracle(b, Mode::FeynmanWheeler);
        let s = self_force(&BigReal::parse(b, 50).unwrap(), Mode::FeynmanWheeler, &policy).unwrap();
        assert!(rel(&s.z_value, &z) < 1e-40, "β = {b}: {} vs {}", s.z_value.to_sci_string(30), z);
    }
}

#[test]
fn retarded_ratio_matches_library() {
    let policy = PrecisionPolicy::default();
    for b in ["2", "5", "10", "15"] {
        let (_, fx, fy) = oracle(b, Mode::Retarded);
        let eps = Float::with_val(BITS, &fy / &fx);
        let s = self_force(&BigReal::parse(b, 50).unwrap(), Mode::Retarded, &policy).unwrap();
        assert!(rel(&s.epsilon, &eps) < 1e-40, "β = {b}");
        assert!(rel(&s.radial, &fx) < 1e-40, "β = {b}");
    }
}

#[test]
fn advanced_and_retarded_azimuthal_forces_cancel() {
    for b in ["2", "7.1", "13"] {
        let (_, _, fy) = oracle(b, Mode::FeynmanWheeler);
        assert!(fy.abs() < fl(1e-60), "β = {b}");
    }
}

#[test]
fn frozen_values() {
    // Fixed from the scalar route above; the library must keep reproducing them.
    let policy = PrecisionPolicy::default();
    let z = |b: &str| self_force(&BigReal::parse(b, 50).unwrap(), Mode::FeynmanWheeler, &policy).unwrap();
    for (b, expected, n) in [
        ("2", "-1.452076213628834003689323", 1),
        ("3", "-1.647225304173020379507487", 1),
        ("5", "-2.170343113384516584272479", 3),
        ("15", "-6.321784521495398072088340", 9),
    ] {
        let s = z(b);
        assert_eq!(s.n_roots, n);
        assert!(rel(&s.z_value, &parse(expected)) < 1e-24, "β = {b}");
        let (oz, _, _) = oracle(b, Mode::FeynmanWheeler);
        assert!((Float::with_val(BITS, &oz - parse(expected)) / parse(expected)).abs() < fl(1e-24));
    }
    let eps = self_force(&BigReal::parse("2", 50).unwrap(), Mode::Retarded, &policy).unwrap().epsilon;
    assert!((eps.to_f64() - 0.560059556798397).abs() < 1e-14);
}

#[test]
fn z_keeps_its_sign_across_the_first_singular_velocity() {
    let first = "4.60333884875170035255658202910301651306739713";
    let policy = PrecisionPolicy::default();
    for (delta, roots) in [("-1e-6", 1), ("1e-6", 3)] {
        let b = Float::with_val(BITS, parse(first) + parse(delta));
        let text = b.to_string_radix(10, Some(60));
        assert_eq!(null_roots(&b).len(), roots);
        let (z, _, _) = oracle(&text, Mode::FeynmanWheeler);
        let s = self_force(&BigReal::parse(&text, 60).unwrap(), Mode::FeynmanWheeler, &policy).unwrap();
        assert!(z.is_sign_negative(), "δ = {delta}");
        assert!(rel(&s.z_value, &z) < 1e-30, "δ = {delta}");
    }
}
