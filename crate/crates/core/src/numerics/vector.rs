use std::ops::{Add, Neg, Sub};

use super::BigReal;

/// Cartesian 3-vector of [`BigReal`] components.
#[derive(Clone, Debug, PartialEq)]
pub struct Vec3 {
    pub x: BigReal,
    pub y: BigReal,
    pub z: BigReal,
}

impl Vec3 {
    pub fn new(x: BigReal, y: BigReal, z: BigReal) -> Self {
        Vec3 { x, y, z }
    }

    pub fn zeros(digits: u32) -> Self {
        let z = BigReal::zero(digits);
        Vec3::new(z.clone(), z.clone(), z)
    }

    pub fn from_f64(v: [f64; 3], digits: u32) -> Self {
        Vec3::new(
            BigReal::from_f64(v[0], digits),
            BigReal::from_f64(v[1], digits),
            BigReal::from_f64(v[2], digits),
        )
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.x.to_f64(), self.y.to_f64(), self.z.to_f64()]
    }

    pub fn digits(&self) -> u32 {
        self.x.digits().max(self.y.digits()).max(self.z.digits())
    }

    pub fn dot(&self, o: &Vec3) -> BigReal {
        &self.x * &o.x + &self.y * &o.y + &self.z * &o.z
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3::new(
            &self.y * &o.z - &self.z * &o.y,
            &self.z * &o.x - &self.x * &o.z,
            &self.x * &o.y - &self.y * &o.x,
        )
    }

    pub fn scale(&self, s: &BigReal) -> Vec3 {
        Vec3::new(&self.x * s, &self.y * s, &self.z * s)
    }

    pub fn norm(&self) -> BigReal {
        self.dot(self).sqrt()
    }

    pub fn unit(&self) -> Vec3 {
        self.scale(&self.norm().recip())
    }

    pub fn max_abs(&self) -> BigReal {
        let ax = self.x.abs();
        let ay = self.y.abs();
        let az = self.z.abs();
        ax.max_ref(&ay).max_ref(&az).clone()
    }
}

impl Add<&Vec3> for &Vec3 {
    type Output = Vec3;
    fn add(self, o: &Vec3) -> Vec3 {
        Vec3::new(&self.x + &o.x, &self.y + &o.y, &self.z + &o.z)
    }
}

impl Sub<&Vec3> for &Vec3 {
    type Output = Vec3;
    fn sub(self, o: &Vec3) -> Vec3 {
        Vec3::new(&self.x - &o.x, &self.y - &o.y, &self.z - &o.z)
    }
}

impl Neg for &Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-&self.x, -&self.y, -&self.z)
    }
}
