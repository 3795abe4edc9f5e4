use super::{BigReal, Vec3};

/// Neumaier-compensated accumulator at a fixed working precision.
///
/// Terms are added in the order given; callers that need reproducible sums
/// across precision runs must keep that order stable.
#[derive(Clone, Debug)]
pub struct CompensatedSum {
    sum: BigReal,
    compensation: BigReal,
}

impl CompensatedSum {
    pub fn new(digits: u32) -> Self {
        CompensatedSum {
            sum: BigReal::zero(digits),
            compensation: BigReal::zero(digits),
        }
    }

    pub fn add(&mut self, term: &BigReal) {
        let t = &self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.compensation = &self.compensation + ((&self.sum - &t) + term);
        } else {
            self.compensation = &self.compensation + ((term - &t) + &self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> BigReal {
        &self.sum + &self.compensation
    }
}

/// Component-wise compensated sum of 3-vectors.
#[derive(Clone, Debug)]
pub struct CompensatedVecSum {
    x: CompensatedSum,
    y: CompensatedSum,
    z: CompensatedSum,
}

impl CompensatedVecSum {
    pub fn new(digits: u32) -> Self {
        CompensatedVecSum {
            x: CompensatedSum::new(digits),
            y: CompensatedSum::new(digits),
            z: CompensatedSum::new(digits),
        }
    }

    pub fn add(&mut self, v: &Vec3) {
        self.x.add(&v.x);
        self.y.add(&v.y);
        self.z.add(&v.z);
    }

    pub fn value(&self) -> Vec3 {
        Vec3::new(self.x.value(), self.y.value(), self.z.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_term_between_large_cancelling_ones() {
        // Plain left-to-right summation at 20 digits loses the 1 entirely.
        let big = BigReal::parse("1e25", 20).unwrap();
        let one = BigReal::one(20);
        let naive = (&big + &one) - &big;
        assert!(naive.is_zero());

        let mut acc = CompensatedSum::new(20);
        acc.add(&big);
        acc.add(&one);
        acc.add(&-&big);
        assert_eq!(acc.value().to_f64(), 1.0);
    }

    #[test]
    fn vector_sum() {
        let mut acc = CompensatedVecSum::new(20);
        acc.add(&Vec3::from_f64([1.0, 2.0, 3.0], 20));
        acc.add(&Vec3::from_f64([0.5, -2.0, 0.0], 20));
        assert_eq!(acc.value().to_f64(), [1.5, 0.0, 3.0]);
    }
}
