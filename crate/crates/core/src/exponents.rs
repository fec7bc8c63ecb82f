//! Critical exponents of the two-dimensional self-avoiding walk.

/// Exact rational `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub const fn new(num: i64, den: i64) -> Self {
        Rational { num, den }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn reduced(num: i64, den: i64) -> Self {
        fn gcd(a: i64, b: i64) -> i64 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        let g = gcd(num, den).max(1) * den.signum();
        Rational::new(num / g, den / g)
    }

}

impl std::ops::Add for Rational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::reduced(self.num * o.den + o.num * self.den, self.den * o.den)
    }
}

impl std::ops::Sub for Rational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + Rational::new(-o.num, o.den)
    }
}

impl std::ops::Mul for Rational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::reduced(self.num * o.num, self.den * o.den)
    }
}

impl std::ops::Div for Rational {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        Self::reduced(self.num * o.den, self.den * o.num)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CriticalExponents {
    pub nu: Rational,
    pub gamma: Rational,
    /// Half-plane survival exponent.
    pub rho: Rational,
    pub p_radial: Rational,
    pub p_chordal: Rational,
}

pub const SAW: CriticalExponents = CriticalExponents {
    nu: Rational::new(3, 4),
    gamma: Rational::new(43, 32),
    rho: Rational::new(25, 64),
    p_radial: Rational::new(-61, 48),
    p_chordal: Rational::new(-3, 4),
};

impl Default for CriticalExponents {
    fn default() -> Self {
        SAW
    }
}
