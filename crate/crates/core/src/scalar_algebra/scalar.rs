use crate::error::Result;
use num_rational::BigRational;
use rand::RngCore;
use std::fmt::Debug;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroTest {
    Zero,
    NonZero,
    Unknown,
}

/// Common interface of the exact cyclotomic backend and the complex-ball backend.
/// Constructors take `&self` so that context (conductor, precision) propagates.
pub trait Scalar: Clone + Debug + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_rational_like(&self, q: &BigRational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;
    fn zero_test(&self) -> ZeroTest;
    fn conj(&self) -> Self;
    /// Double-precision approximation (real, imaginary).
    fn approx(&self) -> (f64, f64);
    /// A random element with small coefficients.
    fn random_like(&self, rng: &mut dyn RngCore, bound: i64) -> Self;
    fn is_exact(&self) -> bool;
    /// Deterministic text form used in reports.
    fn render(&self) -> String;

    fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    fn from_i64_like(&self, n: i64) -> Self {
        self.from_rational_like(&crate::scalar_algebra::qpoly::q(n))
    }

    fn pow_i(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut r = self.one_like();
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        Ok(r)
    }

    fn abs_approx(&self) -> f64 {
        let (a, b) = self.approx();
        a.hypot(b)
    }

    fn is_nonzero(&self) -> bool {
        self.zero_test() == ZeroTest::NonZero
    }

    fn is_zero_certain(&self) -> bool {
        self.zero_test() == ZeroTest::Zero
    }
}

/// Three-valued equality between two scalars.
pub fn eq_test<S: Scalar>(a: &S, b: &S) -> ZeroTest {
    a.sub(b).zero_test()
}
