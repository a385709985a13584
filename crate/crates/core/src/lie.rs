//! The Lie algebra su(2) in a fixed basis.
//!
//! Elements are coefficient triples in the basis `τ₁, τ₂, τ₃` with
//! `[τᵢ, τⱼ] = εᵢⱼₖ τₖ`. In the defining representation `τᵢ = -(i/2)σᵢ`, and the
//! invariant inner product is `⟨X, Y⟩ = -tr(XY)`, which gives `⟨τᵢ, τⱼ⟩ = ½δᵢⱼ`.
//! With this pairing a unit-charge instanton has Yang–Mills energy `8π²`.
//!
//! Arithmetic only needs `Copy + Num`, so exact rationals work as well as floats.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{Num, Zero};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LieValue<T>(pub [T; 3]);

impl<T: Copy + Num> LieValue<T> {
    #[inline]
    pub fn new(c1: T, c2: T, c3: T) -> Self {
        LieValue([c1, c2, c3])
    }

    /// Basis element `τ_{i+1}` (zero based).
    pub fn basis(i: usize) -> Self {
        let mut c = [T::zero(); 3];
        c[i] = T::one();
        LieValue(c)
    }

    #[inline]
    pub fn zero() -> Self {
        LieValue([T::zero(); 3])
    }

    #[inline]
    pub fn coeffs(&self) -> [T; 3] {
        self.0
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        LieValue([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    /// Lie bracket: the cross product of coefficient vectors.
    #[inline]
    pub fn bracket(self, other: Self) -> Self {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        LieValue([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    /// Euclidean dot product of the coefficients, i.e. `2⟨X, Y⟩`.
    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    /// Ad-invariant inner product `⟨X, Y⟩ = -tr(XY)`.
    #[inline]
    pub fn inner(self, other: Self) -> T {
        self.dot(other) / (T::one() + T::one())
    }

    /// `|X|² = ⟨X, X⟩`.
    #[inline]
    pub fn norm_sq(self) -> T {
        self.inner(self)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Applies a constant adjoint rotation given as a row-major 3×3 matrix.
    pub fn rotate(self, r: &[[T; 3]; 3]) -> Self {
        let c = self.0;
        LieValue([
            r[0][0] * c[0] + r[0][1] * c[1] + r[0][2] * c[2],
            r[1][0] * c[0] + r[1][1] * c[1] + r[1][2] * c[2],
            r[2][0] * c[0] + r[2][1] * c[1] + r[2][2] * c[2],
        ])
    }
}

/// `[X, Y]`.
#[inline]
pub fn bracket<T: Copy + Num>(x: LieValue<T>, y: LieValue<T>) -> LieValue<T> {
    x.bracket(y)
}

/// `⟨X, Y⟩`.
#[inline]
pub fn inner<T: Copy + Num>(x: LieValue<T>, y: LieValue<T>) -> T {
    x.inner(y)
}

impl<T: Copy + Num> Add for LieValue<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        LieValue([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl<T: Copy + Num> Sub for LieValue<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        LieValue([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl<T: Copy + Num + Neg<Output = T>> Neg for LieValue<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        LieValue([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl<T: Copy + Num> Mul<T> for LieValue<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Copy + Num> AddAssign for LieValue<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Copy + Num> SubAssign for LieValue<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Copy + Num> Zero for LieValue<T> {
    fn zero() -> Self {
        LieValue([T::zero(); 3])
    }
    fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn t(i: usize) -> LieValue<f64> {
        LieValue::basis(i)
    }

    #[test]
    fn structure_constants() {
        assert_eq!(bracket(t(0), t(1)), t(2));
        assert_eq!(bracket(t(1), t(2)), t(0));
        assert_eq!(bracket(t(2), t(0)), t(1));
        assert_eq!(bracket(t(1), t(0)), -t(2));
    }

    #[test]
    fn bracket_examples() {
        let x = LieValue::new(0.3, -1.2, 2.0);
        assert!(bracket(x, x).is_zero());
        assert_eq!(bracket(t(0) + t(1), t(1)), t(2));
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(t(0), t(0)), 0.5);
        assert_eq!(inner(t(0), t(1)), 0.0);
        assert_eq!(inner(t(2) * 2.0, t(2) * 3.0), 3.0);
    }

    type Q = Ratio<i64>;

    fn q(n: i64, d: i64) -> Q {
        Ratio::new(n, d)
    }

    #[test]
    fn jacobi_is_exact_over_rationals() {
        let x = LieValue::new(q(1, 3), q(-2, 7), q(5, 11));
        let y = LieValue::new(q(-4, 5), q(1, 2), q(3, 13));
        let z = LieValue::new(q(2, 9), q(7, 3), q(-1, 17));
        let j = x.bracket(y).bracket(z) + y.bracket(z).bracket(x) + z.bracket(x).bracket(y);
        assert!(j.is_zero());
        assert_eq!(x.bracket(y).inner(z), x.inner(y.bracket(z)));
    }

    #[test]
    fn random_triples_jacobi_and_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut draw = || LieValue::<f64>::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let mut worst_j: f64 = 0.0;
        let mut worst_ad: f64 = 0.0;
        for _ in 0..10_000 {
            let (x, y, z) = (draw(), draw(), draw());
            let j = x.bracket(y).bracket(z) + y.bracket(z).bracket(x) + z.bracket(x).bracket(y);
            worst_j = worst_j.max(j.0.iter().fold(0.0f64, |m, c| m.max(c.abs())));
            worst_ad = worst_ad.max((x.bracket(y).inner(z) - x.inner(y.bracket(z))).abs());
        }
        assert!(worst_j <= 1e-14, "jacobi residual {worst_j}");
        assert!(worst_ad <= 1e-14, "ad-invariance residual {worst_ad}");
    }

    fn lie() -> impl Strategy<Value = LieValue<f64>> {
        prop::array::uniform3(-1.0f64..1.0).prop_map(LieValue)
    }

    proptest! {
        #[test]
        fn bracket_antisymmetric(x in lie(), y in lie()) {
            prop_assert_eq!(x.bracket(y), -y.bracket(x));
        }

        #[test]
        fn norm_nonnegative(x in lie()) {
            prop_assert!(x.norm_sq() >= 0.0);
        }
    }
}
