use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest prime accepted for `p`.
pub const MAX_PRIME: u32 = 13;
/// Largest accepted dimension.
pub const MAX_DIM: u32 = 12;
/// Upper bound on `N = p^n` for the dense representations used here.
pub const MAX_POINTS: u64 = 10_000_000;

/// A point of `F_p^n`, stored as its flat index.
///
/// The flat index is the little-endian base-`p` number whose digit `i` is
/// coordinate `i`. Points and frequencies share this representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub u32);

impl Point {
    pub const ZERO: Point = Point(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The ambient group `V = F_p^n` with `p` an odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct SpaceDescriptor {
    p: u32,
    n: u32,
    size: u32,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    p: u32,
    n: u32,
}

impl TryFrom<RawSpace> for SpaceDescriptor {
    type Error = Error;
    fn try_from(raw: RawSpace) -> Result<Self> {
        SpaceDescriptor::new(raw.p, raw.n)
    }
}

impl From<SpaceDescriptor> for RawSpace {
    fn from(s: SpaceDescriptor) -> Self {
        RawSpace { p: s.p, n: s.n }
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl SpaceDescriptor {
    pub fn new(p: u32, n: u32) -> Result<Self> {
        if !is_prime(p) || p == 2 {
            return invalid(format!("p = {p} must be an odd prime"));
        }
        if p > MAX_PRIME {
            return Err(Error::CapExceeded(format!("p = {p} exceeds the cap p <= {MAX_PRIME}")));
        }
        if n == 0 {
            return invalid("dimension n must be at least 1");
        }
        if n > MAX_DIM {
            return Err(Error::CapExceeded(format!("n = {n} exceeds the cap n <= {MAX_DIM}")));
        }
        let size = (p as u64).pow(n);
        if size > MAX_POINTS {
            return Err(Error::CapExceeded(format!(
                "N = {p}^{n} = {size} exceeds the cap N <= {MAX_POINTS}"
            )));
        }
        Ok(SpaceDescriptor { p, n, size: size as u32 })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Cardinality `N = p^n`.
    #[inline]
    pub fn size(&self) -> usize {
        self.size as usize
    }

    /// The inverse of 2 in `GF(p)`.
    #[inline]
    pub fn inv2(&self) -> u32 {
        (self.p + 1) / 2
    }

    pub fn point(&self, index: u64) -> Result<Point> {
        if index >= self.size as u64 {
            return invalid(format!("index {index} out of range for N = {}", self.size));
        }
        Ok(Point(index as u32))
    }

    pub fn contains(&self, x: Point) -> bool {
        x.0 < self.size
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + Clone {
        (0..self.size).map(Point)
    }

    /// Little-endian base-`p` digits of `x` (digit `i` is coordinate `i`).
    pub fn digits(&self, x: Point) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.n as usize);
        let mut v = x.0;
        for _ in 0..self.n {
            out.push((v % self.p) as u8);
            v /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u8]) -> Result<Point> {
        if digits.len() != self.n as usize {
            return invalid(format!("expected {} digits, got {}", self.n, digits.len()));
        }
        if let Some(d) = digits.iter().find(|&&d| d as u32 >= self.p) {
            return invalid(format!("digit {d} is not below p = {}", self.p));
        }
        Ok(self.pack(digits))
    }

    pub(crate) fn pack(&self, digits: &[u8]) -> Point {
        let idx = digits.iter().rev().fold(0u32, |acc, &d| acc * self.p + d as u32);
        Point(idx)
    }

    #[inline]
    pub fn digit(&self, x: Point, i: usize) -> u32 {
        (x.0 / self.p.pow(i as u32)) % self.p
    }

    #[inline]
    fn combine(&self, a: Point, b: Point, f: impl Fn(u32, u32) -> u32) -> Point {
        let p = self.p;
        let (mut x, mut y, mut out, mut w) = (a.0, b.0, 0, 1);
        for _ in 0..self.n {
            out += f(x % p, y % p) * w;
            w *= p;
            x /= p;
            y /= p;
        }
        Point(out)
    }

    #[inline]
    pub fn add(&self, a: Point, b: Point) -> Point {
        let p = self.p;
        self.combine(a, b, |x, y| (x + y) % p)
    }

    #[inline]
    pub fn sub(&self, a: Point, b: Point) -> Point {
        let p = self.p;
        self.combine(a, b, |x, y| (x + p - y) % p)
    }

    #[inline]
    pub fn neg(&self, a: Point) -> Point {
        self.sub(Point::ZERO, a)
    }

    /// `c * a` for a scalar `c` (reduced mod `p`).
    #[inline]
    pub fn scale(&self, c: u32, a: Point) -> Point {
        let p = self.p;
        let c = c % p;
        self.combine(a, Point::ZERO, |x, _| (x * c) % p)
    }

    /// `s * a + t * b` in one pass.
    #[inline]
    pub fn lin2(&self, s: u32, a: Point, t: u32, b: Point) -> Point {
        let p = self.p;
        let (s, t) = (s % p, t % p);
        self.combine(a, b, |x, y| (s * x + t * y) % p)
    }

    /// The pairing `Σ a_i b_i mod p`. The character is `e(pairing / p)`.
    #[inline]
    pub fn pairing(&self, a: Point, b: Point) -> u32 {
        let p = self.p;
        let (mut x, mut y, mut acc) = (a.0, b.0, 0);
        for _ in 0..self.n {
            acc += (x % p) * (y % p);
            x /= p;
            y /= p;
        }
        acc % p
    }

    /// Checked sum: both operands must belong to this space.
    pub fn checked_add(&self, a: Point, b: Point) -> Result<Point> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    /// Checked pairing: both operands must belong to this space.
    pub fn checked_pairing(&self, a: Point, b: Point) -> Result<u32> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.pairing(a, b))
    }

    fn check(&self, x: Point) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            invalid(format!("point {x} is not in F_{}^{}", self.p, self.n))
        }
    }

    pub(crate) fn ensure_same(&self, other: &SpaceDescriptor) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch { left: self.to_string(), right: other.to_string() })
        }
    }
}

impl std::fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F_{}^{}", self.p, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u32, n: u32) -> SpaceDescriptor {
        SpaceDescriptor::new(p, n).unwrap()
    }

    #[test]
    fn codec_examples() {
        let s = f(3, 2);
        assert_eq!(s.digits(Point(5)), vec![2, 1]);
        assert_eq!(s.from_digits(&[0, 0]).unwrap(), Point(0));
        assert_eq!(f(5, 3).digits(Point(124)), vec![4, 4, 4]);
    }

    #[test]
    fn codec_errors() {
        let s = f(3, 2);
        assert!(s.point(9).is_err());
        assert!(s.from_digits(&[3, 0]).is_err());
        assert!(s.from_digits(&[0]).is_err());
    }

    #[test]
    fn construction_caps() {
        assert!(SpaceDescriptor::new(2, 3).is_err());
        assert!(SpaceDescriptor::new(9, 3).is_err());
        assert!(matches!(SpaceDescriptor::new(17, 2), Err(Error::CapExceeded(_))));
        assert!(matches!(SpaceDescriptor::new(3, 13), Err(Error::CapExceeded(_))));
        assert!(matches!(SpaceDescriptor::new(13, 7), Err(Error::CapExceeded(_))));
        assert!(SpaceDescriptor::new(3, 0).is_err());
        assert_eq!(f(13, 6).size(), 4_826_809);
    }

    #[test]
    fn group_op_examples() {
        let s = f(3, 2);
        let a = s.from_digits(&[1, 2]).unwrap();
        let b = s.from_digits(&[2, 2]).unwrap();
        assert_eq!(s.digits(s.add(a, b)), vec![0, 1]);
        assert_eq!(s.pairing(a, b), 0);
        assert_eq!(s.digits(s.scale(2, a)), vec![2, 1]);
        assert_eq!(s.add(a, s.neg(a)), Point::ZERO);
        assert!(s.checked_add(a, Point(9)).is_err());
        assert!(s.checked_pairing(Point(10), b).is_err());
    }

    proptest! {
        #[test]
        fn codec_round_trip(p in prop::sample::select(vec![3u32, 5, 7, 11, 13]), n in 1u32..5, raw in any::<u32>()) {
            let s = f(p, n);
            let x = Point(raw % s.size() as u32);
            prop_assert_eq!(s.from_digits(&s.digits(x)).unwrap(), x);
        }

        #[test]
        fn pairing_is_bilinear(raw in prop::array::uniform3(0u32..243), c in 0u32..3) {
            let s = f(3, 5);
            let [a, b, x] = raw.map(Point);
            prop_assert_eq!(s.pairing(a, b), s.pairing(b, a));
            prop_assert_eq!(
                s.pairing(s.add(a, s.scale(c, b)), x),
                (s.pairing(a, x) + c * s.pairing(b, x)) % 3
            );
            prop_assert_eq!(s.sub(s.add(a, b), b), a);
        }
    }
}
