//! Closed intervals with outward rounding.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        debug_assert!(!(lo > hi), "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Interval {
        Interval { lo: v, hi: v }
    }

    /// `v ± rel·(1 + |v|)`.
    pub fn around(v: f64, rel: f64) -> Interval {
        let r = rel * (1.0 + v.abs());
        Interval::new((v - r).next_down(), (v + r).next_up())
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn add(self, o: Interval) -> Interval {
        Interval::new((self.lo + o.lo).next_down(), (self.hi + o.hi).next_up())
    }

    pub fn sub(self, o: Interval) -> Interval {
        Interval::new((self.lo - o.hi).next_down(), (self.hi - o.lo).next_up())
    }

    pub fn mul(self, o: Interval) -> Interval {
        let c = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo.next_down(), hi.next_up())
    }

    /// Quotient; an interval containing zero in the denominator gives the
    /// whole line.
    pub fn div(self, o: Interval) -> Interval {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return Interval::new(f64::NEG_INFINITY, f64::INFINITY);
        }
        let c = [
            self.lo / o.lo,
            self.lo / o.hi,
            self.hi / o.lo,
            self.hi / o.hi,
        ];
        let lo = c
            .iter()
            .copied()
            .filter(|v| !v.is_nan())
            .fold(f64::INFINITY, f64::min);
        let hi = c
            .iter()
            .copied()
            .filter(|v| !v.is_nan())
            .fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo.next_down(), hi.next_up())
    }

    pub fn recip(self) -> Interval {
        Interval::point(1.0).div(self)
    }

    pub fn scale(self, c: f64) -> Interval {
        self.mul(Interval::point(c))
    }

    pub fn intersect(self, o: Interval) -> Option<Interval> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn division_by_straddling_interval_is_unbounded() {
        let q = Interval::point(1.0).div(Interval::new(-1.0, 1.0));
        assert_eq!(q.lo, f64::NEG_INFINITY);
        assert_eq!(q.hi, f64::INFINITY);
    }

    proptest! {
        #[test]
        fn operations_enclose_point_results(a in -1e3f64..1e3, b in -1e3f64..1e3, c in 0.5f64..1e3) {
            let (ia, ib, ic) = (Interval::point(a), Interval::point(b), Interval::point(c));
            prop_assert!(ia.add(ib).contains(a + b));
            prop_assert!(ia.sub(ib).contains(a - b));
            prop_assert!(ia.mul(ib).contains(a * b));
            prop_assert!(ia.div(ic).contains(a / c));
            prop_assert!(ic.recip().contains(1.0 / c));
        }
    }
}
