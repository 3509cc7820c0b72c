use std::fmt;

use crate::error::{Error, Result};

/// A real parameter interval. Periodic intervals are `[lo, hi)` with
/// wrap-around; values are reduced into the fundamental period before any
/// bound check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
    pub periodic: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
            periodic: false,
        }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
            periodic: false,
        }
    }

    /// `(lo, hi]`.
    pub fn open_closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: true,
            hi_open: false,
            periodic: false,
        }
    }

    /// `[lo, hi)` with wrap-around.
    pub fn periodic(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: false,
            hi_open: true,
            periodic: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidArgument(format!("degenerate interval {self}")));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        if self.periodic {
            return x.is_finite();
        }
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    /// Periodic wrap into `[lo, hi)`; identity for non-periodic intervals.
    pub fn wrap(&self, x: f64) -> f64 {
        if self.periodic {
            let w = self.lo + (x - self.lo).rem_euclid(self.length());
            // rem_euclid can round up to exactly the period.
            if w >= self.hi {
                self.lo
            } else {
                w
            }
        } else {
            x
        }
    }

    /// Wraps `x` and checks membership, naming `param` in the error.
    pub fn admit(&self, param: &str, x: f64) -> Result<f64> {
        let w = self.wrap(x);
        if self.contains(w) {
            Ok(w)
        } else {
            Err(Error::DomainViolation {
                param: param.to_string(),
                value: x,
                domain: self.to_string(),
            })
        }
    }

    /// Whether `[a, b]` lies inside the interval (closure for open ends).
    pub fn covers(&self, a: f64, b: f64) -> bool {
        self.periodic || (a >= self.lo && b <= self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_open { '(' } else { '[' };
        let r = if self.hi_open { ')' } else { ']' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)?;
        if self.periodic {
            write!(f, " periodic")?;
        }
        Ok(())
    }
}
