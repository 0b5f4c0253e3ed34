//! 2x2 matrices over the Laurent ring.

use std::fmt;
use std::ops::Mul;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mat2 {
    pub a11: LaurentPoly,
    pub a12: LaurentPoly,
    pub a21: LaurentPoly,
    pub a22: LaurentPoly,
}

impl Mat2 {
    pub fn new(a11: LaurentPoly, a12: LaurentPoly, a21: LaurentPoly, a22: LaurentPoly) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn identity() -> Self {
        Mat2::diag(LaurentPoly::one(), LaurentPoly::one())
    }

    pub fn diag(d1: LaurentPoly, d2: LaurentPoly) -> Self {
        Mat2::new(d1, LaurentPoly::zero(), LaurentPoly::zero(), d2)
    }

    /// Parse four entries given in row-major order.
    pub fn parse(entries: [&str; 4]) -> Result<Self> {
        Ok(Mat2::new(
            LaurentPoly::parse(entries[0])?,
            LaurentPoly::parse(entries[1])?,
            LaurentPoly::parse(entries[2])?,
            LaurentPoly::parse(entries[3])?,
        ))
    }

    pub fn mul(&self, b: &Mat2) -> Mat2 {
        Mat2::new(
            &self.a11 * &b.a11 + &self.a12 * &b.a21,
            &self.a11 * &b.a12 + &self.a12 * &b.a22,
            &self.a21 * &b.a11 + &self.a22 * &b.a21,
            &self.a21 * &b.a12 + &self.a22 * &b.a22,
        )
    }

    pub fn trace(&self) -> LaurentPoly {
        &self.a11 + &self.a22
    }

    pub fn upper_right(&self) -> LaurentPoly {
        self.a12.clone()
    }

    pub fn det(&self) -> LaurentPoly {
        &self.a11 * &self.a22 - &self.a12 * &self.a21
    }

    /// Inverse, defined when the determinant is a unit monomial.
    pub fn inverse(&self) -> Result<Mat2> {
        let inv_det = self
            .det()
            .unit_inverse()
            .map_err(|_| Error::Domain(format!("determinant {} is not a unit", self.det())))?;
        Ok(Mat2::new(
            &self.a22 * &inv_det,
            -(&self.a12 * &inv_det),
            -(&self.a21 * &inv_det),
            &self.a11 * &inv_det,
        ))
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> Mat2 {
        Mat2::new(f(&self.a11), f(&self.a12), f(&self.a21), f(&self.a22))
    }

    pub fn try_map(&self, f: impl Fn(&LaurentPoly) -> Result<LaurentPoly>) -> Result<Mat2> {
        Ok(Mat2::new(f(&self.a11)?, f(&self.a12)?, f(&self.a21)?, f(&self.a22)?))
    }

    pub fn entries(&self) -> [&LaurentPoly; 4] {
        [&self.a11, &self.a12, &self.a21, &self.a22]
    }
}

impl Mul<&Mat2> for &Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: &Mat2) -> Mat2 {
        Mat2::mul(self, rhs)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a11, self.a12, self.a21, self.a22)
    }
}

/// Product `ms[n-1] * ... * ms[0]`: later factors multiply on the left.
pub fn path_product<'a, I: IntoIterator<Item = &'a Mat2>>(ms: I) -> Mat2 {
    ms.into_iter().fold(Mat2::identity(), |acc, m| m * &acc)
}

/// Strip a global sign: all-negative input is negated, all-positive is
/// returned unchanged, anything else is a sign error.
pub fn normalize_sign(p: &LaurentPoly) -> Result<LaurentPoly> {
    if p.all_positive() {
        Ok(p.clone())
    } else if p.all_negative() {
        Ok(-p)
    } else {
        Err(Error::Sign(p.canonical_string()))
    }
}
