//! Floating-point scalars and exact rational couplings.

use std::fmt;
use std::iter::Sum;
use std::os::raw::c_char;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Real scalar usable by the quantum and statistical code: `f32` or `f64`.
///
/// Besides the usual float arithmetic, each scalar knows how to hand a dense
/// symmetric matrix to LAPACK for an eigenvalue-only decomposition.
pub trait Scalar:
    Float
    + FromPrimitive
    + Sum
    + Send
    + Sync
    + fmt::Debug
    + fmt::Display
    + Default
    + Serialize
    + serde::de::DeserializeOwned
    + 'static
{
    /// Eigenvalues (ascending) of the symmetric `n x n` matrix stored row-major in `a`.
    /// Only the lower triangle is read. `a` is overwritten.
    fn sym_eigvals(n: usize, a: &mut [Self]) -> Result<Vec<Self>>;

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_scalar {
    ($t:ty, $syevd:path) => {
        impl Scalar for $t {
            fn sym_eigvals(n: usize, a: &mut [Self]) -> Result<Vec<Self>> {
                assert_eq!(a.len(), n * n);
                if n == 0 {
                    return Ok(Vec::new());
                }
                // Row-major lower triangle == column-major upper triangle.
                let jobz = b'N' as c_char;
                let uplo = b'U' as c_char;
                let dim = i32::try_from(n).map_err(|_| Error::TooLarge {
                    what: "dense dimension",
                    got: n,
                    limit: i32::MAX as usize,
                })?;
                let mut w = vec![0 as $t; n];
                let mut info = 0i32;
                let mut work_query: $t = 0.0;
                let mut iwork_query = 0i32;
                let query = -1i32;
                unsafe {
                    $syevd(
                        &jobz,
                        &uplo,
                        &dim,
                        a.as_mut_ptr(),
                        &dim,
                        w.as_mut_ptr(),
                        &mut work_query,
                        &query,
                        &mut iwork_query,
                        &query,
                        &mut info,
                    );
                }
                if info != 0 {
                    return Err(Error::Lapack(info));
                }
                let lwork = (work_query as usize).max(1);
                let liwork = (iwork_query as usize).max(1);
                let mut work = vec![0 as $t; lwork];
                let mut iwork = vec![0i32; liwork];
                unsafe {
                    $syevd(
                        &jobz,
                        &uplo,
                        &dim,
                        a.as_mut_ptr(),
                        &dim,
                        w.as_mut_ptr(),
                        work.as_mut_ptr(),
                        &(lwork as i32),
                        iwork.as_mut_ptr(),
                        &(liwork as i32),
                        &mut info,
                    );
                }
                if info != 0 {
                    return Err(Error::Lapack(info));
                }
                Ok(w)
            }
        }
    };
}

impl_scalar!(f32, lapack_sys::ssyevd_);
impl_scalar!(f64, lapack_sys::dsyevd_);

/// An exact rational coupling constant, e.g. `1/7`.
///
/// Parsed from integers, fractions `p/q`, or finite decimals (`0.25` becomes
/// `1/4`), and printed back in lowest terms so reports never carry decimal drift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coupling(pub Ratio<i64>);

impl Coupling {
    pub fn integer(v: i64) -> Self {
        Coupling(Ratio::from_integer(v))
    }

    pub fn to_scalar<T: Scalar>(self) -> T {
        T::from_f64_lossy(*self.0.numer() as f64 / *self.0.denom() as f64)
    }
}

impl From<i64> for Coupling {
    fn from(v: i64) -> Self {
        Coupling::integer(v)
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: None,
            msg: format!("invalid coupling {s:?}: expected an integer, p/q, or a finite decimal"),
        };
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            return Ok(Coupling(Ratio::new(p, q)));
        }
        if let Ok(v) = t.parse::<i64>() {
            return Ok(Coupling::integer(v));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = body.split_once('.').ok_or_else(bad)?;
        if frac_part.is_empty() && int_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
            || frac_part.len() > 15
        {
            return Err(bad());
        }
        let denom = 10i64.pow(frac_part.len() as u32);
        let digits = format!("{int_part}{frac_part}");
        let numer: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
        let r = Ratio::new(if neg { -numer } else { numer }, denom);
        Ok(Coupling(r))
    }
}

impl Serialize for Coupling {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coupling {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_parses_fractions_exactly() {
        let c: Coupling = "1/7".parse().unwrap();
        assert_eq!(c.0, Ratio::new(1, 7));
        assert_eq!(c.to_string(), "1/7");
        assert_eq!("2/14".parse::<Coupling>().unwrap().to_string(), "1/7");
        assert_eq!("0.25".parse::<Coupling>().unwrap().to_string(), "1/4");
        assert_eq!("-1.5".parse::<Coupling>().unwrap().to_string(), "-3/2");
        assert_eq!("3".parse::<Coupling>().unwrap().to_string(), "3");
        assert!("1/0".parse::<Coupling>().is_err());
        assert!("abc".parse::<Coupling>().is_err());
        assert!("1e-3".parse::<Coupling>().is_err());
    }

    #[test]
    fn dense_eigvals_small() {
        // [[2,1],[1,2]] -> {1, 3}
        let mut a = vec![2.0f64, 1.0, 1.0, 2.0];
        let w = f64::sym_eigvals(2, &mut a).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-14 && (w[1] - 3.0).abs() < 1e-14);
        let mut b = vec![2.0f32, 1.0, 1.0, 2.0];
        let w = f32::sym_eigvals(2, &mut b).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-6 && (w[1] - 3.0).abs() < 1e-6);
    }
}
