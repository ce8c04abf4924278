//! Linearly ordered complete Heyting algebras.
//!
//! Every supported algebra is a sub-chain of the rational unit interval, so a
//! [`TruthValue`] is an exact rational in `[0, 1]` and the lattice operations
//! are the same for all of them:
//!
//! * meet is `min`, join is `max`;
//! * the residuum is `x -> z = 1` if `x <= z`, otherwise `z`;
//! * the bi-implication is `(x -> y) /\ (y -> x)`.
//!
//! The [`Algebra`] only decides which rationals belong to the carrier. The
//! unchecked operations on [`TruthValue`] are used in the hot loops once a
//! model has been validated; the checked operations on [`Algebra`] reject
//! operands outside the carrier.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("malformed truth value `{0}`")]
    Malformed(String),
    #[error("truth value {0} lies outside [0, 1]")]
    OutOfRange(String),
    #[error("truth value {value} is not in the carrier of {algebra}")]
    NotInCarrier { value: TruthValue, algebra: Algebra },
    #[error("unknown algebra `{0}` (expected boolean, chain:<n> or godel)")]
    UnknownAlgebra(String),
}

/// An exact truth degree in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruthValue(BigRational);

impl TruthValue {
    pub fn zero() -> Self {
        TruthValue(BigRational::zero())
    }

    pub fn one() -> Self {
        TruthValue(BigRational::one())
    }

    /// `num / den`, which must lie in `[0, 1]`.
    pub fn ratio(num: i64, den: i64) -> Result<Self, AlgebraError> {
        if den == 0 {
            return Err(AlgebraError::Malformed(format!("{num}/{den}")));
        }
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_rational(r: BigRational) -> Result<Self, AlgebraError> {
        if r.is_negative() || r > BigRational::one() {
            return Err(AlgebraError::OutOfRange(r.to_string()));
        }
        Ok(TruthValue(r))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn meet(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn join(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Relative pseudocomplement on a chain.
    pub fn residuum(&self, z: &Self) -> Self {
        if self <= z {
            Self::one()
        } else {
            z.clone()
        }
    }

    pub fn biimplication(&self, other: &Self) -> Self {
        if self == other {
            Self::one()
        } else {
            self.meet(other)
        }
    }

    /// Approximate value, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact decimal expansion when the denominator divides a power of ten.
    fn decimal(&self) -> Option<String> {
        let den = self.0.denom().clone();
        let mut rest = den.clone();
        let (two, five) = (BigInt::from(2), BigInt::from(5));
        let (mut twos, mut fives) = (0u32, 0u32);
        while (&rest % &two).is_zero() {
            rest /= &two;
            twos += 1;
        }
        while (&rest % &five).is_zero() {
            rest /= &five;
            fives += 1;
        }
        if !rest.is_one() {
            return None;
        }
        let digits = twos.max(fives);
        let scaled = self.0.numer() * num_traits::pow(BigInt::from(10), digits as usize) / &den;
        if digits == 0 {
            return Some(scaled.to_string());
        }
        let s = format!("{:0>width$}", scaled.to_string(), width = digits as usize + 1);
        let (int, frac) = s.split_at(s.len() - digits as usize);
        let frac = frac.trim_end_matches('0');
        Some(if frac.is_empty() { int.to_string() } else { format!("{int}.{frac}") })
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.decimal() {
            Some(d) => f.write_str(&d),
            None => write!(f, "{}/{}", self.0.numer(), self.0.denom()),
        }
    }
}

impl fmt::Debug for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for TruthValue {
    type Err = AlgebraError;

    /// Accepts decimals (`0`, `1`, `0.35`) and fractions (`1/3`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let malformed = || AlgebraError::Malformed(s.to_string());
        let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
        let r = if let Some((n, d)) = t.split_once('/') {
            if !digits(n) || !digits(d) {
                return Err(malformed());
            }
            let den: BigInt = d.parse().map_err(|_| malformed())?;
            if den.is_zero() {
                return Err(malformed());
            }
            BigRational::new(n.parse().map_err(|_| malformed())?, den)
        } else {
            let (int, frac) = t.split_once('.').unwrap_or((t, ""));
            if !digits(int) || (t.contains('.') && !digits(frac)) {
                return Err(malformed());
            }
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let num: BigInt = format!("{int}{frac}").parse().map_err(|_| malformed())?;
            BigRational::new(num, scale)
        };
        TruthValue::from_rational(r)
    }
}

impl Serialize for TruthValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TruthValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The carrier of truth degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algebra {
    /// `{0, 1}`; the same carrier as `Chain(2)`.
    Boolean,
    /// `n >= 2` equally spaced levels `0, 1/(n-1), ..., 1`.
    Chain(u32),
    /// Rationals in `[0, 1]` with the Gödel operations.
    Godel,
}

impl Algebra {
    pub fn chain(levels: u32) -> Result<Self, AlgebraError> {
        if levels < 2 {
            return Err(AlgebraError::UnknownAlgebra(format!("chain:{levels}")));
        }
        Ok(Algebra::Chain(levels))
    }

    /// Number of levels for finite carriers.
    pub fn levels(&self) -> Option<u32> {
        match self {
            Algebra::Boolean => Some(2),
            Algebra::Chain(n) => Some(*n),
            Algebra::Godel => None,
        }
    }

    /// Every supported algebra is a chain.
    pub fn is_linear(&self) -> bool {
        true
    }

    pub fn contains(&self, x: &TruthValue) -> bool {
        match self.levels() {
            None => true,
            Some(n) => {
                let scaled = x.as_rational() * BigRational::from_integer(BigInt::from(n - 1));
                scaled.is_integer()
            }
        }
    }

    /// Level `i` of a finite chain.
    pub fn level(&self, i: u32) -> Option<TruthValue> {
        let n = self.levels()?;
        (i < n).then(|| TruthValue(BigRational::new(i.into(), (n - 1).into())))
    }

    /// Position of `x` in a finite chain.
    pub fn level_of(&self, x: &TruthValue) -> Option<u32> {
        let n = self.levels()?;
        let scaled = x.as_rational() * BigRational::from_integer(BigInt::from(n - 1));
        scaled.is_integer().then(|| scaled.to_integer().to_u32()).flatten()
    }

    /// The whole carrier, when finite.
    pub fn carrier(&self) -> Option<Vec<TruthValue>> {
        let n = self.levels()?;
        Some((0..n).filter_map(|i| self.level(i)).collect())
    }

    pub fn check(&self, x: &TruthValue) -> Result<(), AlgebraError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(AlgebraError::NotInCarrier { value: x.clone(), algebra: *self })
        }
    }

    fn check2(&self, x: &TruthValue, y: &TruthValue) -> Result<(), AlgebraError> {
        self.check(x)?;
        self.check(y)
    }

    pub fn meet(&self, x: &TruthValue, y: &TruthValue) -> Result<TruthValue, AlgebraError> {
        self.check2(x, y)?;
        Ok(x.meet(y))
    }

    pub fn join(&self, x: &TruthValue, y: &TruthValue) -> Result<TruthValue, AlgebraError> {
        self.check2(x, y)?;
        Ok(x.join(y))
    }

    pub fn residuum(&self, x: &TruthValue, z: &TruthValue) -> Result<TruthValue, AlgebraError> {
        self.check2(x, z)?;
        Ok(x.residuum(z))
    }

    pub fn biimplication(&self, x: &TruthValue, y: &TruthValue) -> Result<TruthValue, AlgebraError> {
        self.check2(x, y)?;
        Ok(x.biimplication(y))
    }

    pub fn leq(&self, x: &TruthValue, y: &TruthValue) -> Result<bool, AlgebraError> {
        self.check2(x, y)?;
        Ok(x <= y)
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algebra::Boolean => f.write_str("boolean"),
            Algebra::Chain(n) => write!(f, "chain:{n}"),
            Algebra::Godel => f.write_str("godel"),
        }
    }
}

impl FromStr for Algebra {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "boolean" => Ok(Algebra::Boolean),
            "godel" => Ok(Algebra::Godel),
            other => match other.strip_prefix("chain:").map(str::parse::<u32>) {
                Some(Ok(n)) => Algebra::chain(n),
                _ => Err(AlgebraError::UnknownAlgebra(s.to_string())),
            },
        }
    }
}

impl Serialize for Algebra {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Algebra {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for literals in tests and fixtures. Panics on malformed input.
pub fn tv(s: &str) -> TruthValue {
    s.parse().unwrap_or_else(|e| panic!("bad truth value literal {s:?}: {e}"))
}
