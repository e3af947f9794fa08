use std::fmt;
use std::ops::{Mul, MulAssign, Neg};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Edge label of a signed graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-1")]
    Negative,
    #[serde(rename = "+1")]
    Positive,
}

impl Sign {
    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Positive),
            -1 => Some(Sign::Negative),
            _ => None,
        }
    }

    /// `Positive` when `same` holds, `Negative` otherwise.
    pub fn from_agreement(same: bool) -> Sign {
        if same {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    /// Product of a sequence of signs; the empty product is `Positive`.
    pub fn product<I: IntoIterator<Item = Sign>>(signs: I) -> Sign {
        signs.into_iter().fold(Sign::Positive, |acc, s| acc * s)
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_agreement(self == rhs)
    }
}

impl MulAssign for Sign {
    fn mul_assign(&mut self, rhs: Sign) {
        *self = *self * rhs;
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Positive => "+1",
            Sign::Negative => "-1",
        })
    }
}

/// Accepts `+1`, `1` and `-1`.
impl FromStr for Sign {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Sign, ()> {
        match s {
            "+1" | "1" => Ok(Sign::Positive),
            "-1" => Ok(Sign::Negative),
            _ => Err(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_table() {
        use Sign::*;
        assert_eq!(Positive * Positive, Positive);
        assert_eq!(Positive * Negative, Negative);
        assert_eq!(Negative * Positive, Negative);
        assert_eq!(Negative * Negative, Positive);
        assert_eq!(-Negative, Positive);
        assert_eq!(Sign::product([Negative, Negative, Negative]), Negative);
        assert_eq!(Sign::product([]), Positive);
    }

    #[test]
    fn parse_tokens() {
        assert_eq!("+1".parse(), Ok(Sign::Positive));
        assert_eq!("1".parse(), Ok(Sign::Positive));
        assert_eq!("-1".parse(), Ok(Sign::Negative));
        assert!("0".parse::<Sign>().is_err());
        assert!("+".parse::<Sign>().is_err());
        assert!("-2".parse::<Sign>().is_err());
        assert_eq!(Sign::Negative.to_string(), "-1");
    }
}
