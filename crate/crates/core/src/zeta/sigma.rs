//! Characters of `M = {±I}`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// `σ_ε(m) = sign(tr)^ε`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sigma {
    Trivial,
    Sign,
}

impl Sigma {
    pub fn parity(self) -> u8 {
        match self {
            Sigma::Trivial => 0,
            Sigma::Sign => 1,
        }
    }

    /// Value on a class whose trace has the given sign.
    #[inline]
    pub fn value(self, sign: i8) -> f64 {
        match self {
            Sigma::Trivial => 1.0,
            Sigma::Sign => f64::from(sign.signum()),
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sigma::Trivial => "trivial",
            Sigma::Sign => "sign",
        })
    }
}

impl FromStr for Sigma {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "trivial" | "0" => Ok(Sigma::Trivial),
            "sign" | "1" => Ok(Sigma::Sign),
            other => Err(format!("unknown character '{other}' (trivial|sign)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicative_on_powers() {
        for s in [-1i8, 1] {
            for m in 1..5 {
                let pow = if m % 2 == 0 { 1 } else { s };
                assert_eq!(Sigma::Sign.value(pow), Sigma::Sign.value(s).powi(m));
            }
        }
        assert_eq!("sign".parse::<Sigma>().unwrap(), Sigma::Sign);
    }
}
