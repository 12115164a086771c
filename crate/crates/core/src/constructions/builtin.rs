//! Hardcoded base arrays.

use std::fmt;
use std::str::FromStr;

use crate::pda::Pda;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `(4,4,1,6)`, a block of the `Z = F - 3` family.
    P4,
    /// `(6,6,3,6)`.
    P6,
    /// `(7,7,4,6)`.
    P7,
    /// `(6,8,5,5)`, meeting the simple bound.
    P86,
}

const P4: &str = "
0 3 5 *
1 4 * 5
2 * 4 3
* 2 1 0";

const P6: &str = "
0 3 5 * * *
1 4 * 5 * *
2 * 4 * 3 *
* 2 * * 0 5
* * 1 0 * 3
* * * 2 1 4";

const P7: &str = "
0 3 5 * * * *
1 4 * 5 * * *
2 * * * 3 5 *
* 2 * * 0 * 5
* * 1 0 * * 4
* * 2 * * 0 3
* * * 2 1 4 *";

const P86: &str = "
0 * * * 3 *
1 3 * * * 4
* 0 1 * * *
2 * 3 * * *
* 2 * 1 * *
* * 4 0 2 *
* * * * 1 0
* * * 3 * 2";

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::P4, Builtin::P6, Builtin::P7, Builtin::P86];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::P4 => "P4",
            Builtin::P6 => "P6",
            Builtin::P7 => "P7",
            Builtin::P86 => "P86",
        }
    }

    fn text(self) -> &'static str {
        match self {
            Builtin::P4 => P4,
            Builtin::P6 => P6,
            Builtin::P7 => P7,
            Builtin::P86 => P86,
        }
    }

    pub fn pda(self) -> Pda {
        self.text()
            .parse()
            .unwrap_or_else(|e| panic!("builtin {} is broken: {e}", self.name()))
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown builtin {s:?} (expected P4, P6, P7 or P86)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pda::Params;

    #[test]
    fn builtins_verify_with_their_parameters() {
        assert_eq!(Builtin::P4.pda().params(), Params::new(4, 4, 1, 6));
        assert_eq!(Builtin::P6.pda().params(), Params::new(6, 6, 3, 6));
        assert_eq!(Builtin::P7.pda().params(), Params::new(7, 7, 4, 6));
        assert_eq!(Builtin::P86.pda().params(), Params::new(6, 8, 5, 5));
    }

    #[test]
    fn names_round_trip() {
        for b in Builtin::ALL {
            assert_eq!(b.name().parse::<Builtin>(), Ok(b));
        }
        assert!("P5".parse::<Builtin>().is_err());
    }
}
