use num_traits::Zero;
use serde::{Deserialize, Serialize};
use troplin_core::rat::qvec;
use troplin_core::Q;

use crate::error::{IndepError, IndepResult};

/// Constants b_0, ..., b_{n-1} pairing with a function family of the same
/// length to form the tropical combination `min_i (psi_i + b_i)`. Only the
/// differences of the constants matter, so witnesses are reported with the
/// smallest constant shifted to zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Combination(#[serde(with = "qvec")] pub Vec<Q>);

impl Combination {
    pub fn zeros(n: usize) -> Self {
        Combination(vec![Q::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Shifts every constant by a common amount so the smallest is zero.
    pub fn normalize(&self) -> Self {
        let Some(min) = self.0.iter().min().cloned() else {
            return self.clone();
        };
        Combination(self.0.iter().map(|b| b - &min).collect())
    }

    pub(crate) fn check_len(&self, funcs: usize) -> IndepResult<()> {
        if self.0.len() == funcs {
            Ok(())
        } else {
            Err(IndepError::SizeMismatch {
                funcs,
                consts: self.0.len(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use troplin_core::rat::qi;

    #[test]
    fn normalize_shifts_the_minimum_to_zero() {
        let b = Combination(vec![qi(3), qi(-2), qi(7)]);
        assert_eq!(b.normalize(), Combination(vec![qi(5), qi(0), qi(9)]));
        assert_eq!(b.normalize().normalize(), b.normalize());
    }

    #[test]
    fn combinations_round_trip_as_json() {
        let b = Combination(vec![troplin_core::rat::q(1, 2), qi(0)]);
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(serde_json::from_str::<Combination>(&s).unwrap(), b);
    }
}
