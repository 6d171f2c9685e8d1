//! Closed-form counting bounds on FO-sentences with m quantifiers over a
//! schema with t relation symbols (max arity r ≥ 2) and s constants.

use num_bigint::BigUint;

use crate::error::CoreError;

fn check(r: usize) -> Result<(), CoreError> {
    if r < 2 {
        Err(CoreError::Domain(
            "the sentence-count bound assumes maximum arity at least 2".into(),
        ))
    } else {
        Ok(())
    }
}

/// Number of atomic formulas available over m variables and s constants:
/// (t+1)(m+s)^r, the +1 accounting for equality.
fn atom_pool(t: usize, s: usize, r: usize, m: usize) -> BigUint {
    BigUint::from(t + 1) * BigUint::from(m + s).pow(r as u32)
}

/// Upper bound on the number of FO-sentences with m quantifiers up to
/// logical equivalence: 2^(m + 2^((t+1)(m+s)^r)).
pub fn count_bound(t: usize, s: usize, r: usize, m: usize) -> Result<BigUint, CoreError> {
    check(r)?;
    let pool: u32 = atom_pool(t, s, r, m)
        .try_into()
        .map_err(|_| CoreError::Domain("atom pool too large to exponentiate".into()))?;
    let exponent = BigUint::from(m) + BigUint::from(2u32).pow(pool);
    let exponent: u64 = exponent
        .try_into()
        .map_err(|_| CoreError::Domain("sentence bound too large to materialize".into()))?;
    if exponent > 1 << 24 {
        return Err(CoreError::Domain(
            "sentence bound too large to materialize".into(),
        ));
    }
    Ok(BigUint::from(2u32).pow(exponent as u32))
}

/// Upper bound on the number of (positive or negative) atomic formulas in
/// the quantifier-free part: (t+1)(m+s)^r · 2^((t+1)(m+s)^r).
pub fn atom_bound(t: usize, s: usize, r: usize, m: usize) -> Result<BigUint, CoreError> {
    check(r)?;
    let pool = atom_pool(t, s, r, m);
    let exp: u32 = pool
        .clone()
        .try_into()
        .map_err(|_| CoreError::Domain("atom pool too large to exponentiate".into()))?;
    Ok(pool * BigUint::from(2u32).pow(exp))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_substitutions() {
        // t=1, s=0, r=2, m=1: (t+1)(m+s)^r = 2, bound = 2^(1+2^2) = 32
        assert_eq!(count_bound(1, 0, 2, 1).unwrap(), BigUint::from(32u32));
        // m=0: inner term 0, bound = 2^(0+2^0) = 2
        assert_eq!(count_bound(1, 0, 2, 0).unwrap(), BigUint::from(2u32));
        // atom bound: 2 * 2^2 = 8
        assert_eq!(atom_bound(1, 0, 2, 1).unwrap(), BigUint::from(8u32));
    }

    #[test]
    fn low_arity_is_a_domain_error() {
        assert!(count_bound(1, 0, 1, 1).is_err());
        assert!(atom_bound(1, 0, 0, 1).is_err());
    }
}
