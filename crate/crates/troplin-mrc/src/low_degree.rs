//! Independence of all degree-m monomials from the two-chip bound alone.
//!
//! A dependence among multiset functions `psi_I` on a chain of `g` loops
//! attains its minimum twice everywhere, which places at least two chips of
//! its divisor on each loop and each tail: `2(g + 2)` chips in total. The
//! divisor has degree `m*d`, so when `m*d < 2g + 4` no dependence exists and
//! the full family of `C(r+m, m)` monomials is tropically independent. The
//! certificate pins the numeric inequality together with the class checks
//! (vertex avoiding, exact rank) on an explicit chain.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use troplin_chain::{tableau_to_divisor, ChainModel, ChainParams, DivisorData, Tableau};
use troplin_core::rat::qi;
use troplin_core::Q;

use crate::build::{admissible_chain_for, classify};
use crate::certify::Verdict;
use crate::error::{MrcError, MrcResult};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowDegreeCertificate {
    pub genus: i64,
    pub r: i64,
    pub d: i64,
    /// Multiset size: the monomial degree.
    pub m: i64,
    pub s: i64,
    pub rho: i64,
    /// `C(r+m, m)`, the whole monomial space.
    pub family_size: i64,
    /// `2(g + 2)`: what a dependence divisor must carry.
    pub degree_bound: i64,
    /// `m*d`: what it can carry.
    pub pairing_degree: i64,
    pub verdict: Verdict,
}

fn binom(n: i64, k: i64) -> i64 {
    let k = k.min(n - k);
    let mut out = 1i64;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// All multisets of size `m` over `{0, ..., r}` in lexicographic order.
pub fn multisets(r: i64, m: i64) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m as usize);
    fn go(r: usize, m: usize, lo: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in lo..=r {
            cur.push(i);
            go(r, m, i, cur, out);
            cur.pop();
        }
    }
    go(r as usize, m as usize, 0, &mut cur, &mut out);
    out
}

/// The divisor data the certificate is checked on: the standard rectangular
/// tableau, with `rho` trailing lingering loops when the shape is not exact.
pub fn low_degree_divisor(
    params: &ChainParams,
    genus: i64,
    r: i64,
    d: i64,
) -> MrcResult<DivisorData> {
    let (s, rho) = classify(genus, r, d)?;
    let tab = Tableau::standard_rect(r as usize, s as usize)?;
    if rho == 0 {
        return Ok(tableau_to_divisor(params, &tab, d)?);
    }
    let inner_genus = (r + 1) * s;
    let inner_params = ChainParams::new(
        inner_genus as usize,
        params.ell[..inner_genus as usize].to_vec(),
        params.m[..inner_genus as usize].to_vec(),
        params.n[..=inner_genus as usize].to_vec(),
        params.mbar,
        true,
    )?;
    let inner = tableau_to_divisor(&inner_params, &tab, d - rho)?;
    let mut x = inner.x;
    let three_halves = Q::new(BigInt::from(3), BigInt::from(2));
    for pos in inner_genus + 1..=genus {
        x.push(three_halves.clone() * params.em(pos as usize));
    }
    Ok(DivisorData { d0: inner.d0, x })
}

/// Certifies every size-m monomial family independent on a general class of
/// rank r and degree d, by the two-chip degree bound.
pub fn low_degree_certify(genus: i64, r: i64, d: i64, m: i64) -> MrcResult<LowDegreeCertificate> {
    if m < 1 {
        return Err(MrcError::BadParameters(format!(
            "monomial degree must be at least 1, got {m}"
        )));
    }
    let (s, rho) = classify(genus, r, d)?;
    let pairing_degree = m * d;
    let degree_bound = 2 * (genus + 2);
    if pairing_degree >= degree_bound {
        return Err(MrcError::BadParameters(format!(
            "two-chip bound needs m*d < 2g + 4: {pairing_degree} >= {degree_bound}"
        )));
    }

    let params = admissible_chain_for(genus as usize, r, m as usize)?;
    let data = low_degree_divisor(&params, genus, r, d)?;
    let model = ChainModel::new(params.clone())?;
    if !model.is_vertex_avoiding(&data, r as usize, d)? {
        return Err(MrcError::BadBuild("built class is not vertex avoiding".into()));
    }
    let rank = params.rank_exact(&data)?;
    if rank as i64 != r {
        return Err(MrcError::BadBuild(format!(
            "built class has rank {rank}, expected {r}"
        )));
    }
    let path = params.lingering_path(&data, r as usize)?;
    if path.lingering_count() as i64 != rho {
        return Err(MrcError::BadBuild(format!(
            "path lingers {} times, expected rho = {rho}",
            path.lingering_count()
        )));
    }

    let family_size = binom(r + m, m);
    // beyond 2g - 2 the target space has dimension exactly m*d - g + 1
    let verdict = if pairing_degree > 2 * genus - 2 {
        let target = pairing_degree - genus + 1;
        if family_size > target {
            return Err(MrcError::Invariant(format!(
                "{family_size} independent monomials cannot fit a target of {target}"
            )));
        }
        if family_size == target {
            Verdict::Bijective
        } else {
            Verdict::Injective
        }
    } else {
        Verdict::Injective
    };

    Ok(LowDegreeCertificate {
        genus,
        r,
        d,
        m,
        s,
        rho,
        family_size,
        degree_bound,
        pairing_degree,
        verdict,
    })
}

/// Rebuilds the certificate deterministically and compares.
pub fn verify_low_degree(cert: &LowDegreeCertificate) -> MrcResult<()> {
    if cert.pairing_degree != cert.m * cert.d
        || cert.degree_bound != 2 * (cert.genus + 2)
        || cert.pairing_degree >= cert.degree_bound
    {
        return Err(MrcError::BadCertificate("degree accounting off".into()));
    }
    let fresh = low_degree_certify(cert.genus, cert.r, cert.d, cert.m)?;
    if &fresh != cert {
        return Err(MrcError::BadCertificate(
            "certificate differs from the deterministic replay".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use troplin_indep::{decide_dependence, DependenceOutcome, MultisetFamily, DEFAULT_BUDGET};

    #[test]
    fn quadric_bound_on_small_chain() {
        // g=8, r=3, d=9, m=2: 18 < 20
        let cert = low_degree_certify(8, 3, 9, 2).unwrap();
        assert_eq!(cert.family_size, 10);
        assert_eq!((cert.pairing_degree, cert.degree_bound), (18, 20));
        assert_eq!(cert.verdict, Verdict::Injective);
        verify_low_degree(&cert).unwrap();
    }

    #[test]
    fn lingering_shape_and_bijective_corner() {
        // g=5, r=2, d=6, m=2: rho = 2, trailing lingering loops
        let cert = low_degree_certify(5, 2, 6, 2).unwrap();
        assert_eq!(cert.rho, 2);
        assert_eq!(cert.verdict, Verdict::Injective);

        // g=2, r=1, d=2, m=2: 3 monomials against 4 - 2 + 1 = 3
        let tight = low_degree_certify(2, 1, 2, 2).unwrap();
        assert_eq!(tight.verdict, Verdict::Bijective);
    }

    #[test]
    fn bound_is_required() {
        // g=4, r=3, d=6, m=2: 12 == 12 fails the strict inequality
        assert!(low_degree_certify(4, 3, 6, 2).is_err());
        assert!(low_degree_certify(8, 3, 9, 0).is_err());
    }

    #[test]
    fn exhaustive_decision_agrees() {
        // the certified family really is independent by the full search
        let cert = low_degree_certify(3, 1, 3, 2).unwrap();
        assert_eq!(cert.family_size, 3);
        let params = admissible_chain_for(3, 1, 2).unwrap();
        let data = low_degree_divisor(&params, 3, 1, 3).unwrap();
        let model = ChainModel::new(params).unwrap();
        let fam = MultisetFamily::with_multisets(&model, &data, multisets(1, 2)).unwrap();
        let out = decide_dependence(model.graph(), fam.funcs(), DEFAULT_BUDGET).unwrap();
        assert!(matches!(out, DependenceOutcome::Independent { .. }));
    }

    #[test]
    fn multiset_enumeration_counts() {
        assert_eq!(multisets(1, 2), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        for r in 1..=5 {
            for m in 1..=4 {
                assert_eq!(multisets(r, m).len() as i64, binom(r + m, m));
            }
        }
    }
}
