use rayon::prelude::*;
use serde::Serialize;

use super::algebra::{homomorphism_defect, is_homomorphism, search_maps, FiniteAlgebra};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_CARRIER: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

/// A bijection `s: A → B` meeting the indicator hypothesis without being
/// an isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub a: String,
    pub b: String,
    pub bijection: Vec<u32>,
    /// Where `s` fails to be a homomorphism.
    pub defect: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndicatorResult {
    pub side: Side,
    pub holds: bool,
    pub certificate: Option<Certificate>,
    pub pairs_checked: usize,
    pub bijections_checked: usize,
}

/// Permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<u32>> {
    let mut p: Vec<u32> = (0..n as u32).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

fn compose(outer: &[u32], inner: &[u32]) -> Vec<u32> {
    inner.iter().map(|x| outer[*x as usize]).collect()
}

/// Right: every `ν: B → A0` makes `ν∘s` a homomorphism.
/// Left: every `ν: A0 → A` makes `s∘ν` a homomorphism.
fn hypothesis(
    side: Side,
    a0: &FiniteAlgebra,
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    s: &[u32],
    homs: &[Vec<u32>],
) -> bool {
    match side {
        Side::Right => homs
            .iter()
            .all(|nu| is_homomorphism(a, a0, &compose(nu, s))),
        Side::Left => homs
            .iter()
            .all(|nu| is_homomorphism(a0, b, &compose(s, nu))),
    }
}

fn check(
    side: Side,
    a0: &FiniteAlgebra,
    universe: &[FiniteAlgebra],
    max_carrier: usize,
) -> Result<IndicatorResult> {
    for alg in universe.iter().chain([a0]) {
        if !alg.same_signature(a0) {
            return Err(Error::Mismatch(format!(
                "{} and {} have different signatures",
                alg.name, a0.name
            )));
        }
        if alg.size > max_carrier {
            return Err(Error::CapExceeded {
                what: format!("carrier of {}", alg.name),
                count: alg.size as u128,
                cap: max_carrier as u128,
            });
        }
    }
    let mut pairs = 0;
    let mut bijections = 0;
    for a in universe {
        // homs depend on one side of the pair only
        let left_homs = (side == Side::Left).then(|| search_maps(a0, a, false));
        for b in universe {
            if a.size != b.size {
                continue;
            }
            pairs += 1;
            let homs = match &left_homs {
                Some(h) => h.clone(),
                None => search_maps(b, a0, false),
            };
            let perms = permutations(a.size);
            bijections += perms.len();
            let found = perms.par_iter().find_first(|s| {
                homomorphism_defect(a, b, s).is_some() && hypothesis(side, a0, a, b, s, &homs)
            });
            if let Some(s) = found {
                return Ok(IndicatorResult {
                    side,
                    holds: false,
                    certificate: Some(Certificate {
                        a: a.name.clone(),
                        b: b.name.clone(),
                        bijection: s.clone(),
                        defect: homomorphism_defect(a, b, s).unwrap(),
                    }),
                    pairs_checked: pairs,
                    bijections_checked: bijections,
                });
            }
        }
    }
    Ok(IndicatorResult {
        side,
        holds: true,
        certificate: None,
        pairs_checked: pairs,
        bijections_checked: bijections,
    })
}

/// Whether `a0` is a right indicator over `universe`: for all `A`, `B` in
/// the universe and every bijection `s: A → B`, if `ν∘s` is a homomorphism
/// for every homomorphism `ν: B → A0` then `s` is an isomorphism.
pub fn is_right_indicator(
    a0: &FiniteAlgebra,
    universe: &[FiniteAlgebra],
    max_carrier: usize,
) -> Result<IndicatorResult> {
    check(Side::Right, a0, universe, max_carrier)
}

/// The dual condition, with `s∘ν` for `ν: A0 → A`.
pub fn is_left_indicator(
    a0: &FiniteAlgebra,
    universe: &[FiniteAlgebra],
    max_carrier: usize,
) -> Result<IndicatorResult> {
    check(Side::Left, a0, universe, max_carrier)
}

/// Verdict of an independent re-check of a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub is_bijection: bool,
    pub is_isomorphism: bool,
    pub hypothesis_holds: bool,
}

impl CertificateCheck {
    /// A genuine counterexample to the indicator property.
    pub fn refutes(&self) -> bool {
        self.is_bijection && !self.is_isomorphism && self.hypothesis_holds
    }
}

/// Re-checks a certificate with naive enumeration of every map instead of
/// the pruned search.
pub fn check_certificate(
    side: Side,
    a0: &FiniteAlgebra,
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    s: &[u32],
) -> CertificateCheck {
    let mut seen = vec![false; b.size];
    let is_bijection = s.len() == a.size
        && a.size == b.size
        && s.iter()
            .all(|x| (*x as usize) < b.size && !std::mem::replace(&mut seen[*x as usize], true));
    if !is_bijection {
        return CertificateCheck {
            is_bijection,
            is_isomorphism: false,
            hypothesis_holds: false,
        };
    }
    let (dom, cod) = match side {
        Side::Right => (b, a0),
        Side::Left => (a0, a),
    };
    let homs: Vec<Vec<u32>> = all_maps(dom.size, cod.size)
        .into_iter()
        .filter(|m| is_homomorphism(dom, cod, m))
        .collect();
    CertificateCheck {
        is_bijection,
        is_isomorphism: is_homomorphism(a, b, s),
        hypothesis_holds: hypothesis(side, a0, a, b, s, &homs),
    }
}

fn all_maps(n: usize, m: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                (0..m as u32)
                    .map(|v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(text: &str, name: &str) -> FiniteAlgebra {
        FiniteAlgebra::parse(text, name).unwrap()
    }

    #[test]
    fn permutation_order() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[1], vec![0, 2, 1]);
        assert_eq!(p[5], vec![2, 1, 0]);
        assert_eq!(permutations(0), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn singleton_universe() {
        let pt = alg("size 1\nop m 2\n0\n", "pt");
        let chain = alg("size 2\nop m 2\n0 0\n0 1\n", "chain");
        assert!(
            is_right_indicator(&chain, std::slice::from_ref(&pt), 6)
                .unwrap()
                .holds
        );
        assert!(
            is_left_indicator(&chain, std::slice::from_ref(&pt), 6)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn point_is_not_a_right_indicator() {
        let pt = alg("size 1\nop m 2\n0\n", "pt");
        let chain = alg("size 2\nop m 2\n0 0\n0 1\n", "chain");
        let lz = alg("size 2\nop m 2\n0 0\n1 1\n", "left_zero");
        let universe = [chain.clone(), lz.clone()];
        let r = is_right_indicator(&pt, &universe, 6).unwrap();
        assert!(!r.holds);
        let c = r.certificate.unwrap();
        let (a, b) = (
            &universe.iter().find(|x| x.name == c.a).unwrap(),
            &universe.iter().find(|x| x.name == c.b).unwrap(),
        );
        assert!(check_certificate(Side::Right, &pt, a, b, &c.bijection).refutes());
    }

    #[test]
    fn chain_is_a_right_indicator_for_small_chains() {
        let chain = alg("size 2\nop m 2\n0 0\n0 1\n", "chain");
        let three = alg("size 3\nop m 2\n0 0 0\n0 1 1\n0 1 2\n", "chain3");
        assert!(
            is_right_indicator(&chain, &[chain.clone(), three], 6)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn carrier_cap() {
        let big = FiniteAlgebra::new("big", 7, vec![]).unwrap();
        assert!(is_right_indicator(&big, std::slice::from_ref(&big), 6)
            .unwrap_err()
            .is_cap());
    }
}
