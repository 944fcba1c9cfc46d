//! Word problems for the free algebras of the shipped varieties.
//!
//! Every element of a free algebra is held as a [`NormalForm`]: a term for
//! magmas, a word for semigroups and monoids, a birooted tree for inverse
//! semigroups. Equality of normal forms is equality in the free algebra, so
//! an identity holds in the variety iff both sides normalize to the same
//! value over the generators they mention.

mod munn;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use munn::{Dir, MunnElement, Step};

use crate::error::{Error, Result};
use crate::term::{parse_term, Signature, Term};

pub const MUL: &str = "mul";
pub const INV: &str = "inv";
pub const UNIT: &str = "unit";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variety {
    Magma,
    Semigroup,
    Monoid,
    InverseSemigroup,
}

impl Variety {
    pub const ALL: [Variety; 4] = [
        Variety::Magma,
        Variety::Semigroup,
        Variety::Monoid,
        Variety::InverseSemigroup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variety::Magma => "magma",
            Variety::Semigroup => "semigroup",
            Variety::Monoid => "monoid",
            Variety::InverseSemigroup => "inverse_semigroup",
        }
    }

    pub fn signature(self) -> &'static Signature {
        static MAGMA: OnceLock<Signature> = OnceLock::new();
        static MONOID: OnceLock<Signature> = OnceLock::new();
        static INVERSE: OnceLock<Signature> = OnceLock::new();
        match self {
            Variety::Magma | Variety::Semigroup => {
                MAGMA.get_or_init(|| Signature::new([(MUL, 2)]).unwrap())
            }
            Variety::Monoid => {
                MONOID.get_or_init(|| Signature::new([(MUL, 2), (UNIT, 0)]).unwrap())
            }
            Variety::InverseSemigroup => {
                INVERSE.get_or_init(|| Signature::new([(MUL, 2), (INV, 1)]).unwrap())
            }
        }
    }

    pub fn parse_term(self, text: &str) -> Result<Term> {
        parse_term(text, self.signature())
    }

    /// The defining identities of the variety, over `x1, x2, x3`.
    pub fn defining_identities(self) -> Vec<(Term, Term)> {
        let src: &[(&str, &str)] = match self {
            Variety::Magma => &[],
            Variety::Semigroup => &[("(mul (mul x1 x2) x3)", "(mul x1 (mul x2 x3))")],
            Variety::Monoid => &[
                ("(mul (mul x1 x2) x3)", "(mul x1 (mul x2 x3))"),
                ("(mul x1 unit)", "x1"),
                ("(mul unit x1)", "x1"),
            ],
            Variety::InverseSemigroup => &[
                ("(mul (mul x1 x2) x3)", "(mul x1 (mul x2 x3))"),
                ("(inv (mul x1 x2))", "(mul (inv x2) (inv x1))"),
                ("(inv (inv x1))", "x1"),
                ("(mul (mul x1 (inv x1)) x1)", "x1"),
                (
                    "(mul (mul (inv x1) x1) (mul (inv x2) x2))",
                    "(mul (mul (inv x2) x2) (mul (inv x1) x1))",
                ),
            ],
        };
        src.iter()
            .map(|(l, r)| (self.parse_term(l).unwrap(), self.parse_term(r).unwrap()))
            .collect()
    }

    pub fn generator(self, i: u32) -> NormalForm {
        assert!(i >= 1, "generators are indexed from 1");
        match self {
            Variety::Magma => NormalForm::Magma(Term::Var(i)),
            Variety::Semigroup => NormalForm::Semigroup(vec![i]),
            Variety::Monoid => NormalForm::Monoid(vec![i]),
            Variety::InverseSemigroup => NormalForm::Inverse(MunnElement::generator(i)),
        }
    }

    pub fn mul(self, a: &NormalForm, b: &NormalForm) -> Result<NormalForm> {
        use NormalForm::*;
        Ok(match (self, a, b) {
            (Variety::Magma, Magma(x), Magma(y)) => {
                Magma(Term::app(MUL, vec![x.clone(), y.clone()]))
            }
            (Variety::Semigroup, Semigroup(x), Semigroup(y)) => {
                Semigroup(x.iter().chain(y).copied().collect())
            }
            (Variety::Monoid, Monoid(x), Monoid(y)) => Monoid(x.iter().chain(y).copied().collect()),
            (Variety::InverseSemigroup, Inverse(x), Inverse(y)) => Inverse(x.multiply(y)),
            _ => return Err(self.foreign(a, b)),
        })
    }

    pub fn inv(self, a: &NormalForm) -> Result<NormalForm> {
        match (self, a) {
            (Variety::InverseSemigroup, NormalForm::Inverse(x)) => {
                Ok(NormalForm::Inverse(x.inverse()))
            }
            (Variety::InverseSemigroup, _) => Err(self.foreign(a, a)),
            _ => Err(Error::UnknownOp(INV.into())),
        }
    }

    pub fn unit(self) -> Result<NormalForm> {
        match self {
            Variety::Monoid => Ok(NormalForm::Monoid(vec![])),
            _ => Err(Error::UnknownOp(UNIT.into())),
        }
    }

    /// Applies a basic operation of the variety to normal forms.
    pub fn apply(self, op: &str, args: &[NormalForm]) -> Result<NormalForm> {
        let expected = self
            .signature()
            .arity(op)
            .ok_or_else(|| Error::UnknownOp(op.to_string()))?;
        if expected != args.len() {
            return Err(Error::Arity {
                op: op.to_string(),
                expected,
                found: args.len(),
            });
        }
        match op {
            MUL => self.mul(&args[0], &args[1]),
            INV => self.inv(&args[0]),
            UNIT => self.unit(),
            _ => unreachable!("signature checked"),
        }
    }

    /// Evaluates `t` in the free algebra, reading `x_i` as `env[i-1]`.
    pub fn evaluate(self, t: &Term, env: &[NormalForm]) -> Result<NormalForm> {
        match t {
            Term::Var(i) => env.get(*i as usize - 1).cloned().ok_or_else(|| {
                Error::Malformed(format!("variable x{i} outside {} argument(s)", env.len()))
            }),
            Term::App(op, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.evaluate(a, env))
                    .collect::<Result<Vec<_>>>()?;
                self.apply(op, &vals)
            }
        }
    }

    fn foreign(self, a: &NormalForm, b: &NormalForm) -> Error {
        Error::Mismatch(format!(
            "normal forms of {} and {} used in {}",
            a.variety().name(),
            b.variety().name(),
            self.name()
        ))
    }
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variety {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variety::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown variety `{s}`")))
    }
}

/// Canonical representative of an element of a free algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormalForm {
    Magma(Term),
    /// Nonempty word of generator indices.
    Semigroup(Vec<u32>),
    /// Possibly empty word.
    Monoid(Vec<u32>),
    Inverse(MunnElement),
}

impl NormalForm {
    pub fn variety(&self) -> Variety {
        match self {
            NormalForm::Magma(_) => Variety::Magma,
            NormalForm::Semigroup(_) => Variety::Semigroup,
            NormalForm::Monoid(_) => Variety::Monoid,
            NormalForm::Inverse(_) => Variety::InverseSemigroup,
        }
    }

    /// Generator occurrences for magma and word forms, edge count for trees.
    pub fn size(&self) -> usize {
        match self {
            NormalForm::Magma(t) => t.leaves().len(),
            NormalForm::Semigroup(w) | NormalForm::Monoid(w) => w.len(),
            NormalForm::Inverse(m) => m.edge_count(),
        }
    }

    /// Largest generator index mentioned (0 for the empty word).
    pub fn max_generator(&self) -> u32 {
        match self {
            NormalForm::Magma(t) => t.max_var(),
            NormalForm::Semigroup(w) | NormalForm::Monoid(w) => {
                w.iter().copied().max().unwrap_or(0)
            }
            NormalForm::Inverse(m) => m.labels().last().copied().unwrap_or(0),
        }
    }

    /// A term whose normal form is `self`.
    pub fn to_term(&self) -> Term {
        match self {
            NormalForm::Magma(t) => t.clone(),
            NormalForm::Semigroup(w) | NormalForm::Monoid(w) => word_term(w),
            NormalForm::Inverse(m) => m.to_term(),
        }
    }

    /// Image under the anti-automorphism of the free algebra fixing every generator.
    pub fn reverse(&self) -> NormalForm {
        match self {
            NormalForm::Magma(t) => NormalForm::Magma(mirror_term(t)),
            NormalForm::Semigroup(w) => NormalForm::Semigroup(w.iter().rev().copied().collect()),
            NormalForm::Monoid(w) => NormalForm::Monoid(w.iter().rev().copied().collect()),
            NormalForm::Inverse(m) => NormalForm::Inverse(m.reverse()),
        }
    }

    /// Canonical text, as used in reports and wire formats.
    pub fn serialize(&self) -> String {
        match self {
            NormalForm::Magma(t) => t.to_string(),
            NormalForm::Semigroup(w) | NormalForm::Monoid(w) => {
                w.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
            }
            NormalForm::Inverse(m) => m.serialize(),
        }
    }

    /// Reads a canonical serialization. An S-expression term is accepted as
    /// well and normalized.
    pub fn parse(v: Variety, text: &str) -> Result<NormalForm> {
        let text = text.trim();
        let looks_like_term = text.starts_with('(') || text.starts_with('x') || text == UNIT;
        if looks_like_term {
            return normalize(&v.parse_term(text)?, v);
        }
        match v {
            Variety::Magma => normalize(&v.parse_term(text)?, v),
            Variety::Semigroup | Variety::Monoid => {
                let word = if text.is_empty() {
                    vec![]
                } else {
                    text.split(',')
                        .map(|p| match p.trim().parse::<u32>() {
                            Ok(i) if i >= 1 => Ok(i),
                            _ => Err(Error::Invalid(format!("bad word `{text}`"))),
                        })
                        .collect::<Result<Vec<_>>>()?
                };
                if v == Variety::Semigroup {
                    if word.is_empty() {
                        return Err(Error::Invalid("empty word in a semigroup".into()));
                    }
                    Ok(NormalForm::Semigroup(word))
                } else {
                    Ok(NormalForm::Monoid(word))
                }
            }
            Variety::InverseSemigroup => Ok(NormalForm::Inverse(MunnElement::parse(text)?)),
        }
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn word_term(w: &[u32]) -> Term {
    match w.split_last() {
        None => Term::app(UNIT, vec![]),
        Some((last, init)) => init.iter().rev().fold(Term::Var(*last), |acc, i| {
            Term::app(MUL, vec![Term::Var(*i), acc])
        }),
    }
}

fn mirror_term(t: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(op, args) => Term::App(op.clone(), args.iter().rev().map(mirror_term).collect()),
    }
}

/// Normal form of `t` in the free algebra of `v` on the variables of `t`.
pub fn normalize(t: &Term, v: Variety) -> Result<NormalForm> {
    t.check(v.signature())?;
    let n = t.max_var();
    let gens: Vec<NormalForm> = (1..=n).map(|i| v.generator(i)).collect();
    v.evaluate(t, &gens)
}

pub fn equal_in_free(t1: &Term, t2: &Term, v: Variety) -> Result<bool> {
    Ok(normalize(t1, v)? == normalize(t2, v)?)
}

/// Whether `lhs = rhs` holds in every algebra of `v`.
pub fn identity_holds(lhs: &Term, rhs: &Term, v: Variety) -> Result<bool> {
    equal_in_free(lhs, rhs, v)
}

pub fn munn_tree(t: &Term) -> Result<MunnElement> {
    match normalize(t, Variety::InverseSemigroup)? {
        NormalForm::Inverse(m) => Ok(m),
        _ => unreachable!(),
    }
}

/// `inv(t)` over the inverse-semigroup signature.
pub fn invert(t: &Term) -> Result<Term> {
    t.check(Variety::InverseSemigroup.signature())?;
    Ok(Term::app(INV, vec![t.clone()]))
}

/// All normal forms on generators `1..=rank` of size at most `max_size`,
/// ordered by size and then by serialization.
pub fn enumerate_normal_forms(
    v: Variety,
    rank: u32,
    max_size: usize,
    cap: u128,
) -> Result<Vec<NormalForm>> {
    if rank == 0 {
        return Err(Error::Invalid("rank must be at least 1".into()));
    }
    let estimate: u128 = match v {
        Variety::Semigroup | Variety::Monoid => (0..=max_size as u32)
            .map(|k| (rank as u128).saturating_pow(k))
            .fold(0u128, u128::saturating_add),
        Variety::Magma => crate::term::count_terms(v.signature(), rank as usize, 2 * max_size)
            .iter()
            .fold(0u128, |a, c| a.saturating_add(*c)),
        // (4 rank)^k bounds subtrees with k edges, times k+1 end choices
        Variety::InverseSemigroup => (1..=max_size as u32)
            .map(|k| {
                (4 * rank as u128)
                    .saturating_pow(k)
                    .saturating_mul(k as u128 + 1)
            })
            .fold(0u128, u128::saturating_add),
    };
    if estimate > cap {
        return Err(Error::CapExceeded {
            what: format!(
                "{} elements of rank {rank} and size <= {max_size}",
                v.name()
            ),
            count: estimate,
            cap,
        });
    }
    let mut out: Vec<NormalForm> = match v {
        Variety::Semigroup | Variety::Monoid => {
            let mut words: Vec<Vec<u32>> = vec![vec![]];
            let mut layer: Vec<Vec<u32>> = vec![vec![]];
            for _ in 0..max_size {
                layer = layer
                    .iter()
                    .flat_map(|w| {
                        (1..=rank).map(move |i| {
                            let mut w = w.clone();
                            w.push(i);
                            w
                        })
                    })
                    .collect();
                words.extend(layer.iter().cloned());
            }
            if v == Variety::Semigroup {
                words
                    .into_iter()
                    .filter(|w| !w.is_empty())
                    .map(NormalForm::Semigroup)
                    .collect()
            } else {
                words.into_iter().map(NormalForm::Monoid).collect()
            }
        }
        Variety::Magma => {
            let vars: Vec<u32> = (1..=rank).collect();
            crate::term::enumerate_terms(v.signature(), &vars, 2 * max_size.max(1) - 1, cap)?
                .into_iter()
                .map(NormalForm::Magma)
                .collect()
        }
        Variety::InverseSemigroup => MunnElement::enumerate(rank, max_size)
            .into_iter()
            .map(NormalForm::Inverse)
            .collect(),
    };
    out.retain(|nf| nf.size() <= max_size);
    let mut keyed: Vec<(usize, String, NormalForm)> = out
        .into_iter()
        .map(|nf| (nf.size(), nf.serialize(), nf))
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(keyed.into_iter().map(|(_, _, nf)| nf).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: Variety, s: &str) -> Term {
        v.parse_term(s).unwrap()
    }

    #[test]
    fn semigroup_flattening() {
        let v = Variety::Semigroup;
        assert_eq!(
            normalize(&t(v, "(mul (mul x1 x2) x1)"), v).unwrap(),
            NormalForm::Semigroup(vec![1, 2, 1])
        );
        assert!(!equal_in_free(&t(v, "(mul x1 x2)"), &t(v, "(mul x2 x1)"), v).unwrap());
    }

    #[test]
    fn monoid_unit_law() {
        let v = Variety::Monoid;
        assert_eq!(
            normalize(&t(v, "(mul x1 unit)"), v).unwrap(),
            NormalForm::Monoid(vec![1])
        );
        assert_eq!(normalize(&t(v, "unit"), v).unwrap().serialize(), "");
    }

    #[test]
    fn inverse_examples() {
        let v = Variety::InverseSemigroup;
        assert_eq!(
            normalize(&t(v, "(mul (mul x1 (inv x1)) x1)"), v).unwrap(),
            normalize(&t(v, "x1"), v).unwrap()
        );
        assert!(equal_in_free(
            &t(v, "(mul (inv x1) (mul x1 (mul (inv x2) x2)))"),
            &t(v, "(mul (inv x2) (mul x2 (mul (inv x1) x1)))"),
            v
        )
        .unwrap());
        assert!(!equal_in_free(&t(v, "(mul x1 x2)"), &t(v, "(mul x2 x1)"), v).unwrap());
        assert!(identity_holds(&t(v, "x1"), &t(v, "(inv (inv x1))"), v).unwrap());
    }

    #[test]
    fn munn_tree_examples() {
        let v = Variety::InverseSemigroup;
        let x = munn_tree(&t(v, "x1")).unwrap();
        assert_eq!(x.edge_count(), 1);
        assert_ne!(x.start(), x.end());
        let e = munn_tree(&t(v, "(mul x1 (inv x1))")).unwrap();
        assert_eq!(e.edge_count(), 1);
        assert_eq!(e.start(), e.end());
        // start sits at the tail of the x1 edge
        assert_eq!(e.edges(), vec![(0, 1, 1)]);
        assert_eq!(
            munn_tree(&t(v, "(mul (mul x1 (inv x1)) x1)"))
                .unwrap()
                .serialize(),
            x.serialize()
        );
    }

    #[test]
    fn invert_examples() {
        let v = Variety::InverseSemigroup;
        let xy = t(v, "(mul x1 x2)");
        assert!(equal_in_free(&invert(&xy).unwrap(), &t(v, "(mul (inv x2) (inv x1))"), v).unwrap());
        let x = t(v, "x1");
        assert!(equal_in_free(&invert(&invert(&x).unwrap()).unwrap(), &x, v).unwrap());
        let e = t(v, "(mul x1 (inv x1))");
        assert!(equal_in_free(&invert(&e).unwrap(), &e, v).unwrap());
        assert!(invert(&Term::app("unit", vec![])).is_err());
    }

    #[test]
    fn defining_identities_hold() {
        for v in Variety::ALL {
            for (l, r) in v.defining_identities() {
                assert!(identity_holds(&l, &r, v).unwrap(), "{v}: {l} = {r}");
            }
        }
    }

    #[test]
    fn wrong_signature_is_rejected() {
        let inv = Variety::InverseSemigroup.parse_term("(inv x1)").unwrap();
        assert!(normalize(&inv, Variety::Semigroup).is_err());
        assert!(normalize(&inv, Variety::Magma).is_err());
    }

    #[test]
    fn serialization_round_trip() {
        for v in Variety::ALL {
            for nf in enumerate_normal_forms(v, 2, 2, 1_000_000).unwrap() {
                assert_eq!(NormalForm::parse(v, &nf.serialize()).unwrap(), nf);
                assert_eq!(normalize(&nf.to_term(), v).unwrap(), nf);
            }
        }
    }

    #[test]
    fn word_counts() {
        let all = enumerate_normal_forms(Variety::Semigroup, 2, 2, 1_000).unwrap();
        assert_eq!(all.len(), 6);
        let all = enumerate_normal_forms(Variety::Monoid, 2, 2, 1_000).unwrap();
        assert_eq!(all.len(), 7);
        // magma: leaf-count <= 2 over two generators: 2 + 4
        let all = enumerate_normal_forms(Variety::Magma, 2, 2, 1_000).unwrap();
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn inverse_enumeration_matches_word_closure() {
        // every word over x1, x1^-1 of length <= 4 yields an element with <= 4 edges;
        // conversely every element with <= 2 edges is hit by some word of length <= 6
        let enumerated: std::collections::BTreeSet<_> =
            enumerate_normal_forms(Variety::InverseSemigroup, 1, 2, 1_000_000)
                .unwrap()
                .into_iter()
                .collect();
        let mut reached = std::collections::BTreeSet::new();
        let letters = [Step::fwd(1), Step::bwd(1)];
        let mut layer: Vec<Vec<Step>> = vec![vec![]];
        for _ in 0..6 {
            layer = layer
                .iter()
                .flat_map(|w| {
                    letters.iter().map(move |l| {
                        let mut w = w.clone();
                        w.push(*l);
                        w
                    })
                })
                .collect();
            for w in &layer {
                let m = MunnElement::from_steps(w);
                if m.edge_count() <= 2 {
                    reached.insert(NormalForm::Inverse(m));
                }
            }
        }
        assert_eq!(enumerated, reached);
    }
}
