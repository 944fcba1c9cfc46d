use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::checks::{assignment_matches_s, check_central, verify_conjugation};
use super::family::{BijectionFamily, CentralFamily};
use super::report::{CheckReport, Status};
use super::spec::AutomorphismSpec;
use crate::category::{random_morphism, FreeObject, Morphism};
use crate::derived::TermAssignment;
use crate::error::{Error, Result};
use crate::term::{enumerate_terms, Term};
use crate::variety::{NormalForm, Variety};

/// Bounds for the central-function search.
#[derive(Clone, Debug)]
pub struct InnerSearch {
    /// Largest unary candidate term, in nodes.
    pub term_size: usize,
    /// Rank of the test object `A`; at least the maximal arity.
    pub rank: u32,
    pub samples: usize,
    /// Elements of this size or less are probed in each pointwise check.
    pub probe_size: usize,
    /// Term size of the images of sampled morphisms.
    pub sample_size: usize,
    pub seed: u64,
    pub cap: u128,
}

impl InnerSearch {
    pub fn new(v: Variety, term_size: usize) -> InnerSearch {
        InnerSearch {
            term_size,
            rank: v.signature().max_arity().max(2) as u32,
            samples: 100,
            probe_size: 2,
            sample_size: 6,
            seed: 0,
            cap: crate::DEFAULT_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct InnerWitness {
    /// `c_A(a) = t(π(a))`.
    pub term: Term,
    pub inverse_term: Term,
    pub permutation: Vec<u32>,
    pub central: CentralFamily,
    /// `τ = c⁻¹ ∘ s`, the natural isomorphism from the identity functor to `Φ`.
    pub tau: BijectionFamily,
}

#[derive(Clone, Debug)]
pub enum InnerVerdict {
    InnerWitness(Box<InnerWitness>),
    NotInnerUpToBound { term_size: usize, candidates: usize },
    Inconclusive { reason: String },
}

impl InnerVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            InnerVerdict::InnerWitness(_) => "inner_witness",
            InnerVerdict::NotInnerUpToBound { .. } => "not_inner_up_to_bound",
            InnerVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct InnerOutcome {
    pub verdict: InnerVerdict,
    pub report: CheckReport,
    /// Rejected candidates, counted by the first test they failed.
    pub rejections: BTreeMap<&'static str, usize>,
}

impl InnerOutcome {
    pub fn to_json(&self) -> serde_json::Value {
        let verdict = match &self.verdict {
            InnerVerdict::InnerWitness(w) => json!({
                "verdict": "inner_witness",
                "central": w.central.to_json(),
                "term": w.term.to_string(),
                "inverse_term": w.inverse_term.to_string(),
                "permutation": w.permutation,
                "tau": w.tau.to_json(),
            }),
            InnerVerdict::NotInnerUpToBound {
                term_size,
                candidates,
            } => json!({
                "verdict": "not_inner_up_to_bound",
                "term_size": term_size,
                "candidates": candidates,
            }),
            InnerVerdict::Inconclusive { reason } => json!({
                "verdict": "inconclusive",
                "reason": reason,
            }),
        };
        json!({
            "result": verdict,
            "rejections": self.rejections,
            "checks": self.report.to_json()["checks"],
        })
    }
}

fn permutations(n: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                (1..=n)
                    .filter(|i| !p.contains(i))
                    .map(|i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// Distinct unary term operations up to `term_size` nodes, one
/// representative term each, in enumeration order.
fn unary_candidates(v: Variety, term_size: usize, cap: u128) -> Result<Vec<(Term, NormalForm)>> {
    let x = [v.generator(1)];
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for t in enumerate_terms(v.signature(), &[1], term_size, cap)? {
        let nf = v.evaluate(&t, &x)?;
        if seen.insert(nf.clone()) {
            out.push((t, nf));
        }
    }
    Ok(out)
}

/// `t(ω(x1..xk)) = ω*(t(x1)..t(xk))` as an identity of the variety.
fn is_isomorphism_onto_star(v: Variety, t: &Term, star: &TermAssignment) -> Result<bool> {
    for (op, k) in v.signature().ops() {
        let gens: Vec<NormalForm> = (1..=*k as u32).map(|i| v.generator(i)).collect();
        let lhs = v.evaluate(t, &[v.apply(op, &gens)?])?;
        let images = gens
            .iter()
            .map(|g| v.evaluate(t, std::slice::from_ref(g)))
            .collect::<Result<Vec<_>>>()?;
        let star_term = star
            .get(op)
            .ok_or_else(|| Error::Invalid(format!("assignment omits `{op}`")))?;
        if lhs != v.evaluate(star_term, &images)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn sample_morphisms(v: Variety, search: &InnerSearch) -> Result<Vec<Morphism>> {
    let a0 = FreeObject::point(v);
    let a = FreeObject::new(v, search.rank)?;
    let pairs = [(a0, a), (a, a), (a, a0), (a0, a0)];
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    Ok((0..search.samples)
        .map(|i| {
            let (d, c) = pairs[i % pairs.len()];
            random_morphism(d, c, search.sample_size, &mut rng)
        })
        .collect())
}

/// Searches for a central function `c` with `c_A` an isomorphism of `A`
/// onto `A* = A^Φ` among the maps `a ↦ t(π(a))`, `t` a unary term with
/// at most `term_size` nodes and `π` a generator permutation of the test
/// object. A witness yields `τ = c⁻¹ ∘ s`, which is checked to conjugate
/// `Φ` on sampled morphisms.
pub fn decide_inner_via_central(
    phi: &AutomorphismSpec,
    s: &BijectionFamily,
    assignment: &TermAssignment,
    search: &InnerSearch,
) -> Result<InnerOutcome> {
    let v = phi.variety();
    let a = FreeObject::new(v, search.rank)?;
    let a0 = FreeObject::point(v);
    if phi.object(a0) != a0 || phi.object(a) != a {
        return Err(Error::Invalid(format!("the spec must fix {a0} and {a}")));
    }
    if (search.rank as usize) < v.signature().max_arity() {
        return Err(Error::Invalid(
            "test object rank below the maximal arity".into(),
        ));
    }
    for (op, k) in v.signature().ops() {
        if assignment.arity(op) != Some(*k) {
            return Err(Error::Invalid(format!("assignment must define `{op}`/{k}")));
        }
    }

    let mut report = CheckReport::new();
    let sample = sample_morphisms(v, search)?;
    let pre = verify_conjugation(phi, s, &sample, search.probe_size, search.cap)?;
    let pre_status = pre.status();
    report.record(
        format!("s conjugates Φ on {} sampled morphisms", sample.len()),
        Ok((pre_status == Status::Fail).then(|| {
            let bad = pre
                .checks
                .iter()
                .find(|c| c.status == Status::Fail)
                .unwrap();
            format!(
                "{}: {}",
                bad.name,
                bad.counterexample.clone().unwrap_or_default()
            )
        })),
    )?;
    report.record(
        "assignment agrees with s",
        assignment_matches_s(s, a, assignment, search.probe_size, search.cap),
    )?;
    if report.status() != Status::Pass || pre_status == Status::Gap {
        let reason = if report.status() == Status::Gap || pre_status == Status::Gap {
            "s does not cover the sampled data"
        } else {
            "s or the assignment is inconsistent with Φ"
        };
        return Ok(InnerOutcome {
            verdict: InnerVerdict::Inconclusive {
                reason: reason.into(),
            },
            report,
            rejections: BTreeMap::new(),
        });
    }

    let candidates = match unary_candidates(v, search.term_size, search.cap) {
        Ok(c) => c,
        Err(e) if e.is_cap() => {
            return Ok(InnerOutcome {
                verdict: InnerVerdict::Inconclusive {
                    reason: e.to_string(),
                },
                report,
                rejections: BTreeMap::new(),
            })
        }
        Err(e) => return Err(e),
    };
    let x = v.generator(1);
    let perms = permutations(search.rank);
    let mut rejections: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut examined = 0;
    for (t, t_nf) in &candidates {
        examined += perms.len();
        if !is_isomorphism_onto_star(v, t, assignment)? {
            *rejections.entry("not an isomorphism onto A*").or_default() += perms.len();
            continue;
        }
        let mut inverse = None;
        for (d, _) in &candidates {
            let dt = v.evaluate(d, std::slice::from_ref(t_nf))?;
            let td = v.evaluate(t, &[v.evaluate(d, std::slice::from_ref(&x))?])?;
            if dt == x && td == x {
                inverse = Some(d.clone());
                break;
            }
        }
        let Some(d) = inverse else {
            *rejections
                .entry("no inverse term within the bound")
                .or_default() += perms.len();
            continue;
        };
        for p in &perms {
            let c = BijectionFamily::Permutation(p.clone()).then(BijectionFamily::Term {
                forward: t.clone(),
                backward: d.clone(),
            });
            if !check_central(&c, &sample, search.probe_size, search.cap)?.passed() {
                *rejections.entry("not central on the sample").or_default() += 1;
                continue;
            }
            let tau = s.clone().then(c.inverse());
            let conj = verify_conjugation(phi, &tau, &sample, search.probe_size, search.cap)?;
            if !conj.passed() {
                *rejections.entry("c⁻¹∘s does not conjugate Φ").or_default() += 1;
                continue;
            }
            report.pass(format!(
                "c = {t} with inverse {d}, permutation {p:?}: isomorphism onto A*"
            ));
            report.pass(format!("c central on {} sampled morphisms", sample.len()));
            report.pass(format!(
                "τ = c⁻¹∘s conjugates Φ on {} sampled morphisms",
                sample.len()
            ));
            return Ok(InnerOutcome {
                verdict: InnerVerdict::InnerWitness(Box::new(InnerWitness {
                    term: t.clone(),
                    inverse_term: d,
                    permutation: p.clone(),
                    central: c,
                    tau,
                })),
                report,
                rejections,
            });
        }
    }
    Ok(InnerOutcome {
        verdict: InnerVerdict::NotInnerUpToBound {
            term_size: search.term_size,
            candidates: examined,
        },
        report,
        rejections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assignment(v: Variety, entries: &[(&str, usize, &str)]) -> TermAssignment {
        TermAssignment::new(
            entries
                .iter()
                .map(|(op, k, t)| (*op, *k, v.parse_term(t).unwrap())),
        )
        .unwrap()
    }

    #[test]
    fn mirror_on_inverse_semigroups_is_inner_by_inversion() {
        let v = Variety::InverseSemigroup;
        let star = assignment(v, &[("mul", 2, "(mul x2 x1)"), ("inv", 1, "(inv x1)")]);
        let mut search = InnerSearch::new(v, 7);
        search.samples = 40;
        let out = decide_inner_via_central(
            &AutomorphismSpec::mirror(v),
            &BijectionFamily::Reversal,
            &star,
            &search,
        )
        .unwrap();
        let InnerVerdict::InnerWitness(w) = &out.verdict else {
            panic!("{:?}", out.verdict)
        };
        assert_eq!(w.term.to_string(), "(inv x1)");
        assert_eq!(w.permutation, vec![1, 2]);
    }

    #[test]
    fn mirror_on_semigroups_is_not_inner() {
        let v = Variety::Semigroup;
        let star = assignment(v, &[("mul", 2, "(mul x2 x1)")]);
        let mut search = InnerSearch::new(v, 7);
        search.samples = 40;
        let out = decide_inner_via_central(
            &AutomorphismSpec::mirror(v),
            &BijectionFamily::Reversal,
            &star,
            &search,
        )
        .unwrap();
        assert!(
            matches!(
                out.verdict,
                InnerVerdict::NotInnerUpToBound { term_size: 7, .. }
            ),
            "{:?}",
            out.verdict
        );
    }

    #[test]
    fn identity_is_inner_by_identity() {
        for v in [
            Variety::Semigroup,
            Variety::Monoid,
            Variety::InverseSemigroup,
        ] {
            let mut search = InnerSearch::new(v, 3);
            search.samples = 20;
            let out = decide_inner_via_central(
                &AutomorphismSpec::identity(v),
                &BijectionFamily::Identity,
                &TermAssignment::identity(v),
                &search,
            )
            .unwrap();
            let InnerVerdict::InnerWitness(w) = &out.verdict else {
                panic!("{v}: {:?}", out.verdict)
            };
            assert_eq!(w.term, Term::var(1));
        }
    }

    #[test]
    fn inconsistent_family_is_inconclusive() {
        let v = Variety::Semigroup;
        let star = assignment(v, &[("mul", 2, "(mul x2 x1)")]);
        let mut search = InnerSearch::new(v, 3);
        search.samples = 10;
        let out = decide_inner_via_central(
            &AutomorphismSpec::mirror(v),
            &BijectionFamily::Identity,
            &star,
            &search,
        )
        .unwrap();
        assert!(matches!(out.verdict, InnerVerdict::Inconclusive { .. }));
    }

    #[test]
    fn permutations_of_three() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![1, 2, 3]);
    }
}
