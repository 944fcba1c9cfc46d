//! Derived (polynomial) operations on free algebras and a bounded solver
//! for systems of term equations with unknown operation symbols.
//!
//! A [`TermAssignment`] sends each operation symbol to a defining term over
//! `x1..x_arity`. Read against a base variety it yields a new algebra on the
//! same carrier ([`DerivedAlgebra`]); read against an [`EquationSystem`] it
//! fills in the unknowns.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::{enumerate_terms, Signature, Symbol, Term};
use crate::variety::{NormalForm, Variety};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermAssignment {
    ops: BTreeMap<Symbol, (usize, Term)>,
}

impl TermAssignment {
    /// Fails when a defining term mentions `x_j` with `j` above the arity.
    pub fn new<S: AsRef<str>>(entries: impl IntoIterator<Item = (S, usize, Term)>) -> Result<Self> {
        let mut ops = BTreeMap::new();
        for (name, arity, term) in entries {
            let name = name.as_ref();
            if let Some(v) = term.vars().into_iter().find(|v| *v as usize > arity) {
                return Err(Error::Invalid(format!(
                    "stray variable x{v} in the term for `{name}`/{arity}: {term}"
                )));
            }
            if ops.insert(Symbol::from(name), (arity, term)).is_some() {
                return Err(Error::DuplicateOp(name.to_string()));
            }
        }
        Ok(TermAssignment { ops })
    }

    /// Every operation of `v` sent to itself.
    pub fn identity(v: Variety) -> TermAssignment {
        TermAssignment::new(v.signature().ops().iter().map(|(op, k)| {
            let args = (1..=*k as u32).map(Term::Var).collect();
            (op.to_string(), *k, Term::App(op.clone(), args))
        }))
        .expect("identity assignment is well formed")
    }

    pub fn get(&self, op: &str) -> Option<&Term> {
        self.ops.get(op).map(|(_, t)| t)
    }

    pub fn arity(&self, op: &str) -> Option<usize> {
        self.ops.get(op).map(|(k, _)| *k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, usize, &Term)> {
        self.ops.iter().map(|(s, (k, t))| (s, *k, t))
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn signature(&self) -> Signature {
        Signature::new(self.ops.iter().map(|(s, (k, _))| (s.to_string(), *k)))
            .expect("assignment symbols are distinct")
    }

    /// Replaces each assigned symbol in `t` by its defining term, innermost first.
    pub fn expand(&self, t: &Term) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::App(op, args) => {
                let args: Vec<Term> = args.iter().map(|a| self.expand(a)).collect();
                match self.ops.get(op) {
                    Some((_, def)) => def.instantiate(&args),
                    None => Term::App(op.clone(), args),
                }
            }
        }
    }

    /// Evaluates `t` in the free algebra of `base`, interpreting assigned
    /// symbols through their terms and the rest as basic operations.
    pub fn evaluate(&self, base: Variety, t: &Term, env: &[NormalForm]) -> Result<NormalForm> {
        match t {
            Term::Var(i) => env.get(*i as usize - 1).cloned().ok_or_else(|| {
                Error::Malformed(format!("variable x{i} outside {} argument(s)", env.len()))
            }),
            Term::App(op, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.evaluate(base, a, env))
                    .collect::<Result<Vec<_>>>()?;
                match self.ops.get(op) {
                    Some((k, def)) => {
                        if *k != vals.len() {
                            return Err(Error::Arity {
                                op: op.to_string(),
                                expected: *k,
                                found: vals.len(),
                            });
                        }
                        base.evaluate(def, &vals)
                    }
                    None => base.apply(op, &vals),
                }
            }
        }
    }

    /// Normal forms of the defining terms, in symbol order.
    pub fn normal_forms(&self, base: Variety) -> Result<Vec<NormalForm>> {
        self.ops
            .values()
            .map(|(k, t)| {
                let gens: Vec<NormalForm> = (1..=*k as u32).map(|i| base.generator(i)).collect();
                base.evaluate(t, &gens)
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(
            self.ops
                .iter()
                .map(|(s, (_, t))| (s.to_string(), serde_json::Value::String(t.to_string())))
                .collect(),
        )
    }
}

impl fmt::Display for TermAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (s, (_, t))) in self.ops.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{s} ↦ {t}")?;
        }
        write!(f, "}}")
    }
}

/// The algebra on the carrier of a free algebra whose basic operations are
/// the term operations named by `assignment`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedAlgebra {
    base: Variety,
    assignment: TermAssignment,
}

pub fn build_derived_algebra(v: Variety, a: TermAssignment) -> Result<DerivedAlgebra> {
    let sig = v.signature();
    for (s, k, t) in a.iter() {
        match sig.arity(s) {
            None => return Err(Error::UnknownOp(s.to_string())),
            Some(expected) if expected != k => {
                return Err(Error::Arity {
                    op: s.to_string(),
                    expected,
                    found: k,
                })
            }
            _ => {}
        }
        t.check(sig)?;
    }
    if let Some((missing, _)) = sig.ops().iter().find(|(op, _)| a.get(op).is_none()) {
        return Err(Error::Invalid(format!("no term assigned to `{missing}`")));
    }
    Ok(DerivedAlgebra {
        base: v,
        assignment: a,
    })
}

impl DerivedAlgebra {
    pub fn base(&self) -> Variety {
        self.base
    }

    pub fn assignment(&self) -> &TermAssignment {
        &self.assignment
    }

    /// Evaluates a term over the base signature with every operation read
    /// as its derived counterpart.
    pub fn evaluate(&self, t: &Term, env: &[NormalForm]) -> Result<NormalForm> {
        self.assignment.evaluate(self.base, t, env)
    }

    /// The derived algebra of this one under `outer`, expressed directly
    /// over the base operations.
    pub fn derive_again(&self, outer: &TermAssignment) -> Result<DerivedAlgebra> {
        let composed = TermAssignment::new(
            outer
                .iter()
                .map(|(s, k, t)| (s.to_string(), k, self.assignment.expand(t))),
        )?;
        build_derived_algebra(self.base, composed)
    }
}

pub fn derived_apply(d: &DerivedAlgebra, op: &str, args: &[NormalForm]) -> Result<NormalForm> {
    let k = d
        .assignment
        .arity(op)
        .ok_or_else(|| Error::UnknownOp(op.to_string()))?;
    if k != args.len() {
        return Err(Error::Arity {
            op: op.to_string(),
            expected: k,
            found: args.len(),
        });
    }
    if let Some(bad) = args.iter().find(|a| a.variety() != d.base) {
        return Err(Error::Mismatch(format!(
            "argument from {} in a derived {} algebra",
            bad.variety(),
            d.base
        )));
    }
    d.base.evaluate(d.assignment.get(op).unwrap(), args)
}

fn generators(v: Variety, n: u32) -> Vec<NormalForm> {
    (1..=n).map(|i| v.generator(i)).collect()
}

/// Whether every identity holds in `d`, variables read as free generators.
pub fn satisfies(d: &DerivedAlgebra, identities: &[(Term, Term)]) -> Result<bool> {
    for (l, r) in identities {
        l.check(d.base.signature())?;
        r.check(d.base.signature())?;
        let env = generators(d.base, l.max_var().max(r.max_var()));
        if d.evaluate(l, &env)? != d.evaluate(r, &env)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For each basic operation of `v`, a term over the derived operations
/// (size at most `max_size`) that evaluates to it, if one exists.
pub fn derivability_witnesses(
    v: Variety,
    a: &TermAssignment,
    max_size: usize,
    cap: u128,
) -> Result<BTreeMap<Symbol, Option<Term>>> {
    let derived_sig = a.signature();
    let mut out = BTreeMap::new();
    for (op, k) in v.signature().ops() {
        out.insert(
            op.clone(),
            express(v, a, &derived_sig, op, *k, max_size, cap)?,
        );
    }
    Ok(out)
}

fn express(
    v: Variety,
    a: &TermAssignment,
    derived_sig: &Signature,
    op: &Symbol,
    k: usize,
    max_size: usize,
    cap: u128,
) -> Result<Option<Term>> {
    let env = generators(v, k as u32);
    let target = v.apply(op, &env)?;
    let vars: Vec<u32> = (1..=k as u32).collect();
    if vars.is_empty() && !derived_sig.ops().iter().any(|(_, a)| *a == 0) {
        return Ok(None);
    }
    let candidates = enumerate_terms(derived_sig, &vars, max_size, cap)?;
    for c in candidates {
        if a.evaluate(v, &c, &env)? == target {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// True iff every basic operation of `v` is a derived term (size at most
/// `max_size`) of the operations defined by `a`.
pub fn check_mutual_derivability(
    v: Variety,
    a: &TermAssignment,
    max_size: usize,
    cap: u128,
) -> Result<bool> {
    Ok(derivability_witnesses(v, a, max_size, cap)?
        .values()
        .all(Option::is_some))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivability {
    pub ops: Vec<Symbol>,
    pub max_size: usize,
}

/// Unknown operation symbols, equations over base plus unknowns, and an
/// optional requirement that some base operations be recoverable from the
/// unknowns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    pub name: String,
    pub description: String,
    pub base: Variety,
    pub unknowns: Vec<(Symbol, usize)>,
    pub equations: Vec<(Term, Term)>,
    pub derivable: Option<Derivability>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    name: Option<String>,
    description: Option<String>,
    variety: Variety,
    unknowns: Vec<UnknownDecl>,
    #[serde(default)]
    equations: Vec<EquationDecl>,
    derivable: Option<DerivableDecl>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct UnknownDecl {
    name: String,
    arity: usize,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct EquationDecl {
    lhs: String,
    rhs: String,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct DerivableDecl {
    ops: Vec<String>,
    max_size: usize,
}

/// An operation with its arity and the terms that may define it.
type Candidates = (Symbol, usize, Vec<Term>);

impl EquationSystem {
    pub fn new(
        name: impl Into<String>,
        base: Variety,
        unknowns: Vec<(Symbol, usize)>,
        equations: &[(&str, &str)],
        derivable: Option<Derivability>,
    ) -> Result<EquationSystem> {
        let sig = base.signature().extend(&unknowns)?;
        let equations = equations
            .iter()
            .map(|(l, r)| {
                Ok((
                    crate::term::parse_term(l, &sig)?,
                    crate::term::parse_term(r, &sig)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(d) = &derivable {
            for op in &d.ops {
                if base.signature().arity(op).is_none() {
                    return Err(Error::UnknownOp(op.to_string()));
                }
            }
            if d.max_size == 0 {
                return Err(Error::Invalid("derivable.max_size must be positive".into()));
            }
        }
        Ok(EquationSystem {
            name: name.into(),
            description: String::new(),
            base,
            unknowns,
            equations,
            derivable,
        })
    }

    /// Parses the TOML `.eqs` format.
    pub fn from_toml(text: &str) -> Result<EquationSystem> {
        let file: SystemFile =
            toml::from_str(text).map_err(|e| Error::Invalid(format!("equation system: {e}")))?;
        let unknowns = file
            .unknowns
            .iter()
            .map(|u| (Symbol::from(u.name.as_str()), u.arity))
            .collect();
        let eqs: Vec<(&str, &str)> = file
            .equations
            .iter()
            .map(|e| (e.lhs.as_str(), e.rhs.as_str()))
            .collect();
        let derivable = file.derivable.map(|d| Derivability {
            ops: d.ops.iter().map(|s| Symbol::from(s.as_str())).collect(),
            max_size: d.max_size,
        });
        let mut sys = EquationSystem::new(
            file.name.unwrap_or_default(),
            file.variety,
            unknowns,
            &eqs,
            derivable,
        )?;
        sys.description = file.description.unwrap_or_default();
        Ok(sys)
    }

    pub fn load(path: &Path) -> Result<EquationSystem> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        let mut sys = EquationSystem::from_toml(&text)?;
        if sys.name.is_empty() {
            sys.name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
        }
        Ok(sys)
    }

    /// Whether `a` satisfies every equation and the derivability clause.
    pub fn holds(&self, a: &TermAssignment) -> Result<bool> {
        let derived_terms = self.derivability_candidates(DEFAULT_SOLVER_CAP)?;
        self.holds_with(a, derived_terms.as_ref())
    }

    fn derivability_candidates(&self, cap: u128) -> Result<Option<Vec<Candidates>>> {
        let Some(d) = &self.derivable else {
            return Ok(None);
        };
        let sig = Signature::new(self.unknowns.iter().map(|(s, k)| (s.to_string(), *k)))?;
        let mut out = Vec::new();
        for op in &d.ops {
            let k = self.base.signature().arity(op).unwrap();
            let vars: Vec<u32> = (1..=k as u32).collect();
            out.push((
                op.clone(),
                k,
                enumerate_terms(&sig, &vars, d.max_size, cap)?,
            ));
        }
        Ok(Some(out))
    }

    fn holds_with(
        &self,
        a: &TermAssignment,
        derived_terms: Option<&Vec<Candidates>>,
    ) -> Result<bool> {
        for (l, r) in &self.equations {
            let env = generators(self.base, l.max_var().max(r.max_var()));
            if a.evaluate(self.base, l, &env)? != a.evaluate(self.base, r, &env)? {
                return Ok(false);
            }
        }
        if let Some(targets) = derived_terms {
            for (op, k, candidates) in targets {
                let env = generators(self.base, *k as u32);
                let target = self.base.apply(op, &env)?;
                let mut found = false;
                for c in candidates {
                    if a.evaluate(self.base, c, &env)? == target {
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub const DEFAULT_SOLVER_CAP: u128 = crate::term::DEFAULT_CAP;

/// Assignments found by [`solve_term_equations`], complete up to `max_size`.
#[derive(Clone, Debug)]
pub struct Solutions {
    pub system: String,
    pub base: Variety,
    pub max_size: usize,
    pub candidates: u128,
    pub assignments: Vec<TermAssignment>,
}

/// Solutions grouped by the free-algebra values of their defining terms.
#[derive(Clone, Debug)]
pub struct SolutionClass {
    pub normal_forms: Vec<NormalForm>,
    pub representative: TermAssignment,
    pub members: usize,
}

impl Solutions {
    pub fn classes(&self) -> Result<Vec<SolutionClass>> {
        let mut out: Vec<SolutionClass> = Vec::new();
        let mut index: BTreeMap<Vec<NormalForm>, usize> = BTreeMap::new();
        for a in &self.assignments {
            let nfs = a.normal_forms(self.base)?;
            match index.get(&nfs) {
                Some(&i) => out[i].members += 1,
                None => {
                    index.insert(nfs.clone(), out.len());
                    out.push(SolutionClass {
                        normal_forms: nfs,
                        representative: a.clone(),
                        members: 1,
                    });
                }
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<serde_json::Value> {
        let classes = self.classes()?;
        Ok(serde_json::json!({
            "system": self.system,
            "variety": self.base.name(),
            "max_size": self.max_size,
            "complete_up_to_size": self.max_size,
            "candidates": self.candidates.to_string(),
            "solutions": self.assignments.iter().map(TermAssignment::to_json).collect::<Vec<_>>(),
            "classes": classes.iter().map(|c| serde_json::json!({
                "representative": c.representative.to_json(),
                "normal_forms": c.normal_forms.iter().map(NormalForm::serialize).collect::<Vec<_>>(),
                "members": c.members,
            })).collect::<Vec<_>>(),
        }))
    }
}

/// Every assignment of terms of size at most `max_size` to the unknowns of
/// `sys` under which all equations hold in the base variety.
pub fn solve_term_equations(sys: &EquationSystem, max_size: usize, cap: u128) -> Result<Solutions> {
    if max_size == 0 {
        return Err(Error::Invalid("max_size must be at least 1".into()));
    }
    let sig = sys.base.signature();
    let mut spaces: Vec<Vec<Term>> = Vec::with_capacity(sys.unknowns.len());
    for (_, k) in &sys.unknowns {
        let vars: Vec<u32> = (1..=*k as u32).collect();
        spaces.push(enumerate_terms(sig, &vars, max_size, cap)?);
    }
    let total = spaces
        .iter()
        .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128));
    if total > cap {
        return Err(Error::CapExceeded {
            what: format!("assignment tuples for `{}` at size <= {max_size}", sys.name),
            count: total,
            cap,
        });
    }
    let derived_terms = sys.derivability_candidates(cap)?;

    let decode = |mut idx: u128| -> TermAssignment {
        let mut picks = vec![0usize; spaces.len()];
        for (slot, space) in picks.iter_mut().zip(&spaces).rev() {
            let n = space.len() as u128;
            *slot = (idx % n) as usize;
            idx /= n;
        }
        TermAssignment::new(
            sys.unknowns
                .iter()
                .zip(picks.iter().zip(&spaces))
                .map(|((s, k), (p, space))| (s.to_string(), *k, space[*p].clone())),
        )
        .expect("candidates use only x1..x_arity")
    };

    let found: Vec<Result<Option<TermAssignment>>> = (0..total as u64)
        .into_par_iter()
        .map(|i| {
            let a = decode(i as u128);
            Ok(sys.holds_with(&a, derived_terms.as_ref())?.then_some(a))
        })
        .collect();
    let mut assignments = Vec::new();
    for r in found {
        if let Some(a) = r? {
            assignments.push(a);
        }
    }
    Ok(Solutions {
        system: sys.name.clone(),
        base: sys.base,
        max_size,
        candidates: total,
        assignments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: Variety, s: &str) -> Term {
        v.parse_term(s).unwrap()
    }

    fn assign(v: Variety, entries: &[(&str, usize, &str)]) -> TermAssignment {
        TermAssignment::new(entries.iter().map(|(s, k, body)| (*s, *k, t(v, body)))).unwrap()
    }

    fn word(w: &[u32]) -> NormalForm {
        NormalForm::Semigroup(w.to_vec())
    }

    #[test]
    fn reversed_product() {
        let v = Variety::Semigroup;
        let d = build_derived_algebra(v, assign(v, &[("mul", 2, "(mul x2 x1)")])).unwrap();
        assert_eq!(
            derived_apply(&d, "mul", &[word(&[1]), word(&[2])]).unwrap(),
            word(&[2, 1])
        );
    }

    #[test]
    fn identity_assignment_reproduces_base() {
        let v = Variety::Semigroup;
        let d = build_derived_algebra(v, TermAssignment::identity(v)).unwrap();
        let a = word(&[1, 2]);
        let b = word(&[2, 2, 1]);
        assert_eq!(
            derived_apply(&d, "mul", &[a.clone(), b.clone()]).unwrap(),
            v.mul(&a, &b).unwrap()
        );
    }

    #[test]
    fn inverse_of_square() {
        let v = Variety::InverseSemigroup;
        let d = build_derived_algebra(v, TermAssignment::identity(v)).unwrap();
        let xx = crate::normalize(&t(v, "(mul x1 x1)"), v).unwrap();
        let expected = crate::normalize(&t(v, "(mul (inv x1) (inv x1))"), v).unwrap();
        assert_eq!(derived_apply(&d, "inv", &[xx]).unwrap(), expected);
    }

    #[test]
    fn build_validation() {
        let v = Variety::Semigroup;
        assert!(matches!(
            TermAssignment::new([("mul", 2, t(v, "(mul x1 x3)"))]),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            build_derived_algebra(v, assign(v, &[("mul", 2, "x1"), ("foo", 1, "x1")])),
            Err(Error::UnknownOp(_))
        ));
        // projection is structurally fine
        assert!(build_derived_algebra(v, assign(v, &[("mul", 2, "x1")])).is_ok());
        assert!(derived_apply(
            &build_derived_algebra(v, assign(v, &[("mul", 2, "x1")])).unwrap(),
            "mul",
            &[word(&[1])]
        )
        .is_err());
    }

    #[test]
    fn satisfies_examples() {
        let v = Variety::Semigroup;
        let assoc = v.defining_identities();
        let rev = build_derived_algebra(v, assign(v, &[("mul", 2, "(mul x2 x1)")])).unwrap();
        assert!(satisfies(&rev, &assoc).unwrap());
        let proj = build_derived_algebra(v, assign(v, &[("mul", 2, "x1")])).unwrap();
        assert!(satisfies(&proj, &assoc).unwrap());
        let comm = (t(v, "(mul x1 x2)"), t(v, "(mul x2 x1)"));
        assert!(!satisfies(&proj, &[comm]).unwrap());
        for w in Variety::ALL {
            let id = build_derived_algebra(w, TermAssignment::identity(w)).unwrap();
            assert!(satisfies(&id, &w.defining_identities()).unwrap());
        }
    }

    #[test]
    fn derivability_examples() {
        let v = Variety::Semigroup;
        assert!(
            check_mutual_derivability(v, &assign(v, &[("mul", 2, "(mul x2 x1)")]), 3, 1000)
                .unwrap()
        );
        assert!(check_mutual_derivability(v, &TermAssignment::identity(v), 3, 1000).unwrap());
        assert!(
            !check_mutual_derivability(v, &assign(v, &[("mul", 2, "x1")]), 6, 100_000).unwrap()
        );
        let w =
            derivability_witnesses(v, &assign(v, &[("mul", 2, "(mul x2 x1)")]), 3, 1000).unwrap();
        assert_eq!(w["mul"].as_ref().unwrap().to_string(), "(mul x2 x1)");
    }

    #[test]
    fn reversal_twice_is_base() {
        let v = Variety::Semigroup;
        let rev = assign(v, &[("mul", 2, "(mul x2 x1)")]);
        let d = build_derived_algebra(v, rev.clone()).unwrap();
        let dd = d.derive_again(&rev).unwrap();
        assert_eq!(
            dd.assignment().get("mul").unwrap().to_string(),
            "(mul x1 x2)"
        );
    }

    #[test]
    fn system_from_toml() {
        let sys = EquationSystem::from_toml(
            r#"
            variety = "semigroup"
            unknowns = [{ name = "w", arity = 2 }]
            equations = [{ lhs = "(w (w x1 x2) x3)", rhs = "(w x1 (w x2 x3))" }]
            derivable = { ops = ["mul"], max_size = 4 }
            "#,
        )
        .unwrap();
        assert_eq!(sys.unknowns.len(), 1);
        assert_eq!(sys.equations.len(), 1);
        assert!(EquationSystem::from_toml(
            "variety = \"semigroup\"\nunknowns = [{ name = \"mul\", arity = 2 }]"
        )
        .is_err());
        assert!(EquationSystem::from_toml(
            "variety = \"semigroup\"\nunknowns = [{ name = \"w\", arity = 2 }]\nequations = [{ lhs = \"(w x1)\", rhs = \"x1\" }]"
        )
        .is_err());
    }

    #[test]
    fn solver_small_semigroup() {
        let sys = EquationSystem::new(
            "assoc",
            Variety::Semigroup,
            vec![(Symbol::from("w"), 2)],
            &[("(w (w x1 x2) x3)", "(w x1 (w x2 x3))")],
            Some(Derivability {
                ops: vec![Symbol::from("mul")],
                max_size: 4,
            }),
        )
        .unwrap();
        let sols = solve_term_equations(&sys, 5, DEFAULT_SOLVER_CAP).unwrap();
        let shown: Vec<String> = sols
            .assignments
            .iter()
            .map(|a| a.get("w").unwrap().to_string())
            .collect();
        assert_eq!(shown, vec!["(mul x1 x2)", "(mul x2 x1)"]);
        for a in &sols.assignments {
            assert!(sys.holds(a).unwrap());
        }
    }

    #[test]
    fn solver_cap() {
        let sys = EquationSystem::new(
            "big",
            Variety::InverseSemigroup,
            vec![(Symbol::from("w"), 2), (Symbol::from("u"), 1)],
            &[],
            None,
        )
        .unwrap();
        assert!(solve_term_equations(&sys, 9, 10_000).unwrap_err().is_cap());
    }
}
