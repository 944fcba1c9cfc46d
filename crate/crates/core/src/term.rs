//! Signatures, terms, substitution and bounded enumeration.
//!
//! Terms are rendered as S-expressions: `x3` is the variable with index 3,
//! `(mul x1 (inv x2))` is an application, and a nullary symbol is written
//! bare (`unit`) or as `(unit)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Default ceiling on the number of candidates any enumeration may produce.
pub const DEFAULT_CAP: u128 = 1_000_000;

pub type Symbol = Arc<str>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    ops: Vec<(Symbol, usize)>,
    max_arity: usize,
}

impl Signature {
    pub fn new<S: AsRef<str>>(ops: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (name, arity) in ops {
            let name = name.as_ref();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::Invalid(format!("bad operation name `{name}`")));
            }
            if is_variable_token(name) {
                return Err(Error::Invalid(format!(
                    "operation name `{name}` collides with variable syntax"
                )));
            }
            if !seen.insert(name.to_string()) {
                return Err(Error::DuplicateOp(name.to_string()));
            }
            out.push((Symbol::from(name), arity));
        }
        let max_arity = out.iter().map(|(_, a)| *a).max().unwrap_or(0);
        Ok(Signature {
            ops: out,
            max_arity,
        })
    }

    /// Reads a signature from TOML: a list of `[[op]]` tables, each with a
    /// `name` and an `arity`.
    pub fn from_toml(text: &str) -> Result<Self> {
        #[derive(serde::Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            #[serde(default)]
            op: Vec<RawOp>,
        }
        #[derive(serde::Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RawOp {
            name: String,
            arity: usize,
        }
        let raw: Raw =
            toml::from_str(text).map_err(|e| Error::Invalid(format!("signature: {e}")))?;
        Signature::new(raw.op.into_iter().map(|o| (o.name, o.arity)))
    }

    pub fn ops(&self) -> &[(Symbol, usize)] {
        &self.ops
    }

    /// Largest declared arity.
    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn arity(&self, op: &str) -> Option<usize> {
        self.ops.iter().find(|(n, _)| &**n == op).map(|(_, a)| *a)
    }

    pub fn symbol(&self, op: &str) -> Option<&Symbol> {
        self.ops.iter().find(|(n, _)| &**n == op).map(|(n, _)| n)
    }

    /// Union of two signatures; fails on a name clash.
    pub fn extend(&self, extra: &[(Symbol, usize)]) -> Result<Signature> {
        Signature::new(
            self.ops
                .iter()
                .chain(extra.iter())
                .map(|(n, a)| (n.to_string(), *a)),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(u32),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(index: u32) -> Term {
        assert!(index >= 1, "variable indices start at 1");
        Term::Var(index)
    }

    pub fn app(op: impl Into<Symbol>, args: Vec<Term>) -> Term {
        Term::App(op.into(), args)
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            Term::Var(i) => {
                out.insert(*i);
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn max_var(&self) -> u32 {
        self.vars().last().copied().unwrap_or(0)
    }

    /// Variable leaves, left to right.
    pub fn leaves(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.push_leaves(&mut out);
        out
    }

    fn push_leaves(&self, out: &mut Vec<u32>) {
        match self {
            Term::Var(i) => out.push(*i),
            Term::App(_, args) => args.iter().for_each(|a| a.push_leaves(out)),
        }
    }

    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = vec![self];
        if let Term::App(_, args) = self {
            for a in args {
                out.extend(a.subterms());
            }
        }
        out
    }

    pub fn ops_used(&self) -> BTreeSet<Symbol> {
        self.subterms()
            .into_iter()
            .filter_map(|t| match t {
                Term::App(op, _) => Some(op.clone()),
                Term::Var(_) => None,
            })
            .collect()
    }

    /// Checks every application against `sig` and every variable index is positive.
    pub fn check(&self, sig: &Signature) -> Result<()> {
        match self {
            Term::Var(0) => Err(Error::Malformed("variable index 0".into())),
            Term::Var(_) => Ok(()),
            Term::App(op, args) => {
                let expected = sig
                    .arity(op)
                    .ok_or_else(|| Error::UnknownOp(op.to_string()))?;
                if expected != args.len() {
                    return Err(Error::Arity {
                        op: op.to_string(),
                        expected,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check(sig))
            }
        }
    }

    pub fn substitute(&self, s: &Substitution) -> Term {
        match self {
            Term::Var(i) => s.get(*i).cloned().unwrap_or(Term::Var(*i)),
            Term::App(op, args) => {
                Term::App(op.clone(), args.iter().map(|a| a.substitute(s)).collect())
            }
        }
    }

    /// Replaces `x_i` by `args[i-1]`; variables beyond `args.len()` are kept.
    pub fn instantiate(&self, args: &[Term]) -> Term {
        self.substitute(&Substitution::from_slice(args))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(op, args) if args.is_empty() => write!(f, "{op}"),
            Term::App(op, args) => {
                write!(f, "({op}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Finite map from variable indices to terms; unmapped variables are fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<u32, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// `x_{i+1} ↦ terms[i]`.
    pub fn from_slice(terms: &[Term]) -> Self {
        Substitution(
            terms
                .iter()
                .enumerate()
                .map(|(i, t)| (i as u32 + 1, t.clone()))
                .collect(),
        )
    }

    pub fn with(mut self, var: u32, t: Term) -> Self {
        self.0.insert(var, t);
        self
    }

    pub fn insert(&mut self, var: u32, t: Term) {
        self.0.insert(var, t);
    }

    pub fn get(&self, var: u32) -> Option<&Term> {
        self.0.get(&var)
    }

    /// `then ∘ self`: first apply `self`, then `then`.
    pub fn and_then(&self, then: &Substitution) -> Substitution {
        let mut out: BTreeMap<u32, Term> = self
            .0
            .iter()
            .map(|(v, t)| (*v, t.substitute(then)))
            .collect();
        for (v, t) in &then.0 {
            out.entry(*v).or_insert_with(|| t.clone());
        }
        Substitution(out)
    }
}

impl FromIterator<(u32, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (u32, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

fn is_variable_token(tok: &str) -> bool {
    tok.len() > 1 && tok.starts_with('x') && tok[1..].bytes().all(|b| b.is_ascii_digit())
}

#[derive(Debug)]
enum Tok<'a> {
    Open(usize),
    Close(usize),
    Atom(usize, &'a str),
}

fn tokenize(text: &str) -> Result<Vec<Tok<'_>>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'(' {
            out.push(Tok::Open(i));
            i += 1;
        } else if c == b')' {
            out.push(Tok::Close(i));
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Tok::Atom(start, &text[start..i]));
        } else {
            return Err(Error::Syntax {
                pos: i,
                msg: format!("unexpected character `{}`", c as char),
            });
        }
    }
    Ok(out)
}

/// Parses an S-expression term over `sig`.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term> {
    let toks = tokenize(text)?;
    let mut pos = 0;
    let t = parse_at(&toks, &mut pos, sig, text.len())?;
    if let Some(tok) = toks.get(pos) {
        let at = match tok {
            Tok::Open(p) | Tok::Close(p) | Tok::Atom(p, _) => *p,
        };
        return Err(Error::Syntax {
            pos: at,
            msg: "trailing input".into(),
        });
    }
    Ok(t)
}

fn parse_atom(at: usize, name: &str, sig: &Signature) -> Result<Term> {
    if is_variable_token(name) {
        let idx: u32 = name[1..].parse().map_err(|_| Error::Syntax {
            pos: at,
            msg: format!("variable index out of range in `{name}`"),
        })?;
        if idx == 0 {
            return Err(Error::Syntax {
                pos: at,
                msg: "variable indices start at 1".into(),
            });
        }
        return Ok(Term::Var(idx));
    }
    match sig.arity(name) {
        None => Err(Error::UnknownOp(name.to_string())),
        Some(0) => Ok(Term::App(sig.symbol(name).unwrap().clone(), vec![])),
        Some(k) => Err(Error::Arity {
            op: name.to_string(),
            expected: k,
            found: 0,
        }),
    }
}

fn parse_at(toks: &[Tok<'_>], pos: &mut usize, sig: &Signature, end: usize) -> Result<Term> {
    match toks.get(*pos) {
        None => Err(Error::Syntax {
            pos: end,
            msg: "unexpected end of input".into(),
        }),
        Some(Tok::Close(p)) => Err(Error::Syntax {
            pos: *p,
            msg: "unexpected `)`".into(),
        }),
        Some(Tok::Atom(p, name)) => {
            *pos += 1;
            parse_atom(*p, name, sig)
        }
        Some(Tok::Open(p)) => {
            let open_at = *p;
            *pos += 1;
            let (op_at, name) = match toks.get(*pos) {
                Some(Tok::Atom(q, name)) => (*q, *name),
                _ => {
                    return Err(Error::Syntax {
                        pos: open_at,
                        msg: "expected operation symbol after `(`".into(),
                    })
                }
            };
            if is_variable_token(name) {
                return Err(Error::Syntax {
                    pos: op_at,
                    msg: format!("variable `{name}` in operator position"),
                });
            }
            *pos += 1;
            let mut args = Vec::new();
            loop {
                match toks.get(*pos) {
                    Some(Tok::Close(_)) => {
                        *pos += 1;
                        break;
                    }
                    None => {
                        return Err(Error::Syntax {
                            pos: end,
                            msg: format!("unclosed `(` opened at byte {open_at}"),
                        })
                    }
                    _ => args.push(parse_at(toks, pos, sig, end)?),
                }
            }
            let expected = sig
                .arity(name)
                .ok_or_else(|| Error::UnknownOp(name.to_string()))?;
            if expected != args.len() {
                return Err(Error::Arity {
                    op: name.to_string(),
                    expected,
                    found: args.len(),
                });
            }
            Ok(Term::App(sig.symbol(name).unwrap().clone(), args))
        }
    }
}

/// Number of terms of each size `0..=max_size` (index 0 unused), saturating.
pub fn count_terms(sig: &Signature, n_vars: usize, max_size: usize) -> Vec<u128> {
    let mut count = vec![0u128; max_size + 1];
    for n in 1..=max_size {
        let mut c: u128 = 0;
        for (_, k) in sig.ops() {
            if *k == 0 && n == 1 {
                c = c.saturating_add(1);
            } else if *k > 0 && n > *k {
                c = c.saturating_add(tuple_count(&count, *k, n - 1));
            }
        }
        if n == 1 {
            c = c.saturating_add(n_vars as u128);
        }
        count[n] = c;
    }
    count
}

fn tuple_count(count: &[u128], k: usize, total: usize) -> u128 {
    if k == 1 {
        return count.get(total).copied().unwrap_or(0);
    }
    let mut acc: u128 = 0;
    for first in 1..=total.saturating_sub(k - 1) {
        let rest = tuple_count(count, k - 1, total - first);
        acc = acc.saturating_add(count[first].saturating_mul(rest));
    }
    acc
}

/// All terms over `sig` with variables from `vars` and at most `max_size`
/// nodes, each once, ordered by size and then by rendered text.
pub fn enumerate_terms(
    sig: &Signature,
    vars: &[u32],
    max_size: usize,
    cap: u128,
) -> Result<Vec<Term>> {
    if max_size == 0 {
        return Err(Error::Invalid("max_size must be at least 1".into()));
    }
    if vars.contains(&0) {
        return Err(Error::Invalid("variable indices start at 1".into()));
    }
    let vars: BTreeSet<u32> = vars.iter().copied().collect();
    if vars.is_empty() && !sig.ops().iter().any(|(_, a)| *a == 0) {
        return Err(Error::Invalid(
            "no variables and no nullary operation: nothing to enumerate".into(),
        ));
    }
    let counts = count_terms(sig, vars.len(), max_size);
    let total = counts.iter().fold(0u128, |a, c| a.saturating_add(*c));
    if total > cap {
        return Err(Error::CapExceeded {
            what: format!("terms of size <= {max_size}"),
            count: total,
            cap,
        });
    }

    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max_size + 1];
    for n in 1..=max_size {
        let mut bucket = Vec::with_capacity(counts[n] as usize);
        if n == 1 {
            bucket.extend(vars.iter().map(|v| Term::Var(*v)));
        }
        for (op, k) in sig.ops() {
            if *k == 0 {
                if n == 1 {
                    bucket.push(Term::App(op.clone(), vec![]));
                }
            } else if n > *k {
                let mut prefix = Vec::with_capacity(*k);
                push_tuples(&by_size, *k, n - 1, &mut prefix, &mut |args| {
                    bucket.push(Term::App(op.clone(), args.to_vec()))
                });
            }
        }
        let mut keyed: Vec<(String, Term)> =
            bucket.into_iter().map(|t| (t.to_string(), t)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        by_size[n] = keyed.into_iter().map(|(_, t)| t).collect();
    }
    Ok(by_size.into_iter().flatten().collect())
}

fn push_tuples(
    by_size: &[Vec<Term>],
    k: usize,
    total: usize,
    prefix: &mut Vec<Term>,
    emit: &mut dyn FnMut(&[Term]),
) {
    if k == 0 {
        if total == 0 {
            emit(prefix);
        }
        return;
    }
    if total < k {
        return;
    }
    for first in 1..=total - (k - 1) {
        for t in &by_size[first] {
            prefix.push(t.clone());
            push_tuples(by_size, k - 1, total - first, prefix, emit);
            prefix.pop();
        }
    }
}

/// Draws a random term of size at most `max_size`. Not uniform; biased
/// towards using the whole budget so that samples exercise deep terms.
pub fn random_term<R: Rng + ?Sized>(
    sig: &Signature,
    vars: &[u32],
    max_size: usize,
    rng: &mut R,
) -> Term {
    assert!(max_size >= 1 && !vars.is_empty());
    let budget = rng.gen_range(1..=max_size);
    random_term_of_size(sig, vars, budget, rng)
}

/// Random term using at most `budget` nodes, and exactly `budget` whenever
/// the signature allows it.
pub fn random_term_of_size<R: Rng + ?Sized>(
    sig: &Signature,
    vars: &[u32],
    budget: usize,
    rng: &mut R,
) -> Term {
    let fitting: Vec<&(Symbol, usize)> = sig
        .ops()
        .iter()
        .filter(|(_, k)| *k > 0 && *k < budget)
        .collect();
    if fitting.is_empty() {
        return Term::Var(vars[rng.gen_range(0..vars.len())]);
    }
    let (op, k) = fitting[rng.gen_range(0..fitting.len())];
    // split budget-1 into k positive parts
    let mut rest = budget - 1;
    let mut args = Vec::with_capacity(*k);
    for i in 0..*k {
        let remaining_slots = k - i - 1;
        let part = if remaining_slots == 0 {
            rest
        } else {
            rng.gen_range(1..=rest - remaining_slots)
        };
        rest -= part;
        args.push(random_term_of_size(sig, vars, part, rng));
    }
    Term::App(op.clone(), args)
}
