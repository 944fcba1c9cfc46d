use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteOp {
    pub name: String,
    pub arity: usize,
    /// Row-major: the entry for `(a1, .., ak)` sits at `Σ a_i · n^(k-i)`.
    pub table: Vec<u32>,
}

/// Operation tables over the carrier `{0, .., size-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteAlgebra {
    pub name: String,
    pub size: usize,
    pub ops: Vec<FiniteOp>,
}

/// A total map between carriers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FiniteMap {
    pub domain: String,
    pub codomain: String,
    pub values: Vec<u32>,
}

impl FiniteAlgebra {
    pub fn new(name: impl Into<String>, size: usize, ops: Vec<FiniteOp>) -> Result<FiniteAlgebra> {
        let name = name.into();
        if size == 0 {
            return Err(Error::Invalid(format!("{name}: empty carrier")));
        }
        for (i, op) in ops.iter().enumerate() {
            if ops[..i].iter().any(|o| o.name == op.name) {
                return Err(Error::DuplicateOp(op.name.clone()));
            }
            let want = size.checked_pow(op.arity as u32).ok_or_else(|| {
                Error::Invalid(format!("{name}: table for `{}` too large", op.name))
            })?;
            if op.table.len() != want {
                return Err(Error::Invalid(format!(
                    "{name}: `{}` needs {want} entries, found {}",
                    op.name,
                    op.table.len()
                )));
            }
            if let Some(bad) = op.table.iter().find(|e| **e as usize >= size) {
                return Err(Error::Invalid(format!(
                    "{name}: entry {bad} of `{}` outside the carrier",
                    op.name
                )));
            }
        }
        Ok(FiniteAlgebra { name, size, ops })
    }

    pub fn signature(&self) -> Vec<(&str, usize)> {
        self.ops
            .iter()
            .map(|o| (o.name.as_str(), o.arity))
            .collect()
    }

    pub fn same_signature(&self, other: &FiniteAlgebra) -> bool {
        self.signature() == other.signature()
    }

    pub fn apply(&self, op: usize, args: &[u32]) -> u32 {
        let o = &self.ops[op];
        debug_assert_eq!(args.len(), o.arity);
        let idx = args
            .iter()
            .fold(0usize, |acc, a| acc * self.size + *a as usize);
        o.table[idx]
    }

    /// Every argument tuple of `op`, in table order.
    pub fn tuples(&self, op: usize) -> impl Iterator<Item = Vec<u32>> + '_ {
        let k = self.ops[op].arity;
        let n = self.size;
        (0..self.ops[op].table.len()).map(move |mut idx| {
            let mut t = vec![0u32; k];
            for slot in t.iter_mut().rev() {
                *slot = (idx % n) as u32;
                idx /= n;
            }
            t
        })
    }

    /// Reads every algebra in a table file. A file holds one algebra or
    /// several, each introduced by an `algebra <name>` line.
    pub fn parse_all(text: &str, default_name: &str) -> Result<Vec<FiniteAlgebra>> {
        let mut tokens: Vec<(usize, &str)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            tokens.extend(line.split_whitespace().map(|t| (lineno + 1, t)));
        }
        let mut out = Vec::new();
        let mut it = tokens.into_iter().peekable();
        let bad = |line: usize, msg: String| {
            Error::Invalid(format!("{default_name}, line {line}: {msg}"))
        };
        while it.peek().is_some() {
            let mut name = None;
            if let Some((_, "algebra")) = it.peek() {
                let (line, _) = it.next().unwrap();
                name = Some(
                    it.next()
                        .ok_or_else(|| bad(line, "missing algebra name".into()))?
                        .1
                        .to_string(),
                );
            }
            let (line, kw) = it.next().ok_or_else(|| bad(0, "missing `size`".into()))?;
            if kw != "size" {
                return Err(bad(line, format!("expected `size`, found `{kw}`")));
            }
            let size = number(it.next(), line)?;
            let mut ops = Vec::new();
            while let Some((line, "op")) = it.peek().copied() {
                it.next();
                let op = it
                    .next()
                    .ok_or_else(|| bad(line, "missing operation name".into()))?
                    .1
                    .to_string();
                let arity = number(it.next(), line)?;
                let count = size.checked_pow(arity as u32).unwrap_or(usize::MAX);
                let mut table = Vec::with_capacity(count.min(1 << 20));
                for _ in 0..count {
                    table.push(number(it.next(), line)? as u32);
                }
                ops.push(FiniteOp {
                    name: op,
                    arity,
                    table,
                });
            }
            let name = name.unwrap_or_else(|| match out.len() {
                0 => default_name.to_string(),
                i => format!("{default_name}#{i}"),
            });
            out.push(FiniteAlgebra::new(name, size, ops)?);
        }
        if out.is_empty() {
            return Err(Error::Invalid(format!("{default_name}: no algebra found")));
        }
        Ok(out)
    }

    pub fn parse(text: &str, default_name: &str) -> Result<FiniteAlgebra> {
        let mut all = FiniteAlgebra::parse_all(text, default_name)?;
        if all.len() != 1 {
            return Err(Error::Invalid(format!(
                "{default_name}: expected one algebra, found {}",
                all.len()
            )));
        }
        Ok(all.pop().unwrap())
    }

    pub fn load(path: &Path) -> Result<FiniteAlgebra> {
        let text = read(path)?;
        FiniteAlgebra::parse(&text, &stem(path))
    }

    pub fn to_tbl(&self) -> String {
        let mut s = format!("algebra {}\nsize {}\n", self.name, self.size);
        for op in &self.ops {
            s.push_str(&format!("op {} {}\n", op.name, op.arity));
            let row = if op.arity == 0 { 1 } else { self.size };
            for chunk in op.table.chunks(row) {
                let cells: Vec<String> = chunk.iter().map(u32::to_string).collect();
                s.push_str(&cells.join(" "));
                s.push('\n');
            }
        }
        s
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (size {})", self.name, self.size)
    }
}

fn number(tok: Option<(usize, &str)>, line: usize) -> Result<usize> {
    match tok {
        Some((l, t)) => t
            .parse()
            .map_err(|_| Error::Invalid(format!("line {l}: expected a number, found `{t}`"))),
        None => Err(Error::Invalid(format!(
            "line {line}: unexpected end of table"
        ))),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "algebra".into())
}

/// A directory of `.tbl` files (sorted by name) or a single file, which may
/// hold several algebras. All members must share one signature.
pub fn load_universe(path: &Path) -> Result<Vec<FiniteAlgebra>> {
    let mut out = Vec::new();
    if path.is_dir() {
        let mut files: Vec<_> = std::fs::read_dir(path)
            .map_err(|e| Error::Io {
                path: path.display().to_string(),
                msg: e.to_string(),
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "tbl"))
            .collect();
        files.sort();
        for f in files {
            out.extend(FiniteAlgebra::parse_all(&read(&f)?, &stem(&f))?);
        }
    } else {
        out = FiniteAlgebra::parse_all(&read(path)?, &stem(path))?;
    }
    if out.is_empty() {
        return Err(Error::Invalid(format!(
            "{}: empty universe",
            path.display()
        )));
    }
    if let Some(bad) = out.iter().find(|a| !a.same_signature(&out[0])) {
        return Err(Error::Mismatch(format!(
            "{} and {} have different signatures",
            out[0].name, bad.name
        )));
    }
    Ok(out)
}

/// A description of the first place where `map` fails to be a
/// homomorphism `a → b`, or `None`.
pub fn homomorphism_defect(a: &FiniteAlgebra, b: &FiniteAlgebra, map: &[u32]) -> Option<String> {
    for (i, op) in a.ops.iter().enumerate() {
        for args in a.tuples(i) {
            let lhs = map[a.apply(i, &args) as usize];
            let mapped: Vec<u32> = args.iter().map(|x| map[*x as usize]).collect();
            let rhs = b.apply(i, &mapped);
            if lhs != rhs {
                return Some(format!(
                    "{}{:?}: h(result) = {lhs} but {}(h(args)) = {rhs}",
                    op.name, args, op.name
                ));
            }
        }
    }
    None
}

pub fn is_homomorphism(a: &FiniteAlgebra, b: &FiniteAlgebra, map: &[u32]) -> bool {
    homomorphism_defect(a, b, map).is_none()
}

/// Compatibility constraints grouped by the largest carrier element they
/// mention, so a left-to-right assignment can test each as soon as it is
/// fully determined.
struct Constraints {
    by_max: Vec<Vec<(usize, Vec<u32>, u32)>>,
}

impl Constraints {
    fn new(a: &FiniteAlgebra) -> Constraints {
        let mut by_max = vec![Vec::new(); a.size];
        for i in 0..a.ops.len() {
            for args in a.tuples(i) {
                let r = a.apply(i, &args);
                let m = args.iter().copied().chain([r]).max().unwrap() as usize;
                by_max[m].push((i, args, r));
            }
        }
        Constraints { by_max }
    }
}

/// All homomorphisms `a → b` (bijective ones only when `bijective`), in
/// lexicographic order of their value arrays.
pub fn search_maps(a: &FiniteAlgebra, b: &FiniteAlgebra, bijective: bool) -> Vec<Vec<u32>> {
    if bijective && a.size != b.size {
        return Vec::new();
    }
    let mut search = MapSearch {
        a,
        b,
        cons: Constraints::new(a),
        bijective,
        h: vec![0; a.size],
        used: vec![false; b.size],
        out: Vec::new(),
    };
    search.go(0);
    search.out
}

struct MapSearch<'a> {
    a: &'a FiniteAlgebra,
    b: &'a FiniteAlgebra,
    cons: Constraints,
    bijective: bool,
    h: Vec<u32>,
    used: Vec<bool>,
    out: Vec<Vec<u32>>,
}

impl MapSearch<'_> {
    fn go(&mut self, i: usize) {
        if i == self.a.size {
            self.out.push(self.h.clone());
            return;
        }
        for v in 0..self.b.size as u32 {
            if self.bijective && self.used[v as usize] {
                continue;
            }
            self.h[i] = v;
            let ok = self.cons.by_max[i].iter().all(|(op, args, r)| {
                let mapped: Vec<u32> = args.iter().map(|x| self.h[*x as usize]).collect();
                self.h[*r as usize] == self.b.apply(*op, &mapped)
            });
            if ok {
                self.used[v as usize] = true;
                self.go(i + 1);
                self.used[v as usize] = false;
            }
        }
    }
}

/// All homomorphisms `a → b`. The raw search space `|b|^|a|` must stay
/// within `cap`.
pub fn homomorphisms(a: &FiniteAlgebra, b: &FiniteAlgebra, cap: u128) -> Result<Vec<FiniteMap>> {
    if !a.same_signature(b) {
        return Err(Error::Mismatch(format!(
            "{} and {} have different signatures",
            a.name, b.name
        )));
    }
    let space = (b.size as u128).saturating_pow(a.size as u32);
    if space > cap {
        return Err(Error::CapExceeded {
            what: format!("maps {} -> {}", a.name, b.name),
            count: space,
            cap,
        });
    }
    Ok(search_maps(a, b, false)
        .into_iter()
        .map(|values| FiniteMap {
            domain: a.name.clone(),
            codomain: b.name.clone(),
            values,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain2() -> FiniteAlgebra {
        FiniteAlgebra::parse("size 2\nop meet 2\n0 0\n0 1\n", "chain2").unwrap()
    }

    #[test]
    fn parse_and_apply() {
        let a = chain2();
        assert_eq!(a.apply(0, &[1, 1]), 1);
        assert_eq!(a.apply(0, &[0, 1]), 0);
        assert_eq!(FiniteAlgebra::parse(&a.to_tbl(), "x").unwrap(), a);
        let tuples: Vec<_> = a.tuples(0).collect();
        assert_eq!(tuples, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn parse_errors() {
        assert!(FiniteAlgebra::parse("size 2\nop m 2\n0 0 0\n", "t").is_err());
        assert!(FiniteAlgebra::parse("size 2\nop m 2\n0 0 0 2\n", "t").is_err());
        assert!(FiniteAlgebra::parse("op m 2\n", "t").is_err());
        assert!(FiniteAlgebra::parse("size 0\n", "t").is_err());
        let two = "algebra a\nsize 1\nop m 2\n0\nalgebra b\nsize 1\nop m 2\n0\n";
        assert_eq!(FiniteAlgebra::parse_all(two, "t").unwrap().len(), 2);
        assert!(FiniteAlgebra::parse(two, "t").is_err());
    }

    #[test]
    fn semilattice_homs() {
        let a = chain2();
        let homs = homomorphisms(&a, &a, 1000).unwrap();
        let vals: Vec<_> = homs.iter().map(|h| h.values.clone()).collect();
        assert_eq!(vals, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert!(!is_homomorphism(&a, &a, &[1, 0]));
    }

    #[test]
    fn homs_from_a_point_are_idempotents() {
        let point = FiniteAlgebra::parse("size 1\nop m 2\n0\n", "pt").unwrap();
        let b = FiniteAlgebra::parse("size 3\nop m 2\n1 1 1\n1 1 1\n2 2 2\n", "b").unwrap();
        let homs = homomorphisms(&point, &b, 1000).unwrap();
        let images: Vec<u32> = homs.iter().map(|h| h.values[0]).collect();
        let idem: Vec<u32> = (0..3).filter(|x| b.apply(0, &[*x, *x]) == *x).collect();
        assert_eq!(images, idem);
    }

    #[test]
    fn cap_and_signature_errors() {
        let a = chain2();
        assert!(homomorphisms(&a, &a, 3).unwrap_err().is_cap());
        let other = FiniteAlgebra::parse("size 2\nop j 2\n0 1\n1 1\n", "j").unwrap();
        assert!(homomorphisms(&a, &other, 1000).is_err());
    }
}
