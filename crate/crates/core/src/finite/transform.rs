use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use super::algebra::{search_maps, FiniteAlgebra, FiniteOp};
use super::indicator::permutations;
use crate::error::{Error, Result};

/// Largest carrier built by default: `T_4` has 256 elements, `𝔉_3` has 64.
pub const DEFAULT_MONOID_CAP: u128 = 256;

/// `T_n` or `𝔉_n` under `(f·g)(x) = f(g(x))`. Element `i` is the map whose
/// value array, read as base-`b` digits (first point most significant), is
/// `i`; `b = n` for total maps and `b = n + 1` for partial ones, with the
/// digit `n` meaning "undefined".
#[derive(Clone, Debug)]
pub struct TransformationMonoid {
    pub n: usize,
    pub partial: bool,
    pub elements: Vec<Vec<Option<u32>>>,
    pub algebra: FiniteAlgebra,
}

impl TransformationMonoid {
    fn base(&self) -> usize {
        if self.partial {
            self.n + 1
        } else {
            self.n
        }
    }

    pub fn index_of(&self, f: &[Option<u32>]) -> usize {
        let b = self.base();
        f.iter()
            .fold(0, |acc, v| acc * b + v.map_or(self.n, |x| x as usize))
    }

    pub fn mul(&self, f: usize, g: usize) -> usize {
        self.algebra.apply(0, &[f as u32, g as u32]) as usize
    }

    pub fn identity(&self) -> usize {
        let id: Vec<Option<u32>> = (0..self.n as u32).map(Some).collect();
        self.index_of(&id)
    }

    pub fn permutation(&self, p: &[u32]) -> usize {
        let f: Vec<Option<u32>> = p.iter().map(|x| Some(*x)).collect();
        self.index_of(&f)
    }

    /// `Δ_A` for the subset with bit mask `mask`.
    pub fn partial_identity(&self, mask: u32) -> usize {
        let f: Vec<Option<u32>> = (0..self.n as u32)
            .map(|x| (mask >> x & 1 == 1).then_some(x))
            .collect();
        self.index_of(&f)
    }

    pub fn show(&self, i: usize) -> String {
        let cells: Vec<String> = self.elements[i]
            .iter()
            .map(|v| v.map_or("-".to_string(), |x| x.to_string()))
            .collect();
        format!("[{}]", cells.join(" "))
    }

    /// `σ f σ⁻¹` computed with the multiplication table.
    pub fn conjugate(&self, sigma: &[u32], f: usize) -> usize {
        let mut inv = vec![0u32; sigma.len()];
        for (i, j) in sigma.iter().enumerate() {
            inv[*j as usize] = i as u32;
        }
        self.mul(self.mul(self.permutation(sigma), f), self.permutation(&inv))
    }
}

pub fn transformation_monoid(n: usize, partial: bool, cap: u128) -> Result<TransformationMonoid> {
    if n == 0 {
        return Err(Error::Invalid("transformations of the empty set".into()));
    }
    let base = if partial { n + 1 } else { n };
    let size = (base as u128).saturating_pow(n as u32);
    if size > cap {
        return Err(Error::CapExceeded {
            what: format!(
                "{} on {n} points",
                if partial {
                    "partial transformations"
                } else {
                    "transformations"
                }
            ),
            count: size,
            cap,
        });
    }
    let size = size as usize;
    let elements: Vec<Vec<Option<u32>>> = (0..size)
        .map(|mut i| {
            let mut f = vec![None; n];
            for slot in f.iter_mut().rev() {
                let d = i % base;
                i /= base;
                *slot = (d < n).then_some(d as u32);
            }
            f
        })
        .collect();
    let index = |f: &[Option<u32>]| {
        f.iter()
            .fold(0, |acc, v| acc * base + v.map_or(n, |x| x as usize))
    };
    let table = (0..size * size)
        .into_par_iter()
        .map(|k| {
            let (f, g) = (&elements[k / size], &elements[k % size]);
            let fg: Vec<Option<u32>> = g.iter().map(|x| x.and_then(|x| f[x as usize])).collect();
            index(&fg) as u32
        })
        .collect();
    let name = format!("{}{n}", if partial { "PT" } else { "T" });
    let algebra = FiniteAlgebra::new(
        name,
        size,
        vec![FiniteOp {
            name: "mul".into(),
            arity: 2,
            table,
        }],
    )?;
    Ok(TransformationMonoid {
        n,
        partial,
        elements,
        algebra,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AutomorphismWitness {
    /// `φ(i)` for every element `i`.
    pub map: Vec<u32>,
    /// `σ` with `φ(f) = σ f σ⁻¹`, if one exists.
    pub permutation: Option<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaCheck {
    pub holds: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AutomorphismReport {
    pub n: usize,
    pub partial: bool,
    pub generators: Vec<String>,
    pub automorphisms: Vec<AutomorphismWitness>,
    pub all_inner: bool,
    /// Agreement with an exhaustive bijection search, when run.
    pub full_search_agrees: Option<bool>,
    /// For partial monoids: every automorphism sends each `Δ_A` to `Δ_{σ(A)}`.
    pub partial_identities: Option<DeltaCheck>,
}

/// The order type of `x`: index and period of its monogenic subsemigroup.
fn order_type(m: &TransformationMonoid, x: usize) -> (usize, usize) {
    let mut seen = BTreeMap::new();
    let mut p = x;
    for k in 1.. {
        if let Some(first) = seen.insert(p, k) {
            return (first, k - first);
        }
        p = m.mul(p, x);
    }
    unreachable!()
}

/// Transposition, n-cycle and a rank-(n-1) idempotent, plus `Δ_{X∖{0}}` for
/// partial maps, led by the identity.
fn generators(m: &TransformationMonoid) -> Vec<usize> {
    let n = m.n as u32;
    let mut gens = vec![m.identity()];
    if n >= 2 {
        let mut t: Vec<u32> = (0..n).collect();
        t.swap(0, 1);
        gens.push(m.permutation(&t));
        let c: Vec<u32> = (0..n).map(|i| (i + 1) % n).collect();
        gens.push(m.permutation(&c));
        let e: Vec<Option<u32>> = (0..n).map(|i| Some(if i == 1 { 0 } else { i })).collect();
        gens.push(m.index_of(&e));
    }
    if m.partial {
        gens.push(m.partial_identity(((1u32 << n) - 1) & !1));
    }
    gens.dedup();
    gens
}

/// Breadth-first spanning tree: for each element, `(parent, generator)` with
/// `element = parent · gen`, or `None` for the generators themselves.
fn spanning_tree(m: &TransformationMonoid, gens: &[usize]) -> Result<Vec<Option<(usize, usize)>>> {
    let size = m.elements.len();
    let mut tree = vec![None; size];
    let mut reached = vec![false; size];
    let mut queue = VecDeque::new();
    for g in gens {
        if !reached[*g] {
            reached[*g] = true;
            queue.push_back(*g);
        }
    }
    while let Some(x) = queue.pop_front() {
        for (gi, g) in gens.iter().enumerate() {
            let y = m.mul(x, *g);
            if !reached[y] {
                reached[y] = true;
                tree[y] = Some((x, gi));
                queue.push_back(y);
            }
        }
    }
    if reached.iter().any(|r| !r) {
        return Err(Error::Invalid(
            "generator set does not generate the monoid".into(),
        ));
    }
    Ok(tree)
}

/// Extends generator images to a map along the spanning tree, then checks
/// it is a bijective homomorphism.
fn extend(
    m: &TransformationMonoid,
    gens: &[usize],
    images: &[usize],
    order: &[usize],
    tree: &[Option<(usize, usize)>],
) -> Option<Vec<u32>> {
    let size = m.elements.len();
    let mut phi = vec![usize::MAX; size];
    for (g, h) in gens.iter().zip(images) {
        phi[*g] = *h;
    }
    for x in order {
        if let Some((parent, gi)) = tree[*x] {
            phi[*x] = m.mul(phi[parent], images[gi]);
        }
    }
    // φ(x·g) = φ(x)·φ(g) on generators makes φ a homomorphism
    for x in 0..size {
        for (g, h) in gens.iter().zip(images) {
            if phi[m.mul(x, *g)] != m.mul(phi[x], *h) {
                return None;
            }
        }
    }
    let mut seen = vec![false; size];
    for y in &phi {
        if std::mem::replace(&mut seen[*y], true) {
            return None;
        }
    }
    Some(phi.into_iter().map(|y| y as u32).collect())
}

/// All automorphisms of `m`, found by searching images of a generating set.
pub fn automorphisms_by_generators(m: &TransformationMonoid) -> Result<Vec<Vec<u32>>> {
    let gens = generators(m);
    let tree = spanning_tree(m, &gens)?;
    let mut order: Vec<usize> = (0..m.elements.len()).collect();
    let depth = |mut x: usize| {
        let mut d = 0;
        while let Some((p, _)) = tree[x] {
            x = p;
            d += 1;
        }
        d
    };
    order.sort_by_key(|x| depth(*x));

    let id = m.identity();
    let is_unit = |x: usize| (0..m.elements.len()).any(|y| m.mul(x, y) == id && m.mul(y, x) == id);
    let types: Vec<(usize, usize)> = (0..m.elements.len()).map(|x| order_type(m, x)).collect();
    let units: Vec<bool> = (0..m.elements.len()).map(is_unit).collect();
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|g| {
            if *g == id {
                return vec![id];
            }
            (0..m.elements.len())
                .filter(|h| types[*h] == types[*g] && units[*h] == units[*g])
                .collect()
        })
        .collect();

    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for c in &candidates {
        combos = combos
            .into_iter()
            .flat_map(|p| {
                c.iter()
                    .map(|h| {
                        let mut q = p.clone();
                        q.push(*h);
                        q
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let mut found: Vec<Vec<u32>> = combos
        .par_iter()
        .filter_map(|images| extend(m, &gens, images, &order, &tree))
        .collect();
    found.sort();
    found.dedup();
    Ok(found)
}

/// All automorphisms by exhaustive bijection search; feasible only for tiny
/// monoids.
pub fn automorphisms_exhaustive(m: &TransformationMonoid) -> Vec<Vec<u32>> {
    search_maps(&m.algebra, &m.algebra, true)
}

fn witness(m: &TransformationMonoid, phi: &[u32]) -> Option<Vec<u32>> {
    permutations(m.n)
        .into_iter()
        .find(|s| (0..m.elements.len()).all(|f| m.conjugate(s, f) == phi[f] as usize))
}

fn delta_check(m: &TransformationMonoid, autos: &[AutomorphismWitness]) -> DeltaCheck {
    let masks: Vec<u32> = (0..1u32 << m.n).collect();
    let deltas: BTreeMap<usize, u32> = masks.iter().map(|k| (m.partial_identity(*k), *k)).collect();
    for a in autos {
        for k in &masks {
            let image = a.map[m.partial_identity(*k)] as usize;
            let Some(b) = deltas.get(&image) else {
                return DeltaCheck {
                    holds: false,
                    detail: Some(format!(
                        "Δ_{k:b} goes to {}, not a partial identity",
                        m.show(image)
                    )),
                };
            };
            if let Some(s) = &a.permutation {
                let moved = (0..m.n as u32)
                    .filter(|x| k >> x & 1 == 1)
                    .fold(0u32, |acc, x| acc | 1 << s[x as usize]);
                if moved != *b {
                    return DeltaCheck {
                        holds: false,
                        detail: Some(format!("Δ_{k:b} goes to Δ_{b:b}, σ gives Δ_{moved:b}")),
                    };
                }
            }
            for j in &masks {
                let below = k & j == *k;
                let image_j = deltas[&(a.map[m.partial_identity(*j)] as usize)];
                if below != (b & image_j == *b) {
                    return DeltaCheck {
                        holds: false,
                        detail: Some(format!("order between Δ_{k:b} and Δ_{j:b} not preserved")),
                    };
                }
            }
        }
    }
    DeltaCheck {
        holds: true,
        detail: None,
    }
}

/// Enumerates the automorphisms of `T_n` or `𝔉_n` and looks for a base-set
/// permutation `σ` with `φ(f) = σ f σ⁻¹`, checked on the whole table.
/// `exhaustive` also runs the full bijection search for comparison.
pub fn check_automorphisms_inner(
    m: &TransformationMonoid,
    exhaustive: bool,
) -> Result<AutomorphismReport> {
    let autos = automorphisms_by_generators(m)?;
    let witnesses: Vec<AutomorphismWitness> = autos
        .par_iter()
        .map(|phi| AutomorphismWitness {
            permutation: witness(m, phi),
            map: phi.clone(),
        })
        .collect();
    let all_inner = witnesses.iter().all(|w| w.permutation.is_some());
    let full_search_agrees = exhaustive.then(|| automorphisms_exhaustive(m) == autos);
    let partial_identities = m.partial.then(|| delta_check(m, &witnesses));
    Ok(AutomorphismReport {
        n: m.n,
        partial: m.partial,
        generators: generators(m).into_iter().map(|g| m.show(g)).collect(),
        automorphisms: witnesses,
        all_inner,
        full_search_agrees,
        partial_identities,
    })
}
