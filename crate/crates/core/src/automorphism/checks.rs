use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::family::{BijectionFamily, BijectionTable, CentralFamily};
use super::report::{CheckReport, Status};
use super::spec::{compose_specs, AutomorphismSpec};
use crate::category::{alpha, apply_morphism, compose, hom_set, theta, FreeObject, Morphism};
use crate::derived::{build_derived_algebra, derived_apply, TermAssignment};
use crate::error::{Error, Result};
use crate::variety::{NormalForm, Variety};

fn a0_of(v: Variety) -> FreeObject {
    FreeObject::point(v)
}

fn require_fixed_point(phi: &AutomorphismSpec) -> Result<()> {
    let a0 = a0_of(phi.variety());
    if phi.object(a0) != a0 {
        return Err(Error::Invalid(format!(
            "the spec moves {a0} to {}",
            phi.object(a0)
        )));
    }
    Ok(())
}

/// `s_A(a) = Q(Φ(α_a))(x₀)` for a single element.
pub fn s_value(phi: &AutomorphismSpec, obj: FreeObject, a: &NormalForm) -> Result<NormalForm> {
    require_fixed_point(phi)?;
    let image = phi.apply(&alpha(a, obj)?)?;
    Ok(image.images()[0].clone())
}

/// The table of `s_A` on every normal form of size at most `bound`.
pub fn extract_s(
    phi: &AutomorphismSpec,
    obj: FreeObject,
    bound: usize,
    cap: u128,
) -> Result<BijectionTable> {
    require_fixed_point(phi)?;
    let map = obj
        .elements(bound, cap)?
        .into_par_iter()
        .map(|a| s_value(phi, obj, &a).map(|b| (a, b)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    BijectionTable::new(phi.object(obj).rank, map)
}

/// `extract_s` on several objects at once.
pub fn extract_family(
    phi: &AutomorphismSpec,
    ranks: &[u32],
    bound: usize,
    cap: u128,
) -> Result<BijectionFamily> {
    let mut tables = BTreeMap::new();
    for r in ranks {
        let obj = FreeObject::new(phi.variety(), *r)?;
        tables.insert(*r, extract_s(phi, obj, bound, cap)?);
    }
    Ok(BijectionFamily::Tables(tables))
}

/// Merges per-item outcomes: the first failure wins, then the first gap.
pub(crate) fn combine(outcomes: Vec<Result<Option<String>>>) -> Result<Option<String>> {
    let mut gap = None;
    for o in outcomes {
        match o {
            Ok(None) => {}
            Ok(Some(cex)) => return Ok(Some(cex)),
            Err(e @ Error::CoverageGap(_)) => {
                gap.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    match gap {
        Some(e) => Err(e),
        None => Ok(None),
    }
}

/// Caches the probe elements of each object.
struct Probe {
    max_size: usize,
    cap: u128,
    cache: std::sync::Mutex<HashMap<FreeObject, std::sync::Arc<Vec<NormalForm>>>>,
}

impl Probe {
    fn new(max_size: usize, cap: u128) -> Probe {
        Probe {
            max_size,
            cap,
            cache: Default::default(),
        }
    }

    fn elements(&self, obj: FreeObject) -> Result<std::sync::Arc<Vec<NormalForm>>> {
        if let Some(e) = self.cache.lock().unwrap().get(&obj) {
            return Ok(e.clone());
        }
        let e = std::sync::Arc::new(obj.elements(self.max_size, self.cap)?);
        self.cache.lock().unwrap().insert(obj, e.clone());
        Ok(e)
    }
}

fn conjugation_at(
    phi: &AutomorphismSpec,
    s: &BijectionFamily,
    nu: &Morphism,
    probe: &Probe,
) -> Result<Option<String>> {
    let image = phi.apply(nu)?;
    let (sa, sb) = (s.target(nu.domain())?, s.target(nu.codomain())?);
    if image.domain() != sa || image.codomain() != sb {
        return Ok(Some(format!(
            "Φ(ν) runs {} -> {}, the family runs {sa} -> {sb}",
            image.domain(),
            image.codomain()
        )));
    }
    for a in probe.elements(nu.domain())?.iter() {
        let lhs = apply_morphism(&image, &s.apply(nu.domain(), a)?)?;
        let rhs = s.apply(nu.codomain(), &apply_morphism(nu, a)?)?;
        if lhs != rhs {
            return Ok(Some(format!(
                "a = {a}: Q(Φ(ν))(s(a)) = {lhs} but s(Q(ν)(a)) = {rhs}"
            )));
        }
    }
    Ok(None)
}

/// `Q(Φ(ν)) ∘ s_A = s_B ∘ Q(ν)` on every element of size at most
/// `probe_size`, one check per sampled morphism.
pub fn verify_conjugation(
    phi: &AutomorphismSpec,
    s: &BijectionFamily,
    sample: &[Morphism],
    probe_size: usize,
    cap: u128,
) -> Result<CheckReport> {
    let probe = Probe::new(probe_size, cap);
    let outcomes: Vec<_> = sample
        .par_iter()
        .map(|nu| conjugation_at(phi, s, nu, &probe))
        .collect();
    let mut report = CheckReport::new();
    for (nu, o) in sample.iter().zip(outcomes) {
        report.record(format!("conjugation at {nu}"), o)?;
    }
    Ok(report)
}

fn central_at(c: &CentralFamily, mu: &Morphism, probe: &Probe) -> Result<Option<String>> {
    for o in [mu.domain(), mu.codomain()] {
        if c.target(o)? != o {
            return Ok(Some(format!("c moves {o} to {}", c.target(o)?)));
        }
    }
    for a in probe.elements(mu.domain())?.iter() {
        let lhs = c.apply(mu.codomain(), &apply_morphism(mu, a)?)?;
        let rhs = apply_morphism(mu, &c.apply(mu.domain(), a)?)?;
        if lhs != rhs {
            return Ok(Some(format!(
                "μ = {mu}, a = {a}: c(μ(a)) = {lhs} but μ(c(a)) = {rhs}"
            )));
        }
    }
    Ok(None)
}

/// `c_B ∘ Q(μ) = Q(μ) ∘ c_A` for every sampled `μ`, probed on elements of
/// size at most `probe_size`.
pub fn check_central(
    c: &CentralFamily,
    sample: &[Morphism],
    probe_size: usize,
    cap: u128,
) -> Result<CheckReport> {
    let probe = Probe::new(probe_size, cap);
    let outcomes: Vec<_> = sample
        .par_iter()
        .map(|mu| central_at(c, mu, &probe))
        .collect();
    let mut report = CheckReport::new();
    report.record(
        format!("central on {} sampled morphisms", sample.len()),
        combine(outcomes),
    )?;
    Ok(report)
}

/// `Φ(id) = id` on every object met, and `Φ(g∘f) = Φ(g)∘Φ(f)` on each pair.
pub fn check_functor(
    phi: &AutomorphismSpec,
    pairs: &[(Morphism, Morphism)],
) -> Result<CheckReport> {
    let mut objects: Vec<FreeObject> = pairs
        .iter()
        .flat_map(|(g, f)| [f.domain(), f.codomain(), g.codomain()])
        .collect();
    objects.sort();
    objects.dedup();
    let ids = objects
        .iter()
        .map(|o| {
            let image = phi.apply(&Morphism::identity(*o))?;
            Ok((image != Morphism::identity(phi.object(*o)))
                .then(|| format!("Φ(id on {o}) = {image}")))
        })
        .collect();
    let comps =
        pairs
            .par_iter()
            .map(|(g, f)| {
                let lhs = phi.apply(&compose(g, f)?)?;
                let rhs = compose(&phi.apply(g)?, &phi.apply(f)?)?;
                Ok((lhs != rhs)
                    .then(|| format!("g = {g}, f = {f}: Φ(g∘f) = {lhs}, Φ(g)∘Φ(f) = {rhs}")))
            })
            .collect();
    let mut report = CheckReport::new();
    report.record(
        format!("identities preserved on {} objects", objects.len()),
        combine(ids),
    )?;
    report.record(
        format!("composition preserved on {} pairs", pairs.len()),
        combine(comps),
    )?;
    Ok(report)
}

/// `Φ(θ_f) = θ_{s∘f}` for each listed generator assignment `f` on `obj`.
pub fn check_thetas(
    phi: &AutomorphismSpec,
    obj: FreeObject,
    fs: &[Vec<NormalForm>],
) -> Result<CheckReport> {
    let outcomes = fs
        .par_iter()
        .map(|f| {
            let th = theta(obj, f.clone())?;
            let lhs = phi.apply(&th)?;
            let sf = f
                .iter()
                .map(|a| s_value(phi, obj, a))
                .collect::<Result<Vec<_>>>()?;
            let rhs = theta(phi.object(obj), sf)?;
            Ok((lhs != rhs).then(|| format!("f = {th}: Φ(θ_f) = {lhs}, θ_(s∘f) = {rhs}")))
        })
        .collect();
    let mut report = CheckReport::new();
    report.record(
        format!("Φ(θ_f) = θ_(s∘f) on {} endomorphisms", fs.len()),
        combine(outcomes),
    )?;
    Ok(report)
}

/// The endomorphisms `σ = θ_{s∘m}` and `τ = θ_{s⁻¹∘m}` are mutually
/// inverse up to `Φ`: `σ ∘ Φ(τ) = Φ(τ) ∘ σ = 1`.
pub fn check_generators(phi: &AutomorphismSpec, obj: FreeObject) -> Result<CheckReport> {
    let mut report = CheckReport::new();
    if phi.object(obj) != obj {
        report.push(
            format!("generator automorphisms of {obj}"),
            Status::Skipped,
            Some("Φ moves the object".into()),
        );
        return Ok(report);
    }
    let inv = phi.inverse()?;
    let outcome = (|| {
        let gens = obj.generators();
        let s_m = gens
            .iter()
            .map(|x| s_value(phi, obj, x))
            .collect::<Result<Vec<_>>>()?;
        let s_inv_m = gens
            .iter()
            .map(|x| s_value(&inv, obj, x))
            .collect::<Result<Vec<_>>>()?;
        let sigma = theta(obj, s_m)?;
        let tau = theta(obj, s_inv_m)?;
        let phi_tau = phi.apply(&tau)?;
        let left = compose(&sigma, &phi_tau)?;
        let right = compose(&phi_tau, &sigma)?;
        Ok(if !left.is_identity() {
            Some(format!("σ∘Φ(τ) = {left}"))
        } else if !right.is_identity() {
            Some(format!("Φ(τ)∘σ = {right}"))
        } else {
            None
        })
    })();
    report.record(
        format!("generator automorphisms of {obj} are inverse"),
        outcome,
    )?;
    Ok(report)
}

/// Potential-inner iff `Φ(A₀)` is isomorphic to `A₀`, i.e. has rank 1.
pub fn is_potential_inner(phi: &AutomorphismSpec) -> bool {
    let a0 = a0_of(phi.variety());
    phi.object(a0).rank == 1
}

/// `ω^Φ(x1..xk) = s_A(ω(x1..xk))` for every basic operation.
pub fn phi_assignment(phi: &AutomorphismSpec, obj: FreeObject) -> Result<TermAssignment> {
    let v = phi.variety();
    let mut entries = Vec::new();
    for (op, k) in v.signature().ops() {
        if *k as u32 > obj.rank {
            return Err(Error::Invalid(format!(
                "{obj} has fewer generators than `{op}` has arguments"
            )));
        }
        let u = v.apply(op, &obj.generators()[..*k])?;
        let w = s_value(phi, obj, &u)?;
        entries.push((op.to_string(), *k, w.to_term()));
    }
    TermAssignment::new(entries)
}

pub struct DerivedStar {
    pub assignment: Option<TermAssignment>,
    pub report: CheckReport,
}

/// Compares `ω*(a..) = s(ω(s⁻¹a..))` with the derived operation `ω^Φ` on
/// all argument tuples of size at most `bound`.
pub fn derived_equals_star(
    phi: &AutomorphismSpec,
    obj: FreeObject,
    bound: usize,
    cap: u128,
) -> Result<DerivedStar> {
    let v = phi.variety();
    let mut report = CheckReport::new();
    let a0 = a0_of(v);
    let fixed = phi.object(a0) == a0 && phi.object(obj) == obj;
    report.record(
        "Φ fixes A₀ and A",
        Ok((!fixed).then(|| format!("Φ(A₀) = {}, Φ(A) = {}", phi.object(a0), phi.object(obj)))),
    )?;
    if !fixed {
        return Ok(DerivedStar {
            assignment: None,
            report,
        });
    }
    let gens = obj.generators();
    let moved = (|| {
        for x in &gens {
            let sx = s_value(phi, obj, x)?;
            if &sx != x {
                return Ok(Some(format!("s({x}) = {sx}")));
            }
        }
        Ok(None)
    })();
    if report.record("Φ(α_x) = α_x for every generator", moved)? != Status::Pass {
        return Ok(DerivedStar {
            assignment: None,
            report,
        });
    }
    let assignment = match phi_assignment(phi, obj) {
        Ok(a) => a,
        Err(e @ Error::CoverageGap(_)) => {
            report.record("ω^Φ built from s", Err(e))?;
            return Ok(DerivedStar {
                assignment: None,
                report,
            });
        }
        Err(e) => {
            report.fail("ω^Φ built from s", e.to_string());
            return Ok(DerivedStar {
                assignment: None,
                report,
            });
        }
    };
    let derived = build_derived_algebra(v, assignment.clone())?;

    let table = extract_s(phi, obj, bound, cap)?;
    let inverse: BTreeMap<_, _> = table
        .map
        .iter()
        .map(|(a, b)| (b.clone(), a.clone()))
        .collect();
    let elements = obj.elements(bound, cap)?;
    for (op, k) in v.signature().ops() {
        let count = (elements.len() as u128).saturating_pow(*k as u32);
        if count > cap {
            return Err(Error::CapExceeded {
                what: format!("argument tuples for `{op}`"),
                count,
                cap,
            });
        }
        let tuples = tuples(&elements, *k);
        let outcomes = tuples
            .par_iter()
            .map(|args| {
                let pre = args
                    .iter()
                    .map(|a| {
                        inverse.get(a).cloned().ok_or_else(|| {
                            Error::CoverageGap(format!("no s-preimage of {a} at size <= {bound}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let star = s_value(phi, obj, &v.apply(op, &pre)?)?;
                let derived = derived_apply(&derived, op, args)?;
                Ok((star != derived).then(|| {
                    let shown: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                    format!("{op}({}): ω* = {star}, ω^Φ = {derived}", shown.join("; "))
                }))
            })
            .collect();
        report.record(
            format!(
                "{op}* = {op}^Φ = {} on {} tuples",
                assignment.get(op).unwrap(),
                tuples.len()
            ),
            combine(outcomes),
        )?;
    }
    Ok(DerivedStar {
        assignment: Some(assignment),
        report,
    })
}

fn tuples(elements: &[NormalForm], k: usize) -> Vec<Vec<NormalForm>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                elements.iter().map(move |e| {
                    let mut t = t.clone();
                    t.push(e.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// The setting of the reduction theorem: `F₀` of rank 1, a generating
/// object `F⁰`, and `ν₀: F⁰ → F₀` collapsing every generator to `x₀`.
#[derive(Clone, Debug)]
pub struct ReductionScenario {
    pub f0: FreeObject,
    pub fsup0: FreeObject,
    pub nu0: Morphism,
    pub max_size: usize,
    pub cap: u128,
}

impl ReductionScenario {
    pub fn new(v: Variety, rank: u32, max_size: usize, cap: u128) -> Result<ReductionScenario> {
        let f0 = a0_of(v);
        let fsup0 = FreeObject::new(v, rank)?;
        let nu0 = Morphism::from_normal_forms(fsup0, f0, vec![f0.generator(1); rank as usize])?;
        Ok(ReductionScenario {
            f0,
            fsup0,
            nu0,
            max_size,
            cap,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ReductionVerdict {
    /// Objects fixed, `END(F⁰)` fixed, `ν₀` fixed.
    pub conditions: [Status; 3],
    /// `Φ(μ) = μ` for every `μ: F₀ → F⁰`; skipped unless all conditions pass.
    pub conclusion: Status,
    pub report: CheckReport,
}

pub fn reduction_check(phi: &AutomorphismSpec, sc: &ReductionScenario) -> Result<ReductionVerdict> {
    let mut report = CheckReport::new();
    let objects_fixed =
        phi.fixes_objects() && phi.object(sc.f0) == sc.f0 && phi.object(sc.fsup0) == sc.fsup0;
    let c1 = report.record(
        "condition 1: objects fixed",
        Ok((!objects_fixed).then(|| format!("object action {:?}", phi.object_action()))),
    )?;

    let ends = hom_set(sc.fsup0, sc.fsup0, sc.max_size, sc.cap)?;
    let outcomes = ends
        .par_iter()
        .map(|th| {
            let image = phi.apply(th)?;
            Ok((&image != th).then(|| format!("Φ({th}) = {image}")))
        })
        .collect();
    let c2 = report.record(
        format!("condition 2: END(F⁰) fixed ({} endomorphisms)", ends.len()),
        combine(outcomes),
    )?;

    let c3 = report.record(
        "condition 3: ν₀ fixed",
        phi.apply(&sc.nu0)
            .map(|image| (image != sc.nu0).then(|| format!("Φ(ν₀) = {image}"))),
    )?;

    let conclusion = if [c1, c2, c3].iter().all(|c| *c == Status::Pass) {
        let mus = hom_set(sc.f0, sc.fsup0, sc.max_size, sc.cap)?;
        let outcomes = mus
            .par_iter()
            .map(|mu| {
                let image = phi.apply(mu)?;
                let via = compose(&image, &sc.nu0)?;
                let direct = compose(mu, &sc.nu0)?;
                Ok(if via != direct {
                    Some(format!("Φ(μ)∘ν₀ = {via} but μ∘ν₀ = {direct}"))
                } else if &image != mu {
                    Some(format!("Φ({mu}) = {image}"))
                } else {
                    None
                })
            })
            .collect();
        report.record(
            format!("conclusion: Φ(μ) = μ for {} μ: F₀ -> F⁰", mus.len()),
            combine(outcomes),
        )?
    } else {
        report.push(
            "conclusion: Φ(μ) = μ",
            Status::Skipped,
            Some("a condition does not hold".into()),
        );
        Status::Skipped
    };
    Ok(ReductionVerdict {
        conditions: [c1, c2, c3],
        conclusion,
        report,
    })
}

fn table_mismatch(
    lhs: &BijectionTable,
    rhs: impl Fn(&NormalForm) -> Result<Option<NormalForm>>,
) -> Result<(usize, Option<String>)> {
    let mut shared = 0;
    for (a, b) in &lhs.map {
        if let Some(c) = rhs(a)? {
            shared += 1;
            if &c != b {
                return Ok((shared, Some(format!("at {a}: {b} vs {c}"))));
            }
        }
    }
    Ok((shared, None))
}

/// The three algebraic laws of the family `s`: `s^Id = 1`,
/// `s^{Φ⁻¹} = (s^Φ)⁻¹` and `s^{Ψ∘Φ} = s^Ψ ∘ s^Φ`, exact on all table
/// entries of size at most `bound` for every listed spec and every ordered
/// pair of them.
pub fn s_family_laws(
    specs: &[(&str, AutomorphismSpec)],
    ranks: &[u32],
    bound: usize,
    cap: u128,
) -> Result<CheckReport> {
    let mut report = CheckReport::new();
    let Some((_, first)) = specs.first() else {
        return Ok(report);
    };
    let v = first.variety();
    let id = AutomorphismSpec::identity(v);
    for r in ranks {
        let obj = FreeObject::new(v, *r)?;
        let t = extract_s(&id, obj, bound, cap)?;
        let bad = t.map.iter().find(|(a, b)| a != b);
        report.record(
            format!("s^Id = 1 on {obj} ({} entries)", t.map.len()),
            Ok(bad.map(|(a, b)| format!("s^Id({a}) = {b}"))),
        )?;
    }
    for (name, phi) in specs {
        for r in ranks {
            let obj = FreeObject::new(v, *r)?;
            let outcome = (|| {
                let s = extract_s(phi, obj, bound, cap)?;
                let inv = extract_s(&phi.inverse()?, phi.object(obj), bound, cap)?;
                let by_b: BTreeMap<_, _> =
                    s.map.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
                let (n, bad) = table_mismatch(&inv, |b| Ok(by_b.get(b).cloned()))?;
                if n == 0 {
                    return Err(Error::CoverageGap("no shared entries".into()));
                }
                Ok(bad)
            })();
            report.record(format!("s^(Φ⁻¹) = (s^Φ)⁻¹ for {name} on {obj}"), outcome)?;
        }
    }
    for (psi_name, psi) in specs {
        for (phi_name, phi) in specs {
            for r in ranks {
                let obj = FreeObject::new(v, *r)?;
                let outcome = (|| {
                    let over = hom_set(a0_of(v), obj, bound, cap)?;
                    let both = compose_specs(psi, phi, &over)?;
                    let s = extract_s(&both, obj, bound, cap)?;
                    let mid = phi.object(obj);
                    let (_, bad) = table_mismatch(&s, |a| {
                        let sa = s_value(phi, obj, a)?;
                        Ok(Some(s_value(psi, mid, &sa)?))
                    })?;
                    Ok(bad)
                })();
                report.record(
                    format!("s^(Ψ∘Φ) = s^Ψ ∘ s^Φ for Ψ = {psi_name}, Φ = {phi_name} on {obj}"),
                    outcome,
                )?;
            }
        }
    }
    Ok(report)
}

/// `ω*(a..) = s(ω(s⁻¹a..))` against the supplied `ω^Φ` on all argument
/// tuples of size at most `probe_size`.
pub fn assignment_matches_s(
    s: &BijectionFamily,
    obj: FreeObject,
    assignment: &TermAssignment,
    probe_size: usize,
    cap: u128,
) -> Result<Option<String>> {
    let v = obj.variety;
    let d = build_derived_algebra(v, assignment.clone())?;
    let s_inv = s.inverse();
    let elements = obj.elements(probe_size, cap)?;
    for (op, k) in v.signature().ops() {
        for args in tuples(&elements, *k) {
            let pre = args
                .iter()
                .map(|b| s_inv.apply(obj, b))
                .collect::<Result<Vec<_>>>()?;
            let star = s.apply(obj, &v.apply(op, &pre)?)?;
            let derived = derived_apply(&d, op, &args)?;
            if star != derived {
                let shown: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                return Ok(Some(format!(
                    "{op}({}): ω* = {star}, ω^Φ = {derived}",
                    shown.join("; ")
                )));
            }
        }
    }
    Ok(None)
}
