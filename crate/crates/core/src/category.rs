//! The category of finitely generated free algebras of a variety, at
//! bounded scale.
//!
//! A free object is determined by its variety and rank; generators are
//! `x1..x_rank`. A morphism is the tuple of normal forms assigned to the
//! generators of its domain. The rank-1 object `A₀` with basepoint `x1`
//! represents the forgetful functor: elements `a` of `A` correspond to the
//! morphisms `alpha(a, A): A₀ → A`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::{random_term_of_size, Term};
use crate::variety::{enumerate_normal_forms, NormalForm, Variety};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FreeObject {
    pub variety: Variety,
    pub rank: u32,
}

impl FreeObject {
    pub fn new(variety: Variety, rank: u32) -> Result<FreeObject> {
        if rank == 0 {
            return Err(Error::Invalid("free objects have rank >= 1".into()));
        }
        Ok(FreeObject { variety, rank })
    }

    /// The monogenic free object representing the forgetful functor.
    pub fn point(variety: Variety) -> FreeObject {
        FreeObject { variety, rank: 1 }
    }

    pub fn generator(&self, i: u32) -> NormalForm {
        assert!(
            (1..=self.rank).contains(&i),
            "generator x{i} outside rank {}",
            self.rank
        );
        self.variety.generator(i)
    }

    pub fn generators(&self) -> Vec<NormalForm> {
        (1..=self.rank).map(|i| self.variety.generator(i)).collect()
    }

    pub fn contains(&self, a: &NormalForm) -> bool {
        a.variety() == self.variety && a.max_generator() <= self.rank
    }

    fn check_element(&self, a: &NormalForm) -> Result<()> {
        if a.variety() != self.variety {
            return Err(Error::Mismatch(format!(
                "{} element used in {self}",
                a.variety()
            )));
        }
        if a.max_generator() > self.rank {
            return Err(Error::Malformed(format!(
                "`{a}` uses generators beyond rank {}",
                self.rank
            )));
        }
        Ok(())
    }

    pub fn elements(&self, max_size: usize, cap: u128) -> Result<Vec<NormalForm>> {
        enumerate_normal_forms(self.variety, self.rank, max_size, cap)
    }
}

impl fmt::Display for FreeObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}({})", self.variety.name(), self.rank)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Morphism {
    domain: FreeObject,
    codomain: FreeObject,
    images: Vec<NormalForm>,
}

impl Morphism {
    pub fn from_normal_forms(
        dom: FreeObject,
        cod: FreeObject,
        images: Vec<NormalForm>,
    ) -> Result<Morphism> {
        if dom.variety != cod.variety {
            return Err(Error::Mismatch(format!("{dom} -> {cod} crosses varieties")));
        }
        if images.len() != dom.rank as usize {
            return Err(Error::Mismatch(format!(
                "{} image(s) for {} generator(s)",
                images.len(),
                dom.rank
            )));
        }
        for a in &images {
            cod.check_element(a)?;
        }
        Ok(Morphism {
            domain: dom,
            codomain: cod,
            images,
        })
    }

    pub fn identity(obj: FreeObject) -> Morphism {
        Morphism {
            domain: obj,
            codomain: obj,
            images: obj.generators(),
        }
    }

    pub fn domain(&self) -> FreeObject {
        self.domain
    }

    pub fn codomain(&self) -> FreeObject {
        self.codomain
    }

    pub fn images(&self) -> &[NormalForm] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain && self.images == self.domain.generators()
    }

    /// Largest normal-form size among the images.
    pub fn size(&self) -> usize {
        self.images.iter().map(NormalForm::size).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> MorphismJson {
        MorphismJson {
            domain_rank: self.domain.rank,
            codomain_rank: self.codomain.rank,
            images: self.images.iter().map(NormalForm::serialize).collect(),
        }
    }

    pub fn from_json(v: Variety, j: &MorphismJson) -> Result<Morphism> {
        let images = j
            .images
            .iter()
            .map(|s| NormalForm::parse(v, s))
            .collect::<Result<Vec<_>>>()?;
        Morphism::from_normal_forms(
            FreeObject::new(v, j.domain_rank)?,
            FreeObject::new(v, j.codomain_rank)?,
            images,
        )
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} [", self.domain, self.codomain)?;
        for (i, a) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "x{} ↦ {}", i + 1, a)?;
        }
        write!(f, "]")
    }
}

/// Wire format of a morphism; the variety comes from the enclosing document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismJson {
    pub domain_rank: u32,
    pub codomain_rank: u32,
    pub images: Vec<String>,
}

/// The morphism sending generator `i` of `dom` to the normal form of `images[i]`.
pub fn make_morphism(dom: FreeObject, cod: FreeObject, images: &[Term]) -> Result<Morphism> {
    if images.len() != dom.rank as usize {
        return Err(Error::Mismatch(format!(
            "{} image(s) for {} generator(s)",
            images.len(),
            dom.rank
        )));
    }
    let nfs = images
        .iter()
        .map(|t| {
            t.check(cod.variety.signature())?;
            if t.max_var() > cod.rank {
                return Err(Error::Malformed(format!(
                    "`{t}` uses variables beyond rank {}",
                    cod.rank
                )));
            }
            cod.variety.evaluate(t, &cod.generators())
        })
        .collect::<Result<Vec<_>>>()?;
    Morphism::from_normal_forms(dom, cod, nfs)
}

/// Underlying-set action of `m` on an element of its domain.
pub fn apply_morphism(m: &Morphism, a: &NormalForm) -> Result<NormalForm> {
    m.domain.check_element(a)?;
    match a {
        // words substitute letter by letter; no need to go through a term
        NormalForm::Semigroup(w) | NormalForm::Monoid(w) if !w.is_empty() => {
            let mut acc = m.images[w[0] as usize - 1].clone();
            for i in &w[1..] {
                acc = m.codomain.variety.mul(&acc, &m.images[*i as usize - 1])?;
            }
            Ok(acc)
        }
        _ => m.codomain.variety.evaluate(&a.to_term(), &m.images),
    }
}

/// `g ∘ f`.
pub fn compose(g: &Morphism, f: &Morphism) -> Result<Morphism> {
    if f.codomain != g.domain {
        return Err(Error::Mismatch(format!(
            "cannot compose {} -> {} after {} -> {}",
            g.domain, g.codomain, f.domain, f.codomain
        )));
    }
    let images = f
        .images
        .iter()
        .map(|a| apply_morphism(g, a))
        .collect::<Result<Vec<_>>>()?;
    Ok(Morphism {
        domain: f.domain,
        codomain: g.codomain,
        images,
    })
}

/// The unique morphism `A₀ → A` sending the basepoint to `a`.
pub fn alpha(a: &NormalForm, obj: FreeObject) -> Result<Morphism> {
    obj.check_element(a)?;
    Ok(Morphism {
        domain: FreeObject::point(obj.variety),
        codomain: obj,
        images: vec![a.clone()],
    })
}

/// The endomorphism of `obj` with `x_i ↦ f[i-1]`.
pub fn theta(obj: FreeObject, f: Vec<NormalForm>) -> Result<Morphism> {
    Morphism::from_normal_forms(obj, obj, f)
}

/// All morphisms `a → b` whose images have size at most `max_size`.
pub fn hom_set(a: FreeObject, b: FreeObject, max_size: usize, cap: u128) -> Result<Vec<Morphism>> {
    if a.variety != b.variety {
        return Err(Error::Mismatch(format!("{a} -> {b} crosses varieties")));
    }
    let elems = b.elements(max_size, cap)?;
    let total = (elems.len() as u128).saturating_pow(a.rank);
    if total > cap {
        return Err(Error::CapExceeded {
            what: format!("Hom({a}, {b}) at image size <= {max_size}"),
            count: total,
            cap,
        });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut idx = vec![0usize; a.rank as usize];
    if elems.is_empty() {
        return Ok(out);
    }
    loop {
        out.push(Morphism {
            domain: a,
            codomain: b,
            images: idx.iter().map(|i| elems[*i].clone()).collect(),
        });
        // odometer, last generator fastest
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < elems.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Random element of `obj` read off a random term with at most `term_size` nodes.
pub fn random_element<R: Rng + ?Sized>(
    obj: FreeObject,
    term_size: usize,
    rng: &mut R,
) -> NormalForm {
    let vars: Vec<u32> = (1..=obj.rank).collect();
    let budget = rng.gen_range(1..=term_size.max(1));
    let t = random_term_of_size(obj.variety.signature(), &vars, budget, rng);
    obj.variety
        .evaluate(&t, &obj.generators())
        .expect("random terms are well typed")
}

pub fn random_morphism<R: Rng + ?Sized>(
    dom: FreeObject,
    cod: FreeObject,
    term_size: usize,
    rng: &mut R,
) -> Morphism {
    let images = (0..dom.rank)
        .map(|_| random_element(cod, term_size, rng))
        .collect();
    Morphism {
        domain: dom,
        codomain: cod,
        images,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize;

    fn obj(v: Variety, r: u32) -> FreeObject {
        FreeObject::new(v, r).unwrap()
    }

    fn term(v: Variety, s: &str) -> Term {
        v.parse_term(s).unwrap()
    }

    fn word(w: &[u32]) -> NormalForm {
        NormalForm::Semigroup(w.to_vec())
    }

    #[test]
    fn make_morphism_examples() {
        let v = Variety::Semigroup;
        let m = make_morphism(obj(v, 1), obj(v, 2), &[term(v, "(mul x1 x2)")]).unwrap();
        assert_eq!(m, alpha(&word(&[1, 2]), obj(v, 2)).unwrap());
        let id = make_morphism(obj(v, 2), obj(v, 2), &[term(v, "x1"), term(v, "x2")]).unwrap();
        assert!(id.is_identity());
        let th = make_morphism(
            obj(v, 2),
            obj(v, 2),
            &[term(v, "(mul x1 x2)"), term(v, "x2")],
        )
        .unwrap();
        assert_eq!(th.images(), &[word(&[1, 2]), word(&[2])]);
        // two descriptions of one map coincide
        let a = make_morphism(obj(v, 1), obj(v, 2), &[term(v, "(mul (mul x1 x2) x1)")]).unwrap();
        let b = make_morphism(obj(v, 1), obj(v, 2), &[term(v, "(mul x1 (mul x2 x1))")]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn make_morphism_errors() {
        let v = Variety::Semigroup;
        assert!(make_morphism(obj(v, 2), obj(v, 2), &[term(v, "x1")]).is_err());
        assert!(make_morphism(obj(v, 1), obj(v, 1), &[term(v, "x2")]).is_err());
        assert!(FreeObject::new(v, 0).is_err());
    }

    #[test]
    fn apply_examples() {
        let v = Variety::Semigroup;
        let m = alpha(&word(&[1, 2]), obj(v, 2)).unwrap();
        assert_eq!(
            apply_morphism(&m, &word(&[1, 1])).unwrap(),
            word(&[1, 2, 1, 2])
        );
        assert!(apply_morphism(&m, &word(&[2])).is_err());

        let w = Variety::InverseSemigroup;
        let a1 = obj(w, 1);
        let inv = make_morphism(a1, a1, &[term(w, "(inv x1)")]).unwrap();
        let e = normalize(&term(w, "(mul x1 (inv x1))"), w).unwrap();
        let f = normalize(&term(w, "(mul (inv x1) x1)"), w).unwrap();
        assert_eq!(apply_morphism(&inv, &e).unwrap(), f);
    }

    #[test]
    fn compose_examples() {
        let v = Variety::Semigroup;
        let a2 = obj(v, 2);
        let nu = alpha(&word(&[1, 2]), a2).unwrap();
        let x = FreeObject::point(v).generator(1);
        let a0 = FreeObject::point(v);
        let lhs = compose(&nu, &alpha(&x, a0).unwrap()).unwrap();
        assert_eq!(lhs, alpha(&apply_morphism(&nu, &x).unwrap(), a2).unwrap());

        let id = Morphism::identity(a2);
        assert_eq!(compose(&id, &nu).unwrap(), nu);

        let swap = theta(a2, vec![word(&[2]), word(&[1])]).unwrap();
        assert!(compose(&swap, &swap).unwrap().is_identity());
        assert!(compose(&nu, &nu).is_err());
    }

    #[test]
    fn alpha_and_theta() {
        let v = Variety::Semigroup;
        let a0 = FreeObject::point(v);
        assert!(alpha(&a0.generator(1), a0).unwrap().is_identity());
        assert_eq!(
            alpha(&word(&[1, 2]), obj(v, 2)).unwrap().images(),
            &[word(&[1, 2])]
        );
        assert!(theta(obj(v, 2), vec![word(&[1]), word(&[2])])
            .unwrap()
            .is_identity());
        assert!(theta(obj(v, 2), vec![word(&[1])]).is_err());
    }

    #[test]
    fn hom_set_counts() {
        let v = Variety::Semigroup;
        let a0 = FreeObject::point(v);
        let homs = hom_set(a0, obj(v, 2), 2, 1000).unwrap();
        let shown: Vec<String> = homs.iter().map(|m| m.images()[0].serialize()).collect();
        assert_eq!(shown, vec!["1", "2", "1,1", "1,2", "2,1", "2,2"]);
        assert_eq!(hom_set(a0, a0, 3, 1000).unwrap().len(), 3);
        assert_eq!(hom_set(obj(v, 2), obj(v, 2), 2, 1000).unwrap().len(), 36);
        assert!(hom_set(obj(v, 3), obj(v, 3), 4, 1000).unwrap_err().is_cap());
    }

    #[test]
    fn theta_alpha_coherence() {
        let v = Variety::InverseSemigroup;
        let a = obj(v, 2);
        let f = vec![
            normalize(&term(v, "(mul x1 (inv x2))"), v).unwrap(),
            normalize(&term(v, "(inv x1)"), v).unwrap(),
        ];
        let th = theta(a, f.clone()).unwrap();
        for i in 1..=2 {
            let lhs = compose(&th, &alpha(&a.generator(i), a).unwrap()).unwrap();
            assert_eq!(lhs, alpha(&f[i as usize - 1], a).unwrap());
        }
    }

    #[test]
    fn json_round_trip() {
        let v = Variety::InverseSemigroup;
        let m = make_morphism(obj(v, 1), obj(v, 2), &[term(v, "(mul x1 (inv x2))")]).unwrap();
        let j = m.to_json();
        assert_eq!(Morphism::from_json(v, &j).unwrap(), m);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.starts_with("{\"domain_rank\":1,\"codomain_rank\":2,\"images\":["));
    }
}
