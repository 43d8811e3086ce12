use serde::Serialize;

use super::table::FiniteGroup;
use crate::error::GroupError;

/// A verified homomorphism between two finite groups.
#[derive(Debug, Clone, Serialize)]
pub struct GroupHom {
    pub source: FiniteGroup,
    pub target: FiniteGroup,
    pub mapping: Vec<usize>,
}

impl GroupHom {
    /// Checks `phi(xy) = phi(x) phi(y)` on every pair.
    pub fn new(source: FiniteGroup, target: FiniteGroup, mapping: Vec<usize>) -> Result<Self, GroupError> {
        if mapping.len() != source.order() || mapping.iter().any(|&y| y >= target.order()) {
            return Err(GroupError::NotAHomomorphism("mapping has the wrong shape".into()));
        }
        if mapping[source.identity()] != target.identity() {
            return Err(GroupError::NotAHomomorphism("identity is not preserved".into()));
        }
        for a in 0..source.order() {
            for b in 0..source.order() {
                if mapping[source.mul(a, b)] != target.mul(mapping[a], mapping[b]) {
                    return Err(GroupError::NotAHomomorphism(format!("fails on ({a}, {b})")));
                }
            }
        }
        Ok(Self { source, target, mapping })
    }

    pub fn identity(g: &FiniteGroup) -> Self {
        Self { source: g.clone(), target: g.clone(), mapping: (0..g.order()).collect() }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.mapping[x]
    }

    pub fn kernel(&self) -> Vec<usize> {
        (0..self.source.order()).filter(|&x| self.mapping[x] == self.target.identity()).collect()
    }

    /// Image, sorted.
    pub fn image(&self) -> Vec<usize> {
        let mut v = self.mapping.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().len() == 1
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.target.order()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &GroupHom) -> Result<GroupHom, GroupError> {
        if next.source != self.target {
            return Err(GroupError::NotAHomomorphism("composition of mismatched maps".into()));
        }
        let mapping = self.mapping.iter().map(|&y| next.mapping[y]).collect();
        Ok(GroupHom { source: self.source.clone(), target: next.target.clone(), mapping })
    }
}

/// An injective homomorphism `H -> G`, i.e. a subgroup with its own table.
#[derive(Debug, Clone, Serialize)]
pub struct SubgroupEmbedding {
    pub hom: GroupHom,
}

impl SubgroupEmbedding {
    pub fn new(hom: GroupHom) -> Result<Self, GroupError> {
        if !hom.is_injective() {
            return Err(GroupError::Precondition("embedding is not injective".into()));
        }
        Ok(Self { hom })
    }

    /// The subgroup on the element set `elems` of `g`, re-indexed by position.
    pub fn from_elements(g: &FiniteGroup, elems: &[usize]) -> Result<Self, GroupError> {
        let mut elems = elems.to_vec();
        elems.sort_unstable();
        elems.dedup();
        if !g.is_subgroup(&elems) {
            return Err(GroupError::NotASubgroup);
        }
        let pos = |x: usize| elems.binary_search(&x).expect("closed under products");
        let sub = FiniteGroup::from_mul(&format!("<{} in {}>", elems.len(), g.name()), elems.len(), |a, b| {
            pos(g.mul(elems[a], elems[b]))
        })?;
        Ok(Self { hom: GroupHom { source: sub, target: g.clone(), mapping: elems } })
    }

    pub fn ambient(&self) -> &FiniteGroup {
        &self.hom.target
    }

    pub fn subgroup(&self) -> &FiniteGroup {
        &self.hom.source
    }

    /// Elements of the image in the ambient group, sorted.
    pub fn elements(&self) -> Vec<usize> {
        self.hom.image()
    }

    pub fn is_proper(&self) -> bool {
        self.hom.source.order() < self.hom.target.order()
    }

    pub fn is_normal(&self) -> bool {
        let g = self.ambient();
        let h = self.elements();
        (0..g.order()).all(|x| h.iter().all(|&y| h.binary_search(&g.conjugate(x, y)).is_ok()))
    }
}

/// Extends `gens -> images` to a homomorphism on the span of `gens`; `None` when the
/// assignment is inconsistent or `gens` does not generate.
pub fn extend_hom(a: &FiniteGroup, gens: &[usize], images: &[usize], b: &FiniteGroup) -> Option<Vec<usize>> {
    let mut map = vec![usize::MAX; a.order()];
    map[a.identity()] = b.identity();
    let mut queue = vec![a.identity()];
    let mut i = 0;
    while i < queue.len() {
        let x = queue[i];
        for (&g, &h) in gens.iter().zip(images) {
            let y = a.mul(x, g);
            let img = b.mul(map[x], h);
            if map[y] == usize::MAX {
                map[y] = img;
                queue.push(y);
            } else if map[y] != img {
                return None;
            }
        }
        i += 1;
    }
    (queue.len() == a.order()).then_some(map)
}

fn assignments(a: &FiniteGroup, b: &FiniteGroup, gens: &[usize], bijective: bool, visit: &mut dyn FnMut(Vec<usize>) -> bool) {
    let orders: Vec<usize> = gens.iter().map(|&g| a.element_order(g)).collect();
    let b_orders: Vec<usize> = (0..b.order()).map(|x| b.element_order(x)).collect();
    let mut images = vec![0usize; gens.len()];
    fn rec(
        k: usize,
        images: &mut Vec<usize>,
        ctx: (&FiniteGroup, &FiniteGroup, &[usize], &[usize], &[usize], bool),
        visit: &mut dyn FnMut(Vec<usize>) -> bool,
    ) -> bool {
        let (a, b, gens, orders, b_orders, bijective) = ctx;
        if k == gens.len() {
            if let Some(map) = extend_hom(a, gens, images, b) {
                let ok = !bijective || {
                    let mut seen = vec![false; b.order()];
                    map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
                };
                if ok {
                    return visit(map);
                }
            }
            return false;
        }
        for y in 0..b.order() {
            let fits = if bijective { b_orders[y] == orders[k] } else { orders[k] % b_orders[y] == 0 };
            if fits {
                images[k] = y;
                if rec(k + 1, images, ctx, visit) {
                    return true;
                }
            }
        }
        false
    }
    rec(0, &mut images, (a, b, gens, &orders, &b_orders, bijective), visit);
}

/// An isomorphism `a -> b`, if one exists.
pub fn find_isomorphism(a: &FiniteGroup, b: &FiniteGroup) -> Option<Vec<usize>> {
    if a.order() != b.order() || a.order_profile() != b.order_profile() || a.is_abelian() != b.is_abelian() {
        return None;
    }
    if a.center().len() != b.center().len() || a.conjugacy_classes().0.len() != b.conjugacy_classes().0.len() {
        return None;
    }
    let gens = a.generators();
    let mut found = None;
    assignments(a, b, &gens, true, &mut |map| {
        found = Some(map);
        true
    });
    found
}

pub fn is_isomorphic(a: &FiniteGroup, b: &FiniteGroup) -> bool {
    find_isomorphism(a, b).is_some()
}

/// Every automorphism of `g` as an element permutation.
pub fn automorphisms(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let gens = g.generators();
    let mut out = Vec::new();
    assignments(g, g, &gens, true, &mut |map| {
        out.push(map);
        false
    });
    out
}
