use num_rational::Ratio;
use serde::Serialize;

use super::catalog::SplitSequence;
use super::hom::{GroupHom, SubgroupEmbedding};
use super::table::FiniteGroup;
use crate::error::GroupError;

/// `U = union over g of g H g^-1`.
#[derive(Debug, Clone, Serialize)]
pub struct ConjugateUnion {
    pub elements: Vec<usize>,
    pub covers: bool,
}

pub fn conjugate_union(emb: &SubgroupEmbedding) -> ConjugateUnion {
    let g = emb.ambient();
    let h = emb.elements();
    let mut hit = vec![false; g.order()];
    for x in 0..g.order() {
        for &y in &h {
            hit[g.conjugate(x, y)] = true;
        }
    }
    let elements: Vec<usize> = (0..g.order()).filter(|&x| hit[x]).collect();
    ConjugateUnion { covers: elements.len() == g.order(), elements }
}

/// Left multiplication on the left cosets `G / H`.
#[derive(Debug, Clone, Serialize)]
pub struct CosetAction {
    pub cosets: Vec<Vec<usize>>,
    /// `perms[x][c]` is the coset `x c`.
    pub perms: Vec<Vec<usize>>,
    pub kernel: Vec<usize>,
    pub transitive: bool,
}

impl CosetAction {
    pub fn degree(&self) -> usize {
        self.cosets.len()
    }
}

pub fn coset_action(emb: &SubgroupEmbedding) -> Result<CosetAction, GroupError> {
    let g = emb.ambient();
    let h = emb.elements();
    let mut coset_of = vec![usize::MAX; g.order()];
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    for x in 0..g.order() {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let mut c: Vec<usize> = h.iter().map(|&y| g.mul(x, y)).collect();
        c.sort_unstable();
        for &y in &c {
            coset_of[y] = cosets.len();
        }
        cosets.push(c);
    }
    let perms: Vec<Vec<usize>> =
        (0..g.order()).map(|x| cosets.iter().map(|c| coset_of[g.mul(x, c[0])]).collect()).collect();
    // homomorphism into Sym(G/H)
    for a in 0..g.order() {
        for b in 0..g.order() {
            let ab = &perms[g.mul(a, b)];
            if (0..cosets.len()).any(|c| ab[c] != perms[a][perms[b][c]]) {
                return Err(GroupError::NotAHomomorphism(format!("coset action fails on ({a}, {b})")));
            }
        }
    }
    let base = coset_of[g.identity()];
    let mut reached = vec![false; cosets.len()];
    for p in &perms {
        reached[p[base]] = true;
    }
    let kernel = (0..g.order()).filter(|&x| perms[x].iter().enumerate().all(|(c, &d)| c == d)).collect();
    Ok(CosetAction { transitive: reached.iter().all(|&r| r), cosets, perms, kernel })
}

/// Average number of fixed points over the acting permutation group.
#[derive(Debug, Clone, Serialize)]
pub struct BurnsideReport {
    pub image_order: usize,
    pub average_fixed_points: Ratio<i64>,
    /// An element of `G` acting without fixed points.
    pub fixed_point_free: Option<usize>,
}

pub fn burnside_audit(action: &CosetAction) -> Result<BurnsideReport, GroupError> {
    if action.degree() < 2 {
        return Err(GroupError::Precondition("the action needs at least two points".into()));
    }
    if !action.transitive {
        return Err(GroupError::Precondition("the action is not transitive".into()));
    }
    let mut image: Vec<&Vec<usize>> = action.perms.iter().collect();
    image.sort();
    image.dedup();
    let fixed: i64 = image.iter().map(|p| p.iter().enumerate().filter(|(c, &d)| *c == d).count() as i64).sum();
    let fixed_point_free = action.perms.iter().position(|p| p.iter().enumerate().all(|(c, &d)| c != d));
    Ok(BurnsideReport {
        image_order: image.len(),
        average_fixed_points: Ratio::new(fixed, image.len() as i64),
        fixed_point_free,
    })
}

/// The map on conjugacy classes induced by a homomorphism.
#[derive(Debug, Clone, Serialize)]
pub struct ClassMap {
    /// Target class of each source class.
    pub map: Vec<usize>,
    pub target_classes: usize,
    /// Surjectivity read off the class map.
    pub surjective: bool,
    /// Surjectivity through the conjugate union of the image.
    pub surjective_by_union: bool,
}

impl ClassMap {
    pub fn agrees(&self) -> bool {
        self.surjective == self.surjective_by_union
    }
}

pub fn conj_class_map(phi: &GroupHom) -> ClassMap {
    let (src, _) = phi.source.conjugacy_classes();
    let (tgt, class_of) = phi.target.conjugacy_classes();
    let map: Vec<usize> = src.iter().map(|c| class_of[phi.apply(c[0])]).collect();
    let mut hit = vec![false; tgt.len()];
    map.iter().for_each(|&k| hit[k] = true);
    let g = &phi.target;
    let img = phi.image();
    let mut covered = vec![false; g.order()];
    for x in 0..g.order() {
        for &y in &img {
            covered[g.conjugate(x, y)] = true;
        }
    }
    ClassMap {
        map,
        target_classes: tgt.len(),
        surjective: hit.iter().all(|&b| b),
        surjective_by_union: covered.iter().all(|&b| b),
    }
}

/// Surjectivity of `H -> G` on elements, on conjugacy classes and on abelianizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Trichotomy {
    pub hom_surjective: bool,
    pub conj_surjective: bool,
    pub abelianized_surjective: bool,
}

impl Trichotomy {
    /// `hom => conj => abelianized`.
    pub fn implications_hold(&self) -> bool {
        (!self.hom_surjective || self.conj_surjective) && (!self.conj_surjective || self.abelianized_surjective)
    }
}

pub fn surjectivity_trichotomy(emb: &SubgroupEmbedding) -> Trichotomy {
    let g = emb.ambient();
    let h = emb.elements();
    let comm = g.commutator_subgroup();
    // H [G, G] = G
    let mut prod = vec![false; g.order()];
    for &x in &h {
        for &y in &comm {
            prod[g.mul(x, y)] = true;
        }
    }
    Trichotomy {
        hom_surjective: h.len() == g.order(),
        conj_surjective: conj_class_map(&emb.hom).surjective,
        abelianized_surjective: prod.iter().all(|&b| b),
    }
}

/// Writes every `c` as `g(c') j(c'')`, returned as `(c', c'')` per element of `C`.
pub fn split_decompose(ses: &SplitSequence) -> Result<Vec<(usize, usize)>, GroupError> {
    let bad = |s: &str| Err(GroupError::NotSplit(s.into()));
    let (g, h, j) = (&ses.g, &ses.h, &ses.j);
    let c = &g.target;
    if h.source != *c || j.target != *c || j.source != h.target {
        return bad("maps do not compose");
    }
    for m in [g, h, j] {
        GroupHom::new(m.source.clone(), m.target.clone(), m.mapping.clone()).map_err(|e| GroupError::NotSplit(e.to_string()))?;
    }
    if !g.is_injective() {
        return bad("g is not injective");
    }
    if !h.is_surjective() {
        return bad("h is not surjective");
    }
    if g.image() != h.kernel() {
        return bad("image of g differs from the kernel of h");
    }
    let cpp = &h.target;
    if (0..cpp.order()).any(|y| h.apply(j.apply(y)) != y) {
        return bad("h j is not the identity");
    }
    let mut pre = vec![usize::MAX; c.order()];
    for x in 0..g.source.order() {
        pre[g.apply(x)] = x;
    }
    let mut out = Vec::with_capacity(c.order());
    for x in 0..c.order() {
        let y = h.apply(x);
        let rest = c.mul(x, c.inv(j.apply(y)));
        let xp = pre[rest];
        if xp == usize::MAX || c.mul(g.apply(xp), j.apply(y)) != x {
            return bad("decomposition failed");
        }
        // uniqueness: y is forced by h, and then x' by injectivity of g
        out.push((xp, y));
    }
    Ok(out)
}

/// Whether `G` is the union of the conjugates of `H`, used as a cross-check.
pub fn in_conjugate_union(emb: &SubgroupEmbedding, x: usize) -> bool {
    conjugate_union(emb).elements.binary_search(&x).is_ok()
}

/// Convenience for tests and the CLI: the subgroup of `g` on `elems`.
pub fn embed(g: &FiniteGroup, elems: &[usize]) -> Result<SubgroupEmbedding, GroupError> {
    SubgroupEmbedding::from_elements(g, elems)
}
