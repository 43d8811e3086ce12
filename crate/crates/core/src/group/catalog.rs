use serde::Serialize;

use super::hom::{automorphisms, is_isomorphic, GroupHom};
use super::table::FiniteGroup;

/// Largest order for which the catalog is complete.
pub const CATALOG_MAX_ORDER: usize = 24;

/// Number of isomorphism classes of groups of order `n`, `n <= 24`.
pub const GROUP_COUNTS: [usize; 25] = [0, 1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14, 1, 5, 1, 5, 2, 2, 1, 15];

/// `SL(2, 3)` acting on the nine vectors of `F_3^2`.
pub fn sl2_f3() -> FiniteGroup {
    let act = |m: [usize; 4]| -> Vec<usize> {
        (0..9)
            .map(|v| {
                let (x, y) = (v % 3, v / 3);
                ((m[0] * x + m[1] * y) % 3) + 3 * ((m[2] * x + m[3] * y) % 3)
            })
            .collect()
    };
    FiniteGroup::from_permutations("SL(2,3)", &[act([1, 1, 0, 1]), act([1, 0, 1, 1])]).expect("SL(2,3)")
}

fn dicyclic(n: usize) -> FiniteGroup {
    let mut g = FiniteGroup::metacyclic(2 * n, 2, 2 * n - 1, n).expect("dicyclic group");
    g.set_name(&if n == 2 { "Q8".to_string() } else if n == 4 { "Q16".to_string() } else { format!("Dic{n}") });
    g
}

/// Reference groups whose names replace construction names in the catalog.
fn named(max_order: usize) -> Vec<FiniteGroup> {
    let mut v = vec![FiniteGroup::quaternion(), FiniteGroup::alternating(4), FiniteGroup::symmetric(4), sl2_f3()];
    for n in 3..=max_order / 2 {
        v.push(FiniteGroup::dihedral(n));
    }
    for n in 3..=max_order / 4 {
        if n != 4 {
            v.push(dicyclic(n));
        }
    }
    v.push(dicyclic(4));
    v.retain(|g| g.order() <= max_order);
    v
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}

fn aut_divides(aut: &[usize], k: usize) -> bool {
    let mut p: Vec<usize> = (0..aut.len()).collect();
    for _ in 0..k {
        p = p.iter().map(|&x| aut[x]).collect();
    }
    p.iter().enumerate().all(|(i, &x)| i == x)
}

/// One representative of every isomorphism class of order `<= max_order` (at most 24),
/// built from cyclic extensions, semidirect products with a cyclic group and direct
/// products, then deduplicated by isomorphism.
pub fn catalog(max_order: usize) -> Vec<FiniteGroup> {
    let max_order = max_order.min(CATALOG_MAX_ORDER);
    let refs = named(max_order);
    let mut by_order: Vec<Vec<FiniteGroup>> = vec![Vec::new(); max_order + 1];
    for n in 1..=max_order {
        let mut found: Vec<FiniteGroup> = Vec::new();
        let add = |mut g: FiniteGroup, found: &mut Vec<FiniteGroup>| {
            if found.iter().any(|h| is_isomorphic(h, &g)) {
                return;
            }
            if g.is_abelian() && g.generators().len() == 1 {
                g.set_name(&format!("Z{n}"));
            } else if let Some(r) = refs.iter().find(|r| r.order() == n && is_isomorphic(r, &g)) {
                g.set_name(r.name());
            }
            found.push(g);
        };
        for &m in &divisors(n) {
            let k = n / m;
            for kk in 0..m.max(1) {
                for t in 0..m.max(1) {
                    if let Ok(g) = FiniteGroup::metacyclic(m, k, kk, t) {
                        add(g, &mut found);
                    }
                }
            }
        }
        for &d in &divisors(n) {
            if d == n || d == 1 {
                continue;
            }
            let k = n / d;
            for nn in by_order[d].clone() {
                for aut in automorphisms(&nn) {
                    if aut_divides(&aut, k) {
                        if let Ok(g) = FiniteGroup::semidirect_cyclic(&nn, &aut, k) {
                            add(g, &mut found);
                        }
                    }
                }
            }
            for a in by_order[d].clone() {
                for b in by_order[k].clone() {
                    add(FiniteGroup::direct_product(&a, &b), &mut found);
                }
            }
        }
        by_order[n] = found;
    }
    by_order.into_iter().flatten().collect()
}

/// A split short exact sequence `C' -g-> C -h-> C''` with section `j`.
#[derive(Debug, Clone, Serialize)]
pub struct SplitSequence {
    pub g: GroupHom,
    pub h: GroupHom,
    pub j: GroupHom,
}

/// `N : Z_k` with inclusion, projection and the evident section, for every catalog
/// `N` and every automorphism of order dividing `k`; direct products likewise.
pub fn split_extensions(groups: &[FiniteGroup], max_order: usize) -> Vec<SplitSequence> {
    let mut out = Vec::new();
    for nn in groups {
        let n = nn.order();
        for k in 2..=max_order / n.max(1) {
            let zk = FiniteGroup::cyclic(k);
            for aut in automorphisms(nn) {
                if !aut_divides(&aut, k) {
                    continue;
                }
                let Ok(c) = FiniteGroup::semidirect_cyclic(nn, &aut, k) else { continue };
                let e = nn.identity();
                let g = GroupHom { source: nn.clone(), target: c.clone(), mapping: (0..n).collect() };
                let h = GroupHom { source: c.clone(), target: zk.clone(), mapping: (0..n * k).map(|x| x / n).collect() };
                let j = GroupHom { source: zk.clone(), target: c, mapping: (0..k).map(|i| e + n * i).collect() };
                out.push(SplitSequence { g, h, j });
            }
        }
    }
    for a in groups {
        for b in groups {
            if a.order() * b.order() > max_order || a.order() == 1 || b.order() == 1 {
                continue;
            }
            let c = FiniteGroup::direct_product(a, b);
            let m = b.order();
            let g = GroupHom { source: a.clone(), target: c.clone(), mapping: (0..a.order()).map(|x| x * m + b.identity()).collect() };
            let h = GroupHom { source: c.clone(), target: b.clone(), mapping: (0..c.order()).map(|x| x % m).collect() };
            let j = GroupHom { source: b.clone(), target: c, mapping: (0..m).map(|y| a.identity() * m + y).collect() };
            out.push(SplitSequence { g, h, j });
        }
    }
    out
}
