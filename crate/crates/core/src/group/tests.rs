use num_rational::Ratio;

use super::*;
use crate::error::GroupError;

fn s3() -> FiniteGroup {
    FiniteGroup::symmetric(3)
}

/// Index of the permutation with images `p` in a group built from permutations of
/// `0..n`, found through the generating permutations.
fn perm_index(g: &FiniteGroup, gens: &[Vec<usize>], p: &[usize]) -> usize {
    // rebuild the BFS order used by from_permutations
    let n = p.len();
    let mut elems: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut i = 0;
    while i < elems.len() {
        for s in gens {
            let q: Vec<usize> = (0..n).map(|x| elems[i][s[x]]).collect();
            if !elems.contains(&q) {
                elems.push(q);
            }
        }
        i += 1;
    }
    assert_eq!(elems.len(), g.order());
    elems.iter().position(|e| e == p).unwrap()
}

fn s3_gens() -> Vec<Vec<usize>> {
    vec![vec![1, 0, 2], vec![1, 2, 0]]
}

#[test]
fn table_validation() {
    assert!(matches!(FiniteGroup::from_table("x", 2, vec![0, 1, 1, 1]), Err(GroupError::NotAGroup(_))));
    assert!(matches!(FiniteGroup::from_table("x", 2, vec![0, 1, 1]), Err(GroupError::NotAGroup(_))));
    assert!(matches!(FiniteGroup::from_table("x", 1001, vec![]), Err(GroupError::TooLarge(1001))));
    // a Latin square without associativity: x*y = x - y mod 3
    assert!(FiniteGroup::from_mul("x", 3, |a, b| (a + 3 - b) % 3).is_err());
    let g = FiniteGroup::from_table("Z2", 2, vec![0, 1, 1, 0]).unwrap();
    assert_eq!((g.order(), g.identity(), g.inv(1)), (2, 0, 1));
}

#[test]
fn standard_groups() {
    assert_eq!(s3().order(), 6);
    assert!(!s3().is_abelian());
    assert_eq!(FiniteGroup::symmetric(4).order(), 24);
    assert_eq!(FiniteGroup::alternating(5).order(), 60);
    assert_eq!(FiniteGroup::alternating(5).commutator_subgroup().len(), 60);
    assert_eq!(FiniteGroup::alternating(5).subgroups().len(), 59);
    assert_eq!(FiniteGroup::symmetric(4).subgroups().len(), 30);
    let q8 = FiniteGroup::quaternion();
    assert_eq!(q8.order_profile(), vec![1, 2, 4, 4, 4, 4, 4, 4]);
    assert_eq!(q8.center().len(), 2);
    assert_eq!(FiniteGroup::dihedral(6).order(), 12);
    assert_eq!(sl2_f3().order(), 24);
    assert_eq!(sl2_f3().center().len(), 2);
    assert!(is_isomorphic(&FiniteGroup::dihedral(3), &s3()));
    assert!(!is_isomorphic(&FiniteGroup::cyclic(6), &s3()));
    assert_eq!(automorphisms(&FiniteGroup::cyclic(8)).len(), 4);
    assert_eq!(automorphisms(&s3()).len(), 6);
    assert_eq!(automorphisms(&FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2))).len(), 6);
}

#[test]
fn catalog_is_complete_up_to_24() {
    let all = catalog(24);
    assert_eq!(all.len(), 74);
    for n in 1..=24 {
        let of_n: Vec<_> = all.iter().filter(|g| g.order() == n).collect();
        assert_eq!(of_n.len(), GROUP_COUNTS[n], "order {n}");
        for (i, a) in of_n.iter().enumerate() {
            for b in &of_n[..i] {
                assert!(!is_isomorphic(a, b));
            }
        }
    }
    for name in ["Q8", "A4", "S4", "SL(2,3)", "D12", "Q16", "Dic3", "Z24"] {
        assert!(all.iter().any(|g| g.name() == name), "{name} missing");
    }
}

#[test]
fn conjugate_union_examples() {
    let g = s3();
    let t = perm_index(&g, &s3_gens(), &[1, 0, 2]);
    let h = embed(&g, &g.closure(&[t])).unwrap();
    let u = conjugate_union(&h);
    assert_eq!(u.elements.len(), 4);
    assert!(!u.covers);
    // the union is the identity and the three transpositions
    for &x in &u.elements {
        assert!(g.element_order(x) <= 2);
    }
    let all = embed(&g, &(0..6).collect::<Vec<_>>()).unwrap();
    assert!(conjugate_union(&all).covers);
    let z6 = FiniteGroup::cyclic(6);
    let h = embed(&z6, &z6.closure(&[2])).unwrap();
    let u = conjugate_union(&h);
    assert_eq!(u.elements, vec![0, 2, 4]);
    assert!(!u.covers && h.is_normal());
}

#[test]
fn coset_action_examples() {
    let g = s3();
    let all = embed(&g, &(0..6).collect::<Vec<_>>()).unwrap();
    let a = coset_action(&all).unwrap();
    assert_eq!(a.degree(), 1);
    assert_eq!(a.kernel.len(), 6);
    assert!(matches!(burnside_audit(&a), Err(GroupError::Precondition(_))));

    let t = perm_index(&g, &s3_gens(), &[1, 0, 2]);
    let h = embed(&g, &g.closure(&[t])).unwrap();
    let a = coset_action(&h).unwrap();
    assert_eq!(a.degree(), 3);
    assert!(a.transitive);
    assert_eq!(a.kernel, vec![g.identity()]);
    let b = burnside_audit(&a).unwrap();
    assert_eq!(b.average_fixed_points, Ratio::from_integer(1));
    let x0 = b.fixed_point_free.unwrap();
    assert_eq!(g.element_order(x0), 3);
    assert!(!in_conjugate_union(&h, x0));

    let z4 = FiniteGroup::cyclic(4);
    let h = embed(&z4, &[0, 2]).unwrap();
    let a = coset_action(&h).unwrap();
    assert_eq!((a.degree(), a.kernel.clone()), (2, vec![0, 2]));
    let b = burnside_audit(&a).unwrap();
    assert_eq!(b.fixed_point_free, Some(1));
    assert_eq!(b.image_order, 2);
    assert_eq!(b.average_fixed_points, Ratio::from_integer(1));
}

#[test]
fn class_maps() {
    let g = s3();
    let id = GroupHom::identity(&g);
    assert!(conj_class_map(&id).surjective);

    let a5 = FiniteGroup::alternating(5);
    let a4 = a5.subgroups().into_iter().find(|h| h.len() == 12).unwrap();
    let emb = embed(&a5, &a4).unwrap();
    let cm = conj_class_map(&emb.hom);
    assert!(!cm.surjective && cm.agrees());
    assert_eq!(cm.target_classes, 5);
    // both classes of 5-cycles are missed
    let (classes, _) = a5.conjugacy_classes();
    let hit: std::collections::HashSet<usize> = cm.map.iter().copied().collect();
    let missed: Vec<_> = (0..classes.len()).filter(|k| !hit.contains(k)).collect();
    assert_eq!(missed.len(), 2);
    assert!(missed.iter().all(|&k| a5.element_order(classes[k][0]) == 5));

    let z4 = FiniteGroup::cyclic(4);
    let z2 = FiniteGroup::cyclic(2);
    let q = GroupHom::new(z4, z2, vec![0, 1, 0, 1]).unwrap();
    let cm = conj_class_map(&q);
    assert!(cm.surjective && cm.agrees());
    assert!(GroupHom::new(FiniteGroup::cyclic(4), FiniteGroup::cyclic(2), vec![0, 1, 1, 1]).is_err());
}

#[test]
fn trichotomy_examples() {
    let a5 = FiniteGroup::alternating(5);
    let a4 = a5.subgroups().into_iter().find(|h| h.len() == 12).unwrap();
    let t = surjectivity_trichotomy(&embed(&a5, &a4).unwrap());
    assert_eq!((t.hom_surjective, t.conj_surjective, t.abelianized_surjective), (false, false, true));
    let g = s3();
    let t = perm_index(&g, &s3_gens(), &[1, 0, 2]);
    let tri = surjectivity_trichotomy(&embed(&g, &g.closure(&[t])).unwrap());
    assert_eq!((tri.hom_surjective, tri.conj_surjective, tri.abelianized_surjective), (false, false, true));
    let tri = surjectivity_trichotomy(&embed(&g, &(0..6).collect::<Vec<_>>()).unwrap());
    assert!(tri.hom_surjective && tri.conj_surjective && tri.abelianized_surjective);
}

#[test]
fn split_examples() {
    // S3 = A3 : <(01)>
    let g = s3();
    let a3 = embed(&g, &g.commutator_subgroup()).unwrap();
    let z2 = FiniteGroup::cyclic(2);
    let t = perm_index(&g, &s3_gens(), &[1, 0, 2]);
    let h_map: Vec<usize> = (0..6).map(|x| usize::from(!a3.elements().contains(&x))).collect();
    let ses = SplitSequence {
        g: a3.hom.clone(),
        h: GroupHom::new(g.clone(), z2.clone(), h_map).unwrap(),
        j: GroupHom::new(z2.clone(), g.clone(), vec![g.identity(), t]).unwrap(),
    };
    let dec = split_decompose(&ses).unwrap();
    assert_eq!(dec.len(), 6);
    let mut pairs = dec.clone();
    pairs.sort();
    pairs.dedup();
    assert_eq!(pairs.len(), 6);

    // trivial kernel: c = 1 j(h(c))
    let triv = FiniteGroup::cyclic(1);
    let ses = SplitSequence {
        g: GroupHom::new(triv.clone(), z2.clone(), vec![0]).unwrap(),
        h: GroupHom::identity(&z2),
        j: GroupHom::identity(&z2),
    };
    assert_eq!(split_decompose(&ses).unwrap(), vec![(0, 0), (0, 1)]);

    // Z4 -> Z2 has no section
    let z4 = FiniteGroup::cyclic(4);
    let ses = SplitSequence {
        g: GroupHom::new(z2.clone(), z4.clone(), vec![0, 2]).unwrap(),
        h: GroupHom::new(z4.clone(), z2.clone(), vec![0, 1, 0, 1]).unwrap(),
        j: GroupHom { source: z2.clone(), target: z4.clone(), mapping: vec![0, 1] },
    };
    assert!(matches!(split_decompose(&ses), Err(GroupError::NotSplit(_))));
}

#[test]
fn finite_fields() {
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let f = FiniteField::new(q).unwrap();
        for a in 1..q as usize {
            assert!(f.inv(a).is_some(), "q={q} a={a}");
        }
    }
    assert!(matches!(FiniteField::new(6), Err(GroupError::UnsupportedField(6))));
}

#[test]
fn borel_coverage() {
    let b = gl2_borel_coverage(2).unwrap();
    assert_eq!((b.group_order, b.borel_order), (6, 2));
    assert_eq!(b.coverage, Ratio::new(4, 6));
    let b = gl2_borel_coverage(3).unwrap();
    assert_eq!(b.group_order, 48);
    // 48 - #(irreducible charpoly) = 48 - 18
    assert_eq!(b.covered, 30);
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let b = gl2_borel_coverage(q).unwrap();
        assert!(b.coverage < Ratio::from_integer(1));
        assert_eq!(b.coverage, b.reducible_share);
    }
    assert!(gl2_borel_coverage(11).is_err());
}

#[test]
fn small_audit_passes() {
    let r = audit_groups(12);
    assert!(r.passed, "{:?}", (&r.coverage_violations, &r.burnside_failures, r.conj_ab_gap.is_some(), r.hom_ab_gap.is_some()));
    assert!(r.split_sequences > 0 && r.split_failures == 0);
}
