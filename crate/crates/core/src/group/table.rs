use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::GroupError;

/// Largest order accepted for a multiplication table.
pub const MAX_ORDER: usize = 1000;

/// Orders up to this are checked for associativity on every triple.
const EXHAUSTIVE_ORDER: usize = 64;
const SAMPLED_TRIPLES: usize = 100_000;

/// A finite group given by its full multiplication table over `0..order`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    #[serde(skip)]
    table: Vec<u16>,
    identity: usize,
    #[serde(skip)]
    inverse: Vec<u16>,
}

impl FiniteGroup {
    /// Verifies closure, associativity, identity and inverses.
    pub fn from_table(name: &str, order: usize, table: Vec<usize>) -> Result<Self, GroupError> {
        if order == 0 {
            return Err(GroupError::NotAGroup("empty table".into()));
        }
        if order > MAX_ORDER {
            return Err(GroupError::TooLarge(order));
        }
        if table.len() != order * order {
            return Err(GroupError::NotAGroup(format!("table has {} entries, want {}", table.len(), order * order)));
        }
        if let Some(&x) = table.iter().find(|&&x| x >= order) {
            return Err(GroupError::NotAGroup(format!("entry {x} out of range")));
        }
        let at = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| GroupError::NotAGroup("no identity".into()))?;
        let mut inverse = vec![0u16; order];
        for x in 0..order {
            let y = (0..order)
                .find(|&y| at(x, y) == identity && at(y, x) == identity)
                .ok_or_else(|| GroupError::NotAGroup(format!("element {x} has no inverse")))?;
            inverse[x] = y as u16;
        }
        let assoc = |a: usize, b: usize, c: usize| at(at(a, b), c) == at(a, at(b, c));
        if order <= EXHAUSTIVE_ORDER {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        if !assoc(a, b, c) {
                            return Err(GroupError::NotAGroup(format!("({a} {b}) {c} != {a} ({b} {c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(order as u64);
            for _ in 0..SAMPLED_TRIPLES {
                let (a, b, c) = (rng.gen_range(0..order), rng.gen_range(0..order), rng.gen_range(0..order));
                if !assoc(a, b, c) {
                    return Err(GroupError::NotAGroup(format!("({a} {b}) {c} != {a} ({b} {c})")));
                }
            }
        }
        Ok(Self { name: name.into(), order, table: table.into_iter().map(|x| x as u16).collect(), identity, inverse })
    }

    /// Table of `mul` on `0..order`.
    pub fn from_mul(name: &str, order: usize, mul: impl Fn(usize, usize) -> usize) -> Result<Self, GroupError> {
        if order > MAX_ORDER {
            return Err(GroupError::TooLarge(order));
        }
        let mut table = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                table.push(mul(a, b));
            }
        }
        Self::from_table(name, order, table)
    }

    /// Group generated by permutations of `0..degree`, composed right to left.
    pub fn from_permutations(name: &str, gens: &[Vec<usize>]) -> Result<Self, GroupError> {
        let degree = gens.first().map_or(1, Vec::len);
        for g in gens {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&x| x >= degree || std::mem::replace(&mut seen[x], true)) {
                return Err(GroupError::NotAGroup("generator is not a permutation".into()));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let p: Vec<usize> = (0..degree).map(|x| elems[i][g[x]]).collect();
                if !index.contains_key(&p) {
                    if elems.len() == MAX_ORDER {
                        return Err(GroupError::TooLarge(MAX_ORDER + 1));
                    }
                    index.insert(p.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(p);
                }
            }
        }
        let n = elems.len();
        Self::from_mul(name, n, |a, b| {
            let p: Vec<usize> = (0..degree).map(|x| elems[a][elems[b][x]]).collect();
            index[&p]
        })
    }

    pub fn cyclic(n: usize) -> Self {
        Self::from_mul(&format!("Z{n}"), n, |a, b| (a + b) % n).expect("cyclic group")
    }

    /// Dihedral group of order `2n`: elements `r^i s^j` stored as `i + n j`.
    pub fn dihedral(n: usize) -> Self {
        Self::from_mul(&format!("D{n}"), 2 * n, |a, b| {
            let (i, j, k, l) = (a % n, a / n, b % n, b / n);
            let rot = if j == 0 { (i + k) % n } else { (i + n - k) % n };
            rot + n * ((j + l) % 2)
        })
        .expect("dihedral group")
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = Vec::new();
        if n >= 2 {
            let mut t: Vec<usize> = (0..n).collect();
            t.swap(0, 1);
            gens.push(t);
            gens.push((0..n).map(|x| (x + 1) % n).collect());
        } else {
            gens.push((0..n.max(1)).collect());
        }
        Self::from_permutations(&format!("S{n}"), &gens).expect("symmetric group")
    }

    pub fn alternating(n: usize) -> Self {
        // 3-cycles (0 1 k) generate
        let gens: Vec<Vec<usize>> = if n < 3 {
            vec![(0..n.max(1)).collect()]
        } else {
            (2..n)
                .map(|k| {
                    let mut p: Vec<usize> = (0..n).collect();
                    p[0] = 1;
                    p[1] = k;
                    p[k] = 0;
                    p
                })
                .collect()
        };
        Self::from_permutations(&format!("A{n}"), &gens).expect("alternating group")
    }

    /// Quaternion group as permutations of `{1, -1, i, -i, j, -j, k, -k}` by left
    /// multiplication with `i` and `j`.
    pub fn quaternion() -> Self {
        // index 2u + s is the unit u (1, i, j, k) with sign (-1)^s
        let unit_mul = |a: usize, b: usize| -> (usize, usize) {
            const T: [[(usize, usize); 4]; 4] = [
                [(0, 0), (1, 0), (2, 0), (3, 0)],
                [(1, 0), (0, 1), (3, 0), (2, 1)],
                [(2, 0), (3, 1), (0, 1), (1, 0)],
                [(3, 0), (2, 0), (1, 1), (0, 1)],
            ];
            T[a][b]
        };
        let left = |u: usize| -> Vec<usize> {
            (0..8)
                .map(|x| {
                    let (w, s) = unit_mul(u, x / 2);
                    2 * w + (s + x % 2) % 2
                })
                .collect()
        };
        Self::from_permutations("Q8", &[left(1), left(2)]).expect("quaternion group")
    }

    pub fn direct_product(a: &Self, b: &Self) -> Self {
        let (m, n) = (a.order, b.order);
        Self::from_mul(&format!("{} x {}", a.name, b.name), m * n, |x, y| {
            a.mul(x / n, y / n) * n + b.mul(x % n, y % n)
        })
        .expect("direct product")
    }

    /// `N : Z_k` where the generator of `Z_k` acts by the automorphism `aut` of `N`
    /// (which must satisfy `aut^k = id`). Element `(x, j)` is stored as `x + |N| j`.
    pub fn semidirect_cyclic(nn: &Self, aut: &[usize], k: usize) -> Result<Self, GroupError> {
        let n = nn.order;
        let mut powers = vec![(0..n).collect::<Vec<usize>>()];
        for j in 1..=k {
            let prev = &powers[j - 1];
            powers.push((0..n).map(|x| aut[prev[x]]).collect());
        }
        if powers[k].iter().enumerate().any(|(x, &y)| x != y) {
            return Err(GroupError::Precondition(format!("automorphism order does not divide {k}")));
        }
        Self::from_mul(&format!("{} : Z{k}", nn.name), n * k, |a, b| {
            let (x, j, y, l) = (a % n, a / n, b % n, b / n);
            nn.mul(x, powers[j][y]) + n * ((j + l) % k)
        })
    }

    /// Cyclic extension `<a, b | a^m, b^n = a^t, b a b^-1 = a^k>`, elements `a^i b^j`
    /// stored as `i + m j`.
    pub fn metacyclic(m: usize, n: usize, k: usize, t: usize) -> Result<Self, GroupError> {
        let mut kp = vec![1 % m.max(1)];
        for j in 1..n {
            kp.push(kp[j - 1] * k % m);
        }
        if kp[n - 1] * k % m != 1 % m || (t * k) % m != t % m {
            return Err(GroupError::Precondition(format!("inconsistent extension data m={m} n={n} k={k} t={t}")));
        }
        Self::from_mul(&format!("<{m},{n};{k},{t}>"), m * n, |x, y| {
            let (i, j, p, q) = (x % m, x / m, y % m, y / m);
            let mut e = i + p * kp[j];
            let mut s = j + q;
            if s >= n {
                s -= n;
                e += t;
            }
            e % m + m * s
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: &str) {
        self.name = name.into();
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    /// `g a g^-1`.
    #[inline]
    pub fn conjugate(&self, g: usize, a: usize) -> usize {
        self.mul(self.mul(g, a), self.inv(g))
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Subgroup generated by `gens`, sorted.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order];
        inside[self.identity] = true;
        let mut elems = vec![self.identity];
        let mut i = 0;
        while i < elems.len() {
            let x = elems[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    elems.push(y);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        elems
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        let mut inside = vec![false; self.order];
        for &x in set {
            if x >= self.order {
                return false;
            }
            inside[x] = true;
        }
        inside[self.identity] && set.iter().all(|&a| inside[self.inv(a)] && set.iter().all(|&b| inside[self.mul(a, b)]))
    }

    /// Every subgroup, by adjoining one element at a time to known subgroups. Sorted by
    /// size, then lexicographically.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let mut seen: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::new();
        let trivial = vec![self.identity];
        seen.insert(trivial.clone());
        let mut queue = VecDeque::from([trivial]);
        while let Some(h) = queue.pop_front() {
            let mut inside = vec![false; self.order];
            h.iter().for_each(|&x| inside[x] = true);
            for g in 0..self.order {
                if inside[g] {
                    continue;
                }
                let mut gens = h.clone();
                gens.push(g);
                let k = self.closure(&gens);
                if seen.insert(k.clone()) {
                    queue.push_back(k);
                }
            }
        }
        let mut all: Vec<Vec<usize>> = seen.into_iter().collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all
    }

    /// Conjugacy classes, ordered by smallest member, and the class index of each element.
    pub fn conjugacy_classes(&self) -> (Vec<Vec<usize>>, Vec<usize>) {
        let mut class_of = vec![usize::MAX; self.order];
        let mut classes = Vec::new();
        for a in 0..self.order {
            if class_of[a] != usize::MAX {
                continue;
            }
            let mut c: Vec<usize> = (0..self.order).map(|g| self.conjugate(g, a)).collect();
            c.sort_unstable();
            c.dedup();
            for &x in &c {
                class_of[x] = classes.len();
            }
            classes.push(c);
        }
        (classes, class_of)
    }

    /// Subgroup generated by all commutators.
    pub fn commutator_subgroup(&self) -> Vec<usize> {
        let mut comms: Vec<usize> = Vec::new();
        for a in 0..self.order {
            for b in 0..self.order {
                comms.push(self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b))));
            }
        }
        comms.sort_unstable();
        comms.dedup();
        self.closure(&comms)
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order).filter(|&a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a))).collect()
    }

    /// A small generating set, greedily by largest element order.
    pub fn generators(&self) -> Vec<usize> {
        let mut by_order: Vec<usize> = (0..self.order).collect();
        by_order.sort_by_key(|&a| (std::cmp::Reverse(self.element_order(a)), a));
        let mut gens = Vec::new();
        let mut span = vec![self.identity];
        for a in by_order {
            if span.len() == self.order {
                break;
            }
            if span.binary_search(&a).is_err() {
                gens.push(a);
                span = self.closure(&gens);
            }
        }
        gens
    }

    /// Sorted element orders.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.order).map(|a| self.element_order(a)).collect();
        v.sort_unstable();
        v
    }
}
