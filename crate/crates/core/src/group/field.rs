use num_rational::Ratio;
use serde::Serialize;

use crate::error::GroupError;

/// `F_q` for `q` in `{2, 3, 4, 5, 7, 8, 9}`, elements `0..q` as base-`p` coefficient
/// vectors of polynomials modulo a fixed irreducible.
#[derive(Debug, Clone)]
pub struct FiniteField {
    pub q: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
}

impl FiniteField {
    pub fn new(q: u32) -> Result<Self, GroupError> {
        // (p, degree, low coefficients of the monic modulus x^k + ...)
        let (p, k, modulus): (usize, usize, &[usize]) = match q {
            2 | 3 | 5 | 7 => (q as usize, 1, &[0]),
            4 => (2, 2, &[1, 1]),
            8 => (2, 3, &[1, 1, 0]),
            9 => (3, 2, &[1, 0]),
            _ => return Err(GroupError::UnsupportedField(q)),
        };
        let q = q as usize;
        let digits = |mut x: usize| -> Vec<usize> {
            (0..k)
                .map(|_| {
                    let d = x % p;
                    x /= p;
                    d
                })
                .collect()
        };
        let pack = |v: &[usize]| v.iter().rev().fold(0, |acc, &d| acc * p + d);
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            for b in 0..q {
                let (da, db) = (digits(a), digits(b));
                let s: Vec<usize> = (0..k).map(|i| (da[i] + db[i]) % p).collect();
                add[a * q + b] = pack(&s);
                let mut prod = vec![0; 2 * k];
                for i in 0..k {
                    for j in 0..k {
                        prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
                    }
                }
                // x^k = -(modulus)
                for deg in (k..2 * k).rev() {
                    let c = prod[deg];
                    if c == 0 {
                        continue;
                    }
                    prod[deg] = 0;
                    for (i, &mc) in modulus.iter().enumerate() {
                        prod[deg - k + i] = (prod[deg - k + i] + (p - mc % p) * c) % p;
                    }
                }
                mul[a * q + b] = pack(&prod[..k]);
            }
        }
        Ok(Self { q, add, mul })
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b]
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b]
    }

    pub fn neg(&self, a: usize) -> usize {
        (0..self.q).find(|&b| self.add(a, b) == 0).expect("additive inverse")
    }

    pub fn inv(&self, a: usize) -> Option<usize> {
        (1..self.q).find(|&b| self.mul(a, b) == 1)
    }

    /// Whether `x^2 - t x + d` has a root.
    pub fn has_root(&self, t: usize, d: usize) -> bool {
        let nt = self.neg(t);
        (0..self.q).any(|x| self.add(self.add(self.mul(x, x), self.mul(nt, x)), d) == 0)
    }
}

/// Share of `GL_2(F_q)` covered by the conjugates of the upper triangular subgroup.
#[derive(Debug, Clone, Serialize)]
pub struct BorelCoverage {
    pub q: u32,
    pub group_order: usize,
    pub borel_order: usize,
    pub covered: usize,
    pub coverage: Ratio<i64>,
    /// Share of matrices whose characteristic polynomial has a root.
    pub reducible_share: Ratio<i64>,
}

pub fn gl2_borel_coverage(q: u32) -> Result<BorelCoverage, GroupError> {
    let f = FiniteField::new(q)?;
    let n = f.q;
    type M = [usize; 4];
    let mmul = |a: &M, b: &M| -> M {
        [
            f.add(f.mul(a[0], b[0]), f.mul(a[1], b[2])),
            f.add(f.mul(a[0], b[1]), f.mul(a[1], b[3])),
            f.add(f.mul(a[2], b[0]), f.mul(a[3], b[2])),
            f.add(f.mul(a[2], b[1]), f.mul(a[3], b[3])),
        ]
    };
    let det = |a: &M| f.add(f.mul(a[0], a[3]), f.neg(f.mul(a[1], a[2])));
    let inverse = |a: &M| -> M {
        let di = f.inv(det(a)).expect("invertible");
        [f.mul(a[3], di), f.mul(f.neg(a[1]), di), f.mul(f.neg(a[2]), di), f.mul(a[0], di)]
    };
    let index = |a: &M| ((a[0] * n + a[1]) * n + a[2]) * n + a[3];
    let mut group = Vec::new();
    for code in 0..n.pow(4) {
        let a = [code / (n * n * n), code / (n * n) % n, code / n % n, code % n];
        if det(&a) != 0 {
            group.push(a);
        }
    }
    let borel: Vec<M> = group.iter().copied().filter(|a| a[2] == 0).collect();
    let mut hit = vec![false; n.pow(4)];
    for g in &group {
        let gi = inverse(g);
        for b in &borel {
            hit[index(&mmul(&mmul(g, b), &gi))] = true;
        }
    }
    let covered = hit.iter().filter(|&&b| b).count();
    let reducible = group.iter().filter(|a| f.has_root(f.add(a[0], a[3]), det(a))).count();
    let total = group.len() as i64;
    Ok(BorelCoverage {
        q,
        group_order: group.len(),
        borel_order: borel.len(),
        covered,
        coverage: Ratio::new(covered as i64, total),
        reducible_share: Ratio::new(reducible as i64, total),
    })
}
