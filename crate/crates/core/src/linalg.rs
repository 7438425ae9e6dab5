//! Exact sparse linear algebra over a field of scalars.
//!
//! Vectors are sparse maps from an ordered key to a nonzero coefficient.
//! [`Echelon`] keeps an incrementally built semi-echelon basis: every row's
//! pivot is its smallest key, each row is normalized to pivot coefficient 1,
//! and each row remembers how it was obtained from the inserted inputs, so
//! a vector in the span can be written back in terms of the inputs.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

pub type SparseVec<K, C> = BTreeMap<K, C>;

#[derive(Debug, Clone)]
struct Row<K, C> {
    vec: SparseVec<K, C>,
    combo: BTreeMap<usize, C>,
}

#[derive(Debug, Clone)]
pub struct Echelon<K, C> {
    rows: Vec<Row<K, C>>,
    pivots: BTreeMap<K, usize>,
    inserted: usize,
}

impl<K: Ord + Clone, C: Scalar> Default for Echelon<K, C> {
    fn default() -> Self {
        Self::new()
    }
}

fn axpy<K: Ord + Clone, C: Scalar>(dst: &mut SparseVec<K, C>, a: &C, src: &SparseVec<K, C>) {
    for (k, v) in src {
        let add = a.clone() * v.clone();
        match dst.get_mut(k) {
            Some(slot) => {
                let s = slot.clone() + add;
                if s.is_zero() {
                    dst.remove(k);
                } else {
                    *slot = s;
                }
            }
            None => {
                if !add.is_zero() {
                    dst.insert(k.clone(), add);
                }
            }
        }
    }
}

impl<K: Ord + Clone, C: Scalar> Echelon<K, C> {
    pub fn new() -> Self {
        Echelon { rows: Vec::new(), pivots: BTreeMap::new(), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors passed to [`Echelon::insert`] so far.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Returns `(residual, coeffs)` with `v = residual + Σ coeffs[k] · input_k`.
    fn reduce(&self, v: &SparseVec<K, C>) -> (SparseVec<K, C>, BTreeMap<usize, C>) {
        let mut residual = v.clone();
        let mut combo: BTreeMap<usize, C> = BTreeMap::new();
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => residual.iter().find(|(k, _)| self.pivots.contains_key(*k)),
                Some(c) => residual
                    .range((std::ops::Bound::Excluded(c.clone()), std::ops::Bound::Unbounded))
                    .find(|(k, _)| self.pivots.contains_key(*k)),
            };
            let Some((key, coef)) = next.map(|(k, c)| (k.clone(), c.clone())) else {
                break;
            };
            let row = &self.rows[self.pivots[&key]];
            axpy(&mut residual, &-coef.clone(), &row.vec);
            axpy(&mut combo, &coef, &row.combo);
            cursor = Some(key);
        }
        (residual, combo)
    }

    pub fn contains(&self, v: &SparseVec<K, C>) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Coefficients expressing `v` over the inserted inputs, if `v` lies in
    /// their span.
    pub fn express(&self, v: &SparseVec<K, C>) -> Option<BTreeMap<usize, C>> {
        let (residual, combo) = self.reduce(v);
        residual.is_empty().then_some(combo)
    }

    /// Adds `v` as input number `self.inserted()`. On dependence, returns
    /// `Err(coeffs)` with `v = Σ coeffs[k] · input_k` over earlier inputs.
    pub fn insert(&mut self, v: &SparseVec<K, C>) -> Result<(), BTreeMap<usize, C>> {
        let index = self.inserted;
        self.inserted += 1;
        let (mut residual, combo) = self.reduce(v);
        let Some((pivot, lead)) = residual.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return Err(combo);
        };
        let inv = C::one() / lead;
        for c in residual.values_mut() {
            *c = c.clone() * inv.clone();
        }
        let mut row_combo: BTreeMap<usize, C> = BTreeMap::new();
        row_combo.insert(index, inv.clone());
        axpy(&mut row_combo, &-inv, &combo);
        self.pivots.insert(pivot, self.rows.len());
        self.rows.push(Row { vec: residual, combo: row_combo });
        Ok(())
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// A basis of the kernel of the linear map sending source `k` to
/// `image(&sources[k])`.
///
/// Sources are split into blocks that share no target key, each block is
/// reduced in source order, and every dependent source `k` yields the
/// relation `e_k - Σ c_i e_i` (support on `k` and earlier sources only).
/// Basis vectors are returned in increasing order of `k`, so the result is
/// deterministic and the vectors are independent by construction.
pub fn nullspace_of_map<S, T, C, F>(sources: &[S], image: F) -> Vec<SparseVec<usize, C>>
where
    T: Ord + Clone,
    C: Scalar,
    F: Fn(&S) -> SparseVec<T, C>,
{
    let images: Vec<SparseVec<T, C>> = sources.iter().map(image).collect();

    let mut parent: Vec<usize> = (0..sources.len()).collect();
    let mut owner: BTreeMap<&T, usize> = BTreeMap::new();
    for (k, img) in images.iter().enumerate() {
        for t in img.keys() {
            match owner.get(t) {
                Some(&o) => {
                    let (a, b) = (find(&mut parent, o), find(&mut parent, k));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
                None => {
                    owner.insert(t, k);
                }
            }
        }
    }

    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for k in 0..sources.len() {
        let root = find(&mut parent, k);
        blocks.entry(root).or_default().push(k);
    }

    let mut basis: Vec<(usize, SparseVec<usize, C>)> = Vec::new();
    for members in blocks.values() {
        let mut ech: Echelon<T, C> = Echelon::new();
        for &k in members {
            if let Err(combo) = ech.insert(&images[k]) {
                let mut v: SparseVec<usize, C> = BTreeMap::new();
                v.insert(k, C::one());
                for (local, c) in combo {
                    v.insert(members[local], -c);
                }
                basis.push((k, v));
            }
        }
    }
    basis.sort_by_key(|(k, _)| *k);
    basis.into_iter().map(|(_, v)| v).collect()
}

/// Rank of a family of sparse vectors.
pub fn rank<K: Ord + Clone, C: Scalar>(vectors: &[SparseVec<K, C>]) -> usize {
    let mut ech = Echelon::new();
    for v in vectors {
        let _ = ech.insert(v);
    }
    ech.rank()
}
