//! Exact vector-cost algebra: dominance, component-wise maximum,
//! nondominated filtering and lexicographic order.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::scalar::CostScalar;

/// Two cost vectors of different length were combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("cost vector length mismatch: {left} vs {right}")]
pub struct DimensionMismatch {
    pub left: usize,
    pub right: usize,
}

/// Fixed-length vector of non-negative exact costs.
///
/// The derived `Ord` is the lexicographic order on components. Up to three
/// components are stored inline.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CostVec<C>(SmallVec<[C; 3]>);

impl<C: CostScalar> CostVec<C> {
    /// Panics if `components` is empty or holds a negative value.
    pub fn new(components: Vec<C>) -> Self {
        assert!(
            !components.is_empty(),
            "cost vector must have at least one component"
        );
        assert!(
            components.iter().all(|c| *c >= C::zero()),
            "cost components must be non-negative"
        );
        CostVec(SmallVec::from_vec(components))
    }

    pub fn zero(len: usize) -> Self {
        CostVec::new(vec![C::zero(); len])
    }

    pub fn from_units(units: &[u64]) -> Self {
        CostVec::new(units.iter().map(|&u| C::from_units(u)).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn components(&self) -> &[C] {
        &self.0
    }

    #[inline]
    pub fn get(&self, k: usize) -> C {
        self.0[k]
    }

    pub fn into_inner(self) -> Vec<C> {
        self.0.into_vec()
    }

    fn check_len(&self, other: &Self) -> Result<(), DimensionMismatch> {
        if self.0.len() == other.0.len() {
            Ok(())
        } else {
            Err(DimensionMismatch {
                left: self.0.len(),
                right: other.0.len(),
            })
        }
    }

    #[inline]
    fn assert_len(&self, other: &Self) {
        if let Err(e) = self.check_len(other) {
            panic!("contract violation: {e}");
        }
    }

    /// `self ⪯ other`: no component of `self` exceeds the one in `other`.
    ///
    /// Panics on length mismatch; see [`CostVec::try_weakly_dominates`].
    #[inline]
    pub fn weakly_dominates(&self, other: &Self) -> bool {
        self.assert_len(other);
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn try_weakly_dominates(&self, other: &Self) -> Result<bool, DimensionMismatch> {
        self.check_len(other)?;
        Ok(self.weakly_dominates(other))
    }

    /// `self ≺ other`: weak dominance with at least one strict component.
    #[inline]
    pub fn dominates(&self, other: &Self) -> bool {
        self.assert_len(other);
        let mut strict = false;
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.cmp(b) {
                Ordering::Greater => return false,
                Ordering::Less => strict = true,
                Ordering::Equal => {}
            }
        }
        strict
    }

    pub fn try_dominates(&self, other: &Self) -> Result<bool, DimensionMismatch> {
        self.check_len(other)?;
        Ok(self.dominates(other))
    }

    /// Component-wise maximum.
    pub fn comax(&self, other: &Self) -> Self {
        self.assert_len(other);
        CostVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn try_comax(&self, other: &Self) -> Result<Self, DimensionMismatch> {
        self.check_len(other)?;
        Ok(self.comax(other))
    }

    /// Lexicographic comparison, first component first.
    #[inline]
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.assert_len(other);
        self.0.cmp(&other.0)
    }

    pub fn try_lex_cmp(&self, other: &Self) -> Result<Ordering, DimensionMismatch> {
        self.check_len(other)?;
        Ok(self.lex_cmp(other))
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.assert_len(other);
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a = *a + *b;
        }
    }

    /// Inserts `value` as a new component at `position`.
    pub fn insert_component(&self, position: usize, value: C) -> Self {
        let mut v = self.0.clone();
        v.insert(position, value);
        CostVec(v)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f64()).collect()
    }

    /// Applies `f` to every component.
    pub fn map<D: CostScalar>(&self, f: impl Fn(C) -> D) -> CostVec<D> {
        CostVec::new(self.0.iter().map(|c| f(*c)).collect())
    }
}

impl<C: CostScalar> Add for &CostVec<C> {
    type Output = CostVec<C>;

    fn add(self, rhs: Self) -> CostVec<C> {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl<C: fmt::Debug> fmt::Debug for CostVec<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c:?}")?;
        }
        write!(f, ")")
    }
}

/// Indices of the nondominated members of `vs`, in input order.
///
/// Among equal vectors only the earliest one is kept, so the result is
/// cost-unique.
pub fn nd_filter<C: CostScalar>(vs: &[CostVec<C>]) -> Vec<usize> {
    let mut kept = Vec::new();
    'outer: for (i, v) in vs.iter().enumerate() {
        for (j, u) in vs.iter().enumerate() {
            if u.dominates(v) || (j < i && u == v) {
                continue 'outer;
            }
        }
        kept.push(i);
    }
    kept
}

/// `ND(S)` as owned vectors, in input order.
pub fn nd_vectors<C: CostScalar>(vs: &[CostVec<C>]) -> Vec<CostVec<C>> {
    nd_filter(vs).into_iter().map(|i| vs[i].clone()).collect()
}

/// A cost-unique set of pairwise nondominated vectors, each carrying a
/// payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdSet<C, P = ()> {
    members: Vec<(CostVec<C>, P)>,
}

impl<C, P> Default for NdSet<C, P> {
    fn default() -> Self {
        NdSet {
            members: Vec::new(),
        }
    }
}

impl<C: CostScalar, P> NdSet<C, P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// True iff some member weakly dominates `v` (equality included).
    pub fn covers(&self, v: &CostVec<C>) -> bool {
        self.members.iter().any(|(m, _)| m.weakly_dominates(v))
    }

    /// Adds `v` unless a member already weakly dominates it; evicts members
    /// that `v` dominates. Returns whether `v` was added.
    pub fn insert(&mut self, v: CostVec<C>, payload: P) -> bool {
        if self.covers(&v) {
            return false;
        }
        self.members.retain(|(m, _)| !v.dominates(m));
        self.members.push((v, payload));
        true
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CostVec<C>, &P)> {
        self.members.iter().map(|(c, p)| (c, p))
    }

    pub fn costs(&self) -> impl Iterator<Item = &CostVec<C>> {
        self.members.iter().map(|(c, _)| c)
    }

    pub fn contains_cost(&self, v: &CostVec<C>) -> bool {
        self.members.iter().any(|(m, _)| m == v)
    }

    /// Member with the lexicographically smallest cost.
    pub fn lex_min(&self) -> Option<(&CostVec<C>, &P)> {
        self.members
            .iter()
            .min_by(|a, b| a.0.cmp(&b.0))
            .map(|(c, p)| (c, p))
    }

    pub fn into_vec(self) -> Vec<(CostVec<C>, P)> {
        self.members
    }
}

impl<C: CostScalar, P> FromIterator<(CostVec<C>, P)> for NdSet<C, P> {
    fn from_iter<I: IntoIterator<Item = (CostVec<C>, P)>>(iter: I) -> Self {
        let mut set = NdSet::new();
        for (c, p) in iter {
            set.insert(c, p);
        }
        set
    }
}

impl<C: CostScalar> FromIterator<CostVec<C>> for NdSet<C, ()> {
    fn from_iter<I: IntoIterator<Item = CostVec<C>>>(iter: I) -> Self {
        iter.into_iter().map(|c| (c, ())).collect()
    }
}
