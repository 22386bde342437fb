//! Finitely generated abelian groups presented by integer relation
//! matrices, normalized through Smith normal form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::mat::{hnf, hnf_solve, snf, snf_diagonal, Mat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AbGroupError {
    #[error("group has a free part (some invariant factor is zero)")]
    InfiniteGroup,
}

/// Abelian group on `ngens` abstract generators, cut out by the columns of
/// `relations`. Invariant factors are normalized on construction: entries
/// follow the divisibility chain, factors of 1 are dropped, and a 0 entry
/// marks an infinite cyclic summand.
#[derive(Clone, Debug)]
pub struct FinAbGroup {
    pub ngens: usize,
    pub relations: Mat,
    invariants: Vec<BigInt>,
    /// Column HNF of the relation lattice plus pivot rows, for membership.
    rel_hnf: Mat,
    rel_pivots: Vec<usize>,
    pub gens: Option<Vec<String>>,
}

impl FinAbGroup {
    pub fn new(ngens: usize, relations: Mat) -> Self {
        assert_eq!(relations.rows, ngens);
        let s = snf(&relations);
        let diag = snf_diagonal(&s.s);
        let rank = diag.iter().filter(|d| !d.is_zero()).count();
        let mut invariants: Vec<BigInt> =
            diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
        // Free part: one zero per generator not constrained by the lattice.
        for _ in 0..ngens - rank {
            invariants.push(BigInt::zero());
        }
        let (rel_hnf, rel_pivots) = hnf(&relations);
        FinAbGroup { ngens, relations, invariants, rel_hnf, rel_pivots, gens: None }
    }

    pub fn with_gens(mut self, gens: Vec<String>) -> Self {
        assert_eq!(gens.len(), self.ngens);
        self.gens = Some(gens);
        self
    }

    pub fn trivial() -> Self {
        FinAbGroup::new(0, Mat::zeros(0, 0))
    }

    /// Group presented as ⊕ Z/d_i (d_i = 0 meaning Z).
    pub fn from_invariants(ds: &[BigInt]) -> Self {
        let n = ds.len();
        let mut rel = Mat::zeros(n, n);
        for (i, d) in ds.iter().enumerate() {
            rel[(i, i)] = d.clone();
        }
        FinAbGroup::new(n, rel)
    }

    pub fn direct_sum(&self, other: &FinAbGroup) -> FinAbGroup {
        let n = self.ngens + other.ngens;
        let mut rel = Mat::zeros(n, self.relations.cols + other.relations.cols);
        for i in 0..self.ngens {
            for j in 0..self.relations.cols {
                rel[(i, j)] = self.relations[(i, j)].clone();
            }
        }
        for i in 0..other.ngens {
            for j in 0..other.relations.cols {
                rel[(self.ngens + i, self.relations.cols + j)] = other.relations[(i, j)].clone();
            }
        }
        FinAbGroup::new(n, rel)
    }

    /// Nontrivial invariant factors in divisibility order; 0 entries are
    /// infinite cyclic summands.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariants
    }

    pub fn is_finite(&self) -> bool {
        self.invariants.iter().all(|d| !d.is_zero())
    }

    pub fn order(&self) -> Option<BigInt> {
        if !self.is_finite() {
            return None;
        }
        Some(self.invariants.iter().product())
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    /// Number of even invariant factors.
    pub fn two_rank(&self) -> Result<usize, AbGroupError> {
        if !self.is_finite() {
            return Err(AbGroupError::InfiniteGroup);
        }
        Ok(self
            .invariants
            .iter()
            .filter(|d| num_integer::Integer::is_even(*d))
            .count())
    }

    pub fn odd_part_order(&self) -> Result<BigInt, AbGroupError> {
        if !self.is_finite() {
            return Err(AbGroupError::InfiniteGroup);
        }
        let mut acc = BigInt::one();
        for d in &self.invariants {
            let mut m = d.clone();
            while num_integer::Integer::is_even(&m) {
                m /= 2;
            }
            acc *= m;
        }
        Ok(acc)
    }

    pub fn two_part_order(&self) -> Result<BigInt, AbGroupError> {
        Ok(self.order().ok_or(AbGroupError::InfiniteGroup)? / self.odd_part_order()?)
    }

    pub fn is_two_group(&self) -> Result<bool, AbGroupError> {
        Ok(self.odd_part_order()?.is_one())
    }

    /// Quotient by the subgroup generated by the given element vectors
    /// (expressed in this group's generators). The projection map on
    /// generator exponent vectors is the identity.
    pub fn quotient(&self, sub: &[Vec<BigInt>]) -> FinAbGroup {
        let mut extra = Mat::zeros(self.ngens, sub.len());
        for (j, v) in sub.iter().enumerate() {
            assert_eq!(v.len(), self.ngens, "subgroup vector length mismatch");
            extra.set_column(j, v);
        }
        FinAbGroup::new(self.ngens, self.relations.hcat(&extra))
    }

    /// Does the exponent vector represent the identity?
    pub fn element_is_trivial(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.ngens);
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        hnf_solve(&self.rel_hnf, &self.rel_pivots, v).is_some()
    }

    /// Order of the element represented by `v`; None when infinite.
    pub fn element_order(&self, v: &[BigInt]) -> Option<BigInt> {
        assert_eq!(v.len(), self.ngens);
        if v.iter().all(|x| x.is_zero()) {
            return Some(BigInt::one());
        }
        // Solve rel_hnf * y = v over Q on the pivot rows; the least m >= 1
        // with m*v in the lattice is the lcm of the denominators, provided
        // the non-pivot coordinates vanish.
        let h = &self.rel_hnf;
        let mut rem: Vec<BigRational> =
            v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        let mut denlcm = BigInt::one();
        for j in (0..h.cols).rev() {
            let p = self.rel_pivots[j];
            let q = &rem[p] / BigRational::from_integer(h[(p, j)].clone());
            for i in 0..h.rows {
                let t = BigRational::from_integer(h[(i, j)].clone()) * &q;
                rem[i] -= t;
            }
            denlcm = num_integer::Integer::lcm(&denlcm, q.denom());
        }
        if rem.iter().all(|x| x.is_zero()) {
            Some(denlcm)
        } else {
            None
        }
    }
}
