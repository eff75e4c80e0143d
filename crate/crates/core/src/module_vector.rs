//! Elements of a permutation module M^λ, in either the matrix basis [M] or
//! the idempotent basis e_L of each batch.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flag::{FlagSpace, Label};
use crate::scalar::Scalar;
use crate::tableau::TwoRowTableau;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Matrix,
    Idempotent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector<S> {
    pub basis: Basis,
    pub terms: BTreeMap<Label, S>,
}

impl<S: Scalar> ModuleVector<S> {
    pub fn zero(basis: Basis) -> Self {
        ModuleVector { basis, terms: BTreeMap::new() }
    }

    pub fn basis_vector(basis: Basis, l: Label) -> Self {
        let mut v = Self::zero(basis);
        v.terms.insert(l, S::one());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, l: Label) -> S {
        self.terms.get(&l).cloned().unwrap_or_else(S::zero)
    }

    pub fn add_term(&mut self, l: Label, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&l) {
            Some(x) => {
                let s = x.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&l);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(l, c);
            }
        }
    }

    /// `self += c * other`; both must use the same basis.
    pub fn axpy(&mut self, c: &S, other: &ModuleVector<S>) {
        assert_eq!(self.basis, other.basis, "mixing bases");
        for (&l, x) in &other.terms {
            self.add_term(l, c.clone() * x.clone());
        }
    }

    pub fn scaled(&self, c: &S) -> Self {
        let mut out = Self::zero(self.basis);
        out.axpy(c, self);
        out
    }

    /// Batches with a nonzero component, in increasing order.
    pub fn batches(&self) -> Vec<u32> {
        let mut b: Vec<u32> = self.terms.keys().map(|l| l.batch).collect();
        b.dedup();
        b
    }

    /// Component in one batch.
    pub fn restrict(&self, batch: u32) -> Self {
        let terms = self.terms.iter().filter(|(l, _)| l.batch == batch).map(|(&l, x)| (l, x.clone())).collect();
        ModuleVector { basis: self.basis, terms }
    }

    /// The lexicographically last batch tableau with a nonzero component,
    /// and that component (in the vector's own basis).
    pub fn last_and_top(&self, fs: &FlagSpace) -> Result<(TwoRowTableau, ModuleVector<S>)> {
        let last = self.terms.keys().next_back().ok_or(Error::ZeroVector)?.batch;
        Ok((fs.batch(last).tableau.clone(), self.restrict(last)))
    }
}
