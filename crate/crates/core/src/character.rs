//! Linear characters of the diamond groups and the idempotent basis.
//!
//! For a batch with free positions J, χ_L(M) = ∏ θ(l_j m_j) where
//! θ(α) = ζ_p^{Tr(α)}. The idempotent of L is
//! e_L = q^{-|J|} Σ_M χ_L(−M) [M], and conversely [M] = Σ_K χ_K(M) e_K.
//! Base changes use a fast transform that applies the q×q kernel
//! θ(k·m) along one free coordinate at a time.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::cyclotomic::{Root, RootRing};
use crate::field::{Fq, GaloisField};
use crate::flag::{Batch, FlagSpace, Label};
use crate::module_vector::{Basis, ModuleVector};
use crate::Cyc;

/// Deliberate corruption used to check that the verification suite notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// θ(α) is replaced by −θ(α).
    NegatedTheta,
}

#[derive(Debug, Clone)]
pub struct Characters {
    field: Arc<GaloisField>,
    theta: Vec<Root>,
    fault: Fault,
}

impl Characters {
    pub fn new(field: Arc<GaloisField>) -> Self {
        Self::with_fault(field, Fault::None)
    }

    pub fn with_fault(field: Arc<GaloisField>, fault: Fault) -> Self {
        let p = field.p();
        let theta = field
            .elements()
            .map(|a| {
                let r = Root::zeta_pow(p, field.trace(a));
                Root { neg: fault == Fault::NegatedTheta, ..r }
            })
            .collect();
        Characters { field, theta, fault }
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn q(&self) -> u64 {
        self.field.q() as u64
    }

    pub fn fault(&self) -> Fault {
        self.fault
    }

    #[inline]
    pub fn theta(&self, a: Fq) -> Root {
        self.theta[a.index()]
    }

    pub fn theta_value(&self, a: Fq) -> Cyc {
        Cyc::from_root(self.theta(a))
    }

    /// χ_L(M) for digit vectors of one batch.
    pub fn chi(&self, l: &[Fq], m: &[Fq]) -> Root {
        l.iter().zip(m).fold(Root::one(self.p()), |acc, (&a, &b)| acc.mul(self.theta(self.field.mul(a, b))))
    }

    /// χ_L(−M).
    pub fn chi_neg(&self, l: &[Fq], m: &[Fq]) -> Root {
        l.iter()
            .zip(m)
            .fold(Root::one(self.p()), |acc, (&a, &b)| acc.mul(self.theta(self.field.neg(self.field.mul(a, b)))))
    }

    /// In place: `data[k] ← Σ_m θ(±k·m) data[m]` along every coordinate,
    /// where `data` is indexed by member keys of a batch with `dim` free
    /// positions. With `negate = false` this maps matrix-basis coefficients
    /// to idempotent-basis coefficients; with `negate = true` it is the
    /// inverse up to the factor q^{dim}.
    pub fn transform<R: RootRing>(&self, dim: usize, data: &mut [R], negate: bool) {
        let q = self.q() as usize;
        let p = self.p();
        debug_assert_eq!(data.len(), q.pow(dim as u32));
        let kernel: Vec<Vec<Root>> = (0..q)
            .map(|k| {
                (0..q)
                    .map(|m| {
                        let x = self.field.mul(Fq(k as u8), Fq(m as u8));
                        self.theta(if negate { self.field.neg(x) } else { x })
                    })
                    .collect()
            })
            .collect();
        let mut buf: Vec<R> = (0..q).map(|_| R::zero_for(p)).collect();
        for axis in 0..dim {
            let stride = q.pow((dim - 1 - axis) as u32);
            let block = stride * q;
            for base in (0..data.len()).step_by(block) {
                for off in 0..stride {
                    for (k, slot) in buf.iter_mut().enumerate() {
                        let mut acc = R::zero_for(p);
                        for (mi, &r) in kernel[k].iter().enumerate() {
                            let x = &data[base + off + mi * stride];
                            if !x.is_zero_elem() {
                                acc.add_assign_elem(&x.mul_root(r));
                            }
                        }
                        *slot = acc;
                    }
                    for (k, slot) in buf.iter_mut().enumerate() {
                        std::mem::swap(&mut data[base + off + k * stride], slot);
                    }
                }
            }
        }
    }

    /// e_L written in the matrix basis.
    pub fn idempotent(&self, fs: &FlagSpace, l: Label) -> ModuleVector<Cyc> {
        let b = fs.batch(l.batch);
        let scale = inv_q_pow(self.q(), b.dim());
        let ld = b.digits(l.key);
        let mut v = ModuleVector::zero(Basis::Matrix);
        for key in b.keys() {
            let r = self.chi_neg(&ld, &b.digits(key));
            v.add_term(Label { batch: l.batch, key }, Cyc::from_root(r) * scale.clone());
        }
        v
    }

    /// Change any vector to the idempotent basis (identity if already there).
    pub fn to_idempotent(&self, fs: &FlagSpace, v: &ModuleVector<Cyc>) -> ModuleVector<Cyc> {
        match v.basis {
            Basis::Idempotent => v.clone(),
            Basis::Matrix => self.convert(fs, v, false),
        }
    }

    /// Change any vector to the matrix basis (identity if already there).
    pub fn to_matrix(&self, fs: &FlagSpace, v: &ModuleVector<Cyc>) -> ModuleVector<Cyc> {
        match v.basis {
            Basis::Matrix => v.clone(),
            Basis::Idempotent => self.convert(fs, v, true),
        }
    }

    fn convert(&self, fs: &FlagSpace, v: &ModuleVector<Cyc>, to_matrix: bool) -> ModuleVector<Cyc> {
        let mut out = ModuleVector::zero(if to_matrix { Basis::Matrix } else { Basis::Idempotent });
        for batch in v.batches() {
            let b = fs.batch(batch);
            let mut data = vec![Cyc::zero(); b.size as usize];
            for (l, x) in v.terms.range(Label { batch, key: 0 }..=Label { batch, key: u64::MAX }) {
                data[l.key as usize] = x.clone();
            }
            self.transform(b.dim(), &mut data, to_matrix);
            let scale = if to_matrix { inv_q_pow(self.q(), b.dim()) } else { Cyc::from_int(1) };
            for (key, x) in data.into_iter().enumerate() {
                if !x.is_zero() {
                    out.terms.insert(Label { batch, key: key as u64 }, x * scale.clone());
                }
            }
        }
        out
    }

    /// Reference base change by explicit character sums, O(|batch|^2).
    pub fn to_idempotent_direct(&self, fs: &FlagSpace, v: &ModuleVector<Cyc>) -> ModuleVector<Cyc> {
        assert_eq!(v.basis, Basis::Matrix);
        let mut out = ModuleVector::zero(Basis::Idempotent);
        for (&l, x) in &v.terms {
            let b: &Batch = fs.batch(l.batch);
            let md = b.digits(l.key);
            for key in b.keys() {
                let r = self.chi(&b.digits(key), &md);
                out.add_term(Label { batch: l.batch, key }, x.clone() * Cyc::from_root(r));
            }
        }
        out
    }
}

/// q^{-d} as an exact rational.
pub fn inv_q_pow(q: u64, d: usize) -> Cyc {
    Cyc::from_ratio(BigInt::from(1), BigInt::from(q).pow(d as u32)).expect("q > 0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn setup(n: usize, m: usize, q: u64) -> (FlagSpace, Characters) {
        let f = Arc::new(GaloisField::new(q).unwrap());
        (FlagSpace::new(n, m, f.clone(), u64::MAX).unwrap(), Characters::new(f))
    }

    #[test]
    fn gf4_theta_signs() {
        let f = Arc::new(GaloisField::new(4).unwrap());
        let c = Characters::new(f);
        assert_eq!(c.theta_value(Fq(1)), Cyc::from_int(1));
        assert_eq!(c.theta_value(Fq(2)), Cyc::from_int(-1));
    }

    #[test]
    fn theta_is_a_homomorphism() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16] {
            let f = Arc::new(GaloisField::new(q).unwrap());
            let c = Characters::new(f.clone());
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(c.theta(f.add(a, b)), c.theta(a).mul(c.theta(b)));
                }
            }
            // non-trivial: sums over the field vanish
            let mut s = Cyc::zero();
            for a in f.elements() {
                s = s + c.theta_value(a);
            }
            assert!(s.is_zero());
        }
    }

    #[test]
    fn idempotent_of_zero_label_in_gf4() {
        let (fs, c) = setup(3, 1, 4);
        let batch = fs.batch_index(&[2]).unwrap();
        let e = c.idempotent(&fs, Label { batch, key: 0 });
        assert_eq!(e.terms.len(), 4);
        for x in e.terms.values() {
            assert_eq!(*x, Cyc::from_ratio(1.into(), 4.into()).unwrap());
        }
    }

    #[test]
    fn idempotents_are_orthogonal() {
        // convolution in the diamond group algebra: e_L * e_K = δ e_L
        let (fs, c) = setup(4, 2, 3);
        let batch = fs.batch_index(&[2, 4]).unwrap();
        let b = fs.batch(batch);
        let conv = |x: &ModuleVector<Cyc>, y: &ModuleVector<Cyc>| {
            let mut out = ModuleVector::zero(Basis::Matrix);
            for (&a, u) in &x.terms {
                for (&bb, w) in &y.terms {
                    out.add_term(fs.diamond_add(a, bb).unwrap(), u.clone() * w.clone());
                }
            }
            out
        };
        for k1 in [0u64, 4, 13] {
            for k2 in [0u64, 4, 13] {
                let e1 = c.idempotent(&fs, Label { batch, key: k1 });
                let e2 = c.idempotent(&fs, Label { batch, key: k2 });
                let prod = conv(&e1, &e2);
                if k1 == k2 {
                    assert_eq!(prod, e1);
                } else {
                    assert!(prod.is_zero());
                }
            }
        }
        // the idempotents sum to the identity [0]
        let mut sum = ModuleVector::zero(Basis::Matrix);
        for key in b.keys() {
            sum.axpy(&Cyc::one(), &c.idempotent(&fs, Label { batch, key }));
        }
        assert_eq!(sum, ModuleVector::basis_vector(Basis::Matrix, Label { batch, key: 0 }));
    }

    proptest! {
        #[test]
        fn fast_equals_direct_and_roundtrips(seed in any::<u64>(), qi in 0usize..3) {
            let q = [2u64, 3, 4][qi];
            let (fs, c) = setup(4, 2, q);
            let mut v = ModuleVector::zero(Basis::Matrix);
            let mut s = seed;
            for _ in 0..6 {
                let l = fs.label_at((s % fs.len()) as usize);
                v.add_term(l, Cyc::from_int((s % 7) as i64 - 3));
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            }
            let fast = c.to_idempotent(&fs, &v);
            prop_assert_eq!(&fast, &c.to_idempotent_direct(&fs, &v));
            prop_assert_eq!(c.to_matrix(&fs, &fast), v);
        }

        #[test]
        fn idempotent_converts_to_basis_vector(seed in any::<u64>()) {
            let (fs, c) = setup(4, 2, 3);
            let l = fs.label_at((seed % fs.len()) as usize);
            let e = c.idempotent(&fs, l);
            prop_assert_eq!(c.to_idempotent(&fs, &e), ModuleVector::basis_vector(Basis::Idempotent, l));
        }
    }
}
