//! Exact linear algebra over a field of scalars: reduced row-echelon forms and
//! subspaces of `T^d` with the standard inner product.
//!
//! Generic over the scalar so that the same code runs on `Ratio<i64>` for
//! small inputs and on big rationals when entries grow.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::Neg;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed};

/// An exact field. Equality must be decidable and syntactic on canonical
/// forms, so floating point types are deliberately not implementors.
pub trait Field: Clone + Eq + Ord + Hash + Debug + Display + Num + Neg<Output = Self> {}

impl<I> Field for Ratio<I> where I: Integer + Signed + Clone + Hash + Debug + Display {}

/// Reduces `rows` (each of length `d`) to reduced row-echelon form, dropping
/// zero rows. The result is the canonical basis of the row space.
pub fn rref<T: Field>(mut rows: Vec<Vec<T>>, d: usize) -> Vec<Vec<T>> {
    let mut pivot_row = 0;
    for col in 0..d {
        let Some(found) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let inv = T::one() / rows[pivot_row][col].clone();
        for v in rows[pivot_row].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for r in 0..rows.len() {
            if r == pivot_row || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for c in 0..d {
                let delta = factor.clone() * rows[pivot_row][c].clone();
                rows[r][c] = rows[r][c].clone() - delta;
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.truncate(pivot_row);
    rows
}

/// Rank of a list of vectors.
pub fn rank<T: Field>(rows: &[Vec<T>], d: usize) -> usize {
    rref(rows.to_vec(), d).len()
}

pub fn dot<T: Field>(u: &[T], v: &[T]) -> T {
    u.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

/// A subspace of `T^d`, stored by its reduced row-echelon basis so that two
/// subspaces are equal iff their representations are.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace<T> {
    dim: usize,
    basis: Vec<Vec<T>>,
}

impl<T: Field> Subspace<T> {
    pub fn zero(dim: usize) -> Self {
        Subspace { dim, basis: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        Subspace { dim, basis }
    }

    /// Span of `vectors`. Panics if a vector has the wrong length.
    pub fn span(dim: usize, vectors: Vec<Vec<T>>) -> Self {
        assert!(vectors.iter().all(|v| v.len() == dim), "vector length must equal the ambient dimension");
        Subspace {
            dim,
            basis: rref(vectors, dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<T>] {
        &self.basis
    }

    /// Vector-space sum.
    pub fn join(&self, other: &Self) -> Self {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::span(self.dim, rows)
    }

    /// Orthogonal complement: the null space of the basis matrix.
    pub fn ortho(&self) -> Self {
        let d = self.dim;
        let mut pivots = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            pivots.push(row.iter().position(|x| !x.is_zero()).expect("rref rows are non-zero"));
        }
        let free = (0..d).filter(|c| !pivots.contains(c));
        let null = free
            .map(|f| {
                let mut v = vec![T::zero(); d];
                v[f] = T::one();
                for (row, &p) in self.basis.iter().zip(&pivots) {
                    v[p] = -row[f].clone();
                }
                v
            })
            .collect();
        Subspace::span(d, null)
    }

    /// Intersection, via `V ∩ W = (V' + W')'`. Valid because the standard
    /// inner product is anisotropic over an ordered field.
    pub fn meet(&self, other: &Self) -> Self {
        self.ortho().join(&other.ortho()).ortho()
    }

    pub fn contains_vector(&self, v: &[T]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rank(&rows, self.dim) == self.rank()
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.basis.iter().all(|v| other.contains_vector(v))
    }

    /// Human-readable label: `0`, `Q^d`, `span(1,0)` or `span((1,0,0),(0,0,1))`.
    pub fn label(&self) -> String {
        let fmt_vec = |v: &Vec<T>| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self.rank() {
            0 => "0".to_string(),
            r if r == self.dim => format!("Q^{}", self.dim),
            1 => format!("span({})", fmt_vec(&self.basis[0])),
            _ => format!(
                "span({})",
                self.basis.iter().map(|v| format!("({})", fmt_vec(v))).collect::<Vec<_>>().join(",")
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    use num_traits::Zero;

    type Q64 = Ratio<i64>;

    fn q(n: i64) -> Q64 {
        Q64::from_integer(n)
    }

    fn qv(xs: &[i64]) -> Vec<Q64> {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn rref_is_canonical() {
        let a = Subspace::span(2, vec![qv(&[2, 2])]);
        let b = Subspace::span(2, vec![qv(&[-3, -3])]);
        assert_eq!(a, b);
        assert_eq!(a.basis(), &[qv(&[1, 1])]);
        let c = Subspace::span(3, vec![qv(&[1, 2, 3]), qv(&[2, 4, 6]), qv(&[0, 1, 1])]);
        assert_eq!(c.rank(), 2);
        assert_eq!(c.basis(), &[qv(&[1, 0, 1]), qv(&[0, 1, 1])]);
    }

    #[test]
    fn ortho_examples() {
        let x = Subspace::span(2, vec![qv(&[1, 0])]);
        assert_eq!(x.ortho(), Subspace::span(2, vec![qv(&[0, 1])]));
        let d = Subspace::span(2, vec![qv(&[1, 1])]);
        assert_eq!(d.ortho(), Subspace::span(2, vec![qv(&[1, -1])]));
        assert_eq!(Subspace::<Q64>::zero(3).ortho(), Subspace::full(3));
        assert_eq!(Subspace::<Q64>::full(3).ortho(), Subspace::zero(3));
    }

    #[test]
    fn labels() {
        assert_eq!(Subspace::span(2, vec![qv(&[1, -1])]).label(), "span(1,-1)");
        assert_eq!(Subspace::<Q64>::full(2).label(), "Q^2");
        assert_eq!(Subspace::<Q64>::zero(2).label(), "0");
        let half = Subspace::span(2, vec![vec![q(2), q(1)]]);
        assert_eq!(half.label(), "span(1,1/2)");
    }

    #[test]
    fn works_with_big_rationals() {
        let v: Vec<Rational> = vec![Rational::from_integer(3.into()), Rational::from_integer(6.into())];
        let s = Subspace::span(2, vec![v]);
        assert_eq!(s.label(), "span(1,2)");
        assert_eq!(s.ortho().label(), "span(1,-1/2)");
    }

    fn arb_vectors(d: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-3i64..=3, d), 0..=d)
    }

    proptest! {
        #[test]
        fn prop_ortho_dimension_and_orthogonality(rows in arb_vectors(3)) {
            let v = Subspace::span(3, rows.iter().map(|r| qv(r)).collect());
            let w = v.ortho();
            prop_assert_eq!(v.rank() + w.rank(), 3);
            for a in v.basis() {
                for b in w.basis() {
                    prop_assert!(dot(a, b).is_zero());
                }
            }
            prop_assert_eq!(w.ortho(), v);
        }

        #[test]
        fn prop_meet_matches_dimension_formula(r1 in arb_vectors(3), r2 in arb_vectors(3)) {
            let v = Subspace::span(3, r1.iter().map(|r| qv(r)).collect());
            let w = Subspace::span(3, r2.iter().map(|r| qv(r)).collect());
            let m = v.meet(&w);
            let j = v.join(&w);
            // Grassmann: dim(V ∩ W) = dim V + dim W - dim(V + W)
            prop_assert_eq!(m.rank() + j.rank(), v.rank() + w.rank());
            for b in m.basis() {
                prop_assert!(v.contains_vector(b) && w.contains_vector(b));
            }
            prop_assert!(m.is_subspace_of(&v) && m.is_subspace_of(&w));
            prop_assert!(v.is_subspace_of(&j) && w.is_subspace_of(&j));
        }
    }
}
