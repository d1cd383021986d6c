//! Finite ordered algebras: the truth-value algebras Ω and the value algebra
//! of every fibre.
//!
//! Elements are canonical indices into the carrier. The order relation is
//! always stored explicitly; meet and join are stored as tables so that the
//! law checker can catch tables that disagree with the order.

mod generators;
mod laws;

pub use generators::{boolean_algebra, boolean_algebra_bounded, builtin, chain, chain2, mo2, o6, DEFAULT_ATOM_BOUND};
pub use laws::check_laws;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an element in a [`FiniteAlgebra`] carrier.
pub type Elem = usize;

/// The declared class of a finite algebra. Determines which laws
/// [`check_laws`] verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraClass {
    Poset,
    BoundedLattice,
    Distributive,
    Heyting,
    Frame,
    Boolean,
    Ortholattice,
    Orthomodular,
}

impl AlgebraClass {
    pub fn name(self) -> &'static str {
        match self {
            AlgebraClass::Poset => "poset",
            AlgebraClass::BoundedLattice => "bounded-lattice",
            AlgebraClass::Distributive => "distributive",
            AlgebraClass::Heyting => "heyting",
            AlgebraClass::Frame => "frame",
            AlgebraClass::Boolean => "boolean",
            AlgebraClass::Ortholattice => "ortholattice",
            AlgebraClass::Orthomodular => "orthomodular",
        }
    }

    /// Whether this class carries an orthocomplement.
    pub fn is_ortho(self) -> bool {
        matches!(
            self,
            AlgebraClass::Boolean | AlgebraClass::Ortholattice | AlgebraClass::Orthomodular
        )
    }

    /// Orthomodular lattices, which includes Boolean algebras.
    pub fn is_orthomodular(self) -> bool {
        matches!(self, AlgebraClass::Boolean | AlgebraClass::Orthomodular)
    }
}

impl fmt::Display for AlgebraClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgebraClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "poset" => AlgebraClass::Poset,
            "bounded-lattice" | "lattice" => AlgebraClass::BoundedLattice,
            "distributive" => AlgebraClass::Distributive,
            "heyting" => AlgebraClass::Heyting,
            "frame" => AlgebraClass::Frame,
            "boolean" => AlgebraClass::Boolean,
            "ortholattice" => AlgebraClass::Ortholattice,
            "orthomodular" => AlgebraClass::Orthomodular,
            other => return Err(Error::Invalid(format!("unknown algebra class `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregateKind {
    Meet,
    Join,
}

/// A finite bounded poset with meet/join tables and optional orthocomplement
/// and implication tables.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlgebraFile", into = "AlgebraFile")]
pub struct FiniteAlgebra {
    labels: Vec<String>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<Elem>>,
    join: Vec<Vec<Elem>>,
    ortho: Option<Vec<Elem>>,
    implication: Option<Vec<Vec<Elem>>>,
    bot: Elem,
    top: Elem,
    class: AlgebraClass,
}

/// On-disk layout of an algebra.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub carrier: Vec<String>,
    pub leq: Vec<Vec<bool>>,
    pub meet: Vec<Vec<Elem>>,
    pub join: Vec<Vec<Elem>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ortho: Option<Vec<Elem>>,
    #[serde(default, rename = "impl", skip_serializing_if = "Option::is_none")]
    pub implication: Option<Vec<Vec<Elem>>>,
    pub bot: Elem,
    pub top: Elem,
    pub class: AlgebraClass,
}

impl TryFrom<AlgebraFile> for FiniteAlgebra {
    type Error = Error;

    fn try_from(f: AlgebraFile) -> Result<Self> {
        FiniteAlgebra::from_tables(f)
    }
}

impl From<FiniteAlgebra> for AlgebraFile {
    fn from(a: FiniteAlgebra) -> Self {
        AlgebraFile {
            carrier: a.labels,
            leq: a.leq,
            meet: a.meet,
            join: a.join,
            ortho: a.ortho,
            implication: a.implication,
            bot: a.bot,
            top: a.top,
            class: a.class,
        }
    }
}

fn check_square<T>(name: &str, rows: &[Vec<T>], n: usize) -> Result<()> {
    if rows.len() != n {
        return Err(Error::structural(name, format!("expected {n} rows, found {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::structural(
                name,
                format!("row {i} has {} entries, expected {n}", row.len()),
            ));
        }
    }
    Ok(())
}

fn check_indices<'a>(name: &str, values: impl IntoIterator<Item = &'a Elem>, n: usize) -> Result<()> {
    if let Some(bad) = values.into_iter().find(|&&v| v >= n) {
        return Err(Error::structural(name, format!("index {bad} out of range for carrier of size {n}")));
    }
    Ok(())
}

impl FiniteAlgebra {
    /// Builds an algebra from explicit tables. Only structural well-formedness
    /// (table shapes and index ranges) is checked here; the algebraic laws are
    /// the business of [`check_laws`].
    pub fn from_tables(f: AlgebraFile) -> Result<Self> {
        let n = f.carrier.len();
        if n == 0 {
            return Err(Error::structural("carrier", "carrier must be non-empty"));
        }
        check_square("leq", &f.leq, n)?;
        check_square("meet", &f.meet, n)?;
        check_square("join", &f.join, n)?;
        check_indices("meet", f.meet.iter().flatten(), n)?;
        check_indices("join", f.join.iter().flatten(), n)?;
        if let Some(o) = &f.ortho {
            if o.len() != n {
                return Err(Error::structural("ortho", format!("expected {n} entries, found {}", o.len())));
            }
            check_indices("ortho", o, n)?;
        }
        if let Some(imp) = &f.implication {
            check_square("impl", imp, n)?;
            check_indices("impl", imp.iter().flatten(), n)?;
        }
        check_indices("bot", [&f.bot], n)?;
        check_indices("top", [&f.top], n)?;
        Ok(FiniteAlgebra {
            labels: f.carrier,
            leq: f.leq,
            meet: f.meet,
            join: f.join,
            ortho: f.ortho,
            implication: f.implication,
            bot: f.bot,
            top: f.top,
            class: f.class,
        })
    }

    /// Builds a lattice from its order relation, deriving meet, join and the
    /// bounds. Fails if some pair lacks a meet or join.
    pub fn from_order(
        labels: Vec<String>,
        leq: Vec<Vec<bool>>,
        ortho: Option<Vec<Elem>>,
        class: AlgebraClass,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::structural("carrier", "carrier must be non-empty"));
        }
        check_square("leq", &leq, n)?;
        let le = |a: Elem, b: Elem| leq[a][b];
        let pick = |kind: AggregateKind, a: Elem, b: Elem| -> Result<Elem> {
            bound_of(n, &le, kind, &[a, b]).ok_or_else(|| Error::Incomplete {
                kind: format!("{kind:?}").to_lowercase(),
                elements: format!("{}, {}", labels[a], labels[b]),
            })
        };
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                meet[a][b] = pick(AggregateKind::Meet, a, b)?;
                join[a][b] = pick(AggregateKind::Join, a, b)?;
            }
        }
        let bot = bound_of(n, &le, AggregateKind::Join, &[]).ok_or_else(|| Error::Incomplete {
            kind: "least element".into(),
            elements: String::new(),
        })?;
        let top = bound_of(n, &le, AggregateKind::Meet, &[]).ok_or_else(|| Error::Incomplete {
            kind: "greatest element".into(),
            elements: String::new(),
        })?;
        FiniteAlgebra::from_tables(AlgebraFile {
            carrier: labels,
            leq,
            meet,
            join,
            ortho,
            implication: None,
            bot,
            top,
            class,
        })
    }

    /// Builds a lattice from a list of covering (or any generating) pairs
    /// `lo ≤ hi`, taking the reflexive-transitive closure.
    pub fn from_covers(
        labels: &[&str],
        covers: &[(Elem, Elem)],
        ortho: Option<Vec<Elem>>,
        class: AlgebraClass,
    ) -> Result<Self> {
        let n = labels.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(lo, hi) in covers {
            leq[lo][hi] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        FiniteAlgebra::from_order(labels.iter().map(|s| s.to_string()).collect(), leq, ortho, class)
    }

    /// Fills in the implication table with the relative pseudo-complement
    /// `max { x | x ∧ a ≤ b }`, failing if it does not exist for some pair.
    pub fn with_derived_implication(mut self) -> Result<Self> {
        let n = self.len();
        let mut imp = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let cands: Vec<Elem> = (0..n).filter(|&x| self.leq(self.meet(x, a), b)).collect();
                imp[a][b] = cands
                    .iter()
                    .copied()
                    .find(|&m| cands.iter().all(|&c| self.leq(c, m)))
                    .ok_or_else(|| Error::Incomplete {
                        kind: "implication".into(),
                        elements: format!("{}, {}", self.labels[a], self.labels[b]),
                    })?;
            }
        }
        self.implication = Some(imp);
        Ok(self)
    }

    pub fn with_class(mut self, class: AlgebraClass) -> Self {
        self.class = class;
        self
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, e: Elem) -> &str {
        &self.labels[e]
    }

    pub fn index_of(&self, label: &str) -> Option<Elem> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn class(&self) -> AlgebraClass {
        self.class
    }

    pub fn bot(&self) -> Elem {
        self.bot
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    #[inline]
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a][b]
    }

    #[inline]
    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a][b]
    }

    #[inline]
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a][b]
    }

    pub fn has_ortho(&self) -> bool {
        self.ortho.is_some()
    }

    #[inline]
    pub fn ortho(&self, a: Elem) -> Option<Elem> {
        self.ortho.as_ref().map(|o| o[a])
    }

    pub fn implies(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.implication.as_ref().map(|t| t[a][b])
    }

    pub(crate) fn ortho_table(&self) -> Option<&[Elem]> {
        self.ortho.as_deref()
    }

    pub(crate) fn implication_table(&self) -> Option<&[Vec<Elem>]> {
        self.implication.as_deref()
    }

    /// Folds the meet table over `items`, starting from top.
    pub fn meet_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items.into_iter().fold(self.top, |acc, e| self.meet(acc, e))
    }

    /// Folds the join table over `items`, starting from bottom.
    pub fn join_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items.into_iter().fold(self.bot, |acc, e| self.join(acc, e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("algebra serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("algebra JSON: {e}")))
    }
}

impl fmt::Debug for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteAlgebra")
            .field("class", &self.class)
            .field("carrier", &self.labels)
            .finish()
    }
}

/// Greatest lower bound (`Meet`) or least upper bound (`Join`) of `items`,
/// computed from the order relation alone.
fn bound_of(n: usize, le: &impl Fn(Elem, Elem) -> bool, kind: AggregateKind, items: &[Elem]) -> Option<Elem> {
    let is_bound = |c: Elem| match kind {
        AggregateKind::Meet => items.iter().all(|&s| le(c, s)),
        AggregateKind::Join => items.iter().all(|&s| le(s, c)),
    };
    let bounds: Vec<Elem> = (0..n).filter(|&c| is_bound(c)).collect();
    bounds.iter().copied().find(|&b| {
        bounds.iter().all(|&c| match kind {
            AggregateKind::Meet => le(c, b),
            AggregateKind::Join => le(b, c),
        })
    })
}

/// Greatest lower bound or least upper bound of an arbitrary subset. The
/// empty meet is top and the empty join is bottom. Computed from the order
/// relation, so it works (and reports failure) on non-lattices too.
pub fn aggregate(a: &FiniteAlgebra, kind: AggregateKind, items: &[Elem]) -> Result<Elem> {
    if let Some(&bad) = items.iter().find(|&&e| e >= a.len()) {
        return Err(Error::Invalid(format!("element index {bad} out of range")));
    }
    bound_of(a.len(), &|x, y| a.leq(x, y), kind, items).ok_or_else(|| Error::Incomplete {
        kind: format!("{kind:?}").to_lowercase(),
        elements: items.iter().map(|&e| a.label(e)).collect::<Vec<_>>().join(", "),
    })
}

/// First triple `(x, y, z)` in lexicographic index order with
/// `x ∧ (y ∨ z) ≠ (x ∧ y) ∨ (x ∧ z)`.
pub fn find_distributivity_counterexample(a: &FiniteAlgebra) -> Option<(Elem, Elem, Elem)> {
    let n = a.len();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let lhs = a.meet(x, a.join(y, z));
                let rhs = a.join(a.meet(x, y), a.meet(x, z));
                if lhs != rhs {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

/// Searches for an order isomorphism `a → b` (which then preserves meets and
/// joins). With `respect_ortho`, the map must also commute with the
/// orthocomplements. Returns the image of each element of `a`.
pub fn find_isomorphism(a: &FiniteAlgebra, b: &FiniteAlgebra, respect_ortho: bool) -> Option<Vec<Elem>> {
    let n = a.len();
    if n != b.len() || (respect_ortho && (a.has_ortho() != b.has_ortho())) {
        return None;
    }
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        i: usize,
        a: &FiniteAlgebra,
        b: &FiniteAlgebra,
        respect_ortho: bool,
        image: &mut Vec<Elem>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = a.len();
        if i == n {
            return true;
        }
        for cand in 0..n {
            if used[cand] {
                continue;
            }
            let consistent = (0..i).all(|j| {
                a.leq(i, j) == b.leq(cand, image[j]) && a.leq(j, i) == b.leq(image[j], cand)
            }) && a.leq(i, i) == b.leq(cand, cand);
            if !consistent {
                continue;
            }
            if respect_ortho {
                let oi = a.ortho(i).unwrap();
                let oc = b.ortho(cand).unwrap();
                if oi < i && image[oi] != oc {
                    continue;
                }
                if oi == i && oc != cand {
                    continue;
                }
            }
            image[i] = cand;
            used[cand] = true;
            if extend(i + 1, a, b, respect_ortho, image, used) {
                return true;
            }
            used[cand] = false;
            image[i] = usize::MAX;
        }
        false
    }

    if extend(0, a, b, respect_ortho, &mut image, &mut used) {
        Some(image)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_examples() {
        let m = mo2();
        let a = m.index_of("a").unwrap();
        let a_ = m.index_of("a'").unwrap();
        assert_eq!(aggregate(&m, AggregateKind::Meet, &[a, a_]).unwrap(), m.bot());
        assert_eq!(aggregate(&m, AggregateKind::Join, &[]).unwrap(), m.bot());
        assert_eq!(aggregate(&m, AggregateKind::Meet, &[]).unwrap(), m.top());

        let b2 = boolean_algebra(2).unwrap();
        let atom1 = b2.index_of("{1}").unwrap();
        let atom2 = b2.index_of("{2}").unwrap();
        assert_eq!(aggregate(&b2, AggregateKind::Join, &[atom1, atom2]).unwrap(), b2.top());
    }

    #[test]
    fn aggregate_is_greatest_lower_bound_by_enumeration() {
        for alg in [mo2(), o6(), boolean_algebra(3).unwrap(), chain(4).unwrap()] {
            let n = alg.len();
            // every subset of size <= 3
            for mask in 0u32..(1 << n) {
                if mask.count_ones() > 3 {
                    continue;
                }
                let s: Vec<Elem> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                let m = aggregate(&alg, AggregateKind::Meet, &s).unwrap();
                assert!(s.iter().all(|&x| alg.leq(m, x)));
                for lb in 0..n {
                    if s.iter().all(|&x| alg.leq(lb, x)) {
                        assert!(alg.leq(lb, m));
                    }
                }
                assert_eq!(m, alg.meet_all(s.iter().copied()));
                let j = aggregate(&alg, AggregateKind::Join, &s).unwrap();
                assert_eq!(j, alg.join_all(s.iter().copied()));
            }
        }
    }

    #[test]
    fn aggregate_reports_incomplete_non_lattice() {
        // two incomparable maximal elements above a bottom: no top
        let leq = vec![
            vec![true, true, true],
            vec![false, true, false],
            vec![false, false, true],
        ];
        let alg = FiniteAlgebra::from_tables(AlgebraFile {
            carrier: vec!["0".into(), "p".into(), "q".into()],
            leq,
            meet: vec![vec![0; 3]; 3],
            join: vec![vec![0; 3]; 3],
            ortho: None,
            implication: None,
            bot: 0,
            top: 1,
            class: AlgebraClass::Poset,
        })
        .unwrap();
        let err = aggregate(&alg, AggregateKind::Join, &[1, 2]).unwrap_err();
        assert!(matches!(err, Error::Incomplete { .. }));
    }

    #[test]
    fn from_order_rejects_non_lattice() {
        let leq = vec![
            vec![true, true, true],
            vec![false, true, false],
            vec![false, false, true],
        ];
        let err = FiniteAlgebra::from_order(
            vec!["0".into(), "p".into(), "q".into()],
            leq,
            None,
            AlgebraClass::BoundedLattice,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Incomplete { .. }));
    }

    #[test]
    fn distributivity_counterexamples() {
        assert_eq!(find_distributivity_counterexample(&boolean_algebra(3).unwrap()), None);
        let m = mo2();
        let (x, y, z) = find_distributivity_counterexample(&m).unwrap();
        assert_ne!(m.meet(x, m.join(y, z)), m.join(m.meet(x, y), m.meet(x, z)));
        // lexicographically first under the carrier order 0, a, a', b, b', 1
        assert_eq!(
            (m.label(x), m.label(y), m.label(z)),
            ("a", "a'", "b")
        );
        // (a, b, b') is also a witness: a ∧ (b ∨ b') = a, (a ∧ b) ∨ (a ∧ b') = 0
        let (a, b, b_) = (1, 3, 4);
        assert_eq!(m.meet(a, m.join(b, b_)), a);
        assert_eq!(m.join(m.meet(a, b), m.meet(a, b_)), m.bot());
    }

    #[test]
    fn structural_errors_name_the_table() {
        let mut f: AlgebraFile = mo2().into();
        f.meet.pop();
        match FiniteAlgebra::from_tables(f).unwrap_err() {
            Error::Structural { table, .. } => assert_eq!(table, "meet"),
            e => panic!("unexpected {e}"),
        }
        let mut f: AlgebraFile = mo2().into();
        f.ortho = Some(vec![0, 1, 2]);
        match FiniteAlgebra::from_tables(f).unwrap_err() {
            Error::Structural { table, .. } => assert_eq!(table, "ortho"),
            e => panic!("unexpected {e}"),
        }
        let mut f: AlgebraFile = mo2().into();
        f.join[2][2] = 17;
        match FiniteAlgebra::from_tables(f).unwrap_err() {
            Error::Structural { table, .. } => assert_eq!(table, "join"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn json_round_trip_and_layout() {
        let m = mo2();
        let text = m.to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["class"], "orthomodular");
        assert_eq!(v["carrier"].as_array().unwrap().len(), 6);
        assert!(v.get("impl").is_none());
        assert_eq!(FiniteAlgebra::from_json(&text).unwrap(), m);

        let b = boolean_algebra(1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&b.to_json()).unwrap();
        assert!(v.get("impl").is_some());
    }

    #[test]
    fn isomorphism_search() {
        assert!(find_isomorphism(&mo2(), &mo2(), true).is_some());
        assert!(find_isomorphism(&mo2(), &o6(), false).is_none());
        assert!(find_isomorphism(&boolean_algebra(1).unwrap(), &chain2(), true).is_some());
        // chain(4) and boolean(2) have the same size but different shape
        assert!(find_isomorphism(&chain(4).unwrap(), &boolean_algebra(2).unwrap(), false).is_none());
    }
}
