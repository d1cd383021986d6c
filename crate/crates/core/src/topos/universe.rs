use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use super::Per;
use crate::algebra::{Elem, FiniteAlgebra};
use crate::base::all_tables;
use crate::error::{Error, Result};

/// A set with Ω-valued equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSet {
    pub carrier: Vec<String>,
    /// `eq[i][j]`, symmetric and transitive in Ω.
    pub eq: Vec<Vec<Elem>>,
}

impl QSet {
    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn diagonal(&self) -> Vec<Elem> {
        (0..self.len()).map(|i| self.eq[i][i]).collect()
    }
}

pub fn per_to_qset(p: &Per) -> QSet {
    let n = p.len();
    QSet {
        carrier: p.over().labels().to_vec(),
        eq: (0..n).map(|x| (0..n).map(|y| p.at(x, y)).collect()).collect(),
    }
}

/// An Ω-valued set: a finite map from earlier-stage elements to Ω.
/// Ordered by rank, then by entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VElement {
    rank: usize,
    entries: BTreeMap<VElement, Elem>,
}

impl VElement {
    pub fn empty() -> Self {
        VElement { rank: 0, entries: BTreeMap::new() }
    }

    /// Rank is one more than the largest key rank, or 0 for the empty map.
    pub fn new(entries: BTreeMap<VElement, Elem>) -> Self {
        let rank = entries.keys().map(|k| k.rank + 1).max().unwrap_or(0);
        VElement { rank, entries }
    }

    /// `î = {ĵ ↦ top | j < i}`, of rank `i`.
    pub fn numeral(i: usize, top: Elem) -> Self {
        let mut current = VElement::empty();
        let mut prefix = Vec::with_capacity(i);
        for _ in 0..i {
            prefix.push(current);
            current = VElement::new(prefix.iter().map(|k| (k.clone(), top)).collect());
        }
        current
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entries(&self) -> &BTreeMap<VElement, Elem> {
        &self.entries
    }

    pub fn get(&self, key: &VElement) -> Option<Elem> {
        self.entries.get(key).copied()
    }

    pub fn to_json(&self, omega: &FiniteAlgebra) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(k, &v)| json!({ "key": k.to_json(omega), "value": omega.label(v) }))
            .collect();
        json!({ "rank": self.rank, "entries": entries })
    }
}

/// `{î ↦ eq(x_i, x_i)}` in carrier order. Off-diagonal equality is not encoded.
pub fn qset_to_v(q: &QSet, top: Elem) -> VElement {
    VElement::new(
        q.diagonal()
            .into_iter()
            .enumerate()
            .map(|(i, e)| (VElement::numeral(i, top), e))
            .collect(),
    )
}

/// The stages `V_0 ⊆ V_1 ⊆ … ⊆ V_r`, each sorted.
#[derive(Debug, Clone)]
pub struct VUniverse {
    pub stages: Vec<Vec<VElement>>,
}

impl VUniverse {
    pub fn counts(&self) -> Vec<usize> {
        self.stages.iter().map(Vec::len).collect()
    }

    pub fn to_json(&self, omega: &FiniteAlgebra) -> Value {
        let stages: Vec<Value> = self
            .stages
            .iter()
            .enumerate()
            .map(|(a, s)| json!({ "stage": a, "count": s.len(), "elements": s.iter().map(|v| v.to_json(omega)).collect::<Vec<_>>() }))
            .collect();
        json!({ "omega": omega.labels(), "stages": stages })
    }
}

/// Enumerates `V_0..=V_max_rank`, where `V_0 = {∅}` and `V_{α+1}` is every
/// partial map from `V_α` into Ω. Fails before enumerating if any stage would
/// exceed `cap` elements.
pub fn v_build(omega: &FiniteAlgebra, max_rank: usize, cap: usize) -> Result<VUniverse> {
    let counts = v_count(omega, max_rank)?;
    if let Some(big) = counts.iter().find(|c| c.to_usize().map_or(true, |c| c > cap)) {
        return Err(Error::capacity("V stage", big.to_u128().unwrap_or(u128::MAX), cap as u128));
    }
    let mut stages = vec![vec![VElement::empty()]];
    for _ in 0..max_rank {
        let prev = stages.last().expect("stage 0 present");
        let mut next: Vec<VElement> = all_tables(prev.len(), omega.len() + 1)
            .map(|choice| {
                VElement::new(
                    prev.iter()
                        .zip(&choice)
                        .filter(|(_, &c)| c > 0)
                        .map(|(k, &c)| (k.clone(), c - 1))
                        .collect(),
                )
            })
            .collect();
        next.sort();
        stages.push(next);
    }
    Ok(VUniverse { stages })
}

/// Largest exponent `v_count` will evaluate.
const MAX_EXPONENT: u32 = 1 << 20;

/// `|V_0| = 1`, `|V_{α+1}| = (1 + |Ω|)^{|V_α|}`.
pub fn v_count(omega: &FiniteAlgebra, max_rank: usize) -> Result<Vec<BigUint>> {
    let base = BigUint::from(omega.len() + 1);
    let mut out = vec![BigUint::one()];
    for _ in 0..max_rank {
        let prev = out.last().expect("stage 0 present");
        let exp = prev
            .to_u32()
            .filter(|&e| e <= MAX_EXPONENT)
            .ok_or_else(|| Error::capacity("V count exponent", prev.to_u128().unwrap_or(u128::MAX), MAX_EXPONENT as u128))?;
        out.push(base.pow(exp));
    }
    Ok(out)
}
