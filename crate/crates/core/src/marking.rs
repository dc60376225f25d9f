//! Multisets over places.
//!
//! A [`Marking`] stores only nonzero counts, so two markings are equal exactly
//! when they agree on every place. All arithmetic follows the usual bag
//! definitions: `+` adds counts, `-` subtracts them (and fails on underflow),
//! `<=` compares entry-wise, and `scale(k, m)` is the sum of `k` copies of `m`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use thiserror::Error;

use crate::net::NodeId;

/// Raised when subtracting a bag that is not contained in the minuend.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot subtract {subtrahend} from {minuend}")]
pub struct Underflow {
    pub minuend: Marking,
    pub subtrahend: Marking,
}

/// A bag of tokens over places.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking {
    counts: BTreeMap<NodeId, u32>,
}

impl Marking {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The bag holding one token on every place of `places`.
    pub fn from_set<'a>(places: impl IntoIterator<Item = &'a NodeId>) -> Self {
        places.into_iter().map(|p| (p.clone(), 1)).collect()
    }

    pub fn get(&self, place: &NodeId) -> u32 {
        self.counts.get(place).copied().unwrap_or(0)
    }

    /// Sets the count of `place`, dropping the entry when `count` is zero.
    pub fn set(&mut self, place: NodeId, count: u32) {
        if count == 0 {
            self.counts.remove(&place);
        } else {
            self.counts.insert(place, count);
        }
    }

    pub fn add_tokens(&mut self, place: &NodeId, count: u32) {
        if count > 0 {
            *self.counts.entry(place.clone()).or_insert(0) += count;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `|m|`, the total number of tokens.
    pub fn size(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }

    /// Places with a nonzero count, in sorted order.
    pub fn support(&self) -> impl Iterator<Item = &NodeId> {
        self.counts.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, u32)> {
        self.counts.iter().map(|(p, &c)| (p, c))
    }

    pub fn sum(&self, other: &Marking) -> Marking {
        let mut out = self.clone();
        for (p, c) in other.iter() {
            out.add_tokens(p, c);
        }
        out
    }

    pub fn checked_sub(&self, other: &Marking) -> Result<Marking, Underflow> {
        if !other.leq(self) {
            return Err(Underflow { minuend: self.clone(), subtrahend: other.clone() });
        }
        let mut out = self.clone();
        for (p, c) in other.iter() {
            let left = out.get(p) - c;
            out.set(p.clone(), left);
        }
        Ok(out)
    }

    /// Entry-wise `self <= other`.
    pub fn leq(&self, other: &Marking) -> bool {
        self.iter().all(|(p, c)| other.get(p) >= c)
    }

    /// `k.m`: the sum of `k` copies of `m`.
    pub fn scale(&self, k: u32) -> Marking {
        self.iter().map(|(p, c)| (p.clone(), c * k)).collect()
    }
}

impl FromIterator<(NodeId, u32)> for Marking {
    fn from_iter<I: IntoIterator<Item = (NodeId, u32)>>(iter: I) -> Self {
        let mut m = Marking::empty();
        for (p, c) in iter {
            m.add_tokens(&p, c);
        }
        m
    }
}

impl Add for &Marking {
    type Output = Marking;

    fn add(self, rhs: &Marking) -> Marking {
        self.sum(rhs)
    }
}

/// Renders as `[p^2, q]`, the empty bag as `[]`.
impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (p, c)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if c == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{c}")?;
            }
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bag(entries: &[(&str, u32)]) -> Marking {
        entries.iter().map(|&(p, c)| (NodeId::new(p).unwrap(), c)).collect()
    }

    #[test]
    fn sum_of_bags() {
        let m = bag(&[("p", 2), ("q", 1)]);
        assert_eq!(&m + &bag(&[("q", 1)]), bag(&[("p", 2), ("q", 2)]));
    }

    #[test]
    fn zero_scale_is_empty() {
        assert_eq!(bag(&[("p", 2), ("q", 1)]).scale(0), Marking::empty());
        assert_eq!(bag(&[("p", 2), ("q", 1)]).scale(3), bag(&[("p", 6), ("q", 3)]));
    }

    #[test]
    fn size_counts_tokens() {
        assert_eq!(bag(&[("p", 2), ("q", 1)]).size(), 3);
        assert_eq!(Marking::empty().size(), 0);
    }

    #[test]
    fn zero_entries_are_not_stored() {
        let mut m = bag(&[("p", 1), ("q", 0)]);
        assert_eq!(m, bag(&[("p", 1)]));
        m.set(NodeId::new("p").unwrap(), 0);
        assert!(m.is_empty());
        assert_eq!(m, Marking::empty());
    }

    #[test]
    fn subtraction_and_underflow() {
        let m = bag(&[("p", 2), ("q", 1)]);
        assert_eq!(m.checked_sub(&bag(&[("p", 2)])).unwrap(), bag(&[("q", 1)]));
        let err = m.checked_sub(&bag(&[("q", 2)])).unwrap_err();
        assert_eq!(err.subtrahend, bag(&[("q", 2)]));
        assert!(m.checked_sub(&bag(&[("r", 1)])).is_err());
    }

    #[test]
    fn comparison_is_entrywise() {
        assert!(bag(&[("p", 1)]).leq(&bag(&[("p", 2), ("q", 1)])));
        assert!(!bag(&[("p", 1), ("r", 1)]).leq(&bag(&[("p", 2), ("q", 1)])));
        assert!(Marking::empty().leq(&Marking::empty()));
    }

    #[test]
    fn display_uses_exponents() {
        assert_eq!(bag(&[("p", 2), ("q", 1)]).to_string(), "[p^2, q]");
        assert_eq!(Marking::empty().to_string(), "[]");
    }
}
