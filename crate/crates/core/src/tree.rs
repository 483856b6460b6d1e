//! Plane trees stored as parent links, birth-ordered child lists and subtree
//! sizes.
//!
//! Node ids are dense, `0` is the root, and every parent id is smaller than
//! the ids of its children (creation order). The Ulam–Harris word of a node
//! is recoverable from the birth ranks along its ancestry.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::Word;

const NO_PARENT: u32 = u32::MAX;

/// Which defining condition of a plane tree failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// The root is missing.
    RootPresent,
    /// A node is present but its parent is not.
    ParentClosed,
    /// A node `u*j` with `j > 1` is present but `u*(j-1)` is not.
    SiblingsGapless,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub witness: Word,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.condition {
            Condition::RootPresent => "root missing",
            Condition::ParentClosed => "parent missing",
            Condition::SiblingsGapless => "earlier sibling missing",
        };
        write!(f, "{what} (witness {})", self.witness)
    }
}

/// Checks the three plane-tree conditions on a set of words and reports the
/// first violation found in breadth-first order.
pub fn validate_plane_tree<'a, I>(words: I) -> std::result::Result<(), Violation>
where
    I: IntoIterator<Item = &'a Word>,
{
    let set: HashSet<&Word> = words.into_iter().collect();
    let root = Word::root();
    if !set.contains(&root) {
        return Err(Violation { condition: Condition::RootPresent, witness: root });
    }
    let mut ordered: Vec<&Word> = set.iter().copied().collect();
    ordered.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| a.cmp(b)));
    for w in ordered {
        let Some(parent) = w.parent() else { continue };
        if !set.contains(&parent) {
            return Err(Violation { condition: Condition::ParentClosed, witness: w.clone() });
        }
        let j = w.last().unwrap_or(1);
        if j > 1 && !set.contains(&parent.child(j - 1)) {
            return Err(Violation { condition: Condition::SiblingsGapless, witness: w.clone() });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneTree {
    parent: Vec<u32>,
    rank: Vec<u32>,
    child_offsets: Vec<u32>,
    child_list: Vec<u32>,
    sizes: Vec<u32>,
}

impl PlaneTree {
    /// The one-node tree `{∅}`.
    pub fn singleton() -> Self {
        Self::from_trusted(vec![NO_PARENT], vec![0])
    }

    /// Builds a tree from per-node parent ids and birth ranks, where
    /// `parents[0]` must be `None` and every other parent id must be smaller
    /// than the node's own id.
    pub fn from_parent_ranks(parents: &[Option<usize>], ranks: &[u32]) -> Result<Self> {
        if parents.len() != ranks.len() {
            return Err(crate::error::invalid("parents and ranks differ in length"));
        }
        if parents.is_empty() || parents[0].is_some() {
            return Err(Error::InvalidTree(Violation {
                condition: Condition::RootPresent,
                witness: Word::root(),
            }));
        }
        if parents.len() > NO_PARENT as usize {
            return Err(crate::error::invalid("tree too large for 32-bit node ids"));
        }
        let n = parents.len();
        let mut parent = Vec::with_capacity(n);
        parent.push(NO_PARENT);
        for (id, p) in parents.iter().enumerate().skip(1) {
            match *p {
                None => {
                    return Err(crate::error::invalid(format!("node {id} has no parent but is not the root")))
                }
                Some(p) if p >= id => {
                    return Err(crate::error::invalid(format!(
                        "node {id} has parent {p}; parents must precede their children"
                    )))
                }
                Some(p) => parent.push(p as u32),
            }
        }
        let mut rank = ranks.to_vec();
        rank[0] = 0;
        check_ranks(&parent, &rank)?;
        Ok(Self::from_trusted(parent, rank))
    }

    /// Builds the tree holding exactly the given words, with ids assigned in
    /// breadth-first order (height, then lexicographic).
    pub fn from_words<'a, I>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Word>,
    {
        let set: BTreeSet<&Word> = words.into_iter().collect();
        validate_plane_tree(set.iter().copied()).map_err(Error::InvalidTree)?;
        let mut ordered: Vec<&Word> = set.into_iter().collect();
        ordered.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| a.cmp(b)));
        let index: std::collections::HashMap<&Word, u32> =
            ordered.iter().enumerate().map(|(i, w)| (*w, i as u32)).collect();
        let mut parent = Vec::with_capacity(ordered.len());
        let mut rank = Vec::with_capacity(ordered.len());
        for w in &ordered {
            match w.parent() {
                None => {
                    parent.push(NO_PARENT);
                    rank.push(0);
                }
                Some(p) => {
                    parent.push(index[&p]);
                    rank.push(w.last().unwrap_or(0));
                }
            }
        }
        Ok(Self::from_trusted(parent, rank))
    }

    /// Assumes parents precede children and each node's ranks are `1..=k`.
    pub(crate) fn from_trusted(parent: Vec<u32>, rank: Vec<u32>) -> Self {
        let n = parent.len();
        let mut child_offsets = vec![0u32; n + 1];
        for &p in &parent[1..] {
            child_offsets[p as usize + 1] += 1;
        }
        for i in 0..n {
            child_offsets[i + 1] += child_offsets[i];
        }
        let mut child_list = vec![0u32; n.saturating_sub(1)];
        for id in 1..n {
            let p = parent[id] as usize;
            child_list[(child_offsets[p] + rank[id] - 1) as usize] = id as u32;
        }
        let mut sizes = vec![1u32; n];
        for id in (1..n).rev() {
            sizes[parent[id] as usize] += sizes[id];
        }
        PlaneTree { parent, rank, child_offsets, child_list, sizes }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    /// Always false: a plane tree contains its root.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn parent(&self, u: usize) -> Option<usize> {
        match self.parent[u] {
            NO_PARENT => None,
            p => Some(p as usize),
        }
    }

    /// Child index `j` such that node `u` is `parent(u) * j`; 0 for the root.
    pub fn birth_rank(&self, u: usize) -> u32 {
        self.rank[u]
    }

    /// Children of `u` in birth order.
    pub fn children(&self, u: usize) -> &[u32] {
        let lo = self.child_offsets[u] as usize;
        let hi = self.child_offsets[u + 1] as usize;
        &self.child_list[lo..hi]
    }

    pub fn num_children(&self, u: usize) -> usize {
        (self.child_offsets[u + 1] - self.child_offsets[u]) as usize
    }

    /// `|θ_u t|` for every node.
    pub fn subtree_sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn subtree_size(&self, u: usize) -> usize {
        self.sizes[u] as usize
    }

    pub fn leaf_count(&self) -> usize {
        (0..self.len()).filter(|&u| self.num_children(u) == 0).count()
    }

    pub fn word(&self, u: usize) -> Word {
        let mut letters = Vec::new();
        let mut v = u;
        while let Some(p) = self.parent(v) {
            letters.push(self.rank[v]);
            v = p;
        }
        letters.reverse();
        Word::new(letters).expect("birth ranks are positive")
    }

    /// Node addressed by `w`, if present.
    pub fn find(&self, w: &Word) -> Option<usize> {
        let mut u = 0usize;
        for &j in w.letters() {
            u = *self.children(u).get(j as usize - 1)? as usize;
        }
        Some(u)
    }

    /// Number of letters of every node's word.
    pub fn heights(&self) -> Vec<u32> {
        let mut h = vec![0u32; self.len()];
        for u in 1..self.len() {
            h[u] = h[self.parent[u] as usize] + 1;
        }
        h
    }

    /// Sum of letters of every node's word.
    pub fn weights(&self) -> Vec<u64> {
        let mut w = vec![0u64; self.len()];
        for u in 1..self.len() {
            w[u] = w[self.parent[u] as usize] + u64::from(self.rank[u]);
        }
        w
    }

    /// Writes one `id parent_id birth_rank` line per node; the root line is
    /// `0 -1 0`.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        for u in 0..self.len() {
            match self.parent(u) {
                None => writeln!(out, "{u} -1 0")?,
                Some(p) => writeln!(out, "{u} {p} {}", self.rank[u])?,
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the `id parent_id birth_rank` format and validates the result
    /// as a plane tree. Blank lines and lines starting with `#` are ignored.
    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut entries: Vec<(usize, i64, u32, usize)> = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(parse_err(lineno, "expected `id parent_id birth_rank`"));
            }
            let id: usize = fields[0].parse().map_err(|_| parse_err(lineno, "bad node id"))?;
            let parent: i64 = fields[1].parse().map_err(|_| parse_err(lineno, "bad parent id"))?;
            let rank: u32 = fields[2].parse().map_err(|_| parse_err(lineno, "bad birth rank"))?;
            entries.push((id, parent, rank, lineno));
        }
        entries.sort_by_key(|e| e.0);
        if entries.first().map(|e| e.0) != Some(0) {
            return Err(Error::InvalidTree(Violation {
                condition: Condition::RootPresent,
                witness: Word::root(),
            }));
        }
        let n = entries.len();
        let mut parent = Vec::with_capacity(n);
        let mut rank = Vec::with_capacity(n);
        for (expected, &(id, p, r, lineno)) in entries.iter().enumerate() {
            if id != expected {
                return Err(parse_err(lineno, format!("node ids must be dense; expected {expected}, found {id}")));
            }
            if id == 0 {
                if p != -1 || r != 0 {
                    return Err(parse_err(lineno, "root line must be `0 -1 0`"));
                }
                parent.push(NO_PARENT);
                rank.push(0);
                continue;
            }
            if p < 0 || p as usize >= n {
                return Err(parse_err(lineno, format!("parent {p} of node {id} is not in the tree")));
            }
            if p as usize >= id {
                return Err(parse_err(lineno, "parent ids must be smaller than child ids"));
            }
            if r == 0 {
                return Err(parse_err(lineno, "birth rank of a non-root node must be positive"));
            }
            parent.push(p as u32);
            rank.push(r);
        }
        check_ranks(&parent, &rank)?;
        Ok(Self::from_trusted(parent, rank))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Every node's children must carry ranks exactly `1..=k`.
fn check_ranks(parent: &[u32], rank: &[u32]) -> Result<()> {
    let n = parent.len();
    let mut counts = vec![0u32; n];
    for &p in &parent[1..] {
        counts[p as usize] += 1;
    }
    let mut seen: Vec<Vec<bool>> = counts.iter().map(|&k| vec![false; k as usize]).collect();
    for id in 1..n {
        let p = parent[id] as usize;
        let r = rank[id];
        if r == 0 {
            return Err(crate::error::invalid(format!("node {id} has birth rank 0")));
        }
        if r > counts[p] {
            let mut w = raw_word(parent, rank, p);
            w.push(r);
            return Err(Error::InvalidTree(Violation { condition: Condition::SiblingsGapless, witness: w }));
        }
        let slot = &mut seen[p][r as usize - 1];
        if *slot {
            return Err(crate::error::invalid(format!("node {p} has two children with birth rank {r}")));
        }
        *slot = true;
    }
    Ok(())
}

/// Word of `u` from raw arrays, for error reports on not-yet-valid input.
fn raw_word(parent: &[u32], rank: &[u32], u: usize) -> Word {
    let mut letters = Vec::new();
    let mut v = u;
    while parent[v] != NO_PARENT {
        letters.push(rank[v].max(1));
        v = parent[v] as usize;
    }
    letters.reverse();
    Word::new(letters).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(l: &[u32]) -> Word {
        Word::from_slice(l)
    }

    fn path3() -> PlaneTree {
        PlaneTree::from_words(&[w(&[]), w(&[1]), w(&[1, 1])]).unwrap()
    }

    fn star4() -> PlaneTree {
        PlaneTree::from_words(&[w(&[]), w(&[1]), w(&[2]), w(&[3])]).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(validate_plane_tree(&[w(&[]), w(&[1]), w(&[2])]).is_ok());
        let v = validate_plane_tree(&[w(&[]), w(&[2])]).unwrap_err();
        assert_eq!(v.condition, Condition::SiblingsGapless);
        assert_eq!(v.witness, w(&[2]));
        let v = validate_plane_tree(&[w(&[1])]).unwrap_err();
        assert_eq!(v.condition, Condition::RootPresent);
        let v = validate_plane_tree(&[w(&[]), w(&[1, 1])]).unwrap_err();
        assert_eq!(v.condition, Condition::ParentClosed);
        assert_eq!(v.witness, w(&[1, 1]));
    }

    #[test]
    fn first_violation_is_breadth_first() {
        let v = validate_plane_tree(&[w(&[]), w(&[1]), w(&[1, 3]), w(&[3])]).unwrap_err();
        assert_eq!(v.witness, w(&[3]));
    }

    #[test]
    fn subtree_size_examples() {
        assert_eq!(path3().subtree_sizes(), &[3, 2, 1]);
        assert_eq!(PlaneTree::singleton().subtree_sizes(), &[1]);
        assert_eq!(star4().subtree_sizes(), &[4, 1, 1, 1]);
    }

    #[test]
    fn words_and_lookup_round_trip() {
        let words = [w(&[]), w(&[1]), w(&[2]), w(&[1, 1]), w(&[1, 2]), w(&[2, 1])];
        let t = PlaneTree::from_words(&words).unwrap();
        for u in 0..t.len() {
            assert_eq!(t.find(&t.word(u)), Some(u));
        }
        assert_eq!(t.find(&w(&[3])), None);
        assert_eq!(t.weights()[t.find(&w(&[1, 2])).unwrap()], 3);
        assert_eq!(t.heights()[t.find(&w(&[2, 1])).unwrap()], 2);
        assert_eq!(t.leaf_count(), 3);
    }

    #[test]
    fn text_round_trip() {
        let t = star4();
        let text = t.to_text();
        assert!(text.starts_with("0 -1 0\n"));
        assert_eq!(PlaneTree::from_text(&text).unwrap(), t);
    }

    #[test]
    fn loader_rejects_malformed_trees() {
        assert!(matches!(
            PlaneTree::from_text("0 -1 0\n1 0 2\n"),
            Err(Error::InvalidTree(Violation { condition: Condition::SiblingsGapless, .. }))
        ));
        assert!(matches!(
            PlaneTree::from_text("1 0 1\n"),
            Err(Error::InvalidTree(Violation { condition: Condition::RootPresent, .. }))
        ));
        assert!(matches!(PlaneTree::from_text("0 -1 0\n1 5 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(PlaneTree::from_text("0 -1 0\n1 0 1\n2 0 1\n").is_err());
        assert!(PlaneTree::from_text("0 -1 0\n2 0 1\n").is_err());
        assert!(PlaneTree::from_text("0 -1 0\n1 0\n").is_err());
    }

    #[test]
    fn from_parent_ranks_checks_gaps() {
        assert!(PlaneTree::from_parent_ranks(&[None, Some(0), Some(0)], &[0, 1, 2]).is_ok());
        assert!(PlaneTree::from_parent_ranks(&[None, Some(0), Some(0)], &[0, 1, 3]).is_err());
        assert!(PlaneTree::from_parent_ranks(&[None, Some(2), Some(0)], &[0, 1, 1]).is_err());
    }
}
