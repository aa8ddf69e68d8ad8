//! Rooted trees with optional leaf labels.
//!
//! One carrier type covers all four families: ordered unlabeled trees are
//! used as-is, and unordered (leaf-labeled or shape-only) trees are kept in
//! canonical form so that structural equality coincides with equality of the
//! unordered objects.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// A rooted ordered tree. A vertex is a leaf iff it has no children; only
/// leaves may carry a label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(try_from = "RawNode")]
pub struct Tree {
    children: Vec<Tree>,
    label: Option<u32>,
}

/// Per-tree statistics with unit edge lengths and the root at depth 0.
///
/// The height profiles are dense: index `k` holds the count at height `k`
/// and heights past the end count zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub leaves: usize,
    pub vertices: usize,
    pub height: usize,
    pub sum_leaf_heights: u64,
    pub leaves_at_height: Vec<u64>,
    pub nodes_at_height: Vec<u64>,
}

impl TreeStats {
    pub fn leaves_at(&self, k: usize) -> u64 {
        self.leaves_at_height.get(k).copied().unwrap_or(0)
    }

    pub fn nodes_at(&self, k: usize) -> u64 {
        self.nodes_at_height.get(k).copied().unwrap_or(0)
    }
}

impl Tree {
    pub fn leaf() -> Self {
        Tree { children: Vec::new(), label: None }
    }

    pub fn labeled_leaf(label: u32) -> Self {
        Tree { children: Vec::new(), label: Some(label) }
    }

    /// An internal vertex with the given ordered children. An empty list
    /// yields an unlabeled leaf.
    pub fn node(children: Vec<Tree>) -> Self {
        Tree { children, label: None }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn label(&self) -> Option<u32> {
        self.label
    }

    pub fn degree(&self) -> usize {
        self.children.len()
    }

    /// Preorder traversal of the vertices.
    pub fn preorder(&self) -> Preorder<'_> {
        Preorder { stack: vec![self] }
    }

    /// `|t|`, the number of leaves.
    pub fn leaf_count(&self) -> usize {
        self.preorder().filter(|v| v.is_leaf()).count()
    }

    /// `#t`, the number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.preorder().count()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.preorder().map(Tree::degree).collect()
    }

    pub fn has_unary_vertex(&self) -> bool {
        self.preorder().any(|v| v.degree() == 1)
    }

    pub fn is_binary(&self) -> bool {
        self.preorder().all(|v| v.is_leaf() || v.degree() == 2)
    }

    /// True when at least one leaf carries a label. Valid trees are either
    /// fully labeled or fully unlabeled.
    pub fn is_labeled(&self) -> bool {
        self.preorder().any(|v| v.label.is_some())
    }

    /// Leaf labels in left-to-right order; unlabeled leaves are skipped.
    pub fn leaf_labels(&self) -> Vec<u32> {
        self.preorder().filter_map(|v| v.label).collect()
    }

    /// Checks the label invariants: either no leaf is labeled, or the labels
    /// of an `n`-leaf tree are exactly `{1, …, n}`.
    pub fn validate(&self) -> Result<()> {
        let n = self.leaf_count();
        let labels = self.leaf_labels();
        if labels.is_empty() {
            return Ok(());
        }
        if labels.len() != n {
            return Err(Error::Labels(format!(
                "{} of {} leaves are labeled",
                labels.len(),
                n
            )));
        }
        let mut seen = vec![false; n + 1];
        for &l in &labels {
            let idx = l as usize;
            if l == 0 || idx > n {
                return Err(Error::Labels(format!("label {l} outside 1..={n}")));
            }
            if seen[idx] {
                return Err(Error::Labels(format!("label {l} appears twice")));
            }
            seen[idx] = true;
        }
        Ok(())
    }

    /// Heights, counts and height profiles in one pass.
    pub fn stats(&self) -> TreeStats {
        let mut stats = TreeStats {
            leaves: 0,
            vertices: 0,
            height: 0,
            sum_leaf_heights: 0,
            leaves_at_height: Vec::new(),
            nodes_at_height: Vec::new(),
        };
        let mut stack = vec![(self, 0usize)];
        while let Some((v, depth)) = stack.pop() {
            stats.vertices += 1;
            stats.height = stats.height.max(depth);
            if stats.nodes_at_height.len() <= depth {
                stats.nodes_at_height.resize(depth + 1, 0);
                stats.leaves_at_height.resize(depth + 1, 0);
            }
            stats.nodes_at_height[depth] += 1;
            if v.is_leaf() {
                stats.leaves += 1;
                stats.sum_leaf_heights += depth as u64;
                stats.leaves_at_height[depth] += 1;
            } else {
                stack.extend(v.children.iter().map(|c| (c, depth + 1)));
            }
        }
        stats
    }

    /// Depths of the leaves in left-to-right order.
    pub fn leaf_heights(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![(self, 0usize)];
        while let Some((v, depth)) = stack.pop() {
            if v.is_leaf() {
                out.push(depth);
            } else {
                stack.extend(v.children.iter().rev().map(|c| (c, depth + 1)));
            }
        }
        out
    }

    /// Canonical representative of the unordered tree: children of labeled
    /// trees are ordered by their minimum leaf label, children of unlabeled
    /// trees by the total order on canonical forms.
    pub fn canonicalize(&self) -> Tree {
        if self.is_labeled() {
            self.canonical_by_min_label().0
        } else {
            self.canonical_shape()
        }
    }

    fn canonical_by_min_label(&self) -> (Tree, u32) {
        if self.is_leaf() {
            return (self.clone(), self.label.unwrap_or(u32::MAX));
        }
        let mut kids: Vec<(Tree, u32)> =
            self.children.iter().map(Tree::canonical_by_min_label).collect();
        kids.sort_by_key(|(_, m)| *m);
        let min = kids[0].1;
        (Tree::node(kids.into_iter().map(|(t, _)| t).collect()), min)
    }

    fn canonical_shape(&self) -> Tree {
        let mut kids: Vec<Tree> = self.children.iter().map(Tree::canonical_shape).collect();
        kids.sort();
        Tree { children: kids, label: self.label }
    }

    /// Whether two trees are equal as unordered (possibly labeled) trees.
    pub fn same_unordered(&self, other: &Tree) -> bool {
        self.canonicalize() == other.canonicalize()
    }

    /// Drops every label, keeping the order of children.
    pub fn forget_labels(&self) -> Tree {
        Tree {
            children: self.children.iter().map(Tree::forget_labels).collect(),
            label: None,
        }
    }

    /// Assigns a uniformly random permutation of `{1, …, n}` to the leaves in
    /// left-to-right order. The tree itself is left in its given order.
    pub fn label_uniformly<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Tree> {
        if self.is_labeled() {
            return Err(Error::AlreadyLabeled);
        }
        let n = self.leaf_count();
        let mut labels: Vec<u32> = (1..=n as u32).collect();
        labels.shuffle(rng);
        Ok(self.with_leaf_labels(&labels))
    }

    /// Labels the leaves, in left-to-right order, with `labels`.
    pub fn with_leaf_labels(&self, labels: &[u32]) -> Tree {
        let mut it = labels.iter().copied();
        let out = self.assign_labels(&mut it);
        debug_assert!(it.next().is_none());
        out
    }

    fn assign_labels(&self, it: &mut impl Iterator<Item = u32>) -> Tree {
        if self.is_leaf() {
            return Tree { children: Vec::new(), label: it.next() };
        }
        Tree {
            children: self.children.iter().map(|c| c.assign_labels(it)).collect(),
            label: None,
        }
    }

    /// Applies `f` to every label.
    pub fn relabel(&self, f: &impl Fn(u32) -> u32) -> Tree {
        Tree {
            children: self.children.iter().map(|c| c.relabel(f)).collect(),
            label: self.label.map(f),
        }
    }

    /// Builds the ordered unlabeled tree whose preorder out-degree sequence
    /// (Łukasiewicz word) is `degrees`.
    pub fn from_preorder_degrees(degrees: &[usize]) -> Result<Tree> {
        let malformed = || Error::InvalidTree("malformed preorder degree sequence".into());
        let mut frames: Vec<(usize, Vec<Tree>)> = Vec::new();
        let mut root = None;
        for (i, &d) in degrees.iter().enumerate() {
            if root.is_some() {
                return Err(malformed());
            }
            if i > 0 && frames.is_empty() {
                return Err(malformed());
            }
            if d > 0 {
                frames.push((d, Vec::with_capacity(d)));
                continue;
            }
            let mut done = Tree::leaf();
            loop {
                match frames.last_mut() {
                    None => {
                        root = Some(done);
                        break;
                    }
                    Some((want, kids)) => {
                        kids.push(done);
                        if kids.len() < *want {
                            break;
                        }
                        let (_, kids) = frames.pop().expect("frame present");
                        done = Tree::node(kids);
                    }
                }
            }
        }
        root.ok_or_else(malformed)
    }

    /// Serializes to the JSON tree schema.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tree serialization cannot fail")
    }

    /// Parses the JSON tree schema and checks the label invariants.
    pub fn from_json(s: &str) -> Result<Tree> {
        let mut de = serde_json::Deserializer::from_str(s);
        de.disable_recursion_limit();
        let tree = Tree::deserialize(&mut de)?;
        de.end()?;
        tree.validate()?;
        Ok(tree)
    }
}

/// Preorder iterator over the vertices of a tree.
pub struct Preorder<'a> {
    stack: Vec<&'a Tree>,
}

impl<'a> Iterator for Preorder<'a> {
    type Item = &'a Tree;

    fn next(&mut self) -> Option<&'a Tree> {
        let v = self.stack.pop()?;
        self.stack.extend(v.children.iter().rev());
        Some(v)
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_leaf() {
            return match self.label {
                Some(l) => write!(f, "{l}"),
                None => write!(f, "x"),
            };
        }
        write!(f, "[")?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c:?}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Tree {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.is_leaf() {
            let mut map = serializer.serialize_map(Some(1))?;
            map.serialize_entry("children", &self.children)?;
            map.end()
        } else if let Some(l) = self.label {
            let mut map = serializer.serialize_map(Some(1))?;
            map.serialize_entry("label", &l)?;
            map.end()
        } else {
            serializer.serialize_map(Some(0))?.end()
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    label: Option<u32>,
    children: Option<Vec<RawNode>>,
}

impl TryFrom<RawNode> for Tree {
    type Error = String;

    fn try_from(raw: RawNode) -> std::result::Result<Self, String> {
        match (raw.label, raw.children) {
            (Some(_), Some(_)) => Err("a node cannot have both a label and children".into()),
            (Some(0), None) => Err("labels must be positive".into()),
            (label, None) => Ok(Tree { children: Vec::new(), label }),
            (None, Some(kids)) if kids.is_empty() => {
                Err("an internal node needs at least one child; write a leaf as {}".into())
            }
            (None, Some(kids)) => Ok(Tree::node(
                kids.into_iter().map(Tree::try_from).collect::<std::result::Result<_, _>>()?,
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cherry() -> Tree {
        Tree::node(vec![Tree::leaf(), Tree::leaf()])
    }

    #[test]
    fn single_leaf_stats() {
        let s = Tree::leaf().stats();
        assert_eq!((s.leaves, s.vertices, s.height, s.sum_leaf_heights), (1, 1, 0, 0));
        assert_eq!(s.nodes_at(0), 1);
        assert_eq!(s.leaves_at(0), 1);
    }

    #[test]
    fn right_caterpillar_stats() {
        // x(x(xx))
        let t = Tree::node(vec![Tree::leaf(), Tree::node(vec![Tree::leaf(), cherry()])]);
        let s = t.stats();
        assert_eq!((s.leaves, s.vertices, s.height, s.sum_leaf_heights), (4, 7, 3, 9));
        assert_eq!(s.leaves_at_height, vec![0, 1, 1, 2]);
        assert_eq!(s.nodes_at_height, vec![1, 2, 2, 2]);
        assert_eq!(t.leaf_heights(), vec![1, 2, 3, 3]);
    }

    #[test]
    fn canonical_orders_by_min_label() {
        let a = Tree::node(vec![Tree::labeled_leaf(3), Tree::labeled_leaf(4)]);
        let b = Tree::node(vec![Tree::labeled_leaf(2), Tree::labeled_leaf(1)]);
        let t = Tree::node(vec![a, b]);
        let c = t.canonicalize();
        assert_eq!(c.leaf_labels(), vec![1, 2, 3, 4]);
        assert_eq!(c.canonicalize(), c);
    }

    #[test]
    fn label_validation() {
        let bad = Tree::node(vec![Tree::labeled_leaf(1), Tree::leaf()]);
        assert!(matches!(bad.validate(), Err(Error::Labels(_))));
        let dup = Tree::node(vec![Tree::labeled_leaf(1), Tree::labeled_leaf(1)]);
        assert!(dup.validate().is_err());
        let gap = Tree::node(vec![Tree::labeled_leaf(1), Tree::labeled_leaf(3)]);
        assert!(gap.validate().is_err());
    }

    #[test]
    fn label_uniformly_rejects_labeled_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = Tree::labeled_leaf(1);
        assert!(matches!(t.label_uniformly(&mut rng), Err(Error::AlreadyLabeled)));
        assert_eq!(t.forget_labels(), Tree::leaf());
    }

    #[test]
    fn preorder_degrees_round_trip() {
        let t = Tree::node(vec![cherry(), Tree::leaf(), Tree::node(vec![Tree::leaf(); 3])]);
        assert_eq!(Tree::from_preorder_degrees(&t.out_degrees()).unwrap(), t);
        assert!(Tree::from_preorder_degrees(&[2, 0]).is_err());
        assert!(Tree::from_preorder_degrees(&[0, 0]).is_err());
        assert!(Tree::from_preorder_degrees(&[]).is_err());
    }

    #[test]
    fn json_schema() {
        let t = Tree::node(vec![Tree::labeled_leaf(2), Tree::labeled_leaf(1)]);
        assert_eq!(t.to_json(), r#"{"children":[{"label":2},{"label":1}]}"#);
        assert_eq!(Tree::leaf().to_json(), "{}");
        assert_eq!(Tree::from_json(r#"{"children":[{},{}]}"#).unwrap(), cherry());
        assert!(Tree::from_json(r#"{"children":[]}"#).is_err());
        assert!(Tree::from_json(r#"{"label":1,"children":[{}]}"#).is_err());
        assert!(Tree::from_json(r#"{"weight":1}"#).is_err());
        assert!(Tree::from_json(r#"{"label":0}"#).is_err());
        assert!(Tree::from_json(r#"{"children":[{"label":1},{}]}"#).is_err());
    }

    #[test]
    fn deep_json_round_trip() {
        let mut t = Tree::leaf();
        for _ in 0..600 {
            t = Tree::node(vec![Tree::leaf(), t]);
        }
        assert_eq!(Tree::from_json(&t.to_json()).unwrap(), t);
    }
}
