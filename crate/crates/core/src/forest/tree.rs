use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Name of a leaf type, e.g. `Y`, `X`, `Z` (for ζ) or `Y1`, `Y2` for colored leaves.
///
/// Labels are ASCII identifiers so that the bracketed serialization
/// `((Y,Y),Y)` parses back unambiguously.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LeafLabel(String);

impl LeafLabel {
    pub fn new(name: &str) -> Result<Self> {
        let mut chars = name.chars();
        let ok = chars
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Ok(LeafLabel(name.to_string()))
        } else {
            Err(Error::InvalidLabel(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LeafLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug)]
enum Shape {
    Leaf(LeafLabel),
    Join(Tree, Tree),
}

#[derive(Debug)]
struct Node {
    shape: Shape,
    repr: String,
    leaves: usize,
}

/// Canonical binary tree with typed leaves.
///
/// Children of every inner node are ordered so that the serialization of the
/// left child is lexicographically `<=` that of the right child. Equality,
/// ordering and hashing all go through that serialization, so two trees are
/// equal exactly when they are the same unordered tree.
#[derive(Clone)]
pub struct Tree(Arc<Node>);

impl Tree {
    pub fn leaf(label: LeafLabel) -> Tree {
        let repr = label.0.clone();
        Tree(Arc::new(Node {
            shape: Shape::Leaf(label),
            repr,
            leaves: 1,
        }))
    }

    /// Root joining; commutative by construction.
    pub fn join(t1: &Tree, t2: &Tree) -> Tree {
        let (l, r) = if t1.0.repr <= t2.0.repr {
            (t1, t2)
        } else {
            (t2, t1)
        };
        let repr = format!("({},{})", l.0.repr, r.0.repr);
        Tree(Arc::new(Node {
            shape: Shape::Join(l.clone(), r.clone()),
            repr,
            leaves: l.0.leaves + r.0.leaves,
        }))
    }

    pub fn leaf_count(&self) -> usize {
        self.0.leaves
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.0.shape, Shape::Leaf(_))
    }

    pub fn label(&self) -> Option<&LeafLabel> {
        match &self.0.shape {
            Shape::Leaf(l) => Some(l),
            Shape::Join(..) => None,
        }
    }

    /// The two subtrees of an inner node, in canonical order.
    pub fn children(&self) -> Option<(&Tree, &Tree)> {
        match &self.0.shape {
            Shape::Leaf(_) => None,
            Shape::Join(l, r) => Some((l, r)),
        }
    }

    /// Canonical bracketed serialization, e.g. `((Y,Y),Y)`.
    pub fn serialize(&self) -> &str {
        &self.0.repr
    }

    /// Number of leaves carrying `label`.
    pub fn count_label(&self, label: &LeafLabel) -> usize {
        match &self.0.shape {
            Shape::Leaf(l) => usize::from(l == label),
            Shape::Join(l, r) => l.count_label(label) + r.count_label(label),
        }
    }

    /// Replaces every leaf `label` by `replacement`, re-canonicalizing on the way up.
    pub fn substitute(&self, label: &LeafLabel, replacement: &Tree) -> Tree {
        match &self.0.shape {
            Shape::Leaf(l) if l == label => replacement.clone(),
            Shape::Leaf(_) => self.clone(),
            Shape::Join(l, r) => Tree::join(
                &l.substitute(label, replacement),
                &r.substitute(label, replacement),
            ),
        }
    }

    /// Diamond notation, e.g. `((Y ⋄ Y) ⋄ Y)`.
    pub fn to_diamond_notation(&self) -> String {
        match &self.0.shape {
            Shape::Leaf(l) => l.0.clone(),
            Shape::Join(l, r) => format!(
                "({} ⋄ {})",
                l.to_diamond_notation(),
                r.to_diamond_notation()
            ),
        }
    }

    /// Parses the bracketed serialization; input need not be canonical.
    pub fn parse(s: &str) -> Result<Tree> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse_tree(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Parse(format!("trailing input in tree `{s}`")));
        }
        Ok(t)
    }
}

fn parse_tree(chars: &[char], pos: &mut usize) -> Result<Tree> {
    let err = |p: usize| Error::Parse(format!("malformed tree at position {p}"));
    match chars.get(*pos) {
        Some('(') => {
            *pos += 1;
            let l = parse_tree(chars, pos)?;
            if chars.get(*pos) != Some(&',') {
                return Err(err(*pos));
            }
            *pos += 1;
            let r = parse_tree(chars, pos)?;
            if chars.get(*pos) != Some(&')') {
                return Err(err(*pos));
            }
            *pos += 1;
            Ok(Tree::join(&l, &r))
        }
        Some(_) => {
            let start = *pos;
            while chars
                .get(*pos)
                .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
            {
                *pos += 1;
            }
            let name: String = chars[start..*pos].iter().collect();
            Ok(Tree::leaf(LeafLabel::new(&name)?))
        }
        None => Err(err(*pos)),
    }
}

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.repr == other.0.repr
    }
}

impl Eq for Tree {}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.repr.cmp(&other.0.repr)
    }
}

impl Hash for Tree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.repr.hash(state);
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({})", self.0.repr)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.repr)
    }
}

/// Convenience constructor for a leaf with a known-good label.
pub fn leaf(name: &str) -> Tree {
    Tree::leaf(LeafLabel::new(name).expect("valid leaf label"))
}
