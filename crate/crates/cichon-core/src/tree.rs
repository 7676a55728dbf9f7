//! Pruned-tree approximations of closed sets.
//!
//! A `TreeApprox` records the depth-`d` front of a pruned binary tree: the
//! union of the kept length-`d` cylinders. A node of length < `d` is kept
//! exactly when some kept front cylinder extends it, so prefix closure and
//! the leaf-extension property hold by construction.

use crate::bits::BitString;
use crate::clopen::ClopenSet;
use crate::error::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeApprox {
    depth: u32,
    front: ClopenSet,
}

impl TreeApprox {
    pub fn new(depth: u32, front: ClopenSet) -> Result<Self> {
        if front.depth() > depth {
            return Err(Error::InvalidTree(format!(
                "front depth {} exceeds tree depth {depth}",
                front.depth()
            )));
        }
        Ok(TreeApprox { depth, front })
    }

    pub fn empty(depth: u32) -> Self {
        TreeApprox {
            depth,
            front: ClopenSet::empty(),
        }
    }

    /// Build from an explicit kept-node list, validating the invariants:
    /// downward closure under prefix and extension of every short node to a
    /// kept node of full length.
    pub fn from_nodes(depth: u32, nodes: &[BitString]) -> Result<Self> {
        let mut leaves = Vec::new();
        for t in nodes {
            if t.len() as u32 > depth {
                return Err(Error::InvalidTree(format!(
                    "node {t} longer than depth {depth}"
                )));
            }
            if t.len() as u32 == depth {
                leaves.push(t.clone());
            }
        }
        let front = ClopenSet::from_cylinders(leaves);
        let built = TreeApprox { depth, front };
        for t in nodes {
            if !built.kept(t) {
                return Err(Error::InvalidTree(format!(
                    "node {t} has no kept extension of length {depth}"
                )));
            }
        }
        for t in nodes {
            let mut s = t.clone();
            while let Some(p) = s.parent() {
                if !nodes.contains(&p) {
                    return Err(Error::InvalidTree(format!(
                        "node list not prefix-closed at {p}"
                    )));
                }
                s = p;
            }
        }
        Ok(built)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// The union of kept full-length cylinders.
    pub fn front(&self) -> &ClopenSet {
        &self.front
    }

    pub fn is_empty(&self) -> bool {
        self.front.is_empty()
    }

    /// Is the node `t` kept?
    pub fn kept(&self, t: &BitString) -> bool {
        t.len() as u32 <= self.depth && self.front.meets_cylinder(t)
    }

    /// Kept nodes of every length up to the depth. Exponential for fat
    /// trees; budget-guarded.
    pub fn nodes(&self, budget: u64) -> Result<Vec<BitString>> {
        let mut out = Vec::new();
        let mut layer = vec![BitString::empty()];
        if self.front.is_empty() {
            return Ok(out);
        }
        for _ in 0..=self.depth {
            for t in &layer {
                if out.len() as u64 >= budget {
                    return Err(Error::MaterializeBudget {
                        cylinders: out.len() as u64 + 1,
                        cap: budget,
                    });
                }
                out.push(t.clone());
            }
            let mut next = Vec::new();
            for t in layer {
                if t.len() as u32 >= self.depth {
                    continue;
                }
                for b in 0..2u8 {
                    let c = t.child(b)?;
                    if self.kept(&c) {
                        next.push(c);
                    }
                }
            }
            layer = next;
        }
        Ok(out)
    }

    /// Nowhere dense at this depth: no kept node of length < depth has its
    /// whole subtree kept, i.e. every canonical front cylinder has full
    /// length.
    pub fn is_nowhere_dense(&self) -> bool {
        self.front
            .cylinders()
            .all(|t| t.len() as u32 == self.depth)
    }

    /// Does the closed set meet the clopen set at this resolution?
    pub fn meets(&self, c: &ClopenSet) -> bool {
        !self.front.intersect(c).is_empty()
    }

    /// Tree containment: every kept branch of `self` is kept in `other`
    /// (compared at the finer of the two depths).
    pub fn subset_of(&self, other: &TreeApprox) -> bool {
        other.front.includes(&self.front)
    }

    /// The complement of a clopen set, as a depth-`d` tree.
    pub fn complement_of(set: &ClopenSet, depth: u32) -> Result<Self> {
        if set.depth() > depth {
            return Err(Error::InvalidTree(format!(
                "complement at depth {depth} coarser than set depth {}",
                set.depth()
            )));
        }
        Ok(TreeApprox {
            depth,
            front: set.complement(),
        })
    }
}

impl Serialize for TreeApprox {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let nodes = self
            .nodes(1 << 16)
            .map_err(|e| serde::ser::Error::custom(format!("tree too large for wire: {e}")))?;
        let mut st = s.serialize_struct("TreeApprox", 2)?;
        st.serialize_field("depth", &self.depth)?;
        st.serialize_field("nodes", &nodes)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for TreeApprox {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            depth: u32,
            nodes: Vec<BitString>,
        }
        let raw = Raw::deserialize(d)?;
        TreeApprox::from_nodes(raw.depth, &raw.nodes).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn set(cyls: &[&str]) -> ClopenSet {
        ClopenSet::from_cylinders(cyls.iter().map(|s| s.parse().unwrap()))
    }

    #[test]
    fn front_semantics() {
        let t = TreeApprox::new(3, set(&["000", "101"])).unwrap();
        assert!(t.kept(&bs("0")));
        assert!(t.kept(&bs("00")));
        assert!(!t.kept(&bs("01")));
        assert!(t.kept(&bs("101")));
        assert!(t.is_nowhere_dense());
        // A tree whose front fills a whole cylinder is not nowhere dense.
        let fat = TreeApprox::new(2, set(&["00", "01"])).unwrap();
        assert!(!fat.is_nowhere_dense());
    }

    #[test]
    fn node_list_round_trip() {
        let t = TreeApprox::new(2, set(&["01", "10"])).unwrap();
        let nodes = t.nodes(1 << 10).unwrap();
        let back = TreeApprox::from_nodes(2, &nodes).unwrap();
        assert_eq!(back, t);
        let json = serde_json::to_string(&t).unwrap();
        let parsed: TreeApprox = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, t);
    }

    #[test]
    fn from_nodes_validates() {
        // Missing prefix.
        assert!(TreeApprox::from_nodes(2, &[bs("01")]).is_err());
        // Short node without kept extension.
        assert!(TreeApprox::from_nodes(2, &[bs(""), bs("0")]).is_err());
        // Valid pruned tree.
        let ok = TreeApprox::from_nodes(2, &[bs(""), bs("0"), bs("01")]).unwrap();
        assert_eq!(ok.front(), &set(&["01"]));
    }

    #[test]
    fn complement_tree() {
        let stage = set(&["00"]);
        let t = TreeApprox::complement_of(&stage, 3).unwrap();
        assert!(t.kept(&bs("1")));
        assert!(!t.kept(&bs("00")));
        assert!(t.meets(&set(&["01"])));
        assert!(!t.meets(&set(&["000"])));
    }
}
