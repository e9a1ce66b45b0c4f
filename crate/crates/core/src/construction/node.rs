use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite index sequence `(k₁, …, k_l)` with entries in `[1, N − 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node(Vec<u32>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Parent,
    Ancestors,
    Siblings,
    Cousins,
    RestrictedTree,
}

impl Node {
    pub fn new(indices: Vec<u32>, n: u32) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidNode("empty index sequence".into()));
        }
        if let Some(bad) = indices.iter().find(|&&j| j == 0 || j >= n) {
            return Err(Error::InvalidNode(format!("index {bad} outside [1, {}]", n - 1)));
        }
        Ok(Self(indices))
    }

    pub fn root_child(j: u32) -> Self {
        Self(vec![j])
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn last(&self) -> u32 {
        *self.0.last().expect("nonempty")
    }

    pub fn child(&self, j: u32) -> Self {
        let mut v = self.0.clone();
        v.push(j);
        Self(v)
    }

    pub fn parent(&self) -> Result<Self> {
        if self.0.len() == 1 {
            return Err(Error::RootHasNoParent);
        }
        Ok(Self(self.0[..self.0.len() - 1].to_vec()))
    }

    /// Prefix of length `i`.
    pub fn prefix(&self, i: usize) -> Self {
        Self(self.0[..i].to_vec())
    }

    /// `𝒜(k)`: the node itself followed by its ancestors, deepest first.
    pub fn ancestors(&self) -> Vec<Self> {
        (1..=self.level()).rev().map(|i| self.prefix(i)).collect()
    }

    pub fn is_ancestor_of(&self, other: &Node) -> bool {
        self.level() < other.level() && other.0.starts_with(&self.0)
    }

    pub fn common_prefix_len(&self, other: &Node) -> usize {
        self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count()
    }

    pub fn siblings(&self, n: u32) -> Vec<Self> {
        let head = &self.0[..self.0.len() - 1];
        (1..n)
            .filter(|&j| j != self.last())
            .map(|j| {
                let mut v = head.to_vec();
                v.push(j);
                Self(v)
            })
            .collect()
    }

    /// All nodes of the given level in lexicographic order.
    pub fn level_nodes(level: usize, n: u32) -> Vec<Self> {
        let mut out = vec![Vec::new()];
        for _ in 0..level {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u32>| {
                    (1..n).map(move |j| {
                        let mut w = v.clone();
                        w.push(j);
                        w
                    })
                })
                .collect();
        }
        out.into_iter().map(Self).collect()
    }

    /// Nodes of levels `1..=depth`, level by level.
    pub fn tree(depth: usize, n: u32) -> Vec<Self> {
        (1..=depth).flat_map(|l| Self::level_nodes(l, n)).collect()
    }

    pub fn relatives(&self, n: u32, query: Relation) -> Result<Vec<Self>> {
        Ok(match query {
            Relation::Parent => vec![self.parent()?],
            Relation::Ancestors => self.ancestors(),
            Relation::Siblings => self.siblings(n),
            Relation::Cousins => Self::level_nodes(self.level(), n).into_iter().filter(|m| m != self).collect(),
            Relation::RestrictedTree => Self::tree(self.level(), n),
        })
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|j| j.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for Node {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: std::result::Result<Vec<u32>, _> = s.split('.').map(str::parse).collect();
        match v {
            Ok(v) if !v.is_empty() && v.iter().all(|&j| j >= 1) => Ok(Self(v)),
            _ => Err(Error::InvalidNode(s.to_string())),
        }
    }
}

impl Serialize for Node {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Node {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
