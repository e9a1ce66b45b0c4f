use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::node::Node;
use super::params::ConstructionParams;
use crate::error::{Error, Result};
use crate::interval_set::IntervalSet;
use crate::poisson::{poisson_interval, poisson_interval_deriv, StripField};

/// Per-node data. Positions are stored relative to the tree so that levels
/// far below `f64` resolution at absolute scale stay exact.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub node: Node,
    pub parent: Option<usize>,
    /// `j/N` at level 1, else `c(k) − x(parent)`.
    pub c_offset: f64,
    /// `x(k) − c(k)`; `None` until the root is solved.
    pub shift: Option<f64>,
    pub residual: f64,
}

impl NodeRecord {
    pub fn level(&self) -> usize {
        self.node.level()
    }
}

/// `P(I, w)` for `I = (−1, −β₁) ∪ (β₁, 1)`.
pub fn poisson_unit_i(beta1: f64, w: Complex64) -> Result<Complex64> {
    Ok(poisson_interval(-1.0, -beta1, w)? + poisson_interval(beta1, 1.0, w)?)
}

pub fn poisson_unit_i_deriv(beta1: f64, w: Complex64) -> Result<Complex64> {
    Ok(poisson_interval_deriv(-1.0, -beta1, w)? + poisson_interval_deriv(beta1, 1.0, w)?)
}

/// The field `P(X_U, c + sω)` for a set `U` of nodes, evaluated in the local
/// coordinate `ω` around an anchor center `c` with scale `s`.
#[derive(Debug, Clone)]
pub struct Frame {
    pub scale: f64,
    pub beta1: f64,
    /// `(c(m) − c, s(m))` per included node.
    pub entries: Vec<(f64, f64)>,
}

impl Frame {
    pub fn value(&self, omega: Complex64) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for &(dc, sm) in &self.entries {
            sum += poisson_unit_i(self.beta1, (omega * self.scale - dc) / sm)?;
        }
        Ok(sum)
    }

    /// Derivative with respect to the absolute variable `ζ = c + sω`.
    pub fn deriv(&self, omega: Complex64) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for &(dc, sm) in &self.entries {
            sum += poisson_unit_i_deriv(self.beta1, (omega * self.scale - dc) / sm)? / sm;
        }
        Ok(sum)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds the entries of another frame with the same anchor and scale.
    pub fn merged(mut self, other: &Frame) -> Frame {
        self.entries.extend_from_slice(&other.entries);
        self
    }
}

impl StripField for Frame {
    fn strip_value(&self, z: Complex64) -> Result<Complex64> {
        self.value(z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionState {
    pub params: ConstructionParams,
    pub depth: usize,
    pub tol: f64,
    pub finalized_level: usize,
    records: Vec<NodeRecord>,
    index: HashMap<Node, usize>,
}

impl ConstructionState {
    fn empty(params: ConstructionParams, depth: usize, tol: f64) -> Self {
        Self { params, depth, tol, finalized_level: 0, records: Vec::new(), index: HashMap::new() }
    }

    pub fn records(&self) -> &[NodeRecord] {
        &self.records
    }

    pub fn index_of(&self, node: &Node) -> Result<usize> {
        self.index.get(node).copied().ok_or_else(|| Error::InvalidNode(node.to_string()))
    }

    pub fn record(&self, node: &Node) -> Result<&NodeRecord> {
        Ok(&self.records[self.index_of(node)?])
    }

    pub fn level_indices(&self, level: usize) -> Vec<usize> {
        (0..self.records.len()).filter(|&i| self.records[i].level() == level).collect()
    }

    pub fn level_counts(&self) -> Vec<usize> {
        (1..=self.depth).map(|l| self.level_indices(l).len()).collect()
    }

    pub fn scale_of(&self, idx: usize) -> f64 {
        self.params.scale(self.records[idx].level())
    }

    pub fn shift_of(&self, idx: usize) -> Result<f64> {
        self.records[idx].shift.ok_or_else(|| Error::NotFinalized(self.records[idx].node.to_string()))
    }

    /// Chain of record indices from the level-1 ancestor down to `idx`.
    fn path(&self, idx: usize) -> Vec<usize> {
        let mut p = vec![idx];
        let mut cur = idx;
        while let Some(par) = self.records[cur].parent {
            p.push(par);
            cur = par;
        }
        p.reverse();
        p
    }

    /// `c(a) − c(b)` accumulated through the tree, smallest terms first.
    pub fn center_diff(&self, a: usize, b: usize) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let pa = self.path(a);
        let pb = self.path(b);
        let q = pa.iter().zip(&pb).take_while(|(x, y)| x == y).count();
        let n = self.params.n as f64;
        let j = |i: usize| self.records[i].node.last() as f64;
        // (level, signed term) pairs below the first divergence
        let mut terms: Vec<(usize, f64)> = Vec::new();
        let first = match (pa.len() > q, pb.len() > q) {
            (true, true) => (j(pa[q]) - j(pb[q])) / n * self.params.gamma.powi(q as i32),
            (true, false) => self.shift_of(pa[q - 1])? + self.records[pa[q]].c_offset,
            (false, true) => -(self.shift_of(pb[q - 1])? + self.records[pb[q]].c_offset),
            (false, false) => 0.0,
        };
        for i in q + 1..pa.len() {
            terms.push((i, self.shift_of(pa[i - 1])? + self.records[pa[i]].c_offset));
        }
        for i in q + 1..pb.len() {
            terms.push((i, -(self.shift_of(pb[i - 1])? + self.records[pb[i]].c_offset)));
        }
        terms.sort_by(|x, y| y.0.cmp(&x.0));
        let tail: f64 = terms.iter().map(|t| t.1).sum();
        Ok(tail + first)
    }

    /// Absolute center, accurate to `f64` rounding of an O(1) number.
    pub fn center_abs(&self, idx: usize) -> Result<f64> {
        let p = self.path(idx);
        let mut terms: Vec<f64> = Vec::new();
        for i in 1..p.len() {
            terms.push(self.shift_of(p[i - 1])? + self.records[p[i]].c_offset);
        }
        let tail: f64 = terms.iter().rev().sum();
        Ok(self.records[p[0]].c_offset + tail)
    }

    pub fn x_abs(&self, idx: usize) -> Result<f64> {
        Ok(self.center_abs(idx)? + self.shift_of(idx)?)
    }

    /// Frame anchored at node `anchor` (scale `s(anchor)`), or the absolute
    /// frame (`c = 0`, `s = 1`) when `anchor` is `None`, over the nodes
    /// accepted by `include`.
    pub fn frame<F>(&self, anchor: Option<usize>, include: F) -> Result<Frame>
    where
        F: Fn(&NodeRecord) -> bool,
    {
        let mut entries = Vec::new();
        for (m, rec) in self.records.iter().enumerate() {
            if !include(rec) {
                continue;
            }
            let dc = match anchor {
                Some(a) => self.center_diff(m, a)?,
                None => self.center_abs(m)?,
            };
            entries.push((dc, self.scale_of(m)));
        }
        let scale = anchor.map_or(1.0, |a| self.scale_of(a));
        Ok(Frame { scale, beta1: self.params.beta1, entries })
    }

    /// Same as [`frame`](Self::frame) but anchored at an arbitrary point
    /// `c(anchor) + offset` with a custom scale.
    pub fn frame_at<F>(&self, anchor: usize, offset: f64, scale: f64, include: F) -> Result<Frame>
    where
        F: Fn(&NodeRecord) -> bool,
    {
        let mut f = self.frame(Some(anchor), include)?;
        for e in &mut f.entries {
            e.0 -= offset;
        }
        f.scale = scale;
        Ok(f)
    }

    /// Solves `Im P(X_{𝒦′(k)}, x) = 0` for `x` in the gap of node `k` by
    /// bisection. Returns `(x − c, residual)`.
    pub fn solve_center_root(&self, idx: usize) -> Result<(f64, f64)> {
        let level = self.records[idx].level();
        if self.finalized_level + 1 < level {
            return Err(Error::NotFinalized(self.records[idx].node.to_string()));
        }
        let frame = self.frame(Some(idx), |r| r.level() <= level)?;
        let f = |w: f64| -> Result<f64> { Ok(frame.value(Complex64::new(w, 0.0))?.im) };
        let b1 = self.params.beta1;
        let mut lo = -b1 / 4.0;
        let mut hi = b1 / 4.0;
        let (mut flo, mut fhi) = (f(lo)?, f(hi)?);
        if !(flo > 0.0 && fhi < 0.0) {
            lo = -b1 * (1.0 - 1e-9);
            hi = b1 * (1.0 - 1e-9);
            flo = f(lo)?;
            fhi = f(hi)?;
            if !(flo > 0.0 && fhi < 0.0) {
                return Err(Error::NoSignChange(self.records[idx].node.to_string()));
            }
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = f(mid)?;
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                flo = 0.0;
                fhi = 0.0;
                break;
            }
            if fm > 0.0 {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
        }
        let (w, res) = if flo.abs() <= fhi.abs() { (lo, flo.abs()) } else { (hi, fhi.abs()) };
        if !(res < self.tol) {
            return Err(Error::ToleranceNotReached { node: self.records[idx].node.to_string(), residual: res, tol: self.tol });
        }
        Ok((w * self.scale_of(idx), res))
    }

    fn push_level(&mut self, level: usize) {
        let n = self.params.n;
        if level == 1 {
            for j in 1..n {
                let node = Node::root_child(j);
                self.index.insert(node.clone(), self.records.len());
                self.records.push(NodeRecord { node, parent: None, c_offset: j as f64 / n as f64, shift: None, residual: f64::NAN });
            }
            return;
        }
        let g = self.params.gamma.powi(level as i32 - 1);
        for p in self.level_indices(level - 1) {
            for j in 1..n {
                let node = self.records[p].node.child(j);
                let c_offset = (j as f64 / n as f64 - 0.5) * g;
                self.index.insert(node.clone(), self.records.len());
                self.records.push(NodeRecord { node, parent: Some(p), c_offset, shift: None, residual: f64::NAN });
            }
        }
    }

    fn finalize_level(&mut self, level: usize) -> Result<()> {
        self.push_level(level);
        let idx = self.level_indices(level);
        let roots: Vec<Result<(f64, f64)>> = idx.par_iter().map(|&i| self.solve_center_root(i)).collect();
        for (i, r) in idx.into_iter().zip(roots) {
            let (shift, res) = r?;
            self.records[i].shift = Some(shift);
            self.records[i].residual = res;
        }
        self.finalized_level = level;
        Ok(())
    }

    /// `|x(k) − c(k)|` bound with constant `k_eps·ε`, i.e. `k_eps·εαβ₁γ^(l−1)`.
    pub fn centering_bound(&self, level: usize, k_eps: f64) -> f64 {
        let p = &self.params;
        k_eps * p.eps * p.alpha * p.beta1 * p.gamma.powi(level as i32 - 1)
    }

    /// Iterator over `(node, x − c, residual)` for finalized nodes.
    pub fn roots(&self) -> impl Iterator<Item = (&Node, f64, f64)> {
        self.records.iter().filter_map(|r| r.shift.map(|s| (&r.node, s, r.residual)))
    }

    pub fn max_residual(&self) -> f64 {
        self.records.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    /// Structural checks: level counts, ancestor disk nesting, children inside
    /// the parent gap, sibling separation and the 7ε centering bound.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.params.n as usize;
        for (l, &cnt) in self.level_counts().iter().enumerate() {
            if cnt != (n - 1).pow(l as u32 + 1) {
                return Err(Error::ConstraintViolated(format!("level {} holds (N-1)^l nodes", l + 1)));
            }
        }
        let b1 = self.params.beta1;
        for (i, rec) in self.records.iter().enumerate() {
            let l = rec.level();
            let shift = self.shift_of(i)?;
            if !(shift.abs() < self.centering_bound(l, 7.0)) {
                return Err(Error::ConstraintViolated(format!("|x - c| < 7 eps alpha beta1 gamma^(l-1) at {}", rec.node)));
            }
            if let Some(p) = rec.parent {
                let d = self.center_diff(i, p)?.abs();
                let sp = self.scale_of(p);
                if !(d + self.scale_of(i) < b1 * sp) {
                    return Err(Error::ConstraintViolated(format!("closure(J({})) inside B(parent)", rec.node)));
                }
                if !(d + b1 * self.scale_of(i) / 2.0 <= b1 * sp / 2.0) {
                    return Err(Error::ConstraintViolated(format!("ancestor disk nesting at {}", rec.node)));
                }
            }
        }
        for l in 1..=self.depth {
            let idx = self.level_indices(l);
            for w in idx.windows(2) {
                if self.records[w[0]].parent != self.records[w[1]].parent {
                    continue;
                }
                let gap = self.center_diff(w[1], w[0])?;
                if !(gap > 2.0 * self.params.scale(l)) {
                    return Err(Error::ConstraintViolated(format!("J({}) and J({}) disjoint", self.records[w[0]].node, self.records[w[1]].node)));
                }
            }
        }
        Ok(())
    }

    /// `X` truncated at the built depth, when all of its intervals are
    /// representable at absolute scale.
    pub fn x_truncated(&self) -> Result<IntervalSet> {
        let b1 = self.params.beta1;
        let mut v = Vec::new();
        for i in 0..self.records.len() {
            let c = self.center_abs(i)?;
            let s = self.scale_of(i);
            v.push((c - s, c - s * b1));
            v.push((c + s * b1, c + s));
        }
        IntervalSet::new(v)
    }

    /// Approximate absolute `closure(J(l))` for all nodes of a level.
    pub fn e_level_cover(&self, level: usize) -> Result<Vec<[f64; 2]>> {
        self.level_indices(level)
            .into_iter()
            .map(|i| {
                let c = self.center_abs(i)?;
                let s = self.scale_of(i);
                Ok([c - s, c + s])
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<StateJson> {
        let b1 = self.params.beta1;
        let mut nodes = BTreeMap::new();
        for (i, rec) in self.records.iter().enumerate() {
            let c = self.center_abs(i)?;
            let s = self.scale_of(i);
            let shift = self.shift_of(i)?;
            nodes.insert(
                rec.node.to_string(),
                NodeJson {
                    c_offset: rec.c_offset,
                    x_minus_c: shift,
                    scale: s,
                    c,
                    x: c + shift,
                    residual: rec.residual,
                    i_approx: vec![[c - s, c - s * b1], [c + s * b1, c + s]],
                    j_approx: [c - s, c + s],
                    b_approx: [c - s * b1, c + s * b1],
                },
            );
        }
        Ok(StateJson {
            params: self.params,
            depth: self.depth,
            tol: self.tol,
            finalized_level: self.finalized_level,
            manifest: self.level_counts(),
            nodes,
        })
    }

    pub fn from_json(js: &StateJson) -> Result<Self> {
        let p = js.params;
        let params = ConstructionParams::new(p.n, p.eps, p.beta1, p.gamma1)?;
        if params.alpha != p.alpha || params.gamma != p.gamma {
            return Err(Error::Serialization("derived alpha/gamma do not match params".into()));
        }
        let mut st = Self::empty(params, js.depth, js.tol);
        let mut nodes: Vec<(Node, &NodeJson)> = Vec::new();
        for (k, v) in &js.nodes {
            let node: Node = k.parse()?;
            Node::new(node.indices().to_vec(), params.n)?;
            nodes.push((node, v));
        }
        nodes.sort_by(|a, b| a.0.level().cmp(&b.0.level()).then(a.0.cmp(&b.0)));
        for l in 1..=js.depth {
            st.push_level(l);
        }
        if nodes.len() != st.records.len() {
            return Err(Error::Serialization(format!("expected {} nodes, found {}", st.records.len(), nodes.len())));
        }
        for (node, v) in nodes {
            let i = st.index_of(&node)?;
            if st.records[i].c_offset != v.c_offset {
                return Err(Error::Serialization(format!("c_offset mismatch at {node}")));
            }
            st.records[i].shift = Some(v.x_minus_c);
            st.records[i].residual = v.residual;
        }
        st.finalized_level = js.finalized_level;
        Ok(st)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeJson {
    pub c_offset: f64,
    pub x_minus_c: f64,
    pub scale: f64,
    pub c: f64,
    pub x: f64,
    pub residual: f64,
    #[serde(rename = "I")]
    pub i_approx: Vec<[f64; 2]>,
    #[serde(rename = "J")]
    pub j_approx: [f64; 2],
    #[serde(rename = "B")]
    pub b_approx: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub params: ConstructionParams,
    pub depth: usize,
    pub tol: f64,
    pub finalized_level: usize,
    pub manifest: Vec<usize>,
    pub nodes: BTreeMap<String, NodeJson>,
}

/// Builds levels `1..=depth`, solving every centering root.
pub fn build_construction(params: ConstructionParams, depth: usize, tol: f64) -> Result<ConstructionState> {
    if depth < 1 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    if depth > params.max_depth() {
        return Err(Error::InvalidParameter(format!("depth {depth} exceeds representable depth {}", params.max_depth())));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let mut st = ConstructionState::empty(params, depth, tol);
    for level in 1..=depth {
        st.finalize_level(level)?;
    }
    Ok(st)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_root_is_center() {
        let eps = 1.0 / 128.0;
        let p = ConstructionParams::new(4, eps, eps, eps * eps / 2.0).unwrap();
        let st = build_construction(p, 1, 1e-12).unwrap();
        let i = st.index_of(&"2".parse().unwrap()).unwrap();
        assert!(st.shift_of(i).unwrap().abs() < 1e-18);
        assert_eq!(st.center_abs(i).unwrap(), 0.5);
    }

    #[test]
    fn child_center_formula() {
        let p = ConstructionParams::reference();
        let st = build_construction(p, 2, 1e-12).unwrap();
        let k = st.index_of(&"2".parse().unwrap()).unwrap();
        let kk = st.index_of(&"2.3".parse().unwrap()).unwrap();
        let expected = st.shift_of(k).unwrap() + (3.0 / 5.0 - 0.5) * p.gamma;
        assert_eq!(st.center_diff(kk, k).unwrap(), expected);
        assert_eq!(st.center_diff(k, kk).unwrap(), -expected);
    }

    #[test]
    fn center_diff_matches_absolute_at_level_one() {
        let st = build_construction(ConstructionParams::reference(), 1, 1e-12).unwrap();
        let d = st.center_diff(3, 0).unwrap();
        assert!((d - 0.6).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let st = build_construction(ConstructionParams::reference(), 2, 1e-12).unwrap();
        let js = st.to_json().unwrap();
        let text = serde_json::to_string(&js).unwrap();
        let back: StateJson = serde_json::from_str(&text).unwrap();
        let st2 = ConstructionState::from_json(&back).unwrap();
        assert_eq!(st, st2);
        assert!(js.nodes.contains_key("2.3"));
    }
}
