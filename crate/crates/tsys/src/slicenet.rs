//! Elementary H/V step matrices, slice transfer matrices built from one
//! unit-width column of a boundary, products of slices, and the weighted
//! layered networks whose path partition functions realize matrix entries.

use crate::boundary::Boundary;
use crate::laurent::LaurentPoly;
use crate::matrix::PolyMatrix;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SliceError {
    #[error("matrix entry is not a Laurent polynomial (non-monomial label in a quotient)")]
    EntryNotLaurent,
    #[error("bad slice range: need j0 < j1")]
    BadRange,
    #[error("diagonal choice given at square {0}, which is not a tetrahedron")]
    ChoiceAtParallelogram(i32),
    #[error("operation needs single-slice provenance (factors per level + diagonals)")]
    NoProvenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    H,
    V,
}

/// Diagonal drawn in square q_alpha when decomposing a slice into triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagonal {
    NwSe,
    SwNe,
}

impl Diagonal {
    pub fn flipped(self) -> Diagonal {
        match self {
            Diagonal::NwSe => Diagonal::SwNe,
            Diagonal::SwNe => Diagonal::NwSe,
        }
    }
}

/// One elementary step matrix embedded at rows/cols (level, level+1) of the
/// (r+1)x(r+1) identity. H args are (a,b,u) with core [[1,0],[u/b,a/b]];
/// V args are (x,a,b) with core [[a/b,x/b],[0,1]].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryFactor {
    pub kind: FactorKind,
    pub level: i32,
    pub args: [LaurentPoly; 3],
    size: usize,
}

impl ElementaryFactor {
    pub fn h(size: usize, level: i32, a: LaurentPoly, b: LaurentPoly, u: LaurentPoly) -> Self {
        ElementaryFactor { kind: FactorKind::H, level, args: [a, b, u], size }
    }

    pub fn v(size: usize, level: i32, x: LaurentPoly, a: LaurentPoly, b: LaurentPoly) -> Self {
        ElementaryFactor { kind: FactorKind::V, level, args: [x, a, b], size }
    }

    /// The (a,b) pair of boundary data on the factor's own level.
    pub fn principal(&self) -> (&LaurentPoly, &LaurentPoly) {
        match self.kind {
            FactorKind::H => (&self.args[0], &self.args[1]),
            FactorKind::V => (&self.args[1], &self.args[2]),
        }
    }

    /// The neighbor-level argument: u for H, x for V.
    pub fn neighbor_arg(&self) -> &LaurentPoly {
        match self.kind {
            FactorKind::H => &self.args[2],
            FactorKind::V => &self.args[0],
        }
    }

    /// The nontrivial 2x2 block, row-major.
    pub fn core(&self) -> Result<[LaurentPoly; 4], SliceError> {
        let div = |p: &LaurentPoly, q: &LaurentPoly| {
            p.exact_div(q).map_err(|_| SliceError::EntryNotLaurent)
        };
        match self.kind {
            FactorKind::H => {
                let (a, b, u) = (&self.args[0], &self.args[1], &self.args[2]);
                Ok([LaurentPoly::one(), LaurentPoly::zero(), div(u, b)?, div(a, b)?])
            }
            FactorKind::V => {
                let (x, a, b) = (&self.args[0], &self.args[1], &self.args[2]);
                Ok([div(a, b)?, div(x, b)?, LaurentPoly::zero(), LaurentPoly::one()])
            }
        }
    }

    pub fn matrix(&self) -> Result<PolyMatrix, SliceError> {
        let core = self.core()?;
        let mut m = PolyMatrix::identity(self.size);
        let i = (self.level - 1) as usize;
        m.set(i, i, core[0].clone());
        m.set(i, i + 1, core[1].clone());
        m.set(i + 1, i, core[2].clone());
        m.set(i + 1, i + 1, core[3].clone());
        Ok(m)
    }
}

/// A product of elementary factors together with its provenance. Diagonals
/// are present only for single slices (one factor per level), where they
/// record the triangle decomposition that produced the factor list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceMatrix {
    mat: PolyMatrix,
    factors: Vec<ElementaryFactor>, // in product order, leftmost first
    diagonals: Option<Vec<Diagonal>>, // per square alpha = 1..r-1
}

impl SliceMatrix {
    pub fn identity(size: usize) -> Self {
        SliceMatrix { mat: PolyMatrix::identity(size), factors: Vec::new(), diagonals: None }
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.mat
    }

    /// Entry with 1-based indices, matching the T_{m,p} notation.
    pub fn entry(&self, row: usize, col: usize) -> &LaurentPoly {
        self.mat.get(row - 1, col - 1)
    }

    pub fn size(&self) -> usize {
        self.mat.size()
    }

    pub fn factors(&self) -> &[ElementaryFactor] {
        &self.factors
    }

    pub fn diagonals(&self) -> Option<&[Diagonal]> {
        self.diagonals.as_deref()
    }

    pub fn mul(&self, other: &SliceMatrix) -> SliceMatrix {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        SliceMatrix { mat: self.mat.mul(&other.mat), factors, diagonals: None }
    }

    fn factor_at_level(&self, level: i32) -> Option<&ElementaryFactor> {
        self.factors.iter().find(|f| f.level == level)
    }

    /// The involutive anti-automorphism with V* = H: mirrors the slice in a
    /// vertical axis. Factor order reverses; each factor flips kind and swaps
    /// its principal pair; the neighbor argument is taken from the adjacent
    /// level's principal pair, on the side selected by the recorded diagonal.
    /// Needs single-slice provenance.
    pub fn star(&self) -> Result<SliceMatrix, SliceError> {
        let diagonals = self.diagonals.as_ref().ok_or(SliceError::NoProvenance)?;
        let r = self.size() - 1;
        let diag = |alpha: i32| diagonals[(alpha - 1) as usize];
        let starred = |f: &ElementaryFactor| -> Result<ElementaryFactor, SliceError> {
            let (a, b) = f.principal();
            let alpha = f.level;
            Ok(match f.kind {
                FactorKind::H => {
                    // Becomes V at the same level; x from level alpha-1.
                    let x = if alpha == 1 {
                        LaurentPoly::one()
                    } else {
                        let nb = self.factor_at_level(alpha - 1).ok_or(SliceError::NoProvenance)?;
                        let (na, nbb) = nb.principal();
                        match diag(alpha - 1) {
                            Diagonal::SwNe => na.clone(),
                            Diagonal::NwSe => nbb.clone(),
                        }
                    };
                    ElementaryFactor::v(f.size, alpha, x, b.clone(), a.clone())
                }
                FactorKind::V => {
                    // Becomes H at the same level; u from level alpha+1.
                    let u = if alpha as usize == r {
                        LaurentPoly::one()
                    } else {
                        let nb = self.factor_at_level(alpha + 1).ok_or(SliceError::NoProvenance)?;
                        let (na, nbb) = nb.principal();
                        match diag(alpha) {
                            Diagonal::SwNe => nbb.clone(),
                            Diagonal::NwSe => na.clone(),
                        }
                    };
                    ElementaryFactor::h(f.size, alpha, b.clone(), a.clone(), u)
                }
            })
        };
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in self.factors.iter().rev() {
            factors.push(starred(f)?);
        }
        let mat = product(self.size(), &factors)?;
        Ok(SliceMatrix {
            mat,
            factors,
            diagonals: Some(diagonals.iter().map(|d| d.flipped()).collect()),
        })
    }
}

fn product(size: usize, factors: &[ElementaryFactor]) -> Result<PolyMatrix, SliceError> {
    let mut mat = PolyMatrix::identity(size);
    for f in factors {
        mat = mat.mul(&f.matrix()?);
    }
    Ok(mat)
}

/// Slice decomposition for the column pair (j, j+1) of a boundary: per-level
/// kinds from the height steps s_alpha, diagonals per square, factor
/// arguments and multiplication order from the diagonals.
fn slice_plan(
    b: &Boundary,
    j: i64,
    overrides: Option<&BTreeMap<i32, Diagonal>>,
) -> Result<(Vec<ElementaryFactor>, Vec<Diagonal>), SliceError> {
    let r = b.rank();
    let size = (r + 1) as usize;
    let s = |alpha: i32| b.height(alpha, j + 1) - b.height(alpha, j);
    let mut diagonals = Vec::new();
    for alpha in 1..r {
        let tetra = b.classify_square(alpha, j).is_tetrahedron();
        let chosen = overrides.and_then(|m| m.get(&alpha).copied());
        if let Some(d) = chosen {
            if !tetra {
                return Err(SliceError::ChoiceAtParallelogram(alpha));
            }
            diagonals.push(d);
        } else if tetra {
            diagonals.push(Diagonal::NwSe);
        } else {
            let l = b.height(alpha + 1, j) - b.height(alpha, j);
            diagonals.push(if l != s(alpha) { Diagonal::SwNe } else { Diagonal::NwSe });
        }
    }
    if let Some(m) = overrides {
        if let Some(alpha) = m.keys().find(|a| **a < 1 || **a >= r) {
            return Err(SliceError::ChoiceAtParallelogram(*alpha));
        }
    }
    let diag = |alpha: i32| diagonals[(alpha - 1) as usize];
    // Product order: X_alpha goes to the left of the accumulated product when
    // the square below it has a SW-NE diagonal, to the right otherwise.
    let mut order: std::collections::VecDeque<ElementaryFactor> = std::collections::VecDeque::new();
    for alpha in 1..=r {
        let a = b.label(alpha, j);
        let bl = b.label(alpha, j + 1);
        let factor = if s(alpha) == 1 {
            let u = if alpha == r {
                LaurentPoly::one()
            } else {
                match diag(alpha) {
                    Diagonal::NwSe => b.label(alpha + 1, j),
                    Diagonal::SwNe => b.label(alpha + 1, j + 1),
                }
            };
            ElementaryFactor::h(size, alpha, a, bl, u)
        } else {
            let x = if alpha == 1 {
                LaurentPoly::one()
            } else {
                match diag(alpha - 1) {
                    Diagonal::NwSe => b.label(alpha - 1, j + 1),
                    Diagonal::SwNe => b.label(alpha - 1, j),
                }
            };
            ElementaryFactor::v(size, alpha, x, a, bl)
        };
        if alpha == 1 || diag(alpha - 1) == Diagonal::NwSe {
            order.push_back(factor);
        } else {
            order.push_front(factor);
        }
    }
    Ok((order.into(), diagonals))
}

pub fn slice_matrix(b: &Boundary, j: i64) -> Result<SliceMatrix, SliceError> {
    let (factors, diagonals) = slice_plan(b, j, None)?;
    let mat = product((b.rank() + 1) as usize, &factors)?;
    Ok(SliceMatrix { mat, factors, diagonals: Some(diagonals) })
}

pub fn slice_matrix_with_diagonals(
    b: &Boundary,
    j: i64,
    choices: &BTreeMap<i32, Diagonal>,
) -> Result<SliceMatrix, SliceError> {
    let (factors, diagonals) = slice_plan(b, j, Some(choices))?;
    let mat = product((b.rank() + 1) as usize, &factors)?;
    Ok(SliceMatrix { mat, factors, diagonals: Some(diagonals) })
}

/// Ordered product slice(j0) * slice(j0+1) * ... * slice(j1-1).
pub fn transfer_product(b: &Boundary, j0: i64, j1: i64) -> Result<SliceMatrix, SliceError> {
    if j0 >= j1 {
        return Err(SliceError::BadRange);
    }
    let mut acc = slice_matrix(b, j0)?;
    for j in j0 + 1..j1 {
        acc = acc.mul(&slice_matrix(b, j)?);
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetEdge {
    pub layer: usize, // factor layer, 0-based, left to right
    pub from: usize,  // wire 1..=r+1 on the left of the layer
    pub to: usize,    // wire on the right
    pub weight: LaurentPoly,
}

/// Layered weighted graph: vertices (t, wire) for t = 0..=layer_count, edges
/// only between consecutive vertex lines. Entry (m,p) of the underlying
/// matrix product equals the sum over paths from (0,m) to (layer_count,p)
/// of edge-weight products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    rank: i32,
    j0: i64,
    j1: i64,
    edges: Vec<NetEdge>,
    layer_count: usize,
    factors_per_slice: usize,
}

pub fn build_network(b: &Boundary, j0: i64, j1: i64) -> Result<Network, SliceError> {
    if j0 > j1 {
        return Err(SliceError::BadRange);
    }
    let r = b.rank();
    let wires = (r + 1) as usize;
    let mut edges = Vec::new();
    let mut layer = 0usize;
    for j in j0..j1 {
        let slice = slice_matrix(b, j)?;
        for f in slice.factors() {
            let core = f.core()?;
            let lo = f.level as usize; // wires lo, lo+1 carry the block
            for w in 1..=wires {
                if w != lo && w != lo + 1 {
                    edges.push(NetEdge { layer, from: w, to: w, weight: LaurentPoly::one() });
                }
            }
            for (idx, weight) in core.into_iter().enumerate() {
                if weight.is_zero() {
                    continue;
                }
                let (dr, dc) = (idx / 2, idx % 2);
                edges.push(NetEdge { layer, from: lo + dr, to: lo + dc, weight });
            }
            layer += 1;
        }
    }
    edges.sort_by_key(|e| (e.layer, e.from, e.to));
    Ok(Network { rank: r, j0, j1, edges, layer_count: layer, factors_per_slice: r as usize })
}

impl Network {
    pub fn rank(&self) -> i32 {
        self.rank
    }

    pub fn range(&self) -> (i64, i64) {
        (self.j0, self.j1)
    }

    pub fn layer_count(&self) -> usize {
        self.layer_count
    }

    pub fn edges(&self) -> &[NetEdge] {
        &self.edges
    }

    /// Vertex line index of the slice boundary at column j.
    pub fn column_line(&self, j: i64) -> usize {
        assert!(j >= self.j0 && j <= self.j1);
        (j - self.j0) as usize * self.factors_per_slice
    }

    fn edges_at(&self, layer: usize) -> impl Iterator<Item = &NetEdge> {
        let lo = self.edges.partition_point(|e| e.layer < layer);
        let hi = self.edges.partition_point(|e| e.layer <= layer);
        self.edges[lo..hi].iter()
    }

    /// Partition function of all paths from wire m on line t0 to wire p on
    /// line t1 (dynamic programming, no disjointness constraints).
    pub fn path_sum(&self, t0: usize, m: usize, t1: usize, p: usize) -> LaurentPoly {
        assert!(t0 <= t1 && t1 <= self.layer_count);
        let wires = (self.rank + 1) as usize;
        let mut state = vec![LaurentPoly::zero(); wires + 1];
        state[m] = LaurentPoly::one();
        for layer in t0..t1 {
            let mut next = vec![LaurentPoly::zero(); wires + 1];
            for e in self.edges_at(layer) {
                if !state[e.from].is_zero() {
                    next[e.to] = next[e.to].add(&state[e.from].mul(&e.weight));
                }
            }
            state = next;
        }
        state[p].clone()
    }

    /// All paths from (t0, m) to (t1, p) as wire sequences with weights.
    pub fn enumerate_paths(
        &self,
        t0: usize,
        m: usize,
        t1: usize,
        p: usize,
    ) -> Vec<(Vec<usize>, LaurentPoly)> {
        let mut out = Vec::new();
        let mut trail = vec![m];
        self.walk(t0, m, t1, p, LaurentPoly::one(), &mut trail, &mut out);
        out
    }

    fn walk(
        &self,
        t: usize,
        w: usize,
        t1: usize,
        p: usize,
        weight: LaurentPoly,
        trail: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, LaurentPoly)>,
    ) {
        if t == t1 {
            if w == p {
                out.push((trail.clone(), weight));
            }
            return;
        }
        for e in self.edges_at(t) {
            if e.from == w {
                trail.push(e.to);
                self.walk(t + 1, e.to, t1, p, weight.mul(&e.weight), trail, out);
                trail.pop();
            }
        }
    }

    pub fn export_dot(&self) -> String {
        let mut s = String::new();
        writeln!(s, "digraph network {{").unwrap();
        writeln!(s, "  rankdir=LR;").unwrap();
        for t in 0..=self.layer_count {
            for w in 1..=(self.rank + 1) as usize {
                writeln!(s, "  v{}_{} [label=\"{},{}\"];", t, w, t, w).unwrap();
            }
        }
        for e in &self.edges {
            writeln!(
                s,
                "  v{}_{} -> v{}_{} [label=\"{}\"];",
                e.layer, e.from, e.layer + 1, e.to, e.weight
            )
            .unwrap();
        }
        writeln!(s, "}}").unwrap();
        s
    }

    pub fn export_json(&self) -> String {
        let mut root = serde_json::Map::new();
        root.insert("rank".into(), serde_json::Value::from(self.rank));
        root.insert("j0".into(), serde_json::Value::from(self.j0));
        root.insert("j1".into(), serde_json::Value::from(self.j1));
        root.insert("layers".into(), serde_json::Value::from(self.layer_count));
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| {
                let mut o = serde_json::Map::new();
                o.insert("layer".into(), serde_json::Value::from(e.layer));
                o.insert("from".into(), serde_json::Value::from(e.from));
                o.insert("to".into(), serde_json::Value::from(e.to));
                o.insert("weight".into(), serde_json::Value::from(e.weight.to_string()));
                serde_json::Value::Object(o)
            })
            .collect();
        root.insert("edges".into(), serde_json::Value::from(edges));
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(root)).unwrap();
        text.push('\n');
        text
    }
}
