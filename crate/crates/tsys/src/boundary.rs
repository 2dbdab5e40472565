//! Boundaries of the T-system as stepped-surface height functions k_{a,j}
//! with Laurent-polynomial labels, plus the six-vertex dual view, mutations,
//! and 2-periodic cylinders indexed by Motzkin paths.

use crate::laurent::{LaurentError, LaurentPoly, VarId};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundaryError {
    #[error("parity violation at ({alpha},{j}): layer + column + height must be even")]
    ParityViolation { alpha: i32, j: i64 },
    #[error("step violation at ({alpha},{j}): adjacent heights must differ by 1")]
    StepViolation { alpha: i32, j: i64 },
    #[error("window edge mismatch at ({alpha},{j}): staircase extension is not seamless")]
    WindowEdgeMismatch { alpha: i32, j: i64 },
    #[error("zero label at ({alpha},{j})")]
    ZeroLabel { alpha: i32, j: i64 },
    #[error("label index ({alpha},{j}) outside layers/window")]
    LabelOutOfWindow { alpha: i32, j: i64 },
    #[error("malformed height table")]
    BadShape,
    #[error("vertex ({alpha},{j}) is not mutable: {reason}")]
    NotMutable { alpha: i32, j: i64, reason: String },
    #[error("exchange-relation division failed; boundary state is inconsistent")]
    InternalDivisionFailure,
    #[error("not a Motzkin path: steps must be in {{-1,0,1}}")]
    InvalidMotzkin,
    #[error("arrow configuration is inconsistent (violates the height rules)")]
    InconsistentArrows,
    #[error("bad boundary file: {0}")]
    BadFile(String),
}

/// What lives outside the finite window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Extension {
    /// Basic staircase k = (alpha + j) mod 2, atomic labels.
    Staircase,
    /// Repeat the window with period 2 (Q-system cylinders).
    Periodic,
}

/// Local square configuration between layers alpha, alpha+1 and columns
/// j, j+1: two tetrahedra (A, B) and four parallelograms (C..F).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SquareType {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl SquareType {
    pub fn is_tetrahedron(self) -> bool {
        matches!(self, SquareType::A | SquareType::B)
    }
}

impl fmt::Display for SquareType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationDirection {
    Forward,
    Backward,
}

#[derive(Debug, Clone)]
pub struct Boundary {
    rank: i32,
    j_min: i64,
    j_max: i64,
    heights: Vec<Vec<i64>>, // [alpha-1][j - j_min]
    labels: BTreeMap<(i32, i64), LaurentPoly>, // only non-default entries
    extension: Extension,
    // Mutation sites in order, kept only while every non-default label came
    // from a mutation; lets the solver undo label substitution one exchange
    // at a time (each step exact by the Laurent property) instead of in one
    // expensive compounded pass.
    history: Vec<(i32, i64)>,
}

impl PartialEq for Boundary {
    fn eq(&self, other: &Self) -> bool {
        // The history is a computation hint, not part of the surface.
        self.rank == other.rank
            && self.j_min == other.j_min
            && self.j_max == other.j_max
            && self.heights == other.heights
            && self.labels == other.labels
            && self.extension == other.extension
    }
}

impl Eq for Boundary {}

fn staircase_height(alpha: i32, j: i64) -> i64 {
    (alpha as i64 + j).rem_euclid(2)
}

impl Boundary {
    pub fn rank(&self) -> i32 {
        self.rank
    }

    pub fn window(&self) -> (i64, i64) {
        (self.j_min, self.j_max)
    }

    pub fn is_periodic(&self) -> bool {
        self.extension == Extension::Periodic
    }

    /// Column folded into the window (identity for staircase extension).
    fn key_column(&self, j: i64) -> i64 {
        match self.extension {
            Extension::Staircase => j,
            Extension::Periodic => self.j_min + (j - self.j_min).rem_euclid(2),
        }
    }

    /// Height k_{alpha,j}; alpha must be in 1..=rank. Columns outside the
    /// window use the extension.
    pub fn height(&self, alpha: i32, j: i64) -> i64 {
        assert!(alpha >= 1 && alpha <= self.rank, "layer out of range");
        let jk = self.key_column(j);
        if jk < self.j_min || jk > self.j_max {
            staircase_height(alpha, j)
        } else {
            self.heights[(alpha - 1) as usize][(jk - self.j_min) as usize]
        }
    }

    /// Label at (alpha,j); the frozen layers 0 and rank+1 give 1.
    pub fn label(&self, alpha: i32, j: i64) -> LaurentPoly {
        if alpha == 0 || alpha == self.rank + 1 {
            return LaurentPoly::one();
        }
        assert!(alpha >= 1 && alpha <= self.rank, "layer out of range");
        let jk = self.key_column(j);
        self.labels
            .get(&(alpha, jk))
            .cloned()
            .unwrap_or_else(|| LaurentPoly::atom(alpha, jk))
    }

    /// The stored non-default labels.
    pub fn custom_labels(&self) -> &BTreeMap<(i32, i64), LaurentPoly> {
        &self.labels
    }

    /// Mutation sites that produced this boundary, oldest first. Non-empty
    /// only when mutations are the sole source of non-default labels, so a
    /// solver may undo the label substitution one exchange at a time.
    pub fn mutation_history(&self) -> &[(i32, i64)] {
        &self.history
    }

    pub fn basic_staircase(rank: i32, j_min: i64, j_max: i64) -> Boundary {
        assert!(rank >= 1 && j_min <= j_max);
        let heights = (1..=rank)
            .map(|alpha| (j_min..=j_max).map(|j| staircase_height(alpha, j)).collect())
            .collect();
        Boundary {
            rank,
            j_min,
            j_max,
            heights,
            labels: BTreeMap::new(),
            extension: Extension::Staircase,
            history: Vec::new(),
        }
    }

    /// Checks all stepped-surface invariants on a raw height table.
    pub fn validate(
        rank: i32,
        j_min: i64,
        heights: Vec<Vec<i64>>,
        labels: BTreeMap<(i32, i64), LaurentPoly>,
    ) -> Result<Boundary, BoundaryError> {
        if rank < 1 || heights.len() != rank as usize {
            return Err(BoundaryError::BadShape);
        }
        let width = heights[0].len();
        if width == 0 || heights.iter().any(|row| row.len() != width) {
            return Err(BoundaryError::BadShape);
        }
        let j_max = j_min + width as i64 - 1;
        let at = |alpha: i32, j: i64| heights[(alpha - 1) as usize][(j - j_min) as usize];
        for alpha in 1..=rank {
            for j in j_min..=j_max {
                let k = at(alpha, j);
                if (alpha as i64 + j + k).rem_euclid(2) != 0 {
                    return Err(BoundaryError::ParityViolation { alpha, j });
                }
                if j < j_max && (at(alpha, j + 1) - k).abs() != 1 {
                    return Err(BoundaryError::StepViolation { alpha, j });
                }
                if alpha < rank && (at(alpha + 1, j) - k).abs() != 1 {
                    return Err(BoundaryError::StepViolation { alpha, j });
                }
            }
            // The staircase extension must continue the surface with unit
            // steps across both window edges.
            if (at(alpha, j_min) - staircase_height(alpha, j_min - 1)).abs() != 1 {
                return Err(BoundaryError::WindowEdgeMismatch { alpha, j: j_min });
            }
            if (at(alpha, j_max) - staircase_height(alpha, j_max + 1)).abs() != 1 {
                return Err(BoundaryError::WindowEdgeMismatch { alpha, j: j_max });
            }
        }
        let mut stored = BTreeMap::new();
        for ((alpha, j), poly) in labels {
            if alpha < 1 || alpha > rank || j < j_min || j > j_max {
                return Err(BoundaryError::LabelOutOfWindow { alpha, j });
            }
            if poly.is_zero() {
                return Err(BoundaryError::ZeroLabel { alpha, j });
            }
            if poly != LaurentPoly::atom(alpha, j) {
                stored.insert((alpha, j), poly);
            }
        }
        Ok(Boundary {
            rank,
            j_min,
            j_max,
            heights,
            labels: stored,
            extension: Extension::Staircase,
            history: Vec::new(),
        })
    }

    /// Two-column cylinder for Q-system initial data; labels are R[alpha,k].
    pub fn motzkin_to_boundary(m: &MotzkinPath) -> Boundary {
        let rank = m.len() as i32;
        let mut heights = Vec::new();
        let mut labels = BTreeMap::new();
        for alpha in 1..=rank {
            let ma = m.entries()[(alpha - 1) as usize];
            let mut row = Vec::new();
            for j in 0..2i64 {
                let k = ma + (ma + alpha as i64 + j).rem_euclid(2);
                row.push(k);
                labels.insert((alpha, j), LaurentPoly::var(VarId::indexed("R", alpha as i64, k)));
            }
            heights.push(row);
        }
        Boundary { rank, j_min: 0, j_max: 1, heights, labels, extension: Extension::Periodic, history: Vec::new() }
    }

    /// Same heights, default atomic labels. Solvers compute here and
    /// substitute the real labels afterwards.
    pub fn shadow(&self) -> Boundary {
        Boundary { labels: BTreeMap::new(), history: Vec::new(), ..self.clone() }
    }

    /// Substitution map sending this boundary's default atoms to its actual
    /// labels (empty when all labels are atomic).
    pub fn label_substitution(&self) -> BTreeMap<VarId, LaurentPoly> {
        self.labels
            .iter()
            .map(|((alpha, j), poly)| (VarId::atom(*alpha, *j), poly.clone()))
            .collect()
    }

    pub fn classify_square(&self, alpha: i32, j: i64) -> SquareType {
        assert!(alpha >= 1 && alpha < self.rank, "square layer out of range");
        let l = self.height(alpha + 1, j) - self.height(alpha, j);
        let rt = self.height(alpha + 1, j + 1) - self.height(alpha, j + 1);
        let bt = self.height(alpha, j + 1) - self.height(alpha, j);
        match (l, rt, bt) {
            (1, -1, _) => SquareType::A,
            (-1, 1, _) => SquareType::B,
            (1, 1, 1) => SquareType::C,
            (1, 1, -1) => SquareType::D,
            (-1, -1, 1) => SquareType::E,
            (-1, -1, -1) => SquareType::F,
            _ => unreachable!("invalid square on a validated boundary"),
        }
    }

    /// Materializes staircase columns so that j lies inside the window.
    fn extend_to(&mut self, j: i64) {
        assert_eq!(self.extension, Extension::Staircase);
        while j < self.j_min {
            self.j_min -= 1;
            for (a, row) in self.heights.iter_mut().enumerate() {
                row.insert(0, staircase_height(a as i32 + 1, self.j_min));
            }
        }
        while j > self.j_max {
            self.j_max += 1;
            for (a, row) in self.heights.iter_mut().enumerate() {
                row.push(staircase_height(a as i32 + 1, self.j_max));
            }
        }
    }

    /// Octahedron mutation at (alpha,j): height moves by +-2, the label is
    /// replaced through the exchange relation y * y' = x*z + b*u.
    pub fn mutate(
        &self,
        alpha: i32,
        j: i64,
        direction: MutationDirection,
    ) -> Result<(Boundary, LaurentPoly), BoundaryError> {
        let fail = |reason: &str| BoundaryError::NotMutable {
            alpha,
            j,
            reason: reason.to_string(),
        };
        if self.extension == Extension::Periodic {
            return Err(fail("periodic boundaries are fixed"));
        }
        if alpha < 1 || alpha > self.rank {
            return Err(fail("layer out of range"));
        }
        let k = self.height(alpha, j);
        let mut neighbors = vec![self.height(alpha, j - 1), self.height(alpha, j + 1)];
        if alpha > 1 {
            neighbors.push(self.height(alpha - 1, j));
        }
        if alpha < self.rank {
            neighbors.push(self.height(alpha + 1, j));
        }
        let (ok, delta) = match direction {
            MutationDirection::Forward => (neighbors.iter().all(|n| *n > k), 2),
            MutationDirection::Backward => (neighbors.iter().all(|n| *n < k), -2),
        };
        if !ok {
            return Err(fail(match direction {
                MutationDirection::Forward => "not a strict local minimum",
                MutationDirection::Backward => "not a strict local maximum",
            }));
        }
        let numer = self
            .label(alpha, j - 1)
            .mul(&self.label(alpha, j + 1))
            .add(&self.label(alpha - 1, j).mul(&self.label(alpha + 1, j)));
        let new_label = numer
            .exact_div(&self.label(alpha, j))
            .map_err(|_| BoundaryError::InternalDivisionFailure)?;
        let mut out = self.clone();
        out.extend_to(j);
        out.heights[(alpha - 1) as usize][(j - out.j_min) as usize] = k + delta;
        if new_label == LaurentPoly::atom(alpha, j) {
            out.labels.remove(&(alpha, j));
        } else {
            out.labels.insert((alpha, j), new_label.clone());
        }
        // The undo chain is only sound when every non-default label came
        // from a mutation; a lineage that started with custom labels keeps
        // an empty history and falls back to compounded substitution.
        if !self.history.is_empty() || self.labels.is_empty() {
            out.history.push((alpha, j));
        }
        Ok((out, new_label))
    }

    /// The layer reflection alpha -> rank+1-alpha (with the column shift that
    /// keeps parity). Labels are materialized on window +- extra columns, so
    /// solving the result yields polynomials in this boundary's own atoms.
    pub fn layer_flipped(&self, extra: i64) -> Boundary {
        assert_eq!(self.extension, Extension::Staircase);
        let delta = ((self.rank + 1) % 2) as i64;
        let j_min = self.j_min + delta - extra;
        let j_max = self.j_max + delta + extra;
        let mut heights = Vec::new();
        let mut labels = BTreeMap::new();
        for alpha in 1..=self.rank {
            let mut row = Vec::new();
            for j in j_min..=j_max {
                row.push(self.height(self.rank + 1 - alpha, j - delta));
                let lab = self.label(self.rank + 1 - alpha, j - delta);
                if lab != LaurentPoly::atom(alpha, j) {
                    labels.insert((alpha, j), lab);
                }
            }
            heights.push(row);
        }
        Boundary { rank: self.rank, j_min, j_max, heights, labels, extension: Extension::Staircase, history: Vec::new() }
    }

    /// Maps the flipped point back: (alpha,j,k) here corresponds to
    /// (rank+1-alpha, j+shift, k) on layer_flipped output.
    pub fn flip_column_shift(&self) -> i64 {
        ((self.rank + 1) % 2) as i64
    }

    pub fn to_six_vertex(&self, j_lo: i64, j_hi: i64) -> SixVertexView {
        assert!(j_lo <= j_hi);
        let mut horizontal = BTreeMap::new();
        let mut vertical = BTreeMap::new();
        for alpha in 1..self.rank {
            for j in j_lo..=j_hi {
                // Right-pointing arrow has the smaller face on its right
                // (south); type e edges step up between layers.
                horizontal.insert(
                    (alpha, j),
                    self.height(alpha + 1, j) - self.height(alpha, j) == 1,
                );
            }
        }
        for alpha in 1..=self.rank {
            for j in j_lo..j_hi {
                // Upward arrow has the smaller face on its right (east).
                vertical.insert(
                    (alpha, j),
                    self.height(alpha, j + 1) - self.height(alpha, j) == -1,
                );
            }
        }
        SixVertexView { rank: self.rank, j_lo, j_hi, horizontal, vertical }
    }

    pub fn to_file_string(&self) -> String {
        assert_eq!(self.extension, Extension::Staircase, "only windowed boundaries serialize");
        let mut root = serde_json::Map::new();
        root.insert("rank".into(), serde_json::Value::from(self.rank));
        root.insert("j_min".into(), serde_json::Value::from(self.j_min));
        root.insert("j_max".into(), serde_json::Value::from(self.j_max));
        root.insert(
            "heights".into(),
            serde_json::Value::from(
                self.heights
                    .iter()
                    .map(|row| serde_json::Value::from(row.clone()))
                    .collect::<Vec<_>>(),
            ),
        );
        if !self.labels.is_empty() {
            let mut labs = serde_json::Map::new();
            for ((alpha, j), poly) in &self.labels {
                labs.insert(format!("{},{}", alpha, j), serde_json::Value::from(poly.to_string()));
            }
            root.insert("labels".into(), serde_json::Value::Object(labs));
        }
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(root)).unwrap();
        text.push('\n');
        text
    }

    pub fn from_file_str(text: &str) -> Result<Boundary, BoundaryError> {
        let bad = |m: &str| BoundaryError::BadFile(m.to_string());
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| BoundaryError::BadFile(e.to_string()))?;
        let obj = value.as_object().ok_or_else(|| bad("expected an object"))?;
        let rank = obj
            .get("rank")
            .and_then(|v| v.as_i64())
            .ok_or_else(|| bad("missing integer 'rank'"))? as i32;
        let j_min = obj
            .get("j_min")
            .and_then(|v| v.as_i64())
            .ok_or_else(|| bad("missing integer 'j_min'"))?;
        let j_max = obj
            .get("j_max")
            .and_then(|v| v.as_i64())
            .ok_or_else(|| bad("missing integer 'j_max'"))?;
        let rows = obj
            .get("heights")
            .and_then(|v| v.as_array())
            .ok_or_else(|| bad("missing array 'heights'"))?;
        let mut heights = Vec::new();
        for row in rows {
            let row = row.as_array().ok_or_else(|| bad("heights rows must be arrays"))?;
            let mut out = Vec::new();
            for x in row {
                out.push(x.as_i64().ok_or_else(|| bad("heights must be integers"))?);
            }
            heights.push(out);
        }
        if heights.first().map(|r| r.len() as i64) != Some(j_max - j_min + 1) {
            return Err(bad("heights width disagrees with window"));
        }
        let mut labels = BTreeMap::new();
        if let Some(labs) = obj.get("labels") {
            let labs = labs.as_object().ok_or_else(|| bad("labels must be an object"))?;
            for (key, expr) in labs {
                let (a, j) = key
                    .split_once(',')
                    .and_then(|(a, j)| Some((a.trim().parse().ok()?, j.trim().parse().ok()?)))
                    .ok_or_else(|| bad("label keys must be 'alpha,j'"))?;
                let text = expr.as_str().ok_or_else(|| bad("label values must be strings"))?;
                let poly = LaurentPoly::parse(text)
                    .map_err(|e: LaurentError| BoundaryError::BadFile(e.to_string()))?;
                labels.insert((a, j), poly);
            }
        }
        Boundary::validate(rank, j_min, heights, labels)
    }
}

/// Arrow configuration dual to a boundary patch. `horizontal[(alpha,j)]`
/// crosses the lattice edge between faces (alpha,j) and (alpha+1,j), true =
/// pointing right; `vertical[(alpha,j)]` crosses between (alpha,j) and
/// (alpha,j+1), true = pointing up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SixVertexView {
    rank: i32,
    j_lo: i64,
    j_hi: i64,
    horizontal: BTreeMap<(i32, i64), bool>,
    vertical: BTreeMap<(i32, i64), bool>,
}

impl SixVertexView {
    pub fn window(&self) -> (i64, i64) {
        (self.j_lo, self.j_hi)
    }

    pub fn horizontal_arrow(&self, alpha: i32, j: i64) -> bool {
        self.horizontal[&(alpha, j)]
    }

    pub fn vertical_arrow(&self, alpha: i32, j: i64) -> bool {
        self.vertical[&(alpha, j)]
    }

    /// Two arrows in, two out at every interior vertex.
    pub fn ice_rule_ok(&self) -> bool {
        for alpha in 1..self.rank {
            for j in self.j_lo..self.j_hi {
                let mut inward = 0;
                if self.horizontal[&(alpha, j)] {
                    inward += 1; // from the left, pointing right
                }
                if !self.horizontal[&(alpha, j + 1)] {
                    inward += 1; // from the right, pointing left
                }
                if self.vertical[&(alpha, j)] {
                    inward += 1; // from below, pointing up
                }
                if !self.vertical[&(alpha + 1, j)] {
                    inward += 1; // from above, pointing down
                }
                if inward != 2 {
                    return false;
                }
            }
        }
        true
    }

    /// Rebuilds all face heights from the arrows plus one anchor height
    /// k_{1,j_lo}; errors if the arrows are not integrable (this failing is
    /// exactly an ice-rule violation somewhere).
    pub fn heights_from_anchor(&self, anchor: i64) -> Result<Vec<Vec<i64>>, BoundaryError> {
        let width = (self.j_hi - self.j_lo + 1) as usize;
        let mut out = vec![vec![0i64; width]; self.rank as usize];
        out[0][0] = anchor;
        for j in self.j_lo..self.j_hi {
            let idx = (j - self.j_lo) as usize;
            // Up arrow: smaller face on the right (east).
            let step = if self.vertical[&(1, j)] { -1 } else { 1 };
            out[0][idx + 1] = out[0][idx] + step;
        }
        for alpha in 1..self.rank {
            for j in self.j_lo..=self.j_hi {
                let idx = (j - self.j_lo) as usize;
                let step = if self.horizontal[&(alpha, j)] { 1 } else { -1 };
                out[alpha as usize][idx] = out[(alpha - 1) as usize][idx] + step;
            }
        }
        // Remaining vertical arrows are constraints, not free data.
        for alpha in 2..=self.rank {
            for j in self.j_lo..self.j_hi {
                let idx = (j - self.j_lo) as usize;
                let step = if self.vertical[&(alpha, j)] { -1 } else { 1 };
                if out[(alpha - 1) as usize][idx + 1] - out[(alpha - 1) as usize][idx] != step {
                    return Err(BoundaryError::InconsistentArrows);
                }
            }
        }
        Ok(out)
    }

    /// The face to the right of every arrow must be lower by one.
    pub fn ampere_ok(&self, b: &Boundary) -> bool {
        for ((alpha, j), right) in &self.horizontal {
            let diff = b.height(alpha + 1, *j) - b.height(*alpha, *j);
            if (diff == 1) != *right {
                return false;
            }
        }
        for ((alpha, j), up) in &self.vertical {
            let diff = b.height(*alpha, j + 1) - b.height(*alpha, *j);
            if (diff == -1) != *up {
                return false;
            }
        }
        true
    }
}

/// Integer sequence with steps in {-1,0,+1}; indexes Q-system initial data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotzkinPath(Vec<i64>);

impl MotzkinPath {
    pub fn new(entries: Vec<i64>) -> Result<Self, BoundaryError> {
        if entries.is_empty() || entries.windows(2).any(|w| (w[1] - w[0]).abs() > 1) {
            return Err(BoundaryError::InvalidMotzkin);
        }
        Ok(MotzkinPath(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }
}
