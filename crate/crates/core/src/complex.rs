//! The quadripartite left-right Cayley square complex.
//!
//! Vertices are four copies of the group, `V_ij = G × {ij}`. A-edges join
//! `(g, i0)` and `(ag, i1)`, B-edges join `(g, 0j)` and `(gb, 1j)`, and the
//! squares are `{(g,00), (ag,01), (gb,10), (agb,11)}`.
//!
//! A square is stored only as its canonical triple id
//! `sq(g, a, b) = g·Δ² + idx(a)·Δ + idx(b)`; the four-vertex form is derived
//! on demand. Local windows `Q(v)` are labelled by generator indices
//! `(a, b) ∈ 0..Δ × 0..Δ`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::groups::{GeneratorSet, Group, Side};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("generator sets have different sizes: |A| = {a}, |B| = {b}")]
    SizeMismatch { a: usize, b: usize },
    #[error("generator set for side {0:?} is empty")]
    Empty(Side),
    #[error("A must act on the left and B on the right")]
    WrongSide,
    #[error("local windows are limited to Δ <= 8 (got Δ = {0})")]
    DeltaTooLarge(usize),
    #[error("generator index {index} out of range for Δ = {delta}")]
    IndexOutOfRange { index: usize, delta: usize },
}

/// Largest supported Δ: a `Δ × Δ` local window must fit in one `u64`.
pub const MAX_DELTA: usize = 8;

/// One of the four vertex classes. `V_ij` has row digit `i` and column digit `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VertexClass {
    V00,
    V01,
    V10,
    V11,
}

impl VertexClass {
    pub const ALL: [VertexClass; 4] = [Self::V00, Self::V01, Self::V10, Self::V11];

    pub fn from_digits(i: u8, j: u8) -> Self {
        match (i, j) {
            (0, 0) => Self::V00,
            (0, 1) => Self::V01,
            (1, 0) => Self::V10,
            (1, 1) => Self::V11,
            _ => panic!("vertex class digits must be 0 or 1"),
        }
    }

    /// `(i, j)` for `V_ij`.
    pub fn digits(self) -> (u8, u8) {
        match self {
            Self::V00 => (0, 0),
            Self::V01 => (0, 1),
            Self::V10 => (1, 0),
            Self::V11 => (1, 1),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// `V0 = V00 ∪ V11`, `V1 = V01 ∪ V10`.
    pub fn side(self) -> u8 {
        let (i, j) = self.digits();
        i ^ j
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::V00 => "V00",
            Self::V01 => "V01",
            Self::V10 => "V10",
            Self::V11 => "V11",
        }
    }
}

impl fmt::Display for VertexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub class: VertexClass,
    pub g: usize,
}

impl Vertex {
    pub fn new(class: VertexClass, g: usize) -> Self {
        Self { class, g }
    }
}

/// A square as its four incident vertices, one per class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SquareVertices {
    pub v00: usize,
    pub v01: usize,
    pub v10: usize,
    pub v11: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineKind {
    /// A common column `{(a, b) : a ∈ A}` (B-edge).
    Column,
    /// A common row `{(a, b) : b ∈ B}` (A-edge).
    Row,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SharedLine {
    pub kind: LineKind,
    /// Generator index of the shared column (B) or row (A).
    pub label: usize,
}

/// Graphs carried by the complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    /// `Cay(G, A)` by left multiplication, on `G`.
    CayA,
    /// `Cay(G, B)` by right multiplication, on `G`.
    CayB,
    /// `G_0^□` on `V00 ∪ V11` (V00 block first).
    Square0,
    /// `G_1^□` on `V01 ∪ V10` (V01 block first).
    Square1,
    /// The A-edge graph `G_A` on all of `V`, in class order.
    EdgesA,
    /// The B-edge graph `G_B` on all of `V`, in class order.
    EdgesB,
    /// Double cover of `Cay(G, A)`: `G_A` restricted to `V00 ∪ V01`.
    CoverA,
    /// Double cover of `Cay(G, B)`: `G_B` restricted to `V00 ∪ V10`.
    CoverB,
}

#[derive(Clone, Debug)]
pub struct SquareComplex {
    group: Group,
    a: GeneratorSet,
    b: GeneratorSet,
    delta: usize,
    /// `windows[vertex_id * Δ² + a * Δ + b] = φ_v(a, b)`.
    windows: Vec<u32>,
}

impl SquareComplex {
    pub fn new(group: Group, a: GeneratorSet, b: GeneratorSet) -> Result<Self, ComplexError> {
        if a.side() != Side::A || b.side() != Side::B {
            return Err(ComplexError::WrongSide);
        }
        if a.len() != b.len() {
            return Err(ComplexError::SizeMismatch { a: a.len(), b: b.len() });
        }
        if a.is_empty() {
            return Err(ComplexError::Empty(Side::A));
        }
        let delta = a.len();
        if delta > MAX_DELTA {
            return Err(ComplexError::DeltaTooLarge(delta));
        }
        let mut complex = Self {
            group,
            a,
            b,
            delta,
            windows: Vec::new(),
        };
        let window = delta * delta;
        let mut windows = Vec::with_capacity(complex.vertex_count() * window);
        for v in complex.vertices() {
            for ai in 0..delta {
                for bi in 0..delta {
                    windows.push(complex.phi_unchecked(v, ai, bi) as u32);
                }
            }
        }
        complex.windows = windows;
        Ok(complex)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn gens_a(&self) -> &GeneratorSet {
        &self.a
    }

    pub fn gens_b(&self) -> &GeneratorSet {
        &self.b
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn group_order(&self) -> usize {
        self.group.order()
    }

    /// `|Q| = |G|·Δ²`.
    pub fn square_count(&self) -> usize {
        self.group.order() * self.delta * self.delta
    }

    pub fn vertex_count(&self) -> usize {
        4 * self.group.order()
    }

    /// Dense id: class block first, then group element.
    pub fn vertex_id(&self, v: Vertex) -> usize {
        v.class.index() * self.group.order() + v.g
    }

    pub fn vertex(&self, id: usize) -> Vertex {
        let n = self.group.order();
        Vertex::new(VertexClass::ALL[id / n], id % n)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        VertexClass::ALL.into_iter().flat_map(move |c| self.class_vertices(c))
    }

    pub fn class_vertices(&self, class: VertexClass) -> impl Iterator<Item = Vertex> {
        (0..self.group.order()).map(move |g| Vertex::new(class, g))
    }

    pub fn square_id(&self, g: usize, a: usize, b: usize) -> usize {
        (g * self.delta + a) * self.delta + b
    }

    /// Inverse of [`square_id`](Self::square_id): `(g, idx(a), idx(b))`.
    pub fn square_triple(&self, q: usize) -> (usize, usize, usize) {
        let d = self.delta;
        (q / (d * d), (q / d) % d, q % d)
    }

    pub fn square_vertices(&self, q: usize) -> SquareVertices {
        let (g, ai, bi) = self.square_triple(q);
        let grp = &self.group;
        let a = self.a.element(ai);
        let b = self.b.element(bi);
        let n = grp.order();
        SquareVertices {
            v00: g,
            v01: n + grp.mul(a, g),
            v10: 2 * n + grp.mul(g, b),
            v11: 3 * n + grp.mul(grp.mul(a, g), b),
        }
    }

    fn phi_unchecked(&self, v: Vertex, ai: usize, bi: usize) -> usize {
        let grp = &self.group;
        let a_inv = grp.inv(self.a.element(ai));
        let b_inv = grp.inv(self.b.element(bi));
        let base = match v.class {
            VertexClass::V00 => v.g,
            VertexClass::V01 => grp.mul(a_inv, v.g),
            VertexClass::V10 => grp.mul(v.g, b_inv),
            VertexClass::V11 => grp.mul(grp.mul(a_inv, v.g), b_inv),
        };
        self.square_id(base, ai, bi)
    }

    /// The labelling `φ_v : A × B → Q(v)`.
    pub fn phi(&self, v: Vertex, a: usize, b: usize) -> Result<usize, ComplexError> {
        for index in [a, b] {
            if index >= self.delta {
                return Err(ComplexError::IndexOutOfRange { index, delta: self.delta });
            }
        }
        Ok(self.window(self.vertex_id(v))[a * self.delta + b] as usize)
    }

    /// `φ_v^{-1}(q)`, or `None` when `q ∉ Q(v)`.
    pub fn phi_inv(&self, v: Vertex, q: usize) -> Option<(usize, usize)> {
        if q >= self.square_count() {
            return None;
        }
        let (_, a, b) = self.square_triple(q);
        (self.phi_unchecked(v, a, b) == q).then_some((a, b))
    }

    /// Square ids of `Q(v)` in label order `a·Δ + b`.
    pub fn window(&self, vertex_id: usize) -> &[u32] {
        let w = self.delta * self.delta;
        &self.windows[vertex_id * w..(vertex_id + 1) * w]
    }

    /// Common row or column of two adjacent vertices, with its label.
    pub fn shared_line(&self, v: Vertex, w: Vertex) -> Option<SharedLine> {
        let (vi, vj) = v.class.digits();
        let (wi, wj) = w.class.digits();
        let grp = &self.group;
        if vj == wj && vi != wi {
            // B-edge (g, 0j) to (gb, 1j).
            let (lo, hi) = if vi == 0 { (v, w) } else { (w, v) };
            let b = grp.mul(grp.inv(lo.g), hi.g);
            let label = self.b.index_of(b)?;
            return Some(SharedLine { kind: LineKind::Column, label });
        }
        if vi == wi && vj != wj {
            // A-edge (g, i0) to (ag, i1).
            let (lo, hi) = if vj == 0 { (v, w) } else { (w, v) };
            let a = grp.mul(hi.g, grp.inv(lo.g));
            let label = self.a.index_of(a)?;
            return Some(SharedLine { kind: LineKind::Row, label });
        }
        None
    }

    /// Multiplicity adjacency matrix of one of the complex's graphs.
    pub fn adjacency(&self, which: GraphKind) -> MultiplicityMatrix {
        let grp = &self.group;
        let n = grp.order();
        let a = self.a.elements();
        let b = self.b.elements();
        match which {
            GraphKind::CayA => {
                let mut m = MultiplicityMatrix::zeros(n);
                for g in 0..n {
                    for &x in a {
                        m.add(g, grp.mul(x, g), 1);
                    }
                }
                m
            }
            GraphKind::CayB => {
                let mut m = MultiplicityMatrix::zeros(n);
                for g in 0..n {
                    for &x in b {
                        m.add(g, grp.mul(g, x), 1);
                    }
                }
                m
            }
            GraphKind::Square0 | GraphKind::Square1 => {
                let mut m = MultiplicityMatrix::zeros(2 * n);
                for g in 0..n {
                    for &x in a {
                        for &y in b {
                            let h = grp.mul(grp.mul(x, g), y);
                            m.add(g, n + h, 1);
                            m.add(n + h, g, 1);
                        }
                    }
                }
                m
            }
            GraphKind::EdgesA | GraphKind::EdgesB => {
                let full = self.vertex_count();
                let mut m = MultiplicityMatrix::zeros(full);
                for v in self.vertices() {
                    let (i, j) = v.class.digits();
                    if which == GraphKind::EdgesA && j == 0 {
                        for &x in a {
                            let w = Vertex::new(VertexClass::from_digits(i, 1), grp.mul(x, v.g));
                            m.add(self.vertex_id(v), self.vertex_id(w), 1);
                            m.add(self.vertex_id(w), self.vertex_id(v), 1);
                        }
                    }
                    if which == GraphKind::EdgesB && i == 0 {
                        for &y in b {
                            let w = Vertex::new(VertexClass::from_digits(1, j), grp.mul(v.g, y));
                            m.add(self.vertex_id(v), self.vertex_id(w), 1);
                            m.add(self.vertex_id(w), self.vertex_id(v), 1);
                        }
                    }
                }
                m
            }
            GraphKind::CoverA => {
                let mut m = MultiplicityMatrix::zeros(2 * n);
                for g in 0..n {
                    for &x in a {
                        let h = grp.mul(x, g);
                        m.add(g, n + h, 1);
                        m.add(n + h, g, 1);
                    }
                }
                m
            }
            GraphKind::CoverB => {
                let mut m = MultiplicityMatrix::zeros(2 * n);
                for g in 0..n {
                    for &y in b {
                        let h = grp.mul(g, y);
                        m.add(g, n + h, 1);
                        m.add(n + h, g, 1);
                    }
                }
                m
            }
        }
    }

    /// Degree of a graph kind: Δ for Cayley-type graphs, Δ² for square graphs.
    pub fn degree(&self, which: GraphKind) -> usize {
        match which {
            GraphKind::Square0 | GraphKind::Square1 => self.delta * self.delta,
            _ => self.delta,
        }
    }
}

/// Dense square matrix of edge multiplicities.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiplicityMatrix {
    n: usize,
    data: Vec<u32>,
}

impl fmt::Debug for MultiplicityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MultiplicityMatrix {}x{}", self.n, self.n)?;
        for r in 0..self.n {
            writeln!(f, "  {:?}", &self.data[r * self.n..(r + 1) * self.n])?;
        }
        Ok(())
    }
}

impl MultiplicityMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            m.data[r * n..(r + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.n + c]
    }

    pub fn add(&mut self, r: usize, c: usize, k: u32) {
        self.data[r * self.n + c] += k;
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.data
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|row| row.iter().map(|&x| u64::from(x)).sum())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|r| (r + 1..self.n).all(|c| self.get(r, c) == self.get(c, r)))
    }

    /// `Some(d)` if every row sums to `d`.
    pub fn regular_degree(&self) -> Option<u64> {
        let sums = self.row_sums();
        let first = *sums.first()?;
        sums.iter().all(|&s| s == first).then_some(first)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let x = self.get(r, k);
                if x == 0 {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += x * other.get(k, c);
                }
            }
        }
        out
    }

    /// The principal submatrix on the given index list, in that order.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let mut out = Self::zeros(indices.len());
        for (r, &i) in indices.iter().enumerate() {
            for (c, &j) in indices.iter().enumerate() {
                out.data[r * indices.len() + c] = self.get(i, j);
            }
        }
        out
    }

    /// Connected components ignoring multiplicities.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(r) = stack.pop() {
            for c in 0..self.n {
                if self.get(r, c) > 0 && !seen[c] {
                    seen[c] = true;
                    count += 1;
                    stack.push(c);
                }
            }
        }
        count == self.n
    }

    /// Number of edges between `S` and `T`, counted with multiplicity.
    pub fn edges_between(&self, s: &[usize], t: &[usize]) -> u64 {
        s.iter()
            .flat_map(|&i| t.iter().map(move |&j| u64::from(self.get(i, j))))
            .sum()
    }
}
