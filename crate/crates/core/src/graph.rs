//! The bipartite incidence graphs `D(n, Q)`.
//!
//! Points `(p_1, ..., p_n)` and lines `[l_1, ..., l_n]` are both copies of
//! `F_Q^n`. A point and a line are incident when, for every `2 <= j <= n`,
//!
//! ```text
//! l_j - p_j = l_a * p_b        with (a, b) = equation_shape(j), a, b < j
//! ```
//!
//! Since both factor indices are below `j`, fixing the first coordinate of a
//! neighbor determines the rest by forward substitution, so every vertex has
//! exactly `Q` neighbors.
//!
//! Coordinate indices are 1-based everywhere in this API.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeModulus};
use crate::ops::OpCounter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Point,
    Line,
}

impl VertexKind {
    pub fn opposite(self) -> Self {
        match self {
            VertexKind::Point => VertexKind::Line,
            VertexKind::Line => VertexKind::Point,
        }
    }

    fn tag(self) -> char {
        match self {
            VertexKind::Point => 'P',
            VertexKind::Line => 'L',
        }
    }
}

/// A point or a line of `D(n, Q)`, stored as canonical residues.
///
/// A bare `Vertex` does not know its modulus; [`GraphParams`] checks that the
/// coordinates fit before using it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    kind: VertexKind,
    coords: Vec<u64>,
}

impl Vertex {
    pub fn new(kind: VertexKind, coords: Vec<u64>) -> Self {
        Self { kind, coords }
    }

    pub fn point(coords: Vec<u64>) -> Self {
        Self::new(VertexKind::Point, coords)
    }

    pub fn line(coords: Vec<u64>) -> Self {
        Self::new(VertexKind::Line, coords)
    }

    #[inline]
    pub fn kind(&self) -> VertexKind {
        self.kind
    }

    #[inline]
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// 1-based coordinate access.
    pub fn coord(&self, index: usize) -> Option<u64> {
        index.checked_sub(1).and_then(|i| self.coords.get(i).copied())
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn into_coords(self) -> Vec<u64> {
        self.coords
    }
}

/// `P:5,10,27` for points, `L:...` for lines.
impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.kind.tag())?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::input(format!("vertex {s:?} lacks a kind tag")))?;
        let kind = match tag {
            "P" => VertexKind::Point,
            "L" => VertexKind::Line,
            other => return Err(Error::input(format!("unknown vertex kind {other:?}"))),
        };
        let coords = rest
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::input(format!("bad coordinate {c:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kind, coords })
    }
}

/// One incidence equation `l_target - p_target = l_line_factor * p_point_factor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquationShape {
    pub target: usize,
    pub line_factor: usize,
    pub point_factor: usize,
}

impl EquationShape {
    /// Shape of equation `j` for any `j >= 2`.
    ///
    /// The first three equations are fixed; from `j = 5` on they repeat with
    /// period four: `(1, j-2)`, `(j-2, 1)`, `(j-2, 1)`, `(1, j-2)`.
    pub fn for_target(j: usize) -> Result<Self> {
        let (line_factor, point_factor) = match j {
            0 | 1 => {
                return Err(Error::parameter(format!(
                    "equation index {j} is below 2"
                )))
            }
            2 => (1, 1),
            3 => (2, 1),
            4 => (1, 2),
            _ => match (j - 5) % 4 {
                0 | 3 => (1, j - 2),
                _ => (j - 2, 1),
            },
        };
        Ok(Self {
            target: j,
            line_factor,
            point_factor,
        })
    }
}

/// The graph `D(n, Q)` for a prime `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphParams {
    n: usize,
    modulus: PrimeModulus,
    // 0-based (target, line factor, point factor) for j = 2..=n
    shapes: Vec<(usize, usize, usize)>,
}

impl GraphParams {
    pub fn new(n: usize, modulus: PrimeModulus) -> Result<Self> {
        if n < 2 {
            return Err(Error::parameter(format!("dimension n = {n} is below 2")));
        }
        let shapes = (2..=n)
            .map(|j| {
                let s = EquationShape::for_target(j)?;
                Ok((s.target - 1, s.line_factor - 1, s.point_factor - 1))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, modulus, shapes })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn equation_shape(&self, j: usize) -> Result<EquationShape> {
        if !(2..=self.n).contains(&j) {
            return Err(Error::parameter(format!(
                "equation index {j} outside 2..={}",
                self.n
            )));
        }
        EquationShape::for_target(j)
    }

    pub fn check_vertex(&self, v: &Vertex) -> Result<()> {
        if v.coords.len() != self.n {
            return Err(Error::parameter(format!(
                "vertex has {} coordinates, D({}, {}) needs {}",
                v.coords.len(),
                self.n,
                self.modulus,
                self.n
            )));
        }
        if let Some((i, c)) = v
            .coords
            .iter()
            .enumerate()
            .find(|(_, &c)| c >= self.modulus.value())
        {
            return Err(Error::parameter(format!(
                "coordinate {} = {c} is not below Q = {}",
                i + 1,
                self.modulus
            )));
        }
        Ok(())
    }

    pub fn point(&self, coords: Vec<u64>) -> Result<Vertex> {
        let v = Vertex::point(coords);
        self.check_vertex(&v)?;
        Ok(v)
    }

    pub fn line(&self, coords: Vec<u64>) -> Result<Vertex> {
        let v = Vertex::line(coords);
        self.check_vertex(&v)?;
        Ok(v)
    }

    fn check_element(&self, e: FieldElement) -> Result<u64> {
        if e.modulus() != self.modulus {
            return Err(Error::ModulusMismatch(
                e.modulus().value(),
                self.modulus.value(),
            ));
        }
        Ok(e.residue())
    }

    /// The unique line through point `p` whose first coordinate is `first`.
    pub fn complete_line(&self, p: &Vertex, first: FieldElement) -> Result<Vertex> {
        if p.kind != VertexKind::Point {
            return Err(Error::parameter("complete_line needs a point"));
        }
        self.complete(p, first)
    }

    /// The unique point on line `l` whose first coordinate is `first`.
    pub fn complete_point(&self, l: &Vertex, first: FieldElement) -> Result<Vertex> {
        if l.kind != VertexKind::Line {
            return Err(Error::parameter("complete_point needs a line"));
        }
        self.complete(l, first)
    }

    /// The neighbor of `w` (of the opposite kind) with first coordinate `first`.
    pub fn complete(&self, w: &Vertex, first: FieldElement) -> Result<Vertex> {
        self.check_vertex(w)?;
        let first = self.check_element(first)?;
        let mut out = vec![0; self.n];
        self.complete_into(w.kind, &w.coords, first, &mut out, &mut ());
        Ok(Vertex::new(w.kind.opposite(), out))
    }

    /// Forward substitution; `out` receives the neighbor of `w` of kind
    /// `kind.opposite()`. Costs `n-1` multiplications and `n-1`
    /// additions (point to line) or subtractions (line to point).
    #[inline]
    pub(crate) fn complete_into<C: OpCounter>(
        &self,
        kind: VertexKind,
        w: &[u64],
        first: u64,
        out: &mut [u64],
        counter: &mut C,
    ) {
        self.substitute::<C, false>(kind, w, first, out, counter)
    }

    /// [`Self::complete_into`] over the modulus' internal representation.
    #[inline]
    pub(crate) fn complete_internal<C: OpCounter>(
        &self,
        kind: VertexKind,
        w: &[u64],
        first: u64,
        out: &mut [u64],
        counter: &mut C,
    ) {
        self.substitute::<C, true>(kind, w, first, out, counter)
    }

    #[inline(always)]
    fn substitute<C: OpCounter, const INTERNAL: bool>(
        &self,
        kind: VertexKind,
        w: &[u64],
        first: u64,
        out: &mut [u64],
        counter: &mut C,
    ) {
        let m = &self.modulus;
        let mul = |a, b| {
            if INTERNAL {
                m.mul_internal(a, b)
            } else {
                m.mul_raw(a, b)
            }
        };
        out[0] = first;
        match kind {
            VertexKind::Point => {
                // l_j = p_j + l_a * p_b
                for &(j, a, b) in &self.shapes {
                    out[j] = m.add_raw(w[j], mul(out[a], w[b]));
                }
                counter.add(self.shapes.len() as u64);
            }
            VertexKind::Line => {
                // p_j = l_j - l_a * p_b
                for &(j, a, b) in &self.shapes {
                    out[j] = m.sub_raw(w[j], mul(w[a], out[b]));
                }
                counter.sub(self.shapes.len() as u64);
            }
        }
        counter.mul(self.shapes.len() as u64);
    }

    /// Whether `p` and `l` are incident. The arguments may come in either
    /// order but must be one point and one line.
    pub fn incident(&self, p: &Vertex, l: &Vertex) -> Result<bool> {
        self.check_vertex(p)?;
        self.check_vertex(l)?;
        let (p, l) = match (p.kind, l.kind) {
            (VertexKind::Point, VertexKind::Line) => (p, l),
            (VertexKind::Line, VertexKind::Point) => (l, p),
            _ => {
                return Err(Error::parameter(
                    "bipartite: points cannot be incident to points, nor lines to lines",
                ))
            }
        };
        let m = &self.modulus;
        Ok(self.shapes.iter().all(|&(j, a, b)| {
            m.sub_raw(l.coords[j], p.coords[j]) == m.mul_raw(l.coords[a], p.coords[b])
        }))
    }

    /// First coordinate chosen by the walk operator: `(w[coord_index] + t)^2`.
    #[inline]
    pub(crate) fn walk_head(&self, w: &[u64], t: u64, coord_index: usize) -> u64 {
        let s = self.modulus.add_raw(w[coord_index - 1], t);
        self.modulus.mul_raw(s, s)
    }

    /// [`Self::walk_head`] over the internal representation.
    #[inline]
    pub(crate) fn walk_head_internal(&self, w: &[u64], t: u64, coord_index: usize) -> u64 {
        let s = self.modulus.add_raw(w[coord_index - 1], t);
        self.modulus.mul_internal(s, s)
    }

    /// `N_t(w)` with a rotating coordinate: the neighbor of `w` whose first
    /// coordinate is `(w[coord_index] + t)^2`.
    pub fn neighbor(&self, w: &Vertex, t: FieldElement, coord_index: usize) -> Result<Vertex> {
        self.check_vertex(w)?;
        let t = self.check_element(t)?;
        if !(1..=self.n).contains(&coord_index) {
            return Err(Error::parameter(format!(
                "coordinate index {coord_index} outside 1..={}",
                self.n
            )));
        }
        let first = self.walk_head(&w.coords, t, coord_index);
        let mut out = vec![0; self.n];
        self.complete_into(w.kind, &w.coords, first, &mut out, &mut ());
        Ok(Vertex::new(w.kind.opposite(), out))
    }

    /// All `Q` neighbors of `w`, ordered by first coordinate.
    pub fn all_neighbors(&self, w: &Vertex) -> Result<Vec<Vertex>> {
        self.check_vertex(w)?;
        Ok((0..self.modulus.value())
            .map(|f| {
                let mut out = vec![0; self.n];
                self.complete_into(w.kind, &w.coords, f, &mut out, &mut ());
                Vertex::new(w.kind.opposite(), out)
            })
            .collect())
    }
}
