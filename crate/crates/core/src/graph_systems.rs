//! Graph operator systems `S_G = span{E_ii, E_ij : {i,j} ∈ E} ⊆ M_n`, the
//! diagonal conditional expectation, and generated C*-subalgebras.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cp_maps::LinearMatrixMap;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix, Tolerance};
use crate::operator_system::MatrixOperatorSystem;
use crate::subspace::RealSubspace;

/// Simple undirected graph on vertices `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
}

/// JSON form: `{"n": int, "edges": [[i, j], ...]}`, 1-indexed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphSpec {
    pub n: usize,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
}

/// Largest vertex count accepted from untrusted input.
pub const MAX_VERTICES: usize = 256;

impl Graph {
    /// Edges are unordered 1-indexed pairs; duplicates collapse.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        if vertex_count > MAX_VERTICES {
            return Err(Error::InvalidGraph(format!(
                "{vertex_count} vertices exceeds the limit of {MAX_VERTICES}"
            )));
        }
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
            }
            if i == 0 || j == 0 || i > vertex_count || j > vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i},{j}) outside vertices 1..={vertex_count}"
                )));
            }
            set.insert((i.min(j), i.max(j)));
        }
        Ok(Self {
            vertex_count,
            edges: set,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, []).expect("empty graph is valid")
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j)))).expect("complete graph is valid")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i, i + 1))).expect("path graph is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count;
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                let (a, b) = (a - 1, b - 1);
                let next = if a == v { b } else if b == v { a } else { continue };
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            n: self.vertex_count,
            edges: self.edges.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }

    pub fn from_spec(spec: &GraphSpec) -> Result<Self> {
        Self::new(spec.n, spec.edges.iter().map(|&[i, j]| (i, j)))
    }

    /// Parses either the JSON form or a plain edge list: the first
    /// non-comment line holds `n`, every following line one edge `i j`.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            let spec: GraphSpec =
                serde_json::from_str(text).map_err(|e| Error::InvalidGraph(format!("graph JSON: {e}")))?;
            return Self::from_spec(&spec);
        }
        Self::parse_edge_list(text)
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(no, l)| (no + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (no, header) = lines
            .next()
            .ok_or_else(|| Error::InvalidGraph("empty edge list".into()))?;
        let n = parse_index(header, no)?;
        let mut edges = Vec::new();
        for (no, line) in lines {
            let mut fields = line.split(|c: char| c.is_whitespace() || c == ',').filter(|f| !f.is_empty());
            let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::InvalidGraph(format!("line {no}: expected `i j`")));
            };
            edges.push((parse_index(a, no)?, parse_index(b, no)?));
        }
        Self::new(n, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.vertex_count);
        for (i, j) in self.edges() {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }
}

fn parse_index(s: &str, line: usize) -> Result<usize> {
    s.parse::<usize>()
        .map_err(|_| Error::InvalidGraph(format!("line {line}: `{s}` is not a nonnegative integer")))
}

/// `S_G`, complex dimension `n + 2|E|`.
pub fn graph_system(g: &Graph) -> MatrixOperatorSystem {
    let n = g.vertex_count();
    let mut generators: Vec<_> = (0..n).map(|i| ComplexMatrix::unit(n, i, i)).collect();
    generators.extend(g.edges().map(|(i, j)| ComplexMatrix::unit(n, i - 1, j - 1)));
    let label = format!("S_G(n={n},|E|={})", g.edge_count());
    MatrixOperatorSystem::new(n, &generators, &Tolerance::default())
        .expect("matrix units are well-formed")
        .with_label(label)
}

/// Zero every off-diagonal entry.
pub fn diagonal_part(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| if i == j { m[(i, j)] } else { Default::default() })
}

/// Conditional expectation `E : M_n → D_n` as a map on the full algebra.
pub fn diagonal_expectation(n: usize) -> LinearMatrixMap {
    LinearMatrixMap::from_fn(MatrixOperatorSystem::full(n), n, |h| diagonal_part(h.as_matrix()))
        .expect("diagonal projection is hermitian-preserving")
}

/// Smallest `*`-subalgebra of `M_n` containing `sys`.
///
/// Grows `span ← span + span·span` until the dimension stops increasing; each
/// productive round adds at least one dimension, so at most `n²` rounds run.
pub fn generated_algebra(sys: &MatrixOperatorSystem, tol: &Tolerance) -> Result<MatrixOperatorSystem> {
    let n = sys.ambient_dim();
    let eps = tol.subspace_eps;
    let mut span = sys.subspace().clone();
    let mut dim = span.len();
    for _round in 0..=n * n {
        let basis = span.basis().to_vec();
        let mut next = span.clone();
        for a in &basis {
            for b in &basis {
                let ab = a.as_matrix() * b.as_matrix();
                next.push(&HermitianMatrix::symmetrize(&ab), eps);
                next.push(&HermitianMatrix::imaginary_part(&ab), eps);
            }
        }
        let grown = next.len();
        if grown < dim {
            return Err(Error::NumericalFailure(format!(
                "generated algebra dimension fell from {dim} to {grown}"
            )));
        }
        if grown == dim {
            let gens: Vec<_> = span.basis().iter().map(|b| b.as_matrix().clone()).collect();
            return Ok(MatrixOperatorSystem::new(n, &gens, tol)?
                .with_label(format!("C*({})", sys.label()))
                .with_algebra_flag(true));
        }
        span = next;
        dim = grown;
    }
    Err(Error::NumericalFailure(format!(
        "generated algebra did not stabilize within {} rounds",
        n * n + 1
    )))
}

/// Products and adjoints stay inside `sys` within tolerance.
pub fn is_closed_algebra(sys: &MatrixOperatorSystem, tol: &Tolerance) -> bool {
    let span: &RealSubspace = sys.subspace();
    sys.basis().iter().all(|a| {
        sys.basis()
            .iter()
            .all(|b| span.contains(&(a.as_matrix() * b.as_matrix()), tol.subspace_eps))
    })
}
