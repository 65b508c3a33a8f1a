//! LP relaxation of densest subgraph, written in CPLEX LP text format.
//!
//! ```text
//! maximize    sum_e w_e x_e
//! subject to  x_e <= y_u,  x_e <= y_v   for every edge e = {u, v}
//!             sum_v y_v <= 1
//!             x, y >= 0
//! ```
//!
//! Its optimum equals the maximum density. Variables are named after the
//! external vertex labels: `y_<label>` and `x_<label>_<label>`.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

const TERMS_PER_LINE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LpSummary {
    pub variables: usize,
    pub constraints: usize,
}

/// One linear row `sum coef * var <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(f64, String)>,
    pub rhs: f64,
}

/// View of a graph as the LP; rows are generated on demand.
pub struct LpModel<'g> {
    graph: &'g Graph,
}

impl<'g> LpModel<'g> {
    pub fn new(graph: &'g Graph) -> Result<Self> {
        if graph.n() == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(LpModel { graph })
    }

    pub fn vertex_var(&self, v: VertexId) -> String {
        format!("y_{}", self.graph.label(v))
    }

    pub fn edge_var(&self, u: VertexId, v: VertexId) -> String {
        format!("x_{}_{}", self.graph.label(u), self.graph.label(v))
    }

    pub fn summary(&self) -> LpSummary {
        LpSummary {
            variables: self.graph.n() + self.graph.m(),
            constraints: 2 * self.graph.m() + 1,
        }
    }

    pub fn variable_names(&self) -> impl Iterator<Item = String> + '_ {
        (0..self.graph.n() as VertexId)
            .map(|v| self.vertex_var(v))
            .chain(self.graph.edges().map(|(u, v, _)| self.edge_var(u, v)))
    }

    /// Objective coefficients `(w_e, x_e)`.
    pub fn objective(&self) -> impl Iterator<Item = (f64, String)> + '_ {
        self.graph.edges().map(|(u, v, w)| (w, self.edge_var(u, v)))
    }

    /// The two edge rows per edge, in edge order, then the normalization row.
    pub fn rows(&self) -> impl Iterator<Item = Row> + '_ {
        let edge_rows = self
            .graph
            .edges()
            .enumerate()
            .flat_map(move |(i, (u, v, _))| {
                let x = self.edge_var(u, v);
                [
                    Row {
                        name: format!("e{i}_u"),
                        terms: vec![(1.0, x.clone()), (-1.0, self.vertex_var(u))],
                        rhs: 0.0,
                    },
                    Row {
                        name: format!("e{i}_v"),
                        terms: vec![(1.0, x), (-1.0, self.vertex_var(v))],
                        rhs: 0.0,
                    },
                ]
            });
        let norm = std::iter::once_with(move || Row {
            name: "norm".into(),
            terms: (0..self.graph.n() as VertexId)
                .map(|v| (1.0, self.vertex_var(v)))
                .collect(),
            rhs: 1.0,
        });
        edge_rows.chain(norm)
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<LpSummary> {
        let summary = self.summary();
        writeln!(
            out,
            "\\ densest subgraph LP: {} vertices, {} edges",
            self.graph.n(),
            self.graph.m()
        )?;
        writeln!(out, "Maximize")?;
        write!(out, " obj:")?;
        let mut any = false;
        for (i, (w, name)) in self.objective().enumerate() {
            if i > 0 && i % TERMS_PER_LINE == 0 {
                write!(out, "\n     ")?;
            }
            write_term(&mut out, w, &name, i == 0)?;
            any = true;
        }
        if !any {
            // an edgeless graph still needs a well-formed objective
            write!(out, " 0 {}", self.vertex_var(0))?;
        }
        writeln!(out)?;
        writeln!(out, "Subject To")?;
        for row in self.rows() {
            write!(out, " {}:", row.name)?;
            for (i, (c, name)) in row.terms.iter().enumerate() {
                if i > 0 && i % TERMS_PER_LINE == 0 {
                    write!(out, "\n     ")?;
                }
                write_term(&mut out, *c, name, i == 0)?;
            }
            writeln!(out, " <= {}", row.rhs)?;
        }
        writeln!(out, "Bounds")?;
        for name in self.variable_names() {
            writeln!(out, " {name} >= 0")?;
        }
        writeln!(out, "End")?;
        out.flush()?;
        Ok(summary)
    }
}

fn write_term<W: Write>(out: &mut W, coef: f64, name: &str, first: bool) -> io::Result<()> {
    let sign = if coef < 0.0 {
        "-"
    } else if first {
        ""
    } else {
        "+"
    };
    let mag = coef.abs();
    let sep = if sign.is_empty() { "" } else { " " };
    if mag == 1.0 {
        write!(out, " {sign}{sep}{name}")
    } else {
        write!(out, " {sign}{sep}{mag} {name}")
    }
}

/// Writes the LP for `graph` to `sink` and returns its size.
pub fn emit_charikar_lp<W: Write>(graph: &Graph, sink: W) -> Result<LpSummary> {
    Ok(LpModel::new(graph)?.write(sink)?)
}
