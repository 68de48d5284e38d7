//! Budgeted access to edge signs.
//!
//! Algorithms never see the [`SimilarityGraph`] directly; every sign they use
//! is bought from a [`BudgetedOracle`]. By default only the first query of a
//! distinct pair is charged and repeats are answered from a cache. With
//! `charge_duplicates` every issued query costs one unit.

use std::collections::HashMap;
use std::io::Write;

use crate::graph::{Sign, SimilarityGraph, VertexId};
use crate::{Error, Result};

/// One entry of the query transcript.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryRecord {
    /// Normalized pair with `pair.0 < pair.1`.
    pub pair: (VertexId, VertexId),
    pub sign: Sign,
    pub charged: bool,
}

#[derive(Debug)]
pub struct BudgetedOracle<'g> {
    graph: &'g SimilarityGraph,
    budget: u64,
    used: u64,
    charge_duplicates: bool,
    cache: HashMap<(VertexId, VertexId), Sign>,
    transcript: Vec<QueryRecord>,
}

fn normalize(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl<'g> BudgetedOracle<'g> {
    pub fn new(graph: &'g SimilarityGraph, budget: u64) -> Self {
        Self {
            graph,
            budget,
            used: 0,
            charge_duplicates: false,
            cache: HashMap::new(),
            transcript: Vec::new(),
        }
    }

    /// Oracle whose budget covers every pair of the graph.
    pub fn unlimited(graph: &'g SimilarityGraph) -> Self {
        Self::new(graph, crate::pairs(graph.n()))
    }

    /// Switches to charging every issued query, cached or not.
    pub fn charge_duplicates(mut self, yes: bool) -> Self {
        self.charge_duplicates = yes;
        self
    }

    /// Vertex count of the hidden graph.
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn budget_used(&self) -> u64 {
        self.used
    }

    pub fn remaining_budget(&self) -> u64 {
        self.budget - self.used
    }

    pub fn charges_duplicates(&self) -> bool {
        self.charge_duplicates
    }

    /// Number of distinct pairs asked so far.
    pub fn distinct_pairs(&self) -> usize {
        self.cache.len()
    }

    /// Previously bought answer for `{u, v}`, free of charge.
    pub fn known(&self, u: VertexId, v: VertexId) -> Option<Sign> {
        self.cache.get(&normalize(u, v)).copied()
    }

    /// Asks for the sign of `{u, v}`. The budget is checked before the answer
    /// is revealed.
    pub fn query(&mut self, u: VertexId, v: VertexId) -> Result<Sign> {
        let n = self.graph.n();
        if u == v || u >= n || v >= n {
            return Err(Error::Domain(format!(
                "cannot query pair ({u}, {v}) with n = {n}"
            )));
        }
        let pair = normalize(u, v);
        let cached = self.cache.get(&pair).copied();
        let charged = self.charge_duplicates || cached.is_none();
        if charged && self.used >= self.budget {
            return Err(Error::BudgetExhausted {
                budget: self.budget,
                used: self.used,
            });
        }
        let sign = match cached {
            Some(sign) => sign,
            None => {
                let sign = Sign::from_bool(self.graph.has_edge(u, v));
                self.cache.insert(pair, sign);
                sign
            }
        };
        if charged {
            self.used += 1;
        }
        self.transcript.push(QueryRecord {
            pair,
            sign,
            charged,
        });
        Ok(sign)
    }

    pub fn transcript(&self) -> &[QueryRecord] {
        &self.transcript
    }

    /// The sequence of (normalized) pairs asked so far.
    pub fn query_pairs_list(&self) -> Vec<(VertexId, VertexId)> {
        self.transcript.iter().map(|r| r.pair).collect()
    }

    /// Dumps the transcript as CSV with columns `step,u,v,sign,charged`.
    pub fn write_transcript_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["step", "u", "v", "sign", "charged"])?;
        for (step, r) in self.transcript.iter().enumerate() {
            writer.write_record([
                step.to_string(),
                r.pair.0.to_string(),
                r.pair.1.to_string(),
                r.sign.value().to_string(),
                r.charged.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}
