//! Divisors: finite formal sums of points with integer multiplicities.

use crate::error::CoreResult;
use crate::graph::{GraphPoint, MetricGraph, VertexId};
use crate::subgraph::Subgraph;
use std::collections::BTreeMap;

/// A divisor on a metric graph. Points are stored canonically, so two divisors
/// built against the same graph compare by structural equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Divisor {
    chips: BTreeMap<GraphPoint, i64>,
}

impl Divisor {
    pub fn zero() -> Self {
        Divisor::default()
    }

    pub fn from_points(g: &MetricGraph, pts: &[(GraphPoint, i64)]) -> CoreResult<Self> {
        let mut d = Divisor::zero();
        for (p, m) in pts {
            d.add_point(g, p, *m)?;
        }
        Ok(d)
    }

    /// Adds `mult` chips at `p` (canonicalized). Zero entries are dropped.
    pub fn add_point(&mut self, g: &MetricGraph, p: &GraphPoint, mult: i64) -> CoreResult<()> {
        let cp = g.canonicalize(p)?;
        let entry = self.chips.entry(cp).or_insert(0);
        *entry += mult;
        if *entry == 0 {
            let cp = g.canonicalize(p)?;
            self.chips.remove(&cp);
        }
        Ok(())
    }

    pub fn add_vertex(&mut self, g: &MetricGraph, v: VertexId, mult: i64) {
        self.add_point(g, &g.vertex_point(v), mult)
            .expect("vertex points are always valid");
    }

    pub fn mult(&self, p: &GraphPoint) -> i64 {
        self.chips.get(p).copied().unwrap_or(0)
    }

    pub fn mult_vertex(&self, g: &MetricGraph, v: VertexId) -> i64 {
        self.mult(&g.vertex_point(v))
    }

    pub fn deg(&self) -> i64 {
        self.chips.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GraphPoint, i64)> {
        self.chips.iter().map(|(p, &m)| (p, m))
    }

    pub fn support(&self) -> impl Iterator<Item = &GraphPoint> {
        self.chips.keys()
    }

    pub fn is_effective(&self) -> bool {
        self.chips.values().all(|&m| m >= 0)
    }

    /// Effective away from a distinguished point (typically the base point).
    pub fn is_effective_except(&self, q: &GraphPoint) -> bool {
        self.chips.iter().all(|(p, &m)| m >= 0 || p == q)
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, m) in &other.chips {
            let e = out.chips.entry(p.clone()).or_insert(0);
            *e += m;
            if *e == 0 {
                out.chips.remove(p);
            }
        }
        out
    }

    pub fn neg(&self) -> Divisor {
        Divisor {
            chips: self.chips.iter().map(|(p, &m)| (p.clone(), -m)).collect(),
        }
    }

    pub fn sub(&self, other: &Divisor) -> Divisor {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> Divisor {
        if k == 0 {
            return Divisor::zero();
        }
        Divisor {
            chips: self.chips.iter().map(|(p, &m)| (p.clone(), k * m)).collect(),
        }
    }

    /// Degree of the restriction to a closed subgraph.
    pub fn deg_on(&self, g: &MetricGraph, s: &Subgraph) -> i64 {
        self.chips
            .iter()
            .filter(|(p, _)| s.contains(g, p))
            .map(|(_, &m)| m)
            .sum()
    }

    /// Total debt held away from `q`.
    pub fn debt_except(&self, q: &GraphPoint) -> i64 {
        self.chips
            .iter()
            .filter(|(p, &m)| m < 0 && *p != q)
            .map(|(_, &m)| -m)
            .sum()
    }
}

/// Canonical divisor: sum over vertices of (valence - 2).
pub fn canonical_divisor(g: &MetricGraph) -> Divisor {
    let mut d = Divisor::zero();
    for v in g.vertices() {
        let k = g.valence(v) as i64 - 2;
        if k != 0 {
            d.add_vertex(g, v, k);
        }
    }
    d
}
