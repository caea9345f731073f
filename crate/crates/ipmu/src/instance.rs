//! Problem instances: a directed graph with separate time (`c1`) and cost
//! (`c2`) weights per arc, per-node demands, a median count `p`, and an
//! upgrade budget `B`.
//!
//! Includes the text format parser/serializer, a semantic validator, and the
//! seeded random generator for benchmark-style instances.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// A directed arc with a traversal time, a unit transport cost, and an
/// upgrade cap limiting how much of the cost the budget may remove.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    /// Dense index into [`Instance::arcs`]; assigned by [`Instance::new`].
    pub id: usize,
    pub src: usize,
    pub dst: usize,
    /// Traversal time.
    pub c1: f64,
    /// Cost per unit of transport.
    pub c2: f64,
    /// Maximum cost reduction this arc can absorb.
    pub u: f64,
}

impl Arc {
    pub fn new(src: usize, dst: usize, c1: f64, c2: f64, u: f64) -> Self {
        Self { id: 0, src, dst, c1, c2, u }
    }
}

/// An immutable problem instance. Node ids run 1..=n; every node is both a
/// client and a candidate median.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub p: usize,
    pub budget: f64,
    /// `demand[i]` is the demand of node `i + 1`.
    pub demand: Vec<f64>,
    /// Canonical order: ascending `(src, dst)`; `arcs[k].id == k`.
    pub arcs: Vec<Arc>,
}

impl Instance {
    /// Builds an instance, sorting arcs into canonical `(src, dst)` order and
    /// assigning dense ids. Semantic checks live in [`Instance::validate`].
    ///
    /// Panics if `demand.len() != n`.
    pub fn new(n: usize, p: usize, budget: f64, demand: Vec<f64>, mut arcs: Vec<Arc>) -> Self {
        assert_eq!(demand.len(), n, "demand vector length must equal n");
        arcs.sort_by(|a, b| (a.src, a.dst).cmp(&(b.src, b.dst)));
        for (id, arc) in arcs.iter_mut().enumerate() {
            arc.id = id;
        }
        Self { n, p, budget, demand, arcs }
    }

    pub fn m(&self) -> usize {
        self.arcs.len()
    }

    /// Demand of node `i` (1-based).
    pub fn demand_of(&self, i: usize) -> f64 {
        self.demand[i - 1]
    }

    /// Same instance under a different upgrade budget.
    pub fn with_budget(&self, budget: f64) -> Instance {
        Instance { budget, ..self.clone() }
    }

    /// Checks every instance invariant and returns the list of findings.
    /// Errors make the instance unusable; warnings flag permitted but odd
    /// data (an upgrade cap above the arc cost lets the effective cost go
    /// negative).
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n < 2 || self.p < 1 || self.p >= self.n {
            out.push(Violation::MedianCountOutOfRange { p: self.p, n: self.n });
        }
        if !self.budget.is_finite() || self.budget < 0.0 {
            out.push(Violation::NegativeBudget { budget: self.budget });
        }
        for (idx, &w) in self.demand.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                out.push(Violation::NegativeDemand { node: idx + 1, demand: w });
            }
        }
        let mut structural = false;
        let mut seen = HashSet::new();
        for arc in &self.arcs {
            let id_ok = (1..=self.n).contains(&arc.src) && (1..=self.n).contains(&arc.dst);
            if !id_ok {
                out.push(Violation::NodeIdOutOfRange { arc: arc.id, src: arc.src, dst: arc.dst });
                structural = true;
                continue;
            }
            if arc.src == arc.dst {
                out.push(Violation::SelfLoop { arc: arc.id, node: arc.src });
                structural = true;
            }
            if !seen.insert((arc.src, arc.dst)) {
                out.push(Violation::DuplicateArc { src: arc.src, dst: arc.dst });
                structural = true;
            }
            for (name, v) in [("c1", arc.c1), ("c2", arc.c2), ("u", arc.u)] {
                if !v.is_finite() || v < 0.0 {
                    out.push(Violation::NegativeWeight { arc: arc.id, field: name, value: v });
                    structural = true;
                }
            }
            if arc.u > arc.c2 {
                out.push(Violation::CapExceedsCost { arc: arc.id, u: arc.u, c2: arc.c2 });
            }
        }
        if !structural {
            if let Some((src, dst)) = self.connectivity_witness() {
                out.push(Violation::Unreachable { src, dst });
            }
        }
        out
    }

    /// True when [`validate`](Self::validate) reports no errors (warnings are
    /// allowed).
    pub fn is_valid(&self) -> bool {
        self.validate().iter().all(|v| v.severity() == Severity::Warning)
    }

    /// Some (src, dst) with dst unreachable from src, or None when strongly
    /// connected. Checks reachability from and to node 1, which suffices.
    fn connectivity_witness(&self) -> Option<(usize, usize)> {
        if self.n == 0 {
            return None;
        }
        let mut fwd = vec![Vec::new(); self.n + 1];
        let mut bwd = vec![Vec::new(); self.n + 1];
        for arc in &self.arcs {
            fwd[arc.src].push(arc.dst);
            bwd[arc.dst].push(arc.src);
        }
        let reach = |adj: &Vec<Vec<usize>>| {
            let mut seen = vec![false; self.n + 1];
            let mut stack = vec![1usize];
            seen[1] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen
        };
        let from_one = reach(&fwd);
        if let Some(v) = (1..=self.n).find(|&v| !from_one[v]) {
            return Some((1, v)); // v unreachable from node 1
        }
        let to_one = reach(&bwd);
        if let Some(v) = (1..=self.n).find(|&v| !to_one[v]) {
            return Some((v, 1)); // node 1 unreachable from v
        }
        None
    }

    /// Parses the text format (see crate docs / README). Accepts nodes and
    /// arcs in any order; the result is canonical.
    pub fn parse(text: &str) -> Result<Instance, ParseError> {
        let mut lines = text.lines().enumerate().filter_map(|(idx, raw)| {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                None
            } else {
                Some((idx + 1, body))
            }
        });

        let (line, header) = lines.next().ok_or(ParseError::MissingHeader)?;
        let mut it = header.split_whitespace();
        if it.next() != Some("IPMU") || it.next() != Some("1") || it.next().is_some() {
            return Err(ParseError::BadMagic { line });
        }

        let (line, counts) = lines.next().ok_or(ParseError::MissingHeader)?;
        let fields: Vec<&str> = counts.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(ParseError::BadCountsLine { line, found: fields.len() });
        }
        let n: usize = parse_field(fields[0], line, "n")?;
        let m: usize = parse_field(fields[1], line, "m")?;
        let p: usize = parse_field(fields[2], line, "p")?;
        let budget: f64 = parse_field(fields[3], line, "B")?;
        if n < 2 || p < 1 || p >= n {
            return Err(ParseError::MedianCountOutOfRange { line, p, n });
        }
        if budget < 0.0 {
            return Err(ParseError::NegativeValue { line, field: "B", value: budget });
        }

        let mut demand = vec![f64::NAN; n];
        let mut demand_seen = vec![false; n];
        for k in 0..n {
            let (line, body) = lines.next().ok_or(ParseError::NodeCountMismatch {
                expected: n,
                actual: k,
            })?;
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(ParseError::BadNodeLine { line, found: fields.len() });
            }
            let id: usize = parse_field(fields[0], line, "node_id")?;
            let w: f64 = parse_field(fields[1], line, "demand")?;
            if id < 1 || id > n {
                return Err(ParseError::NodeIdOutOfRange { line, id, n });
            }
            if demand_seen[id - 1] {
                return Err(ParseError::DuplicateNode { line, id });
            }
            if w < 0.0 {
                return Err(ParseError::NegativeValue { line, field: "demand", value: w });
            }
            demand_seen[id - 1] = true;
            demand[id - 1] = w;
        }

        let mut arcs = Vec::with_capacity(m);
        let mut seen = HashSet::new();
        for k in 0..m {
            let (line, body) = lines.next().ok_or(ParseError::ArcCountMismatch {
                expected: m,
                actual: k,
            })?;
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(ParseError::BadArcLine { line, found: fields.len() });
            }
            let src: usize = parse_field(fields[0], line, "src")?;
            let dst: usize = parse_field(fields[1], line, "dst")?;
            let c1: f64 = parse_field(fields[2], line, "c1")?;
            let c2: f64 = parse_field(fields[3], line, "c2")?;
            let u: f64 = parse_field(fields[4], line, "u")?;
            if src < 1 || src > n {
                return Err(ParseError::NodeIdOutOfRange { line, id: src, n });
            }
            if dst < 1 || dst > n {
                return Err(ParseError::NodeIdOutOfRange { line, id: dst, n });
            }
            if src == dst {
                return Err(ParseError::SelfLoop { line, node: src });
            }
            if !seen.insert((src, dst)) {
                return Err(ParseError::DuplicateArc { line, src, dst });
            }
            for (name, v) in [("c1", c1), ("c2", c2), ("u", u)] {
                if v < 0.0 {
                    return Err(ParseError::NegativeValue { line, field: name, value: v });
                }
            }
            arcs.push(Arc::new(src, dst, c1, c2, u));
        }
        if let Some((line, _)) = lines.next() {
            return Err(ParseError::TrailingContent { line });
        }
        Ok(Instance::new(n, p, budget, demand, arcs))
    }

    /// Canonical text serialization: nodes ascending by id, arcs ascending by
    /// `(src, dst)`, floats printed with full round-trip precision.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("IPMU 1\n");
        out.push_str(&format!("{} {} {} {}\n", self.n, self.m(), self.p, self.budget));
        for (idx, w) in self.demand.iter().enumerate() {
            out.push_str(&format!("{} {}\n", idx + 1, w));
        }
        for a in &self.arcs {
            out.push_str(&format!("{} {} {} {} {}\n", a.src, a.dst, a.c1, a.c2, a.u));
        }
        out
    }
}

fn parse_field<T: std::str::FromStr>(
    token: &str,
    line: usize,
    field: &'static str,
) -> Result<T, ParseError> {
    token.parse().map_err(|_| ParseError::BadNumber {
        line,
        field,
        token: token.to_string(),
    })
}

/// Severity of a [`Violation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A single finding from [`Instance::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    MedianCountOutOfRange { p: usize, n: usize },
    NegativeBudget { budget: f64 },
    NegativeDemand { node: usize, demand: f64 },
    NodeIdOutOfRange { arc: usize, src: usize, dst: usize },
    SelfLoop { arc: usize, node: usize },
    DuplicateArc { src: usize, dst: usize },
    NegativeWeight { arc: usize, field: &'static str, value: f64 },
    /// `dst` cannot be reached from `src`: the graph is not strongly connected.
    Unreachable { src: usize, dst: usize },
    /// Permitted by the model, but b_a = u_a would drive the effective arc
    /// cost below zero.
    CapExceedsCost { arc: usize, u: f64, c2: f64 },
}

impl Violation {
    pub fn severity(&self) -> Severity {
        match self {
            Violation::CapExceedsCost { .. } => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MedianCountOutOfRange { p, n } => {
                write!(f, "p must satisfy 1 <= p < n (p = {p}, n = {n})")
            }
            Violation::NegativeBudget { budget } => write!(f, "budget must be >= 0 (got {budget})"),
            Violation::NegativeDemand { node, demand } => {
                write!(f, "node {node}: demand must be >= 0 (got {demand})")
            }
            Violation::NodeIdOutOfRange { arc, src, dst } => {
                write!(f, "arc {arc}: endpoint out of range ({src} -> {dst})")
            }
            Violation::SelfLoop { arc, node } => write!(f, "arc {arc}: self-loop at node {node}"),
            Violation::DuplicateArc { src, dst } => write!(f, "duplicate arc ({src} -> {dst})"),
            Violation::NegativeWeight { arc, field, value } => {
                write!(f, "arc {arc}: {field} must be >= 0 (got {value})")
            }
            Violation::Unreachable { src, dst } => {
                write!(f, "node {dst} unreachable from node {src}")
            }
            Violation::CapExceedsCost { arc, u, c2 } => {
                write!(f, "arc {arc}: upgrade cap {u} exceeds cost {c2}; effective cost may go negative")
            }
        }
    }
}

/// Errors from [`Instance::parse`], each tied to a source line.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("missing header: expected 'IPMU 1'")]
    MissingHeader,
    #[error("line {line}: bad magic, expected 'IPMU 1'")]
    BadMagic { line: usize },
    #[error("line {line}: expected 'n m p B', found {found} fields")]
    BadCountsLine { line: usize, found: usize },
    #[error("line {line}: expected 'node_id demand', found {found} fields")]
    BadNodeLine { line: usize, found: usize },
    #[error("line {line}: expected 'src dst c1 c2 u', found {found} fields")]
    BadArcLine { line: usize, found: usize },
    #[error("line {line}: {field}: cannot parse '{token}'")]
    BadNumber { line: usize, field: &'static str, token: String },
    #[error("line {line}: p must satisfy 1 <= p < n (p = {p}, n = {n})")]
    MedianCountOutOfRange { line: usize, p: usize, n: usize },
    #[error("line {line}: {field} must be >= 0 (got {value})")]
    NegativeValue { line: usize, field: &'static str, value: f64 },
    #[error("line {line}: node id {id} out of range 1..={n}")]
    NodeIdOutOfRange { line: usize, id: usize, n: usize },
    #[error("line {line}: node {id} listed twice")]
    DuplicateNode { line: usize, id: usize },
    #[error("line {line}: self-loop at node {node}")]
    SelfLoop { line: usize, node: usize },
    #[error("line {line}: duplicate arc ({src} -> {dst})")]
    DuplicateArc { line: usize, src: usize, dst: usize },
    #[error("expected {expected} node lines, found {actual}")]
    NodeCountMismatch { expected: usize, actual: usize },
    #[error("expected {expected} arc lines, found {actual}")]
    ArcCountMismatch { expected: usize, actual: usize },
    #[error("line {line}: content after the declared arc count")]
    TrailingContent { line: usize },
}

/// Whether `c2` correlates with `c1` (type P) or is drawn independently
/// (type R).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    /// c2 = c1 + U(1, 1.5): cost tracks time.
    Correlated,
    /// c2 ~ U(0, 100), independent of c1.
    Random,
}

impl InstanceKind {
    /// One-letter benchmark tag: P for correlated, R for random.
    pub fn tag(&self) -> &'static str {
        match self {
            InstanceKind::Correlated => "P",
            InstanceKind::Random => "R",
        }
    }
}

impl std::str::FromStr for InstanceKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P" | "p" => Ok(InstanceKind::Correlated),
            "R" | "r" => Ok(InstanceKind::Random),
            other => Err(format!("unknown instance type '{other}' (expected P or R)")),
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Arc count given either directly or as a fraction of the complete digraph
/// (gamma = n(n-1) arcs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArcCount {
    Count(usize),
    Density(f64),
}

/// Parameters for [`generate`].
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub arcs: ArcCount,
    pub p: usize,
    pub budget: f64,
    pub kind: InstanceKind,
    /// Integer demand interval, inclusive. Default (1, 1): unit demands.
    pub demand_range: (u32, u32),
    pub seed: u64,
}

impl GenSpec {
    pub fn new(n: usize, arcs: ArcCount, p: usize, budget: f64, kind: InstanceKind, seed: u64) -> Self {
        Self { n, arcs, p, budget, kind, demand_range: (1, 1), seed }
    }

    /// Resolved arc count m.
    pub fn arc_total(&self) -> usize {
        let gamma = self.n * (self.n - 1);
        match self.arcs {
            ArcCount::Count(m) => m,
            ArcCount::Density(d) => (d * gamma as f64).round() as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("need at least 2 nodes (got n = {n})")]
    TooFewNodes { n: usize },
    #[error("p must satisfy 1 <= p < n (p = {p}, n = {n})")]
    MedianCountOutOfRange { p: usize, n: usize },
    #[error("budget must be >= 0 (got {budget})")]
    NegativeBudget { budget: f64 },
    #[error("m = {m} arcs cannot seed a directed cycle over n = {n} nodes")]
    TooFewArcs { m: usize, n: usize },
    #[error("m = {m} exceeds the complete digraph size gamma = {gamma}")]
    TooManyArcs { m: usize, gamma: usize },
    #[error("empty demand range ({lo}, {hi})")]
    EmptyDemandRange { lo: u32, hi: u32 },
}

/// Generates a strongly connected random instance, deterministically for a
/// fixed spec (seed included).
///
/// Construction: a random directed Hamiltonian cycle guarantees strong
/// connectivity, then distinct extra arcs are added uniformly at random until
/// m arcs exist. Times are c1 ~ U(0, 100); costs follow the instance kind;
/// upgrade caps are u = c2; demands are uniform integers from `demand_range`.
pub fn generate(spec: &GenSpec) -> Result<Instance, GenError> {
    if spec.n < 2 {
        return Err(GenError::TooFewNodes { n: spec.n });
    }
    if spec.p < 1 || spec.p >= spec.n {
        return Err(GenError::MedianCountOutOfRange { p: spec.p, n: spec.n });
    }
    if spec.budget < 0.0 {
        return Err(GenError::NegativeBudget { budget: spec.budget });
    }
    let n = spec.n;
    let gamma = n * (n - 1);
    let m = spec.arc_total();
    if m < n {
        return Err(GenError::TooFewArcs { m, n });
    }
    if m > gamma {
        return Err(GenError::TooManyArcs { m, gamma });
    }
    let (lo, hi) = spec.demand_range;
    if lo > hi {
        return Err(GenError::EmptyDemandRange { lo, hi });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // (a) Hamiltonian cycle over a random node permutation.
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(&mut rng);
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(m);
    let mut taken = HashSet::with_capacity(m * 2);
    for k in 0..n {
        let pair = (order[k], order[(k + 1) % n]);
        pairs.push(pair);
        taken.insert(pair);
    }

    // (b) Remaining arcs: partial Fisher-Yates over the complement.
    let mut candidates: Vec<(usize, usize)> = Vec::with_capacity(gamma - n);
    for src in 1..=n {
        for dst in 1..=n {
            if src != dst && !taken.contains(&(src, dst)) {
                candidates.push((src, dst));
            }
        }
    }
    let extra = m - n;
    for k in 0..extra {
        let pick = rng.gen_range(k..candidates.len());
        candidates.swap(k, pick);
        pairs.push(candidates[k]);
    }

    // (c)-(e) weights, one (c1, c2) draw pair per arc in creation order.
    let arcs: Vec<Arc> = pairs
        .into_iter()
        .map(|(src, dst)| {
            let c1: f64 = rng.gen_range(0.0..100.0);
            let c2: f64 = match spec.kind {
                InstanceKind::Random => rng.gen_range(0.0..100.0),
                InstanceKind::Correlated => c1 + rng.gen_range(1.0..1.5),
            };
            Arc::new(src, dst, c1, c2, c2)
        })
        .collect();

    // (f) integer demands.
    let demand: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..=hi) as f64).collect();

    Ok(Instance::new(n, spec.p, spec.budget, demand, arcs))
}

#[cfg(test)]
pub(crate) fn line3() -> Instance {
    // 3-node bidirectional line: 1 <-> 2 <-> 3, unit demands, p = 1, B = 3.
    Instance::new(
        3,
        1,
        3.0,
        vec![1.0, 1.0, 1.0],
        vec![
            Arc::new(1, 2, 1.0, 2.0, 2.0),
            Arc::new(2, 1, 1.0, 2.0, 2.0),
            Arc::new(2, 3, 1.0, 4.0, 4.0),
            Arc::new(3, 2, 1.0, 4.0, 4.0),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line3_is_clean() {
        assert!(line3().validate().is_empty());
    }

    #[test]
    fn missing_arc_breaks_connectivity_with_witness() {
        let inst = line3();
        let arcs: Vec<Arc> = inst
            .arcs
            .iter()
            .filter(|a| !(a.src == 3 && a.dst == 2))
            .cloned()
            .collect();
        let broken = Instance::new(3, 1, 3.0, inst.demand.clone(), arcs);
        let violations = broken.validate();
        assert_eq!(violations, vec![Violation::Unreachable { src: 3, dst: 1 }]);
        assert_eq!(violations[0].to_string(), "node 1 unreachable from node 3");
    }

    #[test]
    fn raised_cap_is_warning_not_error() {
        let mut inst = line3();
        let idx = inst.arcs.iter().position(|a| a.src == 2 && a.dst == 3).unwrap();
        inst.arcs[idx].u = 10.0;
        let violations = inst.validate();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].severity(), Severity::Warning);
        assert!(matches!(violations[0], Violation::CapExceedsCost { .. }));
        assert!(inst.is_valid());
    }

    #[test]
    fn parse_serialize_roundtrip_is_canonical() {
        // Arcs and nodes deliberately out of canonical order, plus comments.
        let text = "\
# toy instance
IPMU 1
3 4 1 3
2 1
1 1
3 1
3 2 1 4 4
1 2 1 2 2
2 3 1 4 4
2 1 1 2 2
";
        let inst = Instance::parse(text).unwrap();
        assert_eq!(inst, line3());
        let canonical = inst.to_text();
        let reparsed = Instance::parse(&canonical).unwrap();
        assert_eq!(reparsed.to_text(), canonical);
    }

    #[test]
    fn parse_rejects_p_equal_n() {
        let text = "IPMU 1\n3 4 3 3\n1 1\n2 1\n3 1\n1 2 1 2 2\n2 1 1 2 2\n2 3 1 4 4\n3 2 1 4 4\n";
        let err = Instance::parse(text).unwrap_err();
        assert!(matches!(err, ParseError::MedianCountOutOfRange { p: 3, n: 3, .. }));
        assert!(err.to_string().contains("p must satisfy 1 <= p < n"));
    }

    #[test]
    fn parse_reports_missing_arc_line_counts() {
        let text = "IPMU 1\n3 4 1 3\n1 1\n2 1\n3 1\n1 2 1 2 2\n2 1 1 2 2\n2 3 1 4 4\n";
        let err = Instance::parse(text).unwrap_err();
        assert_eq!(err, ParseError::ArcCountMismatch { expected: 4, actual: 3 });
    }

    #[test]
    fn parse_reports_duplicate_arc_with_line() {
        let text = "IPMU 1\n3 4 1 3\n1 1\n2 1\n3 1\n1 2 1 2 2\n1 2 9 9 9\n2 3 1 4 4\n3 2 1 4 4\n";
        let err = Instance::parse(text).unwrap_err();
        assert_eq!(err, ParseError::DuplicateArc { line: 7, src: 1, dst: 2 });
    }

    #[test]
    fn parse_reports_negative_weight_with_line() {
        let text = "IPMU 1\n3 4 1 3\n1 1\n2 1\n3 1\n1 2 -1 2 2\n2 1 1 2 2\n2 3 1 4 4\n3 2 1 4 4\n";
        let err = Instance::parse(text).unwrap_err();
        assert!(matches!(err, ParseError::NegativeValue { line: 6, field: "c1", .. }));
    }

    #[test]
    fn generated_p_type_has_bounded_cost_gap() {
        let spec = GenSpec::new(5, ArcCount::Count(20), 2, 2.0, InstanceKind::Correlated, 7);
        let inst = generate(&spec).unwrap();
        assert_eq!(inst.n, 5);
        assert_eq!(inst.m(), 20);
        for a in &inst.arcs {
            let gap = a.c2 - a.c1;
            assert!((1.0..=1.5).contains(&gap), "gap {gap} outside [1, 1.5]");
            assert_eq!(a.u, a.c2);
        }
    }

    #[test]
    fn density_resolves_to_expected_arc_count() {
        let spec = GenSpec::new(100, ArcCount::Density(0.25), 5, 100.0, InstanceKind::Random, 1);
        let inst = generate(&spec).unwrap();
        assert_eq!(inst.m(), 2475);
        assert!(inst.validate().is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = GenSpec::new(40, ArcCount::Count(100), 2, 50.0, InstanceKind::Random, 3);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert!(a.validate().is_empty());
    }

    #[test]
    fn generated_instance_is_strongly_connected_by_bfs() {
        // Independent reachability check: BFS from every node must cover V.
        let spec = GenSpec::new(40, ArcCount::Count(100), 2, 50.0, InstanceKind::Random, 3);
        let inst = generate(&spec).unwrap();
        let mut adj = vec![Vec::new(); inst.n + 1];
        for a in &inst.arcs {
            adj[a.src].push(a.dst);
        }
        for start in 1..=inst.n {
            let mut seen = vec![false; inst.n + 1];
            let mut stack = vec![start];
            seen[start] = true;
            let mut count = 1;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        count += 1;
                        stack.push(w);
                    }
                }
            }
            assert_eq!(count, inst.n, "BFS from {start} missed nodes");
        }
    }

    #[test]
    fn generator_rejects_bad_arc_counts() {
        let mut spec = GenSpec::new(10, ArcCount::Count(5), 2, 1.0, InstanceKind::Random, 1);
        assert_eq!(generate(&spec).unwrap_err(), GenError::TooFewArcs { m: 5, n: 10 });
        spec.arcs = ArcCount::Count(91);
        assert_eq!(generate(&spec).unwrap_err(), GenError::TooManyArcs { m: 91, gamma: 90 });
    }

    #[test]
    fn p_type_time_cost_correlation_is_high() {
        let spec = GenSpec::new(40, ArcCount::Count(160), 2, 50.0, InstanceKind::Correlated, 11);
        let inst = generate(&spec).unwrap();
        let xs: Vec<f64> = inst.arcs.iter().map(|a| a.c1).collect();
        let ys: Vec<f64> = inst.arcs.iter().map(|a| a.c2).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (mx, my) = (mean(&xs), mean(&ys));
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        let mut syy = 0.0;
        for (x, y) in xs.iter().zip(&ys) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
            syy += (y - my) * (y - my);
        }
        let r2 = (sxy * sxy) / (sxx * syy);
        assert!(r2 > 0.98, "r^2 = {r2}");
    }
}
