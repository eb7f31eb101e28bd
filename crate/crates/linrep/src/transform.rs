//! Conversion of a hyperedge network plus a rate vector into a network on a
//! directed acyclic multigraph with unit-capacity edges.
//!
//! Scalar linear solvability of the output implies that the rate vector is
//! achievable on the input with vector linear codes. The converse is not
//! claimed, so nothing here is evidence of non-achievability.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::constraints::NetworkInstance;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("rate vector has length {0}, the network has {1} variables")]
    RateLength(usize, usize),
    #[error("edge {0} is produced by more than one relation")]
    Redefined(usize),
    #[error("relations {0:?} can never be processed: their inputs are not all defined")]
    Stuck(Vec<usize>),
    #[error("edge list, line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Directed multigraph with sources, demanding sinks and the node carrying
/// each message.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultigraphInstance {
    pub nodes: Vec<String>,
    /// (tail, head, color); parallel edges have distinct colors
    pub edges: Vec<(usize, usize, u32)>,
    /// (node, source message)
    pub sources: Vec<(usize, usize)>,
    /// (node, demanded source message)
    pub sinks: Vec<(usize, usize)>,
    pub msg2node: BTreeMap<usize, usize>,
    pub rates: Vec<u32>,
}

struct Builder {
    out: MultigraphInstance,
    colors: BTreeMap<(usize, usize), u32>,
}

impl Builder {
    fn node(&mut self, name: String) -> usize {
        let id = self.out.nodes.len();
        self.out.nodes.push(name);
        id
    }

    fn edges(&mut self, tail: usize, head: usize, count: u32) {
        for _ in 0..count {
            let c = self.colors.entry((tail, head)).or_insert(0);
            *c += 1;
            self.out.edges.push((tail, head, *c));
        }
    }

    fn feed(&mut self, inputs: &[usize], head: usize) {
        for &i in inputs {
            let tail = self.out.msg2node[&i];
            self.edges(tail, head, self.out.rates[i - 1]);
        }
    }
}

/// Runs the gadget construction. Relations whose outputs are all sources
/// become decoders; the remaining outputs of any relation are encoded
/// edges. Encoders are taken lowest index first among those whose inputs
/// are available.
pub fn transform(net: &NetworkInstance, rates: &[u32]) -> Result<MultigraphInstance, TransformError> {
    if rates.len() != net.n {
        return Err(TransformError::RateLength(rates.len(), net.n));
    }
    let mut b = Builder {
        out: MultigraphInstance { rates: rates.to_vec(), ..Default::default() },
        colors: BTreeMap::new(),
    };
    for i in 1..=net.k {
        let collector = b.node(format!("v{i}"));
        for j in 1..=rates[i - 1] {
            let s = b.node(format!("s{i}_{j}"));
            b.out.sources.push((s, i));
            b.edges(s, collector, 1);
        }
        b.out.msg2node.insert(i, collector);
    }

    let mut encoders: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut decoders: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut produced = BTreeSet::new();
    for (idx, _) in net.relations.iter().enumerate() {
        let (edges, srcs): (Vec<usize>, Vec<usize>) = net.outputs(idx).into_iter().partition(|&o| o > net.k);
        for &e in &edges {
            if !produced.insert(e) {
                return Err(TransformError::Redefined(e));
            }
        }
        if !edges.is_empty() {
            encoders.push((idx, edges));
        }
        if !srcs.is_empty() {
            decoders.push((idx, srcs));
        }
    }

    let mut pending: Vec<(usize, Vec<usize>)> = encoders;
    while !pending.is_empty() {
        let ready = pending.iter().position(|(idx, _)| net.relations[*idx].0.iter().all(|i| b.out.msg2node.contains_key(i)));
        let Some(p) = ready else {
            return Err(TransformError::Stuck(pending.iter().map(|(idx, _)| idx + 1).collect()));
        };
        let (idx, outs) = pending.remove(p);
        let inputs = &net.relations[idx].0;
        for o in outs {
            let v1 = b.node(format!("e{o}_in"));
            let v2 = b.node(format!("e{o}"));
            b.out.msg2node.insert(o, v2);
            b.feed(inputs, v1);
            b.edges(v1, v2, rates[o - 1]);
        }
    }

    for (idx, srcs) in decoders {
        let inputs = &net.relations[idx].0;
        if inputs.iter().any(|i| !b.out.msg2node.contains_key(i)) {
            return Err(TransformError::Stuck(vec![idx + 1]));
        }
        let single = srcs.len() == 1;
        for o in srcs {
            let name = if single { format!("t{}", idx + 1) } else { format!("t{}_{o}", idx + 1) };
            let t = b.node(name);
            b.feed(inputs, t);
            b.out.sinks.push((t, o));
        }
    }
    Ok(b.out)
}

/// Number of nodes the construction produces.
pub fn expected_nodes(net: &NetworkInstance, rates: &[u32]) -> usize {
    let mut total: usize = (0..net.k).map(|i| rates[i] as usize + 1).sum();
    for idx in 0..net.relations.len() {
        let outs = net.outputs(idx);
        let edges = outs.iter().filter(|&&o| o > net.k).count();
        total += 2 * edges + (outs.len() - edges);
    }
    total
}

/// Structural problems found in a multigraph instance; empty when clean.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransformReport {
    pub violations: Vec<String>,
}

impl TransformReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_transform(g: &MultigraphInstance) -> TransformReport {
    let mut v = Vec::new();
    let n = g.nodes.len();
    let mut indeg = vec![0usize; n];
    let mut adj = vec![Vec::new(); n];
    let mut seen = BTreeSet::new();
    for &(t, h, c) in &g.edges {
        if t >= n || h >= n {
            v.push(format!("edge ({t}, {h}, {c}) references a missing node"));
            continue;
        }
        if !seen.insert((t, h, c)) {
            v.push(format!("edge {} -> {} color {c} appears twice", g.nodes[t], g.nodes[h]));
        }
        indeg[h] += 1;
        adj[t].push(h);
    }
    let mut deg = indeg.clone();
    let mut queue: VecDeque<usize> = (0..n).filter(|&x| deg[x] == 0).collect();
    let mut visited = 0;
    while let Some(x) = queue.pop_front() {
        visited += 1;
        for &y in &adj[x] {
            deg[y] -= 1;
            if deg[y] == 0 {
                queue.push_back(y);
            }
        }
    }
    if visited < n {
        v.push("graph has a directed cycle".to_string());
    }
    let k = g.sources.iter().map(|&(_, m)| m).max().unwrap_or(0);
    for &(s, _) in &g.sources {
        if s < n && indeg[s] != 0 {
            v.push(format!("source node {} has incoming edges", g.nodes[s]));
        }
    }
    let mut source_nodes: BTreeSet<usize> = g.sources.iter().map(|&(s, _)| s).collect();
    source_nodes.extend(g.msg2node.iter().filter(|(m, _)| g.rates.get(**m - 1) == Some(&0)).map(|(_, &x)| x));
    for x in (0..n).filter(|x| indeg[*x] == 0 && !source_nodes.contains(x)) {
        v.push(format!("node {} has no incoming edges and is not a source", g.nodes[x]));
    }
    let sink_nodes: BTreeSet<usize> = g.sinks.iter().map(|&(t, _)| t).collect();
    if sink_nodes.len() != g.sinks.len() {
        v.push("a sink carries more than one demand".to_string());
    }
    for &(t, m) in &g.sinks {
        if m == 0 || m > k {
            v.push(format!("sink {} demands unknown message {m}", g.nodes.get(t).map_or("?", String::as_str)));
        }
    }
    for (&m, &node) in &g.msg2node {
        let want = g.rates.get(m - 1).copied().unwrap_or(0) as usize;
        if node >= n {
            v.push(format!("message {m} maps to a missing node"));
        } else if indeg[node] != want {
            v.push(format!("message {m} at node {} has in-degree {}, rate {want}", g.nodes[node], indeg[node]));
        }
    }
    for m in 1..=g.rates.len() {
        if !g.msg2node.contains_key(&m) {
            v.push(format!("message {m} has no node"));
        }
    }
    TransformReport { violations: v }
}

impl fmt::Display for MultigraphInstance {
    /// Line-oriented edge list. `rate` lines and `message` lines carry the
    /// rate vector and the message-to-node map.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r: Vec<String> = self.rates.iter().map(u32::to_string).collect();
        writeln!(f, "rates {}", r.join(" "))?;
        for name in &self.nodes {
            writeln!(f, "node {name}")?;
        }
        for &(t, h, c) in &self.edges {
            writeln!(f, "edge {} {} {c}", self.nodes[t], self.nodes[h])?;
        }
        for &(s, m) in &self.sources {
            writeln!(f, "source {} {m}", self.nodes[s])?;
        }
        for &(t, m) in &self.sinks {
            writeln!(f, "sink {} demands {m}", self.nodes[t])?;
        }
        for (m, &node) in &self.msg2node {
            writeln!(f, "message {m} {}", self.nodes[node])?;
        }
        Ok(())
    }
}

impl MultigraphInstance {
    pub fn parse(text: &str) -> Result<MultigraphInstance, TransformError> {
        let mut g = MultigraphInstance::default();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let err = |msg: &str| TransformError::Parse { line: ln + 1, msg: msg.into() };
            let w: Vec<&str> = raw.split_whitespace().collect();
            let Some(&kw) = w.first() else { continue };
            let node = |name: &str| index.get(name).copied().ok_or_else(|| err(&format!("unknown node {name}")));
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(&format!("bad number {s}")));
            match (kw, w.len()) {
                ("rates", _) => {
                    g.rates = w[1..].iter().map(|s| s.parse::<u32>().map_err(|_| err("bad rate"))).collect::<Result<_, _>>()?;
                }
                ("node", 2) => {
                    if index.insert(w[1].to_string(), g.nodes.len()).is_some() {
                        return Err(err("duplicate node"));
                    }
                    g.nodes.push(w[1].to_string());
                }
                ("edge", 4) => {
                    let c = w[3].parse::<u32>().map_err(|_| err("bad color"))?;
                    g.edges.push((node(w[1])?, node(w[2])?, c));
                }
                ("source", 3) => g.sources.push((node(w[1])?, num(w[2])?)),
                ("sink", 4) if w[2] == "demands" => g.sinks.push((node(w[1])?, num(w[3])?)),
                ("message", 3) => {
                    g.msg2node.insert(num(w[1])?, node(w[2])?);
                }
                _ => return Err(err("unrecognized line")),
            }
        }
        Ok(g)
    }

    /// Graphviz rendering; parallel edges are labelled with their color.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph transformed {\n");
        for &(n, m) in &self.sources {
            s.push_str(&format!("  \"{}\" [shape=box, label=\"{} ({m})\"];\n", self.nodes[n], self.nodes[n]));
        }
        for &(n, m) in &self.sinks {
            s.push_str(&format!("  \"{}\" [shape=doublecircle, label=\"{} -> {m}\"];\n", self.nodes[n], self.nodes[n]));
        }
        for &(t, h, c) in &self.edges {
            s.push_str(&format!("  \"{}\" -> \"{}\" [label=\"{c}\"];\n", self.nodes[t], self.nodes[h]));
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn fano_gadget_counts() {
        let net = catalog::fano();
        let g = transform(&net, &[1; 7]).unwrap();
        assert!(validate_transform(&g).is_clean());
        let sources: Vec<_> = g.nodes.iter().filter(|n| n.starts_with('s') || n.starts_with('v')).collect();
        assert_eq!(sources.len(), 6);
        // four encoders with two inputs each: 2 nodes and 3 edges apiece
        assert_eq!(g.nodes.iter().filter(|n| n.starts_with('e')).count(), 8);
        let into_bridge = g.edges.iter().filter(|&&(_, h, _)| g.nodes[h].starts_with('e')).count();
        assert_eq!(into_bridge, 4 * 3);
        assert_eq!(g.sinks.len(), 3);
        for &(t, _) in &g.sinks {
            assert_eq!(g.edges.iter().filter(|&&(_, h, _)| h == t).count(), 2);
        }
        assert_eq!(g.nodes.len(), expected_nodes(&net, &[1; 7]));
    }

    #[test]
    fn smallest_instance() {
        let net = NetworkInstance::new(1, 2, vec![(vec![1], vec![1, 2]), (vec![2], vec![1, 2])]).unwrap();
        let g = transform(&net, &[1, 1]).unwrap();
        assert_eq!(g.nodes, ["v1", "s1_1", "e2_in", "e2", "t2"]);
        assert_eq!(g.edges.len(), 4);
        assert_eq!(g.sinks, [(4, 1)]);
        assert!(validate_transform(&g).is_clean());
    }

    #[test]
    fn doubling_rates_doubles_multiplicities() {
        for name in catalog::NETWORK_NAMES {
            let net = catalog::network(name).unwrap();
            let one = transform(&net, &vec![1; net.n]).unwrap();
            let two = transform(&net, &vec![2; net.n]).unwrap();
            for (name_h, _) in one.nodes.iter().enumerate().filter(|(_, n)| n.starts_with('e') || n.starts_with('t')) {
                let head = &one.nodes[name_h];
                let h2 = two.nodes.iter().position(|n| n == head).unwrap();
                let c1 = one.edges.iter().filter(|e| e.1 == name_h).count();
                let c2 = two.edges.iter().filter(|e| e.1 == h2).count();
                assert_eq!(c2, 2 * c1, "{name} {head}");
            }
            assert!(validate_transform(&two).is_clean());
            let mut zero = vec![1; net.n];
            zero[0] = 0;
            assert!(validate_transform(&transform(&net, &zero).unwrap()).is_clean(), "{name}");
        }
    }

    #[test]
    fn node_formula_and_round_trip() {
        for name in catalog::NETWORK_NAMES {
            let net = catalog::network(name).unwrap();
            let rates: Vec<u32> = (0..net.n as u32).map(|i| 1 + i % 3).collect();
            let g = transform(&net, &rates).unwrap();
            assert_eq!(g.nodes.len(), expected_nodes(&net, &rates), "{name}");
            assert!(validate_transform(&g).is_clean(), "{name}");
            assert_eq!(MultigraphInstance::parse(&g.to_string()).unwrap(), g);
            assert_eq!(transform(&net, &rates).unwrap().to_string(), g.to_string());
        }
    }

    #[test]
    fn corruption_and_errors() {
        let mut g = transform(&catalog::fano(), &[1; 7]).unwrap();
        let bridge = g.edges.iter().position(|e| g.nodes[e.1] == "e6").unwrap();
        let (_, h, _) = g.edges.remove(bridge);
        let report = validate_transform(&g);
        assert!(!report.is_clean());
        assert!(report.violations.iter().any(|v| v.contains(&g.nodes[h])), "{report:?}");
        assert_eq!(transform(&catalog::fano(), &[1; 6]), Err(TransformError::RateLength(6, 7)));
        let cyclic = NetworkInstance::new(1, 3, vec![(vec![1, 3], vec![1, 2, 3]), (vec![2], vec![2, 3])]).unwrap();
        assert_eq!(transform(&cyclic, &[1; 3]), Err(TransformError::Stuck(vec![1, 2])));
        assert!(MultigraphInstance::parse("edge a b 1").is_err());
    }
}
