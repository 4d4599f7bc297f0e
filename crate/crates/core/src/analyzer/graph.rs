//! Call graph extraction and graph diagnostics.

use super::headers::{CorpusScan, MacroDef};
use super::lex::blank_strings;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Macro-language statement words that are not macro calls.
const MACRO_KEYWORDS: &[&str] = &[
    "macro", "mend", "if", "then", "else", "do", "end", "to", "by", "until", "while", "let", "put",
    "global", "local", "goto", "return", "abort", "symdel", "window", "display", "input",
    "syscall", "sysexec", "include", "eval", "sysevalf", "sysfunc", "qsysfunc", "str", "nrstr",
    "quote", "nrquote", "bquote", "nrbquote", "superq", "unquote", "scan", "qscan", "substr",
    "qsubstr", "upcase", "qupcase", "lowcase", "qlowcase", "length", "index", "trim", "left",
    "cmpres", "verify", "datatyp", "sysget", "sysprod", "then%", "label",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CallEdge {
    pub caller: String,
    pub callee: String,
    /// Built through `&&var&i`-style indirection; the callee token is the
    /// unresolved source text, flagged for manual review.
    pub dynamic: bool,
    /// Callee is not a definition in the scanned corpus.
    pub external: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ImplicitKind {
    GlobalVar,
    DatasetExist,
}

/// A hidden coupling channel: shared global state or dataset existence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImplicitRef {
    pub macro_name: String,
    pub kind: ImplicitKind,
    pub token: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CallGraph {
    pub nodes: BTreeSet<String>,
    pub edges: Vec<CallEdge>,
    pub implicit_refs: Vec<ImplicitRef>,
}

impl CallGraph {
    pub fn callees_of(&self, name: &str) -> BTreeSet<&str> {
        self.edges
            .iter()
            .filter(|e| e.caller == name && !e.dynamic)
            .map(|e| e.callee.as_str())
            .collect()
    }

    pub fn in_degree(&self, name: &str) -> usize {
        let mut callers = BTreeSet::new();
        for e in self.edges.iter().filter(|e| !e.dynamic && e.callee == name) {
            callers.insert(&e.caller);
        }
        callers.len()
    }

    /// Graphviz DOT form for external visualization.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph macro_calls {\n");
        for node in &self.nodes {
            out.push_str(&format!("  \"{node}\";\n"));
        }
        for edge in &self.edges {
            let mut attrs = Vec::new();
            if edge.dynamic {
                attrs.push("style=dashed".to_string());
                attrs.push("label=\"dynamic\"".to_string());
            }
            if edge.external {
                attrs.push("color=gray".to_string());
            }
            let attr_text = if attrs.is_empty() {
                String::new()
            } else {
                format!(" [{}]", attrs.join(", "))
            };
            out.push_str(&format!(
                "  \"{}\" -> \"{}\"{};\n",
                edge.caller, edge.callee, attr_text
            ));
        }
        out.push_str("}\n");
        out
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Scan macro bodies for `%name(`, bare `%name;`/`%name `, `&&var&i`
/// indirection, `%global`, and `%sysfunc(exist())`.
pub fn extract_call_graph(scan: &CorpusScan, defs: &[MacroDef]) -> CallGraph {
    let known: BTreeSet<String> = defs.iter().map(|d| d.name.clone()).collect();
    let mut graph = CallGraph {
        nodes: known.clone(),
        ..Default::default()
    };
    let keywords: BTreeSet<&str> = MACRO_KEYWORDS.iter().copied().collect();

    for def in defs {
        let body = blank_strings(&scan.body_of(def)).to_lowercase();
        let chars: Vec<char> = body.chars().collect();
        let mut seen_edges: BTreeSet<(String, bool)> = BTreeSet::new();
        let mut i = 0usize;
        while i < chars.len() {
            if chars[i] != '%' {
                i += 1;
                continue;
            }
            // dynamic indirection: % followed by &
            if chars.get(i + 1) == Some(&'&') {
                let mut j = i + 1;
                while j < chars.len()
                    && (is_ident_char(chars[j]) || chars[j] == '&' || chars[j] == '.')
                {
                    j += 1;
                }
                let token: String = chars[i + 1..j].iter().collect();
                if seen_edges.insert((token.clone(), true)) {
                    graph.edges.push(CallEdge {
                        caller: def.name.clone(),
                        callee: token,
                        dynamic: true,
                        external: true,
                    });
                }
                i = j;
                continue;
            }
            let word_start = i + 1;
            let mut j = word_start;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            if j == word_start {
                i += 1;
                continue;
            }
            let word: String = chars[word_start..j].iter().collect();

            // the body includes its own %macro header line; skip header tokens
            if word == "macro" {
                i = j;
                continue;
            }
            if word == "global" || word == "local" {
                // %global a b c;
                if word == "global" {
                    let mut k = j;
                    let mut names = Vec::new();
                    let mut current = String::new();
                    while k < chars.len() && chars[k] != ';' {
                        if is_ident_char(chars[k]) {
                            current.push(chars[k]);
                        } else if !current.is_empty() {
                            names.push(std::mem::take(&mut current));
                        }
                        k += 1;
                    }
                    if !current.is_empty() {
                        names.push(current);
                    }
                    for name in names {
                        graph.implicit_refs.push(ImplicitRef {
                            macro_name: def.name.clone(),
                            kind: ImplicitKind::GlobalVar,
                            token: name,
                        });
                    }
                    i = k;
                    continue;
                }
                i = j;
                continue;
            }
            if word == "sysfunc" || word == "qsysfunc" {
                // %sysfunc(exist(dataset))
                let rest: String = chars[j..(j + 64).min(chars.len())].iter().collect();
                let compact: String = rest.chars().filter(|c| !c.is_whitespace()).collect();
                if let Some(inner) = compact.strip_prefix("(exist(") {
                    let token: String = inner
                        .chars()
                        .take_while(|c| is_ident_char(*c) || *c == '.')
                        .collect();
                    if !token.is_empty() {
                        graph.implicit_refs.push(ImplicitRef {
                            macro_name: def.name.clone(),
                            kind: ImplicitKind::DatasetExist,
                            token,
                        });
                    }
                }
                i = j;
                continue;
            }
            if keywords.contains(word.as_str()) {
                i = j;
                continue;
            }
            // a call: %name( or bare %name; / %name<ws>
            let callee = word;
            if callee != def.name && seen_edges.insert((callee.clone(), false)) {
                let external = !known.contains(&callee);
                graph.edges.push(CallEdge {
                    caller: def.name.clone(),
                    callee,
                    dynamic: false,
                    external,
                });
            }
            i = j;
        }
    }
    graph
        .edges
        .sort_by(|a, b| (&a.caller, &a.callee, a.dynamic).cmp(&(&b.caller, &b.callee, b.dynamic)));
    graph
}

/// Diagnostics over the call graph.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    /// In-degree zero: entry points or dead code, for human review.
    pub orphans: Vec<String>,
    /// Elementary cycles, each reported once in canonical rotation
    /// (starting at the lexically smallest member).
    pub cycles: Vec<Vec<String>>,
    /// (name, in-degree) at or above the hub threshold.
    pub hubs: Vec<(String, usize)>,
    /// Connected components (≥2 nodes) of the undirected projection.
    pub clusters: Vec<Vec<String>>,
}

pub const DEFAULT_HUB_THRESHOLD: usize = 10;

pub fn graph_diagnostics(graph: &CallGraph, hub_threshold: usize) -> Diagnostics {
    let nodes: Vec<&String> = graph.nodes.iter().collect();
    let index: BTreeMap<&str, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();

    // internal, non-dynamic adjacency
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nodes.len()];
    let mut in_degree: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nodes.len()];
    for edge in graph.edges.iter().filter(|e| !e.dynamic && !e.external) {
        let (Some(&a), Some(&b)) = (
            index.get(edge.caller.as_str()),
            index.get(edge.callee.as_str()),
        ) else {
            continue;
        };
        adj[a].insert(b);
        in_degree[b].insert(a);
    }

    let orphans: Vec<String> = nodes
        .iter()
        .enumerate()
        .filter(|(i, _)| in_degree[*i].is_empty())
        .map(|(_, n)| (*n).clone())
        .collect();

    let mut hubs: Vec<(String, usize)> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| ((*n).clone(), in_degree[i].len()))
        .filter(|(_, d)| *d >= hub_threshold && hub_threshold > 0)
        .collect();
    hubs.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let cycles = enumerate_cycles(&adj)
        .into_iter()
        .map(|cycle| cycle.into_iter().map(|i| nodes[i].clone()).collect())
        .collect();

    // undirected components
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for (a, outs) in adj.iter().enumerate() {
        for &b in outs {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    let mut components: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for i in 0..nodes.len() {
        let root = find(&mut parent, i);
        components.entry(root).or_default().push(nodes[i].clone());
    }
    let mut clusters: Vec<Vec<String>> =
        components.into_values().filter(|c| c.len() >= 2).collect();
    for c in &mut clusters {
        c.sort();
    }
    clusters.sort();

    Diagnostics {
        orphans,
        cycles,
        hubs,
        clusters,
    }
}

/// Enumerate elementary cycles: for each start node s (in index order),
/// depth-first search restricted to nodes ≥ s, emitting a cycle whenever an
/// edge returns to s. Each elementary cycle is found exactly once, rooted at
/// its smallest member, which is also the canonical rotation.
pub fn enumerate_cycles(adj: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut cycles = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    let mut on_path = vec![false; n];

    fn dfs(
        v: usize,
        start: usize,
        adj: &[BTreeSet<usize>],
        path: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        cycles: &mut Vec<Vec<usize>>,
    ) {
        path.push(v);
        on_path[v] = true;
        for &w in &adj[v] {
            if w == start {
                cycles.push(path.clone());
            } else if w > start && !on_path[w] {
                dfs(w, start, adj, path, on_path, cycles);
            }
        }
        on_path[v] = false;
        path.pop();
    }

    for start in 0..n {
        dfs(start, start, adj, &mut path, &mut on_path, &mut cycles);
    }
    cycles
}
