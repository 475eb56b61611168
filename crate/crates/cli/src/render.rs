//! Text and DOT renderings of a derivation.

use std::collections::HashMap;
use std::fmt::Write;

use albo_core::engine::Rule;
use albo_core::trace::TraceEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    Text,
    Dot,
}

pub fn render_trace(events: &[TraceEvent], mode: TraceMode) -> String {
    match mode {
        TraceMode::Text => render_text(events),
        TraceMode::Dot => render_dot(events),
    }
}

fn child_labels(rule: Rule) -> [&'static str; 2] {
    if rule == Rule::UB {
        ["merge", "distinct"]
    } else {
        ["left", "right"]
    }
}

#[derive(Debug, Clone)]
struct Line {
    fact: String,
    /// Rule and premise facts, absent for input facts.
    origin: Option<(Rule, Vec<String>)>,
}

#[derive(Debug, Clone)]
enum End {
    Closed([String; 2]),
    Open,
    Cut(u64),
}

#[derive(Debug, Default, Clone)]
struct Node {
    lines: Vec<Line>,
    fork: Option<(Rule, [usize; 2])>,
    end: Option<End>,
}

/// One derivation: the tree rooted at `root`.
struct Tree {
    root: usize,
    nodes: HashMap<usize, Node>,
}

impl Tree {
    fn node(&mut self, id: usize) -> &mut Node {
        self.nodes.entry(id).or_default()
    }
}

fn build_trees(events: &[TraceEvent]) -> Vec<(Option<u64>, Tree)> {
    let mut trees = Vec::new();
    let mut restart = None;
    for e in events {
        match e {
            TraceEvent::Restart { bound } => restart = Some(*bound),
            TraceEvent::Root { node, facts } => {
                let mut tree = Tree {
                    root: *node,
                    nodes: HashMap::new(),
                };
                tree.node(*node).lines = facts
                    .iter()
                    .map(|f| Line {
                        fact: f.clone(),
                        origin: None,
                    })
                    .collect();
                trees.push((restart.take(), tree));
            }
            _ => {
                let Some((_, tree)) = trees.last_mut() else {
                    continue;
                };
                match e {
                    TraceEvent::Step {
                        node,
                        rule,
                        premises,
                        conclusions,
                        children,
                    } => {
                        let targets: Vec<usize> = if children.len() == 2 {
                            tree.node(*node).fork = Some((*rule, [children[0], children[1]]));
                            children.clone()
                        } else {
                            vec![*node]
                        };
                        for (target, set) in targets.iter().zip(conclusions) {
                            let lines = &mut tree.node(*target).lines;
                            for fact in set {
                                lines.push(Line {
                                    fact: fact.clone(),
                                    origin: Some((*rule, premises.clone())),
                                });
                            }
                        }
                    }
                    TraceEvent::Closed { node, clash } => {
                        tree.node(*node).end = Some(End::Closed(clash.clone()))
                    }
                    TraceEvent::Open { node } => tree.node(*node).end = Some(End::Open),
                    TraceEvent::Cut { node, steps } => {
                        tree.node(*node).end = Some(End::Cut(*steps))
                    }
                    TraceEvent::Root { .. } | TraceEvent::Restart { .. } => unreachable!(),
                }
            }
        }
    }
    trees
}

/// Numbered lines in tree order. Each derived line names its rule and the
/// numbers of its premises; a branch point is marked with `▶` and the
/// children are indented below it.
fn render_text(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for (restart, tree) in build_trees(events) {
        if let Some(bound) = restart {
            writeln!(out, "restart with branch bound {bound}").unwrap();
        }
        let mut counter = 0;
        text_node(&tree, tree.root, 0, &HashMap::new(), &mut counter, &mut out);
    }
    out
}

fn text_node(
    tree: &Tree,
    id: usize,
    depth: usize,
    inherited: &HashMap<String, usize>,
    counter: &mut usize,
    out: &mut String,
) {
    let Some(node) = tree.nodes.get(&id) else {
        return;
    };
    let mut visible = inherited.clone();
    let indent = "  ".repeat(depth);
    let refs = |visible: &HashMap<String, usize>, facts: &[String]| -> String {
        facts
            .iter()
            .map(|f| visible.get(f).map_or("?".to_string(), |n| n.to_string()))
            .collect::<Vec<_>>()
            .join(", ")
    };
    for line in &node.lines {
        if visible.contains_key(&line.fact) {
            continue;
        }
        *counter += 1;
        match &line.origin {
            None => writeln!(out, "{:>4}  {indent}{}", *counter, line.fact).unwrap(),
            Some((rule, premises)) => writeln!(
                out,
                "{:>4}  {indent}{}    {} {}",
                *counter,
                line.fact,
                rule,
                refs(&visible, premises)
            )
            .unwrap(),
        }
        visible.insert(line.fact.clone(), *counter);
    }
    match &node.end {
        Some(End::Closed(clash)) => {
            *counter += 1;
            writeln!(
                out,
                "{:>4}  {indent}⊥    {} {}",
                *counter,
                Rule::Clash,
                refs(&visible, clash)
            )
            .unwrap();
        }
        Some(End::Open) => writeln!(out, "      {indent}open").unwrap(),
        Some(End::Cut(steps)) => writeln!(out, "      {indent}cut after {steps} steps").unwrap(),
        None => {}
    }
    if let Some((rule, children)) = node.fork {
        for (label, child) in child_labels(rule).iter().zip(children) {
            writeln!(out, "      {indent}▶ {rule} {label}").unwrap();
            text_node(tree, child, depth + 1, &visible, counter, out);
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A directed graph whose nodes are rule applications. Branching steps have
/// one outgoing edge per child, labelled `merge`/`distinct` for (ub).
fn render_dot(events: &[TraceEvent]) -> String {
    let mut out = String::from("digraph derivation {\n");
    if !events.is_empty() {
        out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
    }
    // graph node that a tree node's next event attaches to, with edge label
    let mut last: HashMap<usize, (String, Option<&'static str>)> = HashMap::new();
    let mut k = 0usize;
    let mut fresh = |prefix: &str| {
        k += 1;
        format!("{prefix}{k}")
    };
    let edge = |out: &mut String,
                last: &mut HashMap<usize, (String, Option<&'static str>)>,
                node: usize,
                to: &str| {
        if let Some((from, label)) = last.remove(&node) {
            match label {
                Some(l) => writeln!(out, "  {from} -> {to} [label=\"{l}\"];").unwrap(),
                None => writeln!(out, "  {from} -> {to};").unwrap(),
            }
        }
    };
    for e in events {
        match e {
            TraceEvent::Root { node, facts } => {
                let id = fresh("r");
                let label = facts
                    .iter()
                    .map(|f| escape(f))
                    .collect::<Vec<_>>()
                    .join("\\n");
                writeln!(out, "  {id} [label=\"{label}\", shape=ellipse];").unwrap();
                last.insert(*node, (id, None));
            }
            TraceEvent::Restart { bound } => {
                let id = fresh("restart");
                writeln!(
                    out,
                    "  {id} [label=\"restart, bound {bound}\", shape=plaintext];"
                )
                .unwrap();
            }
            TraceEvent::Step {
                node,
                rule,
                conclusions,
                children,
                ..
            } => {
                let id = fresh("s");
                let parts: Vec<String> =
                    conclusions.iter().map(|c| escape(&c.join(", "))).collect();
                let label = format!("{rule}\\n{}", parts.join(" | "));
                writeln!(out, "  {id} [label=\"{label}\"];").unwrap();
                edge(&mut out, &mut last, *node, &id);
                if children.len() == 2 {
                    for (label, child) in child_labels(*rule).iter().zip(children) {
                        last.insert(*child, (id.clone(), Some(*label)));
                    }
                } else {
                    last.insert(*node, (id, None));
                }
            }
            TraceEvent::Closed { node, .. }
            | TraceEvent::Open { node }
            | TraceEvent::Cut { node, .. } => {
                let (prefix, label, shape) = match e {
                    TraceEvent::Closed { .. } => ("c", "⊥".to_string(), "circle"),
                    TraceEvent::Open { .. } => ("o", "open".to_string(), "doublecircle"),
                    TraceEvent::Cut { steps, .. } => ("x", format!("cut at {steps}"), "octagon"),
                    _ => unreachable!(),
                };
                let id = fresh(prefix);
                writeln!(out, "  {id} [label=\"{label}\", shape={shape}];").unwrap();
                edge(&mut out, &mut last, *node, &id);
            }
        }
    }
    out.push_str("}\n");
    out
}
