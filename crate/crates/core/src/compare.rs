//! Dataset comparison up to blank node renaming.
//!
//! Ground statements are compared as sets. Statements with blank nodes are
//! matched by searching for a bijection between the blank nodes of both
//! sides: colour refinement first partitions the nodes by their structural
//! neighbourhood, then a backtracking search tries candidates of equal
//! colour only.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::interop::write_statement_nq;
use crate::rdf::{render_term_nt, write_graph_nt, GraphName, Statement, Term};

pub const MAX_BLANK_NODES: usize = 10_000;
const MAX_SEARCH_STEPS: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error("{count} blank nodes exceed the comparison limit of {limit}")]
    TooManyBlankNodes { count: usize, limit: usize },
    #[error("blank node matching gave up after {0} steps")]
    SearchLimit(u64),
}

/// Result of a comparison. The statement lists are N-Quads lines; for
/// statements with blank nodes they show the statements whose shape has no
/// counterpart on the other side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareReport {
    pub isomorphic: bool,
    pub left_statements: usize,
    pub right_statements: usize,
    pub only_left: Vec<String>,
    pub only_right: Vec<String>,
}

impl CompareReport {
    pub fn summary(&self, max_lines: usize) -> String {
        if self.isomorphic {
            return format!("isomorphic ({} statements)", self.left_statements);
        }
        let mut s = format!(
            "not isomorphic: {} vs {} statements, {} only in data, {} only in reference",
            self.left_statements,
            self.right_statements,
            self.only_left.len(),
            self.only_right.len()
        );
        if self.only_left.is_empty() && self.only_right.is_empty() {
            s.push_str("\nno blank node mapping exists");
        }
        for (sign, lines) in [('-', &self.only_right), ('+', &self.only_left)] {
            for l in lines.iter().take(max_lines) {
                s.push('\n');
                s.push(sign);
                s.push(' ');
                s.push_str(l.trim_end());
            }
            if lines.len() > max_lines {
                s.push_str(&format!("\n{sign} ... {} more", lines.len() - max_lines));
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    NoGraph,
    Ground(u32),
    Blank(u32),
}

type Quad = [Node; 4];

#[derive(Default)]
struct Interner {
    ids: HashMap<String, u32>,
}

impl Interner {
    fn id(&mut self, key: String) -> u32 {
        let n = self.ids.len() as u32;
        *self.ids.entry(key).or_insert(n)
    }
}

#[derive(Default)]
struct Side {
    ground: HashSet<Quad>,
    blank: Vec<Quad>,
    blank_set: HashSet<Quad>,
    text: HashMap<Quad, String>,
    labels: HashMap<String, u32>,
}

impl Side {
    fn build(statements: &[Statement], interner: &mut Interner) -> Result<Self, CompareError> {
        let mut side = Side::default();
        for st in statements {
            let mut q = [Node::NoGraph; 4];
            for (i, t) in [st.subject(), st.predicate(), st.object()].into_iter().enumerate() {
                q[i] = match t {
                    Term::BlankNode(b) => side.blank_node(b.label()),
                    t => Node::Ground(interner.id(render_term_nt(t))),
                };
            }
            q[3] = match st.graph() {
                None | Some(GraphName::DefaultGraph) => Node::NoGraph,
                Some(GraphName::NamedBlank(b)) => side.blank_node(b.label()),
                Some(g) => {
                    let mut s = String::new();
                    write_graph_nt(&mut s, g);
                    Node::Ground(interner.id(s))
                }
            };
            if side.labels.len() > MAX_BLANK_NODES {
                return Err(CompareError::TooManyBlankNodes { count: side.labels.len(), limit: MAX_BLANK_NODES });
            }
            let is_blank = q.iter().any(|n| matches!(n, Node::Blank(_)));
            let fresh = if is_blank { side.blank_set.insert(q) } else { side.ground.insert(q) };
            if fresh {
                if is_blank {
                    side.blank.push(q);
                }
                let mut line = String::new();
                write_statement_nq(&mut line, st);
                side.text.insert(q, line);
            }
        }
        Ok(side)
    }

    fn blank_node(&mut self, label: &str) -> Node {
        let n = self.labels.len() as u32;
        Node::Blank(*self.labels.entry(label.to_owned()).or_insert(n))
    }

    fn len(&self) -> usize {
        self.ground.len() + self.blank.len()
    }

    fn node_count(&self) -> usize {
        self.labels.len()
    }
}

fn hash_of(v: impl Hash) -> u64 {
    let mut h = DefaultHasher::new();
    v.hash(&mut h);
    h.finish()
}

/// One round of colour refinement.
fn refine(side: &Side, colors: &[u64]) -> Vec<u64> {
    let mut signatures: Vec<Vec<u64>> = vec![Vec::new(); colors.len()];
    for q in &side.blank {
        let view: [(u8, u64); 4] = q.map(|n| match n {
            Node::NoGraph => (0, 0),
            Node::Ground(g) => (1, g as u64),
            Node::Blank(b) => (2, colors[b as usize]),
        });
        for (pos, n) in q.iter().enumerate() {
            if let Node::Blank(b) = n {
                signatures[*b as usize].push(hash_of((pos, view)));
            }
        }
    }
    signatures
        .into_iter()
        .enumerate()
        .map(|(i, mut sig)| {
            sig.sort_unstable();
            hash_of((colors[i], sig))
        })
        .collect()
}

fn distinct(colors: &[u64]) -> usize {
    colors.iter().collect::<HashSet<_>>().len()
}

fn sorted(colors: &[u64]) -> Vec<u64> {
    let mut v = colors.to_vec();
    v.sort_unstable();
    v
}

/// Colours both sides in lockstep until neither partition gets finer.
/// Returns `None` as soon as the colour histograms differ.
fn stable_colors(left: &Side, right: &Side) -> Option<(Vec<u64>, Vec<u64>)> {
    let mut lc = vec![0u64; left.node_count()];
    let mut rc = vec![0u64; right.node_count()];
    let mut classes = 1;
    loop {
        let (nl, nr) = (refine(left, &lc), refine(right, &rc));
        if sorted(&nl) != sorted(&nr) {
            return None;
        }
        let n = distinct(&nl);
        lc = nl;
        rc = nr;
        if n <= classes {
            return Some((lc, rc));
        }
        classes = n;
    }
}

/// Searches for a blank node bijection mapping every left statement onto a
/// right statement. Both sides have equally many nodes and statements.
fn find_bijection(left: &Side, right: &Side, lc: &[u64], rc: &[u64]) -> Result<bool, CompareError> {
    let n = left.node_count();
    let mut by_color: HashMap<u64, Vec<u32>> = HashMap::new();
    for (i, c) in rc.iter().enumerate() {
        by_color.entry(*c).or_default().push(i as u32);
    }
    let mut stmts_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (qi, q) in left.blank.iter().enumerate() {
        for node in q {
            if let Node::Blank(b) = node {
                let v = &mut stmts_of[*b as usize];
                if v.last() != Some(&qi) {
                    v.push(qi);
                }
            }
        }
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by_key(|&b| (by_color[&lc[b as usize]].len(), lc[b as usize], b));

    let mut map: Vec<Option<u32>> = vec![None; n];
    let mut used = vec![false; right.node_count()];
    let mut cursor = vec![0usize; n];
    let mut depth = 0usize;
    let mut steps = 0u64;

    let consistent = |map: &[Option<u32>], b: u32| {
        stmts_of[b as usize].iter().all(|&qi| {
            let mut mapped = left.blank[qi];
            for node in mapped.iter_mut() {
                if let Node::Blank(x) = node {
                    match map[*x as usize] {
                        Some(y) => *x = y,
                        None => return true,
                    }
                }
            }
            right.blank_set.contains(&mapped)
        })
    };

    while depth < n {
        let b = order[depth];
        let candidates = &by_color[&lc[b as usize]];
        if let Some(prev) = map[b as usize].take() {
            used[prev as usize] = false;
        }
        let mut placed = false;
        while cursor[depth] < candidates.len() {
            let c = candidates[cursor[depth]];
            cursor[depth] += 1;
            if used[c as usize] {
                continue;
            }
            steps += 1;
            if steps > MAX_SEARCH_STEPS {
                return Err(CompareError::SearchLimit(MAX_SEARCH_STEPS));
            }
            map[b as usize] = Some(c);
            if consistent(&map, b) {
                used[c as usize] = true;
                placed = true;
                break;
            }
            map[b as usize] = None;
        }
        if placed {
            depth += 1;
        } else {
            cursor[depth] = 0;
            if depth == 0 {
                return Ok(false);
            }
            depth -= 1;
        }
    }
    Ok(true)
}

/// Statements whose blank-node-free shape occurs more often on `a` than on `b`.
fn shape_difference(a: &Side, b: &Side) -> Vec<String> {
    let blind = |q: &Quad| q.map(|n| if let Node::Blank(_) = n { Node::Blank(0) } else { n });
    let mut counts: HashMap<Quad, isize> = HashMap::new();
    for q in &b.blank {
        *counts.entry(blind(q)).or_default() += 1;
    }
    let mut out = Vec::new();
    for q in &a.blank {
        let c = counts.entry(blind(q)).or_default();
        if *c > 0 {
            *c -= 1;
        } else {
            out.push(a.text[q].clone());
        }
    }
    out
}

/// Compares two datasets as sets of statements up to blank node renaming.
/// Triples and default-graph quads are treated alike.
pub fn compare_datasets(left: &[Statement], right: &[Statement]) -> Result<CompareReport, CompareError> {
    let mut interner = Interner::default();
    let l = Side::build(left, &mut interner)?;
    let r = Side::build(right, &mut interner)?;

    let mut only_left: Vec<String> = l.ground.difference(&r.ground).map(|q| l.text[q].clone()).collect();
    let mut only_right: Vec<String> = r.ground.difference(&l.ground).map(|q| r.text[q].clone()).collect();
    only_left.extend(shape_difference(&l, &r));
    only_right.extend(shape_difference(&r, &l));
    only_left.sort();
    only_right.sort();

    let isomorphic = only_left.is_empty()
        && only_right.is_empty()
        && l.blank.len() == r.blank.len()
        && l.node_count() == r.node_count()
        && match stable_colors(&l, &r) {
            Some((lc, rc)) => find_bijection(&l, &r, &lc, &rc)?,
            None => false,
        };
    Ok(CompareReport {
        isomorphic,
        left_statements: l.len(),
        right_statements: r.len(),
        only_left,
        only_right,
    })
}
