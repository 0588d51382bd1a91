//! Adapters between statement streams and the event shapes each physical
//! stream type expects.

use jelly_core::rdf::{GraphName, Statement, StreamEvent};
use jelly_core::PhysicalType;

/// Shapes parsed statements into events for an encoder of `physical` type.
///
/// For GRAPHS streams, consecutive statements sharing a graph name are
/// wrapped in one graph start/end pair.
pub struct EventShaper {
    physical: PhysicalType,
    open: Option<GraphName>,
}

impl EventShaper {
    pub fn new(physical: PhysicalType) -> Self {
        EventShaper { physical, open: None }
    }

    pub fn push(&mut self, st: Statement, out: &mut Vec<StreamEvent>) -> Result<(), String> {
        match self.physical {
            PhysicalType::Quads => {
                let st = if st.is_quad() { st } else { st.with_graph(GraphName::DefaultGraph) };
                out.push(StreamEvent::Statement(st));
            }
            PhysicalType::Graphs => {
                let g = st.graph().cloned().unwrap_or(GraphName::DefaultGraph);
                if self.open.as_ref() != Some(&g) {
                    if self.open.take().is_some() {
                        out.push(StreamEvent::GraphEnd);
                    }
                    out.push(StreamEvent::GraphStart(g.clone()));
                    self.open = Some(g);
                }
                out.push(StreamEvent::Statement(st.into_triple()));
            }
            _ => {
                if st.graph().is_some_and(|g| !g.is_default()) {
                    return Err(format!("statement in a named graph cannot be stored in a {} stream", self.physical));
                }
                out.push(StreamEvent::Statement(st.into_triple()));
            }
        }
        Ok(())
    }

    pub fn finish(&mut self, out: &mut Vec<StreamEvent>) {
        if self.open.take().is_some() {
            out.push(StreamEvent::GraphEnd);
        }
    }
}

/// Flattens decoded events back into statements, attaching the enclosing
/// graph name to triples that appear inside a graph block.
#[derive(Default)]
pub struct StatementFlattener {
    open: Option<GraphName>,
}

impl StatementFlattener {
    pub fn push(&mut self, ev: StreamEvent) -> Option<Statement> {
        match ev {
            StreamEvent::Statement(st) => Some(match &self.open {
                Some(g) if !st.is_quad() => st.with_graph(g.clone()),
                _ => st,
            }),
            StreamEvent::GraphStart(g) => {
                self.open = Some(g);
                None
            }
            StreamEvent::GraphEnd => {
                self.open = None;
                None
            }
            StreamEvent::EndOfGroup => None,
        }
    }
}
