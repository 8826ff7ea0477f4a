//! Graphviz rendering of a stage's information flow network.

use std::fmt::Write as _;

use dwindle_core::flowgraph::{Capacity, FlowNetwork, Vertex};

use crate::format::format_rational;

pub fn render(net: &FlowNetwork) -> String {
    let mut out = String::from("digraph flow {\n  rankdir=LR;\n");
    for (idx, vertex) in net.vertices().iter().enumerate() {
        let shape = match vertex {
            Vertex::Source | Vertex::Collector => "doublecircle",
            Vertex::DoomedHub { .. } => "box",
            _ => "ellipse",
        };
        let _ = writeln!(out, "  v{idx} [label=\"{vertex}\", shape={shape}];");
    }
    for arc in net.arcs() {
        let label = match &arc.capacity {
            Capacity::Finite(c) => format_rational(c),
            Capacity::Infinite => "inf".to_string(),
        };
        let _ = writeln!(out, "  v{} -> v{} [label=\"{label}\"];", arc.from, arc.to);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use dwindle_core::flowgraph::build_flow_network;
    use dwindle_core::model::{ProblemSpec, ProtectionPlan, StrategyTag};
    use dwindle_core::rat;

    #[test]
    fn renders_source_sink_and_all_arcs() {
        let spec = ProblemSpec::unit(3, 2).unwrap();
        let plan = ProtectionPlan::new(
            spec,
            [(3, rat(1, 3)), (2, rat(1, 2))].into_iter().collect(),
            [(3, rat(1, 6))].into_iter().collect(),
            StrategyTag::Custom,
        )
        .unwrap();
        let net = build_flow_network(&plan, 2).unwrap();
        let text = render(&net);
        assert!(text.contains("label=\"S\""));
        assert!(text.contains("label=\"DC\""));
        assert!(text.contains("label=\"1/6\""));
        assert_eq!(text.matches("->").count(), net.arcs().len());
    }
}
