//! A PNML subset: one net, one page, places, transitions and unit-weight
//! arcs.
//!
//! Border sets travel in a `<toolspecific tool="wfsub">` block. Without it,
//! a net with exactly one source place and one sink place is read as a
//! classic one-input one-output pWF net. Initial markings are ignored, since
//! nets carry no marking here; graphics and names are ignored as well.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::net::{NodeId, PetriNet};
use crate::workflow::{Border, WorkflowError, WorkflowNet};

pub const TOOL: &str = "wfsub";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PnmlError {
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("unsupported PNML feature: {0}")]
    Unsupported(String),
    #[error("expected a <pnml> document with a <net> element")]
    MissingNet,
    #[error("invalid PNML: {0}")]
    Invalid(String),
    #[error("no border annotation and no unique source and sink place to infer I/O from")]
    CannotInferBorder,
    #[error(transparent)]
    Workflow(#[from] WorkflowError),
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub fn write_pnml(wf: &WorkflowNet) -> String {
    let net = wf.net();
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<pnml xmlns=\"http://www.pnml.org/version-2009/grammar/pnml\">\n");
    writeln!(out, "  <net id=\"{}\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">", escape(wf.name()))
        .unwrap();
    writeln!(out, "    <name><text>{}</text></name>", escape(wf.name())).unwrap();
    out.push_str("    <page id=\"page0\">\n");
    for p in net.places() {
        let p = escape(p.as_str());
        writeln!(out, "      <place id=\"{p}\"><name><text>{p}</text></name></place>").unwrap();
    }
    for t in net.transitions() {
        let t = escape(t.as_str());
        writeln!(out, "      <transition id=\"{t}\"><name><text>{t}</text></name></transition>").unwrap();
    }
    for (i, (a, b)) in net.arcs().iter().enumerate() {
        writeln!(out, "      <arc id=\"arc{i}\" source=\"{}\" target=\"{}\"/>", escape(a.as_str()), escape(b.as_str()))
            .unwrap();
    }
    out.push_str("    </page>\n");
    writeln!(out, "    <toolspecific tool=\"{TOOL}\" version=\"1\">").unwrap();
    writeln!(out, "      <border kind=\"{}\"/>", wf.border().keyword()).unwrap();
    for i in wf.inputs() {
        writeln!(out, "      <input ref=\"{}\"/>", escape(i.as_str())).unwrap();
    }
    for o in wf.outputs() {
        writeln!(out, "      <output ref=\"{}\"/>", escape(o.as_str())).unwrap();
    }
    out.push_str("    </toolspecific>\n");
    out.push_str("  </net>\n</pnml>\n");
    out
}

fn attr<'a>(node: roxmltree::Node<'a, '_>, name: &str) -> Result<&'a str, PnmlError> {
    node.attribute(name)
        .ok_or_else(|| PnmlError::Invalid(format!("<{}> without {name} attribute", node.tag_name().name())))
}

fn node_id(s: &str) -> Result<NodeId, PnmlError> {
    NodeId::new(s).map_err(|e| PnmlError::Invalid(e.to_string()))
}

fn elements<'a, 'i>(node: roxmltree::Node<'a, 'i>) -> impl Iterator<Item = roxmltree::Node<'a, 'i>> {
    node.children().filter(|c| c.is_element())
}

/// The arc weight from an `<inscription><text>n</text></inscription>` child,
/// if present.
fn inscription(arc: roxmltree::Node) -> Result<Option<String>, PnmlError> {
    for c in elements(arc) {
        if c.tag_name().name() == "inscription" {
            let text = elements(c)
                .find(|t| t.tag_name().name() == "text")
                .and_then(|t| t.text())
                .unwrap_or("")
                .trim()
                .to_string();
            return Ok(Some(text));
        }
    }
    Ok(None)
}

pub fn parse_pnml(text: &str) -> Result<WorkflowNet, PnmlError> {
    let doc = roxmltree::Document::parse(text).map_err(|e| PnmlError::Xml(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "pnml" {
        return Err(PnmlError::MissingNet);
    }
    let nets: Vec<_> = elements(root).filter(|n| n.tag_name().name() == "net").collect();
    let net_el = match nets.as_slice() {
        [] => return Err(PnmlError::MissingNet),
        [one] => *one,
        _ => return Err(PnmlError::Unsupported(format!("{} nets in one document", nets.len()))),
    };
    if let Some(ty) = net_el.attribute("type") {
        if !ty.ends_with("ptnet") {
            return Err(PnmlError::Unsupported(format!("net type {ty}")));
        }
    }
    let name = elements(net_el)
        .find(|c| c.tag_name().name() == "name")
        .and_then(|n| elements(n).find(|t| t.tag_name().name() == "text"))
        .and_then(|t| t.text())
        .map(|s| s.trim().to_string())
        .or_else(|| net_el.attribute("id").map(str::to_string));

    let pages: Vec<_> = elements(net_el).filter(|c| c.tag_name().name() == "page").collect();
    let page = match pages.as_slice() {
        [] => return Err(PnmlError::Invalid("net without a <page>".into())),
        [one] => *one,
        _ => return Err(PnmlError::Unsupported(format!("{} pages", pages.len()))),
    };

    let mut places = BTreeSet::new();
    let mut transitions = BTreeSet::new();
    let mut arcs = BTreeSet::new();
    for el in elements(page) {
        match el.tag_name().name() {
            "place" => {
                places.insert(node_id(attr(el, "id")?)?);
            }
            "transition" => {
                transitions.insert(node_id(attr(el, "id")?)?);
            }
            "arc" => {
                if let Some(w) = inscription(el)? {
                    if w != "1" {
                        return Err(PnmlError::Unsupported(format!(
                            "arc weight {w} on arc {}",
                            el.attribute("id").unwrap_or("?")
                        )));
                    }
                }
                let a = node_id(attr(el, "source")?)?;
                let b = node_id(attr(el, "target")?)?;
                if !arcs.insert((a.clone(), b.clone())) {
                    return Err(PnmlError::Unsupported(format!("parallel arcs {a} -> {b}")));
                }
            }
            "page" => return Err(PnmlError::Unsupported("nested pages".into())),
            other @ ("referencePlace" | "referenceTransition") => {
                return Err(PnmlError::Unsupported(format!("<{other}>")))
            }
            _ => {}
        }
    }
    let net = PetriNet::new(places, transitions, arcs).map_err(|e| PnmlError::Invalid(e.to_string()))?;

    let annotation =
        elements(net_el).find(|c| c.tag_name().name() == "toolspecific" && c.attribute("tool") == Some(TOOL));
    let (inputs, outputs, border) = match annotation {
        Some(block) => border_from_annotation(block)?,
        None => infer_border(&net)?,
    };
    let wf = WorkflowNet::new(net, inputs, outputs, border)?;
    Ok(match name {
        Some(n) if !n.is_empty() => wf.with_name(n),
        _ => wf,
    })
}

type BorderSets = (BTreeSet<NodeId>, BTreeSet<NodeId>, Border);

fn border_from_annotation(block: roxmltree::Node) -> Result<BorderSets, PnmlError> {
    let mut border = None;
    let (mut inputs, mut outputs) = (BTreeSet::new(), BTreeSet::new());
    for el in elements(block) {
        match el.tag_name().name() {
            "border" => {
                border = Some(match attr(el, "kind")? {
                    "place" => Border::Place,
                    "transition" => Border::Transition,
                    k => return Err(PnmlError::Invalid(format!("border kind {k}"))),
                });
            }
            "input" => {
                inputs.insert(node_id(attr(el, "ref")?)?);
            }
            "output" => {
                outputs.insert(node_id(attr(el, "ref")?)?);
            }
            _ => {}
        }
    }
    let border = border.ok_or_else(|| PnmlError::Invalid("annotation without <border>".into()))?;
    Ok((inputs, outputs, border))
}

fn infer_border(net: &PetriNet) -> Result<BorderSets, PnmlError> {
    let sources: Vec<&NodeId> = net.places().iter().filter(|p| net.preset(p).expect("place").is_empty()).collect();
    let sinks: Vec<&NodeId> = net.places().iter().filter(|p| net.postset(p).expect("place").is_empty()).collect();
    match (sources.as_slice(), sinks.as_slice()) {
        ([i], [o]) => Ok((BTreeSet::from([(*i).clone()]), BTreeSet::from([(*o).clone()]), Border::Place)),
        _ => Err(PnmlError::CannotInferBorder),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixtures_round_trip() {
        for wf in [
            fixtures::single_place(),
            fixtures::single_transition(),
            fixtures::reentrant_output(),
            fixtures::m_k(2),
            fixtures::doubled_segment(),
            fixtures::tand_target(),
        ] {
            assert_eq!(parse_pnml(&write_pnml(&wf)).unwrap(), wf);
        }
    }

    #[test]
    fn weight_two_is_unsupported() {
        let doc = r#"<pnml><net id="n" type="http://www.pnml.org/version-2009/grammar/ptnet"><page id="g">
            <place id="i"/><place id="o"/><transition id="t"/>
            <arc id="a1" source="i" target="t"><inscription><text>2</text></inscription></arc>
            <arc id="a2" source="t" target="o"/>
            </page></net></pnml>"#;
        let err = parse_pnml(doc).unwrap_err();
        assert_eq!(err, PnmlError::Unsupported("arc weight 2 on arc a1".into()));
    }

    #[test]
    fn classic_net_infers_border() {
        let doc = r#"<?xml version="1.0"?>
            <pnml xmlns="http://www.pnml.org/version-2009/grammar/pnml">
            <net id="classic" type="http://www.pnml.org/version-2009/grammar/ptnet"><page id="g">
            <place id="start"><initialMarking><text>1</text></initialMarking></place>
            <place id="mid"/><place id="end"/>
            <transition id="t1"/><transition id="t2"/>
            <arc id="a1" source="start" target="t1"/><arc id="a2" source="t1" target="mid"/>
            <arc id="a3" source="mid" target="t2"/>
            <arc id="a4" source="t2" target="end"><inscription><text>1</text></inscription></arc>
            </page></net></pnml>"#;
        let wf = parse_pnml(doc).unwrap();
        assert_eq!(wf.inputs(), &BTreeSet::from([crate::net::id("start")]));
        assert_eq!(wf.outputs(), &BTreeSet::from([crate::net::id("end")]));
        assert_eq!(wf.name(), "classic");
    }

    #[test]
    fn unsupported_structures() {
        let two_pages = r#"<pnml><net id="n"><page id="a"/><page id="b"/></net></pnml>"#;
        assert!(matches!(parse_pnml(two_pages), Err(PnmlError::Unsupported(_))));
        let reference = r#"<pnml><net id="n"><page id="a"><referencePlace id="r" ref="x"/></page></net></pnml>"#;
        assert_eq!(parse_pnml(reference).unwrap_err(), PnmlError::Unsupported("<referencePlace>".into()));
        let no_border = r#"<pnml><net id="n"><page id="a"><place id="x"/><place id="y"/></page></net></pnml>"#;
        assert_eq!(parse_pnml(no_border).unwrap_err(), PnmlError::CannotInferBorder);
        assert!(matches!(parse_pnml("<pnml"), Err(PnmlError::Xml(_))));
    }

    #[test]
    fn special_characters_are_escaped() {
        let net = crate::net::NetBuilder::new().place("a<&>\"b").build().unwrap();
        let ids: BTreeSet<NodeId> = net.places().clone();
        let wf = WorkflowNet::new(net, ids.clone(), ids, Border::Place).unwrap().with_name("x&y");
        assert_eq!(parse_pnml(&write_pnml(&wf)).unwrap(), wf);
    }
}
