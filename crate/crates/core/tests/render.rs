use std::path::PathBuf;

use atf_core::atf::{rational_blowdown_diagram, replay_chain};
use atf_core::hull::boundary_hull;
use atf_core::render::{render_chain, render_diagram, render_hull, RenderSpec};
use atf_core::MarkovTriple;

fn golden(name: &str, bytes: &[u8]) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, bytes).unwrap();
    }
    let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(expected == bytes, "{name} differs from its golden file");
}

fn parse(bytes: &[u8]) -> roxmltree::Document<'_> {
    let doc = roxmltree::Document::parse(std::str::from_utf8(bytes).unwrap()).unwrap();
    assert!(doc.root_element().has_tag_name("svg"));
    assert_eq!(doc.root_element().attribute("version"), Some("1.1"));
    doc
}

fn t(a: i64, b: i64, c: i64) -> MarkovTriple {
    MarkovTriple::new(a, b, c).unwrap()
}

#[test]
fn blowdown_diagram_svg() {
    let d = rational_blowdown_diagram(&t(1, 2, 5)).unwrap();
    let svg = render_diagram(&d, &RenderSpec::default()).unwrap();
    let doc = parse(&svg);
    let dashed = doc.descendants().filter(|n| n.attribute("stroke-dasharray").is_some()).count();
    let dots = doc.descendants().filter(|n| n.has_tag_name("circle")).count();
    assert_eq!((dashed, dots), (3, 1));
    golden("blowdown_1_2_5.svg", &svg);
}

#[test]
fn hull_svg() {
    let h = boundary_hull(&t(1, 2, 5)).unwrap();
    let svg = render_hull(&h, &RenderSpec::default()).unwrap();
    let doc = parse(&svg);
    let labels: Vec<&str> = doc.descendants().filter(|n| n.has_tag_name("text")).filter_map(|n| n.text()).collect();
    assert!(labels.contains(&"(-6,1)"));
    assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("vertex")).count(), 3);
    golden("hull_1_2_5.svg", &svg);
}

#[test]
fn chain_svg_panels() {
    let chain = replay_chain(&t(1, 2, 5)).unwrap();
    let ds: Vec<_> = chain.into_iter().map(|s| s.diagram).collect();
    let svg = render_chain(&ds, &RenderSpec::default()).unwrap();
    let doc = parse(&svg);
    assert_eq!(doc.root_element().attribute("width"), Some("1200"));
    let labels: Vec<&str> = doc.descendants().filter(|n| n.has_tag_name("text")).filter_map(|n| n.text()).collect();
    assert_eq!(labels, ["(1,1,1)", "(1,1,2)", "(1,2,5)"]);
    golden("chain_1_2_5.svg", &svg);
}

#[test]
fn labels_off() {
    let d = rational_blowdown_diagram(&t(1, 1, 2)).unwrap();
    let spec = RenderSpec { labels: false, ..RenderSpec::default() };
    let svg = render_diagram(&d, &spec).unwrap();
    assert!(!String::from_utf8(svg).unwrap().contains("<text"));
}
