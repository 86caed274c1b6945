//! Versioned JSON persistence for instances, graphs, and ratio reports, and
//! a small self-contained SVG renderer.
//!
//! All writers emit byte-identical output for equal inputs, so files can be
//! diffed and checked into fixtures.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geom::{Point, Segment};
use crate::theta::{ThetaEdge, ThetaGraph};
use crate::verify::RatioReport;
use crate::visibility::Instance;
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub version: u32,
    pub points: Vec<Point>,
    pub constraints: Vec<Segment>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance, metadata: BTreeMap<String, String>) -> Self {
        InstanceFile {
            version: FORMAT_VERSION,
            points: inst.points().to_vec(),
            constraints: inst.constraints().to_vec(),
            metadata,
        }
    }

    /// Validate and convert; rejects unknown format versions and everything
    /// [`Instance::new`] rejects.
    pub fn into_instance(self) -> Result<Instance> {
        if self.version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                self.version
            )));
        }
        Instance::new(self.points, self.constraints)
    }
}

pub fn instance_to_string(inst: &Instance, metadata: &BTreeMap<String, String>) -> String {
    let file = InstanceFile::from_instance(inst, metadata.clone());
    let mut s = serde_json::to_string_pretty(&file).expect("instance serializes");
    s.push('\n');
    s
}

pub fn instance_from_str(s: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_instance()
}

pub fn save_instance(
    path: impl AsRef<Path>,
    inst: &Instance,
    metadata: &BTreeMap<String, String>,
) -> Result<()> {
    std::fs::write(path, instance_to_string(inst, metadata))?;
    Ok(())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    instance_from_str(&std::fs::read_to_string(path)?)
}

/// Serialized form of a built graph. Write-only: graphs are cheap to rebuild
/// from their instance, so there is no loader.
#[derive(Clone, Debug, Serialize)]
pub struct GraphFile<'a> {
    pub version: u32,
    pub m: usize,
    pub n: usize,
    pub edges: &'a [ThetaEdge],
    pub near_ray: &'a [(usize, usize)],
}

pub fn graph_to_string(graph: &ThetaGraph) -> String {
    let file = GraphFile {
        version: FORMAT_VERSION,
        m: graph.cones.m,
        n: graph.n,
        edges: &graph.edges,
        near_ray: &graph.near_ray,
    };
    let mut s = serde_json::to_string_pretty(&file).expect("graph serializes");
    s.push('\n');
    s
}

pub fn save_graph(path: impl AsRef<Path>, graph: &ThetaGraph) -> Result<()> {
    std::fs::write(path, graph_to_string(graph))?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportFile<'a> {
    pub version: u32,
    /// Wall-clock build-and-measure time. `None` by default so that report
    /// files are deterministic; populated only on request.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
    pub report: &'a RatioReport,
}

pub fn report_to_string(report: &RatioReport, timing_ms: Option<u128>) -> String {
    let file = ReportFile {
        version: FORMAT_VERSION,
        timing_ms,
        report,
    };
    let mut s = serde_json::to_string_pretty(&file).expect("report serializes");
    s.push('\n');
    s
}

pub fn save_report(
    path: impl AsRef<Path>,
    report: &RatioReport,
    timing_ms: Option<u128>,
) -> Result<()> {
    std::fs::write(path, report_to_string(report, timing_ms))?;
    Ok(())
}

/// Render an instance (and optionally its graph and a highlighted pair) as a
/// standalone SVG. Constraints are dashed, graph edges solid, the highlight
/// drawn on top.
pub fn svg_string(
    inst: &Instance,
    graph: Option<&ThetaGraph>,
    highlight: Option<(usize, usize)>,
) -> String {
    const SIZE: f64 = 640.0;
    let pts = inst.points();
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    if pts.is_empty() {
        (min_x, min_y, max_x, max_y) = (0.0, 0.0, 1.0, 1.0);
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let pad = span * 0.05;
    let (min_x, min_y) = (min_x - pad, min_y - pad);
    let scale = SIZE / (span + 2.0 * pad);
    let width = ((max_x - min_x) + pad) * scale;
    let height = ((max_y - min_y) + pad) * scale;
    let tx = |p: Point| (p.x - min_x) * scale;
    let ty = |p: Point| height - (p.y - min_y) * scale;

    let mut out = String::new();
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    let _ = write!(
        out,
        r#"<rect width="{width:.2}" height="{height:.2}" fill="white"/>"#
    );
    out.push('\n');
    if let Some(g) = graph {
        for e in &g.edges {
            let (a, b) = (inst.point(e.u), inst.point(e.v));
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#3366cc" stroke-width="1" opacity="0.8"/>"##,
                tx(a),
                ty(a),
                tx(b),
                ty(b)
            );
        }
    }
    for seg in inst.constraints() {
        let (a, b) = (inst.point(seg.a), inst.point(seg.b));
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#555555" stroke-width="2.5" stroke-dasharray="6 3"/>"##,
            tx(a),
            ty(a),
            tx(b),
            ty(b)
        );
    }
    if let Some((u, w)) = highlight {
        if u < pts.len() && w < pts.len() {
            let (a, b) = (inst.point(u), inst.point(w));
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#cc2222" stroke-width="2"/>"##,
                tx(a),
                ty(a),
                tx(b),
                ty(b)
            );
        }
    }
    for (i, &p) in pts.iter().enumerate() {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#111111"/><text x="{:.2}" y="{:.2}" font-size="10" font-family="sans-serif">{i}</text>"##,
            tx(p),
            ty(p),
            tx(p) + 4.0,
            ty(p) - 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_svg(
    path: impl AsRef<Path>,
    inst: &Instance,
    graph: Option<&ThetaGraph>,
    highlight: Option<(usize, usize)>,
) -> Result<()> {
    std::fs::write(path, svg_string(inst, graph, highlight))?;
    Ok(())
}
