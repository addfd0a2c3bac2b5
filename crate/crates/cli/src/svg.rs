//! Plane drawings of witness sets.

use std::collections::VecDeque;
use std::fmt::Write;

use bq_witness::geom::Point;
use bq_witness::witness::WitnessSet;

const SIZE: f64 = 800.0;
const PALETTE: [&str; 8] = ["#1b1b1b", "#c0392b", "#d35400", "#b7950b", "#27ae60", "#2980b9", "#8e44ad", "#7f8c8d"];

/// Hop distance in the unit graph from the first claimed point.
fn hops(w: &WitnessSet) -> Vec<usize> {
    let n = w.points.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &w.unit_edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![usize::MAX; n];
    let root = w.claims.iter().flat_map(|c| c.indices()).next().unwrap_or(0);
    let mut queue = VecDeque::new();
    if n > 0 {
        dist[root] = 0;
        queue.push_back(root);
    }
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

pub fn render(w: &WitnessSet) -> String {
    let pts: Vec<Vec<f64>> = w.points.iter().map(Point::to_f64).collect();
    let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
    for p in &pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    if pts.is_empty() {
        (lo, hi) = ([0.0; 2], [1.0; 2]);
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let margin = 0.05 * span;
    let scale = SIZE / (span + 2.0 * margin);
    let at = |p: &[f64]| ((p[0] - lo[0] + margin) * scale, (hi[1] - p[1] + margin) * scale);
    let radius = (SIZE / 160.0).min(0.1 * scale).max(0.5);

    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE:.0}" height="{SIZE:.0}" viewBox="0 0 {SIZE:.0} {SIZE:.0}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r##"<g stroke="#555" stroke-width="1">"##).unwrap();
    for &(a, b) in &w.unit_edges {
        let ((x1, y1), (x2, y2)) = (at(&pts[a]), at(&pts[b]));
        writeln!(s, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, r##"<g stroke="#c0392b" stroke-width="1.5" stroke-dasharray="6 4">"##).unwrap();
    for (a, b) in w.claims.iter().flat_map(|c| c.pairs()) {
        let ((x1, y1), (x2, y2)) = (at(&pts[a]), at(&pts[b]));
        writeln!(s, r#"<line class="claim" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, "<g>").unwrap();
    for (p, h) in pts.iter().zip(hops(w)) {
        let (x, y) = at(p);
        let color = PALETTE.get(h).copied().unwrap_or(PALETTE[PALETTE.len() - 1]);
        writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{radius:.3}" fill="{color}"/>"#).unwrap();
    }
    writeln!(s, "</g>").unwrap();
    writeln!(s, "</svg>").unwrap();
    s
}
