//! SVG output for two-dimensional figures.
//!
//! Every cycle is traced as the zero set of its defining quadratic with
//! marching squares, so circles, lines, hyperbolas and parabolas all go
//! through the same code path. Zero-radius cycles are drawn as dots.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::algebra::{is_less_than_epsilon, Metric};
use crate::cycle::Cycle;
use crate::error::{Error, Result};
use crate::figure::{Figure, GHOST_GEN, REAL_LINE};

/// Rounds to `digits` significant digits; `-0` becomes `0`.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Drawing window and sampling density.
#[derive(Clone, Debug, PartialEq)]
pub struct Viewport {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    /// Width of the picture in pixels.
    pub size: u32,
    /// Marching-squares cells per axis.
    pub grid: usize,
}

pub const MIN_GRID: usize = 32;
pub const DEFAULT_GRID: usize = 256;

impl Viewport {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, size: u32) -> Result<Self> {
        Viewport {
            xmin,
            xmax,
            ymin,
            ymax,
            size,
            grid: DEFAULT_GRID,
        }
        .validated()
    }

    pub fn with_grid(mut self, grid: usize) -> Result<Self> {
        self.grid = grid;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if !(self.xmin < self.xmax && self.ymin < self.ymax) {
            return Err(Error::Render("empty viewport".into()));
        }
        if self.size == 0 {
            return Err(Error::Render("picture size must be positive".into()));
        }
        if self.grid < MIN_GRID {
            return Err(Error::Render(format!("grid must have at least {MIN_GRID} cells")));
        }
        Ok(self)
    }

    pub fn width(&self) -> f64 {
        self.size as f64
    }

    pub fn height(&self) -> f64 {
        (self.size as f64 * (self.ymax - self.ymin) / (self.xmax - self.xmin)).round().max(1.0)
    }

    /// Width and height of one grid cell in world units.
    pub fn cell(&self) -> (f64, f64) {
        (
            (self.xmax - self.xmin) / self.grid as f64,
            (self.ymax - self.ymin) / self.grid as f64,
        )
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        (self.xmin..=self.xmax).contains(&p[0]) && (self.ymin..=self.ymax).contains(&p[1])
    }

    fn to_pixels(&self, p: [f64; 2]) -> (f64, f64) {
        (
            (p[0] - self.xmin) / (self.xmax - self.xmin) * self.width(),
            (self.ymax - p[1]) / (self.ymax - self.ymin) * self.height(),
        )
    }
}

/// Polyline of a traced zero set; `closed` chains return to their start.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

/// Edge of the sampling grid: horizontal edges start at vertex `(i, j)` and
/// go right, vertical ones go up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

/// Traces `value_at = 0` of a real cycle over the viewport.
pub fn contour(cycle: &Cycle, metric: &Metric, v: &Viewport) -> Result<Vec<Polyline>> {
    if metric.dim() != 2 || cycle.dim() != 2 {
        return Err(Error::Render("drawing needs a two-dimensional figure".into()));
    }
    let c = cycle.unit_scaled();
    let n = v.grid;
    let (hx, hy) = v.cell();
    let at = |i: usize, j: usize| [v.xmin + i as f64 * hx, v.ymin + j as f64 * hy];
    let q = |p: [f64; 2]| c.value_at(&p, metric).map(|z| z.re).unwrap_or(0.0);
    let values: Vec<Vec<f64>> = (0..=n).map(|j| (0..=n).map(|i| q(at(i, j))).collect()).collect();
    let inside = |i: usize, j: usize| values[j][i] > 0.0;

    let crossing = |e: Edge| -> [f64; 2] {
        let (a, b) = match e {
            Edge::H(i, j) => ((i, j), (i + 1, j)),
            Edge::V(i, j) => ((i, j), (i, j + 1)),
        };
        let (va, vb) = (values[a.1][a.0], values[b.1][b.0]);
        let t = if va == vb { 0.5 } else { va / (va - vb) };
        let (pa, pb) = (at(a.0, a.1), at(b.0, b.1));
        [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
    };

    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let case = (inside(i, j) as u8)
                | (inside(i + 1, j) as u8) << 1
                | (inside(i + 1, j + 1) as u8) << 2
                | (inside(i, j + 1) as u8) << 3;
            let (b, r, t, l) = (Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j));
            let centre_inside = || {
                let p = at(i, j);
                q([p[0] + hx / 2.0, p[1] + hy / 2.0]) > 0.0
            };
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((l, b)),
                2 | 13 => segments.push((b, r)),
                3 | 12 => segments.push((l, r)),
                4 | 11 => segments.push((r, t)),
                6 | 9 => segments.push((b, t)),
                7 | 8 => segments.push((l, t)),
                5 => {
                    if centre_inside() {
                        segments.push((l, t));
                        segments.push((b, r));
                    } else {
                        segments.push((l, b));
                        segments.push((r, t));
                    }
                }
                10 => {
                    if centre_inside() {
                        segments.push((l, b));
                        segments.push((r, t));
                    } else {
                        segments.push((l, t));
                        segments.push((b, r));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    Ok(link(&segments)
        .into_iter()
        .map(|(edges, closed)| Polyline {
            points: edges.into_iter().map(crossing).collect(),
            closed,
        })
        .collect())
}

/// Joins segments sharing an edge into chains, open chains first.
fn link(segments: &[(Edge, Edge)]) -> Vec<(Vec<Edge>, bool)> {
    let mut at: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        at.entry(a).or_default().push(s);
        at.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();
    let walk = |start: usize, from: Edge, used: &mut Vec<bool>| -> (Vec<Edge>, bool) {
        let mut chain = vec![from];
        let mut seg = start;
        let mut cur = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == cur { b } else { a };
            chain.push(next);
            if next == from {
                return (chain, true);
            }
            match at[&next].iter().find(|&&s| !used[s]) {
                Some(&s) => {
                    seg = s;
                    cur = next;
                }
                None => return (chain, false),
            }
        }
    };
    for (s, &(a, b)) in segments.iter().enumerate() {
        if used[s] {
            continue;
        }
        for end in [a, b] {
            if at[&end].len() == 1 {
                chains.push(walk(s, end, &mut used));
                break;
            }
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            let (mut chain, closed) = walk(s, segments[s].0, &mut used);
            if closed {
                chain.pop();
            }
            chains.push((chain, closed));
        }
    }
    chains
}

/// Stroke settings derived from a node style or the default classes.
#[derive(Clone, Debug, PartialEq)]
struct Pen {
    color: String,
    width: f64,
    dash: Option<&'static str>,
}

enum Class {
    Point,
    Line,
    Conic,
}

fn default_pen(class: Class) -> Pen {
    let color = match class {
        Class::Point => "rgb(128,0,0)",
        Class::Line => "rgb(0,128,0)",
        Class::Conic => "rgb(0,0,128)",
    };
    Pen {
        color: color.into(),
        width: 1.0,
        dash: None,
    }
}

/// Reads styles such as `rgb(0,0,.8)+1` or `dashed`.
fn apply_style(mut pen: Pen, style: &str) -> Pen {
    let mut rest = style.trim();
    while !rest.is_empty() {
        let (token, tail) = if rest.starts_with("rgb(") {
            match rest.find(')') {
                Some(end) => rest.split_at(end + 1),
                None => (rest, ""),
            }
        } else {
            rest.split_at(rest.find('+').unwrap_or(rest.len()))
        };
        let token = token.trim();
        if let Some(inner) = token.strip_prefix("rgb(").and_then(|t| t.strip_suffix(')')) {
            let parts: Vec<f64> = inner.split(',').filter_map(|x| x.trim().parse().ok()).collect();
            if let [r, g, b] = parts[..] {
                let c = |x: f64| (x.clamp(0.0, 1.0) * 255.0).round() as u8;
                pen.color = format!("rgb({},{},{})", c(r), c(g), c(b));
            }
        } else if token == "dashed" {
            pen.dash = Some("6,3");
        } else if token == "dotted" {
            pen.dash = Some("1,3");
        } else if let Ok(w) = token.parse::<f64>() {
            pen.width = w;
        }
        rest = tail.trim_start_matches('+').trim();
    }
    pen
}

fn px(x: f64) -> String {
    format!("{:.2}", round_sig(x, 12))
}

fn path_data(lines: &[Polyline], v: &Viewport) -> String {
    let mut d = String::new();
    for line in lines {
        for (i, &p) in line.points.iter().enumerate() {
            let (x, y) = v.to_pixels(p);
            let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, px(x), px(y));
        }
        if line.closed {
            d.push_str("Z ");
        }
    }
    d.trim_end().to_string()
}

fn is_imaginary(c: &Cycle, eps: f64) -> bool {
    c.unit_scaled().coefficients().any(|x| !is_less_than_epsilon(x.im.into(), eps))
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Draws every visible node of a two-dimensional figure.
pub fn render_svg(f: &Figure, v: &Viewport, include_real_line: bool) -> Result<String> {
    render_with_stamp(f, v, include_real_line, None)
}

fn render_with_stamp(f: &Figure, v: &Viewport, include_real_line: bool, stamp: Option<&str>) -> Result<String> {
    if f.dim() != 2 {
        return Err(Error::Render("drawing is possible for two-dimensional figures only".into()));
    }
    let (w, h) = (v.width(), v.height());
    let eps = f.epsilon();
    let metric = f.point_metric();
    let (hx, hy) = v.cell();
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for node in f.nodes() {
        if node.generation() <= GHOST_GEN || (node.key() == REAL_LINE && !include_real_line) {
            continue;
        }
        let multi = node.cycles().len() > 1;
        for (i, c) in node.cycles().iter().enumerate() {
            let id = if multi {
                format!("{}#{i}", node.key())
            } else {
                node.key().to_string()
            };
            let id = xml_escape(&id);
            if is_imaginary(c, eps) {
                let _ = writeln!(out, "<!-- {id}: imaginary cycle skipped -->");
                continue;
            }
            let flat = is_less_than_epsilon(c.unit_scaled().k(), eps);
            let class = if c.is_zero_radius(metric, eps) {
                Class::Point
            } else if flat {
                Class::Line
            } else {
                Class::Conic
            };
            let is_point = matches!(class, Class::Point);
            let mut pen = default_pen(class);
            if let Some(style) = node.style() {
                pen = apply_style(pen, style);
            }
            let label_at = if is_point {
                if flat {
                    continue;
                }
                let centre = c.center(metric, eps)?;
                let p = [centre[0], centre[1]];
                if !v.contains(p) {
                    continue;
                }
                let (x, y) = v.to_pixels(p);
                let _ = writeln!(
                    out,
                    r#"<circle id="{id}" cx="{}" cy="{}" r="2" fill="{}"/>"#,
                    px(x),
                    px(y),
                    pen.color
                );
                Some(p)
            } else {
                let lines = contour(c, metric, v)?;
                let Some(first) = lines.first().and_then(|l| l.points.first()).copied() else {
                    continue;
                };
                let dash = pen
                    .dash
                    .map(|d| format!(r#" stroke-dasharray="{d}""#))
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    r#"<path id="{id}" d="{}" fill="none" stroke="{}" stroke-width="{}"{dash}/>"#,
                    path_data(&lines, v),
                    pen.color,
                    pen.width
                );
                Some(first)
            };
            if let (Some(p), true) = (label_at, i == 0 && node.key() != REAL_LINE) {
                let (x, y) = v.to_pixels([p[0] + hx, p[1] - hy]);
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" font-size="10" fill="{}">{}</text>"#,
                    px(x + 2.0),
                    px(y + 10.0),
                    pen.color,
                    xml_escape(node.key())
                );
            }
        }
    }
    if let Some(stamp) = stamp {
        let _ = writeln!(
            out,
            r#"<text x="4" y="{}" font-size="12" fill="black">{}</text>"#,
            px(h - 4.0),
            xml_escape(stamp)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// One frame per parameter value, each stamped with `name=value` in the
/// bottom-left corner.
pub fn animate(f: &Figure, param: &str, values: &[f64], v: &Viewport, include_real_line: bool) -> Result<Vec<String>> {
    if !f.parameters().contains_key(param) {
        return Err(Error::UnknownParameter(param.to_string()));
    }
    values
        .iter()
        .map(|&t| {
            let mut frame = f.clone();
            frame.set_parameter(param, t);
            let stamp = format!("{param}={}", round_sig(t, 12));
            render_with_stamp(&frame, v, include_real_line, Some(&stamp))
        })
        .collect()
}

/// `count` evenly spaced values from `from` to `to` inclusive.
pub fn frame_values(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..count)
            .map(|i| from + i as f64 * (to - from) / (count - 1) as f64)
            .collect(),
    }
}
