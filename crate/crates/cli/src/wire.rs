//! Command-list JSON: `[[{"kind":"M","pts":[[x,y]]}, ...], ...]`, one inner
//! list per path.

use serde::{Deserialize, Serialize};
use vecticon_core::svg::{Command, Icon, Point, SvgPath};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireCommand {
    pub kind: String,
    pub pts: Vec<[i64; 2]>,
}

pub type WirePath = Vec<WireCommand>;

fn pt(p: Point) -> [i64; 2] {
    [p.x() as i64, p.y() as i64]
}

pub fn path_to_wire(path: &SvgPath<Point>) -> WirePath {
    path.commands()
        .iter()
        .map(|c| {
            let kind = match c {
                Command::MoveTo(_) => "M",
                Command::LineTo(_) => "L",
                Command::CubicBezier(..) => "C",
            };
            WireCommand {
                kind: kind.into(),
                pts: c.points().map(pt).collect(),
            }
        })
        .collect()
}

pub fn paths_to_wire(paths: &[SvgPath<Point>]) -> Vec<WirePath> {
    paths.iter().map(path_to_wire).collect()
}

pub fn icon_to_wire(icon: &Icon) -> Vec<WirePath> {
    paths_to_wire(icon.paths())
}

/// Converts a wire path list; errors name the offending element, e.g.
/// `left[1][0].pts`.
pub fn paths_from_wire(field: &str, wire: &[WirePath]) -> Result<Vec<SvgPath<Point>>, String> {
    wire.iter()
        .enumerate()
        .map(|(i, path)| {
            let at = format!("{field}[{i}]");
            if path.is_empty() {
                return Err(format!("{at}: a path needs at least one command"));
            }
            let mut cmds = Vec::with_capacity(path.len());
            for (j, c) in path.iter().enumerate() {
                let at = format!("{at}[{j}]");
                let arity = match c.kind.as_str() {
                    "M" | "L" => 1,
                    "C" => 3,
                    other => return Err(format!("{at}.kind: expected \"M\", \"L\" or \"C\", got {other:?}")),
                };
                if c.pts.len() != arity {
                    return Err(format!("{at}.pts: {} takes {arity} point(s), got {}", c.kind, c.pts.len()));
                }
                let mut pts = Vec::with_capacity(arity);
                for (k, &[x, y]) in c.pts.iter().enumerate() {
                    if !(0..100).contains(&x) || !(0..100).contains(&y) {
                        return Err(format!("{at}.pts[{k}]: ({x}, {y}) is outside the 100x100 grid"));
                    }
                    pts.push(Point::new(x as u32, y as u32).expect("range checked"));
                }
                cmds.push(match c.kind.as_str() {
                    "M" => Command::MoveTo(pts[0]),
                    "L" => Command::LineTo(pts[0]),
                    _ => Command::CubicBezier(pts[0], pts[1], pts[2]),
                });
            }
            SvgPath::new(cmds).map_err(|e| format!("{at}: {e}"))
        })
        .collect()
}
