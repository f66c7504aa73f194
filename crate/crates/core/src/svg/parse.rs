use super::path_data::parse_path_data;
use super::{Affine, Command, Icon, PointF, RawIcon, SvgError, SvgPath, KAPPA};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use std::collections::HashMap;

const SHAPES: &[&str] = &[
    "path", "rect", "circle", "ellipse", "line", "polyline", "polygon",
];
const CONTAINERS: &[&str] = &["svg", "g", "defs"];
const IGNORED: &[&str] = &["title", "desc", "metadata"];

/// Parses an SVG document into an unquantized icon made of absolute
/// M/L/C commands. Transforms are baked into the coordinates and all
/// presentation attributes are dropped.
pub fn parse_svg(text: &str) -> Result<RawIcon, SvgError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);

    let xml_err = |reader: &Reader<&[u8]>, message: String| SvgError::Xml {
        offset: reader.error_position().max(reader.buffer_position() as _) as u64,
        message,
    };

    let mut stack: Vec<Affine> = Vec::new();
    let mut skip_depth = 0usize;
    let mut seen_root = false;
    let mut paths = Vec::new();

    loop {
        let event = reader
            .read_event()
            .map_err(|e| xml_err(&reader, e.to_string()))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                let name = String::from_utf8_lossy(e.local_name().as_ref()).into_owned();
                if skip_depth > 0 {
                    if !is_empty {
                        skip_depth += 1;
                    }
                    continue;
                }
                if !seen_root {
                    if name != "svg" {
                        return Err(xml_err(&reader, format!("root element is <{name}>, expected <svg>")));
                    }
                    seen_root = true;
                }
                if IGNORED.contains(&name.as_str()) {
                    if !is_empty {
                        skip_depth = 1;
                    }
                    continue;
                }
                let attrs = attributes(e).map_err(|m| xml_err(&reader, m))?;
                let parent = stack.last().copied().unwrap_or_default();
                let ctm = match attrs.get("transform") {
                    Some(t) => parent.then_after(&Affine::parse(t)?),
                    None => parent,
                };
                if SHAPES.contains(&name.as_str()) {
                    let cmds = shape_commands(&name, &attrs)?;
                    if !cmds.is_empty() {
                        let cmds = cmds.iter().map(|c| c.map(|p| ctm.apply(p))).collect();
                        paths.push(SvgPath::new(cmds)?);
                    }
                } else if !CONTAINERS.contains(&name.as_str()) {
                    return Err(SvgError::Unsupported(name));
                }
                if !is_empty {
                    stack.push(ctm);
                }
            }
            Event::End(_) => {
                if skip_depth > 0 {
                    skip_depth -= 1;
                } else {
                    stack.pop();
                }
            }
            Event::Eof => {
                if !stack.is_empty() || skip_depth > 0 {
                    return Err(xml_err(&reader, "unexpected end of document".into()));
                }
                break;
            }
            Event::Text(_) | Event::CData(_) | Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => {}
        }
    }
    if !seen_root {
        return Err(SvgError::Xml {
            offset: text.len() as u64,
            message: "document has no root element".into(),
        });
    }
    Icon::new(paths)
}

fn attributes(e: &BytesStart<'_>) -> Result<HashMap<String, String>, String> {
    let mut map = HashMap::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|err| err.to_string())?;
        let key = String::from_utf8_lossy(attr.key.local_name().as_ref()).into_owned();
        let value = attr.unescape_value().map_err(|err| err.to_string())?;
        map.insert(key, value.into_owned());
    }
    Ok(map)
}

fn length(attrs: &HashMap<String, String>, name: &str, default: Option<f64>) -> Result<f64, SvgError> {
    let Some(raw) = attrs.get(name) else {
        return default.ok_or_else(|| SvgError::Attribute {
            name: name.into(),
            message: "missing".into(),
        });
    };
    let v = raw.trim();
    let v = v.strip_suffix("px").unwrap_or(v).trim();
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| SvgError::Attribute {
            name: name.into(),
            message: format!("unsupported length `{raw}`"),
        })
}

fn point_list(raw: &str) -> Result<Vec<PointF>, SvgError> {
    let nums = raw
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| SvgError::Attribute {
            name: "points".into(),
            message: e.to_string(),
        })?;
    if nums.len() % 2 != 0 {
        return Err(SvgError::Attribute {
            name: "points".into(),
            message: "odd number of coordinates".into(),
        });
    }
    Ok(nums.chunks(2).map(|c| PointF::new(c[0], c[1])).collect())
}

/// MoveTo followed by four quarter cubics, clockwise from angle 0.
pub(crate) fn ellipse_commands(cx: f64, cy: f64, rx: f64, ry: f64) -> Vec<Command<PointF>> {
    let (kx, ky) = (KAPPA * rx, KAPPA * ry);
    let p = PointF::new;
    vec![
        Command::MoveTo(p(cx + rx, cy)),
        Command::CubicBezier(p(cx + rx, cy + ky), p(cx + kx, cy + ry), p(cx, cy + ry)),
        Command::CubicBezier(p(cx - kx, cy + ry), p(cx - rx, cy + ky), p(cx - rx, cy)),
        Command::CubicBezier(p(cx - rx, cy - ky), p(cx - kx, cy - ry), p(cx, cy - ry)),
        Command::CubicBezier(p(cx + kx, cy - ry), p(cx + rx, cy - ky), p(cx + rx, cy)),
    ]
}

pub(crate) fn rect_commands(x: f64, y: f64, w: f64, h: f64) -> Vec<Command<PointF>> {
    let p = PointF::new;
    vec![
        Command::MoveTo(p(x, y)),
        Command::LineTo(p(x + w, y)),
        Command::LineTo(p(x + w, y + h)),
        Command::LineTo(p(x, y + h)),
        Command::LineTo(p(x, y)),
    ]
}

fn shape_commands(name: &str, attrs: &HashMap<String, String>) -> Result<Vec<Command<PointF>>, SvgError> {
    Ok(match name {
        "path" => match attrs.get("d") {
            Some(d) => parse_path_data(d)?,
            None => Vec::new(),
        },
        "rect" => {
            let (w, h) = (length(attrs, "width", Some(0.0))?, length(attrs, "height", Some(0.0))?);
            if w <= 0.0 || h <= 0.0 {
                return Ok(Vec::new());
            }
            // Rounded corners (rx/ry) are not modelled.
            rect_commands(length(attrs, "x", Some(0.0))?, length(attrs, "y", Some(0.0))?, w, h)
        }
        "circle" => {
            let r = length(attrs, "r", Some(0.0))?;
            if r <= 0.0 {
                return Ok(Vec::new());
            }
            ellipse_commands(length(attrs, "cx", Some(0.0))?, length(attrs, "cy", Some(0.0))?, r, r)
        }
        "ellipse" => {
            let (rx, ry) = (length(attrs, "rx", Some(0.0))?, length(attrs, "ry", Some(0.0))?);
            if rx <= 0.0 || ry <= 0.0 {
                return Ok(Vec::new());
            }
            ellipse_commands(length(attrs, "cx", Some(0.0))?, length(attrs, "cy", Some(0.0))?, rx, ry)
        }
        "line" => {
            let a = PointF::new(length(attrs, "x1", Some(0.0))?, length(attrs, "y1", Some(0.0))?);
            let b = PointF::new(length(attrs, "x2", Some(0.0))?, length(attrs, "y2", Some(0.0))?);
            vec![Command::MoveTo(a), Command::LineTo(b)]
        }
        "polyline" | "polygon" => {
            let pts = point_list(attrs.get("points").map(String::as_str).unwrap_or(""))?;
            let Some(&first) = pts.first() else {
                return Ok(Vec::new());
            };
            let mut cmds = vec![Command::MoveTo(first)];
            cmds.extend(pts[1..].iter().map(|&p| Command::LineTo(p)));
            if name == "polygon" {
                cmds.push(Command::LineTo(first));
            }
            cmds
        }
        _ => unreachable!("not a shape element: {name}"),
    })
}
