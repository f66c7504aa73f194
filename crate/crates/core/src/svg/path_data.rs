//! `d` attribute parsing. Relative, shorthand, quadratic and arc commands
//! are resolved into absolute M/L/C.

use super::{Command, PointF, SvgError};
use std::f64::consts::{FRAC_PI_2, PI};

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_separators(&mut self) {
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_whitespace() || self.src[self.pos] == b',')
        {
            self.pos += 1;
        }
    }

    fn error(&self, message: impl Into<String>) -> SvgError {
        SvgError::PathData {
            position: self.pos,
            message: message.into(),
        }
    }

    fn peek_command(&mut self) -> Option<u8> {
        self.skip_separators();
        self.src
            .get(self.pos)
            .copied()
            .filter(|c| c.is_ascii_alphabetic() && *c != b'e' && *c != b'E')
    }

    fn at_number(&mut self) -> bool {
        self.skip_separators();
        matches!(self.src.get(self.pos), Some(c) if c.is_ascii_digit() || matches!(c, b'-' | b'+' | b'.'))
    }

    fn number(&mut self) -> Result<f64, SvgError> {
        self.skip_separators();
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        if i < s.len() && (s[i] == b'-' || s[i] == b'+') {
            i += 1;
        }
        let mut digits = 0;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
            digits += 1;
        }
        if i < s.len() && s[i] == b'.' {
            i += 1;
            while i < s.len() && s[i].is_ascii_digit() {
                i += 1;
                digits += 1;
            }
        }
        if digits == 0 {
            return Err(self.error("expected number"));
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'-' || s[j] == b'+') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        self.pos = i;
        std::str::from_utf8(&s[start..i])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.error("malformed number"))
    }

    fn flag(&mut self) -> Result<bool, SvgError> {
        self.skip_separators();
        match self.src.get(self.pos) {
            Some(b'0') => {
                self.pos += 1;
                Ok(false)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(true)
            }
            _ => Err(self.error("expected arc flag")),
        }
    }

    fn pair(&mut self) -> Result<PointF, SvgError> {
        let x = self.number()?;
        let y = self.number()?;
        Ok(PointF::new(x, y))
    }
}

/// Parses path data into absolute commands. Every subpath begins with a
/// MoveTo; `Z` becomes a LineTo back to the subpath start.
pub(crate) fn parse_path_data(d: &str) -> Result<Vec<Command<PointF>>, SvgError> {
    let mut lx = Lexer {
        src: d.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    let mut cur = PointF::default();
    let mut start = PointF::default();
    // Reflected control point for S/T shorthands.
    let mut last_cubic_ctrl: Option<PointF> = None;
    let mut last_quad_ctrl: Option<PointF> = None;
    let mut cmd: Option<u8> = None;

    loop {
        if let Some(c) = lx.peek_command() {
            lx.pos += 1;
            cmd = Some(c);
        } else if lx.pos >= lx.src.len() {
            break;
        } else if !lx.at_number() {
            return Err(lx.error("unexpected character"));
        } else if cmd.is_none() {
            return Err(lx.error("path data must start with a command"));
        }
        let c = cmd.unwrap();
        if out.is_empty() && !matches!(c, b'M' | b'm') {
            return Err(lx.error("path data must start with M"));
        }
        let rel = c.is_ascii_lowercase();
        let base = if rel { cur } else { PointF::default() };
        let off = |p: PointF| PointF::new(p.x + base.x, p.y + base.y);
        let mut cubic_ctrl = None;
        let mut quad_ctrl = None;
        match c.to_ascii_uppercase() {
            b'M' => {
                let p = off(lx.pair()?);
                out.push(Command::MoveTo(p));
                cur = p;
                start = p;
                // Extra pairs after a move are implicit line-tos.
                cmd = Some(if rel { b'l' } else { b'L' });
            }
            b'L' => {
                let p = off(lx.pair()?);
                out.push(Command::LineTo(p));
                cur = p;
            }
            b'H' => {
                let x = lx.number()? + if rel { cur.x } else { 0.0 };
                cur = PointF::new(x, cur.y);
                out.push(Command::LineTo(cur));
            }
            b'V' => {
                let y = lx.number()? + if rel { cur.y } else { 0.0 };
                cur = PointF::new(cur.x, y);
                out.push(Command::LineTo(cur));
            }
            b'C' => {
                let c1 = off(lx.pair()?);
                let c2 = off(lx.pair()?);
                let p = off(lx.pair()?);
                out.push(Command::CubicBezier(c1, c2, p));
                cubic_ctrl = Some(c2);
                cur = p;
            }
            b'S' => {
                let c1 = reflect(last_cubic_ctrl, cur);
                let c2 = off(lx.pair()?);
                let p = off(lx.pair()?);
                out.push(Command::CubicBezier(c1, c2, p));
                cubic_ctrl = Some(c2);
                cur = p;
            }
            b'Q' => {
                let q = off(lx.pair()?);
                let p = off(lx.pair()?);
                out.push(quad_to_cubic(cur, q, p));
                quad_ctrl = Some(q);
                cur = p;
            }
            b'T' => {
                let q = reflect(last_quad_ctrl, cur);
                let p = off(lx.pair()?);
                out.push(quad_to_cubic(cur, q, p));
                quad_ctrl = Some(q);
                cur = p;
            }
            b'A' => {
                let rx = lx.number()?;
                let ry = lx.number()?;
                let phi = lx.number()?;
                let large = lx.flag()?;
                let sweep = lx.flag()?;
                let p = off(lx.pair()?);
                out.extend(arc_to_cubics(cur, rx, ry, phi, large, sweep, p));
                cur = p;
            }
            b'Z' => {
                out.push(Command::LineTo(start));
                cur = start;
                // Z takes no arguments; a following number is an error.
                cmd = None;
            }
            other => {
                return Err(lx.error(format!(
                    "unsupported path command `{}`",
                    other as char
                )))
            }
        }
        last_cubic_ctrl = cubic_ctrl;
        last_quad_ctrl = quad_ctrl;
    }
    Ok(out)
}

fn reflect(ctrl: Option<PointF>, about: PointF) -> PointF {
    match ctrl {
        Some(c) => PointF::new(2.0 * about.x - c.x, 2.0 * about.y - c.y),
        None => about,
    }
}

/// Exact degree elevation of a quadratic Bézier.
pub(crate) fn quad_to_cubic(p0: PointF, q: PointF, p: PointF) -> Command<PointF> {
    Command::CubicBezier(p0.lerp(q, 2.0 / 3.0), p.lerp(q, 2.0 / 3.0), p)
}

/// Converts an endpoint-parameterized elliptical arc into cubic segments,
/// each spanning at most 90°.
pub(crate) fn arc_to_cubics(
    p0: PointF,
    rx: f64,
    ry: f64,
    phi_deg: f64,
    large_arc: bool,
    sweep: bool,
    p1: PointF,
) -> Vec<Command<PointF>> {
    if p0 == p1 {
        return Vec::new();
    }
    let (mut rx, mut ry) = (rx.abs(), ry.abs());
    if rx == 0.0 || ry == 0.0 {
        return vec![Command::LineTo(p1)];
    }
    let (sin_phi, cos_phi) = phi_deg.to_radians().sin_cos();
    let dx = (p0.x - p1.x) / 2.0;
    let dy = (p0.y - p1.y) / 2.0;
    let x1p = cos_phi * dx + sin_phi * dy;
    let y1p = -sin_phi * dx + cos_phi * dy;

    let lambda = (x1p * x1p) / (rx * rx) + (y1p * y1p) / (ry * ry);
    if lambda > 1.0 {
        let s = lambda.sqrt();
        rx *= s;
        ry *= s;
    }
    let num = rx * rx * ry * ry - rx * rx * y1p * y1p - ry * ry * x1p * x1p;
    let den = rx * rx * y1p * y1p + ry * ry * x1p * x1p;
    let mut coef = (num / den).max(0.0).sqrt();
    if large_arc == sweep {
        coef = -coef;
    }
    let cxp = coef * rx * y1p / ry;
    let cyp = -coef * ry * x1p / rx;
    let cx = cos_phi * cxp - sin_phi * cyp + (p0.x + p1.x) / 2.0;
    let cy = sin_phi * cxp + cos_phi * cyp + (p0.y + p1.y) / 2.0;

    let angle = |ux: f64, uy: f64, vx: f64, vy: f64| (ux * vy - uy * vx).atan2(ux * vx + uy * vy);
    let ux = (x1p - cxp) / rx;
    let uy = (y1p - cyp) / ry;
    let vx = (-x1p - cxp) / rx;
    let vy = (-y1p - cyp) / ry;
    let theta1 = angle(1.0, 0.0, ux, uy);
    let mut dtheta = angle(ux, uy, vx, vy);
    if !sweep && dtheta > 0.0 {
        dtheta -= 2.0 * PI;
    } else if sweep && dtheta < 0.0 {
        dtheta += 2.0 * PI;
    }

    let segments = ((dtheta.abs() / FRAC_PI_2) - 1e-9).ceil().max(1.0) as usize;
    let delta = dtheta / segments as f64;
    let k = 4.0 / 3.0 * (delta / 4.0).tan();
    let on_ellipse = |t: f64| {
        let (s, c) = t.sin_cos();
        PointF::new(
            cx + rx * c * cos_phi - ry * s * sin_phi,
            cy + rx * c * sin_phi + ry * s * cos_phi,
        )
    };
    let tangent = |t: f64| {
        let (s, c) = t.sin_cos();
        PointF::new(
            -rx * s * cos_phi - ry * c * sin_phi,
            -rx * s * sin_phi + ry * c * cos_phi,
        )
    };
    let mut out = Vec::with_capacity(segments);
    for i in 0..segments {
        let t0 = theta1 + delta * i as f64;
        let t1 = t0 + delta;
        let a = on_ellipse(t0);
        let b = if i + 1 == segments { p1 } else { on_ellipse(t1) };
        let da = tangent(t0);
        let db = tangent(t1);
        out.push(Command::CubicBezier(
            PointF::new(a.x + k * da.x, a.y + k * da.y),
            PointF::new(b.x - k * db.x, b.y - k * db.y),
            b,
        ));
    }
    out
}
