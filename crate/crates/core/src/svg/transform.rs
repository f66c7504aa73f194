use super::{PointF, SvgError};

/// 2D affine map `(x, y) -> (a·x + c·y + e, b·x + d·y + f)`, the SVG
/// `matrix(a b c d e f)` convention.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Default for Affine {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Affine {
    pub const IDENTITY: Affine = Affine {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
        e: 0.0,
        f: 0.0,
    };

    pub fn translate(tx: f64, ty: f64) -> Self {
        Affine {
            e: tx,
            f: ty,
            ..Self::IDENTITY
        }
    }

    pub fn scale(sx: f64, sy: f64) -> Self {
        Affine {
            a: sx,
            d: sy,
            ..Self::IDENTITY
        }
    }

    pub fn rotate_deg(angle: f64) -> Self {
        let (s, c) = angle.to_radians().sin_cos();
        Affine {
            a: c,
            b: s,
            c: -s,
            d: c,
            e: 0.0,
            f: 0.0,
        }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn then_after(&self, other: &Affine) -> Affine {
        Affine {
            a: self.a * other.a + self.c * other.b,
            b: self.b * other.a + self.d * other.b,
            c: self.a * other.c + self.c * other.d,
            d: self.b * other.c + self.d * other.d,
            e: self.a * other.e + self.c * other.f + self.e,
            f: self.b * other.e + self.d * other.f + self.f,
        }
    }

    pub fn apply(&self, p: PointF) -> PointF {
        PointF::new(
            self.a * p.x + self.c * p.y + self.e,
            self.b * p.x + self.d * p.y + self.f,
        )
    }

    /// Parses an SVG `transform` attribute value.
    pub fn parse(text: &str) -> Result<Affine, SvgError> {
        let err = |m: &str| SvgError::Attribute {
            name: "transform".into(),
            message: format!("{m} in `{text}`"),
        };
        let mut result = Affine::IDENTITY;
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open = rest.find('(').ok_or_else(|| err("expected `(`"))?;
            let close = rest.find(')').ok_or_else(|| err("expected `)`"))?;
            if close < open {
                return Err(err("unbalanced parentheses"));
            }
            let name = rest[..open].trim().trim_start_matches(',').trim();
            let args = rest[open + 1..close]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| err("bad number")))
                .collect::<Result<Vec<_>, _>>()?;
            let t = match (name, args.as_slice()) {
                ("matrix", &[a, b, c, d, e, f]) => Affine { a, b, c, d, e, f },
                ("translate", &[tx]) => Affine::translate(tx, 0.0),
                ("translate", &[tx, ty]) => Affine::translate(tx, ty),
                ("scale", &[s]) => Affine::scale(s, s),
                ("scale", &[sx, sy]) => Affine::scale(sx, sy),
                ("rotate", &[angle]) => Affine::rotate_deg(angle),
                ("rotate", &[angle, cx, cy]) => Affine::translate(cx, cy)
                    .then_after(&Affine::rotate_deg(angle))
                    .then_after(&Affine::translate(-cx, -cy)),
                ("skewX", &[angle]) => Affine {
                    c: angle.to_radians().tan(),
                    ..Affine::IDENTITY
                },
                ("skewY", &[angle]) => Affine {
                    b: angle.to_radians().tan(),
                    ..Affine::IDENTITY
                },
                _ => return Err(err(&format!("unsupported transform `{name}`"))),
            };
            // Listed transforms apply right-to-left to the geometry.
            result = result.then_after(&t);
            rest = rest[close + 1..].trim_start();
        }
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn translate_then_scale_order() {
        // "translate(10) scale(2)" scales first, then translates.
        let t = Affine::parse("translate(10) scale(2)").unwrap();
        let p = t.apply(PointF::new(1.0, 1.0));
        assert_eq!(p, PointF::new(12.0, 2.0));
    }

    #[test]
    fn rotate_about_center() {
        let t = Affine::parse("rotate(90 50 50)").unwrap();
        let p = t.apply(PointF::new(60.0, 50.0));
        assert_abs_diff_eq!(p.x, 50.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p.y, 60.0, epsilon = 1e-9);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Affine::parse("wobble(3)").is_err());
        assert!(Affine::parse("scale(1,2,3)").is_err());
    }
}
