use super::{Command, Icon, Point, PointF, SvgPath, GRID};

/// Grayscale raster, row-major, `0.0` = ink, `1.0` = background.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterImage {
    resolution: usize,
    pixels: Vec<f32>,
}

impl RasterImage {
    pub fn from_pixels(resolution: usize, pixels: Vec<f32>) -> Self {
        assert_eq!(pixels.len(), resolution * resolution, "pixel count");
        Self {
            resolution,
            pixels: pixels.into_iter().map(|p| p.clamp(0.0, 1.0)).collect(),
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.pixels[row * self.resolution + col]
    }

    /// Binary PGM (P5) encoding, handy for eyeballing renders.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.resolution, self.resolution).into_bytes();
        out.extend(self.pixels.iter().map(|&p| (p * 255.0).round() as u8));
        out
    }
}

/// Maximum chord error, in pixels, when flattening cubics.
const FLATNESS: f64 = 0.25;

/// Fills each path with the non-zero winding rule, sampling at pixel
/// centers, and composites the paths as a union. Every subpath is
/// implicitly closed.
pub fn rasterize(icon: &Icon, resolution: usize) -> RasterImage {
    assert!(resolution >= 8, "resolution must be at least 8");
    let scale = resolution as f64 / GRID as f64;
    let mut pixels = vec![1.0f32; resolution * resolution];
    for path in icon.paths() {
        fill_path(&path_edges(path, scale), resolution, &mut pixels);
    }
    RasterImage { resolution, pixels }
}

fn fill_path(edges: &[(PointF, PointF)], resolution: usize, pixels: &mut [f32]) {
    let mut crossings: Vec<(f64, i32)> = Vec::new();
    for row in 0..resolution {
        let y = row as f64 + 0.5;
        crossings.clear();
        for &(a, b) in edges {
            let (lo, hi, dir) = if a.y < b.y { (a, b, 1) } else { (b, a, -1) };
            if lo.y <= y && y < hi.y {
                let x = lo.x + (y - lo.y) * (hi.x - lo.x) / (hi.y - lo.y);
                crossings.push((x, dir));
            }
        }
        crossings.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut winding = 0;
        for pair in crossings.windows(2) {
            winding += pair[0].1;
            if winding == 0 {
                continue;
            }
            // Pixel centers c + 0.5 in [x0, x1).
            let first = (pair[0].0 - 0.5).ceil().max(0.0) as usize;
            let end = ((pair[1].0 - 0.5).ceil().max(0.0) as usize).min(resolution);
            for col in first..end {
                pixels[row * resolution + col] = 0.0;
            }
        }
    }
}

/// Closed polygon edges of one path in pixel space; horizontal edges are
/// dropped.
pub(crate) fn path_edges(path: &SvgPath<Point>, scale: f64) -> Vec<(PointF, PointF)> {
    let mut out = Vec::new();
    let px = |p: Point| PointF::new(p.x() as f64 * scale, p.y() as f64 * scale);
    {
        let mut poly: Vec<PointF> = Vec::new();
        let mut close = |poly: &mut Vec<PointF>| {
            if poly.len() > 1 {
                for i in 0..poly.len() {
                    let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
                    if a.y != b.y {
                        out.push((a, b));
                    }
                }
            }
            poly.clear();
        };
        for cmd in path.commands() {
            match *cmd {
                Command::MoveTo(p) => {
                    close(&mut poly);
                    poly.push(px(p));
                }
                Command::LineTo(p) => poly.push(px(p)),
                Command::CubicBezier(c1, c2, p) => {
                    let start = *poly.last().expect("path begins with MoveTo");
                    flatten_cubic(start, px(c1), px(c2), px(p), &mut poly, 0);
                }
            }
        }
        close(&mut poly);
    }
    out
}

fn flatten_cubic(p0: PointF, p1: PointF, p2: PointF, p3: PointF, out: &mut Vec<PointF>, depth: u32) {
    // Control-polygon distance bounds the curve's deviation from its chord
    // by a factor of 3/4.
    let flat = distance_to_segment(p1, p0, p3).max(distance_to_segment(p2, p0, p3)) <= FLATNESS;
    if flat || depth >= 16 {
        out.push(p3);
        return;
    }
    let m01 = p0.lerp(p1, 0.5);
    let m12 = p1.lerp(p2, 0.5);
    let m23 = p2.lerp(p3, 0.5);
    let a = m01.lerp(m12, 0.5);
    let b = m12.lerp(m23, 0.5);
    let mid = a.lerp(b, 0.5);
    flatten_cubic(p0, m01, a, mid, out, depth + 1);
    flatten_cubic(mid, b, m23, p3, out, depth + 1);
}

fn distance_to_segment(p: PointF, a: PointF, b: PointF) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.x + t * dx - p.x, a.y + t * dy - p.y);
    (qx * qx + qy * qy).sqrt()
}
