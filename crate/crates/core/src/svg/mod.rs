//! Simplified SVG representation: every shape is reduced to absolute
//! MoveTo / LineTo / CubicBezier commands on a 100×100 integer grid.

mod normalize;
mod parse;
mod path_data;
mod raster;
mod serialize;
mod transform;

pub use normalize::normalize_and_quantize;
pub use parse::parse_svg;
pub(crate) use parse::{ellipse_commands, rect_commands};
pub use raster::{rasterize, RasterImage};
pub use serialize::serialize_svg;
pub use transform::Affine;

use thiserror::Error;

/// Side length of the quantization grid (and of the canonical viewBox).
pub const GRID: u32 = 100;

/// Control-point offset for a four-segment cubic circle approximation.
pub const KAPPA: f64 = 0.552_284_749_8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvgError {
    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("unsupported SVG element <{0}>")]
    Unsupported(String),
    #[error("invalid path data at byte {position}: {message}")]
    PathData { position: usize, message: String },
    #[error("invalid value for attribute `{name}`: {message}")]
    Attribute { name: String, message: String },
    #[error("path has no commands")]
    EmptyPath,
    #[error("path must begin with MoveTo")]
    MissingMoveTo,
    #[error("icon has no paths")]
    EmptyIcon,
    #[error("coordinate ({x}, {y}) lies outside the {GRID}x{GRID} grid")]
    OutOfGrid { x: i64, y: i64 },
}

/// A quantized grid location, `0 <= x, y < 100`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    x: u8,
    y: u8,
}

impl Point {
    pub fn new(x: u32, y: u32) -> Result<Self, SvgError> {
        if x >= GRID || y >= GRID {
            return Err(SvgError::OutOfGrid {
                x: x as i64,
                y: y as i64,
            });
        }
        Ok(Self {
            x: x as u8,
            y: y as u8,
        })
    }

    pub fn x(self) -> u32 {
        self.x as u32
    }

    pub fn y(self) -> u32 {
        self.y as u32
    }

    pub fn to_f64(self) -> PointF {
        PointF::new(self.x as f64, self.y as f64)
    }
}

/// A real-valued point, used before quantization.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PointF {
    pub x: f64,
    pub y: f64,
}

impl PointF {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn lerp(self, other: PointF, t: f64) -> PointF {
        PointF::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CommandKind {
    MoveTo,
    LineTo,
    CubicBezier,
}

impl CommandKind {
    /// Number of location arguments carried by this command.
    pub fn arity(self) -> usize {
        match self {
            CommandKind::MoveTo | CommandKind::LineTo => 1,
            CommandKind::CubicBezier => 3,
        }
    }
}

/// One drawing command. A cubic carries `(control1, control2, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command<P> {
    MoveTo(P),
    LineTo(P),
    CubicBezier(P, P, P),
}

impl<P: Copy> Command<P> {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::MoveTo(_) => CommandKind::MoveTo,
            Command::LineTo(_) => CommandKind::LineTo,
            Command::CubicBezier(..) => CommandKind::CubicBezier,
        }
    }

    /// Location arguments in argument order.
    pub fn points(&self) -> impl Iterator<Item = P> {
        let (pts, n) = match *self {
            Command::MoveTo(p) | Command::LineTo(p) => ([p, p, p], 1),
            Command::CubicBezier(a, b, c) => ([a, b, c], 3),
        };
        pts.into_iter().take(n)
    }

    pub fn end_point(&self) -> P {
        match *self {
            Command::MoveTo(p) | Command::LineTo(p) | Command::CubicBezier(_, _, p) => p,
        }
    }

    pub fn map<Q>(&self, mut f: impl FnMut(P) -> Q) -> Command<Q> {
        match *self {
            Command::MoveTo(p) => Command::MoveTo(f(p)),
            Command::LineTo(p) => Command::LineTo(f(p)),
            Command::CubicBezier(a, b, c) => Command::CubicBezier(f(a), f(b), f(c)),
        }
    }
}

/// A path: non-empty command list whose first command is a MoveTo.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SvgPath<P> {
    commands: Vec<Command<P>>,
}

impl<P: Copy> SvgPath<P> {
    pub fn new(commands: Vec<Command<P>>) -> Result<Self, SvgError> {
        match commands.first() {
            None => Err(SvgError::EmptyPath),
            Some(Command::MoveTo(_)) => Ok(Self { commands }),
            Some(_) => Err(SvgError::MissingMoveTo),
        }
    }

    pub fn commands(&self) -> &[Command<P>] {
        &self.commands
    }

    pub fn into_commands(self) -> Vec<Command<P>> {
        self.commands
    }

    pub fn map<Q: Copy>(&self, mut f: impl FnMut(P) -> Q) -> SvgPath<Q> {
        SvgPath {
            commands: self.commands.iter().map(|c| c.map(&mut f)).collect(),
        }
    }
}

/// An icon: an ordered, non-empty list of paths on the 100×100 canvas.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Icon<P = Point> {
    paths: Vec<SvgPath<P>>,
}

/// An icon with real-valued coordinates, as produced by the parser.
pub type RawIcon = Icon<PointF>;

impl<P: Copy> Icon<P> {
    pub fn new(paths: Vec<SvgPath<P>>) -> Result<Self, SvgError> {
        if paths.is_empty() {
            return Err(SvgError::EmptyIcon);
        }
        Ok(Self { paths })
    }

    pub fn paths(&self) -> &[SvgPath<P>] {
        &self.paths
    }

    pub fn into_paths(self) -> Vec<SvgPath<P>> {
        self.paths
    }

    pub fn width(&self) -> u32 {
        GRID
    }

    pub fn height(&self) -> u32 {
        GRID
    }

    pub fn points(&self) -> impl Iterator<Item = P> + '_ {
        self.paths
            .iter()
            .flat_map(|p| p.commands.iter().flat_map(|c| c.points()))
    }

    pub fn command_count(&self) -> usize {
        self.paths.iter().map(|p| p.commands.len()).sum()
    }
}

impl Icon<Point> {
    pub fn to_f64(&self) -> RawIcon {
        Icon {
            paths: self.paths.iter().map(|p| p.map(Point::to_f64)).collect(),
        }
    }
}

impl RawIcon {
    /// Converts without rescaling; succeeds only when every coordinate is
    /// already an integer inside the grid.
    pub fn to_grid_exact(&self) -> Result<Icon, SvgError> {
        let mut err = None;
        let paths = self
            .paths
            .iter()
            .map(|p| {
                p.map(|q| {
                    let (x, y) = (q.x.round(), q.y.round());
                    if x != q.x || y != q.y || x < 0.0 || y < 0.0 || x >= GRID as f64 || y >= GRID as f64
                    {
                        err.get_or_insert(SvgError::OutOfGrid {
                            x: q.x.round() as i64,
                            y: q.y.round() as i64,
                        });
                        return Point { x: 0, y: 0 };
                    }
                    Point {
                        x: x as u8,
                        y: y as u8,
                    }
                })
            })
            .collect();
        match err {
            Some(e) => Err(e),
            None => Ok(Icon { paths }),
        }
    }
}

/// Axis-aligned bounding box of all command points (controls included).
pub(crate) fn bounding_box(icon: &RawIcon) -> (PointF, PointF) {
    let mut lo = PointF::new(f64::INFINITY, f64::INFINITY);
    let mut hi = PointF::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in icon.points() {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}
