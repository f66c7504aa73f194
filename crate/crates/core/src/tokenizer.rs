//! Icon ⟷ token-id sequences over the 10,007-entry SVG vocabulary.
//!
//! Id layout (fixed, so checkpoints stay portable):
//!
//! | ids            | token                  |
//! |----------------|------------------------|
//! | 0, 1, 2        | `M`, `L`, `C`          |
//! | 3 ..= 10002    | `Loc(v)` at `3 + v`    |
//! | 10003          | `<BOP>`                |
//! | 10004          | `<EOS>`                |
//! | 10005          | `<Mask>`               |
//! | 10006          | `<EOM>`                |

use crate::svg::{Command, CommandKind, Icon, Point, SvgPath, GRID};
use std::io::{self, BufRead, Write};
use thiserror::Error;

pub const LOCATIONS: u32 = GRID * GRID;
pub const SVG_VOCAB_SIZE: usize = 3 + LOCATIONS as usize + 4;

pub const LOC_BASE: u16 = 3;
pub const BOP: u16 = LOC_BASE + LOCATIONS as u16;
pub const EOS: u16 = BOP + 1;
pub const MASK: u16 = BOP + 2;
pub const EOM: u16 = BOP + 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TokenError {
    #[error("coordinate ({x}, {y}) outside the {GRID}x{GRID} grid")]
    CoordinateRange { x: u32, y: u32 },
    #[error("location {0} outside 0..{LOCATIONS}")]
    LocationRange(u32),
    #[error("token id {0} outside the SVG vocabulary")]
    UnknownId(u32),
    #[error("grammar violation at token {index}: {reason}")]
    Grammar { index: usize, reason: String },
    #[error("no complete path could be recovered")]
    Empty,
    #[error("malformed token line {line}: {message}")]
    Line { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SvgToken {
    CmdM,
    CmdL,
    CmdC,
    Loc(u16),
    Bop,
    Eos,
    Mask,
    Eom,
}

impl SvgToken {
    pub fn id(self) -> u16 {
        match self {
            SvgToken::CmdM => 0,
            SvgToken::CmdL => 1,
            SvgToken::CmdC => 2,
            SvgToken::Loc(v) => LOC_BASE + v,
            SvgToken::Bop => BOP,
            SvgToken::Eos => EOS,
            SvgToken::Mask => MASK,
            SvgToken::Eom => EOM,
        }
    }

    pub fn from_id(id: u32) -> Result<Self, TokenError> {
        Ok(match id {
            0 => SvgToken::CmdM,
            1 => SvgToken::CmdL,
            2 => SvgToken::CmdC,
            v if v < BOP as u32 => SvgToken::Loc((v - LOC_BASE as u32) as u16),
            v if v == BOP as u32 => SvgToken::Bop,
            v if v == EOS as u32 => SvgToken::Eos,
            v if v == MASK as u32 => SvgToken::Mask,
            v if v == EOM as u32 => SvgToken::Eom,
            v => return Err(TokenError::UnknownId(v)),
        })
    }

    pub fn command(kind: CommandKind) -> Self {
        match kind {
            CommandKind::MoveTo => SvgToken::CmdM,
            CommandKind::LineTo => SvgToken::CmdL,
            CommandKind::CubicBezier => SvgToken::CmdC,
        }
    }
}

/// Is `id` one of the location tokens?
pub fn is_location(id: u16) -> bool {
    (LOC_BASE..BOP).contains(&id)
}

/// Location value carried by a location id.
pub fn location_of(id: u16) -> Option<u16> {
    is_location(id).then(|| id - LOC_BASE)
}

/// Row-major packing `x·w + y` with `w = 100`.
pub fn pack_location(x: u32, y: u32) -> Result<u16, TokenError> {
    if x >= GRID || y >= GRID {
        return Err(TokenError::CoordinateRange { x, y });
    }
    Ok((x * GRID + y) as u16)
}

pub fn unpack_location(v: u32) -> Result<(u32, u32), TokenError> {
    if v >= LOCATIONS {
        return Err(TokenError::LocationRange(v));
    }
    Ok((v / GRID, v % GRID))
}

fn loc_token(p: Point) -> u16 {
    LOC_BASE + pack_location(p.x(), p.y()).expect("grid points are always in range")
}

/// A flat list of SVG vocabulary ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TokenSequence(pub Vec<u16>);

impl std::ops::Deref for TokenSequence {
    type Target = [u16];
    fn deref(&self) -> &[u16] {
        &self.0
    }
}

impl From<Vec<u16>> for TokenSequence {
    fn from(v: Vec<u16>) -> Self {
        TokenSequence(v)
    }
}

/// Tokens for a single path: `<BOP>` followed by its commands.
pub fn encode_path(path: &SvgPath<Point>, out: &mut Vec<u16>) {
    out.push(BOP);
    for cmd in path.commands() {
        out.push(SvgToken::command(cmd.kind()).id());
        out.extend(cmd.points().map(loc_token));
    }
}

/// Paths without the terminating `<EOS>`.
pub fn encode_paths(paths: &[SvgPath<Point>]) -> Vec<u16> {
    let mut out = Vec::new();
    for p in paths {
        encode_path(p, &mut out);
    }
    out
}

pub fn encode_icon(icon: &Icon) -> TokenSequence {
    let mut out = encode_paths(icon.paths());
    out.push(EOS);
    TokenSequence(out)
}

/// Closed-form encoded length: `1 + Σ_paths (1 + Σ_cmds (1 + arity))`.
pub fn encoded_len(icon: &Icon) -> usize {
    1 + icon
        .paths()
        .iter()
        .map(|p| 1 + p.commands().iter().map(|c| 1 + c.kind().arity()).sum::<usize>())
        .sum::<usize>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeMode {
    /// Full grammar conformance, including a single trailing `<EOS>`.
    Strict,
    /// Stop at `<EOS>` or the first violation and keep what is complete.
    Lenient,
}

pub fn decode_icon(tokens: &[u16], mode: DecodeMode) -> Result<Icon, TokenError> {
    let mut paths: Vec<SvgPath<Point>> = Vec::new();
    let mut current: Vec<Command<Point>> = Vec::new();
    let mut in_path = false;
    let mut i = 0;

    let violation = |index: usize, reason: &str| TokenError::Grammar {
        index,
        reason: reason.to_string(),
    };
    let flush = |current: &mut Vec<Command<Point>>, paths: &mut Vec<SvgPath<Point>>| {
        if !current.is_empty() {
            paths.push(SvgPath::new(std::mem::take(current)).expect("paths open with MoveTo"));
        }
    };

    let outcome: Result<(), TokenError> = loop {
        let Some(&id) = tokens.get(i) else {
            break Err(violation(i, "missing <EOS>"));
        };
        let tok = match SvgToken::from_id(id as u32) {
            Ok(t) => t,
            Err(e) => break Err(e),
        };
        match tok {
            SvgToken::Bop => {
                if in_path && current.is_empty() {
                    break Err(violation(i, "path must begin with M"));
                }
                flush(&mut current, &mut paths);
                in_path = true;
                i += 1;
            }
            SvgToken::Eos => {
                if !in_path {
                    break Err(violation(i, "icon has no paths"));
                }
                if current.is_empty() {
                    break Err(violation(i, "path must begin with M"));
                }
                flush(&mut current, &mut paths);
                if mode == DecodeMode::Strict && i + 1 != tokens.len() {
                    break Err(violation(i + 1, "tokens after <EOS>"));
                }
                break Ok(());
            }
            SvgToken::CmdM | SvgToken::CmdL | SvgToken::CmdC => {
                if !in_path {
                    break Err(violation(i, "path must open with <BOP>"));
                }
                if current.is_empty() && tok != SvgToken::CmdM {
                    break Err(violation(i, "path must begin with M"));
                }
                let arity = if tok == SvgToken::CmdC { 3 } else { 1 };
                let mut pts = [Point::new(0, 0).unwrap(); 3];
                let mut bad = None;
                for (k, slot) in pts.iter_mut().enumerate().take(arity) {
                    let at = i + 1 + k;
                    match tokens.get(at).copied().and_then(location_of) {
                        Some(v) => {
                            let (x, y) = unpack_location(v as u32).expect("location id in range");
                            *slot = Point::new(x, y).expect("unpacked location on grid");
                        }
                        None => {
                            bad = Some(violation(
                                at,
                                &format!("{tok:?} expects {arity} locations, got {k}"),
                            ));
                            break;
                        }
                    }
                }
                if let Some(e) = bad {
                    break Err(e);
                }
                current.push(match tok {
                    SvgToken::CmdM => Command::MoveTo(pts[0]),
                    SvgToken::CmdL => Command::LineTo(pts[0]),
                    _ => Command::CubicBezier(pts[0], pts[1], pts[2]),
                });
                i += 1 + arity;
            }
            SvgToken::Loc(_) => break Err(violation(i, "location without a command")),
            SvgToken::Mask | SvgToken::Eom => break Err(violation(i, "mask marker inside an icon")),
        }
    };

    match (outcome, mode) {
        (Ok(()), _) => Icon::new(paths).map_err(|_| TokenError::Empty),
        (Err(e), DecodeMode::Strict) => Err(e),
        (Err(_), DecodeMode::Lenient) => {
            flush(&mut current, &mut paths);
            Icon::new(paths).map_err(|_| TokenError::Empty)
        }
    }
}

/// Writes one sequence per line as whitespace-separated ids.
pub fn write_token_lines<W: Write>(mut w: W, seqs: &[TokenSequence]) -> io::Result<()> {
    for s in seqs {
        let line: Vec<String> = s.iter().map(u16::to_string).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_token_lines<R: BufRead>(r: R) -> Result<Vec<TokenSequence>, TokenError> {
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line.map_err(|e| TokenError::Line {
            line: n + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let ids = line
            .split_whitespace()
            .map(|t| {
                let id: u16 = t.parse().map_err(|_| TokenError::Line {
                    line: n + 1,
                    message: format!("not an id: `{t}`"),
                })?;
                if id as usize >= SVG_VOCAB_SIZE {
                    return Err(TokenError::Line {
                        line: n + 1,
                        message: format!("id {id} outside the vocabulary"),
                    });
                }
                Ok(id)
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(TokenSequence(ids));
    }
    Ok(out)
}
