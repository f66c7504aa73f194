//! Procedurally generated, labelled icons for desk-scale experiments.

use super::Record;
use crate::svg::{ellipse_commands, normalize_and_quantize, rect_commands, Affine, Command, Icon, PointF, SvgPath};
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Square,
    Circle,
    Triangle,
    Arrow,
    Plus,
    Ring,
    House,
    LetterL,
    LetterT,
    LetterH,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Square,
        Family::Circle,
        Family::Triangle,
        Family::Arrow,
        Family::Plus,
        Family::Ring,
        Family::House,
        Family::LetterL,
        Family::LetterT,
        Family::LetterH,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Square => "square",
            Family::Circle => "circle",
            Family::Triangle => "triangle",
            Family::Arrow => "arrow",
            Family::Plus => "plus",
            Family::Ring => "ring",
            Family::House => "house",
            Family::LetterL => "letter-l",
            Family::LetterT => "letter-t",
            Family::LetterH => "letter-h",
        }
    }

    pub fn from_name(name: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    /// Families are assigned round-robin, so counts stay balanced.
    pub families: Vec<Family>,
    /// Inclusive range of small decorative shapes appended as extra paths.
    pub min_extra: usize,
    pub max_extra: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            families: Family::ALL.to_vec(),
            min_extra: 0,
            max_extra: 1,
        }
    }
}

type Paths = Vec<SvgPath<PointF>>;

fn p(x: f64, y: f64) -> PointF {
    PointF::new(x, y)
}

fn polygon(points: &[PointF]) -> SvgPath<PointF> {
    let mut cmds = vec![Command::MoveTo(points[0])];
    cmds.extend(points[1..].iter().map(|&q| Command::LineTo(q)));
    cmds.push(Command::LineTo(points[0]));
    SvgPath::new(cmds).expect("polygon opens with a move")
}

fn path(cmds: Vec<Command<PointF>>) -> SvgPath<PointF> {
    SvgPath::new(cmds).expect("shape opens with a move")
}

/// Reverses the direction of a single closed subpath.
fn reversed(cmds: &[Command<PointF>]) -> Vec<Command<PointF>> {
    let ends: Vec<PointF> = cmds.iter().map(|c| c.end_point()).collect();
    let mut out = vec![Command::MoveTo(*ends.last().unwrap())];
    for i in (1..cmds.len()).rev() {
        let prev = ends[i - 1];
        out.push(match cmds[i] {
            Command::CubicBezier(c1, c2, _) => Command::CubicBezier(c2, c1, prev),
            _ => Command::LineTo(prev),
        });
    }
    out
}

fn square<R: Rng + ?Sized>(rng: &mut R) -> (Paths, Vec<String>, String) {
    let w = rng.gen_range(40.0..80.0);
    let h = w * rng.gen_range(0.85..1.15);
    (
        vec![path(rect_commands(50.0 - w / 2.0, 50.0 - h / 2.0, w, h))],
        vec!["square".into(), "box".into()],
        "a simple square box".into(),
    )
}

fn circle<R: Rng + ?Sized>(rng: &mut R) -> (Paths, Vec<String>, String) {
    let r = rng.gen_range(20.0..45.0);
    (
        vec![path(ellipse_commands(50.0, 50.0, r, r))],
        vec!["circle".into(), "round".into()],
        "a round circle".into(),
    )
}

fn triangle<R: Rng + ?Sized>(rng: &mut R) -> (Paths, Vec<String>, String) {
    let pts = [
        p(rng.gen_range(10.0..30.0), 80.0),
        p(rng.gen_range(70.0..90.0), 80.0),
        p(rng.gen_range(35.0..65.0), rng.gen_range(15.0..30.0)),
    ];
    (
        vec![polygon(&pts)],
        vec!["triangle".into(), "pointy".into()],
        "a pointy triangle".into(),
    )
}

fn arrow<R: Rng + ?Sized>(rng: &mut R) -> (Paths, Vec<String>, String) {
    let t = rng.gen_range(10.0..24.0) / 2.0;
    let sx = rng.gen_range(50.0..65.0);
    let hh = rng.gen_range(22.0..35.0);
    let quarter = rng.gen_range(0..4);
    let rot = Affine::parse(&format!("rotate({} 50 50)", quarter * 90)).expect("valid transform");
    let pts: Vec<PointF> = [
        p(15.0, 50.0 - t),
        p(sx, 50.0 - t),
        p(sx, 50.0 - hh),
        p(85.0, 50.0),
        p(sx, 50.0 + hh),
        p(sx, 50.0 + t),
        p(15.0, 50.0 + t),
    ]
    .iter()
    .map(|&q| rot.apply(q))
    .collect();
    let dir = ["right", "down", "left", "up"][quarter];
    (
        vec![polygon(&pts)],
        vec!["arrow".into(), dir.into()],
        format!("an arrow pointing {dir}"),
    )
}

fn plus<R: Rng + ?Sized>(rng: &mut R) -> (Paths, Vec<String>, String) {
    let t = rng.gen_range(8.0..16.0);
    let l = rng.gen_range(30.0..42.0);
    let (a, b, c, d) = (50.0 - l, 50.0 - t, 50.0 + t, 50.0 + l);
    let pts = [
        p(b, a),
        p(c, a),
        p(c, b),
        p(d, b),
        p(d, c),
        p(c, c),
        p(c, d),
        p(b, d),
        p(b, c),
        p(a, c),
        p(a, b),
        p(b, b),
    ];
    (
        vec![polygon(&pts)],
        vec!["plus".into(), "add".into()],
        "a plus sign for adding".into(),
    )
}

fn ring<R: Rng + ?Sized>(rng: &mut R) -> (Paths, Vec<String>, String) {
    let r = rng.gen_range(30.0..45.0);
    let inner = r * rng.gen_range(0.4..0.75);
    let mut cmds = ellipse_commands(50.0, 50.0, r, r);
    cmds.extend(reversed(&ellipse_commands(50.0, 50.0, inner, inner)));
    (
        vec![path(cmds)],
        vec!["ring".into(), "donut".into()],
        "a ring shaped like a donut".into(),
    )
}

fn house<R: Rng + ?Sized>(rng: &mut R) -> (Paths, Vec<String>, String) {
    let w = rng.gen_range(40.0..60.0);
    let hb = rng.gen_range(30.0..45.0);
    let hr = rng.gen_range(20.0..35.0);
    let ov = rng.gen_range(0.0..8.0);
    let (x0, bottom) = (50.0 - w / 2.0, 88.0);
    let top = bottom - hb;
    let body = path(rect_commands(x0, top, w, hb));
    let roof = polygon(&[p(x0 - ov, top), p(x0 + w + ov, top), p(50.0, top - hr)]);
    let dw = rng.gen_range(8.0..14.0);
    let dh = rng.gen_range(15.0..hb - 5.0);
    let dx = rng.gen_range(x0 + 3.0..x0 + w - dw - 3.0);
    let door = path(reversed(&rect_commands(dx, bottom - dh, dw, dh)));
    (
        vec![body, roof, door],
        vec!["house".into(), "home".into()],
        "a small house with a roof and a door".into(),
    )
}

fn letter<R: Rng + ?Sized>(rng: &mut R, which: char) -> (Paths, Vec<String>, String) {
    let t = rng.gen_range(10.0..20.0);
    let w = rng.gen_range(40.0..60.0);
    let (l, r, top, bot) = (50.0 - w / 2.0, 50.0 + w / 2.0, 15.0, 85.0);
    let pts: Vec<PointF> = match which {
        'l' => vec![p(l, top), p(l + t, top), p(l + t, bot - t), p(r, bot - t), p(r, bot), p(l, bot)],
        't' => {
            let (a, b) = (50.0 - t / 2.0, 50.0 + t / 2.0);
            vec![p(l, top), p(r, top), p(r, top + t), p(b, top + t), p(b, bot), p(a, bot), p(a, top + t), p(l, top + t)]
        }
        _ => {
            let (m0, m1) = (50.0 - t / 2.0, 50.0 + t / 2.0);
            vec![
                p(l, top),
                p(l + t, top),
                p(l + t, m0),
                p(r - t, m0),
                p(r - t, top),
                p(r, top),
                p(r, bot),
                p(r - t, bot),
                p(r - t, m1),
                p(l + t, m1),
                p(l + t, bot),
                p(l, bot),
            ]
        }
    };
    (
        vec![polygon(&pts)],
        vec!["letter".into(), which.to_string()],
        format!("the letter {}", which.to_ascii_uppercase()),
    )
}

fn decoration<R: Rng + ?Sized>(rng: &mut R) -> SvgPath<PointF> {
    let (cx, cy) = (rng.gen_range(8.0..92.0), rng.gen_range(8.0..92.0));
    match rng.gen_range(0..3) {
        0 => {
            let r = rng.gen_range(3.0..7.0);
            path(ellipse_commands(cx, cy, r, r))
        }
        1 => {
            let s = rng.gen_range(6.0..12.0);
            path(rect_commands(cx - s / 2.0, cy - s / 2.0, s, s))
        }
        _ => {
            let s = rng.gen_range(6.0..12.0);
            polygon(&[p(cx - s / 2.0, cy + s / 2.0), p(cx + s / 2.0, cy + s / 2.0), p(cx, cy - s / 2.0)])
        }
    }
}

pub fn generate_family<R: Rng + ?Sized>(family: Family, rng: &mut R) -> (Paths, Vec<String>, String) {
    match family {
        Family::Square => square(rng),
        Family::Circle => circle(rng),
        Family::Triangle => triangle(rng),
        Family::Arrow => arrow(rng),
        Family::Plus => plus(rng),
        Family::Ring => ring(rng),
        Family::House => house(rng),
        Family::LetterL => letter(rng, 'l'),
        Family::LetterT => letter(rng, 't'),
        Family::LetterH => letter(rng, 'h'),
    }
}

/// Generates `n` quantized, labelled icons. Deterministic for a given rng
/// state.
pub fn synth_corpus<R: Rng + ?Sized>(n: usize, rng: &mut R, config: &SynthConfig) -> Vec<Record> {
    assert!(!config.families.is_empty(), "at least one family");
    assert!(config.min_extra <= config.max_extra);
    (0..n)
        .map(|i| {
            let family = config.families[i % config.families.len()];
            let (mut paths, keywords, phrase) = generate_family(family, rng);
            let extras = rng.gen_range(config.min_extra..=config.max_extra);
            paths.extend((0..extras).map(|_| decoration(rng)));
            let raw = Icon::new(paths).expect("families produce at least one path");
            Record {
                name: format!("synth_{i:05}_{}.svg", family.name()),
                icon: normalize_and_quantize(&raw),
                keywords,
                phrase: Some(phrase),
            }
        })
        .collect()
}
