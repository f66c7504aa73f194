use super::{Command, Icon};
use std::fmt::Write;

/// Emits canonical SVG: `viewBox="0 0 100 100"`, one `<path>` per icon
/// path, absolute integer M/L/C only, single spaces between tokens.
pub fn serialize_svg(icon: &Icon) -> String {
    let mut out = format!(
        r#"<svg viewBox="0 0 {} {}">"#,
        icon.width(),
        icon.height()
    );
    for path in icon.paths() {
        out.push_str(r#"<path d=""#);
        for (i, cmd) in path.commands().iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push(match cmd {
                Command::MoveTo(_) => 'M',
                Command::LineTo(_) => 'L',
                Command::CubicBezier(..) => 'C',
            });
            for p in cmd.points() {
                let _ = write!(out, " {} {}", p.x(), p.y());
            }
        }
        out.push_str(r#"" fill="black"/>"#);
    }
    out.push_str("</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svg::{parse_svg, Point, SvgPath};
    use proptest::prelude::*;

    fn pt(x: u32, y: u32) -> Point {
        Point::new(x, y).unwrap()
    }

    #[test]
    fn emits_canonical_form() {
        let icon = Icon::new(vec![SvgPath::new(vec![
            Command::MoveTo(pt(20, 10)),
            Command::LineTo(pt(30, 10)),
        ])
        .unwrap()])
        .unwrap();
        assert_eq!(
            serialize_svg(&icon),
            r#"<svg viewBox="0 0 100 100"><path d="M 20 10 L 30 10" fill="black"/></svg>"#
        );
    }

    fn arb_point() -> impl Strategy<Value = Point> {
        (0u32..100, 0u32..100).prop_map(|(x, y)| pt(x, y))
    }

    pub(crate) fn arb_icon() -> impl Strategy<Value = Icon> {
        let cmd = prop_oneof![
            arb_point().prop_map(Command::MoveTo),
            arb_point().prop_map(Command::LineTo),
            (arb_point(), arb_point(), arb_point()).prop_map(|(a, b, c)| Command::CubicBezier(a, b, c)),
        ];
        let path = (arb_point(), prop::collection::vec(cmd, 0..8)).prop_map(|(m, rest)| {
            let mut cmds = vec![Command::MoveTo(m)];
            cmds.extend(rest);
            SvgPath::new(cmds).unwrap()
        });
        prop::collection::vec(path, 1..5).prop_map(|p| Icon::new(p).unwrap())
    }

    proptest! {
        #[test]
        fn parse_inverts_serialize(icon in arb_icon()) {
            let back = parse_svg(&serialize_svg(&icon)).unwrap().to_grid_exact().unwrap();
            prop_assert_eq!(back, icon);
        }
    }
}
