use super::{bounding_box, Icon, Point, RawIcon, GRID};

/// Maps the icon's bounding box uniformly into `[0, 99]²`, preserving the
/// aspect ratio and centering the shorter axis, then rounds to the grid.
///
/// The shorter axis' offset is derived from its *rounded* extent, which
/// makes the map idempotent on its own output.
pub fn normalize_and_quantize(icon: &RawIcon) -> Icon {
    let max = (GRID - 1) as f64;
    let (lo, hi) = bounding_box(icon);
    let (w, h) = (hi.x - lo.x, hi.y - lo.y);
    let extent = w.max(h);

    let center = (max / 2.0).round() as u32;
    if !(extent > 0.0) || !extent.is_finite() {
        let c = Point::new(center, center).expect("center lies on the grid");
        return Icon {
            paths: icon.paths().iter().map(|p| p.map(|_| c)).collect(),
        };
    }

    let scaled_w = (w * max / extent).round();
    let scaled_h = (h * max / extent).round();
    let off_x = ((max - scaled_w) / 2.0).round();
    let off_y = ((max - scaled_h) / 2.0).round();
    let quantize = |v: f64, lo: f64, off: f64| -> u32 {
        (((v - lo) * max / extent).round() + off).clamp(0.0, max) as u32
    };
    Icon {
        paths: icon
            .paths()
            .iter()
            .map(|p| {
                p.map(|q| {
                    Point::new(quantize(q.x, lo.x, off_x), quantize(q.y, lo.y, off_y))
                        .expect("clamped onto the grid")
                })
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svg::{Command, PointF, SvgPath};
    use proptest::prelude::*;

    fn raw(points: &[(f64, f64)]) -> RawIcon {
        let mut cmds = vec![Command::MoveTo(PointF::new(points[0].0, points[0].1))];
        cmds.extend(
            points[1..]
                .iter()
                .map(|&(x, y)| Command::LineTo(PointF::new(x, y))),
        );
        Icon::new(vec![SvgPath::new(cmds).unwrap()]).unwrap()
    }

    fn coords(icon: &Icon) -> Vec<(u32, u32)> {
        icon.points().map(|p| (p.x(), p.y())).collect()
    }

    #[test]
    fn full_grid_icon_is_unchanged() {
        let q = normalize_and_quantize(&raw(&[(0.0, 0.0), (99.0, 99.0), (13.0, 57.0)]));
        assert_eq!(coords(&q), vec![(0, 0), (99, 99), (13, 57)]);
    }

    #[test]
    fn single_point_maps_to_center() {
        let q = normalize_and_quantize(&raw(&[(5.0, 5.0)]));
        assert_eq!(coords(&q), vec![(50, 50)]);
    }

    #[test]
    fn wide_box_centers_vertically() {
        // scale 99/200; y extent 49.5 -> 50; offset round(49 / 2) = 25,
        // which agrees with round((99 - 100 * 99 / 200) / 2).
        let q = normalize_and_quantize(&raw(&[(0.0, 0.0), (200.0, 100.0)]));
        assert_eq!(coords(&q), vec![(0, 25), (99, 75)]);
        // Brute-force bbox check.
        let ys: Vec<u32> = q.points().map(|p| p.y()).collect();
        let (lo, hi) = (*ys.iter().min().unwrap(), *ys.iter().max().unwrap());
        assert!((lo as i32 - (99 - hi) as i32).abs() <= 1);
    }

    proptest! {
        #[test]
        fn idempotent(pts in prop::collection::vec((-500.0f64..500.0, -500.0f64..500.0), 1..12)) {
            let once = normalize_and_quantize(&raw(&pts));
            let twice = normalize_and_quantize(&once.to_f64());
            prop_assert_eq!(once, twice);
        }
    }
}
