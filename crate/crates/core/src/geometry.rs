//! Box similarity and distance primitives shared by association,
//! connection, and evaluation.

use crate::mot::BBox;
use crate::scalar::Real;

/// Intersection over union of two boxes, in `[0, 1]`.
///
/// Boxes are closed real rectangles; rectangles that merely touch have
/// intersection area zero and therefore IoU zero.
pub fn iou<T: Real>(a: &BBox<T>, b: &BBox<T>) -> T {
    let ix = a.right().min(b.right()) - a.left.max(b.left);
    let iy = a.bottom().min(b.bottom()) - a.top.max(b.top);
    if ix <= T::zero() || iy <= T::zero() {
        return T::zero();
    }
    let inter = ix * iy;
    inter / (a.area() + b.area() - inter)
}

/// IoU distance `1 - iou`, the association cost used throughout.
pub fn iou_distance<T: Real>(a: &BBox<T>, b: &BBox<T>) -> T {
    T::one() - iou(a, b)
}

/// Euclidean distance between box centers, in pixels.
pub fn center_distance<T: Real>(a: &BBox<T>, b: &BBox<T>) -> T {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    let dx = ax - bx;
    let dy = ay - by;
    (dx * dx + dy * dy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bx(l: f64, t: f64, w: f64, h: f64) -> BBox {
        BBox::new(l, t, w, h)
    }

    /// Independent IoU oracle: counts sample points on a fine grid.
    fn rasterized_iou(a: &BBox<f64>, b: &BBox<f64>, step: f64) -> f64 {
        let lo_x = a.left.min(b.left) - step;
        let hi_x = a.right().max(b.right()) + step;
        let lo_y = a.top.min(b.top) - step;
        let hi_y = a.bottom().max(b.bottom()) + step;
        let inside = |bb: &BBox<f64>, x: f64, y: f64| {
            x >= bb.left && x < bb.right() && y >= bb.top && y < bb.bottom()
        };
        let (mut inter, mut union) = (0u64, 0u64);
        let mut y = lo_y;
        while y < hi_y {
            let mut x = lo_x;
            while x < hi_x {
                let in_a = inside(a, x, y);
                let in_b = inside(b, x, y);
                if in_a && in_b {
                    inter += 1;
                }
                if in_a || in_b {
                    union += 1;
                }
                x += step;
            }
            y += step;
        }
        inter as f64 / union as f64
    }

    #[test]
    fn identical_boxes_have_iou_one() {
        let a = bx(3.5, -2.0, 11.0, 7.0);
        assert_eq!(iou(&a, &a), 1.0);
    }

    #[test]
    fn disjoint_boxes_have_iou_zero() {
        assert_eq!(iou(&bx(0.0, 0.0, 2.0, 2.0), &bx(10.0, 10.0, 2.0, 2.0)), 0.0);
    }

    #[test]
    fn touching_edges_count_as_disjoint() {
        assert_eq!(iou(&bx(0.0, 0.0, 2.0, 2.0), &bx(2.0, 0.0, 2.0, 2.0)), 0.0);
    }

    #[test]
    fn half_overlap_matches_rasterized_oracle() {
        let a = bx(0.0, 0.0, 2.0, 2.0);
        let b = bx(1.0, 0.0, 2.0, 2.0);
        let expected = 1.0 / 3.0;
        assert!((iou(&a, &b) - expected).abs() < 1e-12);
        let oracle = rasterized_iou(&a, &b, 1.0 / 128.0);
        assert!((oracle - expected).abs() < 0.01, "oracle said {oracle}");
    }

    #[test]
    fn center_distance_identical_boxes_is_zero() {
        let a = bx(4.0, 4.0, 3.0, 5.0);
        assert_eq!(center_distance(&a, &a), 0.0);
    }

    #[test]
    fn center_distance_three_four_five() {
        let a = BBox::from_center(0.0, 0.0, 2.0, 2.0);
        let b = BBox::from_center(3.0, 4.0, 2.0, 2.0);
        assert_eq!(center_distance(&a, &b), 5.0);
    }

    #[test]
    fn center_distance_matches_direct_formula() {
        let a = bx(12.5, -3.0, 7.0, 9.0);
        let b = bx(-4.0, 22.0, 5.0, 3.0);
        let (ax, ay) = (12.5_f64 + 3.5, -3.0_f64 + 4.5);
        let (bx_, by) = (-4.0_f64 + 2.5, 22.0_f64 + 1.5);
        let expected = ((ax - bx_) * (ax - bx_) + (ay - by) * (ay - by)).sqrt();
        assert!((center_distance(&a, &b) - expected).abs() < 1e-12);
    }

    #[test]
    fn works_for_f32_scalars() {
        let a = BBox::<f32>::new(0.0, 0.0, 2.0, 2.0);
        let b = BBox::<f32>::new(1.0, 0.0, 2.0, 2.0);
        assert!((iou(&a, &b) - 1.0 / 3.0).abs() < 1e-6);
    }

    fn arb_box() -> impl Strategy<Value = BBox<f64>> {
        (-50.0..50.0, -50.0..50.0, 0.5..30.0, 0.5..30.0).prop_map(|(l, t, w, h)| bx(l, t, w, h))
    }

    proptest! {
        #[test]
        fn iou_is_symmetric(a in arb_box(), b in arb_box()) {
            prop_assert_eq!(iou(&a, &b), iou(&b, &a));
        }

        #[test]
        fn center_distance_is_symmetric(a in arb_box(), b in arb_box()) {
            prop_assert_eq!(center_distance(&a, &b), center_distance(&b, &a));
        }

        #[test]
        fn iou_in_unit_interval(a in arb_box(), b in arb_box()) {
            let v = iou(&a, &b);
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn iou_scale_invariant(a in arb_box(), b in arb_box(), s in 0.1..20.0f64) {
            let scale = |bb: &BBox<f64>| bx(bb.left * s, bb.top * s, bb.width * s, bb.height * s);
            prop_assert!((iou(&a, &b) - iou(&scale(&a), &scale(&b))).abs() < 1e-12);
        }

        #[test]
        fn iou_translation_invariant(a in arb_box(), b in arb_box(), dx in -100.0..100.0f64, dy in -100.0..100.0f64) {
            let shift = |bb: &BBox<f64>| bx(bb.left + dx, bb.top + dy, bb.width, bb.height);
            prop_assert!((iou(&a, &b) - iou(&shift(&a), &shift(&b))).abs() < 1e-9);
        }

        #[test]
        fn center_distance_invariant_under_common_shift(a in arb_box(), b in arb_box(), dx in -100.0..100.0f64, dy in -100.0..100.0f64) {
            let shift = |bb: &BBox<f64>| bx(bb.left + dx, bb.top + dy, bb.width, bb.height);
            prop_assert!((center_distance(&a, &b) - center_distance(&shift(&a), &shift(&b))).abs() < 1e-9);
        }

        #[test]
        fn iou_one_only_for_equal_boxes(a in arb_box(), b in arb_box()) {
            if iou(&a, &b) == 1.0 {
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn iou_matches_rasterized_oracle_on_overlapping_pairs() {
        let pairs = [
            (bx(0.0, 0.0, 8.0, 8.0), bx(4.0, 0.0, 8.0, 8.0)),
            (bx(1.0, 2.0, 10.0, 6.0), bx(5.0, 4.0, 7.0, 9.0)),
            (bx(-3.0, -3.0, 6.0, 6.0), bx(-1.0, -2.0, 3.0, 8.0)),
            (bx(0.25, 0.75, 5.5, 4.25), bx(2.0, 1.0, 5.5, 4.25)),
        ];
        for (a, b) in pairs {
            let oracle = rasterized_iou(&a, &b, 1.0 / 64.0);
            let exact = iou(&a, &b);
            assert!((exact - oracle).abs() < 5e-3, "iou {exact} vs raster {oracle}");
        }
    }
}
