use proptest::prelude::*;
use scenex_core::ingest::EgoPose;
use scenex_core::road_model::{build_reference_line, lane_interval, Clamp};

/// Ego driving a 200 m circle arc counter-clockwise from the origin.
fn arc_poses(radius: f64) -> Vec<EgoPose> {
    (0..=400)
        .map(|i| {
            let phi = i as f64 * 0.5 / radius;
            EgoPose {
                t: i as f64 * 0.05,
                x: radius * phi.sin(),
                y: radius * (1.0 - phi.cos()),
                heading: phi,
                speed: 10.0,
            }
        })
        .collect()
}

proptest! {
    #[test]
    fn frenet_round_trip_on_an_arc(k in 10usize..380, u in 0.05f64..0.45, t in -8.0f64..8.0) {
        // the corner wedges at 0.5 m vertices are at most |t|·κ·0.25 ≈ 0.013 m wide
        let s = k as f64 * 0.5 + u;
        let line = build_reference_line(&arc_poses(150.0), 0.5, 1.0).unwrap();
        let p = line.from_frenet(s, t);
        let back = line.project(p);
        prop_assert_eq!(back.clamp, Clamp::None);
        prop_assert!((back.pose.s - s).abs() < 1e-6, "s {} -> {}", s, back.pose.s);
        prop_assert!((back.pose.t - t).abs() < 1e-6, "t {} -> {}", t, back.pose.t);
    }

    #[test]
    fn lane_intervals_tile_the_road(w in 2.5f64..4.5, id in -6i32..6) {
        prop_assume!(id != 0);
        let (lo, hi) = lane_interval(id, w);
        prop_assert!((hi - lo - w).abs() < 1e-12);
        // the next lane outward starts where this one ends
        let (next_lo, next_hi) = if id > 0 { lane_interval(id + 1, w) } else { lane_interval(id - 1, w) };
        if id > 0 {
            prop_assert!((next_lo - hi).abs() < 1e-12);
        } else {
            prop_assert!((next_hi - lo).abs() < 1e-12);
        }
    }
}

#[test]
fn chord_length_matches_the_arc() {
    let radius = 150.0;
    let line = build_reference_line(&arc_poses(radius), 0.5, 1.0).unwrap();
    // a 0.5 m chord subtends slightly more than 0.5 m of arc
    let phi = 2.0 * (0.25 / radius).asin();
    let arc_per_chord = phi * radius;
    let covered = (line.vertices().len() - 1) as f64 * arc_per_chord;
    assert!(covered <= 200.0 + 1e-9 && covered > 199.5, "{covered}");
    let mean_k: f64 = line.vertex_curvatures()[2..line.vertices().len() - 2].iter().sum::<f64>()
        / (line.vertices().len() - 4) as f64;
    assert!((mean_k - 1.0 / radius).abs() < 1e-6, "{mean_k}");
}
