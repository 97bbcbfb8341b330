//! Intermediate geometry for inspection: lane lines and lanelets as GeoJSON in
//! odom coordinates, road sections as CSV.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use scenex_core::pipeline::Extraction;
use scenex_core::Vec2;
use serde_json::{json, Value};

use crate::fsutil::write_atomic;

fn coords(points: &[Vec2]) -> Value {
    Value::Array(points.iter().map(|p| json!([p.x, p.y])).collect())
}

fn feature(geometry: Value, properties: Value) -> Value {
    json!({ "type": "Feature", "geometry": geometry, "properties": properties })
}

pub fn lanes_geojson(ex: &Extraction) -> Value {
    let mut features = Vec::new();
    for (i, lane) in ex.lanes.lanes.iter().enumerate() {
        features.push(feature(
            json!({ "type": "LineString", "coordinates": coords(&lane.polyline()) }),
            json!({ "kind": "lane_line", "index": i, "segments": lane.segments.len() }),
        ));
    }
    for section in &ex.lanelet_map.sections {
        for (k, ls) in section.linestrings.iter().enumerate() {
            features.push(feature(
                json!({ "type": "LineString", "coordinates": coords(&ls.points) }),
                json!({ "kind": "linestring", "section": section.index, "index": k, "interpolated": ls.interpolated }),
            ));
        }
        for (k, ll) in section.lanelets.iter().enumerate() {
            let right = &section.linestrings[ll.right].points;
            let left = &section.linestrings[ll.left].points;
            let mut ring: Vec<Vec2> = right.iter().copied().chain(left.iter().rev().copied()).collect();
            if let Some(&first) = ring.first() {
                ring.push(first);
            }
            features.push(feature(
                json!({ "type": "Polygon", "coordinates": [coords(&ring)] }),
                json!({ "kind": "lanelet", "section": section.index, "index": k }),
            ));
        }
    }
    json!({ "type": "FeatureCollection", "features": features })
}

pub fn sections_csv(ex: &Extraction) -> String {
    let mut out = String::from("index,s_dist,length,width,no_of_lanes,lanes_left,lanes_right,curvature,curvature_diff,degenerate\n");
    for s in &ex.road.sections {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.index, s.s_dist, s.length, s.width, s.no_of_lanes, s.lanes_left, s.lanes_right, s.curvature, s.curvature_diff, s.degenerate
        );
    }
    out
}

/// Writes `<stem>_lanes.geojson` and `<stem>_sections.csv`.
pub fn write_debug(dir: &Path, stem: &str, ex: &Extraction) -> std::io::Result<Vec<PathBuf>> {
    let geo = dir.join(format!("{stem}_lanes.geojson"));
    let csv = dir.join(format!("{stem}_sections.csv"));
    write_atomic(&geo, serde_json::to_string(&lanes_geojson(ex)).expect("geojson serializes").as_bytes())?;
    write_atomic(&csv, sections_csv(ex).as_bytes())?;
    Ok(vec![geo, csv])
}
