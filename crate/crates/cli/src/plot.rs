//! Trajectory rendering: SVG polylines colored per id, plus a per-frame
//! center CSV. Coordinates are arena pixels, y pointing down, exactly as in
//! the track files.

use shoaltrack_core::mot::Sequence;

/// Deterministic per-id color: ids step around the hue wheel by the golden
/// angle at fixed saturation and lightness.
pub fn id_color(id: u32) -> String {
    let hue = (id as f64 * 137.508) % 360.0;
    let (r, g, b) = hsl_to_rgb(hue, 0.65, 0.45);
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn hsl_to_rgb(h: f64, s: f64, l: f64) -> (u8, u8, u8) {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let to = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    (to(r), to(g), to(b))
}

/// Renders every track as one polyline through its box centers.
pub fn render_svg(seq: &Sequence<f64>) -> String {
    let w = seq.info.image_width;
    let h = seq.info.image_height;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    );
    if let Ok(tracks) = seq.tracks() {
        for track in tracks {
            let points: Vec<String> = track
                .points
                .iter()
                .map(|p| {
                    let (cx, cy) = p.bbox.center();
                    format!("{cx:.2},{cy:.2}")
                })
                .collect();
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"3\" points=\"{}\"/>\n",
                id_color(track.id),
                points.join(" ")
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Per-frame box centers as CSV, rows sorted by `(frame, id)`.
pub fn centers_csv(seq: &Sequence<f64>) -> String {
    let mut rows: Vec<(u32, u32, f64, f64)> = Vec::new();
    if let Ok(tracks) = seq.tracks() {
        for track in tracks {
            for p in &track.points {
                let (cx, cy) = p.bbox.center();
                rows.push((p.frame, track.id, cx, cy));
            }
        }
    }
    rows.sort_by_key(|a| (a.0, a.1));
    let mut out = String::from("frame,id,cx,cy\n");
    for (frame, id, cx, cy) in rows {
        out.push_str(&format!("{frame},{id},{cx:.6},{cy:.6}\n"));
    }
    out
}
