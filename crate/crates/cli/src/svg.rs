//! Minimal log–log chart: data points, the fitted line and a reference line
//! anchored at the first point.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 60.0;

pub struct Chart<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub points: &'a [(f64, f64)],
    pub reference_slope: f64,
    pub fit: Option<(f64, f64)>,
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// Render to SVG text. Points with a nonpositive coordinate are skipped.
pub fn render(c: &Chart) -> String {
    let pts: Vec<(f64, f64)> =
        c.points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.log10(), y.log10())).collect();
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let fitted = c.fit.map(|(s, _)| s).unwrap_or(f64::NAN);
    let _ = writeln!(
        out,
        r#"<metadata>{{"reference_slope":{},"fitted_slope":{}}}</metadata>"#,
        c.reference_slope,
        if fitted.is_finite() { fitted.to_string() } else { "null".into() }
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, c.title);
    if pts.is_empty() {
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">no positive data</text></svg>"#, W / 2.0, H / 2.0);
        return out;
    }
    let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (x0, x1) = bounds(pts.iter().map(|p| p.0));
    let (px, py) = pts[0];
    ys.push(py + c.reference_slope * (x1 - px));
    ys.push(py + c.reference_slope * (x0 - px));
    let (y0, y1) = bounds(ys.into_iter());
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let _ = writeln!(
        out,
        r#"<path d="M{PAD} {PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    for k in (x0.ceil() as i32)..=(x1.floor() as i32) {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{}" font-size="11" text-anchor="middle">1e{k}</text>"#, sx(k as f64), H - PAD + 16.0);
    }
    for k in (y0.ceil() as i32)..=(y1.floor() as i32) {
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" font-size="11" text-anchor="end">1e{k}</text>"#, PAD - 6.0, sy(k as f64) + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#, W / 2.0, H - 16.0, c.x_label);
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        c.y_label
    );
    let line = |out: &mut String, a: (f64, f64), b: (f64, f64), style: &str, class: &str| {
        let _ = writeln!(
            out,
            r#"<line class="{class}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {style}/>"#,
            sx(a.0),
            sy(a.1),
            sx(b.0),
            sy(b.1)
        );
    };
    line(
        &mut out,
        (x0, py + c.reference_slope * (x0 - px)),
        (x1, py + c.reference_slope * (x1 - px)),
        r#"stroke="gray" stroke-dasharray="6 4""#,
        "reference",
    );
    if let Some((slope, intercept)) = c.fit {
        let ln10 = std::f64::consts::LN_10;
        let at = |x: f64| (intercept + slope * x * ln10) / ln10;
        line(&mut out, (x0, at(x0)), (x1, at(x1)), r#"stroke="steelblue""#, "fit");
    }
    for (x, y) in &pts {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="firebrick"/>"#, sx(*x), sy(*y));
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="end">reference slope {:.4}{}</text>"#,
        W - PAD,
        PAD - 10.0,
        c.reference_slope,
        if fitted.is_finite() { format!(", fitted {fitted:.4}") } else { String::new() }
    );
    out.push_str("</svg>\n");
    out
}
