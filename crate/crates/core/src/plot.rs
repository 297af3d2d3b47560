//! Minimal SVG output for learning curves and world maps.
//!
//! The writers emit plain SVG 1.1 with no external dependencies so the
//! files render identically everywhere. All numbers are formatted with two
//! decimal places, which keeps the output stable across runs.

use crate::geometry::WorldMap;
use crate::harness::RunLog;
use crate::vehicle::RobotPose;

/// Default smoothing window (in episodes) for learning-curve plots.
pub const DEFAULT_SMOOTHING_WINDOW: u32 = 100;

const CHART_WIDTH: f64 = 900.0;
const CHART_HEIGHT: f64 = 540.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;

/// One polyline on a chart.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub color: String,
    pub values: Vec<f64>,
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Picks a step size so that roughly `target` ticks cover `span`.
fn tick_step(span: f64, target: usize) -> f64 {
    assert!(span > 0.0 && target >= 1);
    let raw = span / target as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    let residual = raw / magnitude;
    let step = if residual <= 1.0 {
        1.0
    } else if residual <= 2.0 {
        2.0
    } else if residual <= 5.0 {
        5.0
    } else {
        10.0
    };
    step * magnitude
}

fn axis_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let step = tick_step(hi - lo, target);
    let mut ticks = Vec::new();
    let mut t = (lo / step).ceil() * step;
    while t <= hi + step * 1e-9 {
        // Snap values like -0.0 and 1.0000000000000002 onto the grid.
        ticks.push((t / step).round() * step);
        t += step;
    }
    ticks
}

/// Renders one or more series over a shared x axis of sample indices.
/// Returns a complete standalone SVG document.
pub fn series_chart_svg(series: &[Series], x_label: &str, y_label: &str) -> String {
    assert!(!series.is_empty(), "chart needs at least one series");
    let n = series.iter().map(|s| s.values.len()).max().unwrap();
    assert!(n >= 1, "chart needs at least one sample");
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &v in &s.values {
            y_min = y_min.min(v);
            y_max = y_max.max(v);
        }
    }
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let x_max = (n - 1).max(1) as f64;
    let plot_w = CHART_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = CHART_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + x / x_max * plot_w;
    let py = |y: f64| MARGIN_TOP + (y_max - y) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{CHART_WIDTH}\" \
         height=\"{CHART_HEIGHT}\" viewBox=\"0 0 {CHART_WIDTH} {CHART_HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{CHART_WIDTH}\" height=\"{CHART_HEIGHT}\" \
         fill=\"white\"/>\n"
    ));

    // Gridlines and tick labels.
    for t in axis_ticks(0.0, x_max, 8) {
        let x = px(t);
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>\n",
            fmt(x),
            fmt(MARGIN_TOP),
            fmt(x),
            fmt(MARGIN_TOP + plot_h)
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            fmt(x),
            fmt(MARGIN_TOP + plot_h + 18.0),
            t.round() as i64
        ));
    }
    for t in axis_ticks(y_min, y_max, 6) {
        let y = py(t);
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#dddddd\"/>\n",
            fmt(MARGIN_LEFT),
            fmt(y),
            fmt(MARGIN_LEFT + plot_w),
            fmt(y)
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            fmt(MARGIN_LEFT - 6.0),
            fmt(y + 4.0),
            t.round() as i64
        ));
    }

    // Axes.
    svg.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(MARGIN_TOP),
        fmt(MARGIN_LEFT),
        fmt(MARGIN_TOP + plot_h)
    ));
    svg.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(MARGIN_TOP + plot_h),
        fmt(MARGIN_LEFT + plot_w),
        fmt(MARGIN_TOP + plot_h)
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        fmt(MARGIN_LEFT + plot_w / 2.0),
        fmt(CHART_HEIGHT - 10.0),
        x_label
    ));
    svg.push_str(&format!(
        "  <text x=\"16\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {})\">{}</text>\n",
        fmt(MARGIN_TOP + plot_h / 2.0),
        fmt(MARGIN_TOP + plot_h / 2.0),
        y_label
    ));

    // Series polylines and legend.
    for (i, s) in series.iter().enumerate() {
        if !s.values.is_empty() {
            let points: Vec<String> = s
                .values
                .iter()
                .enumerate()
                .map(|(j, &v)| format!("{},{}", fmt(px(j as f64)), fmt(py(v))))
                .collect();
            svg.push_str(&format!(
                "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                s.color,
                points.join(" ")
            ));
        }
        let ly = MARGIN_TOP + 16.0 + 18.0 * i as f64;
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"3\"/>\n",
            fmt(MARGIN_LEFT + plot_w - 150.0),
            fmt(ly),
            fmt(MARGIN_LEFT + plot_w - 120.0),
            fmt(ly),
            s.color
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
            fmt(MARGIN_LEFT + plot_w - 112.0),
            fmt(ly + 4.0),
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Learning curve for one run: per-episode cumulative reward plus its
/// moving average over `window` episodes.
pub fn learning_curve_svg(log: &RunLog, window: u32) -> String {
    let raw: Vec<f64> = log.episodes.iter().map(|e| e.cumulative_reward).collect();
    let smoothed = crate::harness::moving_average(log, window);
    series_chart_svg(
        &[
            Series {
                label: "per episode".to_string(),
                color: "#99b3e6".to_string(),
                values: raw,
            },
            Series {
                label: format!("mean of {window}"),
                color: "#cc2222".to_string(),
                values: smoothed,
            },
        ],
        "episode",
        "cumulated reward",
    )
}

/// Renders the world's walls to scale, marking the start pose with a circle
/// and a heading tick. `trajectory` (if given) is drawn as a green path.
/// World y points up, so the vertical axis is flipped into screen space.
pub fn world_svg(world: &WorldMap, trajectory: Option<&[RobotPose]>) -> String {
    let (lo, hi) = world.bounds();
    let pad = 0.5;
    let scale = 60.0;
    let width = (hi.x - lo.x + 2.0 * pad) * scale;
    let height = (hi.y - lo.y + 2.0 * pad) * scale;
    let sx = |x: f64| (x - lo.x + pad) * scale;
    let sy = |y: f64| (hi.y - y + pad) * scale;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {} {}\">\n",
        fmt(width),
        fmt(height),
        fmt(width),
        fmt(height)
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        fmt(width),
        fmt(height)
    ));
    for seg in world.segments() {
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" \
             stroke-width=\"3\" stroke-linecap=\"round\"/>\n",
            fmt(sx(seg.a().x)),
            fmt(sy(seg.a().y)),
            fmt(sx(seg.b().x)),
            fmt(sy(seg.b().y))
        ));
    }
    if let Some(path) = trajectory {
        if path.len() >= 2 {
            let points: Vec<String> = path
                .iter()
                .map(|p| format!("{},{}", fmt(sx(p.x)), fmt(sy(p.y))))
                .collect();
            svg.push_str(&format!(
                "  <polyline fill=\"none\" stroke=\"#22aa44\" stroke-width=\"2\" \
                 points=\"{}\"/>\n",
                points.join(" ")
            ));
        }
    }
    let start = world.start();
    let heading = 0.4;
    svg.push_str(&format!(
        "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#2244cc\" \
         stroke-width=\"2\"/>\n",
        fmt(sx(start.x)),
        fmt(sy(start.y)),
        fmt(0.21 * scale)
    ));
    svg.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#2244cc\" \
         stroke-width=\"2\"/>\n",
        fmt(sx(start.x)),
        fmt(sy(start.y)),
        fmt(sx(start.x + heading * start.theta.cos())),
        fmt(sy(start.y + heading * start.theta.sin()))
    ));
    svg.push_str("</svg>\n");
    svg
}
