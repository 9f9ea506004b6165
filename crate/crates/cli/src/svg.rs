//! Minimal static SVG emitters. Layout is best-effort; the numbers behind
//! the plots live in the CSV/JSON outputs.

use icegsa_core::{BoxplotStats, FeatureSensitivity, IceEnsemble};
use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 480.0;
const ML: f64 = 60.0; // margins
const MR: f64 = 20.0;
const MT: f64 = 36.0;
const MB: f64 = 46.0;

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        xml_escape(title)
    )
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Scale {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Scale {
    fn px(&self, x: f64) -> f64 {
        ML + (x - self.x0) / (self.x1 - self.x0) * (W - ML - MR)
    }

    fn py(&self, y: f64) -> f64 {
        H - MB - (y - self.y0) / (self.y1 - self.y0) * (H - MT - MB)
    }
}

fn axes(out: &mut String, s: &Scale, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        "<line x1=\"{ML}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
         <line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR,
        H - MB,
        H - MB
    );
    for (v, px) in [(s.x0, ML), (s.x1, W - MR)] {
        let _ = write!(
            out,
            "<text x=\"{px:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{v:.3}</text>\n",
            H - MB + 16.0
        );
    }
    for (v, py) in [(s.y0, H - MB), (s.y1, MT)] {
        let _ = write!(
            out,
            "<text x=\"{:.1}\" y=\"{py:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{v:.3}</text>\n",
            ML - 6.0
        );
    }
    let _ = write!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\">{}</text>\n\
         <text x=\"14\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
         text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">{}</text>\n",
        (ML + W - MR) / 2.0,
        H - 10.0,
        xml_escape(x_label),
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0,
        xml_escape(y_label)
    );
}

/// Blue-to-red gradient for a value in [0, 1].
fn color_of(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let r = (40.0 + 200.0 * t) as u8;
    let g = (70.0 + 40.0 * (1.0 - (2.0 * t - 1.0).abs())) as u8;
    let b = (220.0 - 180.0 * t) as u8;
    format!("rgb({r},{g},{b})")
}

/// Anchored PDP/ICE panel: a subset of ICE curves colored by a complement
/// feature, PDP in black.
pub fn pdp_ice_svg(
    ens: &IceEnsemble,
    feature_name: &str,
    color_values: &[f64],
    color_name: &str,
    max_curves: usize,
) -> String {
    let curves = ens.curves();
    let pdp = ens.pdp();
    let grid = &ens.grid.values;
    let n = curves.nrows();
    let shown: Vec<usize> = if n <= max_curves {
        (0..n).collect()
    } else {
        (0..max_curves).map(|i| i * n / max_curves).collect()
    };

    let (mut lo, mut hi) = (f64::MAX, f64::MIN);
    for &i in &shown {
        for v in curves.row(i) {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    for v in pdp.iter() {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if lo == hi {
        lo -= 1.0;
        hi += 1.0;
    }
    let s = Scale { x0: grid[0], x1: *grid.last().unwrap(), y0: lo, y1: hi };

    let (mut cmin, mut cmax) = (f64::MAX, f64::MIN);
    for v in color_values {
        cmin = cmin.min(*v);
        cmax = cmax.max(*v);
    }
    let cspan = if cmax > cmin { cmax - cmin } else { 1.0 };

    let mut out = header(&format!(
        "anchored PDP / ICE: {feature_name} (curves colored by {color_name})"
    ));
    for &i in &shown {
        let mut pts = String::new();
        for (k, g) in grid.iter().enumerate() {
            let _ = write!(pts, "{:.2},{:.2} ", s.px(*g), s.py(curves[[i, k]]));
        }
        let c = color_of((color_values[i] - cmin) / cspan);
        let _ = write!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{c}\" stroke-width=\"0.7\" \
             opacity=\"0.45\"/>\n",
            pts.trim_end()
        );
    }
    let mut pts = String::new();
    for (k, g) in grid.iter().enumerate() {
        let _ = write!(pts, "{:.2},{:.2} ", s.px(*g), s.py(pdp[k]));
    }
    let _ = write!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2.5\"/>\n",
        pts.trim_end()
    );
    axes(&mut out, &s, feature_name, "anchored response");
    out.push_str("</svg>\n");
    out
}

/// Grouped importance bars: I_pdp, mu_ice with +-sigma_ice whiskers, and the
/// averaged |SHAP|.
pub fn importance_bar_svg(features: &[FeatureSensitivity]) -> String {
    let m = features.len();
    let mut ymax = 0.0f64;
    for f in features {
        ymax = ymax.max(f.i_pdp).max(f.mu_ice + f.sigma_ice).max(f.sh_bar);
    }
    if ymax <= 0.0 {
        ymax = 1.0;
    }
    let s = Scale { x0: 0.0, x1: m as f64, y0: 0.0, y1: ymax * 1.08 };
    let mut out = header("feature importance: I_pdp, mu_ice (+- sigma_ice), mean |SHAP|");
    let colors = ["#4878d0", "#ee854a", "#6acc64"];
    let group_w = (W - ML - MR) / m as f64;
    let bar_w = group_w / 4.0;
    for (j, f) in features.iter().enumerate() {
        let base = ML + j as f64 * group_w + bar_w / 2.0;
        for (b, v) in [f.i_pdp, f.mu_ice, f.sh_bar].iter().enumerate() {
            let x = base + b as f64 * bar_w;
            let y = s.py(*v);
            let _ = write!(
                out,
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{bar_w:.1}\" height=\"{:.1}\" \
                 fill=\"{}\"/>\n",
                (H - MB) - y,
                colors[b]
            );
            if b == 1 && f.sigma_ice > 0.0 {
                let cx = x + bar_w / 2.0;
                let y_hi = s.py(f.mu_ice + f.sigma_ice);
                let y_lo = s.py((f.mu_ice - f.sigma_ice).max(0.0));
                let _ = write!(
                    out,
                    "<line x1=\"{cx:.1}\" y1=\"{y_hi:.1}\" x2=\"{cx:.1}\" y2=\"{y_lo:.1}\" \
                     stroke=\"black\" stroke-width=\"1.2\"/>\n\
                     <line x1=\"{:.1}\" y1=\"{y_hi:.1}\" x2=\"{:.1}\" y2=\"{y_hi:.1}\" \
                     stroke=\"black\"/>\n\
                     <line x1=\"{:.1}\" y1=\"{y_lo:.1}\" x2=\"{:.1}\" y2=\"{y_lo:.1}\" \
                     stroke=\"black\"/>\n",
                    cx - 4.0,
                    cx + 4.0,
                    cx - 4.0,
                    cx + 4.0
                );
            }
        }
        let _ = write!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"middle\">{}</text>\n",
            base + 1.5 * bar_w,
            H - MB + 16.0,
            xml_escape(&f.name)
        );
    }
    let _ = write!(
        out,
        "<line x1=\"{ML}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
         <line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
         <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"end\">{:.3}</text>\n",
        H - MB,
        W - MR,
        H - MB,
        H - MB,
        ML - 6.0,
        MT + 4.0,
        ymax * 1.08
    );
    out.push_str("</svg>\n");
    out
}

/// m x m heatmap with cell annotations.
pub fn heatmap_svg(values: &[Vec<f64>], names: &[String], title: &str) -> String {
    let m = values.len();
    let mut vmax = 0.0f64;
    for row in values {
        for v in row {
            vmax = vmax.max(v.abs());
        }
    }
    if vmax == 0.0 {
        vmax = 1.0;
    }
    let cell = ((W - ML - MR) / m as f64).min((H - MT - MB) / m as f64);
    let mut out = header(title);
    for (i, row) in values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let x = ML + j as f64 * cell;
            let y = MT + i as f64 * cell;
            let _ = write!(
                out,
                "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{cell:.1}\" height=\"{cell:.1}\" \
                 fill=\"{}\" stroke=\"white\"/>\n\
                 <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
                 text-anchor=\"middle\" fill=\"{}\">{:.3}</text>\n",
                color_of(v.abs() / vmax),
                x + cell / 2.0,
                y + cell / 2.0 + 4.0,
                if v.abs() / vmax > 0.55 { "white" } else { "black" },
                v
            );
        }
    }
    for (j, name) in names.iter().enumerate() {
        let _ = write!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"middle\">{}</text>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"end\">{}</text>\n",
            ML + j as f64 * cell + cell / 2.0,
            MT + m as f64 * cell + 16.0,
            xml_escape(name),
            ML - 6.0,
            MT + j as f64 * cell + cell / 2.0 + 4.0,
            xml_escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Boxplot panel of the per-feature ICE-correlation samples.
pub fn rho_boxplot_svg(names: &[String], stats: &[Option<BoxplotStats>]) -> String {
    let m = names.len();
    let s = Scale { x0: 0.0, x1: m as f64, y0: -1.05, y1: 1.05 };
    let mut out = header("ICE-PDP correlation per feature");
    let group_w = (W - ML - MR) / m as f64;
    for (j, st) in stats.iter().enumerate() {
        let cx = ML + (j as f64 + 0.5) * group_w;
        let bw = group_w * 0.4;
        if let Some(b) = st {
            let (yq1, yq2, yq3) = (s.py(b.q1), s.py(b.q2), s.py(b.q3));
            let ylw = s.py(b.lower_whisker.max(-1.0));
            let yuw = s.py(b.upper_whisker.min(1.0));
            let _ = write!(
                out,
                "<line x1=\"{cx:.1}\" y1=\"{ylw:.1}\" x2=\"{cx:.1}\" y2=\"{yq1:.1}\" \
                 stroke=\"black\"/>\n\
                 <line x1=\"{cx:.1}\" y1=\"{yuw:.1}\" x2=\"{cx:.1}\" y2=\"{yq3:.1}\" \
                 stroke=\"black\"/>\n\
                 <rect x=\"{:.1}\" y=\"{yq3:.1}\" width=\"{bw:.1}\" height=\"{:.1}\" \
                 fill=\"#9ecae9\" stroke=\"black\"/>\n\
                 <line x1=\"{:.1}\" y1=\"{yq2:.1}\" x2=\"{:.1}\" y2=\"{yq2:.1}\" \
                 stroke=\"black\" stroke-width=\"1.6\"/>\n",
                cx - bw / 2.0,
                (yq1 - yq3).abs().max(0.5),
                cx - bw / 2.0,
                cx + bw / 2.0
            );
            for (t, v) in b.outliers.iter().take(50).enumerate() {
                let _ = t;
                let y = s.py(v.clamp(-1.0, 1.0));
                let _ = write!(
                    out,
                    "<text x=\"{cx:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" \
                     font-size=\"9\" text-anchor=\"middle\">x</text>\n",
                    y + 3.0
                );
            }
        } else {
            let _ = write!(
                out,
                "<text x=\"{cx:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
                 text-anchor=\"middle\">n/a</text>\n",
                s.py(0.0)
            );
        }
        let _ = write!(
            out,
            "<text x=\"{cx:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"middle\">{}</text>\n",
            H - MB + 16.0,
            xml_escape(&names[j])
        );
    }
    axes(&mut out, &s, "feature", "Pearson correlation");
    out.push_str("</svg>\n");
    out
}
