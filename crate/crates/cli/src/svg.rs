//! Minimal hand-rolled SVG plots: log-log decay curves, region point clouds
//! and contraction ledgers. Deterministic output for fixed input data.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    pub scatter: bool,
}

impl Plot {
    pub fn render(&self) -> String {
        let tx = |v: f64| if self.log_x { v.log10() } else { v };
        let ty = |v: f64| if self.log_y { v.log10() } else { v };
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                let (x, y) = (tx(x), ty(y));
                if x.is_finite() && y.is_finite() {
                    xs.push(x);
                    ys.push(y);
                }
            }
        }
        let (x_lo, x_hi) = span(&xs);
        let (y_lo, y_hi) = span(&ys);
        let px = |x: f64| MARGIN + (tx(x) - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
        let py = |y: f64| HEIGHT - MARGIN - (ty(y) - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
            WIDTH / 2.0,
            escape(&self.title)
        ));
        // axes
        out.push_str(&format!(
            "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
             <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
            m = MARGIN,
            r = WIDTH - MARGIN,
            t = MARGIN,
            b = HEIGHT - MARGIN
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            WIDTH / 2.0,
            HEIGHT - 16.0,
            escape(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"18\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\" \
             transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        ));
        // axis range labels
        out.push_str(&format!(
            "<text x=\"{m}\" y=\"{b2}\" font-size=\"10\">{lo:.3e}</text>\n\
             <text x=\"{r}\" y=\"{b2}\" font-size=\"10\" text-anchor=\"end\">{hi:.3e}</text>\n",
            m = MARGIN,
            r = WIDTH - MARGIN,
            b2 = HEIGHT - MARGIN + 16.0,
            lo = back(x_lo, self.log_x),
            hi = back(x_hi, self.log_x),
        ));
        out.push_str(&format!(
            "<text x=\"{m2}\" y=\"{b}\" font-size=\"10\" text-anchor=\"end\">{lo:.3e}</text>\n\
             <text x=\"{m2}\" y=\"{t}\" font-size=\"10\" text-anchor=\"end\">{hi:.3e}</text>\n",
            m2 = MARGIN - 6.0,
            b = HEIGHT - MARGIN,
            t = MARGIN + 4.0,
            lo = back(y_lo, self.log_y),
            hi = back(y_hi, self.log_y),
        ));
        for (idx, s) in self.series.iter().enumerate() {
            if self.scatter {
                for &(x, y) in &s.points {
                    out.push_str(&format!(
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{}\"/>\n",
                        px(x),
                        py(y),
                        s.color
                    ));
                }
            } else {
                let path: Vec<String> = s
                    .points
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                    .collect();
                out.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                    path.join(" "),
                    s.color
                ));
            }
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" fill=\"{}\">{}</text>\n",
                WIDTH - MARGIN - 150.0,
                MARGIN + 16.0 * (idx as f64 + 1.0),
                s.color,
                escape(&s.label)
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn span(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn back(v: f64, log: bool) -> f64 {
    if log {
        10f64.powf(v)
    } else {
        v
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
