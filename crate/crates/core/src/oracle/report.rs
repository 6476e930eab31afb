use num_complex::Complex64;
use std::io::Write;
use std::path::Path;

/// Largest deviation of one observable over a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Deviation {
    pub observable: String,
    pub max_abs: f64,
    /// `max_abs` over the largest exact magnitude along the run.
    pub max_rel: f64,
}

impl Deviation {
    pub fn between(observable: String, exact: &[Complex64], approx: &[Complex64]) -> Self {
        let max_abs = exact.iter().zip(approx).map(|(e, a)| (e - a).norm()).fold(0.0, f64::max);
        let scale = exact.iter().map(|e| e.norm()).fold(0.0, f64::max);
        Deviation { observable, max_abs, max_rel: relative(max_abs, scale) }
    }

    /// Same as [`Deviation::between`] with the max norm taken over a vector
    /// of entries at each time.
    pub fn between_sets(observable: String, exact: &[Vec<Complex64>], approx: &[Vec<Complex64>]) -> Self {
        let mut max_abs: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (e, a) in exact.iter().zip(approx) {
            for (x, y) in e.iter().zip(a) {
                max_abs = max_abs.max((x - y).norm());
                scale = scale.max(x.norm());
            }
        }
        Deviation { observable, max_abs, max_rel: relative(max_abs, scale) }
    }
}

fn relative(abs: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        abs / scale
    } else if abs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonReport {
    pub rows: Vec<Deviation>,
}

impl ComparisonReport {
    pub fn get(&self, observable: &str) -> Option<&Deviation> {
        self.rows.iter().find(|r| r.observable == observable)
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "observable,max_abs_dev,max_rel_dev")?;
        for r in &self.rows {
            writeln!(w, "{},{:.6e},{:.6e}", r.observable, r.max_abs, r.max_rel)?;
        }
        w.flush()
    }
}
