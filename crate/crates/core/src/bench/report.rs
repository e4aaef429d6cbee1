//! Result rows, CSV output and the plain-text summary.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "experiment,method,sweep_value,replication,mean_error,std_error,wall_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replication {
    Index(usize),
    /// Aggregate over all replications.
    All,
}

impl fmt::Display for Replication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Replication::Index(i) => write!(f, "{i}"),
            Replication::All => f.write_str("all"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: &'static str,
    pub method: &'static str,
    pub sweep_value: f64,
    pub replication: Replication,
    /// Mean over pixels, or over replications for the aggregate row.
    pub mean_error: f64,
    /// Sample standard deviation matching `mean_error`.
    pub std_error: f64,
    pub wall_ms: f64,
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(rows: &[ResultRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.experiment,
            r.method,
            num(r.sweep_value),
            r.replication,
            num(r.mean_error),
            num(r.std_error),
            num(r.wall_ms)
        )?;
    }
    w.flush()
}

pub fn emit_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(rows, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

/// Aggregate rows of one method, in grid order.
pub fn aggregate<'a>(rows: &'a [ResultRow], method: &str) -> Vec<&'a ResultRow> {
    rows.iter()
        .filter(|r| r.method == method && r.replication == Replication::All)
        .collect()
}

/// How RBF pruning compares with standard pruning across the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PruningComparison {
    pub grid_points: usize,
    /// Points where the RBF mean error is at most the standard one.
    pub rbf_not_worse: usize,
    /// Largest `(standard − rbf) / standard`, over points with nonzero standard error.
    pub max_reduction: f64,
    pub max_reduction_at: f64,
}

impl PruningComparison {
    pub fn fraction_not_worse(&self) -> f64 {
        self.rbf_not_worse as f64 / self.grid_points as f64
    }
}

/// `None` unless both pruning modes are present.
pub fn compare_pruning(rows: &[ResultRow]) -> Option<PruningComparison> {
    let standard = aggregate(rows, "pnnls_standard");
    let rbf = aggregate(rows, "pnnls_rbf");
    if standard.is_empty() || standard.len() != rbf.len() {
        return None;
    }
    let mut out = PruningComparison {
        grid_points: standard.len(),
        rbf_not_worse: 0,
        max_reduction: f64::NEG_INFINITY,
        max_reduction_at: f64::NAN,
    };
    for (s, r) in standard.iter().zip(&rbf) {
        if r.mean_error <= s.mean_error {
            out.rbf_not_worse += 1;
        }
        if s.mean_error > 0.0 {
            let red = (s.mean_error - r.mean_error) / s.mean_error;
            if red > out.max_reduction {
                out.max_reduction = red;
                out.max_reduction_at = s.sweep_value;
            }
        }
    }
    Some(out)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let rx = ranks(x);
    let ry = ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            out[o] = rank;
        }
        i = j + 1;
    }
    out
}

/// Human-readable per-method aggregates.
pub fn summary_text(rows: &[ResultRow]) -> String {
    let mut methods: Vec<&str> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let mut out = String::new();
    if let Some(first) = rows.first() {
        out.push_str(&format!("experiment: {}\n", first.experiment));
    }
    for m in &methods {
        let agg = aggregate(rows, m);
        let Some(best) = agg.iter().min_by(|a, b| a.mean_error.total_cmp(&b.mean_error)) else {
            continue;
        };
        let worst = agg.iter().max_by(|a, b| a.mean_error.total_cmp(&b.mean_error)).unwrap();
        let overall = agg.iter().map(|r| r.mean_error).sum::<f64>() / agg.len() as f64;
        out.push_str(&format!(
            "{m}: points={} mean={overall:.6e} min={:.6e} (at {}) max={:.6e} (at {})\n",
            agg.len(),
            best.mean_error,
            best.sweep_value,
            worst.mean_error,
            worst.sweep_value
        ));
        if agg.len() >= 2 {
            let x: Vec<f64> = agg.iter().map(|r| r.sweep_value).collect();
            let y: Vec<f64> = agg.iter().map(|r| r.mean_error).collect();
            out.push_str(&format!("{m}: spearman(sweep, error)={:.4}\n", spearman(&x, &y)));
        }
    }
    if let Some(c) = compare_pruning(rows) {
        out.push_str(&format!(
            "rbf vs standard: not worse at {}/{} points, max reduction {:.2}% (at {})\n",
            c.rbf_not_worse,
            c.grid_points,
            100.0 * c.max_reduction,
            c.max_reduction_at
        ));
    }
    out
}

/// `<out>.summary.txt` next to the CSV.
pub fn summary_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".summary.txt");
    PathBuf::from(name)
}

pub fn emit_summary(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, summary_text(rows)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(method: &'static str, x: f64, rep: Replication, err: f64) -> ResultRow {
        ResultRow {
            experiment: "sparsity",
            method,
            sweep_value: x,
            replication: rep,
            mean_error: err,
            std_error: 0.0,
            wall_ms: 0.0,
        }
    }

    fn csv(rows: &[ResultRow]) -> String {
        let mut buf = Vec::new();
        write_csv(rows, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_rows_give_header_only() {
        assert_eq!(csv(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn one_row_gives_two_lines() {
        let text = csv(&[row("mp", 5.0, Replication::Index(3), 0.1)]);
        let lines: Vec<&str> = text.split_terminator('\n').collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[1],
            "sparsity,mp,5.0000000000000000e0,3,1.0000000000000001e-1,0.0000000000000000e0,0.0000000000000000e0"
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn csv_values_round_trip() {
        let v = 0.1 + 0.2;
        let text = csv(&[row("mp", f64::INFINITY, Replication::All, v)]);
        let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(fields[2], "inf");
        assert_eq!(fields[3], "all");
        assert_eq!(fields[4].parse::<f64>().unwrap(), v);
    }

    #[test]
    fn pruning_comparison_counts_points() {
        let rows = vec![
            row("pnnls_standard", 1.0, Replication::All, 1.0),
            row("pnnls_rbf", 1.0, Replication::All, 0.7),
            row("pnnls_standard", 2.0, Replication::All, 1.0),
            row("pnnls_rbf", 2.0, Replication::All, 1.1),
            row("pnnls_standard", 3.0, Replication::All, 0.0),
            row("pnnls_rbf", 3.0, Replication::All, 0.0),
        ];
        let c = compare_pruning(&rows).unwrap();
        assert_eq!(c.grid_points, 3);
        assert_eq!(c.rbf_not_worse, 2);
        assert!((c.max_reduction - 0.3).abs() < 1e-12);
        assert_eq!(c.max_reduction_at, 1.0);
    }

    #[test]
    fn spearman_with_ties() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 1.0, 2.0, 3.0]);
        assert!(r > 0.9 && r < 1.0);
    }

    #[test]
    fn summary_path_appends_suffix() {
        assert_eq!(summary_path(Path::new("out/a.csv")), PathBuf::from("out/a.csv.summary.txt"));
    }
}
