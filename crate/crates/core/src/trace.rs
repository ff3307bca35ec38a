//! Time series of flow monitors and its CSV form.

use std::io::{self, BufRead, Write};

/// Column names of `trace.csv`, in order.
pub const TRACE_COLUMNS: [&str; 18] = [
    "t",
    "dt",
    "rho_min",
    "rho_max",
    "grad_max",
    "kappa_min",
    "kappa_max",
    "u_min",
    "theta_min",
    "theta_max",
    "residual_linf",
    "residual_l2",
    "Q",
    "J",
    "conserved",
    "eta",
    "c_star",
    "evenness_defect",
];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TraceRow {
    pub t: f64,
    pub dt: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub grad_max: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub u_min: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub residual_linf: f64,
    pub residual_l2: f64,
    pub q: f64,
    pub j: f64,
    pub conserved: f64,
    pub eta: f64,
    pub c_star: f64,
    pub evenness_defect: f64,
}

impl TraceRow {
    pub fn values(&self) -> [f64; 18] {
        [
            self.t,
            self.dt,
            self.rho_min,
            self.rho_max,
            self.grad_max,
            self.kappa_min,
            self.kappa_max,
            self.u_min,
            self.theta_min,
            self.theta_max,
            self.residual_linf,
            self.residual_l2,
            self.q,
            self.j,
            self.conserved,
            self.eta,
            self.c_star,
            self.evenness_defect,
        ]
    }

    pub fn from_values(v: [f64; 18]) -> Self {
        TraceRow {
            t: v[0],
            dt: v[1],
            rho_min: v[2],
            rho_max: v[3],
            grad_max: v[4],
            kappa_min: v[5],
            kappa_max: v[6],
            u_min: v[7],
            theta_min: v[8],
            theta_max: v[9],
            residual_linf: v[10],
            residual_l2: v[11],
            q: v[12],
            j: v[13],
            conserved: v[14],
            eta: v[15],
            c_star: v[16],
            evenness_defect: v[17],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsTrace {
    pub rows: Vec<TraceRow>,
}

/// Formats a float with 17 significant digits; parses back bit-exactly.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl DiagnosticsTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn column(&self, f: impl Fn(&TraceRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", TRACE_COLUMNS.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.values().iter().map(|&v| fmt_f64(v)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> io::Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "empty trace"))??;
        if header.trim() != TRACE_COLUMNS.join(",") {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "unexpected trace header"));
        }
        let mut rows = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let parsed = parsed.map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
            let arr: [f64; 18] = parsed
                .try_into()
                .map_err(|_| io::Error::new(io::ErrorKind::InvalidData, "wrong column count"))?;
            rows.push(TraceRow::from_values(arr));
        }
        Ok(DiagnosticsTrace { rows })
    }

    /// Largest violation of `next ≥ prev − tol·(1 + |prev|)` (positive means
    /// violated); NaN rows are skipped.
    pub fn worst_decrease(&self, f: impl Fn(&TraceRow) -> f64, tol: f64) -> f64 {
        self.rows
            .windows(2)
            .map(|w| (f(&w[0]), f(&w[1])))
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(a, b)| (a - tol * (1.0 + a.abs())) - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest violation of `next ≤ prev + tol·(1 + |prev|)`.
    pub fn worst_increase(&self, f: impl Fn(&TraceRow) -> f64, tol: f64) -> f64 {
        self.worst_decrease(|r| -f(r), tol)
    }
}
