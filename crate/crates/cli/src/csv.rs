//! Plain CSV with `.` decimals, LF endings and 17 significant digits.

use vsys_core::{StateVector, Trajectory};

pub const TRAJECTORY_HEADER: &str = "t_over_tau,rho_e1e1,rho_e2e2,coh_re,coh_im,rho_gg";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&num(*v));
    }
    out.push('\n');
}

/// Times are in units of τ = 1/γ; the trajectory must use γ = 1.
pub fn trajectory_csv(traj: &Trajectory<f64>) -> String {
    let mut out = String::with_capacity(110 * (traj.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (t, s) in traj.times.iter().zip(&traj.states) {
        write_row(
            &mut out,
            &[*t, s.rho_ee1, s.rho_ee2, s.coh_re, s.coh_im, s.rho_gg()],
        );
    }
    out
}

/// Header plus numeric rows.
pub fn table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        write_row(&mut out, r);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn parse(text: &str) -> Result<Table, String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or("empty CSV")?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| format!("row {}: {f:?}: {e}", k + 1))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != header.len() {
            return Err(format!(
                "row {} has {} fields, header has {}",
                k + 1,
                row.len(),
                header.len()
            ));
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}

/// Reads back a file written by [`trajectory_csv`].
pub fn parse_trajectory(text: &str) -> Result<(Vec<f64>, Vec<StateVector<f64>>), String> {
    let t = parse(text)?;
    if t.header.join(",") != TRAJECTORY_HEADER {
        return Err(format!("unexpected header {:?}", t.header.join(",")));
    }
    let mut times = Vec::with_capacity(t.rows.len());
    let mut states = Vec::with_capacity(t.rows.len());
    for r in t.rows {
        times.push(r[0]);
        states.push(StateVector::new(r[1], r[2], r[3], r[4]));
    }
    Ok((times, states))
}
