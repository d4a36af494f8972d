//! CSV emission.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::dynamics::{to_lab_control, to_lab_state, EnergyLevels, Trajectory};
use crate::flatness::DesignSample;
use crate::transfer::VerificationReport;

pub const DESIGN_HEADER: &str = "t,g1,g2,g3,u1,u2";
pub const TRAJECTORY_HEADER: &str = "t,g1,g2,g3,u1,u2,x1,x2,x3,x4,pop_w,pop_v,norm_err";
pub const LAB_HEADER: &str = "t,omega_re,omega_im,psi1_re,psi1_im,psi2_re,psi2_im";
pub const SWEEP_HEADER: &str = "value,g3_T,final_state_error,residual_population,passed,error";

/// Number of significant digits kept in CSV output.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to 12 significant digits, then prints the shortest string that reads back
/// to the rounded value. Negative zero prints as `0`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
        .parse()
        .expect("formatted float parses");
    let s = format!("{rounded:?}");
    match s.strip_suffix(".0") {
        Some(int) => int.to_string(),
        None => s,
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format_number(*v)).collect::<Vec<_>>().join(",")
}

fn write_lines(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut out = io::BufWriter::new(fs::File::create(path)?);
    out.write_all(header.as_bytes())?;
    out.write_all(b"\n")?;
    for row in rows {
        out.write_all(row.as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn design_row(s: &DesignSample) -> String {
    join(&[s.t, s.coords.g1, s.coords.g2, s.coords.g3, s.controls.u1, s.controls.u2])
}

pub fn write_design_csv(path: &Path, samples: &[DesignSample]) -> io::Result<()> {
    write_lines(path, DESIGN_HEADER, samples.iter().map(design_row))
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> io::Result<()> {
    let rows = traj.nodes.iter().map(|n| {
        let g = n.coords.map(|c| c.as_array()).unwrap_or([0.0; 3]);
        let [x1, x2, x3, x4] = n.state.0;
        let (pop_w, pop_v) = n.populations();
        join(&[
            n.t, g[0], g[1], g[2], n.controls.u1, n.controls.u2, x1, x2, x3, x4, pop_w, pop_v, n.norm_err,
        ])
    });
    write_lines(path, TRAJECTORY_HEADER, rows)
}

pub fn write_lab_csv(path: &Path, traj: &Trajectory, levels: &EnergyLevels) -> io::Result<()> {
    let rows = traj.nodes.iter().map(|n| {
        let lab = to_lab_control(n.controls.u1, n.controls.u2, n.t, levels);
        let [p1, p2] = to_lab_state(&n.state, n.t, levels);
        join(&[n.t, lab.omega_re, lab.omega_im, p1.re, p1.im, p2.re, p2.im])
    });
    write_lines(path, LAB_HEADER, rows)
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub g3_t: f64,
    pub outcome: Result<VerificationReport, String>,
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> io::Result<()> {
    let lines = rows.iter().map(|r| match &r.outcome {
        Ok(rep) => format!(
            "{},{},{},{},{},",
            format_number(r.value),
            format_number(r.g3_t),
            format_number(rep.final_state_error_inf),
            format_number(rep.residual_population),
            rep.passed
        ),
        Err(e) => format!(
            "{},{},,,false,\"{}\"",
            format_number(r.value),
            format_number(r.g3_t),
            e.replace('"', "'")
        ),
    });
    write_lines(path, SWEEP_HEADER, lines)
}

/// Report as `key = value` lines, the same syntax as scenario files.
pub fn render_report(report: &VerificationReport) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        s.push_str(k);
        s.push_str(" = ");
        s.push_str(&v);
        s.push('\n');
    };
    kv("passed", report.passed.to_string());
    kv("final_state_error_inf", format!("{:e}", report.final_state_error_inf));
    kv("residual_population", format!("{:e}", report.residual_population));
    kv("max_norm_drift", format!("{:e}", report.max_norm_drift));
    kv("max_f3_residual", format!("{:e}", report.max_f3_residual));
    kv("oracle_mismatch_inf", format!("{:e}", report.oracle_mismatch_inf));
    kv("tol", format!("{:e}", report.tol));
    kv("binding_tol", format!("{:e}", report.binding_tol));
    for f in &report.failures {
        kv("failure", f.clone());
    }
    s
}

pub fn write_report(path: &Path, report: &VerificationReport) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, render_report(report))
}
