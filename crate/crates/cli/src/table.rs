//! CSV tables: '.' decimal separator, LF line endings, densities at 9 significant digits.

use std::io::Write;

use rumorsim::abm::AbmTrajectory;
use rumorsim::experiment::GridPoint;
use rumorsim::model::{BsirState, Epsilon, SirState};
use rumorsim::ode::Trajectory;

use crate::error::CliError;

pub const ODE_HEADER: [&str; 5] = ["t", "i_b", "i_n", "s", "r"];
pub const ABM_HEADER: [&str; 7] = ["t", "n_ib", "n_in", "n_s", "n_r", "c_max", "blocks"];
pub const SWEEP_HEADER: [&str; 4] = ["epsilon", "t", "s", "r"];
pub const GRID_HEADER: [&str; 4] = ["epsilon", "delta", "s_at_snapshot", "r_at_snapshot"];

/// Formats like C's `%.9g`: shortest of fixed or exponent notation, trailing zeros dropped.
pub fn sig9(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // Round first so the exponent reflects carries such as 9.9999999996 -> 10.
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let mantissa = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn epsilon_cell(eps: Epsilon) -> String {
    match eps {
        Epsilon::Infinite => "inf".to_string(),
        Epsilon::Finite(v) => sig9(v),
    }
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io("writing CSV", e))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::io("writing CSV", std::io::Error::other(e))
}

/// Classic-model rows put every ignorant in the non-enrolled column.
pub fn write_sir<W: Write>(out: W, traj: &Trajectory<SirState>) -> Result<(), CliError> {
    let mut w = writer(out);
    w.write_record(ODE_HEADER).map_err(csv_err)?;
    for (t, s) in traj.iter() {
        w.write_record([sig9(t), "0".into(), sig9(s.i), sig9(s.s), sig9(s.r)])
            .map_err(csv_err)?;
    }
    finish(w)
}

pub fn write_bsir<W: Write>(out: W, traj: &Trajectory<BsirState>) -> Result<(), CliError> {
    let mut w = writer(out);
    w.write_record(ODE_HEADER).map_err(csv_err)?;
    for (t, s) in traj.iter() {
        w.write_record([sig9(t), sig9(s.i_b), sig9(s.i_n), sig9(s.s), sig9(s.r)])
            .map_err(csv_err)?;
    }
    finish(w)
}

pub fn write_abm<W: Write>(out: W, traj: &AbmTrajectory) -> Result<(), CliError> {
    let mut w = writer(out);
    w.write_record(ABM_HEADER).map_err(csv_err)?;
    for ((t, c), l) in traj.times.iter().zip(&traj.counts).zip(&traj.ledger) {
        w.write_record([
            sig9(*t),
            c.ignorant_b.to_string(),
            c.ignorant_n.to_string(),
            c.spreaders.to_string(),
            c.stiflers.to_string(),
            l.c_max.to_string(),
            l.blocks.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// Long format, one block of rows per epsilon in input order.
pub fn write_sweep<W: Write>(out: W, runs: &[(Epsilon, Trajectory<BsirState>)]) -> Result<(), CliError> {
    let mut w = writer(out);
    w.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for (eps, traj) in runs {
        let eps = epsilon_cell(*eps);
        for (t, s) in traj.iter() {
            w.write_record([eps.clone(), sig9(t), sig9(s.s), sig9(s.r)])
                .map_err(csv_err)?;
        }
    }
    finish(w)
}

pub fn write_grid<W: Write>(out: W, points: &[GridPoint]) -> Result<(), CliError> {
    let mut w = writer(out);
    w.write_record(GRID_HEADER).map_err(csv_err)?;
    for p in points {
        w.write_record([epsilon_cell(p.epsilon), sig9(p.delta), sig9(p.s), sig9(p.r)])
            .map_err(csv_err)?;
    }
    finish(w)
}
