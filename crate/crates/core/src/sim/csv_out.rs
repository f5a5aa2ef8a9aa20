use super::localize::{EllipseRow, LocalizationRun, MseCurves, TrialRecord};
use super::scenario::Algorithm;
use super::{Fig2Row, ScanRecord, SimResult};
use crate::output::fmt_f64;
use std::io::Write;

pub fn write_fig2_csv<W: Write>(w: W, rows: &[Fig2Row]) -> SimResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["input_bw", "L", "trial", "error"])?;
    for r in rows {
        out.write_record([
            r.input_bw.to_string(),
            r.l.to_string(),
            r.trial.to_string(),
            fmt_f64(r.error),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Per-trial, per-step, per-agent squared errors. Diverged trials contribute
/// the steps they completed.
pub fn write_mse_csv<W: Write>(w: W, records: &[TrialRecord]) -> SimResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["algorithm", "trial", "timestep", "agent", "mse"])?;
    for r in records {
        let alg = r.algorithm.name();
        let trial = r.trial.to_string();
        for (k, row) in r.agent_sq_error.iter().enumerate() {
            let k = k.to_string();
            for (agent, e) in row.iter().enumerate() {
                out.write_record([alg, &trial, &k, &agent.to_string(), &fmt_f64(*e)])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_mse_total_csv<W: Write>(w: W, curves: &[MseCurves]) -> SimResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["algorithm", "timestep", "mean_total_mse", "n_trials", "n_diverged"])?;
    for c in curves {
        for (k, v) in c.total.iter().enumerate() {
            out.write_record([
                c.algorithm.name().to_string(),
                k.to_string(),
                fmt_f64(*v),
                c.n_trials.to_string(),
                c.n_diverged.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_ellipses_csv<W: Write>(w: W, rows: &[(Algorithm, EllipseRow)]) -> SimResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["algorithm", "agent", "cx", "cy", "m11", "m12", "m22", "level"])?;
    for (alg, e) in rows {
        let mut rec = vec![alg.name().to_string(), e.agent.to_string()];
        rec.extend([e.cx, e.cy, e.m11, e.m12, e.m22, e.level].map(fmt_f64));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_scan_csv<W: Write>(w: W, records: &[ScanRecord]) -> SimResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["lambda", "side", "n_vertices", "phi_max", "seed"])?;
    for r in records {
        out.write_record([
            fmt_f64(r.lambda),
            fmt_f64(r.side),
            r.n_vertices.to_string(),
            r.phi_max.to_string(),
            r.seed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Ellipses from the first non-diverged trial of each algorithm.
pub fn first_trial_ellipses(run: &LocalizationRun, level: f64) -> SimResult<Vec<(Algorithm, EllipseRow)>> {
    let mut rows = Vec::new();
    for &alg in &run.config.algorithms {
        if let Some(r) = run.records_for(alg).find(|r| !r.diverged()) {
            rows.extend(
                super::ellipses_from_record(r, level)?
                    .into_iter()
                    .map(|e| (alg, e)),
            );
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig2_csv_layout() {
        let mut buf = Vec::new();
        let rows = [Fig2Row { input_bw: 5, l: 0, trial: 1, error: 0.25 }];
        write_fig2_csv(&mut buf, &rows).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "input_bw,L,trial,error\n5,0,1,2.5000000000000000e-1\n"
        );
    }

    #[test]
    fn scan_csv_layout() {
        let mut buf = Vec::new();
        let rows = [ScanRecord { lambda: 0.1, side: 40.0, n_vertices: 3, phi_max: 2, seed: 7 }];
        write_scan_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert_eq!(line, "1.0000000000000001e-1,4.0000000000000000e1,3,2,7");
    }
}
