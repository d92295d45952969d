//! CSV and JSON serialization of experiment results. Output is a pure
//! function of the result value, so identical plans and seeds produce
//! byte-identical files.

use std::io::{self, Write};
use std::str::FromStr;

use serde::Serialize;

use super::checks::{AdditivityBoundsReport, ResamplingBoundReport, StabilizationReport};
use super::clt::CltResult;
use super::lln::{LifetimeLlnResult, LlnResult};
use super::positivity::PositivityReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

fn write_json<W: Write, T: Serialize>(value: &T, mut w: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
}

/// RFC 4180 quoting for fields that contain separators (model strings carry
/// commas).
fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

pub fn emit_lln<W: Write>(result: &LlnResult, format: OutputFormat, mut w: W) -> io::Result<()> {
    match format {
        OutputFormat::Json => write_json(result, w),
        OutputFormat::Csv => {
            writeln!(w, "model,q,n,t,mean_norm_betti,std,samples")?;
            for cell in &result.cells {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    csv_field(&result.model), result.q, cell.n, cell.t, cell.mean_norm_betti, cell.std,
                    cell.samples
                )?;
            }
            Ok(())
        }
    }
}

pub fn emit_lifetime_lln<W: Write>(
    result: &LifetimeLlnResult,
    format: OutputFormat,
    mut w: W,
) -> io::Result<()> {
    match format {
        OutputFormat::Json => write_json(result, w),
        OutputFormat::Csv => {
            writeln!(w, "model,q,n,mean_norm_lifetime,std,curve_integral,samples")?;
            for row in &result.rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    csv_field(&result.model),
                    result.q,
                    row.n,
                    row.mean_norm_lifetime,
                    row.std,
                    row.curve_integral_of_mean,
                    row.samples
                )?;
            }
            Ok(())
        }
    }
}

pub fn emit_clt<W: Write>(result: &CltResult, format: OutputFormat, mut w: W) -> io::Result<()> {
    match format {
        OutputFormat::Json => write_json(result, w),
        OutputFormat::Csv => {
            writeln!(w, "model,q,n,t,var_over_volume,ks_distance,samples")?;
            for row in &result.rows {
                let t = row.t.map_or_else(String::new, |t| t.to_string());
                let ks = row.ks_distance.map_or_else(String::new, |k| k.to_string());
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    csv_field(&result.model), result.q, row.n, t, row.var_over_volume, ks, row.samples
                )?;
            }
            Ok(())
        }
    }
}

pub fn emit_positivity<W: Write>(
    report: &PositivityReport,
    format: OutputFormat,
    mut w: W,
) -> io::Result<()> {
    match format {
        OutputFormat::Json => write_json(report, w),
        OutputFormat::Csv => {
            writeln!(
                w,
                "model,q,t,k,samples,positions,p_hat_event,lower_bound,p_hat_per_position,per_position_se,closed_form"
            )?;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{}",
                csv_field(&report.model),
                report.q,
                report.t,
                report.window_k,
                report.samples,
                report.positions_per_sample,
                report.p_hat_event,
                report.lower_bound,
                report.p_hat_per_position,
                report.per_position_se,
                report.closed_form_per_position
            )
        }
    }
}

/// Bundle of the structural check reports, emitted together.
#[derive(Clone, Debug, Serialize)]
pub struct ChecksBundle {
    pub additivity_bounds: AdditivityBoundsReport,
    pub resampling: Vec<ResamplingBoundReport>,
    pub stabilization_summary: StabilizationSummary,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationSummary {
    pub pairs: usize,
    pub stabilized: usize,
    pub reports: Vec<StabilizationReport>,
}

pub fn emit_checks<W: Write>(
    bundle: &ChecksBundle,
    format: OutputFormat,
    mut w: W,
) -> io::Result<()> {
    match format {
        OutputFormat::Json => write_json(bundle, w),
        OutputFormat::Csv => {
            writeln!(w, "check,detail,value,bound,pass")?;
            let bounds = &bundle.additivity_bounds;
            writeln!(
                w,
                "nested_betti_vs_count,trials={},{},0,{}",
                bounds.nested_trials,
                bounds.nested_violations.len(),
                bounds.nested_violations.is_empty()
            )?;
            writeln!(
                w,
                "cover_cube_count,trials={},{},0,{}",
                bounds.cover_trials,
                bounds.cover_violations.len(),
                bounds.cover_violations.is_empty()
            )?;
            for r in &bundle.resampling {
                let detail = format!(
                    "model={} q={} t={} n={} trials={}",
                    r.model, r.q, r.t, r.window_n, r.trials
                );
                writeln!(
                    w,
                    "resampling,{},{},{},{}",
                    csv_field(&detail),
                    r.max_abs_diff,
                    r.bound,
                    r.violations == 0
                )?;
            }
            let s = &bundle.stabilization_summary;
            writeln!(
                w,
                "stabilization,pairs={},{},{},{}",
                s.pairs,
                s.stabilized,
                s.pairs,
                s.stabilized == s.pairs
            )?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{run_clt, run_lln, CltTarget, ExperimentPlan};
    use crate::model::ModelSpec;

    fn tiny_plan() -> ExperimentPlan {
        let mut plan = ExperimentPlan::new(ModelSpec::uniform(2), 0);
        plan.n_list = vec![1, 2];
        plan.samples_per_n = 2;
        plan.t_grid = vec![0.0, 0.5, 1.0];
        plan
    }

    #[test]
    fn lln_csv_schema_is_stable() {
        let result = run_lln(&tiny_plan()).unwrap();
        let mut buf = Vec::new();
        emit_lln(&result, OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("model,q,n,t,mean_norm_betti,std,samples"));
        assert_eq!(lines.count(), 6);
    }

    #[test]
    fn clt_csv_schema_is_stable() {
        let result = run_clt(&tiny_plan(), CltTarget::Betti { t: 0.5 }).unwrap();
        let mut buf = Vec::new();
        emit_clt(&result, OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("model,q,n,t,var_over_volume,ks_distance,samples\n"));
    }

    #[test]
    fn json_mirrors_round_trip() {
        let result = run_lln(&tiny_plan()).unwrap();
        let mut buf = Vec::new();
        emit_lln(&result, OutputFormat::Json, &mut buf).unwrap();
        let value: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(value["model"], "uniform:d=2");
        assert_eq!(value["cells"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn identical_runs_emit_identical_bytes() {
        for format in [OutputFormat::Csv, OutputFormat::Json] {
            let mut a = Vec::new();
            let mut b = Vec::new();
            emit_lln(&run_lln(&tiny_plan()).unwrap(), format, &mut a).unwrap();
            emit_lln(&run_lln(&tiny_plan()).unwrap(), format, &mut b).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn model_fields_with_commas_are_quoted() {
        let mut plan = ExperimentPlan::new(ModelSpec::bernoulli(2, 1).unwrap(), 0);
        plan.n_list = vec![1];
        plan.samples_per_n = 1;
        plan.t_grid = vec![0.5];
        let result = run_lln(&plan).unwrap();
        let mut buf = Vec::new();
        emit_lln(&result, OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"bernoulli:d=2,k=1\",0,1,0.5"), "{text}");
    }

    #[test]
    fn format_parsing() {
        assert_eq!("csv".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert_eq!("JSON".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
        assert!("yaml".parse::<OutputFormat>().is_err());
    }
}
