//! The analysis report and the oracle comparison table.

use std::fmt::Write as _;

use serde::Serialize;

use crate::classify::{self, DiagnosticsReport};
use crate::error::{Error, Result, Warning, WarningKind};
use crate::expr::Expr;
use crate::flag::{self, FlagResult};
use crate::liealg::{self, AlgebraLabel, LieAlgebraResult};
use crate::num::Num;
use crate::oracle::{self, JetSolution, LieDerivativeCheck};
use crate::scalar::Scalar;

use super::config::{AnalysisConfig, ConfigEcho};
use super::metric_file::LoadedMetric;

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, Serialize)]
pub struct MetricInfo {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub coords: Vec<String>,
    pub signature: [usize; 2],
    pub components: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSection {
    pub order: usize,
    pub dimension: usize,
    pub next_order: usize,
    pub next_dimension: usize,
    /// Same dimension at `order` and `order + 1`.
    pub stabilized: bool,
    pub terminal_rank: usize,
    pub agree: bool,
    /// `dimension - terminal_rank`.
    pub discrepancy: i64,
    pub exact: bool,
    pub unknowns: usize,
    pub equations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct KnownField {
    pub components: Vec<String>,
    pub check: LieDerivativeCheck,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub metric: MetricInfo,
    pub point: Vec<Num>,
    pub config: ConfigEcho,
    pub flag: FlagResult,
    /// Absent when the bracket analysis failed; see `warnings`.
    pub lie_algebra: Option<LieAlgebraResult>,
    pub diagnostics: Option<DiagnosticsReport>,
    pub oracle: Option<OracleSection>,
    pub known_fields: Vec<KnownField>,
    pub notes: Vec<String>,
    pub warnings: Vec<Warning>,
}

impl Report {
    pub fn terminal_dim(&self) -> usize {
        self.flag.terminal_rank
    }

    pub fn label(&self) -> Option<AlgebraLabel> {
        self.lie_algebra.as_ref().map(|l| l.label)
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// 0 when clean, 2 when a warning casts doubt on the result.
    pub fn exit_code(&self) -> i32 {
        if self.warnings.iter().any(|w| w.kind.is_material()) {
            2
        } else {
            0
        }
    }
}

fn metric_info(loaded: &LoadedMetric) -> MetricInfo {
    let (p, q) = loaded.metric.signature();
    MetricInfo {
        id: loaded.id.clone(),
        name: loaded.name.clone(),
        dim: loaded.metric.dim(),
        coords: loaded.metric.chart().names().to_vec(),
        signature: [p, q],
        components: loaded.components.clone(),
    }
}

/// The point from `--point`, falling back to the metric's default.
pub fn resolve_point(loaded: &LoadedMetric, point: Option<Vec<Scalar>>) -> Result<Vec<Scalar>> {
    let x = point
        .or_else(|| loaded.default_point.clone())
        .ok_or_else(|| Error::InvalidConfig(format!("{}: no point given and no default point", loaded.id)))?;
    loaded.metric.check_point(&x)?;
    Ok(x)
}

fn section_failed(section: &str, e: &Error) -> Warning {
    Warning::new(WarningKind::SectionFailed, e.module(), format!("{section} omitted: {e}"))
}

fn push_unique(into: &mut Vec<Warning>, from: &[Warning]) {
    for w in from {
        if !into.contains(w) {
            into.push(w.clone());
        }
    }
}

fn field_strings(field: &[Expr], loaded: &LoadedMetric) -> Vec<String> {
    field.iter().map(|e| e.display(loaded.metric.chart()).to_string()).collect()
}

/// Runs the full pipeline at `x`.
pub fn analyze(loaded: &LoadedMetric, x: &[Scalar], config: &AnalysisConfig) -> Result<Report> {
    config.validate()?;
    let m = &loaded.metric;
    let n = m.dim();
    let opts = config.eval_options();
    let fc = config.flag_config();
    let flag = flag::derived_flag(m, x, &fc)?;
    let mut warnings = flag.warnings.clone();

    let lie_algebra = match liealg::lie_algebra(m, x, &flag, &opts) {
        Ok(l) => Some(l),
        Err(e) => {
            warnings.push(section_failed("lie algebra", &e));
            None
        }
    };
    let diagnostics = match classify::diagnostics(m, x, &flag, &fc) {
        Ok(d) => {
            push_unique(&mut warnings, &d.warnings);
            Some(d)
        }
        Err(e) => {
            warnings.push(section_failed("diagnostics", &e));
            None
        }
    };

    let j = config.jet_order_for(n);
    let oracle = match oracle::jet_dimensions(m, x, &[j, j + 1], &opts) {
        Ok(sols) => {
            for s in &sols {
                push_unique(&mut warnings, &s.warnings);
            }
            let section = oracle_section(&sols[0], &sols[1], flag.terminal_rank);
            if !section.stabilized {
                warnings.push(Warning::new(
                    WarningKind::NotStabilized,
                    "oracle",
                    format!(
                        "jet dimension {} at order {} but {} at order {}",
                        section.dimension, section.order, section.next_dimension, section.next_order
                    ),
                ));
            } else if !section.agree {
                warnings.push(Warning::new(
                    WarningKind::OracleMismatch,
                    "oracle",
                    format!(
                        "jet dimension {} differs from the terminal rank {}",
                        section.dimension, section.terminal_rank
                    ),
                ));
            }
            Some(section)
        }
        Err(e) => {
            warnings.push(section_failed("oracle", &e));
            None
        }
    };

    let mut known_fields = Vec::new();
    for f in &loaded.known_fields {
        match oracle::lie_derivative_check(f, m, &[x.to_vec()], config.mode) {
            Ok(check) => known_fields.push(KnownField {
                components: field_strings(f, loaded),
                check,
            }),
            Err(e) => warnings.push(section_failed("known field check", &e)),
        }
    }

    let mut notes = Vec::new();
    if let Some(surface) = diagnostics.as_ref().and_then(|d| d.surface.as_ref()) {
        if surface.branch == classify::SurfaceBranch::ConstantCurvature && !surface.c.is_zero() {
            notes.push(label_note(&surface.c));
        }
    }

    Ok(Report {
        schema_version: SCHEMA_VERSION,
        metric: metric_info(loaded),
        point: x.iter().map(Num::from).collect(),
        config: config.echo(n),
        flag,
        lie_algebra,
        diagnostics,
        oracle,
        known_fields,
        notes,
        warnings,
    })
}

fn label_note(c: &Scalar) -> String {
    let (here, other) = if c.to_f64() > 0.0 {
        ("so(3)-type", "sl(2,R)")
    } else {
        ("sl(2,R)-type", "su(2)")
    };
    format!(
        "constant curvature c = {}: the label {here} follows from the Killing form; with the curvature normal form \
         R = c(g_il g_jk - g_ik g_jl) the sign of c is reversed and the same surface is associated with {other}",
        crate::num::display(c.to_f64())
    )
}

fn oracle_section(at: &JetSolution, next: &JetSolution, terminal_rank: usize) -> OracleSection {
    OracleSection {
        order: at.order,
        dimension: at.dimension,
        next_order: next.order,
        next_dimension: next.dimension,
        stabilized: at.dimension == next.dimension,
        terminal_rank,
        agree: at.dimension == terminal_rank,
        discrepancy: at.dimension as i64 - terminal_rank as i64,
        exact: at.exact,
        unknowns: at.unknowns,
        equations: at.equations,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub order: usize,
    pub jet_dimension: usize,
    pub terminal_rank: usize,
    pub agree: bool,
    /// Whether the next order gives the same dimension; absent on the last row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilized: Option<bool>,
    pub exact: bool,
}

/// Jet dimensions for orders `2..=J+1` against the flag's terminal rank.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub schema_version: &'static str,
    pub metric: MetricInfo,
    pub point: Vec<Num>,
    pub config: ConfigEcho,
    pub flag_ranks: Vec<usize>,
    pub terminal_rank: usize,
    pub jet_order: usize,
    pub jet_dimension: usize,
    pub agree: bool,
    pub stabilized: bool,
    pub rows: Vec<CompareRow>,
    pub warnings: Vec<Warning>,
}

pub fn compare(loaded: &LoadedMetric, x: &[Scalar], config: &AnalysisConfig) -> Result<Comparison> {
    config.validate()?;
    let m = &loaded.metric;
    let n = m.dim();
    let opts = config.eval_options();
    let flag = flag::derived_flag(m, x, &config.flag_config())?;
    let j = config.jet_order_for(n);
    let orders: Vec<usize> = (2..=j + 1).collect();
    let sols = oracle::jet_dimensions(m, x, &orders, &opts)?;
    let mut warnings = flag.warnings.clone();
    for s in &sols {
        push_unique(&mut warnings, &s.warnings);
    }
    let rows: Vec<CompareRow> = sols
        .iter()
        .enumerate()
        .map(|(i, s)| CompareRow {
            order: s.order,
            jet_dimension: s.dimension,
            terminal_rank: flag.terminal_rank,
            agree: s.dimension == flag.terminal_rank,
            stabilized: sols.get(i + 1).map(|t| t.dimension == s.dimension),
            exact: s.exact,
        })
        .collect();
    let at = &rows[rows.len() - 2];
    let (jet_dimension, agree, stabilized) = (at.jet_dimension, at.agree, at.stabilized == Some(true));
    if !stabilized {
        warnings.push(Warning::new(
            WarningKind::NotStabilized,
            "oracle",
            format!("jet dimension changes between orders {j} and {}", j + 1),
        ));
    } else if !agree {
        warnings.push(Warning::new(
            WarningKind::OracleMismatch,
            "oracle",
            format!("jet dimension {jet_dimension} differs from the terminal rank {}", flag.terminal_rank),
        ));
    }
    Ok(Comparison {
        schema_version: SCHEMA_VERSION,
        metric: metric_info(loaded),
        point: x.iter().map(Num::from).collect(),
        config: config.echo(n),
        flag_ranks: flag.ranks.clone(),
        terminal_rank: flag.terminal_rank,
        jet_order: j,
        jet_dimension,
        agree,
        stabilized,
        rows,
        warnings,
    })
}

impl Comparison {
    pub fn exit_code(&self) -> i32 {
        if self.warnings.iter().any(|w| w.kind.is_material()) {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("comparison serializes");
        s.push('\n');
        s
    }

    /// Plain-text table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let point: Vec<&str> = self.point.iter().map(|p| p.display.as_str()).collect();
        let _ = writeln!(out, "metric  {}", self.metric.id);
        let _ = writeln!(out, "point   ({})", point.join(", "));
        let _ = writeln!(out, "flag    ranks {:?}, terminal {}", self.flag_ranks, self.terminal_rank);
        let _ = writeln!(out);
        let _ = writeln!(out, "order  jet-dim  flag  match  next order");
        for r in &self.rows {
            let next = match r.stabilized {
                Some(true) => "same",
                Some(false) => "not stabilized",
                None => "-",
            };
            let mark = if r.agree { "=" } else { "!=" };
            let _ = writeln!(
                out,
                "{:>5}  {:>7}  {:>4}  {:>5}  {}{}",
                r.order,
                r.jet_dimension,
                r.terminal_rank,
                mark,
                next,
                if r.order == self.jet_order { "  <- jet order" } else { "" }
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{} {} {}, {}{}",
            self.jet_dimension,
            if self.agree { "=" } else { "!=" },
            self.terminal_rank,
            if self.agree { "agree" } else { "differ" },
            if self.stabilized { "" } else { ", not stabilized" }
        );
        for w in &self.warnings {
            let _ = writeln!(out, "warning [{}]: {}", w.module, w.message);
        }
        out
    }
}

/// Short human-readable digest of a report.
pub fn summary(report: &Report) -> String {
    let mut out = String::new();
    let point: Vec<&str> = report.point.iter().map(|p| p.display.as_str()).collect();
    let _ = writeln!(out, "{} at ({})", report.metric.id, point.join(", "));
    let _ = writeln!(out, "  flag ranks {:?}, terminal dimension {}", report.flag.ranks, report.flag.terminal_rank);
    match &report.lie_algebra {
        Some(l) => {
            let s = l.killing_form.signature;
            let _ = writeln!(
                out,
                "  algebra {}, Killing form (+{}, -{}, 0:{}), derived series {:?}",
                l.label, s.positive, s.negative, s.zero, l.derived_series
            );
        }
        None => {
            let _ = writeln!(out, "  algebra not computed");
        }
    }
    if let Some(o) = &report.oracle {
        let _ = writeln!(
            out,
            "  jet oracle order {}: {} ({})",
            o.order,
            o.dimension,
            if o.agree { "agrees" } else { "differs" }
        );
    }
    for w in &report.warnings {
        let _ = writeln!(out, "  warning [{}]: {}", w.module, w.message);
    }
    out
}

/// JSON Schema of [`Report`].
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");
/// JSON Schema of [`Comparison`].
pub const COMPARISON_SCHEMA: &str = include_str!("../../schema/comparison.schema.json");
