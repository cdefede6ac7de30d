use std::io::Write;

use crossalloc::{AllocationPlan, EmptyCoalition};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub provenance: Provenance,
    pub dmus: Vec<String>,
    pub ccr: Option<CcrSection>,
    pub groups: Option<GroupsSection>,
    /// Row-major, rows are evaluators.
    pub matrix: Option<Vec<Vec<f64>>>,
    pub shapley: Option<ShapleySection>,
    pub allocation: Option<AllocationPlan>,
    pub discrepancies: Vec<Discrepancy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    pub config: ConfigEcho,
    pub timestamp_unix: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub clusters: Option<usize>,
    pub empty_coalition: Option<String>,
    pub revenue: Option<f64>,
    pub format: String,
    pub precision: usize,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcrSection {
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupsSection {
    /// `single`, `clusters` or `file`.
    pub source: String,
    pub assignment: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapleySection {
    pub convention: EmptyCoalition,
    pub calibration: Option<CalibrationEcho>,
    pub phi_lower: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEcho {
    pub exclude_deviation: f64,
    pub unit_deviation: f64,
}

/// A computed value that differs from a published one by more than the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub stage: String,
    pub quantity: String,
    pub dmu: String,
    pub computed: f64,
    pub reference: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
}

impl Report {
    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }

    /// Comment-prefixed metadata followed by one CSV table per section.
    pub fn write_csv<W: Write>(&self, mut out: W, precision: usize) -> std::io::Result<()> {
        let num = |v: f64| format!("{v:.precision$}");
        let p = &self.provenance;
        writeln!(out, "# crossalloc report")?;
        writeln!(out, "# schema_version: {}", self.schema_version)?;
        writeln!(out, "# command: {}", self.command)?;
        writeln!(out, "# tool: {} {}", p.tool, p.version)?;
        for input in &p.inputs {
            writeln!(out, "# input {}: {} sha256={}", input.role, input.path, input.sha256)?;
        }
        let c = &p.config;
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        writeln!(
            out,
            "# config: clusters={} empty_coalition={} revenue={} precision={} threads={}",
            opt(c.clusters.map(|v| v.to_string())),
            opt(c.empty_coalition.clone()),
            opt(c.revenue.map(|v| v.to_string())),
            c.precision,
            opt(c.threads.map(|v| v.to_string())),
        )?;
        if let Some(t) = p.timestamp_unix {
            writeln!(out, "# timestamp_unix: {t}")?;
        }

        let table = |out: &mut W, title: String, header: Vec<String>, rows: Vec<Vec<String>>| -> std::io::Result<()> {
            writeln!(out)?;
            writeln!(out, "# section: {title}")?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header)?;
            for row in rows {
                w.write_record(&row)?;
            }
            out.write_all(&w.into_inner().map_err(|e| e.into_error())?)
        };
        let per_dmu = |cols: &[&[f64]]| -> Vec<Vec<String>> {
            self.dmus
                .iter()
                .enumerate()
                .map(|(i, name)| std::iter::once(name.clone()).chain(cols.iter().map(|c| num(c[i]))).collect())
                .collect()
        };
        let header = |cols: &[&str]| -> Vec<String> {
            std::iter::once("dmu").chain(cols.iter().copied()).map(String::from).collect()
        };

        if let Some(ccr) = &self.ccr {
            table(&mut out, "ccr".into(), header(&["theta"]), per_dmu(&[&ccr.theta]))?;
        }
        if let Some(g) = &self.groups {
            let rows = self.dmus.iter().zip(&g.assignment).map(|(n, id)| vec![n.clone(), id.to_string()]).collect();
            table(&mut out, format!("groups ({})", g.source), header(&["group"]), rows)?;
        }
        if let Some(m) = &self.matrix {
            let head = std::iter::once("evaluator".to_string()).chain(self.dmus.iter().cloned()).collect();
            let rows = self
                .dmus
                .iter()
                .zip(m)
                .map(|(n, row)| std::iter::once(n.clone()).chain(row.iter().map(|&v| num(v))).collect())
                .collect();
            table(&mut out, "cross-efficiency".into(), head, rows)?;
        }
        if let Some(s) = &self.shapley {
            let mut title = format!("shapley (empty coalition: {})", convention_name(s.convention));
            if let Some(cal) = &s.calibration {
                title.push_str(&format!(
                    "; calibration max |dev| exclude={} unit={}",
                    num(cal.exclude_deviation),
                    num(cal.unit_deviation)
                ));
            }
            table(
                &mut out,
                title,
                header(&["phi_lower", "phi", "phi_upper"]),
                per_dmu(&[&s.phi_lower, &s.phi, &s.phi_upper]),
            )?;
        }
        if let Some(a) = &self.allocation {
            table(
                &mut out,
                format!("allocation (revenue {})", a.revenue),
                header(&["pessimistic", "central", "optimistic"]),
                per_dmu(&[&a.pessimistic, &a.central, &a.optimistic]),
            )?;
        }
        let head =
            ["stage", "quantity", "dmu", "computed", "reference", "abs_diff", "tolerance"].map(String::from).to_vec();
        let rows = self
            .discrepancies
            .iter()
            .map(|d| {
                vec![
                    d.stage.clone(),
                    d.quantity.clone(),
                    d.dmu.clone(),
                    num(d.computed),
                    num(d.reference),
                    num(d.abs_diff),
                    d.tolerance.to_string(),
                ]
            })
            .collect();
        table(&mut out, "discrepancies".into(), head, rows)
    }
}

pub fn convention_name(c: EmptyCoalition) -> &'static str {
    match c {
        EmptyCoalition::Exclude => "exclude",
        EmptyCoalition::Unit => "unit",
    }
}
