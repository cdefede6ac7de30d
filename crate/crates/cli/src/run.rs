use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crossalloc::dea::{ccr_all, cluster_groups, evaluate_cross};
use crossalloc::game::calibrate_empty_coalition;
use crossalloc::{
    allocate, load_dataset, load_groups, load_matrix, write_matrix, CoalitionTable, CrossEfficiencyMatrix,
    EmptyCoalition, GameError, GroupAssignment, ShapleyTriple,
};
use sha2::{Digest, Sha256};

use crate::args::{Command, Convention, Format, GameArgs, OutputArgs};
use crate::error::CliError;
use crate::report::{
    convention_name, CalibrationEcho, CcrSection, ConfigEcho, Discrepancy, GroupsSection, InputDigest, Provenance,
    Report, ShapleySection, SCHEMA_VERSION,
};

/// Published tables print two decimals.
const REFERENCE_TOL: f64 = 0.01;
/// Allocations are compared within this fraction of the revenue.
const ALLOCATION_REL_TOL: f64 = 0.01;

const REFERENCE_COLUMNS: [&str; 7] = ["theta", "phi_lower", "phi", "phi_upper", "pessimistic", "central", "optimistic"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ccr,
    Crosseff,
    Shapley,
    Allocate,
}

/// Everything one invocation needs, whichever subcommand produced it.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub stage: Stage,
    pub input: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub groups: Option<PathBuf>,
    pub clusters: Option<usize>,
    pub revenue: Option<f64>,
    pub convention: Option<Convention>,
    pub reference: Option<PathBuf>,
    pub reference_matrix: Option<PathBuf>,
    pub matrix_out: Option<PathBuf>,
    pub output: OutputArgs,
}

impl RunConfig {
    fn new(command: &'static str, stage: Stage, output: OutputArgs) -> Self {
        RunConfig {
            command,
            stage,
            input: None,
            matrix: None,
            groups: None,
            clusters: None,
            revenue: None,
            convention: None,
            reference: None,
            reference_matrix: None,
            matrix_out: None,
            output,
        }
    }

    fn game(command: &'static str, stage: Stage, g: GameArgs) -> Self {
        RunConfig {
            input: g.input,
            matrix: g.matrix,
            groups: g.grouping.groups,
            clusters: g.grouping.clusters,
            convention: Some(g.empty_coalition),
            reference: g.reference.reference,
            reference_matrix: g.reference.reference_matrix,
            ..RunConfig::new(command, stage, g.output)
        }
    }

    pub fn from_command(cmd: Command) -> Self {
        match cmd {
            Command::Ccr(a) => RunConfig {
                input: Some(a.input),
                reference: a.reference.reference,
                reference_matrix: a.reference.reference_matrix,
                ..RunConfig::new("ccr", Stage::Ccr, a.output)
            },
            Command::Crosseff(a) => {
                let matrix_out = a.matrix_out.unwrap_or_else(|| {
                    let dir = a.output.out.as_deref().and_then(Path::parent).unwrap_or(Path::new(""));
                    dir.join("matrix.csv")
                });
                RunConfig {
                    input: Some(a.input),
                    groups: a.grouping.groups,
                    clusters: a.grouping.clusters,
                    reference: a.reference.reference,
                    reference_matrix: a.reference.reference_matrix,
                    matrix_out: Some(matrix_out),
                    ..RunConfig::new("crosseff", Stage::Crosseff, a.output)
                }
            }
            Command::Shapley(g) => RunConfig::game("shapley", Stage::Shapley, g),
            Command::Allocate(a) => {
                RunConfig { revenue: Some(a.revenue), ..RunConfig::game("allocate", Stage::Allocate, a.game) }
            }
            Command::Pipeline(a) => RunConfig {
                input: Some(a.input),
                groups: a.grouping.groups,
                clusters: a.grouping.clusters,
                revenue: Some(a.revenue),
                convention: Some(a.empty_coalition),
                reference: a.reference.reference,
                reference_matrix: a.reference.reference_matrix,
                matrix_out: a.matrix_out,
                ..RunConfig::new("pipeline", Stage::Allocate, a.output)
            },
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(r) = self.revenue {
            if !(r > 0.0 && r.is_finite()) {
                return Err(CliError::invalid(format!("--revenue must be positive and finite, got {r}")));
            }
        }
        if self.output.threads == Some(0) {
            return Err(CliError::invalid("--threads must be at least 1"));
        }
        if self.matrix.is_some() && (self.groups.is_some() || self.clusters.is_some()) {
            return Err(CliError::invalid(
                "--groups and --clusters apply only when the matrix is computed from --input",
            ));
        }
        if self.input.is_some() == self.matrix.is_some() {
            return Err(CliError::invalid("exactly one of --input and --matrix is required"));
        }
        if self.convention == Some(Convention::Calibrate) && self.reference.is_none() {
            return Err(CliError::invalid("--empty-coalition calibrate needs --reference with a phi column"));
        }
        Ok(())
    }
}

/// Reads a file whole and records its digest.
fn read_input(role: &str, path: &Path, digests: &mut Vec<InputDigest>) -> Result<Vec<u8>, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    digests.push(InputDigest {
        role: role.to_string(),
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    });
    Ok(bytes)
}

/// Reference columns reordered to match `names`.
fn load_reference(path: &Path, bytes: &[u8], names: &[String]) -> Result<HashMap<String, Vec<f64>>, CliError> {
    let invalid = |msg: String| CliError::invalid(format!("{}: {msg}", path.display()));
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let header: Vec<String> = rdr.headers().map_err(|e| invalid(e.to_string()))?.iter().map(str::to_string).collect();
    if header.first().map(String::as_str) != Some("dmu") {
        return Err(invalid("header must start with `dmu`".into()));
    }
    if let Some(bad) = header[1..].iter().find(|h| !REFERENCE_COLUMNS.contains(&h.as_str())) {
        return Err(invalid(format!("unknown column {bad:?}; expected some of {REFERENCE_COLUMNS:?}")));
    }
    let mut by_name: HashMap<String, Vec<f64>> = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| invalid(e.to_string()))?;
        let values = rec
            .iter()
            .skip(1)
            .map(|f| f.parse::<f64>().map_err(|_| invalid(format!("{f:?} is not a number"))))
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != header.len() - 1 {
            return Err(invalid(format!("row {:?} has {} values", &rec[0], values.len())));
        }
        if by_name.insert(rec[0].to_string(), values).is_some() {
            return Err(invalid(format!("DMU {:?} listed twice", &rec[0])));
        }
    }
    if by_name.len() != names.len() {
        return Err(invalid(format!("{} rows, expected {}", by_name.len(), names.len())));
    }
    let mut columns: HashMap<String, Vec<f64>> = header[1..].iter().map(|h| (h.clone(), Vec::new())).collect();
    for name in names {
        let row = by_name.get(name).ok_or_else(|| invalid(format!("DMU {name:?} missing")))?;
        for (k, h) in header[1..].iter().enumerate() {
            columns.get_mut(h).expect("column registered").push(row[k]);
        }
    }
    Ok(columns)
}

struct Ledger<'a> {
    names: &'a [String],
    entries: Vec<Discrepancy>,
}

impl Ledger<'_> {
    fn compare(&mut self, stage: &str, quantity: &str, computed: &[f64], reference: &[f64], tolerance: f64) {
        for (i, (&c, &r)) in computed.iter().zip(reference).enumerate() {
            let abs_diff = (c - r).abs();
            if abs_diff > tolerance {
                self.entries.push(Discrepancy {
                    stage: stage.into(),
                    quantity: quantity.into(),
                    dmu: self.names[i].clone(),
                    computed: c,
                    reference: r,
                    abs_diff,
                    tolerance,
                });
            }
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let mut digests = Vec::new();

    let mut ccr = None;
    let mut groups_section = None;
    let mut computed_matrix = None;
    let (names, matrix) = if let Some(path) = &cfg.input {
        let bytes = read_input("input", path, &mut digests)?;
        let data = load_dataset(bytes.as_slice()).map_err(|e| CliError::dataset(path, e))?;
        if cfg.stage == Stage::Ccr {
            ccr = Some(CcrSection { theta: ccr_all(&data)?.theta });
            (data.names.clone(), None)
        } else {
            let (groups, source) = if let Some(gp) = &cfg.groups {
                let bytes = read_input("groups", gp, &mut digests)?;
                (load_groups(bytes.as_slice(), &data.names).map_err(|e| CliError::dataset(gp, e))?, "file")
            } else if let Some(h) = cfg.clusters {
                (cluster_groups(&data, h)?, "clusters")
            } else {
                (GroupAssignment::single(data.len()), "single")
            };
            let eval = evaluate_cross(&data, &groups)?;
            ccr = Some(CcrSection { theta: eval.ccr.theta });
            groups_section = Some(GroupsSection { source: source.into(), assignment: groups.as_slice().to_vec() });
            computed_matrix = Some(eval.matrix);
            (data.names.clone(), computed_matrix.clone())
        }
    } else {
        let path = cfg.matrix.as_ref().expect("validated");
        let bytes = read_input("matrix", path, &mut digests)?;
        let m = load_matrix(bytes.as_slice()).map_err(|e| CliError::dataset(path, e))?;
        (m.names().to_vec(), Some(m))
    };

    let reference = match &cfg.reference {
        Some(path) => {
            let bytes = read_input("reference", path, &mut digests)?;
            load_reference(path, &bytes, &names)?
        }
        None => HashMap::new(),
    };
    let reference_matrix = match &cfg.reference_matrix {
        Some(path) => {
            let bytes = read_input("reference_matrix", path, &mut digests)?;
            let m = load_matrix(bytes.as_slice()).map_err(|e| CliError::dataset(path, e))?;
            if m.names() != names.as_slice() {
                return Err(CliError::invalid(format!("{}: DMU names differ from the data", path.display())));
            }
            Some(m)
        }
        None => None,
    };

    let mut shapley = None;
    let mut allocation = None;
    if cfg.stage >= Stage::Shapley {
        let m = matrix.as_ref().expect("matrix available past the crosseff stage");
        let table = CoalitionTable::build(m)?;
        let (convention, calibration) = match cfg.convention.unwrap_or(Convention::Exclude) {
            Convention::Exclude => (EmptyCoalition::Exclude, None),
            Convention::Unit => (EmptyCoalition::Unit, None),
            Convention::Calibrate => {
                let phi = reference.get("phi").ok_or_else(|| {
                    CliError::invalid("--empty-coalition calibrate needs a phi column in --reference")
                })?;
                let cal = calibrate_empty_coalition(&table, phi)?;
                let echo =
                    CalibrationEcho { exclude_deviation: cal.exclude_deviation, unit_deviation: cal.unit_deviation };
                (cal.chosen, Some(echo))
            }
        };
        let t = ShapleyTriple::from_table(&table, convention).map_err(|e| name_players(e, &names))?;
        if cfg.stage == Stage::Allocate {
            allocation = Some(allocate(&t, cfg.revenue.expect("revenue required for allocation"))?);
        }
        shapley = Some(ShapleySection {
            convention,
            calibration,
            phi_lower: t.phi_lower,
            phi: t.phi,
            phi_upper: t.phi_upper,
        });
    }

    let mut ledger = Ledger { names: &names, entries: Vec::new() };
    if let Some(c) = &ccr {
        if let Some(r) = reference.get("theta") {
            ledger.compare("ccr", "theta", &c.theta, r, REFERENCE_TOL);
        }
        if let Some(rm) = &reference_matrix {
            ledger.compare("ccr", "theta vs matrix diagonal", &c.theta, &rm.diagonal(), REFERENCE_TOL);
        }
    }
    if let (Some(m), Some(rm)) = (&computed_matrix, &reference_matrix) {
        for (d, name) in names.iter().enumerate() {
            ledger.compare("crosseff", &format!("E[{name}][*]"), m.row(d), rm.row(d), REFERENCE_TOL);
        }
    }
    if let Some(s) = &shapley {
        for (col, row) in [("phi_lower", &s.phi_lower), ("phi", &s.phi), ("phi_upper", &s.phi_upper)] {
            if let Some(r) = reference.get(col) {
                ledger.compare("shapley", col, row, r, REFERENCE_TOL);
            }
        }
    }
    if let Some(a) = &allocation {
        let tol = ALLOCATION_REL_TOL * a.revenue;
        for (col, row) in [("pessimistic", &a.pessimistic), ("central", &a.central), ("optimistic", &a.optimistic)] {
            if let Some(r) = reference.get(col) {
                ledger.compare("allocation", col, row, r, tol);
            }
        }
    }
    let discrepancies = ledger.entries;

    if let (Some(path), Some(m)) = (&cfg.matrix_out, &computed_matrix) {
        write_matrix_file(path, m)?;
    }

    let timestamp_unix = (!cfg.output.no_timestamp)
        .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        command: cfg.command.to_string(),
        provenance: Provenance {
            tool: "crossalloc".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            inputs: digests,
            config: ConfigEcho {
                clusters: cfg.clusters,
                empty_coalition: shapley.as_ref().map(|s| convention_name(s.convention).to_string()),
                revenue: cfg.revenue,
                format: match cfg.output.format {
                    Format::Csv => "csv".into(),
                    Format::Json => "json".into(),
                },
                precision: cfg.output.precision,
                threads: cfg.output.threads,
            },
            timestamp_unix,
        },
        dmus: names.clone(),
        ccr,
        groups: groups_section,
        matrix: computed_matrix.as_ref().map(matrix_rows),
        shapley,
        allocation,
        discrepancies,
    })
}

/// Restates a degenerate-denominator error with DMU names.
fn name_players(err: GameError, names: &[String]) -> CliError {
    match err {
        GameError::DegenerateDenominator { player, coalition, bound, value } => {
            let members: Vec<&str> = coalition.iter().map(|&j| names[j].as_str()).collect();
            CliError::Numerical(format!(
                "degenerate {} denominator {value:e} for {} joining coalition {{{}}}",
                format!("{bound:?}").to_lowercase(),
                names[player],
                members.join(", ")
            ))
        }
        other => other.into(),
    }
}

fn matrix_rows(m: &CrossEfficiencyMatrix) -> Vec<Vec<f64>> {
    (0..m.len()).map(|d| m.row(d).to_vec()).collect()
}

fn write_matrix_file(path: &Path, m: &CrossEfficiencyMatrix) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_matrix(m, std::io::BufWriter::new(file)).map_err(|e| CliError::io(path, e))
}
