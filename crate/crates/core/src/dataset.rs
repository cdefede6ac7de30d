//! DMU input/output data: CSV ingestion, validation and column normalization.
//!
//! Files use a header of the form `dmu,x:<name>,...,y:<name>,...`. Columns are
//! classified by their `x:`/`y:` prefix, so inputs and outputs may appear in
//! any order. Group files use `dmu,group` and matrix files carry DMU names in
//! both the first row and the first column.

use std::collections::HashMap;
use std::io::{Read, Write};

use thiserror::Error;

use crate::dea::CrossEfficiencyMatrix;

/// Slack allowed above 1 for matrix entries produced by floating-point solves.
pub const MATRIX_ENTRY_TOL: f64 = 1e-9;

type Rows = Vec<Vec<f64>>;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("invalid data: {0}")]
    Validation(String),
}

impl DatasetError {
    fn parse(line: u64, message: impl Into<String>) -> Self {
        DatasetError::Parse { line, message: message.into() }
    }
}

impl From<csv::Error> for DatasetError {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(e) => DatasetError::Io(e),
            kind => DatasetError::parse(line, format!("{kind:?}")),
        }
    }
}

/// Named DMUs with raw and normalized input/output matrices (rows are DMUs).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub names: Vec<String>,
    pub input_names: Vec<String>,
    pub output_names: Vec<String>,
    pub raw_inputs: Vec<Vec<f64>>,
    pub raw_outputs: Vec<Vec<f64>>,
    pub norm_inputs: Vec<Vec<f64>>,
    pub norm_outputs: Vec<Vec<f64>>,
}

impl Dataset {
    /// Validates raw data and applies column normalization.
    pub fn new(
        names: Vec<String>,
        input_names: Vec<String>,
        output_names: Vec<String>,
        raw_inputs: Vec<Vec<f64>>,
        raw_outputs: Vec<Vec<f64>>,
    ) -> Result<Self, DatasetError> {
        let n = names.len();
        if n == 0 {
            return Err(DatasetError::Validation("dataset has no DMUs".into()));
        }
        if input_names.is_empty() || output_names.is_empty() {
            return Err(DatasetError::Validation(
                "at least one input (x:) and one output (y:) column are required".into(),
            ));
        }
        if raw_inputs.len() != n || raw_outputs.len() != n {
            return Err(DatasetError::Validation("row count mismatch between names and data".into()));
        }
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if let Some(prev) = seen.insert(name.as_str(), i) {
                return Err(DatasetError::Validation(format!(
                    "duplicate DMU name {name:?} (rows {} and {})",
                    prev + 1,
                    i + 1
                )));
            }
        }
        for (kind, rows, width) in
            [("input", &raw_inputs, input_names.len()), ("output", &raw_outputs, output_names.len())]
        {
            for (i, row) in rows.iter().enumerate() {
                if row.len() != width {
                    return Err(DatasetError::Validation(format!(
                        "DMU {:?} has {} {kind} values, expected {width}",
                        names[i],
                        row.len()
                    )));
                }
                if let Some(v) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
                    return Err(DatasetError::Validation(format!(
                        "DMU {:?} has invalid {kind} value {v}; values must be finite and nonnegative",
                        names[i]
                    )));
                }
            }
        }
        for (i, row) in raw_inputs.iter().enumerate() {
            if row.iter().all(|&v| v == 0.0) {
                return Err(DatasetError::Validation(format!("DMU {:?} has all-zero inputs", names[i])));
            }
        }
        for (i, row) in raw_outputs.iter().enumerate() {
            if row.iter().all(|&v| v == 0.0) {
                return Err(DatasetError::Validation(format!("DMU {:?} has all-zero outputs", names[i])));
            }
        }
        let (norm_inputs, norm_outputs) = normalize(&raw_inputs, &raw_outputs)?;
        Ok(Dataset { names, input_names, output_names, raw_inputs, raw_outputs, norm_inputs, norm_outputs })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn num_inputs(&self) -> usize {
        self.input_names.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.output_names.len()
    }

    /// Writes the raw data in the format accepted by [`load_dataset`]. Values
    /// use the shortest representation that parses back to the same bits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DatasetError> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header = vec!["dmu".to_string()];
        header.extend(self.input_names.iter().map(|n| format!("x:{n}")));
        header.extend(self.output_names.iter().map(|n| format!("y:{n}")));
        out.write_record(&header)?;
        for (i, name) in self.names.iter().enumerate() {
            let mut record = vec![name.clone()];
            record.extend(self.raw_inputs[i].iter().map(f64::to_string));
            record.extend(self.raw_outputs[i].iter().map(f64::to_string));
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Divides every column by its sum. Inputs and outputs are `n × m` and
/// `n × s` with DMUs as rows.
pub fn normalize(raw_inputs: &[Vec<f64>], raw_outputs: &[Vec<f64>]) -> Result<(Rows, Rows), DatasetError> {
    Ok((normalize_columns(raw_inputs, "input")?, normalize_columns(raw_outputs, "output")?))
}

fn normalize_columns(rows: &[Vec<f64>], kind: &str) -> Result<Vec<Vec<f64>>, DatasetError> {
    let width = rows.first().map_or(0, Vec::len);
    let mut sums = vec![0.0; width];
    for row in rows {
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
    }
    if let Some(col) = sums.iter().position(|&s| s <= 0.0) {
        return Err(DatasetError::Validation(format!("{kind} column {} sums to zero", col + 1)));
    }
    Ok(rows.iter().map(|row| row.iter().zip(&sums).map(|(v, s)| v / s).collect()).collect())
}

fn parse_value(field: &str, line: u64, column: &str) -> Result<f64, DatasetError> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| DatasetError::parse(line, format!("column {column:?}: {field:?} is not a number")))?;
    if !v.is_finite() {
        return Err(DatasetError::parse(line, format!("column {column:?}: value {field:?} is not finite")));
    }
    if v < 0.0 {
        return Err(DatasetError::parse(line, format!("column {column:?}: negative value {v}")));
    }
    Ok(v)
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(source)
}

/// Reads a `dmu,x:...,y:...` table and returns the normalized dataset.
pub fn load_dataset<R: Read>(source: R) -> Result<Dataset, DatasetError> {
    let mut rdr = reader(source);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("dmu") {
        return Err(DatasetError::parse(1, "first header column must be `dmu`"));
    }
    enum Col {
        Input,
        Output,
    }
    let mut cols = Vec::new();
    let (mut input_names, mut output_names) = (Vec::new(), Vec::new());
    for h in header.iter().skip(1) {
        if let Some(name) = h.strip_prefix("x:") {
            input_names.push(name.to_string());
            cols.push(Col::Input);
        } else if let Some(name) = h.strip_prefix("y:") {
            output_names.push(name.to_string());
            cols.push(Col::Output);
        } else {
            return Err(DatasetError::parse(1, format!("header column {h:?} lacks an `x:` or `y:` prefix")));
        }
    }

    let (mut names, mut raw_inputs, mut raw_outputs) = (Vec::new(), Vec::new(), Vec::new());
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let name = record.get(0).unwrap_or_default();
        if name.is_empty() {
            return Err(DatasetError::parse(line, "empty DMU name"));
        }
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (k, col) in cols.iter().enumerate() {
            let field = record.get(k + 1).unwrap_or_default();
            let v = parse_value(field, line, &header[k + 1])?;
            match col {
                Col::Input => xs.push(v),
                Col::Output => ys.push(v),
            }
        }
        names.push(name.to_string());
        raw_inputs.push(xs);
        raw_outputs.push(ys);
    }
    Dataset::new(names, input_names, output_names, raw_inputs, raw_outputs)
}

/// Partition of DMUs into numbered type sets; ids run from 1 to `count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAssignment {
    groups: Vec<usize>,
    count: usize,
}

impl GroupAssignment {
    pub fn new(groups: Vec<usize>) -> Result<Self, DatasetError> {
        if groups.is_empty() {
            return Err(DatasetError::Validation("group assignment is empty".into()));
        }
        if groups.contains(&0) {
            return Err(DatasetError::Validation("group ids must be positive".into()));
        }
        let count = *groups.iter().max().unwrap_or(&0);
        let mut used = vec![false; count];
        for &g in &groups {
            used[g - 1] = true;
        }
        if let Some(g) = used.iter().position(|u| !u) {
            return Err(DatasetError::Validation(format!(
                "group ids must be contiguous from 1; id {} is unused",
                g + 1
            )));
        }
        Ok(GroupAssignment { groups, count })
    }

    /// Everyone in group 1.
    pub fn single(n: usize) -> Self {
        GroupAssignment { groups: vec![1; n], count: 1 }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn group_of(&self, dmu: usize) -> usize {
        self.groups[dmu]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.groups
    }

    pub fn same_group(&self, a: usize, b: usize) -> bool {
        self.groups[a] == self.groups[b]
    }

    pub fn write_csv<W: Write>(&self, names: &[String], writer: W) -> Result<(), DatasetError> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["dmu", "group"])?;
        for (name, g) in names.iter().zip(&self.groups) {
            out.write_record([name.as_str(), &g.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Reads a `dmu,group` table. Every name in `names` must appear exactly once.
pub fn load_groups<R: Read>(source: R, names: &[String]) -> Result<GroupAssignment, DatasetError> {
    let mut rdr = reader(source);
    let header = rdr.headers()?.clone();
    if header.len() != 2 || &header[0] != "dmu" || &header[1] != "group" {
        return Err(DatasetError::parse(1, "groups header must be `dmu,group`"));
    }
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut groups: Vec<Option<usize>> = vec![None; names.len()];
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let name = &record[0];
        let &i = index
            .get(name)
            .ok_or_else(|| DatasetError::Validation(format!("group file names unknown DMU {name:?}")))?;
        let g: usize = record[1]
            .parse()
            .map_err(|_| DatasetError::parse(line, format!("group id {:?} is not a positive integer", &record[1])))?;
        if groups[i].replace(g).is_some() {
            return Err(DatasetError::Validation(format!("DMU {name:?} is assigned twice")));
        }
    }
    let groups = groups
        .into_iter()
        .enumerate()
        .map(|(i, g)| g.ok_or_else(|| DatasetError::Validation(format!("DMU {:?} has no group", names[i]))))
        .collect::<Result<Vec<_>, _>>()?;
    GroupAssignment::new(groups)
}

/// Reads a square matrix whose cell (d, j) is evaluator d's score of target j.
pub fn load_matrix<R: Read>(source: R) -> Result<CrossEfficiencyMatrix, DatasetError> {
    let mut rdr = reader(source);
    let header = rdr.headers()?.clone();
    let targets: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = targets.len();
    if n == 0 {
        return Err(DatasetError::parse(1, "matrix header names no targets"));
    }
    let mut evaluators = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n * n);
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != n + 1 {
            return Err(DatasetError::Validation(format!(
                "matrix row at line {line} has {} cells, expected {}",
                record.len(),
                n + 1
            )));
        }
        evaluators.push(record[0].to_string());
        for (k, field) in record.iter().skip(1).enumerate() {
            let v = parse_value(field, line, &targets[k])?;
            if v > 1.0 + MATRIX_ENTRY_TOL {
                return Err(DatasetError::Validation(format!(
                    "matrix entry {v} at line {line}, target {:?} lies outside [0, 1]",
                    targets[k]
                )));
            }
            values.push(v);
        }
    }
    if evaluators.len() != n {
        return Err(DatasetError::Validation(format!(
            "matrix is not square: {} rows for {n} targets",
            evaluators.len()
        )));
    }
    if evaluators != targets {
        return Err(DatasetError::Validation("row names differ from column names".into()));
    }
    CrossEfficiencyMatrix::from_values(targets, values).map_err(|e| DatasetError::Validation(e.to_string()))
}

/// Writes a matrix in the format read by [`load_matrix`], bit-exact.
pub fn write_matrix<W: Write>(matrix: &CrossEfficiencyMatrix, writer: W) -> Result<(), DatasetError> {
    let mut out = csv::Writer::from_writer(writer);
    let mut header = vec!["evaluator".to_string()];
    header.extend(matrix.names().iter().cloned());
    out.write_record(&header)?;
    for d in 0..matrix.len() {
        let mut record = vec![matrix.names()[d].clone()];
        record.extend(matrix.row(d).iter().map(f64::to_string));
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "dmu,x:i1,x:i2,x:i3,y:o1,y:o2
DMU1,23,24,122,38,60
DMU2,60,40,150,45,85
DMU3,44,69,120,76,43
DMU4,40,30,70,52,42
DMU5,70,90,175,63,74
";

    #[test]
    fn loads_toy_file() {
        let ds = load_dataset(TOY.as_bytes()).unwrap();
        assert_eq!((ds.len(), ds.num_inputs(), ds.num_outputs()), (5, 3, 2));
        let col: Vec<f64> = ds.norm_inputs.iter().map(|r| r[0]).collect();
        let expect = [23.0 / 237.0, 60.0 / 237.0, 44.0 / 237.0, 40.0 / 237.0, 70.0 / 237.0];
        for (a, b) in col.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn columns_are_matched_by_prefix() {
        let shuffled = "dmu,y:o,x:a,x:b\nA,2,1,3\nB,4,1,1\n";
        let ds = load_dataset(shuffled.as_bytes()).unwrap();
        assert_eq!(ds.input_names, ["a", "b"]);
        assert_eq!(ds.raw_inputs[0], [1.0, 3.0]);
        assert_eq!(ds.raw_outputs[1], [4.0]);
        assert!(load_dataset("dmu,x:a,z\nA,1,1\n".as_bytes()).is_err());
    }

    #[test]
    fn single_and_identical_dmus() {
        let one = load_dataset("dmu,x:a,y:b\nA,5,7\n".as_bytes()).unwrap();
        assert_eq!(one.norm_inputs, [[1.0]]);
        assert_eq!(one.norm_outputs, [[1.0]]);
        let two = load_dataset("dmu,x:a,x:b,y:c\nA,3,4,9\nB,3,4,9\n".as_bytes()).unwrap();
        for row in two.norm_inputs.iter().chain(&two.norm_outputs) {
            assert!(row.iter().all(|&v| v == 0.5));
        }
    }

    #[test]
    fn rejects_bad_rows() {
        let zero_inputs = "dmu,x:a,x:b,y:c\nA,0,0,1\nB,1,1,1\n";
        assert!(matches!(load_dataset(zero_inputs.as_bytes()), Err(DatasetError::Validation(_))));
        let zero_column = "dmu,x:a,x:b,y:c\nA,1,0,1\nB,1,0,1\n";
        assert!(matches!(load_dataset(zero_column.as_bytes()), Err(DatasetError::Validation(_))));
        let negative = "dmu,x:a,y:c\nA,-1,1\n";
        assert!(matches!(load_dataset(negative.as_bytes()), Err(DatasetError::Parse { line: 2, .. })));
        let nan = "dmu,x:a,y:c\nA,NaN,1\n";
        assert!(matches!(load_dataset(nan.as_bytes()), Err(DatasetError::Parse { .. })));
        let dup = "dmu,x:a,y:c\nA,1,1\nA,2,2\n";
        assert!(matches!(load_dataset(dup.as_bytes()), Err(DatasetError::Validation(_))));
        let short = "dmu,x:a,y:c\nA,1\n";
        assert!(load_dataset(short.as_bytes()).is_err());
    }

    #[test]
    fn zero_cells_are_allowed() {
        let ds = load_dataset("dmu,x:a,x:b,y:c\nA,1,0,1\nB,0,2,1\n".as_bytes()).unwrap();
        assert_eq!(ds.norm_inputs[0], [1.0, 0.0]);
    }

    #[test]
    fn groups_round_trip_and_validation() {
        let names: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let g = load_groups("dmu,group\nC,1\nA,2\nB,1\n".as_bytes(), &names).unwrap();
        assert_eq!(g.as_slice(), [2, 1, 1]);
        assert_eq!(g.count(), 2);
        let mut buf = Vec::new();
        g.write_csv(&names, &mut buf).unwrap();
        assert_eq!(load_groups(buf.as_slice(), &names).unwrap(), g);

        assert!(load_groups("dmu,group\nA,1\nB,1\n".as_bytes(), &names).is_err());
        assert!(load_groups("dmu,group\nA,1\nB,3\nC,1\n".as_bytes(), &names).is_err());
        assert!(load_groups("dmu,group\nA,1\nA,1\nB,1\nC,1\n".as_bytes(), &names).is_err());
        assert!(load_groups("dmu,group\nA,0\nB,1\nC,1\n".as_bytes(), &names).is_err());
    }

    #[test]
    fn matrix_loading() {
        let m = load_matrix("evaluator,A,B\nA,1,0.5\nB,0.25,1\n".as_bytes()).unwrap();
        assert_eq!(m.get(1, 0), 0.25);
        let single = load_matrix(",A\nA,1.0\n".as_bytes()).unwrap();
        assert_eq!(single.len(), 1);
        assert!(load_matrix("e,A,B\nA,1,0.5\n".as_bytes()).is_err());
        assert!(load_matrix("e,A,B\nA,1,1.5\nB,0.2,1\n".as_bytes()).is_err());
        assert!(load_matrix("e,A,B\nA,1,0.5\nC,0.2,1\n".as_bytes()).is_err());
    }
}
