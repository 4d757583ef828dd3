//! Node covariate tables.
//!
//! Files are delimited text (comma, tab or whitespace, detected from the
//! header) with a header row naming the columns and one data row per node
//! in node-index order, or, when loaded against a graph's identifiers, an
//! `id` column naming each row's node. Column types are never guessed: they come from a
//! `# types: name:kind,...` line at the top of the file and/or an explicit
//! [`AttrSchema`] (usually the `--attr-types` flag), which wins on conflict.
//! Columns without a declared type are skipped. The literal `NA` marks a
//! missing cell.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use log::info;

use crate::error::{Error, Result};
use crate::graph::NodeIdMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Continuous,
    Binary,
    Categorical,
}

impl FromStr for ColumnKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "continuous" | "real" => Ok(ColumnKind::Continuous),
            "binary" => Ok(ColumnKind::Binary),
            "categorical" | "category" => Ok(ColumnKind::Categorical),
            other => Err(Error::Covariate(format!(
                "unknown column kind `{other}` (expected continuous, binary or categorical)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Continuous(Vec<f64>),
    Binary(Vec<u8>),
    Categorical(Vec<u32>),
}

impl ColumnData {
    pub fn kind(&self) -> ColumnKind {
        match self {
            ColumnData::Continuous(_) => ColumnKind::Continuous,
            ColumnData::Binary(_) => ColumnKind::Binary,
            ColumnData::Categorical(_) => ColumnKind::Categorical,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ColumnData::Continuous(v) => v.len(),
            ColumnData::Binary(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
    /// Per-node missing flags; empty when the column is complete.
    pub missing: Vec<bool>,
}

impl Column {
    pub fn has_missing(&self) -> bool {
        self.missing.iter().any(|&m| m)
    }

    pub fn is_missing(&self, i: usize) -> bool {
        self.missing.get(i).copied().unwrap_or(false)
    }
}

/// Declared column types, e.g. parsed from `age:continuous,class:categorical`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttrSchema(pub Vec<(String, ColumnKind)>);

impl AttrSchema {
    pub fn kind_of(&self, name: &str) -> Option<ColumnKind> {
        self.0.iter().rev().find(|(n, _)| n == name).map(|&(_, k)| k)
    }
}

impl FromStr for AttrSchema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (name, kind) = item.split_once(':').ok_or_else(|| {
                Error::Covariate(format!("attribute type `{item}` is not of the form name:kind"))
            })?;
            out.push((name.trim().to_owned(), kind.parse()?));
        }
        Ok(AttrSchema(out))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CovariateTable {
    n: usize,
    columns: Vec<Column>,
}

impl CovariateTable {
    /// An empty table for `n` nodes.
    pub fn empty(n: usize) -> Self {
        CovariateTable { n, columns: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn push(&mut self, column: Column) -> Result<()> {
        if column.data.len() != self.n {
            return Err(Error::Covariate(format!(
                "column `{}` has {} entries, expected {}",
                column.name,
                column.data.len(),
                self.n
            )));
        }
        if !column.missing.is_empty() && column.missing.len() != self.n {
            return Err(Error::Covariate(format!(
                "missing mask of column `{}` has wrong length",
                column.name
            )));
        }
        if self.column(&column.name).is_some() {
            return Err(Error::Covariate(format!("duplicate column `{}`", column.name)));
        }
        self.columns.push(column);
        Ok(())
    }

    pub fn with_continuous(mut self, name: &str, values: Vec<f64>) -> Result<Self> {
        self.push(Column {
            name: name.to_owned(),
            data: ColumnData::Continuous(values),
            missing: Vec::new(),
        })?;
        Ok(self)
    }

    pub fn with_binary(mut self, name: &str, values: Vec<u8>) -> Result<Self> {
        if values.iter().any(|&v| v > 1) {
            return Err(Error::Covariate(format!("binary column `{name}` holds a value other than 0/1")));
        }
        self.push(Column {
            name: name.to_owned(),
            data: ColumnData::Binary(values),
            missing: Vec::new(),
        })?;
        Ok(self)
    }

    pub fn with_categorical(mut self, name: &str, codes: Vec<u32>) -> Result<Self> {
        self.push(Column {
            name: name.to_owned(),
            data: ColumnData::Categorical(codes),
            missing: Vec::new(),
        })?;
        Ok(self)
    }

    /// Values of a complete continuous column.
    pub fn continuous(&self, name: &str) -> Result<&[f64]> {
        match self.complete_column(name)? {
            ColumnData::Continuous(v) => Ok(v),
            other => Err(wrong_kind(name, ColumnKind::Continuous, other.kind())),
        }
    }

    /// Codes of a complete categorical (or binary, widened) column.
    pub fn categories(&self, name: &str) -> Result<Vec<u32>> {
        match self.complete_column(name)? {
            ColumnData::Categorical(v) => Ok(v.clone()),
            ColumnData::Binary(v) => Ok(v.iter().map(|&b| b as u32).collect()),
            other => Err(wrong_kind(name, ColumnKind::Categorical, other.kind())),
        }
    }

    fn complete_column(&self, name: &str) -> Result<&ColumnData> {
        let col = self
            .column(name)
            .ok_or_else(|| Error::Covariate(format!("no covariate column named `{name}`")))?;
        if col.has_missing() {
            return Err(Error::Covariate(format!(
                "column `{name}` has missing values and cannot be used as a covariate"
            )));
        }
        Ok(&col.data)
    }
}

fn wrong_kind(name: &str, want: ColumnKind, got: ColumnKind) -> Error {
    Error::Covariate(format!("column `{name}` is {got:?}, expected {want:?}"))
}

enum Delim {
    Char(char),
    Whitespace,
}

impl Delim {
    fn detect(header: &str) -> Self {
        if header.contains(',') {
            Delim::Char(',')
        } else if header.contains('\t') {
            Delim::Char('\t')
        } else {
            Delim::Whitespace
        }
    }

    fn split<'a>(&self, line: &'a str) -> Vec<&'a str> {
        match self {
            Delim::Char(c) => line.split(*c).map(str::trim).collect(),
            Delim::Whitespace => line.split_whitespace().collect(),
        }
    }
}

pub fn load_covariates(path: impl AsRef<Path>, n: usize, schema: Option<&AttrSchema>) -> Result<CovariateTable> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_covariates(BufReader::new(f), path, n, schema)
}

/// Loads a covariate file whose rows are matched to graph nodes through an
/// `id` column. Without an `id` column the rows must be in node-index
/// order. Rows naming nodes absent from the graph are skipped.
pub fn load_covariates_by_id(path: impl AsRef<Path>, ids: &NodeIdMap, schema: Option<&AttrSchema>) -> Result<CovariateTable> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_rows(BufReader::new(f), path, ids.len(), schema, Some(ids))
}

pub fn parse_covariates<R: BufRead>(
    reader: R,
    origin: &Path,
    n: usize,
    schema: Option<&AttrSchema>,
) -> Result<CovariateTable> {
    parse_rows(reader, origin, n, schema, None)
}

fn parse_rows<R: BufRead>(
    reader: R,
    origin: &Path,
    n: usize,
    schema: Option<&AttrSchema>,
    ids: Option<&NodeIdMap>,
) -> Result<CovariateTable> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_owned(),
        line,
        message,
    };

    let mut file_schema = AttrSchema::default();
    let mut header: Option<(Vec<String>, Delim)> = None;
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(decl) = comment.trim().strip_prefix("types:") {
                file_schema = decl.parse().map_err(|e: Error| parse_err(lineno, e.to_string()))?;
            }
            continue;
        }
        match &header {
            None => {
                let delim = Delim::detect(trimmed);
                let names = delim.split(trimmed).into_iter().map(str::to_owned).collect();
                header = Some((names, delim));
            }
            Some((names, delim)) => {
                let cells = delim.split(trimmed);
                if cells.len() != names.len() {
                    return Err(parse_err(
                        lineno,
                        format!("expected {} cells, found {}", names.len(), cells.len()),
                    ));
                }
                rows.push((lineno, cells.into_iter().map(str::to_owned).collect()));
            }
        }
    }

    let (names, _) = header.ok_or_else(|| Error::Covariate(format!("{}: no header row", origin.display())))?;
    if let (Some(ids), Some(id_col)) = (ids, names.iter().position(|c| c == "id")) {
        rows = align_rows(rows, id_col, ids, origin)?;
    }
    if rows.len() != n {
        return Err(Error::Covariate(format!(
            "{}: {} data rows but the graph has {n} nodes",
            origin.display(),
            rows.len()
        )));
    }

    let mut table = CovariateTable::empty(n);
    for (c, name) in names.iter().enumerate() {
        let kind = schema
            .and_then(|s| s.kind_of(name))
            .or_else(|| file_schema.kind_of(name));
        let Some(kind) = kind else {
            info!("{}: skipping column `{name}` with no declared type", origin.display());
            continue;
        };
        let mut missing = vec![false; n];
        let mut cont = Vec::new();
        let mut ints = Vec::new();
        for (i, (lineno, cells)) in rows.iter().enumerate() {
            let cell = cells[c].as_str();
            if cell == "NA" {
                missing[i] = true;
                cont.push(0.0);
                ints.push(0u32);
                continue;
            }
            match kind {
                ColumnKind::Continuous => cont.push(cell.parse::<f64>().map_err(|_| {
                    parse_err(*lineno, format!("column `{name}`: `{cell}` is not a number"))
                })?),
                ColumnKind::Binary => match cell {
                    "0" => ints.push(0),
                    "1" => ints.push(1),
                    _ => {
                        return Err(parse_err(
                            *lineno,
                            format!("column `{name}`: `{cell}` is not binary (0/1)"),
                        ))
                    }
                },
                ColumnKind::Categorical => ints.push(cell.parse::<u32>().map_err(|_| {
                    parse_err(
                        *lineno,
                        format!("column `{name}`: `{cell}` is not a non-negative integer code"),
                    )
                })?),
            }
        }
        let data = match kind {
            ColumnKind::Continuous => ColumnData::Continuous(cont),
            ColumnKind::Binary => ColumnData::Binary(ints.into_iter().map(|v| v as u8).collect()),
            ColumnKind::Categorical => ColumnData::Categorical(ints),
        };
        let missing = if missing.iter().any(|&m| m) { missing } else { Vec::new() };
        table.push(Column {
            name: name.clone(),
            data,
            missing,
        })?;
    }
    if let Some(schema) = schema {
        for (name, _) in &schema.0 {
            if table.column(name).is_none() && !names.contains(name) {
                return Err(Error::Covariate(format!(
                    "{}: declared column `{name}` not present in header",
                    origin.display()
                )));
            }
        }
    }
    Ok(table)
}

/// Puts rows into node-index order using the `id` cell of each row.
fn align_rows(
    rows: Vec<(usize, Vec<String>)>,
    id_col: usize,
    ids: &NodeIdMap,
    origin: &Path,
) -> Result<Vec<(usize, Vec<String>)>> {
    let mut slots: Vec<Option<(usize, Vec<String>)>> = vec![None; ids.len()];
    let mut unknown = 0usize;
    for (lineno, cells) in rows {
        let Some(i) = ids.index_of(&cells[id_col]) else {
            unknown += 1;
            continue;
        };
        if slots[i].is_some() {
            return Err(Error::Parse {
                path: origin.to_owned(),
                line: lineno,
                message: format!("node `{}` listed twice", cells[id_col]),
            });
        }
        slots[i] = Some((lineno, cells));
    }
    if unknown > 0 {
        log::warn!("{}: skipped {unknown} row(s) for nodes not in the graph", origin.display());
    }
    let absent: Vec<&str> = (0..ids.len()).filter(|&i| slots[i].is_none()).map(|i| ids.name(i)).collect();
    if let Some(first) = absent.first() {
        return Err(Error::Covariate(format!(
            "{}: no row for {} graph node(s), e.g. `{first}`",
            origin.display(),
            absent.len()
        )));
    }
    Ok(slots.into_iter().map(|s| s.expect("checked")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(text: &str, n: usize, schema: &str) -> Result<CovariateTable> {
        let schema: AttrSchema = schema.parse().unwrap();
        parse_covariates(Cursor::new(text), Path::new("attrs.txt"), n, Some(&schema))
    }

    #[test]
    fn binary_outcome_column() {
        let t = parse("outcome\n1\n0\n1\n", 3, "outcome:binary").unwrap();
        assert_eq!(t.column("outcome").unwrap().data, ColumnData::Binary(vec![1, 0, 1]));
    }

    #[test]
    fn continuous_column() {
        let t = parse("age\n25.1\n23.84\n", 2, "age:continuous").unwrap();
        assert_eq!(t.continuous("age").unwrap(), &[25.1, 23.84]);
    }

    #[test]
    fn categorical_codes() {
        let text: String = std::iter::once("class".to_owned())
            .chain((0..18).map(|i| (i % 9).to_string()))
            .collect::<Vec<_>>()
            .join("\n");
        let t = parse(&text, 18, "class:categorical").unwrap();
        let mut codes = t.categories("class").unwrap();
        codes.sort_unstable();
        codes.dedup();
        assert_eq!(codes.len(), 9);
    }

    #[test]
    fn schema_line_in_file_and_delimiters() {
        let text = "# types: age:continuous\nage,class\n1.5,2\n2.5,3\n";
        let t = parse_covariates(Cursor::new(text), Path::new("a"), 2, None).unwrap();
        assert_eq!(t.columns().len(), 1, "undeclared column skipped");
        let t = parse("age\tclass\n1\t2\n3\t4\n", 2, "class:categorical,age:continuous").unwrap();
        assert_eq!(t.categories("class").unwrap(), vec![2, 4]);
    }

    #[test]
    fn row_count_mismatch() {
        assert!(matches!(parse("x\n1\n", 2, "x:binary"), Err(Error::Covariate(_))));
    }

    #[test]
    fn non_numeric_cell_has_location() {
        match parse("age\n1.0\nold\n", 2, "age:continuous") {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("age"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("b\n2\n", 1, "b:binary").is_err());
        assert!(parse("c\n-1\n", 1, "c:categorical").is_err());
    }

    #[test]
    fn missing_cells() {
        let t = parse("male\n1\nNA\n0\n", 3, "male:binary").unwrap();
        let col = t.column("male").unwrap();
        assert!(col.is_missing(1) && !col.is_missing(0));
        assert!(t.categories("male").is_err());
    }

    #[test]
    fn rows_aligned_by_id() {
        let g = crate::graph::parse_edge_list(Cursor::new("b a\na c\n"), Path::new("g"), false).unwrap();
        let schema: AttrSchema = "x:continuous".parse().unwrap();
        let text = "id,x\nc,3\na,1\nzz,9\nb,2\n";
        let t = parse_rows(Cursor::new(text), Path::new("attrs"), 3, Some(&schema), Some(&g.ids)).unwrap();
        // node order is b, a, c
        assert_eq!(t.continuous("x").unwrap(), &[2.0, 1.0, 3.0]);
        let short = "id,x\na,1\nb,2\n";
        assert!(parse_rows(Cursor::new(short), Path::new("attrs"), 3, Some(&schema), Some(&g.ids)).is_err());
        let dup = "id,x\na,1\nb,2\na,3\nc,1\n";
        assert!(matches!(
            parse_rows(Cursor::new(dup), Path::new("attrs"), 3, Some(&schema), Some(&g.ids)),
            Err(Error::Parse { line: 4, .. })
        ));
    }
}
