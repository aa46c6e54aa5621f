//! Shared delimited file formats.
//!
//! Human and simulated data use the same schemas so every analysis runs
//! unchanged on either source:
//!
//! | file | header |
//! |------|--------|
//! | ideas | `participant,role,trial,condition,round,turn,bin,text` |
//! | tallies | `trial,condition,round,alter,followers` |
//! | ratings | `trial,condition,round,ego,alter,rating` |
//! | alter script | `alter,round,bin,text` |
//! | scores | `participant,round,metric,value` |
//! | gini | `trial,condition,round,scope,gini` |
//!
//! Quoting follows RFC 4180. The `bin` column of the idea file may be absent
//! (bins are then unknown) and external layouts can be adapted with a
//! [`ColumnMapping`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const MAX_ROUND: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Alter,
    Ego,
}

impl Role {
    /// Default non-redundancy threshold: alters are pooled among six peers
    /// and count an idea only when unique; egos tolerate one duplicate.
    pub fn default_threshold(self) -> usize {
        match self {
            Role::Alter => 1,
            Role::Ego => 2,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Alter => "alter",
            Role::Ego => "ego",
        })
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "alter" => Ok(Role::Alter),
            "ego" => Ok(Role::Ego),
            other => Err(format!("unknown role {other:?}")),
        }
    }
}

/// Study condition: which follower counts the egos see.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    /// No follower counts shown.
    C1,
    /// Counts recorded in C1, shown as is.
    C2,
    /// Tier-1 and tier-2 counts exchanged.
    C3,
    /// Counts shown in reverse popularity order.
    C4,
}

impl Condition {
    pub const ALL: [Condition; 4] = [Condition::C1, Condition::C2, Condition::C3, Condition::C4];

    /// Zero-based position in [`Condition::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn shows_signals(self) -> bool {
        self != Condition::C1
    }

    pub fn label(self) -> &'static str {
        match self {
            Condition::C1 => "C1",
            Condition::C2 => "C2",
            Condition::C3 => "C3",
            Condition::C4 => "C4",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().trim_start_matches('C') {
            "1" => Ok(Condition::C1),
            "2" => Ok(Condition::C2),
            "3" => Ok(Condition::C3),
            "4" => Ok(Condition::C4),
            _ => Err(format!("unknown condition {s:?}")),
        }
    }
}

/// One submitted idea.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdeaRecord {
    pub participant: String,
    pub role: Role,
    pub trial: u32,
    /// Always `None` for alters.
    pub condition: Option<Condition>,
    pub round: u8,
    pub turn: u8,
    pub text: String,
    pub bin: Option<String>,
}

impl IdeaRecord {
    pub fn validate(&self) -> Result<(), String> {
        if self.participant.trim().is_empty() {
            return Err("empty participant id".into());
        }
        if !(1..=MAX_ROUND).contains(&self.round) {
            return Err(format!("round {} outside 1..={MAX_ROUND}", self.round));
        }
        if !(1..=2).contains(&self.turn) {
            return Err(format!("turn {} is not 1 or 2", self.turn));
        }
        match (self.role, self.condition) {
            (Role::Alter, Some(c)) => Err(format!("alter carries condition {c}")),
            (Role::Ego, None) => Err("ego without condition".into()),
            _ => Ok(()),
        }
    }

    /// The bin id, treating an empty string as missing.
    pub fn bin(&self) -> Option<&str> {
        self.bin.as_deref().map(str::trim).filter(|b| !b.is_empty())
    }
}

/// A problem with one data row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaViolation {
    /// 1-based line in the file (the header is line 1).
    pub line: u64,
    pub message: String,
}

impl fmt::Display for SchemaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "row {}: {}", self.line, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("missing column(s): {}", .0.join(", "))]
    MissingColumns(Vec<String>),
    #[error("{} schema violation(s):\n{}", .0.len(), .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Schema(Vec<SchemaViolation>),
}

impl From<csv::Error> for DatasetError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map_or(0, |p| p.line());
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => DatasetError::Io(io),
                _ => unreachable!("checked is_io_error"),
            }
        } else {
            DatasetError::Schema(vec![SchemaViolation {
                line,
                message: e.to_string(),
            }])
        }
    }
}

/// Renames external column headers onto the canonical ones.
///
/// Keys are canonical names (`participant`, `bin`, ...), values the header
/// used by the source file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMapping {
    #[serde(default)]
    pub columns: BTreeMap<String, String>,
}

impl ColumnMapping {
    fn source_name<'a>(&'a self, canonical: &'a str) -> &'a str {
        self.columns.get(canonical).map(String::as_str).unwrap_or(canonical)
    }
}

/// Resolved column positions for one file.
struct Columns {
    idx: HashMap<&'static str, usize>,
}

impl Columns {
    fn resolve(
        headers: &csv::StringRecord,
        required: &[&'static str],
        optional: &[&'static str],
        mapping: &ColumnMapping,
    ) -> Result<Self, DatasetError> {
        let mut idx = HashMap::new();
        let mut missing = Vec::new();
        let find = |name: &str| headers.iter().position(|h| h.trim() == mapping.source_name(name));
        for &name in required {
            match find(name) {
                Some(i) => {
                    idx.insert(name, i);
                }
                None => missing.push(mapping.source_name(name).to_string()),
            }
        }
        if !missing.is_empty() {
            return Err(DatasetError::MissingColumns(missing));
        }
        for &name in optional {
            if let Some(i) = find(name) {
                idx.insert(name, i);
            }
        }
        Ok(Columns { idx })
    }

    fn has(&self, name: &str) -> bool {
        self.idx.contains_key(name)
    }

    fn get<'r>(&self, record: &'r csv::StringRecord, name: &str) -> &'r str {
        self.idx.get(name).and_then(|&i| record.get(i)).unwrap_or("").trim()
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::None)
        .from_reader(input)
}

/// Reads every row, collecting all violations before failing.
fn read_rows<R: Read, T>(
    input: R,
    required: &[&'static str],
    optional: &[&'static str],
    mapping: &ColumnMapping,
    mut parse: impl FnMut(&Columns, &csv::StringRecord) -> Result<T, String>,
) -> Result<(Vec<T>, bool), DatasetError> {
    let mut rdr = reader(input);
    let headers = rdr.headers()?.clone();
    let columns = Columns::resolve(&headers, required, optional, mapping)?;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        match parse(&columns, &record) {
            Ok(row) => rows.push(row),
            Err(message) => violations.push(SchemaViolation { line, message }),
        }
    }
    if violations.is_empty() {
        let has_all_optional = optional.iter().all(|c| columns.has(c));
        Ok((rows, has_all_optional))
    } else {
        Err(DatasetError::Schema(violations))
    }
}

fn parse_field<T: FromStr>(cols: &Columns, rec: &csv::StringRecord, name: &str) -> Result<T, String> {
    let raw = cols.get(rec, name);
    raw.parse()
        .map_err(|_| format!("column `{name}`: cannot parse {raw:?}"))
}

fn parse_condition(raw: &str) -> Result<Option<Condition>, String> {
    if raw.is_empty() || raw == "-" {
        Ok(None)
    } else {
        raw.parse().map(Some)
    }
}

/// Ideas read from a dataset, and whether the file carried a `bin` column.
#[derive(Debug, Clone, Default)]
pub struct IdeaDataset {
    pub records: Vec<IdeaRecord>,
    pub has_bins: bool,
}

pub fn read_ideas<R: Read>(input: R, mapping: &ColumnMapping) -> Result<IdeaDataset, DatasetError> {
    const REQUIRED: [&str; 7] = ["participant", "role", "trial", "condition", "round", "turn", "text"];
    let (records, has_bins) = read_rows(input, &REQUIRED, &["bin"], mapping, |cols, rec| {
        let record = IdeaRecord {
            participant: cols.get(rec, "participant").to_string(),
            role: cols.get(rec, "role").parse()?,
            trial: parse_field(cols, rec, "trial")?,
            condition: parse_condition(cols.get(rec, "condition"))?,
            round: parse_field(cols, rec, "round")?,
            turn: parse_field(cols, rec, "turn")?,
            text: cols.get(rec, "text").to_string(),
            bin: Some(cols.get(rec, "bin").to_string()).filter(|b| !b.is_empty()),
        };
        record.validate()?;
        Ok(record)
    })?;
    Ok(IdeaDataset { records, has_bins })
}

pub fn write_ideas<W: Write>(out: W, records: &[IdeaRecord]) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "participant",
        "role",
        "trial",
        "condition",
        "round",
        "turn",
        "bin",
        "text",
    ])?;
    for r in records {
        w.write_record([
            r.participant.as_str(),
            &r.role.to_string(),
            &r.trial.to_string(),
            r.condition.map_or("", Condition::label),
            &r.round.to_string(),
            &r.turn.to_string(),
            r.bin.as_deref().unwrap_or(""),
            r.text.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TallyRow {
    pub trial: u32,
    pub condition: Condition,
    pub round: u8,
    pub alter: String,
    pub followers: u64,
}

pub fn read_tallies<R: Read>(input: R, mapping: &ColumnMapping) -> Result<Vec<TallyRow>, DatasetError> {
    const REQUIRED: [&str; 5] = ["trial", "condition", "round", "alter", "followers"];
    Ok(read_rows(input, &REQUIRED, &[], mapping, |cols, rec| {
        let round: u8 = parse_field(cols, rec, "round")?;
        if !(1..=MAX_ROUND).contains(&round) {
            return Err(format!("round {round} outside 1..={MAX_ROUND}"));
        }
        let alter = cols.get(rec, "alter").to_string();
        if alter.is_empty() {
            return Err("empty alter id".into());
        }
        Ok(TallyRow {
            trial: parse_field(cols, rec, "trial")?,
            condition: cols.get(rec, "condition").parse()?,
            round,
            alter,
            followers: parse_field(cols, rec, "followers")?,
        })
    })?
    .0)
}

pub fn write_tallies<W: Write>(out: W, rows: &[TallyRow]) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "condition", "round", "alter", "followers"])?;
    for r in rows {
        w.write_record([
            r.trial.to_string(),
            r.condition.to_string(),
            r.round.to_string(),
            r.alter.clone(),
            r.followers.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingRow {
    pub trial: u32,
    pub condition: Condition,
    pub round: u8,
    pub ego: String,
    pub alter: String,
    pub rating: u8,
}

pub fn read_ratings<R: Read>(input: R, mapping: &ColumnMapping) -> Result<Vec<RatingRow>, DatasetError> {
    const REQUIRED: [&str; 6] = ["trial", "condition", "round", "ego", "alter", "rating"];
    Ok(read_rows(input, &REQUIRED, &[], mapping, |cols, rec| {
        let rating: u8 = parse_field(cols, rec, "rating")?;
        if !(1..=5).contains(&rating) {
            return Err(format!("rating {rating} outside 1..=5"));
        }
        Ok(RatingRow {
            trial: parse_field(cols, rec, "trial")?,
            condition: cols.get(rec, "condition").parse()?,
            round: parse_field(cols, rec, "round")?,
            ego: cols.get(rec, "ego").to_string(),
            alter: cols.get(rec, "alter").to_string(),
            rating,
        })
    })?
    .0)
}

pub fn write_ratings<W: Write>(out: W, rows: &[RatingRow]) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "condition", "round", "ego", "alter", "rating"])?;
    for r in rows {
        w.write_record([
            r.trial.to_string(),
            r.condition.to_string(),
            r.round.to_string(),
            r.ego.clone(),
            r.alter.clone(),
            r.rating.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One scripted alter idea.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlterIdea {
    pub alter: String,
    pub round: u8,
    pub bin: String,
    pub text: String,
}

pub fn read_alter_script<R: Read>(input: R) -> Result<Vec<AlterIdea>, DatasetError> {
    const REQUIRED: [&str; 4] = ["alter", "round", "bin", "text"];
    Ok(
        read_rows(input, &REQUIRED, &[], &ColumnMapping::default(), |cols, rec| {
            let alter = cols.get(rec, "alter").to_string();
            let bin = cols.get(rec, "bin").to_string();
            if alter.is_empty() || bin.is_empty() {
                return Err("alter and bin must be non-empty".into());
            }
            Ok(AlterIdea {
                alter,
                round: parse_field(cols, rec, "round")?,
                bin,
                text: cols.get(rec, "text").to_string(),
            })
        })?
        .0,
    )
}

pub fn write_alter_script<W: Write>(out: W, ideas: &[AlterIdea]) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alter", "round", "bin", "text"])?;
    for i in ideas {
        w.write_record([i.alter.clone(), i.round.to_string(), i.bin.clone(), i.text.clone()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub participant: String,
    pub round: u8,
    pub metric: String,
    pub value: f64,
}

/// Writes scores; values use six significant digits.
pub fn write_scores<W: Write>(out: W, rows: &[ScoreRow]) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["participant", "round", "metric", "value"])?;
    for r in rows {
        w.write_record([
            r.participant.clone(),
            r.round.to_string(),
            r.metric.clone(),
            format_sig(r.value),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scores<R: Read>(input: R) -> Result<Vec<ScoreRow>, DatasetError> {
    Ok(read_rows(
        input,
        &["participant", "round", "metric", "value"],
        &[],
        &ColumnMapping::default(),
        |cols, rec| {
            Ok(ScoreRow {
                participant: cols.get(rec, "participant").to_string(),
                round: parse_field(cols, rec, "round")?,
                metric: cols.get(rec, "metric").to_string(),
                value: parse_field(cols, rec, "value")?,
            })
        },
    )?
    .0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GiniRow {
    pub trial: u32,
    pub condition: Condition,
    pub round: u8,
    pub scope: String,
    pub gini: f64,
}

pub fn write_gini<W: Write>(out: W, rows: &[GiniRow]) -> Result<(), DatasetError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trial", "condition", "round", "scope", "gini"])?;
    for r in rows {
        w.write_record([
            r.trial.to_string(),
            r.condition.to_string(),
            r.round.to_string(),
            r.scope.clone(),
            format_sig(r.gini),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Formats a float with six significant digits, `%g` style.
pub fn format_sig(x: f64) -> String {
    const DIGITS: i32 = 6;
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Exponent after rounding to the requested precision.
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
