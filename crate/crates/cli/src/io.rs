use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use perisplit::partition::{Partition, Provenance};
use perisplit::Point;
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Deserialize)]
struct JsonPoints {
    points: Vec<[f64; 2]>,
}

/// Reads a CSV or JSON point file. JSON is recognised by a leading `{`.
pub fn read_points(path: &Path) -> Result<Vec<Point>, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let pts = if text.trim_start().starts_with('{') {
        parse_json(&text)
    } else {
        parse_csv(&text)
    }
    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if pts.len() < 2 {
        return Err(Failure::input(format!(
            "{}: need at least two points, got {}",
            path.display(),
            pts.len()
        )));
    }
    Ok(pts)
}

pub fn parse_json(text: &str) -> Result<Vec<Point>, String> {
    let doc: JsonPoints =
        serde_json::from_str(text).map_err(|e| format!("line {}: {e}", e.line()))?;
    doc.points
        .iter()
        .enumerate()
        .map(|(i, &[x, y])| {
            if x.is_finite() && y.is_finite() {
                Ok(Point::new(x, y, i))
            } else {
                Err(format!("point {i}: non-finite coordinate"))
            }
        })
        .collect()
}

pub fn parse_csv(text: &str) -> Result<Vec<Point>, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut pts = Vec::new();
    let mut first = true;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let header = std::mem::take(&mut first);
        if rec.len() != 2 {
            return Err(format!(
                "line {line}: expected 2 fields, found {}",
                rec.len()
            ));
        }
        let x = rec[0].parse::<f64>();
        let y = rec[1].parse::<f64>();
        match (x, y) {
            (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => {
                let id = pts.len();
                pts.push(Point::new(x, y, id));
            }
            (Ok(_), Ok(_)) => return Err(format!("line {line}: non-finite coordinate")),
            _ if header => {}
            _ => {
                return Err(format!(
                    "line {line}: cannot parse {:?} as x,y",
                    rec.as_slice()
                ))
            }
        }
    }
    Ok(pts)
}

pub fn points_csv(points: &[Point]) -> String {
    let mut out = String::from("x,y\n");
    for p in points {
        writeln!(out, "{},{}", p.x, p.y).unwrap();
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timings {
    pub branch_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub algo: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    pub profile: String,
    pub grid: usize,
    pub backend: String,
    pub refinement: u32,
    pub threads: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultFile {
    pub cost: f64,
    pub per_left: f64,
    pub per_right: f64,
    pub left_ids: Vec<usize>,
    pub right_ids: Vec<usize>,
    pub provenance: Provenance,
    pub timings: Timings,
    pub config: RunConfig,
}

impl ResultFile {
    pub fn new(p: Partition, timings: Timings, config: RunConfig) -> Self {
        Self {
            cost: p.cost,
            per_left: p.per_left,
            per_right: p.per_right,
            left_ids: p.left_ids,
            right_ids: p.right_ids,
            provenance: p.provenance,
            timings,
            config,
        }
    }
}

/// Only the fields needed to check or draw a partition.
#[derive(Debug, Clone, Deserialize)]
pub struct ResultIds {
    pub cost: f64,
    #[serde(default)]
    pub per_left: Option<f64>,
    #[serde(default)]
    pub per_right: Option<f64>,
    pub left_ids: Vec<usize>,
    pub right_ids: Vec<usize>,
}

pub fn read_result(path: &Path) -> Result<ResultIds, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Err(Failure::usage(format!(
            "{}: empty result file",
            path.display()
        )));
    }
    serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: line {}: {e}", path.display(), e.line())))
}

pub fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}
