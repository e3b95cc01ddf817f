//! Minimal CSV emission: comma separator, header row, `.` decimal point,
//! full double precision (shortest representation that round-trips).

use crate::error::Result;
use std::io::Write;
use std::path::Path;

/// In-memory CSV table with a fixed header.
#[derive(Debug, Clone)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: Vec<String>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, fields: Vec<String>) {
        debug_assert_eq!(fields.len(), self.header.len());
        self.rows.push(fields);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Shortest decimal form that parses back to the identical double.
pub fn format_f64(x: f64) -> String {
    format!("{x}")
}

pub fn write_csv(csv: &Csv, path: &Path) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(csv.render().as_bytes())?;
    Ok(())
}
