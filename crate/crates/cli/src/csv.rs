//! Minimal CSV emission with byte-stable number formatting.

/// One CSV field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    /// Printed with 17 significant digits.
    Real(f64),
    Int(i64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(v as i64)
    }
}

pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV document: manifest comment line, header, rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    name: String,
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(name: &str, echo: &str, header: &[&str]) -> Self {
        let mut text = String::new();
        text.push_str(echo);
        text.push('\n');
        text.push_str(&header.join(","));
        text.push('\n');
        Csv {
            name: name.to_string(),
            text,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        assert_eq!(cells.len(), self.columns, "row width must match header of {}", self.name);
        let fields: Vec<String> = cells
            .iter()
            .map(|c| match c {
                Cell::Real(v) => fmt_real(*v),
                Cell::Int(i) => i.to_string(),
            })
            .collect();
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}
