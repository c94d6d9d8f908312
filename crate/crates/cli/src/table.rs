use std::fmt;

/// Fixed-width text table: right-aligned columns sized to their widest cell.
pub struct Table {
    heads: Vec<String>,
    rows: Vec<Vec<String>>,
    footer: Vec<String>,
}

impl Table {
    pub fn new(heads: &[&str]) -> Self {
        Self::owned(heads.iter().map(|h| h.to_string()).collect())
    }

    pub fn owned(heads: Vec<String>) -> Self {
        Table { heads, rows: Vec::new(), footer: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn footer(&mut self, line: String) {
        self.footer.push(line);
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let widths: Vec<usize> = (0..self.heads.len())
            .map(|c| self.rows.iter().filter_map(|r| r.get(c)).chain(std::iter::once(&self.heads[c])).map(|s| s.chars().count()).max().unwrap_or(0))
            .collect();
        let line = |f: &mut fmt::Formatter<'_>, cells: &[String]| -> fmt::Result {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            writeln!(f, "{}", parts.join("  "))
        };
        line(f, &self.heads)?;
        writeln!(f, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "))?;
        for r in &self.rows {
            line(f, r)?;
        }
        for l in &self.footer {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}
