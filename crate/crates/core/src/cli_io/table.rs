use std::io::Write;

use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableMeta {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub config_hash: String,
}

impl TableMeta {
    pub fn new(subcommand: &str, config_hash: &str) -> Self {
        Self {
            tool: "softdress".into(),
            version: VERSION.into(),
            subcommand: subcommand.into(),
            config_hash: config_hash.into(),
        }
    }
}

/// Rectangular table of reals with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: TableMeta,
}

impl ResultTable {
    pub fn new(columns: &[&str], meta: TableMeta) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            meta,
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# {} {} {} config={}\n",
            self.meta.tool, self.meta.version, self.meta.subcommand, self.meta.config_hash
        );
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format_sci(*x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: super::config::OutputFormat) -> String {
        match format {
            super::config::OutputFormat::Csv => self.to_csv(),
            super::config::OutputFormat::Json => self.to_json(),
        }
    }

    /// Parses the CSV produced by [`ResultTable::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let prov = lines.next().ok_or("empty input")?;
        let fields: Vec<&str> = prov.trim_start_matches("# ").split(' ').collect();
        if fields.len() != 4 || !fields[3].starts_with("config=") {
            return Err(format!("bad provenance line `{prov}`"));
        }
        let meta = TableMeta {
            tool: fields[0].into(),
            version: fields[1].into(),
            subcommand: fields[2].into(),
            config_hash: fields[3].trim_start_matches("config=").into(),
        };
        let header = lines.next().ok_or("missing header")?;
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|c| c.parse::<f64>().map_err(|e| format!("row {i}: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != columns.len() {
                return Err(format!("row {i} has {} cells, expected {}", row.len(), columns.len()));
            }
            rows.push(row);
        }
        Ok(Self { columns, rows, meta })
    }

    pub fn write_to(&self, format: super::config::OutputFormat, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(self.render(format).as_bytes())
    }
}

/// Scientific notation, 12 significant digits, two-digit signed exponent.
pub fn format_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.11e}");
    let (mantissa, exp) = s.split_once('e').expect("LowerExp has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ResultTable {
        ResultTable::new(&["a", "b"], TableMeta::new("scan", "0123456789abcdef"))
    }

    #[test]
    fn sci_format() {
        assert_eq!(format_sci(1.25), "1.25000000000e+00");
        assert_eq!(format_sci(-0.000123), "-1.23000000000e-04");
        assert_eq!(format_sci(6.02e123), "6.02000000000e+123");
        assert_eq!(format_sci(0.0), "0.00000000000e+00");
    }

    #[test]
    fn empty_table_is_header_only() {
        let csv = table().to_csv();
        assert_eq!(csv, "# softdress 0.1.0 scan config=0123456789abcdef\na,b\n");
        let back = ResultTable::from_csv(&csv).unwrap();
        assert!(back.rows.is_empty());
    }

    #[test]
    fn csv_round_trip_to_printed_precision() {
        let mut t = table();
        t.push(vec![std::f64::consts::PI, -1e-300]);
        t.push(vec![123456.789, 0.1]);
        let back = ResultTable::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.meta, t.meta);
        for (r, o) in back.rows.iter().zip(&t.rows) {
            for (a, b) in r.iter().zip(o) {
                assert!(((a - b) / b).abs() < 1e-11);
            }
        }
        assert!(t.to_csv().ends_with('\n'));
    }

    #[test]
    fn json_shape() {
        let mut t = table();
        t.push(vec![1.0, 2.0]);
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["columns"][1], "b");
        assert_eq!(v["rows"][0][1], 2.0);
        assert_eq!(v["meta"]["config_hash"], "0123456789abcdef");
    }

    #[test]
    #[should_panic]
    fn ragged_rows_panic() {
        table().push(vec![1.0]);
    }
}
