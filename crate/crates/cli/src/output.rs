//! Writing outputs with their provenance.

use std::path::{Path, PathBuf};

use repairshop::genlab::GenParams;
use repairshop::io::{sidecar_path, Provenance};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Failure(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))
}

/// Writes `path` and its `.provenance.json` sidecar.
pub fn write_with_sidecar(
    path: &Path,
    contents: &str,
    seed: u64,
    params: Option<GenParams>,
    config: &Map<String, Value>,
) -> Result<PathBuf, CliError> {
    write_file(path, contents)?;
    let mut prov = Provenance::new(seed, params);
    prov.config = config.clone();
    let side = sidecar_path(path);
    write_file(&side, &prov.to_json())?;
    Ok(side)
}

/// CSV text preceded by `# schema:` and `# config:` comment lines.
pub struct CsvDoc {
    schema: &'static str,
    config: String,
    writer: csv::Writer<Vec<u8>>,
}

impl CsvDoc {
    pub fn new(schema: &'static str, config: &Map<String, Value>, header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { schema, config: serde_json::to_string(config).expect("config serializes"), writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn finish(self) -> String {
        let body = String::from_utf8(self.writer.into_inner().expect("in-memory flush")).expect("fields are utf-8");
        format!("# schema: {}\n# config: {}\n{body}", self.schema, self.config)
    }
}

/// Pretty JSON with a trailing newline.
pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Shortest round-trip form; empty for NaN.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x}")
    }
}

pub fn ms(x: f64) -> String {
    format!("{x:.3}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_schema_and_config_lines() {
        let mut cfg = Map::new();
        cfg.insert("reps".into(), Value::from(3));
        let mut doc = CsvDoc::new("repairshop-test/1", &cfg, &["a", "b"]);
        doc.row(["1", "x,y"]);
        assert_eq!(doc.finish(), "# schema: repairshop-test/1\n# config: {\"reps\":3}\na,b\n1,\"x,y\"\n");
    }

    #[test]
    fn numbers() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(f64::NAN), "");
        assert_eq!(ms(1.23456), "1.235");
    }
}
