use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// Written into every output so that a file records how it was made.
#[derive(Serialize)]
pub struct Meta<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: Value,
}

impl<'a> Meta<'a> {
    pub fn new(command: &'a str, config: &impl Serialize) -> Self {
        Meta {
            tool: "quadvp",
            version: quadvp::VERSION,
            command,
            config: serde_json::to_value(config).expect("config serializes"),
        }
    }

    /// `key=value` lines for `#`-comment headers.
    pub fn comments(&self) -> Vec<String> {
        let mut out = vec![format!("{} {} {}", self.tool, self.version, self.command)];
        if let Value::Object(m) = &self.config {
            for (k, v) in m {
                out.push(format!("{k}={v}"));
            }
        }
        out
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    meta: &'a Meta<'a>,
    #[serde(flatten)]
    body: &'a T,
}

pub fn json<T: Serialize>(meta: &Meta, body: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { meta, body })?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// To `path` when given, else to stdout.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
