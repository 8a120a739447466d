//! Output envelope and atomic file writes.

use serde::Serialize;
use std::io::{self, Write};
use std::path::Path;

pub const TOOL_NAME: &str = "vortex-releq";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: Tool = Tool {
    name: TOOL_NAME,
    version: TOOL_VERSION,
};

/// Every JSON output carries the tool version and the resolved run config.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub tool: &'a Tool,
    pub config: &'a C,
    pub result: R,
}

pub fn json_document<C: Serialize, R: Serialize>(config: &C, result: R) -> io::Result<Vec<u8>> {
    let env = Envelope {
        tool: &TOOL,
        config,
        result,
    };
    let mut buf = serde_json::to_vec_pretty(&env).map_err(io::Error::other)?;
    buf.push(b'\n');
    Ok(buf)
}

/// CSV preamble: `#`-prefixed tool and config lines.
pub fn csv_preamble<C: Serialize>(config: &C) -> io::Result<Vec<u8>> {
    let mut buf = Vec::new();
    writeln!(buf, "# {TOOL_NAME} {TOOL_VERSION}")?;
    writeln!(
        buf,
        "# config: {}",
        serde_json::to_string(config).map_err(io::Error::other)?
    )?;
    Ok(buf)
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match path {
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}
