use std::ffi::CStr;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// C `%.17g`, which round-trips every `f64`.
pub fn g17(v: f64) -> String {
    let mut buf = [0 as libc::c_char; 40];
    // SAFETY: the buffer is NUL-terminated by snprintf and large enough for
    // any %.17g rendering of a double (at most 24 bytes)
    unsafe {
        libc::snprintf(buf.as_mut_ptr(), buf.len(), c"%.17g".as_ptr(), v);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

/// `# header` followed by comma-separated rows.
pub fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = format!("# {header}\n");
    for row in rows {
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

/// Space-separated two-column text.
pub fn dat(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = format!("# {}\n", header.replace(',', " "));
    for row in rows {
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
