//! Artifact writing: temp file in the target directory, then rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::CliError;

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(io)?;
    let name = path.file_name().ok_or_else(|| CliError::Io(format!("{}: not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

/// Writes `contents` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut out = std::io::stdout().lock();
            let mut res = out.write_all(contents.as_bytes());
            if res.is_ok() && !contents.ends_with('\n') {
                res = out.write_all(b"\n");
            }
            match res {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(format!("stdout: {e}"))),
                _ => Ok(()),
            }
        }
    }
}

/// Artifact paths of one run, reported on stdout.
#[derive(Default)]
pub struct Written(Vec<PathBuf>);

impl Written {
    pub fn write(&mut self, dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
        let path = dir.join(name);
        write_atomic(&path, contents)?;
        self.0.push(path);
        Ok(())
    }

    pub fn report(&self) {
        for p in &self.0 {
            println!("wrote {}", p.display());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_and_leaves_no_temp() {
        let dir = std::env::temp_dir().join(format!("upade-out-{}", std::process::id()));
        let path = dir.join("nested/a.json");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        let names: Vec<_> = fs::read_dir(path.parent().unwrap()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
        fs::remove_dir_all(dir).unwrap();
    }
}
