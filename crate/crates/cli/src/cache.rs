//! Content-addressed on-disk cache of class tables.
//!
//! Each entry lives at `<root>/<sha256(kind|group_hash|params)>.jsonl`.
//! Writes go through a temporary file in the same directory and a rename,
//! so a reader sees either a complete entry or none. Entries that fail to
//! parse or disagree with their key are misses and get overwritten.

use schottky_core::geom::{enumerate_classes, ClassTable, SchottkyData};
use schottky_core::GeomError;
use sha2::{Digest, Sha256};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const CACHE_ENV: &str = "SCHOTTKY_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    /// Miss on a file that existed but could not be read back.
    Corrupt,
    /// Computed in memory; nothing persisted.
    Memory,
}

impl Lookup {
    pub fn as_str(self) -> &'static str {
        match self {
            Lookup::Hit => "hit",
            Lookup::Miss => "miss",
            Lookup::Corrupt => "corrupt",
            Lookup::Memory => "memory",
        }
    }
}

#[derive(Debug)]
pub struct Cache {
    root: Option<PathBuf>,
}

impl Cache {
    /// Root from the flag, then the environment, then the temp dir.
    pub fn new(flag: Option<&Path>, disabled: bool) -> Self {
        if disabled {
            return Self { root: None };
        }
        let root = flag
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .unwrap_or_else(|| std::env::temp_dir().join("schottky-cache"));
        Self { root: Some(root) }
    }

    pub fn in_memory() -> Self {
        Self { root: None }
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    pub fn key(kind: &str, group_hash: &str, params: &str) -> String {
        let mut h = Sha256::new();
        h.update(kind.as_bytes());
        h.update(b"|");
        h.update(group_hash.as_bytes());
        h.update(b"|");
        h.update(params.as_bytes());
        hex::encode(h.finalize())
    }

    pub fn path_for(&self, key: &str) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(format!("{key}.jsonl")))
    }

    /// Class table of `group` to `n_max`, from disk when a valid entry exists.
    pub fn class_table(
        &self,
        group: &SchottkyData,
        n_max: usize,
    ) -> Result<(ClassTable, Lookup), GeomError> {
        let key = Self::key("classes", group.content_hash(), &format!("n_max={n_max}"));
        let Some(path) = self.path_for(&key) else {
            return Ok((enumerate_classes(group, n_max)?, Lookup::Memory));
        };
        let mut status = Lookup::Miss;
        if path.exists() {
            match read_table(&path) {
                Ok(t) if t.group_hash == group.content_hash() && t.n_max == n_max => {
                    return Ok((t, Lookup::Hit));
                }
                _ => status = Lookup::Corrupt,
            }
        }
        let table = enumerate_classes(group, n_max)?;
        if let Err(e) = write_atomic(&path, &table) {
            eprintln!(
                "warning: cache directory {} is not writable ({e}); keeping the table in memory",
                path.parent().map(Path::display).map(|d| d.to_string()).unwrap_or_default()
            );
            status = Lookup::Memory;
        }
        Ok((table, status))
    }
}

fn read_table(path: &Path) -> Result<ClassTable, String> {
    let f = File::open(path).map_err(|e| e.to_string())?;
    ClassTable::read_jsonl(BufReader::new(f))
}

fn write_atomic(path: &Path, table: &ClassTable) -> std::io::Result<()> {
    let dir = path.parent().expect("cache paths have a parent");
    fs::create_dir_all(dir)?;
    let tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        table.write_jsonl(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group() -> SchottkyData {
        SchottkyData::symmetric(2, 2.0, 0.3).unwrap()
    }

    #[test]
    fn keys_separate_parameters() {
        let a = Cache::key("classes", "h", "n_max=4");
        assert_ne!(a, Cache::key("classes", "h", "n_max=5"));
        assert_ne!(a, Cache::key("classes", "g", "n_max=4"));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn miss_then_hit_then_recover_from_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(dir.path()), false);
        let g = group();
        let (fresh, s1) = cache.class_table(&g, 5).unwrap();
        assert_eq!(s1, Lookup::Miss);
        let (again, s2) = cache.class_table(&g, 5).unwrap();
        assert_eq!(s2, Lookup::Hit);
        assert_eq!(fresh, again);

        let key = Cache::key("classes", g.content_hash(), "n_max=5");
        let path = cache.path_for(&key).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, &text[..text.len() / 2]).unwrap();
        let (recomputed, s3) = cache.class_table(&g, 5).unwrap();
        assert_eq!(s3, Lookup::Corrupt);
        assert_eq!(recomputed, fresh);
        assert_eq!(fs::read_to_string(&path).unwrap(), text);
    }

    #[test]
    fn unwritable_root_falls_back_to_memory() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let cache = Cache::new(Some(&blocker.join("sub")), false);
        let (t, s) = cache.class_table(&group(), 3).unwrap();
        assert_eq!(s, Lookup::Memory);
        assert!(!t.is_empty());
    }
}
