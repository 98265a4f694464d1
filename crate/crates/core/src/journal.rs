//! Storage port: named append-only streams of newline-delimited JSON
//! records, with an in-memory backend and a directory-of-files backend.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::StoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stream {
    Cases,
    Disposed,
    Assignments,
    Audit,
    Outbox,
}

impl Stream {
    pub const ALL: [Stream; 5] = [
        Stream::Cases,
        Stream::Disposed,
        Stream::Assignments,
        Stream::Audit,
        Stream::Outbox,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            Stream::Cases => "cases.ndjson",
            Stream::Disposed => "disposed.ndjson",
            Stream::Assignments => "assignments.ndjson",
            Stream::Audit => "audit.ndjson",
            Stream::Outbox => "outbox.ndjson",
        }
    }
}

pub trait StorageBackend: Send {
    /// Appends one record. `line` must not contain a newline.
    fn append(&mut self, stream: Stream, line: &str) -> Result<(), StoreError>;

    /// Every complete record in append order.
    fn read_all(&self, stream: Stream) -> Result<Vec<String>, StoreError>;
}

#[derive(Debug, Default, Clone)]
pub struct MemoryBackend {
    streams: BTreeMap<Stream, Vec<String>>,
}

impl MemoryBackend {
    pub fn new() -> Self {
        Self::default()
    }
}

impl StorageBackend for MemoryBackend {
    fn append(&mut self, stream: Stream, line: &str) -> Result<(), StoreError> {
        debug_assert!(!line.contains('\n'));
        self.streams
            .entry(stream)
            .or_default()
            .push(line.to_string());
        Ok(())
    }

    fn read_all(&self, stream: Stream) -> Result<Vec<String>, StoreError> {
        Ok(self.streams.get(&stream).cloned().unwrap_or_default())
    }
}

/// One `.ndjson` file per stream under a directory.
///
/// A trailing record without its terminating newline is a torn write; it is
/// cut off when the directory is opened so that later appends start on a
/// clean line.
#[derive(Debug)]
pub struct NdjsonBackend {
    dir: PathBuf,
    writers: HashMap<Stream, BufWriter<File>>,
    recovered: Vec<(Stream, usize)>,
}

impl NdjsonBackend {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let mut recovered = Vec::new();
        for stream in Stream::ALL {
            let path = dir.join(stream.file_name());
            if let Ok(bytes) = fs::read(&path) {
                let keep = bytes.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
                if keep < bytes.len() {
                    let file = OpenOptions::new().write(true).open(&path)?;
                    file.set_len(keep as u64)?;
                    recovered.push((stream, bytes.len() - keep));
                }
            }
        }
        Ok(Self {
            dir,
            writers: HashMap::new(),
            recovered,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Streams whose torn trailing record was dropped on open, with the
    /// number of bytes discarded.
    pub fn recovered(&self) -> &[(Stream, usize)] {
        &self.recovered
    }

    fn writer(&mut self, stream: Stream) -> Result<&mut BufWriter<File>, StoreError> {
        if !self.writers.contains_key(&stream) {
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(self.dir.join(stream.file_name()))?;
            self.writers.insert(stream, BufWriter::new(file));
        }
        Ok(self.writers.get_mut(&stream).expect("writer just inserted"))
    }
}

impl StorageBackend for NdjsonBackend {
    fn append(&mut self, stream: Stream, line: &str) -> Result<(), StoreError> {
        debug_assert!(!line.contains('\n'));
        let w = self.writer(stream)?;
        w.write_all(line.as_bytes())?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    fn read_all(&self, stream: Stream) -> Result<Vec<String>, StoreError> {
        let path = self.dir.join(stream.file_name());
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let complete = match text.rfind('\n') {
            Some(i) => &text[..i],
            None => return Ok(Vec::new()),
        };
        Ok(complete
            .split('\n')
            .filter(|l| !l.trim().is_empty())
            .map(str::to_string)
            .collect())
    }
}
