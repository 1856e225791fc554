//! Pass-counting edge streams over in-memory edge lists or text files.
//!
//! A stream yields the edges of one *pass* in a fixed order and can be
//! rewound for the next pass. Starting to read a pass — even one that yields
//! no edges — counts it; rewinding alone does not. A partially read pass
//! counts like a full one, which matches the model's cost metric.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{Edge, VertexId};

/// Errors produced while reading an edge stream.
#[derive(Debug, Error)]
pub enum StreamError {
    /// A record in a file stream could not be parsed.
    #[error("malformed edge record at line {line}: {reason}")]
    Malformed {
        /// 1-based line number within the file.
        line: usize,
        /// Human-readable cause.
        reason: String,
    },
    /// An in-memory edge lies outside the declared vertex range.
    #[error("vertex {vertex} out of range for declared n = {n}")]
    VertexOutOfRange {
        /// Offending endpoint.
        vertex: VertexId,
        /// Declared number of vertices.
        n: usize,
    },
    /// Underlying I/O failure.
    #[error("i/o error reading edge stream: {0}")]
    Io(#[from] std::io::Error),
}

/// Opaque marker of a position in the stream, for diagnostics and traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamCursor {
    pass: u32,
    offset: u64,
}

impl StreamCursor {
    /// Pass this cursor belongs to (1-based; 0 before the first pass).
    #[must_use]
    pub fn pass(&self) -> u32 {
        self.pass
    }

    /// Position within the pass: edges yielded so far for memory streams,
    /// lines consumed for file streams.
    #[must_use]
    pub fn offset(&self) -> u64 {
        self.offset
    }
}

#[derive(Debug)]
enum Source {
    Memory {
        edges: Arc<Vec<Edge>>,
        pos: usize,
    },
    File {
        path: PathBuf,
        reader: Option<BufReader<File>>,
        line: usize,
        exhausted: bool,
    },
}

/// A sequential, rewindable stream of undirected edges over vertices `0..n`.
///
/// File-backed streams use a plain text format: one edge per line as two
/// whitespace-separated 1-based vertex ids (extra tokens ignored), with blank
/// lines and lines starting with `%` or `#` skipped. Self-loops are dropped
/// silently; duplicate edges are passed through. The edge order of a pass is
/// the line order of the file, identical on every pass.
#[derive(Debug)]
pub struct EdgeStream {
    source: Source,
    n: usize,
    passes_started: u32,
    in_pass: bool,
}

impl EdgeStream {
    /// Creates a stream over an in-memory edge list.
    ///
    /// # Errors
    ///
    /// Returns [`StreamError::VertexOutOfRange`] when an endpoint is ≥ `n`.
    pub fn in_memory(n: usize, edges: Vec<Edge>) -> Result<Self, StreamError> {
        Self::in_memory_shared(n, Arc::new(edges))
    }

    /// Creates a stream over a shared in-memory edge list (cheap to clone the
    /// backing storage across many runs).
    ///
    /// # Errors
    ///
    /// Returns [`StreamError::VertexOutOfRange`] when an endpoint is ≥ `n`.
    pub fn in_memory_shared(n: usize, edges: Arc<Vec<Edge>>) -> Result<Self, StreamError> {
        for e in edges.iter() {
            for vertex in [e.u, e.v] {
                if (vertex as usize) >= n {
                    return Err(StreamError::VertexOutOfRange { vertex, n });
                }
            }
        }
        Ok(Self {
            source: Source::Memory { edges, pos: 0 },
            n,
            passes_started: 0,
            in_pass: false,
        })
    }

    /// Opens a file-backed stream. When `n` is `None` it is inferred as the
    /// maximum vertex id present (an empty file yields `n = 0`); the inference
    /// prescan is not counted as a pass.
    ///
    /// # Errors
    ///
    /// Returns [`StreamError::Io`] for I/O failures and
    /// [`StreamError::Malformed`] for records that do not parse or that
    /// reference ids outside `1..=n` when `n` is declared.
    pub fn from_file(path: &Path, n: Option<usize>) -> Result<Self, StreamError> {
        let n = match n {
            Some(n) => n,
            None => {
                let mut max_id = 0usize;
                let reader = BufReader::new(File::open(path)?);
                let mut line_no = 0usize;
                for line in reader.lines() {
                    let line = line?;
                    line_no += 1;
                    if let Some((a, b)) = parse_record(&line, line_no, usize::MAX)? {
                        max_id = max_id.max(a as usize + 1).max(b as usize + 1);
                    }
                }
                max_id
            }
        };
        Ok(Self {
            source: Source::File {
                path: path.to_path_buf(),
                reader: None,
                line: 0,
                exhausted: false,
            },
            n,
            passes_started: 0,
            in_pass: false,
        })
    }

    /// Number of real vertices the stream is declared over.
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of passes started so far.
    #[must_use]
    pub fn passes_used(&self) -> u32 {
        self.passes_started
    }

    /// Current position, for diagnostics and budget traces.
    #[must_use]
    pub fn cursor(&self) -> StreamCursor {
        let offset = match &self.source {
            Source::Memory { pos, .. } => *pos as u64,
            Source::File { line, .. } => *line as u64,
        };
        StreamCursor {
            pass: self.passes_started,
            offset,
        }
    }

    /// Rewinds to the beginning of the stream. The next read starts a new pass.
    pub fn rewind(&mut self) {
        self.in_pass = false;
        match &mut self.source {
            Source::Memory { pos, .. } => *pos = 0,
            Source::File {
                reader,
                line,
                exhausted,
                ..
            } => {
                *reader = None;
                *line = 0;
                *exhausted = false;
            }
        }
    }

    /// Yields the next edge of the current pass, or `None` when the pass is
    /// exhausted. The first read attempt after construction or a rewind counts
    /// a new pass, even when it returns `None`.
    ///
    /// # Errors
    ///
    /// Returns [`StreamError::Malformed`] or [`StreamError::Io`] for
    /// file-backed streams.
    pub fn next_edge(&mut self) -> Result<Option<Edge>, StreamError> {
        if !self.in_pass {
            self.in_pass = true;
            self.passes_started += 1;
        }
        match &mut self.source {
            Source::Memory { edges, pos } => {
                if *pos < edges.len() {
                    let e = edges[*pos];
                    *pos += 1;
                    Ok(Some(e))
                } else {
                    Ok(None)
                }
            }
            Source::File {
                path,
                reader,
                line,
                exhausted,
            } => {
                if *exhausted {
                    return Ok(None);
                }
                if reader.is_none() {
                    *reader = Some(BufReader::new(File::open(path.as_path())?));
                    *line = 0;
                }
                let r = reader.as_mut().expect("reader was just ensured");
                let mut buf = String::new();
                loop {
                    buf.clear();
                    let read = r.read_line(&mut buf)?;
                    if read == 0 {
                        *exhausted = true;
                        *reader = None;
                        return Ok(None);
                    }
                    *line += 1;
                    if let Some((u, v)) = parse_record(&buf, *line, self.n)? {
                        if u == v {
                            continue; // self-loops dropped silently
                        }
                        return Ok(Some(Edge { u, v }));
                    }
                }
            }
        }
    }
}

/// Parses one line of the file format. Returns `None` for skippable lines
/// (blank, `%` or `#` comments). `n = usize::MAX` disables range validation
/// (used by the inference prescan). Ids are converted from 1-based to 0-based.
fn parse_record(
    line: &str,
    line_no: usize,
    n: usize,
) -> Result<Option<(VertexId, VertexId)>, StreamError> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('%') || trimmed.starts_with('#') {
        return Ok(None);
    }
    let mut tokens = trimmed.split_ascii_whitespace();
    let mut next_id = |which: &str| -> Result<VertexId, StreamError> {
        let tok = tokens.next().ok_or_else(|| StreamError::Malformed {
            line: line_no,
            reason: format!("missing {which} endpoint"),
        })?;
        let raw: u64 = tok.parse().map_err(|_| StreamError::Malformed {
            line: line_no,
            reason: format!("invalid integer `{tok}`"),
        })?;
        if raw == 0 {
            return Err(StreamError::Malformed {
                line: line_no,
                reason: "vertex ids are 1-based; 0 is not a valid id".to_string(),
            });
        }
        if n != usize::MAX && raw as usize > n {
            return Err(StreamError::Malformed {
                line: line_no,
                reason: format!("vertex id {raw} out of range 1..={n}"),
            });
        }
        Ok((raw - 1) as VertexId)
    };
    let u = next_id("first")?;
    let v = next_id("second")?;
    // Trailing tokens (weights, timestamps) are ignored.
    Ok(Some((u, v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(u: VertexId, v: VertexId) -> Edge {
        Edge::new(u, v).expect("test edges are loop-free")
    }

    #[test]
    fn memory_stream_counts_passes() {
        let mut s = EdgeStream::in_memory(3, vec![edge(0, 1), edge(1, 2)]).unwrap();
        assert_eq!(s.passes_used(), 0);
        assert_eq!(s.next_edge().unwrap(), Some(edge(0, 1)));
        assert_eq!(s.passes_used(), 1);
        assert_eq!(s.next_edge().unwrap(), Some(edge(1, 2)));
        assert_eq!(s.next_edge().unwrap(), None);
        assert_eq!(s.passes_used(), 1, "exhaustion does not start a new pass");
        s.rewind();
        assert_eq!(s.passes_used(), 1, "rewind alone does not count");
        assert_eq!(s.next_edge().unwrap(), Some(edge(0, 1)));
        assert_eq!(s.passes_used(), 2);
    }

    #[test]
    fn empty_stream_first_read_counts_one_pass() {
        let mut s = EdgeStream::in_memory(4, vec![]).unwrap();
        assert_eq!(s.next_edge().unwrap(), None);
        assert_eq!(s.passes_used(), 1);
        assert_eq!(s.next_edge().unwrap(), None);
        assert_eq!(s.passes_used(), 1);
    }

    #[test]
    fn partial_pass_counts_like_full() {
        let mut s = EdgeStream::in_memory(3, vec![edge(0, 1), edge(1, 2)]).unwrap();
        let _ = s.next_edge().unwrap();
        s.rewind();
        let _ = s.next_edge().unwrap();
        assert_eq!(s.passes_used(), 2);
    }

    #[test]
    fn memory_stream_validates_range() {
        let err = EdgeStream::in_memory(2, vec![edge(0, 5)]).unwrap_err();
        assert!(matches!(
            err,
            StreamError::VertexOutOfRange { vertex: 5, n: 2 }
        ));
    }

    #[test]
    fn cursor_reports_pass_and_offset() {
        let mut s = EdgeStream::in_memory(3, vec![edge(0, 1), edge(1, 2)]).unwrap();
        assert_eq!(s.cursor().pass(), 0);
        let _ = s.next_edge().unwrap();
        let c = s.cursor();
        assert_eq!(c.pass(), 1);
        assert_eq!(c.offset(), 1);
    }

    // ---- file format ----

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().expect("temp file");
        f.write_all(content.as_bytes()).expect("write temp");
        f.flush().expect("flush temp");
        f
    }

    #[test]
    fn file_stream_parses_and_normalizes_ids() {
        let f = write_temp("% comment\n1 2\n\n# another\n2 3 77 extra\n");
        let mut s = EdgeStream::from_file(f.path(), Some(3)).unwrap();
        assert_eq!(s.next_edge().unwrap(), Some(edge(0, 1)));
        assert_eq!(s.next_edge().unwrap(), Some(edge(1, 2)));
        assert_eq!(s.next_edge().unwrap(), None);
        assert_eq!(s.passes_used(), 1);
    }

    #[test]
    fn file_stream_infers_n_without_counting_a_pass() {
        let f = write_temp("1 2\n4 2\n");
        let s = EdgeStream::from_file(f.path(), None).unwrap();
        assert_eq!(s.n(), 4, "max id wins");
        assert_eq!(s.passes_used(), 0, "prescan is not a pass");
    }

    #[test]
    fn file_stream_drops_self_loops_silently() {
        let f = write_temp("1 1\n2 1\n");
        let mut s = EdgeStream::from_file(f.path(), Some(2)).unwrap();
        assert_eq!(s.next_edge().unwrap(), Some(edge(1, 0)));
        assert_eq!(s.next_edge().unwrap(), None);
    }

    #[test]
    fn file_stream_reports_malformed_line_numbers() {
        let f = write_temp("1 2\nnot numbers\n");
        let mut s = EdgeStream::from_file(f.path(), Some(2)).unwrap();
        let _ = s.next_edge().unwrap();
        let err = s.next_edge().unwrap_err();
        match err {
            StreamError::Malformed { line, reason } => {
                assert_eq!(line, 2);
                assert!(reason.contains("invalid integer"), "reason: {reason}");
            }
            other => panic!("expected Malformed, got {other:?}"),
        }
    }

    #[test]
    fn file_stream_rejects_out_of_range_ids() {
        let f = write_temp("1 9\n");
        let mut s = EdgeStream::from_file(f.path(), Some(3)).unwrap();
        let err = s.next_edge().unwrap_err();
        match err {
            StreamError::Malformed { line, reason } => {
                assert_eq!(line, 1);
                assert!(reason.contains("out of range"), "reason: {reason}");
            }
            other => panic!("expected Malformed, got {other:?}"),
        }
    }

    #[test]
    fn file_stream_rejects_zero_id() {
        let f = write_temp("0 2\n");
        let mut s = EdgeStream::from_file(f.path(), Some(3)).unwrap();
        let err = s.next_edge().unwrap_err();
        assert!(matches!(err, StreamError::Malformed { line: 1, .. }));
    }

    #[test]
    fn file_stream_missing_endpoint_is_malformed() {
        let f = write_temp("3\n");
        let mut s = EdgeStream::from_file(f.path(), Some(3)).unwrap();
        let err = s.next_edge().unwrap_err();
        match err {
            StreamError::Malformed { line, reason } => {
                assert_eq!(line, 1);
                assert!(reason.contains("missing second endpoint"), "reason: {reason}");
            }
            other => panic!("expected Malformed, got {other:?}"),
        }
    }

    #[test]
    fn file_stream_rewinds_to_identical_order() {
        let f = write_temp("1 2\n3 1\n2 3\n");
        let mut s = EdgeStream::from_file(f.path(), Some(3)).unwrap();
        let mut first = Vec::new();
        while let Some(e) = s.next_edge().unwrap() {
            first.push(e.normalized());
        }
        s.rewind();
        let mut second = Vec::new();
        while let Some(e) = s.next_edge().unwrap() {
            second.push(e.normalized());
        }
        assert_eq!(first, second);
        assert_eq!(s.passes_used(), 2);
    }

    #[test]
    fn empty_file_infers_zero_vertices() {
        let f = write_temp("% nothing here\n");
        let s = EdgeStream::from_file(f.path(), None).unwrap();
        assert_eq!(s.n(), 0);
    }
}
