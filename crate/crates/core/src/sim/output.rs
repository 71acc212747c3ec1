//! CSV records and binary matrix dumps.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use faer::Mat;
use num_complex::Complex64;

use crate::effective::{EffChannelMatrix, ReceiverKind};
use crate::error::{Error, Result};
use crate::grid::GridParams;

pub const CSV_HEADER: &str = "preset,receiver,M,N,L,P1,P2,snr_db,frames,total_bits,bit_errors,ber,seed,wall_s";

/// One SNR point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct BerRecord {
    pub preset: String,
    pub receiver: String,
    pub m: usize,
    pub n: usize,
    /// Sub-surface count, 0 without RIS.
    pub l: usize,
    pub p1: usize,
    pub p2: usize,
    pub snr_db: f64,
    pub frames: u64,
    pub total_bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub seed: u64,
    pub wall_s: f64,
}

/// Float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl BerRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.preset,
            self.receiver,
            self.m,
            self.n,
            self.l,
            self.p1,
            self.p2,
            fmt_f64(self.snr_db),
            self.frames,
            self.total_bits,
            self.bit_errors,
            fmt_f64(self.ber),
            self.seed,
            fmt_f64(self.wall_s)
        )
    }

    pub fn from_csv_row(row: &str) -> Result<Self> {
        let f: Vec<&str> = row.trim_end().split(',').collect();
        if f.len() != 14 {
            return Err(Error::Parameter(format!("expected 14 CSV fields, got {}", f.len())));
        }
        fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Parameter(format!("bad CSV field '{s}'")))
        }
        Ok(BerRecord {
            preset: f[0].into(),
            receiver: f[1].into(),
            m: num(f[2])?,
            n: num(f[3])?,
            l: num(f[4])?,
            p1: num(f[5])?,
            p2: num(f[6])?,
            snr_db: num(f[7])?,
            frames: num(f[8])?,
            total_bits: num(f[9])?,
            bit_errors: num(f[10])?,
            ber: num(f[11])?,
            seed: num(f[12])?,
            wall_s: num(f[13])?,
        })
    }
}

/// CSV file that is flushed after every record.
pub struct CsvSink {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvSink {
    /// Creates (truncates) `path` and writes the header.
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut sink = CsvSink { path: path.to_path_buf(), out: BufWriter::new(file) };
        sink.line(CSV_HEADER)?;
        Ok(sink)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn write(&mut self, rec: &BerRecord) -> Result<()> {
        self.line(&rec.to_csv_row())
    }

    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.out, "{s}")
            .and_then(|_| self.out.flush())
            .map_err(|e| Error::io(&self.path, e))
    }
}

/// Reads every record of a CSV written by [`CsvSink`].
pub fn read_csv(path: &Path) -> Result<Vec<BerRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err(Error::Parameter(format!("{} lacks the expected header", path.display()))),
    }
    lines.filter(|l| !l.is_empty()).map(BerRecord::from_csv_row).collect()
}

const MAGIC: &[u8; 8] = b"DDCHMAT1";

/// Header of a matrix dump.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixHeader {
    pub m: u32,
    pub n: u32,
    pub l: u32,
    pub kind: ReceiverKind,
    pub seed: u64,
}

/// Writes `MAGIC, M, N, L (u32), kind (u32: 0 two-step, 1 Zak), seed (u64)`
/// followed by the entries row-major as little-endian `f64` pairs.
pub fn write_matrix(path: &Path, h: &EffChannelMatrix, l: usize, seed: u64) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let kind = match h.kind {
        ReceiverKind::TwoStep => 0u32,
        ReceiverKind::Zak => 1,
    };
    let mut buf = Vec::with_capacity(32 + 16 * h.dim() * h.dim());
    buf.extend_from_slice(MAGIC);
    for v in [h.grid.m as u32, h.grid.n as u32, l as u32, kind] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&seed.to_le_bytes());
    for i in 0..h.dim() {
        for j in 0..h.dim() {
            let z = h.entries[(i, j)];
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&buf).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Reads a dump written by [`write_matrix`]. `delta_f` and `fc` are not
/// stored and come back as 1 and 0.
pub fn read_matrix(path: &Path) -> Result<(MatrixHeader, EffChannelMatrix)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    BufReader::new(file).read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    let bad = |msg: &str| Error::Parameter(format!("{}: {msg}", path.display()));
    if bytes.len() < 32 || &bytes[..8] != MAGIC {
        return Err(bad("not a matrix dump"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let kind = match u32_at(20) {
        0 => ReceiverKind::TwoStep,
        1 => ReceiverKind::Zak,
        _ => return Err(bad("unknown receiver kind")),
    };
    let header = MatrixHeader {
        m: u32_at(8),
        n: u32_at(12),
        l: u32_at(16),
        kind,
        seed: u64::from_le_bytes(bytes[24..32].try_into().unwrap()),
    };
    let grid = GridParams::new(header.m as usize, header.n as usize, 1.0, 0.0)?;
    let dim = grid.len();
    if bytes.len() != 32 + 16 * dim * dim {
        return Err(bad("truncated payload"));
    }
    let entries = Mat::from_fn(dim, dim, |i, j| {
        let o = 32 + 16 * (i * dim + j);
        Complex64::new(f64_at(o), f64_at(o + 8))
    });
    Ok((header, EffChannelMatrix { entries, kind, grid }))
}
