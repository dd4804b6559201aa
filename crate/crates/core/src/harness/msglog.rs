use std::fs::{File, OpenOptions};
use std::io::{BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use crate::census::{take_census, MemeRegistry};
use crate::error::{Error, Result};
use crate::grid::GridDims;
use crate::message::{Message, MessageShape};

const MAGIC: &[u8; 8] = b"MEMELOG\0";
const VERSION: u32 = 1;
const HEADER_LEN: u64 = 8 + 4 * 5;

/// Header of a message log: every step stores one little-endian `u32` key
/// per agent, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogHeader {
    pub dims: GridDims,
    pub shape: MessageShape,
}

impl LogHeader {
    fn encode(&self) -> Vec<u8> {
        let mut b = MAGIC.to_vec();
        for v in [VERSION, self.dims.rows as u32, self.dims.cols as u32, self.shape.len as u32, self.shape.channels as u32] {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b
    }

    fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN as usize || &bytes[..8] != MAGIC {
            return Err(Error::MessageLog("not a message log (bad magic)".into()));
        }
        let word = |k: usize| u32::from_le_bytes(bytes[8 + 4 * k..12 + 4 * k].try_into().unwrap());
        if word(0) != VERSION {
            return Err(Error::MessageLog(format!("unsupported log version {} (expected {VERSION})", word(0))));
        }
        let header = Self {
            dims: GridDims::new(word(1) as usize, word(2) as usize),
            shape: MessageShape {
                len: word(3) as usize,
                channels: word(4) as usize,
            },
        };
        header.shape.validate()?;
        if header.dims.is_empty() {
            return Err(Error::MessageLog("empty grid in header".into()));
        }
        Ok(header)
    }

    fn step_bytes(&self) -> u64 {
        self.dims.len() as u64 * 4
    }
}

pub struct MessageLogWriter {
    path: PathBuf,
    header: LogHeader,
    out: BufWriter<File>,
}

impl MessageLogWriter {
    pub fn create(path: &Path, header: LogHeader) -> Result<Self> {
        let ctx = || format!("creating message log {}", path.display());
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(ctx(), e))?);
        out.write_all(&header.encode()).map_err(|e| Error::io(ctx(), e))?;
        Ok(Self {
            path: path.to_owned(),
            header,
            out,
        })
    }

    /// Reopens a log for appending after `steps` recorded steps, dropping
    /// anything written past them.
    pub fn resume(path: &Path, header: LogHeader, steps: u64) -> Result<Self> {
        let ctx = || format!("reopening message log {}", path.display());
        let mut file = OpenOptions::new().read(true).write(true).open(path).map_err(|e| Error::io(ctx(), e))?;
        let mut head = vec![0u8; HEADER_LEN as usize];
        file.read_exact(&mut head).map_err(|e| Error::io(ctx(), e))?;
        let found = LogHeader::decode(&head)?;
        if found != header {
            return Err(Error::MessageLog(format!("{} does not match this run's grid or message shape", path.display())));
        }
        let keep = HEADER_LEN + steps * header.step_bytes();
        let len = file.metadata().map_err(|e| Error::io(ctx(), e))?.len();
        if len < keep {
            return Err(Error::MessageLog(format!("{} holds fewer than {steps} steps", path.display())));
        }
        file.set_len(keep).map_err(|e| Error::io(ctx(), e))?;
        file.seek(SeekFrom::End(0)).map_err(|e| Error::io(ctx(), e))?;
        Ok(Self {
            path: path.to_owned(),
            header,
            out: BufWriter::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn write_step(&mut self, broadcasts: &[Message]) -> Result<()> {
        debug_assert_eq!(broadcasts.len(), self.header.dims.len());
        let mut buf = Vec::with_capacity(broadcasts.len() * 4);
        for m in broadcasts {
            buf.extend_from_slice(&m.bits().to_le_bytes());
        }
        self.out
            .write_all(&buf)
            .map_err(|e| Error::io(format!("writing message log {}", self.path.display()), e))
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out
            .flush()
            .map_err(|e| Error::io(format!("flushing message log {}", self.path.display()), e))
    }
}

/// Streams a log step by step.
pub struct MessageLogReader {
    header: LogHeader,
    input: BufReader<File>,
    step: u64,
    buf: Vec<u8>,
}

impl MessageLogReader {
    pub fn open(path: &Path) -> Result<Self> {
        let ctx = || format!("opening message log {}", path.display());
        let mut input = BufReader::new(File::open(path).map_err(|e| Error::io(ctx(), e))?);
        let mut head = vec![0u8; HEADER_LEN as usize];
        input
            .read_exact(&mut head)
            .map_err(|_| Error::MessageLog(format!("{}: truncated header", path.display())))?;
        let header = LogHeader::decode(&head)?;
        Ok(Self {
            header,
            input,
            step: 0,
            buf: vec![0; header.step_bytes() as usize],
        })
    }

    pub fn header(&self) -> LogHeader {
        self.header
    }

    /// Next step's broadcasts, or `None` at a clean end of file.
    pub fn next_step(&mut self) -> Result<Option<(u64, Vec<Message>)>> {
        let mut filled = 0;
        while filled < self.buf.len() {
            match self.input.read(&mut self.buf[filled..]) {
                Ok(0) => break,
                Ok(n) => filled += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(Error::io("reading message log", e)),
            }
        }
        if filled == 0 {
            return Ok(None);
        }
        if filled < self.buf.len() {
            return Err(Error::MessageLog(format!("step {} is truncated", self.step)));
        }
        let shape = self.header.shape;
        let messages = self
            .buf
            .chunks_exact(4)
            .map(|c| Message::from_bits(shape, u32::from_le_bytes(c.try_into().unwrap())))
            .collect();
        let step = self.step;
        self.step += 1;
        Ok(Some((step, messages)))
    }
}

/// Rebuilds the registry of a run from its message log.
pub fn replay(path: &Path) -> Result<MemeRegistry> {
    let mut reader = MessageLogReader::open(path)?;
    let mut registry = MemeRegistry::new(reader.header().dims.len());
    while let Some((step, broadcasts)) = reader.next_step()? {
        registry.update(&take_census(&broadcasts), step);
    }
    Ok(registry)
}
