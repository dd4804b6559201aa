use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::census::MemeRegistry;
use crate::config::GridConfig;
use crate::error::{Error, Result};
use crate::evolution::ReplicationEvent;
use crate::memetics::AgentRuntime;

use super::run::FitnessRow;

const MAGIC: &[u8; 8] = b"MEMECKPT";
pub const CHECKPOINT_VERSION: u32 = 1;
const DIGEST_LEN: usize = 32;

/// Complete state of a run between two steps. The RNG root is the config's
/// seed; all other randomness is keyed by (agent, step, purpose).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config: GridConfig,
    pub config_hash: String,
    pub next_step: u64,
    pub agents: Vec<AgentRuntime>,
    pub registry: MemeRegistry,
    pub events: Vec<ReplicationEvent>,
    pub fitness: Vec<FitnessRow>,
}

/// Borrowing twin of [`Checkpoint`] with identical field order, so saving
/// needs no clone of the world.
#[derive(Serialize)]
pub(crate) struct CheckpointRef<'a> {
    pub config: &'a GridConfig,
    pub config_hash: String,
    pub next_step: u64,
    pub agents: &'a [AgentRuntime],
    pub registry: &'a MemeRegistry,
    pub events: &'a [ReplicationEvent],
    pub fitness: &'a [FitnessRow],
}

/// Layout: magic, version (u32 LE), payload length (u64 LE), bincode
/// payload, SHA-256 of the payload.
pub(crate) fn write_checkpoint(path: &Path, state: &CheckpointRef<'_>) -> Result<()> {
    let payload = bincode::serialize(state).map_err(|e| Error::Serialization(e.to_string()))?;
    let ctx = || format!("writing checkpoint {}", path.display());
    let tmp = path.with_extension("partial");
    {
        let mut out = BufWriter::new(File::create(&tmp).map_err(|e| Error::io(ctx(), e))?);
        out.write_all(MAGIC)
            .and_then(|_| out.write_all(&CHECKPOINT_VERSION.to_le_bytes()))
            .and_then(|_| out.write_all(&(payload.len() as u64).to_le_bytes()))
            .and_then(|_| out.write_all(&payload))
            .and_then(|_| out.write_all(&Sha256::digest(&payload)))
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(ctx(), e))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| Error::io(ctx(), e))
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<()> {
        write_checkpoint(
            path,
            &CheckpointRef {
                config: &self.config,
                config_hash: self.config_hash.clone(),
                next_step: self.next_step,
                agents: &self.agents,
                registry: &self.registry,
                events: &self.events,
                fitness: &self.fitness,
            },
        )
    }

    /// Reads and verifies a checkpoint. With `expected`, also refuses a file
    /// written under a different configuration.
    pub fn load(path: &Path, expected: Option<&GridConfig>) -> Result<Self> {
        let bad = |reason: String| Error::Checkpoint {
            path: path.to_owned(),
            reason,
        };
        let mut bytes = Vec::new();
        File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(format!("reading checkpoint {}", path.display()), e))?;
        let head = 8 + 4 + 8;
        if bytes.len() < head || &bytes[..8] != MAGIC {
            return Err(bad("not a checkpoint file (bad magic)".into()));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != CHECKPOINT_VERSION {
            return Err(bad(format!("format version {version}, this build reads {CHECKPOINT_VERSION}")));
        }
        let len = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
        let expected_total = head.checked_add(len).and_then(|n| n.checked_add(DIGEST_LEN));
        if expected_total != Some(bytes.len()) {
            return Err(bad(format!(
                "truncated or padded: {} bytes on disk, header announces {} byte payload",
                bytes.len(),
                len
            )));
        }
        let payload = &bytes[head..head + len];
        if Sha256::digest(payload).as_slice() != &bytes[head + len..] {
            return Err(bad("payload checksum mismatch (file is corrupt)".into()));
        }
        let ck: Checkpoint = bincode::deserialize(payload).map_err(|e| bad(format!("undecodable payload: {e}")))?;
        ck.config.validate()?;
        let actual = ck.config.hash();
        if actual != ck.config_hash {
            return Err(bad(format!("stored config hash {} does not match its config ({actual})", ck.config_hash)));
        }
        if ck.agents.len() != ck.config.dims().len() {
            return Err(bad(format!("{} agents for a {} grid", ck.agents.len(), ck.config.dims())));
        }
        if let Some(expected) = expected {
            let want = expected.hash();
            if want != ck.config_hash {
                return Err(Error::ConfigHashMismatch {
                    expected: want,
                    found: ck.config_hash,
                });
            }
        }
        Ok(ck)
    }
}
