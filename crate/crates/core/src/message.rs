//! Discrete broadcast messages and their noisy buffered copies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Site;

/// Longest supported message, in symbols. Messages pack into a `u32`.
pub const MAX_SYMBOLS: usize = 32;

/// Positions × channels of a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MessageShape {
    pub len: usize,
    pub channels: usize,
}

impl MessageShape {
    /// Ten positions of three channels.
    pub const SEQUENCE: MessageShape = MessageShape { len: 10, channels: 3 };
    /// One position of thirty channels.
    pub const FLAT: MessageShape = MessageShape { len: 1, channels: 30 };

    pub const fn symbols(&self) -> usize {
        self.len * self.channels
    }

    pub fn validate(&self) -> Result<()> {
        if self.len == 0 || self.channels == 0 {
            return Err(Error::Config("message shape must be non-empty".into()));
        }
        if self.symbols() > MAX_SYMBOLS {
            return Err(Error::Config(format!(
                "message shape {}x{} exceeds {MAX_SYMBOLS} symbols",
                self.len, self.channels
            )));
        }
        Ok(())
    }
}

/// A ±1 matrix stored as a bit pattern, first symbol in the most significant
/// used bit. `+1` is a set bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    shape: MessageShape,
    bits: u32,
}

impl Message {
    pub fn from_bits(shape: MessageShape, bits: u32) -> Self {
        let n = shape.symbols();
        let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        Self {
            shape,
            bits: bits & mask,
        }
    }

    /// Builds a message from row-major ±1 symbols.
    pub fn from_symbols(shape: MessageShape, symbols: &[i8]) -> Result<Self> {
        if symbols.len() != shape.symbols() {
            return Err(Error::Config(format!(
                "expected {} symbols, got {}",
                shape.symbols(),
                symbols.len()
            )));
        }
        let mut bits = 0u32;
        for &s in symbols {
            bits <<= 1;
            match s {
                1 => bits |= 1,
                -1 => {}
                other => {
                    return Err(Error::Config(format!("message symbol {other} is not ±1")));
                }
            }
        }
        Ok(Self { shape, bits })
    }

    pub fn filled(shape: MessageShape, symbol: i8) -> Self {
        Self::from_bits(shape, if symbol > 0 { u32::MAX } else { 0 })
    }

    pub fn shape(&self) -> MessageShape {
        self.shape
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Symbol at flat row-major position `k`.
    pub fn symbol(&self, k: usize) -> i8 {
        let n = self.shape.symbols();
        if (self.bits >> (n - 1 - k)) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn at(&self, position: usize, channel: usize) -> i8 {
        self.symbol(position * self.shape.channels + channel)
    }

    pub fn symbols(&self) -> impl Iterator<Item = i8> + '_ {
        (0..self.shape.symbols()).map(|k| self.symbol(k))
    }

    /// Symbols as reals, row-major.
    pub fn to_values(&self) -> Vec<f64> {
        self.symbols().map(f64::from).collect()
    }
}

impl std::fmt::Display for Message {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, s) in self.symbols().enumerate() {
            if k > 0 && k % self.shape.channels == 0 {
                f.write_str("|")?;
            }
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// A message after perception noise, tagged with the site that sent it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyMessage {
    pub values: Vec<f64>,
    pub source: Site,
}

impl NoisyMessage {
    /// Adds `noise[k]` to every symbol of `message`.
    pub fn perceive(message: &Message, source: Site, noise: impl IntoIterator<Item = f64>) -> Self {
        let values = message
            .symbols()
            .zip(noise)
            .map(|(s, n)| f64::from(s) + n)
            .collect();
        Self { values, source }
    }
}
