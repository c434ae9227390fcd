//! Computable stand-ins for prefix complexity.

use std::cell::RefCell;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use flate2::{Compress, Compression, FlushCompress, Status};

use super::tiny::{self, TinyTable};
use crate::error::{Error, Result};

/// A complexity estimate `K̂(x | side)` in bits plus the conditional
/// `K̂(y | x, side)`. Implementations must be deterministic.
pub trait ComplexityModel: Send + Sync {
    fn id(&self) -> String;

    fn complexity(&self, x: &[u8], side: &[u8]) -> f64;

    fn conditional(&self, y: &[u8], x: &[u8], side: &[u8]) -> f64;
}

/// `K̂ ≡ 0`. Every probability scores zero self-information.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroModel;

impl ComplexityModel for ZeroModel {
    fn id(&self) -> String {
        "zero".into()
    }

    fn complexity(&self, _: &[u8], _: &[u8]) -> f64 {
        0.0
    }

    fn conditional(&self, _: &[u8], _: &[u8], _: &[u8]) -> f64 {
        0.0
    }
}

/// Bit length of a string, ignoring the side information.
///
/// Bit strings written as ASCII `'0'`/`'1'` (the outcome encoding) count one
/// bit per symbol; any other byte string counts eight bits per byte.
pub fn bit_length(x: &[u8]) -> f64 {
    if x.iter().all(|&b| b == b'0' || b == b'1') {
        x.len() as f64
    } else {
        8.0 * x.len() as f64
    }
}

/// `K̂(x) = |x|`, with `K̂(y|x) = 0` when `y = x` and `|y|` otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct LengthModel;

impl ComplexityModel for LengthModel {
    fn id(&self) -> String {
        "length".into()
    }

    fn complexity(&self, x: &[u8], _: &[u8]) -> f64 {
        bit_length(x)
    }

    fn conditional(&self, y: &[u8], x: &[u8], _: &[u8]) -> f64 {
        if y == x {
            0.0
        } else {
            bit_length(y)
        }
    }
}

/// Raw DEFLATE at level 9 through `miniz_oxide`, pinned by the lock file.
/// `K̂(x|s) = 8·(C(s‖x) − C(s))` and `K̂(y|x,s) = 8·(C(s‖x‖y) − C(s‖x))`,
/// clamped at zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct CodecModel;

/// Bound on `K̂(x|x)` and on `Î(i:j) − min(K̂(i), K̂(j))` for the codec model on
/// outcome strings of up to 12 bits. Measured maxima: 32 and 24 bits.
pub const CODEC_SLACK_BITS: f64 = 32.0;

thread_local! {
    static SCRATCH: RefCell<(Compress, Vec<u8>, Vec<u8>)> =
        RefCell::new((Compress::new(Compression::best(), false), Vec::new(), Vec::new()));
}

/// Compressed size in bytes of the concatenation of `parts`.
pub fn compressed_len(parts: &[&[u8]]) -> usize {
    SCRATCH.with(|cell| {
        let (compressor, input, output) = &mut *cell.borrow_mut();
        input.clear();
        parts.iter().for_each(|p| input.extend_from_slice(p));
        output.clear();
        output.reserve(input.len() + 64);
        compressor.reset();
        loop {
            let status = compressor
                .compress_vec(&input[compressor.total_in() as usize..], output, FlushCompress::Finish)
                .expect("in-memory deflate cannot fail");
            match status {
                Status::StreamEnd => break,
                _ => output.reserve(output.capacity().max(64)),
            }
        }
        compressor.total_out() as usize
    })
}

impl ComplexityModel for CodecModel {
    fn id(&self) -> String {
        "codec:deflate9".into()
    }

    fn complexity(&self, x: &[u8], side: &[u8]) -> f64 {
        let joint = compressed_len(&[side, x]) as f64;
        let base = compressed_len(&[side]) as f64;
        (8.0 * (joint - base)).max(0.0)
    }

    fn conditional(&self, y: &[u8], x: &[u8], side: &[u8]) -> f64 {
        let joint = compressed_len(&[side, x, y]) as f64;
        let base = compressed_len(&[side, x]) as f64;
        (8.0 * (joint - base)).max(0.0)
    }
}

/// Exact resource-bounded complexity from an enumerated tiny-machine table,
/// falling back to [`bit_length`] for outputs beyond its horizon. The toy
/// machine has no auxiliary tape, so side information is ignored.
#[derive(Debug, Clone)]
pub struct TinyMachineModel {
    table: Arc<TinyTable>,
}

impl TinyMachineModel {
    pub fn new(table: Arc<TinyTable>) -> Self {
        Self { table }
    }

    pub fn table(&self) -> &TinyTable {
        &self.table
    }
}

impl ComplexityModel for TinyMachineModel {
    fn id(&self) -> String {
        format!("tiny:v{}:L{}:b{}", tiny::INSTRUCTION_SET_VERSION, self.table.max_len, self.table.budget)
    }

    fn complexity(&self, x: &[u8], _: &[u8]) -> f64 {
        self.table.get(x).map_or_else(|| bit_length(x), f64::from)
    }

    fn conditional(&self, y: &[u8], x: &[u8], side: &[u8]) -> f64 {
        if y == x {
            0.0
        } else {
            self.complexity(y, side)
        }
    }
}

/// Registered model names as accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Zero,
    Length,
    Codec,
    Tiny,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::Length => "length",
            Self::Codec => "codec",
            Self::Tiny => "tiny",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "zero" => Ok(Self::Zero),
            "length" => Ok(Self::Length),
            "codec" => Ok(Self::Codec),
            "tiny" => Ok(Self::Tiny),
            other => Err(Error::InvalidParameter(format!("unknown model {other:?}"))),
        }
    }
}

/// Tiny-machine enumeration settings; a cache directory avoids re-enumerating.
#[derive(Debug, Clone)]
pub struct TinySettings {
    pub max_len: u32,
    pub budget: u32,
    pub cache_dir: Option<std::path::PathBuf>,
}

impl Default for TinySettings {
    fn default() -> Self {
        Self { max_len: 16, budget: tiny::DEFAULT_BUDGET, cache_dir: None }
    }
}

pub fn build_model(kind: ModelKind, tiny_settings: &TinySettings) -> Result<Arc<dyn ComplexityModel>> {
    Ok(match kind {
        ModelKind::Zero => Arc::new(ZeroModel),
        ModelKind::Length => Arc::new(LengthModel),
        ModelKind::Codec => Arc::new(CodecModel),
        ModelKind::Tiny => {
            let table = match &tiny_settings.cache_dir {
                Some(dir) => tiny::load_or_enumerate(Path::new(dir), tiny_settings.max_len, tiny_settings.budget)?,
                None => tiny::enumerate_tiny_machine(tiny_settings.max_len, tiny_settings.budget)?,
            };
            Arc::new(TinyMachineModel::new(Arc::new(table)))
        }
    })
}
