//! Byte encodings for tensors, network weights and traces.
//!
//! Tensor file (`NGRT`), all integers little-endian `u32`:
//!
//! ```text
//! "NGRT" | version | H | W | C | C planes of H*W f32 LE, row-major
//! ```
//!
//! Values are stored at 32-bit precision and widened back to `f64` on read.
//! Weights (`NGRW`) keep full `f64` precision so a saved network resumes exactly.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::net::{NetConfig, NetParams, Normalization};
use crate::solver::IterationTrace;
use crate::tensor::{Shape, Tensor3};

pub const TENSOR_MAGIC: [u8; 4] = *b"NGRT";
pub const TENSOR_VERSION: u32 = 1;
pub const WEIGHTS_MAGIC: [u8; 4] = *b"NGRW";
pub const WEIGHTS_VERSION: u32 = 1;

const TENSOR_HEADER: usize = 20;

pub const TRACE_HEADER: &str = "iter,objective,residual,wall_ms";

pub fn encode_tensor(x: &Tensor3) -> Vec<u8> {
    let s = x.shape();
    let mut out = Vec::with_capacity(TENSOR_HEADER + 4 * x.len());
    out.extend_from_slice(&TENSOR_MAGIC);
    for v in [TENSOR_VERSION, s.height as u32, s.width as u32, s.channels as u32] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for &v in x.data() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::format(format!("truncated input while reading {what}"))),
        }
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn magic(&mut self, want: &[u8; 4]) -> Result<()> {
        if self.take(4, "magic")? != want {
            return Err(Error::format(format!("bad magic, expected {:?}", core::str::from_utf8(want).unwrap())));
        }
        Ok(())
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::format(format!("{} trailing bytes", self.bytes.len() - self.pos)));
        }
        Ok(())
    }
}

pub fn decode_tensor(bytes: &[u8]) -> Result<Tensor3> {
    let mut r = Reader { bytes, pos: 0 };
    r.magic(&TENSOR_MAGIC)?;
    let version = r.u32("version")?;
    if version != TENSOR_VERSION {
        return Err(Error::format(format!("unsupported tensor version {version}")));
    }
    let (h, w, c) = (r.u32("height")? as usize, r.u32("width")? as usize, r.u32("channels")? as usize);
    if h == 0 || w == 0 || c == 0 {
        return Err(Error::format("tensor dimensions must be positive"));
    }
    let n = h
        .checked_mul(w)
        .and_then(|v| v.checked_mul(c))
        .filter(|n| n.checked_mul(4).is_some())
        .ok_or_else(|| Error::format("tensor dimensions overflow"))?;
    let payload = r.take(4 * n, "payload")?;
    r.finish()?;
    let data = payload.chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64).collect();
    Tensor3::from_vec(Shape::new(h, w, c), data)
}

fn norm_code(n: Normalization) -> u8 {
    match n {
        Normalization::None => 0,
        Normalization::PerChannel => 1,
    }
}

/// `"NGRW" | version | NetConfig | u64 count | count f64 LE`.
pub fn encode_weights(params: &NetParams) -> Vec<u8> {
    let c = params.config();
    let mut out = Vec::with_capacity(64 + 8 * params.len());
    out.extend_from_slice(&WEIGHTS_MAGIC);
    out.extend_from_slice(&WEIGHTS_VERSION.to_le_bytes());
    for v in [c.blocks, c.width, c.kernel, c.input_channels, c.output_channels] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    out.push(c.skip as u8);
    out.push(norm_code(c.normalization));
    out.extend_from_slice(&c.leaky_slope.to_le_bytes());
    out.extend_from_slice(&c.head_gain.to_le_bytes());
    out.extend_from_slice(&(params.len() as u64).to_le_bytes());
    for &v in params.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_weights(bytes: &[u8]) -> Result<NetParams> {
    let mut r = Reader { bytes, pos: 0 };
    r.magic(&WEIGHTS_MAGIC)?;
    let version = r.u32("version")?;
    if version != WEIGHTS_VERSION {
        return Err(Error::format(format!("unsupported weights version {version}")));
    }
    let mut dims = [0usize; 5];
    for d in &mut dims {
        *d = r.u32("network shape")? as usize;
    }
    let skip = match r.u8("skip flag")? {
        0 => false,
        1 => true,
        v => return Err(Error::format(format!("bad skip flag {v}"))),
    };
    let normalization = match r.u8("normalization")? {
        0 => Normalization::None,
        1 => Normalization::PerChannel,
        v => return Err(Error::format(format!("bad normalization code {v}"))),
    };
    let cfg = NetConfig {
        blocks: dims[0],
        width: dims[1],
        kernel: dims[2],
        input_channels: dims[3],
        output_channels: dims[4],
        skip,
        normalization,
        leaky_slope: r.f64("leaky slope")?,
        head_gain: r.f64("head gain")?,
    };
    cfg.validate().map_err(|e| Error::format(format!("stored network config: {e}")))?;
    let count = r.u64("parameter count")?;
    let n = usize::try_from(count)
        .ok()
        .filter(|n| n.checked_mul(8).is_some())
        .ok_or_else(|| Error::format("parameter count overflows"))?;
    let raw = r.take(8 * n, "parameters")?;
    r.finish()?;
    let data: Vec<f64> = raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
    NetParams::from_flat(&cfg, data).map_err(|e| Error::format(format!("{e}")))
}

/// Trace as CSV with a header row. `wall_ms` is empty for untimed runs, which
/// keeps the file byte-identical across repeated runs.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let mut s = String::with_capacity(48 * (trace.len() + 1));
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in &trace.records {
        let _ = write!(s, "{},{:e},{:e},", r.iter, r.objective, r.residual);
        if let Some(ms) = r.elapsed_ms {
            let _ = write!(s, "{ms:.3}");
        }
        s.push('\n');
    }
    s
}
