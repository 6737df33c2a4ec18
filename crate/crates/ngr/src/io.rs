//! Reading and writing images, tensors, masks, weights and CSV files.
//!
//! Values are 64-bit in memory and 32-bit in tensor files; PNG is 8-bit.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use ngr_core::format::{decode_tensor, decode_weights, encode_tensor, encode_weights, trace_csv};
use ngr_core::metrics::MetricReport;
use ngr_core::net::{NetConfig, NetParams};
use ngr_core::solver::{IterationTrace, ObservationMask};
use ngr_core::{Shape, Tensor3};

use crate::error::{CliError, Result};

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn data_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

/// 8-bit grayscale or RGB, scaled to `[0, 1]` by `/255`.
pub fn read_png(path: &Path) -> Result<Tensor3> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut decoder = png::Decoder::new(file);
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(|e| data_err(path, e))?;
    let (color, depth) = reader.output_color_type();
    if depth != png::BitDepth::Eight {
        return Err(data_err(path, format!("unsupported bit depth {depth:?}, only 8-bit PNG is read")));
    }
    let channels = match color {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => return Err(data_err(path, format!("unsupported color type {other:?}"))),
    };
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf).map_err(|e| data_err(path, e))?;
    let (h, w) = (info.height as usize, info.width as usize);
    let shape = Shape::new(h, w, channels);
    let stride = info.line_size;
    Ok(Tensor3::from_fn(shape, |y, x, c| buf[y * stride + x * channels + c] as f64 / 255.0))
}

/// Clamps to `[0, 1]` and scales by 255, rounding half away from zero.
pub fn write_png(x: &Tensor3, path: &Path) -> Result<()> {
    let s = x.shape();
    let color = match s.channels {
        1 => png::ColorType::Grayscale,
        3 => png::ColorType::Rgb,
        c => return Err(data_err(path, format!("PNG output needs 1 or 3 channels, got {c}"))),
    };
    let mut buf = Vec::with_capacity(s.len());
    for y in 0..s.height {
        for xx in 0..s.width {
            for c in 0..s.channels {
                buf.push(to_u8(x.get(y, xx, c)));
            }
        }
    }
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut enc = png::Encoder::new(BufWriter::new(file), s.width as u32, s.height as u32);
    enc.set_color(color);
    enc.set_depth(png::BitDepth::Eight);
    let mut writer = enc.write_header().map_err(|e| data_err(path, e))?;
    writer.write_image_data(&buf).map_err(|e| data_err(path, e))?;
    writer.finish().map_err(|e| data_err(path, e))
}

pub fn to_u8(v: f64) -> u8 {
    // f64::round rounds half away from zero
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn read_tensor(path: &Path) -> Result<Tensor3> {
    decode_tensor(&read_bytes(path)?).map_err(|e| data_err(path, e))
}

pub fn write_tensor(x: &Tensor3, path: &Path) -> Result<()> {
    write_bytes(path, &encode_tensor(x))
}

fn is_png(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// PNG by extension, tensor file otherwise.
pub fn read_image(path: &Path) -> Result<Tensor3> {
    if is_png(path) {
        read_png(path)
    } else {
        read_tensor(path)
    }
}

pub fn write_image(x: &Tensor3, path: &Path) -> Result<()> {
    if is_png(path) {
        write_png(x, path)
    } else {
        write_tensor(x, path)
    }
}

/// Masks are 0/1 tensors; a PNG mask counts nonzero pixels as observed.
pub fn read_mask(path: &Path) -> Result<ObservationMask> {
    let t = read_image(path)?;
    let t = if is_png(path) { t.map(|v| if v > 0.0 { 1.0 } else { 0.0 }) } else { t };
    ObservationMask::from_tensor(&t).map_err(|e| data_err(path, e))
}

pub fn write_mask(mask: &ObservationMask, path: &Path) -> Result<()> {
    write_image(&mask.to_tensor(), path)
}

pub fn read_weights(path: &Path) -> Result<NetParams> {
    decode_weights(&read_bytes(path)?).map_err(|e| data_err(path, e))
}

/// Like [`read_weights`] but refuses weights built for another architecture.
pub fn read_weights_for(path: &Path, expected: &NetConfig) -> Result<NetParams> {
    let p = read_weights(path)?;
    if p.config() != expected {
        return Err(data_err(
            path,
            format!("stored network {:?} does not match the configured {:?}", p.config(), expected),
        ));
    }
    Ok(p)
}

pub fn write_weights(params: &NetParams, path: &Path) -> Result<()> {
    write_bytes(path, &encode_weights(params))
}

pub fn write_trace(trace: &IterationTrace, path: &Path) -> Result<()> {
    write_bytes(path, trace_csv(trace).as_bytes())
}

/// One file per snapshot and axis: `snap_<iter>_<h|v|t>.ngrt`.
pub fn write_snapshots(trace: &IterationTrace, dir: &Path) -> Result<usize> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut n = 0;
    for (it, maps) in &trace.snapshots {
        for (axis, g) in maps.iter() {
            write_tensor(g, &dir.join(format!("snap_{it:06}_{}.ngrt", axis.name())))?;
            n += 1;
        }
    }
    Ok(n)
}

pub const METRICS_HEADER: &str = "psnr,ssim,sam,ergas";

/// Fields of a metrics CSV row; SAM and ERGAS are empty for single-channel data.
pub fn metrics_fields(m: &MetricReport) -> String {
    let opt = |v: Option<f64>| v.map(|v| format!("{v:.6}")).unwrap_or_default();
    format!("{:.6},{:.6},{},{}", m.psnr, m.ssim, opt(m.sam), opt(m.ergas))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = BufWriter::new(File::create(path).map_err(|e| CliError::io(path, e))?);
    f.write_all(text.as_bytes()).and_then(|_| f.flush()).map_err(|e| CliError::io(path, e))
}
