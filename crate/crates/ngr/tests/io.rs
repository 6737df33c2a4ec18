use std::fs;

use ngr::io::{
    read_mask, read_png, read_tensor, read_weights, read_weights_for, to_u8, write_png, write_tensor, write_trace,
    write_weights,
};
use ngr_core::net::{NetConfig, NetParams};
use ngr_core::solver::{IterationTrace, ObservationMask, TraceRecord};
use ngr_core::{Rng, Shape, Tensor3};

fn write_raw_png(path: &std::path::Path, w: u32, h: u32, color: png::ColorType, depth: png::BitDepth, data: &[u8]) {
    let f = fs::File::create(path).unwrap();
    let mut e = png::Encoder::new(f, w, h);
    e.set_color(color);
    e.set_depth(depth);
    e.write_header().unwrap().write_image_data(data).unwrap();
}

#[test]
fn png_values_scale_by_255() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.png");
    write_raw_png(&p, 3, 2, png::ColorType::Grayscale, png::BitDepth::Eight, &[0, 1, 128, 254, 255, 7]);
    let t = read_png(&p).unwrap();
    assert_eq!(t.shape(), Shape::new(2, 3, 1));
    assert_eq!(t.get(1, 1, 0), 1.0);
    assert_eq!(t.get(0, 2, 0), 128.0 / 255.0);
}

#[test]
fn png_round_trip_reproduces_pixels() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.png");
    let b = dir.path().join("b.png");
    let data: Vec<u8> = (0..4 * 5 * 3).map(|i| (i * 37 % 256) as u8).collect();
    write_raw_png(&a, 5, 4, png::ColorType::Rgb, png::BitDepth::Eight, &data);
    let t = read_png(&a).unwrap();
    assert_eq!(t.shape(), Shape::new(4, 5, 3));
    assert_eq!(t.get(0, 1, 2), data[5] as f64 / 255.0);
    write_png(&t, &b).unwrap();
    let mut dec = png::Decoder::new(fs::File::open(&b).unwrap()).read_info().unwrap();
    let mut buf = vec![0; dec.output_buffer_size()];
    dec.next_frame(&mut buf).unwrap();
    assert_eq!(buf, data);
}

#[test]
fn png_rounding_and_clamping() {
    assert_eq!(to_u8(0.5), 128); // 127.5 rounds away from zero
    assert_eq!(to_u8(1.5 / 255.0), 2);
    assert_eq!(to_u8(-0.2), 0);
    assert_eq!(to_u8(3.0), 255);
}

#[test]
fn unsupported_pngs_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("deep.png");
    write_raw_png(&p, 2, 2, png::ColorType::Grayscale, png::BitDepth::Sixteen, &[0; 8]);
    assert!(matches!(read_png(&p), Err(ngr::CliError::Data(_))));
    let q = dir.path().join("rgba.png");
    write_raw_png(&q, 1, 1, png::ColorType::Rgba, png::BitDepth::Eight, &[1, 2, 3, 4]);
    assert!(read_png(&q).is_err());
    let t = Tensor3::zeros(Shape::new(2, 2, 2));
    assert!(write_png(&t, &dir.path().join("two.png")).is_err());
}

#[test]
fn tensor_files_round_trip_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.ngrt");
    let b = dir.path().join("b.ngrt");
    let x = Rng::new(8).uniform(Shape::new(7, 5, 4), -2.0, 2.0).unwrap();
    write_tensor(&x, &a).unwrap();
    assert_eq!(fs::metadata(&a).unwrap().len(), 20 + 4 * 140);
    write_tensor(&read_tensor(&a).unwrap(), &b).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn malformed_tensor_files_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.ngrt");
    write_tensor(&Tensor3::filled(Shape::new(1, 1, 1), 0.25), &a).unwrap();
    assert_eq!(read_tensor(&a).unwrap().data(), &[0.25]);
    let bytes = fs::read(&a).unwrap();
    fs::write(&a, &bytes[..bytes.len() - 2]).unwrap();
    assert!(matches!(read_tensor(&a), Err(ngr::CliError::Data(_))));
    assert!(matches!(read_tensor(&dir.path().join("missing")), Err(ngr::CliError::Io { .. })));
}

#[test]
fn masks_from_tensors_and_pngs() {
    let dir = tempfile::tempdir().unwrap();
    let shape = Shape::new(2, 2, 1);
    let mask = ObservationMask::new(shape, vec![true, false, false, true]).unwrap();
    let t = dir.path().join("m.ngrt");
    write_tensor(&mask.to_tensor(), &t).unwrap();
    assert_eq!(read_mask(&t).unwrap(), mask);
    let p = dir.path().join("m.png");
    write_raw_png(&p, 2, 2, png::ColorType::Grayscale, png::BitDepth::Eight, &[200, 0, 0, 1]);
    assert_eq!(read_mask(&p).unwrap(), mask);
    write_tensor(&Tensor3::filled(shape, 0.5), &t).unwrap();
    assert!(read_mask(&t).is_err());
}

#[test]
fn weights_round_trip_and_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("w.ngrw");
    let cfg = NetConfig { blocks: 2, width: 5, ..NetConfig::for_channels(3) };
    let params = NetParams::init(&mut Rng::new(2), &cfg).unwrap();
    write_weights(&params, &p).unwrap();
    assert_eq!(read_weights(&p).unwrap().as_slice(), params.as_slice());
    assert!(read_weights_for(&p, &cfg).is_ok());
    let other = NetConfig { width: 6, ..cfg };
    assert!(matches!(read_weights_for(&p, &other), Err(ngr::CliError::Data(_))));
}

#[test]
fn trace_file_has_header_and_one_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.csv");
    let mut t = IterationTrace::default();
    for i in 1..=4 {
        t.records.push(TraceRecord { iter: i, objective: 1.0 / i as f64, residual: 0.0, elapsed_ms: None });
    }
    write_trace(&t, &p).unwrap();
    let text = fs::read_to_string(&p).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "iter,objective,residual,wall_ms");
    assert_eq!(lines.len(), 5);
    assert!(lines[4].starts_with("4,"));
}
