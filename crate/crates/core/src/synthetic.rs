//! Deterministic test images in `[0, 1]`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::rng::Rng;
use crate::tensor::{Shape, Tensor3};

/// Shapes of a generated scene, in unit coordinates.
#[derive(Debug, Clone, Copy)]
struct Scene {
    disk: (f64, f64, f64),
    rect: (f64, f64, f64, f64),
    band: (f64, f64, f64),
    phase: f64,
}

impl Scene {
    fn draw(rng: &mut Rng) -> Self {
        let disk = (rng.range(0.3, 0.7), rng.range(0.3, 0.7), rng.range(0.15, 0.25));
        let (y0, x0) = (rng.range(0.05, 0.45), rng.range(0.05, 0.45));
        let rect = (y0, x0, y0 + rng.range(0.25, 0.45), x0 + rng.range(0.25, 0.45));
        let band = (rng.range(-1.0, 1.0), rng.range(0.6, 1.2), rng.range(0.06, 0.12));
        Scene { disk, rect, band, phase: rng.range(0.0, 2.0 * PI) }
    }

    /// Region label and a smooth in-region shading term.
    fn region(&self, u: f64, v: f64) -> (usize, f64) {
        let (cy, cx, r) = self.disk;
        let d2 = ((u - cy) * (u - cy) + (v - cx) * (v - cx)) / (r * r);
        if d2 < 1.0 {
            return (1, 1.0 - d2);
        }
        let (y0, x0, y1, x1) = self.rect;
        if u >= y0 && u < y1 && v >= x0 && v < x1 {
            return (2, (v - x0) / (x1 - x0));
        }
        let (slope, offset, half) = self.band;
        if (u - slope * v - offset + 0.5).abs() < half {
            return (3, 0.0);
        }
        (0, 0.0)
    }
}

/// Piecewise-smooth multi-channel image: a shaded disk, a ramped rectangle and a
/// flat diagonal band over a smoothly varying background. Channels share the
/// geometry with different intensities.
pub fn piecewise_smooth(shape: Shape, seed: u64) -> Tensor3 {
    let scene = Scene::draw(&mut Rng::new(seed));
    render(shape, &scene, true)
}

/// Same geometry as [`piecewise_smooth`] with every region flat.
pub fn piecewise_constant(shape: Shape, seed: u64) -> Tensor3 {
    let scene = Scene::draw(&mut Rng::new(seed));
    render(shape, &scene, false)
}

fn render(shape: Shape, scene: &Scene, smooth: bool) -> Tensor3 {
    let s = if smooth { 1.0 } else { 0.0 };
    Tensor3::from_fn(shape, |y, x, c| {
        let u = (y as f64 + 0.5) / shape.height as f64;
        let v = (x as f64 + 0.5) / shape.width as f64;
        let t = if shape.channels > 1 { c as f64 / (shape.channels - 1) as f64 } else { 0.5 };
        let (label, shade) = scene.region(u, v);
        let val = match label {
            1 => 0.7 - 0.15 * t + s * 0.15 * shade,
            2 => 0.2 + 0.2 * t + s * 0.2 * shade,
            3 => 0.85 - 0.4 * t,
            _ => {
                0.4 + 0.15 * t
                    + s * (0.15 * (u - 0.5) + 0.06 * libm::sin(2.0 * PI * (v + 0.5 * u) + scene.phase))
            }
        };
        val.clamp(0.0, 1.0)
    })
}

/// The desk-scale suite: a few 64x64x3 piecewise-smooth scenes.
pub fn suite() -> Vec<Tensor3> {
    [11u64, 23, 37].iter().map(|&s| piecewise_smooth(Shape::new(64, 64, 3), s)).collect()
}
