//! Fractal value-noise textures inside an HSV range.

use std::io::{self, Read, Write};

use rand::Rng;
use thiserror::Error;

use crate::rng;
use crate::taskspec::{TextureMode, TextureSpec};

pub const NOISE_OCTAVES: u32 = 4;
pub const NOISE_PERSISTENCE: f64 = 0.5;
/// Lattice cells across the raster at the first octave.
pub const NOISE_BASE_CELLS: usize = 4;
pub const RASTER_MAGIC: [u8; 4] = *b"HSVR";

#[derive(Debug, Error)]
pub enum TextureError {
    #[error("fractal textures need a fractal spec, got a jitter spec")]
    NotFractal,
    #[error("raster dimensions must be at least 1x1")]
    EmptyRaster,
    #[error("not a texture raster (bad magic)")]
    BadMagic,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Row-major HSV pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct TextureRaster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[f64; 3]>,
}

impl TextureRaster {
    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        self.pixels[y * self.width + x]
    }

    /// `HSVR`, width and height as u32 LE, then 3 x f32 LE per pixel.
    pub fn write_raw(&self, mut out: impl Write) -> io::Result<()> {
        out.write_all(&RASTER_MAGIC)?;
        out.write_all(&(self.width as u32).to_le_bytes())?;
        out.write_all(&(self.height as u32).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.pixels.len() * 12);
        for p in &self.pixels {
            for c in p {
                buf.extend_from_slice(&(*c as f32).to_le_bytes());
            }
        }
        out.write_all(&buf)?;
        out.flush()
    }

    pub fn read_raw(mut input: impl Read) -> Result<Self, TextureError> {
        let mut head = [0u8; 12];
        input.read_exact(&mut head)?;
        if head[..4] != RASTER_MAGIC {
            return Err(TextureError::BadMagic);
        }
        let width = u32::from_le_bytes(head[4..8].try_into().unwrap()) as usize;
        let height = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
        let mut body = vec![0u8; width * height * 12];
        input.read_exact(&mut body)?;
        let pixels = body
            .chunks_exact(12)
            .map(|c| std::array::from_fn(|k| f32::from_le_bytes(c[4 * k..4 * k + 4].try_into().unwrap()) as f64))
            .collect();
        Ok(TextureRaster { width, height, pixels })
    }

    /// Binary PPM (P6) in RGB for viewing.
    pub fn write_ppm(&self, mut out: impl Write) -> io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        let mut buf = Vec::with_capacity(self.pixels.len() * 3);
        for p in &self.pixels {
            buf.extend(hsv_to_rgb(*p).map(|c| (c * 255.0).round().clamp(0.0, 255.0) as u8));
        }
        out.write_all(&buf)?;
        out.flush()
    }
}

pub fn hsv_to_rgb([h, s, v]: [f64; 3]) -> [f64; 3] {
    let h6 = h.rem_euclid(1.0) * 6.0;
    let sector = h6.floor();
    let f = h6 - sector;
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - s * f), v * (1.0 - s * (1.0 - f)));
    match sector as u32 {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

/// One channel of fractal value noise in `[0, 1]`.
fn value_noise(width: usize, height: usize, r: &mut impl Rng) -> Vec<f64> {
    let mut out = vec![0.0; width * height];
    let mut amplitude = 1.0;
    let mut total_amplitude = 0.0;
    for octave in 0..NOISE_OCTAVES {
        let cells = NOISE_BASE_CELLS << octave;
        let lattice: Vec<f64> = (0..(cells + 1) * (cells + 1)).map(|_| r.random::<f64>()).collect();
        let at = |i: usize, j: usize| lattice[j * (cells + 1) + i];
        for y in 0..height {
            let fy = (y as f64 + 0.5) / height as f64 * cells as f64;
            let (j, ty) = ((fy.floor() as usize).min(cells - 1), smoothstep(fy - fy.floor()));
            for x in 0..width {
                let fx = (x as f64 + 0.5) / width as f64 * cells as f64;
                let (i, tx) = ((fx.floor() as usize).min(cells - 1), smoothstep(fx - fx.floor()));
                let top = at(i, j) + tx * (at(i + 1, j) - at(i, j));
                let bottom = at(i, j + 1) + tx * (at(i + 1, j + 1) - at(i, j + 1));
                out[y * width + x] += amplitude * (top + ty * (bottom - top));
            }
        }
        total_amplitude += amplitude;
        amplitude *= NOISE_PERSISTENCE;
    }
    for v in &mut out {
        *v = (*v / total_amplitude).clamp(0.0, 1.0);
    }
    out
}

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Value noise (4 octaves, persistence 0.5, lattice frequency doubling per
/// octave), one independent field per HSV channel, mapped into the spec's
/// range. Channel `c` draws from RNG stream `c` of `seed`.
pub fn fractal_texture(spec: &TextureSpec, width: usize, height: usize, seed: u64) -> Result<TextureRaster, TextureError> {
    if spec.mode != TextureMode::Fractal {
        return Err(TextureError::NotFractal);
    }
    if width == 0 || height == 0 {
        return Err(TextureError::EmptyRaster);
    }
    let channels: Vec<Vec<f64>> = (0..3).map(|c| value_noise(width, height, &mut rng::stream(seed, c))).collect();
    let pixels = (0..width * height)
        .map(|i| spec.map_unit([channels[0][i], channels[1][i], channels[2][i]]))
        .collect();
    Ok(TextureRaster { width, height, pixels })
}
