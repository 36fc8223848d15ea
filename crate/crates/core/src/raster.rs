//! Single-channel rasters with intensities in `[0, 1]`, binary PGM (P5)
//! storage, and bilinear resampling.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::{num, Scalar};

/// Row-major grayscale image.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster<T = f32> {
    width: u32,
    height: u32,
    data: Vec<T>,
}

impl<T: Scalar> Raster<T> {
    pub fn filled(width: u32, height: u32, value: T) -> Self {
        assert!(width > 0 && height > 0, "raster dimensions must be positive");
        Raster {
            width,
            height,
            data: vec![value; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> T {
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: T) {
        self.data[y as usize * self.width as usize + x as usize] = value;
    }

    /// Applies `f` to every pixel in row-major order.
    pub fn map_pixels<F: FnMut(T) -> T>(&mut self, mut f: F) {
        for v in &mut self.data {
            *v = f(*v);
        }
    }

    /// Fills the axis-aligned rectangle `[x, x+w) x [y, y+h)`, clipped to the
    /// raster bounds.
    pub fn fill_rect(&mut self, x: u32, y: u32, w: u32, h: u32, value: T) {
        let x1 = (x + w).min(self.width);
        let y1 = (y + h).min(self.height);
        for row in y..y1 {
            let start = row as usize * self.width as usize;
            self.data[start + x as usize..start + x1 as usize].fill(value);
        }
    }

    /// Bilinear resample to exactly `target_w x target_h` using the
    /// half-pixel-center convention. Identity dimensions return a bit-exact
    /// copy.
    pub fn resize_bilinear(&self, target_w: u32, target_h: u32) -> Raster<T> {
        assert!(target_w > 0 && target_h > 0, "target dimensions must be positive");
        if target_w == self.width && target_h == self.height {
            return self.clone();
        }

        let sw = self.width as usize;
        let sx_ratio = f64::from(self.width) / f64::from(target_w);
        let sy_ratio = f64::from(self.height) / f64::from(target_h);

        let mut data = Vec::with_capacity(target_w as usize * target_h as usize);
        for ty in 0..target_h {
            let sy = ((f64::from(ty) + 0.5) * sy_ratio - 0.5)
                .clamp(0.0, f64::from(self.height - 1));
            let y0 = sy.floor() as usize;
            let y1 = (y0 + 1).min(self.height as usize - 1);
            let fy = num::<T>(sy - y0 as f64);

            for tx in 0..target_w {
                let sx = ((f64::from(tx) + 0.5) * sx_ratio - 0.5)
                    .clamp(0.0, f64::from(self.width - 1));
                let x0 = sx.floor() as usize;
                let x1 = (x0 + 1).min(self.width as usize - 1);
                let fx = num::<T>(sx - x0 as f64);

                let one = T::one();
                let top = self.data[y0 * sw + x0] * (one - fx) + self.data[y0 * sw + x1] * fx;
                let bottom = self.data[y1 * sw + x0] * (one - fx) + self.data[y1 * sw + x1] * fx;
                data.push(top * (one - fy) + bottom * fy);
            }
        }

        Raster {
            width: target_w,
            height: target_h,
            data,
        }
    }

    /// Encodes as binary PGM (P5, maxval 255); intensities are clamped to
    /// `[0, 1]` and quantized to 8 bits.
    pub fn to_pgm(&self) -> Vec<u8> {
        let header = format!("P5\n{} {}\n255\n", self.width, self.height);
        let mut out = Vec::with_capacity(header.len() + self.data.len());
        out.extend_from_slice(header.as_bytes());
        let max = num::<T>(255.0);
        for &v in &self.data {
            let q = (v.max(T::zero()).min(T::one()) * max).round();
            out.push(q.to_u8().unwrap_or(255));
        }
        out
    }

    /// Decodes a binary PGM (P5) with maxval <= 255.
    pub fn from_pgm_bytes(bytes: &[u8]) -> Result<Raster<T>> {
        let bad = |msg: &str| Error::Io(std::io::Error::other(format!("pgm: {msg}")));

        let mut pos = 0usize;
        let mut next_token = || -> Result<String> {
            // skip whitespace and '#' comments
            loop {
                while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos < bytes.len() && bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                    continue;
                }
                break;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
        };

        if next_token()? != "P5" {
            return Err(bad("not a binary PGM (P5)"));
        }
        let width: u32 = next_token()?.parse().map_err(|_| bad("bad width"))?;
        let height: u32 = next_token()?.parse().map_err(|_| bad("bad height"))?;
        let maxval: u32 = next_token()?.parse().map_err(|_| bad("bad maxval"))?;
        if width == 0 || height == 0 {
            return Err(bad("zero dimension"));
        }
        if maxval == 0 || maxval > 255 {
            return Err(bad("unsupported maxval"));
        }
        // exactly one whitespace byte separates the header from the pixels
        pos += 1;

        let expected = width as usize * height as usize;
        if bytes.len() < pos + expected {
            return Err(bad("truncated pixel data"));
        }
        let scale = num::<T>(1.0 / f64::from(maxval));
        let data = bytes[pos..pos + expected]
            .iter()
            .map(|&b| num::<T>(f64::from(b)) * scale)
            .collect();
        Ok(Raster {
            width,
            height,
            data,
        })
    }

    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_pgm())?;
        Ok(())
    }

    pub fn read_pgm(path: &Path) -> Result<Raster<T>> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Raster::from_pgm_bytes(&bytes)
    }
}
