//! Rendering a value as a grid of pixels.
//!
//! The `m` bits of a value are laid out row-major, MSB first, from the
//! top-left corner. A 1 bit is a filled pixel.

use crate::perceptron::{self, bit_width};
use crate::{Error, Result};

pub const FILLED: char = '█';
pub const EMPTY: char = '·';

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternGrid {
    value: u64,
    rows: usize,
    cols: usize,
    pixels: Vec<bool>,
}

/// Default grid shape for `n` data qubits: square when `n` is even,
/// otherwise twice as wide as it is tall.
pub fn default_shape(n: usize) -> (usize, usize) {
    let rows = 1 << (n / 2);
    (rows, bit_width(n) / rows)
}

impl PatternGrid {
    pub fn new(value: u64, n: usize, rows: usize, cols: usize) -> Result<Self> {
        perceptron::check_value("value", value, n)?;
        let m = bit_width(n);
        if rows.checked_mul(cols) != Some(m) {
            return Err(Error::Unsupported {
                message: format!("rows x cols must equal {m} for n = {n}, got {rows}x{cols}"),
            });
        }
        let pixels = (0..m).map(|j| (value >> (m - 1 - j)) & 1 == 1).collect();
        Ok(Self {
            value,
            rows,
            cols,
            pixels,
        })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pixel(&self, row: usize, col: usize) -> bool {
        self.pixels[row * self.cols + col]
    }

    /// Row-major flattening back to a bit string.
    pub fn bit_string(&self) -> String {
        self.pixels
            .iter()
            .map(|&p| if p { '1' } else { '0' })
            .collect()
    }

    pub fn to_ascii(&self) -> String {
        let mut out = String::new();
        for row in self.pixels.chunks(self.cols) {
            out.extend(row.iter().map(|&p| if p { FILLED } else { EMPTY }));
            out.push('\n');
        }
        out
    }

    /// Binary PGM (`P5`), 1 bits black on white, each pixel drawn as a
    /// `scale × scale` block.
    pub fn to_pgm(&self, scale: usize) -> Vec<u8> {
        let scale = scale.max(1);
        let (width, height) = (self.cols * scale, self.rows * scale);
        let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
        for r in 0..height {
            for c in 0..width {
                out.push(if self.pixel(r / scale, c / scale) {
                    0
                } else {
                    255
                });
            }
        }
        out
    }
}
