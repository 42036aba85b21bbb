use crate::error::{Error, Result};

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Input(format!(
                "gray data length {} != {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.data[y * self.width + x] = v;
    }
}

/// Metric depth raster. Invalid pixels carry depth 0.0 and `valid` false;
/// every valid depth is strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthImage {
    pub width: usize,
    pub height: usize,
    /// Depth in meters, row-major.
    pub data: Vec<f64>,
    pub valid: Vec<bool>,
}

impl DepthImage {
    /// Build from metric depths; non-positive or non-finite entries become invalid.
    pub fn from_meters(width: usize, height: usize, meters: Vec<f64>) -> Result<Self> {
        if meters.len() != width * height {
            return Err(Error::Input(format!(
                "depth data length {} != {width}x{height}",
                meters.len()
            )));
        }
        let mut data = meters;
        let mut valid = vec![false; data.len()];
        for (d, v) in data.iter_mut().zip(valid.iter_mut()) {
            if d.is_finite() && *d > 0.0 {
                *v = true;
            } else {
                *d = 0.0;
            }
        }
        Ok(Self {
            width,
            height,
            data,
            valid,
        })
    }

    /// Build from stored millimeter samples; zero means "no measurement".
    pub fn from_millimeters(width: usize, height: usize, mm: &[u16]) -> Result<Self> {
        let meters = mm.iter().map(|&m| f64::from(m) / 1000.0).collect();
        Self::from_meters(width, height, meters)
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.valid[y * self.width + x]
    }
}

/// Unitless real-valued raster; the shared shape of the matching map M,
/// the geometric map G and the fused respond map R.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatMap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl FloatMap {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Input(format!(
                "map data length {} != {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    /// Largest finite value, or 0.0 for an empty map.
    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(0.0_f64, f64::max)
    }

    /// Coordinates and value of the global maximum; ties broken by smallest
    /// row, then smallest column. `None` for an empty map.
    pub fn argmax(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for y in 0..self.height {
            for x in 0..self.width {
                let v = self.at(x, y);
                match best {
                    Some((_, _, b)) if v <= b => {}
                    _ => best = Some((x, y, v)),
                }
            }
        }
        best
    }
}
