//! Binary PGM (P5) reader/writer.
//!
//! Three uses share this codec: 8-bit grayscale frames and masks, 16-bit
//! depth rasters holding millimeters, and 16-bit quantized float maps whose
//! scale travels in a `# scale=<maxValue>` header comment. 16-bit samples
//! are big-endian per the netpbm convention. The writer emits a canonical
//! header so that save(load(x)) is byte-identical for files it produced.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::imgcore::raster::{DepthImage, FloatMap, GrayImage};

/// Key of the header comment carrying a float map's quantization scale.
pub const FLOAT_MAP_SCALE_KEY: &str = "scale";

struct Pgm {
    width: usize,
    height: usize,
    maxval: u32,
    /// Samples widened to u16 regardless of depth.
    samples: Vec<u16>,
    /// Comment lines without the leading `#` and surrounding whitespace.
    comments: Vec<String>,
}

fn parse(bytes: &[u8], path: &Path) -> Result<Pgm> {
    let bad = |msg: &str| Error::Format(format!("{}: {msg}", path.display()));
    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        return Err(bad("not a binary PGM (missing P5 magic)"));
    }
    let mut pos = 2usize;
    let mut comments = Vec::new();

    // Reads the next ASCII integer token, skipping whitespace and comments.
    let mut next_token = |pos: &mut usize| -> Result<u32> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                let start = *pos + 1;
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                let text = String::from_utf8_lossy(&bytes[start..*pos]).trim().to_string();
                comments.push(text);
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            return Err(Error::Format(format!(
                "{}: expected integer in header",
                path.display()
            )));
        }
        std::str::from_utf8(&bytes[start..*pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("{}: bad header integer", path.display())))
    };

    let width = next_token(&mut pos)? as usize;
    let height = next_token(&mut pos)? as usize;
    let maxval = next_token(&mut pos)?;
    if maxval == 0 || maxval > 65535 {
        return Err(bad("maxval out of range"));
    }
    // Exactly one whitespace byte separates the header from the payload.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(bad("missing header/payload separator"));
    }
    pos += 1;

    let n = width
        .checked_mul(height)
        .ok_or_else(|| bad("raster size overflow"))?;
    let payload = &bytes[pos..];
    let samples = if maxval <= 255 {
        if payload.len() != n {
            return Err(bad("payload size does not match header"));
        }
        payload.iter().map(|&b| u16::from(b)).collect()
    } else {
        if payload.len() != 2 * n {
            return Err(bad("payload size does not match header"));
        }
        payload
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    };
    Ok(Pgm {
        width,
        height,
        maxval,
        samples,
        comments,
    })
}

fn write(path: &Path, width: usize, height: usize, maxval: u32, samples: &[u16], comments: &[String]) -> Result<()> {
    let mut out = Vec::with_capacity(samples.len() * 2 + 64);
    out.extend_from_slice(b"P5\n");
    for c in comments {
        out.extend_from_slice(format!("# {c}\n").as_bytes());
    }
    out.extend_from_slice(format!("{width} {height}\n{maxval}\n").as_bytes());
    if maxval <= 255 {
        out.extend(samples.iter().map(|&s| s as u8));
    } else {
        for &s in samples {
            out.extend_from_slice(&s.to_be_bytes());
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Load an 8-bit grayscale PGM (P5, maxval 255).
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let pgm = parse(&fs::read(path)?, path)?;
    if pgm.maxval != 255 {
        return Err(Error::Format(format!(
            "{}: expected 8-bit grayscale (maxval 255), got {}",
            path.display(),
            pgm.maxval
        )));
    }
    GrayImage::new(pgm.width, pgm.height, pgm.samples.iter().map(|&s| s as u8).collect())
}

pub fn save_gray(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let samples: Vec<u16> = img.data.iter().map(|&b| u16::from(b)).collect();
    write(path.as_ref(), img.width, img.height, 255, &samples, &[])
}

/// Load a 16-bit depth PGM holding millimeters; zero samples become invalid.
pub fn load_depth_mm(path: impl AsRef<Path>) -> Result<DepthImage> {
    let path = path.as_ref();
    let pgm = parse(&fs::read(path)?, path)?;
    if pgm.maxval != 65535 {
        return Err(Error::Format(format!(
            "{}: expected 16-bit depth (maxval 65535), got {}",
            path.display(),
            pgm.maxval
        )));
    }
    DepthImage::from_millimeters(pgm.width, pgm.height, &pgm.samples)
}

pub fn save_depth_mm(depth: &DepthImage, path: impl AsRef<Path>) -> Result<()> {
    let samples: Vec<u16> = depth
        .data
        .iter()
        .zip(depth.valid.iter())
        .map(|(&m, &v)| {
            if v {
                (m * 1000.0).round().clamp(1.0, 65535.0) as u16
            } else {
                0
            }
        })
        .collect();
    write(path.as_ref(), depth.width, depth.height, 65535, &samples, &[])
}

/// Save a float map as a 16-bit PGM, linearly quantizing `[0, max]` to
/// `[0, 65535]`; the scale rides in a `# scale=<max>` header comment.
pub fn save_float_map(map: &FloatMap, path: impl AsRef<Path>) -> Result<()> {
    for &v in &map.data {
        if !v.is_finite() {
            return Err(Error::Input("float map contains non-finite values".into()));
        }
    }
    let mut scale = map.max_value();
    if scale <= 0.0 {
        scale = 1.0;
    }
    let samples: Vec<u16> = map
        .data
        .iter()
        .map(|&v| ((v.clamp(0.0, scale) / scale) * 65535.0).round() as u16)
        .collect();
    let comment = format!("{FLOAT_MAP_SCALE_KEY}={scale:?}");
    write(path.as_ref(), map.width, map.height, 65535, &samples, &[comment])
}

/// Load a float map written by [`save_float_map`].
pub fn load_float_map(path: impl AsRef<Path>) -> Result<FloatMap> {
    let path = path.as_ref();
    let pgm = parse(&fs::read(path)?, path)?;
    let scale: f64 = pgm
        .comments
        .iter()
        .find_map(|c| c.strip_prefix(&format!("{FLOAT_MAP_SCALE_KEY}=")))
        .ok_or_else(|| Error::Format(format!("{}: missing scale comment", path.display())))?
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("{}: unparsable scale comment", path.display())))?;
    let data = pgm
        .samples
        .iter()
        .map(|&q| f64::from(q) * scale / 65535.0)
        .collect();
    FloatMap::new(pgm.width, pgm.height, data)
}

/// Save a boolean mask as an 8-bit PGM with 0/255 pixels.
pub fn save_mask(width: usize, height: usize, mask: &[bool], path: impl AsRef<Path>) -> Result<()> {
    if mask.len() != width * height {
        return Err(Error::Input("mask length mismatch".into()));
    }
    let samples: Vec<u16> = mask.iter().map(|&b| if b { 255 } else { 0 }).collect();
    write(path.as_ref(), width, height, 255, &samples, &[])
}

/// Load a mask saved by [`save_mask`]; any nonzero pixel is set.
pub fn load_mask(path: impl AsRef<Path>) -> Result<(usize, usize, Vec<bool>)> {
    let path = path.as_ref();
    let pgm = parse(&fs::read(path)?, path)?;
    Ok((
        pgm.width,
        pgm.height,
        pgm.samples.iter().map(|&s| s != 0).collect(),
    ))
}
