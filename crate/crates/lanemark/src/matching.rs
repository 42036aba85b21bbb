//! Slanted-stripe lane templates and normalized cross-correlation matching.
//!
//! Templates are synthetic 0/255 rasters with one bright band through the
//! center; the left and right variants mirror each other's slant. Matching
//! slides a template over the half-binary image and scores every placement
//! with zero-mean NCC, clamped below so the map lies in [0, 1] and fixed
//! thresholds stay comparable across frames.
//!
//! The matcher exploits that inputs are 8-bit and the template is binary:
//! all sums are integer-valued and accumulated exactly in f64 (row prefix
//! sums for the cross term, summed-area tables for the patch moments), so
//! the output equals the textbook double-loop NCC to rounding error.

use crate::error::{Error, Result};
use crate::imgcore::{FloatMap, GrayImage};

/// Which lane marker a template (or a traced chain) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Square slanted-stripe kernel. `theta` is the drawn stripe angle in
/// radians from the image +x axis, folded into (0, pi).
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub size: usize,
    /// Row-major pixels, 0 or 255 only.
    pub pixels: Vec<u8>,
    pub theta: f64,
    pub side: Side,
    pub stripe_width: usize,
}

fn stripe_pixels(size: usize, angle: f64, stripe_width: usize) -> Vec<u8> {
    let c = (size as f64 - 1.0) / 2.0;
    let (sin, cos) = angle.sin_cos();
    let half = stripe_width as f64 / 2.0;
    let mut pixels = vec![0u8; size * size];
    for y in 0..size {
        for x in 0..size {
            // Distance from the pixel center to the line through the
            // template center with direction (cos, sin).
            let d = -(x as f64 - c) * sin + (y as f64 - c) * cos;
            if d.abs() <= half {
                pixels[y * size + x] = 255;
            }
        }
    }
    pixels
}

/// Build a lane template. `theta` is interpreted for the left side; the
/// right side draws its mirror `pi - theta`.
pub fn make_template(size: usize, theta: f64, stripe_width: usize, side: Side) -> Result<Template> {
    if stripe_width == 0 || stripe_width >= size {
        return Err(Error::Parameter(format!(
            "stripe width {stripe_width} must lie in (0, {size})"
        )));
    }
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::Parameter(format!(
            "template angle {theta} must lie in (0, pi)"
        )));
    }
    let drawn = match side {
        Side::Left => theta,
        Side::Right => std::f64::consts::PI - theta,
    };
    Ok(Template {
        size,
        pixels: stripe_pixels(size, drawn, stripe_width),
        theta: drawn,
        side,
        stripe_width,
    })
}

/// Regenerate a template at a new stripe angle (same size, width and side).
/// The angle is folded into [0, pi); equal angles reproduce equal pixels.
pub fn rotate_template(t: &Template, new_theta: f64) -> Template {
    let folded = new_theta.rem_euclid(std::f64::consts::PI);
    Template {
        size: t.size,
        pixels: stripe_pixels(t.size, folded, t.stripe_width),
        theta: folded,
        side: t.side,
        stripe_width: t.stripe_width,
    }
}

/// Per-row [start, end] columns of the template's bright band, when each
/// row's bright pixels are contiguous (always true for a straight stripe).
fn bright_intervals(t: &Template) -> Option<Vec<Option<(usize, usize)>>> {
    let mut rows = Vec::with_capacity(t.size);
    for y in 0..t.size {
        let row = &t.pixels[y * t.size..(y + 1) * t.size];
        let first = row.iter().position(|&p| p == 255);
        match first {
            None => rows.push(None),
            Some(a) => {
                let b = row.iter().rposition(|&p| p == 255).unwrap();
                if row[a..=b].iter().any(|&p| p != 255) {
                    return None; // gap: fall back to the generic path
                }
                rows.push(Some((a, b)));
            }
        }
    }
    Some(rows)
}

/// Zero-mean NCC of `template` against every placement where it fits
/// entirely inside `image`. The score lands on the patch's center pixel;
/// borders and zero-variance patches score 0; raw scores are clamped from
/// below by `floor`.
pub fn ncc_match(image: &GrayImage, template: &Template, floor: f64) -> Result<FloatMap> {
    let (w, h, ts) = (image.width, image.height, template.size);
    if ts > w || ts > h {
        return Err(Error::Input(format!(
            "template {ts}x{ts} larger than image {w}x{h}"
        )));
    }

    // Template moments (integer-valued, exact in f64).
    let n = (ts * ts) as f64;
    let mut t_sum = 0.0;
    let mut t_sq = 0.0;
    for &p in &template.pixels {
        let v = f64::from(p);
        t_sum += v;
        t_sq += v * v;
    }
    let t_var_term = n * t_sq - t_sum * t_sum;

    let mut out = FloatMap::zeros(w, h);
    if t_var_term <= 0.0 {
        return Ok(out); // uniform template matches nothing
    }

    // Row prefix sums and summed-area tables of I and I^2. All entries are
    // integer-valued and below 2^53, so f64 arithmetic on them is exact.
    let mut row_prefix = vec![0.0f64; (w + 1) * h];
    for y in 0..h {
        let base = y * (w + 1);
        for x in 0..w {
            row_prefix[base + x + 1] =
                row_prefix[base + x] + f64::from(image.data[y * w + x]);
        }
    }
    let mut sat = vec![0.0f64; (w + 1) * (h + 1)];
    let mut sat_sq = vec![0.0f64; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row_acc = 0.0;
        let mut row_acc_sq = 0.0;
        for x in 0..w {
            let v = f64::from(image.data[y * w + x]);
            row_acc += v;
            row_acc_sq += v * v;
            sat[(y + 1) * (w + 1) + x + 1] = sat[y * (w + 1) + x + 1] + row_acc;
            sat_sq[(y + 1) * (w + 1) + x + 1] = sat_sq[y * (w + 1) + x + 1] + row_acc_sq;
        }
    }
    // Bright rows as (row, first, last) triples; the generic offset list
    // only kicks in for templates whose rows are not contiguous.
    let interval_rows: Option<Vec<(usize, usize, usize)>> = bright_intervals(template).map(|rows| {
        rows.iter()
            .enumerate()
            .filter_map(|(v, iv)| iv.map(|(a, b)| (v, a, b)))
            .collect()
    });
    let offsets: Vec<(usize, usize)> = if interval_rows.is_none() {
        (0..ts * ts)
            .filter(|&k| template.pixels[k] == 255)
            .map(|k| (k % ts, k / ts))
            .collect()
    } else {
        Vec::new()
    };

    let center_off = ts / 2;
    let out_w = w - ts + 1;
    let mut bright = vec![0.0f64; out_w];
    for y0 in 0..=(h - ts) {
        // Cross term: sum of image values under the template's bright band,
        // accumulated one template row at a time as contiguous sweeps.
        match &interval_rows {
            Some(rows) => {
                bright.fill(0.0);
                for &(v, a, b) in rows {
                    let rp = &row_prefix[(y0 + v) * (w + 1)..(y0 + v + 1) * (w + 1)];
                    for (x0, acc) in bright.iter_mut().enumerate() {
                        *acc += rp[x0 + b + 1] - rp[x0 + a];
                    }
                }
            }
            None => {
                for (x0, acc) in bright.iter_mut().enumerate() {
                    *acc = offsets
                        .iter()
                        .map(|&(u, v)| f64::from(image.data[(y0 + v) * w + x0 + u]))
                        .sum();
                }
            }
        }
        let sat_top = &sat[y0 * (w + 1)..(y0 + 1) * (w + 1)];
        let sat_bot = &sat[(y0 + ts) * (w + 1)..(y0 + ts + 1) * (w + 1)];
        let sq_top = &sat_sq[y0 * (w + 1)..(y0 + 1) * (w + 1)];
        let sq_bot = &sat_sq[(y0 + ts) * (w + 1)..(y0 + ts + 1) * (w + 1)];
        let out_row = &mut out.data[(y0 + center_off) * w..(y0 + center_off + 1) * w];
        for x0 in 0..out_w {
            let p_sum = sat_bot[x0 + ts] - sat_top[x0 + ts] - sat_bot[x0] + sat_top[x0];
            let p_sq = sq_bot[x0 + ts] - sq_top[x0 + ts] - sq_bot[x0] + sq_top[x0];
            let p_var_term = n * p_sq - p_sum * p_sum;
            let score = if p_var_term <= 0.0 {
                0.0
            } else {
                let num = n * (255.0 * bright[x0]) - t_sum * p_sum;
                let s = num / (p_var_term * t_var_term).sqrt();
                s.clamp(-1.0, 1.0).max(floor)
            };
            out_row[x0 + center_off] = score;
        }
    }
    Ok(out)
}
