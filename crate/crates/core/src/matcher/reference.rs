use std::fmt;
use std::str::FromStr;

use super::MatchError;
use crate::image::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CostFunction {
    Sad,
    #[default]
    Census,
}

impl fmt::Display for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostFunction::Sad => "sad",
            CostFunction::Census => "census",
        })
    }
}

impl FromStr for CostFunction {
    type Err = MatchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sad" => Ok(CostFunction::Sad),
            "census" => Ok(CostFunction::Census),
            _ => Err(MatchError::InvalidConfig(format!(
                "unknown cost function '{s}' (expected sad or census)"
            ))),
        }
    }
}

/// Block size, disparity range and cost function of a matcher.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatchConfig {
    pub block_rows: usize,
    pub block_cols: usize,
    /// Number of candidate disparities, `0..max_disparity`.
    pub max_disparity: u32,
    pub cost: CostFunction,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            block_rows: 5,
            block_cols: 5,
            max_disparity: 60,
            cost: CostFunction::Census,
        }
    }
}

impl MatchConfig {
    pub fn new(
        cost: CostFunction,
        block_rows: usize,
        block_cols: usize,
        max_disparity: u32,
    ) -> Result<Self, MatchError> {
        let cfg = Self {
            block_rows,
            block_cols,
            max_disparity,
            cost,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), MatchError> {
        let (r, c) = (self.block_rows, self.block_cols);
        if r == 0 || c == 0 || r % 2 == 0 || c % 2 == 0 {
            return Err(MatchError::InvalidConfig(format!(
                "block {r}x{c} must have odd, positive extents"
            )));
        }
        if self.max_disparity == 0 {
            return Err(MatchError::InvalidConfig("max disparity must be at least 1".into()));
        }
        if self.max_disparity > u32::from(u16::MAX) {
            return Err(MatchError::InvalidConfig(format!(
                "max disparity {} exceeds {}",
                self.max_disparity,
                u16::MAX
            )));
        }
        if self.cost == CostFunction::Census && r * c - 1 > 64 {
            return Err(MatchError::InvalidConfig(format!(
                "census block {r}x{c} needs more than 64 bits"
            )));
        }
        Ok(())
    }

    pub(crate) fn check_images(&self, left: &Image, right: &Image) -> Result<(), MatchError> {
        self.validate()?;
        if left.dims() != right.dims() {
            return Err(MatchError::DimensionMismatch {
                left: left.dims(),
                right: right.dims(),
            });
        }
        let (width, height) = left.dims();
        if width < self.block_cols || height < self.block_rows {
            return Err(MatchError::ImageTooSmall {
                width,
                height,
                rows: self.block_rows,
                cols: self.block_cols,
            });
        }
        Ok(())
    }
}

/// Per-pixel disparity in `0..max_disparity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    max_disparity: u32,
    values: Vec<u16>,
}

impl DisparityMap {
    pub fn new(width: usize, height: usize, max_disparity: u32, values: Vec<u16>) -> Result<Self, MatchError> {
        if values.len() != width * height {
            return Err(MatchError::InvalidConfig(format!(
                "{} disparities for a {width}x{height} map",
                values.len()
            )));
        }
        if let Some(&d) = values.iter().find(|&&d| u32::from(d) >= max_disparity) {
            return Err(MatchError::InvalidConfig(format!(
                "disparity {d} outside 0..{max_disparity}"
            )));
        }
        Ok(Self {
            width,
            height,
            max_disparity,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn max_disparity(&self) -> u32 {
        self.max_disparity
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.values[y * self.width + x]
    }

    /// Grayscale rendering. Raw mode stores `d` directly; normalized mode
    /// scales `0..=D-1` onto `0..=255`.
    pub fn to_image(&self, normalize: bool) -> Result<Image, MatchError> {
        let top = u64::from(self.max_disparity - 1);
        if !normalize && top > 255 {
            return Err(MatchError::RangeTooWide(self.max_disparity));
        }
        let px = self
            .values
            .iter()
            .map(|&d| match (normalize, top) {
                (true, 0) => 0,
                (true, _) => (u64::from(d) * 255 / top) as u8,
                (false, _) => d as u8,
            })
            .collect();
        Image::from_vec(self.width, self.height, px).map_err(|e| MatchError::InvalidConfig(e.to_string()))
    }
}

fn clamp_idx(v: i64, n: usize) -> usize {
    v.clamp(0, n as i64 - 1) as usize
}

/// Naive matcher used as ground truth. Reads outside the image are clamped
/// cell by cell; the smallest disparity wins ties.
///
/// SAD compares the reference block at `(u, v)` with the target block at
/// `(u - d, v)`. Census compares the census vector of the reference pixel
/// with the census vector of target pixel `(clamp(u - d), v)`.
pub fn match_reference(left: &Image, right: &Image, cfg: &MatchConfig) -> Result<DisparityMap, MatchError> {
    cfg.check_images(left, right)?;
    let (w, h) = left.dims();
    let (hr, hc) = ((cfg.block_rows / 2) as i64, (cfg.block_cols / 2) as i64);
    let px = |img: &Image, x: i64, y: i64| i64::from(img.get(clamp_idx(x, w), clamp_idx(y, h)));

    let census_of = |img: &Image| -> Vec<u64> {
        let mut out = Vec::with_capacity(w * h);
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let center = px(img, x, y);
                let mut bits = 0u64;
                let mut k = 0;
                for dy in -hr..=hr {
                    for dx in -hc..=hc {
                        if dy == 0 && dx == 0 {
                            continue;
                        }
                        if px(img, x + dx, y + dy) > center {
                            bits |= 1 << k;
                        }
                        k += 1;
                    }
                }
                out.push(bits);
            }
        }
        out
    };
    let census = match cfg.cost {
        CostFunction::Census => Some((census_of(left), census_of(right))),
        CostFunction::Sad => None,
    };

    let mut values = Vec::with_capacity(w * h);
    for v in 0..h as i64 {
        for u in 0..w as i64 {
            let mut best: Option<(u64, u16)> = None;
            for d in 0..cfg.max_disparity {
                let ut = u - i64::from(d);
                let cost = match &census {
                    Some((cl, cr)) => {
                        let a = cl[v as usize * w + u as usize];
                        let b = cr[v as usize * w + clamp_idx(ut, w)];
                        u64::from((a ^ b).count_ones())
                    }
                    None => {
                        let mut s = 0u64;
                        for dy in -hr..=hr {
                            for dx in -hc..=hc {
                                let a = px(left, u + dx, v + dy);
                                let b = px(right, ut + dx, v + dy);
                                s += (a - b).unsigned_abs();
                            }
                        }
                        s
                    }
                };
                if best.is_none_or(|(c, _)| cost < c) {
                    best = Some((cost, d as u16));
                }
            }
            values.push(best.expect("at least one disparity").1);
        }
    }
    DisparityMap::new(w, h, cfg.max_disparity, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Right view is the left view moved `shift` pixels to the left.
    fn shifted_pair(w: usize, h: usize, shift: usize) -> (Image, Image) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(shift as u64);
        let left = Image::from_fn(w, h, |_, _| rng.gen()).unwrap();
        let right = Image::from_fn(w, h, |x, y| left.get((x + shift).min(w - 1), y)).unwrap();
        (left, right)
    }

    #[test]
    fn recovers_constant_shift() {
        for cost in [CostFunction::Sad, CostFunction::Census] {
            let (l, r) = shifted_pair(48, 16, 3);
            let cfg = MatchConfig::new(cost, 5, 5, 8).unwrap();
            let map = match_reference(&l, &r, &cfg).unwrap();
            let mut hits = 0;
            let mut total = 0;
            for y in 2..14 {
                for x in 8..44 {
                    total += 1;
                    hits += usize::from(map.get(x, y) == 3);
                }
            }
            assert!(hits * 100 >= total * 99, "{cost}: {hits}/{total}");
        }
    }

    #[test]
    fn identical_images_give_zero() {
        let (l, _) = shifted_pair(16, 8, 0);
        for cost in [CostFunction::Sad, CostFunction::Census] {
            let cfg = MatchConfig::new(cost, 3, 5, 6).unwrap();
            let map = match_reference(&l, &l, &cfg).unwrap();
            assert!(map.values().iter().all(|&d| d == 0));
        }
    }

    #[test]
    fn config_and_input_errors() {
        assert!(MatchConfig::new(CostFunction::Sad, 4, 3, 8).is_err());
        assert!(MatchConfig::new(CostFunction::Sad, 3, 3, 0).is_err());
        assert!(MatchConfig::new(CostFunction::Census, 9, 9, 8).is_err());
        let a = Image::filled(8, 8, 0u8).unwrap();
        let b = Image::filled(8, 7, 0u8).unwrap();
        let cfg = MatchConfig::default();
        assert!(matches!(
            match_reference(&a, &b, &cfg),
            Err(MatchError::DimensionMismatch { .. })
        ));
        let tiny = Image::filled(4, 4, 0u8).unwrap();
        assert!(matches!(
            match_reference(&tiny, &tiny, &cfg),
            Err(MatchError::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn rendering() {
        let map = DisparityMap::new(3, 1, 60, vec![0, 59, 30]).unwrap();
        assert_eq!(map.to_image(true).unwrap().pixels(), &[0, 255, 129]);
        assert_eq!(map.to_image(false).unwrap().pixels(), &[0, 59, 30]);
        let wide = DisparityMap::new(1, 1, 300, vec![299]).unwrap();
        assert_eq!(wide.to_image(false), Err(MatchError::RangeTooWide(300)));
        assert!(DisparityMap::new(1, 1, 4, vec![4]).is_err());
        assert_eq!("SAD".parse::<CostFunction>().unwrap(), CostFunction::Sad);
        assert!("ncc".parse::<CostFunction>().is_err());
    }
}
