use super::registry::MemeRegistry;

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
    /// Registry index of each row.
    pub rows: Vec<usize>,
}

impl Raster {
    pub fn dark(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![0; width * height],
            rows: Vec::new(),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    /// Binary portable graymap.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn from_pgm(bytes: &[u8]) -> Option<Self> {
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?);
        }
        if fields[0] != "P5" || fields[3] != "255" {
            return None;
        }
        let width: usize = fields[1].parse().ok()?;
        let height: usize = fields[2].parse().ok()?;
        let pixels = bytes.get(pos + 1..)?.to_vec();
        (pixels.len() == width * height).then(|| Self {
            width,
            height,
            pixels,
            rows: Vec::new(),
        })
    }
}

/// Rows are memes whose peak exceeds `threshold`, in order of appearance;
/// columns are steps max-pooled over blocks of `downsample`. A pixel is
/// bright iff the population exceeded `threshold` anywhere in its block.
pub fn render_raster(registry: &MemeRegistry, threshold: u32, downsample: usize) -> Raster {
    let steps = registry.steps();
    let (Some(first), Some(last)) = (steps.first(), steps.last()) else {
        return Raster::dark(1, 1);
    };
    let block = downsample.max(1) as u64;
    let width = ((last.step - first.step) / block + 1) as usize;
    let mut row_of = vec![u32::MAX; registry.memes().len()];
    let mut rows = Vec::new();
    for (i, m) in registry.memes().iter().enumerate() {
        if m.peak > threshold {
            row_of[i] = rows.len() as u32;
            rows.push(i);
        }
    }
    if rows.is_empty() {
        return Raster::dark(width, 1);
    }
    let mut r = Raster::dark(width, rows.len());
    for s in steps {
        let col = ((s.step - first.step) / block) as usize;
        for &(idx, pop) in &s.entries {
            let row = row_of[idx as usize];
            if row != u32::MAX && pop > threshold {
                r.pixels[row as usize * width + col] = 255;
            }
        }
    }
    r.rows = rows;
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_registry_is_one_dark_pixel() {
        let r = render_raster(&MemeRegistry::new(4), 80, 1);
        assert_eq!((r.width, r.height, r.pixels.clone()), (1, 1, vec![0]));
    }

    #[test]
    fn single_run_of_eleven() {
        let mut reg = MemeRegistry::new(100);
        for t in 0..30 {
            let pop = if (10..=20).contains(&t) { 90 } else { 50 };
            reg.update(&[(1, pop), (2, 100 - pop)], t);
        }
        let r = render_raster(&reg, 80, 1);
        assert_eq!(r.height, 1);
        assert_eq!(r.width, 30);
        let bright: Vec<usize> = (0..30).filter(|&c| r.get(0, c) == 255).collect();
        assert_eq!(bright, (10..=20).collect::<Vec<_>>());
    }

    #[test]
    fn max_pooling_keeps_brief_dominance() {
        let mut reg = MemeRegistry::new(100);
        for t in 0..100 {
            let pop = if t == 37 { 100 } else { 1 };
            reg.update(&[(1, pop), (2, 100 - pop)], t);
        }
        let r = render_raster(&reg, 80, 10);
        assert_eq!(r.width, 10);
        let bright: Vec<usize> = (0..10).filter(|&c| r.get(r.rows.iter().position(|&i| i == 0).unwrap(), c) == 255).collect();
        assert_eq!(bright, vec![3]);
    }

    #[test]
    fn threshold_above_grid_is_dark() {
        let mut reg = MemeRegistry::new(100);
        for t in 0..10 {
            reg.update(&[(1, 100)], t);
        }
        let r = render_raster(&reg, 100, 1);
        assert!(r.pixels.iter().all(|&p| p == 0));
    }

    #[test]
    fn staircase_descends() {
        let mut reg = MemeRegistry::new(100);
        for t in 0..50u64 {
            let k = (t / 10) as u32;
            reg.update(&[(k, 100)], t);
        }
        let r = render_raster(&reg, 80, 1);
        assert_eq!(r.height, 5);
        for row in 0..5 {
            let bright: Vec<usize> = (0..50).filter(|&c| r.get(row, c) == 255).collect();
            assert_eq!(bright, (row * 10..row * 10 + 10).collect::<Vec<_>>());
        }
    }

    #[test]
    fn pgm_round_trip() {
        let mut r = Raster::dark(3, 2);
        r.pixels[4] = 255;
        let back = Raster::from_pgm(&r.to_pgm()).unwrap();
        assert_eq!(back.pixels, r.pixels);
        assert_eq!((back.width, back.height), (3, 2));
    }
}
