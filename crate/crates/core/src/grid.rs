//! Toroidal grid topology.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridDims {
    pub rows: usize,
    pub cols: usize,
}

impl GridDims {
    pub const fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols }
    }

    pub const fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn site(&self, index: usize) -> Site {
        Site {
            row: index / self.cols,
            col: index % self.cols,
        }
    }

    pub fn index(&self, site: Site) -> usize {
        site.row * self.cols + site.col
    }

    /// Site reached from `site` by a signed offset, wrapping on both axes.
    pub fn offset(&self, site: Site, dr: isize, dc: isize) -> Site {
        let wrap = |v: usize, d: isize, n: usize| -> usize {
            (v as isize + d).rem_euclid(n as isize) as usize
        };
        Site {
            row: wrap(site.row, dr, self.rows),
            col: wrap(site.col, dc, self.cols),
        }
    }

    /// Checks that a box of the given radius fits without wrapping onto itself.
    pub fn check_radius(&self, radius: usize) -> Result<()> {
        if radius == 0 {
            return Err(Error::Config("neighborhood radius must be at least 1".into()));
        }
        let span = 2 * radius + 1;
        if self.rows < span || self.cols < span {
            return Err(Error::Config(format!(
                "grid {}x{} is smaller than the {span}x{span} neighborhood of radius {radius}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for GridDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

impl std::str::FromStr for GridDims {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (r, c) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Config(format!("expected RxC grid dims, got `{s}`")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad grid dimension `{v}` in `{s}`")))
        };
        Ok(GridDims::new(parse(r)?, parse(c)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub row: usize,
    pub col: usize,
}

impl Site {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

impl std::fmt::Display for Site {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Row-major offsets of a (2r+1)² box, center excluded.
pub fn box_offsets(radius: usize) -> Vec<(isize, isize)> {
    let r = radius as isize;
    let mut out = Vec::with_capacity((2 * radius + 1).pow(2) - 1);
    for dr in -r..=r {
        for dc in -r..=r {
            if dr != 0 || dc != 0 {
                out.push((dr, dc));
            }
        }
    }
    out
}

/// Sites of the box of `radius` around `site`, excluding `site`, wrapped on
/// the torus, in row-major offset order.
pub fn neighborhood(dims: GridDims, site: Site, radius: usize) -> Result<Vec<Site>> {
    dims.check_radius(radius)?;
    Ok(box_offsets(radius)
        .into_iter()
        .map(|(dr, dc)| dims.offset(site, dr, dc))
        .collect())
}

/// Precomputed neighbour indices for every site of a grid.
///
/// `of(i)[k]` is the flat index of the k-th neighbour of site `i`.
/// `slot_of(i, j)` inverts it: the position of `j` within `of(i)`.
#[derive(Debug, Clone)]
pub struct NeighborTable {
    dims: GridDims,
    width: usize,
    table: Vec<u32>,
}

impl NeighborTable {
    pub fn new(dims: GridDims, radius: usize) -> Result<Self> {
        dims.check_radius(radius)?;
        let offsets = box_offsets(radius);
        let mut table = Vec::with_capacity(dims.len() * offsets.len());
        for i in 0..dims.len() {
            let site = dims.site(i);
            for &(dr, dc) in &offsets {
                table.push(dims.index(dims.offset(site, dr, dc)) as u32);
            }
        }
        Ok(Self {
            dims,
            width: offsets.len(),
            table,
        })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    /// Number of neighbours per site.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn of(&self, index: usize) -> &[u32] {
        &self.table[index * self.width..(index + 1) * self.width]
    }

    pub fn slot_of(&self, index: usize, neighbor: usize) -> Option<usize> {
        self.of(index).iter().position(|&n| n as usize == neighbor)
    }
}
