//! Binary sky/ground masks, the vision front-end's sole input.

/// Classification of one mask cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    Sky,
    Ground,
}

/// Row-major H x W grid of sky/ground cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    cells: Vec<Cell>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, cells: Vec<Cell>) -> Self {
        assert_eq!(
            cells.len(),
            (width as usize) * (height as usize),
            "cell count must equal width * height"
        );
        Self { width, height, cells }
    }

    /// Build a mask by evaluating `f(u, v)` at every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> Cell) -> Self {
        let mut cells = Vec::with_capacity((width as usize) * (height as usize));
        for v in 0..height {
            for u in 0..width {
                cells.push(f(u, v));
            }
        }
        Self { width, height, cells }
    }

    /// Uniform mask of a single class.
    pub fn filled(width: u32, height: u32, cell: Cell) -> Self {
        Self {
            width,
            height,
            cells: vec![cell; (width as usize) * (height as usize)],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, u: u32, v: u32) -> Cell {
        debug_assert!(u < self.width && v < self.height);
        self.cells[(v as usize) * (self.width as usize) + (u as usize)]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn count_ground(&self) -> usize {
        self.cells.iter().filter(|&&c| c == Cell::Ground).count()
    }

    /// A frame is trackable for the skyline when every column holds both
    /// classes somewhere.
    pub fn is_trackable(&self) -> bool {
        (0..self.width).all(|u| {
            let mut sky = false;
            let mut ground = false;
            for v in 0..self.height {
                match self.get(u, v) {
                    Cell::Sky => sky = true,
                    Cell::Ground => ground = true,
                }
                if sky && ground {
                    return true;
                }
            }
            false
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn horizontal_boundary(width: u32, height: u32, boundary_row: u32) -> BinaryMask {
        BinaryMask::from_fn(width, height, |_, v| {
            if v < boundary_row {
                Cell::Sky
            } else {
                Cell::Ground
            }
        })
    }

    #[test]
    fn indexing_is_row_major() {
        let m = BinaryMask::from_fn(3, 2, |u, v| if u == 2 && v == 1 { Cell::Ground } else { Cell::Sky });
        assert_eq!(m.get(2, 1), Cell::Ground);
        assert_eq!(m.get(2, 0), Cell::Sky);
        assert_eq!(m.cells()[5], Cell::Ground);
    }

    #[test]
    fn trackability() {
        assert!(horizontal_boundary(4, 4, 2).is_trackable());
        assert!(!BinaryMask::filled(4, 4, Cell::Sky).is_trackable());
        assert!(!BinaryMask::filled(4, 4, Cell::Ground).is_trackable());
    }

    #[test]
    fn ground_count() {
        assert_eq!(horizontal_boundary(4, 4, 1).count_ground(), 12);
    }
}
