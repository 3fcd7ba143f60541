//! Discretization of the roll/pitch manifold into three nested cell resolutions.

use crate::geometry::OrientationRP;
use crate::scalar::Real;

/// Resolution level, coarse to fine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Coarse = 1,
    Mid = 2,
    Fine = 3,
}

impl Level {
    pub fn coarser(self) -> Level {
        match self {
            Level::Fine => Level::Mid,
            Level::Mid | Level::Coarse => Level::Coarse,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Level::Coarse => 0,
            Level::Mid => 1,
            Level::Fine => 2,
        }
    }
}

/// Grid cell address: resolution level plus roll/pitch indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellId {
    pub level: Level,
    pub roll_idx: u32,
    pub pitch_idx: u32,
}

/// Three-level discretization of the bounded roll/pitch chart. Cell sizes are
/// strictly decreasing with an integer nesting factor, so every fine cell sits
/// inside exactly one coarser cell.
#[derive(Clone, Copy, Debug)]
pub struct ManifoldGrid<T> {
    roll_min: T,
    pitch_min: T,
    cell_sizes: [T; 3],
    cells_roll: [u32; 3],
    cells_pitch: [u32; 3],
    nesting: u32,
}

impl<T: Real> ManifoldGrid<T> {
    /// Build a grid over `roll_range` x `pitch_range` with the given coarse
    /// cell size; finer levels divide each cell by `nesting` per axis.
    pub fn new(roll_range: (T, T), pitch_range: (T, T), coarse_cell: T, nesting: u32) -> Self {
        assert!(nesting >= 2, "nesting factor must be at least 2");
        assert!(coarse_cell > T::zero(), "cell size must be positive");
        let roll_span = roll_range.1 - roll_range.0;
        let pitch_span = pitch_range.1 - pitch_range.0;
        assert!(roll_span > T::zero() && pitch_span > T::zero(), "ranges must be nonempty");

        let coarse_roll = (roll_span / coarse_cell).round().as_f64().max(1.0) as u32;
        let coarse_pitch = (pitch_span / coarse_cell).round().as_f64().max(1.0) as u32;
        let mut cell_sizes = [coarse_cell; 3];
        let mut cells_roll = [coarse_roll; 3];
        let mut cells_pitch = [coarse_pitch; 3];
        for lvl in 1..3 {
            cell_sizes[lvl] = cell_sizes[lvl - 1] / T::of(f64::from(nesting));
            cells_roll[lvl] = cells_roll[lvl - 1] * nesting;
            cells_pitch[lvl] = cells_pitch[lvl - 1] * nesting;
        }
        Self {
            roll_min: roll_range.0,
            pitch_min: pitch_range.0,
            cell_sizes,
            cells_roll,
            cells_pitch,
            nesting,
        }
    }

    /// Default grid: +-45 degrees on both axes, 2 degree coarse cells,
    /// factor-4 nesting (0.5 and 0.125 degree mid/fine cells).
    pub fn default_grid() -> Self {
        let quarter = T::FRAC_PI_4();
        Self::new(
            (-quarter, quarter),
            (-quarter, quarter),
            T::radians_from_degrees(2.0),
            4,
        )
    }

    pub fn nesting(&self) -> u32 {
        self.nesting
    }

    pub fn cell_size(&self, level: Level) -> T {
        self.cell_sizes[level.index()]
    }

    pub fn cells(&self, level: Level) -> (u32, u32) {
        (self.cells_roll[level.index()], self.cells_pitch[level.index()])
    }

    pub fn roll_range(&self) -> (T, T) {
        let n = T::of(f64::from(self.cells_roll[0]));
        (self.roll_min, self.roll_min + self.cell_sizes[0] * n)
    }

    pub fn pitch_range(&self) -> (T, T) {
        let n = T::of(f64::from(self.cells_pitch[0]));
        (self.pitch_min, self.pitch_min + self.cell_sizes[0] * n)
    }

    fn axis_index(&self, value: T, min: T, count: u32, size: T) -> u32 {
        let idx = ((value - min) / size).floor().as_f64();
        if idx < 0.0 {
            0
        } else if idx >= f64::from(count) {
            count - 1
        } else {
            idx as u32
        }
    }

    /// Nearest cell at `level` containing (or clamped to) the given state.
    pub fn snap(&self, value: OrientationRP<T>, level: Level) -> CellId {
        let i = level.index();
        CellId {
            level,
            roll_idx: self.axis_index(value.roll, self.roll_min, self.cells_roll[i], self.cell_sizes[i]),
            pitch_idx: self.axis_index(value.pitch, self.pitch_min, self.cells_pitch[i], self.cell_sizes[i]),
        }
    }

    /// Center of a cell.
    pub fn center(&self, cell: CellId) -> OrientationRP<T> {
        let size = self.cell_size(cell.level);
        let half = T::of(0.5);
        OrientationRP::new(
            self.roll_min + size * (T::of(f64::from(cell.roll_idx)) + half),
            self.pitch_min + size * (T::of(f64::from(cell.pitch_idx)) + half),
        )
    }

    /// The enclosing cell one level coarser. Coarse cells demote to themselves.
    pub fn demote(&self, cell: CellId) -> CellId {
        match cell.level {
            Level::Coarse => cell,
            level => CellId {
                level: level.coarser(),
                roll_idx: cell.roll_idx / self.nesting,
                pitch_idx: cell.pitch_idx / self.nesting,
            },
        }
    }
}
