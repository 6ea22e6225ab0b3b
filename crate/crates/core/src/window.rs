//! Finite windows of the number line: the integers in `[-N, N]`, and grids
//! of step `delta` over the same interval.
//!
//! Strips are built directly as banded relations, so a window never
//! materializes a distance matrix; the chain then goes through the usual
//! normalization. The two windows are tied together by the inclusion of the
//! integers into the grid and the pointwise floor back, and `unified_demo`
//! packages the round-trip comparison of the two.

use crate::error::{CoarseError, Result};
use crate::maps::{classify, closeness_scale, MapReport, PointMap};
use crate::relation::{GroundSet, RelationBuilder};
use crate::space::{check_scales, CoarseSpace, Provenance, Scale};

/// Scales used by the demo when none are given.
pub const DEFAULT_SCALES: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowKind {
    Integer,
    Grid,
}

/// A window `[-N, N]` of the line sampled every `step`, with the coarse
/// structure of the open strips at the given scales.
#[derive(Clone, Debug)]
pub struct WindowedLine {
    kind: WindowKind,
    half_width: f64,
    step: f64,
    cells: usize,
    space: CoarseSpace,
}

fn snapped(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r
    } else {
        v
    }
}

fn format_value(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v:.9}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Largest `w` with `w * step < r`, capped at `count - 1`; the boundary is
/// settled by direct comparison rather than trusting a rounded quotient.
fn strip_width(r: f64, step: f64, count: usize) -> usize {
    let cap = count.saturating_sub(1);
    let guess = (r / step).floor();
    let mut w = if guess >= cap as f64 { cap } else { guess.max(0.0) as usize };
    while w > 0 && (w as f64) * step >= r {
        w -= 1;
    }
    while w < cap && ((w + 1) as f64) * step < r {
        w += 1;
    }
    w
}

impl WindowedLine {
    /// The integer window: points `-N, ..., N`.
    pub fn integer(half_width: f64, scales: &[f64]) -> Result<Self> {
        Self::with_kind(WindowKind::Integer, half_width, 1.0, scales)
    }

    /// The grid window: points `-N, -N + step, ..., N`. The step must divide
    /// the half-width into whole cells.
    pub fn grid(half_width: f64, step: f64, scales: &[f64]) -> Result<Self> {
        Self::with_kind(WindowKind::Grid, half_width, step, scales)
    }

    pub fn with_kind(kind: WindowKind, half_width: f64, step: f64, scales: &[f64]) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(CoarseError::NonPositive { what: "half-width" });
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(CoarseError::NonPositive { what: "step" });
        }
        if kind == WindowKind::Integer && step != 1.0 {
            return Err(CoarseError::IntegerStep(step));
        }
        let cells_f = half_width / step;
        let cells_r = cells_f.round();
        if (cells_f - cells_r).abs() > 1e-9 * cells_r.max(1.0) {
            return Err(CoarseError::StepMismatch { step, half_width });
        }
        let cells = cells_r as usize;
        check_scales(scales)?;
        let count = 2 * cells + 1;
        let labels: Vec<String> = (0..count)
            .map(|i| format_value(snapped((i as f64 - cells as f64) * step)))
            .collect();
        let ground = GroundSet::new(labels)?;
        let mut strips = Vec::with_capacity(scales.len());
        for &r in scales {
            let w = strip_width(r, step, count);
            let mut b = RelationBuilder::new(&ground);
            for a in 0..count {
                b.insert_row_range(a, a.saturating_sub(w), (a + w).min(count - 1))?;
            }
            strips.push(b.build());
        }
        let space = CoarseSpace::normalized(&ground, &strips, Provenance::Metric)?;
        Ok(WindowedLine { kind, half_width, step, cells, space })
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn point_count(&self) -> usize {
        2 * self.cells + 1
    }

    pub fn space(&self) -> &CoarseSpace {
        &self.space
    }

    /// The value at point index `i`, left to right.
    pub fn value(&self, i: usize) -> f64 {
        snapped((i as f64 - self.cells as f64) * self.step)
    }
}

/// The inclusion of the integer window into a grid over the same interval.
/// Fails when the grid does not contain every integer of the window.
pub fn inclusion_map(integer: &WindowedLine, grid: &WindowedLine) -> Result<PointMap> {
    let per_unit = 1.0 / grid.step;
    let q = per_unit.round();
    if (per_unit - q).abs() > 1e-9 || grid.half_width + 1e-9 < integer.half_width {
        return Err(CoarseError::WindowMismatch { step: grid.step });
    }
    let q = q as isize;
    let assign = (0..integer.point_count())
        .map(|i| {
            let k = i as isize - integer.cells as isize;
            (k * q + grid.cells as isize) as usize
        })
        .collect();
    PointMap::new(integer.space.ground(), grid.space.ground(), assign)
}

/// The pointwise floor from a grid onto the integer window over the same
/// interval.
pub fn floor_map(grid: &WindowedLine, integer: &WindowedLine) -> Result<PointMap> {
    if integer.step != 1.0 {
        return Err(CoarseError::IntegerStep(integer.step));
    }
    if integer.half_width + 1e-9 < grid.half_width {
        return Err(CoarseError::WindowMismatch { step: grid.step });
    }
    let assign = (0..grid.point_count())
        .map(|i| {
            let f = snapped(grid.value(i)).floor() as isize;
            (f + integer.cells as isize) as usize
        })
        .collect();
    PointMap::new(grid.space.ground(), integer.space.ground(), assign)
}

/// Everything the two-window comparison produces in one pass.
#[derive(Clone, Debug)]
pub struct WindowDemo {
    pub integer: WindowedLine,
    pub grid: WindowedLine,
    pub inclusion: PointMap,
    pub floor: PointMap,
    pub inclusion_report: MapReport,
    pub floor_report: MapReport,
    /// Closeness of floor-after-inclusion to the identity on the integers;
    /// the composite is the identity on the nose, so this is scale 0.
    pub integer_round_trip: Scale,
    /// Closeness of inclusion-after-floor to the identity on the grid. The
    /// mismatch is under one unit, so it is bounded by `unit_distance_scale`.
    pub grid_round_trip: Scale,
    /// Least scale whose strip relates integers one apart.
    pub unit_distance_scale: Scale,
}

/// Builds both windows over `[-N, N]`, the maps between them, and the
/// round-trip closeness values.
pub fn unified_demo(half_width: f64, step: f64, scales: &[f64]) -> Result<WindowDemo> {
    let integer = WindowedLine::integer(half_width, scales)?;
    let grid = WindowedLine::grid(half_width, step, scales)?;
    let inclusion = inclusion_map(&integer, &grid)?;
    let floor = floor_map(&grid, &integer)?;
    let inclusion_report = classify(&inclusion, integer.space(), grid.space())?;
    let floor_report = classify(&floor, grid.space(), integer.space())?;
    let id_int = PointMap::identity(integer.space().ground());
    let id_grid = PointMap::identity(grid.space().ground());
    let integer_round_trip = closeness_scale(&inclusion.then(&floor)?, &id_int, integer.space())?;
    let grid_round_trip = closeness_scale(&floor.then(&inclusion)?, &id_grid, grid.space())?;
    let mut gap = RelationBuilder::new(integer.space().ground());
    gap.insert(integer.cells, integer.cells + 1)?;
    let unit_distance_scale = integer.space().membership_scale(&gap.build())?;
    Ok(WindowDemo {
        integer,
        grid,
        inclusion,
        floor,
        inclusion_report,
        floor_report,
        integer_round_trip,
        grid_round_trip,
        unit_distance_scale,
    })
}
