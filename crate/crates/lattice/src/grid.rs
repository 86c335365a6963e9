use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 16;
/// Per-axis cap for three particles.
pub const MAX_POINTS_N3: usize = 48;
pub const DEFAULT_BUDGET: usize = 4_000_000;

/// `M^N` interior points of the box `[0, L]^N`, spacing `h = L / (M + 1)`.
/// Axis `j` carries particle `j`; the flat index is `sum_j i_j M^j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub l: f64,
    pub m: usize,
    pub n: usize,
}

impl Grid {
    pub fn new(l: f64, m: usize, n: usize) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Argument(format!("box length must be positive, got {l}")));
        }
        if m < MIN_POINTS {
            return Err(Error::Argument(format!("need at least {MIN_POINTS} points per axis, got {m}")));
        }
        if n == 0 {
            return Err(Error::Argument("grid needs at least one axis".into()));
        }
        m.checked_pow(n as u32)
            .ok_or_else(|| Error::Argument("grid size overflows".into()))?;
        Ok(Self { l, m, n })
    }

    pub fn h(&self) -> f64 {
        self.l / (self.m + 1) as f64
    }

    pub fn points(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h()
    }

    pub fn unflatten(&self, mut idx: usize, out: &mut [usize]) {
        for slot in out.iter_mut() {
            *slot = idx % self.m;
            idx /= self.m;
        }
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.m.pow(axis as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridInfo {
    pub l: f64,
    pub m: usize,
    pub n: usize,
    pub h: f64,
    pub unknowns: usize,
}

impl GridInfo {
    pub fn new(g: &Grid, blocks: usize) -> Self {
        Self {
            l: g.l,
            m: g.m,
            n: g.n,
            h: g.h(),
            unknowns: g.points() * blocks,
        }
    }
}

pub(crate) fn check_budget(unknowns: usize, limit: usize) -> Result<()> {
    if unknowns > limit {
        Err(Error::Budget { unknowns, limit })
    } else {
        Ok(())
    }
}
