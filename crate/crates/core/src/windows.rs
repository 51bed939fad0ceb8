//! Periodic window stencils with fast sums and maxima over every placement.
//!
//! A window is stored as a set of rows along the last axis: each row is an
//! offset in the leading axes plus a half-width along the last axis. Row sums
//! come from per-row prefix sums and row maxima from per-row sparse tables,
//! so a full scan costs `O(N^n * rows)` instead of `O(N^n * |window|)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowShape {
    /// Euclidean balls `|y - x| <= R`.
    Ball,
    /// Axis-aligned cubes of side `2R`.
    Cube,
}

impl std::str::FromStr for WindowShape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ball" => Ok(WindowShape::Ball),
            "cube" => Ok(WindowShape::Cube),
            other => Err(format!(
                "unknown window shape '{other}' (expected ball or cube)"
            )),
        }
    }
}

impl std::fmt::Display for WindowShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WindowShape::Ball => "ball",
            WindowShape::Cube => "cube",
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Row {
    /// Offsets along the leading `dim - 1` axes, reduced modulo `N`.
    lead: [usize; 2],
    /// `None` when the row wraps the whole axis.
    half: Option<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct Window {
    rows: Vec<Row>,
    count: usize,
    volume: f64,
}

impl Window {
    /// Grid points within distance `radius` of a center, on the torus.
    pub(crate) fn new(spec: &GridSpec, shape: WindowShape, radius: f64) -> Window {
        let h = spec.spacing();
        let n = spec.points();
        let dim = spec.dim();
        let reach = ((radius / h) * (1.0 + 1e-12) + 1e-9).floor() as isize;
        let lim2 = (radius / h).powi(2) * (1.0 + 1e-12) + 1e-9;
        let mut rows: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        let lead_dims = dim - 1;
        let side = (2 * reach + 1) as usize;
        for flat in 0..side.pow(lead_dims as u32) {
            let mut lead = [0isize; 2];
            let mut rest = flat;
            for axis in (0..lead_dims).rev() {
                lead[axis] = (rest % side) as isize - reach;
                rest /= side;
            }
            let half = match shape {
                WindowShape::Cube => reach,
                WindowShape::Ball => {
                    let used: f64 = lead[..lead_dims].iter().map(|&d| (d * d) as f64).sum();
                    if used > lim2 {
                        continue;
                    }
                    ((lim2 - used).sqrt() + 1e-12).floor() as isize
                }
            };
            let mut key = [0usize; 2];
            for axis in 0..lead_dims {
                key[axis] = lead[axis].rem_euclid(n as isize) as usize;
            }
            let entry = rows.entry(key).or_insert(0);
            *entry = (*entry).max(half as usize);
        }
        let rows: Vec<Row> = rows
            .into_iter()
            .map(|(lead, half)| Row {
                lead,
                half: if 2 * half + 1 >= n { None } else { Some(half) },
            })
            .collect();
        let count = rows.iter().map(|r| r.half.map_or(n, |w| 2 * w + 1)).sum();
        let volume = match shape {
            WindowShape::Cube => (2.0 * radius).powi(dim as i32),
            WindowShape::Ball => ball_volume(dim, radius),
        };
        Window {
            rows,
            count,
            volume,
        }
    }

    /// The single-cell window.
    #[cfg(test)]
    pub(crate) fn point(spec: &GridSpec) -> Window {
        Window {
            rows: vec![Row {
                lead: [0, 0],
                half: Some(0),
            }],
            count: 1,
            volume: spec.cell_volume(),
        }
    }

    /// Number of grid points covered.
    pub(crate) fn count(&self) -> usize {
        self.count
    }

    /// Continuum volume of the window.
    pub(crate) fn volume(&self) -> f64 {
        self.volume
    }

    fn row_base(spec: &GridSpec, center: &[usize; 3], lead: &[usize; 2]) -> usize {
        let n = spec.points();
        let dim = spec.dim();
        let mut base = 0usize;
        for axis in 0..dim - 1 {
            base = base * n + (center[axis] + lead[axis]) % n;
        }
        base * n
    }

    /// Sum of `values` over the window placed at each of `centers`.
    pub(crate) fn sums(&self, spec: &GridSpec, prefix: &RowPrefix, centers: &[usize]) -> Vec<f64> {
        let n = spec.points();
        centers
            .iter()
            .map(|&c| {
                let m = spec.unravel(c);
                let last = m[spec.dim() - 1];
                let total: f64 = self
                    .rows
                    .iter()
                    .map(|row| {
                        let base = Self::row_base(spec, &m, &row.lead);
                        prefix.segment(base / n, last, row.half)
                    })
                    .sum();
                total.max(0.0)
            })
            .collect()
    }

    /// Max of `values` over the window placed at every grid point.
    pub(crate) fn maxima(&self, spec: &GridSpec, table: &RowMaxTable) -> Vec<f64> {
        let n = spec.points();
        (0..spec.len())
            .map(|c| {
                let m = spec.unravel(c);
                let last = m[spec.dim() - 1];
                self.rows
                    .iter()
                    .map(|row| {
                        let base = Self::row_base(spec, &m, &row.lead);
                        table.segment(base / n, last, row.half)
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }
}

pub(crate) fn ball_volume(dim: usize, radius: f64) -> f64 {
    use std::f64::consts::PI;
    match dim {
        1 => 2.0 * radius,
        2 => PI * radius * radius,
        _ => 4.0 / 3.0 * PI * radius.powi(3),
    }
}

/// Centers whose every coordinate is a multiple of `stride`.
pub(crate) fn strided_centers(spec: &GridSpec, stride: usize) -> Vec<usize> {
    (0..spec.len())
        .filter(|&i| {
            let m = spec.unravel(i);
            m[..spec.dim()].iter().all(|&v| v % stride == 0)
        })
        .collect()
}

/// Prefix sums of each row along the last axis.
pub(crate) struct RowPrefix {
    n: usize,
    prefix: Vec<f64>,
}

impl RowPrefix {
    pub(crate) fn new(spec: &GridSpec, values: &[f64]) -> RowPrefix {
        let n = spec.points();
        let mut prefix = Vec::with_capacity(values.len() / n * (n + 1));
        for row in values.chunks_exact(n) {
            let mut acc = 0.0;
            prefix.push(0.0);
            for &v in row {
                acc += v;
                prefix.push(acc);
            }
        }
        RowPrefix { n, prefix }
    }

    /// Sum over `[c - w, c + w]` (periodic) in row `row`, or the full row.
    fn segment(&self, row: usize, c: usize, half: Option<usize>) -> f64 {
        let n = self.n;
        let p = &self.prefix[row * (n + 1)..(row + 1) * (n + 1)];
        let Some(w) = half else {
            return p[n];
        };
        let start = c as isize - w as isize;
        let end = c + w;
        if start < 0 {
            (p[n] - p[(n as isize + start) as usize]) + p[end + 1]
        } else if end >= n {
            (p[n] - p[start as usize]) + p[end + 1 - n]
        } else {
            p[end + 1] - p[start as usize]
        }
    }
}

/// Sparse tables for periodic range-max queries along each row.
pub(crate) struct RowMaxTable {
    n: usize,
    levels: Vec<Vec<f64>>,
}

impl RowMaxTable {
    pub(crate) fn new(values: &[f64], n: usize) -> RowMaxTable {
        let mut levels = vec![values.to_vec()];
        let mut span = 1;
        while 2 * span <= n {
            let prev = levels.last().unwrap();
            let next: Vec<f64> = (0..values.len())
                .map(|i| {
                    let row = i / n;
                    let j = i % n;
                    if j + span < n {
                        prev[i].max(prev[row * n + j + span])
                    } else {
                        prev[i]
                    }
                })
                .collect();
            levels.push(next);
            span *= 2;
        }
        RowMaxTable { n, levels }
    }

    fn range(&self, row: usize, lo: usize, hi: usize) -> f64 {
        // Inclusive, non-wrapping range lo..=hi.
        let len = hi - lo + 1;
        let k = usize::BITS as usize - 1 - len.leading_zeros() as usize;
        let base = row * self.n;
        let t = &self.levels[k];
        t[base + lo].max(t[base + hi + 1 - (1 << k)])
    }

    fn segment(&self, row: usize, c: usize, half: Option<usize>) -> f64 {
        let n = self.n;
        let Some(w) = half else {
            return self.range(row, 0, n - 1);
        };
        let start = c as isize - w as isize;
        let end = c + w;
        if start < 0 {
            self.range(row, (n as isize + start) as usize, n - 1)
                .max(self.range(row, 0, end))
        } else if end >= n {
            self.range(row, start as usize, n - 1)
                .max(self.range(row, 0, end - n))
        } else {
            self.range(row, start as usize, end)
        }
    }
}
