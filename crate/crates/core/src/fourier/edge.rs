//! Interface band structure of the four-band edge model.

use super::{assemble, diagonalize, FourierError, FourierGrid};
use crate::bulkspectra::bulk_gap;
use crate::model::{edge_operator, ModelParams, PeriodicWall, Switch};
use crate::par;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdgeConfig {
    pub ly: f64,
    pub ky: usize,
    /// Half-width of the mass transition at each wall.
    pub wall_width: f64,
    /// Weight above which a level counts as bound to the physical wall.
    pub select: f64,
}

impl Default for EdgeConfig {
    fn default() -> Self {
        Self {
            ly: 100.0,
            ky: 64,
            wall_width: 2.0,
            select: 0.5,
        }
    }
}

impl EdgeConfig {
    pub fn wall(&self) -> PeriodicWall {
        PeriodicWall {
            len: self.ly,
            width: self.wall_width,
            amp: 1.0,
        }
    }

    /// Smooth bump around the physical wall at `Ly/2`, away from the artifact.
    pub fn window(&self, y: f64) -> f64 {
        Switch::down(self.ly / 5.0, self.ly / 3.0).eval((y - 0.5 * self.ly).abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeLevel {
    pub energy: f64,
    /// Probability mass near the physical wall.
    pub weight: f64,
    /// `dE/dξ1` by Hellmann-Feynman.
    pub slope: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCrossing {
    pub xi1: f64,
    pub slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeBands {
    pub xi1: Vec<f64>,
    /// In-gap levels per `ξ1`, ascending.
    pub levels: Vec<Vec<EdgeLevel>>,
    /// Every eigenvalue per `ξ1`.
    pub spectra: Vec<Vec<f64>>,
    pub gap: f64,
    pub select: f64,
}

impl EdgeBands {
    /// Zero crossings of selected levels between consecutive samples,
    /// located by linear extrapolation from the left sample.
    pub fn selected_crossings(&self) -> Vec<EdgeCrossing> {
        self.crossings_where(|w| w > self.select)
    }

    /// Crossings of levels bound to the periodization wall instead.
    pub fn artifact_crossings(&self) -> Vec<EdgeCrossing> {
        self.crossings_where(|w| w < 1.0 - self.select)
    }

    fn crossings_where(&self, keep: impl Fn(f64) -> bool) -> Vec<EdgeCrossing> {
        let mut out = vec![];
        for i in 0..self.xi1.len().saturating_sub(1) {
            let dx = self.xi1[i + 1] - self.xi1[i];
            for l in self.levels[i].iter().filter(|l| keep(l.weight)) {
                let e1 = l.energy + l.slope * dx;
                let up = l.energy <= 0.0 && e1 > 0.0;
                let down = l.energy >= 0.0 && e1 < 0.0;
                if up || down {
                    out.push(EdgeCrossing {
                        xi1: self.xi1[i] - l.energy / l.slope,
                        slope: l.slope,
                    });
                }
            }
        }
        out
    }
}

pub fn edge_band_structure(p: &ModelParams, xi1_list: &[f64], cfg: &EdgeConfig) -> Result<EdgeBands, FourierError> {
    let (gap, _) = bulk_gap(p)?;
    let grid = FourierGrid::new(&[cfg.ly], &[cfg.ky])?;
    let window: Vec<f64> = (0..grid.n_samples()).map(|j| cfg.window(grid.node(j).0)).collect();
    let wall = cfg.wall();
    let per_xi = par::map_slice(par::default_exec(), xi1_list, |&xi1| {
        let op = assemble(&edge_operator(p, xi1, wall), &grid)?;
        let sd = diagonalize(&op, None)?;
        let nm = grid.n_modes();
        let levels = (0..sd.len())
            .filter(|&j| sd.eigenvalues[j].abs() < gap)
            .map(|j| {
                let u = sd.vector(j);
                let slope = 2.0
                    * (0..nm)
                        .map(|i| (u[i].conj() * u[nm + i] + u[2 * nm + i].conj() * u[3 * nm + i]).re)
                        .sum::<f64>();
                EdgeLevel {
                    energy: sd.eigenvalues[j],
                    weight: op.field_expectation(&window, u),
                    slope,
                }
            })
            .collect::<Vec<_>>();
        Ok::<_, FourierError>((levels, sd.eigenvalues))
    });
    let mut levels = vec![];
    let mut spectra = vec![];
    for r in per_xi {
        let (l, s) = r?;
        levels.push(l);
        spectra.push(s);
    }
    Ok(EdgeBands {
        xi1: xi1_list.to_vec(),
        levels,
        spectra,
        gap,
        select: cfg.select,
    })
}
