use crate::error::{Error, Result};

/// Strictly increasing sample points in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    /// Sorts and deduplicates `points`; all must lie in `(0, 1]`.
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("grid must be nonempty"));
        }
        if let Some(bad) = points.iter().find(|&&x| !(x > 0.0 && x <= 1.0)) {
            return Err(Error::domain(format!("grid point {bad} outside (0, 1]")));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok(Grid { points })
    }

    /// `{2^{-k} : k = 1..=40} ∪ {0.1, 0.2, …, 1.0}`.
    pub fn default_grid() -> Self {
        let mut pts: Vec<f64> = (1..=40).map(|k| 2f64.powi(-k)).collect();
        pts.extend((1..=10).map(|k| k as f64 / 10.0));
        Grid::new(pts).expect("default grid is valid")
    }

    /// Points of the default grid with `x >= lo`.
    pub fn default_from(lo: f64) -> Self {
        let pts: Vec<f64> = Self::default_grid()
            .points
            .into_iter()
            .filter(|&x| x >= lo)
            .collect();
        Grid::new(pts).expect("default grid contains 1")
    }

    /// Grid used for residual checks: moderate points where values are representable.
    pub fn residual_grid() -> Self {
        Grid::new(vec![0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0]).expect("valid")
    }

    /// `n` equally spaced points ending at 1: `{1/n, 2/n, …, 1}`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("uniform grid needs n >= 1"));
        }
        Grid::new((1..=n).map(|k| k as f64 / n as f64).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self::default_grid()
    }
}

/// Decreasing flatness samples `2^{-5}, 2^{-6}, …, 2^{-40}`.
pub fn flatness_samples() -> Vec<f64> {
    (5..=40).map(|k| 2f64.powi(-k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_sorted_and_deduplicated() {
        let g = Grid::default_grid();
        assert_eq!(g.len(), 49);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*g.points().last().unwrap(), 1.0);
        assert_eq!(g.points()[0], 2f64.powi(-40));
    }

    #[test]
    fn rejects_points_outside_unit_interval() {
        assert!(Grid::new(vec![]).is_err());
        assert!(Grid::new(vec![0.0]).is_err());
        assert!(Grid::new(vec![1.5]).is_err());
    }

    #[test]
    fn flatness_samples_reach_deep() {
        let xs = flatness_samples();
        assert_eq!(xs.len(), 36);
        assert!(xs.windows(2).all(|w| w[0] > w[1]));
        assert!(*xs.last().unwrap() <= 2f64.powi(-20));
    }
}
