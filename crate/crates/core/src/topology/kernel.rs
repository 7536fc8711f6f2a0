use super::PriorGraph;
use crate::error::{DsomError, Result};

pub const DEFAULT_SIGMA_FINAL: f64 = 0.5;

/// Gaussian neighborhood whose width shrinks geometrically from
/// `sigma_initial` (epoch 1) to `sigma_final` (epoch `epochs`).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KernelSchedule {
    epochs: usize,
    sigma_initial: f64,
    sigma_final: f64,
}

impl KernelSchedule {
    pub fn new(epochs: usize, sigma_initial: f64, sigma_final: f64) -> Result<Self> {
        if epochs == 0 {
            return Err(DsomError::invalid("at least one epoch is required"));
        }
        if !(sigma_final.is_finite() && sigma_final > 0.0) {
            return Err(DsomError::invalid(format!(
                "sigma_final must be positive, got {sigma_final}"
            )));
        }
        if !(sigma_initial.is_finite() && sigma_initial >= sigma_final) {
            return Err(DsomError::invalid(format!(
                "sigma_initial ({sigma_initial}) must be finite and at least sigma_final ({sigma_final})"
            )));
        }
        Ok(KernelSchedule {
            epochs,
            sigma_initial,
            sigma_final,
        })
    }

    /// Half the graph diameter down to [`DEFAULT_SIGMA_FINAL`]. Graphs with a
    /// diameter below 1 start at the final width.
    pub fn for_graph(graph: &PriorGraph, epochs: usize) -> Result<Self> {
        let initial = (graph.diameter() as f64 / 2.0).max(DEFAULT_SIGMA_FINAL);
        Self::new(epochs, initial, DEFAULT_SIGMA_FINAL)
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }

    pub fn sigma_initial(&self) -> f64 {
        self.sigma_initial
    }

    pub fn sigma_final(&self) -> f64 {
        self.sigma_final
    }

    fn check_epoch(&self, epoch: usize) -> Result<()> {
        if epoch == 0 || epoch > self.epochs {
            return Err(DsomError::EpochOutOfRange {
                epoch,
                epochs: self.epochs,
            });
        }
        Ok(())
    }

    /// Kernel width at `epoch` (1-based).
    pub fn sigma(&self, epoch: usize) -> Result<f64> {
        self.check_epoch(epoch)?;
        if self.epochs == 1 {
            return Ok(self.sigma_initial);
        }
        let t = (epoch - 1) as f64 / (self.epochs - 1) as f64;
        Ok(self.sigma_initial * (self.sigma_final / self.sigma_initial).powf(t))
    }

    /// `exp(-s^2 / (2 sigma_l^2))`.
    pub fn kernel_value(&self, epoch: usize, s: f64) -> Result<f64> {
        if s.is_nan() || s < 0.0 {
            return Err(DsomError::invalid(format!(
                "graph distance must be nonnegative, got {s}"
            )));
        }
        let sigma = self.sigma(epoch)?;
        Ok(gaussian(s, sigma))
    }
}

#[inline]
fn gaussian(s: f64, sigma: f64) -> f64 {
    (-(s * s) / (2.0 * sigma * sigma)).exp()
}

/// `h[u][j] = K_l(g(u, j))` for one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodTable {
    epoch: usize,
    models: usize,
    h: Vec<f64>,
}

impl NeighborhoodTable {
    pub fn new(schedule: &KernelSchedule, graph: &PriorGraph, epoch: usize) -> Result<Self> {
        let sigma = schedule.sigma(epoch)?;
        let by_distance: Vec<f64> = (0..=graph.diameter())
            .map(|s| gaussian(s as f64, sigma))
            .collect();
        let models = graph.models();
        let mut h = Vec::with_capacity(models * models);
        for u in 0..models {
            for j in 0..models {
                h.push(by_distance[graph.distance(u, j) as usize]);
            }
        }
        Ok(NeighborhoodTable { epoch, models, h })
    }

    /// A table of ones: every cluster weighs fully in every model's sum.
    pub fn flat(models: usize) -> Self {
        NeighborhoodTable {
            epoch: 1,
            models,
            h: vec![1.0; models * models],
        }
    }

    /// Arbitrary table, row-major `h[u][j]`. Entries must be finite and in
    /// `[0, 1]`.
    pub fn from_values(models: usize, h: Vec<f64>) -> Result<Self> {
        if h.len() != models * models {
            return Err(DsomError::invalid("neighborhood table must be M x M"));
        }
        if h.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(DsomError::invalid(
                "neighborhood weights must lie in [0, 1]",
            ));
        }
        Ok(NeighborhoodTable {
            epoch: 1,
            models,
            h,
        })
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    pub fn models(&self) -> usize {
        self.models
    }

    #[inline]
    pub fn get(&self, u: usize, j: usize) -> f64 {
        self.h[u * self.models + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_zero_is_one() {
        let s = KernelSchedule::new(10, 3.0, 0.5).unwrap();
        for l in 1..=10 {
            assert_eq!(s.kernel_value(l, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn closed_form() {
        let s = KernelSchedule::new(5, 2.0, 0.5).unwrap();
        let v = s.kernel_value(1, 2.0).unwrap();
        assert!((v - 0.606_530_659_712_633_4).abs() < 1e-15);
        assert!(s.kernel_value(1, 1.0).unwrap() > s.kernel_value(1, 1.5).unwrap());
    }

    #[test]
    fn sigma_endpoints() {
        let s = KernelSchedule::new(100, 4.0, 0.5).unwrap();
        assert_eq!(s.sigma(1).unwrap(), 4.0);
        assert!((s.sigma(100).unwrap() - 0.5).abs() < 1e-12);
        let one = KernelSchedule::new(1, 4.0, 0.5).unwrap();
        assert_eq!(one.sigma(1).unwrap(), 4.0);
        assert!(matches!(s.sigma(0), Err(DsomError::EpochOutOfRange { .. })));
        assert!(matches!(
            s.sigma(101),
            Err(DsomError::EpochOutOfRange { .. })
        ));
    }

    #[test]
    fn schedule_validation() {
        assert!(KernelSchedule::new(0, 1.0, 0.5).is_err());
        assert!(KernelSchedule::new(5, 0.4, 0.5).is_err());
        assert!(KernelSchedule::new(5, 1.0, 0.0).is_err());
        let g = PriorGraph::hex_grid(1).unwrap();
        let s = KernelSchedule::for_graph(&g, 3).unwrap();
        assert_eq!(s.sigma_initial(), DEFAULT_SIGMA_FINAL);
        let g = PriorGraph::rect_grid(5).unwrap();
        assert_eq!(
            KernelSchedule::for_graph(&g, 3).unwrap().sigma_initial(),
            4.0
        );
    }

    #[test]
    fn table_properties() {
        let g = PriorGraph::hex_grid(4).unwrap();
        let s = KernelSchedule::for_graph(&g, 20).unwrap();
        let tables: Vec<_> = (1..=20)
            .map(|l| NeighborhoodTable::new(&s, &g, l).unwrap())
            .collect();
        let m = g.models();
        for t in &tables {
            for u in 0..m {
                assert_eq!(t.get(u, u), 1.0);
                for j in 0..m {
                    assert_eq!(t.get(u, j), t.get(j, u));
                    assert!(t.get(u, j) > 0.0 && t.get(u, j) <= 1.0);
                    for v in 0..m {
                        if g.distance(u, j) < g.distance(v, j) {
                            assert!(t.get(u, j) > t.get(v, j));
                        }
                    }
                }
            }
        }
        for pair in tables.windows(2) {
            for u in 0..m {
                for j in 0..m {
                    if g.distance(u, j) >= 1 {
                        assert!(pair[1].get(u, j) <= pair[0].get(u, j));
                    }
                }
            }
        }
    }

    #[test]
    fn weights_fall_along_representation_order() {
        let g = PriorGraph::hex_grid(5).unwrap();
        let s = KernelSchedule::for_graph(&g, 10).unwrap();
        for l in [1, 5, 10] {
            let t = NeighborhoodTable::new(&s, &g, l).unwrap();
            for j in 0..g.models() {
                let order = g.representation_order(j);
                assert!(order.windows(2).all(|w| t.get(w[0], j) >= t.get(w[1], j)));
            }
        }
    }
}
