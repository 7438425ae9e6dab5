use super::{Monomial, PolyError, RingSpec};

/// Integer weights, one per ring variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    weights: Vec<i64>,
}

impl WeightVector {
    pub fn new(ring: RingSpec, weights: Vec<i64>) -> Result<Self, PolyError> {
        if weights.len() != ring.nvars() {
            return Err(PolyError::WeightLength { expected: ring.nvars(), got: weights.len() });
        }
        Ok(WeightVector { weights })
    }

    /// `x_1 ↦ 1, y_1 ↦ 2, y_{n+1} ↦ 1`, everything else 0. A `y_{n+1}`-graded
    /// polynomial `Σ_i g_i y_{n+1}^i` with `g_i = Σ_j x_1^j y_1^{q_ij} h_ij`
    /// is homogeneous of weight `2ℓ` under this vector exactly when
    /// `i + j + 2 q_ij = 2ℓ` for every slice.
    pub fn x1_y1_ylast(ring: RingSpec) -> Self {
        let mut weights = vec![0; ring.nvars()];
        weights[ring.x1()] = 1;
        weights[ring.y1()] = 2;
        weights[ring.y_last()] = 1;
        WeightVector { weights }
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.weights
    }

    pub fn weight(&self, m: &Monomial) -> i64 {
        m.exps().iter().zip(&self.weights).map(|(&e, &w)| i64::from(e) * w).sum()
    }
}
