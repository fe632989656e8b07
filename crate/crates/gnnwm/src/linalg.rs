//! Minimal dense linear algebra for the training engine.
//!
//! Vectors are rows and weight matrices are `in_dim × out_dim`, so a
//! layer computes `y = x·W + b`. With this orientation every hot loop —
//! the forward product, the outer-product gradient, and the gradient
//! with respect to the input — walks contiguous rows of `W`, and inputs
//! with many exact zeros (Cora's binary bags of words) skip whole rows.

/// Row-major `rows × cols` matrix of 64-bit floats.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[cfg(test)]
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Mat {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Flat row-major view of all entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// `out = x·W + out` — accumulate the row-vector product into `out`.
    ///
    /// Rows whose coefficient is exactly zero contribute nothing and are
    /// skipped; with a fixed input this is still fully deterministic.
    pub fn vecmat_add(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, w) in out.iter_mut().zip(self.row(i)) {
                *o += xi * w;
            }
        }
    }

    /// `dx = W·gᵀ` — gradient with respect to the input of `x·W`.
    pub fn backprop_vec(&self, g: &[f64]) -> Vec<f64> {
        debug_assert_eq!(g.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), g)).collect()
    }

    /// `W += scale · xᵀ·g` — accumulate an outer product, skipping
    /// zero entries of `x`.
    pub fn add_outer(&mut self, x: &[f64], g: &[f64], scale: f64) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(g.len(), self.cols);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let s = scale * xi;
            for (w, &gv) in self.row_mut(i).iter_mut().zip(g) {
                *w += s * gv;
            }
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Index of the maximum entry; ties resolve to the smallest index.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}
