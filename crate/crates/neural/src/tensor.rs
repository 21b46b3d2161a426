//! Row-major matrices and the few dense kernels the model needs.

use rand::Rng;

use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<R> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<R>,
}

impl<R: Real> Mat<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![R::zero(); rows * cols],
        }
    }

    /// Column vector.
    pub fn vector(n: usize) -> Self {
        Self::zeros(n, 1)
    }

    pub fn uniform(rows: usize, cols: usize, range: f64, rng: &mut impl Rng) -> Self {
        let data = (0..rows * cols)
            .map(|_| R::of(rng.gen_range(-range..=range)))
            .collect();
        Self { rows, cols, data }
    }

    pub fn shape(&self) -> [usize; 2] {
        [self.rows, self.cols]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [R] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|x| *x = R::zero());
    }

    pub fn sum_squares(&self) -> R {
        dot(&self.data, &self.data)
    }

    /// y += W x
    #[inline]
    pub fn matvec_acc(&self, x: &[R], y: &mut [R]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += dot(self.row(i), x);
        }
    }

    /// x += Wᵀ y
    #[inline]
    pub fn matvec_t_acc(&self, y: &[R], x: &mut [R]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (i, &yi) in y.iter().enumerate() {
            if yi != R::zero() {
                axpy(yi, self.row(i), x);
            }
        }
    }

    /// W += y xᵀ
    #[inline]
    pub fn outer_acc(&mut self, y: &[R], x: &[R]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (i, &yi) in y.iter().enumerate() {
            if yi != R::zero() {
                axpy(yi, x, self.row_mut(i));
            }
        }
    }
}

/// Dot product with eight independent partial sums, which lets the
/// compiler vectorize while keeping a fixed reduction order.
#[inline]
pub fn dot<R: Real>(a: &[R], b: &[R]) -> R {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [R::zero(); 8];
    let chunks = n / 8;
    for c in 0..chunks {
        let base = c * 8;
        for k in 0..8 {
            acc[k] += a[base + k] * b[base + k];
        }
    }
    let mut tail = R::zero();
    for k in chunks * 8..n {
        tail += a[k] * b[k];
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// y += a x
#[inline]
pub fn axpy<R: Real>(a: R, x: &[R], y: &mut [R]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Softmax with max-subtraction.
pub fn softmax<R: Real>(u: &[R]) -> Vec<R> {
    let mut p = u.to_vec();
    softmax_in_place(&mut p);
    p
}

pub fn softmax_in_place<R: Real>(p: &mut [R]) {
    let max = p.iter().copied().fold(R::neg_infinity(), R::max);
    let mut sum = R::zero();
    for x in p.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in p.iter_mut() {
        *x /= sum;
    }
}

/// Index of the maximum, lowest index on ties.
pub fn argmax<R: Real>(p: &[R]) -> usize {
    let mut best = 0;
    for (i, &x) in p.iter().enumerate() {
        if x > p[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f64> = (0..21).map(|i| i as f64 * 0.5).collect();
        let b: Vec<f64> = (0..21).map(|i| 1.0 - i as f64).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-9);
    }

    #[test]
    fn matvec_and_transpose() {
        let w = Mat::<f64> {
            rows: 2,
            cols: 3,
            data: vec![1., 2., 3., 4., 5., 6.],
        };
        let mut y = vec![0.0; 2];
        w.matvec_acc(&[1., 0., -1.], &mut y);
        assert_eq!(y, [-2., -2.]);
        let mut x = vec![0.0; 3];
        w.matvec_t_acc(&[1., 1.], &mut x);
        assert_eq!(x, [5., 7., 9.]);
        let mut g = Mat::<f64>::zeros(2, 3);
        g.outer_acc(&[1., 2.], &[1., 0., 3.]);
        assert_eq!(g.data, [1., 0., 3., 2., 0., 6.]);
    }

    #[test]
    fn softmax_examples() {
        assert_eq!(softmax(&[0f64; 4]), [0.25; 4]);
        assert_eq!(softmax(&[3f64]), [1.0]);
        let a = softmax(&[1.0f64, 2.0, 3.0]);
        let b = softmax(&[101.0f64, 102.0, 103.0]);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax(&[0.25f64; 4]), 0);
        assert_eq!(argmax(&[0.1f64, 0.5, 0.5]), 1);
    }
}
