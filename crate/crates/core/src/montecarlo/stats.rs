//! Streaming moments with a deterministic merge order.

/// Running mean and sum of squared deviations per component (Welford),
/// mergeable with Chan's pairwise update.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: Vec<f64>,
    pub m2: Vec<f64>,
}

impl Moments {
    pub fn new(width: usize) -> Self {
        Moments {
            count: 0,
            mean: vec![0.0; width],
            m2: vec![0.0; width],
        }
    }

    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn push(&mut self, x: &[f64]) {
        debug_assert_eq!(x.len(), self.width());
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *m;
            *m += d / n;
            *s += d * (v - *m);
        }
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        for i in 0..self.width() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * (nb / n);
            self.m2[i] += other.m2[i] + d * d * (na * nb / n);
        }
        self.count += other.count;
    }

    /// Unbiased sample variance per component.
    pub fn variance(&self) -> Vec<f64> {
        if self.count < 2 {
            return vec![0.0; self.width()];
        }
        let d = (self.count - 1) as f64;
        self.m2.iter().map(|s| (s / d).max(0.0)).collect()
    }

    /// Standard error of the mean per component.
    pub fn stderr(&self) -> Vec<f64> {
        let n = self.count as f64;
        self.variance().iter().map(|v| (v / n).sqrt()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_equals_sequential() {
        let data: Vec<[f64; 2]> = (0..37).map(|i| [(i as f64).sin(), (i * i) as f64 * 0.01]).collect();
        let mut all = Moments::new(2);
        data.iter().for_each(|x| all.push(x));
        let mut a = Moments::new(2);
        let mut b = Moments::new(2);
        data[..10].iter().for_each(|x| a.push(x));
        data[10..].iter().for_each(|x| b.push(x));
        a.merge(&b);
        assert_eq!(a.count, 37);
        for i in 0..2 {
            assert!((a.mean[i] - all.mean[i]).abs() < 1e-14);
            assert!((a.m2[i] - all.m2[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_data_has_zero_spread() {
        let mut m = Moments::new(1);
        for _ in 0..100 {
            m.push(&[1.0]);
        }
        let mut other = m.clone();
        other.merge(&m);
        assert_eq!(other.mean[0], 1.0);
        assert_eq!(other.stderr()[0], 0.0);
    }

    #[test]
    fn known_variance() {
        let mut m = Moments::new(1);
        for x in [1.0, 2.0, 3.0, 4.0] {
            m.push(&[x]);
        }
        assert!((m.variance()[0] - 5.0 / 3.0).abs() < 1e-15);
    }
}
