//! Small scalar numerics shared by the bound, dynamics and minorant code.

/// Neumaier-compensated sum.
///
/// The doublet family mixes terms of order one with terms of order `n^α`,
/// which loses digits under naive accumulation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if !t.is_finite() {
            self.sum = t;
            return;
        }
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        if !self.sum.is_finite() {
            return self.sum;
        }
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator of terms.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms.into_iter().collect::<CompensatedSum>().value()
}

/// Ternary search for the minimum of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `rel_tol * max(|lo|, |hi|)` (or
/// `rel_tol` absolute when the bracket straddles zero) or after `max_iter`
/// iterations. Returns `(x, f(x))` for the best point seen, including the
/// bracket endpoints.
pub fn ternary_minimize<F>(f: F, lo: f64, hi: f64, rel_tol: f64, max_iter: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut best = (a, f(a));
    let fb = f(b);
    if fb < best.1 {
        best = (b, fb);
    }
    for _ in 0..max_iter {
        let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        if b - a <= rel_tol * scale {
            break;
        }
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        let f1 = f(m1);
        let f2 = f(m2);
        if f1 < best.1 {
            best = (m1, f1);
        }
        if f2 < best.1 {
            best = (m2, f2);
        }
        if f1 <= f2 {
            b = m2;
        } else {
            a = m1;
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    if fm < best.1 {
        best = (mid, fm);
    }
    best
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
///
/// Returns `(x, f(x))` for the best point evaluated. Non-finite values compare
/// as larger than any finite value, so `+inf` wins.
pub fn golden_section_maximize<F>(f: F, lo: f64, hi: f64, abs_tol: f64, max_evals: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    let mut evals = 2;

    while evals < max_evals && (b - a) > abs_tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
        evals += 1;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_keeps_small_terms() {
        let terms = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(terms), 2.0);
        let naive: f64 = terms.iter().sum();
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn ternary_finds_parabola_minimum() {
        let (x, fx) = ternary_minimize(|x| (x - 1.25).powi(2), 0.0, 3.0, 1e-12, 200);
        assert!((x - 1.25).abs() < 1e-9);
        assert!(fx < 1e-18);
    }

    #[test]
    fn ternary_respects_endpoint_minimum() {
        let (x, _) = ternary_minimize(|x| x, 2.0, 3.0, 1e-12, 200);
        assert_eq!(x, 2.0);
    }

    #[test]
    fn golden_section_finds_maximum() {
        let (x, fx) = golden_section_maximize(|x| -(x + 0.3).powi(2) + 4.0, -2.0, 2.0, 1e-10, 200);
        assert!((x + 0.3).abs() < 1e-6);
        assert!((fx - 4.0).abs() < 1e-12);
    }
}
