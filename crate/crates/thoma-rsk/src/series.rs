//! Truncated formal power series, generic over the coefficient scalar.
//!
//! All arithmetic is exact through the degree cap for an exact scalar type
//! (e.g. a rational), and accumulates convolution sums with compensated
//! summation where the scalar is a float. The crate-level alias
//! [`crate::Series`] fixes the scalar to `f64`.

use num_traits::{FromPrimitive, Num};

/// Coefficients `c_0 … c_N` of a formal power series truncated at degree `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Num + FromPrimitive + Clone + 'static> TruncatedSeries<T> {
    /// The constant series `1` with degree cap `deg`.
    pub fn one(deg: usize) -> Self {
        let mut coeffs = vec![T::zero(); deg + 1];
        coeffs[0] = T::one();
        Self { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least degree 0");
        Self { coeffs }
    }

    pub fn degree_cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> T {
        self.coeffs.get(n).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// `1 / (1 - a z)`: the geometric series, through the cap.
    pub fn geometric(a: T, deg: usize) -> Self {
        let mut coeffs = Vec::with_capacity(deg + 1);
        let mut c = T::one();
        for _ in 0..=deg {
            coeffs.push(c.clone());
            c = c * a.clone();
        }
        Self { coeffs }
    }

    /// `1 + b z`, through the cap.
    pub fn linear(b: T, deg: usize) -> Self {
        let mut coeffs = vec![T::zero(); deg + 1];
        coeffs[0] = T::one();
        if deg >= 1 {
            coeffs[1] = b;
        }
        Self { coeffs }
    }

    /// `exp(c z)`: coefficients `c^n / n!`, through the cap.
    pub fn exp_linear(c: T, deg: usize) -> Self {
        let mut coeffs = Vec::with_capacity(deg + 1);
        let mut term = T::one();
        coeffs.push(term.clone());
        for n in 1..=deg {
            term = term * c.clone() / T::from_usize(n).expect("small integer fits the scalar");
            coeffs.push(term.clone());
        }
        Self { coeffs }
    }

    /// Product of two series, truncated at the shorter cap.
    pub fn mul(&self, other: &Self) -> Self {
        let deg = self.degree_cap().min(other.degree_cap());
        let mut coeffs = Vec::with_capacity(deg + 1);
        for n in 0..=deg {
            let mut acc = Accumulator::<T>::new();
            for i in 0..=n {
                acc.add(self.coeffs[i].clone() * other.coeffs[n - i].clone());
            }
            coeffs.push(acc.finish());
        }
        Self { coeffs }
    }
}

/// Compensated (Neumaier) accumulator for `f64`; plain summation for any
/// other scalar.
pub struct Accumulator<T> {
    sum: T,
    compensation: f64,
}

impl<T: Num + Clone + 'static> Accumulator<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        if let (Some(sum), Some(v)) = (
            as_f64_mut(&mut self.sum),
            as_f64_ref(&value),
        ) {
            let t = *sum + v;
            self.compensation += if sum.abs() >= v.abs() {
                (*sum - t) + v
            } else {
                (v - t) + *sum
            };
            *sum = t;
        } else {
            self.sum = self.sum.clone() + value;
        }
    }

    pub fn finish(self) -> T {
        let mut sum = self.sum;
        if let Some(s) = as_f64_mut(&mut sum) {
            *s += self.compensation;
        }
        sum
    }
}

impl<T: Num + Clone + 'static> Default for Accumulator<T> {
    fn default() -> Self {
        Self::new()
    }
}

fn as_f64_mut<T: 'static>(value: &mut T) -> Option<&mut f64> {
    (value as &mut dyn std::any::Any).downcast_mut::<f64>()
}

fn as_f64_ref<T: 'static>(value: &T) -> Option<f64> {
    (value as &dyn std::any::Any).downcast_ref::<f64>().copied()
}

/// Compensated sum of an `f64` iterator.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Accumulator::<f64>::new();
    for v in values {
        acc.add(v);
    }
    acc.finish()
}
