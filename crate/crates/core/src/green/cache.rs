use dashmap::DashMap;

use super::{eval_G_gamma, reduced_g, GreenEvaluation};
use crate::error::Result;
use crate::geometry::{ComplexMomentum, RealLimitMomentum, Vec3};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Key {
    kind: u8,
    words: [u64; 12],
}

impl Key {
    fn new(kind: u8, x: &Vec3, re: &Vec3, im: &Vec3, spec: &QuadratureSpec) -> Self {
        let mut words = [0u64; 12];
        for j in 0..3 {
            words[j] = x[j].to_bits();
            words[3 + j] = re[j].to_bits();
            words[6 + j] = im[j].to_bits();
        }
        words[9] = spec.rel_tol.to_bits();
        words[10] = spec.abs_tol.to_bits();
        words[11] = spec.max_subdivisions as u64;
        Self { kind, words }
    }
}

/// Memo table for Green values keyed by the exact bit patterns of `(x, k, spec)`.
///
/// Concurrent readers never block each other; the first finished write for a
/// key wins and later writers receive that stored value.
#[derive(Debug, Default)]
pub struct GreenCache {
    map: DashMap<Key, GreenEvaluation>,
}

impl GreenCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn clear(&self) {
        self.map.clear();
    }

    fn memo(&self, key: Key, compute: impl FnOnce() -> Result<GreenEvaluation>) -> Result<GreenEvaluation> {
        if let Some(hit) = self.map.get(&key) {
            return Ok(*hit);
        }
        let value = compute()?;
        Ok(*self.map.entry(key).or_insert(value))
    }

    /// Memoized `g(x, k)`; `x` is given padded.
    pub fn g(&self, x: &Vec3, k: &ComplexMomentum, spec: &QuadratureSpec) -> Result<GreenEvaluation> {
        let key = Key::new(0, x, k.re(), k.im(), spec);
        self.memo(key, || {
            super::require_nonzero_x(x)?;
            spec.validate()?;
            reduced_g(x, k, spec)
        })
    }

    /// Memoized `G_gamma(x, k')`.
    #[allow(non_snake_case)]
    pub fn G_gamma(&self, x: &Vec3, k: &RealLimitMomentum, spec: &QuadratureSpec) -> Result<GreenEvaluation> {
        let key = Key::new(1, x, k.k_prime(), k.gamma(), spec);
        self.memo(key, || eval_G_gamma(&x[..k.dim()], k, spec))
    }
}
