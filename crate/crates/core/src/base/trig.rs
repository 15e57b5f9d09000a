//! Real trigonometric polynomials on tori.
//!
//! `p(u) = c₀ + Σ_k a_k cos(2π⟨k, u⟩) + b_k sin(2π⟨k, u⟩)`. The phase
//! `⟨k, u⟩ mod 1` is computed in fixed point, so it is exact for every stored
//! point regardless of the size of `k`.

use std::f64::consts::TAU;

use serde::Serialize;

use super::fixed::from_fixed;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigTerm {
    pub wave: Vec<i64>,
    pub cos: f64,
    pub sin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrigPoly {
    dim: usize,
    constant: f64,
    terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn constant(dim: usize, c: f64) -> Self {
        Self {
            dim,
            constant: c,
            terms: Vec::new(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, 0.0)
    }

    /// Panics if a wave vector has the wrong length.
    pub fn new(dim: usize, constant: f64, terms: Vec<TrigTerm>) -> Self {
        for t in &terms {
            assert_eq!(t.wave.len(), dim, "wave vector length must equal {dim}");
        }
        Self {
            dim,
            constant,
            terms,
        }
    }

    pub fn with_cos(mut self, wave: &[i64], amplitude: f64) -> Self {
        assert_eq!(wave.len(), self.dim);
        self.terms.push(TrigTerm {
            wave: wave.to_vec(),
            cos: amplitude,
            sin: 0.0,
        });
        self
    }

    pub fn with_sin(mut self, wave: &[i64], amplitude: f64) -> Self {
        assert_eq!(wave.len(), self.dim);
        self.terms.push(TrigTerm {
            wave: wave.to_vec(),
            cos: 0.0,
            sin: amplitude,
        });
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.cos == 0.0 && t.sin == 0.0)
    }

    /// Evaluate at fixed-point coordinates.
    pub fn eval_fixed(&self, u: &[u64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim);
        let mut acc = self.constant;
        for term in &self.terms {
            let phase = term
                .wave
                .iter()
                .zip(u)
                .fold(0u64, |p, (&k, &x)| p.wrapping_add((k as u64).wrapping_mul(x)));
            let (s, c) = (TAU * from_fixed(phase)).sin_cos();
            acc += term.cos * c + term.sin * s;
        }
        acc
    }

    /// `sup |p|` bound from the coefficients.
    pub fn sup_bound(&self) -> f64 {
        self.constant.abs() + self.terms.iter().map(|t| t.cos.hypot(t.sin)).sum::<f64>()
    }

    /// Euclidean Lipschitz constant bound `Σ 2π |k| √(a² + b²)`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let k = t
                    .wave
                    .iter()
                    .map(|&w| (w as f64) * (w as f64))
                    .sum::<f64>()
                    .sqrt();
                TAU * k * t.cos.hypot(t.sin)
            })
            .sum()
    }
}
