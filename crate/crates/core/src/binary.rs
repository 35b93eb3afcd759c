use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A 0/1 pattern over `n` events, written most-significant first (event 1
/// is the leftmost character).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinaryVector(Vec<bool>);

impl BinaryVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![true; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    /// All ones except a zero at `index`.
    pub fn all_but(n: usize, index: usize) -> Self {
        let mut bits = vec![true; n];
        bits[index] = false;
        Self(bits)
    }

    /// A single one at `index`.
    pub fn unit(n: usize, index: usize) -> Self {
        let mut bits = vec![false; n];
        bits[index] = true;
        Self(bits)
    }

    /// The pattern for the low `n` bits of `code`, bit `n - 1` first.
    pub fn from_code(n: usize, code: u64) -> Self {
        Self((0..n).map(|i| code >> (n - 1 - i) & 1 == 1).collect())
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, index: usize) -> bool {
        self.0[index]
    }

    pub fn is_all_ones(&self) -> bool {
        self.0.iter().all(|&b| b)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BinaryVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(index, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Domain { index, value: f64::NAN }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}
