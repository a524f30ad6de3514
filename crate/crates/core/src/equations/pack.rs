//! Real coordinates of symmetric complex vectors.
//!
//! A vector `v` of length `L` is *palindromic* when `v[L-1-k] = conj(v[k])`
//! and *antipalindromic* when `v[L-1-k] = -conj(v[k])`. Either kind has
//! exactly `L` free real coordinates: `(re, im)` of each entry in the first
//! half, then the real (resp. imaginary) part of the middle entry.

use crate::{Error, Result, C64};

pub fn pack_palindromic(v: &[C64], out: &mut Vec<f64>) {
    let n = v.len();
    for z in &v[..n / 2] {
        out.push(z.re);
        out.push(z.im);
    }
    if n % 2 == 1 {
        out.push(v[n / 2].re);
    }
}

pub fn pack_antipalindromic(v: &[C64], out: &mut Vec<f64>) {
    let n = v.len();
    for z in &v[..n / 2] {
        out.push(z.re);
        out.push(z.im);
    }
    if n % 2 == 1 {
        out.push(v[n / 2].im);
    }
}

/// Reads real coordinates in order.
pub struct Reader<'a> {
    x: &'a [f64],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(x: &'a [f64]) -> Self {
        Reader { x, pos: 0 }
    }

    pub fn real(&mut self) -> Result<f64> {
        let v = *self
            .x
            .get(self.pos)
            .ok_or_else(|| Error::DegenerateInput(format!("coordinate vector too short at {}", self.pos)))?;
        self.pos += 1;
        Ok(v)
    }

    pub fn palindromic(&mut self, n: usize) -> Result<Vec<C64>> {
        self.symmetric(n, false)
    }

    pub fn antipalindromic(&mut self, n: usize) -> Result<Vec<C64>> {
        self.symmetric(n, true)
    }

    fn symmetric(&mut self, n: usize, anti: bool) -> Result<Vec<C64>> {
        let mut v = vec![C64::new(0.0, 0.0); n];
        for k in 0..n / 2 {
            let z = C64::new(self.real()?, self.real()?);
            v[k] = z;
            v[n - 1 - k] = if anti { -z.conj() } else { z.conj() };
        }
        if n % 2 == 1 {
            let a = self.real()?;
            v[n / 2] = if anti { C64::new(0.0, a) } else { C64::new(a, 0.0) };
        }
        Ok(v)
    }

    pub fn finish(&self) -> Result<()> {
        if self.pos != self.x.len() {
            return Err(Error::DegenerateInput(format!(
                "coordinate vector has {} entries, expected {}",
                self.x.len(),
                self.pos
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn round_trip() {
        for n in 1..6 {
            let x: Vec<f64> = (0..n).map(|k| k as f64 + 0.5).collect();
            let mut r = Reader::new(&x);
            let v = r.palindromic(n).unwrap();
            r.finish().unwrap();
            for k in 0..n {
                assert_eq!(v[n - 1 - k], v[k].conj());
            }
            let mut back = Vec::new();
            pack_palindromic(&v, &mut back);
            assert_eq!(back, x);
            let mut r = Reader::new(&x);
            let w = r.antipalindromic(n).unwrap();
            let mut back = Vec::new();
            pack_antipalindromic(&w, &mut back);
            assert_eq!(back, x);
        }
    }

    #[test]
    fn middle_entry_is_real() {
        let mut r = Reader::new(&[1.0, 2.0, 3.0]);
        let v = r.palindromic(3).unwrap();
        assert_eq!(v, vec![c64(1.0, 2.0), c64(3.0, 0.0), c64(1.0, -2.0)]);
        assert!(Reader::new(&[1.0]).palindromic(2).is_err());
    }
}
