//! Table-based arithmetic for GF(2^8) and GF(2^16), plus matrix rank by
//! Gaussian elimination. Just enough finite-field machinery to run coded
//! trials; elements are `u16` regardless of field so the simulator code is
//! field-agnostic.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOrder {
    Gf256,
    Gf65536,
}

impl FieldOrder {
    pub fn order(self) -> u32 {
        match self {
            FieldOrder::Gf256 => 256,
            FieldOrder::Gf65536 => 65536,
        }
    }
}

/// Exp/log tables over a primitive element. Built at construction, no
/// statics, so the crate stays allocation-only.
pub struct GaloisField {
    order: u32,
    exp: Vec<u16>,
    log: Vec<u32>,
}

// x^8 + x^4 + x^3 + x^2 + 1, and x^16 + x^12 + x^3 + x + 1.
const POLY_256: u32 = 0x11d;
const POLY_65536: u32 = 0x1100b;

impl GaloisField {
    pub fn new(order: FieldOrder) -> Self {
        let (n, poly) = match order {
            FieldOrder::Gf256 => (256u32, POLY_256),
            FieldOrder::Gf65536 => (65536u32, POLY_65536),
        };
        let period = (n - 1) as usize;
        let mut exp = vec![0u16; 2 * period];
        let mut log = vec![0u32; n as usize];
        let mut x: u32 = 1;
        for (i, slot) in exp.iter_mut().enumerate().take(period) {
            *slot = x as u16;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & n != 0 {
                x ^= poly;
            }
        }
        for i in period..2 * period {
            exp[i] = exp[i - period];
        }
        GaloisField { order: n, exp, log }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Elements are masked draws from a uniform 32-bit source; the field
    /// order divides 2^32, so masking is bias-free.
    pub fn mask(&self) -> u32 {
        self.order - 1
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        debug_assert!(a != 0, "zero has no inverse");
        self.exp[(self.order - 1 - self.log[a as usize]) as usize]
    }

    /// `dst ^= c * src`, elementwise.
    pub fn axpy(&self, dst: &mut [u16], src: &[u16], c: u16) {
        debug_assert_eq!(dst.len(), src.len());
        if c == 0 {
            return;
        }
        let lc = self.log[c as usize];
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d ^= self.exp[(lc + self.log[s as usize]) as usize];
            }
        }
    }

    /// Row scale: `row *= c`.
    pub fn scale(&self, row: &mut [u16], c: u16) {
        if c == 1 {
            return;
        }
        if c == 0 {
            row.fill(0);
            return;
        }
        let lc = self.log[c as usize];
        for v in row.iter_mut() {
            if *v != 0 {
                *v = self.exp[(lc + self.log[*v as usize]) as usize];
            }
        }
    }
}

/// Rank of a row-major matrix, destructively, by forward elimination.
pub fn rank(field: &GaloisField, rows: &mut [Vec<u16>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut r = 0;
    for col in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(pivot) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, pivot);
        let inv = field.inv(rows[r][col]);
        field.scale(&mut rows[r][col..], inv);
        let (pivot_row, rest) = {
            let (head, tail) = rows.split_at_mut(r + 1);
            (&head[r], tail)
        };
        for row in rest.iter_mut() {
            let factor = row[col];
            if factor != 0 {
                field.axpy(&mut row[col..], &pivot_row[col..], factor);
            }
        }
        r += 1;
    }
    r
}
