//! Discrete Fourier transform on the circle samples.
//!
//! Radix-2 for power-of-two lengths, direct summation otherwise. Twiddles are
//! evaluated directly rather than by recurrence to keep the round-trip error
//! near machine precision.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::C;

/// In-place unnormalized DFT. `inverse = false` uses `exp(-2πi jk/n)`.
pub(crate) fn dft_in_place(buf: &mut [C], inverse: bool) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(buf, inverse);
    } else {
        let out = direct(buf, inverse);
        buf.copy_from_slice(&out);
    }
}

fn twiddle(k: usize, n: usize, inverse: bool) -> C {
    let sign = if inverse { 1.0 } else { -1.0 };
    C::from_polar(1.0, sign * 2.0 * PI * (k as f64) / (n as f64))
}

fn direct(buf: &[C], inverse: bool) -> Vec<C> {
    let n = buf.len();
    let mut out = vec![C::new(0.0, 0.0); n];
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = C::new(0.0, 0.0);
        for (j, &x) in buf.iter().enumerate() {
            acc += x * twiddle((j * k) % n, n, inverse);
        }
        *o = acc;
    }
    out
}

fn radix2(buf: &mut [C], inverse: bool) {
    let n = buf.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddle(k * stride, n, inverse);
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}
