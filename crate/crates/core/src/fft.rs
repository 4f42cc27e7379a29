//! Three-dimensional complex FFT built from 1-D rustfft passes.
//!
//! Plans are cached per thread and per grid size. The forward transform is
//! scaled by `1/n³` so that a constant field maps to its value at `k = 0`;
//! the inverse is unscaled.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

thread_local! {
    static PLANS: RefCell<HashMap<usize, Rc<Plans>>> = RefCell::new(HashMap::new());
}

fn plans(n: usize) -> Rc<Plans> {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Rc::new(Plans {
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                })
            })
            .clone()
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

/// In-place 3-D transform of `data` laid out as described in [`crate::grid`].
pub(crate) fn transform_in_place(grid: Grid, data: &mut [Complex64], dir: Direction) {
    let n = grid.n();
    debug_assert_eq!(data.len(), grid.len());
    let p = plans(n);
    let fft = match dir {
        Direction::Forward => &p.forward,
        Direction::Inverse => &p.inverse,
    };
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

    // Axis 3 is contiguous.
    fft.process_with_scratch(data, &mut scratch);

    let mut buf = vec![Complex64::default(); n * n];
    // Axis 2: transpose each (i2, i3) slab.
    for i1 in 0..n {
        let slab = &mut data[i1 * n * n..(i1 + 1) * n * n];
        for i2 in 0..n {
            for i3 in 0..n {
                buf[i3 * n + i2] = slab[i2 * n + i3];
            }
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for i2 in 0..n {
            for i3 in 0..n {
                slab[i2 * n + i3] = buf[i3 * n + i2];
            }
        }
    }
    // Axis 1: gather (i1, i3) planes at fixed i2.
    for i2 in 0..n {
        for i1 in 0..n {
            let row = (i1 * n + i2) * n;
            for i3 in 0..n {
                buf[i3 * n + i1] = data[row + i3];
            }
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for i1 in 0..n {
            let row = (i1 * n + i2) * n;
            for i3 in 0..n {
                data[row + i3] = buf[i3 * n + i1];
            }
        }
    }

    if dir == Direction::Forward {
        let scale = 1.0 / grid.len() as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }
}

/// Forward transform of two real arrays with one complex FFT.
pub(crate) fn forward_real_pair(
    grid: Grid,
    a: &[f64],
    b: &[f64],
) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut z: Vec<Complex64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| Complex64::new(x, y))
        .collect();
    transform_in_place(grid, &mut z, Direction::Forward);
    let mut fa = vec![Complex64::default(); z.len()];
    let mut fb = vec![Complex64::default(); z.len()];
    for idx in 0..z.len() {
        let zc = z[grid.conjugate_index(idx)].conj();
        fa[idx] = (z[idx] + zc) * 0.5;
        // (z - zc) / (2i)
        let d = z[idx] - zc;
        fb[idx] = Complex64::new(d.im * 0.5, -d.re * 0.5);
    }
    (fa, fb)
}

pub(crate) fn forward_real(grid: Grid, a: &[f64]) -> Vec<Complex64> {
    let mut z: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    transform_in_place(grid, &mut z, Direction::Forward);
    // Exact Hermitian symmetry; the FFT leaves round-off asymmetry.
    symmetrize(grid, &mut z);
    z
}

/// Inverse transform of two Hermitian arrays with one complex FFT.
pub(crate) fn inverse_real_pair(
    grid: Grid,
    a: &[Complex64],
    b: &[Complex64],
) -> (Vec<f64>, Vec<f64>) {
    let i = Complex64::new(0.0, 1.0);
    let mut z: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| x + i * y).collect();
    transform_in_place(grid, &mut z, Direction::Inverse);
    (
        z.iter().map(|c| c.re).collect(),
        z.iter().map(|c| c.im).collect(),
    )
}

pub(crate) fn inverse_real(grid: Grid, a: &[Complex64]) -> Vec<f64> {
    let mut z = a.to_vec();
    transform_in_place(grid, &mut z, Direction::Inverse);
    z.iter().map(|c| c.re).collect()
}

/// Replace `c(k)` by `(c(k) + conj c(-k)) / 2`.
pub(crate) fn symmetrize(grid: Grid, z: &mut [Complex64]) {
    for idx in 0..z.len() {
        let cj = grid.conjugate_index(idx);
        if cj < idx {
            continue;
        }
        let avg = (z[idx] + z[cj].conj()) * 0.5;
        z[idx] = avg;
        z[cj] = avg.conj();
    }
}

/// Inverse-transform many Hermitian arrays, two per FFT.
pub(crate) fn inverse_real_many(grid: Grid, fields: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(fields.len());
    let mut chunks = fields.chunks(2);
    for chunk in &mut chunks {
        match chunk {
            [a, b] => {
                let (x, y) = inverse_real_pair(grid, a, b);
                out.push(x);
                out.push(y);
            }
            [a] => out.push(inverse_real(grid, a)),
            _ => unreachable!(),
        }
    }
    out
}

/// Forward-transform many real arrays, two per FFT.
pub(crate) fn forward_real_many(grid: Grid, fields: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(fields.len());
    for chunk in fields.chunks(2) {
        match chunk {
            [a, b] => {
                let (x, y) = forward_real_pair(grid, a, b);
                out.push(x);
                out.push(y);
            }
            [a] => out.push(forward_real(grid, a)),
            _ => unreachable!(),
        }
    }
    out
}
