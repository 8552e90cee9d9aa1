//! In-place amplitude kernels. Qubit `q` is bit `q` of the basis index.

use num_complex::Complex64 as C64;

use crate::circuit::{GateKind, Pauli};

pub type Mat2 = [[C64; 2]; 2];

const IM: C64 = C64::new(0.0, 1.0);

pub fn apply_1q(amps: &mut [C64], q: usize, m: &Mat2) {
    let stride = 1usize << q;
    let [[m00, m01], [m10, m11]] = *m;
    if stride == 1 {
        for pair in amps.chunks_exact_mut(2) {
            let (a, b) = (pair[0], pair[1]);
            pair[0] = m00 * a + m01 * b;
            pair[1] = m10 * a + m11 * b;
        }
        return;
    }
    for chunk in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
            let (a, b) = (*x, *y);
            *x = m00 * a + m01 * b;
            *y = m10 * a + m11 * b;
        }
    }
}

pub fn matrix_1q(kind: GateKind, theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    let z = C64::new(0.0, 0.0);
    match kind {
        GateKind::H => {
            let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        GateKind::RX => [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]],
        GateKind::RY => [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]],
        GateKind::RZ => [[C64::new(c, -s), z], [z, C64::new(c, s)]],
        _ => panic!("{kind:?} is not a single-qubit gate"),
    }
}

pub fn identity2() -> Mat2 {
    let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    [[o, z], [z, o]]
}

pub fn conj2(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}

pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn apply_rz(amps: &mut [C64], q: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let (p0, p1) = (C64::new(c, -s), C64::new(c, s));
    for (z, a) in amps.iter_mut().enumerate() {
        *a *= if z >> q & 1 == 0 { p0 } else { p1 };
    }
}

pub fn apply_rzz(amps: &mut [C64], i: usize, j: usize, theta: f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let (even, odd) = (C64::new(c, -s), C64::new(c, s));
    for (z, a) in amps.iter_mut().enumerate() {
        *a *= if (z >> i ^ z >> j) & 1 == 0 { even } else { odd };
    }
}

/// A Pauli string acting as `P|z> = coef(z) |z ^ flip>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliString {
    pub flip: usize,
    pub zmask: usize,
    pub base: C64,
}

impl PauliString {
    pub fn new(terms: &[(usize, Pauli)]) -> Self {
        let mut p = PauliString {
            flip: 0,
            zmask: 0,
            base: C64::new(1.0, 0.0),
        };
        for &(q, op) in terms {
            match op {
                Pauli::I => {}
                Pauli::X => p.flip |= 1 << q,
                Pauli::Z => p.zmask |= 1 << q,
                Pauli::Y => {
                    p.flip |= 1 << q;
                    p.zmask |= 1 << q;
                    p.base *= IM;
                }
            }
        }
        p
    }

    pub fn conj(self) -> Self {
        PauliString {
            base: self.base.conj(),
            ..self
        }
    }

    pub fn shifted(self, offset: usize) -> Self {
        PauliString {
            flip: self.flip << offset,
            zmask: self.zmask << offset,
            ..self
        }
    }

    #[inline]
    pub fn coef(&self, z: usize) -> C64 {
        if (z & self.zmask).count_ones() & 1 == 1 {
            -self.base
        } else {
            self.base
        }
    }

    pub fn apply(&self, amps: &mut [C64]) {
        if self.flip == 0 {
            for (z, a) in amps.iter_mut().enumerate() {
                *a *= self.coef(z);
            }
            return;
        }
        let top = 1usize << (usize::BITS - 1 - self.flip.leading_zeros());
        for z in 0..amps.len() {
            if z & top == 0 {
                let w = z ^ self.flip;
                let (az, aw) = (amps[z], amps[w]);
                amps[w] = self.coef(z) * az;
                amps[z] = self.coef(w) * aw;
            }
        }
    }

    /// `exp(-i theta/2 P)` in place.
    pub fn rotate(&self, amps: &mut [C64], theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let ms = C64::new(0.0, -s);
        if self.flip == 0 {
            for (z, a) in amps.iter_mut().enumerate() {
                *a *= c + ms * self.coef(z);
            }
            return;
        }
        let top = 1usize << (usize::BITS - 1 - self.flip.leading_zeros());
        for z in 0..amps.len() {
            if z & top == 0 {
                let w = z ^ self.flip;
                let (az, aw) = (amps[z], amps[w]);
                amps[z] = c * az + ms * self.coef(w) * aw;
                amps[w] = c * aw + ms * self.coef(z) * az;
            }
        }
    }
}

pub fn generator_string(kind: GateKind, qubits: &[usize]) -> Option<PauliString> {
    let (a, b) = kind.generator()?;
    let mut terms = vec![(qubits[0], a)];
    if kind.arity() == 2 {
        terms.push((qubits[1], b));
    }
    Some(PauliString::new(&terms))
}

/// Applies a gate to qubits shifted by `offset`, or its complex conjugate.
pub fn apply_gate_raw(amps: &mut [C64], kind: GateKind, qubits: &[usize], theta: f64, offset: usize, conj: bool) {
    let q: Vec<usize> = qubits.iter().map(|&q| q + offset).collect();
    let sign = if conj { -1.0 } else { 1.0 };
    match kind {
        GateKind::RZ => apply_rz(amps, q[0], sign * theta),
        GateKind::RZZ => apply_rzz(amps, q[0], q[1], sign * theta),
        GateKind::H | GateKind::RX | GateKind::RY => {
            let m = matrix_1q(kind, theta);
            apply_1q(amps, q[0], &if conj { conj2(&m) } else { m });
        }
        _ => {
            let p = generator_string(kind, qubits).expect("rotation gate").shifted(offset);
            // conj(exp(-i t/2 P)) = exp(+i t/2 conj(P))
            if conj {
                p.conj().rotate(amps, -theta);
            } else {
                p.rotate(amps, theta);
            }
        }
    }
}
