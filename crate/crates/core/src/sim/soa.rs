//! Kernels on split real/imaginary amplitude arrays.
//!
//! On x86_64 with AVX2 and FMA (and AVX-512 when present) the hot loops run in
//! a feature-enabled copy selected at runtime; results are deterministic on a given machine.

use super::kernels::Mat2;

trait Madd {
    fn madd(a: f64, b: f64, c: f64) -> f64;
}

struct Plain;
struct Fused;

impl Madd for Plain {
    #[inline(always)]
    fn madd(a: f64, b: f64, c: f64) -> f64 {
        a * b + c
    }
}

impl Madd for Fused {
    #[inline(always)]
    fn madd(a: f64, b: f64, c: f64) -> f64 {
        a.mul_add(b, c)
    }
}

#[inline(always)]
fn one_q_body<A: Madd>(re: &mut [f64], im: &mut [f64], q: usize, m: &Mat2) {
    let stride = 1usize << q;
    let [[a, b], [c, d]] = *m;
    for (rc, ic) in re.chunks_exact_mut(2 * stride).zip(im.chunks_exact_mut(2 * stride)) {
        let (r0, r1) = rc.split_at_mut(stride);
        let (i0, i1) = ic.split_at_mut(stride);
        for k in 0..stride {
            let (xr, xi, yr, yi) = (r0[k], i0[k], r1[k], i1[k]);
            r0[k] = A::madd(a.re, xr, A::madd(-a.im, xi, A::madd(b.re, yr, -b.im * yi)));
            i0[k] = A::madd(a.re, xi, A::madd(a.im, xr, A::madd(b.re, yi, b.im * yr)));
            r1[k] = A::madd(c.re, xr, A::madd(-c.im, xi, A::madd(d.re, yr, -d.im * yi)));
            i1[k] = A::madd(c.re, xi, A::madd(c.im, xr, A::madd(d.re, yi, d.im * yr)));
        }
    }
}

/// Low qubits: pairs sit inside one `B`-wide block, swapped by `j ^ S`.
#[inline(always)]
fn one_q_low<A: Madd, const S: usize, const B: usize>(re: &mut [f64], im: &mut [f64], m: &Mat2) {
    let [[a, b], [c, d]] = *m;
    let mut k1r = [0.0; B];
    let mut k1i = [0.0; B];
    let mut k2r = [0.0; B];
    let mut k2i = [0.0; B];
    for j in 0..B {
        let (diag, off) = if j & S == 0 { (a, b) } else { (d, c) };
        k1r[j] = diag.re;
        k1i[j] = diag.im;
        k2r[j] = off.re;
        k2i[j] = off.im;
    }
    for (rc, ic) in re.chunks_exact_mut(B).zip(im.chunks_exact_mut(B)) {
        let r: [f64; B] = rc.try_into().unwrap();
        let i: [f64; B] = ic.try_into().unwrap();
        for j in 0..B {
            let (pr, pi) = (r[j ^ S], i[j ^ S]);
            rc[j] = A::madd(k1r[j], r[j], A::madd(-k1i[j], i[j], A::madd(k2r[j], pr, -k2i[j] * pi)));
            ic[j] = A::madd(k1r[j], i[j], A::madd(k1i[j], r[j], A::madd(k2r[j], pi, k2i[j] * pr)));
        }
    }
}

#[inline(always)]
fn one_q_any<A: Madd>(re: &mut [f64], im: &mut [f64], q: usize, m: &Mat2) {
    match (q, re.len()) {
        (0, 8..) => one_q_low::<A, 1, 8>(re, im, m),
        (1, 8..) => one_q_low::<A, 2, 8>(re, im, m),
        (2, 8..) => one_q_low::<A, 4, 8>(re, im, m),
        (3, 16..) => one_q_low::<A, 8, 16>(re, im, m),
        (4, 32..) => one_q_low::<A, 16, 32>(re, im, m),
        _ => one_q_body::<A>(re, im, q, m),
    }
}

/// Gates on qubits 0, 1 and 2 applied in registers, one pass over 8-blocks.
#[inline(always)]
fn low3_body<A: Madd>(re: &mut [f64], im: &mut [f64], mats: &[Mat2; 3]) {
    let mut k = [[[0.0; 8]; 4]; 3];
    for (t, m) in mats.iter().enumerate() {
        let [[a, b], [c, d]] = *m;
        for j in 0..8 {
            let (diag, off) = if j & (1 << t) == 0 { (a, b) } else { (d, c) };
            k[t][0][j] = diag.re;
            k[t][1][j] = diag.im;
            k[t][2][j] = off.re;
            k[t][3][j] = off.im;
        }
    }
    #[inline(always)]
    fn step<A: Madd, const S: usize>(k: &[[f64; 8]; 4], r: &mut [f64; 8], i: &mut [f64; 8]) {
        let (x, y) = (*r, *i);
        for j in 0..8 {
            let (pr, pi) = (x[j ^ S], y[j ^ S]);
            r[j] = A::madd(k[0][j], x[j], A::madd(-k[1][j], y[j], A::madd(k[2][j], pr, -k[3][j] * pi)));
            i[j] = A::madd(k[0][j], y[j], A::madd(k[1][j], x[j], A::madd(k[2][j], pi, k[3][j] * pr)));
        }
    }
    for (rc, ic) in re.chunks_exact_mut(8).zip(im.chunks_exact_mut(8)) {
        let mut r: [f64; 8] = (&*rc).try_into().unwrap();
        let mut i: [f64; 8] = (&*ic).try_into().unwrap();
        step::<A, 1>(&k[0], &mut r, &mut i);
        step::<A, 2>(&k[1], &mut r, &mut i);
        step::<A, 4>(&k[2], &mut r, &mut i);
        rc.copy_from_slice(&r);
        ic.copy_from_slice(&i);
    }
}

/// Gates on distinct qubits; those on qubits 0 to 2 share one pass.
#[inline(always)]
fn units_body<A: Madd>(re: &mut [f64], im: &mut [f64], units: &[(usize, Mat2)]) {
    let mut rest: Vec<(usize, Mat2)> = Vec::with_capacity(units.len());
    if re.len() >= 8 {
        let one = super::kernels::identity2();
        let mut low = [one; 3];
        let mut any = false;
        for &(q, m) in units {
            if q < 3 {
                low[q] = m;
                any = true;
            } else {
                rest.push((q, m));
            }
        }
        if any {
            low3_body::<A>(re, im, &low);
        }
    } else {
        rest.extend_from_slice(units);
    }
    for (q, m) in &rest {
        one_q_any::<A>(re, im, *q, m);
    }
}

#[inline(always)]
fn phase_body<A: Madd>(re: &mut [f64], im: &mut [f64], pr: &[f64], pi: &[f64]) {
    for (((r, i), &a), &b) in re.iter_mut().zip(im.iter_mut()).zip(pr).zip(pi) {
        let (x, y) = (*r, *i);
        *r = A::madd(x, a, -y * b);
        *i = A::madd(x, b, y * a);
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f,avx2,fma")]
unsafe fn one_q_wide(re: &mut [f64], im: &mut [f64], q: usize, m: &Mat2) {
    one_q_any::<Fused>(re, im, q, m)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f,avx2,fma")]
unsafe fn units_wide(re: &mut [f64], im: &mut [f64], units: &[(usize, Mat2)]) {
    units_body::<Fused>(re, im, units)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn units_fast(re: &mut [f64], im: &mut [f64], units: &[(usize, Mat2)]) {
    units_body::<Fused>(re, im, units)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f,avx2,fma")]
unsafe fn phase_wide(re: &mut [f64], im: &mut [f64], pr: &[f64], pi: &[f64]) {
    phase_body::<Fused>(re, im, pr, pi)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn one_q_fast(re: &mut [f64], im: &mut [f64], q: usize, m: &Mat2) {
    one_q_any::<Fused>(re, im, q, m)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,fma")]
unsafe fn phase_fast(re: &mut [f64], im: &mut [f64], pr: &[f64], pi: &[f64]) {
    phase_body::<Fused>(re, im, pr, pi)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Level {
    Plain,
    Avx2,
    Avx512,
}

fn level() -> Level {
    #[cfg(target_arch = "x86_64")]
    {
        static LEVEL: std::sync::OnceLock<Level> = std::sync::OnceLock::new();
        *LEVEL.get_or_init(|| {
            if !(is_x86_feature_detected!("avx2") && is_x86_feature_detected!("fma")) {
                Level::Plain
            } else if is_x86_feature_detected!("avx512f") {
                Level::Avx512
            } else {
                Level::Avx2
            }
        })
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        Level::Plain
    }
}

/// Applies `m` to qubit `q`.
pub fn apply_1q(re: &mut [f64], im: &mut [f64], q: usize, m: &Mat2) {
    #[cfg(target_arch = "x86_64")]
    match level() {
        // SAFETY: the required CPU features were detected by `level`.
        Level::Avx512 => return unsafe { one_q_wide(re, im, q, m) },
        Level::Avx2 => return unsafe { one_q_fast(re, im, q, m) },
        Level::Plain => {}
    }
    one_q_any::<Plain>(re, im, q, m)
}

/// Applies each `(q, m)`; the qubits must be distinct.
pub fn apply_units(re: &mut [f64], im: &mut [f64], units: &[(usize, Mat2)]) {
    #[cfg(target_arch = "x86_64")]
    match level() {
        // SAFETY: the required CPU features were detected by `level`.
        Level::Avx512 => return unsafe { units_wide(re, im, units) },
        Level::Avx2 => return unsafe { units_fast(re, im, units) },
        Level::Plain => {}
    }
    units_body::<Plain>(re, im, units)
}

/// Elementwise multiplication by `pr + i pi`.
pub fn apply_phase(re: &mut [f64], im: &mut [f64], pr: &[f64], pi: &[f64]) {
    #[cfg(target_arch = "x86_64")]
    match level() {
        // SAFETY: the required CPU features were detected by `level`.
        Level::Avx512 => return unsafe { phase_wide(re, im, pr, pi) },
        Level::Avx2 => return unsafe { phase_fast(re, im, pr, pi) },
        Level::Plain => {}
    }
    phase_body::<Plain>(re, im, pr, pi)
}
