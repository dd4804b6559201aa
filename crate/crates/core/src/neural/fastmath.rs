//! Branch-free exponential that the compiler can vectorize, and the
//! activations built on it. Agrees with `f64::exp` to about one ulp.

const LOG2E: f64 = std::f64::consts::LOG2_E;
const LN2_HI: f64 = 6.931_471_803_691_238_2e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;
/// 1.5 · 2⁵²: adding it rounds to the nearest integer in the low mantissa bits.
const ROUND: f64 = 6_755_399_441_055_744.0;
/// 1/k! for k = 0..=13.
const C: [f64; 14] = [
    1.0,
    1.0,
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5_040.0,
    1.0 / 40_320.0,
    1.0 / 362_880.0,
    1.0 / 3_628_800.0,
    1.0 / 39_916_800.0,
    1.0 / 479_001_600.0,
    1.0 / 6_227_020_800.0,
];

/// `eˣ`, saturating to the smallest normal below about −708 and overflowing
/// to infinity above about 709.8.
#[inline(always)]
pub fn exp(x: f64) -> f64 {
    let x = x.clamp(-708.0, 710.0);
    let t = x * LOG2E + ROUND;
    let n = t - ROUND;
    let r = (x - n * LN2_HI) - n * LN2_LO;
    // Taylor series to degree 13 on |r| ≤ ln2/2 (truncation error < 1e-17),
    // evaluated by Estrin's scheme to keep the dependency chain short.
    let r2 = r * r;
    let r4 = r2 * r2;
    let r8 = r4 * r4;
    let p01 = mul_add(C[1], r, C[0]);
    let p23 = mul_add(C[3], r, C[2]);
    let p45 = mul_add(C[5], r, C[4]);
    let p67 = mul_add(C[7], r, C[6]);
    let p89 = mul_add(C[9], r, C[8]);
    let pab = mul_add(C[11], r, C[10]);
    let pcd = mul_add(C[13], r, C[12]);
    let p03 = mul_add(p23, r2, p01);
    let p47 = mul_add(p67, r2, p45);
    let p8b = mul_add(pab, r2, p89);
    let p07 = mul_add(p47, r4, p03);
    let p8d = mul_add(pcd, r4, p8b);
    let p = mul_add(p8d, r8, p07);
    // Integer n sits in the low bits of t; split the scale in two so that
    // n = 1024 does not overflow the exponent field.
    let k = (t.to_bits() as i64).wrapping_sub(ROUND.to_bits() as i64);
    let half = k >> 1;
    let s1 = f64::from_bits(((half + 1023) << 52) as u64);
    let s2 = f64::from_bits(((k - half + 1023) << 52) as u64);
    p * s1 * s2
}

/// `a · b + c`, fused when the target has FMA.
#[inline(always)]
pub fn mul_add(a: f64, b: f64, c: f64) -> f64 {
    if cfg!(target_feature = "fma") {
        a.mul_add(b, c)
    } else {
        a * b + c
    }
}

#[inline(always)]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + exp(-x))
}

#[inline(always)]
pub fn tanh(x: f64) -> f64 {
    // Odd-symmetric form keeps precision near zero and saturates cleanly.
    let a = x.abs();
    let e = exp(-2.0 * a);
    let t = if a < 0.02 {
        let a2 = a * a;
        a * (1.0 + a2 * (-1.0 / 3.0 + a2 * (2.0 / 15.0 + a2 * (-17.0 / 315.0))))
    } else {
        (1.0 - e) / (1.0 + e)
    };
    t.copysign(x)
}
