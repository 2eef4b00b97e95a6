//! Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

use alloc::vec::Vec;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, libm::fabs((kronrod - gauss) * half))
}

/// Most subintervals kept before the current estimate is accepted.
const MAX_PIECES: usize = 2000;

struct Piece {
    lo: f64,
    hi: f64,
    est: f64,
    err: f64,
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol * |I|)`.
///
/// Globally adaptive: the piece with the largest error estimate is bisected
/// until the summed error meets the tolerance or the piece budget runs out.
/// Returns the estimate and an error bound.
pub(crate) fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let (est, err) = kronrod15(&f, a, b);
    let mut pieces: Vec<Piece> = Vec::with_capacity(64);
    pieces.push(Piece { lo: a, hi: b, est, err });
    let (mut total, mut total_err) = (est, err);
    while total_err > abs_tol.max(rel_tol * libm::fabs(total)) && pieces.len() < MAX_PIECES {
        let worst = (0..pieces.len())
            .max_by(|&i, &j| pieces[i].err.total_cmp(&pieces[j].err))
            .expect("at least one piece");
        let Piece { lo, hi, est, err } = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Cannot split further; keep the piece and stop.
            pieces.push(Piece { lo, hi, est, err });
            break;
        }
        let (e1, r1) = kronrod15(&f, lo, mid);
        let (e2, r2) = kronrod15(&f, mid, hi);
        pieces.push(Piece { lo, hi: mid, est: e1, err: r1 });
        pieces.push(Piece { lo: mid, hi, est: e2, err: r2 });
        total = pieces.iter().map(|p| p.est).sum();
        total_err = pieces.iter().map(|p| p.err).sum();
    }
    (total, total_err)
}
