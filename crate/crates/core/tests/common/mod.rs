//! Independent oracles shared by the integration and acceptance suites.
//! Nothing here calls into the library's numerical code paths.
#![allow(dead_code)]

/// Mean and variance of the missing mass by enumerating all `m^n` samples.
pub fn enumerate_missing_mass(probs: &[f64], n: u32) -> (f64, f64) {
    let m = probs.len();
    let total = m.pow(n);
    let mut outcomes = Vec::with_capacity(total);
    let mut draw = vec![0usize; n as usize];
    for code in 0..total {
        let mut c = code;
        for slot in draw.iter_mut() {
            *slot = c % m;
            c /= m;
        }
        let prob: f64 = draw.iter().map(|&i| probs[i]).product();
        if prob == 0.0 {
            continue;
        }
        let mut seen = vec![false; m];
        for &i in &draw {
            seen[i] = true;
        }
        let missing: f64 = probs.iter().zip(&seen).filter(|(_, &s)| !s).map(|(&p, _)| p).sum();
        outcomes.push((prob, missing));
    }
    let mean: f64 = outcomes.iter().map(|(p, x)| p * x).sum();
    let var: f64 = outcomes.iter().map(|(p, x)| p * (x - mean) * (x - mean)).sum();
    (mean, var)
}

/// All vectors of `m` masses on the `1/steps` simplex grid.
pub fn simplex_grid(m: usize, steps: u32) -> Vec<Vec<f64>> {
    fn rec(m: usize, left: u32, steps: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<f64>>) {
        if m == 1 {
            cur.push(left);
            out.push(cur.iter().map(|&k| k as f64 / steps as f64).collect());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(m - 1, left - k, steps, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, steps, steps, &mut Vec::new(), &mut out);
    out
}

fn alpha(w: f64, c: f64) -> f64 {
    -w * w * c * c * (-2.0 * c).exp() + w * c * c * (-c).exp()
}

/// Brute-force maximum of `-w^2 c^2 e^{-2c} + w c^2 e^{-c}` over
/// `{0 <= w <= min(1, b c), 0 < c <= 20}` on a 2000 x 2000 lattice with
/// `w = t min(1, b c)`, followed by a second 2000 x 2000 lattice on the
/// neighbouring cells of the best point. `b = None` means no alphabet bound.
pub fn grid_max_alpha(b: Option<f64>) -> f64 {
    const N: usize = 2000;
    const C_MAX: f64 = 20.0;
    let cap = |c: f64| b.map_or(1.0, |b| (b * c).min(1.0));
    let scan = |c_lo: f64, c_hi: f64, t_lo: f64, t_hi: f64, inclusive_lo: bool| {
        let mut best = (f64::MIN, 0.0, 0.0);
        for j in 0..N {
            let s = if inclusive_lo { j as f64 / (N - 1) as f64 } else { (j + 1) as f64 / N as f64 };
            let c = c_lo + (c_hi - c_lo) * s;
            let wmax = cap(c);
            for i in 0..N {
                let t = t_lo + (t_hi - t_lo) * i as f64 / (N - 1) as f64;
                let v = alpha(t * wmax, c);
                if v > best.0 {
                    best = (v, c, t);
                }
            }
        }
        best
    };
    let (coarse, c0, t0) = scan(0.0, C_MAX, 0.0, 1.0, false);
    let dc = C_MAX / N as f64;
    let dt = 1.0 / (N - 1) as f64;
    let (fine, _, _) = scan(
        (c0 - dc).max(1e-9),
        (c0 + dc).min(C_MAX),
        (t0 - dt).max(0.0),
        (t0 + dt).min(1.0),
        true,
    );
    coarse.max(fine)
}
