//! Dense vectors over product spaces `A^n` in lexicographic order.

use super::Channel;

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        out.extend(b.iter().map(|&y| x * y));
    }
    out
}

/// `p^{⊗n}` as a vector of length `|p|^n`.
pub fn product_vector(p: &[f64], n: usize) -> Vec<f64> {
    (0..n).fold(vec![1.0], |acc, _| kron(&acc, p))
}

/// `Q^n(·|u)` over the output space, for the input sequence `u`.
pub fn conditional_product(ch: &Channel, u: &[usize]) -> Vec<f64> {
    u.iter().fold(vec![1.0], |acc, &s| kron(&acc, ch.row(s)))
}

/// Pushes a (not necessarily normalized) vector over `A^n` through `n` uses of
/// `ch`, one coordinate at a time. Cost is `O(n · max(|A|,|B|)^{n+1})`.
pub fn apply_channel(input: &[f64], n: usize, ch: &Channel) -> Vec<f64> {
    let a = ch.input_len();
    let b = ch.output_len();
    debug_assert_eq!(input.len() as u64, (a as u64).pow(n as u32));
    let m = ch.matrix();
    let mut cur = input.to_vec();
    // Layout before step t: [B^t][A][A^(n-t-1)].
    let mut left = 1usize;
    for t in 0..n {
        let right = a.pow((n - t - 1) as u32);
        let mut next = vec![0.0; left * b * right];
        for l in 0..left {
            for x in 0..a {
                let src = &cur[(l * a + x) * right..(l * a + x + 1) * right];
                if src.iter().all(|&v| v == 0.0) {
                    continue;
                }
                for y in 0..b {
                    let w = m[x * b + y];
                    if w == 0.0 {
                        continue;
                    }
                    let dst = &mut next[(l * b + y) * right..(l * b + y + 1) * right];
                    for (d, &s) in dst.iter_mut().zip(src) {
                        *d += w * s;
                    }
                }
            }
        }
        cur = next;
        left *= b;
    }
    cur
}
