use super::{JointPmf, Pmf, SequenceIndex};
use crate::error::{Error, Result};

/// Symbol counts `N(a|x)`.
pub fn empirical_counts(seq: &SequenceIndex) -> Vec<u64> {
    let mut counts = vec![0u64; seq.radix()];
    for &s in seq.symbols() {
        counts[s] += 1;
    }
    counts
}

/// Empirical PMF `ν_x(a) = N(a|x) / n`.
pub fn empirical_pmf(seq: &SequenceIndex) -> Result<Pmf> {
    if seq.is_empty() {
        return Err(Error::validation("seq", "empirical PMF of an empty sequence"));
    }
    Pmf::from_counts(&empirical_counts(seq))
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::validation("eps", format!("{eps} must be finite and >= 0")));
    }
    Ok(())
}

/// Counts-based letter typicality: `|N(a)/n - p(a)| <= eps p(a)` for every `a`.
pub(crate) fn counts_typical(counts: &[u64], n: usize, probs: &[f64], eps: f64) -> bool {
    let n = n as f64;
    counts
        .iter()
        .zip(probs)
        .all(|(&c, &p)| (c as f64 / n - p).abs() <= eps * p)
}

/// Letter typicality. Symbols with `p(a) = 0` must not occur at all.
pub fn is_letter_typical(seq: &SequenceIndex, p: &Pmf, eps: f64) -> Result<bool> {
    check_eps(eps)?;
    if p.len() != seq.radix() {
        return Err(Error::validation(
            "seq",
            format!(
                "sequence alphabet has {} symbols but the PMF has {}",
                seq.radix(),
                p.len()
            ),
        ));
    }
    if seq.is_empty() {
        return Err(Error::validation("seq", "typicality of an empty sequence"));
    }
    Ok(counts_typical(
        &empirical_counts(seq),
        seq.len(),
        p.probs(),
        eps,
    ))
}

/// Letter typicality of the pair sequence `((u_1, v_1), ..)` under `joint`.
pub fn joint_typicality_test(
    useq: &SequenceIndex,
    vseq: &SequenceIndex,
    joint: &JointPmf,
    eps: f64,
) -> Result<bool> {
    check_eps(eps)?;
    if useq.len() != vseq.len() {
        return Err(Error::validation(
            "vseq",
            format!("length {} differs from {}", vseq.len(), useq.len()),
        ));
    }
    if useq.radix() != joint.rows_len() || vseq.radix() != joint.cols_len() {
        return Err(Error::validation("joint", "sequence alphabets do not match the joint"));
    }
    if useq.is_empty() {
        return Err(Error::validation("useq", "typicality of an empty sequence"));
    }
    let k = joint.cols_len();
    let mut counts = vec![0u64; joint.rows_len() * k];
    for (&u, &v) in useq.symbols().iter().zip(vseq.symbols()) {
        counts[u * k + v] += 1;
    }
    Ok(counts_typical(&counts, useq.len(), joint.table(), eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::{Alphabet, Channel};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seq(radix: usize, s: &[usize]) -> SequenceIndex {
        SequenceIndex::new(radix, s.to_vec()).unwrap()
    }

    #[test]
    fn empirical_examples() {
        assert_eq!(empirical_pmf(&seq(2, &[0, 0, 1, 1])).unwrap().probs(), &[0.5, 0.5]);
        assert_eq!(empirical_pmf(&seq(3, &[2, 2, 2])).unwrap().probs(), &[0.0, 0.0, 1.0]);
        let p = empirical_pmf(&seq(3, &[0, 1, 1, 1, 2])).unwrap();
        assert_eq!(p.probs(), &[1.0 / 5.0, 3.0 / 5.0, 1.0 / 5.0]);
    }

    #[test]
    fn typicality_examples() {
        let half = Pmf::bernoulli(0.5).unwrap();
        assert!(!is_letter_typical(&seq(2, &[0, 0, 0, 1]), &half, 0.4).unwrap());
        assert!(is_letter_typical(&seq(2, &[0, 1, 1, 0]), &half, 0.0).unwrap());
        let one = Pmf::bernoulli(1.0).unwrap();
        assert!(!is_letter_typical(&seq(2, &[1, 1, 0]), &one, 10.0).unwrap());
        assert!(is_letter_typical(&seq(2, &[1]), &half, -1.0).is_err());
    }

    #[test]
    fn joint_examples() {
        let j = JointPmf::from_input_and_channel(
            &Pmf::uniform(2),
            &Channel::identity(Alphabet::binary()),
        )
        .unwrap();
        let u = seq(2, &[0, 1, 1, 0]);
        assert!(joint_typicality_test(&u, &u, &j, 0.0).unwrap());
        let v = seq(2, &[0, 1, 1, 1]);
        assert!(!joint_typicality_test(&u, &v, &j, 5.0).unwrap());
        assert!(joint_typicality_test(&u, &seq(2, &[0]), &j, 0.1).is_err());
    }

    #[test]
    fn joint_matches_per_cell_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let w: Vec<f64> = (0..9).map(|_| rng.random::<f64>()).collect();
            let j = JointPmf::from_flat(Alphabet::indexed(3), Alphabet::indexed(3), w).unwrap();
            let n = rng.random_range(1..20);
            let u: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
            let v: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
            let eps = rng.random::<f64>() * 2.0;
            let mut oracle = true;
            for a in 0..3 {
                for b in 0..3 {
                    let c = u.iter().zip(&v).filter(|(&x, &y)| x == a && y == b).count();
                    let p = j.get(a, b);
                    if (c as f64 / n as f64 - p).abs() > eps * p {
                        oracle = false;
                    }
                }
            }
            let got = joint_typicality_test(&seq(3, &u), &seq(3, &v), &j, eps).unwrap();
            assert_eq!(got, oracle);
        }
    }

    proptest! {
        #[test]
        fn eps_zero_accepts_exactly_the_type(
            counts in proptest::collection::vec(0u64..5, 2..5),
            s in proptest::collection::vec(0usize..4, 1..16),
        ) {
            prop_assume!(counts.iter().sum::<u64>() > 0);
            let radix = counts.len();
            let s: Vec<usize> = s.into_iter().map(|x| x % radix).collect();
            let p = Pmf::from_counts(&counts).unwrap();
            let sq = seq(radix, &s);
            let got = is_letter_typical(&sq, &p, 0.0).unwrap();
            // Rational comparison: N(a)/n == c_a/C  <=>  N(a) C == c_a n.
            let total: u64 = counts.iter().sum();
            let n = s.len() as u64;
            let emp = empirical_counts(&sq);
            let exact = emp.iter().zip(&counts).all(|(&e, &c)| e * total == c * n);
            prop_assert_eq!(got, exact);
        }
    }
}
