//! Small numerical helpers shared across modules.

use serde::Serializer;

pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// Neumaier-compensated sum, accumulated in iteration order.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// `log2(Σ 2^{x_i})`, ignoring `-inf` terms; `-inf` for an empty or all-`-inf` input.
pub fn log2_sum_exp2(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    let s = neumaier_sum(values.iter().map(|&x| (x - m).exp2()));
    m + s.log2()
}

/// Serializes non-finite floats as the strings `"inf"`, `"-inf"` and `"nan"`.
pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn ser_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => ser_f64(v, s),
        None => s.serialize_none(),
    }
}

pub fn ser_vec_f64<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct W(f64);
    impl serde::Serialize for W {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            ser_f64(&self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        seq.serialize_element(&W(x))?;
    }
    seq.end()
}

/// Golden-section maximization of a unimodal `f` on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Least-squares slope of `ys` against `xs`; `None` with fewer than two
/// distinct abscissae or any non-finite ordinate.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 || ys.iter().any(|y| !y.is_finite()) {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(xs), 2.0);
    }

    #[test]
    fn log_sum_exp_matches_direct() {
        let xs = [-1.0, 0.5, 2.0];
        let direct = xs.iter().map(|x: &f64| x.exp2()).sum::<f64>().log2();
        assert!((log2_sum_exp2(&xs) - direct).abs() < 1e-14);
        assert!((log2_sum_exp2(&[-2000.0, -2000.0]) - -1999.0).abs() < 1e-12);
    }

    #[test]
    fn slope_of_a_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        assert!((ls_slope(&xs, &ys).unwrap() + 0.5).abs() < 1e-15);
        assert_eq!(ls_slope(&[1.0], &[1.0]), None);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, y) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 4.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((y - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infinities_serialize_as_strings() {
        #[derive(serde::Serialize)]
        struct T {
            #[serde(serialize_with = "ser_f64")]
            x: f64,
        }
        assert_eq!(
            serde_json::to_string(&T { x: f64::INFINITY }).unwrap(),
            r#"{"x":"inf"}"#
        );
    }
}
