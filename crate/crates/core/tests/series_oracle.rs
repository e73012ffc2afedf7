use num_traits::Zero;
use tsscpp::closed_form::{h0b, h1b, p_coeff, s_kernel, ClosedForm};
use tsscpp::rational::{int, BigRational};
use tsscpp::series::{kernel_residue_oracle, residue_oracle, Integrand};

fn parity(m: usize) -> BigRational {
    int((m % 2) as i64)
}

fn pure(n: usize, k: usize, pole: i64) -> BigRational {
    residue_oracle(Integrand { binomial_power: (n - k) as i64, geometric: false }, pole).unwrap()
}

fn geo(n: usize, k: usize, pole: i64) -> BigRational {
    residue_oracle(Integrand { binomial_power: (n - k) as i64, geometric: true }, pole).unwrap()
}

fn h1_oracle(n: usize, i: usize) -> BigRational {
    (0..=n).map(|k| p_coeff(n, k, 0).unwrap() * pure(n, k, i as i64 - 2 * k as i64 + 1)).sum()
}

fn h0_oracle(n: usize, i: usize) -> BigRational {
    let s: BigRational = (0..=n).map(|k| p_coeff(n, k, 0).unwrap() * geo(n, k, i as i64 - 2 * k as i64)).sum();
    s - parity(i + 1)
}

/// Four-fold sum with every residue taken from the series oracle.
fn t_oracle(n: usize, ea: u8, eb: u8, i: usize, j: usize) -> BigRational {
    let r = |e: u8, k: usize, x: usize| {
        let x = x as i64 - 2 * k as i64;
        if e == 1 {
            pure(n, k, x + 1)
        } else {
            geo(n, k, x)
        }
    };
    let mut acc = BigRational::zero();
    for k1 in 0..=n {
        let a = r(ea, k1, i);
        if a.is_zero() {
            continue;
        }
        for k2 in 0..=n {
            let b = r(eb, k2, j);
            if b.is_zero() {
                continue;
            }
            for l1 in 0..=k1 {
                for l2 in 0..=k2 {
                    let w = kernel_residue_oracle(l1, l2).unwrap();
                    if w.is_zero() {
                        continue;
                    }
                    acc += &a * &b * p_coeff(n, k1, l1).unwrap() * p_coeff(n, k2, l2).unwrap() * w;
                }
            }
        }
    }
    let ind = |c: bool| int(c as i64);
    match (ea, eb) {
        (0, 0) => {
            acc + ind(i < j) * parity(i + 1) * parity(j) - ind(i > j) * parity(i) * parity(j + 1)
                + parity(j + 1) * h0_oracle(n, i)
                - parity(i + 1) * h0_oracle(n, j)
        }
        (1, 0) => acc + parity(j + 1) * h1_oracle(n, i),
        (0, 1) => acc - parity(i + 1) * h1_oracle(n, j),
        _ => acc,
    }
}

#[test]
fn standard_integrals() {
    use tsscpp::combinatorics::{binom, partial_binom_sum};
    for b in -3..7 {
        for a in 0..8 {
            let i1 = residue_oracle(Integrand { binomial_power: b, geometric: false }, a + 1).unwrap();
            assert_eq!(i1, BigRational::from_integer(binom(b, a)));
            let i2 = residue_oracle(Integrand { binomial_power: b, geometric: true }, a + 1).unwrap();
            assert_eq!(i2, BigRational::from_integer(partial_binom_sum(b, a)));
        }
    }
}

#[test]
fn kernel_matches_series() {
    for l1 in 0..8 {
        for l2 in 0..8 {
            assert_eq!(kernel_residue_oracle(l1, l2).unwrap(), int(s_kernel(l1, l2)), "({l1},{l2})");
        }
    }
}

#[test]
fn h_reductions_match_oracle() {
    for n in 1..=6 {
        for i in 0..=2 * n {
            assert_eq!(h1b(n, i), h1_oracle(n, i), "h1 n={n} i={i}");
            assert_eq!(h0b(n, i), h0_oracle(n, i), "h0 n={n} i={i}");
        }
    }
}

#[test]
fn t_reductions_match_oracle() {
    for n in 1..=6 {
        let cf = ClosedForm::new(n).unwrap();
        for ea in 0..2 {
            for eb in 0..2 {
                for i in 0..=2 * n {
                    for j in 0..=2 * n {
                        assert_eq!(cf.t(ea, eb, i, j).unwrap(), t_oracle(n, ea, eb, i, j), "t{ea}{eb} n={n} ({i},{j})");
                    }
                }
            }
        }
    }
}
