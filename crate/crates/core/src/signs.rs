//! The single place where sign conventions are fixed.
//!
//! Exterior generators `λ^k` pair with the K(g) contractions as
//! `i_k(λ^m) = PAIRING · δ_km`, with `PAIRING = -1`. This is the only choice
//! under which the bracket relations `[L_j, i_k] = i_{[λ_j, λ_k]}` hold while
//! `d_Λ λ^m = Σ_{i<j} c^m_{ij} λ^i∧λ^j`. Every formula that contracts the
//! canonical element `Σ_k λ^k ⊗ λ_k` (Weil differential, Cartan
//! differential, the twist) takes one factor of `PAIRING` per contraction.

use num_traits::One;

use crate::linalg::{q, Rational};

pub const PAIRING: i64 = -1;

pub fn pairing() -> Rational {
    q(PAIRING)
}

/// `(-1)^deg`.
pub fn koszul(deg: i32) -> i64 {
    if deg.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn koszul_q(deg: i32) -> Rational {
    q(koszul(deg))
}

/// Coefficient of `ξ∧λ^I ⊗ i_{λ_I} m` in the closed form of `T = exp(-𝐢)`,
/// for `|I| = q` and `i_{λ_I} = i_{i_1} ∘ … ∘ i_{i_q}`.
pub fn twist_closed_form(q_len: usize) -> Rational {
    let tri = q_len * (q_len + 1) / 2;
    let mut s = if tri % 2 == 0 { Rational::one() } else { -Rational::one() };
    for _ in 0..q_len {
        s *= pairing();
    }
    s
}

/// Sign of the permutation sorting `xs` (all distinct), or 0 if two coincide.
pub fn sort_sign(xs: &mut [usize]) -> i64 {
    let mut sign = 1;
    if xs.is_empty() {
        return 1;
    }
    for a in 0..xs.len() {
        for b in 0..xs.len() - 1 - a {
            if xs[b] == xs[b + 1] {
                return 0;
            }
            if xs[b] > xs[b + 1] {
                xs.swap(b, b + 1);
                sign = -sign;
            }
        }
    }
    if xs.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sort_signs() {
        assert_eq!(sort_sign(&mut [0, 1, 2]), 1);
        assert_eq!(sort_sign(&mut [1, 0, 2]), -1);
        assert_eq!(sort_sign(&mut [2, 0, 1]), 1);
        assert_eq!(sort_sign(&mut [2, 0, 2]), 0);
    }

    #[test]
    fn closed_form_pattern() {
        // (-1)^{q(q+1)/2} times PAIRING^q
        let expect = [1, 1, -1, -1, 1, 1, -1, -1];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(twist_closed_form(n), q(*e), "q = {n}");
        }
    }
}
