//! Index conventions of 2+1 Minkowski space: metric `diag(1,-1,-1)` and `eps_{012} = 1`.
//!
//! Every raise/lower of an index in the crate goes through [`metric`].

/// Diagonal metric entry `eta_{mu mu}` (equal to `eta^{mu mu}`).
#[inline]
pub fn metric(mu: usize) -> f64 {
    if mu == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Totally antisymmetric symbol with `eps_{012} = 1`.
#[inline]
pub fn levi_civita(mu: usize, nu: usize, lambda: usize) -> i8 {
    match (mu, nu, lambda) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// Nonzero `(mu, lambda, eps_{mu nu lambda})` for a fixed middle index `nu`.
pub fn epsilon_pairs(nu: usize) -> [(usize, usize, i8); 2] {
    let others: Vec<usize> = (0..3).filter(|&i| i != nu).collect();
    let (a, b) = (others[0], others[1]);
    [(a, b, levi_civita(a, nu, b)), (b, a, levi_civita(b, nu, a))]
}
