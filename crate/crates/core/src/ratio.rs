//! Small integer-ratio helpers.

/// Euclid's gcd; `gcd(0, 0) == 1` so reduction never divides by zero.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    if a == 0 {
        1
    } else {
        a
    }
}

/// `(a, b)` divided by their gcd.
pub fn reduce(a: u64, b: u64) -> (u64, u64) {
    let g = gcd(a, b);
    (a / g, b / g)
}
