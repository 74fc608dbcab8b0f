//! Number-theoretic gates: Legendre symbols, smallest coprime primes,
//! non-square shifts, four-square decompositions, rank splittings, the
//! Gross–Zagier size gate and class numbers of negative discriminants via
//! reduced binary quadratic forms.
//!
//! Everything is exhaustive search over proven finite ranges; magnitudes
//! are small enough that trial division suffices.

use serde::Serialize;

use crate::{Error, Result};

/// Trial-division primality; adequate at these magnitudes.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc: u128 = 1;
    let m = modulus as u128;
    let mut b = (base % modulus) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Legendre symbol `(a/p)` by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> Result<i32> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return Ok(0);
    }
    let e = mod_pow(r, (p - 1) / 2, p);
    Ok(if e == 1 { 1 } else { -1 })
}

/// Smallest prime not dividing `2d`.
pub fn p0(d: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::InvalidInput("d must be >= 1".into()));
    }
    let mut q = 2u64;
    loop {
        if is_prime(q) && (2 * d) % q != 0 {
            return Ok(q);
        }
        q += 1;
    }
}

pub fn is_perfect_square(n: u64) -> bool {
    let r = n.isqrt();
    r * r == n
}

/// Minimal `j >= 0` with `c0 + j·d` not a perfect square, together with the
/// shifted value. The shift never exceeds `(p0(d)+1)/2`.
pub fn nonsquare_shift(c0: u64, d: u64) -> Result<(u64, u64)> {
    if c0 < 2 || d == 0 {
        return Err(Error::InvalidInput("need c0 >= 2 and d >= 1".into()));
    }
    let bound = (p0(d)? + 1) / 2;
    for j in 0..=bound {
        let c = c0 + j * d;
        if !is_perfect_square(c) {
            return Ok((j, c));
        }
    }
    unreachable!("the residues c0 + j·d cover all of F_p0, half of which are non-squares")
}

/// Minimal `j >= 0` with `c0 + j·d` a non-residue mod `p`; requires `p ∤ d`
/// so the arithmetic progression covers every residue class.
pub fn nonsquare_shift_mod_p(c0: u64, d: u64, p: u64) -> Result<(u64, u64)> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    if d % p == 0 {
        return Err(Error::InvalidInput(format!(
            "p = {p} divides d = {d}: the progression misses residues"
        )));
    }
    let bound = (p + 1) / 2;
    for j in 0..=bound {
        let c = c0 + j * d;
        if legendre(c as i64, p)? == -1 {
            return Ok((j, c));
        }
    }
    unreachable!("among (p+3)/2 distinct residues some is a non-square")
}

/// Lagrange four-square decomposition, returned in descending order;
/// deterministically the lexicographically greatest such tuple.
pub fn four_squares(c0: u64) -> (u64, u64, u64, u64) {
    let top = c0.isqrt();
    for a1 in (0..=top).rev() {
        let r1 = c0 - a1 * a1;
        for a2 in (0..=a1.min(r1.isqrt())).rev() {
            let r2 = r1 - a2 * a2;
            for a3 in (0..=a2.min(r2.isqrt())).rev() {
                let r3 = r2 - a3 * a3;
                let a4 = r3.isqrt();
                if a4 * a4 == r3 && a4 <= a3 {
                    return (a1, a2, a3, a4);
                }
            }
        }
    }
    unreachable!("every nonnegative integer is a sum of four squares")
}

/// Split `r = r1 + r2 + r3` with `0 <= ri <= 7`, `p ∤ (ri + 1)`, and
/// `r2 + r3 < 7` whenever all parts are positive. Returns the
/// lexicographically greatest valid triple, or `None`.
pub fn r_split(r: u32, p: u64) -> Result<Option<(u32, u32, u32)>> {
    if !(1..=21).contains(&r) {
        return Err(Error::InvalidInput(format!("r = {r} out of range 1..=21")));
    }
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let allowed = |ri: u32| ri <= 7 && (ri as u64 + 1) % p != 0;
    for r1 in (0..=7.min(r)).rev() {
        for r2 in (0..=(r - r1).min(7)).rev() {
            let r3 = r - r1 - r2;
            if r3 > 7 {
                continue;
            }
            if !allowed(r1) || !allowed(r2) || !allowed(r3) {
                continue;
            }
            if r1 > 0 && r2 > 0 && r3 > 0 && r2 + r3 >= 7 {
                continue;
            }
            return Ok(Some((r1, r2, r3)));
        }
    }
    Ok(None)
}

/// `true` iff `p > 4·sqrt(c0)`, compared exactly as `p² > 16·c0`.
pub fn gz_gate(p: u64, c0: u64) -> bool {
    (p as u128) * (p as u128) > 16 * c0 as u128
}

/// A binary quadratic form `a·x² + b·xy + c·y²`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct BinaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BinaryForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Reduced positive-definite: `|b| <= a <= c`, with `b >= 0` when
    /// `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        self.a > 0
            && self.discriminant() < 0
            && self.b.abs() <= self.a
            && self.a <= self.c
            && (self.b >= 0 || (self.b.abs() < self.a && self.a < self.c))
    }
}

/// All reduced positive-definite forms of discriminant `D < 0`.
pub fn reduced_forms(d: i64) -> Result<Vec<BinaryForm>> {
    if d >= 0 || !(d % 4 == 0 || d.rem_euclid(4) == 1) {
        return Err(Error::InvalidInput(format!(
            "discriminant must be negative and 0 or 1 mod 4, got {d}"
        )));
    }
    let mut forms = Vec::new();
    let b_max = (((-d) / 3) as u64).isqrt() as i64 + 1;
    for b in -b_max..=b_max {
        if (b * b - d) % 4 != 0 {
            continue;
        }
        let ac = (b * b - d) / 4;
        let mut a = if b.abs() > 1 { b.abs() } else { 1 };
        while a * a <= ac {
            if ac % a == 0 {
                let form = BinaryForm { a, b, c: ac / a };
                if form.is_reduced() {
                    forms.push(form);
                }
            }
            a += 1;
        }
    }
    forms.sort_by_key(|f| (f.a, f.b, f.c));
    Ok(forms)
}

/// Class number `h(D)`: the count of reduced forms of discriminant `D`.
pub fn class_number(d: i64) -> Result<u64> {
    Ok(reduced_forms(d)?.len() as u64)
}
