//! Exact integer linear algebra: Smith normal form, ranks over prime
//! fields, and modular feasibility of `M f = c (mod n)`.
//!
//! All arithmetic is arbitrary precision; pivot growth on even modest
//! matrices exceeds 64 bits and a silent overflow here would corrupt
//! verdicts. Pivots are chosen by minimal absolute value to keep the
//! intermediate entries small.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::group::is_prime;
use crate::CoreError;

/// Dense matrix of arbitrary-precision integers, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, CoreError> {
        if entries.len() != rows * cols {
            return Err(CoreError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Result<Self, CoreError> {
        Self::new(rows, cols, entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.get_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, CoreError> {
        if self.cols != other.rows {
            return Err(CoreError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = a * other.get(k, j);
                    *out.get_mut(i, j) += term;
                }
            }
        }
        Ok(out)
    }

    /// `[self | extra]`, one extra column.
    pub fn augment_column(&self, col: &[BigInt]) -> Result<IntMatrix, CoreError> {
        if col.len() != self.rows {
            return Err(CoreError::DimensionMismatch(format!(
                "augmenting {}x{} with column of length {}",
                self.rows,
                self.cols,
                col.len()
            )));
        }
        let mut out = IntMatrix::zero(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *out.get_mut(r, c) = self.get(r, c).clone();
            }
            *out.get_mut(r, self.cols) = col[r].clone();
        }
        Ok(out)
    }

    /// Determinant by fraction-free Gaussian elimination (Bareiss).
    pub fn determinant(&self) -> Result<BigInt, CoreError> {
        if self.rows != self.cols {
            return Err(CoreError::DimensionMismatch("determinant of non-square".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.entries.clone();
        let at = |m: &Vec<BigInt>, r: usize, c: usize| m[r * n + c].clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if at(&m, k, k).is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !at(&m, r, k).is_zero()) else {
                    return Ok(BigInt::zero());
                };
                for c in 0..n {
                    m.swap(k * n + c, swap * n + c);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = at(&m, k, k) * at(&m, i, j) - at(&m, i, k) * at(&m, k, j);
                    m[i * n + j] = num / &prev;
                }
            }
            prev = at(&m, k, k);
        }
        Ok(sign * at(&m, n - 1, n - 1))
    }
}

/// `U * M * V = D` with unimodular `U`, `V` and a non-negative diagonal
/// divisibility chain on `D`.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfDecomposition {
    /// Diagonal entries up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|e| !e.is_zero()).count()
    }
}

fn row_swap(m: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for c in 0..m.cols {
        m.entries.swap(a * m.cols + c, b * m.cols + c);
    }
}

fn col_swap(m: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for r in 0..m.rows {
        m.entries.swap(r * m.cols + a, r * m.cols + b);
    }
}

/// row[target] += k * row[src]
fn row_addmul(m: &mut IntMatrix, target: usize, src: usize, k: &BigInt) {
    if k.is_zero() {
        return;
    }
    for c in 0..m.cols {
        let term = k * m.get(src, c);
        *m.get_mut(target, c) += term;
    }
}

/// col[target] += k * col[src]
fn col_addmul(m: &mut IntMatrix, target: usize, src: usize, k: &BigInt) {
    if k.is_zero() {
        return;
    }
    for r in 0..m.rows {
        let term = k * m.get(r, src);
        *m.get_mut(r, target) += term;
    }
}

fn row_negate(m: &mut IntMatrix, r: usize) {
    for c in 0..m.cols {
        let e = m.get_mut(r, c);
        *e = -e.clone();
    }
}

/// Smith normal form with tracked transforms.
pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let steps = m.rows.min(m.cols);

    for t in 0..steps {
        'position: loop {
            // minimal-absolute-value nonzero pivot in the remaining block
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..d.rows {
                for j in t..d.cols {
                    if d.get(i, j).is_zero() {
                        continue;
                    }
                    match pivot {
                        Some((pi, pj)) if d.get(pi, pj).abs() <= d.get(i, j).abs() => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break 'position; // block is zero; done with the whole matrix
            };
            row_swap(&mut d, t, pi);
            row_swap(&mut u, t, pi);
            col_swap(&mut d, t, pj);
            col_swap(&mut v, t, pj);

            let mut dirty = false;
            for i in t + 1..d.rows {
                let q = -(d.get(i, t) / d.get(t, t));
                row_addmul(&mut d, i, t, &q);
                row_addmul(&mut u, i, t, &q);
                if !d.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..d.cols {
                let q = -(d.get(t, j) / d.get(t, t));
                col_addmul(&mut d, j, t, &q);
                col_addmul(&mut v, j, t, &q);
                if !d.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'position;
            }
            // pivot must divide the rest of the block for the chain to hold
            for i in t + 1..d.rows {
                for j in t + 1..d.cols {
                    if !(d.get(i, j) % d.get(t, t)).is_zero() {
                        row_addmul(&mut d, t, i, &BigInt::one());
                        row_addmul(&mut u, t, i, &BigInt::one());
                        continue 'position;
                    }
                }
            }
            break 'position;
        }
        if d.get(t, t).is_negative() {
            row_negate(&mut d, t);
            row_negate(&mut u, t);
        }
    }
    SnfDecomposition { u, d, v }
}

/// Rank over `F_p` by Gaussian elimination on reduced entries.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> Result<usize, CoreError> {
    if !is_prime(p) {
        return Err(CoreError::InvalidArgument(format!("{p} is not prime")));
    }
    let pb = BigInt::from(p);
    let mut a: Vec<Vec<u64>> = (0..m.rows)
        .map(|r| {
            m.row(r)
                .iter()
                .map(|e| e.mod_floor(&pb).try_into().unwrap())
                .collect()
        })
        .collect();
    let mut rank = 0;
    for col in 0..m.cols {
        let Some(pr) = (rank..m.rows).find(|&r| a[r][col] % p != 0) else {
            continue;
        };
        a.swap(rank, pr);
        let inv = mod_pow(a[rank][col], p - 2, p);
        for r in 0..m.rows {
            if r == rank || a[r][col] == 0 {
                continue;
            }
            let factor = a[r][col] % p * inv % p;
            for c in col..m.cols {
                a[r][c] = (a[r][c] + (p - factor % p) * (a[rank][c] % p)) % p;
            }
        }
        rank += 1;
        if rank == m.rows {
            break;
        }
    }
    Ok(rank)
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut out = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            out = out.wrapping_mul(base) % p;
        }
        base = base.wrapping_mul(base) % p;
        exp >>= 1;
    }
    out
}

/// Outcome of the "solvable mod some n coprime to the excluded primes"
/// question for `M f = c`.
#[derive(Clone, Debug)]
pub struct FeasibilityVerdict {
    /// Solvable over the rationals; almost every prime modulus then works.
    pub generic_feasible: bool,
    /// Primes (outside the excluded set) for which `M f = c (mod p)` is
    /// solvable. Exhaustive when not generic; a witness sample otherwise.
    pub feasible_primes: Vec<u64>,
    /// When not generic: the only primes any solvable modulus could
    /// contain, namely the prime divisors of the obstruction.
    pub candidate_primes: Vec<u64>,
    /// When not generic: gcd of the transformed right-hand side beyond the
    /// rank. Every feasible prime divides it.
    pub obstruction: Option<BigInt>,
}

impl FeasibilityVerdict {
    /// True when some modulus n > 1 coprime to the excluded primes admits a
    /// solution.
    pub fn feasible(&self) -> bool {
        !self.feasible_primes.is_empty()
    }
}

/// Decide whether `M f = c (mod n)` is solvable for some `n > 1` coprime to
/// every prime in `excluded`. Solvability mod a prime p is equivalent to
/// `rank_p([M|c]) = rank_p(M)`, and a single feasible prime yields `n = p`;
/// conversely solvability mod any composite n implies solvability mod each
/// of its prime divisors, so prime moduli decide the question.
pub fn solvable_coprime_to(
    m: &IntMatrix,
    c: &[BigInt],
    excluded: &[u64],
) -> Result<FeasibilityVerdict, CoreError> {
    if c.len() != m.rows {
        return Err(CoreError::DimensionMismatch(format!(
            "rhs length {} vs {} rows",
            c.len(),
            m.rows
        )));
    }
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    // transformed rhs: D g = U c
    let mut cprime = vec![BigInt::zero(); m.rows];
    for (i, cp) in cprime.iter_mut().enumerate() {
        for (j, cj) in c.iter().enumerate() {
            *cp += snf.u.get(i, j) * cj;
        }
    }
    let beyond: Vec<&BigInt> = cprime[rank..].iter().collect();

    if beyond.iter().all(|e| e.is_zero()) {
        // rationally solvable; any prime not dividing the diagonal works
        let bad: BigInt = snf
            .diagonal()
            .iter()
            .take(rank)
            .fold(BigInt::one(), |acc, e| acc * e);
        let witness = (2u64..)
            .filter(|&p| is_prime(p))
            .find(|&p| !excluded.contains(&p) && !(&bad % BigInt::from(p)).is_zero())
            .expect("infinitely many primes");
        return Ok(FeasibilityVerdict {
            generic_feasible: true,
            feasible_primes: vec![witness],
            candidate_primes: Vec::new(),
            obstruction: None,
        });
    }

    let obstruction = beyond
        .iter()
        .fold(BigInt::zero(), |acc, e| acc.gcd(e));
    let candidate_primes = factor_primes(&obstruction)?;
    let mut feasible_primes = Vec::new();
    for &p in &candidate_primes {
        if excluded.contains(&p) {
            continue;
        }
        let full = m.augment_column(c)?;
        if rank_mod_p(m, p)? == rank_mod_p(&full, p)? {
            feasible_primes.push(p);
        }
    }
    Ok(FeasibilityVerdict {
        generic_feasible: false,
        feasible_primes,
        candidate_primes,
        obstruction: Some(obstruction),
    })
}

/// Distinct prime divisors; the obstruction values seen in practice are
/// tiny, but Pollard rho keeps this exact for anything up to u128.
fn factor_primes(n: &BigInt) -> Result<Vec<u64>, CoreError> {
    let mut n: u128 = n
        .abs()
        .try_into()
        .map_err(|_| CoreError::InvalidArgument("obstruction exceeds factoring range".into()))?;
    let mut primes = Vec::new();
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            primes.push(p as u64);
            while n % p == 0 {
                n /= p;
            }
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u128(m) {
            let p = u64::try_from(m)
                .map_err(|_| CoreError::InvalidArgument("prime factor exceeds u64".into()))?;
            if !primes.contains(&p) {
                primes.push(p);
            }
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    Ok(primes)
}

fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    // schoolbook double-and-add; fine at this scale
    let mut result = 0u128;
    let mut a = a % m;
    let mut b = b;
    while b > 0 {
        if b & 1 == 1 {
            result = (result + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    result
}

fn pow_mod_u128(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut out = 1u128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            out = mul_mod_u128(out, base, m);
        }
        base = mul_mod_u128(base, base, m);
        exp >>= 1;
    }
    out
}

fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u128) -> u128 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u128;
    loop {
        let f = |x: u128| (mul_mod_u128(x, x, n) + c) % n;
        let mut x = 2u128;
        let mut y = 2u128;
        let mut d = 1u128;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u128(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd_u128(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(m: &IntMatrix) -> SnfDecomposition {
        let snf = smith_normal_form(m);
        // U M V = D exactly
        let umv = snf.u.mul(m).unwrap().mul(&snf.v).unwrap();
        assert_eq!(umv, snf.d, "U*M*V != D");
        // unimodular transforms
        let du = snf.u.determinant().unwrap();
        let dv = snf.v.determinant().unwrap();
        assert!(du.abs().is_one(), "det U = {du}");
        assert!(dv.abs().is_one(), "det V = {dv}");
        // divisibility chain, non-negative diagonal, off-diagonal zero
        let diag = snf.diagonal();
        for (i, e) in diag.iter().enumerate() {
            assert!(!e.is_negative());
            if i + 1 < diag.len() && !e.is_zero() {
                assert!((&diag[i + 1] % e).is_zero(), "chain broken at {i}");
            }
            if e.is_zero() {
                assert!(diag[i..].iter().all(|x| x.is_zero()));
            }
        }
        for r in 0..snf.d.rows() {
            for c in 0..snf.d.cols() {
                if r != c {
                    assert!(snf.d.get(r, c).is_zero());
                }
            }
        }
        snf
    }

    #[test]
    fn snf_identity() {
        let m = IntMatrix::identity(3);
        let snf = check_snf(&m);
        assert_eq!(snf.d, IntMatrix::identity(3));
    }

    #[test]
    fn snf_diag_2_3() {
        let m = IntMatrix::from_i64(2, 2, &[2, 0, 0, 3]).unwrap();
        let snf = check_snf(&m);
        assert_eq!(snf.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn snf_assorted_shapes() {
        let samples = [
            IntMatrix::from_i64(2, 3, &[2, 4, 4, -6, 6, 12]).unwrap(),
            IntMatrix::from_i64(3, 3, &[0, 0, 0, 0, 0, 0, 0, 0, 0]).unwrap(),
            IntMatrix::from_i64(3, 2, &[1, 2, 3, 4, 5, 6]).unwrap(),
            IntMatrix::from_i64(1, 1, &[-7]).unwrap(),
            IntMatrix::from_i64(4, 3, &[3, 1, -2, 0, 5, 7, 2, 2, 2, -1, 0, 9]).unwrap(),
        ];
        for m in &samples {
            check_snf(m);
        }
    }

    #[test]
    fn rank_mod_p_basics() {
        let zero = IntMatrix::zero(3, 4);
        assert_eq!(rank_mod_p(&zero, 5).unwrap(), 0);
        let id = IntMatrix::identity(3);
        for p in [2, 3, 5, 13] {
            assert_eq!(rank_mod_p(&id, p).unwrap(), 3);
        }
        // rank drops mod 2
        let m = IntMatrix::from_i64(2, 2, &[1, 1, 3, 1]).unwrap();
        assert_eq!(rank_mod_p(&m, 2).unwrap(), 1);
        assert_eq!(rank_mod_p(&m, 5).unwrap(), 2);
        assert!(rank_mod_p(&m, 6).is_err());
    }

    #[test]
    fn rank_mod_p_agrees_with_snf_diagonal() {
        let samples = [
            IntMatrix::from_i64(3, 3, &[2, 4, 4, -6, 6, 12, 10, -4, -16]).unwrap(),
            IntMatrix::from_i64(4, 3, &[3, 0, -2, 0, 9, 7, 2, 2, 2, -1, 0, 6]).unwrap(),
            IntMatrix::from_i64(2, 4, &[2, 3, 5, 7, 11, 13, 17, 19]).unwrap(),
        ];
        for m in &samples {
            let snf = smith_normal_form(m);
            let diag = snf.diagonal();
            for p in [2u64, 3, 5, 7, 11, 13] {
                let want = diag
                    .iter()
                    .filter(|e| !(e.mod_floor(&BigInt::from(p))).is_zero())
                    .count();
                assert_eq!(rank_mod_p(m, p).unwrap(), want, "p={p}");
            }
        }
    }

    #[test]
    fn feasibility_single_equation() {
        // 3 f = 1: solvable mod 5 (f = 2), generically feasible
        let m = IntMatrix::from_i64(1, 1, &[3]).unwrap();
        let v = solvable_coprime_to(&m, &[BigInt::one()], &[2, 3]).unwrap();
        assert!(v.feasible());
        assert!(v.generic_feasible);
        assert_eq!(v.feasible_primes, vec![5]);
    }

    #[test]
    fn feasibility_contradictory_rows() {
        // f = 1 and f = 0 force 1 = 0 mod n for every n
        let m = IntMatrix::from_i64(2, 1, &[1, 1]).unwrap();
        let c = [BigInt::one(), BigInt::zero()];
        let v = solvable_coprime_to(&m, &c, &[2, 3]).unwrap();
        assert!(!v.feasible());
        assert!(!v.generic_feasible);
        assert!(v.candidate_primes.is_empty());
        assert!(v.obstruction.unwrap().is_one());
    }

    #[test]
    fn feasibility_obstruction_prime() {
        // f = 0 and f = 5: solvable only mod 5
        let m = IntMatrix::from_i64(2, 1, &[1, 1]).unwrap();
        let c = [BigInt::zero(), BigInt::from(5)];
        let v = solvable_coprime_to(&m, &c, &[2, 3]).unwrap();
        assert!(!v.generic_feasible);
        assert_eq!(v.candidate_primes, vec![5]);
        assert_eq!(v.feasible_primes, vec![5]);

        // same system with 5 excluded becomes infeasible
        let v2 = solvable_coprime_to(&m, &c, &[2, 3, 5]).unwrap();
        assert!(!v2.feasible());
    }

    #[test]
    fn feasibility_excluded_only() {
        // 2 f = 1 is solvable mod any odd prime, so excluding 2 is harmless;
        // x = 0, 2x = 3 is solvable only mod 3
        let m = IntMatrix::from_i64(2, 1, &[1, 2]).unwrap();
        let c = [BigInt::zero(), BigInt::from(3)];
        let v = solvable_coprime_to(&m, &c, &[3]).unwrap();
        assert!(!v.feasible());
        assert_eq!(v.candidate_primes, vec![3]);
    }

    #[test]
    fn factor_primes_works() {
        assert_eq!(factor_primes(&BigInt::from(1)).unwrap(), Vec::<u64>::new());
        assert_eq!(factor_primes(&BigInt::from(600)).unwrap(), vec![2, 3, 5]);
        assert_eq!(
            factor_primes(&BigInt::from(1000003i64 * 998244353)).unwrap(),
            vec![1000003, 998244353]
        );
    }
}
