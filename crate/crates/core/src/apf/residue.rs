//! Small F_p[x] arithmetic for reduction-of-iterates checks.

/// Coefficients mod p, constant term first, trimmed.
pub type FpPoly = Vec<u64>;

pub fn fp_trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn fp_mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(out)
}

pub fn fp_add(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push((a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p);
    }
    fp_trim(out)
}

pub fn fp_scale(a: &[u64], c: u64, p: u64) -> FpPoly {
    fp_trim(a.iter().map(|&x| x * c % p).collect())
}

fn fp_inv_scalar(a: u64, p: u64) -> u64 {
    // p is a small prime
    let mut x = 1u64;
    loop {
        if (a * x) % p == 1 {
            return x;
        }
        x += 1;
        assert!(x < p, "inverse of zero mod p");
    }
}

pub fn fp_divmod(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    let b = fp_trim(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let linv = fp_inv_scalar(*b.last().unwrap(), p);
    let db = b.len() - 1;
    let mut rem = fp_trim(a.to_vec());
    if rem.len() < b.len() {
        return (vec![], rem);
    }
    let mut quot = vec![0u64; rem.len() - db];
    while rem.len() >= b.len() {
        let k = rem.len() - b.len();
        let factor = (rem.last().unwrap() * linv) % p;
        if factor != 0 {
            for j in 0..db {
                let sub = (factor * b[j]) % p;
                rem[k + j] = (rem[k + j] + p - sub) % p;
            }
        }
        quot[k] = factor;
        rem.pop();
        while rem.last() == Some(&0) {
            rem.pop();
        }
    }
    (fp_trim(quot), rem)
}

pub fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut a = fp_trim(a.to_vec());
    let mut b = fp_trim(b.to_vec());
    while !b.is_empty() {
        let (_, r) = fp_divmod(&a, &b, p);
        a = std::mem::replace(&mut b, r);
    }
    if a.is_empty() {
        return a;
    }
    let linv = fp_inv_scalar(*a.last().unwrap(), p);
    fp_scale(&a, linv, p)
}

/// A reduced rational map over F_p: coprime parts, monic denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct FpMap {
    pub num: FpPoly,
    pub den: FpPoly,
}

impl FpMap {
    pub fn new(num: FpPoly, den: FpPoly, p: u64) -> Self {
        let mut num = fp_trim(num);
        let mut den = fp_trim(den);
        assert!(!(num.is_empty() && den.is_empty()), "zero map over F_p");
        if !num.is_empty() && !den.is_empty() {
            let g = fp_gcd(&num, &den, p);
            if g.len() > 1 {
                num = fp_divmod(&num, &g, p).0;
                den = fp_divmod(&den, &g, p).0;
            }
        }
        if !den.is_empty() {
            let linv = fp_inv_scalar(*den.last().unwrap(), p);
            num = fp_scale(&num, linv, p);
            den = fp_scale(&den, linv, p);
        }
        FpMap { num, den }
    }

    pub fn degree(&self) -> usize {
        let dn = self.num.len().saturating_sub(1);
        let dd = self.den.len().saturating_sub(1);
        dn.max(dd)
    }

    /// `self ∘ inner` as reduced maps over F_p.
    pub fn compose(&self, inner: &FpMap, p: u64) -> FpMap {
        let d = self.degree();
        let mut up: Vec<FpPoly> = vec![vec![1]];
        let mut vp: Vec<FpPoly> = vec![vec![1]];
        for i in 1..=d {
            up.push(fp_mul(&up[i - 1], &inner.num, p));
            vp.push(fp_mul(&vp[i - 1], &inner.den, p));
        }
        let mut n: FpPoly = vec![];
        let mut dpoly: FpPoly = vec![];
        for i in 0..=d {
            let ci = self.num.get(i).copied().unwrap_or(0);
            if ci != 0 {
                n = fp_add(&n, &fp_scale(&fp_mul(&up[i], &vp[d - i], p), ci, p), p);
            }
            let bi = self.den.get(i).copied().unwrap_or(0);
            if bi != 0 {
                dpoly = fp_add(&dpoly, &fp_scale(&fp_mul(&up[i], &vp[d - i], p), bi, p), p);
            }
        }
        FpMap::new(n, dpoly, p)
    }

    /// `Some((c, k))` if the map is c·x^k with a constant denominator.
    pub fn as_monomial(&self) -> Option<(u64, usize)> {
        if self.den.len() != 1 {
            return None;
        }
        debug_assert_eq!(self.den[0], 1, "denominator is monic");
        let k = self.num.len().checked_sub(1)?;
        for (i, &c) in self.num.iter().enumerate() {
            if i != k && c != 0 {
                return None;
            }
        }
        Some((*self.num.last()?, k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_cancellation() {
        // (x^2 - 1)/(x - 1) = x + 1 over F_5
        let m = FpMap::new(vec![4, 0, 1], vec![4, 1], 5);
        assert_eq!(m.num, vec![1, 1]);
        assert_eq!(m.den, vec![1]);
    }

    #[test]
    fn composition_over_f2() {
        // x^2 + 1 composed with itself over F_2: (x^2+1)^2 + 1 = x^4
        let m = FpMap::new(vec![1, 0, 1], vec![1], 2);
        let m2 = m.compose(&m, 2);
        assert_eq!(m2.as_monomial(), Some((1, 4)));
    }

    #[test]
    fn octic_example_reduction() {
        // (x-2)^8 - 2(x-2)^2 + 3 ≡ x^8 + 1 mod 2; its square is x^64
        let m = FpMap::new(vec![1, 0, 0, 0, 0, 0, 0, 0, 1], vec![1], 2);
        assert_eq!(m.as_monomial(), None);
        let m2 = m.compose(&m, 2);
        assert_eq!(m2.as_monomial(), Some((1, 64)));
    }
}
