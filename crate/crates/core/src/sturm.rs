//! Sturm sequences over Z[t] with exact root counting on rational intervals.

use crate::poly::IntPoly;
use crate::rational::Rational;

#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<IntPoly>,
}

impl SturmChain {
    /// Builds the chain of the square-free part of `f`.
    pub fn new(f: &IntPoly) -> Self {
        let f = f.square_free_part();
        let mut chain = vec![f.clone()];
        if f.degree().unwrap_or(0) == 0 {
            return SturmChain { chain };
        }
        chain.push(f.derivative().primitive_part());
        loop {
            let n = chain.len();
            let r = chain[n - 2].positive_pseudo_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push((-&r).primitive_part());
        }
        SturmChain { chain }
    }

    /// The square-free polynomial the chain was built from.
    pub fn base(&self) -> &IntPoly {
        &self.chain[0]
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn sign_variations(&self, x: &Rational) -> usize {
        let mut last = 0;
        let mut count = 0;
        for p in &self.chain {
            let s = p.sign_at(x);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_half_open(&self, lo: &Rational, hi: &Rational) -> usize {
        if self.base().is_zero() {
            return 0;
        }
        self.sign_variations(lo)
            .saturating_sub(self.sign_variations(hi))
    }

    /// Distinct real roots in the open interval `(lo, hi)`.
    pub fn count_open(&self, lo: &Rational, hi: &Rational) -> usize {
        let n = self.count_half_open(lo, hi);
        if self.base().sign_at(hi) == 0 {
            n - 1
        } else {
            n
        }
    }

    /// Disjoint rational intervals `(l, r]`, each containing exactly one root
    /// of the base polynomial inside `(lo, hi)`, each no wider than `width`.
    pub fn isolate(&self, lo: &Rational, hi: &Rational, width: &Rational) -> Vec<(Rational, Rational)> {
        let mut out = Vec::new();
        let mut stack = vec![(lo.clone(), hi.clone())];
        let two = Rational::from_integer(2.into());
        while let Some((l, r)) = stack.pop() {
            let n = self.count_open(&l, &r) + usize::from(self.base().sign_at(&r) == 0 && &r < hi);
            match n {
                0 => {}
                1 if &(&r - &l) <= width => out.push((l, r)),
                _ => {
                    let m = (&l + &r) / &two;
                    stack.push((m.clone(), r));
                    stack.push((l, m));
                }
            }
        }
        out.sort();
        out
    }
}
