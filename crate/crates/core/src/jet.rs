//! Truncated Taylor arithmetic up to fourth order.
//!
//! A [`Jet`] stores the normalized Taylor coefficients `f^(k)(t0) / k!` of a
//! function at a point. Propagating jets through `+`, `*`, `exp`, `sin`, ...
//! yields derivatives that agree with hand-written closed forms to rounding.

use std::ops::{Add, Mul, Neg, Sub};

pub(crate) const ORDER: usize = 4;
const LEN: usize = ORDER + 1;
const FACTORIAL: [f64; LEN] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Jet {
    c: [f64; LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { c }
    }

    /// The identity function seeded at `t`.
    pub fn variable(t: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = t;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Derivatives `[f, f', f'', f''', f'''']`.
    pub fn derivatives(&self) -> [f64; LEN] {
        let mut d = [0.0; LEN];
        for k in 0..LEN {
            d[k] = self.c[k] * FACTORIAL[k];
        }
        d
    }

    pub fn scale(self, s: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|x| *x *= s);
        Jet { c }
    }

    pub fn recip(self) -> Self {
        let a = &self.c;
        let mut b = [0.0; LEN];
        b[0] = 1.0 / a[0];
        for k in 1..LEN {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s * b[0];
        }
        Jet { c: b }
    }

    pub fn exp(self) -> Self {
        let a = &self.c;
        let mut e = [0.0; LEN];
        e[0] = a[0].exp();
        for k in 1..LEN {
            let s: f64 = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Jet { c: e }
    }

    pub fn sin_cos(self) -> (Self, Self) {
        let a = &self.c;
        let mut s = [0.0; LEN];
        let mut c = [0.0; LEN];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..LEN {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 1..=k {
                let w = j as f64 * a[j];
                ds += w * c[k - j];
                dc -= w * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = dc / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn powi(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = Jet::constant(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.c;
        for (x, y) in c.iter_mut().zip(o.c) {
            *x += y;
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; LEN];
        for k in 0..LEN {
            c[k] = (0..=k).map(|j| self.c[j] * o.c[k - j]).sum();
        }
        Jet { c }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, v: f64) -> Jet {
        self.c[0] += v;
        self
    }
}
