//! Exact multivariate polynomials over arbitrary-precision rationals.
//!
//! A [`Poly`] is kept in canonical form at all times: terms are stored in
//! graded-lexicographic monomial order, duplicate monomials are merged,
//! and zero coefficients are dropped. Equality of values is therefore
//! equality of polynomials, which is what makes every axiom check in this
//! crate a decision procedure.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::{Error, Result};

/// Exact rational coefficient: reduced fraction with positive denominator.
pub type Rational = num_rational::BigRational;

/// `n/d` as a [`Rational`]. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Integer `n` as a [`Rational`].
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Exponent vector of a single term, one entry per variable.
///
/// Ordered graded-lexicographically: first by total degree, ties broken
/// lexicographically on the exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn constant(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn var(arity: usize, idx: usize) -> Self {
        debug_assert!(idx < arity);
        let mut exps = vec![0; arity];
        exps[idx] = 1;
        Monomial(exps)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Total degree restricted to the variables `lo..hi`.
    pub fn degree_in(&self, lo: usize, hi: usize) -> u32 {
        self.0[lo..hi].iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    arity: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(arity: usize) -> Self {
        Poly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = Poly::zero(arity);
        if !c.is_zero() {
            p.terms.insert(Monomial::constant(arity), c);
        }
        p
    }

    pub fn one(arity: usize) -> Self {
        Poly::constant(arity, Rational::one())
    }

    /// The variable `x{idx}` as a polynomial in `arity` variables.
    pub fn var(arity: usize, idx: usize) -> Self {
        assert!(idx < arity, "variable index {idx} out of arity {arity}");
        let mut p = Poly::zero(arity);
        p.terms.insert(Monomial::var(arity, idx), Rational::one());
        p
    }

    /// Canonicalise a raw term list: merge duplicate monomials, drop zero
    /// coefficients. Fails if any exponent vector has the wrong length.
    pub fn from_terms<I>(arity: usize, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Poly::zero(arity);
        for (exps, coeff) in raw {
            if exps.len() != arity {
                return Err(Error::Arity(format!(
                    "exponent vector of length {} in a polynomial of arity {arity}",
                    exps.len()
                )));
            }
            p.add_term(Monomial(exps), coeff);
        }
        Ok(p)
    }

    /// Single-term constructor used by tests and generators.
    pub fn monomial(arity: usize, exps: Vec<u32>, coeff: Rational) -> Result<Self> {
        Poly::from_terms(arity, [(exps, coeff)])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Largest total degree of any term; zero polynomial reports 0.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// True iff every term has total degree exactly 1 in the variable
    /// block `lo..hi` (arbitrary degree outside it). This is the shape
    /// criterion for additivity in that block.
    pub fn is_linear_in(&self, lo: usize, hi: usize) -> bool {
        self.terms.keys().all(|m| m.degree_in(lo, hi) == 1)
    }

    /// True iff every term has total degree exactly 1; the shape
    /// criterion for additive maps of the base category.
    pub fn is_homogeneous_linear(&self) -> bool {
        self.is_linear_in(0, self.arity)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.arity, other.arity);
        let mut out = Poly::zero(self.arity);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero(self.arity);
        }
        Poly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * k))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one(self.arity);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Substitute `args[i]` for variable `i`. All arguments must share the
    /// arity `out_arity`, which is also the arity of the result.
    pub fn substitute(&self, args: &[Poly], out_arity: usize) -> Poly {
        assert_eq!(args.len(), self.arity, "substitution argument count");
        debug_assert!(args.iter().all(|a| a.arity == out_arity));
        let mut out = Poly::zero(out_arity);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(out_arity, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&args[i].pow(e));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Reinterpret in a wider variable context, placing variable `i` at
    /// `offset + i`.
    pub fn embed(&self, new_arity: usize, offset: usize) -> Poly {
        assert!(offset + self.arity <= new_arity);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = vec![0u32; new_arity];
                exps[offset..offset + self.arity].copy_from_slice(&m.0);
                (Monomial(exps), c.clone())
            })
            .collect();
        Poly {
            arity: new_arity,
            terms,
        }
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Result<Poly> {
        if var >= self.arity {
            return Err(Error::Arity(format!(
                "partial with respect to x{var} of a polynomial of arity {}",
                self.arity
            )));
        }
        let mut out = Poly::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e > 0 {
                let mut exps = m.0.clone();
                exps[var] -= 1;
                out.add_term(Monomial(exps), c * rat_int(e as i64));
            }
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.arity {
            return Err(Error::Arity(format!(
                "evaluation point of length {} for arity {}",
                point.len(),
                self.arity
            )));
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Evaluate over the ring of dual numbers at `point + eps*direction`,
    /// returning the value and the eps coefficient. The second component
    /// is the directional derivative, computed without any reference to
    /// formal partials: this is the independent differentiation oracle.
    pub fn eval_dual(&self, point: &[Rational], direction: &[Rational]) -> Result<(Rational, Rational)> {
        if point.len() != self.arity || direction.len() != self.arity {
            return Err(Error::Arity(format!(
                "dual evaluation inputs of lengths {}/{} for arity {}",
                point.len(),
                direction.len(),
                self.arity
            )));
        }
        let mut acc = Dual::zero();
        for (m, c) in &self.terms {
            let mut t = Dual::constant(c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                let x = Dual {
                    re: point[i].clone(),
                    du: direction[i].clone(),
                };
                for _ in 0..e {
                    t = t.mul(&x);
                }
            }
            acc = acc.add(&t);
        }
        Ok((acc.re, acc.du))
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.arity);
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = rational_to_f64(c);
            for (i, &e) in m.0.iter().enumerate() {
                t *= point[i].powi(e as i32);
            }
            acc += t;
        }
        acc
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // Good enough for the float oracle: coefficients stay small there.
    let nf: f64 = n.to_string().parse().unwrap_or(f64::NAN);
    let df: f64 = d.to_string().parse().unwrap_or(f64::NAN);
    nf / df
}

/// `a + b*eps` with `eps^2 = 0`.
#[derive(Debug, Clone)]
struct Dual {
    re: Rational,
    du: Rational,
}

impl Dual {
    fn zero() -> Self {
        Dual {
            re: Rational::zero(),
            du: Rational::zero(),
        }
    }

    fn constant(c: Rational) -> Self {
        Dual {
            re: c,
            du: Rational::zero(),
        }
    }

    fn add(&self, other: &Dual) -> Dual {
        Dual {
            re: &self.re + &other.re,
            du: &self.du + &other.du,
        }
    }

    fn mul(&self, other: &Dual) -> Dual {
        Dual {
            re: &self.re * &other.re,
            du: &self.re * &other.du + &self.du * &other.re,
        }
    }
}

impl fmt::Display for Poly {
    /// Renders in the expression grammar accepted by [`crate::expr`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // Highest-degree terms first for readability.
        for (m, c) in self.terms.iter().rev() {
            let mono = render_monomial(m);
            let body = match &mono {
                Some(vars) if c.is_one() => vars.clone(),
                Some(vars) if (-c).is_one() => format!("-{vars}"),
                Some(vars) => format!("{c}*{vars}"),
                None => format!("{c}"),
            };
            if first {
                write!(f, "{body}")?;
                first = false;
            } else if let Some(rest) = body.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

fn render_monomial(m: &Monomial) -> Option<String> {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("x{i}")),
            _ => parts.push(format!("x{i}^{e}")),
        }
    }
    if parts.is_empty() {
        None
    } else {
        Some(parts.join("*"))
    }
}
