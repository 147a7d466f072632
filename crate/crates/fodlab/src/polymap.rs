//! Morphisms of the base category: tuples of polynomials.
//!
//! An object is a dimension `n >= 0`; a morphism `m -> n` is a list of
//! `n` polynomials of arity `m`. Products of objects are sums of
//! dimensions with the left block first, dimension 0 is terminal, and
//! every hom-set carries the componentwise commutative monoid.

use std::fmt;

use num_traits::Zero;

use crate::poly::{rat_int, Poly, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    dom: usize,
    cod: usize,
    components: Vec<Poly>,
}

impl PolyMap {
    pub fn new(dom: usize, cod: usize, components: Vec<Poly>) -> Result<Self> {
        if components.len() != cod {
            return Err(Error::Dimension(format!(
                "{} components for codomain {cod}",
                components.len()
            )));
        }
        if let Some(p) = components.iter().find(|p| p.arity() != dom) {
            return Err(Error::Dimension(format!(
                "component of arity {} in a map with domain {dom}",
                p.arity()
            )));
        }
        Ok(PolyMap {
            dom,
            cod,
            components,
        })
    }

    pub fn dom(&self) -> usize {
        self.dom
    }

    pub fn cod(&self) -> usize {
        self.cod
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.components[i]
    }

    pub fn identity(n: usize) -> PolyMap {
        PolyMap {
            dom: n,
            cod: n,
            components: (0..n).map(|i| Poly::var(n, i)).collect(),
        }
    }

    pub fn zero(dom: usize, cod: usize) -> PolyMap {
        PolyMap {
            dom,
            cod,
            components: vec![Poly::zero(dom); cod],
        }
    }

    /// The unique map into the terminal object (dimension 0).
    pub fn terminal(dom: usize) -> PolyMap {
        PolyMap::zero(dom, 0)
    }

    pub fn is_zero_map(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    /// Projection onto block `idx` of a domain partitioned as `dims`.
    pub fn projection(dims: &[usize], idx: usize) -> PolyMap {
        assert!(idx < dims.len(), "projection block index out of range");
        let dom: usize = dims.iter().sum();
        let offset: usize = dims[..idx].iter().sum();
        let cod = dims[idx];
        PolyMap {
            dom,
            cod,
            components: (0..cod).map(|i| Poly::var(dom, offset + i)).collect(),
        }
    }

    /// Rearranges the blocks of a partitioned domain: output block `k` is
    /// source block `perm[k]`. With `perm` a permutation this is an
    /// isomorphism; the shuffles of the various comparison maps are all
    /// materialised through it so they can be composed and tested.
    pub fn block_permutation(dims: &[usize], perm: &[usize]) -> PolyMap {
        let dom: usize = dims.iter().sum();
        let offsets: Vec<usize> = dims
            .iter()
            .scan(0, |acc, d| {
                let o = *acc;
                *acc += d;
                Some(o)
            })
            .collect();
        let mut components = Vec::new();
        for &src in perm {
            assert!(src < dims.len(), "permutation index out of range");
            for i in 0..dims[src] {
                components.push(Poly::var(dom, offsets[src] + i));
            }
        }
        let cod = components.len();
        PolyMap {
            dom,
            cod,
            components,
        }
    }

    /// Pairing `<f, g>`: both maps must share the domain.
    pub fn pair(&self, other: &PolyMap) -> Result<PolyMap> {
        if self.dom != other.dom {
            return Err(Error::Dimension(format!(
                "pairing maps with domains {} and {}",
                self.dom, other.dom
            )));
        }
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Ok(PolyMap {
            dom: self.dom,
            cod: self.cod + other.cod,
            components,
        })
    }

    /// Product `f x g` on concatenated domains.
    pub fn product(&self, other: &PolyMap) -> PolyMap {
        let dom = self.dom + other.dom;
        let mut components: Vec<Poly> = self
            .components
            .iter()
            .map(|p| p.embed(dom, 0))
            .collect();
        components.extend(other.components.iter().map(|p| p.embed(dom, self.dom)));
        PolyMap {
            dom,
            cod: self.cod + other.cod,
            components,
        }
    }

    /// Classical composition `self . f` (apply `f` first).
    pub fn compose(&self, f: &PolyMap) -> Result<PolyMap> {
        if f.cod != self.dom {
            return Err(Error::Dimension(format!(
                "composing {} -> {} after {} -> {}",
                self.dom, self.cod, f.dom, f.cod
            )));
        }
        let components = self
            .components
            .iter()
            .map(|p| p.substitute(&f.components, f.dom))
            .collect();
        Ok(PolyMap {
            dom: f.dom,
            cod: self.cod,
            components,
        })
    }

    /// Hom-monoid sum: componentwise addition.
    pub fn add(&self, other: &PolyMap) -> Result<PolyMap> {
        if self.dom != other.dom || self.cod != other.cod {
            return Err(Error::Dimension(format!(
                "adding maps {} -> {} and {} -> {}",
                self.dom, self.cod, other.dom, other.cod
            )));
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(PolyMap {
            dom: self.dom,
            cod: self.cod,
            components,
        })
    }

    pub fn neg(&self) -> PolyMap {
        PolyMap {
            dom: self.dom,
            cod: self.cod,
            components: self.components.iter().map(Poly::neg).collect(),
        }
    }

    /// The map with constant value `values` (domain `dom`).
    pub fn constant(dom: usize, values: &[Rational]) -> PolyMap {
        PolyMap {
            dom,
            cod: values.len(),
            components: values
                .iter()
                .map(|v| Poly::constant(dom, v.clone()))
                .collect(),
        }
    }

    /// Linear map given by a matrix (rows index the codomain).
    pub fn linear_from_matrix(rows: &[Vec<Rational>]) -> PolyMap {
        let cod = rows.len();
        let dom = rows.first().map_or(0, Vec::len);
        let components = rows
            .iter()
            .map(|row| {
                assert_eq!(row.len(), dom, "ragged matrix");
                let mut p = Poly::zero(dom);
                for (j, c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        p = p.add(&Poly::var(dom, j).scale(c));
                    }
                }
                p
            })
            .collect();
        PolyMap {
            dom,
            cod,
            components,
        }
    }

    /// Matrix of formal partials; entry `[i][j]` is d(component i)/d(x j).
    pub fn jacobian(&self) -> Vec<Vec<Poly>> {
        self.components
            .iter()
            .map(|p| {
                (0..self.dom)
                    .map(|j| p.partial(j).expect("index within arity"))
                    .collect()
            })
            .collect()
    }

    /// Decides additivity by expanding the defining identities on generic
    /// elements: `f(x + y) = f(x) + f(y)` and `f(0) = 0` as exact
    /// polynomial identities.
    pub fn is_additive(&self) -> bool {
        let m = self.dom;
        let dims = [m, m];
        let x = PolyMap::projection(&dims, 0);
        let y = PolyMap::projection(&dims, 1);
        let sum = x.add(&y).expect("same shape");
        let lhs = self.compose(&sum).expect("composable");
        let rhs_parts = (
            self.compose(&x).expect("composable"),
            self.compose(&y).expect("composable"),
        );
        let rhs = rhs_parts.0.add(&rhs_parts.1).expect("same shape");
        let zero_preserved = self
            .compose(&PolyMap::zero(0, m))
            .expect("composable")
            .is_zero_map();
        lhs == rhs && zero_preserved
    }

    /// Additivity by term shape: every component homogeneous of degree 1.
    /// Kept as an independent route of the same predicate.
    pub fn is_additive_by_degree(&self) -> bool {
        self.components.iter().all(Poly::is_homogeneous_linear)
    }

    /// Additivity in the variable block `lo..hi` of the domain, decided
    /// by expanding `f(.., h + k, ..) = f(.., h, ..) + f(.., k, ..)` and
    /// `f(.., 0, ..) = 0` on generic elements with the block duplicated.
    pub fn is_additive_in_block(&self, lo: usize, hi: usize) -> bool {
        assert!(lo <= hi && hi <= self.dom);
        let (pre, blk, post) = (lo, hi - lo, self.dom - hi);
        let dims = [pre, blk, blk, post];
        let p_pre = PolyMap::projection(&dims, 0);
        let h = PolyMap::projection(&dims, 1);
        let k = PolyMap::projection(&dims, 2);
        let p_post = PolyMap::projection(&dims, 3);
        let with = |mid: &PolyMap| {
            self.compose(&p_pre.pair(mid).expect("same dom").pair(&p_post).expect("same dom"))
                .expect("composable")
        };
        let lhs = with(&h.add(&k).expect("same shape"));
        let rhs = with(&h).add(&with(&k)).expect("same shape");
        if lhs != rhs {
            return false;
        }
        let dims0 = [pre, post];
        let zero_arg = PolyMap::projection(&dims0, 0)
            .pair(&PolyMap::zero(pre + post, blk))
            .expect("same dom")
            .pair(&PolyMap::projection(&dims0, 1))
            .expect("same dom");
        self.compose(&zero_arg).expect("composable").is_zero_map()
    }

    /// True iff no component mentions the variables in `lo..hi`, decided
    /// by substituting zero for the block.
    pub fn is_constant_in_block(&self, lo: usize, hi: usize) -> bool {
        assert!(lo <= hi && hi <= self.dom);
        let (pre, blk, post) = (lo, hi - lo, self.dom - hi);
        let dims0 = [pre, post];
        let zero_arg = PolyMap::projection(&dims0, 0)
            .pair(&PolyMap::zero(pre + post, blk))
            .expect("same dom")
            .pair(&PolyMap::projection(&dims0, 1))
            .expect("same dom");
        let squashed = self.compose(&zero_arg).expect("composable");
        let reinstate = PolyMap::projection(&[pre, blk, post], 0)
            .pair(&PolyMap::projection(&[pre, blk, post], 2))
            .expect("same dom");
        squashed.compose(&reinstate).expect("composable") == *self
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Rational>> {
        self.components.iter().map(|p| p.eval(point)).collect()
    }

    /// Dual-number evaluation of the whole tuple; the second vector is
    /// the directional derivative of the map at `point` along `direction`.
    pub fn eval_dual(
        &self,
        point: &[Rational],
        direction: &[Rational],
    ) -> Result<(Vec<Rational>, Vec<Rational>)> {
        let mut values = Vec::with_capacity(self.cod);
        let mut derivs = Vec::with_capacity(self.cod);
        for p in &self.components {
            let (v, d) = p.eval_dual(point, direction)?;
            values.push(v);
            derivs.push(d);
        }
        Ok((values, derivs))
    }

    pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval_f64(point)).collect()
    }

    /// Largest total degree over all components.
    pub fn max_degree(&self) -> u32 {
        self.components
            .iter()
            .map(Poly::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Scalar multiple of every component.
    pub fn scale(&self, k: &Rational) -> PolyMap {
        PolyMap {
            dom: self.dom,
            cod: self.cod,
            components: self.components.iter().map(|p| p.scale(k)).collect(),
        }
    }
}

/// Left-variable identity checks need small numeric literals in a few
/// places; keep the helper close to the map type.
pub fn scalar(n: i64) -> Rational {
    rat_int(n)
}

impl fmt::Display for PolyMap {
    /// Map literal of the expression grammar: `[e0; e1; ...] : m -> n`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "] : {} -> {}", self.dom, self.cod)
    }
}
