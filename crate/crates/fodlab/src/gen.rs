//! Seeded, replayable generation of random morphisms.
//!
//! Everything here is a pure function of `(GenParams, trial index)`:
//! each trial derives its own stream from the seed, so suites reproduce
//! byte-for-byte across runs and machines, and trials are independent of
//! whichever order they are executed in.

use crate::poly::{rat_int, Poly, Rational};
use crate::polymap::PolyMap;

pub const DEFAULT_SEED: u64 = 0x00f0_d1ab;
pub const DEFAULT_TRIALS: u64 = 200;

/// Bounds for the morphism generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub max_dim: usize,
    pub max_degree: u32,
    pub max_terms: usize,
    /// Bound on numerators and denominators of coefficients.
    pub coeff_bound: i64,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_dim: 4,
            max_degree: 4,
            max_terms: 6,
            coeff_bound: 9,
            seed: DEFAULT_SEED,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Small deterministic stream generator (splitmix64 walk).
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    /// One independent stream per (seed, suite tag, trial).
    pub fn for_trial(seed: u64, tag: u64, trial: u64) -> Rng {
        let state = splitmix(seed ^ splitmix(tag) ^ splitmix(trial.wrapping_mul(0x2545_f491_4f6c_dd1d)));
        Rng { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        splitmix(self.state)
    }

    /// Uniform in `0..n` (n > 0).
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }

    /// Uniform in `lo..=hi`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// Nonzero numerator in `[-bound, bound]`, denominator in `[1, bound]`.
pub fn gen_coeff(rng: &mut Rng, bound: i64) -> Rational {
    let mut n = 0;
    while n == 0 {
        n = rng.range_i64(-bound, bound);
    }
    let d = rng.range_i64(1, bound);
    Rational::new(n.into(), d.into())
}

/// Random exponent vector with total degree at most `max_degree`.
fn gen_exps(rng: &mut Rng, arity: usize, max_degree: u32) -> Vec<u32> {
    let mut exps = vec![0u32; arity];
    if arity == 0 {
        return exps;
    }
    let degree = rng.below(max_degree as u64 + 1) as u32;
    for _ in 0..degree {
        let i = rng.below(arity as u64) as usize;
        exps[i] += 1;
    }
    exps
}

fn gen_poly(rng: &mut Rng, params: &GenParams, arity: usize) -> Poly {
    let n_terms = rng.below(params.max_terms as u64) + 1;
    let mut p = Poly::zero(arity);
    for _ in 0..n_terms {
        let exps = gen_exps(rng, arity, params.max_degree);
        let coeff = gen_coeff(rng, params.coeff_bound);
        p = p
            .add(&Poly::from_terms(arity, [(exps, coeff)]).expect("generated arity is consistent"));
    }
    p
}

/// Random morphism `dom -> cod` within the parameter bounds. Degenerate
/// shapes (zero maps, projections, constants) are produced with fixed
/// probability so edge cases stay exercised.
pub fn gen_polymap_with(rng: &mut Rng, params: &GenParams, dom: usize, cod: usize) -> PolyMap {
    // 1/8 zero, 1/8 constant, 1/8 projection (when it fits the bounds).
    let shape = rng.below(8);
    match shape {
        0 => PolyMap::zero(dom, cod),
        1 => {
            let values: Vec<Rational> = (0..cod)
                .map(|_| {
                    if rng.chance(1, 4) {
                        Rational::from_integer(0.into())
                    } else {
                        gen_coeff(rng, params.coeff_bound)
                    }
                })
                .collect();
            PolyMap::constant(dom, &values)
        }
        2 if cod <= dom && cod > 0 && params.max_degree >= 1 => {
            let offset = rng.below((dom - cod + 1) as u64) as usize;
            let blocks = [offset, cod, dom - cod - offset];
            PolyMap::projection(&blocks, 1)
        }
        _ => {
            let components = (0..cod).map(|_| gen_poly(rng, params, dom)).collect();
            PolyMap::new(dom, cod, components).expect("generated arity is consistent")
        }
    }
}

/// Spec-shaped entry point: pure in `(params, trial)`.
pub fn gen_polymap(params: &GenParams, trial: u64, dom: usize, cod: usize) -> PolyMap {
    let mut rng = Rng::for_trial(params.seed, 0x006d_6170, trial);
    gen_polymap_with(&mut rng, params, dom, cod)
}

/// Random dimension in `1..=max_dim`, occasionally 0 so the terminal
/// object stays in play.
pub fn gen_dim(rng: &mut Rng, params: &GenParams) -> usize {
    if params.max_dim == 0 || rng.chance(1, 16) {
        0
    } else {
        rng.below(params.max_dim as u64) as usize + 1
    }
}

/// Strictly positive dimension in `1..=max_dim`.
pub fn gen_dim_pos(rng: &mut Rng, params: &GenParams) -> usize {
    rng.below(params.max_dim.max(1) as u64) as usize + 1
}

/// Random rational vector with entries bounded by `bound` in numerator
/// and denominator.
pub fn gen_point(rng: &mut Rng, len: usize, bound: i64) -> Vec<Rational> {
    (0..len)
        .map(|_| {
            if rng.chance(1, 8) {
                rat_int(0)
            } else {
                gen_coeff(rng, bound)
            }
        })
        .collect()
}

/// Random map whose every component is homogeneous of degree 1 in the
/// variable block `lo..hi` (coefficients may involve the other
/// variables). Used to sample fibrewise-additive morphisms.
pub fn gen_map_linear_in(
    rng: &mut Rng,
    params: &GenParams,
    dom: usize,
    lo: usize,
    hi: usize,
    cod: usize,
) -> PolyMap {
    debug_assert!(lo <= hi && hi <= dom);
    let components = (0..cod)
        .map(|_| {
            let mut p = Poly::zero(dom);
            if hi == lo {
                return p;
            }
            let n_terms = rng.below(params.max_terms as u64) + 1;
            for _ in 0..n_terms {
                let mut exps = gen_exps(rng, dom, params.max_degree.saturating_sub(1));
                for e in &mut exps[lo..hi] {
                    *e = 0;
                }
                let v = lo + rng.below((hi - lo) as u64) as usize;
                exps[v] += 1;
                let coeff = gen_coeff(rng, params.coeff_bound);
                p = p.add(
                    &Poly::from_terms(dom, [(exps, coeff)]).expect("generated arity is consistent"),
                );
            }
            p
        })
        .collect();
    PolyMap::new(dom, cod, components).expect("generated arity is consistent")
}
