//! The simple fibration over the polynomial base and its stationary
//! forward-derivative section.
//!
//! Objects are pairs (fiber over base); a morphism is a base map
//! `f : A -> B` together with a fiber map `f_fib : A x A' -> B'` whose
//! first block is the base point and whose last block is the fiber
//! coordinate. The stationary section sends `f` to its Jacobian action,
//! and [`cdc_axiom_suite`] decides the five first-order axioms by exact
//! identity.

use crate::gen::{gen_dim, gen_polymap_with, GenParams, Rng};
use crate::polymap::PolyMap;
use crate::report::{AxiomReport, LawTracker};
use crate::{Error, Result};

/// An object of the total category: `fiber` sitting over `base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimpleObj {
    pub base: usize,
    pub fiber: usize,
}

impl SimpleObj {
    pub fn new(fiber: usize, base: usize) -> Self {
        SimpleObj { base, fiber }
    }

    /// Pointwise product of objects.
    pub fn product(self, other: SimpleObj) -> SimpleObj {
        SimpleObj {
            base: self.base + other.base,
            fiber: self.fiber + other.fiber,
        }
    }
}

/// Morphism of the simple fibration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleMor {
    src: SimpleObj,
    dst: SimpleObj,
    base: PolyMap,
    fib: PolyMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Cartesian,
    Vertical,
    Neither,
    Both,
}

impl SimpleMor {
    pub fn new(src: SimpleObj, dst: SimpleObj, base: PolyMap, fib: PolyMap) -> Result<Self> {
        if base.dom() != src.base || base.cod() != dst.base {
            return Err(Error::Object(format!(
                "base map {} -> {} between objects over {} and {}",
                base.dom(),
                base.cod(),
                src.base,
                dst.base
            )));
        }
        if fib.dom() != src.base + src.fiber || fib.cod() != dst.fiber {
            return Err(Error::Object(format!(
                "fiber map {} -> {} for objects ({} over {}) and ({} over {})",
                fib.dom(),
                fib.cod(),
                src.fiber,
                src.base,
                dst.fiber,
                dst.base
            )));
        }
        Ok(SimpleMor {
            src,
            dst,
            base,
            fib,
        })
    }

    pub fn src(&self) -> SimpleObj {
        self.src
    }

    pub fn dst(&self) -> SimpleObj {
        self.dst
    }

    pub fn base(&self) -> &PolyMap {
        &self.base
    }

    pub fn fib(&self) -> &PolyMap {
        &self.fib
    }

    pub fn identity(obj: SimpleObj) -> SimpleMor {
        SimpleMor {
            src: obj,
            dst: obj,
            base: PolyMap::identity(obj.base),
            fib: PolyMap::projection(&[obj.base, obj.fiber], 1),
        }
    }

    /// `self . f`: the fiber part is `self.fib(f.base(a), f.fib(a, v))`.
    pub fn compose(&self, f: &SimpleMor) -> Result<SimpleMor> {
        if f.dst != self.src {
            return Err(Error::Object(format!(
                "composing through mismatched objects {:?} and {:?}",
                f.dst, self.src
            )));
        }
        let base = self.base.compose(&f.base)?;
        let pi_base = PolyMap::projection(&[f.src.base, f.src.fiber], 0);
        let transported = f.base.compose(&pi_base)?.pair(&f.fib)?;
        let fib = self.fib.compose(&transported)?;
        SimpleMor::new(f.src, self.dst, base, fib)
    }

    /// Hom-monoid sum of parallel morphisms (componentwise on both maps).
    pub fn add(&self, other: &SimpleMor) -> Result<SimpleMor> {
        if self.src != other.src || self.dst != other.dst {
            return Err(Error::Object("adding non-parallel morphisms".into()));
        }
        SimpleMor::new(
            self.src,
            self.dst,
            self.base.add(&other.base)?,
            self.fib.add(&other.fib)?,
        )
    }

    pub fn zero(src: SimpleObj, dst: SimpleObj) -> SimpleMor {
        SimpleMor {
            src,
            dst,
            base: PolyMap::zero(src.base, dst.base),
            fib: PolyMap::zero(src.base + src.fiber, dst.fiber),
        }
    }

    pub fn is_vertical(&self) -> bool {
        self.src.base == self.dst.base && self.base == PolyMap::identity(self.src.base)
    }

    pub fn is_cartesian(&self) -> bool {
        self.src.fiber == self.dst.fiber
            && self.fib == PolyMap::projection(&[self.src.base, self.src.fiber], 1)
    }

    pub fn classify(&self) -> Classification {
        match (self.is_cartesian(), self.is_vertical()) {
            (true, true) => Classification::Both,
            (true, false) => Classification::Cartesian,
            (false, true) => Classification::Vertical,
            (false, false) => Classification::Neither,
        }
    }

    /// Unique vertical-then-cartesian factorization.
    pub fn vertical_cartesian_factor(&self) -> (SimpleMor, SimpleMor) {
        let mid = SimpleObj::new(self.dst.fiber, self.src.base);
        let vertical = SimpleMor {
            src: self.src,
            dst: mid,
            base: PolyMap::identity(self.src.base),
            fib: self.fib.clone(),
        };
        let cartesian = SimpleMor {
            src: mid,
            dst: self.dst,
            base: self.base.clone(),
            fib: PolyMap::projection(&[mid.base, mid.fiber], 1),
        };
        (vertical, cartesian)
    }

    /// Product of morphisms, pointwise on bases and fibers.
    pub fn product_mor(&self, other: &SimpleMor) -> SimpleMor {
        let src = self.src.product(other.src);
        let dst = self.dst.product(other.dst);
        let dims = [
            self.src.base,
            other.src.base,
            self.src.fiber,
            other.src.fiber,
        ];
        let left = PolyMap::block_permutation(&dims, &[0, 2]);
        let right = PolyMap::block_permutation(&dims, &[1, 3]);
        let fib = self
            .fib
            .compose(&left)
            .expect("block selection matches fiber domain")
            .pair(&other.fib.compose(&right).expect("block selection matches fiber domain"))
            .expect("shared product domain");
        SimpleMor {
            src,
            dst,
            base: self.base.product(&other.base),
            fib,
        }
    }

    /// Pairing of morphisms out of a shared source.
    pub fn pair(&self, other: &SimpleMor) -> Result<SimpleMor> {
        if self.src != other.src {
            return Err(Error::Object("pairing morphisms with different sources".into()));
        }
        SimpleMor::new(
            self.src,
            self.dst.product(other.dst),
            self.base.pair(&other.base)?,
            self.fib.pair(&other.fib)?,
        )
    }
}

/// Projection of the pointwise product onto factor `idx`.
pub fn simple_projection(x: SimpleObj, y: SimpleObj, idx: usize) -> SimpleMor {
    assert!(idx < 2);
    let prod = x.product(y);
    let base = PolyMap::projection(&[x.base, y.base], idx);
    let fib_dims = [x.base, y.base, x.fiber, y.fiber];
    let fib = PolyMap::projection(&fib_dims, 2 + idx);
    let dst = if idx == 0 { x } else { y };
    SimpleMor::new(prod, dst, base, fib).expect("projection shapes line up")
}

/// Fibred product: objects over a shared base multiply on fibers only.
pub fn fibred_product(x: SimpleObj, y: SimpleObj) -> Result<SimpleObj> {
    if x.base != y.base {
        return Err(Error::Object(format!(
            "fibred product over different bases {} and {}",
            x.base, y.base
        )));
    }
    Ok(SimpleObj::new(x.fiber + y.fiber, x.base))
}

/// Reindexing of `obj` along `f`, with its cartesian lift.
pub fn reindex(f: &PolyMap, obj: SimpleObj) -> Result<(SimpleObj, SimpleMor)> {
    if f.cod() != obj.base {
        return Err(Error::Dimension(format!(
            "reindexing an object over {} along a map into {}",
            obj.base,
            f.cod()
        )));
    }
    let pulled = SimpleObj::new(obj.fiber, f.dom());
    let lift = SimpleMor::new(
        pulled,
        obj,
        f.clone(),
        PolyMap::projection(&[pulled.base, pulled.fiber], 1),
    )?;
    Ok((pulled, lift))
}

/// Universal property of a cartesian morphism: factor `g` through `cart`
/// over the base factorization `h`. The fiber component of the answer is
/// forced coordinate-by-coordinate, which is what makes the
/// factorization unique.
pub fn factor_through_cartesian(
    cart: &SimpleMor,
    g: &SimpleMor,
    h: &PolyMap,
) -> Result<SimpleMor> {
    if !cart.is_cartesian() {
        return Err(Error::Object("factoring through a non-cartesian morphism".into()));
    }
    if g.dst() != cart.dst() {
        return Err(Error::Object("factoring a morphism with a different target".into()));
    }
    if cart.base().compose(h)? != *g.base() {
        return Err(Error::Object("base factorization does not commute".into()));
    }
    SimpleMor::new(g.src(), cart.src(), h.clone(), g.fib().clone())
}

/// True iff the fiber map is additive in its fiber block, decided by
/// expanding the identities on generic elements.
pub fn is_cla_morphism(m: &SimpleMor) -> bool {
    fib_additive_in_last_block(m.fib(), m.src.base, m.src.fiber)
}

/// Expands the additivity identities of `fib` in its trailing block and
/// returns the first failing pair of sides, if any.
pub fn fib_additivity_witness(
    fib: &PolyMap,
    base: usize,
    block: usize,
) -> Option<(PolyMap, PolyMap)> {
    let dims = [base, block, block];
    let a = PolyMap::projection(&dims, 0);
    let h = PolyMap::projection(&dims, 1);
    let k = PolyMap::projection(&dims, 2);
    let sum_arg = a.pair(&h.add(&k).expect("same shape")).expect("same dom");
    let lhs = fib.compose(&sum_arg).expect("composable");
    let rhs = fib
        .compose(&a.pair(&h).expect("same dom"))
        .expect("composable")
        .add(&fib.compose(&a.pair(&k).expect("same dom")).expect("composable"))
        .expect("same shape");
    if lhs != rhs {
        return Some((lhs, rhs));
    }
    let zero_arg = PolyMap::identity(base)
        .pair(&PolyMap::zero(base, block))
        .expect("same dom");
    let at_zero = fib.compose(&zero_arg).expect("composable");
    if !at_zero.is_zero_map() {
        return Some((at_zero.clone(), PolyMap::zero(base, at_zero.cod())));
    }
    None
}

/// The same predicate by term shape: every term of the fiber map has
/// degree exactly one in the fiber block.
pub fn is_cla_morphism_by_degree(m: &SimpleMor) -> bool {
    m.fib()
        .components()
        .iter()
        .all(|p| p.is_zero() || p.is_linear_in(m.src.base, m.src.base + m.src.fiber))
}

/// Additivity of `fib : base x block -> cod` in its trailing block,
/// expanded on generic elements of `base x block x block`.
pub(crate) fn fib_additive_in_last_block(fib: &PolyMap, base: usize, block: usize) -> bool {
    fib_additivity_witness(fib, base, block).is_none()
}

/// Jacobian action of `f`: the fiber part of the forward section.
/// `delta(f)(a, v) = sum_j d f/d x_j (a) * v_j` on the doubled domain.
pub fn delta(f: &PolyMap) -> PolyMap {
    let a = f.dom();
    let doubled = 2 * a;
    let components = f
        .components()
        .iter()
        .map(|p| {
            let mut acc = crate::poly::Poly::zero(doubled);
            for j in 0..a {
                let dj = p.partial(j).expect("index within arity").embed(doubled, 0);
                acc = acc.add(&dj.mul(&crate::poly::Poly::var(doubled, a + j)));
            }
            acc
        })
        .collect();
    PolyMap::new(doubled, f.cod(), components).expect("assembled arities are consistent")
}

/// The stationary forward-derivative section: `f` over itself, with the
/// Jacobian action as fiber part.
pub fn forward_section_d(f: &PolyMap) -> SimpleMor {
    let src = SimpleObj::new(f.dom(), f.dom());
    let dst = SimpleObj::new(f.cod(), f.cod());
    SimpleMor::new(src, dst, f.clone(), delta(f)).expect("stationary shapes line up")
}

/// Deliberately wrong derivative used by the mutation-sensitivity tests:
/// the Jacobian is evaluated at the tangent coordinate instead of the
/// base point, so composites lose the base-point transport and the chain
/// rule breaks on nonlinear maps.
pub fn delta_corrupt_no_chain(f: &PolyMap) -> PolyMap {
    let a = f.dom();
    let doubled = 2 * a;
    let components = f
        .components()
        .iter()
        .map(|p| {
            let mut acc = crate::poly::Poly::zero(doubled);
            for j in 0..a {
                let dj = p.partial(j).expect("index within arity").embed(doubled, a);
                acc = acc.add(&dj.mul(&crate::poly::Poly::var(doubled, a + j)));
            }
            acc
        })
        .collect();
    PolyMap::new(doubled, f.cod(), components).expect("assembled arities are consistent")
}

const SUITE_TAG: u64 = 0x0cdc;

/// Runs CDC.1-5 for the given derivative operator over seeded samples.
pub fn cdc_axiom_suite_with(
    suite_name: &str,
    derivative: &dyn Fn(&PolyMap) -> PolyMap,
    params: &GenParams,
    trials: u64,
) -> AxiomReport {
    let mut cdc1 = LawTracker::new("CDC.1", "derivative preserves sums and zero maps");
    let mut cdc2 = LawTracker::new("CDC.2", "derivative additive in the tangent argument");
    let mut cdc3 = LawTracker::new("CDC.3", "derivative of identities and projections");
    let mut cdc4 = LawTracker::new("CDC.4", "derivative preserves pairings");
    let mut cdc5 = LawTracker::new("CDC.5", "chain rule");

    for trial in 0..trials {
        let mut rng = Rng::for_trial(params.seed, SUITE_TAG, trial);
        let a = gen_dim(&mut rng, params);
        let b = gen_dim(&mut rng, params);
        let c = gen_dim(&mut rng, params);
        let f = gen_polymap_with(&mut rng, params, a, b);
        let f2 = gen_polymap_with(&mut rng, params, a, b);
        let g = gen_polymap_with(&mut rng, params, a, c);
        let h = gen_polymap_with(&mut rng, params, b, c);

        // CDC.1: d(f + f2) = d f + d f2 and d 0 = 0.
        {
            let sum_lhs = derivative(&f.add(&f2).expect("parallel"));
            let sum_rhs = derivative(&f).add(&derivative(&f2)).expect("parallel");
            let inputs = vec![f.to_string(), f2.to_string()];
            if sum_lhs != sum_rhs {
                cdc1.check_eq(&inputs, &sum_lhs, &sum_rhs);
            } else {
                let zero_lhs = derivative(&PolyMap::zero(a, b));
                cdc1.check_eq(&inputs, &zero_lhs, &PolyMap::zero(2 * a, b));
            }
        }

        // CDC.2: d f additive in its tangent block.
        {
            let df = derivative(&f);
            match fib_additivity_witness(&df, a, a) {
                None => cdc2.observe(None),
                Some((lhs, rhs)) => cdc2.check_eq(&[f.to_string()], &lhs, &rhs),
            }
        }

        // CDC.3: d(id) = pi_1 and d(pi) = pi . pi_1.
        {
            let id = PolyMap::identity(a);
            let lhs = derivative(&id);
            let rhs = PolyMap::projection(&[a, a], 1);
            cdc3.check_eq(&[id.to_string()], &lhs, &rhs);

            let pi_a = PolyMap::projection(&[a, b], 0);
            let pi_b = PolyMap::projection(&[a, b], 1);
            let second_half = PolyMap::projection(&[a + b, a + b], 1);
            let lhs_a = derivative(&pi_a);
            let rhs_a = pi_a.compose(&second_half).expect("composable");
            cdc3.check_eq(&[pi_a.to_string()], &lhs_a, &rhs_a);
            let lhs_b = derivative(&pi_b);
            let rhs_b = pi_b.compose(&second_half).expect("composable");
            cdc3.check_eq(&[pi_b.to_string()], &lhs_b, &rhs_b);
        }

        // CDC.4: d<f, g> = <d f, d g>.
        {
            let paired = f.pair(&g).expect("same dom");
            let lhs = derivative(&paired);
            let rhs = derivative(&f).pair(&derivative(&g)).expect("same dom");
            cdc4.check_eq(&[f.to_string(), g.to_string()], &lhs, &rhs);
        }

        // CDC.5: d(h . f) = d h . <f . pi_0, d f>.
        {
            let composite = h.compose(&f).expect("composable");
            let lhs = derivative(&composite);
            let pi0 = PolyMap::projection(&[a, a], 0);
            let transported = f.compose(&pi0).expect("composable");
            let rhs = derivative(&h)
                .compose(&transported.pair(&derivative(&f)).expect("same dom"))
                .expect("composable");
            cdc5.check_eq(&[f.to_string(), h.to_string()], &lhs, &rhs);
        }
    }

    let mut report = AxiomReport::new(suite_name);
    report.push(cdc1.finish());
    report.push(cdc2.finish());
    report.push(cdc3.finish());
    report.push(cdc4.finish());
    report.push(cdc5.finish());
    report
}

/// CDC.1-5 for the honest forward derivative.
pub fn cdc_axiom_suite(params: &GenParams, trials: u64) -> AxiomReport {
    cdc_axiom_suite_with("cdc", &delta, params, trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_int, Poly};

    fn one_var(n: u32, coeff: i64) -> PolyMap {
        PolyMap::new(1, 1, vec![Poly::monomial(1, vec![n], rat_int(coeff)).unwrap()]).unwrap()
    }

    fn d_of(src: &str) -> SimpleMor {
        forward_section_d(&crate::expr::parse_map(src).unwrap())
    }

    #[test]
    fn identity_law_for_composition() {
        let m = d_of("[x0^2] : 1 -> 1");
        let id_src = SimpleMor::identity(m.src());
        let id_dst = SimpleMor::identity(m.dst());
        assert_eq!(m.compose(&id_src).unwrap(), m);
        assert_eq!(id_dst.compose(&m).unwrap(), m);
    }

    #[test]
    fn composite_fiber_follows_the_substitution_formula() {
        // D(x^2) then D(x^3): fiber of the composite is 6 x^5 v, which is
        // also what the dual-number oracle reports for x^6.
        let f = d_of("[x0^2] : 1 -> 1");
        let g = d_of("[x0^3] : 1 -> 1");
        let composite = g.compose(&f).unwrap();
        let expect_fib = PolyMap::new(
            2,
            1,
            vec![Poly::monomial(2, vec![5, 1], rat_int(6)).unwrap()],
        )
        .unwrap();
        assert_eq!(composite.fib(), &expect_fib);

        let x6 = one_var(6, 1);
        for n in [-3i64, 1, 2, 7, 11] {
            let p = [rat(n, 2)];
            let v = [rat_int(3)];
            let (_, oracle) = x6.eval_dual(&p, &v).unwrap();
            let via_fib = composite.fib().eval(&[p[0].clone(), v[0].clone()]).unwrap();
            assert_eq!(via_fib, oracle);
        }
    }

    #[test]
    fn composition_is_associative_on_samples() {
        // Three-deep composites grow fast in degree; smaller bounds keep
        // the expansion honest without degree-64 intermediates.
        let params = GenParams {
            max_degree: 3,
            max_dim: 3,
            ..GenParams::default()
        };
        for trial in 0..25 {
            let mut rng = Rng::for_trial(11, 3, trial);
            let a = gen_dim(&mut rng, &params);
            let b = gen_dim(&mut rng, &params);
            let c = gen_dim(&mut rng, &params);
            let d = gen_dim(&mut rng, &params);
            let f = forward_section_d(&gen_polymap_with(&mut rng, &params, a, b));
            let g = forward_section_d(&gen_polymap_with(&mut rng, &params, b, c));
            let h = forward_section_d(&gen_polymap_with(&mut rng, &params, c, d));
            let left = h.compose(&g).unwrap().compose(&f).unwrap();
            let right = h.compose(&g.compose(&f).unwrap()).unwrap();
            assert_eq!(left, right, "trial {trial}");
        }
    }

    #[test]
    fn classification_of_shapes() {
        // Fiber projection over an arbitrary base map: cartesian.
        let cart = SimpleMor::new(
            SimpleObj::new(2, 1),
            SimpleObj::new(2, 1),
            one_var(2, 1),
            PolyMap::projection(&[1, 2], 1),
        )
        .unwrap();
        assert_eq!(cart.classify(), Classification::Cartesian);

        // Identity base with a nontrivial fiber map: vertical.
        let vert = SimpleMor::new(
            SimpleObj::new(1, 1),
            SimpleObj::new(1, 1),
            PolyMap::identity(1),
            PolyMap::new(2, 1, vec![Poly::monomial(2, vec![1, 1], rat_int(2)).unwrap()]).unwrap(),
        )
        .unwrap();
        assert_eq!(vert.classify(), Classification::Vertical);

        // D(x^2) has a nonlinear base and a non-projection fiber: neither.
        assert_eq!(d_of("[x0^2] : 1 -> 1").classify(), Classification::Neither);

        assert_eq!(
            SimpleMor::identity(SimpleObj::new(3, 2)).classify(),
            Classification::Both
        );
    }

    #[test]
    fn factorization_recomposes_and_degenerates() {
        let m = d_of("[x0^2] : 1 -> 1");
        let (v, c) = m.vertical_cartesian_factor();
        assert_eq!(v.classify(), Classification::Vertical);
        assert!(c.is_cartesian());
        assert_eq!(c.compose(&v).unwrap(), m);

        // A cartesian morphism factors as (identity, itself).
        let cart = SimpleMor::new(
            SimpleObj::new(2, 1),
            SimpleObj::new(2, 1),
            one_var(2, 1),
            PolyMap::projection(&[1, 2], 1),
        )
        .unwrap();
        let (v, c) = cart.vertical_cartesian_factor();
        assert_eq!(v, SimpleMor::identity(cart.src()));
        assert_eq!(c, cart);

        // A vertical morphism factors as (itself, identity).
        let vert = SimpleMor::new(
            SimpleObj::new(1, 1),
            SimpleObj::new(1, 1),
            PolyMap::identity(1),
            PolyMap::new(2, 1, vec![Poly::monomial(2, vec![1, 1], rat_int(2)).unwrap()]).unwrap(),
        )
        .unwrap();
        let (v, c) = vert.vertical_cartesian_factor();
        assert_eq!(v, vert);
        assert_eq!(c, SimpleMor::identity(vert.dst()));
    }

    #[test]
    fn reindexing_and_the_universal_property() {
        // Along the identity: same object, identity lift.
        let obj = SimpleObj::new(3, 2);
        let (same, lift) = reindex(&PolyMap::identity(2), obj).unwrap();
        assert_eq!(same, obj);
        assert_eq!(lift, SimpleMor::identity(obj));

        // Reindexing keeps the fiber and is cartesian.
        let f = crate::expr::parse_map("[x0^2 + x1; x0] : 2 -> 2").unwrap();
        let (pulled, lift) = reindex(&f, obj).unwrap();
        assert_eq!(pulled, SimpleObj::new(3, 2));
        assert!(lift.is_cartesian());

        // Factoring a morphism through the lift reproduces its vertical
        // part, and the factorization composes back to the original.
        let params = GenParams::default();
        for trial in 0..25 {
            let mut rng = Rng::for_trial(5, 9, trial);
            let e = SimpleObj::new(2, 2);
            let g_fib = gen_polymap_with(&mut rng, &params, e.base + e.fiber, obj.fiber);
            let g = SimpleMor::new(e, obj, f.clone(), g_fib).unwrap();
            let phi = factor_through_cartesian(&lift, &g, &PolyMap::identity(2)).unwrap();
            assert_eq!(lift.compose(&phi).unwrap(), g);
            assert_eq!(phi.fib(), g.fib(), "fiber part is forced");
            let (vert, _) = g.vertical_cartesian_factor();
            assert_eq!(phi.fib(), vert.fib());
        }
    }

    #[test]
    fn products_are_pointwise_and_preserve_cartesian_lifts() {
        let x = SimpleObj::new(2, 1);
        let y = SimpleObj::new(1, 3);
        assert_eq!(x.product(y), SimpleObj::new(3, 4));
        assert_eq!(
            fibred_product(SimpleObj::new(2, 1), SimpleObj::new(3, 1)).unwrap(),
            SimpleObj::new(5, 1)
        );
        assert!(fibred_product(SimpleObj::new(2, 1), SimpleObj::new(3, 2)).is_err());

        // Projections compose with pairing to the identity.
        let p0 = simple_projection(x, y, 0);
        let p1 = simple_projection(x, y, 1);
        assert_eq!(p0.pair(&p1).unwrap(), SimpleMor::identity(x.product(y)));

        // Product of two cartesian lifts is cartesian.
        let f = crate::expr::parse_map("[x0^3] : 1 -> 1").unwrap();
        let g = crate::expr::parse_map("[x0 + x2; x1*x2] : 3 -> 2").unwrap();
        let (_, lift_f) = reindex(&f, SimpleObj::new(2, 1)).unwrap();
        let (_, lift_g) = reindex(&g, SimpleObj::new(1, 2)).unwrap();
        assert!(lift_f.product_mor(&lift_g).is_cartesian());

        // Composite of two cartesian morphisms is cartesian.
        let (mid, lift1) = reindex(&f, SimpleObj::new(2, 1)).unwrap();
        let (_, lift2) = reindex(&f, mid).unwrap();
        assert!(lift1.compose(&lift2).unwrap().is_cartesian());
    }

    #[test]
    fn cla_morphisms_by_expansion_and_by_shape() {
        // Fiber 2 x v: additive in v.
        let m = d_of("[x0^2] : 1 -> 1");
        assert!(is_cla_morphism(&m));
        assert!(is_cla_morphism_by_degree(&m));

        // Fiber v^2: not additive.
        let bad = SimpleMor::new(
            SimpleObj::new(1, 1),
            SimpleObj::new(1, 1),
            PolyMap::identity(1),
            PolyMap::new(2, 1, vec![Poly::monomial(2, vec![0, 2], rat_int(1)).unwrap()]).unwrap(),
        )
        .unwrap();
        assert!(!is_cla_morphism(&bad));
        assert!(!is_cla_morphism_by_degree(&bad));

        // Fiber projections are additive.
        assert!(is_cla_morphism(&SimpleMor::identity(SimpleObj::new(3, 2))));

        // The two routes agree on random morphisms.
        let params = GenParams::default();
        for trial in 0..60 {
            let mut rng = Rng::for_trial(23, 1, trial);
            let a = gen_dim(&mut rng, &params);
            let a_fib = gen_dim(&mut rng, &params);
            let b_fib = gen_dim(&mut rng, &params);
            let fib = gen_polymap_with(&mut rng, &params, a + a_fib, b_fib);
            let m = SimpleMor::new(
                SimpleObj::new(a_fib, a),
                SimpleObj::new(b_fib, a),
                PolyMap::identity(a),
                fib,
            )
            .unwrap();
            assert_eq!(is_cla_morphism(&m), is_cla_morphism_by_degree(&m), "trial {trial}");
        }
    }

    #[test]
    fn forward_section_special_values() {
        // d(id) = pi_1.
        let d_id = forward_section_d(&PolyMap::identity(3));
        assert_eq!(d_id.fib(), &PolyMap::projection(&[3, 3], 1));

        // d(x^2) = 2 x v.
        let d_sq = d_of("[x0^2] : 1 -> 1");
        assert_eq!(
            d_sq.fib(),
            &PolyMap::new(2, 1, vec![Poly::monomial(2, vec![1, 1], rat_int(2)).unwrap()]).unwrap()
        );

        // d(x*y) = y v0 + x v1.
        let d_xy = d_of("[x0*x1] : 2 -> 1");
        let expect = PolyMap::new(
            4,
            1,
            vec![Poly::from_terms(
                4,
                [
                    (vec![0, 1, 1, 0], rat_int(1)),
                    (vec![1, 0, 0, 1], rat_int(1)),
                ],
            )
            .unwrap()],
        )
        .unwrap();
        assert_eq!(d_xy.fib(), &expect);
        assert!(is_cla_morphism(&d_xy));

        // Agreement with the dual-number oracle at sample points.
        let f = crate::expr::parse_map("[x0^3*x1 - 2*x1^2; x0] : 2 -> 2").unwrap();
        let df = delta(&f);
        for n in [-2i64, 0, 1, 3, 5] {
            let p = vec![rat(n, 3), rat_int(n + 1)];
            let v = vec![rat_int(2), rat(1, 5)];
            let (_, oracle) = f.eval_dual(&p, &v).unwrap();
            let mut args = p.clone();
            args.extend(v.clone());
            assert_eq!(df.eval(&args).unwrap(), oracle);
        }
    }

    #[test]
    fn functoriality_and_product_preservation_of_d() {
        let params = GenParams::default();
        for trial in 0..60 {
            let mut rng = Rng::for_trial(37, 2, trial);
            let a = gen_dim(&mut rng, &params);
            let b = gen_dim(&mut rng, &params);
            let c = gen_dim(&mut rng, &params);
            let f = gen_polymap_with(&mut rng, &params, a, b);
            let g = gen_polymap_with(&mut rng, &params, b, c);
            let gf = g.compose(&f).unwrap();
            // D(g . f) = D g . D f
            assert_eq!(
                forward_section_d(&gf),
                forward_section_d(&g).compose(&forward_section_d(&f)).unwrap()
            );
            // D <f, h> = <D f, D h> and D(pi) are the product projections.
            let h = gen_polymap_with(&mut rng, &params, a, c);
            assert_eq!(
                forward_section_d(&f.pair(&h).unwrap()),
                forward_section_d(&f).pair(&forward_section_d(&h)).unwrap()
            );
            let x = SimpleObj::new(a, a);
            let y = SimpleObj::new(b, b);
            assert_eq!(
                forward_section_d(&PolyMap::projection(&[a, b], 0)),
                simple_projection(x, y, 0)
            );
            // CLA functor: D(f + f') = D f + D f', D 0 = 0.
            let f2 = gen_polymap_with(&mut rng, &params, a, b);
            assert_eq!(
                forward_section_d(&f.add(&f2).unwrap()),
                forward_section_d(&f).add(&forward_section_d(&f2)).unwrap()
            );
            assert_eq!(
                forward_section_d(&PolyMap::zero(a, b)),
                SimpleMor::zero(SimpleObj::new(a, a), SimpleObj::new(b, b))
            );
        }
    }

    #[test]
    fn cdc_suite_passes_and_chain_rule_example() {
        let report = cdc_axiom_suite(&GenParams::default(), 50);
        assert!(report.all_passed(), "{}", report.render_text());

        // d(x^3 . x^2): both routes give 6 x^5 v.
        let f = one_var(2, 1);
        let h = one_var(3, 1);
        let lhs = delta(&h.compose(&f).unwrap());
        let pi0 = PolyMap::projection(&[1, 1], 0);
        let rhs = delta(&h)
            .compose(&f.compose(&pi0).unwrap().pair(&delta(&f)).unwrap())
            .unwrap();
        let expect = PolyMap::new(
            2,
            1,
            vec![Poly::monomial(2, vec![5, 1], rat_int(6)).unwrap()],
        )
        .unwrap();
        assert_eq!(lhs, expect);
        assert_eq!(rhs, expect);
    }

    #[test]
    fn corrupted_derivative_fails_the_chain_rule() {
        let report =
            cdc_axiom_suite_with("cdc[corrupt]", &delta_corrupt_no_chain, &GenParams::default(), 50);
        let cdc5 = report.laws.iter().find(|l| l.law == "CDC.5").unwrap();
        assert!(!cdc5.passed, "corrupted derivative must fail CDC.5");
        assert!(cdc5.counterexample.is_some());
    }
}
