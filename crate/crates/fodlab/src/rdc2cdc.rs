//! From reverse derivatives to forward derivatives through iterated
//! lenses.
//!
//! Taking lenses over the lens category gives objects that are pairs of
//! pairs; a projection functor [`phi`] lands back in the simple
//! fibration. Lifting the reverse section through the lens construction
//! and projecting yields a forward derivative, [`rdc_to_cdc`]; the same
//! composite collapses to the closed form
//! `pi_B . rho(rho(f)) . <pi_A, 0, pi_B>`, [`rdc_to_cdc_closed`]. Both
//! agree with the direct Jacobian section exactly, which is checked by
//! [`equivalence_suite`].

use crate::gen::{gen_dim, gen_polymap_with, GenParams, Rng};
use crate::lens::{is_cla_lens, lens_pair, lens_projection, reverse_section_r, rho, LensMor};
use crate::polymap::PolyMap;
use crate::report::{AxiomReport, LawTracker};
use crate::simple::{forward_section_d, SimpleMor, SimpleObj};
use crate::{Error, Result};

/// An object of the iterated lens category: a fiber object sitting over
/// a base object, both of them objects of the lens fibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lens2Obj {
    pub base: SimpleObj,
    pub fiber: SimpleObj,
}

impl Lens2Obj {
    pub fn new(fiber: SimpleObj, base: SimpleObj) -> Self {
        Lens2Obj { base, fiber }
    }

    pub fn product(self, other: Lens2Obj) -> Lens2Obj {
        Lens2Obj {
            base: self.base.product(other.base),
            fiber: self.fiber.product(other.fiber),
        }
    }
}

/// A morphism of lenses-over-lenses: an outer lens between the base
/// objects and an inner lens running backwards over it. Both fiber maps
/// must be additive in their cotangent block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lens2Mor {
    src: Lens2Obj,
    dst: Lens2Obj,
    outer: LensMor,
    inner: LensMor,
}

impl Lens2Mor {
    pub fn new(src: Lens2Obj, dst: Lens2Obj, outer: LensMor, inner: LensMor) -> Result<Self> {
        if outer.src() != src.base || outer.dst() != dst.base {
            return Err(Error::Arity(format!(
                "outer lens {:?} -> {:?} between {:?} and {:?}",
                outer.src(),
                outer.dst(),
                src.base,
                dst.base
            )));
        }
        let inner_src = src.base.product(dst.fiber);
        if inner.src() != inner_src || inner.dst() != src.fiber {
            return Err(Error::Arity(format!(
                "inner lens {:?} -> {:?}, expected {:?} -> {:?}",
                inner.src(),
                inner.dst(),
                inner_src,
                src.fiber
            )));
        }
        if !is_cla_lens(&outer) || !is_cla_lens(&inner) {
            return Err(Error::Invariant(
                "iterated lens components must be additive in their cotangent block".into(),
            ));
        }
        if !inner_is_additive_in_second_factor(&inner, src.base, dst.fiber) {
            return Err(Error::Invariant(
                "inner lens must be additive in its second product factor".into(),
            ));
        }
        Ok(Lens2Mor {
            src,
            dst,
            outer,
            inner,
        })
    }

    pub fn src(&self) -> Lens2Obj {
        self.src
    }

    pub fn dst(&self) -> Lens2Obj {
        self.dst
    }

    pub fn outer(&self) -> &LensMor {
        &self.outer
    }

    pub fn inner(&self) -> &LensMor {
        &self.inner
    }

    pub fn identity(obj: Lens2Obj) -> Lens2Mor {
        Lens2Mor {
            src: obj,
            dst: obj,
            outer: LensMor::identity(obj.base),
            inner: lens_projection(obj.base, obj.fiber, 1),
        }
    }

    /// `self . m`: lens composition with the lens category supplying the
    /// products, projections, and pairings one level up.
    pub fn compose(&self, m: &Lens2Mor) -> Result<Lens2Mor> {
        if m.dst != self.src {
            return Err(Error::Object("composing iterated lenses through mismatched objects".into()));
        }
        let outer = self.outer.compose(&m.outer)?;
        let p_base = lens_projection(m.src.base, self.dst.fiber, 0);
        let p_fib = lens_projection(m.src.base, self.dst.fiber, 1);
        let transported = lens_pair(&m.outer.compose(&p_base)?, &p_fib)?;
        let through = self.inner.compose(&transported)?;
        let inner = m.inner.compose(&lens_pair(&p_base, &through)?)?;
        Lens2Mor::new(m.src, self.dst, outer, inner)
    }

    /// Hom-monoid sum, componentwise on both lenses.
    pub fn add(&self, other: &Lens2Mor) -> Result<Lens2Mor> {
        if self.src != other.src || self.dst != other.dst {
            return Err(Error::Object("adding non-parallel iterated lenses".into()));
        }
        Lens2Mor::new(
            self.src,
            self.dst,
            self.outer.add(&other.outer)?,
            self.inner.add(&other.inner)?,
        )
    }
}

/// Additivity of an inner lens `u : P x Q -> R` in the `Q` factor, with
/// lens-level sums expanded on generic elements. Equivalently, in
/// components: the base map and the `P`-fiber block of the fiber map are
/// additive in the `Q`-base variables, while the `Q`-fiber block does
/// not mention them at all.
pub fn inner_is_additive_in_second_factor(u: &LensMor, p: SimpleObj, q: SimpleObj) -> bool {
    let lo = p.base;
    let hi = p.base + q.base;
    if !u.base().is_additive_in_block(lo, hi) {
        return false;
    }
    let alpha = PolyMap::projection(&[p.fiber, q.fiber], 0)
        .compose(u.fib())
        .expect("composable");
    let beta = PolyMap::projection(&[p.fiber, q.fiber], 1)
        .compose(u.fib())
        .expect("composable");
    alpha.is_additive_in_block(lo, hi) && beta.is_constant_in_block(lo, hi)
}

/// Projection of the iterated-lens product onto factor `idx`, assembled
/// from the lens-level projections, zero maps, and pairing.
pub fn lens2_projection(x: Lens2Obj, y: Lens2Obj, idx: usize) -> Lens2Mor {
    assert!(idx < 2);
    let prod = x.product(y);
    let dst = if idx == 0 { x } else { y };
    let outer = lens_projection(x.base, y.base, idx);
    let carrier = prod.base.product(dst.fiber);
    let own_fiber = lens_projection(prod.base, dst.fiber, 1);
    let inner = if idx == 0 {
        lens_pair(&own_fiber, &LensMor::zero(carrier, y.fiber)).expect("same source")
    } else {
        lens_pair(&LensMor::zero(carrier, x.fiber), &own_fiber).expect("same source")
    };
    Lens2Mor::new(prod, dst, outer, inner).expect("projection shapes line up")
}

/// The projection functor onto outer components: an iterated lens
/// becomes a simple-fibration morphism whose fiber part inserts a zero
/// cotangent, applies the inner lens fiber, and projects.
pub fn phi(m: &Lens2Mor) -> SimpleMor {
    let a = m.src.base.base;
    let b_fib = m.src.fiber.fiber;
    let d = m.dst.fiber.base;
    let d_fib = m.dst.fiber.fiber;
    let src = SimpleObj::new(b_fib, a);
    let dst = SimpleObj::new(d_fib, m.dst.base.base);

    let dims = [a, b_fib];
    let insert = PolyMap::projection(&dims, 0)
        .pair(&PolyMap::zero(a + b_fib, d))
        .expect("same dom")
        .pair(&PolyMap::projection(&dims, 1))
        .expect("same dom");
    let project = PolyMap::projection(&[m.src.base.fiber, d_fib], 1);
    let fib = project
        .compose(m.inner.fib())
        .expect("inner fiber lands in the paired fibers")
        .compose(&insert)
        .expect("zero insertion matches the inner domain");
    SimpleMor::new(src, dst, m.outer.base().clone(), fib).expect("projected shapes line up")
}

/// The block-product identification `(A,A) x (B,B) = (A x B, A x B)`
/// materialised as an explicit (here identity-shaped) permutation lens,
/// so the convention is visible and composable.
pub fn stationary_product_iso(a: usize, b: usize) -> LensMor {
    let prod = SimpleObj::new(a + b, a + b);
    let base = PolyMap::block_permutation(&[a, b], &[0, 1]);
    let fib = PolyMap::block_permutation(&[a, b, a, b], &[2, 3]);
    LensMor::new(prod, prod, base, fib).expect("permutation shapes line up")
}

/// Lifts a stationary additive lens through the reverse section: the
/// outer part is the reverse of the base data, the inner part is the
/// fiber data paired with its own reverse, transported across the
/// materialised product identification.
pub fn lift_r(l: &LensMor) -> Result<Lens2Mor> {
    let a = l.src().base;
    let b = l.dst().base;
    if l.src().fiber != a || l.dst().fiber != b {
        return Err(Error::Arity(format!(
            "lift needs a stationary lens, got {:?} -> {:?}",
            l.src(),
            l.dst()
        )));
    }
    let src = Lens2Obj::new(SimpleObj::new(a, a), SimpleObj::new(a, a));
    let dst = Lens2Obj::new(SimpleObj::new(b, b), SimpleObj::new(b, b));
    let outer = reverse_section_r(l.base());
    let inner_raw = reverse_section_r(l.fib());
    let inner = inner_raw.compose(&stationary_product_iso(a, b))?;
    Lens2Mor::new(src, dst, outer, inner)
}

/// The full pipeline: reverse the map, lift the result through the lens
/// construction, and project back to the simple fibration.
pub fn rdc_to_cdc(f: &PolyMap) -> SimpleMor {
    let lifted = lift_r(&reverse_section_r(f)).expect("reverse sections are stationary and additive");
    phi(&lifted)
}

/// Closed form of the same composite:
/// `pi_B . rho(rho(f)) . <pi_A, 0, pi_B>` on the doubled domain.
pub fn rdc_to_cdc_closed(f: &PolyMap) -> SimpleMor {
    let a = f.dom();
    let b = f.cod();
    let rf = rho(f);
    let rrf = rho(&rf);
    let dims = [a, a];
    let insert = PolyMap::projection(&dims, 0)
        .pair(&PolyMap::zero(2 * a, b))
        .expect("same dom")
        .pair(&PolyMap::projection(&dims, 1))
        .expect("same dom");
    let fib = PolyMap::projection(&[a, b], 1)
        .compose(&rrf)
        .expect("double reverse lands in the doubled domain")
        .compose(&insert)
        .expect("zero insertion matches");
    SimpleMor::new(
        SimpleObj::new(a, a),
        SimpleObj::new(b, b),
        f.clone(),
        fib,
    )
    .expect("stationary shapes line up")
}

const SUITE_TAG: u64 = 0x2cdc;

/// Checks that the pipeline, its closed form, and the direct Jacobian
/// section agree as canonical values on seeded samples.
pub fn equivalence_suite(params: &GenParams, trials: u64) -> AxiomReport {
    let mut pipeline_eq = LawTracker::new(
        "R2C.pipeline",
        "lifted reverse pipeline equals its closed form",
    );
    let mut forward_eq = LawTracker::new(
        "R2C.forward",
        "reverse-derived forward derivative equals the Jacobian section",
    );

    for trial in 0..trials {
        let mut rng = Rng::for_trial(params.seed, SUITE_TAG, trial);
        let a = gen_dim(&mut rng, params);
        let b = gen_dim(&mut rng, params);
        let f = gen_polymap_with(&mut rng, params, a, b);

        let via_pipeline = rdc_to_cdc(&f);
        let via_closed = rdc_to_cdc_closed(&f);
        let direct = forward_section_d(&f);

        pipeline_eq.check_eq(
            &[f.to_string()],
            via_pipeline.fib(),
            via_closed.fib(),
        );
        forward_eq.check_eq(&[f.to_string()], via_closed.fib(), direct.fib());
    }

    let mut report = AxiomReport::new("rdc2cdc");
    report.push(pipeline_eq.finish());
    report.push(forward_eq.finish());
    report
}
