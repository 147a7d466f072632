//! The additive simple fibration: fibrewise commutative monoids and the
//! generalised first-order axioms.
//!
//! Objects carry a commutative monoid in the fibre, with the base
//! coordinate threaded through both structure maps. Morphisms are simple
//! fibration morphisms whose fiber part is a monoid homomorphism in its
//! fiber argument. The default instance puts the coordinatewise monoid
//! on every object and reuses the forward-derivative section; a second
//! instance with a tangent carrier different from the object itself is
//! not constructible over this base, so none is shipped.

use crate::gen::{gen_dim, gen_polymap_with, GenParams, Rng};
use crate::polymap::PolyMap;
use crate::report::{AxiomReport, LawTracker};
use crate::simple::{delta, forward_section_d, SimpleMor};
use crate::{Error, Result};

/// A commutative monoid on `fiber` in the fibre over `base`.
///
/// `zero : base -> fiber` and `plus : base x fiber x fiber -> fiber`;
/// the laws hold with the base point threaded through.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoidInFibre {
    base: usize,
    fiber: usize,
    zero: PolyMap,
    plus: PolyMap,
}

impl MonoidInFibre {
    pub fn new(base: usize, fiber: usize, zero: PolyMap, plus: PolyMap) -> Result<Self> {
        if zero.dom() != base || zero.cod() != fiber {
            return Err(Error::Instance(format!(
                "monoid unit {} -> {} for a fibre of {} over {}",
                zero.dom(),
                zero.cod(),
                fiber,
                base
            )));
        }
        if plus.dom() != base + 2 * fiber || plus.cod() != fiber {
            return Err(Error::Instance(format!(
                "monoid sum {} -> {} for a fibre of {} over {}",
                plus.dom(),
                plus.cod(),
                fiber,
                base
            )));
        }
        let m = MonoidInFibre {
            base,
            fiber,
            zero,
            plus,
        };
        m.check_laws()?;
        Ok(m)
    }

    /// Coordinatewise addition with the zero section.
    pub fn standard(base: usize, fiber: usize) -> MonoidInFibre {
        let dims = [base, fiber, fiber];
        let plus = PolyMap::projection(&dims, 1)
            .add(&PolyMap::projection(&dims, 2))
            .expect("same shape");
        MonoidInFibre {
            base,
            fiber,
            zero: PolyMap::zero(base, fiber),
            plus,
        }
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn fiber(&self) -> usize {
        self.fiber
    }

    pub fn zero(&self) -> &PolyMap {
        &self.zero
    }

    pub fn plus(&self) -> &PolyMap {
        &self.plus
    }

    /// Unit, commutativity, and associativity with the base threaded.
    pub fn check_laws(&self) -> Result<()> {
        let b = self.base;
        let f = self.fiber;

        // Unit: plus(b, zero(b), v) = v on base x fiber.
        let dims = [b, f];
        let pi_b = PolyMap::projection(&dims, 0);
        let pi_v = PolyMap::projection(&dims, 1);
        let unit_arg = pi_b
            .pair(&self.zero.compose(&pi_b)?)?
            .pair(&pi_v)?;
        if self.plus.compose(&unit_arg)? != pi_v {
            return Err(Error::Instance("monoid unit law fails".into()));
        }

        // Commutativity: plus . swap = plus on base x fiber x fiber.
        let swap = PolyMap::block_permutation(&[b, f, f], &[0, 2, 1]);
        if self.plus.compose(&swap)? != self.plus {
            return Err(Error::Instance("monoid commutativity fails".into()));
        }

        // Associativity on base x fiber x fiber x fiber.
        let dims3 = [b, f, f, f];
        let pb = PolyMap::projection(&dims3, 0);
        let px = PolyMap::projection(&dims3, 1);
        let py = PolyMap::projection(&dims3, 2);
        let pz = PolyMap::projection(&dims3, 3);
        let xy = self.plus.compose(&pb.pair(&px)?.pair(&py)?)?;
        let yz = self.plus.compose(&pb.pair(&py)?.pair(&pz)?)?;
        let left = self.plus.compose(&pb.pair(&xy)?.pair(&pz)?)?;
        let right = self.plus.compose(&pb.pair(&px)?.pair(&yz)?)?;
        if left != right {
            return Err(Error::Instance("monoid associativity fails".into()));
        }
        Ok(())
    }
}

/// A simple-fibration morphism together with fibrewise monoids on its
/// endpoints; construction checks the homomorphism squares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SPlusMor {
    mor: SimpleMor,
    src_monoid: MonoidInFibre,
    dst_monoid: MonoidInFibre,
}

impl SPlusMor {
    pub fn new(
        mor: SimpleMor,
        src_monoid: MonoidInFibre,
        dst_monoid: MonoidInFibre,
    ) -> Result<Self> {
        if src_monoid.base != mor.src().base || src_monoid.fiber != mor.src().fiber {
            return Err(Error::Instance("source monoid does not match the source object".into()));
        }
        if dst_monoid.base != mor.dst().base || dst_monoid.fiber != mor.dst().fiber {
            return Err(Error::Instance("target monoid does not match the target object".into()));
        }
        if !splus_check(&mor, &src_monoid, &dst_monoid) {
            return Err(Error::Invariant(
                "fiber map does not preserve the fibrewise monoids".into(),
            ));
        }
        Ok(SPlusMor {
            mor,
            src_monoid,
            dst_monoid,
        })
    }

    pub fn mor(&self) -> &SimpleMor {
        &self.mor
    }
}

/// The two homomorphism squares for a fiber map `f' : A x A' -> B'`:
/// zero preservation `f' . <id, zero_A> = zero_B . f` and sum
/// preservation through the displayed triple
/// `<f . pi_0, f' . <pi_0, pi_1>, f' . <pi_0, pi_2>>`.
/// Returns the first failing pair of sides, if any.
pub fn splus_witness(
    m: &SimpleMor,
    src: &MonoidInFibre,
    dst: &MonoidInFibre,
) -> Option<(PolyMap, PolyMap)> {
    let a = m.src().base;
    let a_fib = m.src().fiber;

    // Zero square.
    let zero_arg = PolyMap::identity(a).pair(src.zero()).expect("same dom");
    let lhs_zero = m.fib().compose(&zero_arg).expect("composable");
    let rhs_zero = dst.zero().compose(m.base()).expect("composable");
    if lhs_zero != rhs_zero {
        return Some((lhs_zero, rhs_zero));
    }

    // Sum square over A x A' x A'.
    let dims = [a, a_fib, a_fib];
    let pi0 = PolyMap::projection(&dims, 0);
    let pi1 = PolyMap::projection(&dims, 1);
    let pi2 = PolyMap::projection(&dims, 2);
    let lhs = m
        .fib()
        .compose(&pi0.pair(src.plus()).expect("same dom"))
        .expect("composable");
    let f_tuple = m
        .base()
        .compose(&pi0)
        .expect("composable")
        .pair(&m.fib().compose(&pi0.pair(&pi1).expect("same dom")).expect("composable"))
        .expect("same dom")
        .pair(&m.fib().compose(&pi0.pair(&pi2).expect("same dom")).expect("composable"))
        .expect("same dom");
    let rhs = dst.plus().compose(&f_tuple).expect("composable");
    if lhs != rhs {
        return Some((lhs, rhs));
    }
    None
}

/// Boolean form of [`splus_witness`].
pub fn splus_check(m: &SimpleMor, src: &MonoidInFibre, dst: &MonoidInFibre) -> bool {
    splus_witness(m, src, dst).is_none()
}

/// A gCDC instance: a choice of fibrewise monoid per object, paired with
/// the forward-derivative section.
#[derive(Debug, Clone)]
pub enum GcdcInstance {
    /// Tangent carrier equal to the object with the coordinatewise monoid.
    Standard,
    /// Explicit monoids per dimension (positions index the base object).
    Custom(Vec<MonoidInFibre>),
}

impl GcdcInstance {
    pub fn monoid_for(&self, dim: usize) -> Result<MonoidInFibre> {
        match self {
            GcdcInstance::Standard => Ok(MonoidInFibre::standard(dim, dim)),
            GcdcInstance::Custom(monoids) => monoids
                .iter()
                .find(|m| m.base() == dim)
                .cloned()
                .ok_or_else(|| Error::Instance(format!("no monoid declared for dimension {dim}"))),
        }
    }

    /// A stationary section needs the tangent carrier to match the
    /// object; monoid laws were already enforced at construction.
    pub fn validate(&self, dims: impl IntoIterator<Item = usize>) -> Result<()> {
        for dim in dims {
            let m = self.monoid_for(dim)?;
            if m.fiber() != dim {
                return Err(Error::Instance(format!(
                    "monoid over {dim} carries fiber {}, but the stationary section needs {dim}",
                    m.fiber()
                )));
            }
            m.check_laws()?;
        }
        Ok(())
    }
}

const SUITE_TAG: u64 = 0x09cdc;

/// Runs gCDC.1-5 for the given instance over seeded samples.
pub fn gcdc_axiom_suite(
    instance: &GcdcInstance,
    params: &GenParams,
    trials: u64,
) -> Result<AxiomReport> {
    instance.validate(0..=params.max_dim)?;

    let mut g1 = LawTracker::new("gCDC.1", "derivative of the monoid structure maps");
    let mut g2 = LawTracker::new("gCDC.2", "derivative is a fibrewise monoid homomorphism");
    let mut g3 = LawTracker::new("gCDC.3", "derivative of identities, projections, terminal maps");
    let mut g4 = LawTracker::new("gCDC.4", "derivative preserves pairings");
    let mut g5 = LawTracker::new("gCDC.5", "chain rule");

    for trial in 0..trials {
        let mut rng = Rng::for_trial(params.seed, SUITE_TAG, trial);
        let a = gen_dim(&mut rng, params);
        let b = gen_dim(&mut rng, params);
        let c = gen_dim(&mut rng, params);
        let f = gen_polymap_with(&mut rng, params, a, b);
        let g = gen_polymap_with(&mut rng, params, a, c);
        let h = gen_polymap_with(&mut rng, params, b, c);

        let monoid_a = instance.monoid_for(a)?;
        let monoid_b = instance.monoid_for(b)?;

        // gCDC.1: d(plus_A) = plus_{dA} . pi_1 and d(zero_A) = zero_{dA} . pi_1.
        {
            let plus_a = monoid_a.plus().clone();
            let lhs_plus = delta(&plus_a);
            let n = plus_a.dom();
            let second = PolyMap::projection(&[n, n], 1);
            let rhs_plus = monoid_a.plus().compose(&second).expect("composable");
            g1.check_eq(&[plus_a.to_string()], &lhs_plus, &rhs_plus);

            let zero_a = monoid_a.zero().clone();
            let lhs_zero = delta(&zero_a);
            let second = PolyMap::projection(&[a, a], 1);
            let rhs_zero = monoid_a.zero().compose(&second).expect("composable");
            g1.check_eq(&[zero_a.to_string()], &lhs_zero, &rhs_zero);
        }

        // gCDC.2: the section lands in monoid-preserving morphisms.
        {
            let df = forward_section_d(&f);
            match splus_witness(&df, &monoid_a, &monoid_b) {
                None => g2.observe(None),
                Some((lhs, rhs)) => g2.check_eq(&[f.to_string()], &lhs, &rhs),
            }
        }

        // gCDC.3: identities, projections, and the terminal map.
        {
            let id = PolyMap::identity(a);
            g3.check_eq(
                &[id.to_string()],
                &delta(&id),
                &PolyMap::projection(&[a, a], 1),
            );
            let pi_a = PolyMap::projection(&[a, b], 0);
            let second = PolyMap::projection(&[a + b, a + b], 1);
            g3.check_eq(
                &[pi_a.to_string()],
                &delta(&pi_a),
                &pi_a.compose(&second).expect("composable"),
            );
            let bang = PolyMap::terminal(b);
            g3.check_eq(&[bang.to_string()], &delta(&bang), &PolyMap::terminal(2 * b));
        }

        // gCDC.4: pairings.
        {
            let paired = f.pair(&g).expect("same dom");
            g4.check_eq(
                &[f.to_string(), g.to_string()],
                &delta(&paired),
                &delta(&f).pair(&delta(&g)).expect("same dom"),
            );
        }

        // gCDC.5: chain rule d(h . f) = d h . <f . pi_0, d f>.
        {
            let composite = h.compose(&f).expect("composable");
            let pi0 = PolyMap::projection(&[a, a], 0);
            let rhs = delta(&h)
                .compose(&f.compose(&pi0).expect("composable").pair(&delta(&f)).expect("same dom"))
                .expect("composable");
            g5.check_eq(&[f.to_string(), h.to_string()], &delta(&composite), &rhs);
        }
    }

    let mut report = AxiomReport::new("gcdc");
    report.push(g1.finish());
    report.push(g2.finish());
    report.push(g3.finish());
    report.push(g4.finish());
    report.push(g5.finish());
    Ok(report)
}
