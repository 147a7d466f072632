//! The lens fibration: the fibrewise opposite of the simple fibration,
//! carrying the stationary reverse-derivative section.
//!
//! A lens from (A' over A) to (B' over B) is a base map `f : A -> B`
//! with a fiber map `f_fib : A x B' -> A'` running backwards over the
//! base point. The reverse section sends `f` to its transpose Jacobian
//! action, and [`rdc_axiom_suite`] decides the five first-order axioms.

use crate::gen::{gen_dim, gen_polymap_with, GenParams, Rng};
use crate::polymap::PolyMap;
use crate::report::{AxiomReport, LawTracker};
use crate::simple::{
    factor_through_cartesian, fib_additive_in_last_block, reindex, SimpleMor, SimpleObj,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LensMor {
    src: SimpleObj,
    dst: SimpleObj,
    base: PolyMap,
    fib: PolyMap,
}

impl LensMor {
    pub fn new(src: SimpleObj, dst: SimpleObj, base: PolyMap, fib: PolyMap) -> Result<Self> {
        if base.dom() != src.base || base.cod() != dst.base {
            return Err(Error::Object(format!(
                "lens base map {} -> {} between objects over {} and {}",
                base.dom(),
                base.cod(),
                src.base,
                dst.base
            )));
        }
        if fib.dom() != src.base + dst.fiber || fib.cod() != src.fiber {
            return Err(Error::Object(format!(
                "lens fiber map {} -> {} for objects ({} over {}) and ({} over {})",
                fib.dom(),
                fib.cod(),
                src.fiber,
                src.base,
                dst.fiber,
                dst.base
            )));
        }
        Ok(LensMor {
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

    pub fn identity(obj: SimpleObj) -> LensMor {
        LensMor {
            src: obj,
            dst: obj,
            base: PolyMap::identity(obj.base),
            fib: PolyMap::projection(&[obj.base, obj.fiber], 1),
        }
    }

    /// `self . f`: fiber part is `f.fib(a, self.fib(f.base(a), c))`.
    pub fn compose(&self, f: &LensMor) -> Result<LensMor> {
        if f.dst != self.src {
            return Err(Error::Object(format!(
                "composing lenses through mismatched objects {:?} and {:?}",
                f.dst, self.src
            )));
        }
        let base = self.base.compose(&f.base)?;
        let dims = [f.src.base, self.dst.fiber];
        let pi_a = PolyMap::projection(&dims, 0);
        let pi_c = PolyMap::projection(&dims, 1);
        let inner = self.fib.compose(&f.base.compose(&pi_a)?.pair(&pi_c)?)?;
        let fib = f.fib.compose(&pi_a.pair(&inner)?)?;
        LensMor::new(f.src, self.dst, base, fib)
    }

    /// Hom-monoid sum of parallel lenses.
    pub fn add(&self, other: &LensMor) -> Result<LensMor> {
        if self.src != other.src || self.dst != other.dst {
            return Err(Error::Object("adding non-parallel lenses".into()));
        }
        LensMor::new(
            self.src,
            self.dst,
            self.base.add(&other.base)?,
            self.fib.add(&other.fib)?,
        )
    }

    pub fn zero(src: SimpleObj, dst: SimpleObj) -> LensMor {
        LensMor {
            src,
            dst,
            base: PolyMap::zero(src.base, dst.base),
            fib: PolyMap::zero(src.base + dst.fiber, src.fiber),
        }
    }

    /// Product of lenses, pointwise on objects.
    pub fn product_mor(&self, other: &LensMor) -> LensMor {
        let src = self.src.product(other.src);
        let dst = self.dst.product(other.dst);
        let dims = [
            self.src.base,
            other.src.base,
            self.dst.fiber,
            other.dst.fiber,
        ];
        let left = PolyMap::block_permutation(&dims, &[0, 2]);
        let right = PolyMap::block_permutation(&dims, &[1, 3]);
        let fib = self
            .fib
            .compose(&left)
            .expect("block selection matches lens fiber domain")
            .pair(&other.fib.compose(&right).expect("block selection matches lens fiber domain"))
            .expect("shared product domain");
        LensMor {
            src,
            dst,
            base: self.base.product(&other.base),
            fib,
        }
    }

    /// Serialization used in counterexamples: `{base: ..., fib: ...}`.
    pub fn literal(&self) -> String {
        format!("{{base: {}, fib: {}}}", self.base, self.fib)
    }
}

/// Additivity of the lens fiber part in the downstream-cotangent block.
pub fn is_cla_lens(l: &LensMor) -> bool {
    fib_additive_in_last_block(l.fib(), l.src.base, l.dst.fiber)
}

/// Lens projection of the pointwise product onto factor `idx`; its fiber
/// part pads the incoming cotangent with zero on the other factor.
pub fn lens_projection(x: SimpleObj, y: SimpleObj, idx: usize) -> LensMor {
    assert!(idx < 2);
    let prod = x.product(y);
    let dst = if idx == 0 { x } else { y };
    let base = PolyMap::projection(&[x.base, y.base], idx);
    let dims = [x.base, y.base, dst.fiber];
    let incoming = PolyMap::projection(&dims, 2);
    let total = x.base + y.base + dst.fiber;
    let fib = if idx == 0 {
        incoming.pair(&PolyMap::zero(total, y.fiber)).expect("same dom")
    } else {
        PolyMap::zero(total, x.fiber).pair(&incoming).expect("same dom")
    };
    LensMor::new(prod, dst, base, fib).expect("projection shapes line up")
}

/// Pairing of lenses out of a shared source: the fiber parts are summed
/// after each is fed its own factor of the downstream cotangent.
pub fn lens_pair(f: &LensMor, g: &LensMor) -> Result<LensMor> {
    if f.src != g.src {
        return Err(Error::Object("pairing lenses with different sources".into()));
    }
    let src = f.src;
    let dst = f.dst.product(g.dst);
    let base = f.base.pair(&g.base)?;
    let dims = [src.base, f.dst.fiber, g.dst.fiber];
    let pi_x = PolyMap::projection(&dims, 0);
    let pi_a = PolyMap::projection(&dims, 1);
    let pi_b = PolyMap::projection(&dims, 2);
    let fib = f
        .fib
        .compose(&pi_x.pair(&pi_a)?)?
        .add(&g.fib.compose(&pi_x.pair(&pi_b)?)?)?;
    LensMor::new(src, dst, base, fib)
}

/// A lens presented as a span of simple-fibration morphisms sharing an
/// apex: a cartesian leg into the target and a vertical leg into the
/// source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub cartesian: SimpleMor,
    pub vertical: SimpleMor,
}

impl Span {
    pub fn new(cartesian: SimpleMor, vertical: SimpleMor) -> Result<Span> {
        if cartesian.src() != vertical.src() {
            return Err(Error::Object("span legs do not share an apex".into()));
        }
        if !cartesian.is_cartesian() {
            return Err(Error::Object("span target leg is not cartesian".into()));
        }
        if !vertical.is_vertical() {
            return Err(Error::Object("span source leg is not vertical".into()));
        }
        Ok(Span {
            cartesian,
            vertical,
        })
    }
}

/// Reads a lens off a span: base from the cartesian leg, fiber from the
/// vertical leg.
pub fn lens_of_span(span: &Span) -> Result<LensMor> {
    LensMor::new(
        span.vertical.dst(),
        span.cartesian.dst(),
        span.cartesian.base().clone(),
        span.vertical.fib().clone(),
    )
}

/// Presents a lens as its span through the canonical reindexing of the
/// target over the source base.
pub fn span_of_lens(l: &LensMor) -> Span {
    let (apex, cartesian) = reindex(l.base(), l.dst()).expect("lens base targets its object");
    let vertical = SimpleMor::new(
        apex,
        l.src(),
        PolyMap::identity(apex.base),
        l.fib().clone(),
    )
    .expect("lens fiber map has the span shape");
    Span {
        cartesian,
        vertical,
    }
}

/// Composition of spans by pullback: the second span's vertical leg is
/// pulled back along the first span's cartesian leg (reindex the apex,
/// then factor through the cartesian leg), and the legs compose.
pub fn compose_spans(second: &Span, first: &Span) -> Result<Span> {
    if second.vertical.dst() != first.cartesian.dst() {
        return Err(Error::Object("spans are not composable".into()));
    }
    let f_base = first.cartesian.base();
    let (_, lift) = reindex(f_base, second.vertical.src())?;
    let through = second.vertical.compose(&lift)?;
    let pulled_vertical = factor_through_cartesian(
        &first.cartesian,
        &through,
        &PolyMap::identity(f_base.dom()),
    )?;
    Span::new(
        second.cartesian.compose(&lift)?,
        first.vertical.compose(&pulled_vertical)?,
    )
}

/// Transpose-Jacobian action of `f`:
/// `rho(f)(a, w)_j = sum_i d f_i / d x_j (a) * w_i`.
pub fn rho(f: &PolyMap) -> PolyMap {
    let a = f.dom();
    let b = f.cod();
    let dom = a + b;
    let jac = f.jacobian();
    let components = (0..a)
        .map(|j| {
            let mut acc = crate::poly::Poly::zero(dom);
            for (i, row) in jac.iter().enumerate() {
                let dij = row[j].embed(dom, 0);
                acc = acc.add(&dij.mul(&crate::poly::Poly::var(dom, a + i)));
            }
            acc
        })
        .collect();
    PolyMap::new(dom, a, components).expect("assembled arities are consistent")
}

/// The stationary reverse-derivative section.
pub fn reverse_section_r(f: &PolyMap) -> LensMor {
    let src = SimpleObj::new(f.dom(), f.dom());
    let dst = SimpleObj::new(f.cod(), f.cod());
    LensMor::new(src, dst, f.clone(), rho(f)).expect("stationary shapes line up")
}

/// Mutation used by the sensitivity tests: applies the Jacobian without
/// transposing (padding or truncating blocks on non-square maps), so
/// projections pair wrongly and the reverse laws break.
pub fn rho_corrupt_no_transpose(f: &PolyMap) -> PolyMap {
    let a = f.dom();
    let b = f.cod();
    let dom = a + b;
    let jac = f.jacobian();
    let k = a.min(b);
    let components = (0..a)
        .map(|j| {
            let mut acc = crate::poly::Poly::zero(dom);
            if j < b {
                for (i, entry) in jac[j].iter().enumerate().take(k) {
                    let dij = entry.embed(dom, 0);
                    acc = acc.add(&dij.mul(&crate::poly::Poly::var(dom, a + i)));
                }
            }
            acc
        })
        .collect();
    PolyMap::new(dom, a, components).expect("assembled arities are consistent")
}

const SUITE_TAG: u64 = 0x0ddc;

/// Runs RDC.1-5 for the given reverse operator over seeded samples.
pub fn rdc_axiom_suite_with(
    suite_name: &str,
    reverse: &dyn Fn(&PolyMap) -> PolyMap,
    params: &GenParams,
    trials: u64,
) -> AxiomReport {
    let mut rdc1 = LawTracker::new("RDC.1", "reverse derivative preserves sums and zero maps");
    let mut rdc2 = LawTracker::new("RDC.2", "reverse derivative additive in the cotangent argument");
    let mut rdc3 = LawTracker::new("RDC.3", "reverse derivative of identities and projections");
    let mut rdc4 = LawTracker::new("RDC.4", "reverse derivative of pairings sums the factors");
    let mut rdc5 = LawTracker::new("RDC.5", "reverse chain rule");

    for trial in 0..trials {
        let mut rng = Rng::for_trial(params.seed, SUITE_TAG, trial);
        let a = gen_dim(&mut rng, params);
        let b = gen_dim(&mut rng, params);
        let c = gen_dim(&mut rng, params);
        let f = gen_polymap_with(&mut rng, params, a, b);
        let f2 = gen_polymap_with(&mut rng, params, a, b);
        let g = gen_polymap_with(&mut rng, params, a, c);
        let h = gen_polymap_with(&mut rng, params, b, c);

        // RDC.1: r(f + f2) = r f + r f2 and r 0 = 0.
        {
            let sum_lhs = reverse(&f.add(&f2).expect("parallel"));
            let sum_rhs = reverse(&f).add(&reverse(&f2)).expect("parallel");
            let inputs = vec![f.to_string(), f2.to_string()];
            if sum_lhs != sum_rhs {
                rdc1.check_eq(&inputs, &sum_lhs, &sum_rhs);
            } else {
                let zero_lhs = reverse(&PolyMap::zero(a, b));
                rdc1.check_eq(&inputs, &zero_lhs, &PolyMap::zero(a + b, a));
            }
        }

        // RDC.2: r f additive in the cotangent block.
        {
            let rf = reverse(&f);
            match crate::simple::fib_additivity_witness(&rf, a, b) {
                None => rdc2.observe(None),
                Some((lhs, rhs)) => rdc2.check_eq(&[f.to_string()], &lhs, &rhs),
            }
        }

        // RDC.3: r(id) = pi_1, r(pi_A) = <pi_2, 0>, r(pi_B) = <0, pi_2>,
        // and the map to the terminal object pulls back to zero.
        {
            let id = PolyMap::identity(a);
            rdc3.check_eq(
                &[id.to_string()],
                &reverse(&id),
                &PolyMap::projection(&[a, a], 1),
            );

            let pi_a = PolyMap::projection(&[a, b], 0);
            let expect_a = PolyMap::projection(&[a, b, a], 2)
                .pair(&PolyMap::zero(a + b + a, b))
                .expect("same dom");
            rdc3.check_eq(&[pi_a.to_string()], &reverse(&pi_a), &expect_a);

            let pi_b = PolyMap::projection(&[a, b], 1);
            let expect_b = PolyMap::zero(a + b + b, a)
                .pair(&PolyMap::projection(&[a, b, b], 2))
                .expect("same dom");
            rdc3.check_eq(&[pi_b.to_string()], &reverse(&pi_b), &expect_b);

            let bang = PolyMap::terminal(b);
            rdc3.check_eq(&[bang.to_string()], &reverse(&bang), &PolyMap::zero(b, b));
        }

        // RDC.4: r<f, g> = r f . (id x pi_B) + r g . (id x pi_C).
        {
            let paired = f.pair(&g).expect("same dom");
            let lhs = reverse(&paired);
            let dims = [a, b, c];
            let pi_x = PolyMap::projection(&dims, 0);
            let pi_b = PolyMap::projection(&dims, 1);
            let pi_c = PolyMap::projection(&dims, 2);
            let rhs = reverse(&f)
                .compose(&pi_x.pair(&pi_b).expect("same dom"))
                .expect("composable")
                .add(
                    &reverse(&g)
                        .compose(&pi_x.pair(&pi_c).expect("same dom"))
                        .expect("composable"),
                )
                .expect("same shape");
            rdc4.check_eq(&[f.to_string(), g.to_string()], &lhs, &rhs);
        }

        // RDC.5: r(h . f) = r f . <pi_0, r h . <f . pi_0, pi_1>>.
        {
            let composite = h.compose(&f).expect("composable");
            let lhs = reverse(&composite);
            let dims = [a, c];
            let pi0 = PolyMap::projection(&dims, 0);
            let pi1 = PolyMap::projection(&dims, 1);
            let inner = reverse(&h)
                .compose(&f.compose(&pi0).expect("composable").pair(&pi1).expect("same dom"))
                .expect("composable");
            let rhs = reverse(&f)
                .compose(&pi0.pair(&inner).expect("same dom"))
                .expect("composable");
            rdc5.check_eq(&[f.to_string(), h.to_string()], &lhs, &rhs);
        }
    }

    let mut report = AxiomReport::new(suite_name);
    report.push(rdc1.finish());
    report.push(rdc2.finish());
    report.push(rdc3.finish());
    report.push(rdc4.finish());
    report.push(rdc5.finish());
    report
}

/// RDC.1-5 for the honest reverse derivative.
pub fn rdc_axiom_suite(params: &GenParams, trials: u64) -> AxiomReport {
    rdc_axiom_suite_with("rdc", &rho, params, trials)
}
