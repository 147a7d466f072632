//! Trivializations, linear maps, differential objects, and the
//! derivative they induce.
//!
//! A trivialization identifies the tangent bundle of an object with the
//! trivial bundle over it. In this model trivializations are restricted
//! to base-preserving maps whose fiber action is a constant invertible
//! rational matrix: inversion is then exact, and every differential
//! object built from the standard monoid has a trivialization of this
//! shape. The invertibility test for product-cone candidates handles
//! fiber parts affine in the fiber block with a constant matrix and
//! declines anything else.

use num_traits::{One, Zero};

use crate::gen::{gen_dim, gen_polymap_with, GenParams, Rng};
use crate::poly::{Poly, Rational};
use crate::polymap::PolyMap;
use crate::report::{AxiomReport, Counterexample, LawRecord, LawTracker};
use crate::simple::{SimpleMor, SimpleObj};
use crate::tangent::{tangent_section_t, tau};
use crate::{Error, Result};

pub type Matrix = Vec<Vec<Rational>>;

/// Exact Gauss-Jordan inverse; `None` when singular.
pub fn invert_matrix(mat: &Matrix) -> Option<Matrix> {
    let n = mat.len();
    if mat.iter().any(|row| row.len() != n) {
        return None;
    }
    let mut work: Vec<Vec<Rational>> = mat.to_vec();
    let mut inv: Matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !work[r][col].is_zero())?;
        work.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = work[col][col].clone();
        for j in 0..n {
            work[col][j] /= &scale;
            inv[col][j] /= &scale;
        }
        for r in 0..n {
            if r != col && !work[r][col].is_zero() {
                let factor = work[r][col].clone();
                for j in 0..n {
                    let w = &work[col][j] * &factor;
                    work[r][j] -= w;
                    let v = &inv[col][j] * &factor;
                    inv[r][j] -= v;
                }
            }
        }
    }
    Some(inv)
}

/// A base-preserving isomorphism of the tangent bundle with the trivial
/// bundle, with a constant invertible matrix as fiber action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trivialization {
    dim: usize,
    matrix: Matrix,
    fwd: PolyMap,
    inv: PolyMap,
}

impl Trivialization {
    pub fn identity(dim: usize) -> Trivialization {
        let eye: Matrix = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        Trivialization::from_matrix(dim, eye).expect("identity matrix inverts")
    }

    pub fn from_matrix(dim: usize, matrix: Matrix) -> Result<Trivialization> {
        if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension(format!(
                "trivialization matrix must be {dim} x {dim}"
            )));
        }
        let inverse = invert_matrix(&matrix)
            .ok_or_else(|| Error::Invariant("trivialization matrix is singular".into()))?;
        let fwd = vertical_from_matrix(dim, &matrix);
        let inv = vertical_from_matrix(dim, &inverse);
        debug_assert_eq!(fwd.compose(&inv).expect("composable"), PolyMap::identity(2 * dim));
        Ok(Trivialization {
            dim,
            matrix,
            fwd,
            inv,
        })
    }

    /// Validates and adopts an explicit vertical map. The fiber block
    /// must be linear in the fiber variables with constant coefficients.
    pub fn from_map(fwd: &PolyMap) -> Result<Trivialization> {
        if fwd.dom() != fwd.cod() || !fwd.dom().is_multiple_of(2) {
            return Err(Error::Dimension("trivializations live on doubled objects".into()));
        }
        let dim = fwd.dom() / 2;
        let base_part = PolyMap::projection(&[dim, dim], 0)
            .compose(fwd)
            .expect("composable");
        if base_part != PolyMap::projection(&[dim, dim], 0) {
            return Err(Error::Invariant("trivialization does not preserve the base".into()));
        }
        let matrix = constant_fiber_matrix(fwd, dim).ok_or_else(|| {
            Error::Invariant(
                "trivialization fiber action is not a constant matrix on the fiber block".into(),
            )
        })?;
        Trivialization::from_matrix(dim, matrix)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn fwd(&self) -> &PolyMap {
        &self.fwd
    }

    pub fn inv(&self) -> &PolyMap {
        &self.inv
    }
}

/// `(b, v) -> (b, M v)` as a polynomial map on the doubled object.
fn vertical_from_matrix(dim: usize, matrix: &Matrix) -> PolyMap {
    let action = PolyMap::linear_from_matrix(matrix);
    let dims = [dim, dim];
    PolyMap::projection(&dims, 0)
        .pair(&action.compose(&PolyMap::projection(&dims, 1)).expect("composable"))
        .expect("same dom")
}

/// Reads the constant fiber matrix off a vertical map, insisting that
/// the fiber components are linear in the fiber block with no base
/// dependence in those coefficients and no other terms.
fn constant_fiber_matrix(fwd: &PolyMap, dim: usize) -> Option<Matrix> {
    let mut matrix = vec![vec![Rational::zero(); dim]; dim];
    for (i, comp) in fwd.components()[dim..].iter().enumerate() {
        for (mono, coeff) in comp.terms() {
            if mono.total_degree() != 1 {
                return None;
            }
            let var = mono.0.iter().position(|&e| e == 1)?;
            if var < dim {
                return None;
            }
            matrix[i][var - dim] = coeff.clone();
        }
    }
    Some(matrix)
}

/// Inverts a vertical map whose fiber part is affine in the fiber block
/// with a constant invertible matrix: `(b, v) -> (b, M v + c(b))` maps
/// back through `(b, w) -> (b, M^-1 (w - c(b)))`. Returns `None` for any
/// other shape; this is the decidable fragment the cone checks use.
pub fn invert_vertical_affine(map: &PolyMap) -> Option<PolyMap> {
    if map.dom() != map.cod() || !map.dom().is_multiple_of(2) {
        return None;
    }
    let dim = map.dom() / 2;
    let base_part = PolyMap::projection(&[dim, dim], 0).compose(map).ok()?;
    if base_part != PolyMap::projection(&[dim, dim], 0) {
        return None;
    }
    let mut matrix = vec![vec![Rational::zero(); dim]; dim];
    let mut offsets = Vec::with_capacity(dim);
    for (i, comp) in map.components()[dim..].iter().enumerate() {
        let mut offset = Poly::zero(2 * dim);
        for (mono, coeff) in comp.terms() {
            let fiber_degree = mono.degree_in(dim, 2 * dim);
            match fiber_degree {
                0 => {
                    offset = offset.add(
                        &Poly::from_terms(2 * dim, [(mono.0.clone(), coeff.clone())])
                            .expect("same arity"),
                    );
                }
                1 if mono.total_degree() == 1 => {
                    let var = mono.0.iter().position(|&e| e == 1)?;
                    matrix[i][var - dim] = coeff.clone();
                }
                _ => return None,
            }
        }
        offsets.push(offset);
    }
    let inverse = invert_matrix(&matrix)?;
    // w - c(b), then M^-1, with the base passed through.
    let offset_map = PolyMap::new(2 * dim, dim, offsets).expect("consistent arities");
    let w = PolyMap::projection(&[dim, dim], 1);
    let shifted = w.add(&offset_map.neg()).expect("same shape");
    let unscaled = PolyMap::linear_from_matrix(&inverse)
        .compose(&shifted)
        .expect("composable");
    let candidate = PolyMap::projection(&[dim, dim], 0)
        .pair(&unscaled)
        .expect("same dom");
    let id = PolyMap::identity(2 * dim);
    (map.compose(&candidate).ok()? == id && candidate.compose(map).ok()? == id)
        .then_some(candidate)
}

/// Linearity of `f` with respect to trivializations on its endpoints:
/// the full square `tB . tau f = (f x f) . tA`, cross-checked against
/// the reduced fiber condition, whose verdicts provably agree.
pub fn is_linear_map(f: &PolyMap, t_a: &Trivialization, t_b: &Trivialization) -> Result<bool> {
    if t_a.dim() != f.dom() || t_b.dim() != f.cod() {
        return Err(Error::Arity(format!(
            "linearity of a map {} -> {} against trivializations on {} and {}",
            f.dom(),
            f.cod(),
            t_a.dim(),
            t_b.dim()
        )));
    }
    let tf = tau(f);
    let full_lhs = t_b.fwd().compose(&tf)?;
    let full_rhs = f.product(f).compose(t_a.fwd())?;
    let full = full_lhs == full_rhs;

    let b = f.cod();
    let a = f.dom();
    let snd_b = PolyMap::projection(&[b, b], 1);
    let snd_a = PolyMap::projection(&[a, a], 1);
    let reduced_lhs = snd_b.compose(&full_lhs)?;
    let reduced_rhs = f.compose(&snd_a.compose(t_a.fwd())?)?;
    let reduced = reduced_lhs == reduced_rhs;
    assert_eq!(full, reduced, "full and reduced linearity squares must agree");
    Ok(full)
}

/// An object with a tangent projection complement and a commutative
/// monoid; the laws are decided by [`check_differential_object`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferentialObject {
    dim: usize,
    phat: PolyMap,
    zero: PolyMap,
    plus: PolyMap,
}

impl DifferentialObject {
    pub fn new(dim: usize, phat: PolyMap, zero: PolyMap, plus: PolyMap) -> Result<Self> {
        if phat.dom() != 2 * dim || phat.cod() != dim {
            return Err(Error::Dimension("tangent complement has the wrong shape".into()));
        }
        if zero.dom() != 0 || zero.cod() != dim {
            return Err(Error::Dimension("monoid unit must be a point of the object".into()));
        }
        if plus.dom() != 2 * dim || plus.cod() != dim {
            return Err(Error::Dimension("monoid sum has the wrong shape".into()));
        }
        Ok(DifferentialObject {
            dim,
            phat,
            zero,
            plus,
        })
    }

    /// The canonical structure: second projection and coordinatewise sum.
    pub fn standard(dim: usize) -> DifferentialObject {
        DifferentialObject {
            dim,
            phat: PolyMap::projection(&[dim, dim], 1),
            zero: PolyMap::zero(0, dim),
            plus: PolyMap::projection(&[dim, dim], 0)
                .add(&PolyMap::projection(&[dim, dim], 1))
                .expect("same shape"),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phat(&self) -> &PolyMap {
        &self.phat
    }

    pub fn monoid_zero(&self) -> &PolyMap {
        &self.zero
    }

    pub fn monoid_plus(&self) -> &PolyMap {
        &self.plus
    }

    fn monoid_laws_hold(&self) -> bool {
        let n = self.dim;
        let zero_at = |dom: usize| {
            self.zero
                .compose(&PolyMap::terminal(dom))
                .expect("composable")
        };
        // Unit.
        let unit_arg = PolyMap::identity(n).pair(&zero_at(n)).expect("same dom");
        if self.plus.compose(&unit_arg).expect("composable") != PolyMap::identity(n) {
            return false;
        }
        // Commutativity.
        let swap = PolyMap::block_permutation(&[n, n], &[1, 0]);
        if self.plus.compose(&swap).expect("composable") != self.plus {
            return false;
        }
        // Associativity.
        let dims = [n, n, n];
        let px = PolyMap::projection(&dims, 0);
        let py = PolyMap::projection(&dims, 1);
        let pz = PolyMap::projection(&dims, 2);
        let xy = self.plus.compose(&px.pair(&py).expect("same dom")).expect("composable");
        let yz = self.plus.compose(&py.pair(&pz).expect("same dom")).expect("composable");
        let left = self.plus.compose(&xy.pair(&pz).expect("same dom")).expect("composable");
        let right = self.plus.compose(&px.pair(&yz).expect("same dom")).expect("composable");
        left == right
    }
}

/// Decides the four displayed squares and the product-cone condition for
/// a differential-object candidate.
pub fn check_differential_object(d: &DifferentialObject) -> AxiomReport {
    let n = d.dim;
    let mut report = AxiomReport::new("differential-object");
    let t = tangent_section_t(n);

    let record = |law: &str, anchor: &str, ok: bool, lhs: &PolyMap, rhs: &PolyMap| LawRecord {
        law: law.into(),
        paper_anchor: anchor.into(),
        trials: 1,
        passed: ok,
        counterexample: (!ok).then(|| Counterexample {
            inputs: vec![d.phat.to_string(), d.zero.to_string(), d.plus.to_string()],
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        }),
    };

    // Product cone: <p, phat> invertible.
    {
        let cone = PolyMap::projection(&[n, n], 0).pair(&d.phat).expect("same dom");
        let ok = invert_vertical_affine(&cone).is_some();
        report.push(record(
            "DO.cone",
            "projection and complement form a product cone",
            ok,
            &cone,
            &PolyMap::identity(2 * n),
        ));
    }

    // Commutative monoid laws.
    {
        let ok = d.monoid_laws_hold();
        report.push(record(
            "DO.monoid",
            "unit, commutativity, associativity of the object monoid",
            ok,
            &d.plus,
            &d.plus,
        ));
    }

    // phat . 0_TB = 0_B . !.
    {
        let lhs = d.phat.compose(t.zero()).expect("composable");
        let rhs = d.zero.compose(&PolyMap::terminal(n)).expect("composable");
        report.push(record(
            "DO.tau-zero",
            "complement collapses the bundle zero to the monoid unit",
            lhs == rhs,
            &lhs,
            &rhs,
        ));
    }

    // phat . +_TB = +_B . <phat pi_1, phat pi_2>.
    {
        let lhs = d.phat.compose(t.plus()).expect("composable");
        let dims = [n, n, n];
        let p0 = PolyMap::projection(&dims, 0);
        let p1 = PolyMap::projection(&dims, 1);
        let p2 = PolyMap::projection(&dims, 2);
        let first = d.phat.compose(&p0.pair(&p1).expect("same dom")).expect("composable");
        let second = d.phat.compose(&p0.pair(&p2).expect("same dom")).expect("composable");
        let rhs = d
            .plus
            .compose(&first.pair(&second).expect("same dom"))
            .expect("composable");
        report.push(record(
            "DO.tau-plus",
            "complement is additive over the bundle addition",
            lhs == rhs,
            &lhs,
            &rhs,
        ));
    }

    // phat . T(0_B) = 0_B (through T1 = 1).
    {
        let lhs = d.phat.compose(&tau(&d.zero)).expect("composable");
        report.push(record(
            "DO.lin-zero",
            "the monoid unit is a linear point",
            lhs == d.zero,
            &lhs,
            &d.zero,
        ));
    }

    // phat . T(+_B) = +_B . (phat x phat) . interleave.
    {
        let lhs = d.phat.compose(&tau(&d.plus)).expect("composable");
        let interleave = PolyMap::block_permutation(&[n, n, n, n], &[0, 2, 1, 3]);
        let rhs = d
            .plus
            .compose(&d.phat.product(&d.phat))
            .expect("composable")
            .compose(&interleave)
            .expect("composable");
        report.push(record(
            "DO.lin-plus",
            "the monoid sum is a linear map",
            lhs == rhs,
            &lhs,
            &rhs,
        ));
    }

    report
}

/// Builds the differential object induced by a trivialization and a
/// commutative monoid: the complement is the fiber part of the
/// trivialization.
pub fn diff_from_lin(
    dim: usize,
    t: &Trivialization,
    zero: &PolyMap,
    plus: &PolyMap,
) -> Result<DifferentialObject> {
    if t.dim() != dim {
        return Err(Error::Dimension("trivialization is on a different object".into()));
    }
    let phat = PolyMap::projection(&[dim, dim], 1).compose(t.fwd())?;
    let d = DifferentialObject::new(dim, phat, zero.clone(), plus.clone())?;
    if !d.monoid_laws_hold() {
        return Err(Error::Invariant("monoid laws fail on the supplied structure".into()));
    }
    Ok(d)
}

/// Recovers the trivialization `<p, phat>` of a differential object.
pub fn lin_from_diff(d: &DifferentialObject) -> Result<Trivialization> {
    if !d.monoid_laws_hold() {
        return Err(Error::Invariant("monoid laws fail on the differential object".into()));
    }
    let cone = PolyMap::projection(&[d.dim, d.dim], 0)
        .pair(&d.phat)
        .expect("same dom");
    Trivialization::from_map(&cone)
}

/// The differential-object form of linearity: `phat_B . tau f = f . phat_A`.
/// Computed alongside the trivialization form, with the verdicts
/// asserted equal.
pub fn is_diff_linear_map(
    f: &PolyMap,
    d_a: &DifferentialObject,
    d_b: &DifferentialObject,
) -> Result<bool> {
    if d_a.dim() != f.dom() || d_b.dim() != f.cod() {
        return Err(Error::Arity("differential objects do not match the map".into()));
    }
    let lhs = d_b.phat.compose(&tau(f))?;
    let rhs = f.compose(&d_a.phat)?;
    let direct = lhs == rhs;
    let via_trivializations = is_linear_map(f, &lin_from_diff(d_a)?, &lin_from_diff(d_b)?)?;
    assert_eq!(
        direct, via_trivializations,
        "the two linearity formulations must agree"
    );
    Ok(direct)
}

/// The derivative induced by trivializations:
/// `D_T f = (f, fiber part of tB . tau f . tA^-1)`.
pub fn dt_derivative(f: &PolyMap, t_a: &Trivialization, t_b: &Trivialization) -> Result<SimpleMor> {
    if t_a.dim() != f.dom() || t_b.dim() != f.cod() {
        return Err(Error::Arity("trivializations do not match the map".into()));
    }
    let b = f.cod();
    let composite = t_b.fwd().compose(&tau(f))?.compose(t_a.inv())?;
    let fib = PolyMap::projection(&[b, b], 1).compose(&composite)?;
    SimpleMor::new(
        SimpleObj::new(f.dom(), f.dom()),
        SimpleObj::new(b, b),
        f.clone(),
        fib,
    )
}

/// Trivialization of a product, assembled through the materialised
/// block shuffle `T(B1 x B2) = T B1 x T B2`.
pub fn lin_product(t1: &Trivialization, t2: &Trivialization) -> Trivialization {
    let (b1, b2) = (t1.dim(), t2.dim());
    let split = PolyMap::block_permutation(&[b1, b2, b1, b2], &[0, 2, 1, 3]);
    let join = PolyMap::block_permutation(&[b1, b1, b2, b2], &[0, 2, 1, 3]);
    let fwd = join
        .compose(&t1.fwd().product(t2.fwd()))
        .expect("composable")
        .compose(&split)
        .expect("composable");
    Trivialization::from_map(&fwd).expect("block-diagonal action of invertible blocks inverts")
}

/// Random invertible trivialization; retries until the sampled matrix
/// inverts, which given the entry distribution takes very few tries.
pub fn gen_trivialization(rng: &mut Rng, dim: usize, bound: i64) -> Trivialization {
    loop {
        let matrix: Matrix = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| crate::poly::rat_int(rng.range_i64(-bound, bound)))
                    .collect()
            })
            .collect();
        if let Ok(t) = Trivialization::from_matrix(dim, matrix) {
            return t;
        }
    }
}

const SUITE_TAG: u64 = 0xd7;

/// CDC.1-5 for the derivative induced by randomly sampled
/// trivializations (all of which are additive by construction).
pub fn dt_axiom_suite(params: &GenParams, trials: u64) -> AxiomReport {
    let mut cdc1 = LawTracker::new("dT.1", "induced derivative preserves sums and zero maps");
    let mut cdc2 = LawTracker::new("dT.2", "induced derivative additive in the tangent argument");
    let mut cdc3 = LawTracker::new("dT.3", "induced derivative of identities and projections");
    let mut cdc4 = LawTracker::new("dT.4", "induced derivative preserves pairings");
    let mut cdc5 = LawTracker::new("dT.5", "chain rule for the induced derivative");

    for trial in 0..trials {
        let mut rng = Rng::for_trial(params.seed, SUITE_TAG, trial);
        let a = gen_dim(&mut rng, params);
        let b = gen_dim(&mut rng, params);
        let c = gen_dim(&mut rng, params);
        let t_a = gen_trivialization(&mut rng, a, 3);
        let t_b = gen_trivialization(&mut rng, b, 3);
        let t_c = gen_trivialization(&mut rng, c, 3);
        let f = gen_polymap_with(&mut rng, params, a, b);
        let f2 = gen_polymap_with(&mut rng, params, a, b);
        let g = gen_polymap_with(&mut rng, params, a, c);
        let h = gen_polymap_with(&mut rng, params, b, c);

        let dt = |f: &PolyMap, ta: &Trivialization, tb: &Trivialization| {
            dt_derivative(f, ta, tb).expect("matching dims").fib().clone()
        };
        let inputs = |maps: &[&PolyMap]| -> Vec<String> {
            let mut v: Vec<String> = maps.iter().map(|m| m.to_string()).collect();
            v.push(t_a.fwd().to_string());
            v.push(t_b.fwd().to_string());
            v
        };

        // dT.1: additivity in the map argument.
        {
            let lhs = dt(&f.add(&f2).expect("parallel"), &t_a, &t_b);
            let rhs = dt(&f, &t_a, &t_b).add(&dt(&f2, &t_a, &t_b)).expect("parallel");
            if lhs != rhs {
                cdc1.check_eq(&inputs(&[&f, &f2]), &lhs, &rhs);
            } else {
                let zero = dt(&PolyMap::zero(a, b), &t_a, &t_b);
                cdc1.check_eq(&inputs(&[&f, &f2]), &zero, &PolyMap::zero(2 * a, b));
            }
        }

        // dT.2: additive in the tangent block.
        {
            let df = dt(&f, &t_a, &t_b);
            match crate::simple::fib_additivity_witness(&df, a, a) {
                None => cdc2.observe(None),
                Some((lhs, rhs)) => cdc2.check_eq(&inputs(&[&f]), &lhs, &rhs),
            }
        }

        // dT.3: identities and projections under the product
        // trivialization.
        {
            let lhs = dt(&PolyMap::identity(a), &t_a, &t_a);
            cdc3.check_eq(&inputs(&[]), &lhs, &PolyMap::projection(&[a, a], 1));

            let t_ab = lin_product(&t_a, &t_b);
            let pi_a = PolyMap::projection(&[a, b], 0);
            let second = PolyMap::projection(&[a + b, a + b], 1);
            let lhs = dt(&pi_a, &t_ab, &t_a);
            cdc3.check_eq(
                &inputs(&[&pi_a]),
                &lhs,
                &pi_a.compose(&second).expect("composable"),
            );
        }

        // dT.4: pairings into the product trivialization.
        {
            let t_bc = lin_product(&t_b, &t_c);
            let lhs = dt(&f.pair(&g).expect("same dom"), &t_a, &t_bc);
            let rhs = dt(&f, &t_a, &t_b).pair(&dt(&g, &t_a, &t_c)).expect("same dom");
            cdc4.check_eq(&inputs(&[&f, &g]), &lhs, &rhs);
        }

        // dT.5: chain rule.
        {
            let lhs = dt(&h.compose(&f).expect("composable"), &t_a, &t_c);
            let pi0 = PolyMap::projection(&[a, a], 0);
            let rhs = dt(&h, &t_b, &t_c)
                .compose(
                    &f.compose(&pi0)
                        .expect("composable")
                        .pair(&dt(&f, &t_a, &t_b))
                        .expect("same dom"),
                )
                .expect("composable");
            cdc5.check_eq(&inputs(&[&f, &h]), &lhs, &rhs);
        }
    }

    let mut report = AxiomReport::new("dT");
    report.push(cdc1.finish());
    report.push(cdc2.finish());
    report.push(cdc3.finish());
    report.push(cdc4.finish());
    report.push(cdc5.finish());
    report
}

/// All maps `dom -> cod` with total degree bounded by `max_degree` and
/// coefficients drawn from `coeffs`. Exhaustive enumeration for the
/// small characterization checks.
pub fn enumerate_maps(
    dom: usize,
    cod: usize,
    max_degree: u32,
    coeffs: &[i64],
) -> Vec<PolyMap> {
    let monos = enumerate_monomials(dom, max_degree);
    let polys = enumerate_polys(dom, &monos, coeffs);
    let mut maps = vec![Vec::new()];
    for _ in 0..cod {
        let mut next = Vec::with_capacity(maps.len() * polys.len());
        for partial in &maps {
            for p in &polys {
                let mut comps = partial.clone();
                comps.push(p.clone());
                next.push(comps);
            }
        }
        maps = next;
    }
    maps.into_iter()
        .map(|comps| PolyMap::new(dom, cod, comps).expect("enumerated arities consistent"))
        .collect()
}

/// All polynomials over the given monomial support and coefficient set.
pub fn enumerate_polys(arity: usize, monos: &[Vec<u32>], coeffs: &[i64]) -> Vec<Poly> {
    let mut polys = vec![Poly::zero(arity)];
    for mono in monos {
        let mut next = Vec::with_capacity(polys.len() * coeffs.len());
        for p in &polys {
            for &c in coeffs {
                if c == 0 {
                    next.push(p.clone());
                } else {
                    next.push(
                        p.add(
                            &Poly::from_terms(arity, [(mono.clone(), crate::poly::rat_int(c))])
                                .expect("enumerated arity consistent"),
                        ),
                    );
                }
            }
        }
        polys = next;
    }
    polys
}

pub fn enumerate_monomials(arity: usize, max_degree: u32) -> Vec<Vec<u32>> {
    fn rec(arity: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == arity {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            rec(arity, budget - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(arity, max_degree, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_map;
    use crate::simple::forward_section_d;
    use crate::poly::{rat, rat_int};

    #[test]
    fn matrix_inversion_round_trips() {
        let m: Matrix = vec![
            vec![rat_int(2), rat_int(1)],
            vec![rat_int(1), rat_int(1)],
        ];
        let inv = invert_matrix(&m).unwrap();
        assert_eq!(inv[0], vec![rat_int(1), rat_int(-1)]);
        assert_eq!(inv[1], vec![rat_int(-1), rat_int(2)]);
        let singular: Matrix = vec![
            vec![rat_int(1), rat_int(2)],
            vec![rat_int(2), rat_int(4)],
        ];
        assert!(invert_matrix(&singular).is_none());
    }

    #[test]
    fn trivialization_shape_is_enforced() {
        // Scaling the fiber by 2 is fine.
        let t = Trivialization::from_matrix(1, vec![vec![rat_int(2)]]).unwrap();
        assert_eq!(t.fwd(), &parse_map("[x0; 2*x1] : 2 -> 2").unwrap());
        assert_eq!(t.inv(), &parse_map("[x0; 1/2*x1] : 2 -> 2").unwrap());

        // Base-dependent fiber actions are rejected.
        let shear = parse_map("[x0; x0*x1] : 2 -> 2").unwrap();
        assert!(matches!(
            Trivialization::from_map(&shear),
            Err(Error::Invariant(_))
        ));

        // Non-base-preserving maps are rejected.
        let swap = parse_map("[x1; x0] : 2 -> 2").unwrap();
        assert!(matches!(
            Trivialization::from_map(&swap),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn affine_vertical_inverter_handles_offsets() {
        // (b, v) -> (b, v + b^2) inverts to (b, w) -> (b, w - b^2).
        let m = parse_map("[x0; x1 + x0^2] : 2 -> 2").unwrap();
        let inv = invert_vertical_affine(&m).unwrap();
        assert_eq!(inv, parse_map("[x0; x1 - x0^2] : 2 -> 2").unwrap());

        // Quadratic fiber dependence is declined.
        let quad = parse_map("[x0; x1^2] : 2 -> 2").unwrap();
        assert!(invert_vertical_affine(&quad).is_none());
    }

    #[test]
    fn linearity_examples() {
        let t1 = Trivialization::identity(1);
        // 3x is linear.
        let scale = parse_map("[3*x0] : 1 -> 1").unwrap();
        assert!(is_linear_map(&scale, &t1, &t1).unwrap());
        // x^2 is not.
        let square = parse_map("[x0^2] : 1 -> 1").unwrap();
        assert!(!is_linear_map(&square, &t1, &t1).unwrap());
        // Identities are linear against any matching trivialization.
        let t = Trivialization::from_matrix(
            2,
            vec![
                vec![rat_int(1), rat_int(1)],
                vec![rat_int(0), rat_int(1)],
            ],
        )
        .unwrap();
        assert!(is_linear_map(&PolyMap::identity(2), &t, &t).unwrap());
    }

    #[test]
    fn linearity_matches_additivity_on_identity_trivializations() {
        // Exhaustive equivalence on 1 -> 1 up to degree 2 with small
        // coefficients; each predicate is decided independently.
        let coeffs = [-1i64, 0, 1];
        let t1 = Trivialization::identity(1);
        for f in enumerate_maps(1, 1, 2, &coeffs) {
            let lin = is_linear_map(&f, &t1, &t1).unwrap();
            let add = f.is_additive();
            let shape = f.is_additive_by_degree();
            assert_eq!(lin, add, "map {f}");
            assert_eq!(add, shape, "map {f}");
        }
    }

    #[test]
    fn additivity_matches_own_jacobian_action_at_zero() {
        // f is additive exactly when it equals its Jacobian action based
        // at zero, exhaustively over the small map spaces.
        let coeffs = [-1i64, 0, 1];
        for dom in [1usize, 2] {
            for f in enumerate_maps(dom, 1, 2, &coeffs) {
                let insert = PolyMap::zero(dom, dom)
                    .pair(&PolyMap::identity(dom))
                    .unwrap();
                let linear_part = crate::simple::delta(&f).compose(&insert).unwrap();
                assert_eq!(
                    f.is_additive(),
                    linear_part == f,
                    "map {f}"
                );
            }
        }
    }

    #[test]
    fn differential_object_standard_and_deviant_cases() {
        // Standard structure passes everything.
        let d = DifferentialObject::standard(2);
        let report = check_differential_object(&d);
        assert!(report.all_passed(), "{}", report.render_text());

        // phat from an additive vertical map: passes.
        let t = Trivialization::from_matrix(1, vec![vec![rat_int(2)]]).unwrap();
        let good = diff_from_lin(
            1,
            &t,
            DifferentialObject::standard(1).monoid_zero(),
            DifferentialObject::standard(1).monoid_plus(),
        )
        .unwrap();
        assert!(check_differential_object(&good).all_passed());

        // phat with a non-additive offset fails the bundle squares.
        let offset_phat = parse_map("[x1 + x0^2] : 2 -> 1").unwrap();
        let bad = DifferentialObject::new(
            1,
            offset_phat,
            PolyMap::zero(0, 1),
            DifferentialObject::standard(1).monoid_plus().clone(),
        )
        .unwrap();
        let report = check_differential_object(&bad);
        let zero_law = report.laws.iter().find(|l| l.law == "DO.tau-zero").unwrap();
        assert!(!zero_law.passed);

        // A commutative monoid that is not additive (x + y + x*y) fails
        // the linearity squares.
        let funny_plus = parse_map("[x0 + x1 + x0*x1] : 2 -> 1").unwrap();
        let funny = DifferentialObject::new(
            1,
            PolyMap::projection(&[1, 1], 1),
            PolyMap::zero(0, 1),
            funny_plus,
        )
        .unwrap();
        let report = check_differential_object(&funny);
        assert!(report.laws.iter().any(|l| l.law == "DO.monoid" && l.passed));
        let lin_plus = report.laws.iter().find(|l| l.law == "DO.lin-plus").unwrap();
        assert!(!lin_plus.passed, "{}", report.render_text());
    }

    #[test]
    fn round_trips_between_trivializations_and_differential_objects() {
        // t = id gives phat = pi_2.
        let d = diff_from_lin(
            2,
            &Trivialization::identity(2),
            DifferentialObject::standard(2).monoid_zero(),
            DifferentialObject::standard(2).monoid_plus(),
        )
        .unwrap();
        assert_eq!(d.phat(), &PolyMap::projection(&[2, 2], 1));

        // Doubling fiber: phat = 2v, and the round trip is exact.
        let t = Trivialization::from_matrix(1, vec![vec![rat_int(2)]]).unwrap();
        let d = diff_from_lin(
            1,
            &t,
            DifferentialObject::standard(1).monoid_zero(),
            DifferentialObject::standard(1).monoid_plus(),
        )
        .unwrap();
        assert_eq!(d.phat(), &parse_map("[2*x1] : 2 -> 1").unwrap());
        assert_eq!(lin_from_diff(&d).unwrap(), t);

        // Random round trips both ways.
        for trial in 0..50 {
            let mut rng = Rng::for_trial(71, 31, trial);
            let dim = (rng.below(3) + 1) as usize;
            let t = gen_trivialization(&mut rng, dim, 4);
            let std = DifferentialObject::standard(dim);
            let d = diff_from_lin(dim, &t, std.monoid_zero(), std.monoid_plus()).unwrap();
            assert_eq!(lin_from_diff(&d).unwrap(), t, "trial {trial}");
        }
    }

    #[test]
    fn diff_linearity_agrees_with_trivialization_linearity() {
        for trial in 0..100 {
            let mut rng = Rng::for_trial(73, 32, trial);
            let dim = (rng.below(3) + 1) as usize;
            let t_a = gen_trivialization(&mut rng, dim, 3);
            let t_b = gen_trivialization(&mut rng, dim, 3);
            let std = DifferentialObject::standard(dim);
            let d_a = diff_from_lin(dim, &t_a, std.monoid_zero(), std.monoid_plus()).unwrap();
            let d_b = diff_from_lin(dim, &t_b, std.monoid_zero(), std.monoid_plus()).unwrap();
            let params = GenParams::default();
            let f = gen_polymap_with(&mut rng, &params, dim, dim);
            // is_diff_linear_map internally asserts agreement with
            // is_linear_map on the induced trivializations.
            let _ = is_diff_linear_map(&f, &d_a, &d_b).unwrap();
        }
        // Sanity: linear maps with standard objects are diff-linear.
        let std = DifferentialObject::standard(1);
        let scale = parse_map("[5*x0] : 1 -> 1").unwrap();
        assert!(is_diff_linear_map(&scale, &std, &std).unwrap());
        let square = parse_map("[x0^2] : 1 -> 1").unwrap();
        assert!(!is_diff_linear_map(&square, &std, &std).unwrap());
    }

    #[test]
    fn induced_derivative_examples() {
        // Identity trivializations collapse to the Jacobian section.
        let f = parse_map("[x0^2*x1; x1] : 2 -> 2").unwrap();
        let dt = dt_derivative(&f, &Trivialization::identity(2), &Trivialization::identity(2))
            .unwrap();
        assert_eq!(dt, forward_section_d(&f));

        // tA doubling, tB identity, f = id: fiber is v/2.
        let t2 = Trivialization::from_matrix(1, vec![vec![rat_int(2)]]).unwrap();
        let t1 = Trivialization::identity(1);
        let dt = dt_derivative(&PolyMap::identity(1), &t2, &t1).unwrap();
        assert_eq!(
            dt.fib(),
            &PolyMap::new(2, 1, vec![Poly::monomial(2, vec![0, 1], rat(1, 2)).unwrap()]).unwrap()
        );
    }

    #[test]
    fn product_trivializations_and_linear_closure() {
        // id (x) id cancels its shuffles exactly.
        let t = lin_product(&Trivialization::identity(2), &Trivialization::identity(1));
        assert_eq!(t, Trivialization::identity(3));

        for trial in 0..30 {
            let mut rng = Rng::for_trial(79, 33, trial);
            let d1 = (rng.below(2) + 1) as usize;
            let d2 = (rng.below(2) + 1) as usize;
            let t1 = gen_trivialization(&mut rng, d1, 3);
            let t2 = gen_trivialization(&mut rng, d2, 3);
            let prod = lin_product(&t1, &t2);

            // Projections from the product are linear.
            let pi0 = PolyMap::projection(&[d1, d2], 0);
            let pi1 = PolyMap::projection(&[d1, d2], 1);
            assert!(is_linear_map(&pi0, &prod, &t1).unwrap(), "trial {trial}");
            assert!(is_linear_map(&pi1, &prod, &t2).unwrap(), "trial {trial}");

            // Composition and pairing of linear maps stay linear, using
            // conjugated intertwiners as the linear maps.
            let n1 = gen_trivialization(&mut rng, d1, 2);
            let m_b = conjugate(&n1, &t1);
            assert!(is_linear_map(
                &PolyMap::linear_from_matrix(n1.matrix()),
                &t1,
                &m_b
            )
            .unwrap());
            let n2 = gen_trivialization(&mut rng, d1, 2);
            let m_c = conjugate(&n2, &m_b);
            let composite = PolyMap::linear_from_matrix(n2.matrix())
                .compose(&PolyMap::linear_from_matrix(n1.matrix()))
                .unwrap();
            assert!(is_linear_map(&composite, &t1, &m_c).unwrap(), "trial {trial}");

            // Pairing <f, g> of linear maps out of a shared source is
            // linear into the product trivialization.
            let m_c2 = conjugate(&n2, &t1);
            let paired = PolyMap::linear_from_matrix(n1.matrix())
                .pair(&PolyMap::linear_from_matrix(n2.matrix()))
                .unwrap();
            let target = lin_product(&m_b, &m_c2);
            assert!(is_linear_map(&paired, &t1, &target).unwrap(), "trial {trial}");
        }
    }

    /// M_B := N M_A N^-1, the target trivialization making N linear.
    fn conjugate(n: &Trivialization, t_a: &Trivialization) -> Trivialization {
        let nm = mat_mul(n.matrix(), t_a.matrix());
        let n_inv = invert_matrix(n.matrix()).unwrap();
        Trivialization::from_matrix(t_a.dim(), mat_mul(&nm, &n_inv)).unwrap()
    }

    fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
        let n = a.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| &a[i][k] * &b[k][j])
                            .fold(Rational::zero(), |acc, x| acc + x)
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn dt_suite_passes() {
        let report = dt_axiom_suite(&GenParams::default(), 30);
        assert!(report.all_passed(), "{}", report.render_text());
    }
}
