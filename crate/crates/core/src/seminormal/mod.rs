//! Matrix models of the algebra blocks in the seminormal basis.
//!
//! At separate parameters each block acts faithfully on a single column of
//! its seminormal basis, so the block is reconstructed as an explicit
//! matrix algebra. This module builds the generator matrices of that
//! action for the plain flavour, the primitive idempotents, the
//! supersymmetrizing trace weights and the coefficient tables behind the
//! basis. It also carries the audits that pin the construction down: every
//! defining relation as a matrix identity, the idempotent interpolation
//! products, the multiplication law of the basis, the trace supersymmetry
//! and the two closed product formulas for the transition coefficients.
//!
//! Scalars are generic over backends providing a square root and a
//! magnitude. The basis column is normalized so that the swap term of the
//! braid generator action carries the bare root of the swap coefficient;
//! the word dependent transition factors cancel in this gauge and never
//! enter the matrices.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::cartan::{separation_polynomial, CartanError, Identity, ParamScalar, ParameterSet};
use crate::combinatorics::{
    enumerate_multipartitions, enumerate_std_tableaux, enumerate_tri, tableau_word, tri_even_count,
    BoxPos, Bullet, CombError, MultiPartition, ParitySelect, StandardTableau, TriTriple,
};
use crate::linalg::Mat;
use crate::scalar::{Dyadic, Field, FieldSqrt, PrecComplex};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SeminormalError {
    /// The separation polynomial vanishes at the given parameters.
    #[error("parameters are not separate at this size")]
    NotSeparate,
    /// Generator matrices exist only for the plain flavour.
    #[error("generator matrices are not available for flavour {0:?}")]
    UnsupportedBullet(Bullet),
    #[error("parameter error: {0}")]
    Parameter(#[from] CartanError),
    #[error("shape error: {0}")]
    Shape(#[from] CombError),
    /// Two field values that must be told apart fell inside the audit zone,
    /// or a denominator that separation keeps invertible failed to invert.
    #[error("ambiguous value: {0}")]
    AmbiguousValue(String),
}

/// Magnitude view of a scalar backend, used for residual reports.
pub trait NormedScalar: Field {
    /// Nonnegative size of the value.
    fn magnitude(&self) -> Dyadic;
    /// Tolerance floor of the representation the value lives in.
    fn resolution(&self) -> Dyadic;
}

impl NormedScalar for PrecComplex {
    fn magnitude(&self) -> Dyadic {
        self.abs()
    }

    fn resolution(&self) -> Dyadic {
        self.tau()
    }
}

/// Everything the block builder needs from a scalar backend.
pub trait EngineScalar: ParamScalar + FieldSqrt + NormedScalar {}

impl<T: ParamScalar + FieldSqrt + NormedScalar> EngineScalar for T {}

/// One audited identity: the measured residual against its bound.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub residual: Dyadic,
    pub bound: Dyadic,
    pub pass: bool,
}

/// Outcome of a family of identity checks.
#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    pub fn new() -> Self {
        CheckReport { lines: Vec::new() }
    }

    fn push(&mut self, name: impl Into<String>, residual: Dyadic, bound: &Dyadic) {
        let pass = residual.cmp_val(bound) != Ordering::Greater;
        self.lines.push(CheckLine {
            name: name.into(),
            residual,
            bound: bound.clone(),
            pass,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    /// The line with the largest residual.
    pub fn worst(&self) -> Option<&CheckLine> {
        self.lines.iter().max_by(|a, b| a.residual.cmp_val(&b.residual))
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.lines.extend(other.lines);
    }
}

fn dmax(a: Dyadic, b: Dyadic) -> Dyadic {
    if a.cmp_val(&b) == Ordering::Less {
        b
    } else {
        a
    }
}

/// Largest entry magnitude of a matrix.
fn max_norm<F: NormedScalar>(m: &Mat<F>) -> Dyadic {
    let mut acc = Dyadic::zero();
    for e in m.entries() {
        acc = dmax(acc, e.magnitude());
    }
    acc
}

/// |a - b| over the larger magnitude; plain |a - b| when both vanish.
fn rel_dev<F: NormedScalar>(a: &F, b: &F) -> Dyadic {
    let diff = a.sub(b).magnitude();
    let scale = dmax(a.magnitude(), b.magnitude());
    if scale.is_zero() {
        diff
    } else {
        diff.div(&scale)
    }
}

/// Matrix product that skips structural zeros. The generator matrices are
/// diagonal, signed permutations or three entries per column, so walking
/// only the stored nonzeros keeps every audit far below the dense cost.
fn mul<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    assert_eq!(a.cols(), b.rows());
    let mut out: Mat<F> = Mat::zeros(a.rows(), b.cols());
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            let aik = &a[(i, k)];
            if aik.is_zero_strict() {
                continue;
            }
            for j in 0..b.cols() {
                let bkj = &b[(k, j)];
                if bkj.is_zero_strict() {
                    continue;
                }
                out[(i, j)] = out[(i, j)].add(&aik.mul(bkj));
            }
        }
    }
    out
}

fn beta_bit(beta: u64, k: usize) -> u64 {
    beta >> (k - 1) & 1
}

fn beta_flip(beta: u64, k: usize) -> u64 {
    beta ^ (1u64 << (k - 1))
}

/// Swap the mask bits of the values k and k+1.
fn beta_swap(beta: u64, k: usize) -> u64 {
    let lo = beta_bit(beta, k);
    let hi = beta_bit(beta, k + 1);
    if lo == hi {
        beta
    } else {
        beta ^ (0b11u64 << (k - 1))
    }
}

/// Number of set mask bits strictly below value k.
fn count_below(beta: u64, k: usize) -> u32 {
    (beta & ((1u64 << (k - 1)) - 1)).count_ones()
}

/// The swap coefficient from a pair of eigenvalues,
/// 1 - eps^2 (bb'/(b'-b)^2 + bb'/(bb'-1)^2),
/// written so that the value is bitwise symmetric in b and b'. Opposite
/// edges of a braid hexagon in the swap graph carry the same eigenvalue
/// pair, so this symmetry plus one deterministic principal root keeps all
/// cached roots braid coherent with no global bookkeeping.
fn edge_coefficient<F: Field>(eps2: &F, b: &F, b2: &F) -> Option<F> {
    let one = F::one();
    let prod = b.mul(b2);
    let diff = b2.sub(b);
    let t1 = prod.div(&diff.mul(&diff))?;
    let d2 = prod.sub(&one);
    let t2 = prod.div(&d2.mul(&d2))?;
    Some(one.sub(&eps2.mul(&t1.add(&t2))))
}

/// Eigenvalue and swap coefficient tables for the standard fillings of one
/// shape.
///
/// Both members of each eigenvalue pair are stored, and every power that
/// appears downstream is read off the stored pair instead of being
/// recomputed, so equal boxes always produce bitwise identical scalars.
/// Swap coefficients live on unordered edges of the adjacent transposition
/// graph; their principal roots are cached once per edge.
pub struct SeminormalCoeffs<F: Field> {
    tableaux: Vec<StandardTableau>,
    index: HashMap<String, usize>,
    b_minus: Vec<Vec<F>>,
    b_plus: Vec<Vec<F>>,
    epsilon: F,
    swap: Vec<Vec<Option<usize>>>,
    c_edge: HashMap<(usize, usize), F>,
    root_edge: HashMap<(usize, usize), F>,
}

impl<F: EngineScalar> SeminormalCoeffs<F> {
    /// Tables for one shape. Requires matching flavours; separation is the
    /// caller's precondition and is what keeps the denominators invertible.
    pub fn build(p: &ParameterSet<F>, shape: &MultiPartition) -> Result<Self, SeminormalError> {
        if shape.bullet() != p.bullet() {
            return Err(SeminormalError::Parameter(CartanError::BadParameters(
                format!("shape flavour {:?} differs from the parameters", shape.bullet()),
            )));
        }
        let n = shape.size();
        let tableaux = enumerate_std_tableaux(shape);
        let mut index = HashMap::new();
        for (i, t) in tableaux.iter().enumerate() {
            index.insert(t.encode(), i);
        }
        let one = F::one();
        let two_inv = F::from_i64(2)
            .inv()
            .expect("2 is a unit in every supported backend");
        let mut b_minus = Vec::with_capacity(tableaux.len());
        let mut b_plus = Vec::with_capacity(tableaux.len());
        for t in &tableaux {
            let mut lo = Vec::with_capacity(n);
            let mut hi = Vec::with_capacity(n);
            for k in 1..=n {
                let res = p.residue(t.box_of(k))?;
                let half = p.class_value(&res)?.mul(&two_inv);
                let root = half.mul(&half).sub(&one).sqrt_principal();
                hi.push(half.add(&root));
                lo.push(half.sub(&root));
            }
            b_minus.push(lo);
            b_plus.push(hi);
        }
        let epsilon = {
            let q = p.q().clone();
            let qi = q.inv().expect("q is a unit");
            q.sub(&qi)
        };
        let mut swap = Vec::with_capacity(tableaux.len());
        for t in &tableaux {
            let mut row = Vec::with_capacity(n.saturating_sub(1));
            for k in 1..n {
                row.push(t.apply_adjacent(k).map(|u| index[&u.encode()]));
            }
            swap.push(row);
        }
        let eps2 = epsilon.mul(&epsilon);
        let mut c_edge = HashMap::new();
        let mut root_edge = HashMap::new();
        for ti in 0..tableaux.len() {
            for k in 1..n {
                match swap[ti][k - 1] {
                    Some(tj) if tj > ti => {
                        let c = edge_coefficient(&eps2, &b_minus[ti][k - 1], &b_minus[ti][k])
                            .ok_or_else(|| {
                                SeminormalError::AmbiguousValue(format!(
                                    "swap coefficient at filling {}, position {} lost its denominator",
                                    ti, k
                                ))
                            })?;
                        let r = c.sqrt_principal();
                        c_edge.insert((ti, k), c);
                        root_edge.insert((ti, k), r);
                    }
                    _ => {}
                }
            }
        }
        Ok(SeminormalCoeffs {
            tableaux,
            index,
            b_minus,
            b_plus,
            epsilon,
            swap,
            c_edge,
            root_edge,
        })
    }

    pub fn len(&self) -> usize {
        self.tableaux.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tableaux.is_empty()
    }

    pub fn tableaux(&self) -> &[StandardTableau] {
        &self.tableaux
    }

    pub fn index_of(&self, t: &StandardTableau) -> Option<usize> {
        self.index.get(&t.encode()).copied()
    }

    pub fn epsilon(&self) -> &F {
        &self.epsilon
    }

    /// The eigenvalue b(t,k): the minus branch at the residue of k.
    pub fn b(&self, t: usize, k: usize) -> &F {
        &self.b_minus[t][k - 1]
    }

    /// The plus branch, the stored partner with b * b_inv = 1.
    pub fn b_inv(&self, t: usize, k: usize) -> &F {
        &self.b_plus[t][k - 1]
    }

    /// Index of the filling with k and k+1 exchanged, when standard.
    pub fn swap_idx(&self, t: usize, k: usize) -> Option<usize> {
        self.swap[t][k - 1]
    }

    fn edge_key(&self, t: usize, k: usize) -> Option<(usize, usize)> {
        self.swap[t][k - 1].map(|u| (t.min(u), k))
    }

    /// The swap coefficient c_t(k). Defined at every position of a
    /// standard filling, whether or not the swap stays standard.
    pub fn c_adjacent(&self, t: usize, k: usize) -> F {
        let eps2 = self.epsilon.mul(&self.epsilon);
        edge_coefficient(&eps2, &self.b_minus[t][k - 1], &self.b_minus[t][k])
            .expect("separate parameters keep the swap denominators invertible")
    }

    /// Cached c_t(k) on a standard edge; shared by both endpoints.
    pub fn c_adjacent_cached(&self, t: usize, k: usize) -> Option<&F> {
        self.edge_key(t, k).and_then(|key| self.c_edge.get(&key))
    }

    /// Cached principal root of c_t(k) on a standard edge.
    pub fn root_adjacent(&self, t: usize, k: usize) -> Option<&F> {
        self.edge_key(t, k).and_then(|key| self.root_edge.get(&key))
    }

    /// Steps (filling before the swap, position) along the fixed reduced
    /// word taking filling `t` to filling `s`. Every prefix of a reduced
    /// word between standard fillings stays standard, so each step has a
    /// cached edge.
    pub fn word_path(&self, s: usize, t: usize) -> Result<Vec<(usize, usize)>, SeminormalError> {
        let word = tableau_word(&self.tableaux[s], &self.tableaux[t])?;
        let mut u = t;
        let mut path = Vec::with_capacity(word.len());
        for k in word {
            path.push((u, k));
            u = self.swap[u][k - 1].expect("reduced word steps stay standard");
        }
        debug_assert_eq!(u, s);
        Ok(path)
    }

    /// c(s,t): the product of the cached edge roots along the fixed word.
    /// Symmetric in s and t up to the sign freedom of the root choices.
    pub fn c_pair(&self, s: usize, t: usize) -> Result<F, SeminormalError> {
        let mut acc = F::one();
        for (u, k) in self.word_path(s, t)? {
            let key = self.edge_key(u, k).expect("path step is a standard edge");
            acc = acc.mul(&self.root_edge[&key]);
        }
        Ok(acc)
    }

    /// c(s,t)^2 with no roots involved: the plain product of the edge
    /// coefficients along the word. Independent of the reduced word.
    pub fn c_pair_squared(&self, s: usize, t: usize) -> Result<F, SeminormalError> {
        let mut acc = F::one();
        for (u, k) in self.word_path(s, t)? {
            let key = self.edge_key(u, k).expect("path step is a standard edge");
            acc = acc.mul(&self.c_edge[&key]);
        }
        Ok(acc)
    }
}

/// Options for the block build.
#[derive(Debug, Clone)]
pub struct BuildOpts {
    /// Check that no eigenvalue off the diagonal positions sits on or near
    /// a square root of one before accepting the block.
    pub eigenvalue_guard: bool,
}

impl Default for BuildOpts {
    fn default() -> Self {
        BuildOpts {
            eigenvalue_guard: true,
        }
    }
}

/// Generator matrices of one block acting on a fixed column of its
/// seminormal basis, with the basis bookkeeping, the interpolation data of
/// the idempotents and the trace weights.
///
/// Rows and columns are indexed by the even parity class triples, fillings
/// in enumeration order, sign masks ascending; the basis idempotent of
/// column T is exactly the diagonal matrix unit there. On even blocks the
/// stored column signs are all one; odd blocks would carry the explicit
/// sign of the shifted parity columns here, but those arise only away from
/// the plain flavour and are not built.
pub struct BlockRep<F: Field> {
    shape: MultiPartition,
    basis: Vec<TriTriple>,
    lookup: HashMap<(usize, u64), usize>,
    tab_of: Vec<usize>,
    n: usize,
    dim: usize,
    x: Vec<Mat<F>>,
    x_inv: Vec<Mat<F>>,
    c: Vec<Mat<F>>,
    t: Vec<Mat<F>>,
    weights: Vec<F>,
    parities: Vec<u8>,
    signs: Vec<i8>,
    b_sets: Vec<Vec<F>>,
    coeffs: SeminormalCoeffs<F>,
    resolution: Dyadic,
}

impl<F: Field> BlockRep<F> {
    pub fn shape(&self) -> &MultiPartition {
        &self.shape
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[TriTriple] {
        &self.basis
    }

    /// Column index of a (filling, mask) pair.
    pub fn basis_index(&self, tab: usize, beta: u64) -> Option<usize> {
        self.lookup.get(&(tab, beta)).copied()
    }

    /// Filling index behind a basis column.
    pub fn tableau_of(&self, col: usize) -> usize {
        self.tab_of[col]
    }

    pub fn x(&self, i: usize) -> &Mat<F> {
        &self.x[i - 1]
    }

    pub fn x_inv(&self, i: usize) -> &Mat<F> {
        &self.x_inv[i - 1]
    }

    pub fn c_mat(&self, i: usize) -> &Mat<F> {
        &self.c[i - 1]
    }

    pub fn t_mat(&self, i: usize) -> &Mat<F> {
        &self.t[i - 1]
    }

    /// Trace weight of each basis idempotent, in column order.
    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    /// Parity of each basis column, the mask weight mod 2.
    pub fn parities(&self) -> &[u8] {
        &self.parities
    }

    pub fn column_signs(&self) -> &[i8] {
        &self.signs
    }

    /// Interpolation points for position k: every eigenvalue branch over
    /// all fillings of all shapes of this size, deduplicated.
    pub fn interpolation_set(&self, k: usize) -> &[F] {
        &self.b_sets[k - 1]
    }

    pub fn coeffs(&self) -> &SeminormalCoeffs<F> {
        &self.coeffs
    }

    /// Tolerance floor of the scalar backend this block was built over.
    pub fn resolution(&self) -> &Dyadic {
        &self.resolution
    }

    /// Relation tolerance: a thousand resolutions per matrix dimension,
    /// covering the rounding accumulated across products.
    pub fn tau_rel(&self) -> Dyadic {
        self.resolution.mul_i64(1000 * self.dim as i64)
    }
}

/// Eigenvalue branches at each position of each filling of every shape of
/// the window, deduplicated per position. These are the interpolation
/// points of the idempotents; available for every flavour.
pub fn interpolation_sets<F: EngineScalar>(
    p: &ParameterSet<F>,
) -> Result<Vec<Vec<F>>, SeminormalError> {
    let n = p.n();
    let m = p.cyclotomic_params().len();
    let one = F::one();
    let two_inv = F::from_i64(2)
        .inv()
        .expect("2 is a unit in every supported backend");
    let mut sets: Vec<Vec<F>> = vec![Vec::new(); n];
    for shape in enumerate_multipartitions(n, m, p.bullet()) {
        for t in enumerate_std_tableaux(&shape) {
            for k in 1..=n {
                let res = p.residue(t.box_of(k))?;
                let half = p.class_value(&res)?.mul(&two_inv);
                let root = half.mul(&half).sub(&one).sqrt_principal();
                for cand in [half.add(&root), half.sub(&root)] {
                    push_unique(&mut sets[k - 1], cand)?;
                }
            }
        }
    }
    Ok(sets)
}

fn push_unique<F: ParamScalar>(set: &mut Vec<F>, v: F) -> Result<(), SeminormalError> {
    for e in set.iter() {
        match e.identity(&v) {
            Identity::Equal => return Ok(()),
            Identity::Near => {
                return Err(SeminormalError::AmbiguousValue(
                    "two interpolation points inside the audit zone".into(),
                ))
            }
            Identity::Distinct => {}
        }
    }
    set.push(v);
    Ok(())
}

/// Build the matrix model of the block of one shape.
///
/// The eigenvalue matrices are diagonal, the odd generators act as signed
/// mask flips and the braid generators have at most three entries per
/// column: the stay term, the double flip term and, on standard swaps, the
/// edge root moving to the swapped filling with both mask bits exchanged.
pub fn build_block<F: EngineScalar>(
    shape: &MultiPartition,
    p: &ParameterSet<F>,
    opts: &BuildOpts,
) -> Result<BlockRep<F>, SeminormalError> {
    if p.bullet() != Bullet::Zero {
        return Err(SeminormalError::UnsupportedBullet(p.bullet()));
    }
    if shape.bullet() != p.bullet() || shape.size() != p.n() {
        return Err(SeminormalError::Parameter(CartanError::BadParameters(
            format!("shape {} does not match the parameter window", shape),
        )));
    }
    let n = p.n();
    if separation_polynomial(p, n).is_negligible() {
        return Err(SeminormalError::NotSeparate);
    }
    let coeffs = SeminormalCoeffs::build(p, shape)?;
    let one = F::one();
    let neg_one = F::from_i64(-1);

    if opts.eigenvalue_guard {
        for ti in 0..coeffs.len() {
            for k in 1..=n {
                for v in [coeffs.b(ti, k), coeffs.b_inv(ti, k)] {
                    if v.identity(&one) != Identity::Distinct
                        || v.identity(&neg_one) != Identity::Distinct
                    {
                        return Err(SeminormalError::AmbiguousValue(format!(
                            "eigenvalue at filling {}, position {} is not separated from a sign",
                            ti, k
                        )));
                    }
                }
            }
        }
    }

    let tri = enumerate_tri(shape, ParitySelect::Even);
    let dim = tri.len();
    let mut tab_of = Vec::with_capacity(dim);
    let mut lookup = HashMap::with_capacity(dim);
    let mut parities = Vec::with_capacity(dim);
    for (col, trip) in tri.iter().enumerate() {
        let ti = coeffs
            .index_of(&trip.tableau)
            .expect("triple enumeration walks the same fillings");
        tab_of.push(ti);
        lookup.insert((ti, trip.beta), col);
        parities.push((trip.beta.count_ones() % 2) as u8);
    }

    let epsilon = coeffs.epsilon().clone();
    let no_inverse = |what: &str, ti: usize, k: usize| {
        SeminormalError::AmbiguousValue(format!(
            "{} at filling {}, position {} is not invertible",
            what, ti, k
        ))
    };

    let mut x = Vec::with_capacity(n);
    let mut x_inv = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    for i in 1..=n {
        let mut xm = Mat::zeros(dim, dim);
        let mut xi = Mat::zeros(dim, dim);
        let mut cm = Mat::zeros(dim, dim);
        for (col, trip) in tri.iter().enumerate() {
            let ti = tab_of[col];
            // eigenvalue with exponent minus the mask sign: the plus
            // branch on clear bits, the minus branch on set bits
            let (e, einv) = if beta_bit(trip.beta, i) == 0 {
                (coeffs.b_inv(ti, i).clone(), coeffs.b(ti, i).clone())
            } else {
                (coeffs.b(ti, i).clone(), coeffs.b_inv(ti, i).clone())
            };
            xm[(col, col)] = e;
            xi[(col, col)] = einv;
            let row = lookup[&(ti, beta_flip(trip.beta, i))];
            cm[(row, col)] = if count_below(trip.beta, i).is_multiple_of(2) {
                one.clone()
            } else {
                neg_one.clone()
            };
        }
        x.push(xm);
        x_inv.push(xi);
        c.push(cm);
    }

    let mut t = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let mut tm = Mat::zeros(dim, dim);
        for (col, trip) in tri.iter().enumerate() {
            let ti = tab_of[col];
            let beta = trip.beta;
            let bi = beta_bit(beta, i);
            let bi1 = beta_bit(beta, i + 1);
            // powers of the stored pair: exponent +1 is the minus branch
            let b_neg_i = if bi == 0 {
                coeffs.b_inv(ti, i)
            } else {
                coeffs.b(ti, i)
            };
            let b_pos_i = if bi == 0 {
                coeffs.b(ti, i)
            } else {
                coeffs.b_inv(ti, i)
            };
            let b_pos_i1 = if bi1 == 0 {
                coeffs.b(ti, i + 1)
            } else {
                coeffs.b_inv(ti, i + 1)
            };
            let stay = epsilon
                .neg()
                .div(&b_neg_i.mul(b_pos_i1).sub(&one))
                .ok_or_else(|| no_inverse("stay denominator", ti, i))?;
            tm[(col, col)] = stay;
            let flip = epsilon
                .div(&b_pos_i.mul(b_pos_i1).sub(&one))
                .ok_or_else(|| no_inverse("flip denominator", ti, i))?;
            let flip = if bi == 1 { flip.neg() } else { flip };
            let row2 = lookup[&(ti, beta_flip(beta_flip(beta, i), i + 1))];
            tm[(row2, col)] = flip;
            if let Some(tj) = coeffs.swap_idx(ti, i) {
                let root = coeffs
                    .root_adjacent(ti, i)
                    .expect("standard edges carry cached roots")
                    .clone();
                let moved = if bi == 1 && bi1 == 1 { root.neg() } else { root };
                let row3 = lookup[&(tj, beta_swap(beta, i))];
                tm[(row3, col)] = moved;
            }
        }
        t.push(tm);
    }

    // trace weights: the mask free part once per filling, then one sign
    // denominator per position
    let mut shape_part = Vec::with_capacity(coeffs.len());
    for (ti, tab) in coeffs.tableaux().iter().enumerate() {
        let mut acc = F::one();
        for k in 1..=n {
            let cls = p.class_value(&p.residue(tab.box_of(k))?)?;
            let below = tab.restricted_shape(k - 1);
            for b in below.removable_boxes() {
                let other = p.class_value(&p.residue(b)?)?;
                acc = acc.mul(&cls.sub(&other));
            }
            for a in below.addable_boxes() {
                if a == tab.box_of(k) {
                    continue;
                }
                let other = p.class_value(&p.residue(a)?)?;
                acc = acc
                    .div(&cls.sub(&other))
                    .ok_or_else(|| no_inverse("weight denominator", ti, k))?;
            }
        }
        shape_part.push(acc);
    }
    let mut weights = Vec::with_capacity(dim);
    for (col, trip) in tri.iter().enumerate() {
        let ti = tab_of[col];
        let mut acc = shape_part[ti].clone();
        for k in 1..=n {
            let den = if beta_bit(trip.beta, k) == 0 {
                coeffs.b(ti, k).sub(coeffs.b_inv(ti, k))
            } else {
                coeffs.b_inv(ti, k).sub(coeffs.b(ti, k))
            };
            acc = acc
                .div(&den)
                .ok_or_else(|| no_inverse("weight sign denominator", ti, k))?;
        }
        weights.push(acc);
    }

    let b_sets = interpolation_sets(p)?;
    let resolution = p.q().resolution();
    let signs = vec![1i8; dim];

    Ok(BlockRep {
        shape: shape.clone(),
        basis: tri,
        lookup,
        tab_of,
        n,
        dim,
        x,
        x_inv,
        c,
        t,
        weights,
        parities,
        signs,
        b_sets,
        coeffs,
        resolution,
    })
}

/// Build every block of the window in parallel.
pub fn build_all_blocks<F: EngineScalar>(
    p: &ParameterSet<F>,
    opts: &BuildOpts,
) -> Result<Vec<BlockRep<F>>, SeminormalError> {
    let shapes = enumerate_multipartitions(p.n(), p.cyclotomic_params().len(), p.bullet());
    shapes
        .par_iter()
        .map(|s| build_block(s, p, opts))
        .collect()
}

/// Check every defining relation of the algebra as a matrix identity on
/// one block, including the braid relations and the polynomial relation of
/// the first eigenvalue generator. Residuals are max norms against the
/// block tolerance.
pub fn verify_relations<F: EngineScalar>(
    rep: &BlockRep<F>,
    p: &ParameterSet<F>,
) -> Result<CheckReport, SeminormalError> {
    let n = rep.n;
    let bound = rep.tau_rel();
    let mut report = CheckReport::new();
    let eps = rep.coeffs.epsilon().clone();
    let id: Mat<F> = Mat::identity(rep.dim);

    for i in 1..n {
        let ti = rep.t_mat(i);
        let lhs = mul(ti, ti);
        let rhs = ti.scale(&eps).add(&id);
        report.push(
            format!("T{i}^2 = eps T{i} + 1"),
            max_norm(&lhs.sub(&rhs)),
            &bound,
        );
    }
    for i in 1..n.saturating_sub(1) {
        let a = rep.t_mat(i);
        let b = rep.t_mat(i + 1);
        let lhs = mul(&mul(a, b), a);
        let rhs = mul(&mul(b, a), b);
        report.push(
            format!("T{i} T{} T{i} braid", i + 1),
            max_norm(&lhs.sub(&rhs)),
            &bound,
        );
    }
    for i in 1..n {
        for j in i + 2..n {
            let a = rep.t_mat(i);
            let b = rep.t_mat(j);
            report.push(
                format!("T{i} T{j} commute"),
                max_norm(&mul(a, b).sub(&mul(b, a))),
                &bound,
            );
        }
    }
    for i in 1..=n {
        report.push(
            format!("X{i} X{i}^-1 = 1"),
            max_norm(&mul(rep.x(i), rep.x_inv(i)).sub(&id)),
            &bound,
        );
        for j in i + 1..=n {
            report.push(
                format!("X{i} X{j} commute"),
                max_norm(&mul(rep.x(i), rep.x(j)).sub(&mul(rep.x(j), rep.x(i)))),
                &bound,
            );
        }
    }
    for i in 1..=n {
        report.push(
            format!("C{i}^2 = 1"),
            max_norm(&mul(rep.c_mat(i), rep.c_mat(i)).sub(&id)),
            &bound,
        );
        for j in i + 1..=n {
            let anti = mul(rep.c_mat(i), rep.c_mat(j)).add(&mul(rep.c_mat(j), rep.c_mat(i)));
            report.push(format!("C{i} C{j} anticommute"), max_norm(&anti), &bound);
        }
    }
    for i in 1..n {
        let ti = rep.t_mat(i);
        let cc = mul(rep.c_mat(i), rep.c_mat(i + 1));
        // T_i X_i = X_{i+1} T_i - eps (X_{i+1} + C_i C_{i+1} X_i)
        let lhs = mul(ti, rep.x(i));
        let rhs = mul(rep.x(i + 1), ti).sub(&rep.x(i + 1).add(&mul(&cc, rep.x(i))).scale(&eps));
        report.push(
            format!("T{i} X{i} crossing"),
            max_norm(&lhs.sub(&rhs)),
            &bound,
        );
        // T_i X_{i+1} = X_i T_i + eps (1 - C_i C_{i+1}) X_{i+1}
        let lhs = mul(ti, rep.x(i + 1));
        let rhs = mul(rep.x(i), ti)
            .add(&rep.x(i + 1).sub(&mul(&cc, rep.x(i + 1))).scale(&eps));
        report.push(
            format!("T{i} X{} crossing", i + 1),
            max_norm(&lhs.sub(&rhs)),
            &bound,
        );
        for j in 1..=n {
            if j == i || j == i + 1 {
                continue;
            }
            report.push(
                format!("T{i} X{j} commute"),
                max_norm(&mul(ti, rep.x(j)).sub(&mul(rep.x(j), ti))),
                &bound,
            );
        }
        // T_i C_i = C_{i+1} T_i
        report.push(
            format!("T{i} C{i} crossing"),
            max_norm(&mul(ti, rep.c_mat(i)).sub(&mul(rep.c_mat(i + 1), ti))),
            &bound,
        );
        // T_i C_{i+1} = C_i T_i - eps (C_i - C_{i+1})
        let lhs = mul(ti, rep.c_mat(i + 1));
        let rhs = mul(rep.c_mat(i), ti)
            .sub(&rep.c_mat(i).sub(rep.c_mat(i + 1)).scale(&eps));
        report.push(
            format!("T{i} C{} crossing", i + 1),
            max_norm(&lhs.sub(&rhs)),
            &bound,
        );
        for j in 1..=n {
            if j == i || j == i + 1 {
                continue;
            }
            report.push(
                format!("T{i} C{j} commute"),
                max_norm(&mul(ti, rep.c_mat(j)).sub(&mul(rep.c_mat(j), ti))),
                &bound,
            );
        }
    }
    for i in 1..=n {
        // X_i C_i = C_i X_i^-1
        report.push(
            format!("X{i} C{i} inversion"),
            max_norm(&mul(rep.x(i), rep.c_mat(i)).sub(&mul(rep.c_mat(i), rep.x_inv(i)))),
            &bound,
        );
        for j in 1..=n {
            if j == i {
                continue;
            }
            report.push(
                format!("X{i} C{j} commute"),
                max_norm(&mul(rep.x(i), rep.c_mat(j)).sub(&mul(rep.c_mat(j), rep.x(i)))),
                &bound,
            );
        }
    }
    if n >= 1 {
        let mut f = id.clone();
        for qv in p.cyclotomic_params() {
            let cls = p.class_value(qv)?;
            let factor = rep.x(1).add(rep.x_inv(1)).sub(&id.scale(&cls));
            f = mul(&f, &factor);
        }
        report.push("f(X1) = 0", max_norm(&f), &bound);
    }
    Ok(report)
}

/// Diagonal of the interpolation product for the idempotent of one basis
/// column: the product over positions and interpolation points of
/// (eigenvalue - point)/(target - point), evaluated entrywise on the
/// diagonal eigenvalue matrices.
fn idempotent_diagonal<F: EngineScalar>(
    rep: &BlockRep<F>,
    t_col: usize,
) -> Result<Vec<F>, SeminormalError> {
    let n = rep.n;
    let ti = rep.tab_of[t_col];
    let beta_t = rep.basis[t_col].beta;
    let mut out = vec![F::one(); rep.dim];
    for k in 1..=n {
        let positive_power = beta_bit(beta_t, k) == 0;
        let target = rep.coeffs.b_inv(ti, k);
        for b in rep.interpolation_set(k) {
            match b.identity(target) {
                Identity::Equal => continue,
                Identity::Near => {
                    return Err(SeminormalError::AmbiguousValue(
                        "interpolation point inside the audit zone of a target".into(),
                    ))
                }
                Identity::Distinct => {}
            }
            let den = target.sub(b);
            for (u_col, entry) in out.iter_mut().enumerate() {
                let tu = rep.tab_of[u_col];
                let set = beta_bit(rep.basis[u_col].beta, k) == 1;
                // eigenvalue of the matrix with the mask directed power
                let e = match (positive_power, set) {
                    (true, false) => rep.coeffs.b_inv(tu, k),
                    (true, true) => rep.coeffs.b(tu, k),
                    (false, false) => rep.coeffs.b(tu, k),
                    (false, true) => rep.coeffs.b_inv(tu, k),
                };
                let num = e.sub(b);
                let frac = num.div(&den).ok_or_else(|| {
                    SeminormalError::AmbiguousValue(
                        "interpolation denominator is not invertible".into(),
                    )
                })?;
                *entry = entry.mul(&frac);
            }
        }
    }
    Ok(out)
}

fn diag_sandwich<F: Field>(left: &[F], m: &Mat<F>, right: &[F]) -> Mat<F> {
    Mat::from_fn(m.rows(), m.cols(), |i, j| {
        left[i].mul(&m[(i, j)]).mul(&right[j])
    })
}

/// Product of the odd generator matrices selected by a mask, ascending
/// positions; `reversed` gives the inverse since each factor squares to
/// one.
fn c_power<F: EngineScalar>(rep: &BlockRep<F>, beta: u64, reversed: bool) -> Mat<F> {
    let mut ks: Vec<usize> = (1..=rep.n).filter(|&k| beta_bit(beta, k) == 1).collect();
    if reversed {
        ks.reverse();
    }
    let mut acc = Mat::identity(rep.dim);
    for k in ks {
        acc = mul(&acc, rep.c_mat(k));
    }
    acc
}

/// Matrix of the intertwiner word from filling `from` to filling `to`:
/// each step is T_k plus the stay and double sign corrections evaluated at
/// the eigenvalues of the filling before the step.
fn phi_word_matrix<F: EngineScalar>(
    rep: &BlockRep<F>,
    to: usize,
    from: usize,
) -> Result<Mat<F>, SeminormalError> {
    let one = F::one();
    let eps = rep.coeffs.epsilon().clone();
    let mut acc = Mat::identity(rep.dim);
    for (u, k) in rep.coeffs.word_path(to, from)? {
        let x = rep.coeffs.b(u, k);
        let x_inv = rep.coeffs.b_inv(u, k);
        let y = rep.coeffs.b(u, k + 1);
        let a = eps
            .div(&x_inv.mul(y).sub(&one))
            .ok_or_else(|| SeminormalError::AmbiguousValue("intertwiner stay term".into()))?;
        let b = eps
            .div(&x.mul(y).sub(&one))
            .ok_or_else(|| SeminormalError::AmbiguousValue("intertwiner sign term".into()))?;
        let cc = mul(rep.c_mat(k), rep.c_mat(k + 1));
        let phi = rep
            .t_mat(k)
            .add(&Mat::identity(rep.dim).scale(&a))
            .sub(&cc.scale(&b));
        acc = mul(&phi, &acc);
    }
    Ok(acc)
}

/// The basis element from row S to column T routed through the anchor
/// filling, as a matrix: the unit projections of the sandwiched word
/// product. With unit outer idempotents this is a single entry.
fn routed_basis_matrix<F: EngineScalar>(
    rep: &BlockRep<F>,
    s_col: usize,
    t_col: usize,
    via: Option<usize>,
) -> Result<Mat<F>, SeminormalError> {
    let si = rep.tab_of[s_col];
    let ti = rep.tab_of[t_col];
    let mut m = match via {
        Some(w) => mul(
            &phi_word_matrix(rep, si, w)?,
            &phi_word_matrix(rep, w, ti)?,
        ),
        None => phi_word_matrix(rep, si, ti)?,
    };
    m = mul(&c_power(rep, rep.basis[s_col].beta, false), &m);
    m = mul(&m, &c_power(rep, rep.basis[t_col].beta, true));
    let mut out = Mat::zeros(rep.dim, rep.dim);
    out[(s_col, t_col)] = m[(s_col, t_col)].clone();
    Ok(out)
}

/// Audit the multiplication structure of the basis through the anchor
/// filling `w`: the interpolation idempotents against the basis units,
/// their completeness and centrality, orthogonality of sandwiched basis
/// elements with distinct inner columns, the structure constant law with
/// the root free squared transition coefficients, and the gauge relation
/// between the direct and the routed words, which holds up to the sign
/// freedom of the roots and is compared sign resolved.
pub fn seminormal_product_check<F: EngineScalar>(
    rep: &BlockRep<F>,
    w: &StandardTableau,
    trials: usize,
    seed: u64,
) -> Result<CheckReport, SeminormalError> {
    let mut report = CheckReport::new();
    let bound = rep.tau_rel();
    let coeff_bound = rep.resolution.mul_i64(10);
    let w_idx = rep
        .coeffs
        .index_of(w)
        .ok_or(SeminormalError::Shape(CombError::ShapeMismatch))?;

    // interpolation idempotents against the unit diagonals
    let mut diags = Vec::with_capacity(rep.dim);
    let mut worst = Dyadic::zero();
    for t_col in 0..rep.dim {
        let diag = idempotent_diagonal(rep, t_col)?;
        for (u_col, v) in diag.iter().enumerate() {
            let target = if u_col == t_col { F::one() } else { F::zero() };
            worst = dmax(worst, v.sub(&target).magnitude());
        }
        diags.push(diag);
    }
    report.push("interpolation idempotents match the basis units", worst, &bound);

    // completeness and centrality of the summed idempotent
    let mut total = vec![F::zero(); rep.dim];
    for diag in &diags {
        for (acc, v) in total.iter_mut().zip(diag.iter()) {
            *acc = acc.add(v);
        }
    }
    let mut worst = Dyadic::zero();
    for v in &total {
        worst = dmax(worst, v.sub(&F::one()).magnitude());
    }
    report.push("idempotents sum to the identity", worst, &bound);
    let fsum = Mat::from_fn(rep.dim, rep.dim, |i, j| {
        if i == j {
            total[i].clone()
        } else {
            F::zero()
        }
    });
    let mut worst = Dyadic::zero();
    let mut gens: Vec<&Mat<F>> = Vec::new();
    for i in 1..=rep.n {
        gens.push(rep.x(i));
        gens.push(rep.c_mat(i));
    }
    for i in 1..rep.n {
        gens.push(rep.t_mat(i));
    }
    for g in gens {
        worst = dmax(worst, max_norm(&mul(&fsum, g).sub(&mul(g, &fsum))));
    }
    report.push("central idempotent commutes with the generators", worst, &bound);

    // idempotent squares via a sampled interpolation diagonal
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if rep.dim > 0 {
        let t_col = rng.gen_range(0..rep.dim);
        let d = &diags[t_col];
        let mut worst = Dyadic::zero();
        for v in d.iter() {
            worst = dmax(worst, v.mul(v).sub(v).magnitude());
        }
        report.push("sampled idempotent squares to itself", worst, &bound);
    }

    if rep.dim > 1 {
        // orthogonality with distinct inner columns, idempotent sandwiched
        let mut worst = Dyadic::zero();
        let mut worst_bound = bound.clone();
        for _ in 0..trials.max(1) {
            let s_col = rng.gen_range(0..rep.dim);
            let t_col = rng.gen_range(0..rep.dim);
            let mut u_col = rng.gen_range(0..rep.dim);
            if u_col == t_col {
                u_col = (u_col + 1) % rep.dim;
            }
            let v_col = rng.gen_range(0..rep.dim);
            let m1 = routed_basis_matrix(rep, s_col, t_col, Some(w_idx))?;
            let m2 = routed_basis_matrix(rep, u_col, v_col, Some(w_idx))?;
            let f1 = diag_sandwich(&diags[s_col], &m1, &diags[t_col]);
            let f2 = diag_sandwich(&diags[u_col], &m2, &diags[v_col]);
            let p = mul(&f1, &f2);
            let scale = dmax(Dyadic::from_int(1), max_norm(&f1).mul(&max_norm(&f2)));
            worst = dmax(worst, max_norm(&p));
            worst_bound = dmax(worst_bound, bound.mul(&scale));
        }
        report.push(
            "distinct inner columns multiply to zero",
            worst,
            &worst_bound,
        );

        // structure constants against the root free coefficient products
        let mut worst_matrix = Dyadic::zero();
        let mut worst_coeff = Dyadic::zero();
        for _ in 0..trials.max(1) {
            let s_col = rng.gen_range(0..rep.dim);
            let t_col = rng.gen_range(0..rep.dim);
            let v_col = rng.gen_range(0..rep.dim);
            let m1 = routed_basis_matrix(rep, s_col, t_col, Some(w_idx))?;
            let m2 = routed_basis_matrix(rep, t_col, v_col, Some(w_idx))?;
            let msv = routed_basis_matrix(rep, s_col, v_col, Some(w_idx))?;
            let cwt = rep.coeffs.c_pair_squared(rep.tab_of[t_col], w_idx)?;
            let prod = mul(&m1, &m2);
            let target = msv.scale(&cwt);
            let scale = dmax(Dyadic::from_int(1), max_norm(&target));
            worst_matrix = dmax(
                worst_matrix,
                max_norm(&prod.sub(&target)).div(&scale),
            );
            let a = &prod[(s_col, v_col)];
            let b = target[(s_col, v_col)].clone();
            worst_coeff = dmax(worst_coeff, rel_dev(a, &b));
        }
        report.push(
            "product equals the squared transition coefficient times the basis element",
            worst_matrix,
            &bound,
        );
        report.push(
            "structure coefficient relative deviation",
            worst_coeff,
            &coeff_bound,
        );

        // direct word against the routed word, sign resolved
        let mut worst = Dyadic::zero();
        for _ in 0..trials.max(1) {
            let s_col = rng.gen_range(0..rep.dim);
            let t_col = rng.gen_range(0..rep.dim);
            let direct = routed_basis_matrix(rep, s_col, t_col, None)?;
            let routed = routed_basis_matrix(rep, s_col, t_col, Some(w_idx))?;
            let si = rep.tab_of[s_col];
            let ti = rep.tab_of[t_col];
            let num = rep.coeffs.c_pair(si, ti)?;
            let den = rep
                .coeffs
                .c_pair(si, w_idx)?
                .mul(&rep.coeffs.c_pair(w_idx, ti)?);
            let ratio = num.div(&den).ok_or_else(|| {
                SeminormalError::AmbiguousValue("transition coefficient is not invertible".into())
            })?;
            let scaled = routed.scale(&ratio);
            let r_plus = max_norm(&direct.sub(&scaled));
            let r_minus = max_norm(&direct.add(&scaled));
            worst = dmax(
                worst,
                if r_plus.cmp_val(&r_minus) == Ordering::Greater {
                    r_minus
                } else {
                    r_plus
                },
            );
        }
        report.push(
            "direct word matches the routed word up to the root sign",
            worst,
            &bound,
        );
    }
    Ok(report)
}

/// The trace weights of the block, one per basis idempotent.
pub fn form_values<F: Field>(rep: &BlockRep<F>) -> &[F] {
    rep.weights()
}

/// The trace of an element given by its matrix: the basis is trace
/// orthogonal, so only the diagonal against the weights survives.
pub fn evaluate_form<F: Field>(rep: &BlockRep<F>, element: &Mat<F>) -> F {
    let mut acc = F::zero();
    for i in 0..rep.dim {
        acc = acc.add(&element[(i, i)].mul(&rep.weights[i]));
    }
    acc
}

/// Random homogeneous matrix supported on entries of the requested parity,
/// a few entries per column.
fn random_homogeneous<F: Field>(
    rep: &BlockRep<F>,
    parity: u8,
    rng: &mut ChaCha8Rng,
) -> Mat<F> {
    let mut m = Mat::zeros(rep.dim, rep.dim);
    let per_col = 3.min(rep.dim);
    for j in 0..rep.dim {
        for _ in 0..per_col {
            let i = rng.gen_range(0..rep.dim);
            if rep.parities[i] ^ rep.parities[j] != parity {
                continue;
            }
            let v = rng.gen_range(-3i64..=3);
            m[(i, j)] = F::from_i64(v);
        }
    }
    m
}

/// Supersymmetry of the trace on random homogeneous pairs, and the sign
/// pattern of the weights under mask flips.
pub fn form_supersymmetry_check<F: EngineScalar>(
    rep: &BlockRep<F>,
    trials: usize,
    seed: u64,
) -> CheckReport {
    let mut report = CheckReport::new();
    let bound = rep.resolution.mul_i64(10);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Dyadic::zero();
    for _ in 0..trials {
        let pa = rng.gen_range(0..2u8);
        let pb = rng.gen_range(0..2u8);
        let a = random_homogeneous(rep, pa, &mut rng);
        let b = random_homogeneous(rep, pb, &mut rng);
        let lhs = evaluate_form(rep, &mul(&a, &b));
        let rhs = evaluate_form(rep, &mul(&b, &a));
        let rhs = if pa & pb == 1 { rhs.neg() } else { rhs };
        let diff = lhs.sub(&rhs).magnitude();
        let scale = dmax(
            Dyadic::from_int(1),
            dmax(lhs.magnitude(), rhs.magnitude()),
        );
        worst = dmax(worst, diff.div(&scale));
    }
    report.push("trace is supersymmetric on homogeneous pairs", worst, &bound);

    // flipping one mask bit negates the weight; flipping all of them
    // scales by the parity of the size
    let mut worst = Dyadic::zero();
    for col in 0..rep.dim {
        let ti = rep.tab_of[col];
        let beta = rep.basis[col].beta;
        for k in 1..=rep.n {
            let other = rep.lookup[&(ti, beta_flip(beta, k))];
            worst = dmax(
                worst,
                rel_dev(&rep.weights[col], &rep.weights[other].neg()),
            );
        }
        let full = rep.lookup[&(ti, beta ^ ((1u64 << rep.n) - 1))];
        let target = if rep.n % 2 == 1 {
            rep.weights[full].neg()
        } else {
            rep.weights[full].clone()
        };
        worst = dmax(worst, rel_dev(&rep.weights[col], &target));
    }
    report.push("weights flip sign with each mask bit", worst, &bound);
    report
}

/// Whether box b comes after the pivot in the orientation order of the
/// potential. Toward the first filling the order is component, row, then
/// reversed column; toward the last it is reversed component, column, then
/// reversed row. The reversed tiebreaks matter: they are what place both
/// ladder neighbours of a moved box on the correct side of the pivot, so
/// that each adjacent swap along a walk picks up exactly its two ladder
/// class differences and the potential telescopes.
fn potential_after(toward_first: bool, b: BoxPos, pivot: BoxPos) -> bool {
    use std::cmp::Reverse;
    if toward_first {
        (b.comp, b.row, Reverse(b.col)) > (pivot.comp, pivot.row, Reverse(pivot.col))
    } else {
        (Reverse(b.comp), b.col, Reverse(b.row)) > (Reverse(pivot.comp), pivot.col, Reverse(pivot.row))
    }
}

/// Potential of one filling: over every position k, class differences of
/// res(k) against the addable boxes of the subshape below k that come after
/// the box of k, divided by the same differences against the removable
/// boxes after it, off the diagonal.
fn potential_value<F: EngineScalar>(
    p: &ParameterSet<F>,
    t: &StandardTableau,
    toward_first: bool,
) -> Result<F, SeminormalError> {
    let shape = t.shape().clone();
    let mut acc = F::one();
    for k in 1..=t.n() {
        let cls = p.class_value(&p.residue(t.box_of(k))?)?;
        let below = t.restricted_shape(k - 1);
        let pivot = t.box_of(k);
        for a in below.addable_boxes() {
            if !potential_after(toward_first, a, pivot) {
                continue;
            }
            acc = acc.mul(&cls.sub(&p.class_value(&p.residue(a)?)?));
        }
        for b in below.removable_boxes() {
            if !potential_after(toward_first, b, pivot) || shape.on_diagonal(b) {
                continue;
            }
            let d = cls.sub(&p.class_value(&p.residue(b)?)?);
            acc = acc.div(&d).ok_or_else(|| {
                SeminormalError::AmbiguousValue("class difference is not invertible".into())
            })?;
        }
    }
    Ok(acc)
}

/// Closed form of the squared transition coefficient from t to the first or
/// the last filling of its shape, as the quotient of the two potentials.
/// Any other target is rejected.
pub fn closed_pair_product<F: EngineScalar>(
    p: &ParameterSet<F>,
    t: &StandardTableau,
    w: &StandardTableau,
) -> Result<F, SeminormalError> {
    let toward_first = if *w == StandardTableau::row_reading(t.shape()) {
        true
    } else if *w == StandardTableau::column_reading(t.shape()) {
        false
    } else {
        return Err(SeminormalError::AmbiguousValue(
            "closed product targets the first or the last filling".into(),
        ));
    };
    let num = potential_value(p, t, toward_first)?;
    let den = potential_value(p, w, toward_first)?;
    num.div(&den).ok_or_else(|| {
        SeminormalError::AmbiguousValue("potential is not invertible".into())
    })
}

/// Compare the stepwise squared transition coefficients against the closed
/// pair product, toward the first and the last filling of the shape. Works
/// for every flavour.
pub fn c_cross_check<F: EngineScalar>(
    p: &ParameterSet<F>,
    shape: &MultiPartition,
) -> Result<CheckReport, SeminormalError> {
    if separation_polynomial(p, shape.size()).is_negligible() {
        return Err(SeminormalError::NotSeparate);
    }
    let coeffs = SeminormalCoeffs::build(p, shape)?;
    let first = coeffs
        .index_of(&StandardTableau::row_reading(shape))
        .expect("row reading filling is standard");
    let last = coeffs
        .index_of(&StandardTableau::column_reading(shape))
        .expect("column reading filling is standard");
    let bound = p.q().resolution().mul_i64(10);
    let mut report = CheckReport::new();

    for ti in 0..coeffs.len() {
        let t = &coeffs.tableaux()[ti];
        let stepwise = coeffs.c_pair_squared(ti, first)?;
        let closed = closed_pair_product(p, t, &coeffs.tableaux()[first])?;
        report.push(
            format!("squared coefficient to the first filling at {}", ti),
            rel_dev(&stepwise, &closed),
            &bound,
        );
        let stepwise = coeffs.c_pair_squared(ti, last)?;
        let closed = closed_pair_product(p, t, &coeffs.tableaux()[last])?;
        report.push(
            format!("squared coefficient to the last filling at {}", ti),
            rel_dev(&stepwise, &closed),
            &bound,
        );
    }

    // empty word cases close at one
    let one = F::one();
    report.push(
        "empty word at the first filling",
        rel_dev(&coeffs.c_pair_squared(first, first)?, &one),
        &bound,
    );
    report.push(
        "empty word at the last filling",
        rel_dev(&coeffs.c_pair_squared(last, last)?, &one),
        &bound,
    );
    Ok(report)
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Squared even class count of one shape, weighted by the parity of its
/// diagonal.
pub fn block_square_dimension(shape: &MultiPartition) -> u128 {
    let d = shape.diagonal_boxes().len();
    let even = tri_even_count(shape) as u128;
    (1u128 << (d % 2)) * even * even
}

/// Both sides of the dimension identity: the sum of the weighted squared
/// class counts over all shapes against r^n 2^n n!, where r counts the
/// eigenvalue branches per position.
pub fn pbw_dimension_identity(bullet: Bullet, m: usize, n: usize) -> (u128, u128) {
    let lhs = enumerate_multipartitions(n, m, bullet)
        .iter()
        .map(block_square_dimension)
        .sum();
    let r = (2 * m + bullet.strict_count()) as u128;
    let rhs = r.pow(n as u32) * (1u128 << n) * factorial(n);
    (lhs, rhs)
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn fmt_entry(z: &PrecComplex, digits: u32) -> String {
    format!("{},{}", z.re().to_decimal(digits), z.im().to_decimal(digits))
}

/// Write one block to a text file: a commented header with the shape, the
/// precision and the basis ordering, then each generator matrix dense in
/// decimal, row major, entries as re,im pairs, and the weight vector.
pub fn dump_block(rep: &BlockRep<PrecComplex>, dir: &Path) -> std::io::Result<PathBuf> {
    let digits = 40u32;
    let bits = rep
        .weights
        .first()
        .map(|w| w.precision_bits())
        .unwrap_or(64);
    let path = dir.join(format!("block_{}.txt", sanitize(&rep.shape.encode())));
    let mut out = String::new();
    out.push_str("# seminormal block dump\n");
    out.push_str(&format!("# shape: {}\n", rep.shape.encode()));
    out.push_str(&format!(
        "# dimension: {} precision_bits: {} decimal_digits: {}\n",
        rep.dim, bits, digits
    ));
    out.push_str("# basis columns: index; filling; mask bits ascending by value\n");
    for (i, trip) in rep.basis.iter().enumerate() {
        let mask: String = (1..=rep.n)
            .map(|k| if beta_bit(trip.beta, k) == 1 { '1' } else { '0' })
            .collect();
        out.push_str(&format!("# {}; {}; {}\n", i, trip.tableau.encode(), mask));
    }
    out.push_str("# matrices are dense, row major, entry = re,im\n");
    let mut blocks: Vec<(String, &Mat<PrecComplex>)> = Vec::new();
    for i in 1..=rep.n {
        blocks.push((format!("X_{}", i), rep.x(i)));
    }
    for i in 1..=rep.n {
        blocks.push((format!("C_{}", i), rep.c_mat(i)));
    }
    for i in 1..rep.n {
        blocks.push((format!("T_{}", i), rep.t_mat(i)));
    }
    for (name, m) in blocks {
        out.push_str(&format!("matrix {}\n", name));
        for i in 0..m.rows() {
            let row: Vec<String> = (0..m.cols()).map(|j| fmt_entry(&m[(i, j)], digits)).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out.push_str("weights\n");
    let row: Vec<String> = rep.weights.iter().map(|w| fmt_entry(w, digits)).collect();
    out.push_str(&row.join(" "));
    out.push('\n');
    std::fs::write(&path, out)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn params(n: usize) -> ParameterSet<PrecComplex> {
        let bits = 192;
        let q = PrecComplex::from_rational(&rat(3, 2), bits);
        let big_q = vec![PrecComplex::from_rational(&rat(5, 7), bits)];
        ParameterSet::new(q, big_q, Bullet::Zero, n).unwrap()
    }

    #[test]
    fn mask_helpers() {
        assert_eq!(beta_bit(0b101, 1), 1);
        assert_eq!(beta_bit(0b101, 2), 0);
        assert_eq!(beta_flip(0b101, 2), 0b111);
        assert_eq!(beta_swap(0b01, 1), 0b10);
        assert_eq!(beta_swap(0b11, 1), 0b11);
        assert_eq!(count_below(0b0111, 3), 2);
    }

    #[test]
    fn edge_coefficient_is_bitwise_symmetric() {
        let bits = 192;
        let b = PrecComplex::from_rational(&rat(7, 3), bits);
        let b2 = PrecComplex::from_rational(&rat(-4, 9), bits);
        let eps2 = PrecComplex::from_rational(&rat(25, 36), bits);
        let lhs = edge_coefficient(&eps2, &b, &b2).unwrap();
        let rhs = edge_coefficient(&eps2, &b2, &b).unwrap();
        assert_eq!(lhs.re().mant(), rhs.re().mant());
        assert_eq!(lhs.im().mant(), rhs.im().mant());
    }

    #[test]
    fn dimension_identity_tiny() {
        for bullet in [Bullet::Zero, Bullet::S, Bullet::Ss] {
            for n in 0..=3 {
                let (lhs, rhs) = pbw_dimension_identity(bullet, 1, n);
                assert_eq!(lhs, rhs, "{:?} n={}", bullet, n);
            }
        }
    }

    #[test]
    fn block_shapes_and_report_plumbing() {
        let p = params(2);
        let shape = MultiPartition::parse("0:[2]").unwrap();
        let rep = build_block(&shape, &p, &BuildOpts::default()).unwrap();
        assert_eq!(rep.dim(), 4);
        assert_eq!(rep.n(), 2);
        assert_eq!(rep.column_signs(), &[1, 1, 1, 1]);
        let report = verify_relations(&rep, &p).unwrap();
        assert!(report.all_pass(), "worst: {:?}", report.worst());
        assert!(report.worst().is_some());
    }

    #[test]
    fn wrong_flavour_is_rejected() {
        let bits = 192;
        let q = PrecComplex::from_rational(&rat(3, 2), bits);
        let p = ParameterSet::new(q, vec![], Bullet::S, 1).unwrap();
        let shape = MultiPartition::parse("s:[1]").unwrap();
        match build_block(&shape, &p, &BuildOpts::default()) {
            Err(SeminormalError::UnsupportedBullet(Bullet::S)) => {}
            other => panic!("expected the flavour rejection, got {:?}", other.err()),
        }
    }

    #[test]
    fn degenerate_parameters_are_rejected() {
        let bits = 192;
        let q = PrecComplex::from_rational(&rat(3, 2), bits);
        // the cyclotomic parameter collides with q, killing the separation
        // polynomial
        let big_q = vec![PrecComplex::from_rational(&rat(3, 2), bits)];
        let p = ParameterSet::new(q, big_q, Bullet::Zero, 1).unwrap();
        let shape = MultiPartition::parse("0:[1]").unwrap();
        match build_block(&shape, &p, &BuildOpts::default()) {
            Err(SeminormalError::NotSeparate) => {}
            other => panic!("expected the separation rejection, got {:?}", other.err()),
        }
    }
}
