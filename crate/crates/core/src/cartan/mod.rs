//! Cartan data attached to a Hecke-Clifford parameter set.
//!
//! From (q, Q_1..Q_m, bullet, n) this module builds the finite node set
//! obtained by sweeping the residue classes 𝚚(q^{2l}Q) over the size-n
//! window, assembles the Cartan matrix and symmetrizer, labels each
//! connected component with its ambient Dynkin type, and derives the
//! graded invariants that depend on that data: tableau degrees, shape
//! defects, the separation polynomial and the unremovability test.

pub mod params;

use crate::combinatorics::{
    enumerate_multipartitions, enumerate_std_tableaux, Bullet, BoxPos, CompParam, MultiPartition,
    StandardTableau,
};
use crate::scalar::{Field, FieldSqrt};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CartanError {
    /// A numeric value sits inside the audit zone where equal and distinct
    /// field elements cannot be told apart at the working precision.
    #[error("ambiguous genericity: {0}")]
    AmbiguousGenericity(String),
    /// The parameters fall outside the classified regimes.
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),
    /// A residue class does not match any node of the datum.
    #[error("residue class not in the node set: {0}")]
    UnknownResidueClass(String),
    /// Malformed or inconsistent input data.
    #[error("bad parameters: {0}")]
    BadParameters(String),
}

/// Outcome of testing a scalar for being a root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnityProbe {
    /// Primitive k-th root of unity, exactly.
    Primitive(u64),
    /// Certified not a root of unity of any order up to the probe bound.
    NotRoot,
    /// Too close to a root of unity to decide at the working precision.
    Ambiguous,
}

/// Three-way identity test used for node bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    Equal,
    Distinct,
    /// Inside the audit zone: closer than 10 tolerances but not equal.
    Near,
}

/// Scalar backends that can drive the classification.
pub trait ParamScalar: Field {
    /// Whether equality tests in this backend are exact.
    fn exact_backend() -> bool;
    /// Root-of-unity probe up to `max_order` (the bound is only consulted
    /// by inexact backends; exact ones answer from structure).
    fn unity_probe(&self, max_order: u64) -> UnityProbe;
    /// Identity test with an audit zone for inexact backends.
    fn identity(&self, other: &Self) -> Identity;
}

impl ParamScalar for crate::scalar::CycloRational {
    fn exact_backend() -> bool {
        true
    }

    fn unity_probe(&self, _max_order: u64) -> UnityProbe {
        match self.root_of_unity_order() {
            Some(k) => UnityProbe::Primitive(k),
            None => UnityProbe::NotRoot,
        }
    }

    fn identity(&self, other: &Self) -> Identity {
        if self == other {
            Identity::Equal
        } else {
            Identity::Distinct
        }
    }
}

impl ParamScalar for crate::scalar::PrecComplex {
    fn exact_backend() -> bool {
        false
    }

    fn unity_probe(&self, max_order: u64) -> UnityProbe {
        let tau = self.tau();
        let audit = tau.mul_i64(10);
        let one = Self::one().with_bits(self.precision_bits());
        let mut p = one.clone();
        for _ in 1..=max_order {
            p = p.mul(self);
            if p.dist(&one).cmp_val(&audit) != std::cmp::Ordering::Greater {
                return UnityProbe::Ambiguous;
            }
        }
        UnityProbe::NotRoot
    }

    fn identity(&self, other: &Self) -> Identity {
        let d = self.dist(other);
        // tolerance of the better-resolved operand; an integer literal
        // carries zero fraction bits and must not dictate the tolerance
        let tau = if self.precision_bits() >= other.precision_bits() {
            self.tau()
        } else {
            other.tau()
        };
        if d.cmp_val(&tau) != std::cmp::Ordering::Greater {
            return Identity::Equal;
        }
        if d.cmp_val(&tau.mul_i64(10)) != std::cmp::Ordering::Greater {
            return Identity::Near;
        }
        Identity::Distinct
    }
}

fn ipow<F: Field>(base: &F, e: i64) -> F {
    let b = if e < 0 {
        base.inv().expect("power base must be a unit")
    } else {
        base.clone()
    };
    let mut acc = F::one();
    let mut cur = b;
    let mut k = e.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul(&cur);
        }
        cur = cur.mul(&cur);
        k >>= 1;
    }
    acc
}

fn comp_param_for(bullet: Bullet, comp: usize) -> CompParam {
    let sc = bullet.strict_count();
    if comp < sc {
        if bullet == Bullet::Ss && comp == 0 {
            CompParam::MinusQ
        } else {
            CompParam::PlusQ
        }
    } else {
        CompParam::Ordinary(comp - sc + 1)
    }
}

/// The input data: a deformation parameter q, the cyclotomic parameters,
/// the flavour and the size window.
#[derive(Debug, Clone)]
pub struct ParameterSet<F: ParamScalar> {
    q: F,
    big_q: Vec<F>,
    bullet: Bullet,
    n: usize,
    /// Structural exponents for cyclotomic parameters declared as eps*q^k.
    /// Carried so that inexact backends can classify without having to
    /// certify the exponent numerically.
    declared_exp: Vec<Option<(bool, i64)>>,
}

impl<F: ParamScalar> ParameterSet<F> {
    pub fn new(q: F, big_q: Vec<F>, bullet: Bullet, n: usize) -> Result<Self, CartanError> {
        let m = big_q.len();
        Self::with_declared(q, big_q, vec![None; m], bullet, n)
    }

    /// As `new`, with structural exponent declarations for the entries of
    /// `big_q` that were given in the form eps*q^k.
    pub fn with_declared(
        q: F,
        big_q: Vec<F>,
        declared_exp: Vec<Option<(bool, i64)>>,
        bullet: Bullet,
        n: usize,
    ) -> Result<Self, CartanError> {
        if declared_exp.len() != big_q.len() {
            return Err(CartanError::BadParameters(
                "declared exponent list length differs from the parameter list".into(),
            ));
        }
        let q_inv = q
            .inv()
            .ok_or_else(|| CartanError::BadParameters("q must be a unit".into()))?;
        let q2 = q.mul(&q);
        for (target, label) in [(F::one(), "1"), (F::from_i64(-1), "-1")] {
            match q2.identity(&target) {
                Identity::Equal => {
                    return Err(CartanError::BadParameters(format!(
                        "q^2 = {} is excluded",
                        label
                    )))
                }
                Identity::Near => {
                    return Err(CartanError::AmbiguousGenericity(format!(
                        "q^2 within audit distance of {}",
                        label
                    )))
                }
                Identity::Distinct => {}
            }
        }
        if q.add(&q_inv).inv().is_none() {
            return Err(CartanError::BadParameters("q + q^-1 must be a unit".into()));
        }
        for (i, v) in big_q.iter().enumerate() {
            if v.inv().is_none() {
                return Err(CartanError::BadParameters(format!(
                    "Q_{} must be a unit",
                    i + 1
                )));
            }
        }
        Ok(ParameterSet {
            q,
            big_q,
            bullet,
            n,
            declared_exp,
        })
    }

    pub fn q(&self) -> &F {
        &self.q
    }

    pub fn cyclotomic_params(&self) -> &[F] {
        &self.big_q
    }

    pub fn bullet(&self) -> Bullet {
        self.bullet
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The scalar attached to a component slot: the built-in +-q for
    /// strict slots, or the numbered cyclotomic parameter.
    pub fn slot_base(&self, cp: CompParam) -> Result<F, CartanError> {
        match cp {
            CompParam::PlusQ => Ok(self.q.clone()),
            CompParam::MinusQ => Ok(self.q.neg()),
            CompParam::Ordinary(i) => self.big_q.get(i - 1).cloned().ok_or_else(|| {
                CartanError::BadParameters(format!(
                    "component refers to Q_{} but only {} parameters are given",
                    i,
                    self.big_q.len()
                ))
            }),
        }
    }

    /// Residue of a box: the slot scalar times q^{2(col-row)}.
    pub fn residue(&self, b: BoxPos) -> Result<F, CartanError> {
        let base = self.slot_base(comp_param_for(self.bullet, b.comp))?;
        let e = 2 * (b.col as i64 - b.row as i64);
        Ok(base.mul(&ipow(&self.q, e)))
    }

    /// Residues of 1..n in tableau order.
    pub fn res_seq(&self, t: &StandardTableau) -> Result<Vec<F>, CartanError> {
        (1..=t.n()).map(|k| self.residue(t.box_of(k))).collect()
    }

    /// The class map 𝚚(x) = 2(x + x^-1)/(q + q^-1).
    pub fn class_value(&self, x: &F) -> Result<F, CartanError> {
        let xi = x
            .inv()
            .ok_or_else(|| CartanError::BadParameters("class of a non-unit".into()))?;
        let qi = self.q.inv().expect("q is a unit");
        let den = self.q.add(&qi);
        let num = x.add(&xi).mul(&F::from_i64(2));
        num.div(&den)
            .ok_or_else(|| CartanError::BadParameters("q + q^-1 must be a unit".into()))
    }

    /// Residue classes of 1..n in tableau order.
    pub fn qres_seq(&self, t: &StandardTableau) -> Result<Vec<F>, CartanError> {
        self.res_seq(t)?
            .iter()
            .map(|r| self.class_value(r))
            .collect()
    }
}

/// Ambient Dynkin type of a connected component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynkinType {
    AInf,
    BInf,
    CInf,
    /// A^(1)_{s-1} on a length-s cycle of residue classes.
    AffineA1 { s: u64 },
    /// A^(2)_{2s}; the marked class is odd.
    AffineA2 { s: u64 },
    /// C^(1)_s; both ends fold, no odd class.
    AffineC1 { s: u64 },
    /// D^(2)_s; both end classes are odd.
    AffineD2 { s: u64 },
}

impl std::fmt::Display for DynkinType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DynkinType::AInf => write!(f, "A_inf"),
            DynkinType::BInf => write!(f, "B_inf"),
            DynkinType::CInf => write!(f, "C_inf"),
            DynkinType::AffineA1 { s } => write!(f, "A^(1)_{}", s - 1),
            DynkinType::AffineA2 { s } => write!(f, "A^(2)_{}", 2 * s),
            DynkinType::AffineC1 { s } => write!(f, "C^(1)_{}", s),
            DynkinType::AffineD2 { s } => write!(f, "D^(2)_{}", s),
        }
    }
}

/// Element of the positive root lattice, indexed by datum nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveRoot {
    mult: Vec<u64>,
}

impl PositiveRoot {
    pub fn zero(num_nodes: usize) -> Self {
        PositiveRoot {
            mult: vec![0; num_nodes],
        }
    }

    pub fn from_multiplicities(mult: Vec<u64>) -> Self {
        PositiveRoot { mult }
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.mult
    }

    pub fn multiplicity(&self, node: usize) -> u64 {
        self.mult.get(node).copied().unwrap_or(0)
    }

    pub fn height(&self) -> usize {
        self.mult.iter().map(|&m| m as usize).sum()
    }
}

/// Finite Cartan superdatum over the size-n window.
#[derive(Debug, Clone)]
pub struct CartanDatum<F: ParamScalar> {
    bullet: Bullet,
    n: usize,
    nodes: Vec<F>,
    odd: Vec<bool>,
    a: Vec<Vec<i64>>,
    d: Vec<i64>,
    lambda: Vec<u64>,
    component_of: Vec<usize>,
    component_types: Vec<DynkinType>,
}

impl<F: ParamScalar> CartanDatum<F> {
    pub fn bullet(&self) -> Bullet {
        self.bullet
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_value(&self, i: usize) -> &F {
        &self.nodes[i]
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.odd[i]
    }

    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        self.a[i][j]
    }

    pub fn symmetrizer(&self, i: usize) -> i64 {
        self.d[i]
    }

    /// Multiplicity of the i-th fundamental weight in the dominant weight
    /// attached to the parameters.
    pub fn weight_multiplicity(&self, i: usize) -> u64 {
        self.lambda[i]
    }

    pub fn component_of(&self, i: usize) -> usize {
        self.component_of[i]
    }

    pub fn component_types(&self) -> &[DynkinType] {
        &self.component_types
    }

    pub fn odd_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.odd[i]).collect()
    }

    /// Node index of a residue-class value, or None when outside the set.
    pub fn node_index(&self, value: &F) -> Result<Option<usize>, CartanError> {
        let mut found = None;
        for (i, v) in self.nodes.iter().enumerate() {
            match value.identity(v) {
                Identity::Equal => {
                    found = Some(i);
                }
                Identity::Near => {
                    return Err(CartanError::AmbiguousGenericity(
                        "residue class within audit distance of a node".into(),
                    ))
                }
                Identity::Distinct => {}
            }
        }
        Ok(found)
    }

    fn node_index_req(&self, value: &F) -> Result<usize, CartanError> {
        self.node_index(value)?
            .ok_or_else(|| CartanError::UnknownResidueClass(format!("{:?}", value)))
    }

    /// Node of the residue class of a box.
    pub fn class_of_box(&self, p: &ParameterSet<F>, b: BoxPos) -> Result<usize, CartanError> {
        let r = p.residue(b)?;
        self.node_index_req(&p.class_value(&r)?)
    }

    /// As `class_of_box`, but boxes whose class falls outside the window
    /// yield None. Addable boxes of a shape that already fills the window
    /// can step one orbit position past the swept range.
    pub fn try_class_of_box(
        &self,
        p: &ParameterSet<F>,
        b: BoxPos,
    ) -> Result<Option<usize>, CartanError> {
        let r = p.residue(b)?;
        self.node_index(&p.class_value(&r)?)
    }

    /// Per-value residue-class nodes of a tableau.
    pub fn class_seq(
        &self,
        p: &ParameterSet<F>,
        t: &StandardTableau,
    ) -> Result<Vec<usize>, CartanError> {
        (1..=t.n()).map(|k| self.class_of_box(p, t.box_of(k))).collect()
    }

    /// The degree weight 2^{odd} d_i attached to adding a box of class i.
    pub fn class_weight(&self, i: usize) -> i64 {
        if self.odd[i] {
            2 * self.d[i]
        } else {
            self.d[i]
        }
    }
}

impl<F: ParamScalar + FieldSqrt> CartanDatum<F> {
    /// The eigenvalue pair b(x) + b(x)^-1 = node value, per node.
    pub fn eigenvalue_pairs(&self) -> Vec<(F, F)> {
        let half = F::from_i64(2).inv().expect("2 is a unit");
        self.nodes
            .iter()
            .map(|v| {
                let h = v.mul(&half);
                let s = h.mul(&h).sub(&F::one()).sqrt_principal();
                (h.add(&s), h.sub(&s))
            })
            .collect()
    }

    /// The principal branch of each eigenvalue pair.
    pub fn principal_eigenvalues(&self) -> Vec<F> {
        self.eigenvalue_pairs().into_iter().map(|(b, _)| b).collect()
    }
}

struct NodeAcc<F> {
    value: F,
    rep: F,
    sources: Vec<usize>,
}

enum SourceKind {
    Strict { negative: bool },
    Ordinary { index: usize },
}

/// Build the Cartan datum for a parameter set.
pub fn classify<F: ParamScalar>(p: &ParameterSet<F>) -> Result<CartanDatum<F>, CartanError> {
    let n = p.n();
    let q = p.q().clone();
    let q2 = q.mul(&q);

    let mut sources: Vec<(F, SourceKind)> = Vec::new();
    match p.bullet() {
        Bullet::Zero => {}
        Bullet::S => sources.push((q.clone(), SourceKind::Strict { negative: false })),
        Bullet::Ss => {
            sources.push((q.neg(), SourceKind::Strict { negative: true }));
            sources.push((q.clone(), SourceKind::Strict { negative: false }));
        }
    }
    for (i, v) in p.cyclotomic_params().iter().enumerate() {
        sources.push((v.clone(), SourceKind::Ordinary { index: i }));
    }

    let ell = match q2.unity_probe((2 * n.max(1)) as u64) {
        UnityProbe::Primitive(k) => {
            debug_assert!(k >= 3);
            Some(k)
        }
        UnityProbe::NotRoot => None,
        UnityProbe::Ambiguous => {
            return Err(CartanError::AmbiguousGenericity(format!(
                "cannot certify that q^2 avoids roots of unity of order <= {}",
                2 * n.max(1)
            )))
        }
    };

    // Sweep the orbit window of every source and group the class values
    // into nodes. A value in the audit zone of an existing node aborts:
    // silently merging or splitting nodes would corrupt every downstream
    // degree computation.
    let mut nodes: Vec<NodeAcc<F>> = Vec::new();
    for (si, (base, _)) in sources.iter().enumerate() {
        if n == 0 {
            break;
        }
        for l in -(n as i64 - 1)..=(n as i64 - 1) {
            let x = base.mul(&ipow(&q, 2 * l));
            let v = p.class_value(&x)?;
            let mut hit = None;
            for (ni, acc) in nodes.iter().enumerate() {
                match v.identity(&acc.value) {
                    Identity::Equal => hit = Some(ni),
                    Identity::Near => {
                        return Err(CartanError::AmbiguousGenericity(
                            "two residue classes inside the collision audit zone".into(),
                        ))
                    }
                    Identity::Distinct => {}
                }
            }
            match hit {
                Some(ni) => {
                    if !nodes[ni].sources.contains(&si) {
                        nodes[ni].sources.push(si);
                    }
                }
                None => nodes.push(NodeAcc {
                    value: v,
                    rep: x,
                    sources: vec![si],
                }),
            }
        }
    }

    let nn = nodes.len();
    let two = F::from_i64(2);
    let minus_two = F::from_i64(-2);
    let mut odd = vec![false; nn];
    for (i, acc) in nodes.iter().enumerate() {
        for target in [&two, &minus_two] {
            match acc.value.identity(target) {
                Identity::Equal => odd[i] = true,
                Identity::Near => {
                    return Err(CartanError::AmbiguousGenericity(
                        "node within audit distance of a marked class".into(),
                    ))
                }
                Identity::Distinct => {}
            }
        }
    }

    // Cartan entries from the local rule: a_{ij} counts, with the parity
    // weight of the row, how many of the two orbit neighbours of class j
    // land in class i. The window keeps both endpoints of every realized
    // adjacency, so the count is symmetric in support.
    let q2inv = q2.inv().expect("q^2 is a unit");
    let mut a = vec![vec![0i64; nn]; nn];
    for j in 0..nn {
        a[j][j] = 2;
        let nb = [
            p.class_value(&nodes[j].rep.mul(&q2))?,
            p.class_value(&nodes[j].rep.mul(&q2inv))?,
        ];
        for i in 0..nn {
            if i == j {
                continue;
            }
            let mut cnt = 0i64;
            for v in &nb {
                match v.identity(&nodes[i].value) {
                    Identity::Equal => cnt += 1,
                    Identity::Near => {
                        return Err(CartanError::AmbiguousGenericity(
                            "orbit neighbour inside the collision audit zone".into(),
                        ))
                    }
                    Identity::Distinct => {}
                }
            }
            a[i][j] = -(if odd[i] { 2 } else { 1 }) * cnt;
        }
    }
    for i in 0..nn {
        for j in 0..nn {
            if (a[i][j] == 0) != (a[j][i] == 0) {
                return Err(CartanError::UnsupportedParameters(
                    "asymmetric adjacency support in the Cartan matrix".into(),
                ));
            }
        }
    }

    // Connected components.
    let mut component_of = vec![usize::MAX; nn];
    let mut num_comps = 0;
    for start in 0..nn {
        if component_of[start] != usize::MAX {
            continue;
        }
        let c = num_comps;
        num_comps += 1;
        let mut stack = vec![start];
        component_of[start] = c;
        while let Some(v) = stack.pop() {
            for w in 0..nn {
                if w != v && a[v][w] != 0 && component_of[w] == usize::MAX {
                    component_of[w] = c;
                    stack.push(w);
                }
            }
        }
    }

    // Minimal positive integral symmetrizer, solved per component.
    let mut dr: Vec<Option<BigRational>> = vec![None; nn];
    for start in 0..nn {
        if dr[start].is_some() {
            continue;
        }
        dr[start] = Some(BigRational::one());
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            let dv = dr[v].clone().unwrap();
            for w in 0..nn {
                if w == v || a[v][w] == 0 {
                    continue;
                }
                // d_v a_{vw} = d_w a_{wv}
                let ratio = BigRational::new(BigInt::from(a[v][w]), BigInt::from(a[w][v]));
                let dw = dv.clone() * ratio;
                match &dr[w] {
                    None => {
                        dr[w] = Some(dw);
                        stack.push(w);
                    }
                    Some(existing) => {
                        if *existing != dw {
                            return Err(CartanError::UnsupportedParameters(
                                "Cartan matrix admits no symmetrizer".into(),
                            ));
                        }
                    }
                }
            }
        }
    }
    let mut d = vec![0i64; nn];
    for c in 0..num_comps {
        let members: Vec<usize> = (0..nn).filter(|&i| component_of[i] == c).collect();
        let mut lcm_den = BigInt::one();
        for &i in &members {
            lcm_den = num_integer::lcm(lcm_den, dr[i].as_ref().unwrap().denom().abs());
        }
        let mut ints: Vec<BigInt> = members
            .iter()
            .map(|&i| (dr[i].as_ref().unwrap() * BigRational::from_integer(lcm_den.clone())).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = num_integer::gcd(g, v.abs());
        }
        for v in &mut ints {
            *v = &*v / &g;
        }
        for (pos, &i) in members.iter().enumerate() {
            use num_traits::ToPrimitive;
            d[i] = ints[pos].to_i64().ok_or_else(|| {
                CartanError::UnsupportedParameters("symmetrizer overflow".into())
            })?;
            if d[i] <= 0 {
                return Err(CartanError::UnsupportedParameters(
                    "non-positive symmetrizer entry".into(),
                ));
            }
        }
    }
    for i in 0..nn {
        for j in 0..nn {
            if d[i] * a[i][j] != d[j] * a[j][i] {
                return Err(CartanError::UnsupportedParameters(
                    "symmetrizer check failed".into(),
                ));
            }
        }
    }

    // Dominant weight multiplicities: ordinary parameters contribute with
    // parity weight, strict slots contribute once each.
    let mut lambda = vec![0u64; nn];
    let node_of_value = |v: &F| -> Result<usize, CartanError> {
        for (i, acc) in nodes.iter().enumerate() {
            match v.identity(&acc.value) {
                Identity::Equal => return Ok(i),
                Identity::Near => {
                    return Err(CartanError::AmbiguousGenericity(
                        "weight anchor inside the collision audit zone".into(),
                    ))
                }
                Identity::Distinct => {}
            }
        }
        Err(CartanError::UnknownResidueClass("weight anchor".into()))
    };
    if n > 0 {
        for (base, kind) in &sources {
            let i = node_of_value(&p.class_value(base)?)?;
            match kind {
                SourceKind::Strict { .. } => lambda[i] += 1,
                SourceKind::Ordinary { .. } => lambda[i] += if odd[i] { 2 } else { 1 },
            }
        }
    }

    // Ambient type per component, decided by the case analysis on the
    // order of q^2 and the exponent class of a generating parameter.
    let q_order = if F::exact_backend() {
        match q.unity_probe(0) {
            UnityProbe::Primitive(k) => Some(k),
            _ => None,
        }
    } else {
        None
    };
    let mut component_types: Vec<Option<DynkinType>> = vec![None; num_comps];
    for (si, (base, kind)) in sources.iter().enumerate() {
        if n == 0 {
            break;
        }
        let exponent: Option<(bool, i64)> = match kind {
            SourceKind::Strict { negative } => Some((*negative, 1)),
            SourceKind::Ordinary { index } => {
                if let Some(decl) = p.declared_exp[*index] {
                    Some(decl)
                } else {
                    let mut found = None;
                    let range: Vec<i64> = match q_order {
                        Some(nq) => (0..nq as i64).collect(),
                        None => (-(2 * n as i64 + 2)..=(2 * n as i64 + 2)).collect(),
                    };
                    'search: for k in range {
                        let pk = ipow(&q, k);
                        for (negative, cand) in [(false, pk.clone()), (true, pk.neg())] {
                            match base.identity(&cand) {
                                Identity::Equal => {
                                    if !F::exact_backend() {
                                        return Err(CartanError::AmbiguousGenericity(
                                            "cannot certify the exponent class of a cyclotomic parameter numerically; declare it structurally".into(),
                                        ));
                                    }
                                    found = Some((negative, k));
                                    break 'search;
                                }
                                Identity::Near => {
                                    return Err(CartanError::AmbiguousGenericity(
                                        "cyclotomic parameter within audit distance of a power of q".into(),
                                    ))
                                }
                                Identity::Distinct => {}
                            }
                        }
                    }
                    found
                }
            }
        };
        let ty = match (ell, exponent) {
            (None, None) => DynkinType::AInf,
            (None, Some((_, k))) => {
                if k.rem_euclid(2) == 1 {
                    DynkinType::BInf
                } else {
                    DynkinType::CInf
                }
            }
            (Some(l), None) => DynkinType::AffineA1 { s: l },
            (Some(l), Some((_, k))) => {
                if l % 2 == 1 {
                    // The odd-order case requires q^l = -1; otherwise the
                    // folded orbit does not match any classified diagram.
                    let ql = ipow(&q, l as i64);
                    if ql.identity(&F::from_i64(-1)) != Identity::Equal {
                        return Err(CartanError::UnsupportedParameters(
                            "q^2 has odd order but q^order != -1; the orbit folds outside the classified types".into(),
                        ));
                    }
                    DynkinType::AffineA2 { s: (l - 1) / 2 }
                } else if k.rem_euclid(2) == 0 {
                    DynkinType::AffineC1 { s: l / 2 }
                } else {
                    DynkinType::AffineD2 { s: l / 2 }
                }
            }
        };
        for (ni, acc) in nodes.iter().enumerate() {
            if acc.sources.contains(&si) {
                let c = component_of[ni];
                if component_types[c].is_none() {
                    component_types[c] = Some(ty);
                }
            }
        }
    }
    let component_types: Vec<DynkinType> = component_types
        .into_iter()
        .map(|t| t.expect("every component has a generating source"))
        .collect();

    Ok(CartanDatum {
        bullet: p.bullet(),
        n,
        nodes: nodes.into_iter().map(|acc| acc.value).collect(),
        odd,
        a,
        d,
        lambda,
        component_of,
        component_types,
    })
}

/// Addable boxes of a shape lying in a given residue class.
fn addable_in_class<F: ParamScalar>(
    shape: &MultiPartition,
    node: usize,
    p: &ParameterSet<F>,
    datum: &CartanDatum<F>,
) -> Result<Vec<BoxPos>, CartanError> {
    let mut out = Vec::new();
    for b in shape.addable_boxes() {
        if datum.try_class_of_box(p, b)? == Some(node) {
            out.push(b);
        }
    }
    Ok(out)
}

/// Removable boxes of a shape in a residue class, diagonal boxes excluded.
fn removable_in_class_off_diag<F: ParamScalar>(
    shape: &MultiPartition,
    node: usize,
    p: &ParameterSet<F>,
    datum: &CartanDatum<F>,
) -> Result<Vec<BoxPos>, CartanError> {
    let mut out = Vec::new();
    for b in shape.removable_boxes() {
        if !shape.on_diagonal(b) && datum.try_class_of_box(p, b)? == Some(node) {
            out.push(b);
        }
    }
    Ok(out)
}

/// The per-class shape degree: the parity-weighted count of addable
/// boxes minus off-diagonal removable boxes in the class.
pub fn shape_node_degree<F: ParamScalar>(
    shape: &MultiPartition,
    node: usize,
    p: &ParameterSet<F>,
    datum: &CartanDatum<F>,
) -> Result<i64, CartanError> {
    let add = addable_in_class(shape, node, p, datum)?.len() as i64;
    let rem = removable_in_class_off_diag(shape, node, p, datum)?.len() as i64;
    Ok(datum.class_weight(node) * (add - rem))
}

/// The positive root attached to a shape: one simple root per box class.
pub fn nu_of_shape<F: ParamScalar>(
    shape: &MultiPartition,
    p: &ParameterSet<F>,
    datum: &CartanDatum<F>,
) -> Result<PositiveRoot, CartanError> {
    let mut mult = vec![0u64; datum.num_nodes()];
    for b in shape.boxes() {
        mult[datum.class_of_box(p, b)?] += 1;
    }
    let nu = PositiveRoot::from_multiplicities(mult);
    debug_assert_eq!(nu.height(), shape.size());
    Ok(nu)
}

/// Symmetric bilinear form on the root lattice: (nu|mu) = sum d_i a_ij.
pub fn root_pairing<F: ParamScalar>(
    nu: &PositiveRoot,
    mu: &PositiveRoot,
    datum: &CartanDatum<F>,
) -> i64 {
    let mut acc = 0i64;
    for i in 0..datum.num_nodes() {
        let mi = nu.multiplicity(i) as i64;
        if mi == 0 {
            continue;
        }
        for j in 0..datum.num_nodes() {
            let mj = mu.multiplicity(j) as i64;
            if mj != 0 {
                acc += mi * mj * datum.symmetrizer(i) * datum.cartan(i, j);
            }
        }
    }
    acc
}

/// Pairing of the dominant weight with a positive root.
pub fn weight_root_pairing<F: ParamScalar>(nu: &PositiveRoot, datum: &CartanDatum<F>) -> i64 {
    (0..datum.num_nodes())
        .map(|i| datum.weight_multiplicity(i) as i64 * datum.symmetrizer(i) * nu.multiplicity(i) as i64)
        .sum()
}

/// Defect of a positive root.
pub fn defect<F: ParamScalar>(nu: &PositiveRoot, datum: &CartanDatum<F>) -> i64 {
    let norm = root_pairing(nu, nu, datum);
    debug_assert!(norm % 2 == 0);
    weight_root_pairing(nu, datum) - norm / 2
}

/// Shape defect: the defect of the shape's root, with the flavour's
/// marked-class corrections subtracted.
pub fn shape_defect<F: ParamScalar>(
    shape: &MultiPartition,
    p: &ParameterSet<F>,
    datum: &CartanDatum<F>,
) -> Result<i64, CartanError> {
    let nu = nu_of_shape(shape, p, datum)?;
    let mut val = defect(&nu, datum);
    let marked_term = |value: i64| -> Result<i64, CartanError> {
        match datum.node_index(&F::from_i64(value))? {
            Some(i) => Ok(nu.multiplicity(i) as i64 * datum.symmetrizer(i)),
            None => Ok(0),
        }
    };
    match p.bullet() {
        Bullet::Zero => {
            val -= marked_term(2)?;
            val -= marked_term(-2)?;
        }
        Bullet::S => {
            val -= marked_term(-2)?;
        }
        Bullet::Ss => {}
    }
    Ok(val)
}

/// Low and high tableau degrees: each entry contributes the parity-weighted
/// count of same-class addable boxes minus off-diagonal removable boxes
/// located before (low) or after (high) its own box in reading order,
/// within the shape restricted to the earlier entries.
pub fn tableau_degrees<F: ParamScalar>(
    t: &StandardTableau,
    p: &ParameterSet<F>,
    datum: &CartanDatum<F>,
) -> Result<(i64, i64), CartanError> {
    let mut lo = 0i64;
    let mut hi = 0i64;
    for k in 1..=t.n() {
        let bk = t.box_of(k);
        let ik = datum.class_of_box(p, bk)?;
        let prev = t.restricted_shape(k - 1);
        let w = datum.class_weight(ik);
        let mut lo_k = 0i64;
        let mut hi_k = 0i64;
        for b in addable_in_class(&prev, ik, p, datum)? {
            match b.cmp(&bk) {
                std::cmp::Ordering::Less => lo_k += 1,
                std::cmp::Ordering::Greater => hi_k += 1,
                std::cmp::Ordering::Equal => {}
            }
        }
        for b in removable_in_class_off_diag(&prev, ik, p, datum)? {
            match b.cmp(&bk) {
                std::cmp::Ordering::Less => lo_k -= 1,
                std::cmp::Ordering::Greater => hi_k -= 1,
                std::cmp::Ordering::Equal => {}
            }
        }
        lo += w * lo_k;
        hi += w * hi_k;
    }
    Ok((lo, hi))
}

/// Evaluate the separation polynomial at the parameters.
pub fn separation_polynomial<F: ParamScalar>(p: &ParameterSet<F>, n: usize) -> F {
    let q = p.q();
    let q2 = q.mul(q);
    let ni = n as i64;
    let mut acc = F::one();
    for t in 1..=ni {
        let p2t = ipow(&q2, t);
        acc = acc.mul(&p2t.sub(&F::one()));
        if p.bullet() != Bullet::Zero {
            acc = acc.mul(&p2t.add(&F::one()));
        }
    }
    for qi in p.cyclotomic_params() {
        let qi2 = qi.mul(qi);
        for t in (2 - ni)..=(ni - 2) {
            acc = acc.mul(&qi2.sub(&ipow(&q2, -t)));
        }
        for t in (1 - ni)..=ni {
            acc = acc.mul(&qi2.sub(&ipow(q, -4 * t + 2)));
        }
    }
    let m = p.cyclotomic_params().len();
    for i in 0..m {
        for ip in (i + 1)..m {
            let qi = &p.cyclotomic_params()[i];
            let qip = &p.cyclotomic_params()[ip];
            for t in (1 - ni)..=(ni - 1) {
                let shift = ipow(&q2, -t);
                acc = acc.mul(&qi.sub(&qip.mul(&shift)));
                acc = acc.mul(&qi.mul(qip).sub(&shift));
            }
        }
    }
    acc
}

/// Whether every tableau on n+1 boxes has pairwise distinct residue
/// classes at adjacent entries, tested both through the closed-form
/// polynomial and by brute force. The two booleans must agree.
pub fn separation_test<F: ParamScalar>(
    p: &ParameterSet<F>,
    n: usize,
) -> Result<(bool, bool), CartanError> {
    let poly_nonzero = !separation_polynomial(p, n).is_negligible();
    let mut brute = true;
    'outer: for shape in enumerate_multipartitions(n + 1, p.cyclotomic_params().len(), p.bullet()) {
        for t in enumerate_std_tableaux(&shape) {
            let classes = p.qres_seq(&t)?;
            for k in 0..n {
                if classes[k].identity(&classes[k + 1]) != Identity::Distinct {
                    brute = false;
                    break 'outer;
                }
            }
        }
    }
    Ok((poly_nonzero, brute))
}

/// Result of the unremovability test.
#[derive(Debug, Clone)]
pub struct UnremovabilityReport {
    /// The exhaustive verdict over all shapes mapping to the root.
    pub unremovable: bool,
    /// The sufficient condition: every odd class has multiplicity at most one.
    pub odd_shortcut: bool,
    /// A violating (shape, entry) pair when not unremovable.
    pub witness: Option<(MultiPartition, usize)>,
}

/// Test whether a positive root is unremovable: no shape mapping to it
/// has, at any entry k of its column-reading tableau, a removable box
/// before the entry's own box carrying the same eigenvalue branch. The
/// branch matching collapses to residue-class equality, since both
/// branches of a pair share their characteristic sum.
pub fn unremovability<F: ParamScalar>(
    nu: &PositiveRoot,
    p: &ParameterSet<F>,
    datum: &CartanDatum<F>,
) -> Result<UnremovabilityReport, CartanError> {
    let odd_shortcut = (0..datum.num_nodes())
        .filter(|&i| datum.is_odd(i))
        .all(|i| nu.multiplicity(i) <= 1);
    let n = nu.height();
    if n > p.n() {
        return Err(CartanError::BadParameters(format!(
            "root height {} exceeds the datum window {}",
            n,
            p.n()
        )));
    }
    let mut witness = None;
    'outer: for shape in enumerate_multipartitions(n, p.cyclotomic_params().len(), p.bullet()) {
        if nu_of_shape(&shape, p, datum)? != *nu {
            continue;
        }
        let t = StandardTableau::column_reading(&shape);
        for k in 1..=n {
            let bk = t.box_of(k);
            let ik = datum.class_of_box(p, bk)?;
            let prev = t.restricted_shape(k - 1);
            for b in prev.removable_boxes() {
                if b < bk && datum.class_of_box(p, b)? == ik {
                    witness = Some((shape.clone(), k));
                    break 'outer;
                }
            }
        }
    }
    let unremovable = witness.is_none();
    if odd_shortcut && !unremovable {
        return Err(CartanError::UnsupportedParameters(
            "odd-multiplicity shortcut contradicts the exhaustive search".into(),
        ));
    }
    Ok(UnremovabilityReport {
        unremovable,
        odd_shortcut,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{CycloRational, PrecComplex};

    fn rat(a: i64, b: i64) -> CycloRational {
        CycloRational::from_ratio_i64(a, b)
    }

    fn generic_params(bullet: Bullet, m: usize, n: usize) -> ParameterSet<CycloRational> {
        let q = rat(3, 2);
        let qs: Vec<CycloRational> = (0..m).map(|i| rat(5 + 2 * i as i64, 7)).collect();
        ParameterSet::new(q, qs, bullet, n).unwrap()
    }

    #[test]
    fn residue_examples() {
        let p = generic_params(Bullet::Zero, 1, 2);
        // box in row 1, column 2 of the first ordinary component
        let r = p.residue(BoxPos::new(0, 1, 2)).unwrap();
        let expected = rat(5, 7).mul(&rat(3, 2)).mul(&rat(3, 2));
        assert_eq!(r, expected);

        let ps = generic_params(Bullet::S, 0, 1);
        let r0 = ps.residue(BoxPos::new(0, 1, 1)).unwrap();
        assert_eq!(r0, rat(3, 2));

        let pss = generic_params(Bullet::Ss, 0, 1);
        assert_eq!(pss.residue(BoxPos::new(0, 1, 1)).unwrap(), rat(-3, 2));
        assert_eq!(pss.residue(BoxPos::new(1, 1, 1)).unwrap(), rat(3, 2));
        // diagonal boxes of strict slots sit in the marked classes
        let d = classify(&pss).unwrap();
        let v_plus = pss
            .class_value(&pss.residue(BoxPos::new(1, 1, 1)).unwrap())
            .unwrap();
        assert_eq!(v_plus, CycloRational::from_i64(2));
        let v_minus = pss
            .class_value(&pss.residue(BoxPos::new(0, 1, 1)).unwrap())
            .unwrap();
        assert_eq!(v_minus, CycloRational::from_i64(-2));
        assert!(d.node_index(&v_plus).unwrap().is_some());
    }

    #[test]
    fn classify_generic_single_parameter() {
        let p = generic_params(Bullet::Zero, 1, 3);
        let d = classify(&p).unwrap();
        // five window classes on a path
        assert_eq!(d.num_nodes(), 5);
        assert_eq!(d.component_types(), &[DynkinType::AInf]);
        for i in 0..d.num_nodes() {
            assert_eq!(d.cartan(i, i), 2);
            assert!(!d.is_odd(i));
            assert_eq!(d.symmetrizer(i), 1);
            for j in 0..d.num_nodes() {
                if i != j {
                    assert!(d.cartan(i, j) == 0 || d.cartan(i, j) == -1);
                }
            }
        }
        // path adjacency: each interior node has exactly two neighbours
        let degree: Vec<usize> = (0..5)
            .map(|i| (0..5).filter(|&j| j != i && d.cartan(i, j) != 0).count())
            .collect();
        let mut sorted = degree.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 1, 2, 2, 2]);
        // weight anchored once on the class of Q_1, with multiplicity 1
        assert_eq!(d.lambda.iter().sum::<u64>(), 1);
    }

    #[test]
    fn classify_strict_slot_half_line() {
        let p = generic_params(Bullet::S, 0, 3);
        let d = classify(&p).unwrap();
        // classes of q^{-3..3 odd} fold onto {q, q^3, q^5}
        assert_eq!(d.num_nodes(), 3);
        assert_eq!(d.component_types(), &[DynkinType::BInf]);
        let odd: Vec<usize> = d.odd_nodes();
        assert_eq!(odd.len(), 1);
        let o = odd[0];
        assert_eq!(d.node_value(o), &CycloRational::from_i64(2));
        // the odd end carries the doubled entry and the short symmetrizer
        let nb: Vec<usize> = (0..3).filter(|&j| j != o && d.cartan(o, j) != 0).collect();
        assert_eq!(nb.len(), 1);
        assert_eq!(d.cartan(o, nb[0]), -2);
        assert_eq!(d.cartan(nb[0], o), -1);
        assert_eq!(d.symmetrizer(o), 1);
        assert_eq!(d.symmetrizer(nb[0]), 2);
        // strict slot contributes once to the weight, on the odd node
        assert_eq!(d.weight_multiplicity(o), 1);
    }

    #[test]
    fn classify_even_power_parameter() {
        let q = rat(3, 2);
        let big = vec![q.mul(&q)];
        let p = ParameterSet::with_declared(
            q,
            big,
            vec![Some((false, 2))],
            Bullet::Zero,
            2,
        )
        .unwrap();
        let d = classify(&p).unwrap();
        assert_eq!(d.component_types(), &[DynkinType::CInf]);
        // orbit of q^2 at n=2: classes of {1, q^2, q^4} with a folded end
        assert_eq!(d.num_nodes(), 3);
        let heavy: Vec<(usize, usize)> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && d.cartan(i, j) == -2)
            .collect();
        assert_eq!(heavy.len(), 1);
        let (i, j) = heavy[0];
        assert_eq!(d.cartan(j, i), -1);
        assert!(!d.is_odd(i) && !d.is_odd(j));
        assert_eq!(d.symmetrizer(j), 2);
    }

    #[test]
    fn classify_odd_order_folded_orbit() {
        // q a primitive 10th root: q^2 has order 5, q^5 = -1, and the
        // orbit of Q = q folds onto a three-class path with one odd end
        // and a quadrupled far end.
        let q = CycloRational::zeta(10, 1);
        let p = ParameterSet::with_declared(
            q,
            vec![CycloRational::zeta(10, 1)],
            vec![Some((false, 1))],
            Bullet::Zero,
            3,
        )
        .unwrap();
        let d = classify(&p).unwrap();
        assert_eq!(d.component_types(), &[DynkinType::AffineA2 { s: 2 }]);
        assert_eq!(d.num_nodes(), 3);
        let odd = d.odd_nodes();
        assert_eq!(odd.len(), 1);
        assert_eq!(d.node_value(odd[0]), &CycloRational::from_i64(2));
        // symmetrizer along the path reads 1, 2, 4 from the odd end
        let mut ds = d.d.clone();
        ds.sort();
        assert_eq!(ds, vec![1, 2, 4]);
        assert_eq!(d.symmetrizer(odd[0]), 1);
        // weight doubled on the odd class
        assert_eq!(d.weight_multiplicity(odd[0]), 2);
    }

    #[test]
    fn classify_even_order_types() {
        // q^2 of order 6: even exponents give the two-sided fold, odd
        // exponents give the diagram with both ends odd.
        let q = CycloRational::zeta(12, 1);
        let pc = ParameterSet::with_declared(
            q.clone(),
            vec![q.mul(&q)],
            vec![Some((false, 2))],
            Bullet::Zero,
            2,
        )
        .unwrap();
        let dc = classify(&pc).unwrap();
        assert_eq!(dc.component_types(), &[DynkinType::AffineC1 { s: 3 }]);
        assert!(dc.odd_nodes().is_empty());

        let pd = ParameterSet::with_declared(
            q.clone(),
            vec![q.mul(&q).mul(&q).neg()],
            vec![Some((true, 3))],
            Bullet::Zero,
            4,
        )
        .unwrap();
        let dd = classify(&pd).unwrap();
        assert_eq!(dd.component_types(), &[DynkinType::AffineD2 { s: 3 }]);
        // the window covers the whole folded orbit: three classes, both
        // end classes odd
        assert_eq!(dd.num_nodes(), 3);
        assert_eq!(dd.odd_nodes().len(), 2);
    }

    #[test]
    fn classify_cycle_type() {
        // q^2 of order 7 with Q away from powers of q
        let q = CycloRational::zeta(14, 1);
        let p = ParameterSet::new(q, vec![rat(2, 3)], Bullet::Zero, 4).unwrap();
        let d = classify(&p).unwrap();
        assert_eq!(d.component_types(), &[DynkinType::AffineA1 { s: 7 }]);
        // the window wraps: seven distinct classes on a cycle
        assert_eq!(d.num_nodes(), 7);
        for i in 0..7 {
            let deg = (0..7).filter(|&j| j != i && d.cartan(i, j) != 0).count();
            assert_eq!(deg, 2);
        }
    }

    #[test]
    fn numeric_root_of_unity_is_ambiguous() {
        let q = crate::scalar::root_of_unity(10, 1, 192);
        let p = ParameterSet::new(
            q.clone(),
            vec![q.mul(&q).mul(&q)],
            Bullet::Zero,
            3,
        );
        let err = match p {
            Err(e) => e,
            Ok(ps) => classify(&ps).unwrap_err(),
        };
        assert!(matches!(err, CartanError::AmbiguousGenericity(_)));
    }

    #[test]
    fn numeric_generic_matches_exact() {
        let pe = generic_params(Bullet::S, 1, 3);
        let de = classify(&pe).unwrap();
        let bits = 256;
        let pn = ParameterSet::new(
            PrecComplex::from_rational(&num_rational::BigRational::new(3.into(), 2.into()), bits),
            vec![PrecComplex::from_rational(
                &num_rational::BigRational::new(5.into(), 7.into()),
                bits,
            )],
            Bullet::S,
            3,
        )
        .unwrap();
        let dn = classify(&pn).unwrap();
        assert_eq!(de.num_nodes(), dn.num_nodes());
        let mut te: Vec<String> = de.component_types().iter().map(|t| t.to_string()).collect();
        let mut tn: Vec<String> = dn.component_types().iter().map(|t| t.to_string()).collect();
        te.sort();
        tn.sort();
        assert_eq!(te, tn);
        for shape in enumerate_multipartitions(3, 1, Bullet::S) {
            for t in enumerate_std_tableaux(&shape) {
                let ge = tableau_degrees(&t, &pe, &de).unwrap();
                let gn = tableau_degrees(&t, &pn, &dn).unwrap();
                assert_eq!(ge, gn);
            }
            assert_eq!(
                shape_defect(&shape, &pe, &de).unwrap(),
                shape_defect(&shape, &pn, &dn).unwrap()
            );
        }
    }

    #[test]
    fn empty_tableau_degrees_and_zero_defect() {
        let p = generic_params(Bullet::Zero, 1, 2);
        let d = classify(&p).unwrap();
        let shape = MultiPartition::empty(Bullet::Zero, 1);
        let t = StandardTableau::row_reading(&shape);
        assert_eq!(tableau_degrees(&t, &p, &d).unwrap(), (0, 0));
        assert_eq!(defect(&PositiveRoot::zero(d.num_nodes()), &d), 0);
    }

    #[test]
    fn separation_polynomial_no_parameters() {
        // with no cyclotomic parameters the polynomial collapses to the
        // q-factorial-type product
        let p = generic_params(Bullet::Zero, 0, 3);
        let n = 3i64;
        let q2 = rat(9, 4);
        let mut expected = CycloRational::one();
        for t in 1..=n {
            expected = expected.mul(&ipow(&q2, t).sub(&CycloRational::one()));
        }
        assert_eq!(separation_polynomial(&p, n as usize), expected);
        let (a, b) = separation_test(&p, 3).unwrap();
        assert!(a && b);

        // q^2 a root of unity of small order kills the product; with a
        // strict slot the brute force sees the same failure: the row word
        // of the one-row strict shape wraps back into the marked class
        let q = CycloRational::zeta(6, 1);
        let pz = ParameterSet::new(q, vec![], Bullet::S, 3).unwrap();
        let (a, b) = separation_test(&pz, 3).unwrap();
        assert!(!a && !b);
    }

    #[test]
    fn unremovability_cases() {
        // all classes even: always unremovable
        let p = generic_params(Bullet::Zero, 1, 2);
        let d = classify(&p).unwrap();
        assert!(d.odd_nodes().is_empty());
        for shape in enumerate_multipartitions(2, 1, Bullet::Zero) {
            let nu = nu_of_shape(&shape, &p, &d).unwrap();
            let rep = unremovability(&nu, &p, &d).unwrap();
            assert!(rep.unremovable && rep.odd_shortcut);
        }

        // Q_1 = q pushes two boxes of a single column into the odd class;
        // the second entry of the column reading sees the first box as a
        // same-class removable predecessor
        let q = rat(3, 2);
        let pq = ParameterSet::with_declared(
            q.clone(),
            vec![q.clone()],
            vec![Some((false, 1))],
            Bullet::Zero,
            2,
        )
        .unwrap();
        let dq = classify(&pq).unwrap();
        let shape = MultiPartition::new(Bullet::Zero, vec![], vec![vec![1, 1]]).unwrap();
        let nu = nu_of_shape(&shape, &pq, &dq).unwrap();
        let odd = dq.odd_nodes();
        assert_eq!(odd.len(), 1);
        assert_eq!(nu.multiplicity(odd[0]), 2);
        let rep = unremovability(&nu, &pq, &dq).unwrap();
        assert!(!rep.unremovable && !rep.odd_shortcut);
        let (wshape, k) = rep.witness.unwrap();
        assert_eq!(wshape, shape);
        assert_eq!(k, 2);
    }

    #[test]
    fn eigenvalue_pairs_multiply_to_one() {
        let bits = 256;
        let pn = ParameterSet::new(
            PrecComplex::from_rational(&num_rational::BigRational::new(3.into(), 2.into()), bits),
            vec![PrecComplex::from_rational(
                &num_rational::BigRational::new(5.into(), 7.into()),
                bits,
            )],
            Bullet::Zero,
            2,
        )
        .unwrap();
        let d = classify(&pn).unwrap();
        for (i, (bp, bm)) in d.eigenvalue_pairs().into_iter().enumerate() {
            assert!(bp.mul(&bm).sub(&PrecComplex::one()).is_negligible());
            assert!(bp.add(&bm).sub(d.node_value(i)).is_negligible());
        }
    }
}
