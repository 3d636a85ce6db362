//! Independent oracles for the seminormal matrix models: closed scalar
//! forms at size one, hand recomputed braid generator columns, the full
//! relation audits across small windows, the multiplication law through an
//! anchor filling, trace supersymmetry, the closed coefficient product
//! formulas for every flavour and the dimension identity.

use std::collections::HashSet;

use hecke_clifford::cartan::{Identity, ParamScalar, ParameterSet};
use hecke_clifford::combinatorics::{
    enumerate_multipartitions, enumerate_std_tableaux, Bullet, MultiPartition, StandardTableau,
};
use hecke_clifford::linalg::Mat;
use hecke_clifford::scalar::{Dyadic, Field, FieldSqrt, PrecComplex};
use hecke_clifford::seminormal::{
    build_all_blocks, build_block, c_cross_check, closed_pair_product, dump_block, evaluate_form,
    form_values, form_supersymmetry_check, pbw_dimension_identity, seminormal_product_check,
    verify_relations, BuildOpts, SeminormalCoeffs,
};
use num_rational::BigRational;

const BITS: u32 = 256;

fn pc(a: i64, b: i64) -> PrecComplex {
    PrecComplex::from_rational(&BigRational::new(a.into(), b.into()), BITS)
}

fn generic(bullet: Bullet, m: usize, n: usize) -> ParameterSet<PrecComplex> {
    let qs: Vec<PrecComplex> = [pc(3, 7), pc(9, 5)].into_iter().take(m).collect();
    ParameterSet::new(pc(5, 3), qs, bullet, n).unwrap()
}

/// Independent class value 2(x + 1/x)/(q + 1/q), written from scratch.
fn class_oracle(x: &PrecComplex, q: &PrecComplex) -> PrecComplex {
    let num = x.add(&x.inv().unwrap()).scale(&Dyadic::from_int(2));
    let den = q.add(&q.inv().unwrap());
    num.div(&den).unwrap()
}

/// Independent eigenvalue branches (minus, plus) of a class value.
fn branches_oracle(cls: &PrecComplex) -> (PrecComplex, PrecComplex) {
    let half = cls.div(&PrecComplex::from_int(2)).unwrap();
    let root = half.mul(&half).sub(&PrecComplex::from_int(1)).sqrt_principal();
    (half.sub(&root), half.add(&root))
}

fn assert_close(a: &PrecComplex, b: &PrecComplex, what: &str) {
    let tol = a.tau().mul_i64(64);
    assert!(
        a.eq_within(b, &tol),
        "{}: {:?} vs {:?}",
        what,
        a,
        b
    );
}

#[test]
fn size_one_block_matches_the_closed_forms() {
    let p = generic(Bullet::Zero, 1, 1);
    let shape = MultiPartition::parse("0:[1]").unwrap();
    let rep = build_block(&shape, &p, &BuildOpts::default()).unwrap();
    assert_eq!(rep.dim(), 2);

    let q = pc(5, 3);
    let big_q = pc(3, 7);
    let (b_lo, b_hi) = branches_oracle(&class_oracle(&big_q, &q));
    assert_close(&b_lo.mul(&b_hi), &PrecComplex::from_int(1), "branch product");

    // the eigenvalue matrix carries both branches, one per mask column
    let c0 = rep.basis_index(0, 0).unwrap();
    let c1 = rep.basis_index(0, 1).unwrap();
    assert_close(&rep.x(1)[(c0, c0)], &b_hi, "clear mask eigenvalue");
    assert_close(&rep.x(1)[(c1, c1)], &b_lo, "set mask eigenvalue");
    assert_close(&rep.x_inv(1)[(c0, c0)], &b_lo, "clear mask inverse");

    // the odd generator is the bare swap of the two columns
    assert_close(&rep.c_mat(1)[(c1, c0)], &PrecComplex::from_int(1), "swap up");
    assert_close(&rep.c_mat(1)[(c0, c1)], &PrecComplex::from_int(1), "swap down");
    assert!(rep.c_mat(1)[(c0, c0)].is_zero_strict());

    // trace weights: one over the branch difference, sign flipping with
    // the mask
    let w0 = PrecComplex::from_int(1).div(&b_lo.sub(&b_hi)).unwrap();
    assert_close(&form_values(&rep)[c0], &w0, "clear mask weight");
    assert_close(&form_values(&rep)[c1], &w0.neg(), "set mask weight");

    let report = verify_relations(&rep, &p).unwrap();
    assert!(report.all_pass(), "worst: {:?}", report.worst());
}

#[test]
fn braid_generator_columns_match_an_independent_recompute() {
    let p = generic(Bullet::Zero, 2, 2);
    let shape = MultiPartition::parse("0:[1]|[1]").unwrap();
    let rep = build_block(&shape, &p, &BuildOpts::default()).unwrap();
    assert_eq!(rep.dim(), 8);

    let q = pc(5, 3);
    let qs = [pc(3, 7), pc(9, 5)];
    let eps = q.sub(&q.inv().unwrap());
    let one = PrecComplex::from_int(1);

    let tableaux = enumerate_std_tableaux(&shape);
    for (ti, t) in tableaux.iter().enumerate() {
        // eigenvalues straight from the component parameters
        let (b1, b1i) = branches_oracle(&class_oracle(&qs[t.box_of(1).comp], &q));
        let (b2, _) = branches_oracle(&class_oracle(&qs[t.box_of(2).comp], &q));

        // clear mask column: stay, double flip, swap
        let col = rep.basis_index(ti, 0b00).unwrap();
        let stay = eps.neg().div(&b1i.mul(&b2).sub(&one)).unwrap();
        assert_close(&rep.t_mat(1)[(col, col)], &stay, "stay at clear mask");
        let flip_row = rep.basis_index(ti, 0b11).unwrap();
        let flip = eps.div(&b1.mul(&b2).sub(&one)).unwrap();
        assert_close(&rep.t_mat(1)[(flip_row, col)], &flip, "flip at clear mask");

        // set low bit column: both coefficients change sign pattern
        let col = rep.basis_index(ti, 0b01).unwrap();
        let stay = eps.neg().div(&b1.mul(&b2).sub(&one)).unwrap();
        assert_close(&rep.t_mat(1)[(col, col)], &stay, "stay at low bit");
        let flip_row = rep.basis_index(ti, 0b10).unwrap();
        let flip = eps.div(&b1i.mul(&b2).sub(&one)).unwrap().neg();
        assert_close(&rep.t_mat(1)[(flip_row, col)], &flip, "flip at low bit");

        // the swap entry squares to the swap coefficient and moves to the
        // exchanged filling with the mask bits exchanged
        let other = 1 - ti;
        let col = rep.basis_index(ti, 0b01).unwrap();
        let swap_row = rep.basis_index(other, 0b10).unwrap();
        let entry = &rep.t_mat(1)[(swap_row, col)];
        let ratio = b1.div(&b2).unwrap();
        let prod = b1.mul(&b2);
        let c = one
            .sub(&eps.mul(&eps).mul(
                &ratio
                    .div(&ratio.sub(&one).mul(&ratio.sub(&one)))
                    .unwrap()
                    .add(&prod.div(&prod.sub(&one).mul(&prod.sub(&one))).unwrap()),
            ));
        assert_close(&entry.mul(entry), &c, "swap entry squares to the coefficient");
    }

    let report = verify_relations(&rep, &p).unwrap();
    assert!(report.all_pass(), "worst: {:?}", report.worst());
}

#[test]
fn relations_hold_on_every_block_of_small_windows() {
    for (n, m) in [(1usize, 1usize), (2, 1), (2, 2), (3, 1), (3, 2), (4, 1)] {
        let p = generic(Bullet::Zero, m, n);
        let blocks = build_all_blocks(&p, &BuildOpts::default()).unwrap();
        let mut total: u128 = 0;
        for rep in &blocks {
            let report = verify_relations(rep, &p).unwrap();
            assert!(
                report.all_pass(),
                "n={} m={} shape {}: worst {:?}",
                n,
                m,
                rep.shape().encode(),
                report.worst()
            );
            total += (rep.dim() as u128) * (rep.dim() as u128);
        }
        let (lhs, rhs) = pbw_dimension_identity(Bullet::Zero, m, n);
        assert_eq!(total, lhs);
        assert_eq!(total, rhs, "matrix model sizes exhaust the window n={} m={}", n, m);
    }
}

#[test]
fn product_law_holds_through_anchor_fillings() {
    let cases = [
        (1usize, "0:[3]"),
        (1, "0:[2,1]"),
        (1, "0:[1,1,1]"),
        (2, "0:[1]|[1]"),
        (2, "0:[2]|[1]"),
    ];
    for (m, enc) in cases {
        let shape = MultiPartition::parse(enc).unwrap();
        let p = generic(Bullet::Zero, m, shape.size());
        let rep = build_block(&shape, &p, &BuildOpts::default()).unwrap();
        let tableaux = enumerate_std_tableaux(&shape);
        let w = &tableaux[tableaux.len() / 2];
        let report = seminormal_product_check(&rep, w, 8, 42).unwrap();
        assert!(
            report.all_pass(),
            "shape {}: worst {:?}",
            enc,
            report.worst()
        );
    }
}

#[test]
fn trace_is_supersymmetric_and_orthogonal_on_the_basis() {
    let cases = [(1usize, "0:[2]"), (1, "0:[1,1]"), (1, "0:[2,1]"), (2, "0:[1]|[1]")];
    for (m, enc) in cases {
        let shape = MultiPartition::parse(enc).unwrap();
        let p = generic(Bullet::Zero, m, shape.size());
        let rep = build_block(&shape, &p, &BuildOpts::default()).unwrap();
        let report = form_supersymmetry_check(&rep, 100, 7);
        assert!(
            report.all_pass(),
            "shape {}: worst {:?}",
            enc,
            report.worst()
        );

        // off diagonal basis units have zero trace, diagonal ones give
        // their weight
        let dim = rep.dim();
        let mut unit: Mat<PrecComplex> = Mat::zeros(dim, dim);
        unit[(0, dim - 1)] = PrecComplex::from_int(1);
        assert!(evaluate_form(&rep, &unit).is_zero_strict());
        let mut unit: Mat<PrecComplex> = Mat::zeros(dim, dim);
        unit[(1, 1)] = PrecComplex::from_int(1);
        assert_close(
            &evaluate_form(&rep, &unit),
            &form_values(&rep)[1],
            "diagonal unit trace",
        );
    }
}

#[test]
fn coefficient_formulas_agree_for_every_flavour() {
    // hand derived witness on the hook of three boxes: the single swap
    // exchanges the boxes with residues Q q^2 and Q q^-2, so the squared
    // coefficient must be (x-w)(x-z)/(x-y)^2 in the classes of
    // Q q^2, Q q^-2, Q q^-4 and Q
    {
        let p = generic(Bullet::Zero, 1, 3);
        let shape = MultiPartition::parse("0:[2,1]").unwrap();
        let q = pc(5, 3);
        let shift = |e: i64| {
            let mut acc = pc(3, 7);
            let f = if e > 0 { q.clone() } else { q.inv().unwrap() };
            for _ in 0..e.abs() {
                acc = acc.mul(&f);
            }
            acc
        };
        let cls = |e: i64| class_oracle(&shift(e), &q);
        let (x, y, z, w, v) = (cls(2), cls(-2), cls(-4), cls(0), cls(4));
        let diff2 = |a: &PrecComplex, b: &PrecComplex| {
            let d = a.sub(b);
            d.mul(&d)
        };
        let hand = x.sub(&w).mul(&x.sub(&z)).div(&diff2(&x, &y)).unwrap();
        let mirrored = y.sub(&v).mul(&y.sub(&w)).div(&diff2(&y, &x)).unwrap();
        assert_close(&hand, &mirrored, "swap factor symmetry");

        let coeffs = SeminormalCoeffs::build(&p, &shape).unwrap();
        let head = coeffs.index_of(&StandardTableau::row_reading(&shape)).unwrap();
        let tail = coeffs.index_of(&StandardTableau::column_reading(&shape)).unwrap();
        assert_ne!(head, tail);
        assert_close(
            &coeffs.c_pair_squared(tail, head).unwrap(),
            &hand,
            "stepwise single swap",
        );
        let tabs = enumerate_std_tableaux(&shape);
        let find = |i: usize| {
            tabs.iter()
                .find(|t| coeffs.index_of(t) == Some(i))
                .unwrap()
        };
        assert_close(
            &closed_pair_product(&p, find(tail), find(head)).unwrap(),
            &hand,
            "closed single swap",
        );
    }

    for bullet in [Bullet::Zero, Bullet::S, Bullet::Ss] {
        for m in 0..=2usize {
            if bullet == Bullet::Zero && m == 0 {
                continue;
            }
            for n in 1..=5usize {
                if n == 5 && m > 1 {
                    continue;
                }
                let p = generic(bullet, m, n);
                for shape in enumerate_multipartitions(n, m, bullet) {
                    let report = c_cross_check(&p, &shape).unwrap();
                    assert!(
                        report.all_pass(),
                        "{:?} m={} shape {}: worst {:?}",
                        bullet,
                        m,
                        shape.encode(),
                        report.worst()
                    );
                }
            }
        }
    }
}

#[test]
fn dimension_identity_holds_on_the_window() {
    for bullet in [Bullet::Zero, Bullet::S, Bullet::Ss] {
        for m in 0..=2usize {
            for n in 0..=4usize {
                let (lhs, rhs) = pbw_dimension_identity(bullet, m, n);
                assert_eq!(lhs, rhs, "{:?} m={} n={}", bullet, m, n);
            }
        }
    }
}

#[test]
fn eigenvalues_stay_separated_from_signs() {
    let p = generic(Bullet::Zero, 2, 3);
    let one = PrecComplex::from_int(1);
    let neg_one = PrecComplex::from_int(-1);
    for rep in build_all_blocks(&p, &BuildOpts::default()).unwrap() {
        for i in 1..=rep.n() {
            for col in 0..rep.dim() {
                let e = &rep.x(i)[(col, col)];
                assert_eq!(e.identity(&one), Identity::Distinct);
                assert_eq!(e.identity(&neg_one), Identity::Distinct);
            }
        }
    }
}

#[test]
fn dump_files_carry_the_declared_layout() {
    let p = generic(Bullet::Zero, 1, 2);
    let shape = MultiPartition::parse("0:[1,1]").unwrap();
    let rep = build_block(&shape, &p, &BuildOpts::default()).unwrap();
    let dir = std::env::temp_dir().join(format!("seminormal_dump_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dump_block(&rep, &dir).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# shape: 0:[1,1]"));
    assert!(text.contains("matrix X_1"));
    assert!(text.contains("matrix C_2"));
    assert!(text.contains("matrix T_1"));
    assert!(text.contains("weights"));
    let body: Vec<&str> = text
        .lines()
        .skip_while(|l| *l != "matrix X_1")
        .skip(1)
        .take_while(|l| !l.starts_with("matrix"))
        .collect();
    assert_eq!(body.len(), rep.dim());
    let first_row: Vec<&str> = body[0].split(' ').collect();
    assert_eq!(first_row.len(), rep.dim());
    assert!(first_row[0].contains(','));
    std::fs::remove_dir_all(&dir).ok();

    // distinct shapes land in distinct files
    let mut names = HashSet::new();
    for s in enumerate_multipartitions(2, 1, Bullet::Zero) {
        let r = build_block(&s, &p, &BuildOpts::default()).unwrap();
        let dir = std::env::temp_dir().join(format!("seminormal_dump2_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dump_block(&r, &dir).unwrap();
        assert!(names.insert(path.file_name().unwrap().to_owned()));
        std::fs::remove_dir_all(&dir).ok();
    }
}

