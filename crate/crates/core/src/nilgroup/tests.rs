use std::sync::Arc;

use super::*;
use crate::scalar::{q, qi};

fn qv(v: &[(i64, i64)]) -> GroupElement<Q> {
    GroupElement::new(v.iter().map(|&(n, d)| q(n, d)).collect())
}

fn iv(v: &[i64]) -> GroupElement<Q> {
    GroupElement::new(v.iter().map(|&x| qi(x)).collect())
}

fn heisenberg_generic() -> MalcevPresentation {
    MalcevPresentation::build(3, 2, vec![3, 1], &[(0, 1, 2, qi(1))]).unwrap()
}

fn filiform(m: usize) -> Result<MalcevPresentation> {
    // [V_1, V_i] = V_{i+1} for i >= 2
    let constants: Vec<StructureConstant> = (1..m - 1).map(|i| (0, i, i + 1, qi(1))).collect();
    let d = m - 1;
    let mut dims = vec![m];
    for l in 2..=d {
        dims.push(m - l);
    }
    MalcevPresentation::build(m, d, dims, &constants)
}

#[test]
fn torus_product() {
    let t = MalcevPresentation::torus(2);
    let a = GroupElement::new(vec![0.3, 0.4]);
    let b = GroupElement::new(vec![0.5, 0.9]);
    let c = t.multiply(&a, &b).unwrap();
    assert!((c.coords[0] - 0.8).abs() < 1e-15 && (c.coords[1] - 1.3).abs() < 1e-15);
}

#[test]
fn heisenberg_products_and_inverse() {
    for h in [MalcevPresentation::heisenberg(), heisenberg_generic()] {
        assert_eq!(h.multiply(&iv(&[1, 0, 0]), &iv(&[0, 1, 0])).unwrap(), iv(&[1, 1, 0]));
        assert_eq!(h.multiply(&iv(&[0, 1, 0]), &iv(&[1, 0, 0])).unwrap(), iv(&[1, 1, -1]));
        assert_eq!(h.inverse(&iv(&[1, 1, 0])).unwrap(), iv(&[-1, -1, -1]));
    }
}

#[test]
fn generic_law_matches_hand_coded() {
    assert_eq!(heisenberg_generic().mult_polys(), MalcevPresentation::heisenberg().mult_polys());
    let h5 = MalcevPresentation::heisenberg5();
    let g5 = MalcevPresentation::build(5, 2, vec![5, 1], h5.structure_constants()).unwrap();
    assert_eq!(g5.mult_polys(), h5.mult_polys());
    let prod = MalcevPresentation::direct_product(&MalcevPresentation::heisenberg(), &MalcevPresentation::torus(1));
    let gp = MalcevPresentation::build(4, 2, prod.filtration_dims().to_vec(), prod.structure_constants()).unwrap();
    assert_eq!(gp.mult_polys(), prod.mult_polys());
}

#[test]
fn direct_product_orders_layers() {
    let p = MalcevPresentation::direct_product(&MalcevPresentation::heisenberg(), &MalcevPresentation::torus(1));
    assert_eq!(p.m(), 4);
    assert_eq!(p.filtration_dims(), &[4, 1]);
    assert_eq!(p.horizontal_dim(), 3);
    // [V1, V2] = V4 after merging
    assert_eq!(p.structure_constants()[0], (0, 1, 3, qi(1)));
}

#[test]
fn mismatched_dimension_is_rejected() {
    let h = MalcevPresentation::heisenberg();
    let e = h.multiply(&iv(&[1, 0]), &iv(&[0, 1, 0])).unwrap_err();
    assert_eq!(e, Error::DimensionMismatch { expected: 3, got: 2 });
}

#[test]
fn validation_errors() {
    let e = MalcevPresentation::build(3, 2, vec![3, 1], &[(0, 1, 2, qi(1)), (1, 0, 2, qi(1))]).unwrap_err();
    assert!(matches!(e, Error::Antisymmetry { i: 1, j: 2 } | Error::Antisymmetry { i: 2, j: 1 }));

    let e = MalcevPresentation::build(3, 2, vec![3, 2], &[(0, 1, 2, qi(1))]).unwrap_err();
    assert!(matches!(e, Error::FiltrationViolation { .. }), "{e:?}");

    let jac = [(0, 1, 3, qi(1)), (2, 3, 4, qi(1))];
    let e = MalcevPresentation::build(5, 3, vec![5, 2, 1], &jac).unwrap_err();
    assert!(matches!(e, Error::JacobiViolation { i: 1, j: 2, k: 3 }), "{e:?}");

    let e = filiform(6).unwrap_err();
    assert_eq!(e, Error::StepTooLarge { step: 5 });
}

#[test]
fn step_four_filiform_is_associative() {
    let f = filiform(5).unwrap();
    assert_eq!(f.step(), 4);
    let a = qv(&[(1, 2), (-2, 3), (3, 5), (1, 7), (-4, 9)]);
    let b = qv(&[(5, 3), (1, 4), (-1, 6), (2, 11), (3, 13)]);
    let c = qv(&[(-7, 5), (2, 9), (1, 8), (-3, 4), (5, 2)]);
    let ab_c = f.multiply(&f.multiply(&a, &b).unwrap(), &c).unwrap();
    let a_bc = f.multiply(&a, &f.multiply(&b, &c).unwrap()).unwrap();
    assert_eq!(ab_c, a_bc);
    let ai = f.inverse(&a).unwrap();
    assert_eq!(f.multiply(&a, &ai).unwrap(), f.identity());
    assert_eq!(f.multiply(&ai, &a).unwrap(), f.identity());
    // exp and log are mutually inverse
    let x = f.log_coords(&a).unwrap();
    assert_eq!(f.exp_coords(&x).unwrap(), a);
}

#[test]
fn reduction_examples() {
    let t = MalcevPresentation::torus(1);
    let (p, g) = t.reduce_mod_lattice(&GroupElement::new(vec![q(23, 10)])).unwrap();
    assert_eq!(p.coords, vec![q(3, 10)]);
    assert_eq!(g, iv(&[2]));

    let h = MalcevPresentation::heisenberg();
    let (p, g) = h.reduce_mod_lattice(&qv(&[(0, 1), (0, 1), (-1, 4)])).unwrap();
    assert_eq!(p.coords, vec![qi(0), qi(0), q(3, 4)]);
    assert_eq!(g, iv(&[0, 0, -1]));

    for x in [qv(&[(3, 2), (1, 2), (0, 1)]), qv(&[(-7, 3), (5, 2), (7, 10)]), qv(&[(1, 2), (1, 2), (9, 10)])] {
        let (p, g) = h.reduce_mod_lattice(&x).unwrap();
        assert!(p.coords.iter().all(|c| *c >= qi(0) && *c < qi(1)), "{p:?}");
        assert!(g.is_integral());
        assert_eq!(h.multiply(&p.as_element(), &g).unwrap(), x);
    }
}

#[test]
fn float_reduction_stays_in_domain() {
    let h = MalcevPresentation::heisenberg();
    let (p, g) = h.reduce_mod_lattice(&GroupElement::new(vec![-1e-18, 2.5, -3.25])).unwrap();
    assert!(p.coords.iter().all(|&c| (0.0..1.0).contains(&c)), "{p:?}");
    let back = h.multiply(&p.as_element(), &g).unwrap();
    assert!((back.coords[2] + 3.25).abs() < 1e-12);
}

#[test]
fn distances() {
    let t = MalcevPresentation::torus(1);
    let x = ManifoldPoint::new_unchecked(vec![0.95]);
    let y = ManifoldPoint::new_unchecked(vec![0.05]);
    assert!((t.manifold_dist(&x, &y).unwrap() - 0.1).abs() < 1e-12);
    let h = MalcevPresentation::heisenberg();
    let d = h.dist(&GroupElement::new(vec![1.0, 0.0, 0.0]), &h.identity()).unwrap();
    assert_eq!(d, 1.0);
}

#[test]
fn characters() {
    let h = MalcevPresentation::heisenberg();
    let eta = HorizontalCharacter::new(vec![2, 0, 0]);
    let v = h.char_eval(&eta, &qv(&[(1, 4), (7, 10), (3, 10)])).unwrap();
    assert_eq!(v, q(1, 2));
    let bad = HorizontalCharacter::new(vec![0, 0, 1]);
    assert!(matches!(h.char_eval(&bad, &h.identity::<Q>()), Err(Error::NotHorizontal(_))));
    // invariant under right multiplication by the lattice
    let g = qv(&[(1, 3), (2, 7), (5, 11)]);
    let gg = h.multiply(&g, &iv(&[3, -2, 5])).unwrap();
    let eta = HorizontalCharacter::new(vec![1, 4, 0]);
    assert_eq!(h.char_eval(&eta, &g).unwrap(), h.char_eval(&eta, &gg).unwrap());
}

#[test]
fn rationality() {
    let t = MalcevPresentation::torus(1);
    assert_eq!(t.is_rational_element(&qv(&[(1, 3)]), 10).unwrap(), Some(3));
    assert_eq!(t.is_rational_element(&qv(&[(665857, 470832)]), 100).unwrap(), None);
    let h = MalcevPresentation::heisenberg();
    assert_eq!(h.is_rational_element(&qv(&[(1, 2), (0, 1), (0, 1)]), 10).unwrap(), Some(2));
}

#[test]
fn power_matches_repeated_product() {
    let h = MalcevPresentation::heisenberg();
    let g = qv(&[(1, 3), (2, 5), (1, 7)]);
    let mut acc = h.identity();
    for _ in 0..7 {
        acc = h.multiply(&acc, &g).unwrap();
    }
    assert_eq!(h.power(&g, 7).unwrap(), acc);
    let inv7 = h.power(&g, -7).unwrap();
    assert_eq!(h.multiply(&acc, &inv7).unwrap(), h.identity());
}

#[test]
fn text_roundtrip_and_line_numbers() {
    let h = MalcevPresentation::heisenberg5();
    let back = MalcevPresentation::parse(&h.to_text()).unwrap();
    assert_eq!(back, h);
    let bad = "[group]\nm = 3\nd = 2\nfiltration_dims = 3, 1\n[brackets]\n1 2 3 1\n2 1 3 1\n";
    let e = MalcevPresentation::parse(bad).unwrap_err();
    assert!(matches!(e, Error::Parse { line: 6, .. } | Error::Parse { line: 7, .. }), "{e:?}");
}

#[test]
fn kernel_subgroups() {
    let t2 = Arc::new(MalcevPresentation::torus(2));
    let s = Subgroup::horizontal_kernel(t2, &HorizontalCharacter::new(vec![1, 0])).unwrap();
    assert_eq!(s.child.m(), 1);
    assert_eq!(s.horizontal, vec![vec![0, 1]]);

    let t2 = Arc::new(MalcevPresentation::torus(2));
    let s = Subgroup::horizontal_kernel(t2, &HorizontalCharacter::new(vec![2, 3])).unwrap();
    assert_eq!(s.horizontal, vec![vec![3, -2]]);

    let h = Arc::new(MalcevPresentation::heisenberg());
    let s = Subgroup::horizontal_kernel(h.clone(), &HorizontalCharacter::new(vec![1, 0, 0])).unwrap();
    assert_eq!(s.child.m(), 2);
    assert_eq!(s.basis, vec![vec![qi(0), qi(1), qi(0)], vec![qi(0), qi(0), qi(1)]]);
    assert!(s.child.structure_constants().is_empty());
}

#[test]
fn kernel_embedding_is_a_homomorphism() {
    let h = Arc::new(MalcevPresentation::heisenberg5());
    let s = Subgroup::horizontal_kernel(h.clone(), &HorizontalCharacter::new(vec![1, 2, -1, 0, 0])).unwrap();
    assert_eq!(s.child.m(), 4);
    let y1 = qv(&[(1, 2), (2, 3), (-1, 5), (3, 7)]);
    let y2 = qv(&[(-3, 4), (1, 6), (2, 9), (-5, 2)]);
    let lhs = s.to_parent(&s.child.multiply(&y1, &y2).unwrap()).unwrap();
    let rhs = h.multiply(&s.to_parent(&y1).unwrap(), &s.to_parent(&y2).unwrap()).unwrap();
    assert_eq!(lhs, rhs);
    assert_eq!(s.from_parent(&rhs).unwrap(), s.child.multiply(&y1, &y2).unwrap());
    // integer child coordinates land in the lattice
    assert!(s.to_parent(&iv(&[1, -2, 3, 1])).unwrap().is_integral());
}

#[test]
fn trivial_kernel_of_circle() {
    let t = Arc::new(MalcevPresentation::torus(1));
    let s = Subgroup::horizontal_kernel(t, &HorizontalCharacter::new(vec![2])).unwrap();
    assert_eq!(s.child.m(), 0);
    assert_eq!(s.to_parent(&GroupElement::<Q>::new(vec![])).unwrap(), iv(&[0]));
}
