use super::*;
use crate::qstate::{
    haar_unitary_with, max_abs_diff, random_density, random_density_with, states, tensor_product,
    PureState,
};
use crate::seed;

fn q(v: f64) -> EntropicParameter {
    EntropicParameter::new(v).unwrap()
}

fn dims(v: &[usize]) -> Dims {
    Dims::new(v.to_vec()).unwrap()
}

fn bell_dm() -> DensityMatrix {
    DensityMatrix::from_pure(&states::bell())
}

fn computational(d: usize) -> (WeylPair, FourierBasis) {
    weyl_from_basis(&CMatrix::identity(d, d)).unwrap()
}

fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    max_abs_diff(a, b) <= tol
}

#[test]
fn qubit_pair_is_pauli() {
    let (pair, _) = computational(2);
    let z = CMatrix::from_row_slice(2, 2, &[ONE, C64::new(0.0, 0.0), C64::new(0.0, 0.0), -ONE]);
    let x = CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), ONE, ONE, C64::new(0.0, 0.0)]);
    assert!(close(pair.z(), &z, 1e-15));
    assert!(close(pair.x(), &x, 1e-15));
}

#[test]
fn weyl_relations_random_bases() {
    let mut rng = seed::rng(3);
    for d in 2..=5 {
        let u = haar_unitary_with(&mut rng, d);
        let (pair, fourier) = weyl_from_basis(&u).unwrap();
        let (z, x) = (pair.z(), pair.x());
        let id = CMatrix::identity(d, d);
        assert!(close(&(z * x), &(x * z * pair.omega()), 1e-12));
        assert!(close(&pair.x_pow(d as i64), &id, 1e-12));
        assert!(close(&pair.z_pow(d as i64), &id, 1e-12));
        assert!(close(&(z * z.adjoint()), &id, 1e-12));
        assert!(close(&(x * x.adjoint()), &id, 1e-12));
        assert!(close(&pair.x_pow(-1), &x.adjoint(), 1e-12));

        let f = fourier.vectors();
        assert!(close(&(f.adjoint() * f), &id, 1e-12));
        for j in 0..d {
            for k in 0..d {
                let ov = u.column(k).dotc(&f.column(j)).norm_sqr();
                assert!((ov - 1.0 / d as f64).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn shift_in_fourier_representation() {
    let mut rng = seed::rng(4);
    let u = haar_unitary_with(&mut rng, 3);
    let (pair, fourier) = weyl_from_basis(&u).unwrap();
    let mut x = CMatrix::zeros(3, 3);
    for j in 0..3 {
        let v = fourier.vector(j);
        x += (&v * v.adjoint()) * root_of_unity(3, -(j as i64));
    }
    assert!(close(&x, pair.x(), 1e-12));
}

#[test]
fn rejects_non_orthonormal_basis() {
    let mut m = CMatrix::identity(3, 3);
    m[(0, 1)] = C64::new(0.3, 0.0);
    assert!(matches!(weyl_from_basis(&m), Err(Error::NotOrthonormal(_))));
    assert!(weyl_from_basis(&CMatrix::zeros(2, 3)).is_err());
}

#[test]
fn channels_on_rho_b() {
    for s in 0..5 {
        let rho_b = random_density(&dims(&[3]), 3, s).unwrap();
        let (pair, _) = build_weyl(&eigendecompose(&rho_b)).unwrap();
        let (m0, m1) = dephase_channels(&rho_b, &pair).unwrap();
        let mixed = CMatrix::identity(3, 3) / C64::new(3.0, 0.0);
        assert!(close(m0.matrix(), rho_b.matrix(), 1e-12));
        assert!(close(m1.matrix(), &mixed, 1e-12));
        let (_, m10) = dephase_channels(&m0, &pair).unwrap();
        assert!(close(m10.matrix(), &mixed, 1e-12));
    }
}

#[test]
fn channel_forms_agree() {
    let mut rng = seed::rng(9);
    for d in 2..=4 {
        let rho_b = random_density_with(&mut rng, &dims(&[d]), d).unwrap();
        let sigma = random_density_with(&mut rng, &dims(&[d]), d).unwrap();
        let (pair, _) = build_weyl(&eigendecompose(&rho_b)).unwrap();
        let (p0, p1) = dephase_channels(&sigma, &pair).unwrap();
        let (t0, t1) = dephase_channels_twirl(&sigma, &pair).unwrap();
        assert!(close(p0.matrix(), t0.matrix(), 1e-12));
        assert!(close(p1.matrix(), t1.matrix(), 1e-12));
    }
}

#[test]
fn channels_fix_maximally_mixed() {
    let (pair, _) = computational(3);
    let mixed = DensityMatrix::maximally_mixed(dims(&[3]));
    let (m0, m1) = dephase_channels(&mixed, &pair).unwrap();
    assert!(close(m0.matrix(), mixed.matrix(), 1e-15));
    assert!(close(m1.matrix(), mixed.matrix(), 1e-15));
    assert!(dephase_channels(&DensityMatrix::maximally_mixed(dims(&[2])), &pair).is_err());
}

#[test]
fn bell_ccq_marginals() {
    let ccq = build_ccq(&bell_dm()).unwrap();
    assert_eq!(ccq.flag_dim(), 2);
    assert_eq!(ccq.form(), CcqForm::Weyl);
    let quarter = CMatrix::identity(4, 4) / C64::new(4.0, 0.0);
    assert!(close(ccq.omega_ab().matrix(), &quarter, 1e-12));
    let omega = ccq.assemble();
    assert!(close(partial_trace(&omega, &[2, 3]).unwrap().matrix(), &quarter, 1e-12));
}

#[test]
fn random_qutrit_ccq_is_valid() {
    for s in 0..5 {
        let rho = random_density(&dims(&[3, 3]), 1 + s as usize % 9, 40 + s).unwrap();
        let ccq = build_ccq(&rho).unwrap();
        let omega = ccq.assemble();
        // validating constructor: Hermitian, positive, unit trace
        DensityMatrix::new(omega.matrix().clone(), omega.dims().clone()).unwrap();

        let rho_a = partial_trace(&rho, &[0]).unwrap();
        let expect_ab = tensor_product(&rho_a, &DensityMatrix::maximally_mixed(dims(&[3])));
        let ab = partial_trace(&omega, &[2, 3]).unwrap();
        assert!(close(ab.matrix(), expect_ab.matrix(), 1e-10));
        let xy = partial_trace(&omega, &[0, 1]).unwrap();
        assert!(close(xy.matrix(), ccq.omega_xy().matrix(), 1e-10));
        assert!(close(ccq.omega_ab().matrix(), expect_ab.matrix(), 1e-10));
    }
}

#[test]
fn block_reductions_match_partial_trace() {
    let rho = random_density(&dims(&[2, 3]), 4, 17).unwrap();
    let ccq = build_ccq(&rho).unwrap();
    assert_eq!(ccq.ab_dims().as_slice(), &[3, 3]);
    let omega = ccq.assemble();
    let xab = partial_trace(&omega, &[0, 2, 3]).unwrap();
    let yab = partial_trace(&omega, &[1, 2, 3]).unwrap();
    assert!(close(xab.matrix(), ccq.omega_xab().matrix(), 1e-12));
    assert!(close(yab.matrix(), ccq.omega_yab().matrix(), 1e-12));
}

/// `ρ^x = (I⊗X^x) M0_B(ρ) (I⊗X^{-x})` and `ρ^y = M1_B((I⊗Z^y) ρ (I⊗Z^{-y}))`.
#[test]
fn conditional_states_have_channel_form() {
    let rho = random_density(&dims(&[3, 3]), 5, 23).unwrap();
    let rho_b = partial_trace(&rho, &[1]).unwrap();
    let (pair, fourier) = build_weyl(&eigendecompose(&rho_b)).unwrap();
    let id = CMatrix::identity(3, 3);
    let local = |m: &CMatrix, basis: &CMatrix| {
        let mut out = CMatrix::zeros(9, 9);
        for k in 0..3 {
            let p = kron(&id, &(basis.column(k) * basis.column(k).adjoint()));
            out += &p * m * &p;
        }
        out
    };
    let ccq = build_ccq(&rho).unwrap();
    let m0 = local(rho.matrix(), pair.basis());
    for x in 0..3 {
        let u = kron(&id, &pair.x_pow(x as i64));
        let expect = &u * &m0 * u.adjoint();
        assert!(close(ccq.x_conditional(x).matrix(), &expect, 1e-12));
    }
    for y in 0..3 {
        let u = kron(&id, &pair.z_pow(y as i64));
        let expect = local(&(&u * rho.matrix() * u.adjoint()), fourier.vectors());
        assert!(close(ccq.y_conditional(y).matrix(), &expect, 1e-12));
    }
}

#[test]
fn build_ccq_rejects_tripartite() {
    let ghz = DensityMatrix::from_pure(&states::ghz(3));
    assert!(build_ccq(&ghz).is_err());
}

#[test]
fn ccq_serialization_round_trip() {
    let rho = random_density(&dims(&[2, 2]), 3, 5).unwrap();
    let ccq = build_ccq(&rho).unwrap();
    let json = serde_json::to_string(&ccq).unwrap();
    assert!(json.contains("\"form\":\"weyl\""));
    let back: CcqState = serde_json::from_str(&json).unwrap();
    assert_eq!(back, ccq);
}

#[test]
fn general_form_validation() {
    let b = random_density(&dims(&[2, 2]), 2, 1).unwrap();
    assert!(CcqState::general(vec![b.clone(); 3]).is_err());
    assert!(CcqState::general(vec![]).is_err());
    let other = random_density(&dims(&[2, 3]), 2, 1).unwrap();
    assert!(CcqState::general(vec![b.clone(), b.clone(), b.clone(), other]).is_err());
    assert_eq!(CcqState::general(vec![b; 4]).unwrap().form(), CcqForm::General);
}

#[test]
fn bell_induced_ensembles() {
    let ens = induced_ensembles(&bell_dm()).unwrap();
    let zero = DensityMatrix::from_pure(&PureState::basis(dims(&[2]), &[0]).unwrap());
    let one = DensityMatrix::from_pure(&PureState::basis(dims(&[2]), &[1]).unwrap());
    let h = C64::new(0.5, 0.0);
    let plus = CMatrix::from_element(2, 2, h);
    let minus = CMatrix::from_row_slice(2, 2, &[h, -h, -h, h]);
    for (p, _) in ens.e0.iter().chain(ens.e1.iter()) {
        assert!((p - 0.5).abs() < 1e-14);
    }
    assert!(close(ens.e0.states()[0].matrix(), zero.matrix(), 1e-14));
    assert!(close(ens.e0.states()[1].matrix(), one.matrix(), 1e-14));
    assert!(close(ens.e1.states()[0].matrix(), &plus, 1e-14));
    assert!(close(ens.e1.states()[1].matrix(), &minus, 1e-14));
}

#[test]
fn product_ensembles_are_constant() {
    let a = random_density(&dims(&[3]), 3, 1).unwrap();
    let b = random_density(&dims(&[3]), 2, 2).unwrap();
    let ens = induced_ensembles(&tensor_product(&a, &b)).unwrap();
    assert_eq!(ens.e0.len(), 3);
    // the kernel outcome of a rank-2 ρ_B has weight zero and the placeholder
    assert_eq!(ens.e0.probabilities().as_slice()[2], 0.0);
    for (p, s) in ens.e0.iter().chain(ens.e1.iter()) {
        if p > 0.0 {
            assert!(close(s.matrix(), a.matrix(), 1e-10));
        }
    }
}

#[test]
fn ensembles_average_to_rho_a() {
    for s in 0..10 {
        let rho = random_density(&dims(&[3, 3]), 1 + s as usize % 9, s).unwrap();
        let rho_a = partial_trace(&rho, &[0]).unwrap();
        let ens = induced_ensembles(&rho).unwrap();
        assert!(close(ens.e0.average().matrix(), rho_a.matrix(), 1e-10));
        assert!(close(ens.e1.average().matrix(), rho_a.matrix(), 1e-10));
    }
}

#[test]
fn bell_closed_forms() {
    let t = closed_form_iq(&bell_dm(), q(2.0)).unwrap();
    assert!((t.xy_ab - 0.75).abs() < 1e-12);
    assert!((t.x_ab - 0.5).abs() < 1e-12);
    assert!((t.y_ab - 0.5).abs() < 1e-12);
    assert!((t.subadditivity_gap() + 0.25).abs() < 1e-12);
    assert!(verify_closed_forms(&bell_dm(), q(2.0)).unwrap() <= 1e-12);

    let t1 = closed_form_iq(&bell_dm(), q(1.0)).unwrap();
    let ln2 = std::f64::consts::LN_2;
    assert!((t1.xy_ab - 2.0 * ln2).abs() < 1e-12);
    assert!((t1.x_ab - ln2).abs() < 1e-12);
    assert!(t1.subadditivity_gap().abs() < 1e-10);
}

#[test]
fn product_closed_forms() {
    let a = random_density(&dims(&[2]), 2, 8).unwrap();
    let b = DensityMatrix::from_pure(&PureState::basis(dims(&[2]), &[1]).unwrap());
    let rho = tensor_product(&a, &b);
    let ens = induced_ensembles(&rho).unwrap();
    // E0 concentrates on one outcome; E1 is a uniform constant ensemble, whose
    // q-difference is (1 - Σ p^q) S_q(ρ_A) rather than zero
    assert!(tsallis_q_difference(&ens.e0, q(2.0)).abs() < 1e-12);
    let expect = 0.5 * tsallis(&a, q(2.0));
    assert!((tsallis_q_difference(&ens.e1, q(2.0)) - expect).abs() < 1e-12);
    assert!(verify_closed_forms(&rho, q(2.0)).unwrap() < 1e-12);

    let pure_a = DensityMatrix::from_pure(&PureState::basis(dims(&[2]), &[0]).unwrap());
    let ens = induced_ensembles(&tensor_product(&pure_a, &b)).unwrap();
    assert!(tsallis_q_difference(&ens.e0, q(2.0)).abs() < 1e-12);
    assert!(tsallis_q_difference(&ens.e1, q(2.0)).abs() < 1e-12);
}

#[test]
fn closed_forms_match_direct_random() {
    let mut rng = seed::rng(21);
    for &qq in &[1.0, 1.5, 1.7, 2.0, 3.0] {
        for d in 2..=3 {
            let rho = random_density_with(&mut rng, &dims(&[d, d]), d * d).unwrap();
            let dev = verify_closed_forms(&rho, q(qq)).unwrap();
            assert!(dev <= 1e-9, "q={qq} d={d}: {dev}");
        }
    }
}

#[test]
fn maximally_mixed_closed_forms() {
    let mixed = DensityMatrix::maximally_mixed(dims(&[2, 2]));
    for &qq in &[1.0, 1.3, 2.0, 4.0] {
        assert!(verify_closed_forms(&mixed, q(qq)).unwrap() <= 1e-10);
    }
}

#[test]
fn block_and_assembled_evaluations_agree() {
    let rho = random_density(&dims(&[3, 3]), 9, 2).unwrap();
    let ccq = build_ccq(&rho).unwrap();
    let blocks = ccq.mutual_entropies(q(2.5)).unwrap();
    let direct = direct_iq(&rho, q(2.5)).unwrap();
    assert!(blocks.max_abs_diff(&direct) < 1e-10);
}

#[test]
fn large_flags_use_block_path() {
    let rho = random_density(&dims(&[5, 5]), 3, 2).unwrap();
    assert!(verify_closed_forms(&rho, q(2.0)).unwrap() <= 1e-9);
}

#[test]
fn unequal_dims_are_embedded() {
    let rho = random_density(&dims(&[2, 3]), 6, 12).unwrap();
    assert!(verify_closed_forms(&rho, q(1.5)).unwrap() <= 1e-9);
}

#[test]
fn closed_forms_reject_small_q() {
    assert!(matches!(closed_form_iq(&bell_dm(), q(0.5)), Err(Error::ParameterBelowOne(_))));
    assert!(direct_iq(&bell_dm(), q(0.5)).is_err());
}
