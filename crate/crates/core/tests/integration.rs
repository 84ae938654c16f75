use morita_core::document::{automorphism_from_json, automorphism_to_json, expansion_from_json, expansion_to_json};
use morita_core::jacobi::{eta, format_tree_document, parse_tree_document, tree_equal, TreeCombo};
use morita_core::johnson::{
    compose, inverse_aut, is_omega_fixing, johnson_k, morita_mk, random_ic_element, tau_to_trees, tau_truncated,
};
use morita_core::koszul::{capital_phi, homology_dims};
use morita_core::symplectic::{construct_symplectic, log_zeta_inverse, omega, verify_symplectic};
use morita_core::witt_dim;

#[test]
fn constructed_expansions_verify_and_round_trip() {
    for (genus, n) in [(1, 6), (3, 4)] {
        let theta = construct_symplectic(genus, n).unwrap();
        assert!(verify_symplectic(&theta, n).is_symplectic());
        let back = expansion_from_json(&expansion_to_json(&theta)).unwrap();
        assert_eq!(back, theta);
        assert_eq!(log_zeta_inverse(&theta).unwrap(), omega(genus, n));
    }
}

#[test]
fn truncated_expansion_is_not_verified_beyond_its_degree() {
    let theta = construct_symplectic(1, 3).unwrap();
    let r = verify_symplectic(&theta, 5);
    assert!(!r.is_symplectic());
    assert!(!r.degree_available);
}

#[test]
fn hopf_formula_for_h2() {
    for (genus, k) in [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2)] {
        let h2 = homology_dims(genus, k, 2).unwrap();
        let expected = witt_dim(2 * genus, k + 1);
        assert_eq!(h2.into_iter().collect::<Vec<_>>(), vec![(k + 1, expected)], "genus {genus}, k {k}");
        let h1 = homology_dims(genus, k, 1).unwrap();
        assert_eq!(h1.into_iter().collect::<Vec<_>>(), vec![(1, 2 * genus)]);
    }
}

#[test]
fn h3_is_concentrated_in_k_plus_2_to_2k_plus_1() {
    for (genus, k) in [(1, 2), (1, 3), (2, 1), (2, 2)] {
        let h3 = homology_dims(genus, k, 3).unwrap();
        assert!(h3.keys().all(|&d| (k + 2..=2 * k + 1).contains(&d)), "{h3:?}");
    }
}

#[test]
fn johnson_is_the_lowest_tree_part() {
    for seed in 0..4 {
        let (genus, k) = (2, 2);
        let psi = random_ic_element(genus, k, seed, 2 * k).unwrap();
        let trees = tau_to_trees(&psi, k).unwrap();
        assert_eq!(eta(&trees.degree_part(k)), johnson_k(&psi, k).unwrap());
    }
}

#[test]
fn inverse_elements_have_opposite_invariants() {
    let (genus, k) = (2, 1);
    let psi = random_ic_element(genus, k, 21, 2 * k).unwrap();
    let inv = inverse_aut(&psi);
    assert!(is_omega_fixing(&inv));
    let tau = tau_truncated(&psi, k).unwrap();
    let tau_inv = tau_truncated(&inv, k).unwrap();
    assert!(tau.add(&tau_inv).unwrap().is_zero());
    assert!(morita_mk(&psi, k).unwrap().add(&morita_mk(&inv, k).unwrap()).unwrap().is_zero());
    assert!(compose(&psi, &inv).unwrap().is_identity());
}

#[test]
fn documents_carry_random_elements_through_the_pipeline() {
    let psi = random_ic_element(1, 2, 5, 5).unwrap();
    let psi = automorphism_from_json(&automorphism_to_json(&psi)).unwrap();
    let trees = tau_to_trees(&psi, 2).unwrap();
    let reread: TreeCombo = parse_tree_document(1, &format_tree_document(&trees)).unwrap();
    assert!(tree_equal(&reread, &trees));
    assert_eq!(morita_mk(&psi, 2).unwrap().neg(), capital_phi(&reread, 2).unwrap());
}
