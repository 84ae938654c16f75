//! The total Johnson map on simulated elements of the Johnson filtration, its
//! `[k, 2k)` truncation and the infinitesimal Morita homomorphism `m_k`.
//!
//! An element of `IC[k]` is modeled by an automorphism of the truncated free
//! Lie algebra that fixes `omega` and deviates from the identity only in
//! degrees `>= k + 1`. For generators `a_i -> a_i + u_i`, `b_i -> b_i + v_i`
//! the total Johnson map is `sum_i (-b_i (x) u_i + a_i (x) v_i)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use crate::automorphism::{
    apply_aut, apply_der, compose, deviation_degree, exp_der, inverse_aut, log_aut, log_aut_apply, Derivation,
    LieAutomorphism,
};
use crate::error::{Error, Result};
use crate::free_lie::{LieSeries, Word};
use crate::jacobi::{eta, eta_inverse, random_tree, HLieTensor, TreeCombo};
use crate::koszul::{class_of, HomologyClass, KoszulComplex, WedgeChain};
use crate::lincomb::LinComb;
use crate::linalg::Q;
use crate::symplectic::omega;

/// The derivation with `delta(a_i) = -X_{b_i}` and `delta(b_i) = X_{a_i}` for `x = sum_h h (x) X_h`.
pub fn derivation_from_tensor(x: &HLieTensor, max_degree: usize) -> Result<Derivation> {
    let genus = x.genus();
    let series = |terms: LinComb<Word>| LieSeries::from_lincomb(genus, max_degree, terms);
    let mut images = Vec::with_capacity(2 * genus);
    for i in 0..genus as u8 {
        let (a, b) = (2 * i, 2 * i + 1);
        images.push(series(x.component(b).negated()));
        images.push(series(x.component(a)));
    }
    Derivation::new(genus, max_degree, images)
}

/// `sum_i (-b_i (x) u_i + a_i (x) v_i)` for deviations `u_i`, `v_i` indexed by letter.
pub fn tensor_from_deviations(genus: usize, deviations: &[LieSeries]) -> HLieTensor {
    let mut out = HLieTensor::zero(genus);
    let one = Q::from_integer(1.into());
    for i in 0..genus as u8 {
        let (a, b) = (2 * i, 2 * i + 1);
        out.add_tensor(b, deviations[a as usize].terms(), &-one.clone());
        out.add_tensor(a, deviations[b as usize].terms(), &one);
    }
    out
}

/// `psi(omega) = omega` at the working truncation.
pub fn is_omega_fixing(psi: &LieAutomorphism) -> bool {
    let w = omega(psi.genus(), psi.max_degree());
    apply_aut(psi, &w).is_ok_and(|x| x == w)
}

fn check_ic(psi: &LieAutomorphism, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Precondition("the filtration index k must be at least 1".into()));
    }
    if psi.max_degree() < 2 * k {
        return Err(Error::Precondition(format!(
            "working truncation {} is below 2k = {}",
            psi.max_degree(),
            2 * k
        )));
    }
    if let Some(d) = deviation_degree(psi).filter(|&d| d <= k) {
        return Err(Error::Domain(format!(
            "automorphism deviates from the identity in degree {d}, so it is not in IC[{k}]"
        )));
    }
    Ok(())
}

/// `tau_{[k,2k)}(psi)`, graded over tree degrees `k..2k`.
pub fn tau_truncated(psi: &LieAutomorphism, k: usize) -> Result<HLieTensor> {
    check_ic(psi, k)?;
    let devs: Vec<LieSeries> = psi.deviations().iter().map(|d| d.degree_range(k + 1, 2 * k)).collect();
    Ok(tensor_from_deviations(psi.genus(), &devs))
}

/// `tau_k(psi)`, the degree-`k` piece of the truncated total Johnson map.
pub fn johnson_k(psi: &LieAutomorphism, k: usize) -> Result<HLieTensor> {
    Ok(tau_truncated(psi, k)?.tree_degree_part(k))
}

/// Whether every graded piece of `tau_{[k,2k)}(psi)` lies in the kernel of the bracket.
pub fn tau_bracket_check(psi: &LieAutomorphism, k: usize) -> Result<bool> {
    Ok(tau_truncated(psi, k)?.bracket_contraction().is_zero())
}

/// `eta^{-1} tau_{[k,2k)}(psi)`, degree by degree.
pub fn tau_to_trees(psi: &LieAutomorphism, k: usize) -> Result<TreeCombo> {
    let tau = tau_truncated(psi, k)?;
    if !tau.bracket_contraction().is_zero() {
        return Err(Error::Domain("Johnson image has a nonzero bracket; the automorphism does not fix omega".into()));
    }
    let mut out = TreeCombo::zero(psi.genus());
    for j in k..2 * k {
        let piece = tau.tree_degree_part(j);
        if !piece.is_zero() {
            out = out.add(&eta_inverse(&piece, j)?)?;
        }
    }
    Ok(out)
}

/// `exp` of the derivation `eta(T)` for random trees `T` of degrees `k..n`, seeded.
pub fn random_ic_element(genus: usize, k: usize, seed: u64, n: usize) -> Result<LieAutomorphism> {
    if genus == 0 || k == 0 || 2 * k > n {
        return Err(Error::Precondition(format!(
            "need genus >= 1 and 1 <= k with 2k <= N (genus {genus}, k {k}, N {n})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trees = TreeCombo::zero(genus);
    for d in k..n {
        for _ in 0..rng.gen_range(1..=2) {
            let c = match rng.gen_range(-3i64..=2) {
                c if c >= 0 => c + 1,
                c => c,
            };
            if let Ok(t) = random_tree(&mut rng, genus, d) {
                trees.add_diagram(t, Q::from_integer(c.into()));
            }
        }
    }
    Ok(exp_der(&derivation_from_tensor(&eta(&trees), n)?))
}

/// `exp` of the derivation attached to a tree combination of positive degrees.
pub fn tree_automorphism(trees: &TreeCombo, n: usize) -> Result<LieAutomorphism> {
    Ok(exp_der(&derivation_from_tensor(&eta(trees), n)?))
}

/// `m_k(psi)`: the class of a `d_3`-antecedent of `w - psi(w)`, `w = sum_i a_i ^ b_i`,
/// reduced modulo `L_{>k}`.
pub fn morita_mk(psi: &LieAutomorphism, k: usize) -> Result<HomologyClass> {
    check_ic(psi, k)?;
    let genus = psi.genus();
    let class = 2 * k;
    let psi = psi.with_max_degree(class);
    if !is_omega_fixing(&psi) {
        return Err(Error::Domain("automorphism does not fix omega".into()));
    }
    let mut c = WedgeChain::zero(genus, Some(class), 2);
    for i in 0..genus as u8 {
        let (a, b) = (2 * i, 2 * i + 1);
        let ga = LieSeries::letter(genus, class, a);
        let gb = LieSeries::letter(genus, class, b);
        let pa = apply_aut(&psi, &ga)?;
        let pb = apply_aut(&psi, &gb)?;
        c = &c + &WedgeChain::wedge(genus, Some(class), &[ga, gb]);
        c = &c - &WedgeChain::wedge(genus, Some(class), &[pa, pb]);
    }
    let complex = KoszulComplex::shared(genus, class);
    let mut t = WedgeChain::zero(genus, Some(class), 3);
    // H_3(L / L_{>k}) lives in degrees k+2..=2k+1
    for d in k + 2..=2 * k + 1 {
        let cd = c.degree_part(d);
        if cd.is_zero() {
            continue;
        }
        let td = complex
            .solve_d3(&cd, d)?
            .ok_or_else(|| Error::Invariant(format!("w - psi(w) is not a boundary in degree {d}")))?;
        t = &t + &td;
    }
    class_of(&t.reduce(k), k)
}

/// Both sides of the kernel characterization of `tau_{[k,2k)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelCheck {
    pub tau_vanishes: bool,
    pub deviation_above_2k: bool,
}

impl KernelCheck {
    pub fn agrees(&self) -> bool {
        self.tau_vanishes == self.deviation_above_2k
    }

    pub fn in_kernel(&self) -> bool {
        self.tau_vanishes && self.deviation_above_2k
    }
}

pub fn kernel_check(psi: &LieAutomorphism, k: usize) -> Result<KernelCheck> {
    let tau_vanishes = tau_truncated(psi, k)?.is_zero();
    let deviation_above_2k = deviation_degree(psi).is_none_or(|d| d > 2 * k);
    Ok(KernelCheck {
        tau_vanishes,
        deviation_above_2k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_lie::br;
    use crate::jacobi::{tree_equal, Rooted};
    use crate::koszul::capital_phi;
    use crate::linalg::q;
    use crate::symplectic::{build_corrector, omega_tilde};

    fn single_tree(genus: usize, seed: u64, d: usize) -> TreeCombo {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        TreeCombo::from_tree(genus, random_tree(&mut rng, genus, d).unwrap())
    }

    #[test]
    fn identity_cases() {
        let id = LieAutomorphism::identity(2, 4);
        assert!(is_omega_fixing(&id));
        assert!(tau_truncated(&id, 2).unwrap().is_zero());
        assert!(johnson_k(&id, 2).unwrap().is_zero());
        assert!(tau_to_trees(&id, 2).unwrap().is_zero());
        assert!(morita_mk(&id, 2).unwrap().is_zero());
        let kc = kernel_check(&id, 2).unwrap();
        assert!(kc.tau_vanishes && kc.deviation_above_2k);
    }

    #[test]
    fn corrector_maps_omega_to_omega_tilde() {
        let psi = build_corrector(2, 5).unwrap();
        assert_eq!(apply_aut(&psi, &omega(2, 5)).unwrap(), omega_tilde(2, 5));
    }

    #[test]
    fn non_fixing_automorphism() {
        let genus = 1;
        let (a, b) = (LieSeries::letter(genus, 4, 0), LieSeries::letter(genus, 4, 1));
        let dev = vec![br(&a, &br(&a, &b)), LieSeries::zero(genus, 4)];
        let psi = LieAutomorphism::from_deviations(genus, 4, &dev).unwrap();
        assert!(!is_omega_fixing(&psi));
        assert!(!tau_bracket_check(&psi, 2).unwrap());
        assert!(matches!(tau_to_trees(&psi, 2), Err(Error::Domain(_))));
        assert!(matches!(morita_mk(&psi, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn tree_derivations_fix_omega() {
        for seed in 0..5 {
            let psi = tree_automorphism(&single_tree(2, seed, 2), 5).unwrap();
            assert!(is_omega_fixing(&psi));
        }
    }

    #[test]
    fn rejects_elements_outside_the_filtration() {
        let psi = tree_automorphism(&single_tree(2, 3, 1), 4).unwrap();
        assert!(matches!(tau_truncated(&psi, 2), Err(Error::Domain(_))));
        assert!(matches!(tau_truncated(&psi, 0), Err(Error::Precondition(_))));
        assert!(matches!(tau_truncated(&psi.with_max_degree(3), 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn tau_of_single_tree_is_eta() {
        for (genus, k, seed) in [(2, 1, 0), (2, 2, 1), (1, 2, 2), (2, 3, 3)] {
            let t = single_tree(genus, seed, k);
            let psi = tree_automorphism(&t, 2 * k).unwrap();
            assert_eq!(tau_truncated(&psi, k).unwrap(), eta(&t));
            assert_eq!(johnson_k(&psi, k).unwrap(), eta(&t));
            assert!(tau_bracket_check(&psi, k).unwrap());
            assert!(tree_equal(&tau_to_trees(&psi, k).unwrap(), &t));
        }
    }

    #[test]
    fn two_trees_pass_the_bracket_check() {
        let genus = 2;
        let k = 2;
        let t = single_tree(genus, 5, k).add(&single_tree(genus, 6, k + 1)).unwrap();
        let psi = tree_automorphism(&t, 2 * k).unwrap();
        assert!(tau_bracket_check(&psi, k).unwrap());
        let trees = tau_to_trees(&psi, k).unwrap();
        assert_eq!(eta(&trees.degree_part(k)), johnson_k(&psi, k).unwrap());
    }

    #[test]
    fn random_ic_elements() {
        let psi = random_ic_element(2, 2, 7, 5).unwrap();
        assert!(is_omega_fixing(&psi));
        assert!(deviation_degree(&psi).is_some_and(|d| d >= 3));
        assert_eq!(psi, random_ic_element(2, 2, 7, 5).unwrap());
        assert!(random_ic_element(2, 3, 7, 5).is_err());
    }

    #[test]
    fn kernel_examples() {
        let k = 1;
        let deep = tree_automorphism(&single_tree(2, 8, 2 * k), 4).unwrap();
        let kc = kernel_check(&deep, k).unwrap();
        assert!(kc.tau_vanishes && kc.deviation_above_2k);
        assert_eq!(deviation_degree(&deep), Some(2 * k + 1));
        let shallow = tree_automorphism(&single_tree(2, 9, k), 4).unwrap();
        let kc = kernel_check(&shallow, k).unwrap();
        assert!(!kc.tau_vanishes && !kc.deviation_above_2k);
    }

    #[test]
    fn morita_of_y_tree() {
        let genus = 2;
        let t = TreeCombo::planted(genus, 0, Rooted::node(Rooted::leaf(1), Rooted::leaf(2)));
        let psi = tree_automorphism(&t, 2).unwrap();
        let m = morita_mk(&psi, 1).unwrap();
        assert!(!m.is_zero());
        assert_eq!(m.neg(), capital_phi(&t, 1).unwrap());
    }

    #[test]
    fn morita_identity_on_random_elements() {
        for (genus, k) in [(1, 2), (2, 1), (2, 2)] {
            for seed in 0..3 {
                let psi = random_ic_element(genus, k, seed, 2 * k).unwrap();
                let lhs = morita_mk(&psi, k).unwrap().neg();
                let rhs = capital_phi(&tau_to_trees(&psi, k).unwrap(), k).unwrap();
                assert_eq!(lhs, rhs, "genus {genus}, k {k}, seed {seed}");
            }
        }
    }

    #[test]
    fn additivity() {
        for (genus, k) in [(1, 2), (2, 1)] {
            let psi = random_ic_element(genus, k, 11, 2 * k).unwrap();
            let phi = random_ic_element(genus, k, 12, 2 * k).unwrap();
            let both = compose(&psi, &phi).unwrap();
            let sum = tau_truncated(&psi, k).unwrap().add(&tau_truncated(&phi, k).unwrap()).unwrap();
            assert_eq!(tau_truncated(&both, k).unwrap(), sum);
            let msum = morita_mk(&psi, k).unwrap().add(&morita_mk(&phi, k).unwrap()).unwrap();
            assert_eq!(morita_mk(&both, k).unwrap(), msum);
        }
    }

    #[test]
    fn derivation_from_tensor_values() {
        let genus = 1;
        let mut x = HLieTensor::zero(genus);
        x.add_tensor(0, &LinComb::basis(vec![0, 1]), &q(2));
        let d = derivation_from_tensor(&x, 3).unwrap();
        assert!(d.images()[0].is_zero());
        assert_eq!(d.images()[1].coeff(&[0, 1]), q(2));
        let mut bad = HLieTensor::zero(genus);
        bad.add_tensor(0, &LinComb::basis(vec![1]), &q(1));
        assert!(derivation_from_tensor(&bad, 3).is_err());
    }
}
