//! Filtration-preserving automorphisms and derivations of the truncated free
//! Lie algebra, both determined by their values on the generators.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::free_lie::{br, standard_factorization, Gen, LieSeries, Word};
use crate::lincomb::LinComb;
use crate::linalg::Q;

fn check_images(genus: usize, max_degree: usize, images: &[LieSeries]) -> Result<()> {
    if images.len() != 2 * genus {
        return Err(Error::DimensionMismatch {
            expected: 2 * genus,
            found: images.len(),
        });
    }
    for img in images {
        if img.genus() != genus || img.max_degree() != max_degree {
            return Err(Error::ContextMismatch(format!(
                "image in (genus {}, degree {}) for map in (genus {genus}, degree {max_degree})",
                img.genus(),
                img.max_degree()
            )));
        }
    }
    Ok(())
}

/// An automorphism `psi` with `psi(h) = h + (deg >= 2)` on every generator.
#[derive(Clone, PartialEq, Eq)]
pub struct LieAutomorphism {
    genus: usize,
    max_degree: usize,
    images: Vec<LieSeries>,
}

impl LieAutomorphism {
    pub fn identity(genus: usize, max_degree: usize) -> Self {
        LieAutomorphism {
            genus,
            max_degree,
            images: (0..2 * genus as u8)
                .map(|l| LieSeries::letter(genus, max_degree, l))
                .collect(),
        }
    }

    /// `images` are indexed by letter code. Each must equal its generator in degree 1
    /// and have no other degree-1 term.
    pub fn new(genus: usize, max_degree: usize, images: Vec<LieSeries>) -> Result<Self> {
        check_images(genus, max_degree, &images)?;
        for (l, img) in images.iter().enumerate() {
            if img.degree_part(1) != LieSeries::letter(genus, max_degree, l as u8) {
                return Err(Error::Domain(format!(
                    "image of {} is not the identity on the graded level",
                    Gen::from_letter(l as u8)
                )));
            }
        }
        Ok(LieAutomorphism {
            genus,
            max_degree,
            images,
        })
    }

    /// Identity plus the given deviations (indexed by letter code).
    pub fn from_deviations(genus: usize, max_degree: usize, deviations: &[LieSeries]) -> Result<Self> {
        check_images(genus, max_degree, deviations)?;
        let images = deviations
            .iter()
            .enumerate()
            .map(|(l, d)| &LieSeries::letter(genus, max_degree, l as u8) + d)
            .collect();
        Self::new(genus, max_degree, images)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn image(&self, g: Gen) -> &LieSeries {
        &self.images[g.letter() as usize]
    }

    pub fn images(&self) -> &[LieSeries] {
        &self.images
    }

    /// `psi(h) - h` for the generator with letter code `l`.
    pub fn deviation(&self, l: u8) -> LieSeries {
        &self.images[l as usize] - &LieSeries::letter(self.genus, self.max_degree, l)
    }

    pub fn deviations(&self) -> Vec<LieSeries> {
        (0..2 * self.genus as u8).map(|l| self.deviation(l)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.deviations().iter().all(LieSeries::is_zero)
    }

    /// Same automorphism acting on `L / L_{>n}`.
    pub fn with_max_degree(&self, n: usize) -> Self {
        LieAutomorphism {
            genus: self.genus,
            max_degree: n,
            images: self.images.iter().map(|x| x.with_max_degree(n)).collect(),
        }
    }

    fn same_context(&self, x: &LieSeries) -> Result<()> {
        if x.genus() != self.genus || x.max_degree() != self.max_degree {
            return Err(Error::ContextMismatch(format!(
                "series in (genus {}, degree {}) for map in (genus {}, degree {})",
                x.genus(),
                x.max_degree(),
                self.genus,
                self.max_degree
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for LieAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LieAutomorphism(g={}, N={})", self.genus, self.max_degree)?;
        for (l, img) in self.images.iter().enumerate() {
            writeln!(f, "  {} -> {img}", Gen::from_letter(l as u8))?;
        }
        Ok(())
    }
}

fn aut_on_basis(psi: &LieAutomorphism, w: &[u8], memo: &mut HashMap<Word, LieSeries>) -> LieSeries {
    if let Some(v) = memo.get(w) {
        return v.clone();
    }
    let value = if w.len() == 1 {
        psi.images[w[0] as usize].clone()
    } else {
        let i = standard_factorization(w);
        let pu = aut_on_basis(psi, &w[..i], memo);
        let pv = aut_on_basis(psi, &w[i..], memo);
        br(&pu, &pv)
    };
    memo.insert(w.to_vec(), value.clone());
    value
}

/// `psi(x)`, extending the generator images as a Lie morphism.
pub fn apply_aut(psi: &LieAutomorphism, x: &LieSeries) -> Result<LieSeries> {
    psi.same_context(x)?;
    let mut memo = HashMap::new();
    let mut out = LieSeries::zero(psi.genus, psi.max_degree);
    for (w, c) in x.terms().iter() {
        out.add_scaled(&aut_on_basis(psi, w, &mut memo), c);
    }
    Ok(out)
}

/// `psi o phi`.
pub fn compose(psi: &LieAutomorphism, phi: &LieAutomorphism) -> Result<LieAutomorphism> {
    if psi.genus != phi.genus || psi.max_degree != phi.max_degree {
        return Err(Error::ContextMismatch("composing automorphisms of different contexts".into()));
    }
    let images = phi
        .images
        .iter()
        .map(|x| apply_aut(psi, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(LieAutomorphism {
        genus: psi.genus,
        max_degree: psi.max_degree,
        images,
    })
}

/// Inverse automorphism, by the fixed-point iteration `chi <- chi - (psi o chi - id)`.
pub fn inverse_aut(psi: &LieAutomorphism) -> LieAutomorphism {
    let mut chi = LieAutomorphism::identity(psi.genus, psi.max_degree);
    for _ in 0..=psi.max_degree {
        let err = compose(psi, &chi).expect("same context").deviations();
        if err.iter().all(LieSeries::is_zero) {
            break;
        }
        chi.images = chi.images.iter().zip(&err).map(|(c, e)| c - e).collect();
    }
    chi
}

/// A derivation with values in degree `>= 2` on the generators.
#[derive(Clone, PartialEq, Eq)]
pub struct Derivation {
    genus: usize,
    max_degree: usize,
    images: Vec<LieSeries>,
}

impl Derivation {
    pub fn zero(genus: usize, max_degree: usize) -> Self {
        Derivation {
            genus,
            max_degree,
            images: vec![LieSeries::zero(genus, max_degree); 2 * genus],
        }
    }

    pub fn new(genus: usize, max_degree: usize, images: Vec<LieSeries>) -> Result<Self> {
        check_images(genus, max_degree, &images)?;
        for (l, img) in images.iter().enumerate() {
            if img.min_degree().is_some_and(|d| d < 2) {
                return Err(Error::Domain(format!(
                    "derivation value on {} has a term below degree 2",
                    Gen::from_letter(l as u8)
                )));
            }
        }
        Ok(Derivation {
            genus,
            max_degree,
            images,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn images(&self) -> &[LieSeries] {
        &self.images
    }

    pub fn image(&self, g: Gen) -> &LieSeries {
        &self.images[g.letter() as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(LieSeries::is_zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.genus != other.genus || self.max_degree != other.max_degree {
            return Err(Error::ContextMismatch("adding derivations of different contexts".into()));
        }
        Ok(Derivation {
            images: self.images.iter().zip(&other.images).map(|(x, y)| x + y).collect(),
            ..self.clone()
        })
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Derivation(g={}, N={})", self.genus, self.max_degree)?;
        for (l, img) in self.images.iter().enumerate() {
            writeln!(f, "  {} -> {img}", Gen::from_letter(l as u8))?;
        }
        Ok(())
    }
}

fn der_on_basis(delta: &Derivation, w: &[u8], memo: &mut HashMap<Word, LieSeries>) -> LieSeries {
    if let Some(v) = memo.get(w) {
        return v.clone();
    }
    let value = if w.len() == 1 {
        delta.images[w[0] as usize].clone()
    } else {
        let i = standard_factorization(w);
        let (u, v) = (&w[..i], &w[i..]);
        let pu = LieSeries::from_lincomb(delta.genus, delta.max_degree, LinComb::basis(u.to_vec()));
        let pv = LieSeries::from_lincomb(delta.genus, delta.max_degree, LinComb::basis(v.to_vec()));
        let du = der_on_basis(delta, u, memo);
        let dv = der_on_basis(delta, v, memo);
        &br(&du, &pv) + &br(&pu, &dv)
    };
    memo.insert(w.to_vec(), value.clone());
    value
}

/// `delta(x)`, extending the generator values by the Leibniz rule.
pub fn apply_der(delta: &Derivation, x: &LieSeries) -> Result<LieSeries> {
    if x.genus() != delta.genus || x.max_degree() != delta.max_degree {
        return Err(Error::ContextMismatch("series and derivation contexts differ".into()));
    }
    let mut memo = HashMap::new();
    let mut out = LieSeries::zero(delta.genus, delta.max_degree);
    for (w, c) in x.terms().iter() {
        out.add_scaled(&der_on_basis(delta, w, &mut memo), c);
    }
    Ok(out)
}

/// `exp(delta) = sum_n delta^n / n!`.
pub fn exp_der(delta: &Derivation) -> LieAutomorphism {
    let images = (0..2 * delta.genus as u8)
        .map(|l| {
            let mut term = LieSeries::letter(delta.genus, delta.max_degree, l);
            let mut sum = term.clone();
            for n in 1..delta.max_degree {
                term = apply_der(delta, &term)
                    .expect("same context")
                    .scale(&Q::from_integer((n as i64).into()).recip());
                if term.is_zero() {
                    break;
                }
                sum = &sum + &term;
            }
            sum
        })
        .collect();
    LieAutomorphism {
        genus: delta.genus,
        max_degree: delta.max_degree,
        images,
    }
}

/// `log(psi)(x) = sum_n (-1)^(n+1)/n (psi - id)^n (x)`.
pub fn log_aut_apply(psi: &LieAutomorphism, x: &LieSeries) -> Result<LieSeries> {
    psi.same_context(x)?;
    let mut out = LieSeries::zero(psi.genus, psi.max_degree);
    let mut term = x.clone();
    for n in 1..=psi.max_degree {
        term = &apply_aut(psi, &term)? - &term;
        if term.is_zero() {
            break;
        }
        let sign: i64 = if n % 2 == 1 { 1 } else { -1 };
        out.add_scaled(&term, &Q::new(sign.into(), (n as i64).into()));
    }
    Ok(out)
}

/// The derivation `log(psi)`, read off on the generators.
pub fn log_aut(psi: &LieAutomorphism) -> Derivation {
    let images = (0..2 * psi.genus as u8)
        .map(|l| {
            log_aut_apply(psi, &LieSeries::letter(psi.genus, psi.max_degree, l)).expect("same context")
        })
        .collect();
    Derivation {
        genus: psi.genus,
        max_degree: psi.max_degree,
        images,
    }
}

/// Lowest degree in which `psi` differs from the identity on some generator.
pub fn deviation_degree(psi: &LieAutomorphism) -> Option<usize> {
    psi.deviations().iter().filter_map(LieSeries::min_degree).min()
}
