//! Eigenvalue spectra of endomorphisms and of their restrictions, the
//! containment check, eventual kernels, and the root-of-unity question.
//!
//! Spectra are compared exactly, as squarefree integer polynomials.
//! Floating point never enters a verdict.

use thiserror::Error;

use crate::graph::{GraphError, IndexResult, SubgroupGraph};
use crate::linalg::{
    abelianization_matrix, all_roots_of_unity, divides, non_cyclotomic_part, restriction_matrix,
    spectrum_poly, spectrum_subset, IntMatrix, IntPoly, LinalgError, SpectrumPoly,
};
use crate::word::{Endomorphism, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectraError {
    #[error("subgroup is not invariant under the endomorphism")]
    NotInvariant,
    #[error("subgroup has infinite index")]
    InfiniteIndex,
    #[error("{what}: direct spectrum {direct} but injective-part spectrum {reduced}")]
    PathDisagreement {
        what: &'static str,
        direct: SpectrumPoly,
        reduced: SpectrumPoly,
    },
    #[error("spectrum {ambient} has a root that is not a root of unity but the restriction spectrum {restricted} does not")]
    InconsistentVerdict {
        ambient: SpectrumPoly,
        restricted: SpectrumPoly,
    },
    #[error(transparent)]
    Word(#[from] WordError),
}

impl From<LinalgError> for SpectraError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::NotInvariant => SpectraError::NotInvariant,
            LinalgError::Word(w) => SpectraError::Word(w),
            other => unreachable!("characteristic polynomials are monic: {other}"),
        }
    }
}

impl From<GraphError> for SpectraError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::NotInSubgroup => SpectraError::NotInvariant,
            GraphError::InfiniteIndex => SpectraError::InfiniteIndex,
            GraphError::Word(w) => SpectraError::Word(w),
        }
    }
}

/// `Λ(φ)`: the nonzero eigenvalues of the abelianized map.
pub fn eigen_spectrum(phi: &Endomorphism) -> SpectrumPoly {
    matrix_spectrum(&abelianization_matrix(phi))
}

fn matrix_spectrum(m: &IntMatrix) -> SpectrumPoly {
    spectrum_poly(&m.char_poly()).expect("characteristic polynomials are nonzero")
}

/// Free groups are Hopfian, so `φ` is injective exactly when its image has
/// full rank.
pub fn is_injective(phi: &Endomorphism) -> bool {
    let g = SubgroupGraph::build(phi.rank(), phi.images()).expect("images have the ambient rank");
    g.subgroup_rank() == phi.rank()
}

#[derive(Debug, Clone)]
pub struct EventualImage {
    /// Least `j` with `rank φ^j(S) = rank φ^(j+1)(S)`.
    pub k: usize,
    /// `rank φ^j(S)` for `j = 0..=k+1`.
    pub ranks: Vec<usize>,
    /// Graph of `φ^k(S)`.
    pub graph: SubgroupGraph,
}

/// Iterates `S, φ(S), φ²(S), …` from the subgroup generated by `start` until
/// the rank stops dropping. `φ` maps `φ^j(S)` onto `φ^(j+1)(S)`; once the two
/// ranks agree that map is an isomorphism, so it stays one for all later `j`.
/// Ranks strictly drop before that, hence `k <= rank S`.
pub fn eventual_image(phi: &Endomorphism, start: &[Word]) -> Result<EventualImage, SpectraError> {
    let rank = phi.rank();
    let mut graph = SubgroupGraph::build(rank, start)?;
    let mut ranks = vec![graph.subgroup_rank()];
    loop {
        let images: Vec<Word> = graph
            .schreier_basis()
            .iter()
            .map(|h| phi.apply(h))
            .collect::<Result<_, _>>()?;
        let next = SubgroupGraph::build(rank, &images)?;
        ranks.push(next.subgroup_rank());
        let n = ranks.len();
        if ranks[n - 1] == ranks[n - 2] {
            return Ok(EventualImage {
                k: n - 2,
                ranks,
                graph,
            });
        }
        graph = next;
    }
}

#[derive(Debug, Clone)]
pub struct EventualKernelData {
    /// Stabilization exponent: `ker φ^j = ker φ^k` for all `j >= k`.
    pub k: usize,
    /// `rank φ^j(F)` for `j = 0..=k+1`.
    pub ranks: Vec<usize>,
    /// Graph of `φ^k(F) ≅ F / ker φ^k`.
    pub image_graph: SubgroupGraph,
    pub image_rank: usize,
    /// The abelianization of the injective map `φ̄` induced on `φ^k(F)`.
    pub induced_matrix: IntMatrix,
}

pub fn eventual_kernel(phi: &Endomorphism) -> EventualKernelData {
    let start: Vec<Word> = (0..phi.rank())
        .map(|i| Word::generator(phi.rank(), i).expect("in range"))
        .collect();
    let img = eventual_image(phi, &start).expect("ranks agree");
    let induced_matrix =
        restriction_matrix(phi, &img.graph).expect("φ maps its own image into itself");
    EventualKernelData {
        k: img.k,
        ranks: img.ranks,
        image_rank: img.graph.subgroup_rank(),
        image_graph: img.graph,
        induced_matrix,
    }
}

/// `Λ(φ̄) = Λ(φ)` for the injective part `φ̄`.
pub fn check_lemma(phi: &Endomorphism) -> bool {
    matrix_spectrum(&eventual_kernel(phi).induced_matrix) == eigen_spectrum(phi)
}

#[derive(Debug, Clone)]
pub struct ContainmentReport {
    pub matrix_f: IntMatrix,
    pub matrix_h: IntMatrix,
    /// `det(tI - φ^ab)`.
    pub delta_f: IntPoly,
    /// `det(tI - (φ|_H)^ab)`.
    pub delta_h: IntPoly,
    pub spectrum_f: SpectrumPoly,
    pub spectrum_h: SpectrumPoly,
    /// `Λ(φ) ⊆ Λ(φ|_H)`.
    pub contained: bool,
    /// Whether `Δ` divides `Δ̃` after removing factors of `t`; `None` when
    /// `φ` is not injective and the statement does not apply.
    pub delta_divides: Option<bool>,
    pub injective: bool,
    pub index: IndexResult,
}

/// Computes `Λ(φ)` and `Λ(φ|_H)` and checks containment.
///
/// For non-injective `φ` each spectrum is computed twice: directly from the
/// abelianization, and from the injective map induced on the eventual image
/// (`φ^k(F)`, respectively `φ^k(H)`). The two must agree.
pub fn check_containment(
    phi: &Endomorphism,
    g: &SubgroupGraph,
) -> Result<ContainmentReport, SpectraError> {
    if phi.rank() != g.rank() {
        return Err(WordError::RankMismatch {
            expected: g.rank(),
            found: phi.rank(),
        }
        .into());
    }
    if !g.is_invariant(phi)? {
        return Err(SpectraError::NotInvariant);
    }
    let index = g.index();
    if index == IndexResult::Infinite {
        return Err(SpectraError::InfiniteIndex);
    }
    let matrix_f = abelianization_matrix(phi);
    let matrix_h = restriction_matrix(phi, g)?;
    let delta_f = matrix_f.char_poly();
    let delta_h = matrix_h.char_poly();
    let spectrum_f = spectrum_poly(&delta_f)?;
    let spectrum_h = spectrum_poly(&delta_h)?;
    let injective = is_injective(phi);
    if !injective {
        let ek = eventual_kernel(phi);
        let reduced = matrix_spectrum(&ek.induced_matrix);
        if reduced != spectrum_f {
            return Err(SpectraError::PathDisagreement {
                what: "Λ(φ)",
                direct: spectrum_f,
                reduced,
            });
        }
        let img = eventual_image(phi, &g.schreier_basis())?;
        let reduced = matrix_spectrum(&restriction_matrix(phi, &img.graph)?);
        if reduced != spectrum_h {
            return Err(SpectraError::PathDisagreement {
                what: "Λ(φ|_H)",
                direct: spectrum_h,
                reduced,
            });
        }
    }
    let contained = spectrum_subset(&spectrum_f, &spectrum_h);
    let delta_divides = injective
        .then(|| divides(&delta_f.strip_t(), &delta_h.strip_t()))
        .transpose()?;
    Ok(ContainmentReport {
        matrix_f,
        matrix_h,
        delta_f,
        delta_h,
        spectrum_f,
        spectrum_h,
        contained,
        delta_divides,
        injective,
        index,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CassonVerdict {
    AllRootsOfUnity,
    /// Carries the factor of `Λ(φ|_H)` whose roots are not roots of unity.
    HasNonUnitRoot(SpectrumPoly),
}

/// Whether every eigenvalue of `φ|_H` is a root of unity. Since
/// `Λ(φ) ⊆ Λ(φ|_H)`, a non-unit root of `Λ(φ)` forces a negative answer; the
/// check fails with `InconsistentVerdict` if that does not happen.
pub fn casson_check(phi: &Endomorphism, g: &SubgroupGraph) -> Result<CassonVerdict, SpectraError> {
    let report = check_containment(phi, g)?;
    let ambient_ok = all_roots_of_unity(&report.spectrum_f);
    if all_roots_of_unity(&report.spectrum_h) {
        if !ambient_ok {
            return Err(SpectraError::InconsistentVerdict {
                ambient: report.spectrum_f,
                restricted: report.spectrum_h,
            });
        }
        return Ok(CassonVerdict::AllRootsOfUnity);
    }
    Ok(CassonVerdict::HasNonUnitRoot(non_cyclotomic_part(
        &report.spectrum_h,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::numeric_roots;

    fn phi(rank: usize, images: &[&str]) -> Endomorphism {
        Endomorphism::parse(rank, images).unwrap()
    }

    fn example_phi() -> Endomorphism {
        phi(2, &["b", "a b^2"])
    }

    fn example_h() -> SubgroupGraph {
        let gens: Vec<Word> = ["a^2", "b^2", "a b"]
            .iter()
            .map(|s| Word::parse(2, s).unwrap())
            .collect();
        SubgroupGraph::with_generator_basis(2, &gens).unwrap()
    }

    fn whole(rank: usize) -> SubgroupGraph {
        let gens: Vec<Word> = (0..rank)
            .map(|i| Word::generator(rank, i).unwrap())
            .collect();
        SubgroupGraph::build(rank, &gens).unwrap()
    }

    fn poly(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    #[test]
    fn spectra_of_small_maps() {
        assert_eq!(eigen_spectrum(&example_phi()).poly(), &poly(&[-1, -2, 1]));
        assert_eq!(
            eigen_spectrum(&Endomorphism::identity(2)).poly(),
            &poly(&[-1, 1])
        );
        assert_eq!(
            eigen_spectrum(&phi(2, &["b", "a"])).poly(),
            &poly(&[-1, 0, 1])
        );
    }

    #[test]
    fn injectivity() {
        assert!(is_injective(&example_phi()));
        assert!(!is_injective(&phi(2, &["1", "b"])));
        assert!(is_injective(&phi(2, &["a^2", "b"])));
        assert!(!is_injective(&phi(2, &["a b", "a b"])));
    }

    #[test]
    fn example_containment() {
        let r = check_containment(&example_phi(), &example_h()).unwrap();
        assert_eq!(
            r.matrix_h,
            IntMatrix::from_rows(&[[0, 1, 1], [1, 2, 2], [0, 0, -1]])
        );
        assert_eq!(r.delta_f, poly(&[-1, -2, 1]));
        assert_eq!(r.delta_h, poly(&[-1, -3, -1, 1]));
        assert_eq!(r.spectrum_h.poly(), &poly(&[-1, -3, -1, 1]));
        assert!(r.contained);
        assert_eq!(r.delta_divides, Some(true));
        assert_eq!(r.index, IndexResult::Finite(2));
    }

    #[test]
    fn identity_containment() {
        let r = check_containment(&Endomorphism::identity(2), &example_h()).unwrap();
        assert_eq!(r.spectrum_f.poly(), &poly(&[-1, 1]));
        assert_eq!(r.spectrum_h.poly(), &poly(&[-1, 1]));
        assert!(r.contained);
    }

    #[test]
    fn containment_on_mod_two_kernel_with_numeric_oracle() {
        let g = crate::subgroups::mod_n_homology_kernel(2, 2).unwrap();
        let r = check_containment(&example_phi(), &g).unwrap();
        assert_eq!(r.index, IndexResult::Finite(4));
        assert!(r.contained);
        let inner = numeric_roots(r.spectrum_h.poly());
        for z in numeric_roots(r.spectrum_f.poly()) {
            assert!(
                inner.iter().any(|w| (z - w).norm() < 1e-6),
                "root {z} missing"
            );
        }
    }

    #[test]
    fn containment_rejects_bad_subgroups() {
        let a = SubgroupGraph::build(2, &[Word::parse(2, "a").unwrap()]).unwrap();
        assert_eq!(
            check_containment(&phi(2, &["b", "a"]), &a).unwrap_err(),
            SpectraError::NotInvariant
        );
        assert_eq!(
            check_containment(&Endomorphism::identity(2), &a).unwrap_err(),
            SpectraError::InfiniteIndex
        );
    }

    #[test]
    fn non_injective_containment_uses_both_routes() {
        let g = crate::subgroups::mod_n_homology_kernel(2, 3).unwrap();
        let r = check_containment(&phi(2, &["a b", "b^-1 a^-1"]), &g).unwrap();
        assert!(!r.injective);
        assert!(r.contained);
        assert_eq!(r.delta_divides, None);
    }

    #[test]
    fn eventual_kernels() {
        let ek = eventual_kernel(&phi(2, &["1", "b"]));
        assert_eq!((ek.k, ek.image_rank), (1, 1));
        assert_eq!(ek.induced_matrix, IntMatrix::from_rows(&[[1]]));

        let ek = eventual_kernel(&example_phi());
        assert_eq!(ek.k, 0);
        assert_eq!(ek.induced_matrix, abelianization_matrix(&example_phi()));

        let ek = eventual_kernel(&phi(2, &["1", "1"]));
        assert_eq!((ek.k, ek.image_rank, ek.induced_matrix.dim()), (1, 0, 0));
        assert!(matrix_spectrum(&ek.induced_matrix).is_empty());
    }

    #[test]
    fn eventual_kernel_needing_two_steps() {
        // a ↦ b, b ↦ 1 kills b, then a
        let ek = eventual_kernel(&phi(3, &["b", "1", "c"]));
        assert_eq!(ek.ranks, vec![3, 2, 1, 1]);
        assert_eq!(ek.k, 2);
    }

    #[test]
    fn lemma_examples() {
        assert!(check_lemma(&phi(2, &["1", "b"])));
        assert!(check_lemma(&example_phi()));
        let p = phi(3, &["1", "c", "b c^2"]);
        assert!(check_lemma(&p));
        assert_eq!(eigen_spectrum(&p).poly(), &poly(&[-1, -2, 1]));
    }

    #[test]
    fn casson_examples() {
        assert_eq!(
            casson_check(&example_phi(), &example_h()).unwrap(),
            CassonVerdict::HasNonUnitRoot(eigen_spectrum(&example_phi()))
        );
        assert_eq!(
            casson_check(&phi(2, &["b", "a"]), &whole(2)).unwrap(),
            CassonVerdict::AllRootsOfUnity
        );
        assert_eq!(
            casson_check(&Endomorphism::identity(2), &example_h()).unwrap(),
            CassonVerdict::AllRootsOfUnity
        );
    }
}
