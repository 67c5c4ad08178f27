//! Randomized structural properties across modules.

use proptest::prelude::*;

use endospec::graph::{IndexResult, SubgroupGraph};
use endospec::linalg::{
    abelianization_matrix, cauchy_bound, max_root_modulus, spectrum_poly, IntPoly,
};
use endospec::spectra::{eigen_spectrum, eventual_kernel, is_injective};
use endospec::subgroups::{
    mod_n_homology_kernel, random_automorphism, total_exponent_kernel, RandomSpec,
};
use endospec::word::{Endomorphism, Word};

fn arb_word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, prop::bool::ANY), 0..=max_len).prop_map(move |ls| {
        let powers: Vec<(usize, i32)> = ls
            .into_iter()
            .map(|(g, inv)| (g, if inv { -1 } else { 1 }))
            .collect();
        Word::from_powers(rank, &powers).unwrap()
    })
}

fn arb_endo(rank: usize) -> impl Strategy<Value = Endomorphism> {
    prop::collection::vec(arb_word(rank, 5), rank)
        .prop_map(move |images| Endomorphism::new(rank, images).unwrap())
}

fn arb_pair() -> impl Strategy<Value = (Endomorphism, Endomorphism)> {
    (2usize..=4).prop_flat_map(|r| (arb_endo(r), arb_endo(r)))
}

fn arb_poly() -> impl Strategy<Value = IntPoly> {
    (
        prop::collection::vec(-20i64..=20, 1..10),
        1i64..=5,
        prop::bool::ANY,
    )
        .prop_map(|(mut c, lead, neg)| {
            c.push(if neg { -lead } else { lead });
            IntPoly::from_i64s(&c)
        })
}

/// A finite-index subgroup: a mod-n homology or total-exponent kernel.
fn arb_finite_index() -> impl Strategy<Value = SubgroupGraph> {
    (1usize..=3, 2usize..=4, prop::bool::ANY).prop_map(|(rank, n, total)| {
        if total {
            total_exponent_kernel(rank, n).unwrap()
        } else {
            mod_n_homology_kernel(rank, n).unwrap()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn abelianization_is_functorial((f, g) in arb_pair()) {
        let fg = f.compose(&g).unwrap();
        prop_assert_eq!(
            abelianization_matrix(&fg),
            abelianization_matrix(&f).mul(&abelianization_matrix(&g))
        );
    }

    #[test]
    fn max_modulus_within_cauchy_bound(p in arb_poly()) {
        let m = max_root_modulus(&p).unwrap();
        prop_assert!(m <= cauchy_bound(&p) + 1e-9, "{} > {}", m, cauchy_bound(&p));
    }

    #[test]
    fn folding_is_confluent(
        gens in (1usize..=3).prop_flat_map(|r| prop::collection::vec(arb_word(r, 6), 1..5)),
        shift in 0usize..5,
    ) {
        let rank = gens[0].rank();
        let mut rotated = gens.clone();
        rotated.rotate_left(shift % gens.len());
        rotated.reverse();
        prop_assert_eq!(
            SubgroupGraph::build(rank, &gens).unwrap(),
            SubgroupGraph::build(rank, &rotated).unwrap()
        );
    }

    #[test]
    fn membership_is_sound(
        gens in (1usize..=3).prop_flat_map(|r| prop::collection::vec(arb_word(r, 6), 1..5)),
        picks in prop::collection::vec((0usize..64, prop::bool::ANY), 0..=3),
    ) {
        let rank = gens[0].rank();
        let g = SubgroupGraph::build(rank, &gens).unwrap();
        for w in &gens {
            prop_assert!(g.contains(w));
        }
        let basis = g.basis();
        if basis.is_empty() {
            return Ok(());
        }
        let mut w = Word::identity(rank);
        for (i, inv) in picks {
            let b = &basis[i % basis.len()];
            let b = if inv { b.invert() } else { b.clone() };
            w = w.multiply(&b).unwrap();
        }
        prop_assert!(g.contains(&w));
    }

    #[test]
    fn transversal_elements_are_distinct_cosets(g in arb_finite_index()) {
        let t = g.transversal().unwrap();
        prop_assert_eq!(IndexResult::Finite(t.len()), g.index());
        for i in 0..t.len() {
            for j in 0..t.len() {
                let q = t[i].multiply(&t[j].invert()).unwrap();
                prop_assert_eq!(g.contains(&q), i == j);
            }
        }
    }

    #[test]
    fn eventual_kernel_matches_the_spectrum(phi in (2usize..=3).prop_flat_map(arb_endo)) {
        let ek = eventual_kernel(&phi);
        prop_assert!(ek.k <= phi.rank());
        prop_assert!(ek.ranks.windows(2).all(|w| w[0] >= w[1]));
        let induced = spectrum_poly(&ek.induced_matrix.char_poly()).unwrap();
        prop_assert_eq!(eigen_spectrum(&phi), induced);
    }

    #[test]
    fn random_automorphisms_are_onto(seed in 0u64..100_000, rank in 2usize..=4, moves in 0usize..=12) {
        let phi = random_automorphism(&RandomSpec { seed, rank, max_image_length: 0, move_count: moves }).unwrap();
        prop_assert!(is_injective(&phi));
        let image = SubgroupGraph::build(rank, phi.images()).unwrap();
        prop_assert_eq!(image.index(), IndexResult::Finite(1));
    }
}

#[test]
fn index_formulas() {
    for rank in 1..=3 {
        for n in 1..=4 {
            let m = mod_n_homology_kernel(rank, n).unwrap();
            assert_eq!(m.index(), IndexResult::Finite(n.pow(rank as u32)));
            let t = total_exponent_kernel(rank, n).unwrap();
            assert_eq!(t.index(), IndexResult::Finite(n));
        }
    }
}

#[test]
fn total_exponent_kernel_is_the_example_subgroup() {
    let gens: Vec<Word> = ["a^2", "b^2", "a b"]
        .iter()
        .map(|s| Word::parse(2, s).unwrap())
        .collect();
    assert_eq!(
        total_exponent_kernel(2, 2).unwrap(),
        SubgroupGraph::build(2, &gens).unwrap()
    );
}
