//! Abelianization of endomorphisms and of their restrictions to subgroups.

use crate::graph::{GraphError, SubgroupGraph};
use crate::word::{Endomorphism, Word, WordError};

use super::{IntMatrix, LinalgError};

/// Entry `(j, i)` is the exponent sum of generator `j` in `φ(x_i)`.
pub fn abelianization_matrix(phi: &Endomorphism) -> IntMatrix {
    let cols: Vec<Vec<i64>> = phi.images().iter().map(Word::exponent_sums).collect();
    IntMatrix::from_columns(&cols)
}

/// Matrix of `(φ|_H)^ab` in the graph's basis: column `i` is the abelianized
/// rewrite of `φ(h_i)`.
pub fn restriction_matrix(phi: &Endomorphism, g: &SubgroupGraph) -> Result<IntMatrix, LinalgError> {
    check_rank(phi, g)?;
    let cols = g
        .basis()
        .iter()
        .map(|h| match g.rewrite_abelian(&phi.apply(h)?) {
            Ok(v) => Ok(v),
            Err(GraphError::NotInSubgroup) => Err(LinalgError::NotInvariant),
            Err(GraphError::Word(e)) => Err(e.into()),
            Err(GraphError::InfiniteIndex) => unreachable!("rewriting needs no finite index"),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntMatrix::from_columns(&cols))
}

/// `φ|_H` as an endomorphism of the free group on the graph's basis.
pub fn restriction_endomorphism(
    phi: &Endomorphism,
    g: &SubgroupGraph,
) -> Result<Endomorphism, LinalgError> {
    check_rank(phi, g)?;
    let images = g
        .basis()
        .iter()
        .map(|h| {
            g.rewrite(&phi.apply(h)?)
                .map(|b| b.into_word())
                .map_err(|e| match e {
                    GraphError::Word(e) => LinalgError::Word(e),
                    _ => LinalgError::NotInvariant,
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Endomorphism::new(images.len(), images)?)
}

fn check_rank(phi: &Endomorphism, g: &SubgroupGraph) -> Result<(), LinalgError> {
    if phi.rank() != g.rank() {
        return Err(WordError::RankMismatch {
            expected: g.rank(),
            found: phi.rank(),
        }
        .into());
    }
    Ok(())
}
