//! Random surgery sequences starting from catalog building blocks.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::catalog::{building_block, EntryName, BUILDING_BLOCKS};
use crate::diagram::{
    corner_connected_sum, self_connected_sum, trade_corner_to_lefschetz, trade_lefschetz_to_corner,
    CornerRef, DualPairEvidence, FibrationDiagram, LefschetzRef,
};

/// Blocks with at least one corner, usable as gluing partners.
const CORNERED: [EntryName; 4] = [
    EntryName::Cp2,
    EntryName::Cp2Bar,
    EntryName::S2xS2,
    EntryName::S4,
];

pub fn random_block<R: Rng + ?Sized>(rng: &mut R) -> FibrationDiagram {
    let name = *BUILDING_BLOCKS.choose(rng).expect("non-empty");
    building_block(name).expect("blocks construct").diagram
}

/// Apply one randomly chosen applicable surgery. Returns `None` when no
/// surgery applies (the diagram has no corners and no Lefschetz points).
pub fn random_step<R: Rng + ?Sized>(rng: &mut R, d: &FibrationDiagram) -> Option<FibrationDiagram> {
    let k = d.corner_count();
    let l = d.lefschetz_count();
    let mut moves: Vec<u8> = Vec::new();
    if k >= 1 {
        moves.push(0); // corner sum
        moves.push(2); // smooth a corner
    }
    if k >= 2 {
        moves.push(1); // self-sum
    }
    if l >= 1 && !d.circles.is_empty() {
        moves.push(3); // singularize
    }
    let mv = *moves.choose(rng)?;
    let out = match mv {
        0 => {
            let other_name = *CORNERED.choose(rng).expect("non-empty");
            let other = building_block(other_name)
                .expect("blocks construct")
                .diagram;
            let a = rng.random_range(0..k);
            let b = rng.random_range(0..other.corner_count());
            corner_connected_sum(d, &CornerRef::Index(a), &other, &CornerRef::Index(b))
        }
        1 => {
            let a = rng.random_range(0..k);
            let mut b = rng.random_range(0..k - 1);
            if b >= a {
                b += 1;
            }
            self_connected_sum(d, &CornerRef::Index(a), &CornerRef::Index(b))
        }
        2 => trade_corner_to_lefschetz(d, &CornerRef::Index(rng.random_range(0..k)), rng.random()),
        _ => {
            let li = rng.random_range(0..l);
            let circle = rng.random_range(0..d.circles.len());
            let point = &d.lefschetz[li];
            let evidence = match (point.cycle, &point.basis_tag) {
                (Some(c), Some(tag)) => DualPairEvidence::Cycles {
                    lefschetz: c,
                    elliptic: crate::homology::Cycle::E1,
                    basis_tag: tag.clone(),
                },
                _ => DualPairEvidence::Asserted,
            };
            trade_lefschetz_to_corner(d, &LefschetzRef::Index(li), circle, &evidence)
        }
    };
    Some(out.expect("moves are chosen to be applicable"))
}

/// Start from a random block and apply up to `steps` random surgeries.
pub fn random_diagram<R: Rng + ?Sized>(rng: &mut R, steps: usize) -> FibrationDiagram {
    let mut d = random_block(rng);
    for _ in 0..steps {
        match random_step(rng, &d) {
            Some(next) => d = next,
            None => break,
        }
    }
    d
}
