//! Named graded norms used by the tests, the acceptance suite and the CLI.

use crate::norms::DiagNorm;
use crate::rat::{int, rat, Rat};
use crate::section_ring::{AffinePiece, GradedNormSpec, WeightRule};

fn piece(slope: Rat, constant: Rat) -> AffinePiece {
    AffinePiece {
        slopes: vec![slope],
        constant,
    }
}

/// `g(s) = min(s, 1/5 + s/2, 6/5 - 6s/5)` on `[0, 1]`: concave, piecewise
/// linear, with kinks at `2/5` and `10/17`.
pub fn concave_g() -> WeightRule {
    WeightRule::FloorConcave {
        pieces: vec![
            piece(int(1), int(0)),
            piece(rat(1, 2), rat(1, 5)),
            piece(rat(-6, 5), rat(6, 5)),
        ],
    }
}

/// `∫_0^1 g`.
pub fn concave_g_integral() -> Rat {
    // Trapezoids over [0, 2/5], [2/5, 10/17], [10/17, 1]; g vanishes at both ends.
    let (a, b) = (rat(2, 5), rat(10, 17));
    let (ga, gb) = (a.clone(), rat(1, 5) + &b / int(2));
    let left = &a * &ga / int(2);
    let mid = (&b - &a) * (&ga + &gb) / int(2);
    let right = (int(1) - &b) * &gb / int(2);
    left + mid + right
}

/// `w_m(j) = ⌊m g(j/m)⌋` on `P^1`.
pub fn floor_g_p1() -> GradedNormSpec {
    GradedNormSpec::monomial(1, concave_g())
}

/// `w_m(j) = j` on `P^1`.
pub fn identity_weights_p1() -> GradedNormSpec {
    GradedNormSpec::monomial(
        1,
        WeightRule::Affine {
            slopes: vec![int(1)],
            constant: int(0),
        },
    )
}

/// Generated in degree one by weights `(a_0, a_1)` on `1, z`.
pub fn degree_one_p1(a0: Rat, a1: Rat) -> GradedNormSpec {
    GradedNormSpec::degree_one(1, DiagNorm::monomial(vec![a0, a1]))
}
