//! Diagonalizable norms, their relative spectra and functorial constructions.
//!
//! Norms are stored in valuation units: `ν_n(v) = -log n(v)`, so a larger
//! weight means a smaller norm.

mod constructions;
mod diag;
mod spectrum;

pub use constructions::{
    ext_power, lattice_approximation, multisets, quotient_norm, subsets, sym_power, tensor_power,
};
pub use diag::DiagNorm;
pub use spectrum::{
    d1, dinf, dp_pow, joint_diagonalization, joint_diagonalization_by_elimination, max_norm,
    relative_spectrum, relative_spectrum_by_elimination, top_wedge_value, vol, vol_by_determinant,
    JointBasis, SpectralData,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::{serde_rat_vec, Rat};
use crate::valuated_linalg::Matrix;
use crate::valued_field::FieldElem;

/// JSON form of a [`DiagNorm`]: basis entries row-major as field-element text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagNormRecord {
    pub dim: usize,
    pub basis: Vec<String>,
    #[serde(with = "serde_rat_vec")]
    pub weights: Vec<Rat>,
    pub ramification: u32,
}

impl DiagNorm {
    pub fn to_record(&self) -> DiagNormRecord {
        let ram = self.ramification();
        let basis = self.basis().lift_to(ram);
        DiagNormRecord {
            dim: self.dim(),
            basis: basis.entries().iter().map(FieldElem::to_text).collect(),
            weights: self.weights().to_vec(),
            ramification: ram,
        }
    }

    pub fn from_record(record: &DiagNormRecord) -> Result<DiagNorm> {
        let d = record.dim;
        if record.basis.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: record.basis.len(),
            });
        }
        if record.ramification == 0 {
            return Err(Error::Invalid("ramification must be positive".into()));
        }
        let entries = record
            .basis
            .iter()
            .map(|s| FieldElem::parse(s, record.ramification))
            .collect::<Result<Vec<_>>>()?;
        let rows = entries
            .chunks(d.max(1))
            .map(<[FieldElem]>::to_vec)
            .collect();
        DiagNorm::new(Matrix::from_rows(rows)?, record.weights.clone())
    }
}

impl Serialize for DiagNorm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiagNorm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let record = DiagNormRecord::deserialize(d)?;
        DiagNorm::from_record(&record).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_diag_norm, random_invertible, random_matrix, scrambled_pair};
    use crate::rat::{int, rat, Val};
    use num_traits::{Signed, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t() -> FieldElem {
        FieldElem::t()
    }

    fn c(k: i64) -> FieldElem {
        FieldElem::from_int(k)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_vector(rng: &mut ChaCha8Rng, d: usize, ram: u32) -> Vec<FieldElem> {
        random_matrix(rng, d, 1, ram).column(0)
    }

    #[test]
    fn eval_examples() {
        let n = DiagNorm::trivial(2);
        assert_eq!(n.eval(&[c(1), c(0)]).unwrap(), Val::Finite(int(0)));
        let w = DiagNorm::monomial(vec![int(1), int(-1)]);
        assert_eq!(w.eval(&[c(1), c(1)]).unwrap(), Val::Finite(int(-1)));
        assert_eq!(n.eval(&[t(), c(0)]).unwrap(), Val::Finite(int(1)));
        assert_eq!(n.eval(&[c(0), c(0)]).unwrap(), Val::Infinity);
        assert!(matches!(
            n.eval(&[c(1)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spectrum_examples() {
        let n = DiagNorm::monomial(vec![int(2), rat(-1, 3)]);
        assert_eq!(
            relative_spectrum(&n, &n).unwrap().lambdas(),
            &[int(0), int(0)]
        );
        let a = DiagNorm::trivial(2);
        let b = DiagNorm::monomial(vec![int(1), int(-1)]);
        let sp = relative_spectrum(&a, &b).unwrap();
        assert_eq!(sp.lambdas(), &[int(1), int(-1)]);
        assert_eq!(sp.d1(), int(1));
        assert_eq!(sp.dinf(), int(1));
        assert_eq!(sp.vol(), int(0));
        let sheared = DiagNorm::new(
            Matrix::from_rows(vec![vec![c(1), c(0)], vec![t(), c(1)]]).unwrap(),
            vec![int(0), int(0)],
        )
        .unwrap();
        assert_eq!(
            relative_spectrum(&a, &sheared).unwrap().lambdas(),
            &[int(0), int(0)]
        );
        assert!(a.same_norm(&sheared).unwrap());
        assert!(relative_spectrum(&a, &DiagNorm::trivial(3)).is_err());
    }

    #[test]
    fn scale_convention() {
        let mut r = rng(1);
        for _ in 0..20 {
            let d = r.gen_range(1..=4);
            let a = random_diag_norm(&mut r, d, 1);
            let cst = rat(r.gen_range(-9..=9), r.gen_range(1..=4));
            let sp = relative_spectrum(&a, &a.scale(&cst)).unwrap();
            assert!(sp.lambdas().iter().all(|l| *l == -&cst));
            assert_eq!(vol(&a, &a.scale(&cst)).unwrap(), -&cst);
            assert_eq!(vol_by_determinant(&a, &a.scale(&cst)).unwrap(), -&cst);
        }
    }

    #[test]
    fn scaling_either_side_shifts_the_spectrum() {
        let mut r = rng(2);
        for _ in 0..20 {
            let d = r.gen_range(1..=4);
            let a = random_diag_norm(&mut r, d, 1);
            let b = random_diag_norm(&mut r, d, 1);
            let cst = rat(r.gen_range(-9..=9), r.gen_range(1..=4));
            let base = relative_spectrum(&a, &b).unwrap();
            let shifted = relative_spectrum(&a.scale(&cst), &b).unwrap();
            let expected: Vec<Rat> = base.lambdas().iter().map(|l| l + &cst).collect();
            assert_eq!(shifted.lambdas(), expected.as_slice());
            assert_eq!(
                vol_by_determinant(&a.scale(&cst), &b).unwrap(),
                vol_by_determinant(&a, &b).unwrap() + &cst
            );
        }
    }

    #[test]
    fn elimination_matches_fast_path_on_monomial_pairs() {
        let mut r = rng(3);
        for _ in 0..30 {
            let d = r.gen_range(1..=5);
            let wa = crate::random::random_rats(&mut r, d, 5);
            let wb = crate::random::random_rats(&mut r, d, 5);
            let a = DiagNorm::monomial(wa);
            let b = DiagNorm::monomial(wb);
            assert_eq!(
                relative_spectrum(&a, &b).unwrap(),
                relative_spectrum_by_elimination(&a, &b).unwrap()
            );
        }
    }

    #[test]
    fn joint_basis_diagonalizes_both() {
        let mut r = rng(4);
        for _ in 0..12 {
            let d = r.gen_range(1..=3);
            let a = random_diag_norm(&mut r, d, 1);
            let b = random_diag_norm(&mut r, d, 1);
            let jb = joint_diagonalization(&a, &b).unwrap();
            for _ in 0..6 {
                let coeffs = random_vector(&mut r, d, 1);
                let v = jb.basis.mul_vec(&coeffs).unwrap();
                let expect = |nu: &[Rat]| {
                    coeffs
                        .iter()
                        .zip(nu)
                        .map(|(x, w)| x.val().shifted(w))
                        .min()
                        .unwrap()
                };
                assert_eq!(a.eval(&v).unwrap(), expect(&jb.nu_a));
                assert_eq!(b.eval(&v).unwrap(), expect(&jb.nu_b));
            }
        }
    }

    #[test]
    fn antisymmetry_and_determinant_identity() {
        let mut r = rng(5);
        for _ in 0..40 {
            let d = r.gen_range(1..=5);
            let ram = r.gen_range(1..=3);
            let a = random_diag_norm(&mut r, d, ram);
            let b = random_diag_norm(&mut r, d, ram);
            let ab = relative_spectrum(&a, &b).unwrap();
            let ba = relative_spectrum(&b, &a).unwrap();
            let expected: Vec<Rat> = ab.lambdas().iter().rev().map(|l| -l).collect();
            assert_eq!(ba.lambdas(), expected.as_slice());
            let sum: Rat = ab.lambdas().iter().sum();
            assert_eq!(sum, vol_by_determinant(&a, &b).unwrap() * int(d as i64));
        }
    }

    #[test]
    fn top_wedge_matches_exterior_power() {
        let mut r = rng(20);
        let top = [FieldElem::one()];
        for _ in 0..10 {
            let d = r.gen_range(1..=3);
            let n = random_diag_norm(&mut r, d, 1);
            let e = ext_power(&n, d).unwrap();
            assert_eq!(
                e.eval(&top).unwrap(),
                Val::Finite(top_wedge_value(&n).unwrap())
            );
        }
    }

    #[test]
    fn certified_and_exact_spectra_agree() {
        let mut r = rng(21);
        for _ in 0..15 {
            let d = r.gen_range(1..=3);
            let ram = r.gen_range(1..=2);
            let a = random_diag_norm(&mut r, d, ram);
            let b = random_diag_norm(&mut r, d, ram);
            assert_eq!(
                relative_spectrum(&a, &b).unwrap(),
                relative_spectrum_by_elimination(&a, &b).unwrap()
            );
        }
        // Quotient bases carry denominators in the shared ambient rows.
        for _ in 0..6 {
            let d = r.gen_range(2..=3);
            let a = random_diag_norm(&mut r, d, 1);
            let b = random_diag_norm(&mut r, d, 1);
            let g = random_invertible(&mut r, d, 1);
            let (qa, qb) = (
                quotient_norm(&a, &g).unwrap(),
                quotient_norm(&b, &g).unwrap(),
            );
            assert_eq!(
                relative_spectrum(&qa, &qb).unwrap(),
                relative_spectrum_by_elimination(&qa, &qb).unwrap()
            );
        }
    }

    #[test]
    fn volume_cocycle() {
        let mut r = rng(6);
        for _ in 0..100 {
            let d = r.gen_range(1..=4);
            let a = random_diag_norm(&mut r, d, 1);
            let b = random_diag_norm(&mut r, d, 1);
            let cn = random_diag_norm(&mut r, d, 1);
            assert_eq!(
                vol(&a, &b).unwrap(),
                vol(&a, &cn).unwrap() + vol(&cn, &b).unwrap()
            );
        }
    }

    #[test]
    fn volume_is_lipschitz() {
        let mut r = rng(7);
        for _ in 0..200 {
            let d = r.gen_range(1..=3);
            let a = random_diag_norm(&mut r, d, 1);
            let b = random_diag_norm(&mut r, d, 1);
            let cn = random_diag_norm(&mut r, d, 1);
            let gap = (vol(&a, &cn).unwrap() - vol(&b, &cn).unwrap()).abs();
            assert!(gap <= dinf(&a, &b).unwrap());
        }
    }

    #[test]
    fn d1_equals_signed_volume_for_one_signed_spectra() {
        let mut r = rng(8);
        for _ in 0..50 {
            let d = r.gen_range(1..=4);
            let a = random_diag_norm(&mut r, d, 1);
            let b = random_diag_norm(&mut r, d, 1);
            let sp = relative_spectrum(&a, &b).unwrap();
            if sp.lambdas().iter().all(|l| !l.is_negative()) {
                assert_eq!(sp.d1(), sp.vol());
            }
            if sp.lambdas().iter().all(|l| !l.is_positive()) {
                assert_eq!(sp.d1(), -sp.vol());
            }
            // Shifting by the extreme value forces each case.
            let lo = sp.lambdas().last().unwrap().clone();
            let hi = sp.lambdas()[0].clone();
            let pos = relative_spectrum(&a.scale(&-&lo), &b).unwrap();
            assert_eq!(pos.d1(), pos.vol());
            let neg = relative_spectrum(&a.scale(&-&hi), &b).unwrap();
            assert_eq!(neg.d1(), -neg.vol());
        }
    }

    #[test]
    fn spectral_data_consistency() {
        let sp = SpectralData::new(vec![int(-3), int(1), rat(1, 2)]);
        assert_eq!(sp.lambdas(), &[int(1), rat(1, 2), int(-3)]);
        assert_eq!(sp.vol(), rat(-1, 2));
        assert_eq!(sp.d1(), rat(3, 2));
        assert_eq!(sp.dp_pow(2), rat(41, 12));
        assert_eq!(sp.dinf(), int(3));
        assert!((sp.dp(2) - (41.0f64 / 12.0).sqrt()).abs() < 1e-12);
        assert_eq!(sp.measure().total_mass(), int(1));
        assert_eq!(sp.measure().first_moment(), sp.vol());
        // Every value negative: d_∞ is the largest magnitude, not the largest value.
        let neg = SpectralData::new(vec![int(-1), int(-2)]);
        assert_eq!(neg.dinf(), int(2));
    }

    #[test]
    fn recovery_of_constructed_spectra() {
        let mut r = rng(9);
        for _ in 0..40 {
            let d = r.gen_range(1..=5);
            let ram = r.gen_range(1..=4);
            let (a, b, expected) = scrambled_pair(&mut r, d, ram);
            assert_eq!(relative_spectrum(&a, &b).unwrap(), expected);
        }
    }

    #[test]
    fn max_norm_examples_and_properties() {
        let n = DiagNorm::monomial(vec![int(1), int(2)]);
        let m = max_norm(&n, &n).unwrap();
        assert!(m.same_norm(&n).unwrap());
        let a = DiagNorm::monomial(vec![int(1), int(-1)]);
        let b = DiagNorm::trivial(2);
        assert_eq!(max_norm(&a, &b).unwrap().weights(), &[int(0), int(-1)]);
        let mut r = rng(10);
        for _ in 0..20 {
            let d = r.gen_range(1..=4);
            let a = random_diag_norm(&mut r, d, 1);
            let b = random_diag_norm(&mut r, d, 1);
            let m = max_norm(&a, &b).unwrap();
            for _ in 0..5 {
                let v = random_vector(&mut r, d, 1);
                let va = a.eval(&v).unwrap();
                let vb = b.eval(&v).unwrap();
                assert_eq!(m.eval(&v).unwrap(), va.min(vb));
            }
        }
    }

    #[test]
    fn power_examples() {
        let trivial = DiagNorm::trivial(3);
        let s2 = sym_power(&trivial, 2).unwrap();
        assert_eq!(s2.dim(), 6);
        assert!(s2.same_norm(&DiagNorm::trivial(6)).unwrap());
        let e = ext_power(&DiagNorm::monomial(vec![int(1), int(-1)]), 2).unwrap();
        assert_eq!(e.weights(), &[int(0)]);
        let t2 = tensor_power(&DiagNorm::monomial(vec![int(1), int(2)]), 2).unwrap();
        assert_eq!(t2.weights(), &[int(2), int(3), int(3), int(4)]);
        assert!(sym_power(&trivial, 0).is_err());
        assert!(ext_power(&trivial, 4).is_err());
        assert_eq!(multisets(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn powers_multiply_relative_volumes() {
        let mut r = rng(11);
        for _ in 0..15 {
            let d = r.gen_range(1..=3);
            let a = random_diag_norm(&mut r, d, 1);
            let b = random_diag_norm(&mut r, d, 1);
            let v = vol(&a, &b).unwrap();
            for k in 1..=2usize {
                let k_rat = int(k as i64);
                assert_eq!(
                    vol(&sym_power(&a, k).unwrap(), &sym_power(&b, k).unwrap()).unwrap(),
                    &v * &k_rat
                );
                assert_eq!(
                    vol(&tensor_power(&a, k).unwrap(), &tensor_power(&b, k).unwrap()).unwrap(),
                    &v * &k_rat
                );
            }
            let ea = ext_power(&a, d).unwrap();
            let eb = ext_power(&b, d).unwrap();
            assert_eq!(vol(&ea, &eb).unwrap(), &v * int(d as i64));
        }
    }

    #[test]
    fn sym_power_evaluates_products() {
        let mut r = rng(12);
        for _ in 0..10 {
            let d = r.gen_range(1..=3);
            let a = random_diag_norm(&mut r, d, 1);
            let s = sym_power(&a, 2).unwrap();
            // b_i * b_j sits in coordinates indexed by multisets.
            let idx = multisets(d, 2);
            for (col, pair) in idx.iter().enumerate() {
                let v = s.basis_vector(col);
                let expected = &a.weights()[pair[0]] + &a.weights()[pair[1]];
                assert_eq!(s.eval(&v).unwrap(), Val::Finite(expected));
            }
        }
    }

    #[test]
    fn quotient_examples() {
        let n = DiagNorm::trivial(2);
        let sum = Matrix::from_rows(vec![vec![c(1), c(1)]]).unwrap();
        let q = quotient_norm(&n, &sum).unwrap();
        assert!(q.same_norm(&DiagNorm::trivial(1)).unwrap());
        let zero = Matrix::from_rows(vec![vec![c(0), c(0)]]).unwrap();
        assert!(matches!(
            quotient_norm(&n, &zero),
            Err(Error::NotSurjective { .. })
        ));
        let mut r = rng(13);
        for _ in 0..10 {
            let d = r.gen_range(1..=4);
            let a = random_diag_norm(&mut r, d, 1);
            let b = random_diag_norm(&mut r, d, 1);
            let g = random_invertible(&mut r, d, 1);
            let pa = quotient_norm(&a, &g).unwrap();
            let pb = quotient_norm(&b, &g).unwrap();
            assert_eq!(
                relative_spectrum(&pa, &pb).unwrap(),
                relative_spectrum(&a, &b).unwrap()
            );
        }
    }

    #[test]
    fn quotient_is_bounded_by_lifts() {
        let mut r = rng(14);
        for _ in 0..200 {
            let d = r.gen_range(2..=4);
            let e = r.gen_range(1..d);
            let n = random_diag_norm(&mut r, d, 1);
            let a = random_matrix(&mut r, e, d, 1);
            let Ok(q) = quotient_norm(&n, &a) else {
                continue;
            };
            let v = random_vector(&mut r, d, 1);
            let image = a.mul_vec(&v).unwrap();
            assert!(q.eval(&image).unwrap() >= n.eval(&v).unwrap());
        }
    }

    #[test]
    fn quotient_matches_translate_minimum() {
        let mut r = rng(15);
        for _ in 0..30 {
            let d = r.gen_range(2..=4);
            let n = random_diag_norm(&mut r, d, 1);
            // Project away the last coordinates; the kernel is spanned by them.
            let e = r.gen_range(1..d);
            let proj = Matrix::from_rows(
                (0..e)
                    .map(|i| (0..d).map(|j| if i == j { c(1) } else { c(0) }).collect())
                    .collect(),
            )
            .unwrap();
            let kernel = Matrix::from_columns(
                &(e..d)
                    .map(|j| (0..d).map(|i| if i == j { c(1) } else { c(0) }).collect())
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let q = quotient_norm(&n, &proj).unwrap();
            let v = random_vector(&mut r, d, 1);
            let image = proj.mul_vec(&v).unwrap();
            match crate::valuated_linalg::min_val_on_translate(&v, &kernel, &n) {
                Ok(best) => assert_eq!(q.eval(&image).unwrap(), Val::Finite(best)),
                Err(Error::ZeroClass) => assert_eq!(q.eval(&image).unwrap(), Val::Infinity),
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn quotients_contract_distance() {
        let mut r = rng(16);
        for _ in 0..200 {
            let d = r.gen_range(2..=3);
            let e = r.gen_range(1..d);
            let a = random_diag_norm(&mut r, d, 1);
            let b = random_diag_norm(&mut r, d, 1);
            let map = random_matrix(&mut r, e, d, 1);
            let (Ok(qa), Ok(qb)) = (quotient_norm(&a, &map), quotient_norm(&b, &map)) else {
                continue;
            };
            assert!(dinf(&qa, &qb).unwrap() <= dinf(&a, &b).unwrap());
        }
    }

    #[test]
    fn ground_field_extension_preserves_spectra() {
        let n = DiagNorm::monomial(vec![int(1)]);
        assert!(n.ground_field_extension(1).same_norm(&n).unwrap());
        let mut r = rng(17);
        for _ in 0..50 {
            let d = r.gen_range(1..=3);
            let a = random_diag_norm(&mut r, d, 1);
            let b = random_diag_norm(&mut r, d, 1);
            let m = r.gen_range(2..=4);
            let (ae, be) = (a.ground_field_extension(m), b.ground_field_extension(m));
            assert_eq!(ae.ramification(), a.ramification() * m);
            assert_eq!(
                relative_spectrum(&ae, &be).unwrap(),
                relative_spectrum(&a, &b).unwrap()
            );
            assert_eq!(vol(&ae, &be).unwrap(), vol(&a, &b).unwrap());
        }
    }

    #[test]
    fn lattice_approximation_examples() {
        let lattice = DiagNorm::trivial(2);
        let approx = lattice_approximation(&lattice, &rat(1, 100)).unwrap();
        assert!(approx.same_norm(&lattice).unwrap());
        assert_eq!(approx.ramification(), 1);
        let third = DiagNorm::monomial(vec![rat(1, 3)]);
        let approx = lattice_approximation(&third, &rat(1, 4)).unwrap();
        assert!(approx.is_lattice());
        assert!(approx.ramification() >= 5);
        let bound = rat(1, 2 * approx.ramification() as i64);
        let dist = dinf(
            &third.ground_field_extension(approx.ramification()),
            &approx,
        )
        .unwrap();
        assert!(dist <= bound && dist < rat(1, 4));
    }

    #[test]
    fn lattice_approximation_bound() {
        let mut r = rng(18);
        for _ in 0..100 {
            let d = r.gen_range(1..=3);
            let ram = r.gen_range(1..=2);
            let n = random_diag_norm(&mut r, d, ram);
            let eps = rat(1, r.gen_range(1..=12));
            let approx = lattice_approximation(&n, &eps).unwrap();
            assert!(approx.is_lattice());
            let m = approx.ramification() / n.ramification();
            let dist = dinf(&n.ground_field_extension(m), &approx).unwrap();
            assert!(dist * int(2) <= eps);
        }
    }

    #[test]
    fn record_roundtrip() {
        let mut r = rng(19);
        for _ in 0..10 {
            let d = r.gen_range(1..=3);
            let ram = r.gen_range(1..=3);
            let n = random_diag_norm(&mut r, d, ram);
            let json = serde_json::to_string(&n).unwrap();
            let back: DiagNorm = serde_json::from_str(&json).unwrap();
            assert!(back.same_norm(&n).unwrap());
            assert_eq!(back.weights(), n.weights());
        }
        let json = r#"{"dim":1,"basis":["1*u^1"],"weights":["1/2"],"ramification":2}"#;
        let n: DiagNorm = serde_json::from_str(json).unwrap();
        assert_eq!(n.eval(&[FieldElem::one()]).unwrap(), Val::Finite(int(0)));
        assert!(Zero::is_zero(&(n.weights()[0].clone() - rat(1, 2))));
    }
}
