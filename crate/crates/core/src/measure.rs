//! Finite atomic measures on `R` with exact rational atoms and masses.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rat::{int, serde_rat, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "serde_rat")]
    pub location: Rat,
    #[serde(with = "serde_rat")]
    pub mass: Rat,
}

/// Sorted, merged atoms with positive masses.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn zero() -> Self {
        AtomicMeasure::default()
    }

    pub fn dirac(location: Rat) -> Self {
        AtomicMeasure::from_atoms([(location, Rat::one())])
    }

    /// Merge duplicate locations and drop zero masses.
    pub fn from_atoms(atoms: impl IntoIterator<Item = (Rat, Rat)>) -> Self {
        let mut merged: BTreeMap<Rat, Rat> = BTreeMap::new();
        for (loc, mass) in atoms {
            *merged.entry(loc).or_insert_with(Rat::zero) += mass;
        }
        AtomicMeasure {
            atoms: merged
                .into_iter()
                .filter(|(_, m)| !m.is_zero())
                .map(|(location, mass)| Atom { location, mass })
                .collect(),
        }
    }

    /// Uniform probability measure on a list of points (with multiplicity).
    pub fn empirical(points: &[Rat]) -> Self {
        if points.is_empty() {
            return AtomicMeasure::zero();
        }
        let mass = Rat::one() / int(points.len() as i64);
        AtomicMeasure::from_atoms(points.iter().map(|p| (p.clone(), mass.clone())))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> Rat {
        self.atoms.iter().map(|a| &a.mass).sum()
    }

    /// `∫ x dμ`.
    pub fn first_moment(&self) -> Rat {
        self.atoms.iter().map(|a| &a.location * &a.mass).sum()
    }

    /// `∫ f dμ` for an exact integrand.
    pub fn integrate(&self, f: impl Fn(&Rat) -> Rat) -> Rat {
        self.atoms.iter().map(|a| f(&a.location) * &a.mass).sum()
    }

    /// `μ((-∞, t])`.
    pub fn cdf(&self, t: &Rat) -> Rat {
        self.atoms
            .iter()
            .take_while(|a| a.location <= *t)
            .map(|a| &a.mass)
            .sum()
    }

    /// `μ((-∞, t))`.
    pub fn cdf_left(&self, t: &Rat) -> Rat {
        self.atoms
            .iter()
            .take_while(|a| a.location < *t)
            .map(|a| &a.mass)
            .sum()
    }

    /// `μ([t, ∞))`.
    pub fn upper_tail(&self, t: &Rat) -> Rat {
        self.total_mass() - self.cdf_left(t)
    }

    /// Largest `|x|` over the support.
    pub fn support_bound(&self) -> Rat {
        self.atoms
            .iter()
            .map(|a| a.location.abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn map_locations(&self, f: impl Fn(&Rat) -> Rat) -> Self {
        AtomicMeasure::from_atoms(self.atoms.iter().map(|a| (f(&a.location), a.mass.clone())))
    }

    /// Kolmogorov distance `sup_t |F_μ(t) - F_ν(t)|` between two atomic measures.
    pub fn kolmogorov_distance(&self, other: &AtomicMeasure) -> Rat {
        let mut points: Vec<&Rat> = self
            .atoms
            .iter()
            .chain(other.atoms.iter())
            .map(|a| &a.location)
            .collect();
        points.sort();
        points.dedup();
        points
            .into_iter()
            .map(|t| (self.cdf(t) - other.cdf(t)).abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }
}
