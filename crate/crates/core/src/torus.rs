//! Classical families, twisted maximal tori and their character groups.
//!
//! A torus is described on the character lattice `Λ` of the adjoint maximal
//! torus. Twisting by a Weyl element `w` gives the geometric Frobenius
//! `w ∘ F0` on `Λ`, and the relative `q`-Frobenius is `Φ = q · (w ∘ F0)`.
//! The characters of the finite torus are `Λ / (Φ - 1)Λ`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlinalg::{determinant, IntMatrix, IntegerSolver, Lattice};
use crate::weyl::{SignedPermutation, WeylGroup, WeylType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    #[serde(rename = "2A")]
    TwoA,
    #[serde(rename = "2D")]
    TwoD,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::TwoA,
        Family::TwoD,
    ];

    pub fn min_rank(self) -> usize {
        match self {
            Family::A => 1,
            Family::B | Family::C | Family::TwoA => 2,
            Family::TwoD => 3,
            Family::D => 4,
        }
    }

    pub fn ambient_dim(self, rank: usize) -> usize {
        match self {
            Family::A | Family::TwoA | Family::TwoD => rank + 1,
            Family::B | Family::C | Family::D => rank,
        }
    }

    pub fn is_split(self) -> bool {
        !matches!(self, Family::TwoA | Family::TwoD)
    }

    /// Type and rank of the absolute Weyl group.
    pub fn weyl_type(self, rank: usize) -> (WeylType, usize) {
        match self {
            Family::A | Family::TwoA => (WeylType::A, rank),
            Family::B => (WeylType::B, rank),
            Family::C => (WeylType::C, rank),
            Family::D => (WeylType::D, rank),
            Family::TwoD => (WeylType::D, rank + 1),
        }
    }

    pub fn check_rank(self, rank: usize) -> Result<()> {
        if rank < self.min_rank() {
            return Err(Error::InvalidRank { family: self, rank });
        }
        Ok(())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::TwoA => "2A",
            Family::TwoD => "2D",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::OutOfRange(format!("unknown family {s}")))
    }
}

/// Which sublattice of `Z^N` carries the characters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    /// all of `Z^N`
    Full,
    /// `Σ x_i = 0`
    SumZero,
    /// `Σ x_i ≡ 0 mod 2`
    SumEven,
}

impl LatticeKind {
    pub fn basis(self, n: usize) -> IntMatrix {
        let diff = |j: usize| {
            let mut v = vec![BigInt::zero(); n];
            v[j] = BigInt::one();
            v[j + 1] = -BigInt::one();
            v
        };
        let cols: Vec<Vec<BigInt>> = match self {
            LatticeKind::Full => return IntMatrix::identity(n),
            LatticeKind::SumZero => (0..n - 1).map(diff).collect(),
            LatticeKind::SumEven => {
                let mut cols: Vec<_> = (0..n - 1).map(diff).collect();
                let mut last = vec![BigInt::zero(); n];
                last[n - 1] = BigInt::from(2);
                cols.push(last);
                cols
            }
        };
        IntMatrix::from_columns(n, &cols)
    }

    pub fn contains(self, v: &[i64]) -> bool {
        let sum: i64 = v.iter().sum();
        match self {
            LatticeKind::Full => true,
            LatticeKind::SumZero => sum == 0,
            LatticeKind::SumEven => sum % 2 == 0,
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeKind::Full => "Z^n",
            LatticeKind::SumZero => "sum = 0",
            LatticeKind::SumEven => "sum even",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub rank: usize,
    pub ambient_dim: usize,
    pub lattice_kind: LatticeKind,
    pub lattice: Lattice,
    /// Frobenius action on the untwisted character lattice.
    pub f0: SignedPermutation,
    pub weyl: WeylGroup,
}

pub fn build_family(family: Family, rank: usize) -> Result<FamilySpec> {
    family.check_rank(rank)?;
    let n = family.ambient_dim(rank);
    let lattice_kind = match family {
        Family::A | Family::TwoA => LatticeKind::SumZero,
        Family::B => LatticeKind::Full,
        Family::C | Family::D | Family::TwoD => LatticeKind::SumEven,
    };
    let f0 = match family {
        Family::TwoA => SignedPermutation::negation(n),
        Family::TwoD => SignedPermutation::sign_flip(n, n),
        _ => SignedPermutation::identity(n),
    };
    let (kind, weyl_rank) = family.weyl_type(rank);
    Ok(FamilySpec {
        family,
        rank,
        ambient_dim: n,
        lattice_kind,
        lattice: Lattice::from_basis(lattice_kind.basis(n))?,
        f0,
        weyl: WeylGroup::new(kind, weyl_rank)?,
    })
}

pub fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut r = q;
            while r.is_multiple_of(p) {
                r /= p;
            }
            return r == 1;
        }
        p += 1;
    }
    true
}

pub fn check_prime_power(q: u64) -> Result<()> {
    if is_prime_power(q) {
        Ok(())
    } else {
        Err(Error::NotPrimePower(q))
    }
}

/// The maximal torus `T0(w)` of a family over the field with `q` elements.
#[derive(Clone, Debug)]
pub struct TwistedTorus {
    pub spec: FamilySpec,
    pub w: SignedPermutation,
    pub q: u64,
    /// `w ∘ F0` on the ambient lattice.
    pub geom_frob: SignedPermutation,
    /// `w ∘ F0` in lattice coordinates.
    frob_coords: IntMatrix,
    /// `q (w ∘ F0) - 1` in lattice coordinates.
    m: IntMatrix,
    solver: IntegerSolver,
}

pub fn twist(spec: &FamilySpec, w: &SignedPermutation, q: u64) -> Result<TwistedTorus> {
    check_prime_power(q)?;
    if !spec.weyl.contains(w) {
        return Err(Error::NotInWeylGroup);
    }
    let geom_frob = w.compose(&spec.f0);
    let frob_coords = spec.lattice.restrict(&geom_frob.matrix())?;
    let r = frob_coords.rows();
    let m = frob_coords
        .scale(&BigInt::from(q))
        .sub(&IntMatrix::identity(r));
    let solver = IntegerSolver::new(&m);
    Ok(TwistedTorus {
        spec: spec.clone(),
        w: w.clone(),
        q,
        geom_frob,
        frob_coords,
        m,
        solver,
    })
}

impl TwistedTorus {
    pub fn lattice(&self) -> &Lattice {
        &self.spec.lattice
    }

    /// `Φ - 1` in lattice coordinates.
    pub fn lattice_matrix(&self) -> &IntMatrix {
        &self.m
    }

    /// `w ∘ F0` in lattice coordinates.
    pub fn frobenius_matrix(&self) -> &IntMatrix {
        &self.frob_coords
    }

    /// `Φ = q (w ∘ F0)` on the ambient lattice.
    pub fn relative_frobenius(&self) -> IntMatrix {
        self.geom_frob.matrix().scale(&BigInt::from(self.q))
    }

    /// `Φ - 1` on the ambient lattice.
    pub fn ambient_matrix(&self) -> IntMatrix {
        let n = self.spec.ambient_dim;
        self.relative_frobenius().sub(&IntMatrix::identity(n))
    }

    /// No nonzero lattice vector is fixed by `w ∘ F0`.
    pub fn is_anisotropic(&self) -> bool {
        let r = self.frob_coords.rows();
        let shifted = self.frob_coords.sub(&IntMatrix::identity(r));
        !determinant(&shifted).expect("square").is_zero()
    }

    /// Basis (ambient coordinates) of the sublattice fixed by `w ∘ F0`.
    pub fn fixed_sublattice(&self) -> Vec<Vec<BigInt>> {
        let r = self.frob_coords.rows();
        let shifted = self.frob_coords.sub(&IntMatrix::identity(r));
        IntegerSolver::new(&shifted)
            .kernel_basis()
            .iter()
            .map(|c| {
                let mut v = self.lattice().to_ambient(c);
                if v.iter()
                    .find(|x| !x.is_zero())
                    .is_some_and(Signed::is_negative)
                {
                    v.iter_mut().for_each(|x| *x = -std::mem::take(x));
                }
                v
            })
            .collect()
    }

    /// `|T(k)| = |det(Φ - 1)|` on the lattice.
    pub fn torus_order(&self) -> BigInt {
        determinant(&self.m).expect("square").abs()
    }

    /// Lattice coordinates of an ambient vector.
    pub fn coordinates(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        self.lattice().coordinates(v)?.ok_or(Error::NotInLattice)
    }

    /// Whether the lattice vector `v` lies in `(Φ - 1)Λ`.
    pub fn in_image(&self, v: &[BigInt]) -> Result<bool> {
        let c = self.coordinates(v)?;
        Ok(self.solver.solve(&c).is_some())
    }

    /// Some `x ∈ Λ` with `(Φ - 1) x = v`.
    pub fn preimage(&self, v: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        let c = self.coordinates(v)?;
        Ok(self.solver.solve(&c).map(|x| self.lattice().to_ambient(&x)))
    }

    /// Matrix of a Weyl element in lattice coordinates.
    pub fn element_matrix(&self, s: &SignedPermutation) -> Result<IntMatrix> {
        self.lattice().restrict(&s.matrix())
    }

    pub fn character_group(&self) -> CharacterGroup {
        let snf = self.solver.decomposition();
        CharacterGroup {
            invariant_factors: snf.d.clone(),
            projection: snf.u.clone(),
        }
    }
}

/// `Λ / (Φ - 1)Λ ≅ ⊕ Z/d_i` in invariant-factor coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterGroup {
    /// All invariant factors, leading ones included.
    pub invariant_factors: Vec<BigInt>,
    /// Maps lattice coordinates onto `⊕ Z` before reduction mod `d_i`.
    projection: IntMatrix,
}

impl CharacterGroup {
    pub fn order(&self) -> BigInt {
        self.invariant_factors
            .iter()
            .fold(BigInt::one(), |acc, d| acc * d)
    }

    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }

    /// Image of lattice coordinates in `⊕ Z/d_i`, each entry in `[0, d_i)`.
    pub fn project(&self, coords: &[BigInt]) -> Vec<BigInt> {
        self.projection
            .mul_vec(coords)
            .iter()
            .zip(&self.invariant_factors)
            .map(|(x, d)| {
                if d.is_zero() {
                    x.clone()
                } else {
                    x.mod_floor(d)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::big_vec;
    use crate::weyl::coxeter_element;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn family_setups() {
        let c2 = build_family(Family::C, 2).unwrap();
        assert_eq!(
            c2.lattice.basis(),
            &IntMatrix::from_rows(&[[1, 0], [-1, 2]])
        );
        let a1 = build_family(Family::A, 1).unwrap();
        assert_eq!(a1.lattice.basis(), &IntMatrix::from_rows(&[[1], [-1]]));
        let d2 = build_family(Family::TwoD, 3).unwrap();
        assert_eq!(d2.ambient_dim, 4);
        assert_eq!(d2.f0, SignedPermutation::sign_flip(4, 4));
        let u = build_family(Family::TwoA, 2).unwrap();
        assert_eq!(u.f0, SignedPermutation::negation(3));
        assert_eq!(u.lattice_kind, LatticeKind::SumZero);
        for (f, r) in [
            (Family::A, 0),
            (Family::B, 1),
            (Family::C, 1),
            (Family::D, 3),
            (Family::TwoA, 1),
            (Family::TwoD, 2),
        ] {
            assert_eq!(
                build_family(f, r).unwrap_err(),
                Error::InvalidRank { family: f, rank: r }
            );
        }
    }

    #[test]
    fn family_parse_and_display() {
        for f in Family::ALL {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert_eq!("2d".parse::<Family>().unwrap(), Family::TwoD);
        assert!("E".parse::<Family>().is_err());
        assert_eq!(serde_json::to_string(&Family::TwoA).unwrap(), "\"2A\"");
    }

    #[test]
    fn prime_powers() {
        let pp: Vec<u64> = (1..=32).filter(|&q| is_prime_power(q)).collect();
        assert_eq!(
            pp,
            vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32]
        );
        assert_eq!(check_prime_power(6), Err(Error::NotPrimePower(6)));
    }

    #[test]
    fn identity_twist() {
        for q in [2u64, 3, 4, 7] {
            let spec = build_family(Family::B, 3).unwrap();
            let t = twist(&spec, &SignedPermutation::identity(3), q).unwrap();
            let expect = IntMatrix::identity(3).scale(&b(q as i64 - 1));
            assert_eq!(t.lattice_matrix(), &expect);
            assert!(!t.is_anisotropic());
            assert_eq!(t.torus_order(), b(q as i64 - 1).pow(3));
            assert_eq!(
                t.character_group().invariant_factors,
                vec![b(q as i64 - 1); 3]
            );
        }
    }

    #[test]
    fn b_coxeter_system() {
        // (wΦ - 1)x = (-q x_n - x_1, q x_1 - x_2, ..., q x_{n-1} - x_n)
        let spec = build_family(Family::B, 4).unwrap();
        let w = coxeter_element(WeylType::B, 4).unwrap();
        let t = twist(&spec, &w, 3).unwrap();
        let x = big_vec(&[1, 2, 3, 4]);
        let y = t.ambient_matrix().mul_vec(&x);
        assert_eq!(y, big_vec(&[-3 * 4 - 1, 3 - 2, 6 - 3, 9 - 4]));
        assert!(t.is_anisotropic());
        assert_eq!(t.torus_order(), b(82));
        let b2 = twist(
            &build_family(Family::B, 2).unwrap(),
            &coxeter_element(WeylType::B, 2).unwrap(),
            2,
        )
        .unwrap();
        assert_eq!(b2.character_group().order(), b(5));
    }

    #[test]
    fn unitary_odd_frobenius() {
        let spec = build_family(Family::TwoA, 2).unwrap();
        let w = SignedPermutation::cycle(3, &[1, 2, 3]);
        let t = twist(&spec, &w, 2).unwrap();
        let x = big_vec(&[1, 5, -6]);
        assert_eq!(
            t.relative_frobenius().mul_vec(&x),
            big_vec(&[-2 * -6, -2, -2 * 5])
        );
        assert!(t.is_anisotropic());
    }

    #[test]
    fn a_coxeter_order_matches_determinant() {
        for n in 1..=5usize {
            for q in [2u64, 3, 5] {
                let spec = build_family(Family::A, n).unwrap();
                let t = twist(&spec, &coxeter_element(WeylType::A, n).unwrap(), q).unwrap();
                let qb = b(q as i64);
                let expect = (qb.pow(n as u32 + 1) - 1u32) / (qb - 1u32);
                assert_eq!(t.torus_order(), expect);
                assert_eq!(t.character_group().order(), expect);
            }
        }
    }

    #[test]
    fn d_displayed_cycle_is_isotropic() {
        for n in 4..=7usize {
            let spec = build_family(Family::D, n).unwrap();
            let t = twist(&spec, &crate::weyl::dn_displayed_cycle(n), 2).unwrap();
            assert!(!t.is_anisotropic());
            let fixed = t.fixed_sublattice();
            assert_eq!(fixed.len(), 1);
            let mut v = vec![2i64; n];
            v[n - 1] = -2;
            let lat = Lattice::from_basis(IntMatrix::from_columns(n, &fixed)).unwrap();
            assert!(lat.contains(&big_vec(&v)));
            let genuine = twist(&spec, &coxeter_element(WeylType::D, n).unwrap(), 2).unwrap();
            assert!(genuine.is_anisotropic());
        }
    }

    #[test]
    fn twist_rejections() {
        let spec = build_family(Family::D, 4).unwrap();
        assert_eq!(
            twist(&spec, &SignedPermutation::identity(4), 6).unwrap_err(),
            Error::NotPrimePower(6)
        );
        assert_eq!(
            twist(&spec, &SignedPermutation::sign_flip(4, 1), 2).unwrap_err(),
            Error::NotInWeylGroup
        );
        let a = build_family(Family::A, 2).unwrap();
        assert_eq!(
            twist(&a, &SignedPermutation::sign_flip(3, 1), 2).unwrap_err(),
            Error::NotInWeylGroup
        );
    }

    #[test]
    fn projection_kernel_is_image() {
        let spec = build_family(Family::C, 3).unwrap();
        let t = twist(&spec, &coxeter_element(WeylType::C, 3).unwrap(), 3).unwrap();
        let cg = t.character_group();
        assert_eq!(cg.order(), t.torus_order());
        for v in [[2i64, 0, 0], [1, 1, 0], [4, -2, 6], [0, 0, 0], [3, 5, 2]] {
            let v = big_vec(&v);
            let proj = cg.project(&t.coordinates(&v).unwrap());
            assert_eq!(proj.iter().all(Zero::is_zero), t.in_image(&v).unwrap());
        }
        let image = t.ambient_matrix().mul_vec(&big_vec(&[2, 0, 0]));
        assert!(t.in_image(&image).unwrap());
        assert!(cg
            .project(&t.coordinates(&image).unwrap())
            .iter()
            .all(Zero::is_zero));
        assert_eq!(t.in_image(&big_vec(&[1, 0, 0])), Err(Error::NotInLattice));
    }
}
