//! Rational Weyl groups and characters in general position.
//!
//! A character `v̄ ∈ Λ/(Φ - 1)Λ` is in general position when no non-identity
//! element of the rational Weyl group fixes it. Two independent routes decide
//! this: [`is_general_position`] solves `(Φ - 1)x = s(v) - v` in the lattice for
//! each `s`, while [`orbit_oracle`] reduces vectors to canonical Hermite
//! representatives and compares them inside the finite quotient.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlinalg::hermite_normal_form;
use crate::torus::{FamilySpec, TwistedTorus};
use crate::weyl::{centralizer_twisted, generated_subgroup, SignedPermutation, WeylType};

/// Largest quotient the orbit oracle will enumerate.
pub const ORACLE_THRESHOLD: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeylMethod {
    BruteForceCentralizer,
    Structural,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalWeylAction {
    /// Sorted ascending; the identity comes first among type-A elements but
    /// not in general, so callers filter it explicitly.
    pub elements: Vec<SignedPermutation>,
    pub method: WeylMethod,
    /// Both the exhaustive and the structural construction ran and agreed.
    pub cross_checked: bool,
}

impl RationalWeylAction {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn non_identity(&self) -> impl Iterator<Item = &SignedPermutation> {
        self.elements.iter().filter(|s| !s.is_identity())
    }

    pub fn is_cyclic(&self) -> bool {
        self.elements.iter().any(|s| s.order() == self.order())
    }

    /// Greedy generating set: walk the elements in order and keep each one
    /// not yet generated.
    pub fn generators(&self) -> Vec<SignedPermutation> {
        let Some(first) = self.elements.first() else {
            return Vec::new();
        };
        let n = first.dim();
        if self.is_cyclic() {
            let g = self
                .elements
                .iter()
                .find(|s| s.order() == self.order())
                .expect("cyclic");
            return if self.order() == 1 {
                Vec::new()
            } else {
                vec![g.clone()]
            };
        }
        let mut gens: Vec<SignedPermutation> = Vec::new();
        let mut span = generated_subgroup(n, &gens);
        for s in &self.elements {
            if span.binary_search(s).is_err() {
                gens.push(s.clone());
                span = generated_subgroup(n, &gens);
            }
        }
        gens
    }
}

/// Solves a linear system over GF(2) with at most 64 unknowns and returns
/// every solution as a bit mask.
fn solve_gf2(n: usize, equations: &[(u64, bool)]) -> Vec<u64> {
    let mut rows: Vec<(u64, bool)> = equations.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, column)
    let mut r = 0;
    for col in 0..n {
        let bit = 1u64 << col;
        let Some(p) = (r..rows.len()).find(|&i| rows[i].0 & bit != 0) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i].0 & bit != 0 {
                rows[i].0 ^= rows[r].0;
                rows[i].1 ^= rows[r].1;
            }
        }
        pivots.push((r, col));
        r += 1;
    }
    if rows[r..].iter().any(|&(mask, rhs)| mask == 0 && rhs) {
        return Vec::new();
    }
    let pivot_cols: u64 = pivots.iter().fold(0, |m, &(_, c)| m | 1 << c);
    let free: Vec<usize> = (0..n).filter(|c| pivot_cols >> c & 1 == 0).collect();
    (0..1u64 << free.len())
        .map(|choice| {
            let mut x = 0u64;
            for (k, &c) in free.iter().enumerate() {
                if choice >> k & 1 == 1 {
                    x |= 1 << c;
                }
            }
            for &(row, col) in &pivots {
                let (mask, rhs) = rows[row];
                let rest = (mask & !(1 << col) & x).count_ones() % 2 == 1;
                if rhs ^ rest {
                    x |= 1 << col;
                }
            }
            x
        })
        .collect()
}

/// Twisted centralizer from the signed-permutation structure.
///
/// Every element of the centralizer of `c = w ∘ F0` maps to a permutation
/// commuting with the underlying permutation `π` of `c`. When `π` is an
/// `N`-cycle or an `(N-1)`-cycle with one fixed point, that centralizer is
/// `⟨π⟩`, and for each power `p` the admissible sign vectors `ε` (with
/// `ε ∘ p` commuting with `c`) form the solution set of a linear system over
/// the two-element field.
pub fn structural_rational_weyl_group(
    spec: &FamilySpec,
    w: &SignedPermutation,
) -> Result<RationalWeylAction> {
    let c = w.compose(&spec.f0);
    let n = c.dim();
    let pi = SignedPermutation::new(c.perm().to_vec(), vec![1; n])?;
    let fixed = (0..n).filter(|&i| pi.perm()[i] == i).count();
    let cyclic_centralizer = match fixed {
        0 => pi.order() == n,
        1 => pi.order() == n - 1 && n > 2,
        _ => false,
    };
    if !cyclic_centralizer || n > 64 {
        return Err(Error::NoStructuralGroup);
    }
    let kind = spec.weyl.kind();

    let mut elements = Vec::new();
    let mut p = SignedPermutation::identity(n);
    for _ in 0..pi.order() {
        // ε_{p(π(i))} ε_{p(i)} = c_i c_{p(i)}
        let mut eqs: Vec<(u64, bool)> = (0..n)
            .map(|i| {
                let a = p.perm()[c.perm()[i]];
                let b = p.perm()[i];
                let rhs = c.signs()[i] != c.signs()[b];
                ((1u64 << a) ^ (1u64 << b), rhs)
            })
            .collect();
        match kind {
            WeylType::A => eqs.extend((0..n).map(|i| (1u64 << i, false))),
            WeylType::D => eqs.push(((1u64 << n) - 1, false)),
            WeylType::B | WeylType::C => {}
        }
        for bits in solve_gf2(n, &eqs) {
            let signs: Vec<i8> = (0..n)
                .map(|j| if bits >> p.perm()[j] & 1 == 1 { -1 } else { 1 })
                .collect();
            let s = SignedPermutation::new(p.perm().to_vec(), signs)?;
            if !s.commutes_with(&c) || !spec.weyl.contains(&s) {
                return Err(Error::Inconsistent(format!(
                    "sign system produced {s}, which is not in the twisted centralizer"
                )));
            }
            elements.push(s);
        }
        p = pi.compose(&p);
    }
    elements.sort();
    elements.dedup();
    Ok(RationalWeylAction {
        elements,
        method: WeylMethod::Structural,
        cross_checked: false,
    })
}

/// Rational Weyl group of `T0(w)`; independent of `q`.
///
/// Enumerates the twisted centralizer when the Weyl group is small enough and
/// checks it against the structural construction whenever that exists.
pub fn rational_weyl_group_for(
    spec: &FamilySpec,
    w: &SignedPermutation,
    threshold: u128,
) -> Result<RationalWeylAction> {
    let structural = match structural_rational_weyl_group(spec, w) {
        Ok(s) => Some(s),
        Err(Error::NoStructuralGroup) => None,
        Err(e) => return Err(e),
    };
    if spec.weyl.order() > threshold {
        return structural.ok_or(Error::TooLarge {
            what: "Weyl group",
            size: spec.weyl.order(),
            threshold,
        });
    }
    let elements = centralizer_twisted(&spec.weyl, w, &spec.f0, threshold)?;
    if let Some(s) = &structural {
        if s.elements != elements {
            return Err(Error::Inconsistent(format!(
                "structural group of order {} differs from enumerated centralizer of order {}",
                s.order(),
                elements.len()
            )));
        }
    }
    Ok(RationalWeylAction {
        elements,
        method: WeylMethod::BruteForceCentralizer,
        cross_checked: structural.is_some(),
    })
}

pub fn rational_weyl_group(torus: &TwistedTorus, threshold: u128) -> Result<RationalWeylAction> {
    rational_weyl_group_for(&torus.spec, &torus.w, threshold)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictMethod {
    LatticeMembership,
    OrbitOracle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenPosVerdict {
    pub witness: Vec<BigInt>,
    pub in_general_position: bool,
    /// First non-identity element (ascending order) fixing the character.
    pub failing_element: Option<SignedPermutation>,
    pub method: VerdictMethod,
}

/// Lattice-membership test: `v̄` is in general position iff
/// `s(v) - v ∉ (Φ - 1)Λ` for every non-identity `s`.
pub fn is_general_position(
    torus: &TwistedTorus,
    group: &RationalWeylAction,
    v: &[BigInt],
) -> Result<GenPosVerdict> {
    torus.coordinates(v)?;
    let mut failing = None;
    for s in group.non_identity() {
        let diff: Vec<BigInt> = s.apply(v).iter().zip(v).map(|(a, b)| a - b).collect();
        if torus.in_image(&diff)? {
            failing = Some(s.clone());
            break;
        }
    }
    Ok(GenPosVerdict {
        witness: v.to_vec(),
        in_general_position: failing.is_none(),
        failing_element: failing,
        method: VerdictMethod::LatticeMembership,
    })
}

/// The finite quotient `Λ/(Φ - 1)Λ` enumerated through Hermite normal form
/// representatives, together with the rational Weyl group acting on it.
#[derive(Clone, Debug)]
pub struct QuotientOracle {
    /// Lower-triangular Hermite basis of `(Φ - 1)Λ` in lattice coordinates.
    hnf: Vec<Vec<i128>>,
    actions: Vec<(SignedPermutation, Vec<Vec<i128>>)>,
    order: u128,
}

impl QuotientOracle {
    pub fn new(torus: &TwistedTorus, group: &RationalWeylAction, threshold: u128) -> Result<Self> {
        let order = torus.torus_order();
        let size = order.to_u128().unwrap_or(u128::MAX);
        if size > threshold {
            return Err(Error::TooLarge {
                what: "character group",
                size,
                threshold,
            });
        }
        let to_small = |x: &BigInt| x.to_i128().expect("entry bounded by quotient order");
        let h = hermite_normal_form(torus.lattice_matrix())?;
        let r = h.rows();
        let hnf = (0..r)
            .map(|i| (0..r).map(|j| to_small(&h[(i, j)])).collect())
            .collect();
        let actions = group
            .elements
            .iter()
            .map(|s| {
                let m = torus.element_matrix(s)?;
                let rows = (0..r)
                    .map(|i| (0..r).map(|j| to_small(&m[(i, j)])).collect())
                    .collect();
                Ok((s.clone(), rows))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            hnf,
            actions,
            order: size,
        })
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.hnf.len()
    }

    fn reduce(&self, v: &mut [i128]) {
        for i in 0..v.len() {
            let k = v[i].div_euclid(self.hnf[i][i]);
            if k != 0 {
                for j in i..v.len() {
                    v[j] -= k * self.hnf[j][i];
                }
            }
        }
    }

    /// Canonical representative of lattice coordinates modulo `(Φ - 1)Λ`.
    pub fn canonical(&self, coords: &[BigInt]) -> Vec<i128> {
        // reduce with big integers first so arbitrary inputs fit
        let mut v: Vec<BigInt> = coords.to_vec();
        for i in 0..v.len() {
            let d = BigInt::from(self.hnf[i][i]);
            let k = num_integer::Integer::div_floor(&v[i], &d);
            if !k.is_zero() {
                for j in i..v.len() {
                    v[j] -= &k * BigInt::from(self.hnf[j][i]);
                }
            }
        }
        v.iter().map(|x| x.to_i128().expect("reduced")).collect()
    }

    fn act(&self, action: &[Vec<i128>], rep: &[i128]) -> Vec<i128> {
        let mut out: Vec<i128> = action
            .iter()
            .map(|row| row.iter().zip(rep).map(|(a, b)| a * b).sum())
            .collect();
        self.reduce(&mut out);
        out
    }

    /// Group elements fixing the class of `rep`, in ascending order.
    pub fn stabilizer(&self, rep: &[i128]) -> Vec<&SignedPermutation> {
        self.actions
            .iter()
            .filter(|(_, a)| self.act(a, rep) == rep)
            .map(|(s, _)| s)
            .collect()
    }

    /// Smallest member of the orbit of `rep`; matches the representatives
    /// returned by [`Self::free_orbit_representatives`].
    pub fn orbit_min(&self, rep: &[i128]) -> Vec<i128> {
        self.actions
            .iter()
            .map(|(_, a)| self.act(a, rep))
            .min()
            .unwrap_or_else(|| rep.to_vec())
    }

    fn decode(&self, mut idx: u128) -> Vec<i128> {
        let mut rep = vec![0i128; self.dim()];
        for i in (0..self.dim()).rev() {
            let d = self.hnf[i][i] as u128;
            rep[i] = (idx % d) as i128;
            idx /= d;
        }
        rep
    }

    fn encode(&self, rep: &[i128]) -> u128 {
        rep.iter().enumerate().fold(0u128, |acc, (i, &x)| {
            acc * self.hnf[i][i] as u128 + x as u128
        })
    }

    fn is_free(&self, rep: &[i128]) -> bool {
        self.actions
            .iter()
            .filter(|(s, _)| !s.is_identity())
            .all(|(_, a)| self.act(a, rep) != rep)
    }

    /// Number of quotient elements with trivial stabilizer.
    pub fn count_free(&self) -> u128 {
        (0..self.order)
            .filter(|&idx| self.is_free(&self.decode(idx)))
            .count() as u128
    }

    /// Lexicographically smallest member of every free orbit, in ascending
    /// order, up to `limit` of them; also returns the total number of free
    /// orbits.
    pub fn free_orbit_representatives(&self, limit: usize) -> (Vec<Vec<i128>>, u128) {
        let mut seen = vec![false; self.order as usize];
        let mut reps = Vec::new();
        let mut total = 0u128;
        for idx in 0..self.order {
            if seen[idx as usize] {
                continue;
            }
            let rep = self.decode(idx);
            for (_, a) in &self.actions {
                seen[self.encode(&self.act(a, &rep)) as usize] = true;
            }
            if self.is_free(&rep) {
                total += 1;
                if reps.len() < limit {
                    reps.push(rep);
                }
            }
        }
        (reps, total)
    }
}

/// Independent check of [`is_general_position`] by working in the finite
/// quotient directly.
pub fn orbit_oracle(
    torus: &TwistedTorus,
    group: &RationalWeylAction,
    v: &[BigInt],
    threshold: u128,
) -> Result<GenPosVerdict> {
    let coords = torus.coordinates(v)?;
    let oracle = QuotientOracle::new(torus, group, threshold)?;
    Ok(oracle_verdict(&oracle, v, &coords))
}

pub(crate) fn oracle_verdict(
    oracle: &QuotientOracle,
    v: &[BigInt],
    coords: &[BigInt],
) -> GenPosVerdict {
    let rep = oracle.canonical(coords);
    let failing = oracle
        .stabilizer(&rep)
        .into_iter()
        .find(|s| !s.is_identity())
        .cloned();
    GenPosVerdict {
        witness: v.to_vec(),
        in_general_position: failing.is_none(),
        failing_element: failing,
        method: VerdictMethod::OrbitOracle,
    }
}

/// Number of characters in general position.
pub fn count_general_position(
    torus: &TwistedTorus,
    group: &RationalWeylAction,
    threshold: u128,
) -> Result<u128> {
    Ok(QuotientOracle::new(torus, group, threshold)?.count_free())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::big_vec;
    use crate::torus::{build_family, twist, Family};
    use crate::weyl::{coxeter_element, ENUMERATION_THRESHOLD};

    #[test]
    fn gf2_solver() {
        // x0 + x1 = 1, x1 + x2 = 0
        let sols = solve_gf2(3, &[(0b011, true), (0b110, false)]);
        assert_eq!(sols.len(), 2);
        for s in sols {
            assert_eq!((s & 1) ^ (s >> 1 & 1), 1);
            assert_eq!((s >> 1 & 1) ^ (s >> 2 & 1), 0);
        }
        assert!(solve_gf2(2, &[(0b11, true), (0b11, false)]).is_empty());
    }

    #[test]
    fn split_coxeter_group_is_cyclic() {
        for (family, kind, rank) in [
            (Family::A, WeylType::A, 4),
            (Family::B, WeylType::B, 4),
            (Family::C, WeylType::C, 3),
        ] {
            let spec = build_family(family, rank).unwrap();
            let w = coxeter_element(kind, rank).unwrap();
            let g = rational_weyl_group_for(&spec, &w, ENUMERATION_THRESHOLD).unwrap();
            assert!(g.cross_checked);
            assert_eq!(g.order(), kind.coxeter_number(rank));
            assert_eq!(
                g.elements,
                generated_subgroup(w.dim(), std::slice::from_ref(&w))
            );
            assert_eq!(g.generators().len(), 1);
        }
    }

    #[test]
    fn unitary_odd_group_is_generated_by_w() {
        let spec = build_family(Family::TwoA, 4).unwrap();
        let w = SignedPermutation::cycle(5, &[1, 2, 3, 4, 5]);
        let g = rational_weyl_group_for(&spec, &w, ENUMERATION_THRESHOLD).unwrap();
        assert_eq!(g.elements, generated_subgroup(5, &[w]));
    }

    #[test]
    fn structural_refuses_unsupported_shapes() {
        let spec = build_family(Family::B, 4).unwrap();
        let w = SignedPermutation::cycle(4, &[1, 2]);
        assert_eq!(
            structural_rational_weyl_group(&spec, &w).unwrap_err(),
            Error::NoStructuralGroup
        );
        // falls back to enumeration
        let g = rational_weyl_group_for(&spec, &w, ENUMERATION_THRESHOLD).unwrap();
        assert!(!g.cross_checked);
        assert!(matches!(
            rational_weyl_group_for(&spec, &w, 10),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn zero_is_never_in_general_position() {
        let spec = build_family(Family::B, 3).unwrap();
        let t = twist(&spec, &coxeter_element(WeylType::B, 3).unwrap(), 2).unwrap();
        let g = rational_weyl_group(&t, ENUMERATION_THRESHOLD).unwrap();
        let zero = big_vec(&[0, 0, 0]);
        let v = is_general_position(&t, &g, &zero).unwrap();
        assert!(!v.in_general_position);
        assert!(v.failing_element.is_some());
        let o = orbit_oracle(&t, &g, &zero, ORACLE_THRESHOLD).unwrap();
        assert!(!o.in_general_position);
        let rep = QuotientOracle::new(&t, &g, ORACLE_THRESHOLD)
            .unwrap()
            .canonical(&t.coordinates(&zero).unwrap());
        assert_eq!(
            QuotientOracle::new(&t, &g, ORACLE_THRESHOLD)
                .unwrap()
                .stabilizer(&rep)
                .len(),
            g.order()
        );
    }

    #[test]
    fn b2_q2_quotient() {
        let spec = build_family(Family::B, 2).unwrap();
        let t = twist(&spec, &coxeter_element(WeylType::B, 2).unwrap(), 2).unwrap();
        let g = rational_weyl_group(&t, ENUMERATION_THRESHOLD).unwrap();
        assert_eq!(g.order(), 4);
        let e1 = big_vec(&[1, 0]);
        assert!(
            is_general_position(&t, &g, &e1)
                .unwrap()
                .in_general_position
        );
        assert!(
            orbit_oracle(&t, &g, &e1, ORACLE_THRESHOLD)
                .unwrap()
                .in_general_position
        );
        // 5 characters: 0 is fixed, the other 4 form one free orbit
        assert_eq!(count_general_position(&t, &g, ORACLE_THRESHOLD).unwrap(), 4);
    }

    #[test]
    fn non_member_rejected() {
        let spec = build_family(Family::C, 2).unwrap();
        let t = twist(&spec, &coxeter_element(WeylType::C, 2).unwrap(), 3).unwrap();
        let g = rational_weyl_group(&t, ENUMERATION_THRESHOLD).unwrap();
        assert_eq!(
            is_general_position(&t, &g, &big_vec(&[1, 0])).unwrap_err(),
            Error::NotInLattice
        );
        assert!(matches!(
            orbit_oracle(&t, &g, &big_vec(&[2, 0]), 3),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn c_coxeter_e1_is_decided_by_oracle() {
        // e_1 is not in the sum-even lattice, but 2e_1 and e_1 + e_2 are
        for n in [2usize, 3] {
            let spec = build_family(Family::C, n).unwrap();
            let t = twist(&spec, &coxeter_element(WeylType::C, n).unwrap(), 2).unwrap();
            let g = rational_weyl_group(&t, ENUMERATION_THRESHOLD).unwrap();
            let mut v = vec![0i64; n];
            v[0] = 1;
            v[1] = 1;
            let v = big_vec(&v);
            let a = is_general_position(&t, &g, &v).unwrap();
            let b = orbit_oracle(&t, &g, &v, ORACLE_THRESHOLD).unwrap();
            assert_eq!(a.in_general_position, b.in_general_position);
            assert_eq!(a.failing_element, b.failing_element);
        }
    }
}
