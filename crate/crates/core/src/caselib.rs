//! The witness table and end-to-end certification of individual cases.
//!
//! For each classical family the table fixes one twisting element `w` and
//! one lattice vector `v`. A case `(family, rank, q)` passes when `T0(w)` is
//! anisotropic and the image of `v` in `Λ/(Φ - 1)Λ` is in general position.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genpos::{
    is_general_position, oracle_verdict, rational_weyl_group_for, QuotientOracle,
    RationalWeylAction, WeylMethod, ORACLE_THRESHOLD,
};
use crate::intlinalg::big_vec;
use crate::torus::{build_family, check_prime_power, twist, Family, FamilySpec, LatticeKind};
use crate::weyl::{
    coxeter_element, dn_displayed_cycle, twisted_conjugacy_classes, SignedPermutation,
    ENUMERATION_THRESHOLD,
};

pub const SCHEMA_VERSION: &str = "cuspcert-1";

/// Every prime power up to 16, then a margin up to 32.
pub const DEFAULT_Q_GRID: [u64; 18] = [
    2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32,
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperWitness {
    pub family: Family,
    pub rank: usize,
    pub twist_element: SignedPermutation,
    pub witness_vector: Vec<i64>,
    pub provenance: String,
}

fn unit(n: usize, i: usize, c: i64) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i - 1] = c;
    v
}

fn diff(n: usize, i: usize, j: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i - 1] += 1;
    v[j - 1] -= 1;
    v
}

/// Table entry: twisting element and witness character for one family.
pub fn paper_witness(family: Family, rank: usize) -> Result<PaperWitness> {
    family.check_rank(rank)?;
    let n = family.ambient_dim(rank);
    let full_cycle: Vec<usize> = (1..=n).collect();
    let (twist_element, witness_vector, provenance) = match family {
        Family::A => (
            coxeter_element(family.weyl_type(rank).0, rank)?,
            diff(n, 1, n),
            "split A: coordinate rotation, e_1 - e_{n+1}",
        ),
        Family::B => (
            coxeter_element(family.weyl_type(rank).0, rank)?,
            unit(n, 1, 1),
            "split B: Coxeter element, e_1",
        ),
        Family::C => (
            coxeter_element(family.weyl_type(rank).0, rank)?,
            unit(n, 1, 2),
            "split C: Coxeter element, 2e_1",
        ),
        Family::D => {
            let m = n - 1;
            let cycle = SignedPermutation::cycle(n, &full_cycle[..m]);
            let w = SignedPermutation::sign_flip(n, n)
                .compose(&SignedPermutation::sign_flip(n, m))
                .compose(&cycle);
            (w, unit(n, m, 2), "split D: t_n t_m (1..m), 2e_m")
        }
        Family::TwoA if n % 2 == 1 => (
            SignedPermutation::cycle(n, &full_cycle),
            diff(n, 1, n),
            "unitary, n odd: (1..n), e_1 - e_n",
        ),
        Family::TwoA => {
            let m = n - 1;
            (
                SignedPermutation::cycle(n, &full_cycle[..m]),
                diff(n, 1, m),
                "unitary, n even: (1..m) with U_m witness e_1 - e_m embedded",
            )
        }
        Family::TwoD => (
            SignedPermutation::cycle(n, &full_cycle),
            unit(n, n, 2),
            "non-split orthogonal: (1..n), 2e_n",
        ),
    };
    Ok(PaperWitness {
        family,
        rank,
        twist_element,
        witness_vector,
        provenance: provenance.to_string(),
    })
}

/// Which twisting element to certify with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TwistChoice {
    /// The witness-table element.
    #[default]
    Paper,
    /// Product of the simple reflections.
    Coxeter,
    /// The full-length coordinate cycle; for type D this is the isotropic
    /// signed cycle `(x_1..x_n) -> (-x_n, x_1, .., x_{n-2}, -x_{n-1})`.
    NCycle,
    /// Representative of the k-th twisted conjugacy class (0-based).
    Index(usize),
}

impl fmt::Display for TwistChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwistChoice::Paper => f.write_str("paper"),
            TwistChoice::Coxeter => f.write_str("coxeter"),
            TwistChoice::NCycle => f.write_str("ncycle"),
            TwistChoice::Index(k) => write!(f, "index:{k}"),
        }
    }
}

impl FromStr for TwistChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(TwistChoice::Paper),
            "coxeter" => Ok(TwistChoice::Coxeter),
            "ncycle" => Ok(TwistChoice::NCycle),
            _ => s
                .strip_prefix("index:")
                .and_then(|k| k.parse().ok())
                .map(TwistChoice::Index)
                .ok_or_else(|| Error::OutOfRange(format!("unknown twist {s}"))),
        }
    }
}

/// Resolves a twist choice to a Weyl element of the family.
pub fn twist_element(
    spec: &FamilySpec,
    choice: TwistChoice,
    threshold: u128,
) -> Result<SignedPermutation> {
    let n = spec.ambient_dim;
    match choice {
        TwistChoice::Paper => Ok(paper_witness(spec.family, spec.rank)?.twist_element),
        TwistChoice::Coxeter => coxeter_element(spec.weyl.kind(), spec.weyl.rank()),
        TwistChoice::NCycle => Ok(match spec.family {
            Family::A | Family::B | Family::C => {
                coxeter_element(spec.weyl.kind(), spec.weyl.rank())?
            }
            Family::D => dn_displayed_cycle(n),
            Family::TwoA | Family::TwoD => {
                SignedPermutation::cycle(n, &(1..=n).collect::<Vec<_>>())
            }
        }),
        TwistChoice::Index(k) => {
            let table = twisted_conjugacy_classes(&spec.weyl, &spec.f0, threshold)?;
            let count = table.classes.len();
            table
                .classes
                .into_iter()
                .nth(k)
                .map(|c| c.representative)
                .ok_or_else(|| {
                    Error::OutOfRange(format!("class index {k} out of range ({count} classes)"))
                })
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub twist: TwistChoice,
    /// Cross-check general position with the orbit oracle when the quotient
    /// is small enough.
    pub oracle: bool,
    pub group_threshold: u128,
    pub oracle_threshold: u128,
    /// Worker threads for range certification; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Overrides the wall-clock timestamp.
    pub timestamp: Option<String>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            twist: TwistChoice::Paper,
            oracle: true,
            group_threshold: ENUMERATION_THRESHOLD,
            oracle_threshold: ORACLE_THRESHOLD,
            threads: None,
            timestamp: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylGroupSummary {
    pub order: usize,
    pub method: WeylMethod,
    pub cyclic: bool,
    pub cross_checked: bool,
    pub generators: Vec<SignedPermutation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub family: Family,
    pub rank: usize,
    pub ambient_dim: usize,
    pub q: u64,
    pub lattice: LatticeKind,
    pub twist_choice: String,
    pub twist: SignedPermutation,
    pub anisotropic: bool,
    /// Basis of the Frobenius-fixed sublattice; empty when anisotropic.
    pub fixed_vectors: Vec<Vec<String>>,
    pub torus_order: String,
    pub invariant_factors: Vec<String>,
    pub rational_weyl_group: WeylGroupSummary,
    pub witness: Vec<i64>,
    pub general_position: bool,
    pub failing_element: Option<SignedPermutation>,
    pub oracle_checked: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedded_witness_check: Option<bool>,
    pub failures: Vec<String>,
    pub verdict: Verdict,
    pub tool_version: String,
    pub timestamp: String,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Everything about a case that does not depend on `q`.
#[derive(Clone, Debug)]
pub struct PreparedCase {
    pub spec: FamilySpec,
    pub choice: TwistChoice,
    pub w: SignedPermutation,
    pub witness: Vec<i64>,
    pub group: RationalWeylAction,
    /// For even unitary cases: the `U_m` sub-case whose witness embeds.
    embedded: Option<Box<PreparedCase>>,
}

pub fn prepare_case(family: Family, rank: usize, opts: &CertifyOptions) -> Result<PreparedCase> {
    let spec = build_family(family, rank)?;
    let w = twist_element(&spec, opts.twist, opts.group_threshold)?;
    let witness = paper_witness(family, rank)?.witness_vector;
    let group = rational_weyl_group_for(&spec, &w, opts.group_threshold)?;
    let n = spec.ambient_dim;
    let embedded = if family == Family::TwoA && n % 2 == 0 && opts.twist == TwistChoice::Paper {
        let sub_opts = CertifyOptions {
            oracle: false,
            ..opts.clone()
        };
        Some(Box::new(prepare_case(Family::TwoA, rank - 1, &sub_opts)?))
    } else {
        None
    };
    Ok(PreparedCase {
        spec,
        choice: opts.twist,
        w,
        witness,
        group,
        embedded,
    })
}

fn timestamp(opts: &CertifyOptions) -> String {
    opts.timestamp
        .clone()
        .unwrap_or_else(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

fn strings(v: &[BigInt]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

/// Runs one `q` against a prepared case.
pub fn certify_prepared(case: &PreparedCase, q: u64, opts: &CertifyOptions) -> Result<Certificate> {
    let torus = twist(&case.spec, &case.w, q)?;
    let mut failures = Vec::new();

    let anisotropic = torus.is_anisotropic();
    let fixed_vectors = if anisotropic {
        Vec::new()
    } else {
        failures.push("torus is not anisotropic".to_string());
        torus
            .fixed_sublattice()
            .iter()
            .map(|v| strings(v))
            .collect()
    };

    let v = big_vec(&case.witness);
    let verdict = is_general_position(&torus, &case.group, &v)?;
    if let Some(s) = &verdict.failing_element {
        failures.push(format!("witness is fixed by {s}"));
    }

    let order = torus.torus_order();
    let mut oracle_checked = false;
    if opts.oracle && order.to_u128().is_some_and(|o| o <= opts.oracle_threshold) {
        let oracle = QuotientOracle::new(&torus, &case.group, opts.oracle_threshold)?;
        let check = oracle_verdict(&oracle, &v, &torus.coordinates(&v)?);
        oracle_checked = true;
        if check.in_general_position != verdict.in_general_position
            || check.failing_element != verdict.failing_element
        {
            failures.push("orbit oracle disagrees with lattice membership".to_string());
        }
    }

    let embedded_witness_check = match &case.embedded {
        Some(sub) => {
            let sub_torus = twist(&sub.spec, &sub.w, q)?;
            let sub_verdict = is_general_position(&sub_torus, &sub.group, &big_vec(&sub.witness))?;
            let agree = sub_verdict.in_general_position == verdict.in_general_position;
            if !agree {
                failures.push("embedded U_m witness verdict differs".to_string());
            }
            Some(agree)
        }
        None => None,
    };

    let group = &case.group;
    let pass = anisotropic && verdict.in_general_position && failures.is_empty();
    Ok(Certificate {
        schema: SCHEMA_VERSION.to_string(),
        family: case.spec.family,
        rank: case.spec.rank,
        ambient_dim: case.spec.ambient_dim,
        q,
        lattice: case.spec.lattice_kind,
        twist_choice: case.choice.to_string(),
        twist: case.w.clone(),
        anisotropic,
        fixed_vectors,
        torus_order: order.to_string(),
        invariant_factors: strings(&torus.character_group().nontrivial_factors()),
        rational_weyl_group: WeylGroupSummary {
            order: group.order(),
            method: group.method,
            cyclic: group.is_cyclic(),
            cross_checked: group.cross_checked,
            generators: group.generators(),
        },
        witness: case.witness.clone(),
        general_position: verdict.in_general_position,
        failing_element: verdict.failing_element,
        oracle_checked,
        embedded_witness_check,
        failures,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        tool_version: crate::TOOL_VERSION.to_string(),
        timestamp: timestamp(opts),
    })
}

pub fn certify_case_with(
    family: Family,
    rank: usize,
    q: u64,
    opts: &CertifyOptions,
) -> Result<Certificate> {
    check_prime_power(q)?;
    certify_prepared(&prepare_case(family, rank, opts)?, q, opts)
}

/// Certifies the witness-table case with default options.
pub fn certify_case(family: Family, rank: usize, q: u64) -> Result<Certificate> {
    certify_case_with(family, rank, q, &CertifyOptions::default())
}

/// One certificate per valid `(family, rank, q)`, ordered by family, rank,
/// then `q`. Ranks below a family's minimum are skipped.
pub fn certify_range(
    families: &[Family],
    ranks: &[usize],
    qs: &[u64],
    opts: &CertifyOptions,
) -> Result<Vec<Certificate>> {
    for &q in qs {
        check_prime_power(q)?;
    }
    let mut families = families.to_vec();
    families.sort();
    families.dedup();
    let mut ranks = ranks.to_vec();
    ranks.sort();
    ranks.dedup();
    let mut qs = qs.to_vec();
    qs.sort();
    qs.dedup();

    let groups: Vec<(Family, usize)> = families
        .iter()
        .flat_map(|&f| {
            ranks
                .iter()
                .filter(move |&&r| r >= f.min_rank())
                .map(move |&r| (f, r))
        })
        .collect();

    let run = || -> Result<Vec<Certificate>> {
        let nested = groups
            .par_iter()
            .map(|&(family, rank)| {
                let case = prepare_case(family, rank, opts)?;
                qs.par_iter()
                    .map(|&q| certify_prepared(&case, q, opts))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(nested.into_iter().flatten().collect())
    };

    match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Inconsistent(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

/// One closed-form coordinate against the exact lattice solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonIntegralityReport {
    pub family: Family,
    pub rank: usize,
    pub q: u64,
    pub r: usize,
    /// Right-hand side `g^r v - v`.
    pub target: Vec<BigInt>,
    /// 0-based coordinate the closed form solves for.
    pub coordinate: usize,
    pub closed_form: BigRational,
    pub lattice_solvable: bool,
}

impl NonIntegralityReport {
    pub fn closed_form_integral(&self) -> bool {
        self.closed_form.is_integer()
    }

    /// The closed form and the lattice solve reach the same conclusion.
    pub fn agrees(&self) -> bool {
        self.closed_form_integral() == self.lattice_solvable
    }
}

/// The cyclic generator whose powers the witness is tested against, and the
/// coordinate the closed form tracks.
pub fn nonintegrality_element(family: Family, rank: usize) -> Result<(SignedPermutation, usize)> {
    let spec = build_family(family, rank)?;
    let w = paper_witness(family, rank)?.twist_element;
    let n = spec.ambient_dim;
    Ok(match family {
        Family::A => (w, n - 1),
        Family::B | Family::C => (w, 0),
        Family::D => (w, n - 2),
        Family::TwoA if n % 2 == 1 => (w, n - 1),
        Family::TwoA => (w, n - 2),
        Family::TwoD => {
            let c = w.compose(&spec.f0);
            (c.compose(&c), n - 1)
        }
    })
}

/// Coordinate `j` of the unique rational solution of `(q c - 1) x = t`.
///
/// On a cycle of `c` of length `L` and sign product `σ`, `(q c)^L = σ q^L`,
/// so `(q c - 1)^{-1} = (σ q^L - 1)^{-1} Σ_{k<L} (q c)^k` there.
pub fn closed_form_coordinate(
    c: &SignedPermutation,
    q: u64,
    t: &[BigInt],
    j: usize,
) -> BigRational {
    let mut len = 0;
    let mut sigma = 1i64;
    let mut i = j;
    loop {
        sigma *= c.signs()[i] as i64;
        i = c.perm()[i];
        len += 1;
        if i == j {
            break;
        }
    }
    let qb = BigInt::from(q);
    let mut numer = BigInt::zero();
    let mut u = t.to_vec();
    let mut qk = BigInt::one();
    for _ in 0..len {
        numer += &qk * &u[j];
        u = c.apply(&u);
        qk *= &qb;
    }
    let denom = BigInt::from(sigma) * qk - 1;
    BigRational::new(numer, denom)
}

pub fn nonintegrality_report(
    family: Family,
    rank: usize,
    q: u64,
    r: usize,
) -> Result<NonIntegralityReport> {
    check_prime_power(q)?;
    let spec = build_family(family, rank)?;
    let (g, coordinate) = nonintegrality_element(family, rank)?;
    let order = g.order();
    if r == 0 || r >= order {
        return Err(Error::OutOfRange(format!("r = {r} must lie in 1..{order}")));
    }
    let witness = paper_witness(family, rank)?;
    let torus = twist(&spec, &witness.twist_element, q)?;
    let v = big_vec(&witness.witness_vector);
    let target: Vec<BigInt> = g
        .pow(r)
        .apply(&v)
        .iter()
        .zip(&v)
        .map(|(a, b)| a - b)
        .collect();
    let closed_form = closed_form_coordinate(&torus.geom_frob, q, &target, coordinate);
    let lattice_solvable =
        crate::intlinalg::solve_in_lattice(&torus.ambient_matrix(), &target, torus.lattice())?
            .is_some();
    Ok(NonIntegralityReport {
        family,
        rank,
        q,
        r,
        target,
        coordinate,
        closed_form,
        lattice_solvable,
    })
}

/// True iff the closed-form coordinate is non-integral and the lattice solve
/// finds no solution.
pub fn nonintegrality_check(family: Family, rank: usize, q: u64, r: usize) -> Result<bool> {
    let report = nonintegrality_report(family, rank, q, r)?;
    Ok(!report.closed_form_integral() && !report.lattice_solvable)
}
