//! Infeasibility of zero-sum label systems over `Z_3^3`.
//!
//! The target statement: no 10-element multiset A without two disjoint
//! zero-sum sub-multisets admits a labeling `f: supp(A) -> Z_n`, n coprime
//! to 6, with `sum_{b in B} f(b) = 1` for every zero-sum sub-multiset B and
//! `3 f(a) = 1` for some element a. The verifier enumerates every candidate
//! A, builds the integer constraint system row by row from the zero-sum
//! subsets, and certifies modular infeasibility for every anchor choice via
//! Smith normal form. Obstruction primes are retained per candidate so each
//! verdict is auditable: infeasibility holds because every prime that could
//! admit a solution lies in {2, 3}.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::One;

use zslab_core::engine::{self, PackingEngine};
use zslab_core::intlinalg::{rank_mod_p, solvable_coprime_to, IntMatrix};
use zslab_core::multiset::GroupMultiset;
use zslab_core::symmetry::{enumerate_gl, orbit_dedupe, CanonicalForm};
use zslab_core::GroupSpec;

use crate::levels::{enumerate_structure_free, SearchBudget, Structure};
use crate::SearchError;

/// Candidate enumeration modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AfFilter {
    /// Exactly three doubled elements forming a basis, fixed to the
    /// standard basis; reproduces the 84 -> 41 -> 16 reduction.
    PaperCaseViii,
    /// Every 10-element multiset without two disjoint zero-sums, up to
    /// linear equivalence, with no structural assumption.
    Full,
}

/// A 10-element multiset plus its full list of zero-sum sub-multisets.
#[derive(Clone, Debug)]
pub struct AfCandidate {
    pub multiset: GroupMultiset,
    pub zerosum_subsets: Vec<GroupMultiset>,
}

impl AfCandidate {
    pub fn new(multiset: GroupMultiset) -> Result<Self, SearchError> {
        let zerosum_subsets = engine::all_zerosum_subsets(&multiset)?;
        Ok(AfCandidate { multiset, zerosum_subsets })
    }
}

/// The linear system for one candidate and one anchor: one row per
/// zero-sum sub-multiset (entries are occurrence counts, right-hand side
/// 1), plus the anchor row `3 f(a) = 1`. Variables are the support
/// elements; repeated occurrences share one label.
#[derive(Clone, Debug)]
pub struct AfSystem {
    /// Support element indices, one variable each.
    pub variables: Vec<u64>,
    pub matrix: IntMatrix,
    pub rhs: Vec<BigInt>,
    pub anchor: u64,
}

pub fn build_system(cand: &AfCandidate, anchor: u64) -> Result<AfSystem, SearchError> {
    let variables: Vec<u64> = cand.multiset.support().iter().map(|&(i, _)| i).collect();
    let Some(anchor_col) = variables.iter().position(|&v| v == anchor) else {
        return Err(SearchError::Internal(format!(
            "anchor index {anchor} is not in the candidate support"
        )));
    };
    let rows = cand.zerosum_subsets.len() + 1;
    let mut entries = Vec::with_capacity(rows * variables.len());
    for b in &cand.zerosum_subsets {
        for &v in &variables {
            entries.push(BigInt::from(b.count_index(v)));
        }
    }
    let mut anchor_row = vec![BigInt::from(0); variables.len()];
    anchor_row[anchor_col] = BigInt::from(3);
    entries.extend(anchor_row);
    let matrix = IntMatrix::new(rows, variables.len(), entries)?;
    let rhs = vec![BigInt::one(); rows];
    Ok(AfSystem { variables, matrix, rhs, anchor })
}

/// The case-enumeration with the doubled standard basis: all 10-element
/// multisets `{e1, e1, e2, e2, e3, e3} + 4 distinct singles` with no
/// zero-sum of length <= 3 and none of length >= 8.
#[derive(Clone, Debug)]
pub struct CaseViiiEnumeration {
    /// The raw basis-fixed configurations, in lexicographic order.
    pub configs: Vec<GroupMultiset>,
    /// Configurations containing (0,1,1): the rotation-prescribed reading.
    pub containing_011: usize,
    /// Orbit count under the coordinate 3-cycle: the subgroup reading.
    pub c3_orbit_count: usize,
    /// Orbit count under all six basis permutations.
    pub s3_orbit_count: usize,
    /// Full linear-equivalence orbits.
    pub orbits: Vec<CanonicalForm>,
}

pub fn enumerate_case_viii() -> Result<CaseViiiEnumeration, SearchError> {
    let spec = GroupSpec::z3_cube();
    let basis: [u64; 3] = [
        spec.element(&[0, 0, 1])?.index(),
        spec.element(&[0, 1, 0])?.index(),
        spec.element(&[1, 0, 0])?.index(),
    ];
    let pool: Vec<u64> = (1..spec.order()).filter(|i| !basis.contains(i)).collect();
    let mut configs = Vec::new();
    for a in 0..pool.len() {
        for b in a + 1..pool.len() {
            for c in b + 1..pool.len() {
                for d in c + 1..pool.len() {
                    let mut items: Vec<(u64, u32)> = basis.iter().map(|&i| (i, 2)).collect();
                    items.extend([pool[a], pool[b], pool[c], pool[d]].map(|i| (i, 1)));
                    let cand = GroupMultiset::from_index_counts(&spec, &items)?;
                    if engine::has_zerosum_leq(&cand, 3)? {
                        continue;
                    }
                    if engine::max_zerosum_length(&cand)?.is_some_and(|l| l >= 8) {
                        continue;
                    }
                    configs.push(cand);
                }
            }
        }
    }

    let e011 = spec.element(&[0, 1, 1])?.index();
    let containing_011 = configs.iter().filter(|c| c.count_index(e011) > 0).count();

    // basis-permuting maps: the coordinate 3-cycle subgroup and all six
    // permutation matrices
    let maps = enumerate_gl(3, 3)?;
    let perm_maps: Vec<&zslab_core::symmetry::LinearMap> = maps
        .iter()
        .filter(|m| {
            let images: BTreeSet<u64> = basis.iter().map(|&b| m.image_index(b)).collect();
            images == basis.iter().copied().collect()
        })
        .collect();
    assert_eq!(perm_maps.len(), 6);
    let cycle_maps: Vec<&zslab_core::symmetry::LinearMap> = perm_maps
        .iter()
        .copied()
        .filter(|m| {
            // identity or a 3-cycle: no basis vector fixed, or all fixed
            let fixed = basis.iter().filter(|&&b| m.image_index(b) == b).count();
            fixed == 3 || fixed == 0
        })
        .collect();
    assert_eq!(cycle_maps.len(), 3);

    let c3_orbit_count = count_orbits_under(&configs, &cycle_maps)?;
    let s3_orbit_count = count_orbits_under(&configs, &perm_maps)?;
    let orbits = orbit_dedupe(configs.iter().cloned())?
        .into_iter()
        .map(|b| b.form)
        .collect();
    Ok(CaseViiiEnumeration {
        configs,
        containing_011,
        c3_orbit_count,
        s3_orbit_count,
        orbits,
    })
}

fn count_orbits_under(
    configs: &[GroupMultiset],
    maps: &[&zslab_core::symmetry::LinearMap],
) -> Result<usize, SearchError> {
    let mut reps: BTreeSet<Vec<u8>> = BTreeSet::new();
    for c in configs {
        let mut least: Option<Vec<u8>> = None;
        for m in maps {
            let key = zslab_core::symmetry::apply_map(m, c)?.canonical_bytes();
            if least.as_ref().is_none_or(|l| key < *l) {
                least = Some(key);
            }
        }
        reps.insert(least.unwrap());
    }
    Ok(reps.len())
}

/// All 10-element multisets without two disjoint zero-sums, up to linear
/// equivalence. The short/long zero-sum conditions follow from the packing
/// bound at this size and are asserted rather than filtered.
pub fn enumerate_full_candidates(budget: &SearchBudget) -> Result<Vec<CanonicalForm>, SearchError> {
    let spec = GroupSpec::z3_cube();
    let out = enumerate_structure_free(&spec, &Structure::KDisjoint { k: 2 }, false, Some(10), budget)?;
    let forms = out.levels.get(10).cloned().unwrap_or_default();
    for f in &forms {
        debug_assert!(!engine::has_zerosum_leq(&f.representative, 3)?);
        debug_assert!(engine::max_zerosum_length(&f.representative)?.is_none_or(|l| l < 8));
    }
    Ok(forms)
}

/// Per-anchor infeasibility certificate.
#[derive(Clone, Debug)]
pub struct AnchorVerdict {
    pub anchor: u64,
    /// The only primes a feasible modulus could contain.
    pub candidate_primes: Vec<u64>,
    pub feasible: bool,
    pub witness_prime: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct CandidateReport {
    pub multiset: GroupMultiset,
    pub zerosum_count: usize,
    pub verdicts: Vec<AnchorVerdict>,
    /// Union of candidate primes across anchors.
    pub obstruction_primes: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub multiset: GroupMultiset,
    pub anchor: u64,
    pub prime: u64,
}

#[derive(Clone, Debug)]
pub struct AfReport {
    pub filter: AfFilter,
    pub candidate_count: usize,
    /// (raw, rotation-prescribed, orbits) for the case-viii filter.
    pub case_counts: Option<(usize, usize, usize)>,
    pub candidates: Vec<CandidateReport>,
    pub violations: Vec<Violation>,
    pub wall_ms: u128,
}

impl AfReport {
    pub fn verified(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verify the labeling theorem for every candidate under the chosen filter:
/// for each candidate and each anchor, the system must be infeasible for
/// every modulus coprime to 6. A feasible case is a theorem violation and
/// is reported with its witness prime.
pub fn verify_af_theorem(filter: AfFilter, budget: &SearchBudget) -> Result<AfReport, SearchError> {
    let started = Instant::now();
    let (multisets, case_counts) = match filter {
        AfFilter::PaperCaseViii => {
            let e = enumerate_case_viii()?;
            let counts = (e.configs.len(), e.containing_011, e.orbits.len());
            (e.configs, Some(counts))
        }
        AfFilter::Full => {
            let forms = enumerate_full_candidates(budget)?;
            (forms.into_iter().map(|f| f.representative).collect(), None)
        }
    };
    let mut candidates = Vec::new();
    let mut violations = Vec::new();
    for multiset in multisets {
        let cand = AfCandidate::new(multiset)?;
        let mut verdicts = Vec::new();
        let mut obstruction: BTreeSet<u64> = BTreeSet::new();
        for &(anchor, _) in &cand.multiset.support() {
            let system = build_system(&cand, anchor)?;
            let verdict = solvable_coprime_to(&system.matrix, &system.rhs, &[2, 3])?;
            let witness_prime = verdict.feasible_primes.first().copied();
            let feasible = verdict.feasible();
            if feasible {
                violations.push(Violation {
                    multiset: cand.multiset.clone(),
                    anchor,
                    prime: witness_prime.unwrap_or(0),
                });
            }
            obstruction.extend(verdict.candidate_primes.iter().copied());
            verdicts.push(AnchorVerdict {
                anchor,
                candidate_primes: verdict.candidate_primes,
                feasible,
                witness_prime,
            });
        }
        candidates.push(CandidateReport {
            zerosum_count: cand.zerosum_subsets.len(),
            multiset: cand.multiset,
            verdicts,
            obstruction_primes: obstruction.into_iter().collect(),
        });
    }
    Ok(AfReport {
        filter,
        candidate_count: candidates.len(),
        case_counts,
        candidates,
        violations,
        wall_ms: started.elapsed().as_millis(),
    })
}

/// Direct search for a labeling mod p: assigns the support variables one by
/// one and checks each constraint row as soon as its variables are all
/// known. Independent of the Smith-normal-form route.
pub fn solvable_mod_p_bruteforce(system: &AfSystem, p: u64) -> bool {
    let vars = system.variables.len();
    let rows = system.matrix.rows();
    // row -> last variable with nonzero coefficient
    let mut due_at: Vec<Vec<usize>> = vec![Vec::new(); vars];
    for r in 0..rows {
        let last = (0..vars)
            .rev()
            .find(|&c| system.matrix.get(r, c).sign() != num_bigint::Sign::NoSign);
        match last {
            Some(c) => due_at[c].push(r),
            None => {
                // empty row: 0 = 1 is unsatisfiable mod every p > 1
                return false;
            }
        }
    }
    let coeff = |r: usize, c: usize| -> u64 {
        let b: BigInt = system.matrix.get(r, c) % BigInt::from(p);
        let v: i64 = b.try_into().unwrap();
        v.rem_euclid(p as i64) as u64
    };
    let rhs_mod: Vec<u64> = system
        .rhs
        .iter()
        .map(|b| {
            let v: i64 = (b % BigInt::from(p)).try_into().unwrap();
            v.rem_euclid(p as i64) as u64
        })
        .collect();
    fn dfs(
        var: usize,
        vars: usize,
        p: u64,
        assignment: &mut Vec<u64>,
        due_at: &[Vec<usize>],
        coeff: &dyn Fn(usize, usize) -> u64,
        rhs_mod: &[u64],
    ) -> bool {
        if var == vars {
            return true;
        }
        for value in 0..p {
            assignment.push(value);
            let ok = due_at[var].iter().all(|&r| {
                let mut acc = 0u64;
                for (c, &v) in assignment.iter().enumerate() {
                    acc = (acc + coeff(r, c) * v) % p;
                }
                acc == rhs_mod[r]
            });
            if ok && dfs(var + 1, vars, p, assignment, due_at, coeff, rhs_mod) {
                return true;
            }
            assignment.pop();
        }
        false
    }
    let mut assignment = Vec::with_capacity(vars);
    dfs(0, vars, p, &mut assignment, &due_at, &coeff, &rhs_mod)
}

/// The two coefficient tables behind the doubled-diagonal case analysis,
/// recomputed from the canonical-lift definition, plus the three derived
/// 6x3 coefficient matrices and their ranks.
#[derive(Clone, Debug)]
pub struct BracketReport {
    /// (1 - [-a] + [-1-a]) / 3 for a in {0, 1, 2}.
    pub table_one: [i64; 3],
    /// (2 - [-a] + [-2-a]) / 3 for a in {0, 1, 2}.
    pub table_two: [i64; 3],
    /// (2 + [-a] - [-1-a]) / 3 for a in {0, 1, 2}.
    pub table_three: [i64; 3],
    pub matrices: Vec<IntMatrix>,
    pub matrices_match_reference: bool,
    pub all_ranks_three: bool,
}

/// Canonical lift of a residue to {0, 1, 2}.
fn lift(a: i64) -> i64 {
    a.rem_euclid(3)
}

/// The doubled-diagonal configurations: (0,0,1), (0,1,0), (1,0,0), (1,1,1)
/// doubled, plus the two single elements per case.
const DIAGONAL_CASE_SINGLES: [[[u64; 3]; 2]; 3] = [
    [[0, 2, 1], [2, 1, 0]],
    [[1, 2, 1], [1, 1, 0]],
    [[1, 0, 1], [1, 1, 0]],
];

/// Expected coefficient matrices for the three cases, row major.
const DIAGONAL_CASE_MATRICES: [[i64; 18]; 3] = [
    [1, 0, 0, 1, 1, 0, 0, 0, 1, 1, 0, 1, 0, 1, 0, 1, 1, 0],
    [0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 1, 0, 1, 1, 0],
    [0, 0, 1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0],
];

pub fn bracket_coefficient_tables() -> Result<BracketReport, SearchError> {
    let t1 = |a: i64| (1 - lift(-a) + lift(-1 - a)) / 3;
    let t2 = |a: i64| (2 - lift(-a) + lift(-2 - a)) / 3;
    let t3 = |a: i64| (2 + lift(-a) - lift(-1 - a)) / 3;
    for a in 0..3 {
        // integrality of the raw numerators
        assert_eq!((1 - lift(-a) + lift(-1 - a)) % 3, 0);
        assert_eq!((2 - lift(-a) + lift(-2 - a)) % 3, 0);
        assert_eq!((2 + lift(-a) - lift(-1 - a)) % 3, 0);
    }
    let table_one = [t1(0), t1(1), t1(2)];
    let table_two = [t2(0), t2(1), t2(2)];
    let table_three = [t3(0), t3(1), t3(2)];

    // rebuild the per-case matrices: two rows per constrained point, the
    // points being the two singles and their sum; columns are the labels of
    // (1,0,0), (0,1,0), (0,0,1) in that order
    let mut matrices = Vec::new();
    let mut matrices_match = true;
    let mut ranks_ok = true;
    for (case, singles) in DIAGONAL_CASE_SINGLES.iter().enumerate() {
        let u = singles[0].map(|c| c as i64);
        let v = singles[1].map(|c| c as i64);
        let sum = [(u[0] + v[0]) % 3, (u[1] + v[1]) % 3, (u[2] + v[2]) % 3];
        let mut rows: Vec<[i64; 3]> = Vec::new();
        for point in [u, v, sum] {
            rows.push([t1(point[0]), t1(point[1]), t1(point[2])]);
            rows.push([t2(point[0]), t2(point[1]), t2(point[2])]);
        }
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        let matrix = IntMatrix::from_i64(6, 3, &flat)?;

        let mut got: Vec<[i64; 3]> = rows.clone();
        got.sort();
        let mut want: Vec<[i64; 3]> = DIAGONAL_CASE_MATRICES[case]
            .chunks(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect();
        want.sort();
        if got != want {
            matrices_match = false;
        }
        for p in [5u64, 7, 11, 13] {
            if rank_mod_p(&matrix, p)? != 3 {
                ranks_ok = false;
            }
        }
        matrices.push(matrix);
    }
    Ok(BracketReport {
        table_one,
        table_two,
        table_three,
        matrices,
        matrices_match_reference: matrices_match,
        all_ranks_three: ranks_ok,
    })
}

/// The doubled-diagonal configurations as full candidate multisets.
pub fn diagonal_case_configs() -> Result<Vec<GroupMultiset>, SearchError> {
    let spec = GroupSpec::z3_cube();
    let mut out = Vec::new();
    for singles in &DIAGONAL_CASE_SINGLES {
        let mut items: Vec<(&[u64], u32)> = vec![
            (&[0, 0, 1][..], 2),
            (&[0, 1, 0][..], 2),
            (&[1, 0, 0][..], 2),
            (&[1, 1, 1][..], 2),
        ];
        items.push((&singles[0][..], 1));
        items.push((&singles[1][..], 1));
        out.push(GroupMultiset::from_coords(&spec, &items)?);
    }
    Ok(out)
}

/// Orbit invariance helper for tests: the verdict for a candidate must not
/// depend on the representative.
pub fn candidate_verdict_infeasible(a: &GroupMultiset) -> Result<bool, SearchError> {
    let cand = AfCandidate::new(a.clone())?;
    for &(anchor, _) in &cand.multiset.support() {
        let system = build_system(&cand, anchor)?;
        if solvable_coprime_to(&system.matrix, &system.rhs, &[2, 3])?.feasible() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True when the multiset has no two disjoint zero-sum sub-multisets.
pub fn packing_at_most_one(a: &GroupMultiset) -> Result<bool, SearchError> {
    let mut eng = PackingEngine::new(a.spec(), 2)?;
    Ok(!eng.has_k_disjoint(a, 2)?)
}
