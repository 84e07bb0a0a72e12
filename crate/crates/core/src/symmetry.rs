//! The linear-equivalence action on elementary abelian groups.
//!
//! `GL(r, p)` acts on `Z_p^r` and hence on multisets over it; two multisets
//! are linearly equivalent when some invertible map carries one to the
//! other. The canonical form of a multiset is the lexicographically least
//! multiplicity vector (indexed by element index) over the whole orbit.
//! It is computed by backtracking over images of the basis vectors with
//! prefix pruning rather than by applying all maps, which matters once a
//! search canonicalizes millions of candidates.
//!
//! Translations are deliberately not part of the action: zero-sums are not
//! translation invariant.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use crate::group::{is_prime, GroupSpec};
use crate::multiset::GroupMultiset;
use crate::CoreError;

/// Guard for the order of the acted-on group.
const GL_ORDER_LIMIT: u64 = 4096;

/// Above this group-of-maps size, enumeration is refused and the canonical
/// form falls back to basis-image backtracking.
const GL_ENUM_LIMIT: u64 = 1 << 21;

/// An invertible linear map over `F_p`, acting on `Z_p^r`.
#[derive(Clone, Debug)]
pub struct LinearMap {
    p: u64,
    r: usize,
    /// cols[i] = image of the i-th coordinate basis vector, as coordinates.
    cols: Vec<Vec<u64>>,
    /// Action on element indices.
    perm: Vec<u32>,
}

impl LinearMap {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    /// Matrix column: image of the basis vector of coordinate `i`.
    pub fn column(&self, i: usize) -> &[u64] {
        &self.cols[i]
    }

    pub fn image_index(&self, idx: u64) -> u64 {
        self.perm[idx as usize] as u64
    }

    pub fn determinant_mod_p(&self) -> u64 {
        let p = self.p as i64;
        let mut m: Vec<Vec<i64>> = (0..self.r)
            .map(|row| (0..self.r).map(|col| self.cols[col][row] as i64).collect())
            .collect();
        let mut det: i64 = 1;
        for col in 0..self.r {
            let Some(pr) = (col..self.r).find(|&row| m[row][col] % p != 0) else {
                return 0;
            };
            if pr != col {
                m.swap(pr, col);
                det = -det;
            }
            det = det * m[col][col] % p;
            let inv = mod_inverse(m[col][col].rem_euclid(p) as u64, self.p) as i64;
            for row in col + 1..self.r {
                let factor = m[row][col] % p * inv % p;
                for k in col..self.r {
                    m[row][k] = (m[row][k] - factor * m[col][k]).rem_euclid(p);
                }
            }
        }
        det.rem_euclid(p) as u64
    }

    fn from_images(spec: &GroupSpec, p: u64, r: usize, images: &[u64]) -> LinearMap {
        let order = spec.order() as usize;
        // images[k] is the image of the basis vector with index p^k,
        // i.e. coordinate r-1-k. Build the index permutation digit by digit.
        let mut perm = vec![0u32; order];
        let mut block = 1usize;
        for &img in images.iter().take(r) {
            // multiples of the image vector
            let mut mult = vec![0u64; p as usize];
            for t in 1..p as usize {
                mult[t] = spec.add_indices(mult[t - 1], img);
            }
            for h in 1..p as usize {
                for rem in 0..block {
                    perm[h * block + rem] =
                        spec.add_indices(perm[rem] as u64, mult[h]) as u32;
                }
            }
            block *= p as usize;
        }
        let cols = (0..r)
            .map(|i| {
                // coordinate i corresponds to basis index p^(r-1-i)
                let img = perm[p.pow((r - 1 - i) as u32) as usize] as u64;
                spec.element_from_index(img).unwrap().coords().to_vec()
            })
            .collect();
        LinearMap { p, r, cols, perm }
    }
}

pub fn gl_order(r: usize, p: u64) -> u64 {
    let q = p.pow(r as u32);
    (0..r).map(|i| q - p.pow(i as u32)).product()
}

/// All invertible `r x r` matrices over `F_p`, each exactly once.
pub fn enumerate_gl(r: usize, p: u64) -> Result<Vec<LinearMap>, CoreError> {
    if !is_prime(p) {
        return Err(CoreError::InvalidArgument(format!("{p} is not prime")));
    }
    if r == 0 {
        return Err(CoreError::InvalidArgument("rank 0 group".into()));
    }
    let order = p.checked_pow(r as u32).filter(|&o| o <= GL_ORDER_LIMIT).ok_or(
        CoreError::SizeGuard {
            what: "enumerate_gl",
            limit: GL_ORDER_LIMIT,
            got: u64::MAX,
        },
    )?;
    if gl_order(r, p) > GL_ENUM_LIMIT {
        return Err(CoreError::SizeGuard {
            what: "enumerate_gl (group of maps)",
            limit: GL_ENUM_LIMIT,
            got: gl_order(r, p),
        });
    }
    let spec = GroupSpec::elementary(p, r)?;
    let mut maps = Vec::with_capacity(gl_order(r, p) as usize);
    let mut images = vec![0u64; r];
    let span = vec![false; order as usize];
    enumerate_rec(&spec, p, r, 0, &mut images, &span, &mut maps);
    Ok(maps)
}

fn enumerate_rec(
    spec: &GroupSpec,
    p: u64,
    r: usize,
    level: usize,
    images: &mut Vec<u64>,
    span: &[bool],
    out: &mut Vec<LinearMap>,
) {
    if level == r {
        out.push(LinearMap::from_images(spec, p, r, images));
        return;
    }
    for w in 1..spec.order() {
        if span[w as usize] {
            continue;
        }
        images[level] = w;
        let new_span = extend_span(spec, span, w, p);
        enumerate_rec(spec, p, r, level + 1, images, &new_span, out);
    }
}

/// span + all multiples of w added to existing span elements (0 included).
fn extend_span(spec: &GroupSpec, span: &[bool], w: u64, p: u64) -> Vec<bool> {
    let mut out = span.to_vec();
    out[0] = true;
    let mut kw = 0u64;
    for _ in 1..p {
        kw = spec.add_indices(kw, w);
        for (g, &in_span) in span.iter().enumerate() {
            if in_span || g == 0 {
                out[spec.add_indices(g as u64, kw) as usize] = true;
            }
        }
    }
    out
}

/// Apply the map to every element of the multiset.
pub fn apply_map(m: &LinearMap, a: &GroupMultiset) -> Result<GroupMultiset, CoreError> {
    let spec = a.spec();
    match spec.elementary_abelian() {
        Some((p, r)) if p == m.p && r == m.r => {}
        _ => return Err(CoreError::NotElementary(format!("{spec}"))),
    }
    let mut out = GroupMultiset::empty(spec);
    for (idx, c) in a.support() {
        out.insert_index(m.image_index(idx), c);
    }
    Ok(out)
}

/// The canonical representative of a multiset orbit under the full GL
/// action, together with the size of its stabilizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub representative: GroupMultiset,
    pub stabilizer_size: u64,
}

impl CanonicalForm {
    pub fn orbit_size(&self) -> u64 {
        let (p, r) = self
            .representative
            .spec()
            .elementary_abelian()
            .expect("canonical forms only exist over elementary abelian groups");
        gl_order(r, p) / self.stabilizer_size
    }
}

struct CanonSearch<'a> {
    spec: &'a GroupSpec,
    p: u64,
    r: usize,
    counts: Vec<u32>,
    /// mimg[i] = image of element index i under the map being built.
    mimg: Vec<u64>,
    cand: Vec<u32>,
    best: Option<Vec<u32>>,
    stab: u64,
}

impl CanonSearch<'_> {
    fn run(&mut self) {
        let span = vec![false; self.counts.len()];
        self.rec(1, &span, Ordering::Equal);
    }

    /// level k chooses the image of basis index p^(k-1); `ord` is the
    /// relation of the filled prefix to the current best (never Greater).
    fn rec(&mut self, k: usize, span: &[bool], ord: Ordering) {
        if k > self.r {
            match &mut self.best {
                None => {
                    self.best = Some(self.cand.clone());
                    self.stab = 1;
                }
                Some(best) => match self.cand.cmp(best) {
                    Ordering::Less => {
                        *best = self.cand.clone();
                        self.stab = 1;
                    }
                    Ordering::Equal => self.stab += 1,
                    Ordering::Greater => {}
                },
            }
            return;
        }
        let block = (self.p as usize).pow((k - 1) as u32);
        for w in 1..self.counts.len() as u64 {
            if span[w as usize] {
                continue;
            }
            // fill candidate entries for indices block..block*p
            let mut wmult = w;
            for h in 1..self.p as usize {
                for rem in 0..block {
                    let img = self.spec.add_indices(self.mimg[rem], wmult);
                    self.mimg[h * block + rem] = img;
                    self.cand[h * block + rem] = self.counts[img as usize];
                }
                if h + 1 < self.p as usize {
                    wmult = self.spec.add_indices(wmult, w);
                }
            }
            let mut new_ord = ord;
            if let Some(best) = &self.best {
                if ord == Ordering::Equal {
                    let lo = block;
                    let hi = block * self.p as usize;
                    match self.cand[lo..hi].cmp(&best[lo..hi]) {
                        Ordering::Greater => continue,
                        o => new_ord = o,
                    }
                }
            }
            let new_span = extend_span(self.spec, span, w, self.p);
            self.rec(k + 1, &new_span, new_ord);
        }
    }
}

/// Flat permutation tables for a whole map group, shared and computed once
/// per (p, r).
struct PermTables {
    order: usize,
    /// maps * order entries; perms[m * order + i] = image of index i.
    perms: Vec<u16>,
}

fn perm_tables(p: u64, r: usize) -> Result<&'static PermTables, CoreError> {
    static CACHE: OnceLock<Mutex<BTreeMap<(u64, usize), &'static PermTables>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(t) = guard.get(&(p, r)) {
        return Ok(t);
    }
    let maps = enumerate_gl(r, p)?;
    let order = p.pow(r as u32) as usize;
    let mut perms = Vec::with_capacity(maps.len() * order);
    for m in &maps {
        for i in 0..order {
            perms.push(m.image_index(i as u64) as u16);
        }
    }
    let leaked: &'static PermTables = Box::leak(Box::new(PermTables { order, perms }));
    guard.insert((p, r), leaked);
    Ok(leaked)
}

/// Lexicographically least multiplicity vector over the GL orbit.
pub fn canonical_form(a: &GroupMultiset) -> Result<CanonicalForm, CoreError> {
    let spec = a.spec();
    let (p, r) = spec
        .elementary_abelian()
        .ok_or_else(|| CoreError::NotElementary(format!("{spec}")))?;
    if spec.order() > GL_ORDER_LIMIT {
        return Err(CoreError::SizeGuard {
            what: "canonical_form",
            limit: GL_ORDER_LIMIT,
            got: spec.order(),
        });
    }
    let counts = a.dense_counts();
    let order = counts.len();

    let (best, stab) = if gl_order(r, p) <= GL_ENUM_LIMIT {
        canonical_by_scan(&counts, perm_tables(p, r)?)
    } else {
        canonical_by_backtracking(spec, p, r, counts.clone(), order)
    };
    let mut rep = GroupMultiset::empty(spec);
    for (i, &c) in best.iter().enumerate() {
        rep.insert_index(i as u64, c);
    }
    Ok(CanonicalForm {
        representative: rep,
        stabilizer_size: stab,
    })
}

/// Scan every permutation with an early-exit comparison against the best
/// image so far. On sparse multisets most maps die within a few cells.
fn canonical_by_scan(counts: &[u32], tables: &PermTables) -> (Vec<u32>, u64) {
    let order = tables.order;
    let mut best: Vec<u32> = counts.to_vec();
    let mut have_best = false;
    let mut stab = 0u64;
    for perm in tables.perms.chunks_exact(order) {
        if !have_best {
            for (i, &pi) in perm.iter().enumerate() {
                best[i] = counts[pi as usize];
            }
            have_best = true;
            stab = 1;
            continue;
        }
        let mut verdict = Ordering::Equal;
        let mut at = 0;
        for (i, &pi) in perm.iter().enumerate() {
            let v = counts[pi as usize];
            match v.cmp(&best[i]) {
                Ordering::Equal => {}
                other => {
                    verdict = other;
                    at = i;
                    break;
                }
            }
        }
        match verdict {
            Ordering::Greater => {}
            Ordering::Equal => stab += 1,
            Ordering::Less => {
                for (i, &pi) in perm.iter().enumerate().skip(at) {
                    best[i] = counts[pi as usize];
                }
                stab = 1;
            }
        }
    }
    (best, stab)
}

fn canonical_by_backtracking(
    spec: &GroupSpec,
    p: u64,
    r: usize,
    counts: Vec<u32>,
    order: usize,
) -> (Vec<u32>, u64) {
    let mut cand = vec![0u32; order];
    cand[0] = counts[0]; // the origin is fixed by every linear map
    let mut search = CanonSearch {
        spec,
        p,
        r,
        counts,
        mimg: vec![0u64; order],
        cand,
        best: None,
        stab: 0,
    };
    search.run();
    (search.best.expect("GL(r,p) is never empty"), search.stab)
}

/// One canonical form per orbit seen in the stream, with the number of
/// stream items that landed in it. Ordered by representative.
pub struct OrbitBucket {
    pub form: CanonicalForm,
    pub hits: u64,
}

pub fn orbit_dedupe<I>(sets: I) -> Result<Vec<OrbitBucket>, CoreError>
where
    I: IntoIterator<Item = GroupMultiset>,
{
    let mut buckets: BTreeMap<Vec<u32>, OrbitBucket> = BTreeMap::new();
    for a in sets {
        let form = canonical_form(&a)?;
        let key = form.representative.dense_counts();
        buckets
            .entry(key)
            .and_modify(|b| b.hits += 1)
            .or_insert(OrbitBucket { form, hits: 1 });
    }
    Ok(buckets.into_values().collect())
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p is prime and a != 0 mod p
    let mut result = 1u64;
    let mut base = a % p;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}
