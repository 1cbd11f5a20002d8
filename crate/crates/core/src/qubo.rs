//! Sparse upper-triangular QUBO with integer coefficients.
//!
//! Energies are `offset + Σ c_ij · x_i · x_j` over the stored `(i, j)`,
//! `i <= j`. Diagonal entries are the linear part since `x² = x` for binary
//! variables. All arithmetic is `i64`; construction is overflow-checked and
//! [`QuboIndex`] proves once that no evaluation can overflow.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Binary assignment, serialized as a list of `0`/`1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn zeros(len: usize) -> Self {
        Assignment(vec![false; len])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Assignment(bits)
    }

    /// Bits `0..len` taken from the low bits of `mask`, variable `k` ↦ bit `k`.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        Assignment((0..len).map(|k| (mask >> k) & 1 == 1).collect())
    }

    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut a = Self::zeros(len);
        for k in ones {
            a.0[k] = true;
        }
        a
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, k: usize) -> bool {
        self.0[k]
    }

    pub fn set(&mut self, k: usize, value: bool) {
        self.0[k] = value;
    }

    pub fn flip(&mut self, k: usize) {
        self.0[k] = !self.0[k];
    }

    /// Indices of the bits set to one, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k)
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|&b| b as u8))
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<u8>::deserialize(d)?;
        raw.into_iter()
            .map(|b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(D::Error::custom(format!("bit value {other} is not 0 or 1"))),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Assignment)
    }
}

/// `constant + Σ coeff_k · x_k`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearExpr {
    pub constant: i64,
    coeffs: BTreeMap<usize, i64>,
}

impl LinearExpr {
    pub fn constant(constant: i64) -> Self {
        LinearExpr { constant, coeffs: BTreeMap::new() }
    }

    /// Adds `coeff · x_var`, merging with an existing term on `var`.
    pub fn add_term(&mut self, var: usize, coeff: i64) -> &mut Self {
        let entry = self.coeffs.entry(var).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(&var);
        }
        self
    }

    pub fn term(mut self, var: usize, coeff: i64) -> Self {
        self.add_term(var, coeff);
        self
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn evaluate(&self, bits: &[bool]) -> i64 {
        self.constant + self.coeffs.iter().filter(|(&k, _)| bits[k]).map(|(_, &c)| c).sum::<i64>()
    }
}

#[derive(Debug, Default)]
pub struct Qubo {
    num_vars: usize,
    terms: BTreeMap<(usize, usize), i64>,
    offset: i64,
    index: OnceLock<QuboIndex>,
}

impl Clone for Qubo {
    fn clone(&self) -> Self {
        Qubo {
            num_vars: self.num_vars,
            terms: self.terms.clone(),
            offset: self.offset,
            index: OnceLock::new(),
        }
    }
}

impl PartialEq for Qubo {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars && self.offset == other.offset && self.terms == other.terms
    }
}

impl Eq for Qubo {}

fn checked(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow("accumulating a QUBO coefficient"))
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow("expanding a squared penalty"))
}

impl Qubo {
    pub fn new(num_vars: usize) -> Self {
        Qubo { num_vars, ..Default::default() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Stored terms in `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.terms.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub fn coefficient(&self, i: usize, j: usize) -> i64 {
        self.terms.get(&(i.min(j), i.max(j))).copied().unwrap_or(0)
    }

    fn check_var(&self, k: usize) -> Result<()> {
        if k < self.num_vars {
            Ok(())
        } else {
            Err(Error::VariableOutOfRange { index: k, num_vars: self.num_vars })
        }
    }

    pub fn add_offset(&mut self, value: i64) -> Result<()> {
        self.offset = checked(self.offset, value)?;
        Ok(())
    }

    /// Adds `weight · x_i · x_j`; `i == j` lands on the diagonal.
    pub fn add_product(&mut self, i: usize, j: usize, weight: i64) -> Result<()> {
        self.check_var(i)?;
        self.check_var(j)?;
        self.index.take();
        let key = (i.min(j), i.max(j));
        let current = self.terms.get(&key).copied().unwrap_or(0);
        let next = checked(current, weight)?;
        if next == 0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, next);
        }
        Ok(())
    }

    pub fn add_linear(&mut self, k: usize, weight: i64) -> Result<()> {
        self.add_product(k, k, weight)
    }

    /// Adds `weight · e²`, expanded with `x_k² = x_k`.
    pub fn add_square(&mut self, e: &LinearExpr, weight: i64) -> Result<()> {
        let coeffs: Vec<(usize, i64)> = e.coeffs().collect();
        for &(k, _) in &coeffs {
            self.check_var(k)?;
        }
        let c = e.constant;
        self.add_offset(mul(weight, mul(c, c)?)?)?;
        for (pos, &(k, a)) in coeffs.iter().enumerate() {
            let diag = checked(mul(a, a)?, mul(2, mul(c, a)?)?)?;
            self.add_product(k, k, mul(weight, diag)?)?;
            for &(l, b) in &coeffs[pos + 1..] {
                self.add_product(k, l, mul(weight, mul(2, mul(a, b)?)?)?)?;
            }
        }
        Ok(())
    }

    fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.len() == self.num_vars {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: self.num_vars, found: a.len() })
        }
    }

    /// Exact energy of `a`, constant included.
    pub fn energy(&self, a: &Assignment) -> Result<i64> {
        self.check_assignment(a)?;
        let bits = a.bits();
        self.terms
            .iter()
            .filter(|(&(i, j), _)| bits[i] && bits[j])
            .try_fold(self.offset, |acc, (_, &c)| checked(acc, c))
    }

    /// Per-variable adjacency, built on first use and cached until the next
    /// mutation.
    pub fn index(&self) -> Result<&QuboIndex> {
        if let Some(idx) = self.index.get() {
            return Ok(idx);
        }
        let built = QuboIndex::build(self)?;
        Ok(self.index.get_or_init(|| built))
    }

    /// `energy(a with bit k flipped) − energy(a)`.
    pub fn flip_delta(&self, a: &Assignment, k: usize) -> Result<i64> {
        self.check_assignment(a)?;
        self.check_var(k)?;
        Ok(self.index()?.flip_delta(a.bits(), k))
    }

    pub fn to_file(&self) -> QuboFile {
        QuboFile {
            num_vars: self.num_vars,
            offset: self.offset,
            terms: self.terms().collect(),
            meta: None,
        }
    }

    /// Compact JSON interchange with an optional `meta` object.
    pub fn to_json(&self, meta: Option<serde_json::Value>) -> String {
        let mut file = self.to_file();
        file.meta = meta;
        serde_json::to_string(&file).expect("QUBO serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<(Qubo, Option<serde_json::Value>)> {
        let file: QuboFile = serde_json::from_str(text)?;
        let meta = file.meta.clone();
        Ok((Qubo::try_from(file)?, meta))
    }
}

/// On-disk form: `{"num_vars", "offset", "terms": [[i, j, c], …], "meta"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuboFile {
    pub num_vars: usize,
    pub offset: i64,
    pub terms: Vec<(usize, usize, i64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

impl TryFrom<QuboFile> for Qubo {
    type Error = Error;

    fn try_from(file: QuboFile) -> Result<Qubo> {
        let mut q = Qubo::new(file.num_vars);
        q.offset = file.offset;
        for (i, j, c) in file.terms {
            if i > j {
                return Err(Error::Malformed(format!("term ({i},{j}) is not upper-triangular")));
            }
            q.check_var(j)?;
            if c == 0 {
                continue;
            }
            if q.terms.insert((i, j), c).is_some() {
                return Err(Error::Malformed(format!("duplicate term ({i},{j})")));
            }
        }
        Ok(q)
    }
}

/// Compressed per-variable view of a [`Qubo`] for single-flip moves.
///
/// Building it verifies `|offset| + Σ|c|` fits comfortably in `i64`, so the
/// unchecked arithmetic in the hot loops cannot overflow.
#[derive(Debug, Clone)]
pub struct QuboIndex {
    linear: Vec<i64>,
    starts: Vec<usize>,
    neighbors: Vec<(usize, i64)>,
}

impl QuboIndex {
    fn build(q: &Qubo) -> Result<Self> {
        let mut bound = q.offset.unsigned_abs() as u128;
        let mut linear = vec![0i64; q.num_vars];
        let mut degree = vec![0usize; q.num_vars];
        for (&(i, j), &c) in &q.terms {
            bound += c.unsigned_abs() as u128;
            if i == j {
                linear[i] = c;
            } else {
                degree[i] += 1;
                degree[j] += 1;
            }
        }
        if bound > (i64::MAX / 4) as u128 {
            return Err(Error::Overflow("indexing a QUBO whose coefficient magnitudes are too large"));
        }
        let mut starts = Vec::with_capacity(q.num_vars + 1);
        starts.push(0);
        for &d in &degree {
            starts.push(starts.last().unwrap() + d);
        }
        let mut fill = starts.clone();
        let mut neighbors = vec![(0, 0); *starts.last().unwrap()];
        for (&(i, j), &c) in &q.terms {
            if i != j {
                neighbors[fill[i]] = (j, c);
                fill[i] += 1;
                neighbors[fill[j]] = (i, c);
                fill[j] += 1;
            }
        }
        Ok(QuboIndex { linear, starts, neighbors })
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self, k: usize) -> i64 {
        self.linear[k]
    }

    /// Off-diagonal couplings of `k` as `(other, coeff)`.
    pub fn couplings(&self, k: usize) -> &[(usize, i64)] {
        &self.neighbors[self.starts[k]..self.starts[k + 1]]
    }

    /// Energy change of flipping `k`, in time linear in its coupling count.
    pub fn flip_delta(&self, bits: &[bool], k: usize) -> i64 {
        let field = self.linear[k]
            + self.couplings(k).iter().filter(|(j, _)| bits[*j]).map(|(_, c)| c).sum::<i64>();
        if bits[k] { -field } else { field }
    }

    /// `field[k] = linear_k + Σ_j c_kj · x_j`; flipping `k` changes the
    /// energy by `±field[k]`.
    pub fn local_fields(&self, bits: &[bool]) -> Vec<i64> {
        (0..self.num_vars())
            .map(|k| {
                self.linear[k]
                    + self.couplings(k).iter().filter(|(j, _)| bits[*j]).map(|(_, c)| c).sum::<i64>()
            })
            .collect()
    }

    /// Flips `k` in place and updates the local fields of its neighbors.
    /// Returns the energy change.
    #[inline]
    pub fn apply_flip(&self, bits: &mut [bool], fields: &mut [i64], k: usize) -> i64 {
        let (delta, sign) = if bits[k] { (-fields[k], -1) } else { (fields[k], 1) };
        bits[k] = !bits[k];
        for &(j, c) in self.couplings(k) {
            fields[j] += sign * c;
        }
        delta
    }
}
