//! Row matrices over prime fields GF(p), p < 2^16.
//!
//! Scheme verification and the exhaustive oracle only ever need three
//! primitives: rank, row-space membership, and expressing a vector as a
//! combination of rows. Everything here is dense; the instances this crate
//! targets have at most a few thousand columns.
//!
//! Two elimination engines back those primitives: a word-packed bitset engine
//! for GF(2) and a generic modular engine for every prime. `rank` and friends
//! dispatch to the packed engine when the field is GF(2); [`RowMatrix::rank_via`]
//! exposes both engines so tests can compare them on the same input.

use thiserror::Error;

/// Errors from field construction and matrix shape checks.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{p} is not prime")]
    NotPrime { p: u64 },
    #[error("field order {p} does not fit below 2^16")]
    OrderTooLarge { p: u64 },
    #[error("entry {value} is not reduced modulo {p}")]
    EntryOutOfRange { value: u16, p: u16 },
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A prime field order p with p < 2^16.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldOrder(u16);

impl FieldOrder {
    /// GF(2), the default field throughout the toolkit.
    pub const BINARY: FieldOrder = FieldOrder(2);

    /// Validates that `p` is prime and fits below 2^16.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= 1 << 16 {
            return Err(FieldError::OrderTooLarge { p });
        }
        if p < 2 || !is_prime_u16(p as u16) {
            return Err(FieldError::NotPrime { p });
        }
        Ok(FieldOrder(p as u16))
    }

    /// The field order p.
    pub fn order(self) -> u16 {
        self.0
    }

    pub(crate) fn check_entry(self, value: u16) -> Result<u16, FieldError> {
        if value < self.0 {
            Ok(value)
        } else {
            Err(FieldError::EntryOutOfRange {
                value,
                p: self.0,
            })
        }
    }

    pub(crate) fn add(self, a: u16, b: u16) -> u16 {
        ((a as u32 + b as u32) % self.0 as u32) as u16
    }

    pub(crate) fn sub(self, a: u16, b: u16) -> u16 {
        ((a as u32 + self.0 as u32 - b as u32) % self.0 as u32) as u16
    }

    pub(crate) fn mul(self, a: u16, b: u16) -> u16 {
        ((a as u32 * b as u32) % self.0 as u32) as u16
    }

    /// Multiplicative inverse of a nonzero element (Fermat).
    pub(crate) fn inv(self, a: u16) -> u16 {
        debug_assert!(a != 0);
        self.pow(a, self.0 as u32 - 2)
    }

    fn pow(self, mut base: u16, mut exp: u32) -> u16 {
        let mut acc: u16 = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

fn is_prime_u16(p: u16) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3u32;
    while d * d <= p as u32 {
        if (p as u32).is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Which elimination engine to run; see the module docs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Word-packed bitset elimination; GF(2) only.
    PackedBits,
    /// Plain modular elimination for any prime.
    Modular,
}

/// A dense row-major matrix over a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowMatrix {
    field: FieldOrder,
    rows: usize,
    cols: usize,
    data: Vec<u16>,
}

impl RowMatrix {
    pub fn zero(field: FieldOrder, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Builds a matrix from explicit rows; every entry must be reduced mod p
    /// and every row must have length `cols`.
    pub fn from_rows(
        field: FieldOrder,
        cols: usize,
        rows: impl IntoIterator<Item = Vec<u16>>,
    ) -> Result<Self, FieldError> {
        let mut data = Vec::new();
        let mut count = 0;
        for row in rows {
            if row.len() != cols {
                return Err(FieldError::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            for &v in &row {
                field.check_entry(v)?;
            }
            data.extend_from_slice(&row);
            count += 1;
        }
        Ok(Self {
            field,
            rows: count,
            cols,
            data,
        })
    }

    pub fn field(&self) -> FieldOrder {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[u16] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> u16 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: u16) {
        debug_assert!(value < self.field.order());
        self.data[r * self.cols + c] = value;
    }

    /// Matrix rank, using the packed engine for GF(2).
    pub fn rank(&self) -> usize {
        self.rank_via(self.default_engine())
    }

    /// Rank through a specific engine. Panics if `PackedBits` is requested
    /// for a field other than GF(2).
    pub fn rank_via(&self, engine: Engine) -> usize {
        match engine {
            Engine::PackedBits => {
                assert_eq!(
                    self.field,
                    FieldOrder::BINARY,
                    "packed engine only supports GF(2)"
                );
                let mut space = BitSpace::new(self.cols, self.rows);
                for r in 0..self.rows {
                    space.insert_u16(self.row(r));
                }
                space.rank()
            }
            Engine::Modular => {
                let mut space = ModSpace::new(self.field, self.cols, self.rows);
                for r in 0..self.rows {
                    space.insert(self.row(r));
                }
                space.rank()
            }
        }
    }

    /// Whether `v` lies in the row space.
    pub fn in_row_space(&self, v: &[u16]) -> Result<bool, FieldError> {
        Ok(self.express_in_row_space(v)?.is_some())
    }

    /// Coefficients `c` with `sum_i c[i] * row_i = v`, if any.
    pub fn express_in_row_space(&self, v: &[u16]) -> Result<Option<Vec<u16>>, FieldError> {
        if v.len() != self.cols {
            return Err(FieldError::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        for &x in v {
            self.field.check_entry(x)?;
        }
        if self.field == FieldOrder::BINARY {
            let mut space = BitSpace::new(self.cols, self.rows);
            for r in 0..self.rows {
                space.insert_u16(self.row(r));
            }
            Ok(space.express_u16(v))
        } else {
            let mut space = ModSpace::new(self.field, self.cols, self.rows);
            for r in 0..self.rows {
                space.insert(self.row(r));
            }
            Ok(space.express(v))
        }
    }

    fn default_engine(&self) -> Engine {
        if self.field == FieldOrder::BINARY {
            Engine::PackedBits
        } else {
            Engine::Modular
        }
    }
}

/// Incremental row space over any prime field, with coefficient tracking.
///
/// Rows are inserted one at a time; each basis row remembers how it combines
/// the inserted rows, so membership queries can report the combination.
pub(crate) struct ModSpace {
    field: FieldOrder,
    cols: usize,
    capacity: usize,
    inserted: usize,
    pivots: Vec<usize>,
    basis: Vec<Vec<u16>>,
    combos: Vec<Vec<u16>>,
}

impl ModSpace {
    pub fn new(field: FieldOrder, cols: usize, capacity: usize) -> Self {
        Self {
            field,
            cols,
            capacity,
            inserted: 0,
            pivots: Vec::new(),
            basis: Vec::new(),
            combos: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Inserts a row; returns true when it enlarged the space.
    pub fn insert(&mut self, row: &[u16]) -> bool {
        debug_assert_eq!(row.len(), self.cols);
        debug_assert!(self.inserted < self.capacity);
        let mut combo = vec![0u16; self.capacity];
        combo[self.inserted] = 1;
        self.inserted += 1;
        let mut row = row.to_vec();
        self.reduce(&mut row, &mut combo);
        match row.iter().position(|&x| x != 0) {
            None => false,
            Some(pivot) => {
                // Normalize so the pivot entry is 1.
                let inv = self.field.inv(row[pivot]);
                for x in row.iter_mut() {
                    *x = self.field.mul(*x, inv);
                }
                for c in combo.iter_mut() {
                    *c = self.field.mul(*c, inv);
                }
                let at = self.pivots.partition_point(|&p| p < pivot);
                self.pivots.insert(at, pivot);
                self.basis.insert(at, row);
                self.combos.insert(at, combo);
                true
            }
        }
    }

    /// Coefficients over the inserted rows expressing `v`, if `v` is in the
    /// space. The returned vector has length `capacity`.
    pub fn express(&self, v: &[u16]) -> Option<Vec<u16>> {
        debug_assert_eq!(v.len(), self.cols);
        let mut residue = v.to_vec();
        let mut combo = vec![0u16; self.capacity];
        self.reduce_neg(&mut residue, &mut combo);
        if residue.iter().all(|&x| x == 0) {
            Some(combo)
        } else {
            None
        }
    }

    /// Subtracts basis rows to clear pivot positions of `row`, updating
    /// `combo` so that `row_original = row + sum combo_adjustments`.
    fn reduce(&self, row: &mut [u16], combo: &mut [u16]) {
        for (k, &pivot) in self.pivots.iter().enumerate() {
            let factor = row[pivot];
            if factor != 0 {
                for (rc, &bc) in row.iter_mut().zip(&self.basis[k]) {
                    let delta = self.field.mul(factor, bc);
                    *rc = self.field.sub(*rc, delta);
                }
                for (ci, &kc) in combo.iter_mut().zip(&self.combos[k]) {
                    let delta = self.field.mul(factor, kc);
                    *ci = self.field.sub(*ci, delta);
                }
            }
        }
    }

    /// Like `reduce` but accumulates `+factor * combo_k`, so a zero residue
    /// leaves `combo` with coefficients summing to `v`.
    fn reduce_neg(&self, row: &mut [u16], combo: &mut [u16]) {
        for (k, &pivot) in self.pivots.iter().enumerate() {
            let factor = row[pivot];
            if factor != 0 {
                for (rc, &bc) in row.iter_mut().zip(&self.basis[k]) {
                    let delta = self.field.mul(factor, bc);
                    *rc = self.field.sub(*rc, delta);
                }
                for (ci, &kc) in combo.iter_mut().zip(&self.combos[k]) {
                    let delta = self.field.mul(factor, kc);
                    *ci = self.field.add(*ci, delta);
                }
            }
        }
    }
}

/// Incremental GF(2) row space over packed 64-bit words.
pub(crate) struct BitSpace {
    cols: usize,
    words: usize,
    capacity: usize,
    capacity_words: usize,
    inserted: usize,
    pivots: Vec<usize>,
    basis: Vec<Vec<u64>>,
    combos: Vec<Vec<u64>>,
}

impl BitSpace {
    pub fn new(cols: usize, capacity: usize) -> Self {
        Self {
            cols,
            words: cols.div_ceil(64),
            capacity,
            capacity_words: capacity.div_ceil(64).max(1),
            inserted: 0,
            pivots: Vec::new(),
            basis: Vec::new(),
            combos: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn pack(&self, row: &[u16]) -> Vec<u64> {
        debug_assert_eq!(row.len(), self.cols);
        let mut words = vec![0u64; self.words];
        for (c, &x) in row.iter().enumerate() {
            debug_assert!(x < 2);
            if x == 1 {
                words[c / 64] |= 1 << (c % 64);
            }
        }
        words
    }

    pub fn insert_u16(&mut self, row: &[u16]) -> bool {
        let packed = self.pack(row);
        self.insert(packed)
    }

    pub fn insert(&mut self, mut row: Vec<u64>) -> bool {
        let mut combo = vec![0u64; self.capacity_words];
        combo[self.inserted / 64] |= 1 << (self.inserted % 64);
        self.inserted += 1;
        self.reduce(&mut row, &mut combo);
        match first_set_bit(&row) {
            None => false,
            Some(pivot) => {
                let at = self.pivots.partition_point(|&p| p < pivot);
                self.pivots.insert(at, pivot);
                self.basis.insert(at, row);
                self.combos.insert(at, combo);
                true
            }
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut residue = v.to_vec();
        let mut combo = vec![0u64; self.capacity_words];
        self.reduce(&mut residue, &mut combo);
        residue.iter().all(|&w| w == 0)
    }

    pub fn express_u16(&self, v: &[u16]) -> Option<Vec<u16>> {
        let packed = self.pack(v);
        let mut residue = packed;
        let mut combo = vec![0u64; self.capacity_words];
        self.reduce(&mut residue, &mut combo);
        if residue.iter().any(|&w| w != 0) {
            return None;
        }
        let mut coeffs = vec![0u16; self.capacity];
        for (i, coeff) in coeffs.iter_mut().enumerate() {
            if combo[i / 64] >> (i % 64) & 1 == 1 {
                *coeff = 1;
            }
        }
        Some(coeffs)
    }

    fn reduce(&self, row: &mut [u64], combo: &mut [u64]) {
        for (k, &pivot) in self.pivots.iter().enumerate() {
            if row[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (w, b) in row.iter_mut().zip(&self.basis[k]) {
                    *w ^= b;
                }
                for (w, b) in combo.iter_mut().zip(&self.combos[k]) {
                    *w ^= b;
                }
            }
        }
    }
}

fn first_set_bit(words: &[u64]) -> Option<usize> {
    for (i, &w) in words.iter().enumerate() {
        if w != 0 {
            return Some(i * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

/// Iterator over all canonical reduced-echelon matrices with `rank` pivot
/// rows and `cols` columns over GF(p).
///
/// Each `rank`-dimensional subspace of GF(p)^cols has exactly one reduced
/// row-echelon basis matrix, so the iterator visits every subspace once. The
/// order is deterministic: pivot column sets ascend lexicographically, and
/// for a fixed pivot set the free entries run through an odometer (last free
/// position fastest).
pub struct RrefIter {
    field: FieldOrder,
    cols: usize,
    rank: usize,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    values: Vec<u16>,
    fresh_pivots: bool,
    done: bool,
}

impl RrefIter {
    pub fn new(field: FieldOrder, cols: usize, rank: usize) -> Self {
        let done = rank > cols;
        Self {
            field,
            cols,
            rank,
            pivots: (0..rank.min(cols)).collect(),
            free: Vec::new(),
            values: Vec::new(),
            fresh_pivots: true,
            done,
        }
    }

    fn compute_free(&mut self) {
        self.free.clear();
        for (i, &p) in self.pivots.iter().enumerate() {
            for c in p + 1..self.cols {
                if !self.pivots.contains(&c) {
                    self.free.push((i, c));
                }
            }
        }
        self.values = vec![0; self.free.len()];
    }

    fn emit(&self) -> RowMatrix {
        let mut mat = RowMatrix::zero(self.field, self.rank, self.cols);
        for (i, &p) in self.pivots.iter().enumerate() {
            mat.set(i, p, 1);
        }
        for (k, &(i, c)) in self.free.iter().enumerate() {
            if self.values[k] != 0 {
                mat.set(i, c, self.values[k]);
            }
        }
        mat
    }

    /// Advances the free-entry odometer; false when it wrapped around.
    fn bump_values(&mut self) -> bool {
        let p = self.field.order();
        for k in (0..self.values.len()).rev() {
            if self.values[k] + 1 < p {
                self.values[k] += 1;
                return true;
            }
            self.values[k] = 0;
        }
        false
    }

    /// Advances to the next pivot column combination in lexicographic order;
    /// false when exhausted.
    fn bump_pivots(&mut self) -> bool {
        let k = self.rank;
        if k == 0 {
            return false;
        }
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.pivots[i] < self.cols - (k - i) {
                self.pivots[i] += 1;
                for j in i + 1..k {
                    self.pivots[j] = self.pivots[j - 1] + 1;
                }
                if self.pivots[k - 1] < self.cols {
                    return true;
                }
            }
        }
        false
    }
}

impl Iterator for RrefIter {
    type Item = RowMatrix;

    fn next(&mut self) -> Option<RowMatrix> {
        if self.done {
            return None;
        }
        if self.rank == 0 {
            // A single empty matrix represents the zero subspace.
            self.done = true;
            return Some(RowMatrix::zero(self.field, 0, self.cols));
        }
        if self.fresh_pivots {
            self.compute_free();
            self.fresh_pivots = false;
            return Some(self.emit());
        }
        if self.bump_values() {
            return Some(self.emit());
        }
        if self.bump_pivots() {
            self.compute_free();
            return Some(self.emit());
        }
        self.done = true;
        None
    }
}
