//! Stabilizer check matrices and their standard form.
//!
//! A check matrix is a set of commuting, independent Pauli generators. The
//! standard form is obtained by Gaussian elimination over GF(2) together with
//! a recorded qubit permutation, and has the block layout
//!
//! ```text
//!   r rows        [ I  A1 A2 | B  0  C ]
//!   n-k-r rows    [ 0  0  0  | D  I  E ]
//! ```
//!
//! with column widths (r, n-k-r, k) in both halves. Row operations multiply
//! generators, so signs are tracked through the elimination; the permutation
//! is recorded explicitly and never applied implicitly.

use crate::bits::{gf2_rank, BitMatrix, BitVec};
use crate::error::{Error, Result};
use crate::pauli::{multiply, symplectic_product, PauliString};

/// A set of commuting, independent stabilizer generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckMatrix {
    n: usize,
    rows: Vec<PauliString>,
}

impl CheckMatrix {
    pub fn new(rows: Vec<PauliString>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::Domain("check matrix needs at least one generator".into()));
        };
        let n = first.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { left: n, right: row.len() });
            }
            for (j, other) in rows.iter().enumerate().skip(i + 1) {
                if symplectic_product(row, other)? {
                    return Err(Error::NonCommutingRows { row_a: i, row_b: j });
                }
            }
        }
        // Independence over GF(2) as length-2n vectors; name the first
        // offender for the error message.
        let mut stacked: Vec<BitVec> = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            stacked.push(symplectic_vector(row));
            let mut work = stacked.clone();
            if gf2_rank(&mut work) != stacked.len() {
                return Err(Error::RankDeficient { row: i });
            }
        }
        Ok(Self { n, rows })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of encoded qubits, `n - (generator count)`.
    pub fn k(&self) -> usize {
        self.n - self.rows.len()
    }

    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &PauliString {
        &self.rows[i]
    }

    /// Parses the code text format: one generator per line over `{I,X,Y,Z}`
    /// with an optional leading `-`; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = PauliString::parse(line).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line: lineno + 1, msg },
                other => other,
            })?;
            rows.push(row);
        }
        Self::new(rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&row.to_string());
            out.push('\n');
        }
        out
    }
}

/// Canonical generating set of the group spanned by `rows`: sign-tracked
/// reduced row echelon form over the (x|z) bits, sorted. Two generator sets
/// span the same signed stabilizer group iff their canonical sets are equal.
pub fn canonical_generators(rows: &[PauliString]) -> Vec<PauliString> {
    let mut work: Vec<PauliString> = rows.to_vec();
    let n = work.first().map_or(0, PauliString::len);
    let mut pivot_row = 0;
    for col in 0..2 * n {
        let bit_of = |p: &PauliString| {
            if col < n {
                p.x().get(col)
            } else {
                p.z().get(col - n)
            }
        };
        let Some(found) = (pivot_row..work.len()).find(|&i| bit_of(&work[i])) else {
            continue;
        };
        work.swap(pivot_row, found);
        let pivot = work[pivot_row].clone();
        for (i, row) in work.iter_mut().enumerate() {
            if i != pivot_row && bit_of(row) {
                *row = multiply(row, &pivot).expect("equal lengths");
            }
        }
        pivot_row += 1;
        if pivot_row == work.len() {
            break;
        }
    }
    work.truncate(pivot_row);
    work.sort_by_key(|p| p.to_string());
    work
}

/// (x|z) bits of a Pauli as one length-2n vector.
pub(crate) fn symplectic_vector(p: &PauliString) -> BitVec {
    let n = p.len();
    let mut v = BitVec::zeros(2 * n);
    for q in 0..n {
        if p.x().get(q) {
            v.set(q, true);
        }
        if p.z().get(q) {
            v.set(n + q, true);
        }
    }
    v
}

/// Result of Gaussian elimination on a check matrix.
#[derive(Clone, Debug)]
pub struct StandardForm {
    n: usize,
    k: usize,
    r: usize,
    /// `column_perm[pos]` is the original qubit sitting at permuted position `pos`.
    column_perm: Vec<usize>,
    /// Generators in permuted qubit order, signs tracked through row ops.
    rows: Vec<PauliString>,
}

impl StandardForm {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn column_perm(&self) -> &[usize] {
        &self.column_perm
    }

    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    fn x_block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows.len(), cols.len());
        for (ri, row) in rows.clone().enumerate() {
            for (ci, col) in cols.clone().enumerate() {
                m.set(ri, ci, self.rows[row].x().get(col));
            }
        }
        m
    }

    fn z_block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows.len(), cols.len());
        for (ri, row) in rows.clone().enumerate() {
            for (ci, col) in cols.clone().enumerate() {
                m.set(ri, ci, self.rows[row].z().get(col));
            }
        }
        m
    }

    pub fn a1(&self) -> BitMatrix {
        let (n, k, r) = (self.n, self.k, self.r);
        self.x_block(0..r, r..n - k)
    }

    pub fn a2(&self) -> BitMatrix {
        let (n, k, r) = (self.n, self.k, self.r);
        self.x_block(0..r, n - k..n)
    }

    pub fn b(&self) -> BitMatrix {
        let r = self.r;
        self.z_block(0..r, 0..r)
    }

    pub fn c(&self) -> BitMatrix {
        let (n, k, r) = (self.n, self.k, self.r);
        self.z_block(0..r, n - k..n)
    }

    pub fn d(&self) -> BitMatrix {
        let (n, k, r) = (self.n, self.k, self.r);
        self.z_block(r..n - k, 0..r)
    }

    pub fn e(&self) -> BitMatrix {
        let (n, k, r) = (self.n, self.k, self.r);
        self.z_block(r..n - k, n - k..n)
    }

    /// Text listing of the permuted standard-form generators.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "n={} k={} r={} column_perm={:?}\n",
            self.n, self.k, self.r, self.column_perm
        ));
        for row in &self.rows {
            out.push_str(&row.to_string());
            out.push('\n');
        }
        out
    }
}

/// Gaussian elimination to the standard form.
///
/// Pivots are chosen deterministically: lowest remaining row first, then the
/// lowest column index with a usable entry. Dependent rows surface as
/// [`Error::RankDeficient`] naming the offending row.
pub fn standard_form(m: &CheckMatrix) -> Result<StandardForm> {
    let n = m.n();
    let k = m.k();
    let n_gen = m.rows().len();
    let mut rows: Vec<PauliString> = m.rows().to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    let swap_cols = |rows: &mut [PauliString], a: usize, b: usize| {
        if a == b {
            return;
        }
        for row in rows.iter_mut() {
            let la = row.letter(a);
            let lb = row.letter(b);
            row.set_letter(a, lb);
            row.set_letter(b, la);
        }
    };

    // Stage 1: bring the X block to [I A1 A2].
    let mut r = 0;
    'outer: while r < n_gen {
        let mut pivot: Option<(usize, usize)> = None;
        for row in r..n_gen {
            if let Some(col) = (r..n).find(|&c| rows[row].x().get(c)) {
                pivot = Some((row, col));
                break;
            }
        }
        let Some((prow, pcol)) = pivot else {
            break 'outer;
        };
        rows.swap(r, prow);
        swap_cols(&mut rows, r, pcol);
        perm.swap(r, pcol);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.x().get(r) {
                *row = multiply(row, &pivot_row)?;
            }
        }
        r += 1;
    }

    // Stage 2: bring the Z block of the remaining rows to [D I E].
    for pos in r..n_gen {
        let mut pivot: Option<(usize, usize)> = None;
        for row in pos..n_gen {
            if let Some(col) = (pos..n).find(|&c| rows[row].z().get(c)) {
                pivot = Some((row, col));
                break;
            }
        }
        let Some((prow, pcol)) = pivot else {
            // a remaining row with no usable entry is dependent
            return Err(Error::RankDeficient { row: pos });
        };
        rows.swap(pos, prow);
        swap_cols(&mut rows, pos, pcol);
        perm.swap(pos, pcol);
        let pivot_row = rows[pos].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != pos && row.z().get(pos) {
                *row = multiply(row, &pivot_row)?;
            }
        }
    }

    Ok(StandardForm { n, k, r, column_perm: perm, rows })
}
