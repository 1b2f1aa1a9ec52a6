//! Quantum convolutional codes: shift-invariant check matrices over the
//! Laurent ring, the Eq.-14-style commutation check, and Gaussian
//! elimination to the standard form with finite-polynomial row multipliers.

use super::poly::LaurentPoly;
use crate::error::{Error, Result};

/// Check matrix `G(D) = (X(D) | Z(D))`: `n - k` shift-invariant generator
/// rows over `n` qubits per frame.
#[derive(Clone, PartialEq, Eq)]
pub struct ConvCode {
    n: usize,
    k: usize,
    /// rows[i] has 2n entries: X part then Z part.
    rows: Vec<Vec<LaurentPoly>>,
}

impl ConvCode {
    pub fn new(n: usize, rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        if rows.is_empty() || rows.len() >= n {
            return Err(Error::Domain("generator count must be in 1..n".into()));
        }
        for row in &rows {
            if row.len() != 2 * n {
                return Err(Error::DimensionMismatch { left: row.len(), right: 2 * n });
            }
        }
        let k = n - rows.len();
        let code = Self { n, k, rows };
        for i in 0..code.rows.len() {
            for j in i..code.rows.len() {
                let comm = code.commutator(i, j);
                if !comm.is_zero() {
                    return Err(Error::NonCommutingRows { row_a: i, row_b: j });
                }
            }
        }
        Ok(code)
    }

    /// The rate-1/3 code in the frame ordering whose elimination lands
    /// directly on the standard form.
    pub fn rate_third() -> Self {
        Self::parse("1, 1+D, 1+D | D, D, 0\nD, D, 0 | 1+D, 1, 1+D").expect("valid builtin")
    }

    /// The same code in its original qubit ordering (columns permuted by
    /// (1,2,3) -> (2,3,1) relative to [`Self::rate_third`]).
    pub fn rate_third_original() -> Self {
        Self::parse("1+D, 1, 1+D | 0, D, D\n0, D, D | 1+D, 1+D, 1").expect("valid builtin")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[Vec<LaurentPoly>] {
        &self.rows
    }

    pub fn x_entry(&self, row: usize, col: usize) -> &LaurentPoly {
        &self.rows[row][col]
    }

    pub fn z_entry(&self, row: usize, col: usize) -> &LaurentPoly {
        &self.rows[row][self.n + col]
    }

    /// Maximum exponent span over all entries (the constraint length).
    pub fn constraint_len(&self) -> usize {
        self.rows
            .iter()
            .flatten()
            .filter_map(|p| Some((p.high()? - p.low()?) as usize))
            .max()
            .unwrap_or(0)
    }

    /// Commutator polynomial of two generator rows:
    /// `x_i(D)·z_j(D^-1)^T + z_i(D)·x_j(D^-1)^T`; zero iff the generators
    /// commute at every relative shift.
    pub fn commutator(&self, i: usize, j: usize) -> LaurentPoly {
        commutator(&self.rows[i], &self.rows[j], self.n)
    }

    /// Parses rows like `1+D, D, 0 | 1+D, 1, 1+D`, one generator per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut n = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (x_str, z_str) = line.split_once('|').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                msg: "missing | between X and Z parts".into(),
            })?;
            let parse_side = |side: &str| -> Result<Vec<LaurentPoly>> {
                side.split(',').map(LaurentPoly::parse).collect()
            };
            let xs = parse_side(x_str)?;
            let zs = parse_side(z_str)?;
            if xs.len() != zs.len() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("X part has {} entries, Z part {}", xs.len(), zs.len()),
                });
            }
            match n {
                None => n = Some(xs.len()),
                Some(w) if w != xs.len() => {
                    return Err(Error::Parse { line: lineno + 1, msg: "ragged rows".into() })
                }
                _ => {}
            }
            rows.push(xs.into_iter().chain(zs).collect());
        }
        let n = n.ok_or(Error::Parse { line: 0, msg: "no generator rows".into() })?;
        Self::new(n, rows)
    }

    pub fn to_text(&self) -> String {
        rows_to_text(&self.rows, self.n)
    }
}

pub(crate) fn commutator(a: &[LaurentPoly], b: &[LaurentPoly], n: usize) -> LaurentPoly {
    let mut acc = LaurentPoly::zero();
    for col in 0..n {
        acc = acc.add(&a[col].mul(&b[n + col].reverse()));
        acc = acc.add(&a[n + col].mul(&b[col].reverse()));
    }
    acc
}

impl std::fmt::Debug for ConvCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl std::fmt::Debug for ConvStandardForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "r={} perm={:?}\n{}",
            self.r,
            self.column_perm,
            self.code.to_text()
        )
    }
}

pub(crate) fn rows_to_text(rows: &[Vec<LaurentPoly>], n: usize) -> String {
    let mut out = String::new();
    for row in rows {
        let xs: Vec<String> = row[..n].iter().map(|p| p.to_string()).collect();
        let zs: Vec<String> = row[n..].iter().map(|p| p.to_string()).collect();
        out.push_str(&format!("{} | {}\n", xs.join(", "), zs.join(", ")));
    }
    out
}

/// One recorded elimination step: a human-readable description and the full
/// matrix after the step, in the golden-file text syntax.
#[derive(Clone, Debug)]
pub struct ConvStep {
    pub description: String,
    pub matrix: String,
}

/// Standard form of a convolutional code plus the elimination trace.
#[derive(Clone)]
pub struct ConvStandardForm {
    pub code: ConvCode,
    pub r: usize,
    /// `column_perm[pos]` is the original qubit at permuted position `pos`.
    pub column_perm: Vec<usize>,
    pub trace: Vec<ConvStep>,
}

impl ConvStandardForm {
    /// Logical operator rows per Eq.-15 layout:
    /// `L_X = [0 Eᵀ(D⁻¹) I | Cᵀ(D⁻¹) 0 0]`,
    /// `L_Z = [0 0 0 | A₂ᵀ(D⁻¹) 0 I]`.
    pub fn logical_rows(&self) -> (Vec<Vec<LaurentPoly>>, Vec<Vec<LaurentPoly>>) {
        let n = self.code.n();
        let k = self.code.k();
        let m = n - k;
        let r = self.r;
        let mut lx = Vec::with_capacity(k);
        let mut lz = Vec::with_capacity(k);
        for i in 0..k {
            let mut row_x = vec![LaurentPoly::zero(); 2 * n];
            for j in 0..m - r {
                // E^T(D^-1)[i][j] = E[j][i](D^-1)
                row_x[r + j] = self.code.z_entry(r + j, m + i).reverse();
            }
            row_x[m + i] = LaurentPoly::one();
            for j in 0..r {
                row_x[n + j] = self.code.z_entry(j, m + i).reverse();
            }
            lx.push(row_x);

            let mut row_z = vec![LaurentPoly::zero(); 2 * n];
            for j in 0..r {
                row_z[n + j] = self.code.x_entry(j, m + i).reverse();
            }
            row_z[n + m + i] = LaurentPoly::one();
            lz.push(row_z);
        }
        (lx, lz)
    }
}

/// Gaussian elimination to the standard form
/// `[I A1 A2 | B 0 C; 0 0 0 | D I E]` using only finite Laurent-polynomial
/// row multipliers and monomial row scalings.
///
/// Pivot search prefers, for the lowest remaining row, the lowest remaining
/// column holding a monomial entry; when no monomial pivot exists anywhere,
/// the column is reduced by Euclidean row combinations and the run fails
/// over to a series-entries report if the resulting gcd is not a monomial.
pub fn conv_standard_form(code: &ConvCode) -> std::result::Result<ConvStandardForm, Error> {
    let n = code.n();
    let n_gen = code.rows().len();
    let mut rows: Vec<Vec<LaurentPoly>> = code.rows().to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut trace: Vec<ConvStep> = Vec::new();

    let snapshot = |rows: &[Vec<LaurentPoly>]| rows_to_text(rows, n);

    // part = 0 for the X half, 1 for the Z half
    let entry = |rows: &[Vec<LaurentPoly>], part: usize, row: usize, col: usize| -> LaurentPoly {
        rows[row][part * n + col].clone()
    };

    let eliminate = |rows: &mut Vec<Vec<LaurentPoly>>,
                         perm: &mut Vec<usize>,
                         trace: &mut Vec<ConvStep>,
                         part: usize,
                         row_start: usize,
                         row_end: usize,
                         col_start: usize|
     -> std::result::Result<usize, Error> {
        let mut pos = row_start;
        let mut col_pos = col_start;
        while pos < row_end {
            // any entries left in this half?
            let any_nonzero = (pos..row_end)
                .any(|i| (col_pos..n).any(|c| !entry(rows, part, i, c).is_zero()));
            if !any_nonzero {
                break;
            }
            // monomial pivot: lowest row, then lowest column
            let mut pivot: Option<(usize, usize)> = None;
            'search: for i in pos..row_end {
                for c in col_pos..n {
                    if entry(rows, part, i, c).as_monomial().is_some() {
                        pivot = Some((i, c));
                        break 'search;
                    }
                }
            }
            let (prow, pcol) = match pivot {
                Some(p) => p,
                None => {
                    // Euclidean fallback: reduce candidate columns until one
                    // leaves a monomial gcd
                    let mut found = None;
                    let mut first_gcd: Option<(usize, LaurentPoly)> = None;
                    for c in col_pos..n {
                        if (pos..row_end).all(|i| entry(rows, part, i, c).is_zero()) {
                            continue;
                        }
                        euclid_column(rows, trace, n, part, pos, row_end, c, &snapshot)?;
                        if let Some(i) =
                            (pos..row_end).find(|&i| entry(rows, part, i, c).as_monomial().is_some())
                        {
                            found = Some((i, c));
                            break;
                        }
                        if first_gcd.is_none() {
                            let gcd = (pos..row_end)
                                .map(|i| entry(rows, part, i, c))
                                .find(|e| !e.is_zero())
                                .unwrap_or_else(LaurentPoly::zero);
                            first_gcd = Some((c, gcd));
                        }
                    }
                    match found {
                        Some(p) => p,
                        None => {
                            let (c, gcd) = first_gcd.expect("nonzero column exists");
                            return Err(Error::SeriesEntries {
                                row: pos,
                                column: perm[c],
                                gcd: gcd.to_string(),
                            });
                        }
                    }
                }
            };
            if prow != pos {
                rows.swap(prow, pos);
                trace.push(ConvStep {
                    description: format!("swap rows {} and {}", pos + 1, prow + 1),
                    matrix: snapshot(rows),
                });
            }
            if pcol != col_pos {
                for row in rows.iter_mut() {
                    row.swap(col_pos, pcol);
                    row.swap(n + col_pos, n + pcol);
                }
                perm.swap(col_pos, pcol);
                trace.push(ConvStep {
                    description: format!("permute columns {} and {}", col_pos + 1, pcol + 1),
                    matrix: snapshot(rows),
                });
            }
            // normalize the pivot to 1
            let e = entry(rows, part, pos, col_pos).as_monomial().expect("monomial pivot");
            if e != 0 {
                let shift = LaurentPoly::monomial(-e);
                for v in rows[pos].iter_mut() {
                    *v = v.mul(&shift);
                }
                trace.push(ConvStep {
                    description: format!("row {} -> D^{} x row {}", pos + 1, -e, pos + 1),
                    matrix: snapshot(rows),
                });
            }
            // clear the column in every other row
            for i in 0..n_gen {
                if i == pos {
                    continue;
                }
                let f = entry(rows, part, i, col_pos);
                if f.is_zero() {
                    continue;
                }
                if let Some(a) = f.as_monomial() {
                    // row_i -> D^-a * row_i + row_pos
                    let shift = LaurentPoly::monomial(-a);
                    let pivot_row = rows[pos].clone();
                    for (v, pv) in rows[i].iter_mut().zip(&pivot_row) {
                        *v = v.mul(&shift).add(pv);
                    }
                    trace.push(ConvStep {
                        description: format!(
                            "row {} -> D^{} x row {} + row {}",
                            i + 1,
                            -a,
                            i + 1,
                            pos + 1
                        ),
                        matrix: snapshot(rows),
                    });
                } else {
                    let pivot_row = rows[pos].clone();
                    for (v, pv) in rows[i].iter_mut().zip(&pivot_row) {
                        *v = v.add(&pv.mul(&f));
                    }
                    trace.push(ConvStep {
                        description: format!("row {} -> row {} + ({f}) x row {}", i + 1, i + 1, pos + 1),
                        matrix: snapshot(rows),
                    });
                }
            }
            pos += 1;
            col_pos += 1;
        }
        Ok(pos - row_start)
    };

    let r = eliminate(&mut rows, &mut perm, &mut trace, 0, 0, n_gen, 0)?;
    // remaining rows must have vanished X parts
    for (i, row) in rows.iter().enumerate().skip(r) {
        if row[..n].iter().any(|p| !p.is_zero()) {
            return Err(Error::SeriesEntries {
                row: i,
                column: 0,
                gcd: "unreduced X entries".into(),
            });
        }
    }
    let z_rank = eliminate(&mut rows, &mut perm, &mut trace, 1, r, n_gen, r)?;
    if r + z_rank != n_gen {
        return Err(Error::RankDeficient { row: r + z_rank });
    }

    let code = ConvCode::new(n, rows)?;
    Ok(ConvStandardForm { code, r, column_perm: perm, trace })
}

/// Reduces column `c` of the given half by Euclidean row combinations until
/// at most one nonzero entry remains among rows `pos..row_end`.
fn euclid_column(
    rows: &mut Vec<Vec<LaurentPoly>>,
    trace: &mut Vec<ConvStep>,
    n: usize,
    part: usize,
    pos: usize,
    row_end: usize,
    c: usize,
    snapshot: &dyn Fn(&[Vec<LaurentPoly>]) -> String,
) -> std::result::Result<(), Error> {
    loop {
        let mut nonzero: Vec<(usize, usize)> = (pos..row_end)
            .filter_map(|i| {
                let e = &rows[i][part * n + c];
                (!e.is_zero()).then(|| (e.span(), i))
            })
            .collect();
        if nonzero.len() <= 1 {
            return Ok(());
        }
        nonzero.sort();
        let (_, short) = nonzero[0];
        let (_, long) = nonzero[1];
        let fe = rows[long][part * n + c].clone();
        let ge = rows[short][part * n + c].clone();
        // align lows, divide spans, subtract q * short row from long row
        let (q, _rem) = fe.div_rem_spans(&ge);
        let shift = LaurentPoly::monomial(fe.low().unwrap() - ge.low().unwrap());
        let q = q.mul(&shift);
        let short_row = rows[short].clone();
        for (v, sv) in rows[long].iter_mut().zip(&short_row) {
            *v = v.add(&sv.mul(&q));
        }
        trace.push(ConvStep {
            description: format!(
                "row {} -> row {} + ({q}) x row {} (column gcd reduction)",
                long + 1,
                long + 1,
                short + 1
            ),
            matrix: snapshot(rows),
        });
    }
}
