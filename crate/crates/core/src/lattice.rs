//! Sparse lattice bases, l_p distances, and the approximate-CVP promise model.

use num::{One, Signed, Zero};

use crate::error::Error;
use crate::num_mode::{parse_rat, Num, PNorm, Rat, FLOAT_TOL};
use crate::Decision;

/// Sparse column vector. Rows are 1-indexed; entries are sorted by row and
/// never store zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, Num)>,
}

impl SparseVector {
    pub fn new(dim: usize, mut entries: Vec<(usize, Num)>) -> Result<Self, Error> {
        entries.retain(|(_, v)| !v.is_zero());
        entries.sort_by_key(|(row, _)| *row);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Validation(format!(
                    "duplicate row {} in sparse vector",
                    pair[0].0
                )));
            }
        }
        if let Some((row, _)) = entries.iter().find(|(row, _)| *row < 1 || *row > dim) {
            return Err(Error::Validation(format!(
                "row {row} out of range [1, {dim}]"
            )));
        }
        Ok(SparseVector { dim, entries })
    }

    pub fn zero(dim: usize) -> Self {
        SparseVector {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, Num)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|(_, v)| v.is_exact())
    }

    /// Dense f64 image, 0-indexed.
    pub fn to_dense_f64(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (row, v) in &self.entries {
            out[row - 1] = v.f64();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparseBasis {
    dim: usize,
    columns: Vec<SparseVector>,
}

impl SparseBasis {
    pub fn new(dim: usize, columns: Vec<SparseVector>) -> Result<Self, Error> {
        if let Some(c) = columns.iter().find(|c| c.dim() != dim) {
            return Err(Error::Dimension(format!(
                "column of dimension {} in basis of ambient dimension {dim}",
                c.dim()
            )));
        }
        if columns.len() > dim {
            return Err(Error::Validation(format!(
                "rank {} exceeds ambient dimension {dim}",
                columns.len()
            )));
        }
        Ok(SparseBasis { dim, columns })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[SparseVector] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.nnz()).sum()
    }

    pub fn is_exact(&self) -> bool {
        self.columns.iter().all(|c| c.is_exact())
    }
}

/// Integer coefficient vector of length `rank`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Coordinates(pub Vec<i64>);

impl Coordinates {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&y| y == 0 || y == 1)
    }

    pub fn from_mask(rank: usize, mask: u64) -> Self {
        Coordinates((0..rank).map(|i| (mask >> i & 1) as i64).collect())
    }
}

/// An approximate-CVP instance. `r_pow` and `gamma_pow` hold r^p and
/// gamma^p; comparisons run on p-th powers throughout so exact instances
/// never take roots.
#[derive(Clone, Debug)]
pub struct CvpInstance {
    pub basis: SparseBasis,
    pub target: SparseVector,
    pub p: PNorm,
    r_pow: Num,
    gamma_pow: Num,
    pub iota: Option<Rat>,
}

impl CvpInstance {
    pub fn new(
        basis: SparseBasis,
        target: SparseVector,
        p: PNorm,
        r_pow: Num,
        gamma_pow: Num,
        iota: Option<Rat>,
    ) -> Result<Self, Error> {
        if target.dim() != basis.dim() {
            return Err(Error::Dimension(format!(
                "target dimension {} vs basis ambient dimension {}",
                target.dim(),
                basis.dim()
            )));
        }
        if !r_pow.gt(&Num::zero()) {
            return Err(Error::Validation("radius r must be positive".into()));
        }
        if gamma_pow.lt(&Num::one()) {
            return Err(Error::Validation("approximation factor gamma must be >= 1".into()));
        }
        if let Some(iota) = &iota {
            if *iota <= Rat::one() {
                return Err(Error::Validation("gadget parameter iota must exceed 1".into()));
            }
        }
        Ok(CvpInstance {
            basis,
            target,
            p,
            r_pow,
            gamma_pow,
            iota,
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn r_pow(&self) -> &Num {
        &self.r_pow
    }

    pub fn gamma_pow(&self) -> &Num {
        &self.gamma_pow
    }

    /// (gamma * r)^p.
    pub fn gamma_r_pow(&self) -> Num {
        self.r_pow.mul(&self.gamma_pow)
    }

    pub fn r(&self) -> Num {
        self.r_pow.root(&self.p)
    }

    pub fn gamma(&self) -> Num {
        self.gamma_pow.root(&self.p)
    }

    /// Copy with all exact rationals dropped, forcing float arithmetic
    /// everywhere downstream.
    pub fn to_float(&self) -> CvpInstance {
        let strip_vec = |v: &SparseVector| {
            SparseVector::new(
                v.dim(),
                v.entries()
                    .iter()
                    .map(|(r, x)| (*r, Num::from_f64(x.f64())))
                    .collect(),
            )
            .expect("stripping exactness preserves structure")
        };
        CvpInstance {
            basis: SparseBasis::new(
                self.basis.dim(),
                self.basis.columns().iter().map(strip_vec).collect(),
            )
            .expect("stripping exactness preserves structure"),
            target: strip_vec(&self.target),
            p: self.p.clone(),
            r_pow: Num::from_f64(self.r_pow.f64()),
            gamma_pow: Num::from_f64(self.gamma_pow.f64()),
            iota: self.iota.clone(),
        }
    }

    /// Exact mode: integer p and fully rational data.
    pub fn is_exact(&self) -> bool {
        self.p.as_int().is_some()
            && self.basis.is_exact()
            && self.target.is_exact()
            && self.r_pow.is_exact()
    }
}

/// ||B y - t||_p^p. Exact when p is a positive integer and all inputs are
/// rational; float with per-coordinate relative error well under 1e-12
/// otherwise.
pub fn lp_distance_pow(
    basis: &SparseBasis,
    y: &Coordinates,
    target: &SparseVector,
    p: &PNorm,
) -> Result<Num, Error> {
    if y.len() != basis.rank() {
        return Err(Error::Dimension(format!(
            "coordinates of length {} vs rank {}",
            y.len(),
            basis.rank()
        )));
    }
    if target.dim() != basis.dim() {
        return Err(Error::Dimension(format!(
            "target dimension {} vs ambient dimension {}",
            target.dim(),
            basis.dim()
        )));
    }
    let mut residual: Vec<Num> = vec![Num::zero(); basis.dim()];
    for (col, &coef) in basis.columns().iter().zip(&y.0) {
        if coef == 0 {
            continue;
        }
        let c = Num::from_int(coef);
        for (row, v) in col.entries() {
            residual[row - 1] = residual[row - 1].add(&c.mul(v));
        }
    }
    for (row, v) in target.entries() {
        residual[row - 1] = residual[row - 1].sub(v);
    }
    let mut total = Num::zero();
    for v in &residual {
        if !v.is_zero() {
            total = total.add(&v.abs_pow(p));
        }
    }
    Ok(total)
}

/// True iff the columns have full rank. Exact rational elimination when all
/// entries are rational; float elimination with pivot tolerance otherwise.
pub fn check_linear_independence(basis: &SparseBasis) -> bool {
    let n = basis.rank();
    if n == 0 {
        return true;
    }
    // densify only rows touched by some column
    let mut rows: Vec<usize> = basis
        .columns()
        .iter()
        .flat_map(|c| c.entries().iter().map(|(r, _)| *r))
        .collect();
    rows.sort_unstable();
    rows.dedup();
    if rows.len() < n {
        return false;
    }
    let row_pos: std::collections::HashMap<usize, usize> =
        rows.iter().enumerate().map(|(i, r)| (*r, i)).collect();

    if basis.is_exact() {
        let mut mat: Vec<Vec<Rat>> = vec![vec![Rat::zero(); n]; rows.len()];
        for (j, col) in basis.columns().iter().enumerate() {
            for (row, v) in col.entries() {
                mat[row_pos[row]][j] = v.exact().unwrap().clone();
            }
        }
        rank_exact(&mut mat) == n
    } else {
        let mut mat: Vec<Vec<f64>> = vec![vec![0.0; n]; rows.len()];
        for (j, col) in basis.columns().iter().enumerate() {
            for (row, v) in col.entries() {
                mat[row_pos[row]][j] = v.f64();
            }
        }
        rank_float(&mut mat) == n
    }
}

fn rank_exact(mat: &mut [Vec<Rat>]) -> usize {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows).find(|&r| !mat[r][col].is_zero());
        let Some(p) = pivot else { continue };
        mat.swap(rank, p);
        let inv = Rat::one() / mat[rank][col].clone();
        let (top, bottom) = mat.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in bottom.iter_mut() {
            if !row[col].is_zero() {
                let factor = &row[col] * &inv;
                for (dst, src) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *dst -= &factor * src;
                }
            }
        }
        rank += 1;
        if rank == cols {
            break;
        }
    }
    rank
}

fn rank_float(mat: &mut [Vec<f64>]) -> usize {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let scale: f64 = mat
        .iter()
        .flat_map(|r| r.iter().map(|x| x.abs()))
        .fold(0.0, f64::max)
        .max(1.0);
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows).max_by(|&a, &b| {
            mat[a][col].abs().partial_cmp(&mat[b][col].abs()).unwrap()
        });
        let Some(p) = pivot else { continue };
        if mat[p][col].abs() <= FLOAT_TOL * scale {
            continue;
        }
        mat.swap(rank, p);
        let (top, bottom) = mat.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in bottom.iter_mut() {
            let factor = row[col] / pivot_row[col];
            for (dst, src) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= factor * src;
            }
        }
        rank += 1;
        if rank == cols {
            break;
        }
    }
    rank
}

/// Round every coefficient to {0, 1}: y_i <= 0 maps to 0, y_i >= 1 maps to 1.
pub fn binarize(y: &Coordinates) -> Coordinates {
    Coordinates(y.0.iter().map(|&v| if v <= 0 { 0 } else { 1 }).collect())
}

/// Decide the promise problem given the true minimum distance (as a p-th
/// power, supplied by a solver).
pub fn decide_cvp(inst: &CvpInstance, dist_pow: &Num) -> Decision {
    if dist_pow.le(inst.r_pow()) {
        Decision::Yes
    } else if dist_pow.gt(&inst.gamma_r_pow()) {
        Decision::No
    } else {
        Decision::PromiseViolation
    }
}

// ---------------------------------------------------------------------------
// CVP instance text format
//
//   cvp <d> <n> <p> <r> <gamma> [iota]
//   b <col> <row> <value>
//   t <row> <value>
// ---------------------------------------------------------------------------

pub fn parse_cvp(text: &str) -> Result<CvpInstance, Error> {
    let mut header: Option<(usize, usize, PNorm, Rat, Rat, Option<Rat>)> = None;
    let mut basis_entries: Vec<(usize, usize, Rat)> = Vec::new();
    let mut target_entries: Vec<(usize, Num)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "cvp" => {
                if header.is_some() {
                    return Err(Error::Parse(format!("line {}: duplicate header", lineno + 1)));
                }
                if !(6..=7).contains(&fields.len()) {
                    return Err(Error::Parse(format!(
                        "line {}: header wants `cvp d n p r gamma [iota]`",
                        lineno + 1
                    )));
                }
                let d: usize = fields[1]
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad d", lineno + 1)))?;
                let n: usize = fields[2]
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad n", lineno + 1)))?;
                let p = PNorm::new(parse_rat(fields[3])?)?;
                let r = parse_rat(fields[4])?;
                let gamma = parse_rat(fields[5])?;
                let iota = if fields.len() == 7 {
                    Some(parse_rat(fields[6])?)
                } else {
                    None
                };
                header = Some((d, n, p, r, gamma, iota));
            }
            "b" => {
                if fields.len() != 4 {
                    return Err(Error::Parse(format!(
                        "line {}: basis entry wants `b col row value`",
                        lineno + 1
                    )));
                }
                let col: usize = fields[1]
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad col", lineno + 1)))?;
                let row: usize = fields[2]
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad row", lineno + 1)))?;
                basis_entries.push((col, row, parse_rat(fields[3])?));
            }
            "t" => {
                if fields.len() != 3 {
                    return Err(Error::Parse(format!(
                        "line {}: target entry wants `t row value`",
                        lineno + 1
                    )));
                }
                let row: usize = fields[1]
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad row", lineno + 1)))?;
                target_entries.push((row, Num::from_rat(parse_rat(fields[2])?)));
            }
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown record {other:?}",
                    lineno + 1
                )));
            }
        }
    }
    let (d, n, p, r, gamma, iota) =
        header.ok_or_else(|| Error::Parse("missing `cvp` header".into()))?;
    let mut cols: Vec<Vec<(usize, Num)>> = vec![Vec::new(); n];
    for (col, row, v) in basis_entries {
        if col < 1 || col > n {
            return Err(Error::Parse(format!("basis column {col} out of range [1, {n}]")));
        }
        cols[col - 1].push((row, Num::from_rat(v)));
    }
    let columns: Result<Vec<SparseVector>, Error> =
        cols.into_iter().map(|c| SparseVector::new(d, c)).collect();
    let basis = SparseBasis::new(d, columns?)?;
    let target = SparseVector::new(d, target_entries)?;
    let r_pow = Num::from_rat(r).abs_pow(&p);
    let gamma_pow = Num::from_rat(gamma).abs_pow(&p);
    CvpInstance::new(basis, target, p, r_pow, gamma_pow, iota)
}

pub fn write_cvp(inst: &CvpInstance) -> String {
    use crate::num_mode::format_rat;
    let mut out = String::new();
    let iota_field = match &inst.iota {
        Some(q) => format!(" {}", format_rat(q)),
        None => String::new(),
    };
    out.push_str(&format!(
        "cvp {} {} {} {} {}{}\n",
        inst.dim(),
        inst.rank(),
        format_rat(inst.p.rat()),
        inst.r(),
        inst.gamma(),
        iota_field
    ));
    for (j, col) in inst.basis.columns().iter().enumerate() {
        for (row, v) in col.entries() {
            out.push_str(&format!("b {} {} {}\n", j + 1, row, v));
        }
    }
    for (row, v) in inst.target.entries() {
        out.push_str(&format!("t {} {}\n", row, v));
    }
    out
}
