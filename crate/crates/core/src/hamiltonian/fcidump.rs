//! FCIDUMP ingestion and frozen-core folding.

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

/// Real spatial-orbital integrals: one-body `h_pq` and chemists'-notation
/// two-body `(pq|rs)`, both stored densely with all symmetric slots filled.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrals {
    n_orbitals: usize,
    pub core_energy: f64,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
}

impl Integrals {
    pub fn zeros(n_orbitals: usize) -> Self {
        Self {
            n_orbitals,
            core_energy: 0.0,
            one_body: vec![0.0; n_orbitals * n_orbitals],
            two_body: vec![0.0; n_orbitals.pow(4)],
        }
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.one_body[p * self.n_orbitals + q]
    }

    #[inline]
    fn eri_index(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        let n = self.n_orbitals;
        ((p * n + q) * n + r) * n + s
    }

    /// `(pq|rs)`
    #[inline]
    pub fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two_body[self.eri_index(p, q, r, s)]
    }

    /// Sets `h_pq = h_qp = v`.
    pub fn set_h(&mut self, p: usize, q: usize, v: f64) {
        let n = self.n_orbitals;
        self.one_body[p * n + q] = v;
        self.one_body[q * n + p] = v;
    }

    /// Sets all eight permutation-equivalent slots of `(pq|rs)`.
    pub fn set_eri(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        for (a, b, c, d) in [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ] {
            let k = self.eri_index(a, b, c, d);
            self.two_body[k] = v;
        }
    }

    /// Applies an orthogonal orbital rotation: new orbital `k` is
    /// `sum_i coeffs[i][k] * old_i` (columns of `coeffs` are the new orbitals).
    pub fn rotate(&self, coeffs: &nalgebra::DMatrix<f64>) -> Integrals {
        let n = self.n_orbitals;
        let c = |i: usize, k: usize| coeffs[(i, k)];
        let mut out = Integrals::zeros(n);
        out.core_energy = self.core_energy;
        for p in 0..n {
            for q in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += c(i, p) * self.h(i, j) * c(j, q);
                    }
                }
                out.one_body[p * n + q] = acc;
            }
        }
        // Four successive quarter transformations.
        let mut t = self.two_body.clone();
        for axis in 0..4 {
            let mut next = vec![0.0; t.len()];
            let stride = n.pow(3 - axis as u32);
            for idx in 0..t.len() {
                let k = (idx / stride) % n;
                let base = idx - k * stride;
                let mut acc = 0.0;
                for i in 0..n {
                    acc += c(i, k) * t[base + i * stride];
                }
                next[idx] = acc;
            }
            t = next;
        }
        out.two_body = t;
        out
    }
}

/// Parsed FCIDUMP content.
#[derive(Debug, Clone, PartialEq)]
pub struct FcidumpData {
    pub n_electrons: usize,
    /// Twice the S_z projection.
    pub ms2: i64,
    pub integrals: Integrals,
}

impl FcidumpData {
    pub fn n_orbitals(&self) -> usize {
        self.integrals.n_orbitals()
    }

    pub fn core_energy(&self) -> f64 {
        self.integrals.core_energy
    }

    /// `(n_alpha, n_beta)` implied by NELEC and MS2.
    pub fn sector(&self) -> Result<(usize, usize)> {
        let n = self.n_electrons as i64;
        if (n + self.ms2) % 2 != 0 || self.ms2.abs() > n {
            return Err(Error::InvalidSector(format!(
                "NELEC={} and MS2={} are inconsistent",
                self.n_electrons, self.ms2
            )));
        }
        Ok((((n + self.ms2) / 2) as usize, ((n - self.ms2) / 2) as usize))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        parse_fcidump(std::io::BufReader::new(f))
    }
}

fn fcidump_err(line: usize, message: impl Into<String>) -> Error {
    Error::Fcidump { line, message: message.into() }
}

/// Parses the `&FCI ... &END` namelist header followed by `value i j k l` records.
///
/// ORBSYM and ISYM are accepted but ignored.
pub fn parse_fcidump<R: BufRead>(reader: R) -> Result<FcidumpData> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    // Header namelist, possibly spanning several lines.
    let mut header = String::new();
    let mut header_start = 0;
    let mut header_done = false;
    for (lineno, line) in lines.by_ref() {
        let line = line?;
        let trimmed = line.trim();
        if header_start == 0 {
            if trimmed.is_empty() {
                continue;
            }
            if !trimmed.to_ascii_uppercase().starts_with("&FCI") {
                return Err(fcidump_err(lineno, "expected '&FCI' header"));
            }
            header_start = lineno;
            header.push_str(&trimmed[4..]);
        } else {
            header.push(' ');
            header.push_str(trimmed);
        }
        let upper = header.to_ascii_uppercase();
        if let Some(pos) = upper.find("&END").or_else(|| upper.find('/')) {
            header.truncate(pos);
            header_done = true;
            break;
        }
    }
    if !header_done {
        return Err(fcidump_err(header_start.max(1), "unterminated header namelist"));
    }

    let compact: String = header.chars().filter(|c| !c.is_whitespace()).collect();
    let (mut norb, mut nelec, mut ms2) = (None, None, 0_i64);
    for token in compact.split(',').filter(|t| !t.is_empty()) {
        let Some((key, value)) = token.split_once('=') else {
            continue; // continuation of a list value such as ORBSYM
        };
        let parse_int = |v: &str| {
            v.parse::<i64>()
                .map_err(|_| fcidump_err(header_start, format!("non-integer value '{v}' for {key}")))
        };
        match key.to_ascii_uppercase().as_str() {
            "NORB" => norb = Some(parse_int(value)?),
            "NELEC" => nelec = Some(parse_int(value)?),
            "MS2" => ms2 = parse_int(value)?,
            _ => {}
        }
    }
    let norb = norb.ok_or_else(|| fcidump_err(header_start, "missing NORB"))?;
    let nelec = nelec.ok_or_else(|| fcidump_err(header_start, "missing NELEC"))?;
    if norb <= 0 || norb as usize > crate::fock::MAX_ORBITALS {
        return Err(fcidump_err(header_start, format!("NORB={norb} out of range")));
    }
    if nelec < 0 || nelec > 2 * norb {
        return Err(fcidump_err(header_start, format!("NELEC={nelec} out of range")));
    }
    let n = norb as usize;
    let mut integrals = Integrals::zeros(n);

    for (lineno, line) in lines {
        let line = line?;
        let mut fields = line.split_whitespace();
        let Some(first) = fields.next() else { continue };
        let value: f64 = first
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| fcidump_err(lineno, format!("non-numeric value '{first}'")))?;
        let mut idx = [0usize; 4];
        for slot in idx.iter_mut() {
            let tok = fields
                .next()
                .ok_or_else(|| fcidump_err(lineno, "expected four orbital indices"))?;
            let v: i64 = tok
                .parse()
                .map_err(|_| fcidump_err(lineno, format!("non-integer index '{tok}'")))?;
            if v < 0 || v > norb {
                return Err(fcidump_err(lineno, format!("index {v} out of range 0..={norb}")));
            }
            *slot = v as usize;
        }
        if fields.next().is_some() {
            return Err(fcidump_err(lineno, "trailing tokens after four indices"));
        }
        match idx {
            [0, 0, 0, 0] => integrals.core_energy = value,
            [i, j, 0, 0] if i > 0 && j > 0 => integrals.set_h(i - 1, j - 1, value),
            [i, 0, 0, 0] if i > 0 => {} // orbital energy
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                integrals.set_eri(i - 1, j - 1, k - 1, l - 1, value)
            }
            _ => return Err(fcidump_err(lineno, format!("invalid index pattern {idx:?}"))),
        }
    }

    Ok(FcidumpData {
        n_electrons: nelec as usize,
        ms2,
        integrals,
    })
}

/// Folds the lowest `n_frozen` doubly occupied orbitals into the core energy
/// and an effective one-body operator over the remaining orbitals.
pub fn freeze_core(data: &FcidumpData, n_frozen: usize) -> Result<FcidumpData> {
    if n_frozen == 0 {
        return Ok(data.clone());
    }
    let (_, n_beta) = data.sector()?;
    if n_frozen > n_beta || n_frozen > data.n_orbitals() {
        return Err(Error::InvalidArgument(format!(
            "cannot freeze {n_frozen} orbitals: only {n_beta} doubly occupied orbitals available"
        )));
    }
    let full = &data.integrals;
    let n = full.n_orbitals();
    let na = n - n_frozen;
    let frozen = 0..n_frozen;

    let mut core = full.core_energy;
    for i in frozen.clone() {
        core += 2.0 * full.h(i, i);
        for j in frozen.clone() {
            core += 2.0 * full.eri(i, i, j, j) - full.eri(i, j, j, i);
        }
    }

    let mut out = Integrals::zeros(na);
    out.core_energy = core;
    for p in 0..na {
        for q in 0..na {
            let (fp, fq) = (p + n_frozen, q + n_frozen);
            let mut v = full.h(fp, fq);
            for i in frozen.clone() {
                v += 2.0 * full.eri(fp, fq, i, i) - full.eri(fp, i, i, fq);
            }
            out.one_body[p * na + q] = v;
            for r in 0..na {
                for s in 0..na {
                    let k = out.eri_index(p, q, r, s);
                    out.two_body[k] = full.eri(fp, fq, r + n_frozen, s + n_frozen);
                }
            }
        }
    }
    Ok(FcidumpData {
        n_electrons: data.n_electrons - 2 * n_frozen,
        ms2: data.ms2,
        integrals: out,
    })
}
