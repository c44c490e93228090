//! Text files: packet columns, matrices, channel realizations and the scheme config.
//!
//! Packet files hold one GF(q^m) element per line as `m` base-q digits, lowest
//! degree first. Matrix files start with a `rows cols` line followed by one line
//! of digits per row. In both, `#` starts a comment and blank lines are ignored.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldParams, Gf, PrimeField};
use crate::linalg::MatrixFq;
use crate::network_sim::ChannelRealization;
use crate::secure_scheme::SchemeParams;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

pub fn parse_elements(field: &Gf, text: &str) -> Result<Vec<Elem>> {
    content_lines(text)
        .map(|(no, line)| {
            field
                .parse_element(line)
                .map_err(|e| Error::Parse(format!("line {no}: {e}")))
        })
        .collect()
}

pub fn format_elements(field: &Gf, elems: &[Elem]) -> String {
    elems.iter().map(|&e| field.format_element(e) + "\n").collect()
}

/// Reads exactly `expected` elements.
pub fn parse_packet(field: &Gf, text: &str, expected: usize) -> Result<Vec<Elem>> {
    let elems = parse_elements(field, text)?;
    if elems.len() != expected {
        return Err(Error::Parse(format!("expected {expected} element lines, found {}", elems.len())));
    }
    Ok(elems)
}

fn parse_row(field: PrimeField, line: &str, cols: usize, no: usize) -> Result<Vec<u32>> {
    let tokens: Vec<&str> = if line.contains(char::is_whitespace) {
        line.split_whitespace().collect()
    } else {
        (0..line.len()).map(|i| &line[i..i + 1]).collect()
    };
    if tokens.len() != cols {
        return Err(Error::Parse(format!("line {no}: expected {cols} digits, found {}", tokens.len())));
    }
    tokens
        .iter()
        .map(|t| {
            t.parse::<u32>()
                .ok()
                .filter(|&d| d < field.q())
                .ok_or_else(|| Error::Parse(format!("line {no}: bad digit {t:?}")))
        })
        .collect()
}

/// Reads consecutive matrices from one text.
pub fn parse_matrices(field: PrimeField, text: &str) -> Result<Vec<MatrixFq>> {
    let mut lines = content_lines(text);
    let mut out = Vec::new();
    while let Some((no, header)) = lines.next() {
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("line {no}: bad matrix header {header:?}"))))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse(format!("line {no}: matrix header must be `rows cols`")));
        };
        let mut data = Vec::with_capacity(rows * cols);
        if cols > 0 {
            for r in 0..rows {
                let (no, line) = lines
                    .next()
                    .ok_or_else(|| Error::Parse(format!("matrix ends after {r} of {rows} rows")))?;
                data.extend(parse_row(field, line, cols, no)?);
            }
        }
        out.push(MatrixFq::from_vec(field, rows, cols, data)?);
    }
    Ok(out)
}

pub fn parse_matrix(field: PrimeField, text: &str) -> Result<MatrixFq> {
    let mut ms = parse_matrices(field, text)?;
    if ms.len() != 1 {
        return Err(Error::Parse(format!("expected one matrix, found {}", ms.len())));
    }
    Ok(ms.remove(0))
}

pub fn format_matrix(m: &MatrixFq) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    if m.cols() == 0 {
        return out;
    }
    let sep = if m.field().q() > 10 { " " } else { "" };
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(u32::to_string).collect();
        out.push_str(&row.join(sep));
        out.push('\n');
    }
    out
}

/// `A`, `D`, `Z`, `B` in that order.
pub fn parse_realization(field: PrimeField, text: &str) -> Result<ChannelRealization> {
    let ms = parse_matrices(field, text)?;
    let Ok([a, d, z, b]) = <[MatrixFq; 4]>::try_from(ms) else {
        return Err(Error::Parse("a realization file holds four matrices: A, D, Z, B".into()));
    };
    Ok(ChannelRealization { a, d, z, b })
}

pub fn format_realization(real: &ChannelRealization) -> String {
    let mut out = String::new();
    for (name, m) in [("A", &real.a), ("D", &real.d), ("Z", &real.z), ("B", &real.b)] {
        out.push_str(&format!("# {name}\n"));
        out.push_str(&format_matrix(m));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DigitList {
    Text(String),
    List(Vec<u32>),
}

impl DigitList {
    fn digits(&self) -> Result<Vec<u32>> {
        match self {
            DigitList::List(v) => Ok(v.clone()),
            DigitList::Text(s) => s
                .trim()
                .chars()
                .map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad modulus digit {c:?}"))))
                .collect(),
        }
    }
}

/// The scheme parameter file (TOML).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub q: u32,
    pub m: usize,
    /// Base-q digits, lowest degree first, including the leading 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<DigitList>,
    pub n: usize,
    pub t: usize,
    pub mu: usize,
    pub k: usize,
    /// Evaluation points in element text form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SchemeConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Field and parameters; validation against the rate bound is left to `SchemeInstance::build`.
    pub fn params(&self) -> Result<SchemeParams> {
        let field = match &self.modulus {
            Some(d) => FieldParams::new(self.q, self.m, d.digits()?)?,
            None => FieldParams::with_default_modulus(self.q, self.m)?,
        };
        let mut params = SchemeParams::new(field.clone(), self.n, self.t, self.mu, self.k);
        if let Some(points) = &self.points {
            let gf = Gf::new(field);
            params.points = Some(points.iter().map(|p| gf.parse_element(p)).collect::<Result<_>>()?);
        }
        Ok(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_lines() {
        let f = Gf::binary(4).unwrap();
        let text = "# message\n1010\n\n  0001  # x^3\n";
        let e = parse_elements(&f, text).unwrap();
        assert_eq!(e, vec![f.element(5).unwrap(), f.element(8).unwrap()]);
        assert_eq!(format_elements(&f, &e), "1010\n0001\n");
        assert!(parse_elements(&f, "1012\n").is_err());
        assert!(parse_elements(&f, "101\n").is_err());
        assert!(parse_packet(&f, "1010\n", 2).is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let f = PrimeField::new(2).unwrap();
        let m = MatrixFq::from_rows(f, &[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let text = format_matrix(&m);
        assert_eq!(text, "2 3\n101\n011\n");
        assert_eq!(parse_matrix(f, &text).unwrap(), m);
        assert_eq!(parse_matrix(f, "2 3\n1 0 1\n0 1 1\n").unwrap(), m);
        assert!(parse_matrix(f, "2 3\n101\n").is_err());
        assert!(parse_matrix(f, "2 3\n101\n021\n").is_err());
        let big = PrimeField::new(13).unwrap();
        let m = MatrixFq::from_rows(big, &[vec![12, 0], vec![3, 11]]).unwrap();
        assert_eq!(parse_matrix(big, &format_matrix(&m)).unwrap(), m);
    }

    #[test]
    fn realization_round_trip_with_empty_blocks() {
        let f = PrimeField::new(2).unwrap();
        let real = ChannelRealization {
            a: MatrixFq::identity(f, 3),
            d: MatrixFq::zeros(f, 3, 0),
            z: MatrixFq::zeros(f, 0, 3),
            b: MatrixFq::from_rows(f, &[vec![1, 1, 0]]).unwrap(),
        };
        assert_eq!(parse_realization(f, &format_realization(&real)).unwrap(), real);
    }

    #[test]
    fn config() {
        let text = "q = 2\nm = 4\nmodulus = \"11001\"\nn = 4\nt = 1\nmu = 1\nk = 1\nseed = 7\n";
        let c = SchemeConfig::parse(text).unwrap();
        assert_eq!(c.seed, Some(7));
        let p = c.params().unwrap();
        assert_eq!(p.field.modulus(), &[1, 1, 0, 0, 1]);
        assert_eq!(SchemeConfig::parse(&c.to_toml()).unwrap(), c);
        assert!(SchemeConfig::parse("q = 2\nm = 4\n").is_err());
        assert!(SchemeConfig::parse(&format!("{text}extra = 1\n")).is_err());
        let reducible = text.replace("11001", "10101");
        assert!(SchemeConfig::parse(&reducible).unwrap().params().is_err());
        let listed = "q = 2\nm = 4\nmodulus = [1, 1, 0, 0, 1]\nn = 4\nt = 1\nmu = 1\nk = 1\npoints = [\"1000\", \"0100\", \"0010\", \"0001\"]\n";
        let p = SchemeConfig::parse(listed).unwrap().params().unwrap();
        assert_eq!(p.points.unwrap().len(), 4);
    }
}
