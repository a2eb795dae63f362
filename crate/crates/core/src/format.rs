//! Line-oriented text format for tripartite distributions.
//!
//! ```text
//! # comment
//! name: perfect-bit
//! x: 0 1
//! y: 0 1
//! z: e
//! normalize: false
//! 0 0 e 0.5
//! 1 1 e 1/2
//! ```
//!
//! Header lines are `key: value`; alphabets list whitespace-separated labels.
//! Every other non-blank line is an entry `x y z p` where `p` is a decimal or
//! a fraction `a/b`. Omitted triples have probability zero. Labels may not
//! contain whitespace, `:` or `#`.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::dist::{validate_tensor, Alphabet, TripartiteDistribution, NORMALIZATION_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFile {
    pub name: Option<String>,
    pub normalize: bool,
    pub dist: TripartiteDistribution,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_prob(s: &str, line: usize) -> Result<f64> {
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| parse_err(line, format!("bad numerator `{a}`")))?;
            let b: f64 = b.trim().parse().map_err(|_| parse_err(line, format!("bad denominator `{b}`")))?;
            if b == 0.0 {
                return Err(parse_err(line, "zero denominator"));
            }
            a / b
        }
        None => s.parse().map_err(|_| parse_err(line, format!("bad probability `{s}`")))?,
    };
    if !value.is_finite() {
        return Err(parse_err(line, format!("non-finite probability `{s}`")));
    }
    if value < 0.0 {
        return Err(parse_err(line, format!("negative probability `{s}`")));
    }
    Ok(value)
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || c == ':' || c == '#')
}

pub fn parse(text: &str) -> Result<DistributionFile> {
    let mut name = None;
    let mut normalize = false;
    let mut alphabets: [Option<Alphabet>; 3] = [None, None, None];
    let mut entries: Vec<(usize, [String; 3], f64)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once(':') {
            let key = key.trim();
            let value = value.trim();
            let slot = match key {
                "x" => Some(0),
                "y" => Some(1),
                "z" => Some(2),
                "name" => {
                    if name.is_some() {
                        return Err(parse_err(line_no, "duplicate `name` header"));
                    }
                    name = Some(value.to_string());
                    None
                }
                "normalize" => {
                    normalize = match value {
                        "true" => true,
                        "false" => false,
                        _ => return Err(parse_err(line_no, format!("`normalize` must be true or false, got `{value}`"))),
                    };
                    None
                }
                _ => return Err(parse_err(line_no, format!("unknown header `{key}`"))),
            };
            if let Some(k) = slot {
                if !entries.is_empty() {
                    return Err(parse_err(line_no, "alphabet declared after entries"));
                }
                if alphabets[k].is_some() {
                    return Err(parse_err(line_no, format!("duplicate `{key}` alphabet")));
                }
                let labels: Vec<&str> = value.split_whitespace().collect();
                if let Some(bad) = labels.iter().find(|l| !valid_label(l)) {
                    return Err(parse_err(line_no, format!("invalid label `{bad}`")));
                }
                let a = Alphabet::new(labels).map_err(|e| parse_err(line_no, e.to_string()))?;
                alphabets[k] = Some(a);
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(
                line_no,
                format!("expected `x y z p`, found {} fields", fields.len()),
            ));
        }
        let p = parse_prob(fields[3], line_no)?;
        entries.push((line_no, [fields[0].into(), fields[1].into(), fields[2].into()], p));
    }

    let [x, y, z] = alphabets;
    let missing = |v: &str| parse_err(0, format!("missing `{v}` alphabet"));
    let (x, y, z) = (x.ok_or_else(|| missing("x"))?, y.ok_or_else(|| missing("y"))?, z.ok_or_else(|| missing("z"))?);
    let (nx, ny, nz) = (x.len(), y.len(), z.len());
    let mut p = vec![0.0; nx * ny * nz];
    let mut seen = HashSet::new();
    for (line_no, [a, b, c], v) in entries {
        let lookup = |alpha: &Alphabet, s: &str, var: &str| {
            alpha
                .index_of(s)
                .ok_or_else(|| parse_err(line_no, format!("unknown {var} symbol `{s}`")))
        };
        let (xi, yi, zi) = (lookup(&x, &a, "x")?, lookup(&y, &b, "y")?, lookup(&z, &c, "z")?);
        if !seen.insert((xi, yi, zi)) {
            return Err(parse_err(line_no, format!("duplicate entry ({a}, {b}, {c})")));
        }
        p[(xi * ny + yi) * nz + zi] = v;
    }

    if normalize {
        let total: f64 = p.iter().sum();
        if total <= 0.0 || total.is_nan() {
            return Err(Error::EmptySupport);
        }
        for v in &mut p {
            *v /= total;
        }
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Normalization {
            total,
            deviation: (total - 1.0).abs(),
        });
    }
    validate_tensor([nx, ny, nz], &p)?;
    Ok(DistributionFile {
        name,
        normalize,
        dist: TripartiteDistribution::new(x, y, z, p)?,
    })
}

/// Writes the nonzero entries in index order. Probabilities use the
/// shortest decimal that parses back to the same `f64`.
pub fn serialize(name: Option<&str>, d: &TripartiteDistribution) -> String {
    let mut out = String::new();
    if let Some(n) = name {
        let _ = writeln!(out, "name: {n}");
    }
    for (key, a) in [("x", d.x()), ("y", d.y()), ("z", d.z())] {
        let _ = writeln!(out, "{key}: {}", a.labels().join(" "));
    }
    let [nx, ny, nz] = d.shape();
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let v = d.get(x, y, z);
                if v != 0.0 {
                    let _ = writeln!(out, "{} {} {} {v:?}", d.x().label(x), d.y().label(y), d.z().label(z));
                }
            }
        }
    }
    out
}

impl DistributionFile {
    pub fn to_text(&self) -> String {
        serialize(self.name.as_deref(), &self.dist)
    }
}
