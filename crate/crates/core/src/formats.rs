//! Plain-text file formats and the state-spec mini-language.
//!
//! | format  | header                              | body |
//! |---------|-------------------------------------|------|
//! | `DMAT`  | `DMAT v1 N=<n> d=<d>`               | `d^N` rows of `d^N` whitespace-separated `re,im` |
//! | `PDIST` | `PDIST v1 N=<n> d=<d>`              | `<digits>,<p>` per outcome; unlisted outcomes are 0 |
//! | `KRAUS` | `KRAUS v1 d_in=<> d_out=<> k=<>`    | `k` blocks of `d_out` rows of `d_in` entries `re,im` |
//! | Pauli   | none                                | one generator per line, e.g. `+XZZXI` |
//! | edges   | optional `N=<n>`                    | `i j` per line, 0-based vertices |
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::channels::KrausChannel;
use crate::error::{invalid, Error, Result};
use crate::info::ProbTensor;
use crate::matrix::{ComplexMatrix, C64};
use crate::state::{register_dim, DensityOperator, StateVector};
use crate::zoo::{
    ame_state, classical_preset, dicke, ghz, graph_state, kuniform_mixed, nc_state, smolin,
    stabilizer_state, w_state, GraphSpec, PauliString,
};

const PDIST_SUM_TOL: f64 = 1e-9;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-empty, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses `MAGIC v1 key=value ...`, returning the values in `keys` order.
fn parse_header(line: usize, text: &str, magic: &str, keys: &[&str]) -> Result<Vec<usize>> {
    let mut words = text.split_whitespace();
    if words.next() != Some(magic) || words.next() != Some("v1") {
        return Err(parse_err(line, format!("expected header `{magic} v1 ...`")));
    }
    let pairs: Vec<(&str, &str)> = words
        .map(|w| w.split_once('=').ok_or_else(|| parse_err(line, format!("malformed header field `{w}`"))))
        .collect::<Result<_>>()?;
    keys.iter()
        .map(|k| {
            let (_, v) = pairs
                .iter()
                .find(|(key, _)| key == k)
                .ok_or_else(|| parse_err(line, format!("header lacks `{k}=`")))?;
            v.parse()
                .map_err(|_| parse_err(line, format!("`{k}={v}` is not a nonnegative integer")))
        })
        .collect()
}

fn parse_complex(line: usize, token: &str) -> Result<C64> {
    let (re, im) = token
        .split_once(',')
        .ok_or_else(|| parse_err(line, format!("entry `{token}` is not `re,im`")))?;
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| parse_err(line, format!("`{s}` is not a number")))
    };
    Ok(C64::new(num(re)?, num(im)?))
}

fn parse_matrix_rows<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    rows: usize,
    cols: usize,
    last_line: usize,
) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for r in 0..rows {
        let (ln, text) = lines
            .next()
            .ok_or_else(|| parse_err(last_line, format!("expected {rows} matrix rows, found {r}")))?;
        let entries: Vec<&str> = text.split_whitespace().collect();
        if entries.len() != cols {
            return Err(parse_err(ln, format!("expected {cols} entries, found {}", entries.len())));
        }
        for (c, tok) in entries.iter().enumerate() {
            m[(r, c)] = parse_complex(ln, tok)?;
        }
    }
    Ok(m)
}

fn write_matrix_rows(out: &mut String, m: &ComplexMatrix) {
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|c| format!("{:e},{:e}", m[(r, c)].re, m[(r, c)].im))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

fn ensure_consumed<'a>(mut lines: impl Iterator<Item = (usize, &'a str)>) -> Result<()> {
    match lines.next() {
        Some((ln, _)) => Err(parse_err(ln, "unexpected trailing content")),
        None => Ok(()),
    }
}

/// Parses a `DMAT v1` document; `validate` applies the density-operator checks.
pub fn parse_dmat(text: &str, validate: bool) -> Result<DensityOperator> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let hv = parse_header(ln, header, "DMAT", &["N", "d"])?;
    let dim = register_dim(hv[0], hv[1])?;
    let m = parse_matrix_rows(&mut lines, dim, dim, ln)?;
    ensure_consumed(lines)?;
    if validate {
        DensityOperator::new(hv[0], hv[1], m)
    } else {
        DensityOperator::new_unchecked(hv[0], hv[1], m)
    }
}

pub fn write_dmat(rho: &DensityOperator) -> String {
    let mut out = format!("DMAT v1 N={} d={}\n", rho.num_parties(), rho.local_dim());
    write_matrix_rows(&mut out, rho.matrix());
    out
}

pub fn parse_pdist(text: &str) -> Result<ProbTensor> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let hv = parse_header(ln, header, "PDIST", &["N", "d"])?;
    let (n, d) = (hv[0], hv[1]);
    if d > 10 {
        return Err(parse_err(ln, "outcome digits are single characters, so d <= 10"));
    }
    let dim = register_dim(n, d)?;
    let mut probs = vec![0.0; dim];
    let mut seen = vec![false; dim];
    for (ln, text) in lines {
        let (digits, p) = text
            .split_once(',')
            .ok_or_else(|| parse_err(ln, "expected `<digits>,<probability>`"))?;
        let digits = digits.trim();
        if digits.chars().count() != n {
            return Err(parse_err(ln, format!("outcome `{digits}` does not have {n} digits")));
        }
        let mut index = 0;
        for ch in digits.chars() {
            let v = ch
                .to_digit(10)
                .filter(|&v| (v as usize) < d)
                .ok_or_else(|| parse_err(ln, format!("`{ch}` is not a digit below {d}")))?;
            index = index * d + v as usize;
        }
        if seen[index] {
            return Err(parse_err(ln, format!("outcome `{digits}` listed twice")));
        }
        seen[index] = true;
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| parse_err(ln, format!("`{}` is not a number", p.trim())))?;
        if !p.is_finite() || p < 0.0 {
            return Err(parse_err(ln, format!("probability {p} is negative or not finite")));
        }
        probs[index] = p;
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PDIST_SUM_TOL {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
    }
    ProbTensor::from_weights(n, d, probs)
}

pub fn write_pdist(p: &ProbTensor) -> String {
    let (n, d) = (p.num_vars(), p.local_dim());
    let mut out = format!("PDIST v1 N={n} d={d}\n");
    for (x, &v) in p.probs().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let mut digits = vec![0; n];
        let mut y = x;
        for k in (0..n).rev() {
            digits[k] = y % d;
            y /= d;
        }
        let s: String = digits.iter().map(|&v| char::from_digit(v as u32, 10).unwrap()).collect();
        let _ = writeln!(out, "{s},{v:e}");
    }
    out
}

pub fn parse_kraus(text: &str) -> Result<KrausChannel> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let hv = parse_header(ln, header, "KRAUS", &["d_in", "d_out", "k"])?;
    let (d_in, d_out, k) = (hv[0], hv[1], hv[2]);
    let ops = (0..k)
        .map(|_| parse_matrix_rows(&mut lines, d_out, d_in, ln))
        .collect::<Result<Vec<_>>>()?;
    ensure_consumed(lines)?;
    KrausChannel::new(d_in, d_out, ops)
}

pub fn write_kraus(ch: &KrausChannel) -> String {
    let mut out = format!(
        "KRAUS v1 d_in={} d_out={} k={}\n",
        ch.d_in(),
        ch.d_out(),
        ch.kraus_ops().len()
    );
    for k in ch.kraus_ops() {
        write_matrix_rows(&mut out, k);
    }
    out
}

pub fn parse_paulis(text: &str) -> Result<Vec<PauliString>> {
    let gens: Vec<PauliString> = content_lines(text)
        .map(|(ln, l)| {
            l.parse::<PauliString>()
                .map_err(|e| parse_err(ln, e.to_string()))
        })
        .collect::<Result<_>>()?;
    if gens.is_empty() {
        return Err(parse_err(1, "no generators"));
    }
    Ok(gens)
}

pub fn parse_edges(text: &str) -> Result<GraphSpec> {
    let mut declared = None;
    let mut edges = Vec::new();
    for (ln, l) in content_lines(text) {
        if let Some(v) = l.strip_prefix("N=") {
            if declared.is_some() || !edges.is_empty() {
                return Err(parse_err(ln, "`N=` must be the first line"));
            }
            declared = Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| parse_err(ln, format!("`{v}` is not a vertex count")))?,
            );
            continue;
        }
        let ends: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln, format!("`{t}` is not a vertex index"))))
            .collect::<Result<_>>()?;
        if ends.len() != 2 {
            return Err(parse_err(ln, "expected `i j`"));
        }
        edges.push((ends[0], ends[1]));
    }
    let n = declared.unwrap_or_else(|| edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0));
    GraphSpec::new(n, edges)
}

/// A parsed state description: pure, mixed, or classical.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Pure(StateVector),
    Mixed(DensityOperator),
    Classical(ProbTensor),
}

impl LoadedState {
    pub fn num_parties(&self) -> usize {
        match self {
            LoadedState::Pure(s) => s.num_parties(),
            LoadedState::Mixed(r) => r.num_parties(),
            LoadedState::Classical(p) => p.num_vars(),
        }
    }

    /// The density operator (diagonal for classical inputs).
    pub fn to_density(&self) -> DensityOperator {
        match self {
            LoadedState::Pure(s) => s.to_density(),
            LoadedState::Mixed(r) => r.clone(),
            LoadedState::Classical(p) => p.to_density(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterShape {
    Linear,
    Ring,
}

/// One term of the mini-language, e.g. `ghz:N=4,d=2`, `cluster:ring,N=5`, `dmat:@rho.dmat`.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Ghz { n: usize, d: usize },
    Dicke { n: usize, e: usize },
    W { n: usize },
    Cluster { shape: ClusterShape, n: usize },
    Graph(PathBuf),
    Smolin { n: usize },
    KUniform { n: usize, d: usize },
    Nc { n: usize },
    Stabilizer(PathBuf),
    Ame { n: usize, d: usize },
    PdistPreset(String),
    PdistFile(PathBuf),
    DmatFile(PathBuf),
}

/// `key=value` and bare words after the colon.
struct Args<'a> {
    words: Vec<&'a str>,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Args<'a> {
    fn parse(rest: &'a str) -> Self {
        let mut words = Vec::new();
        let mut pairs = Vec::new();
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once('=') {
                Some((k, v)) => pairs.push((k.trim(), v.trim())),
                None => words.push(part),
            }
        }
        Self { words, pairs }
    }

    fn int(&self, key: &str) -> Result<usize> {
        self.int_or(key, None)
    }

    fn int_or(&self, key: &str, default: Option<usize>) -> Result<usize> {
        match self.pairs.iter().find(|(k, _)| k.eq_ignore_ascii_case(key)) {
            Some((_, v)) => v
                .parse()
                .map_err(|_| parse_err(1, format!("`{key}={v}` is not a nonnegative integer"))),
            None => default.ok_or_else(|| parse_err(1, format!("missing `{key}=`"))),
        }
    }
}

fn file_arg(kind: &str, rest: &str) -> Result<PathBuf> {
    rest.strip_prefix('@')
        .filter(|p| !p.is_empty())
        .map(PathBuf::from)
        .ok_or_else(|| parse_err(1, format!("`{kind}:` expects `@<path>`")))
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let args = Args::parse(rest);
        let kind = kind.to_ascii_lowercase();
        Ok(match kind.as_str() {
            "ghz" => StateSpec::Ghz {
                n: args.int("N")?,
                d: args.int_or("d", Some(2))?,
            },
            "dicke" => StateSpec::Dicke {
                n: args.int("N")?,
                e: args.int("e")?,
            },
            "w" => StateSpec::W { n: args.int("N")? },
            "cluster" => {
                let shape = match args.words.first().map(|w| w.to_ascii_lowercase()).as_deref() {
                    Some("linear") | Some("line") | Some("path") => ClusterShape::Linear,
                    Some("ring") | Some("cycle") => ClusterShape::Ring,
                    other => {
                        return Err(parse_err(1, format!("unknown cluster shape {other:?}; use linear or ring")))
                    }
                };
                StateSpec::Cluster {
                    shape,
                    n: args.int("N")?,
                }
            }
            "graph" => StateSpec::Graph(file_arg("graph", rest)?),
            "smolin" => StateSpec::Smolin { n: args.int("N")? },
            "kuniform" => StateSpec::KUniform {
                n: args.int("N")?,
                d: args.int_or("d", Some(2))?,
            },
            "nc" => StateSpec::Nc { n: args.int("N")? },
            "stab" => StateSpec::Stabilizer(file_arg("stab", rest)?),
            "ame" => {
                let nums: Vec<usize> = args
                    .words
                    .iter()
                    .map(|w| w.parse().map_err(|_| parse_err(1, format!("`{w}` is not an integer"))))
                    .collect::<Result<_>>()?;
                match nums.as_slice() {
                    [n, d] => StateSpec::Ame { n: *n, d: *d },
                    [n] => StateSpec::Ame { n: *n, d: 2 },
                    _ => return Err(parse_err(1, "`ame:` expects `<N>,<d>`")),
                }
            }
            "pdist" if rest.starts_with('@') => StateSpec::PdistFile(file_arg("pdist", rest)?),
            "pdist" if !rest.is_empty() => StateSpec::PdistPreset(rest.to_string()),
            "dmat" => StateSpec::DmatFile(file_arg("dmat", rest)?),
            _ => return Err(parse_err(1, format!("unknown state kind in `{s}`"))),
        })
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

impl StateSpec {
    /// Builds the state, reading referenced files. `validate` applies to `DMAT` input.
    pub fn load(&self, validate: bool) -> Result<LoadedState> {
        use LoadedState::*;
        Ok(match self {
            StateSpec::Ghz { n, d } => Pure(ghz(*n, *d)?),
            StateSpec::Dicke { n, e } => Pure(dicke(*n, *e)?),
            StateSpec::W { n } => Pure(w_state(*n)?),
            StateSpec::Cluster { shape, n } => {
                if *n < 2 || (*shape == ClusterShape::Ring && *n < 3) {
                    return Err(invalid(format!("cluster needs more vertices, got {n}")));
                }
                let g = match shape {
                    ClusterShape::Linear => GraphSpec::path(*n),
                    ClusterShape::Ring => GraphSpec::cycle(*n),
                };
                Pure(graph_state(&g)?)
            }
            StateSpec::Graph(p) => Pure(graph_state(&parse_edges(&read(p)?)?)?),
            StateSpec::Smolin { n } => Mixed(smolin(*n)?),
            StateSpec::KUniform { n, d } => Mixed(kuniform_mixed(*n, *d)?),
            StateSpec::Nc { n } => Mixed(nc_state(*n)?),
            StateSpec::Stabilizer(p) => {
                let gens = parse_paulis(&read(p)?)?;
                Mixed(stabilizer_state(gens[0].len(), &gens)?)
            }
            StateSpec::Ame { n, d } => {
                if *d != 2 {
                    return Err(invalid("AME presets exist for qubits only"));
                }
                Mixed(ame_state(*n)?)
            }
            StateSpec::PdistPreset(name) => Classical(classical_preset(name)?),
            StateSpec::PdistFile(p) => Classical(parse_pdist(&read(p)?)?),
            StateSpec::DmatFile(p) => Mixed(parse_dmat(&read(p)?, validate)?),
        })
    }
}
