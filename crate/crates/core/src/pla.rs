//! Reader for two-level PLA descriptions (espresso format).
//!
//! Only the parts needed to build one function per output are kept: input
//! cubes and, per output, the ON-set (`1`) and DC-set (`-` or `~`). A `0` in
//! the output part contributes nothing; the OFF-set is the complement.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct PlaError {
    pub line: usize,
    pub kind: PlaErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlaErrorKind {
    #[error("missing .i directive")]
    MissingInputs,
    #[error("missing .o directive")]
    MissingOutputs,
    #[error("bad value for {directive}: {value:?}")]
    BadValue { directive: String, value: String },
    #[error("cube has {got} input columns, expected {expected}")]
    InputWidth { expected: usize, got: usize },
    #[error("cube has {got} output columns, expected {expected}")]
    OutputWidth { expected: usize, got: usize },
    #[error("invalid character {0:?} in cube")]
    BadChar(char),
    #[error(".p declares {declared} cubes, found {found}")]
    CubeCount { declared: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaCube {
    /// Input part over `0`, `1`, `-`.
    pub inputs: String,
    /// Output part over `0`, `1`, `-`, `~`.
    pub outputs: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlaFile {
    pub num_inputs: usize,
    pub num_outputs: usize,
    pub declared_cubes: Option<usize>,
    pub input_labels: Vec<String>,
    pub output_labels: Vec<String>,
    pub kind: Option<String>,
    pub cubes: Vec<PlaCube>,
}

impl PlaFile {
    fn output_cubes(&self, output: usize, marks: &[u8]) -> Vec<&str> {
        self.cubes
            .iter()
            .filter(|c| marks.contains(&c.outputs.as_bytes()[output]))
            .map(|c| c.inputs.as_str())
            .collect()
    }

    pub fn onset(&self, output: usize) -> Vec<&str> {
        self.output_cubes(output, b"1")
    }

    pub fn dcset(&self, output: usize) -> Vec<&str> {
        self.output_cubes(output, b"-~")
    }
}

fn parse_count(line: usize, directive: &str, value: Option<&str>) -> Result<usize, PlaError> {
    value.and_then(|v| v.parse().ok()).ok_or_else(|| PlaError {
        line,
        kind: PlaErrorKind::BadValue {
            directive: directive.to_string(),
            value: value.unwrap_or("").to_string(),
        },
    })
}

pub fn parse_pla(text: &str) -> Result<PlaFile, PlaError> {
    let mut pla = PlaFile::default();
    let (mut inputs, mut outputs) = (None, None);
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |kind| PlaError { line, kind };
        if let Some(directive) = content.strip_prefix('.') {
            let mut words = directive.split_whitespace();
            let name = words.next().unwrap_or("");
            match name {
                "i" => inputs = Some(parse_count(line, ".i", words.next())?),
                "o" => outputs = Some(parse_count(line, ".o", words.next())?),
                "p" => pla.declared_cubes = Some(parse_count(line, ".p", words.next())?),
                "ilb" => pla.input_labels = words.map(String::from).collect(),
                "ob" => pla.output_labels = words.map(String::from).collect(),
                "type" => pla.kind = words.next().map(String::from),
                "e" | "end" => break,
                _ => log::warn!("line {line}: ignoring directive .{name}"),
            }
            continue;
        }
        let n = inputs.ok_or(err(PlaErrorKind::MissingInputs))?;
        let m = outputs.ok_or(err(PlaErrorKind::MissingOutputs))?;
        // input and output parts may be separated by spaces or written
        // back to back
        let packed: String = content.split_whitespace().collect();
        if packed.len() != n + m {
            let got_in = content.split_whitespace().next().map_or(0, str::len);
            return Err(err(if got_in != n {
                PlaErrorKind::InputWidth {
                    expected: n,
                    got: got_in,
                }
            } else {
                PlaErrorKind::OutputWidth {
                    expected: m,
                    got: packed.len() - n,
                }
            }));
        }
        let (ins, outs) = packed.split_at(n);
        if let Some(c) = ins.chars().find(|c| !matches!(c, '0' | '1' | '-')) {
            return Err(err(PlaErrorKind::BadChar(c)));
        }
        if let Some(c) = outs.chars().find(|c| !matches!(c, '0' | '1' | '-' | '~')) {
            return Err(err(PlaErrorKind::BadChar(c)));
        }
        pla.cubes.push(PlaCube {
            inputs: ins.to_string(),
            outputs: outs.to_string(),
        });
    }
    let end = |kind| PlaError {
        line: last_line,
        kind,
    };
    pla.num_inputs = inputs.ok_or(end(PlaErrorKind::MissingInputs))?;
    pla.num_outputs = outputs.ok_or(end(PlaErrorKind::MissingOutputs))?;
    if let Some(declared) = pla.declared_cubes {
        if declared != pla.cubes.len() {
            return Err(end(PlaErrorKind::CubeCount {
                declared,
                found: pla.cubes.len(),
            }));
        }
    }
    Ok(pla)
}
