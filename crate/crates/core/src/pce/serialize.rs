//! Versioned text serialization of fitted models.
//!
//! The format is line-based and self-describing; floats are written with
//! Rust's shortest round-trip formatting, so save/load is bit-exact. The
//! univariate families are rebuilt from the marginals on load (the
//! construction is deterministic), keeping files small.

use super::{BasisSet, FitDiagnostics, MultiIndex, PceModel, UnivariateFamily};
use crate::error::{CoreError, Result};
use crate::space::{Family, InputSpace, Marginal};
use std::io::{BufRead, BufReader, Read, Write};

const MAGIC: &str = "icegsa-pce v1";

pub fn save_model<W: Write>(model: &PceModel, mut w: W) -> Result<()> {
    writeln!(w, "{MAGIC}")?;
    let m = model.space.dim();
    writeln!(w, "dim {m}")?;
    writeln!(w, "order {}", model.diagnostics.order)?;
    writeln!(w, "q {}", model.diagnostics.q)?;
    writeln!(w, "output_mean {}", model.out_mean)?;
    writeln!(w, "output_scale {}", model.out_scale)?;
    writeln!(w, "r2_train {}", model.diagnostics.r2_train)?;
    writeln!(w, "loo {}", model.diagnostics.loo_rel)?;
    writeln!(
        w,
        "heldout_r2 {}",
        model.diagnostics.heldout_r2.map_or("none".to_string(), |v| v.to_string())
    )?;
    write!(w, "anchor")?;
    for a in model.space.anchor() {
        write!(w, " {a}")?;
    }
    writeln!(w)?;
    for (j, marg) in model.space.marginals().iter().enumerate() {
        match marg.family() {
            Family::Uniform { lo, hi } => {
                writeln!(w, "marginal {j} uniform {lo} {hi} {}", marg.name())?
            }
            Family::Gaussian { mean, std } => {
                writeln!(w, "marginal {j} gaussian {mean} {std} {}", marg.name())?
            }
            Family::Empirical { values } => {
                write!(w, "marginal {j} empirical {}", values.len())?;
                for v in values {
                    write!(w, " {v}")?;
                }
                writeln!(w, " {}", marg.name())?;
            }
        }
    }
    writeln!(w, "terms {}", model.basis.cardinality())?;
    for (idx, beta) in model.basis.indices.iter().zip(&model.beta) {
        for g in &idx.0 {
            write!(w, "{g} ")?;
        }
        writeln!(w, "{beta}")?;
    }
    writeln!(w, "end")?;
    Ok(())
}

struct LineReader<R: BufRead> {
    inner: R,
    line_no: usize,
}

impl<R: BufRead> LineReader<R> {
    fn next_line(&mut self) -> Result<String> {
        let mut buf = String::new();
        loop {
            buf.clear();
            let n = self.inner.read_line(&mut buf)?;
            self.line_no += 1;
            if n == 0 {
                return Err(CoreError::ModelParse {
                    line: self.line_no,
                    msg: "unexpected end of file".into(),
                });
            }
            let trimmed = buf.trim_end();
            if !trimmed.is_empty() {
                return Ok(trimmed.to_string());
            }
        }
    }

    fn err(&self, msg: impl Into<String>) -> CoreError {
        CoreError::ModelParse { line: self.line_no, msg: msg.into() }
    }
}

fn parse_kv<'a, R: BufRead>(r: &LineReader<R>, key: &str, line: &'a str) -> Result<&'a str> {
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| r.err(format!("expected '{key} <value>', got '{line}'")))
}

fn parse_f64<R: BufRead>(r: &LineReader<R>, s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| r.err(format!("invalid float '{s}'")))
}

pub fn load_model<R: Read>(reader: R) -> Result<PceModel> {
    let mut r = LineReader { inner: BufReader::new(reader), line_no: 0 };

    let magic = r.next_line()?;
    if magic != MAGIC {
        return Err(r.err(format!("unknown model header '{magic}'")));
    }
    let line = r.next_line()?;
    let m: usize = parse_kv(&r, "dim", &line)?
        .parse()
        .map_err(|_| r.err("invalid dim"))?;
    let line = r.next_line()?;
    let order: u32 = parse_kv(&r, "order", &line)?
        .parse()
        .map_err(|_| r.err("invalid order"))?;
    let line = r.next_line()?;
    let q = parse_f64(&r, parse_kv(&r, "q", &line)?)?;
    let line = r.next_line()?;
    let out_mean = parse_f64(&r, parse_kv(&r, "output_mean", &line)?)?;
    let line = r.next_line()?;
    let out_scale = parse_f64(&r, parse_kv(&r, "output_scale", &line)?)?;
    let line = r.next_line()?;
    let r2_train = parse_f64(&r, parse_kv(&r, "r2_train", &line)?)?;
    let line = r.next_line()?;
    let loo_rel = parse_f64(&r, parse_kv(&r, "loo", &line)?)?;
    let line = r.next_line()?;
    let heldout_raw = parse_kv(&r, "heldout_r2", &line)?.to_string();
    let heldout_r2 =
        if heldout_raw == "none" { None } else { Some(parse_f64(&r, &heldout_raw)?) };

    let line = r.next_line()?;
    let anchor_parts = parse_kv(&r, "anchor", &line)?.to_string();
    let anchor: Vec<f64> = anchor_parts
        .split_whitespace()
        .map(|s| parse_f64(&r, s))
        .collect::<Result<_>>()?;
    if anchor.len() != m {
        return Err(r.err(format!("anchor has {} entries, expected {m}", anchor.len())));
    }

    let mut marginals = Vec::with_capacity(m);
    for j in 0..m {
        let line = r.next_line()?;
        let rest = parse_kv(&r, &format!("marginal {j}"), &line)?;
        let mut parts = rest.splitn(2, ' ');
        let kind = parts.next().ok_or_else(|| r.err("missing marginal kind"))?;
        let payload = parts.next().ok_or_else(|| r.err("missing marginal payload"))?;
        let marg = match kind {
            "uniform" => {
                let mut it = payload.splitn(3, ' ');
                let lo = parse_f64(&r, it.next().ok_or_else(|| r.err("missing lo"))?)?;
                let hi = parse_f64(&r, it.next().ok_or_else(|| r.err("missing hi"))?)?;
                let name = it.next().ok_or_else(|| r.err("missing name"))?;
                Marginal::uniform(name, lo, hi)?
            }
            "gaussian" => {
                let mut it = payload.splitn(3, ' ');
                let mean = parse_f64(&r, it.next().ok_or_else(|| r.err("missing mean"))?)?;
                let std = parse_f64(&r, it.next().ok_or_else(|| r.err("missing std"))?)?;
                let name = it.next().ok_or_else(|| r.err("missing name"))?;
                Marginal::gaussian(name, mean, std)?
            }
            "empirical" => {
                let mut it = payload.split(' ');
                let count: usize = it
                    .next()
                    .ok_or_else(|| r.err("missing sample count"))?
                    .parse()
                    .map_err(|_| r.err("invalid sample count"))?;
                let mut values = Vec::with_capacity(count);
                for _ in 0..count {
                    let tok = it.next().ok_or_else(|| r.err("missing sample value"))?;
                    values.push(parse_f64(&r, tok)?);
                }
                let name: Vec<&str> = it.collect();
                if name.is_empty() {
                    return Err(r.err("missing name"));
                }
                Marginal::empirical(name.join(" "), values)?
            }
            other => return Err(r.err(format!("unknown marginal kind '{other}'"))),
        };
        marginals.push(marg);
    }
    let space = InputSpace::new(marginals)?.with_anchor(anchor)?;

    let line = r.next_line()?;
    let n_terms: usize = parse_kv(&r, "terms", &line)?
        .parse()
        .map_err(|_| r.err("invalid term count"))?;
    let mut indices = Vec::with_capacity(n_terms);
    let mut beta = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let line = r.next_line()?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != m + 1 {
            return Err(r.err(format!("expected {} tokens on term line", m + 1)));
        }
        let gamma: Vec<u32> = toks[..m]
            .iter()
            .map(|t| t.parse::<u32>().map_err(|_| r.err(format!("invalid degree '{t}'"))))
            .collect::<Result<_>>()?;
        indices.push(MultiIndex(gamma));
        beta.push(parse_f64(&r, toks[m])?);
    }
    let line = r.next_line()?;
    if line != "end" {
        return Err(r.err("missing 'end' terminator"));
    }

    let families: Vec<UnivariateFamily> = space
        .marginals()
        .iter()
        .map(|mg| UnivariateFamily::from_marginal(mg, order as usize))
        .collect::<Result<_>>()?;
    let basis = BasisSet { indices, families, max_degree: order as usize };
    let active_terms = beta.iter().filter(|b| **b != 0.0).count();
    let diagnostics =
        FitDiagnostics { order, q, r2_train, loo_rel, active_terms, heldout_r2 };
    PceModel::new(basis, beta, space, out_mean, out_scale, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pce::select_order;
    use crate::sampling::{draw_iid, streams};
    use ndarray::Array1;

    #[test]
    fn roundtrip_is_bit_exact() {
        let space = InputSpace::new(vec![
            Marginal::uniform("alpha", -1.0, 1.0).unwrap(),
            Marginal::gaussian("beta param", 0.5, 2.0).unwrap(),
            Marginal::empirical("emp", vec![0.1, 0.4, 0.2, 0.9, 0.55, 0.7, 0.3, 0.8]).unwrap(),
        ])
        .unwrap();
        let x = draw_iid(&space, 150, 3, streams::PCE_TRAIN).unwrap().values;
        let y = Array1::from_iter(
            x.outer_iter().map(|row| row[0] * row[1] + 0.5 * row[2] - 1.0),
        );
        let model = select_order(&x.view(), &y.view(), &space, 3, 1.0).unwrap();

        let mut buf = Vec::new();
        save_model(&model, &mut buf).unwrap();
        let loaded = load_model(&buf[..]).unwrap();

        assert_eq!(loaded.beta, model.beta);
        assert_eq!(loaded.basis.indices, model.basis.indices);
        assert_eq!(loaded.out_mean, model.out_mean);
        assert_eq!(loaded.out_scale, model.out_scale);
        assert_eq!(loaded.space, model.space);

        let pts = draw_iid(&space, 50, 9, streams::PCE_VALIDATION).unwrap().values;
        let a = model.predict(&pts.view()).unwrap();
        let b = loaded.predict(&pts.view()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "icegsa-pce v1\ndim not-a-number\n";
        match load_model(text.as_bytes()) {
            Err(CoreError::ModelParse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_magic() {
        assert!(load_model("something else\n".as_bytes()).is_err());
    }
}
