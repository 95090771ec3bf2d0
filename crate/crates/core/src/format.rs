//! Line-oriented text formats for structures, instances and measures.
//!
//! ```text
//! structure
//! domain 0 1
//! symbol neq 2 default inf
//! neq 0 1 = 0
//! neq 1 0 = 0
//! ```
//!
//! ```text
//! instance
//! variables x y
//! term neq x y
//! threshold 0
//! ```
//!
//! ```text
//! measure
//! arity 3
//! input 0 1
//! output 0 1
//! op 1 = 0 1 1 0 1 0 0 1
//! ```
//!
//! `#` starts a comment. Rationals are written `p/q`, infinity as `inf`.
//! Table entries not listed take the symbol's default. An `op` line lists
//! the output labels for every input tuple in lexicographic order; an
//! optional `inputweights` line gives `ω_I` (uniform when omitted).

use std::collections::HashMap;
use std::fmt::Write;

use crate::arith::{format_rational, parse_rational, ExtendedRational, Rational};
use crate::error::{Error, Result};
use crate::measure::{FiniteMeasure, OperationTable};
use crate::structure::{check_distinct, tuple_count, tuple_index, Instance, Signature, Term, Tuples, ValuedStructure};
use crate::theory::{FractionalHomomorphism, PromiseFractionalPolymorphism};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let words: Vec<&str> = l.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

fn expect_header<'a>(it: &mut impl Iterator<Item = (usize, Vec<&'a str>)>, header: &str) -> Result<()> {
    match it.next() {
        Some((_, w)) if w == [header] => Ok(()),
        Some((n, _)) => Err(parse_err(n, format!("expected `{header}` header"))),
        None => Err(parse_err(0, format!("empty file, expected `{header}` header"))),
    }
}

fn parse_usize(line: usize, s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| parse_err(line, format!("expected a non-negative integer, got `{s}`")))
}

fn parse_value(line: usize, s: &str) -> Result<ExtendedRational> {
    s.parse::<ExtendedRational>().map_err(|e| e.at_line(line))
}

fn check_label(line: usize, s: &str) -> Result<()> {
    if s == "=" {
        return Err(parse_err(line, "`=` cannot be a label"));
    }
    Ok(())
}

struct SymbolDraft {
    name: String,
    arity: usize,
    line: usize,
    default: ExtendedRational,
    entries: HashMap<Vec<usize>, ExtendedRational>,
}

pub fn parse_structure(text: &str) -> Result<ValuedStructure> {
    let mut it = lines(text);
    expect_header(&mut it, "structure")?;
    let mut domain: Option<(usize, Vec<String>)> = None;
    let mut symbols: Vec<SymbolDraft> = Vec::new();
    for (n, w) in it {
        match w[0] {
            "domain" => {
                if domain.is_some() {
                    return Err(parse_err(n, "second `domain` line"));
                }
                for l in &w[1..] {
                    check_label(n, l)?;
                }
                let labels: Vec<String> = w[1..].iter().map(|s| s.to_string()).collect();
                check_distinct(&labels).map_err(|e| e.at_line(n))?;
                domain = Some((n, labels));
            }
            "symbol" => {
                let (name, arity, default) = match w.as_slice() {
                    [_, name, arity] => (*name, *arity, ExtendedRational::PlusInfinity),
                    [_, name, arity, "default", v] => (*name, *arity, parse_value(n, v)?),
                    _ => return Err(parse_err(n, "expected `symbol <name> <arity> [default <value>]`")),
                };
                if symbols.iter().any(|s| s.name == name) {
                    return Err(Error::Duplicate(name.to_string()).at_line(n));
                }
                symbols.push(SymbolDraft {
                    name: name.to_string(),
                    arity: parse_usize(n, arity)?,
                    line: n,
                    default,
                    entries: HashMap::new(),
                });
            }
            name => {
                let Some((_, labels)) = &domain else {
                    return Err(parse_err(n, "table entry before `domain`"));
                };
                let Some(sym) = symbols.iter_mut().find(|s| s.name == name) else {
                    return Err(Error::UnknownSymbol(name.to_string()).at_line(n));
                };
                let eq = w.iter().position(|&x| x == "=");
                let (args, value) = match eq {
                    Some(p) if p + 2 == w.len() => (&w[1..p], w[p + 1]),
                    _ => return Err(parse_err(n, "expected `<symbol> <labels…> = <value>`")),
                };
                if args.len() != sym.arity {
                    return Err(Error::ArityMismatch {
                        symbol: sym.name.clone(),
                        expected: sym.arity,
                        found: args.len(),
                    }
                    .at_line(n));
                }
                let tuple = args
                    .iter()
                    .map(|a| {
                        labels
                            .iter()
                            .position(|l| l == a)
                            .ok_or_else(|| Error::UnknownLabel(a.to_string()).at_line(n))
                    })
                    .collect::<Result<Vec<usize>>>()?;
                let value = parse_value(n, value)?;
                if sym.entries.insert(tuple, value).is_some() {
                    return Err(parse_err(n, format!("duplicate entry for `{}`", sym.name)));
                }
            }
        }
    }
    let Some((dline, labels)) = domain else {
        return Err(parse_err(0, "missing `domain` line"));
    };
    let size = labels.len();
    let sig = Signature::new(symbols.iter().map(|s| (s.name.clone(), s.arity))).map_err(|e| e.at_line(dline))?;
    let mut tables = Vec::with_capacity(symbols.len());
    for s in &symbols {
        let count = crate::guard::pow_sat(size, s.arity);
        crate::guard::ensure(format!("table of `{}`", s.name), count, crate::guard::default_cap())
            .map_err(|e| e.at_line(s.line))?;
        let mut table = vec![s.default.clone(); tuple_count(size, s.arity)];
        for (t, v) in &s.entries {
            table[tuple_index(t, size)] = v.clone();
        }
        tables.push(table);
    }
    ValuedStructure::new(sig, labels, tables).map_err(|e| e.at_line(dline))
}

/// The most frequent value, ties broken by first occurrence.
fn table_default(table: &[ExtendedRational]) -> &ExtendedRational {
    let mut counts: HashMap<&ExtendedRational, usize> = HashMap::new();
    for v in table {
        *counts.entry(v).or_insert(0) += 1;
    }
    let best = counts.values().copied().max().unwrap_or(0);
    table
        .iter()
        .find(|v| counts[v] == best)
        .unwrap_or(&ExtendedRational::PlusInfinity)
}

pub fn print_structure(s: &ValuedStructure) -> String {
    let mut out = String::from("structure\n");
    let _ = writeln!(out, "domain {}", s.domain().join(" "));
    for (i, sym) in s.signature().symbols().iter().enumerate() {
        let table = s.table(i);
        let default = table_default(table);
        let _ = writeln!(out, "symbol {} {} default {}", sym.name, sym.arity, default);
        for (t, v) in Tuples::new(s.domain_size(), sym.arity).zip(table) {
            if v != default {
                let args: Vec<&str> = t.iter().map(|&a| s.domain()[a].as_str()).collect();
                let sep = if args.is_empty() { "" } else { " " };
                let _ = writeln!(out, "{}{sep}{} = {}", sym.name, args.join(" "), v);
            }
        }
    }
    out
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut it = lines(text);
    expect_header(&mut it, "instance")?;
    let mut variables: Vec<String> = Vec::new();
    let mut var_line = 0;
    let mut terms = Vec::new();
    let mut threshold: Option<Rational> = None;
    for (n, w) in it {
        match w[0] {
            "variables" => {
                variables.extend(w[1..].iter().map(|s| s.to_string()));
                check_distinct(&variables).map_err(|e| e.at_line(n))?;
                var_line = n;
            }
            "term" => {
                if w.len() < 2 {
                    return Err(parse_err(n, "expected `term <symbol> <variables…>`"));
                }
                terms.push(Term::new(w[1], &w[2..]));
            }
            "threshold" => {
                if threshold.is_some() {
                    return Err(parse_err(n, "second `threshold` line"));
                }
                let [_, v] = w.as_slice() else {
                    return Err(parse_err(n, "expected `threshold <rational>`"));
                };
                threshold = Some(parse_rational(v).map_err(|e| e.at_line(n))?);
            }
            other => return Err(parse_err(n, format!("unknown directive `{other}`"))),
        }
    }
    let Some(threshold) = threshold else {
        return Err(parse_err(0, "missing `threshold` line"));
    };
    Instance::new(variables, terms, threshold).map_err(|e| e.at_line(var_line))
}

pub fn print_instance(inst: &Instance) -> String {
    let mut out = String::from("instance\n");
    let _ = writeln!(out, "variables {}", inst.variables().join(" "));
    for t in inst.terms() {
        let sep = if t.args.is_empty() { "" } else { " " };
        let _ = writeln!(out, "term {}{sep}{}", t.symbol, t.args.join(" "));
    }
    let _ = writeln!(out, "threshold {}", format_rational(inst.threshold()));
    out
}

/// Parses a measure file. Arity-1 files also describe fractional
/// homomorphisms; see [`as_frachom`].
pub fn parse_measure(text: &str) -> Result<PromiseFractionalPolymorphism> {
    let mut it = lines(text);
    expect_header(&mut it, "measure")?;
    let mut arity: Option<usize> = None;
    let mut input: Option<Vec<String>> = None;
    let mut output: Option<Vec<String>> = None;
    let mut weights: Option<Vec<Rational>> = None;
    let mut ops: Vec<(usize, Rational, Vec<&str>)> = Vec::new();
    let mut last = 0;
    for (n, w) in it {
        last = n;
        match w[0] {
            "arity" => {
                let [_, a] = w.as_slice() else {
                    return Err(parse_err(n, "expected `arity <m>`"));
                };
                arity = Some(parse_usize(n, a)?);
            }
            "input" | "output" => {
                for l in &w[1..] {
                    check_label(n, l)?;
                }
                let labels: Vec<String> = w[1..].iter().map(|s| s.to_string()).collect();
                check_distinct(&labels).map_err(|e| e.at_line(n))?;
                if labels.is_empty() {
                    return Err(parse_err(n, "empty domain"));
                }
                if w[0] == "input" {
                    input = Some(labels);
                } else {
                    output = Some(labels);
                }
            }
            "inputweights" => {
                let ws = w[1..]
                    .iter()
                    .map(|v| parse_rational(v).map_err(|e| e.at_line(n)))
                    .collect::<Result<Vec<_>>>()?;
                weights = Some(ws);
            }
            "op" => {
                let ok = w.len() >= 3 && w[2] == "=";
                if !ok {
                    return Err(parse_err(n, "expected `op <weight> = <output labels…>`"));
                }
                let weight = parse_rational(w[1]).map_err(|e| e.at_line(n))?;
                ops.push((n, weight, w[3..].to_vec()));
            }
            other => return Err(parse_err(n, format!("unknown directive `{other}`"))),
        }
    }
    let (Some(m), Some(input), Some(output)) = (arity, input, output) else {
        return Err(parse_err(last, "measure needs `arity`, `input` and `output` lines"));
    };
    if m == 0 {
        return Err(parse_err(last, "arity must be positive"));
    }
    let n = input.len();
    let size = crate::guard::pow_sat(n, m);
    crate::guard::ensure("operation table", size, crate::guard::default_cap()).map_err(|e| e.at_line(last))?;
    let mut entries = Vec::with_capacity(ops.len());
    for (line, weight, labels) in ops {
        if labels.len() as u128 != size {
            return Err(parse_err(
                line,
                format!("operation lists {} outputs, expected {size}", labels.len()),
            ));
        }
        let values = labels
            .iter()
            .map(|l| {
                output
                    .iter()
                    .position(|o| o == l)
                    .ok_or_else(|| Error::UnknownLabel(l.to_string()).at_line(line))
            })
            .collect::<Result<Vec<usize>>>()?;
        let table = OperationTable::new(n, output.len(), m, values).map_err(|e| e.at_line(line))?;
        entries.push((table, weight));
    }
    let measure = FiniteMeasure::new(entries).map_err(|e| e.at_line(last))?;
    let weights = weights.unwrap_or_else(|| crate::theory::uniform_weights(m));
    PromiseFractionalPolymorphism::new(m, input, output, weights, measure).map_err(|e| e.at_line(last))
}

pub fn print_measure(omega: &PromiseFractionalPolymorphism) -> String {
    let mut out = String::from("measure\n");
    let _ = writeln!(out, "arity {}", omega.arity);
    let _ = writeln!(out, "input {}", omega.input.join(" "));
    let _ = writeln!(out, "output {}", omega.output.join(" "));
    if !omega.has_uniform_inputs() {
        let ws: Vec<String> = omega.input_weights.iter().map(format_rational).collect();
        let _ = writeln!(out, "inputweights {}", ws.join(" "));
    }
    for (g, w) in omega.output_measure.iter() {
        let labels: Vec<&str> = g.values().iter().map(|&v| omega.output[v].as_str()).collect();
        let _ = writeln!(out, "op {} = {}", format_rational(w), labels.join(" "));
    }
    out
}

pub fn as_frachom(omega: &PromiseFractionalPolymorphism) -> Result<FractionalHomomorphism> {
    if omega.arity != 1 {
        return Err(Error::BadArity(format!(
            "a fractional homomorphism has arity 1, measure has arity {}",
            omega.arity
        )));
    }
    FractionalHomomorphism::new(omega.input.clone(), omega.output.clone(), omega.output_measure.clone())
}

pub fn print_frachom(chi: &FractionalHomomorphism) -> String {
    let omega = PromiseFractionalPolymorphism {
        arity: 1,
        input: chi.input.clone(),
        output: chi.output.clone(),
        input_weights: vec![Rational::from_integer(1.into())],
        output_measure: chi.measure.clone(),
    };
    print_measure(&omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    const XOR: &str = "\
structure
# crisp disequality
domain 0 1
symbol neq 2 default inf
neq 0 1 = 0
neq 1 0 = 0
symbol u 1 default 1/2
";

    #[test]
    fn structure_round_trip() {
        let s = parse_structure(XOR).unwrap();
        assert_eq!(s.table(0)[1], int(0).into());
        assert_eq!(s.table(0)[0], ExtendedRational::PlusInfinity);
        assert_eq!(s.table(1), &[rat(1, 2).into(), rat(1, 2).into()]);
        let printed = print_structure(&s);
        assert_eq!(parse_structure(&printed).unwrap(), s);
        assert_eq!(print_structure(&parse_structure(&printed).unwrap()), printed);
    }

    #[test]
    fn structure_errors_carry_lines() {
        let bad = XOR.replace("neq 1 0 = 0", "neq 1 0 = 1/0");
        assert!(matches!(parse_structure(&bad), Err(Error::Parse { line: 6, .. })));
        let bad = XOR.replace("neq 1 0 = 0", "neq 1 2 = 0");
        assert!(matches!(parse_structure(&bad), Err(Error::Parse { line: 6, .. })));
        let bad = XOR.replace("neq 1 0 = 0", "neq 0 1 = 0");
        assert!(parse_structure(&bad).is_err());
        let bad = XOR.replace("neq 1 0 = 0", "neq 1 = 0");
        assert!(parse_structure(&bad).is_err());
        assert!(parse_structure("domain 0 1\n").is_err());
        assert!(parse_structure("structure\nsymbol f 1\n").is_err());
    }

    #[test]
    fn instance_round_trip() {
        let text = "instance\nvariables x y\nvariables z\nterm neq x y\nterm neq y z\nthreshold -3/4\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.variables().len(), 3);
        assert_eq!(inst.threshold(), &rat(-3, 4));
        assert_eq!(
            print_instance(&inst),
            "instance\nvariables x y z\nterm neq x y\nterm neq y z\nthreshold -3/4\n"
        );
        assert_eq!(parse_instance(&print_instance(&inst)).unwrap(), inst);
        assert!(parse_instance("instance\nvariables x x\nthreshold 0\n").is_err());
        assert!(parse_instance("instance\nvariables x\n").is_err());
    }

    #[test]
    fn measure_round_trip() {
        let text =
            "measure\narity 2\ninput 0 1\noutput a b\ninputweights 1/4 3/4\nop 1/3 = a b b a\nop 2/3 = a a a b\n";
        let omega = parse_measure(text).unwrap();
        assert_eq!(omega.output_measure.len(), 2);
        assert_eq!(parse_measure(&print_measure(&omega)).unwrap(), omega);
        let bad = text.replace("2/3", "1/3");
        assert!(matches!(parse_measure(&bad), Err(Error::Parse { .. })));
        let short = text.replace("a a a b", "a a a");
        assert!(matches!(parse_measure(&short), Err(Error::Parse { line: 7, .. })));
    }

    #[test]
    fn frachom_files() {
        let chi = FractionalHomomorphism::identity(vec!["p".into(), "q".into()]);
        let text = print_frachom(&chi);
        assert!(!text.contains("inputweights"));
        assert_eq!(as_frachom(&parse_measure(&text).unwrap()).unwrap(), chi);
    }
}
