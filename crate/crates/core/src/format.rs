//! Text formats: reaction network files and polynomial ODE files.
//!
//! Network files hold one reaction per line:
//!
//! ```text
//! # comment
//! 0 -> 3 X2 ; k=1
//! X1 + X2 <-> 2 X1 + 2 X2 ; k=1,1/2
//! ```
//!
//! Species are ordered by a `# species: A B C` comment when present, and by
//! natural name order (`X2` before `X10`) otherwise. Complexes are numbered in
//! order of first appearance.
//!
//! ODE files hold lines `dx1/dt = 2*x2^3 - x1^2 - x1*x2*x3`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::network::{Complex, MassActionSystem, Network, Reaction};
use crate::polynomial::{PolynomialSystem, Term};
use crate::rational::{display, parse_rational, Rational};

const SPECIES_HINT: &str = "species:";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

type RawComplex = BTreeMap<String, Rational>;

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_complex(text: &str, line: usize) -> Result<RawComplex> {
    let text = text.trim();
    if text.is_empty() {
        return Err(parse_err(line, "missing complex"));
    }
    let mut out = RawComplex::new();
    if text == "0" || text == "∅" {
        return Ok(out);
    }
    for term in text.split('+') {
        let term = term.trim();
        let split = term.find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '/')).unwrap_or(term.len());
        let (coeff, name) = term.split_at(split);
        let name = name.trim().trim_start_matches('*').trim();
        if !is_name(name) {
            return Err(parse_err(line, format!("cannot read complex term `{term}`")));
        }
        let coeff = if coeff.is_empty() {
            Rational::one()
        } else {
            parse_rational(coeff).map_err(|_| parse_err(line, format!("bad coefficient `{coeff}`")))?
        };
        *out.entry(name.to_string()).or_insert_with(Rational::zero) += coeff;
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// Compares names so that embedded digit runs order numerically.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    for (x, y) in chunks(a).into_iter().zip(chunks(b)) {
        let ord = match (x, y) {
            ((true, p), (true, q)) => {
                let (p, q) = (p.trim_start_matches('0'), q.trim_start_matches('0'));
                p.len().cmp(&q.len()).then_with(|| p.cmp(q))
            }
            ((_, p), (_, q)) => p.cmp(q),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Parses a network file into a mass action system.
pub fn parse_network(text: &str) -> Result<MassActionSystem> {
    let mut hint: Option<Vec<String>> = None;
    let mut raw: Vec<(usize, RawComplex, RawComplex, Rational)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(list) = comment.trim().strip_prefix(SPECIES_HINT) {
                hint = Some(list.split([' ', ',']).filter(|s| !s.is_empty()).map(str::to_string).collect());
            }
            continue;
        }
        let (body, rate_text) = match line.split_once(';') {
            Some((b, r)) => (b, Some(r.trim())),
            None => (line, None),
        };
        let rates: Vec<Rational> = match rate_text {
            None | Some("") => Vec::new(),
            Some(r) => {
                let list = r.strip_prefix("k=").or_else(|| r.strip_prefix("k =")).ok_or_else(|| {
                    parse_err(lineno, format!("expected `k=<rate>` after `;`, found `{r}`"))
                })?;
                list.split(',')
                    .map(|v| parse_rational(v).map_err(|_| parse_err(lineno, format!("bad rate `{}`", v.trim()))))
                    .collect::<Result<_>>()?
            }
        };
        if let Some(k) = rates.iter().find(|k| *k <= &Rational::zero()) {
            return Err(parse_err(lineno, format!("rate {} is not positive", display(k))));
        }
        if let Some((lhs, rhs)) = body.split_once("<->") {
            let (a, b) = (parse_complex(lhs, lineno)?, parse_complex(rhs, lineno)?);
            let (kf, kb) = match rates.as_slice() {
                [] => (Rational::one(), Rational::one()),
                [f, b] => (f.clone(), b.clone()),
                _ => return Err(parse_err(lineno, "a reversible reaction needs two rates `k=<fwd>,<bwd>`")),
            };
            raw.push((lineno, a.clone(), b.clone(), kf));
            raw.push((lineno, b, a, kb));
        } else if let Some((lhs, rhs)) = body.split_once("->") {
            let k = match rates.as_slice() {
                [] => Rational::one(),
                [k] => k.clone(),
                _ => return Err(parse_err(lineno, "an irreversible reaction takes one rate")),
            };
            raw.push((lineno, parse_complex(lhs, lineno)?, parse_complex(rhs, lineno)?, k));
        } else {
            return Err(parse_err(lineno, "expected `->` or `<->`"));
        }
    }
    if raw.is_empty() {
        return Err(parse_err(text.lines().count().max(1), "no reactions found"));
    }

    let mut names: Vec<String> = {
        let set: HashSet<&String> = raw.iter().flat_map(|(_, a, b, _)| a.keys().chain(b.keys())).collect();
        set.into_iter().cloned().collect()
    };
    match hint {
        Some(order) => {
            if let Some(missing) = names.iter().find(|n| !order.contains(n)) {
                return Err(parse_err(1, format!("species `{missing}` is missing from the species list")));
            }
            names = order;
        }
        None => names.sort_by(|a, b| natural_cmp(a, b)),
    }
    let position: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let to_complex = |c: &RawComplex| -> Complex {
        let mut v = vec![Rational::zero(); names.len()];
        for (name, coeff) in c {
            v[position[name.as_str()]] = coeff.clone();
        }
        Complex::new(v).expect("coefficients are nonnegative")
    };

    let mut complexes: Vec<Complex> = Vec::new();
    let mut index: HashMap<Complex, usize> = HashMap::new();
    let mut reactions = Vec::new();
    let mut rates = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, a, b, k) in &raw {
        let mut intern = |c: Complex| -> usize {
            *index.entry(c.clone()).or_insert_with(|| {
                complexes.push(c);
                complexes.len() - 1
            })
        };
        let s = intern(to_complex(a));
        let t = intern(to_complex(b));
        if !seen.insert((s, t)) {
            return Err(parse_err(*lineno, "duplicate reaction"));
        }
        reactions.push(Reaction::new(s, t));
        rates.push(k.clone());
    }
    let net = Network::new(names, complexes, reactions)?;
    MassActionSystem::new(net, rates)
}

/// Writes a system in network-file syntax, one reaction per line.
pub fn write_network(sys: &MassActionSystem) -> String {
    let net = sys.network();
    let mut out = String::new();
    let _ = writeln!(out, "# {SPECIES_HINT} {}", net.species_names().join(" "));
    for (r, k) in net.reactions().iter().zip(sys.rates()) {
        let _ = writeln!(out, "{} -> {} ; k={}", net.render_complex(r.source), net.render_complex(r.target), display(k));
    }
    out
}

fn parse_ode_term(text: &str, negative: bool, vars: &HashMap<&str, usize>, m: usize, line: usize) -> Result<Term> {
    let mut coeff = if negative { -Rational::one() } else { Rational::one() };
    let mut exps = vec![0u32; m];
    for factor in text.split('*').map(str::trim) {
        if factor.is_empty() {
            return Err(parse_err(line, format!("empty factor in `{text}`")));
        }
        if factor.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
            coeff *= parse_rational(factor).map_err(|_| parse_err(line, format!("bad coefficient `{factor}`")))?;
            continue;
        }
        let (name, power) = match factor.split_once('^') {
            Some((n, p)) => (
                n.trim(),
                p.trim().parse::<u32>().map_err(|_| parse_err(line, format!("bad exponent in `{factor}`")))?,
            ),
            None => (factor, 1),
        };
        let &i = vars.get(name).ok_or_else(|| parse_err(line, format!("unknown variable `{name}`")))?;
        exps[i] += power;
    }
    Ok(Term::new(coeff, exps))
}

/// Parses `d<name>/dt = ...` lines. Variables are ordered by equation.
pub fn parse_ode(text: &str) -> Result<PolynomialSystem> {
    let mut heads: Vec<(usize, String, String)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (lhs, rhs) = line.split_once('=').ok_or_else(|| parse_err(lineno, "expected `d<name>/dt = ...`"))?;
        let name = lhs
            .trim()
            .strip_prefix('d')
            .and_then(|s| s.strip_suffix("/dt"))
            .map(str::trim)
            .filter(|s| is_name(s))
            .ok_or_else(|| parse_err(lineno, format!("expected `d<name>/dt`, found `{}`", lhs.trim())))?;
        if heads.iter().any(|(_, n, _)| n == name) {
            return Err(parse_err(lineno, format!("second equation for `{name}`")));
        }
        heads.push((lineno, name.to_string(), rhs.to_string()));
    }
    if heads.is_empty() {
        return Err(parse_err(text.lines().count().max(1), "no equations found"));
    }
    let m = heads.len();
    let names: Vec<String> = heads.iter().map(|(_, n, _)| n.clone()).collect();
    let vars: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut equations = Vec::with_capacity(m);
    for (lineno, _, rhs) in &heads {
        let mut terms = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        let flush = |current: &mut String, negative: bool, terms: &mut Vec<Term>| -> Result<()> {
            let t = current.trim();
            if t.is_empty() {
                return Err(parse_err(*lineno, "missing term"));
            }
            terms.push(parse_ode_term(t, negative, &vars, m, *lineno)?);
            current.clear();
            Ok(())
        };
        let mut prev_significant: Option<char> = None;
        for ch in rhs.chars() {
            let is_sign = ch == '+' || ch == '-';
            // A sign directly after `^`, `*` or `/` belongs to the factor, not the sum.
            let unary = matches!(prev_significant, None | Some('^') | Some('*') | Some('/') | Some('+') | Some('-'));
            if is_sign && !unary {
                flush(&mut current, negative, &mut terms)?;
                negative = ch == '-';
            } else if is_sign && prev_significant.is_none() {
                negative = ch == '-';
            } else if is_sign && matches!(prev_significant, Some('+') | Some('-')) {
                negative ^= ch == '-';
            } else {
                current.push(ch);
            }
            if !ch.is_whitespace() {
                prev_significant = Some(ch);
            }
        }
        flush(&mut current, negative, &mut terms)?;
        equations.push(terms);
    }
    PolynomialSystem::new(names, equations)
}

/// Writes a polynomial system in ODE-file syntax.
pub fn write_ode(p: &PolynomialSystem) -> String {
    let mut out = String::new();
    for (name, eq) in p.species().iter().zip(p.normalized()) {
        let mut rhs = String::new();
        for (i, (exps, c)) in eq.iter().enumerate() {
            let t = Term::new(c.clone(), exps.clone()).render(p.species());
            if i == 0 {
                rhs.push_str(&t);
            } else if let Some(rest) = t.strip_prefix('-') {
                let _ = write!(rhs, " - {rest}");
            } else {
                let _ = write!(rhs, " + {t}");
            }
        }
        if rhs.is_empty() {
            rhs.push('0');
        }
        let _ = writeln!(out, "d{name}/dt = {rhs}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn parses_reversible_and_zero_complex() {
        let sys = parse_network("# test\n0 -> 3 X2 ; k=1\nX1 + X2 <-> 2X1 + 2 X2 ; k=1/2,0.25\n").unwrap();
        let net = sys.network();
        assert_eq!(net.species_names(), vec!["X1", "X2"]);
        assert_eq!(net.num_complexes(), 4);
        assert!(net.complexes()[0].is_zero_complex());
        assert_eq!(net.reactions().len(), 3);
        assert_eq!(sys.rates(), &[int(1), ratio(1, 2), ratio(1, 4)]);
    }

    #[test]
    fn natural_species_order() {
        let sys = parse_network("X10 -> X2\nX2 -> X1\n").unwrap();
        assert_eq!(sys.network().species_names(), vec!["X1", "X2", "X10"]);
        assert_eq!(natural_cmp("X2", "X10"), Ordering::Less);
        assert_eq!(natural_cmp("A", "B"), Ordering::Less);
    }

    #[test]
    fn write_then_parse_is_identity() {
        let text = "X1 + X2 -> 2 X1 + 2 X2 ; k=3/7\n2 X1 + 2 X2 -> 0 ; k=1\n0 -> X1 + X2 ; k=0.5\n";
        let sys = parse_network(text).unwrap();
        assert_eq!(parse_network(&write_network(&sys)).unwrap(), sys);
    }

    #[test]
    fn species_hint_controls_order() {
        let sys = parse_network("# species: B A\nA -> B\n").unwrap();
        assert_eq!(sys.network().species_names(), vec!["B", "A"]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(parse_network(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_network("# only comments\n"), Err(Error::Parse { .. })));
        assert_eq!(parse_network("X1 -> X2\nX1 => X2\n").unwrap_err(), parse_err(2, "expected `->` or `<->`"));
        assert!(matches!(parse_network("X1 -> X2 ; k=0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_network("X1 -> X2\nX1 -> X2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_network("X1 <-> X2 ; k=1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_network("X1 -> 2 + X2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn parses_eq17() {
        let text = "dx1/dt = 2*x2^3 - x1^2 - x1*x2*x3\ndx2/dt = 1 - 3*x2^3 + 3*x1*x2*x3\ndx3/dt = x1*x2 - x1*x2*x3\n";
        let p = parse_ode(text).unwrap();
        assert_eq!(p.species(), &["x1", "x2", "x3"]);
        assert_eq!(p.equations()[0].len(), 3);
        assert_eq!(p.equations()[1][0], Term::new(int(1), vec![0, 0, 0]));
        assert_eq!(p.equations()[0][1], Term::new(int(-1), vec![2, 0, 0]));
        assert_eq!(parse_ode(&write_ode(&p)).unwrap().normalized(), p.normalized());
    }

    #[test]
    fn ode_errors() {
        assert!(parse_ode("").is_err());
        assert!(matches!(parse_ode("dx1/dt = -y\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_ode("dx1/dt = x1\nx2 = 3\n"), Err(Error::Parse { line: 2, .. })));
        let p = parse_ode("dx1/dt = -x1 + 1/2*x1^2\n").unwrap();
        assert_eq!(p.equations()[0][1].coefficient, ratio(1, 2));
    }
}
