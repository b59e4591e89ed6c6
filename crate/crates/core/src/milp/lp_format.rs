//! CPLEX LP export and import of externally computed solutions.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::branch::{complete_exact, MilpSolution, MilpStatus, SolveOptions, SolveStats};
use super::model::{MilpModel, VarKind};
use crate::error::{Error, Result};
use crate::rational::{display, parse_rational, to_f64, Rational};

/// Tolerance applied to imported values before they are snapped.
pub const IMPORT_TOL: f64 = 1e-9;

const LINE_WIDTH: usize = 200;

/// Exact decimal when the denominator divides a power of ten, otherwise the
/// shortest round-trip double.
pub fn lp_number(v: &Rational) -> String {
    let mut den = v.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut c2, mut c5) = (0usize, 0usize);
    while den.is_even() {
        den /= &two;
        c2 += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        c5 += 1;
    }
    if !den.is_one() {
        return format!("{}", to_f64(v));
    }
    let digits = c2.max(c5);
    if digits == 0 {
        return v.numer().to_string();
    }
    let scaled = (v * Rational::from_integer(BigInt::from(10).pow(digits as u32))).to_integer();
    let neg = scaled.is_negative();
    let s = scaled.abs().to_string();
    let s = format!("{:0>width$}", s, width = digits + 1);
    let (int_part, frac) = s.split_at(s.len() - digits);
    let frac = frac.trim_end_matches('0');
    format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac)
}

fn push_terms(out: &mut String, model: &MilpModel, terms: &[(usize, Rational)]) {
    let mut line = String::new();
    if terms.is_empty() {
        line.push_str(" 0 ");
        line.push_str(&model.variables[0].name);
    }
    for (k, (j, a)) in terms.iter().enumerate() {
        let sign = if a.is_negative() { "-" } else { "+" };
        let mag = a.abs();
        let coeff = if mag.is_one() { String::new() } else { format!("{} ", lp_number(&mag)) };
        let piece = if k == 0 && sign == "+" {
            format!(" {coeff}{}", model.variables[*j].name)
        } else {
            format!(" {sign} {coeff}{}", model.variables[*j].name)
        };
        if line.len() + piece.len() > LINE_WIDTH {
            out.push_str(&line);
            out.push('\n');
            line.clear();
        }
        line.push_str(&piece);
    }
    out.push_str(&line);
}

pub fn export_lp(model: &MilpModel) -> String {
    let mut out = String::new();
    out.push_str("\\ mixed-integer program\n");
    out.push_str("Minimize\n obj:");
    push_terms(&mut out, model, &model.objective);
    out.push_str("\nSubject To\n");
    for c in &model.constraints {
        let _ = write!(out, " {}:", c.name);
        push_terms(&mut out, model, &c.terms);
        let _ = writeln!(out, " {} {}", c.sense.symbol(), lp_number(&c.rhs));
    }
    out.push_str("Bounds\n");
    for v in model.variables.iter().filter(|v| v.kind == VarKind::Continuous) {
        match &v.upper {
            Some(u) if u == &v.lower => {
                let _ = writeln!(out, " {} = {}", v.name, lp_number(u));
            }
            Some(u) => {
                let _ = writeln!(out, " {} <= {} <= {}", lp_number(&v.lower), v.name, lp_number(u));
            }
            None if v.lower.is_zero() => {}
            None => {
                let _ = writeln!(out, " {} >= {}", v.name, lp_number(&v.lower));
            }
        }
    }
    let binaries: Vec<&str> = model.binaries().map(|j| model.variables[j].name.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for chunk in binaries.chunks(8) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

/// Reads `name value` lines (blank lines and `#` comments ignored).
pub fn parse_solution(text: &str, model: &MilpModel) -> Result<Vec<Rational>> {
    let mut values: Vec<Option<Rational>> = vec![None; model.num_vars()];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse { line: lineno + 1, message };
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(format!("expected `name value`, got `{line}`")));
        };
        let j = model.var_id(name).ok_or_else(|| parse_err(format!("unknown variable `{name}`")))?;
        let v = parse_rational(value).map_err(|_| parse_err(format!("invalid value `{value}`")))?;
        values[j] = Some(v);
    }
    values
        .into_iter()
        .enumerate()
        .map(|(j, v)| v.ok_or_else(|| Error::Solution(format!("no value for variable {}", model.variables[j].name))))
        .collect()
}

/// Parses an external solution, checks it to within 1e-9, rounds the
/// binaries and makes it exactly feasible (re-solving the continuous part with
/// the binaries fixed when the raw values are not already exact).
pub fn import_solution(text: &str, model: &MilpModel, opts: &SolveOptions) -> Result<MilpSolution> {
    let mut values = parse_solution(text, model)?;
    let tol = Rational::new(BigInt::one(), BigInt::from(1_000_000_000));
    if let Some((name, v)) = model.max_violation(&values) {
        if v > tol {
            return Err(Error::ConstraintViolated { name, violation: display(&v) });
        }
    }
    let binaries: Vec<usize> = model.binaries().collect();
    for &j in &binaries {
        values[j] = values[j].round();
    }
    if model.check(&values).is_err() {
        let fixed: Vec<(usize, Rational)> = binaries.iter().map(|&j| (j, values[j].clone())).collect();
        values = complete_exact(model, &fixed, opts)?
            .ok_or_else(|| Error::Solution("no exactly feasible point with the imported binary values".into()))?;
    }
    let objective = model.objective_value(&values);
    Ok(MilpSolution { status: MilpStatus::Feasible, values: Some(values), objective: Some(objective), stats: SolveStats::default() })
}

/// Writes `name value` lines with exact rationals.
pub fn write_solution(model: &MilpModel, values: &[Rational]) -> String {
    let mut out = String::new();
    for (v, x) in model.variables.iter().zip(values) {
        let _ = writeln!(out, "{} {}", v.name, display(x));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::model::Sense;
    use crate::rational::{int, ratio};

    #[test]
    fn numbers() {
        assert_eq!(lp_number(&int(10)), "10");
        assert_eq!(lp_number(&ratio(11, 100)), "0.11");
        assert_eq!(lp_number(&ratio(-1, 8)), "-0.125");
        assert_eq!(lp_number(&ratio(1, 3)), format!("{}", 1.0f64 / 3.0));
        assert_eq!(lp_number(&ratio(3, 1_000_000)), "0.000003");
    }

    fn tiny() -> MilpModel {
        let mut m = MilpModel::new();
        let x = m.add_continuous("x", ratio(1, 10), Some(int(10)));
        let y = m.add_continuous("y", int(0), None);
        let z = m.add_binary("z", 0);
        m.add_constraint("c1", vec![(x, int(1)), (y, int(-2)), (z, ratio(1, 2))], Sense::Le, int(3));
        m.add_constraint("c2", vec![(y, int(1)), (z, int(-1))], Sense::Eq, int(0));
        m.set_objective(vec![(x, int(1)), (z, int(-1))]);
        m
    }

    #[test]
    fn export_golden() {
        let expected = "\\ mixed-integer program
Minimize
 obj: x - z
Subject To
 c1: x - 2 y + 0.5 z <= 3
 c2: y - z = 0
Bounds
 0.1 <= x <= 10
Binaries
 z
End
";
        assert_eq!(export_lp(&tiny()), expected);
    }

    #[test]
    fn import_accepts_and_snaps() {
        let m = tiny();
        let sol = import_solution("x 0.1\ny 0.9999999999\nz 1.0000000001\n", &m, &SolveOptions::default()).unwrap();
        let v = sol.values.unwrap();
        assert_eq!(v[2], int(1));
        assert_eq!(v[1], int(1));
        m.check(&v).unwrap();
    }

    #[test]
    fn import_rejects_violation_with_name() {
        let m = tiny();
        match import_solution("x 0.1\ny 1.001\nz 1\n", &m, &SolveOptions::default()) {
            Err(Error::ConstraintViolated { name, .. }) => assert_eq!(name, "c2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn import_reports_missing_and_unknown() {
        let m = tiny();
        assert!(matches!(import_solution("x 1\n", &m, &SolveOptions::default()), Err(Error::Solution(_))));
        assert!(matches!(import_solution("q 1\n", &m, &SolveOptions::default()), Err(Error::Parse { line: 1, .. })));
    }
}
