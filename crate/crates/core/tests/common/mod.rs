//! Brute-force oracles and random instance generators shared by test targets.
#![allow(dead_code)]

use crnreal::milp::{LinearProgram, LpRow, MilpModel, Sense};
use crnreal::rational::{int, Rational};
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Solves `a x = b` for square `a`; `None` when singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        b.swap(col, p);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
                let v = &f * &b[col];
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

pub fn feasible(lp: &LinearProgram<Rational>, x: &[Rational]) -> bool {
    let in_box = (0..x.len()).all(|j| x[j] >= lp.lower[j] && lp.upper[j].as_ref().map_or(true, |u| &x[j] <= u));
    in_box
        && lp.rows.iter().all(|r| {
            let act: Rational = r.coeffs.iter().map(|(j, a)| a * &x[*j]).sum();
            match r.sense {
                Sense::Le => act <= r.rhs,
                Sense::Ge => act >= r.rhs,
                Sense::Eq => act == r.rhs,
            }
        })
}

pub fn objective(lp: &LinearProgram<Rational>, x: &[Rational]) -> Rational {
    lp.objective.iter().zip(x).map(|(c, v)| c * v).sum()
}

/// Minimum over all vertices of a bounded polytope; `None` when empty.
pub fn vertex_oracle(lp: &LinearProgram<Rational>) -> Option<Rational> {
    let n = lp.num_vars();
    // Candidate hyperplanes: rows and both bounds of every variable.
    let mut planes: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for r in &lp.rows {
        let mut a = vec![Rational::zero(); n];
        for (j, c) in &r.coeffs {
            a[*j] += c;
        }
        planes.push((a, r.rhs.clone()));
    }
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = int(1);
        planes.push((e.clone(), lp.lower[j].clone()));
        planes.push((e, lp.upper[j].clone().expect("bounded test problems")));
    }
    let mut best: Option<Rational> = None;
    let k = planes.len();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(lp, &x) {
                let v = objective(lp, &x);
                if best.as_ref().map_or(true, |b| &v < b) {
                    best = Some(v);
                }
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] < k - n + i {
                idx[i] += 1;
                for t in i + 1..n {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Random bounded LP with up to `max_vars` variables and `max_rows` rows.
pub fn random_lp(rng: &mut ChaCha8Rng, max_vars: usize, max_rows: usize) -> LinearProgram<Rational> {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(1..=max_rows);
    let lower: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-2..=1))).collect();
    let upper = lower.iter().map(|l| Some(l + int(rng.gen_range(0..=4)))).collect();
    let rows = (0..m)
        .map(|_| LpRow {
            coeffs: (0..n).filter_map(|j| rng.gen_bool(0.8).then_some(j)).collect::<Vec<_>>().into_iter().map(|j| (j, int(rng.gen_range(-3..=3)))).collect(),
            sense: [Sense::Le, Sense::Ge, Sense::Eq][rng.gen_range(0..3)],
            rhs: Rational::new(rng.gen_range(-6..=6).into(), rng.gen_range(1..=3).into()),
        })
        .collect();
    let objective = (0..n).map(|_| int(rng.gen_range(-4..=4))).collect();
    LinearProgram { lower, upper, rows, objective }
}


/// Random MILP with `1..=max_binaries` binaries (declared first) and up to
/// `max_continuous` bounded continuous variables.
pub fn random_milp(rng: &mut ChaCha8Rng, max_binaries: usize, max_continuous: usize) -> MilpModel {
    let nb = rng.gen_range(1..=max_binaries);
    let nc = rng.gen_range(0..=max_continuous);
    let mut model = MilpModel::new();
    for j in 0..nb {
        model.add_binary(format!("z{j}"), rng.gen_range(0..2));
    }
    for j in 0..nc {
        model.add_continuous(format!("y{j}"), int(0), Some(int(rng.gen_range(1..=3))));
    }
    let n = nb + nc;
    for r in 0..rng.gen_range(1..=4) {
        let picked: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.7)).collect();
        let terms = picked.into_iter().map(|j| (j, int(rng.gen_range(-3..=3)))).collect();
        let sense = [Sense::Le, Sense::Ge, Sense::Le][rng.gen_range(0..3)];
        model.add_constraint(format!("r{r}"), terms, sense, Rational::new(rng.gen_range(-3..=5).into(), 2.into()));
    }
    model.set_objective((0..n).map(|j| (j, int(rng.gen_range(-5..=5)))).collect());
    model
}

/// Optimum by enumerating every binary assignment and solving the continuous
/// part by vertex enumeration; `None` when infeasible.
pub fn enumeration_oracle(model: &MilpModel) -> Option<Rational> {
    let nb = model.binaries().count();
    let nc = model.num_vars() - nb;
    let mut best: Option<Rational> = None;
    for mask in 0..(1u32 << nb) {
        let fixed: Vec<Rational> = (0..nb).map(|j| int(((mask >> j) & 1) as i64)).collect();
        let lp = LinearProgram {
            lower: (0..nc).map(|_| int(0)).collect(),
            upper: (0..nc).map(|j| model.variables[nb + j].upper.clone()).collect(),
            rows: model
                .constraints
                .iter()
                .map(|c| {
                    let mut rhs = c.rhs.clone();
                    let mut coeffs = Vec::new();
                    for (j, a) in &c.terms {
                        if *j < nb {
                            rhs -= a * &fixed[*j];
                        } else {
                            coeffs.push((*j - nb, a.clone()));
                        }
                    }
                    LpRow { coeffs, sense: c.sense, rhs }
                })
                .collect(),
            objective: (0..nc)
                .map(|j| model.objective.iter().find(|(v, _)| *v == nb + j).map_or(int(0), |(_, c)| c.clone()))
                .collect(),
        };
        let fixed_obj: Rational =
            model.objective.iter().filter(|(v, _)| *v < nb).map(|(v, c)| c * &fixed[*v]).sum();
        let cont = if nc == 0 {
            feasible(&lp, &[]).then(|| int(0))
        } else {
            vertex_oracle(&lp)
        };
        if let Some(v) = cont {
            let total = v + fixed_obj;
            if best.as_ref().map_or(true, |b| &total < b) {
                best = Some(total);
            }
        }
    }
    best
}
