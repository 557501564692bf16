use num_bigint::BigUint;

use super::ladder::{build_ladder, LadderVariant};
use super::witness::ThicknessWitness;
use super::{check_configuration, ExtractError, ExtractMode, ExtractionResult, Walk};
use crate::model::instance::product;
use crate::model::{BoundTemplate, Color, Coloring, Params, Template};

/// `{x_i, x_1···x_i, x_1 + ... + x_n}` over distinct `x_i`.
pub fn tower_template(n: u64) -> BoundTemplate {
    let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let prods: Vec<String> = (1..=n as usize).map(|i| vars[..i].join("*")).collect();
    let src = format!(
        "template tower{n}\nvars {}\nforms {}\nforms {}\nforms {}\ndistinct vars\n",
        vars.join(" "),
        vars.join("; "),
        prods.join("; "),
        vars.join("+")
    );
    BoundTemplate::new(Template::parse(&src).expect("generated tower template"), &Params::new()).expect("no parameters")
}

/// Ladder entries used for parameter `n`: enough for `n² + n − 1` indices
/// laid out in `(n+1)`-blocks with `2n` slack, and for the block count
/// that forces `n − 1` blocks of one color.
pub fn tower_entries(n: u64) -> usize {
    let n = n as usize;
    ((n - 1) * (n + 1) + n + 2 * n).max((2 * n - 3) * (n + 1) + n)
}

struct Exit {
    xs: Vec<BigUint>,
    color: Color,
    point: u8,
    label: String,
}

fn fmt_set(idx: &[usize]) -> String {
    let parts: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn sum_of(a: &[BigUint], idx: &[usize]) -> BigUint {
    idx.iter().map(|&i| &a[i]).sum()
}

/// Next `k`-subset of `0..m` in lexicographic order.
fn next_subset(s: &mut [usize], m: usize) -> bool {
    let k = s.len();
    for i in (0..k).rev() {
        if s[i] < m - k + i {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Points (2) and (3) on the `n²` indices `u`, grouped into consecutive
/// `n`-blocks `c_1 < ... < c_n`.
fn blocks_of_u(w: &mut Walk<'_>, a: &[BigUint], u: &[usize], n: usize) -> Result<Option<Exit>, ExtractError> {
    let (a_, b_) = (w.a(), w.b());
    let groups: Vec<&[usize]> = u.chunks(n).collect();
    let c: Vec<BigUint> = groups.iter().map(|g| sum_of(a, g)).collect();
    for j in 2..=n {
        let v = product(&c[..j]);
        let label = format!("c_1..c_{j} product, c over {}", fmt_set(u));
        if !w.expect(2, label, &v, b_)? {
            let p = product(&c[..j - 1]);
            let b: Vec<&BigUint> = groups[j - 1].iter().map(|&i| &a[i]).collect();
            let xs = (1..=n).map(|i| &p * b[n - i]).collect();
            return Ok(Some(Exit { xs, color: a_, point: 2, label: format!("x_i=c_1..c_{}*b_(n+1-i), b from c_{j}", j - 1) }));
        }
    }
    let total = sum_of(a, u);
    if !w.expect(3, format!("c_1+..+c_n over {}", fmt_set(u)), &total, a_)? {
        return Ok(Some(Exit { xs: c, color: b_, point: 3, label: "x_i=c_i".into() }));
    }
    Ok(None)
}

fn walk_points(w: &mut Walk<'_>, a: &[BigUint], n: usize) -> Result<(Exit, Vec<String>), ExtractError> {
    let (a_, b_) = (w.a(), w.b());
    let mut notes = vec!["c_i are sums over consecutive n-blocks of the chosen indices".to_string()];

    // (1) every sum of n entries.
    let mut s: Vec<usize> = (0..n).collect();
    loop {
        let v = sum_of(a, &s);
        if !w.expect(1, format!("sum over {}", fmt_set(&s)), &v, b_)? {
            let xs = s.iter().map(|&i| a[i].clone()).collect();
            return Ok((Exit { xs, color: a_, point: 1, label: format!("sum over {} in A: x_i=a_i", fmt_set(&s)) }, notes));
        }
        if !next_subset(&mut s, a.len()) {
            break;
        }
    }

    // Sums over consecutive (n+1)-blocks; n − 1 blocks of one color are
    // among the first 2n − 3, class A preferred.
    let block = n + 1;
    let scanned = (2 * n - 3).max(n - 1);
    let mut in_a = Vec::new();
    let mut in_b = Vec::new();
    for t in 0..scanned {
        let idx: Vec<usize> = (t * block..(t + 1) * block).collect();
        let v = sum_of(a, &idx);
        if w.expect(5, format!("b over {}", fmt_set(&idx)), &v, a_)? {
            in_a.push(idx);
        } else {
            in_b.push(idx);
        }
    }
    if in_a.len() >= n - 1 {
        let chosen = &in_a[..n - 1];
        let k = chosen.last().map_or(0, |b| b[n]) + 1;
        let mut u: Vec<usize> = chosen.iter().flatten().copied().collect();
        u.push(k);
        notes.push(format!("case (5): blocks {} and k={k}", chosen.iter().map(|b| fmt_set(b)).collect::<Vec<_>>().join(" ")));
        if let Some(e) = blocks_of_u(w, a, &u, n)? {
            return Ok((e, notes));
        }
        let mut xs = vec![a[k].clone()];
        xs.extend(chosen.iter().map(|b| sum_of(a, b)));
        return Ok((Exit { xs, color: a_, point: 5, label: "x_1=a_k, x_i=sum over I_i".into() }, notes));
    }

    let chosen = &in_b[..n - 1];
    let start = chosen.last().map_or(0, |b| b[n]) + 1;
    let i1: Vec<usize> = (start..start + n).collect();
    let mut j: Vec<usize> = chosen.iter().flatten().copied().collect();
    j.extend(&i1);
    notes.push(format!(
        "case (6): blocks {} and I_1={}",
        chosen.iter().map(|b| fmt_set(b)).collect::<Vec<_>>().join(" "),
        fmt_set(&i1)
    ));
    let u = &j[..n * n];
    if let Some(e) = blocks_of_u(w, a, u, n)? {
        return Ok((e, notes));
    }

    // (4)
    let total = sum_of(a, &j);
    if !w.expect(4, format!("sum over {}", fmt_set(&j)), &total, b_)? {
        let mut xs = vec![sum_of(a, u)];
        xs.extend(j[n * n..].iter().map(|&i| a[i].clone()));
        return Ok((Exit { xs, color: a_, point: 4, label: "x_1=sum of n^2 smallest, x_(1+i)=next entries".into() }, notes));
    }

    // (6)
    let mut xs = vec![sum_of(a, &i1)];
    xs.extend(chosen.iter().map(|b| sum_of(a, b)));
    for jj in 2..=n {
        let v = product(&xs[..jj]);
        if !w.expect(6, format!("x_1*x_2..x_{jj}"), &v, b_)? {
            let m = product(&xs[1..jj]);
            let xs = i1.iter().map(|&i| &a[i] * &m).collect();
            return Ok((Exit { xs, color: a_, point: 6, label: format!("x'_i=b_i*x_2..x_{jj}") }, notes));
        }
    }
    Ok((Exit { xs, color: b_, point: 6, label: "all partial products in B".into() }, notes))
}

/// Run the case analysis for `{x_i, x_1···x_i, Σx_i}` with every `x_i`
/// above `floor`.
pub fn extract_tower(c: &Coloring, witness: &dyn ThicknessWitness, n: u64, floor: &BigUint) -> Result<ExtractionResult, ExtractError> {
    if n < 2 {
        return Err(ExtractError::Parameter(n));
    }
    let ladder = build_ladder(witness, n, tower_entries(n), LadderVariant::Powers, floor)?;
    let mut w = Walk { c, class: witness.class(), trace: Default::default() };
    let (exit, notes) = walk_points(&mut w, &ladder.entries, n as usize)?;
    if let Some(x) = exit.xs.iter().find(|x| *x <= floor) {
        return Err(ExtractError::Verification(format!("{x} is not above the floor {floor}")));
    }
    let values = check_configuration(c, &tower_template(n), &exit.xs, exit.color).map_err(ExtractError::Verification)?;
    Ok(ExtractionResult {
        mode: ExtractMode::Tower { n },
        assignment: exit.xs,
        values,
        color: exit.color,
        exit_point: exit.point,
        exit: exit.label,
        trace: w.trace,
        ladder,
        notes,
    })
}
