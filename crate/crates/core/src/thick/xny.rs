use num_bigint::BigUint;

use super::ladder::{build_ladder, Ladder, LadderVariant};
use super::witness::ThicknessWitness;
use super::{check_configuration, ExtractError, ExtractMode, ExtractionResult, Walk};
use crate::builtin;
use crate::model::{BoundTemplate, Color, Coloring, Params};

/// `{x, y, xy, x + n·y}` with `n` bound.
pub fn xny_template(n: u64) -> BoundTemplate {
    builtin::bound("xny", &Params::new().with("n", n)).expect("bundled xny template")
}

struct Exit {
    x: BigUint,
    y: BigUint,
    color: Color,
    point: u8,
    label: String,
}

fn walk_points(w: &mut Walk<'_>, a: &[BigUint], n: &BigUint) -> Result<Exit, ExtractError> {
    let (a_, b_) = (w.a(), w.b());
    let exit = |x: BigUint, y: BigUint, color, point, label: &str| Ok(Exit { x, y, color, point, label: label.to_string() });

    // (1) a_j + n·a_i for every i < j.
    for j in 1..a.len() {
        for i in 0..j {
            let v = &a[j] + n * &a[i];
            if !w.expect(1, format!("a_{j}+n*a_{i}"), &v, b_)? {
                return exit(a[j].clone(), a[i].clone(), a_, 1, &format!("a_{j}+n*a_{i} in A: x=a_{j}, y=a_{i}"));
            }
        }
    }
    let s10 = &a[1] + n * &a[0];
    let s32 = &a[3] + n * &a[2];

    // (2)
    let v = &s32 * &s10;
    if !w.expect(2, "(a_3+n*a_2)(a_1+n*a_0)", &v, b_)? {
        return exit(&s10 * &a[3], &s10 * &a[2], a_, 2, "x=(a_1+n*a_0)a_3, y=(a_1+n*a_0)a_2");
    }

    // (3)
    let p3 = &s32 + n * &s10;
    if !w.expect(3, "(a_3+n*a_2)+n(a_1+n*a_0)", &p3, a_)? {
        return exit(s32, s10, b_, 3, "x=a_3+n*a_2, y=a_1+n*a_0");
    }

    // (4)
    let v = &a[4] + n * &p3;
    if !w.expect(4, "a_4+n((a_3+n*a_2)+n(a_1+n*a_0))", &v, b_)? {
        return exit(a[4].clone(), p3, a_, 4, "x=a_4, y=(a_3+n*a_2)+n(a_1+n*a_0)");
    }

    // (5) / (6) on the color of y.
    let y = &a[2] + &a[1] + n * &a[0];
    if w.expect(5, "y=a_2+a_1+n*a_0", &y, a_)? {
        return exit(a[3].clone(), y, a_, 5, "y in A: x=a_3");
    }
    let x = &a[4] + n * &a[3];
    let xy = &x * &y;
    if !w.expect(6, "xy with x=a_4+n*a_3", &xy, b_)? {
        return exit(&a[4] * &y, &a[3] * &y, a_, 6, "xy in A: x'=a_4y, y'=a_3y");
    }
    // Point (4) is cited for x+ny here; the two values agree only for n=1.
    let xny = &x + n * &y;
    if !w.expect(6, "x+ny=a_4+n(a_3+a_2+a_1+n*a_0)", &xny, b_)? {
        return Err(ExtractError::Unjustified { point: 6, label: "x+ny".into(), value: xny, trace: std::mem::take(&mut w.trace) });
    }
    exit(x, y, b_, 6, "xy in B: x=a_4+n*a_3, y=a_2+a_1+n*a_0")
}

/// Run the case analysis for `{x, y, xy, x + n·y}` on a five-entry ladder.
pub fn extract_xy_xny(c: &Coloring, witness: &dyn ThicknessWitness, n: u64, floor: &BigUint) -> Result<ExtractionResult, ExtractError> {
    if n == 0 {
        return Err(ExtractError::Parameter(n));
    }
    let ladder: Ladder = build_ladder(witness, n, 5, LadderVariant::Squares, floor)?;
    let mut w = Walk { c, class: witness.class(), trace: Default::default() };
    let nb = BigUint::from(n);
    let exit = walk_points(&mut w, &ladder.entries, &nb)?;
    let assignment = vec![exit.x, exit.y];
    let values = check_configuration(c, &xny_template(n), &assignment, exit.color).map_err(ExtractError::Verification)?;
    Ok(ExtractionResult {
        mode: ExtractMode::Xny { n },
        assignment,
        values,
        color: exit.color,
        exit_point: exit.point,
        exit: exit.label,
        trace: w.trace,
        ladder,
        notes: Vec::new(),
    })
}
