//! Bracketing root finder on interval evaluations.
//!
//! Pure bisection: the bracket is recursively subdivided and a cell is
//! kept only while its image possibly intersects the target interval.
//! The hull of the surviving cells is a certified enclosure of every
//! solution of f(x) ∈ target inside the bracket. Point targets on a
//! strictly monotone f shrink to the requested precision; interval
//! targets stop once the target width dominates (the returned hull is
//! then as tight as the data permits).

use super::dyadic::Dyadic;
use super::interval::{Interval, NumericError, Precision};

/// Claimed monotonicity of f on the bracket. Recorded for the caller's
/// contract; the subdivision itself never assumes it, which keeps the
/// enclosure sound even when the target touches an interior extremum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

const CELL_CAP: usize = 24;

/// Enclosure of the x with f(x) ∈ target inside `bracket`.
pub fn bisect_monotone<F>(
    f: F,
    target: &Interval,
    bracket: &Interval,
    _direction: Direction,
    prec: Precision,
) -> Result<Interval, NumericError>
where
    F: Fn(&Interval) -> Result<Interval, NumericError>,
{
    let goal = Dyadic::two_pow(-(prec.bits() as i64));
    let cell_goal = Dyadic::two_pow(-(prec.bits() as i64) - 2);
    let wp = prec.working(16);
    let mut cells: Vec<Interval> = vec![bracket.clone()];
    let max_rounds = prec.bits() as usize + 80;

    for _ in 0..max_rounds {
        let hull = hull_of(&cells);
        if hull.width() <= goal {
            return Ok(hull);
        }
        if cells.len() > CELL_CAP {
            // The possible-solution set is wider than one cell chain can
            // express: the target interval is the limiting factor.
            return Ok(hull);
        }
        if cells.iter().all(|c| c.width() <= cell_goal) {
            return Ok(hull);
        }
        let mut next: Vec<Interval> = Vec::with_capacity(cells.len() * 2);
        for cell in &cells {
            if cell.width() <= cell_goal {
                next.push(cell.clone());
                continue;
            }
            let mut mid = cell.midpoint_rounded(wp);
            if &mid <= cell.lo() || &mid >= cell.hi() {
                mid = cell.lo().add(cell.hi()).shift(-1);
            }
            let halves = [
                Interval::new(cell.lo().clone(), mid.clone())?,
                Interval::new(mid, cell.hi().clone())?,
            ];
            for half in halves {
                let image = f(&half)?;
                if image.intersects(target) {
                    next.push(half);
                }
            }
        }
        if next.is_empty() {
            return Err(NumericError::Bracket(format!(
                "no solution of f(x) in {target} inside bracket {bracket} \
                 (endpoint evaluations do not straddle the target)"
            )));
        }
        cells = next;
    }
    Err(NumericError::NonConvergence(format!(
        "interval evaluations cannot separate the target {target} at precision {}",
        prec.bits()
    )))
}

fn hull_of(cells: &[Interval]) -> Interval {
    let mut hull = cells[0].clone();
    for c in &cells[1..] {
        hull = hull.hull(c);
    }
    hull
}
