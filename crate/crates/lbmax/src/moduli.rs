//! Genus-1 moduli space: the fundamental domain
//! F = {a in (-1/2, 1/2], a^2 + b^2 >= 1} and the three transformations of
//! (a, b) that leave every normalized eigenvalue unchanged.

use crate::error::{invalid, Error, Result};
use crate::lattice::TorusParams;

/// Slack on the unit-circle test. (1/2, sqrt(3)/2) rounds to a^2+b^2 just
/// below 1 in binary, yet is a corner of F.
pub const CIRCLE_TOL: f64 = 1e-12;

const MAX_STEPS: usize = 64;

/// One of the generators of the modular action on (a, b).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Reflect,
    /// shift by an integer amount
    Shift(i64),
    Invert,
}

fn check(p: &TorusParams) -> Result<()> {
    p.validate()
}

pub fn contains(p: TorusParams) -> Result<bool> {
    check(&p)?;
    Ok(p.a > -0.5 && p.a <= 0.5 && p.a * p.a + p.b * p.b >= 1.0 - CIRCLE_TOL)
}

pub fn reflect(p: TorusParams) -> Result<TorusParams> {
    check(&p)?;
    Ok(TorusParams { a: -p.a, b: p.b })
}

pub fn shift(p: TorusParams) -> Result<TorusParams> {
    shift_by(p, 1)
}

pub fn shift_by(p: TorusParams, n: i64) -> Result<TorusParams> {
    check(&p)?;
    Ok(TorusParams { a: p.a + n as f64, b: p.b })
}

pub fn invert(p: TorusParams) -> Result<TorusParams> {
    check(&p)?;
    let r2 = p.a * p.a + p.b * p.b;
    Ok(TorusParams { a: -p.a / r2, b: p.b / r2 })
}

pub fn apply(p: TorusParams, m: Move) -> Result<TorusParams> {
    match m {
        Move::Reflect => reflect(p),
        Move::Shift(n) => shift_by(p, n),
        Move::Invert => invert(p),
    }
}

/// Reduce (a, b) into F, returning the point and the moves applied in order.
pub fn canonicalize_with_moves(p: TorusParams) -> Result<(TorusParams, Vec<Move>)> {
    check(&p)?;
    let mut q = p;
    let mut moves = Vec::new();
    for _ in 0..MAX_STEPS {
        // a - ceil(a - 1/2) lies in (-1/2, 1/2] and sends -1/2 to 1/2
        let n = -((q.a - 0.5).ceil() as i64);
        if n != 0 {
            q = shift_by(q, n)?;
            moves.push(Move::Shift(n));
        }
        if q.a * q.a + q.b * q.b < 1.0 - CIRCLE_TOL {
            q = invert(q)?;
            moves.push(Move::Invert);
            if !q.b.is_finite() || q.b <= 0.0 {
                break;
            }
        } else {
            return Ok((q, moves));
        }
    }
    Err(Error::IterationCap(format!("moduli reduction of ({}, {}) did not terminate", p.a, p.b)))
}

pub fn canonicalize(p: TorusParams) -> Result<TorusParams> {
    Ok(canonicalize_with_moves(p)?.0)
}

pub fn require_in_domain(p: TorusParams) -> Result<()> {
    if contains(p)? {
        Ok(())
    } else {
        invalid(format!("({}, {}) is outside the fundamental domain", p.a, p.b))
    }
}
