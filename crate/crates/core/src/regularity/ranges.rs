//! Exact exponent calculators.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{rat, Exponent, Rational};

/// Exponents of a restriction estimate with their exact conjugates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentParams {
    pub n: u32,
    pub p: Exponent,
    pub q: Exponent,
    pub r: Exponent,
    pub p_conj: Exponent,
    pub q_conj: Exponent,
    pub r_conj: Exponent,
    /// `s = p'/n`.
    pub s: Exponent,
    pub s_conj: Exponent,
}

impl ExponentParams {
    /// Parameters of the endpoint estimate: `q = p'/(n r')`, `s = p'/n`.
    pub fn endpoint(n: u32, r: Exponent, p: Exponent) -> Result<ExponentParams> {
        let range = theorem_range(n, r)?;
        p.require_lebesgue("p")?;
        if p > range.p_max {
            return Err(Error::Infeasible(format!(
                "p = {p} exceeds p_max = {} for n = {n}, r = {r}",
                range.p_max
            )));
        }
        let q = range.q_max(p);
        if !q.is_lebesgue() {
            return Err(Error::Infeasible(format!("q = p'/(n r') = {q} < 1")));
        }
        let p_conj = p.conj();
        let s = p_conj.div(Rational::from_integer(n as i64));
        Ok(ExponentParams {
            n,
            p,
            q,
            r,
            p_conj,
            q_conj: q.conj(),
            r_conj: r.conj(),
            s,
            s_conj: s.conj(),
        })
    }
}

/// The admissible region of the convolution-power restriction theorem for
/// given `(n, r)`: `1 <= p <= p_max`, `1 <= q <= p'/(n r')`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentRange {
    pub n: u32,
    pub r: Exponent,
    pub r_conj: Exponent,
    pub p_max: Exponent,
    pub q_at_p_max: Exponent,
    pub feasible: bool,
}

impl ExponentRange {
    /// `q_max(p) = p'/(n r')`. When both `p'` and `r'` are infinite the
    /// value is taken as `∞` (at `p = 1` every `q` is admissible).
    pub fn q_max(&self, p: Exponent) -> Exponent {
        let pc = p.conj();
        match (pc, self.r_conj) {
            (Exponent::Infinite, _) => Exponent::Infinite,
            (Exponent::Finite(_), Exponent::Infinite) => Exponent::Finite(Rational::zero()),
            (Exponent::Finite(a), Exponent::Finite(b)) => {
                Exponent::Finite(a / (b * Rational::from_integer(self.n as i64)))
            }
        }
    }

    pub fn contains(&self, p: Exponent, q: Exponent) -> bool {
        p.is_lebesgue() && q.is_lebesgue() && p <= self.p_max && q <= self.q_max(p)
    }

    /// Multiplier `n r'` in `q_max(p) = p'/(n r')`, or `None` when `r' = ∞`.
    pub fn q_divisor(&self) -> Option<Rational> {
        self.r_conj
            .finite()
            .map(|rc| rc * Rational::from_integer(self.n as i64))
    }
}

pub fn theorem_range(n: u32, r: Exponent) -> Result<ExponentRange> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    r.require_lebesgue("r")?;
    let nn = Rational::from_integer(n as i64);
    let r_conj = r.conj();
    let p_max = if r >= Exponent::int(2) {
        Exponent::Finite(nn * 2 / (nn * 2 - Rational::one()))
    } else {
        match r_conj {
            Exponent::Infinite => Exponent::one(),
            Exponent::Finite(rc) => Exponent::Finite(nn * rc / (nn * rc - Rational::one())),
        }
    };
    let mut range = ExponentRange {
        n,
        r,
        r_conj,
        p_max,
        q_at_p_max: Exponent::one(),
        feasible: true,
    };
    range.q_at_p_max = range.q_max(p_max);
    range.feasible = range.q_at_p_max.is_lebesgue();
    Ok(range)
}

/// `p_0 = (4(d-α) + 2β) / (4(d-α) + β)`.
pub fn mockenhaupt_p0(d: i64, alpha: Rational, beta: Rational) -> Result<Rational> {
    let dd = Rational::from_integer(d);
    let zero = Rational::zero();
    if d < 1 || alpha < zero || alpha >= dd || beta < zero || beta >= dd {
        return Err(Error::InvalidArgument(format!(
            "need d >= 1 and 0 <= alpha, beta < d (d={d}, alpha={alpha}, beta={beta})"
        )));
    }
    let a = (dd - alpha) * 4;
    Ok((a + beta * 2) / (a + beta))
}

/// Upper end `2(d+1)/(d+3)` of the sphere range.
pub fn stein_tomas(d: i64) -> Rational {
    rat(2 * (d + 1), d + 3)
}

/// The range `(6 - 4ε)/(5 - 6ε)` obtained for `α = β = 1/2 + ε` in `d = 1`.
pub fn near_half_range(eps: Rational) -> Result<Rational> {
    let half = rat(1, 2);
    mockenhaupt_p0(1, half + eps, half + eps)
}

/// Necessary condition `q <= (γ/d) p'`.
pub fn knapp_bound(d: i64, gamma: Rational, p: Exponent) -> Result<Exponent> {
    p.require_lebesgue("p")?;
    if d < 1 || gamma <= Rational::zero() || gamma > Rational::from_integer(d) {
        return Err(Error::InvalidArgument(format!("need 0 < gamma <= d (gamma={gamma}, d={d})")));
    }
    Ok(p.conj().scale(gamma / Rational::from_integer(d)))
}

/// Checks `1/s' - 1/(q r) = 1/q'` exactly for `q = p'/(n r')`, `s = p'/n`.
pub fn exponent_identity(n: u32, r: Exponent, p: Exponent) -> Result<bool> {
    let e = ExponentParams::endpoint(n, r, p)?;
    let lhs = e.s_conj.inv() - e.q.inv() * e.r.inv();
    let rhs = e.q_conj.inv();
    Ok(lhs == rhs)
}
