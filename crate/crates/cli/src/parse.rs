//! Parsers for command-line values.

use mollifier_core::{Alpha, Error, RationalPoint};

/// `sqrt(2) - 1` to 20 digits.
pub const SQRT2_FRAC: &str = "0.41421356237309504880";
/// `(sqrt(5) - 1) / 2` to 20 digits.
pub const GOLDEN_FRAC: &str = "0.61803398874989484820";
/// `pi - 3` to 20 digits.
pub const PI_FRAC: &str = "0.14159265358979323846";

/// An evaluation point together with the text it was given as.
#[derive(Clone, Debug)]
pub struct AlphaSpec {
    pub label: String,
    pub alpha: Alpha<f64>,
}

/// `a/q` (must be reduced), a decimal, or one of `sqrt2`, `golden`, `pi_frac`.
pub fn parse_alpha(text: &str) -> Result<AlphaSpec, Error> {
    let s = text.trim();
    let named = match s {
        "sqrt2" => Some(SQRT2_FRAC),
        "golden" => Some(GOLDEN_FRAC),
        "pi_frac" => Some(PI_FRAC),
        _ => None,
    };
    let alpha = if let Some(lit) = named {
        Alpha::Real(lit.parse().expect("literal parses"))
    } else if let Some((a, q)) = s.split_once('/') {
        let a: i64 = a
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("bad numerator in {s:?}")))?;
        let q: u64 = q
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("bad denominator in {s:?}")))?;
        if q == 0 {
            return Err(Error::Domain(format!("zero denominator in {s:?}")));
        }
        Alpha::Rational(RationalPoint::new(a, q)?)
    } else {
        let x: f64 = s
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse alpha {s:?}")))?;
        if !x.is_finite() {
            return Err(Error::Domain(format!("alpha {s:?} is not finite")));
        }
        Alpha::Real(x)
    };
    Ok(AlphaSpec {
        label: s.to_string(),
        alpha,
    })
}

/// A positive integer written plainly or in exponent form (`1e6`, `2.5e3`).
pub fn parse_count(text: &str) -> Result<usize, Error> {
    let s = text.trim();
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    let x: f64 = s
        .parse()
        .map_err(|_| Error::Domain(format!("cannot parse integer {s:?}")))?;
    if !(x >= 0.0) || x.fract() != 0.0 || x > 1e18 {
        return Err(Error::Domain(format!("{s:?} is not a non-negative integer")));
    }
    Ok(x as usize)
}

/// Comma-separated, strictly increasing list of positive integers.
pub fn parse_schedule(text: &str) -> Result<Vec<usize>, Error> {
    let values = text
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_count)
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(Error::Domain("empty schedule".into()));
    }
    if values[0] == 0 {
        return Err(Error::Domain("schedule entries must be positive".into()));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("schedule must be strictly increasing".into()));
    }
    Ok(values)
}

/// Comma-separated positive reals, strictly decreasing.
pub fn parse_eps_list(text: &str) -> Result<Vec<f64>, Error> {
    let values = text
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("cannot parse {p:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() || values.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::Domain("eps values must be positive".into()));
    }
    if values.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Domain("eps values must be decreasing".into()));
    }
    Ok(values)
}
