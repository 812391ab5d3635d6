//! Tiny parser for integer polynomials in w (or w1, w2): sums of terms
//! `[coeff *] var [^ exp]`, e.g. "w1^3+2*w2^3", "3*w^2-w+1", "-5".

use famlab_core::elliptic::IntPoly;

pub fn parse_poly(text: &str) -> Result<IntPoly, String> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err("empty polynomial".into());
    }
    let mut monomials = Vec::new();
    let mut rest = cleaned.as_str();
    let mut sign = 1i64;
    if let Some(r) = rest.strip_prefix('-') {
        sign = -1;
        rest = r;
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r;
    }
    loop {
        let split = rest.find(['+', '-']).unwrap_or(rest.len());
        let term = &rest[..split];
        monomials.push(parse_term(term, sign)?);
        if split == rest.len() {
            break;
        }
        sign = if rest.as_bytes()[split] == b'+' { 1 } else { -1 };
        rest = &rest[split + 1..];
    }
    IntPoly::new(monomials).map_err(|e| e.to_string())
}

fn parse_term(term: &str, sign: i64) -> Result<(i64, u32, u32), String> {
    if term.is_empty() {
        return Err("empty term".into());
    }
    let mut coeff = 1i64;
    let mut e1 = 0u32;
    let mut e2 = 0u32;
    let mut saw_factor = false;
    for factor in term.split('*') {
        if factor.is_empty() {
            return Err(format!("empty factor in '{term}'"));
        }
        saw_factor = true;
        if let Ok(c) = factor.parse::<i64>() {
            coeff = coeff.checked_mul(c).ok_or("coefficient overflow")?;
            continue;
        }
        let (var, exp) = match factor.split_once('^') {
            Some((v, e)) => (v, e.parse::<u32>().map_err(|e| e.to_string())?),
            None => (factor, 1),
        };
        match var {
            "w" | "w1" => e1 += exp,
            "w2" => e2 += exp,
            other => return Err(format!("unknown variable '{other}'")),
        }
    }
    if !saw_factor {
        return Err(format!("cannot parse '{term}'"));
    }
    Ok((sign * coeff, e1, e2))
}
