//! Exact real numbers of the form `q0 + Σ q_i · ln(k_i)`.
//!
//! Every level that shows up in this crate (logarithmic minima of lattices,
//! slopes, the constants `log(3r/2)`, `log √r`, rescaled monomial weights) is
//! a rational number plus a rational combination of logarithms of positive
//! integers. [`Real`] stores exactly that. The integers `k_i` are kept
//! pairwise coprime, which makes the `ln(k_i)` linearly independent over the
//! rationals together with `1`; equality is therefore decided exactly, and
//! the sign of a non-zero value is certified by evaluating it with
//! increasing binary precision until the error bound is below its magnitude.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// First precision (in bits) tried when certifying a sign.
const START_PRECISION: usize = 128;
/// Precision cap; reaching it means the value is closer to zero than 2^-16000.
pub const PRECISION_CAP: usize = 16384;
/// Significant decimal digits used when a level is written out.
pub const DECIMAL_DIGITS: usize = 50;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

#[derive(Clone, Default)]
pub struct Real {
    rational: Rational,
    // keys > 1, pairwise coprime; coefficients non-zero
    logs: BTreeMap<BigUint, Rational>,
}

impl Real {
    pub fn zero() -> Self {
        Real::default()
    }

    pub fn from_rational(q: Rational) -> Self {
        Real {
            rational: q,
            logs: BTreeMap::new(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Real::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Real::from_rational(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `ln(q)` for a positive rational `q`.
    pub fn ln(q: &Rational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::InvalidParameter(format!("logarithm of non-positive {q}")));
        }
        let num = q.numer().magnitude().clone();
        let den = q.denom().magnitude().clone();
        Ok(Real::log_terms(vec![(num, Rational::one()), (den, -Rational::one())]))
    }

    pub fn ln_int(n: u64) -> Self {
        Real::ln(&Rational::from_integer(BigInt::from(n))).expect("positive integer")
    }

    /// `½ ln(q)`, i.e. `ln √q`.
    pub fn ln_sqrt(q: &Rational) -> Result<Self> {
        Ok(Real::ln(q)?.scale(&Rational::new(1.into(), 2.into())))
    }

    fn log_terms(terms: Vec<(BigUint, Rational)>) -> Self {
        Real {
            rational: Rational::zero(),
            logs: refine(terms),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.logs.is_empty()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.logs.is_empty().then_some(&self.rational)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.logs.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Real::zero();
        }
        Real {
            rational: &self.rational * c,
            logs: self.logs.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Certified sign. Fails only if the value is non-zero but smaller in
    /// magnitude than the precision cap can resolve.
    pub fn try_signum(&self) -> Result<Ordering> {
        if self.logs.is_empty() {
            return Ok(self.rational.cmp(&Rational::zero()));
        }
        let mut prec = START_PRECISION;
        while prec <= PRECISION_CAP {
            if let Some(sign) = self.sign_at(prec) {
                return Ok(sign);
            }
            prec *= 2;
        }
        Err(Error::PrecisionCap)
    }

    pub fn signum(&self) -> Ordering {
        self.try_signum().expect("sign undecided at precision cap")
    }

    pub fn try_cmp(&self, other: &Real) -> Result<Ordering> {
        (self - other).try_signum()
    }

    fn sign_at(&self, prec: usize) -> Option<Ordering> {
        let value = self.big_float(prec);
        if value.is_zero() {
            return None;
        }
        let exp = value.exponent()? as f64;
        // |value| >= 2^(exp-1); error <= magnitude * (terms + 6) * 2^(2 - prec)
        let magnitude = self.rational.abs().to_f64().unwrap_or(f64::MAX)
            + self
                .logs
                .iter()
                .map(|(k, c)| c.abs().to_f64().unwrap_or(f64::MAX) * (ln_biguint_f64(k) + 1.0))
                .sum::<f64>();
        let err_log2 = (magnitude + 1.0).log2() + ((self.logs.len() + 6) as f64).log2() + 2.0 - prec as f64;
        if exp - 1.0 > err_log2 + 1.0 {
            Some(if value.is_negative() {
                Ordering::Less
            } else {
                Ordering::Greater
            })
        } else {
            None
        }
    }

    fn big_float(&self, prec: usize) -> BigFloat {
        CONSTS.with(|cc| {
            let cc = &mut *cc.borrow_mut();
            let mut acc = rational_to_bf(&self.rational, prec, cc);
            for (k, c) in &self.logs {
                let kf = biguint_to_bf(k, prec, cc);
                let ln = kf.ln(prec, RM, cc);
                let term = ln.mul(&rational_to_bf(c, prec, cc), prec, RM);
                acc = acc.add(&term, prec, RM);
            }
            acc
        })
    }

    pub fn to_f64(&self) -> f64 {
        let mut v = self.rational.to_f64().unwrap_or(f64::NAN);
        for (k, c) in &self.logs {
            v += c.to_f64().unwrap_or(f64::NAN) * ln_biguint_f64(k);
        }
        v
    }

    /// Decimal expansion with [`DECIMAL_DIGITS`] significant digits.
    pub fn to_decimal_string(&self) -> String {
        self.to_decimal_digits(DECIMAL_DIGITS)
    }

    pub fn to_decimal_digits(&self, digits: usize) -> String {
        if let Some(q) = self.as_rational() {
            if let Some(s) = exact_decimal(q) {
                return s;
            }
        }
        let prec = (digits as f64 * 3.33) as usize + 64;
        let bf = self.big_float(prec);
        let formatted = CONSTS.with(|cc| bf.format(Radix::Dec, RM, &mut cc.borrow_mut()));
        match formatted {
            Ok(s) => scientific_to_plain(&s, digits),
            Err(_) => format!("{:e}", self.to_f64()),
        }
    }

    /// `⌊e^x⌋`, certified by exact comparisons `ln k ≤ x < ln(k+1)`.
    pub fn floor_exp(&self) -> Result<BigUint> {
        match self.try_signum()? {
            Ordering::Less => return Ok(BigUint::zero()),
            Ordering::Equal => return Ok(BigUint::one()),
            Ordering::Greater => {}
        }
        let f = self.to_f64();
        if f > 1.0e5 {
            return Err(Error::Unsupported(format!("e^{f} is too large to count")));
        }
        let digits = (f / std::f64::consts::LN_10) as usize + 24;
        let prec = (digits as f64 * 3.33) as usize + 64;
        let x = self.big_float(prec);
        let approx = CONSTS.with(|cc| {
            let cc = &mut *cc.borrow_mut();
            let e = x.exp(prec, RM, cc);
            e.format(Radix::Dec, RM, cc)
        });
        let plain = scientific_to_plain(&approx.map_err(|_| Error::PrecisionCap)?, digits);
        let int_part = plain.split('.').next().unwrap_or("0");
        let mut k: BigUint = int_part.parse().unwrap_or_else(|_| BigUint::zero());
        let ln_of = |k: &BigUint| Real::ln(&Rational::from_integer(BigInt::from(k.clone())));
        while ln_of(&(&k + 1u32))?.try_cmp(self)? != Ordering::Greater {
            k += 1u32;
        }
        while !k.is_zero() && ln_of(&k)?.try_cmp(self)? == Ordering::Greater {
            k -= 1u32;
        }
        Ok(k)
    }

    /// Rational enclosure `[lo, hi]` of width at most `2^-bits` (relative to 1).
    pub fn enclosure(&self, bits: u32) -> (Rational, Rational) {
        if let Some(q) = self.as_rational() {
            return (q.clone(), q.clone());
        }
        let prec = bits as usize + 64;
        let s = self.to_decimal_digits((bits as f64 / 3.3) as usize + 4);
        let mid = parse_decimal(&s).expect("own decimal output parses");
        let mag = mid.abs() + Rational::one();
        let slack = mag / Rational::from_integer(BigInt::one() << (bits.min(prec as u32)));
        (&mid - &slack, &mid + &slack)
    }
}

/// Rewrite `Π k_i^{c_i}` over a pairwise-coprime base.
fn refine(terms: Vec<(BigUint, Rational)>) -> BTreeMap<BigUint, Rational> {
    let one = BigUint::one();
    let mut base: Vec<BigUint> = Vec::new();
    for (k, c) in &terms {
        if *k > one && !c.is_zero() {
            insert_coprime(&mut base, k.clone());
        }
    }
    let mut out: BTreeMap<BigUint, Rational> = BTreeMap::new();
    for (k, c) in terms {
        if k <= one || c.is_zero() {
            continue;
        }
        let mut rest = k;
        for b in &base {
            let mut e = 0u64;
            while (&rest % b).is_zero() {
                rest /= b;
                e += 1;
            }
            if e > 0 {
                let entry = out.entry(b.clone()).or_insert_with(Rational::zero);
                *entry += &c * Rational::from_integer(BigInt::from(e));
            }
        }
        debug_assert!(rest.is_one());
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn insert_coprime(base: &mut Vec<BigUint>, x: BigUint) {
    let one = BigUint::one();
    let mut pending = vec![x];
    while let Some(y) = pending.pop() {
        if y <= one {
            continue;
        }
        let hit = base.iter().position(|b| !b.gcd(&y).is_one());
        match hit {
            None => base.push(y),
            Some(i) => {
                let b = base.swap_remove(i);
                let g = b.gcd(&y);
                if b == y {
                    base.push(b);
                    continue;
                }
                pending.push(&b / &g);
                pending.push(&y / &g);
                pending.push(g);
            }
        }
    }
    base.sort();
}

fn ln_biguint_f64(k: &BigUint) -> f64 {
    let bits = k.bits();
    if bits <= 60 {
        return k.to_f64().unwrap().ln();
    }
    let shift = bits - 53;
    let top = (k >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn biguint_to_bf(k: &BigUint, prec: usize, cc: &mut Consts) -> BigFloat {
    let p = prec.max(k.bits() as usize + 64);
    BigFloat::parse(&k.to_string(), Radix::Dec, p, RM, cc)
}

fn rational_to_bf(q: &Rational, prec: usize, cc: &mut Consts) -> BigFloat {
    let n = biguint_to_bf(q.numer().magnitude(), prec, cc);
    let n = if q.numer().sign() == Sign::Minus { n.neg() } else { n };
    if q.denom().is_one() {
        return n;
    }
    let d = biguint_to_bf(q.denom().magnitude(), prec, cc);
    n.div(&d, prec, RM)
}

/// Exact decimal string when the denominator only has factors 2 and 5.
fn exact_decimal(q: &Rational) -> Option<String> {
    let mut d = q.denom().magnitude().clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigUint::from(2u32);
    let five = BigUint::from(5u32);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return None;
    }
    let scale = twos.max(fives);
    let scaled = q * Rational::from_integer(BigInt::from(10u32).pow(scale));
    let n = scaled.to_integer();
    if scale == 0 {
        return Some(n.to_string());
    }
    let neg = n.is_negative();
    let digits = n.abs().to_string();
    let digits = format!("{:0>width$}", digits, width = scale as usize + 1);
    let (int, frac) = digits.split_at(digits.len() - scale as usize);
    Some(format!("{}{}.{}", if neg { "-" } else { "" }, int, frac))
}

/// `"-1.0986e-3"` (astro-float style) to a plain decimal with `digits` significant digits.
fn scientific_to_plain(s: &str, digits: usize) -> String {
    let (mant, exp) = match s.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (s, 0),
    };
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches('-');
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    let mut all: Vec<u8> = ip.bytes().chain(fp.bytes()).map(|b| b - b'0').collect();
    let mut point = ip.len() as i64 + exp;
    // strip leading zeros
    while all.len() > 1 && all[0] == 0 {
        all.remove(0);
        point -= 1;
    }
    if all.iter().all(|&d| d == 0) {
        return "0".to_string();
    }
    if all.len() > digits {
        let round_up = all[digits] >= 5;
        all.truncate(digits);
        if round_up {
            let mut i = digits;
            loop {
                if i == 0 {
                    all.insert(0, 1);
                    point += 1;
                    break;
                }
                i -= 1;
                if all[i] == 9 {
                    all[i] = 0;
                } else {
                    all[i] += 1;
                    break;
                }
            }
        }
    }
    while all.len() > 1 && *all.last().unwrap() == 0 && (all.len() as i64) > point {
        all.pop();
    }
    let chars: String = all.iter().map(|d| (b'0' + d) as char).collect();
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), chars)
    } else if point as usize >= chars.len() {
        format!("{}{}", chars, "0".repeat(point as usize - chars.len()))
    } else {
        format!("{}.{}", &chars[..point as usize], &chars[point as usize..])
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Parse `"p/q"`, integers, and decimals with optional exponent into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
        let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(p, q));
    }
    parse_decimal(s)
}

pub fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad decimal `{s}`"));
    let s = s.trim();
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.bytes().chain(fp.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{ip}{fp}").parse().map_err(|_| bad())?;
    let scale = exp - fp.len() as i64;
    let ten = BigInt::from(10u32);
    let mut q = if scale >= 0 {
        Rational::from_integer(digits * ten.pow(scale as u32))
    } else {
        Rational::new(digits, ten.pow((-scale) as u32))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

/// `"p/q"` (or `"p"` when integral).
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.rational))?;
        for (k, c) in &self.logs {
            write!(f, " + ({})·ln({})", format_rational(c), k)?;
        }
        Ok(())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{}", self.to_decimal_digits(p.max(1))),
            None => write!(f, "{}", self.to_decimal_string()),
        }
    }
}

impl<'a> Add<&'a Real> for &'a Real {
    type Output = Real;
    fn add(self, rhs: &'a Real) -> Real {
        let rational = &self.rational + &rhs.rational;
        let logs = if rhs.logs.is_empty() {
            self.logs.clone()
        } else if self.logs.is_empty() {
            rhs.logs.clone()
        } else {
            let terms = self
                .logs
                .iter()
                .chain(rhs.logs.iter())
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect();
            refine(terms)
        };
        Real { rational, logs }
    }
}

impl<'a> Sub<&'a Real> for &'a Real {
    type Output = Real;
    fn sub(self, rhs: &'a Real) -> Real {
        self + &(-rhs)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            rational: -&self.rational,
            logs: self.logs.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        &self + &rhs
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, rhs: Real) -> Real {
        &self - &rhs
    }
}

impl<'a> Mul<&'a Rational> for &'a Real {
    type Output = Real;
    fn mul(self, rhs: &'a Rational) -> Real {
        self.scale(rhs)
    }
}

impl std::iter::Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        iter.fold(Real::zero(), |a, b| a + b)
    }
}

impl From<Rational> for Real {
    fn from(q: Rational) -> Real {
        Real::from_rational(q)
    }
}

/// A real number or one of the two infinities; used for λ-values and the
/// conventions `λ_max(0) = -∞`, `λ_min(0) = +∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtReal {
    NegInf,
    Finite(Real),
    PosInf,
}

impl ExtReal {
    pub fn finite(&self) -> Option<&Real> {
        match self {
            ExtReal::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::PosInf => f64::INFINITY,
            ExtReal::Finite(r) => r.to_f64(),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::PosInf => write!(f, "+inf"),
            ExtReal::Finite(r) => write!(f, "{r}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coprime_refinement_detects_equality() {
        // ln 6 = ln 2 + ln 3
        let a = Real::ln_int(6);
        let b = Real::ln_int(2) + Real::ln_int(3);
        assert_eq!(a, b);
        assert!((a - b).is_zero());
        // ½ ln 4 = ln 2
        assert_eq!(Real::ln_sqrt(&rational(4, 1)).unwrap(), Real::ln_int(2));
        // ln(12) - 2 ln 2 = ln 3
        let c = Real::ln_int(12) - Real::ln_int(2).scale(&rational(2, 1));
        assert_eq!(c, Real::ln_int(3));
    }

    #[test]
    fn certified_ordering() {
        // ln 2 < 7/10 < ln 3 - 3/10
        assert!(Real::ln_int(2) < Real::from_ratio(7, 10));
        assert!(Real::from_ratio(7, 10) < Real::ln_int(3) - Real::from_ratio(3, 10));
        // 2^10 = 1024 vs 10^3: 10 ln 2 > 3 ln 10
        let lhs = Real::ln_int(2).scale(&rational(10, 1));
        let rhs = Real::ln_int(10).scale(&rational(3, 1));
        assert_eq!(lhs.cmp(&rhs), Ordering::Greater);
        // very close values: ln(1000001) - ln(1000000) vs 1/1000001
        let d = Real::ln_int(1_000_001) - Real::ln_int(1_000_000);
        assert!(d > Real::from_ratio(1, 1_000_001));
        assert!(d < Real::from_ratio(1, 1_000_000));
    }

    #[test]
    fn decimal_output() {
        assert_eq!(Real::from_ratio(3, 2).to_decimal_string(), "1.5");
        assert_eq!(Real::from_ratio(-1, 8).to_decimal_string(), "-0.125");
        let l2 = Real::ln_int(2).to_decimal_string();
        assert!(l2.starts_with("0.6931471805599453094172321214581765680755001343602"), "{l2}");
        let s = Real::ln_int(3).scale(&rational(-1, 1000)).to_decimal_digits(10);
        assert_eq!(s, "-0.001098612289");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), rational(-1, 4));
        assert_eq!(parse_rational("1.5e2").unwrap(), rational(150, 1));
        assert_eq!(parse_rational("2e-3").unwrap(), rational(1, 500));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        let x = Real::ln_int(5);
        let back = parse_decimal(&x.to_decimal_string()).unwrap();
        assert!((Real::from_rational(back) - x).abs() < Real::from_ratio(1, 10i64.pow(18)));
    }

    #[test]
    fn floor_exp_is_certified() {
        assert_eq!(Real::from_int(0).floor_exp().unwrap(), BigUint::one());
        assert_eq!(Real::from_int(-3).floor_exp().unwrap(), BigUint::zero());
        assert_eq!(Real::from_int(1).floor_exp().unwrap(), BigUint::from(2u32));
        assert_eq!(Real::ln_int(7).floor_exp().unwrap(), BigUint::from(7u32));
        assert_eq!((Real::ln_int(7) - Real::from_ratio(1, 1 << 40)).floor_exp().unwrap(), BigUint::from(6u32));
        // e^50 = 5184705528587072464087.45...
        assert_eq!(Real::from_int(50).floor_exp().unwrap().to_string(), "5184705528587072464087");
    }

    #[test]
    fn enclosure_contains_value() {
        let x = Real::ln_int(7) - Real::from_ratio(1, 3);
        let (lo, hi) = x.enclosure(100);
        assert!(Real::from_rational(lo) < x && x < Real::from_rational(hi));
    }
}
