//! Exact dyadic rationals `m / 2^k` and the unnormalized ratios used for
//! tail bounds. Exponents reach millions of bits, so nothing here ever
//! takes a gcd of large numbers.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

/// `num / 2^exp`, with `num` odd unless it is zero (then `exp = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { num: BigInt::zero(), exp: 0 }
    }

    pub fn new(num: BigInt, exp: u64) -> Self {
        let mut d = Dyadic { num, exp };
        d.normalize();
        d
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u64) -> Self {
        Dyadic { num: BigInt::one(), exp: k }
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, u64) {
        let e = self.exp.max(other.exp);
        (&self.num << (e - self.exp), &other.num << (e - other.exp), e)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a - b, e)
    }

    pub fn mul_pow2(&self, k: u64) -> Dyadic {
        if k <= self.exp {
            Dyadic::new(self.num.clone(), self.exp - k)
        } else {
            Dyadic::new(&self.num << (k - self.exp), 0)
        }
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Dyadic>) -> Dyadic {
        let items: Vec<&Dyadic> = items.into_iter().collect();
        let e = items.iter().map(|d| d.exp).max().unwrap_or(0);
        let total: BigInt = items.iter().map(|d| &d.num << (e - d.exp)).sum();
        Dyadic::new(total, e)
    }

    /// Exact decimal if it needs at most `digits` fractional digits,
    /// otherwise truncated to `digits` and marked with a trailing `...`.
    pub fn to_decimal(&self, digits: usize) -> String {
        let sign = if self.num.is_negative() { "-" } else { "" };
        let mag = self.num.abs();
        let int_part = &mag >> self.exp;
        let frac = &mag - (&int_part << self.exp);
        if self.exp == 0 || frac.is_zero() {
            return format!("{sign}{int_part}");
        }
        // frac / 2^exp = frac * 5^exp / 10^exp, exactly `exp` digits
        let shown = (self.exp as usize).min(digits);
        let scaled = if shown == self.exp as usize {
            frac * num_traits::pow(BigInt::from(5), shown)
        } else {
            (frac * num_traits::pow(BigInt::from(10), shown)) >> self.exp
        };
        let body = format!("{:0>width$}", scaled.to_string(), width = shown);
        let body = if shown == self.exp as usize { body.trim_end_matches('0').to_string() } else { body + "..." };
        format!("{sign}{int_part}.{body}")
    }

    /// `d.ddde-N` from the leading bits; presentation only.
    pub fn approx_scientific(&self) -> String {
        if self.num.is_zero() {
            return "0".into();
        }
        let bits = self.num.bits();
        let keep = bits.min(60);
        let top = (self.num.abs() >> (bits - keep)).to_f64().unwrap_or(0.0);
        let log10 = top.log10() + ((bits - keep) as f64 - self.exp as f64) * std::f64::consts::LOG10_2;
        let e = log10.floor();
        let mant = 10f64.powf(log10 - e);
        let sign = if self.num.is_negative() { "-" } else { "" };
        format!("{sign}{mant:.6}e{}", e as i64)
    }

    pub fn to_json(&self) -> Value {
        json!({ "num_hex": signed_hex(&self.num), "exp": self.exp })
    }

    pub fn from_json(v: &Value) -> Option<Dyadic> {
        let num = parse_signed_hex(v.get("num_hex")?.as_str()?)?;
        let exp = v.get("exp")?.as_u64()?;
        Some(Dyadic::new(num, exp))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_one() {
            write!(f, "2^-{}", self.exp)
        } else {
            write!(f, "{}*2^-{}", self.num, self.exp)
        }
    }
}

pub fn signed_hex(n: &BigInt) -> String {
    match n.sign() {
        Sign::Minus => format!("-{:x}", n.magnitude()),
        _ => format!("{:x}", n.magnitude()),
    }
}

pub fn parse_signed_hex(s: &str) -> Option<BigInt> {
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let mag = BigUint::parse_bytes(digits.as_bytes(), 16)?;
    let n = BigInt::from(mag);
    Some(if neg { -n } else { n })
}

/// Nonnegative `num / (den * 2^exp)`, kept unreduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledRatio {
    pub num: BigUint,
    pub den: BigUint,
    pub exp: u64,
}

impl ScaledRatio {
    pub fn scale(&self, k: u32) -> ScaledRatio {
        ScaledRatio { num: &self.num * k, den: self.den.clone(), exp: self.exp }
    }

    /// Compares with a dyadic by cross-multiplying.
    pub fn cmp_dyadic(&self, d: &Dyadic) -> Ordering {
        if d.num.is_negative() {
            return Ordering::Greater;
        }
        // num / (den 2^exp)  vs  m / 2^k   <=>   num 2^k  vs  m den 2^exp
        let m = d.num.magnitude();
        let e = self.exp.min(d.exp);
        let lhs = &self.num << (d.exp - e);
        let rhs = (m * &self.den) << (self.exp - e);
        lhs.cmp(&rhs)
    }

    pub fn cmp_ratio(&self, other: &ScaledRatio) -> Ordering {
        let e = self.exp.min(other.exp);
        let lhs = (&self.num * &other.den) << (other.exp - e);
        let rhs = (&other.num * &self.den) << (self.exp - e);
        lhs.cmp(&rhs)
    }

    /// Upper estimate of `log2`, for display.
    pub fn log2_approx(&self) -> f64 {
        let lg = |n: &BigUint| {
            let bits = n.bits();
            let keep = bits.min(60);
            (n >> (bits - keep)).to_f64().unwrap_or(1.0).log2() + (bits - keep) as f64
        };
        lg(&self.num) - lg(&self.den) - self.exp as f64
    }

    pub fn to_json(&self) -> Value {
        json!({
            "num_hex": format!("{:x}", self.num),
            "den_hex": format!("{:x}", self.den),
            "exp": self.exp,
            "log2_approx": format!("{:.3}", self.log2_approx()),
        })
    }

    pub fn from_json(v: &Value) -> Option<ScaledRatio> {
        let hex = |k: &str| BigUint::parse_bytes(v.get(k)?.as_str()?.as_bytes(), 16);
        Some(ScaledRatio { num: hex("num_hex")?, den: hex("den_hex")?, exp: v.get("exp")?.as_u64()? })
    }

    pub fn is_odd_den(&self) -> bool {
        self.den.is_odd()
    }
}
