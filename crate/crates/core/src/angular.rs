//! Angular-momentum algebra.
//!
//! Wigner 3j and 6j symbols are evaluated with the Racah single-sum formulas
//! in exact big-integer arithmetic. A symbol is always of the form
//! ±√(p/q), so the exact result is kept as a [`SignedSqrt`] and only turned
//! into an `f64` at the end. Products of symbols that appear in diagonal
//! matrix elements are rational, which is how [`angular_factor_exact`]
//! reproduces tabulated coefficients with exact equality.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An angular momentum or projection stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn int(value: i32) -> Self {
        HalfInt(2 * value)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidQuantumNumbers(format!("`{s}` is not an integer or half-integer"));
        match s.split_once('/') {
            Some((num, "2")) => {
                let twice: i32 = num.trim().parse().map_err(|_| bad())?;
                if twice % 2 == 0 {
                    return Err(bad());
                }
                Ok(HalfInt(twice))
            }
            Some(_) => Err(bad()),
            None => s.parse::<i32>().map(HalfInt::int).map_err(|_| bad()),
        }
    }
}

/// Exact value ±√`square`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedSqrt {
    pub negative: bool,
    pub square: BigRational,
}

impl SignedSqrt {
    pub fn zero() -> Self {
        SignedSqrt { negative: false, square: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.square.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let v = ratio_to_f64(&self.square).sqrt();
        if self.negative {
            -v
        } else {
            v
        }
    }

    /// The exact rational value, if `square` is a perfect rational square.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.square.is_zero() {
            return Some(BigRational::zero());
        }
        let n = exact_sqrt(self.square.numer())?;
        let d = exact_sqrt(self.square.denom())?;
        let r = BigRational::new(n, d);
        Some(if self.negative { -r } else { r })
    }

    fn times(&self, other: &SignedSqrt) -> SignedSqrt {
        let square = &self.square * &other.square;
        if square.is_zero() {
            return SignedSqrt::zero();
        }
        SignedSqrt { negative: self.negative ^ other.negative, square }
    }

    fn scaled(&self, factor: i64) -> SignedSqrt {
        let f = BigInt::from(factor);
        SignedSqrt {
            negative: self.negative ^ (factor < 0),
            square: &self.square * BigRational::from_integer(&f * &f),
        }
    }
}

fn exact_sqrt(x: &BigInt) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    let r = x.sqrt();
    (&r * &r == *x).then_some(r)
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large operands: go through logarithms of the parts.
        let n = r.numer().to_string();
        let d = r.denom().to_string();
        let ln = |s: &str| {
            let digits = s.trim_start_matches('-');
            let head: f64 = digits[..digits.len().min(15)].parse().unwrap_or(0.0);
            head.ln() + (digits.len().saturating_sub(15)) as f64 * std::f64::consts::LN_10
        };
        (ln(&n) - ln(&d)).exp()
    })
}

fn factorial(n: i32) -> BigInt {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(256);
        t.push(BigInt::one());
        for i in 1..256u32 {
            let next = &t[(i - 1) as usize] * BigInt::from(i);
            t.push(next);
        }
        t
    });
    debug_assert!(n >= 0);
    if (n as usize) < table.len() {
        table[n as usize].clone()
    } else {
        let mut acc = table[table.len() - 1].clone();
        for i in table.len() as i32..=n {
            acc *= BigInt::from(i);
        }
        acc
    }
}

/// Triangle condition on doubled values, including integer perimeter.
fn triangle(a: i32, b: i32, c: i32) -> bool {
    a >= 0 && b >= 0 && c >= 0 && c <= a + b && a <= b + c && b <= a + c && (a + b + c) % 2 == 0
}

/// Δ(abc) = (a+b−c)!(a−b+c)!(−a+b+c)!/(a+b+c+1)! on doubled arguments.
fn delta(a: i32, b: i32, c: i32) -> BigRational {
    BigRational::new(
        factorial((a + b - c) / 2) * factorial((a - b + c) / 2) * factorial((-a + b + c) / 2),
        factorial((a + b + c) / 2 + 1),
    )
}

fn phase_is_negative(twice_exponent: i32) -> bool {
    debug_assert!(twice_exponent % 2 == 0);
    (twice_exponent / 2).rem_euclid(2) == 1
}

/// Exact Wigner 3j symbol.
pub fn wigner_3j_exact(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> SignedSqrt {
    let (tj1, tj2, tj3) = (j1.0, j2.0, j3.0);
    let (tm1, tm2, tm3) = (m1.0, m2.0, m3.0);
    if !triangle(tj1, tj2, tj3) || tm1 + tm2 + tm3 != 0 {
        return SignedSqrt::zero();
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm3.abs() > tj3 {
        return SignedSqrt::zero();
    }
    if (tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0 {
        return SignedSqrt::zero();
    }

    // Denominator factorial arguments (doubled) are linear in t.
    let t_min = 0.max((tj2 - tj3 - tm1) / 2).max((tj1 - tj3 + tm2) / 2);
    let t_max = ((tj1 + tj2 - tj3) / 2).min((tj1 - tm1) / 2).min((tj2 + tm2) / 2);
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let den = factorial(t)
            * factorial((tj3 - tj2 + tm1) / 2 + t)
            * factorial((tj3 - tj1 - tm2) / 2 + t)
            * factorial((tj1 + tj2 - tj3) / 2 - t)
            * factorial((tj1 - tm1) / 2 - t)
            * factorial((tj2 + tm2) / 2 - t);
        let term = BigRational::new(BigInt::one(), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return SignedSqrt::zero();
    }
    let prefactor = delta(tj1, tj2, tj3)
        * BigRational::from_integer(
            factorial((tj1 + tm1) / 2)
                * factorial((tj1 - tm1) / 2)
                * factorial((tj2 + tm2) / 2)
                * factorial((tj2 - tm2) / 2)
                * factorial((tj3 + tm3) / 2)
                * factorial((tj3 - tm3) / 2),
        );
    let negative = phase_is_negative(tj1 - tj2 - tm3) ^ sum.is_negative();
    SignedSqrt { negative, square: prefactor * &sum * &sum }
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3). Zero whenever the selection rules fail.
pub fn wigner_3j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> f64 {
    wigner_3j_exact(j1, j2, j3, m1, m2, m3).to_f64()
}

/// Exact Wigner 6j symbol.
pub fn wigner_6j_exact(j1: HalfInt, j2: HalfInt, j3: HalfInt, j4: HalfInt, j5: HalfInt, j6: HalfInt) -> SignedSqrt {
    let [a, b, c, d, e, f] = [j1.0, j2.0, j3.0, j4.0, j5.0, j6.0];
    let triads = [(a, b, c), (a, e, f), (d, b, f), (d, e, c)];
    if triads.iter().any(|&(x, y, z)| !triangle(x, y, z)) {
        return SignedSqrt::zero();
    }
    let alphas = triads.map(|(x, y, z)| (x + y + z) / 2);
    let betas = [(a + b + d + e) / 2, (b + c + e + f) / 2, (c + a + f + d) / 2];
    let t_min = *alphas.iter().max().unwrap();
    let t_max = *betas.iter().min().unwrap();
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let mut den = BigInt::one();
        for al in alphas {
            den *= factorial(t - al);
        }
        for be in betas {
            den *= factorial(be - t);
        }
        let term = BigRational::new(factorial(t + 1), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return SignedSqrt::zero();
    }
    let prefactor = triads
        .iter()
        .fold(BigRational::one(), |acc, &(x, y, z)| acc * delta(x, y, z));
    SignedSqrt { negative: sum.is_negative(), square: prefactor * &sum * &sum }
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}. Zero for any violated triad.
pub fn wigner_6j(j1: HalfInt, j2: HalfInt, j3: HalfInt, j4: HalfInt, j5: HalfInt, j6: HalfInt) -> f64 {
    wigner_6j_exact(j1, j2, j3, j4, j5, j6).to_f64()
}

/// An LS-coupled term ^(2S+1)L_J.
///
/// Doublets (S = 1/2) describe alkali fine-structure levels ²L_j; singlets and
/// triplets describe two-electron msnl configurations, where the inner s
/// electron leaves L equal to the Rydberg electron's l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Term {
    pub spin: HalfInt,
    pub l: u32,
    pub j: HalfInt,
}

const L_LETTERS: [char; 4] = ['S', 'P', 'D', 'F'];

impl Term {
    pub fn new(spin: HalfInt, l: u32, j: HalfInt) -> Result<Self> {
        let label = || format!("S={spin} L={l} J={j}");
        if !(0..=2).contains(&spin.0) || l as usize >= L_LETTERS.len() {
            return Err(Error::UnsupportedTerm(label()));
        }
        if !triangle(spin.0, 2 * l as i32, j.0) {
            return Err(Error::UnsupportedTerm(label()));
        }
        Ok(Term { spin, l, j })
    }

    pub fn multiplicity(&self) -> i32 {
        self.spin.0 + 1
    }

    pub fn is_alkali(&self) -> bool {
        !self.spin.is_integer()
    }

    /// All allowed projections M = −J..J.
    pub fn projections(&self) -> impl Iterator<Item = HalfInt> {
        let j = self.j.0;
        (-j..=j).step_by(2).map(HalfInt::from_twice)
    }

    /// Smallest non-negative projection (0 or 1/2).
    pub fn lowest_projection(&self) -> HalfInt {
        HalfInt::from_twice(self.j.0 % 2)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.multiplicity(), L_LETTERS[self.l as usize], self.j)
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        let unsupported = || Error::UnsupportedTerm(trimmed.to_string());
        let mut chars = trimmed.char_indices();
        let (_, mult) = chars.next().ok_or_else(unsupported)?;
        let multiplicity = mult.to_digit(10).ok_or_else(unsupported)? as i32;
        let (idx, letter) = chars.next().ok_or_else(unsupported)?;
        let l = L_LETTERS
            .iter()
            .position(|&c| c == letter.to_ascii_uppercase())
            .ok_or_else(unsupported)? as u32;
        let j: HalfInt = trimmed[idx + letter.len_utf8()..].parse().map_err(|_| unsupported())?;
        if multiplicity < 1 {
            return Err(unsupported());
        }
        Term::new(HalfInt::from_twice(multiplicity - 1), l, j).map_err(|_| unsupported())
    }
}

/// Coefficient of the rank-k radial integral (with f_k0) in the diagonal
/// ponderomotive matrix element of |term, M⟩, as an exact rational.
///
/// The matrix element is reduced first from |SLJM⟩ to |SLJ‖ via Wigner–Eckart,
/// then to the orbital ‖L‖ element with a 6j recoupling, and finally to the
/// radial integral through ⟨L‖C^(k)‖L⟩.
pub fn angular_factor_exact(term: &Term, k: u32, m: HalfInt) -> Result<BigRational> {
    check_projection(term, m)?;
    let k2 = 2 * k as i32;
    if k2 > 2 * term.j.0 || k2 > 4 * term.l as i32 {
        return Ok(BigRational::zero());
    }
    let kk = HalfInt::int(k as i32);
    let l = HalfInt::int(term.l as i32);
    let (s, j) = (term.spin, term.j);

    let projection = wigner_3j_exact(j, kk, j, -m, HalfInt::ZERO, m);
    let projection = SignedSqrt {
        negative: projection.negative ^ phase_is_negative(j.0 - m.0),
        ..projection
    };
    let recouple = wigner_6j_exact(l, j, s, j, l, kk).scaled(j.0 as i64 + 1);
    let recouple = SignedSqrt {
        negative: recouple.negative ^ phase_is_negative(l.0 + s.0 + j.0 + k2),
        ..recouple
    };
    let orbital = wigner_3j_exact(l, kk, l, HalfInt::ZERO, HalfInt::ZERO, HalfInt::ZERO)
        .scaled(2 * term.l as i64 + 1);
    let orbital = SignedSqrt {
        negative: orbital.negative ^ phase_is_negative(l.0),
        ..orbital
    };
    let product = projection.times(&recouple).times(&orbital);
    product
        .to_rational()
        .ok_or_else(|| Error::InvalidParameter(format!("angular factor for {term} k={k} M={m} is not rational")))
}

/// Floating-point [`angular_factor_exact`].
pub fn angular_factor(term: &Term, k: u32, m: HalfInt) -> Result<f64> {
    angular_factor_exact(term, k, m).map(|r| ratio_to_f64(&r))
}

fn check_projection(term: &Term, m: HalfInt) -> Result<()> {
    if m.0.abs() > term.j.0 || (term.j.0 - m.0) % 2 != 0 {
        return Err(Error::InvalidQuantumNumbers(format!("M = {m} is not a projection of J = {}", term.j)));
    }
    Ok(())
}

/// One row of the low-L angular-factor table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularRow {
    pub term: Term,
    pub m: HalfInt,
    /// Factors for k = 0, 2, 4.
    #[serde(serialize_with = "serialize_ratios")]
    pub factors: [BigRational; 3],
}

fn serialize_ratios<S: serde::Serializer>(r: &[BigRational; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(3))?;
    for x in r {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

/// Alkali doublets followed by alkaline-earth singlets and triplets for
/// L ≤ 2, in the customary order.
pub const TABLE_TERMS: [&str; 15] = [
    "2S1/2", "2P1/2", "2P3/2", "2D3/2", "2D5/2", "1S0", "3S1", "1P1", "3P0", "3P1", "3P2", "1D2", "3D1", "3D2", "3D3",
];

/// Angular factors for k = 0, 2, 4 at the lowest projection (M = 0 or 1/2).
pub fn angular_table() -> Vec<AngularRow> {
    TABLE_TERMS
        .iter()
        .map(|label| {
            let term: Term = label.parse().expect("table terms are valid");
            let m = term.lowest_projection();
            let factors = [0, 2, 4].map(|k| angular_factor_exact(&term, k, m).expect("valid projection"));
            AngularRow { term, m, factors }
        })
        .collect()
}

/// CSV rendering of [`angular_table`] with columns `term,k0,k2,k4`.
pub fn angular_table_csv() -> String {
    let mut out = String::from("term,k0,k2,k4\n");
    for row in angular_table() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.term, row.factors[0], row.factors[1], row.factors[2]
        ));
    }
    out
}
