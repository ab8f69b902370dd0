//! Arithmetic over GF(2^r), 1 <= r <= 16, backed by log/antilog tables.
//!
//! Elements are stored in the canonical polynomial basis: bit `t` of the
//! integer value is the coefficient `a_{l,t}` of x^t. Addition is carry-less
//! (XOR); multiplication and inversion go through the tables, which are built
//! once per [`Field`] from a primitive polynomial.

use alloc::vec::Vec;
use core::fmt;

/// An element of GF(2^r), valid for the [`Field`] it was produced for.
///
/// The wrapper is deliberately thin: it does not carry a reference to its
/// field, so mixing elements of different fields is a caller contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Gf(pub u16);

impl Gf {
    pub const ZERO: Gf = Gf(0);
    pub const ONE: Gf = Gf(1);

    /// Coefficient `a_{l,t}` of the binary representation (0 or 1).
    ///
    /// Panics if `t >= 16`; callers working inside a field must keep `t < r`.
    #[inline]
    pub fn bit(self, t: u32) -> u16 {
        assert!(t < 16, "bit index {t} out of range");
        (self.0 >> t) & 1
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl core::ops::Add for Gf {
    type Output = Gf;
    #[inline]
    fn add(self, rhs: Gf) -> Gf {
        Gf(self.0 ^ rhs.0)
    }
}

impl core::ops::AddAssign for Gf {
    #[inline]
    fn add_assign(&mut self, rhs: Gf) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Errors from field construction and partial operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    /// Extension degree outside 1..=16.
    DegreeOutOfRange(u32),
    /// The modulus polynomial does not have degree exactly r.
    BadPolyDegree { r: u32, poly: u32 },
    /// x does not generate the multiplicative group modulo the polynomial,
    /// so the polynomial is reducible or merely irreducible, not primitive.
    NotPrimitive { poly: u32 },
    /// Inversion of the zero element.
    ZeroInverse,
    /// Value does not fit in the field.
    ValueOutOfRange { value: u32, order: u32 },
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::DegreeOutOfRange(r) => write!(f, "extension degree {r} not in 1..=16"),
            FieldError::BadPolyDegree { r, poly } => {
                write!(f, "polynomial {poly:#x} does not have degree {r}")
            }
            FieldError::NotPrimitive { poly } => {
                write!(f, "polynomial {poly:#x} is not primitive over GF(2)")
            }
            FieldError::ZeroInverse => write!(f, "no inverse of zero"),
            FieldError::ValueOutOfRange { value, order } => {
                write!(f, "value {value} outside field of order {order}")
            }
        }
    }
}

impl core::error::Error for FieldError {}

/// Default primitive polynomials, indexed by extension degree r.
///
/// Entry r encodes an (r+1)-bit polynomial; e.g. r = 3 is x^3 + x + 1 = 0b1011.
/// These are the conventional table-generator polynomials; decoder behaviour
/// depends on the choice, so it is explicit and overridable.
pub const DEFAULT_PRIMITIVE_POLYS: [u32; 17] = [
    0,       // r = 0: unused
    0b11,    // x + 1
    0b111,   // x^2 + x + 1
    0b1011,  // x^3 + x + 1
    0b10011, // x^4 + x + 1
    0b100101,
    0b1000011,
    0b10001001,
    0b100011101, // x^8 + x^4 + x^3 + x^2 + 1
    0b1000010001,
    0b10000001001,
    0b100000000101,
    0b1000001010011,
    0b10000000011011,
    0b100010001000011,
    0b1000000000000011,
    0b10001000000001011,
];

/// GF(2^r) with its generator tables; immutable after construction and safe
/// to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    r: u32,
    poly: u32,
    /// log[a] for a in 1..2^r; log[0] is unused filler.
    log: Vec<u16>,
    /// exp table of length 2*(2^r - 1) so products index without a modulo.
    exp: Vec<u16>,
}

impl Field {
    /// Field with the default primitive polynomial for degree `r`.
    pub fn new(r: u32) -> Result<Field, FieldError> {
        if !(1..=16).contains(&r) {
            return Err(FieldError::DegreeOutOfRange(r));
        }
        Field::with_poly(r, DEFAULT_PRIMITIVE_POLYS[r as usize])
    }

    /// Field with an explicit degree-r primitive polynomial.
    ///
    /// Building the tables walks the powers of x; if the walk returns to 1
    /// before covering all 2^r - 1 nonzero elements the polynomial is not
    /// primitive and construction fails. That single check also certifies
    /// irreducibility.
    pub fn with_poly(r: u32, poly: u32) -> Result<Field, FieldError> {
        if !(1..=16).contains(&r) {
            return Err(FieldError::DegreeOutOfRange(r));
        }
        if poly >> r != 1 {
            return Err(FieldError::BadPolyDegree { r, poly });
        }
        let order = 1u32 << r;
        let nonzero = (order - 1) as usize;
        let mask = order - 1;
        let mut log = alloc::vec![0u16; order as usize];
        let mut exp = alloc::vec![0u16; 2 * nonzero.max(1)];
        let mut seen = alloc::vec![false; order as usize];

        let mut value: u32 = 1;
        for power in 0..nonzero {
            if seen[value as usize] {
                return Err(FieldError::NotPrimitive { poly });
            }
            seen[value as usize] = true;
            log[value as usize] = power as u16;
            exp[power] = value as u16;
            exp[power + nonzero] = value as u16;
            // multiply by x, reduce by the modulus when the degree-r bit appears
            value <<= 1;
            if value & order != 0 {
                value ^= poly;
            }
            debug_assert!(value <= mask);
        }
        if value != 1 {
            return Err(FieldError::NotPrimitive { poly });
        }
        Ok(Field { r, poly, log, exp })
    }

    /// Extension degree r (bits per symbol).
    #[inline]
    pub fn bits(&self) -> u32 {
        self.r
    }

    /// Number of field elements, 2^r.
    #[inline]
    pub fn order(&self) -> usize {
        1usize << self.r
    }

    #[inline]
    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Checked constructor for an element of this field.
    pub fn element(&self, value: u32) -> Result<Gf, FieldError> {
        if value >= self.order() as u32 {
            return Err(FieldError::ValueOutOfRange {
                value,
                order: self.order() as u32,
            });
        }
        Ok(Gf(value as u16))
    }

    /// Characteristic-2 addition (XOR).
    #[inline]
    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        a + b
    }

    /// Table-based product.
    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        if a.is_zero() || b.is_zero() {
            return Gf::ZERO;
        }
        let la = self.log[a.index()] as usize;
        let lb = self.log[b.index()] as usize;
        Gf(self.exp[la + lb])
    }

    /// Multiplicative inverse; fails on zero.
    #[inline]
    pub fn inv(&self, a: Gf) -> Result<Gf, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let nonzero = self.order() - 1;
        let la = self.log[a.index()] as usize;
        Ok(Gf(self.exp[(nonzero - la) % nonzero]))
    }

    /// a / b through the inverse table; fails when b is zero.
    #[inline]
    pub fn div(&self, a: Gf, b: Gf) -> Result<Gf, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// g^power where g = x is the table generator.
    #[inline]
    pub fn generator_pow(&self, power: usize) -> Gf {
        let nonzero = self.order() - 1;
        Gf(self.exp[power % nonzero])
    }
}
