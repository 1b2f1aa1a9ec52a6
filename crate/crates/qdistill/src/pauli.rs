//! n-qubit Pauli strings in the binary symplectic representation.
//!
//! A Pauli is stored as two bit vectors `x`, `z` plus a sign: bit `x_j`
//! means an X factor on qubit `j`, bit `z_j` a Z factor, both together a Y.
//! Products track the anticommutation phase with two bits internally and
//! expose only the ±1 sign of the Hermitian representative: the phases
//! `1, i` map to `+` and `-1, -i` map to `-`.

use crate::bits::BitVec;
use crate::error::{Error, Result};

/// Sign of a Hermitian Pauli operator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    #[inline]
    pub fn bit(self) -> bool {
        self.is_minus()
    }

    #[inline]
    pub fn from_bit(b: bool) -> Self {
        if b {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    #[inline]
    pub fn flipped(self) -> Self {
        Self::from_bit(!self.bit())
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bit(self.bit() ^ rhs.bit())
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", if self.is_minus() { "-" } else { "+" })
    }
}

/// Single-qubit Pauli letter. Doubles as the residual-error class of a
/// distilled Bell pair.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    pub const ERRORS: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    /// Index into a residual histogram: I=0, X=1, Y=2, Z=3.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Letter::I => 0,
            Letter::X => 1,
            Letter::Y => 2,
            Letter::Z => 3,
        }
    }

    /// True if the two letters anticommute (both non-identity and distinct).
    #[inline]
    pub fn anticommutes(self, other: Letter) -> bool {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        (x1 & z2) ^ (z1 & x2)
    }

    /// Conjugation by a Hadamard: swaps X and Z.
    #[inline]
    pub fn hadamard_conj(self) -> Self {
        match self {
            Letter::X => Letter::Z,
            Letter::Z => Letter::X,
            other => other,
        }
    }

    /// Letter-wise product ignoring phase.
    #[inline]
    pub fn mul_letter(self, other: Letter) -> Letter {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        Letter::from_bits(x1 ^ x2, z1 ^ z2)
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

impl std::fmt::Display for Letter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// An n-qubit Pauli operator with a ±1 sign.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    x: BitVec,
    z: BitVec,
    sign: Sign,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { x: BitVec::zeros(n), z: BitVec::zeros(n), sign: Sign::Plus }
    }

    pub fn new(x: BitVec, z: BitVec, sign: Sign) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch { left: x.len(), right: z.len() });
        }
        Ok(Self { x, z, sign })
    }

    /// Single-letter Pauli on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, letter: Letter) -> Result<Self> {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
        let mut p = Self::identity(n);
        p.set_letter(q, letter);
        Ok(p)
    }

    /// Builds from (qubit, letter) pairs.
    pub fn from_letters(n: usize, letters: &[(usize, Letter)]) -> Result<Self> {
        let mut p = Self::identity(n);
        for &(q, letter) in letters {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
            p.set_letter(q, letter);
        }
        Ok(p)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.x.len() == 0
    }

    #[inline]
    pub fn x(&self) -> &BitVec {
        &self.x
    }

    #[inline]
    pub fn z(&self) -> &BitVec {
        &self.z
    }

    #[inline]
    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn set_sign(&mut self, sign: Sign) {
        self.sign = sign;
    }

    pub fn flip_sign(&mut self) {
        self.sign = self.sign.flipped();
    }

    #[inline]
    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        let (x, z) = letter.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    /// Number of non-identity positions.
    pub fn weight(&self) -> usize {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity_letters(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn y_count(&self) -> usize {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn has_odd_y(&self) -> bool {
        self.y_count() % 2 == 1
    }

    /// Transpose: same letters, sign flipped iff the Y count is odd.
    pub fn transposed(&self) -> Self {
        let mut t = self.clone();
        if t.has_odd_y() {
            t.flip_sign();
        }
        t
    }

    /// Embeds into a larger register with qubit `j` mapped to `offset + map[j]`
    /// (or `offset + j` when `map` is `None`).
    pub fn embed(&self, n_total: usize, offset: usize, map: Option<&[usize]>) -> Result<Self> {
        let mut out = Self::identity(n_total);
        for q in 0..self.len() {
            let letter = self.letter(q);
            if letter == Letter::I {
                continue;
            }
            let dest = offset + map.map_or(q, |m| m[q]);
            if dest >= n_total {
                return Err(Error::QubitOutOfRange { index: dest, n: n_total });
            }
            out.set_letter(dest, letter);
        }
        out.sign = self.sign;
        Ok(out)
    }

    /// Parses strings like `XIZZY` or `-YY`. Rejects any other character.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (Sign::Minus, rest),
            None => (Sign::Plus, s),
        };
        if body.is_empty() {
            return Err(Error::Parse { line: 1, msg: "empty Pauli string".into() });
        }
        let mut letters = Vec::with_capacity(body.len());
        for ch in body.chars() {
            letters.push(match ch {
                'I' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        msg: format!("unexpected character {other:?} in Pauli string"),
                    })
                }
            });
        }
        let mut p = Self::identity(letters.len());
        for (q, &letter) in letters.iter().enumerate() {
            p.set_letter(q, letter);
        }
        p.sign = sign;
        Ok(p)
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.sign.is_minus() {
            write!(f, "-")?;
        }
        for q in 0..self.len() {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

/// Symplectic inner product: 0 means the operators commute.
pub fn symplectic_product(a: &PauliString, b: &PauliString) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    Ok(symplectic_words(a.x.words(), a.z.words(), b.x.words(), b.z.words()))
}

#[inline]
pub(crate) fn symplectic_words(xa: &[u64], za: &[u64], xb: &[u64], zb: &[u64]) -> bool {
    let mut acc = 0u32;
    for i in 0..xa.len() {
        acc ^= (xa[i] & zb[i]).count_ones() ^ (za[i] & xb[i]).count_ones();
    }
    acc & 1 == 1
}

/// Phase contribution of multiplying two Pauli words, counted as the number
/// of `+i` minus `-i` single-qubit factors, mod 4.
#[inline]
pub(crate) fn phase_words(xa: &[u64], za: &[u64], xb: &[u64], zb: &[u64]) -> u32 {
    let mut plus = 0u32;
    let mut minus = 0u32;
    for i in 0..xa.len() {
        let (x1, z1, x2, z2) = (xa[i], za[i], xb[i], zb[i]);
        plus += ((x1 & !z1 & x2 & z2) | (!x1 & z1 & x2 & !z2) | (x1 & z1 & !x2 & z2)).count_ones();
        minus += ((x1 & !z1 & !x2 & z2) | (!x1 & z1 & x2 & z2) | (x1 & z1 & x2 & !z2)).count_ones();
    }
    (plus.wrapping_sub(minus)) & 3
}

/// Product of two Pauli strings.
///
/// The letters XOR; the sign is the ±1 part of the full phase, with `i`
/// mapped to `+` and `-i` to `-`. Products of commuting operators carry an
/// exact ±1 phase, so no information is lost on the paths that matter.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    let mut phase = phase_words(a.x.words(), a.z.words(), b.x.words(), b.z.words());
    phase = (phase + 2 * (a.sign.bit() as u32) + 2 * (b.sign.bit() as u32)) & 3;
    let mut x = a.x.clone();
    x.xor_assign(&b.x);
    let mut z = a.z.clone();
    z.xor_assign(&b.z);
    Ok(PauliString { x, z, sign: Sign::from_bit(phase >= 2) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        PauliString::parse(s).unwrap()
    }

    #[test]
    fn symplectic_basics() {
        assert!(symplectic_product(&p("X"), &p("Z")).unwrap());
        assert!(!symplectic_product(&p("XX"), &p("ZZ")).unwrap());
        // generators of a valid code commute
        assert!(!symplectic_product(&p("YZIZY"), &p("IXZZX")).unwrap());
        assert!(symplectic_product(&p("X"), &p("XX")).is_err());
    }

    #[test]
    fn symplectic_symmetric_bilinear() {
        let gens = ["YZIZY", "IXZZX", "ZZXIX", "ZIZYY", "XXXXX", "IIIZZ"];
        for a in gens {
            for b in gens {
                let ab = symplectic_product(&p(a), &p(b)).unwrap();
                let ba = symplectic_product(&p(b), &p(a)).unwrap();
                assert_eq!(ab, ba);
                for c in gens {
                    // bilinearity: <a*c, b> = <a,b> xor <c,b> (letters XOR under multiply)
                    let ac = multiply(&p(a), &p(c)).unwrap();
                    let lhs = symplectic_product(&ac, &p(b)).unwrap();
                    let rhs = ab ^ symplectic_product(&p(c), &p(b)).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn multiply_examples() {
        let xx = multiply(&p("X"), &p("X")).unwrap();
        assert_eq!(format!("{xx}"), "I");
        // X·Z is Y up to sign; squaring gives +I
        let xz = multiply(&p("X"), &p("Z")).unwrap();
        assert_eq!(xz.letter(0), Letter::Y);
        let sq = multiply(&xz, &xz).unwrap();
        assert_eq!(sq, PauliString::identity(1));
        assert_eq!(sq.sign(), Sign::Plus);
    }

    #[test]
    fn multiply_tracks_commuting_signs_exactly() {
        // ZZ = (XX)(YY) up to phase: XX·YY = -ZZ since (XY)(XY) = (iZ)(iZ)
        let prod = multiply(&p("XX"), &p("YY")).unwrap();
        assert_eq!(format!("{prod}"), "-ZZ");
        let with_sign = multiply(&p("-XX"), &p("YY")).unwrap();
        assert_eq!(format!("{with_sign}"), "ZZ");
    }

    /// Independent oracle: symbolic single-qubit multiplication table with a
    /// full i^k phase, reduced the same way multiply() documents.
    fn symbolic_multiply(a: &PauliString, b: &PauliString) -> (Vec<Letter>, u32) {
        // table[a][b] = (letter, phase exponent of i)
        fn table(a: Letter, b: Letter) -> (Letter, u32) {
            use Letter::*;
            match (a, b) {
                (I, other) => (other, 0),
                (other, I) => (other, 0),
                (X, X) | (Y, Y) | (Z, Z) => (I, 0),
                (X, Y) => (Z, 1),
                (Y, X) => (Z, 3),
                (Y, Z) => (X, 1),
                (Z, Y) => (X, 3),
                (Z, X) => (Y, 1),
                (X, Z) => (Y, 3),
            }
        }
        let mut phase = 0u32;
        let mut letters = Vec::new();
        for q in 0..a.len() {
            let (l, ph) = table(a.letter(q), b.letter(q));
            letters.push(l);
            phase = (phase + ph) & 3;
        }
        phase = (phase + 2 * (a.sign().bit() as u32) + 2 * (b.sign().bit() as u32)) & 3;
        (letters, phase)
    }

    #[test]
    fn multiply_matches_symbolic_table() {
        let g1 = p("YZIZY");
        let g2 = p("IXZZX");
        let prod = multiply(&g1, &g2).unwrap();
        let (letters, phase) = symbolic_multiply(&g1, &g2);
        for (q, &l) in letters.iter().enumerate() {
            assert_eq!(prod.letter(q), l);
        }
        assert_eq!(prod.sign().bit(), phase >= 2);
        // weight-4 commuting element of the group
        assert_eq!(prod.weight(), 4);
        assert!(!symplectic_product(&prod, &g1).unwrap());
        assert!(!symplectic_product(&prod, &g2).unwrap());
    }

    #[test]
    fn multiply_matches_symbolic_on_random_strings() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let n = rng.random_range(1..9);
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let mut q = PauliString::identity(n);
                for i in 0..n {
                    q.set_letter(i, Letter::ALL[rng.random_range(0..4)]);
                }
                if rng.random::<bool>() {
                    q.flip_sign();
                }
                q
            };
            let a = mk(&mut rng);
            let b = mk(&mut rng);
            let prod = multiply(&a, &b).unwrap();
            let (letters, phase) = symbolic_multiply(&a, &b);
            for (q, &l) in letters.iter().enumerate() {
                assert_eq!(prod.letter(q), l);
            }
            assert_eq!(prod.sign().bit(), phase >= 2, "a={a} b={b}");
        }
    }

    #[test]
    fn transpose_sign_rule() {
        assert_eq!(p("YZIZY").transposed().sign(), Sign::Plus); // two Ys
        assert_eq!(p("YIZ").transposed().sign(), Sign::Minus); // one Y
        assert_eq!(p("-YIY").transposed().sign(), Sign::Minus); // even Ys keep sign
        assert_eq!(p("XZX").transposed(), p("XZX"));
    }

    #[test]
    fn weight_and_identity() {
        assert_eq!(p("IXYZI").weight(), 3);
        let id = PauliString::identity(4);
        assert_eq!(id.weight(), 0);
        assert_eq!(id.sign(), Sign::Plus);
    }

    #[test]
    fn parse_rejects_other_characters() {
        assert!(PauliString::parse("XQZ").is_err());
        assert!(PauliString::parse("").is_err());
        assert!(PauliString::parse("-").is_err());
        assert_eq!(p("-YY").sign(), Sign::Minus);
    }
}
