//! Basis states, two-term superpositions and the `{C, e, g}` ensemble words
//! that generate them.
//!
//! Sites are numbered from 0 in the API. Site 0 is the leftmost letter of the
//! textual form and the most significant bit of the basis index; an excited
//! site (`e`) is a 1 bit, a ground site (`g`) a 0 bit. With this ordering a
//! state and its complement sit at indices `x` and `2^n - 1 - x`, which puts
//! complement pairs on the anti-diagonal of the atlas.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest site count a [`BasisState`] can hold.
pub const MAX_SITES: usize = 32;

/// Largest site count for which dense state vectors and density matrices are
/// built (`4^10` density-matrix entries).
pub const DENSE_CAP: usize = 10;

/// Tolerance on `|w1|^2 + |w2|^2 = 1`.
pub const NORM_TOL: f64 = 1e-12;

/// A computational basis state of `n` two-level sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    n: u8,
    bits: u64,
}

impl BasisState {
    pub fn new(n: usize, index: u64) -> Result<Self> {
        check_sites(n)?;
        if index >> n != 0 {
            return Err(Error::IndexOutOfRange { index, n });
        }
        Ok(Self { n: n as u8, bits: index })
    }

    pub fn all_ground(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn all_excited(n: usize) -> Result<Self> {
        check_sites(n)?;
        Ok(Self { n: n as u8, bits: mask(n) })
    }

    /// Builds a state from per-site excitation flags, site 0 first.
    pub fn from_flags(flags: &[bool]) -> Result<Self> {
        check_sites(flags.len())?;
        let bits = flags.iter().fold(0u64, |acc, &e| (acc << 1) | e as u64);
        Ok(Self { n: flags.len() as u8, bits })
    }

    /// Every basis state of `n` sites in ascending index order.
    pub fn all(n: usize) -> Result<impl Iterator<Item = BasisState>> {
        check_sites(n)?;
        let n8 = n as u8;
        Ok((0..=mask(n)).map(move |bits| BasisState { n: n8, bits }))
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn index(&self) -> u64 {
        self.bits
    }

    /// Bit mask of the basis index covering site `site`.
    pub fn site_bit(n: usize, site: usize) -> u64 {
        1u64 << (n - 1 - site)
    }

    pub fn is_excited(&self, site: usize) -> bool {
        debug_assert!(site < self.n());
        self.bits & Self::site_bit(self.n(), site) != 0
    }

    /// Pauli-z eigenvalue of a site: `+1` for `e`, `-1` for `g`.
    pub fn spin(&self, site: usize) -> i8 {
        if self.is_excited(site) {
            1
        } else {
            -1
        }
    }

    pub fn flags(&self) -> Vec<bool> {
        (0..self.n()).map(|i| self.is_excited(i)).collect()
    }

    pub fn excited_count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Flips every site.
    pub fn complement(&self) -> Self {
        Self { n: self.n, bits: !self.bits & mask(self.n()) }
    }

    /// Drops the last (least significant) site.
    pub fn without_last_site(&self) -> Result<Self> {
        if self.n < 2 {
            return Err(Error::SiteCount { n: self.n() - 1, min: 1, max: MAX_SITES });
        }
        Ok(Self { n: self.n - 1, bits: self.bits >> 1 })
    }

    pub(crate) fn full_mask(&self) -> u64 {
        mask(self.n())
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n() {
            f.write_str(if self.is_excited(i) { "e" } else { "g" })?;
        }
        Ok(())
    }
}

impl FromStr for BasisState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let flags = s
            .trim()
            .chars()
            .map(|c| match c {
                'e' => Ok(true),
                'g' => Ok(false),
                other => Err(Error::InvalidLetter(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_flags(&flags)
    }
}

impl Serialize for BasisState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub(crate) fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_sites(n: usize) -> Result<()> {
    if n == 0 || n > MAX_SITES {
        return Err(Error::SiteCount { n, min: 1, max: MAX_SITES });
    }
    Ok(())
}

/// `w1 |b1> + w2 |b2>`, stored with `index(b1) <= index(b2)`.
///
/// When `b1 == b2` the spec is a single basis state: the weights are replaced
/// by `(1, 0)` since only a global phase would remain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperpositionSpec {
    b1: BasisState,
    b2: BasisState,
    w1: Complex64,
    w2: Complex64,
}

impl SuperpositionSpec {
    pub fn new(b1: BasisState, b2: BasisState, w1: Complex64, w2: Complex64) -> Result<Self> {
        if b1.n != b2.n {
            return Err(Error::DimensionMismatch { left: b1.n(), right: b2.n() });
        }
        let norm = w1.norm_sqr() + w2.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        if b1 == b2 {
            return Ok(Self::single(b1));
        }
        Ok(if b1.bits <= b2.bits {
            Self { b1, b2, w1, w2 }
        } else {
            Self { b1: b2, b2: b1, w1: w2, w2: w1 }
        })
    }

    pub fn single(b: BasisState) -> Self {
        Self { b1: b, b2: b, w1: Complex64::new(1.0, 0.0), w2: Complex64::new(0.0, 0.0) }
    }

    /// `(|b1> + |b2>) / sqrt(2)`, or the single state when `b1 == b2`.
    pub fn equal_weight(b1: BasisState, b2: BasisState) -> Result<Self> {
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(b1, b2, w, w)
    }

    /// Real positive weights with `|w1|^2 = p` on `b1` (before canonical ordering).
    pub fn with_probability(b1: BasisState, b2: BasisState, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Self::new(b1, b2, Complex64::new(p.sqrt(), 0.0), Complex64::new((1.0 - p).sqrt(), 0.0))
    }

    pub fn b1(&self) -> BasisState {
        self.b1
    }

    pub fn b2(&self) -> BasisState {
        self.b2
    }

    pub fn w1(&self) -> Complex64 {
        self.w1
    }

    pub fn w2(&self) -> Complex64 {
        self.w2
    }

    pub fn n(&self) -> usize {
        self.b1.n()
    }

    pub fn is_single(&self) -> bool {
        self.b1 == self.b2
    }

    /// Weight square `|w1|^2` of the first member.
    pub fn p(&self) -> f64 {
        self.w1.norm_sqr()
    }

    pub fn decompose(&self) -> ClusterDecomposition {
        // sizes already agree
        decompose_pair(self.b1, self.b2).expect("matching sizes")
    }

    /// Multiplies the weights by unit-modulus phases.
    pub fn with_phases(&self, phase1: f64, phase2: f64) -> Self {
        if self.is_single() {
            return *self;
        }
        Self {
            w1: self.w1 * Complex64::from_polar(1.0, phase1),
            w2: self.w2 * Complex64::from_polar(1.0, phase2),
            ..*self
        }
    }
}

impl fmt::Display for SuperpositionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_single() {
            write!(f, "|{}>", self.b1)
        } else {
            write!(f, "({})|{}> + ({})|{}>", self.w1, self.b1, self.w2, self.b2)
        }
    }
}

/// Site partition of a pair of basis states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterDecomposition {
    pub n: usize,
    /// Co-excited sites.
    pub agree_e: Vec<usize>,
    pub agree_g: Vec<usize>,
    pub differ: Vec<usize>,
    /// For each entry of `differ`, whether `b1` is excited there.
    pub pattern: Vec<bool>,
}

impl ClusterDecomposition {
    /// Cluster size: the number of sites where the two states disagree.
    pub fn k(&self) -> usize {
        self.differ.len()
    }
}

pub fn decompose_pair(b1: BasisState, b2: BasisState) -> Result<ClusterDecomposition> {
    if b1.n != b2.n {
        return Err(Error::DimensionMismatch { left: b1.n(), right: b2.n() });
    }
    let n = b1.n();
    let mut dec = ClusterDecomposition {
        n,
        agree_e: Vec::new(),
        agree_g: Vec::new(),
        differ: Vec::new(),
        pattern: Vec::new(),
    };
    for site in 0..n {
        match (b1.is_excited(site), b2.is_excited(site)) {
            (true, true) => dec.agree_e.push(site),
            (false, false) => dec.agree_g.push(site),
            (first, _) => {
                dec.differ.push(site);
                dec.pattern.push(first);
            }
        }
    }
    Ok(dec)
}

/// One letter of an ensemble word: a cat site `C`, or a fixed `e` / `g` site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Cat,
    Excited,
    Ground,
}

impl Letter {
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'C' => Ok(Letter::Cat),
            'e' => Ok(Letter::Excited),
            'g' => Ok(Letter::Ground),
            other => Err(Error::InvalidLetter(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::Cat => 'C',
            Letter::Excited => 'e',
            Letter::Ground => 'g',
        }
    }
}

/// A word over `{C, e, g}` plus a correlation variant for its cat sites.
///
/// Bit `j - 1` of `variant` says whether the `j`-th cat site (counting from 0)
/// is anti-correlated (1) or correlated (0) with the first cat site.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnsembleWord {
    letters: Vec<Letter>,
    variant: u64,
}

impl EnsembleWord {
    pub fn new(letters: Vec<Letter>, variant: u64) -> Result<Self> {
        check_sites(letters.len())?;
        let count = variant_count(&letters);
        if variant >= count {
            return Err(Error::VariantOutOfRange { variant, count });
        }
        Ok(Self { letters, variant })
    }

    /// Reads back the word that generates the pair `(b1, b2)`.
    pub fn from_pair(b1: BasisState, b2: BasisState) -> Result<Self> {
        let dec = decompose_pair(b1, b2)?;
        let mut letters = vec![Letter::Ground; dec.n];
        for &s in &dec.agree_e {
            letters[s] = Letter::Excited;
        }
        for &s in &dec.differ {
            letters[s] = Letter::Cat;
        }
        let variant = dec
            .pattern
            .iter()
            .skip(1)
            .enumerate()
            .fold(0u64, |acc, (j, &e)| acc | (((e != dec.pattern[0]) as u64) << j));
        Self::new(letters, variant)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn variant(&self) -> u64 {
        self.variant
    }

    pub fn cat_count(&self) -> usize {
        self.letters.iter().filter(|&&l| l == Letter::Cat).count()
    }

    /// Equal-weight expansion; differ sites are exactly the `C` positions.
    pub fn expand(&self) -> SuperpositionSpec {
        let mut first = Vec::with_capacity(self.letters.len());
        let mut second = Vec::with_capacity(self.letters.len());
        let mut cat_seen = 0usize;
        for &letter in &self.letters {
            match letter {
                Letter::Excited => {
                    first.push(true);
                    second.push(true);
                }
                Letter::Ground => {
                    first.push(false);
                    second.push(false);
                }
                Letter::Cat => {
                    let anti = cat_seen > 0 && (self.variant >> (cat_seen - 1)) & 1 == 1;
                    first.push(!anti);
                    second.push(anti);
                    cat_seen += 1;
                }
            }
        }
        let b1 = BasisState::from_flags(&first).expect("word length validated");
        let b2 = BasisState::from_flags(&second).expect("word length validated");
        SuperpositionSpec::equal_weight(b1, b2).expect("equal weights are normalized")
    }
}

fn variant_count(letters: &[Letter]) -> u64 {
    let cats = letters.iter().filter(|&&l| l == Letter::Cat).count();
    1u64 << cats.saturating_sub(1)
}

impl fmt::Display for EnsembleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", l.as_char())?;
        }
        write!(f, ":{}", self.variant)
    }
}

impl FromStr for EnsembleWord {
    type Err = Error;

    /// Parses `C,C,e,g` or `C,C,e,g:1`; a missing suffix means variant 0.
    fn from_str(s: &str) -> Result<Self> {
        let (body, variant) = match s.trim().split_once(':') {
            Some((body, v)) => {
                let v = v
                    .trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("variant {v:?}: {e}")))?;
                (body, v)
            }
            None => (s.trim(), 0),
        };
        Self::new(parse_letters(body)?, variant)
    }
}

/// Parses comma-separated letters such as `C,e,g`.
pub fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    s.split(',')
        .map(|tok| {
            let mut chars = tok.trim().chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Letter::from_char(c),
                _ => Err(Error::Parse(format!("expected a single letter, got {tok:?}"))),
            }
        })
        .collect()
}

/// Every distinct arrangement of the letter multiset times every correlation
/// variant, in lexicographic letter order then ascending variant.
pub fn enumerate_word_family(letters: &[Letter]) -> Result<Vec<SuperpositionSpec>> {
    check_sites(letters.len())?;
    let mut arrangement = letters.to_vec();
    arrangement.sort();
    let variants = variant_count(&arrangement);
    let mut out = Vec::new();
    loop {
        for variant in 0..variants {
            out.push(EnsembleWord { letters: arrangement.clone(), variant }.expand());
        }
        if !next_permutation(&mut arrangement) {
            break;
        }
    }
    Ok(out)
}

/// Family size without enumerating: multinomial arrangements times variants.
pub fn word_family_size(letters: &[Letter]) -> u64 {
    let count = |l| letters.iter().filter(|&&x| x == l).count() as u64;
    let n = letters.len() as u64;
    let (c, e, g) = (count(Letter::Cat), count(Letter::Excited), count(Letter::Ground));
    // n! / (c! e! g!) = C(n, c) * C(n - c, e)
    binomial(n, c) * binomial(n - c, e) * binomial(n - c - e, g) * variant_count(letters)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Dense state vector of `2^n` complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl AmplitudeVector {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Indices with a nonzero amplitude.
    pub fn support(&self) -> BTreeSet<usize> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

fn check_dense(n: usize, what: &'static str) -> Result<()> {
    if n == 0 {
        return Err(Error::SiteCount { n, min: 1, max: DENSE_CAP });
    }
    if n > DENSE_CAP {
        return Err(Error::SizeCap { what, n, cap: DENSE_CAP });
    }
    Ok(())
}

pub fn build_amplitude_vector(spec: &SuperpositionSpec) -> Result<AmplitudeVector> {
    let n = spec.n();
    check_dense(n, "dense state vector")?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
    if spec.is_single() {
        amplitudes[spec.b1.index() as usize] = Complex64::new(1.0, 0.0);
    } else {
        amplitudes[spec.b1.index() as usize] = spec.w1;
        amplitudes[spec.b2.index() as usize] = spec.w2;
    }
    Ok(AmplitudeVector { n, amplitudes })
}

/// `|+>^n`: every amplitude equals `2^(-n/2)`.
pub fn uniform_product_state(n: usize) -> Result<AmplitudeVector> {
    check_dense(n, "dense state vector")?;
    let dim = 1usize << n;
    let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
    Ok(AmplitudeVector { n, amplitudes: vec![a; dim] })
}
