//! Two models of the countable random graph: naturals with the BIT
//! adjacency, and hereditarily finite sets under membership, joined by
//! Ackermann's coding.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Sets of depth 6 and more have codes with at least `2^65536` bits.
pub const MAX_DEPTH: usize = 5;

/// Largest bit index `extension_witness` is willing to set.
pub const MAX_WITNESS_BIT: u64 = 1 << 24;

/// A hereditarily finite set. Members are kept sorted by Ackermann code
/// and without repeats, so structural equality is set equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Hfs(Vec<Hfs>);

impl Ord for Hfs {
    /// Agrees with the order of Ackermann codes: a sum of distinct powers
    /// of two is compared by its largest terms first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

impl PartialOrd for Hfs {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hfs {
    pub fn empty() -> Self {
        Hfs(Vec::new())
    }

    pub fn new(mut members: Vec<Hfs>) -> Self {
        members.sort();
        members.dedup();
        Hfs(members)
    }

    /// The von Neumann ordinal `k = {0, ..., k-1}`.
    pub fn ordinal(k: usize) -> Self {
        let mut members = Vec::with_capacity(k);
        for _ in 0..k {
            let next = Hfs(members.clone());
            members.push(next);
        }
        Hfs(members)
    }

    pub fn members(&self) -> &[Hfs] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: &Hfs) -> bool {
        self.0.binary_search(x).is_ok()
    }

    /// `0` for the empty set, else one more than the deepest member.
    pub fn depth(&self) -> usize {
        self.0.iter().map(|m| m.depth() + 1).max().unwrap_or(0)
    }

    /// Parses brace notation such as `{{},{{}}}`; whitespace is ignored.
    pub fn parse(text: &str) -> Result<Hfs> {
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let set = parse_set(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::InvalidInput(format!("trailing input after position {pos}")));
        }
        Ok(set)
    }
}

fn parse_set(chars: &[char], pos: &mut usize) -> Result<Hfs> {
    let expect = |pos: &usize, c: char| -> Result<()> {
        match chars.get(*pos) {
            Some(&x) if x == c => Ok(()),
            other => Err(Error::InvalidInput(format!("expected `{c}` at position {pos}, found {other:?}"))),
        }
    };
    expect(pos, '{')?;
    *pos += 1;
    let mut members = Vec::new();
    if chars.get(*pos) == Some(&'}') {
        *pos += 1;
        return Ok(Hfs::empty());
    }
    loop {
        members.push(parse_set(chars, pos)?);
        match chars.get(*pos) {
            Some(',') => *pos += 1,
            Some('}') => {
                *pos += 1;
                return Ok(Hfs::new(members));
            }
            other => {
                return Err(Error::InvalidInput(format!("expected `,` or `}}` at position {pos}, found {other:?}")))
            }
        }
    }
}

impl fmt::Display for Hfs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

fn bit(x: &BigUint, i: &BigUint) -> bool {
    i.to_u64().is_some_and(|i| x.bit(i))
}

/// `a ~ b` iff bit `a` of `b` or bit `b` of `a` is set.
pub fn bit_adjacent(a: &BigUint, b: &BigUint) -> Result<bool> {
    if a == b {
        return Err(Error::InvalidInput(format!("self-loop at {a}")));
    }
    Ok(bit(b, a) || bit(a, b))
}

/// `A(s) = Σ_{t ∈ s} 2^{A(t)}`.
pub fn ackermann_encode(s: &Hfs) -> Result<BigUint> {
    let depth = s.depth();
    if depth > MAX_DEPTH {
        return Err(Error::Domain(format!("depth {depth} exceeds the guard of {MAX_DEPTH}")));
    }
    Ok(encode(s))
}

fn encode(s: &Hfs) -> BigUint {
    let mut code = BigUint::zero();
    for m in &s.0 {
        let exp = encode(m).to_u64().expect("depth guard keeps exponents small");
        code.set_bit(exp, true);
    }
    code
}

/// Inverse of [`ackermann_encode`] on all naturals.
pub fn ackermann_decode(n: &BigUint) -> Hfs {
    let members = (0..n.bits()).filter(|&i| n.bit(i)).map(|i| ackermann_decode(&BigUint::from(i))).collect();
    // Ascending bit order is ascending code order already.
    Hfs(members)
}

/// A vertex adjacent to every element of `u_set` and to none of `v_set`:
/// `z = Σ_{u ∈ U} 2^u + 2^K` with `K = 1 + max(U ∪ V)`, or `K = 0` when
/// both sets are empty.
pub fn extension_witness(u_set: &BTreeSet<u64>, v_set: &BTreeSet<u64>) -> Result<BigUint> {
    if let Some(x) = u_set.intersection(v_set).next() {
        return Err(Error::InvalidInput(format!("{x} is in both sets")));
    }
    let k = u_set.iter().chain(v_set).max().map_or(0, |&x| x + 1);
    if k > MAX_WITNESS_BIT {
        return Err(Error::Domain(format!("witness would need bit {k}")));
    }
    let mut z = BigUint::one() << k;
    for &u in u_set {
        z.set_bit(u, true);
    }
    Ok(z)
}
