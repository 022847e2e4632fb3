//! Digit codes whose induced p-adic dendrogram reproduces a given hierarchy.
//!
//! A code is a digit string indexed by position, position `t` being the
//! coefficient of `p^t`. Two codes that agree on positions `0..k` and differ
//! at `k` have common prefix length `k`; read as p-adic integers their
//! difference has valuation `k`, so the common prefix length is the merge
//! level in the dendrogram of the decoded integers.
//!
//! Digit alphabets of size `q = p^f` model the residue field of an unramified
//! extension; only `q = p` decodes to rational integers.

use std::collections::HashSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::dendrogram::{build_dendrogram, Dendrogram, Node};
use crate::error::{Error, Result};
use crate::padic::{is_prime, ExtendedPoint, Prime, Rational};

/// A rooted tree with labeled leaves and strictly increasing vertex levels.
/// The order of children is significant: it fixes the digit each child gets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AbstractNode {
    Leaf { leaf: String },
    Internal { level: i64, children: Vec<AbstractNode> },
}

impl AbstractNode {
    pub fn leaf(label: impl Into<String>) -> Self {
        AbstractNode::Leaf { leaf: label.into() }
    }

    pub fn internal(level: i64, children: Vec<AbstractNode>) -> Self {
        AbstractNode::Internal { level, children }
    }

    fn first_label(&self) -> &str {
        match self {
            AbstractNode::Leaf { leaf } => leaf,
            AbstractNode::Internal { children, .. } => children[0].first_label(),
        }
    }

    fn labels<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            AbstractNode::Leaf { leaf } => out.push(leaf),
            AbstractNode::Internal { children, .. } => children.iter().for_each(|c| c.labels(out)),
        }
    }

    fn max_branching(&self) -> usize {
        match self {
            AbstractNode::Leaf { .. } => 0,
            AbstractNode::Internal { children, .. } => children
                .iter()
                .map(AbstractNode::max_branching)
                .max()
                .unwrap_or(0)
                .max(children.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractDendrogram {
    tree: AbstractNode,
}

impl AbstractDendrogram {
    pub fn new(tree: AbstractNode) -> Result<Self> {
        fn check(node: &AbstractNode, parent: Option<i64>, seen: &mut HashSet<String>) -> Result<()> {
            match node {
                AbstractNode::Leaf { leaf } => {
                    if !seen.insert(leaf.clone()) {
                        return Err(Error::DuplicateLabel(leaf.clone()));
                    }
                }
                AbstractNode::Internal { level, children } => {
                    if parent.is_some_and(|p| *level <= p) {
                        return Err(Error::InvalidTree(format!(
                            "level {level} does not exceed its parent's"
                        )));
                    }
                    if children.len() < 2 {
                        return Err(Error::InvalidTree(format!(
                            "vertex at level {level} has fewer than two children"
                        )));
                    }
                    for c in children {
                        check(c, Some(*level), seen)?;
                    }
                }
            }
            Ok(())
        }
        if matches!(tree, AbstractNode::Leaf { .. }) {
            return Err(Error::InvalidTree("root must be an internal vertex".into()));
        }
        check(&tree, None, &mut HashSet::new())?;
        Ok(AbstractDendrogram { tree })
    }

    /// The tree of a p-adic dendrogram, leaves labeled by their points.
    pub fn from_dendrogram(d: &Dendrogram) -> Self {
        fn go(d: &Dendrogram, node: &Node) -> AbstractNode {
            match node {
                Node::Leaf(i) => AbstractNode::leaf(d.points()[*i].to_string()),
                Node::Internal { level, children } => {
                    AbstractNode::internal(*level, children.iter().map(|c| go(d, c)).collect())
                }
            }
        }
        AbstractDendrogram { tree: go(d, d.root()) }
    }

    pub fn tree(&self) -> &AbstractNode {
        &self.tree
    }

    pub fn labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.tree.labels(&mut out);
        out
    }

    pub fn max_branching(&self) -> usize {
        self.tree.max_branching()
    }

    /// `(...)@level` rendering in the given child order.
    pub fn signature(&self) -> String {
        fn go(node: &AbstractNode, out: &mut String) {
            match node {
                AbstractNode::Leaf { leaf } => out.push_str(leaf),
                AbstractNode::Internal { level, children } => {
                    out.push('(');
                    for (k, c) in children.iter().enumerate() {
                        if k > 0 {
                            out.push(',');
                        }
                        go(c, out);
                    }
                    out.push_str(&format!(")@{level}"));
                }
            }
        }
        let mut out = String::new();
        go(&self.tree, &mut out);
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: AbstractDendrogram = serde_json::from_str(text).map_err(Error::from_json)?;
        AbstractDendrogram::new(raw.tree)
    }
}

/// `q = p^f` digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DigitAlphabet {
    prime: Prime,
    degree: u32,
}

impl DigitAlphabet {
    pub fn new(prime: Prime, degree: u32) -> Result<Self> {
        if degree == 0 || prime.get().checked_pow(degree).is_none() {
            return Err(Error::NotPrimePower {
                q: prime.get().saturating_pow(degree),
            });
        }
        Ok(DigitAlphabet { prime, degree })
    }

    /// Splits `q` into `p^f`.
    pub fn from_size(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::NotPrimePower { q });
        }
        let p = (2..=q)
            .find(|&d| q.is_multiple_of(d))
            .filter(|&d| is_prime(d))
            .expect("smallest divisor above one is prime");
        let mut rest = q;
        let mut degree = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            degree += 1;
        }
        if rest != 1 {
            return Err(Error::NotPrimePower { q });
        }
        Ok(DigitAlphabet {
            prime: Prime::new(p)?,
            degree,
        })
    }

    /// Smallest power of `p` with at least `symbols` digits.
    pub fn covering(prime: Prime, symbols: usize) -> Self {
        let mut degree = 1;
        while (prime.get() as u128).pow(degree) < symbols as u128 {
            degree += 1;
        }
        DigitAlphabet { prime, degree }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn size(&self) -> u64 {
        self.prime.get().pow(self.degree)
    }
}

/// Leaf label to digit string, in leaf order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeAssignment {
    alphabet: DigitAlphabet,
    codes: Vec<(String, Vec<u64>)>,
}

#[derive(Serialize, Deserialize)]
struct CodeAssignmentJson {
    q: u64,
    p: u64,
    codes: serde_json::Map<String, serde_json::Value>,
}

const DIGIT_CHARS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

fn render_digits(digits: &[u64], q: u64) -> String {
    if q <= DIGIT_CHARS.len() as u64 {
        digits.iter().map(|&d| DIGIT_CHARS[d as usize] as char).collect()
    } else {
        digits.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
    }
}

fn parse_digits(text: &str, q: u64) -> Option<Vec<u64>> {
    let digits: Option<Vec<u64>> = if q <= DIGIT_CHARS.len() as u64 {
        text.bytes()
            .map(|b| DIGIT_CHARS.iter().position(|&c| c == b).map(|d| d as u64))
            .collect()
    } else if text.is_empty() {
        Some(Vec::new())
    } else {
        text.split(',').map(|s| s.trim().parse().ok()).collect()
    };
    digits.filter(|ds| ds.iter().all(|&d| d < q))
}

impl CodeAssignment {
    pub fn alphabet(&self) -> DigitAlphabet {
        self.alphabet
    }

    pub fn codes(&self) -> &[(String, Vec<u64>)] {
        &self.codes
    }

    pub fn code(&self, label: &str) -> Option<&[u64]> {
        self.codes.iter().find(|(l, _)| l == label).map(|(_, c)| c.as_slice())
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Longest common prefix of codes `i` and `j`.
    pub fn common_prefix_len(&self, i: usize, j: usize) -> usize {
        let (a, b) = (&self.codes[i].1, &self.codes[j].1);
        a.iter().zip(b).take_while(|(x, y)| x == y).count()
    }

    /// `sum_t digit_t p^t` for code `i`; meaningful for `q = p`.
    pub fn integer(&self, i: usize) -> BigInt {
        let base = BigInt::from(self.alphabet.size());
        self.codes[i]
            .1
            .iter()
            .rev()
            .fold(BigInt::from(0), |acc, &d| acc * &base + BigInt::from(d))
    }

    pub fn to_json(&self) -> String {
        let q = self.alphabet.size();
        let codes = self
            .codes
            .iter()
            .map(|(l, c)| (l.clone(), serde_json::Value::String(render_digits(c, q))))
            .collect();
        serde_json::to_string_pretty(&CodeAssignmentJson {
            q,
            p: self.alphabet.prime.get(),
            codes,
        })
        .expect("codes serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CodeAssignmentJson = serde_json::from_str(text).map_err(Error::from_json)?;
        let alphabet = DigitAlphabet::from_size(raw.q)?;
        if alphabet.prime.get() != raw.p {
            return Err(Error::NotPrimePower { q: raw.q });
        }
        let codes = raw
            .codes
            .into_iter()
            .map(|(label, v)| {
                let digits = v
                    .as_str()
                    .and_then(|s| parse_digits(s, raw.q))
                    .ok_or_else(|| Error::InvalidTree(format!("invalid code for '{label}'")))?;
                Ok((label, digits))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CodeAssignment { alphabet, codes })
    }
}

/// Codes realizing `a`: below a vertex at level `l` the `k`-th child gets
/// digit `k` at position `l`; positions strictly between two levels are 0.
/// The first leaf is therefore coded by 0, and when the root sits at level
/// 0 the first leaf of its second child is coded by 1.
pub fn embed_dendrogram(a: &AbstractDendrogram, alphabet: DigitAlphabet) -> Result<CodeAssignment> {
    fn go(node: &AbstractNode, prefix: &mut Vec<u64>, q: u64, out: &mut Vec<(String, Vec<u64>)>) -> Result<()> {
        match node {
            AbstractNode::Leaf { leaf } => out.push((leaf.clone(), prefix.clone())),
            AbstractNode::Internal { level, children } => {
                if children.len() as u64 > q {
                    return Err(Error::BranchingExceedsAlphabet {
                        vertex: format!("at level {level} above '{}'", node.first_label()),
                        children: children.len(),
                        q,
                    });
                }
                let level = usize::try_from(*level)
                    .map_err(|_| Error::InvalidTree(format!("negative level {level} cannot be embedded")))?;
                let saved = prefix.len();
                prefix.resize(level, 0);
                for (k, c) in children.iter().enumerate() {
                    prefix.push(k as u64);
                    go(c, prefix, q, out)?;
                    prefix.truncate(level);
                }
                prefix.truncate(saved);
            }
        }
        Ok(())
    }
    let mut codes = Vec::new();
    go(&a.tree, &mut Vec::new(), alphabet.size(), &mut codes)?;
    Ok(CodeAssignment { alphabet, codes })
}

/// Reads each code as the integer `sum_t digit_t p^t` and builds the
/// dendrogram of these integers together with infinity. Point `i` is code
/// `i`; infinity comes last.
pub fn decode_to_dendrogram(codes: &CodeAssignment, p: Prime) -> Result<Dendrogram> {
    let q = codes.alphabet.size();
    if q != p.get() {
        return Err(Error::AlphabetNotPrime { q, p: p.get() });
    }
    let mut points: Vec<ExtendedPoint> = (0..codes.len())
        .map(|i| ExtendedPoint::Finite(Rational::from_integer(codes.integer(i))))
        .collect();
    points.push(ExtendedPoint::Infinity);
    build_dendrogram(&points, p)
}

/// Positional string code: the symbol at position `i` becomes digit `1 + s`
/// at position `i`, `s` being the symbol's index in the alphabet. Digit 0 is
/// left for "string ended", so a string and its extensions stay distinct
/// integers. `alphabet` defaults to the sorted set of symbols used.
pub fn encode_strings(strings: &[String], p: Prime, alphabet: Option<&[char]>) -> Result<CodeAssignment> {
    let symbols: Vec<char> = match alphabet {
        Some(a) => a.to_vec(),
        None => {
            let mut s: Vec<char> = strings.iter().flat_map(|s| s.chars()).collect();
            s.sort_unstable();
            s.dedup();
            s
        }
    };
    let alphabet = DigitAlphabet::covering(p, symbols.len() + 1);
    let mut seen = HashSet::new();
    let mut codes = Vec::with_capacity(strings.len());
    for (si, s) in strings.iter().enumerate() {
        if !seen.insert(s.as_str()) {
            return Err(Error::DuplicateLabel(s.clone()));
        }
        let digits = s
            .chars()
            .enumerate()
            .map(|(pos, ch)| {
                symbols
                    .iter()
                    .position(|&c| c == ch)
                    .map(|k| k as u64 + 1)
                    .ok_or(Error::SymbolOutsideAlphabet {
                        symbol: ch,
                        string: si,
                        position: pos,
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        codes.push((s.clone(), digits));
    }
    Ok(CodeAssignment { alphabet, codes })
}
