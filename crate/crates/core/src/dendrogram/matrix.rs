use serde::{Deserialize, Serialize};

use super::{check_distinct, Dendrogram, Node};
use crate::error::{Error, Result};
use crate::padic::{pairwise_valuation, ExtendedPoint, Prime, Valuation};

/// Symmetric matrix of pairwise valuations with `inf` on the diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationMatrix {
    #[serde(rename = "p", with = "prime_serde")]
    prime: Prime,
    points: Vec<ExtendedPoint>,
    #[serde(rename = "matrix")]
    entries: Vec<Vec<Valuation>>,
}

pub(crate) mod prime_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::padic::Prime;

    pub fn serialize<S: Serializer>(p: &Prime, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(p.get())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Prime, D::Error> {
        let v = u64::deserialize(d)?;
        Prime::new(v).map_err(serde::de::Error::custom)
    }
}

impl ValuationMatrix {
    /// A matrix over explicit entries, e.g. for feeding the oracle a
    /// hand-made (possibly non-ultrametric) table.
    pub fn from_entries(prime: Prime, points: Vec<ExtendedPoint>, entries: Vec<Vec<Valuation>>) -> Result<Self> {
        let n = points.len();
        if entries.len() != n || entries.iter().any(|row| row.len() != n) {
            return Err(Error::MalformedMatrix(format!("expected a {n}x{n} matrix")));
        }
        for (i, row) in entries.iter().enumerate() {
            if row[i] != Valuation::Infinity {
                return Err(Error::MalformedMatrix(format!("diagonal entry {i} is not inf")));
            }
            for (j, entry) in row.iter().enumerate().take(i) {
                if *entry != entries[j][i] {
                    return Err(Error::MalformedMatrix(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        Ok(ValuationMatrix { prime, points, entries })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn points(&self) -> &[ExtendedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Valuation {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Valuation>] {
        &self.entries
    }

    /// First triple whose two smallest entries differ, if any.
    pub fn ultrametric_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut t = [self.entries[i][j], self.entries[i][k], self.entries[j][k]];
                    t.sort();
                    if t[0] != t[1] {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// Plain-text table with row and column labels.
    pub fn to_table(&self) -> String {
        let labels: Vec<String> = self.points.iter().map(ToString::to_string).collect();
        let cells: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(ToString::to_string).collect())
            .collect();
        let width = labels
            .iter()
            .chain(cells.iter().flatten())
            .map(|s| s.chars().count())
            .max()
            .unwrap_or(1)
            .max(format!("v{}", self.prime).len());
        let mut out = format!("{:>width$} |", format!("v{}", self.prime));
        for l in &labels {
            out.push_str(&format!(" {l:>width$}"));
        }
        out.push('\n');
        out.push_str(&"-".repeat(width + 2 + labels.len() * (width + 1)));
        out.push('\n');
        for (l, row) in labels.iter().zip(&cells) {
            out.push_str(&format!("{l:>width$} |"));
            for c in row {
                out.push_str(&format!(" {c:>width$}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Matrix of [`pairwise_valuation`] over all point pairs.
pub fn valuation_matrix(points: &[ExtendedPoint], p: Prime) -> Result<ValuationMatrix> {
    check_distinct(points)?;
    let entries = points
        .iter()
        .map(|x| points.iter().map(|y| pairwise_valuation(x, y, p)).collect())
        .collect();
    Ok(ValuationMatrix {
        prime: p,
        points: points.to_vec(),
        entries,
    })
}

/// Single-linkage agglomeration on a valuation matrix.
///
/// Clusters are merged in order of decreasing valuation (increasing distance
/// `p^-v`); merges at the same level collapse into one multi-way vertex. The
/// row of the point at infinity (all `-inf`) is skipped, and the result has no
/// infinity end. Works only from the matrix and shares no code with
/// [`super::build_dendrogram`] beyond child ordering.
pub fn single_linkage_oracle(m: &ValuationMatrix) -> Result<Dendrogram> {
    if let Some((i, j, k)) = m.ultrametric_violation() {
        return Err(Error::NotUltrametric { i, j, k });
    }
    let n = m.len();
    let is_infinity_row = |i: usize| n > 1 && (0..n).all(|j| j == i || m.get(i, j) == Valuation::NegInfinity);
    let active: Vec<usize> = (0..n).filter(|&i| !is_infinity_row(i)).collect();
    if active.len() < 2 {
        return Err(Error::TooFewPoints {
            required: 2,
            found: active.len(),
        });
    }
    for (a, &i) in active.iter().enumerate() {
        for &j in &active[a + 1..] {
            match m.get(i, j) {
                Valuation::Finite(_) => {}
                Valuation::Infinity => {
                    return Err(Error::DuplicatePoint {
                        point: m.points[i].to_string(),
                        first: i,
                        second: j,
                    })
                }
                Valuation::NegInfinity => return Err(Error::MalformedMatrix(format!("unexpected -inf at ({i},{j})"))),
            }
        }
    }

    let mut clusters: Vec<(Node, Vec<usize>)> = active.iter().map(|&i| (Node::Leaf(i), vec![i])).collect();
    while clusters.len() > 1 {
        let mut best: Option<(i64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let link = clusters[a]
                    .1
                    .iter()
                    .flat_map(|&i| clusters[b].1.iter().map(move |&j| (i, j)))
                    .filter_map(|(i, j)| m.get(i, j).finite())
                    .max()
                    .expect("finite linkage");
                if best.is_none_or(|(l, _, _)| link > l) {
                    best = Some((link, a, b));
                }
            }
        }
        let (level, a, b) = best.expect("two clusters");
        let (node_b, members_b) = clusters.swap_remove(b);
        let (node_a, mut members_a) = clusters.swap_remove(a);
        let mut children = Vec::new();
        for node in [node_a, node_b] {
            match node {
                Node::Internal {
                    level: l,
                    children: inner,
                } if l == level => children.extend(inner),
                other => children.push(other),
            }
        }
        members_a.extend(members_b);
        clusters.push((Node::Internal { level, children }, members_a));
    }
    let (root, _) = clusters.pop().expect("one cluster left");
    Ok(Dendrogram::from_parts(m.prime, m.points.clone(), root, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dendrogram::{build_dendrogram, parse_points};

    fn pts(values: &[&str]) -> Vec<ExtendedPoint> {
        parse_points(values.iter().copied()).unwrap()
    }

    fn v(x: i64) -> Valuation {
        Valuation::Finite(x)
    }

    #[test]
    fn small_matrices() {
        let m = valuation_matrix(&pts(&["0", "1"]), Prime::TWO).unwrap();
        assert_eq!(
            m.rows(),
            &[vec![Valuation::Infinity, v(0)], vec![v(0), Valuation::Infinity]]
        );
        let m = valuation_matrix(&pts(&["4", "12", "20"]), Prime::TWO).unwrap();
        assert_eq!((m.get(0, 1), m.get(0, 2), m.get(1, 2)), (v(3), v(4), v(3)));
        assert!(m.ultrametric_violation().is_none());
    }

    #[test]
    fn oracle_examples() {
        let m = valuation_matrix(&pts(&["4", "12", "20"]), Prime::TWO).unwrap();
        let d = single_linkage_oracle(&m).unwrap();
        assert_eq!(d.labeled_signature(), "((4,20)@4,12)@3");
        let m = valuation_matrix(&pts(&["0", "1"]), Prime::TWO).unwrap();
        assert_eq!(single_linkage_oracle(&m).unwrap().signature().0, "(0,1)@0");
    }

    #[test]
    fn oracle_skips_infinity_row() {
        let points = pts(&["0", "1", "3", "4", "12", "20", "32", "64", "inf"]);
        let m = valuation_matrix(&points, Prime::TWO).unwrap();
        let oracle = single_linkage_oracle(&m).unwrap();
        let built = build_dendrogram(&points, Prime::TWO).unwrap();
        assert_eq!(oracle.signature(), built.without_infinity_end().signature());
    }

    #[test]
    fn oracle_ties_make_multiway_vertices() {
        let five = Prime::new(5).unwrap();
        let m = valuation_matrix(&pts(&["0", "1", "2", "3"]), five).unwrap();
        assert_eq!(single_linkage_oracle(&m).unwrap().signature().0, "(0,1,2,3)@0");
    }

    #[test]
    fn rejects_non_ultrametric() {
        let inf = Valuation::Infinity;
        let m = ValuationMatrix::from_entries(
            Prime::TWO,
            (0..3).map(ExtendedPoint::from).collect(),
            vec![vec![inf, v(1), v(2)], vec![v(1), inf, v(3)], vec![v(2), v(3), inf]],
        )
        .unwrap();
        assert_eq!(
            single_linkage_oracle(&m),
            Err(Error::NotUltrametric { i: 0, j: 1, k: 2 })
        );
    }

    #[test]
    fn rejects_malformed() {
        let inf = Valuation::Infinity;
        let points = vec![ExtendedPoint::from(0), ExtendedPoint::from(1)];
        assert!(
            ValuationMatrix::from_entries(Prime::TWO, points.clone(), vec![vec![inf, v(0)], vec![v(1), inf]]).is_err()
        );
        assert!(
            ValuationMatrix::from_entries(Prime::TWO, points.clone(), vec![vec![v(0), v(0)], vec![v(0), inf]]).is_err()
        );
        assert!(ValuationMatrix::from_entries(Prime::TWO, points, vec![vec![inf]]).is_err());
    }

    #[test]
    fn duplicate_points() {
        assert!(matches!(
            valuation_matrix(&pts(&["3", "3/1"]), Prime::TWO),
            Err(Error::DuplicatePoint {
                first: 0,
                second: 1,
                ..
            })
        ));
    }
}
