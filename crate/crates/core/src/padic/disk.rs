use std::fmt;

use num_bigint::BigInt;

use super::digits::unit_residue;
use super::{valuation, Prime, Rational, Valuation};
use crate::error::{Error, Result};

/// Closed disk `{x : v_p(x - center) >= radius_exponent}`, a vertex of the
/// Bruhat-Tits tree.
///
/// The center is the canonical representative: the expansion of any member
/// truncated below `p^radius_exponent`. Two disks are equal iff their radius
/// exponents and canonical centers agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Disk {
    prime: Prime,
    radius_exponent: i64,
    center: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiskRelation {
    Equal,
    FirstInsideSecond,
    SecondInsideFirst,
    Disjoint,
}

impl Disk {
    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn radius_exponent(&self) -> i64 {
        self.radius_exponent
    }

    pub fn center(&self) -> &Rational {
        &self.center
    }

    pub fn contains(&self, x: &Rational) -> bool {
        valuation(&(x - &self.center), self.prime) >= Valuation::Finite(self.radius_exponent)
    }

    /// The unique disk in which this one is a maximal proper subdisk.
    pub fn parent(&self) -> Disk {
        disk_of(&self.center, self.radius_exponent - 1, self.prime)
    }

    /// The `p` maximal proper subdisks, ordered by their new digit.
    pub fn children(&self) -> Vec<Disk> {
        let step = Rational::pow(&self.prime.to_bigint(), self.radius_exponent);
        (0..self.prime.get())
            .map(|k| {
                let c = &self.center + &(&step * &Rational::from_integer(BigInt::from(k)));
                disk_of(&c, self.radius_exponent + 1, self.prime)
            })
            .collect()
    }
}

impl fmt::Display for Disk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({}^{}; {})", self.prime, -self.radius_exponent, self.center)
    }
}

/// The disk of radius `p^(-r)` around `x`.
pub fn disk_of(x: &Rational, r: i64, p: Prime) -> Disk {
    let center = match valuation(x, p) {
        Valuation::Finite(m) if m < r => {
            let precision = u32::try_from(r - m).expect("radius span fits in u32");
            let (m, w) = unit_residue(x, p, precision);
            &Rational::from_integer(w) * &Rational::pow(&p.to_bigint(), m)
        }
        _ => Rational::zero(),
    };
    Disk {
        prime: p,
        radius_exponent: r,
        center,
    }
}

/// Two p-adic disks are nested or disjoint; never partially overlapping.
pub fn disk_relation(first: &Disk, second: &Disk) -> Result<DiskRelation> {
    if first.prime != second.prime {
        return Err(Error::PrimeMismatch {
            left: first.prime.get(),
            right: second.prime.get(),
        });
    }
    let r1 = first.radius_exponent;
    let r2 = second.radius_exponent;
    let relation = if r1 == r2 {
        if first.center == second.center {
            DiskRelation::Equal
        } else {
            DiskRelation::Disjoint
        }
    } else if r1 > r2 {
        if second.contains(&first.center) {
            DiskRelation::FirstInsideSecond
        } else {
            DiskRelation::Disjoint
        }
    } else if first.contains(&second.center) {
        DiskRelation::SecondInsideFirst
    } else {
        DiskRelation::Disjoint
    };
    Ok(relation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn disk_of_examples() {
        let two = Prime::TWO;
        assert_eq!(disk_of(&q(12), 2, two), disk_of(&q(4), 2, two));
        assert_eq!(disk_of(&q(1), 1, two), disk_of(&q(3), 1, two));
        assert_ne!(disk_of(&q(0), 1, two), disk_of(&q(1), 1, two));
        assert_eq!(disk_of(&q(13), 3, two).center(), &q(5));
        assert_eq!(disk_of(&q(64), 3, two).center(), &q(0));
    }

    #[test]
    fn disk_of_matches_brute_force_congruence() {
        let two = Prime::TWO;
        for r in 0..5 {
            for x in -20i64..20 {
                for y in -20i64..20 {
                    let same = (x - y).rem_euclid(1 << r) == 0;
                    assert_eq!(disk_of(&q(x), r, two) == disk_of(&q(y), r, two), same, "{x} {y} {r}");
                }
            }
        }
    }

    #[test]
    fn fractional_centers() {
        let three = Prime::new(3).unwrap();
        let a: Rational = "1/3".parse().unwrap();
        let b: Rational = "10/3".parse().unwrap();
        // 10/3 - 1/3 = 3, valuation 1
        assert_eq!(disk_of(&a, 1, three), disk_of(&b, 1, three));
        assert_ne!(disk_of(&a, 2, three), disk_of(&b, 2, three));
        assert!(disk_of(&a, 0, three).contains(&"4/3".parse().unwrap()));
    }

    #[test]
    fn relation_examples() {
        let two = Prime::TWO;
        let d = disk_of(&q(0), -1, two);
        assert_eq!(
            disk_relation(&disk_of(&q(0), 1, two), &disk_of(&q(0), 0, two)).unwrap(),
            DiskRelation::FirstInsideSecond
        );
        assert_eq!(
            disk_relation(&disk_of(&q(0), 1, two), &disk_of(&q(1), 1, two)).unwrap(),
            DiskRelation::Disjoint
        );
        assert_eq!(disk_relation(&d, &d).unwrap(), DiskRelation::Equal);
        assert_eq!(
            disk_relation(&disk_of(&q(0), 0, two), &disk_of(&q(6), 2, two)).unwrap(),
            DiskRelation::SecondInsideFirst
        );
        assert_eq!(
            disk_relation(&disk_of(&q(1), 0, two), &disk_of(&q(6), 3, two)).unwrap(),
            DiskRelation::SecondInsideFirst
        );
        assert_eq!(
            disk_relation(&disk_of(&q(1), 1, two), &disk_of(&q(6), 3, two)).unwrap(),
            DiskRelation::Disjoint
        );
    }

    #[test]
    fn prime_mismatch() {
        let a = disk_of(&q(0), 0, Prime::TWO);
        let b = disk_of(&q(0), 0, Prime::new(3).unwrap());
        assert_eq!(disk_relation(&a, &b), Err(Error::PrimeMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn children_partition_parent() {
        let five = Prime::new(5).unwrap();
        let parent = disk_of(&q(7), 1, five);
        let kids = parent.children();
        assert_eq!(kids.len(), 5);
        for k in &kids {
            assert_eq!(k.parent(), parent);
        }
        for x in -30i64..30 {
            let x = q(x);
            let hits = kids.iter().filter(|k| k.contains(&x)).count();
            assert_eq!(hits, usize::from(parent.contains(&x)));
        }
    }
}
