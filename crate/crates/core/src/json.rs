//! JSON encodings shared by the library and the CLI.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{Rational, RationalJson};
use crate::series::{degree, ExpSum};
use crate::Error;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub mu2: Vec<i64>,
    pub num: String,
    pub den: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpSumJson {
    pub rank: usize,
    pub ceiling: i64,
    pub floor: i64,
    pub terms: Vec<TermJson>,
}

impl From<&ExpSum> for ExpSumJson {
    fn from(s: &ExpSum) -> Self {
        ExpSumJson {
            rank: s.rank(),
            ceiling: s.ceiling(),
            floor: s.floor(),
            terms: s
                .terms()
                .map(|(k, c)| {
                    let r = RationalJson::from(c);
                    TermJson { mu2: k.clone(), num: r.num, den: r.den }
                })
                .collect(),
        }
    }
}

impl TryFrom<&ExpSumJson> for ExpSum {
    type Error = Error;

    fn try_from(j: &ExpSumJson) -> Result<Self, Error> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            if t.mu2.len() != j.rank {
                return Err(Error::RankMismatch(j.rank, t.mu2.len()));
            }
            let d = degree(&t.mu2);
            if d > j.ceiling {
                return Err(Error::OutsideWindow { degree: d, ceiling: j.ceiling });
            }
            if d < j.floor {
                return Err(Error::Parse(format!("term of degree {d} below declared floor {}", j.floor)));
            }
            let c = Rational::try_from(&RationalJson { num: t.num.clone(), den: t.den.clone() })?;
            terms.push((t.mu2.clone(), c));
        }
        Ok(ExpSum::from_terms(j.rank, j.ceiling, terms))
    }
}

impl Serialize for ExpSum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExpSumJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExpSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ExpSumJson::deserialize(d)?;
        ExpSum::try_from(&j).map_err(serde::de::Error::custom)
    }
}
