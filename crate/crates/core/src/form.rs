//! Integer affine forms over the off-diagonal arc positions.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cost::CostValue;
use crate::error::{Error, Result};
use crate::matrix::CostMatrix;
use crate::tour::Tour;

/// `Σ coeffs[i,j]·c_ij + constant`. Zero coefficients are never stored and
/// diagonal positions never appear.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct AffineForm {
    coeffs: BTreeMap<(usize, usize), i64>,
    constant: i64,
}

impl AffineForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        AffineForm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    /// The single input variable `c_ij`.
    ///
    /// # Panics
    /// On a diagonal position.
    pub fn var(i: usize, j: usize) -> Self {
        assert_ne!(i, j, "diagonal positions carry no variable");
        let mut coeffs = BTreeMap::new();
        coeffs.insert((i, j), 1);
        AffineForm {
            coeffs,
            constant: 0,
        }
    }

    /// `Σ_{(i,j) ∈ t} c_ij`, i.e. `⟨chi(t), C⟩`.
    pub fn tour_length(t: &Tour) -> Self {
        let mut f = Self::zero();
        for (i, j) in t.arcs() {
            f.add_term(i, j, 1);
        }
        f
    }

    /// Builds a form from explicit terms; repeated positions accumulate.
    pub fn from_terms(terms: &[((usize, usize), i64)], constant: i64) -> Result<Self> {
        let mut f = Self::constant(constant);
        for &((i, j), c) in terms {
            if i == j || i == 0 || j == 0 {
                return Err(Error::Precondition(format!(
                    "position ({i},{j}) is not an off-diagonal arc"
                )));
            }
            f.add_term(i, j, c);
        }
        Ok(f)
    }

    fn add_term(&mut self, i: usize, j: usize, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.coeffs.entry((i, j)).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&(i, j));
        }
    }

    pub fn constant_term(&self) -> i64 {
        self.constant
    }

    pub fn coeff(&self, i: usize, j: usize) -> i64 {
        self.coeffs.get(&(i, j)).copied().unwrap_or(0)
    }

    /// Nonzero terms in ascending `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// True when the form does not depend on the input at all.
    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_index(&self) -> usize {
        self.coeffs
            .keys()
            .map(|&(i, j)| i.max(j))
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        AffineForm {
            coeffs: self.coeffs.iter().map(|(&p, &c)| (p, c * k)).collect(),
            constant: self.constant * k,
        }
    }

    /// Terms with positive coefficients, constant dropped.
    pub fn positive_part(&self) -> Self {
        AffineForm {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, &c)| c > 0)
                .map(|(&p, &c)| (p, c))
                .collect(),
            constant: 0,
        }
    }

    /// Magnitudes of the negative coefficients, constant dropped, so that
    /// `f = positive_part − negative_part + constant`.
    pub fn negative_part(&self) -> Self {
        AffineForm {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, &c)| c < 0)
                .map(|(&p, &c)| (p, -c))
                .collect(),
            constant: 0,
        }
    }

    /// Exact evaluation with an arbitrary cell lookup.
    pub fn eval_with<F: Fn(usize, usize) -> i64>(&self, cell: F) -> Result<i64> {
        self.terms().try_fold(self.constant, |acc, ((i, j), c)| {
            c.checked_mul(cell(i, j))
                .and_then(|t| acc.checked_add(t))
                .ok_or(Error::Overflow)
        })
    }

    /// Exact value at `C`. Touching an infinite cell is an error.
    pub fn eval(&self, m: &CostMatrix) -> Result<i64> {
        if self.max_index() > m.n() {
            return Err(Error::DimensionMismatch {
                expected: self.max_index(),
                found: m.n(),
            });
        }
        let mut acc = self.constant;
        for ((i, j), c) in self.terms() {
            match m.cost(i, j) {
                CostValue::Finite(v) => {
                    acc = c
                        .checked_mul(v)
                        .and_then(|t| acc.checked_add(t))
                        .ok_or(Error::Overflow)?;
                }
                CostValue::Infinite => return Err(Error::InfiniteCell(i, j)),
            }
        }
        Ok(acc)
    }
}

impl Add for &AffineForm {
    type Output = AffineForm;
    fn add(self, rhs: &AffineForm) -> AffineForm {
        let mut out = self.clone();
        for ((i, j), c) in rhs.terms() {
            out.add_term(i, j, c);
        }
        out.constant += rhs.constant;
        out
    }
}

impl Sub for &AffineForm {
    type Output = AffineForm;
    fn sub(self, rhs: &AffineForm) -> AffineForm {
        let mut out = self.clone();
        for ((i, j), c) in rhs.terms() {
            out.add_term(i, j, -c);
        }
        out.constant -= rhs.constant;
        out
    }
}

impl Neg for &AffineForm {
    type Output = AffineForm;
    fn neg(self) -> AffineForm {
        self.scale(-1)
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((i, j), c) in self.terms() {
            let sign = if c < 0 { "−" } else { "+" };
            match (first, c.abs()) {
                (true, 1) if c < 0 => write!(f, "−c{i}{j}")?,
                (true, 1) => write!(f, "c{i}{j}")?,
                (true, a) if c < 0 => write!(f, "−{a}·c{i}{j}")?,
                (true, a) => write!(f, "{a}·c{i}{j}")?,
                (false, 1) => write!(f, " {sign} c{i}{j}")?,
                (false, a) => write!(f, " {sign} {a}·c{i}{j}")?,
            }
            first = false;
        }
        match (first, self.constant) {
            (true, c) => write!(f, "{c}"),
            (false, 0) => Ok(()),
            (false, c) if c < 0 => write!(f, " − {}", -c),
            (false, c) => write!(f, " + {c}"),
        }
    }
}

/// Coefficient maps serialize as `{"i,j": coeff}` in ascending `(i, j)` order.
pub(crate) mod coeff_map {
    use super::*;

    pub fn serialize<S: Serializer>(
        form: &AffineForm,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(form.coeffs.len()))?;
        for ((i, j), c) in form.terms() {
            map.serialize_entry(&format!("{i},{j}"), &c)?;
        }
        map.end()
    }

    struct CoeffVisitor;

    impl<'de> Visitor<'de> for CoeffVisitor {
        type Value = AffineForm;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a map from \"i,j\" to integer coefficients")
        }

        fn visit_map<A: MapAccess<'de>>(
            self,
            mut access: A,
        ) -> std::result::Result<AffineForm, A::Error> {
            let mut form = AffineForm::zero();
            while let Some((key, c)) = access.next_entry::<String, i64>()? {
                let (i, j) = key
                    .split_once(',')
                    .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                    .ok_or_else(|| de::Error::custom(format!("bad arc key {key:?}")))?;
                if i == j || i == 0 || j == 0 {
                    return Err(de::Error::custom(format!(
                        "({i},{j}) is not an off-diagonal arc"
                    )));
                }
                if c == 0 || form.coeffs.contains_key(&(i, j)) {
                    return Err(de::Error::custom(format!(
                        "non-canonical coefficient at {key:?}"
                    )));
                }
                form.coeffs.insert((i, j), c);
            }
            Ok(form)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<AffineForm, D::Error> {
        d.deserialize_map(CoeffVisitor)
    }
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    #[serde(with = "coeff_map")]
    coeffs: AffineForm,
    constant: i64,
}

impl Serialize for AffineForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut coeffs = self.clone();
        coeffs.constant = 0;
        FormRepr {
            coeffs,
            constant: self.constant,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AffineForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FormRepr::deserialize(d)?;
        Ok(AffineForm {
            coeffs: r.coeffs.coeffs,
            constant: r.constant,
        })
    }
}
