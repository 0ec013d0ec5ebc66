use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::{is_off, Cyclo, RatMod1};

/// A finitely supported function `Q/Z -> Q(zeta)`. Values are stored as
/// `2 pi R(t)`; zero values are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "QzJson", try_from = "QzJson")]
pub struct QZFunction {
    points: BTreeMap<RatMod1, Cyclo>,
}

#[derive(Serialize, Deserialize)]
struct QzPoint {
    t: RatMod1,
    value: Cyclo,
}

#[derive(Serialize, Deserialize)]
struct QzJson {
    points: Vec<QzPoint>,
}

impl From<QZFunction> for QzJson {
    fn from(f: QZFunction) -> Self {
        QzJson { points: f.points.into_iter().map(|(t, value)| QzPoint { t, value }).collect() }
    }
}

impl TryFrom<QzJson> for QZFunction {
    type Error = String;

    fn try_from(j: QzJson) -> std::result::Result<Self, String> {
        Ok(QZFunction::from_points(j.points.into_iter().map(|p| (p.t, p.value))))
    }
}

impl QZFunction {
    pub fn new() -> Self {
        Self::default()
    }

    /// `1_t`.
    pub fn indicator(t: RatMod1) -> Self {
        Self::from_points([(t, Cyclo::one())])
    }

    /// Sums values landing on the same class.
    pub fn from_points(points: impl IntoIterator<Item = (RatMod1, Cyclo)>) -> Self {
        let mut f = Self::new();
        for (t, c) in points {
            f.add_at(t, &c);
        }
        f
    }

    pub fn get(&self, t: &RatMod1) -> Cyclo {
        self.points.get(t).cloned().unwrap_or_default()
    }

    pub fn add_at(&mut self, t: RatMod1, c: &Cyclo) {
        if c.is_zero() {
            return;
        }
        let sum = self.get(&t).add(c);
        if sum.is_zero() {
            self.points.remove(&t);
        } else {
            self.points.insert(t, sum);
        }
    }

    pub fn points(&self) -> &BTreeMap<RatMod1, Cyclo> {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RatMod1, &Cyclo)> {
        self.points.iter()
    }

    pub fn support(&self) -> Vec<RatMod1> {
        self.points.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn add(&self, other: &QZFunction) -> QZFunction {
        let mut out = self.clone();
        for (t, c) in other.iter() {
            out.add_at(t.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &QZFunction) -> QZFunction {
        self.add(&other.scale(&Cyclo::from_int(-1)))
    }

    pub fn scale(&self, c: &Cyclo) -> QZFunction {
        Self::from_points(self.iter().map(|(t, v)| (t.clone(), v.mul(c))))
    }

    pub fn is_off_supported(&self, rho: u64) -> bool {
        self.points.keys().all(|t| is_off(t.value(), rho))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::error::HydraError::Malformed(e.to_string()))
    }
}

impl FromIterator<(RatMod1, Cyclo)> for QZFunction {
    fn from_iter<I: IntoIterator<Item = (RatMod1, Cyclo)>>(iter: I) -> Self {
        Self::from_points(iter)
    }
}

/// The expansion of the operator applied to `1_source`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageSet {
    pub source: RatMod1,
    #[serde(flatten)]
    pub points: QZFunction,
}

impl ImageSet {
    pub fn support(&self) -> Vec<RatMod1> {
        self.points.support()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn t(s: &str) -> RatMod1 {
        s.parse().unwrap()
    }

    #[test]
    fn merging_and_cancellation() {
        let mut f = QZFunction::indicator(t("1/5"));
        f.add_at(t("6/5"), &Cyclo::one());
        assert_eq!(f.get(&t("1/5")), Cyclo::from_int(2));
        f.add_at(t("1/5"), &Cyclo::from_int(-2));
        assert!(f.is_empty());
    }

    #[test]
    fn json_round_trip() {
        let f = QZFunction::from_points([(t("1/5"), Cyclo::zeta(10, 9).scale(&rat(1, 2))), (t("0"), Cyclo::one())]);
        let text = f.to_json().unwrap();
        assert!(text.starts_with(r#"{"points":[{"t":"0/1","value":[["1","E(1,0)"]]}"#), "{text}");
        assert_eq!(QZFunction::from_json(&text).unwrap(), f);
        assert!(QZFunction::from_json("{\"points\":[{\"t\":\"x\"}]}").is_err());
    }
}
