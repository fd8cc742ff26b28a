//! The canonical 26-feature schema plus the `Price` target.
//!
//! Feature indices are fixed and grouped into four source categories:
//! property (0..=7), amenity (8..=19), traffic (20) and emotions (21..=25).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of independent features in a record.
pub const NUM_FEATURES: usize = 26;

/// Name of the dependent variable column.
pub const TARGET_NAME: &str = "Price";

pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "Year", "Elvt", "RmNum", "HllNum", "KchNum", "BthNum", "Lat", "Lng", "TspNum", "TspDst",
    "AtrNum", "AtrDst", "EdcNum", "EdcDst", "HthNum", "HthDst", "RstNum", "RstDst", "RtlNum",
    "RtlDst", "TrfV", "AgrPct", "DstPct", "HppPct", "SadPct", "FeaPct",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Property,
    Amenity,
    Traffic,
    Emotions,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Property,
        Category::Amenity,
        Category::Traffic,
        Category::Emotions,
    ];

    /// Features belonging to this category, in index order.
    pub fn features(self) -> Vec<FeatureId> {
        FeatureId::all().filter(|f| f.category() == self).collect()
    }
}

/// Index of one of the 26 independent features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureId(u8);

impl FeatureId {
    pub const YEAR: FeatureId = FeatureId(0);
    pub const ELVT: FeatureId = FeatureId(1);
    pub const RM_NUM: FeatureId = FeatureId(2);
    pub const HLL_NUM: FeatureId = FeatureId(3);
    pub const KCH_NUM: FeatureId = FeatureId(4);
    pub const BTH_NUM: FeatureId = FeatureId(5);
    pub const LAT: FeatureId = FeatureId(6);
    pub const LNG: FeatureId = FeatureId(7);
    pub const TRF_V: FeatureId = FeatureId(20);

    pub fn new(index: usize) -> Option<FeatureId> {
        (index < NUM_FEATURES).then_some(FeatureId(index as u8))
    }

    pub fn all() -> impl Iterator<Item = FeatureId> + Clone {
        (0..NUM_FEATURES as u8).map(FeatureId)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        FEATURE_NAMES[self.index()]
    }

    pub fn category(self) -> Category {
        match self.0 {
            0..=7 => Category::Property,
            8..=19 => Category::Amenity,
            20 => Category::Traffic,
            _ => Category::Emotions,
        }
    }

    pub fn from_name(name: &str) -> Option<FeatureId> {
        FEATURE_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| FeatureId(i as u8))
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureId::from_name(s).ok_or_else(|| format!("unknown feature `{s}`"))
    }
}

impl Serialize for FeatureId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for FeatureId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Canonical CSV header: the 26 feature names followed by `Price`.
pub fn csv_header() -> Vec<&'static str> {
    FEATURE_NAMES
        .iter()
        .copied()
        .chain(std::iter::once(TARGET_NAME))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_are_a_bijection() {
        let ids: Vec<_> = FeatureId::all().collect();
        assert_eq!(ids.len(), NUM_FEATURES);
        for (i, id) in ids.iter().enumerate() {
            assert_eq!(id.index(), i);
            assert_eq!(FeatureId::from_name(id.name()), Some(*id));
        }
        assert_eq!(FeatureId::new(26), None);
    }

    #[test]
    fn category_partition() {
        let sizes: Vec<_> = Category::ALL.iter().map(|c| c.features().len()).collect();
        assert_eq!(sizes, vec![8, 12, 1, 5]);
        assert_eq!(FeatureId::LNG.category(), Category::Property);
        assert_eq!(FeatureId::new(8).unwrap().category(), Category::Amenity);
        assert_eq!(FeatureId::TRF_V.category(), Category::Traffic);
        assert_eq!(FeatureId::new(21).unwrap().category(), Category::Emotions);
    }

    #[test]
    fn header_is_bit_exact() {
        assert_eq!(
            csv_header().join(","),
            "Year,Elvt,RmNum,HllNum,KchNum,BthNum,Lat,Lng,TspNum,TspDst,AtrNum,AtrDst,EdcNum,\
             EdcDst,HthNum,HthDst,RstNum,RstDst,RtlNum,RtlDst,TrfV,AgrPct,DstPct,HppPct,SadPct,\
             FeaPct,Price"
        );
    }
}
