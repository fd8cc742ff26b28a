//! Derivation of the amenity, traffic and emotion feature groups from raw
//! auxiliary sources (POI lists, traffic speed samples, emotion tallies).

use std::collections::HashMap;
use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::dataset::{parse_cell, Dataset, PropertyRecord};
use crate::error::{Error, Result};
use crate::schema::{FeatureId, NUM_FEATURES, TARGET_NAME};

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;
pub const SEARCH_RADIUS_M: f64 = 1000.0;
/// Mean distance reported for a category with no POI inside the radius.
pub const EMPTY_CATEGORY_DISTANCE: f64 = SEARCH_RADIUS_M;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    lat: f64,
    lng: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lng: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lng) {
            return Err(Error::InvalidParameter(format!(
                "coordinates out of range: ({lat}, {lng})"
            )));
        }
        Ok(GeoPoint { lat, lng })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lng(&self) -> f64 {
        self.lng
    }
}

/// Great-circle distance in meters on a sphere of radius [`EARTH_RADIUS_M`].
pub fn haversine_m(a: GeoPoint, b: GeoPoint) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lng - a.lng).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PoiCategory {
    Transportation,
    Attraction,
    Education,
    Healthcare,
    Restaurant,
    Retail,
}

impl PoiCategory {
    /// In feature order (TspNum/TspDst first, RtlNum/RtlDst last).
    pub const ALL: [PoiCategory; 6] = [
        PoiCategory::Transportation,
        PoiCategory::Attraction,
        PoiCategory::Education,
        PoiCategory::Healthcare,
        PoiCategory::Restaurant,
        PoiCategory::Retail,
    ];

    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            PoiCategory::Transportation => "Transportation",
            PoiCategory::Attraction => "Attraction",
            PoiCategory::Education => "Education",
            PoiCategory::Healthcare => "Healthcare",
            PoiCategory::Restaurant => "Restaurant",
            PoiCategory::Retail => "Retail",
        }
    }
}

impl FromStr for PoiCategory {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        PoiCategory::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown POI category `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoiRecord {
    pub location: GeoPoint,
    pub category: PoiCategory,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficSample {
    pub location: GeoPoint,
    /// Minutes since local midnight.
    pub minute: u32,
    /// km/h
    pub speed: f64,
}

/// Daily window `[start, end)` in minutes since midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrafficWindow {
    pub start_minute: u32,
    pub end_minute: u32,
}

impl Default for TrafficWindow {
    /// 06:00 to 24:00.
    fn default() -> Self {
        TrafficWindow {
            start_minute: 6 * 60,
            end_minute: 24 * 60,
        }
    }
}

impl TrafficWindow {
    pub fn contains(&self, minute: u32) -> bool {
        (self.start_minute..self.end_minute).contains(&minute)
    }
}

/// Counts of posts per emotion: anger, detest, happiness, sadness, fear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EmotionTally {
    pub counts: [u64; 5],
}

/// Anything that can be placed on the map.
pub trait Located {
    fn location(&self) -> GeoPoint;
}

impl Located for PoiRecord {
    fn location(&self) -> GeoPoint {
        self.location
    }
}

impl Located for TrafficSample {
    fn location(&self) -> GeoPoint {
        self.location
    }
}

/// Uniform lat/lng grid over a point set. Queries return candidate indices
/// in ascending order, so downstream sums match a flat scan bit for bit.
#[derive(Debug, Clone)]
pub struct GridIndex {
    cell_deg: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
    len: usize,
}

impl GridIndex {
    pub fn build<T: Located>(items: &[T]) -> Self {
        let cell_deg = 0.01;
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, item) in items.iter().enumerate() {
            let p = item.location();
            cells
                .entry(Self::key(cell_deg, p.lat, p.lng))
                .or_default()
                .push(i);
        }
        GridIndex {
            cell_deg,
            cells,
            len: items.len(),
        }
    }

    fn key(cell_deg: f64, lat: f64, lng: f64) -> (i64, i64) {
        (
            (lat / cell_deg).floor() as i64,
            (lng / cell_deg).floor() as i64,
        )
    }

    /// Superset of the indices within `radius_m` of `center`, sorted.
    pub fn candidates(&self, center: GeoPoint, radius_m: f64) -> Vec<usize> {
        let angular = radius_m / EARTH_RADIUS_M;
        let dlat = angular.to_degrees() * 1.01;
        let cos_lat = center.lat.to_radians().cos();
        let lng_ratio = angular.sin() / cos_lat;
        let near_pole = center.lat.abs() + dlat >= 90.0 || lng_ratio.is_nan() || lng_ratio >= 1.0;
        let dlng = if near_pole {
            f64::INFINITY
        } else {
            lng_ratio.asin().to_degrees() * 1.01
        };
        if near_pole || center.lng - dlng < -180.0 || center.lng + dlng > 180.0 {
            return (0..self.len).collect();
        }
        let (lo_lat, lo_lng) = Self::key(self.cell_deg, center.lat - dlat, center.lng - dlng);
        let (hi_lat, hi_lng) = Self::key(self.cell_deg, center.lat + dlat, center.lng + dlng);
        let mut out = Vec::new();
        for a in lo_lat..=hi_lat {
            for b in lo_lng..=hi_lng {
                if let Some(v) = self.cells.get(&(a, b)) {
                    out.extend_from_slice(v);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Strategy for finding the points near a location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Lookup {
    FlatScan,
    #[default]
    Grid,
}

/// Count and mean distance per POI category, laid out as features 8..=19.
pub fn amenity_features(home: GeoPoint, pois: &[PoiRecord]) -> [f64; 12] {
    aggregate_amenities(home, pois, 0..pois.len())
}

/// Same as [`amenity_features`] but only inspects the grid candidates.
pub fn amenity_features_indexed(
    home: GeoPoint,
    pois: &[PoiRecord],
    index: &GridIndex,
) -> [f64; 12] {
    aggregate_amenities(
        home,
        pois,
        index.candidates(home, SEARCH_RADIUS_M).into_iter(),
    )
}

fn aggregate_amenities(
    home: GeoPoint,
    pois: &[PoiRecord],
    candidates: impl Iterator<Item = usize>,
) -> [f64; 12] {
    let mut counts = [0usize; 6];
    let mut sums = [0.0f64; 6];
    for i in candidates {
        let poi = &pois[i];
        let d = haversine_m(home, poi.location);
        if d <= SEARCH_RADIUS_M {
            let s = poi.category.slot();
            counts[s] += 1;
            sums[s] += d;
        }
    }
    let mut out = [0.0; 12];
    for s in 0..6 {
        out[2 * s] = counts[s] as f64;
        out[2 * s + 1] = if counts[s] == 0 {
            EMPTY_CATEGORY_DISTANCE
        } else {
            (sums[s] / counts[s] as f64).min(SEARCH_RADIUS_M)
        };
    }
    out
}

/// Mean speed (km/h) of the samples falling inside `window`.
pub fn traffic_feature(samples: &[TrafficSample], window: TrafficWindow) -> Result<f64> {
    let mut n = 0usize;
    let mut sum = 0.0;
    for s in samples.iter().filter(|s| window.contains(s.minute)) {
        n += 1;
        sum += s.speed;
    }
    if n == 0 {
        return Err(Error::NoSamples);
    }
    Ok(sum / n as f64)
}

/// Share of each emotion in percent; all zeros when nothing was posted.
pub fn emotion_features(tally: &EmotionTally) -> [f64; 5] {
    let total: u64 = tally.counts.iter().sum();
    if total == 0 {
        return [0.0; 5];
    }
    tally.counts.map(|c| 100.0 * c as f64 / total as f64)
}

/// Property-only input: features 0..=7 plus the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyBase {
    pub features: [f64; 8],
    pub price: f64,
}

impl PropertyBase {
    pub fn location(&self) -> Result<GeoPoint> {
        GeoPoint::new(self.features[6], self.features[7])
    }
}

/// Raw auxiliary sources for a batch of properties.
#[derive(Debug, Clone, Default)]
pub struct RawSources {
    pub pois: Vec<PoiRecord>,
    pub traffic: Vec<TrafficSample>,
    /// Indexed by 0-based property row.
    pub emotions: HashMap<usize, EmotionTally>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeriveOptions {
    pub window: TrafficWindow,
    pub lookup: Lookup,
}

/// Derives the full 26-feature record for every property. Traffic samples
/// attach to a property when they lie within the search radius.
pub fn derive_records(
    properties: &[PropertyBase],
    sources: &RawSources,
    options: DeriveOptions,
) -> Result<Vec<PropertyRecord>> {
    let poi_index = GridIndex::build(&sources.pois);
    let traffic_index = GridIndex::build(&sources.traffic);
    properties
        .par_iter()
        .enumerate()
        .map(|(row, base)| {
            let located = |e: Error| Error::InvariantViolation {
                row: row + 1,
                message: e.to_string(),
            };
            let home = base.location().map_err(located)?;
            let amenities = match options.lookup {
                Lookup::FlatScan => amenity_features(home, &sources.pois),
                Lookup::Grid => amenity_features_indexed(home, &sources.pois, &poi_index),
            };
            let candidates: Vec<usize> = match options.lookup {
                Lookup::FlatScan => (0..sources.traffic.len()).collect(),
                Lookup::Grid => traffic_index.candidates(home, SEARCH_RADIUS_M),
            };
            let nearby: Vec<TrafficSample> = candidates
                .into_iter()
                .map(|i| sources.traffic[i])
                .filter(|s| haversine_m(home, s.location) <= SEARCH_RADIUS_M)
                .collect();
            let speed = traffic_feature(&nearby, options.window).map_err(located)?;
            let tally = sources.emotions.get(&row).copied().unwrap_or_default();
            let emotions = emotion_features(&tally);

            let mut features = [0.0; NUM_FEATURES];
            features[..8].copy_from_slice(&base.features);
            features[8..20].copy_from_slice(&amenities);
            features[20] = speed;
            features[21..].copy_from_slice(&emotions);
            Ok(PropertyRecord::new(features, base.price))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

pub fn derive_dataset(
    properties: &[PropertyBase],
    sources: &RawSources,
    options: DeriveOptions,
    provenance: impl Into<String>,
) -> Result<Dataset> {
    Dataset::new(derive_records(properties, sources, options)?, provenance)
}

#[derive(Deserialize)]
struct PoiRow {
    lat: f64,
    lng: f64,
    category: String,
}

#[derive(Deserialize)]
struct TrafficRow {
    lat: f64,
    lng: f64,
    minute: u32,
    speed: f64,
}

#[derive(Deserialize)]
struct EmotionRow {
    property_row: usize,
    anger: u64,
    detest: u64,
    happiness: u64,
    sadness: u64,
    fear: u64,
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<(usize, T)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    rdr.deserialize()
        .enumerate()
        .map(|(i, r)| {
            r.map(|v| (i + 1, v)).map_err(|e| Error::ParseError {
                row: i + 1,
                column: path.display().to_string(),
                message: e.to_string(),
            })
        })
        .collect()
}

fn at_row(path: &Path, row: usize) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::ParseError {
        row,
        column: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Reads `pois.csv` (`lat,lng,category`).
pub fn read_pois(path: &Path) -> Result<Vec<PoiRecord>> {
    read_rows::<PoiRow>(path)?
        .into_iter()
        .map(|(row, r)| {
            let location = GeoPoint::new(r.lat, r.lng).map_err(at_row(path, row))?;
            let category = r
                .category
                .parse()
                .map_err(|m| at_row(path, row)(Error::InvalidParameter(m)))?;
            Ok(PoiRecord { location, category })
        })
        .collect()
}

/// Reads `traffic.csv` (`lat,lng,minute,speed`).
pub fn read_traffic(path: &Path) -> Result<Vec<TrafficSample>> {
    read_rows::<TrafficRow>(path)?
        .into_iter()
        .map(|(row, r)| {
            let location = GeoPoint::new(r.lat, r.lng).map_err(at_row(path, row))?;
            if !(r.speed.is_finite() && r.speed >= 0.0) {
                return Err(at_row(path, row)(Error::InvalidParameter(format!(
                    "speed must be >= 0, got {}",
                    r.speed
                ))));
            }
            if r.minute >= 24 * 60 {
                return Err(at_row(path, row)(Error::InvalidParameter(format!(
                    "minute must be < 1440, got {}",
                    r.minute
                ))));
            }
            Ok(TrafficSample {
                location,
                minute: r.minute,
                speed: r.speed,
            })
        })
        .collect()
}

/// Reads `emotions.csv`; repeated rows for one property are summed.
pub fn read_emotions(path: &Path) -> Result<HashMap<usize, EmotionTally>> {
    let mut out: HashMap<usize, EmotionTally> = HashMap::new();
    for (_, r) in read_rows::<EmotionRow>(path)? {
        let t = out.entry(r.property_row).or_default();
        for (slot, c) in [r.anger, r.detest, r.happiness, r.sadness, r.fear]
            .into_iter()
            .enumerate()
        {
            t.counts[slot] += c;
        }
    }
    Ok(out)
}

/// Header of the property-only input file.
pub fn property_header() -> Vec<&'static str> {
    FeatureId::all()
        .take(8)
        .map(FeatureId::name)
        .chain(std::iter::once(TARGET_NAME))
        .collect()
}

/// Reads a property-only CSV (`Year,...,Lng,Price`).
pub fn read_properties(path: &Path) -> Result<Vec<PropertyBase>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let expected = property_header();
    let headers = rdr.headers().map_err(|e| Error::format(path, e))?.clone();
    for (position, name) in expected.iter().enumerate() {
        let found = headers.get(position).unwrap_or("");
        if found != *name {
            return Err(Error::MissingColumn {
                position,
                expected: (*name).to_string(),
                found: found.to_string(),
            });
        }
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::ParseError {
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        if rec.len() != expected.len() {
            return Err(Error::ParseError {
                row,
                column: String::new(),
                message: format!("expected {} fields, found {}", expected.len(), rec.len()),
            });
        }
        let mut values = [0.0; 9];
        for (j, cell) in rec.iter().enumerate() {
            values[j] = parse_cell(cell).map_err(|message| Error::ParseError {
                row,
                column: expected[j].to_string(),
                message,
            })?;
        }
        let mut features = [0.0; 8];
        features.copy_from_slice(&values[..8]);
        out.push(PropertyBase {
            features,
            price: values[8],
        });
    }
    if out.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(lat: f64, lng: f64) -> GeoPoint {
        GeoPoint::new(lat, lng).unwrap()
    }

    /// Point `d` meters due north of `p`.
    fn north_of(p: GeoPoint, d: f64) -> GeoPoint {
        pt(p.lat + (d / EARTH_RADIUS_M).to_degrees(), p.lng)
    }

    fn cosine_law(a: GeoPoint, b: GeoPoint) -> f64 {
        let (p1, p2) = (a.lat.to_radians(), b.lat.to_radians());
        let dl = (b.lng - a.lng).to_radians();
        let c = p1.sin() * p2.sin() + p1.cos() * p2.cos() * dl.cos();
        EARTH_RADIUS_M * c.clamp(-1.0, 1.0).acos()
    }

    #[test]
    fn haversine_identity_and_degree() {
        assert_eq!(haversine_m(pt(39.9, 116.4), pt(39.9, 116.4)), 0.0);
        let d = haversine_m(pt(39.0, 116.0), pt(40.0, 116.0));
        let arc = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
        assert!((d - arc).abs() < 1e-6);
        assert!((d - cosine_law(pt(39.0, 116.0), pt(40.0, 116.0))).abs() < 1e-3);
        assert!((d - 111_195.0).abs() < 1.0);
    }

    #[test]
    fn haversine_symmetric_and_triangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut rand_pt = || pt(rng.gen_range(-89.0..89.0), rng.gen_range(-179.0..179.0));
        for _ in 0..100 {
            let (a, b, c) = (rand_pt(), rand_pt(), rand_pt());
            assert_eq!(haversine_m(a, b), haversine_m(b, a));
            let (ab, bc, ac) = (haversine_m(a, b), haversine_m(b, c), haversine_m(a, c));
            assert!(ac <= (ab + bc) * (1.0 + 1e-6));
            assert!(haversine_m(a, b) > 0.0);
        }
    }

    #[test]
    fn three_restaurants() {
        let home = pt(39.9, 116.4);
        let pois: Vec<_> = [100.0, 200.0, 300.0]
            .iter()
            .map(|&d| PoiRecord {
                location: north_of(home, d),
                category: PoiCategory::Restaurant,
            })
            .collect();
        let f = amenity_features(home, &pois);
        assert_eq!(f[8], 3.0);
        assert!((f[9] - 200.0).abs() < 1e-6);
        for s in [0, 1, 2, 3, 5] {
            assert_eq!(f[2 * s], 0.0);
            assert_eq!(f[2 * s + 1], EMPTY_CATEGORY_DISTANCE);
        }
    }

    #[test]
    fn radius_is_inclusive() {
        let home = pt(10.0, 10.0);
        let far = PoiRecord {
            location: north_of(home, 1500.0),
            category: PoiCategory::Retail,
        };
        let f = amenity_features(home, &[far]);
        assert_eq!(f[10], 0.0);
        assert_eq!(f[11], 1000.0);
    }

    fn random_field(seed: u64, n: usize) -> (GeoPoint, Vec<PoiRecord>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let home = pt(39.9, 116.4);
        let pois = (0..n)
            .map(|_| PoiRecord {
                location: pt(
                    39.9 + rng.gen_range(-0.02..0.02),
                    116.4 + rng.gen_range(-0.02..0.02),
                ),
                category: PoiCategory::ALL[rng.gen_range(0..6)],
            })
            .collect();
        (home, pois)
    }

    #[test]
    fn matches_brute_force_oracle() {
        let (home, pois) = random_field(3, 500);
        let got = amenity_features(home, &pois);
        for cat in PoiCategory::ALL {
            let ds: Vec<f64> = pois
                .iter()
                .filter(|p| p.category == cat)
                .map(|p| cosine_law(home, p.location))
                .filter(|&d| d <= 1000.0)
                .collect();
            let s = cat.slot();
            assert_eq!(got[2 * s], ds.len() as f64);
            if !ds.is_empty() {
                let mean = ds.iter().sum::<f64>() / ds.len() as f64;
                assert!((got[2 * s + 1] - mean).abs() < 1e-2);
            }
        }
        let index = GridIndex::build(&pois);
        assert_eq!(amenity_features_indexed(home, &pois, &index), got);
    }

    #[test]
    fn grid_agrees_near_antimeridian_and_pole() {
        for (lat, lng) in [(0.0, 179.999), (89.995, 0.0), (-45.0, -179.995)] {
            let home = pt(lat, lng);
            let pois: Vec<_> = (0..40)
                .map(|i| PoiRecord {
                    location: pt(
                        (lat + (i as f64 - 20.0) * 0.0005).clamp(-90.0, 90.0),
                        (lng + (i as f64 - 20.0) * 0.0003).clamp(-180.0, 180.0),
                    ),
                    category: PoiCategory::ALL[i % 6],
                })
                .collect();
            let index = GridIndex::build(&pois);
            assert_eq!(
                amenity_features_indexed(home, &pois, &index),
                amenity_features(home, &pois)
            );
        }
    }

    #[test]
    fn traffic_means() {
        let loc = pt(0.0, 0.0);
        let mk = |speed: f64, minute: u32| TrafficSample {
            location: loc,
            minute,
            speed,
        };
        let w = TrafficWindow::default();
        let s: Vec<_> = [30.0, 40.0, 50.0].iter().map(|&v| mk(v, 600)).collect();
        assert_eq!(traffic_feature(&s, w).unwrap(), 40.0);
        assert_eq!(traffic_feature(&[mk(55.0, 400)], w).unwrap(), 55.0);
        assert!(matches!(
            traffic_feature(&[mk(55.0, 100)], w),
            Err(Error::NoSamples)
        ));
        assert!(matches!(traffic_feature(&[], w), Err(Error::NoSamples)));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let day: Vec<_> = (0..216)
            .map(|i| mk(rng.gen_range(5.0..80.0), 360 + 5 * i))
            .collect();
        let oracle = day.iter().map(|s| s.speed).sum::<f64>() / 216.0;
        assert!((traffic_feature(&day, w).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn emotion_percentages() {
        let f = |c: [u64; 5]| emotion_features(&EmotionTally { counts: c });
        assert_eq!(f([1, 1, 2, 0, 0]), [25.0, 25.0, 50.0, 0.0, 0.0]);
        assert_eq!(f([0; 5]), [0.0; 5]);
        assert_eq!(f([3, 1, 4, 1, 1]), [30.0, 10.0, 40.0, 10.0, 10.0]);
    }

    proptest! {
        #[test]
        fn emotions_sum_to_hundred(c in proptest::array::uniform5(0u64..10_000)) {
            let total: f64 = emotion_features(&EmotionTally { counts: c }).iter().sum();
            if c.iter().sum::<u64>() == 0 {
                prop_assert_eq!(total, 0.0);
            } else {
                prop_assert!((total - 100.0).abs() < 1e-12);
            }
        }

        #[test]
        fn amenities_permutation_invariant(seed in 0u64..1000, rot in 0usize..200) {
            let (home, mut pois) = random_field(seed, 200);
            let a = amenity_features(home, &pois);
            pois.rotate_left(rot);
            pois.reverse();
            let b = amenity_features(home, &pois);
            for s in 0..6 {
                prop_assert_eq!(a[2 * s], b[2 * s]);
                prop_assert!((a[2 * s + 1] - b[2 * s + 1]).abs() < 1e-9);
                prop_assert!((0.0..=1000.0).contains(&b[2 * s + 1]));
            }
        }
    }
}
