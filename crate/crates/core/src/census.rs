//! The 16 isomorphism classes of directed triads and the census vector.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Triad isomorphism class, numbered 1..=16 in M-A-N order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum TriadClass {
    T003 = 1,
    T012,
    T102,
    T021D,
    T021U,
    T021C,
    T111D,
    T111U,
    T030T,
    T030C,
    T201,
    T120D,
    T120U,
    T120C,
    T210,
    T300,
}

impl TriadClass {
    pub const ALL: [TriadClass; 16] = [
        TriadClass::T003,
        TriadClass::T012,
        TriadClass::T102,
        TriadClass::T021D,
        TriadClass::T021U,
        TriadClass::T021C,
        TriadClass::T111D,
        TriadClass::T111U,
        TriadClass::T030T,
        TriadClass::T030C,
        TriadClass::T201,
        TriadClass::T120D,
        TriadClass::T120U,
        TriadClass::T120C,
        TriadClass::T210,
        TriadClass::T300,
    ];

    pub const LABELS: [&'static str; 16] = [
        "003", "012", "102", "021D", "021U", "021C", "111D", "111U", "030T", "030C", "201", "120D",
        "120U", "120C", "210", "300",
    ];

    /// 1-based M-A-N index.
    #[inline]
    pub fn index(self) -> u8 {
        self as u8
    }

    /// 0-based slot in a census array.
    #[inline]
    pub fn slot(self) -> usize {
        self as usize - 1
    }

    pub fn from_index(index: u8) -> Option<TriadClass> {
        (1..=16)
            .contains(&index)
            .then(|| TriadClass::ALL[index as usize - 1])
    }

    pub fn label(self) -> &'static str {
        TriadClass::LABELS[self.slot()]
    }
}

impl fmt::Display for TriadClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TriadClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TriadClass::LABELS
            .iter()
            .position(|l| l.eq_ignore_ascii_case(s))
            .map(|i| TriadClass::ALL[i])
            .ok_or_else(|| format!("unknown triad class {s:?}"))
    }
}

/// `n(n-1)(n-2)/6`, the number of node triples.
pub fn total_triads(n: u64) -> u128 {
    let n = n as u128;
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Triad counts for a graph of `n` nodes, indexed by [`TriadClass`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriadCensus {
    pub n: u64,
    pub counts: [u128; 16],
}

impl TriadCensus {
    pub fn empty(n: u64) -> TriadCensus {
        TriadCensus { n, counts: [0; 16] }
    }

    #[inline]
    pub fn get(&self, class: TriadClass) -> u128 {
        self.counts[class.slot()]
    }

    pub fn set(&mut self, class: TriadClass, count: u128) {
        self.counts[class.slot()] = count;
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().sum()
    }

    /// Sum of every class except 003.
    pub fn connected_total(&self) -> u128 {
        self.counts[1..].iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TriadClass, u128)> + '_ {
        TriadClass::ALL.iter().map(move |&c| (c, self.get(c)))
    }

    /// Hex SHA-256 prefix over `n` and the counts; equal censuses share a checksum.
    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.n.to_le_bytes());
        for c in &self.counts {
            h.update(c.to_le_bytes());
        }
        h.finalize()[..16]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("census serialization is infallible")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("census serialization is infallible")
    }

    pub fn from_json(s: &str) -> serde_json::Result<TriadCensus> {
        serde_json::from_str(s)
    }

    /// `label,count` rows under a header, in M-A-N order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,count\n");
        for (c, v) in self.iter() {
            out.push_str(&format!("{},{}\n", c.label(), v));
        }
        out
    }

    /// First class where the two censuses disagree.
    pub fn first_difference(&self, other: &TriadCensus) -> Option<TriadClass> {
        TriadClass::ALL
            .iter()
            .copied()
            .find(|&c| self.get(c) != other.get(c))
    }
}

struct Counts<'a>(&'a [u128; 16]);

impl Serialize for Counts<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(16))?;
        for (label, count) in TriadClass::LABELS.iter().zip(self.0) {
            map.serialize_entry(label, count)?;
        }
        map.end()
    }
}

impl Serialize for TriadCensus {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("TriadCensus", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("counts", &Counts(&self.counts))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for TriadCensus {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: u64,
            counts: std::collections::BTreeMap<String, u128>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let mut census = TriadCensus::empty(raw.n);
        for (label, count) in raw.counts {
            let class = label.parse::<TriadClass>().map_err(de::Error::custom)?;
            census.set(class, count);
        }
        Ok(census)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals() {
        assert_eq!(total_triads(0), 0);
        assert_eq!(total_triads(2), 0);
        assert_eq!(total_triads(3), 1);
        assert_eq!(total_triads(10), 120);
        // beyond u64 for the null class at web scale
        let big = total_triads(105_200_000);
        assert!(big > u64::MAX as u128);
        assert_eq!(big, 105_200_000u128 * 105_199_999 * 105_199_998 / 6);
    }

    #[test]
    fn class_indices_and_labels() {
        assert_eq!(TriadClass::T003.index(), 1);
        assert_eq!(TriadClass::T102.index(), 3);
        assert_eq!(TriadClass::T300.index(), 16);
        for (i, c) in TriadClass::ALL.iter().enumerate() {
            assert_eq!(c.slot(), i);
            assert_eq!(TriadClass::from_index(c.index()), Some(*c));
            assert_eq!(c.label().parse::<TriadClass>(), Ok(*c));
        }
        assert_eq!(TriadClass::from_index(0), None);
        assert_eq!(TriadClass::from_index(17), None);
    }

    #[test]
    fn json_layout_and_round_trip() {
        let mut c = TriadCensus::empty(10);
        c.set(TriadClass::T003, 112);
        c.set(TriadClass::T012, 8);
        let json = c.to_json();
        assert!(json.starts_with(r#"{"n":10,"counts":{"003":112,"012":8,"102":0,"021D":0"#), "{json}");
        assert!(json.ends_with(r#""210":0,"300":0}}"#), "{json}");
        assert_eq!(TriadCensus::from_json(&json).unwrap(), c);

        let mut wide = TriadCensus::empty(u64::MAX);
        wide.set(TriadClass::T003, u128::MAX - 1);
        assert_eq!(TriadCensus::from_json(&wide.to_json()).unwrap(), wide);
    }

    #[test]
    fn csv_layout() {
        let mut c = TriadCensus::empty(4);
        c.set(TriadClass::T012, 3);
        c.set(TriadClass::T030C, 1);
        let csv = c.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 17);
        assert_eq!(lines[0], "label,count");
        assert_eq!(lines[2], "012,3");
        assert_eq!(lines[10], "030C,1");
    }

    #[test]
    fn checksum_tracks_content() {
        let a = TriadCensus::empty(5);
        let mut b = a.clone();
        assert_eq!(a.checksum(), b.checksum());
        assert_eq!(a.checksum().len(), 32);
        b.set(TriadClass::T300, 1);
        assert_ne!(a.checksum(), b.checksum());
        assert_eq!(a.first_difference(&b), Some(TriadClass::T300));
    }
}
