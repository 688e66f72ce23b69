//! Phone-to-viseme mapping over the 14-symbol viseme alphabet.

use std::collections::HashMap;

use super::{parse_err, AlignError};

/// The label used for frames and phones with no visible speech gesture.
pub const SILENCE_VISEME: &str = "sil";

/// The viseme alphabet, one symbol per visually distinct mouth shape.
pub const VISEME_ALPHABET: [&str; 14] =
    ["@", "a", "E", "f", "i", "k", "O", "p", "r", "s", "S", "t", "T", "u"];

const DEFAULT_TSV: &str = include_str!("default_visemes.tsv");

/// A total mapping from bare phone labels (stress digits stripped) to
/// viseme symbols.
#[derive(Debug, Clone)]
pub struct VisemeMap {
    table: HashMap<String, String>,
}

impl VisemeMap {
    /// The built-in ARPAbet table. Bilabials map to `p`, labiodentals to
    /// `f`, and so on across the 14 symbols, with aligner silence labels
    /// mapped to `sil`.
    pub fn default_map() -> Self {
        VisemeMap::parse_tsv(DEFAULT_TSV).expect("built-in viseme table is valid")
    }

    /// Parses a `phone \t viseme` table. Lines starting with `#` and blank
    /// lines are skipped.
    pub fn parse_tsv(text: &str) -> Result<Self, AlignError> {
        let mut table = HashMap::new();
        for (zero_line, raw) in text.lines().enumerate() {
            let line_no = zero_line + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let (phone, viseme) = match (fields.next(), fields.next()) {
                (Some(p), Some(v)) if !p.trim().is_empty() && !v.trim().is_empty() => {
                    (p.trim().to_string(), v.trim().to_string())
                }
                _ => return Err(parse_err(line_no, "expected `phone<TAB>viseme`")),
            };
            if viseme != SILENCE_VISEME && !VISEME_ALPHABET.contains(&viseme.as_str()) {
                return Err(AlignError::BadVisemeLabel(viseme));
            }
            table.insert(phone, viseme);
        }
        Ok(VisemeMap { table })
    }

    /// Looks up the viseme for a phone, stripping stress digits first.
    pub fn viseme_for(&self, phone: &str) -> Result<&str, AlignError> {
        let bare = strip_stress(phone);
        self.table
            .get(bare)
            .map(String::as_str)
            .ok_or_else(|| AlignError::UnmappedPhone(bare.to_string()))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Drops trailing ARPAbet stress digits: `IH1` -> `IH`.
pub fn strip_stress(phone: &str) -> &str {
    phone.trim_end_matches(|c: char| c.is_ascii_digit())
}

/// Maps a phone sequence elementwise to visemes. Consecutive identical
/// visemes are kept separate so timing structure survives.
pub fn phones_to_visemes(phones: &[String], map: &VisemeMap) -> Result<Vec<String>, AlignError> {
    phones.iter().map(|p| map.viseme_for(p).map(str::to_string)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(phones: &[&str]) -> Vec<String> {
        phones.iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn million_and_billion_share_a_viseme_string() {
        let map = VisemeMap::default_map();
        let million = phones_to_visemes(&seq(&["M", "IH1", "L", "Y", "AH0", "N"]), &map).unwrap();
        let billion = phones_to_visemes(&seq(&["B", "IH1", "L", "Y", "AH0", "N"]), &map).unwrap();
        assert_eq!(million, billion);
        assert_eq!(million[0], "p");
    }

    #[test]
    fn probably_possibly_share_a_run_starting_at_schwa() {
        let map = VisemeMap::default_map();
        let probably =
            phones_to_visemes(&seq(&["P", "R", "AA1", "B", "AH0", "B", "L", "IY0"]), &map).unwrap();
        let possibly =
            phones_to_visemes(&seq(&["P", "AA1", "S", "AH0", "B", "L", "IY0"]), &map).unwrap();
        // The "ebli" stretch (AH B L IY) maps identically in both words and
        // begins with "@".
        assert_eq!(probably[4..8], possibly[3..7]);
        assert_eq!(probably[4], "@");
    }

    #[test]
    fn empty_sequence_maps_to_empty() {
        let map = VisemeMap::default_map();
        assert!(phones_to_visemes(&[], &map).unwrap().is_empty());
    }

    #[test]
    fn mapping_preserves_length_without_merging() {
        let map = VisemeMap::default_map();
        let out = phones_to_visemes(&seq(&["P", "B", "M"]), &map).unwrap();
        assert_eq!(out, vec!["p", "p", "p"]);
    }

    #[test]
    fn unmapped_phone_is_named_in_the_error() {
        let map = VisemeMap::default_map();
        match phones_to_visemes(&seq(&["QQ"]), &map) {
            Err(AlignError::UnmappedPhone(p)) => assert_eq!(p, "QQ"),
            other => panic!("expected UnmappedPhone, got {other:?}"),
        }
    }

    #[test]
    fn stress_digits_are_stripped() {
        let map = VisemeMap::default_map();
        assert_eq!(map.viseme_for("AH0").unwrap(), "@");
        assert_eq!(map.viseme_for("AH1").unwrap(), "@");
        assert_eq!(map.viseme_for("AH").unwrap(), "@");
    }

    #[test]
    fn default_map_covers_the_full_alphabet() {
        let map = VisemeMap::default_map();
        let mut seen: Vec<&str> = Vec::new();
        for phone in ["AA", "AE", "AH", "AO", "B", "CH", "D", "ER", "F", "IY", "K", "S", "TH", "UW"]
        {
            seen.push(map.viseme_for(phone).unwrap());
        }
        for viseme in VISEME_ALPHABET {
            assert!(seen.contains(&viseme), "alphabet symbol {viseme} unused");
        }
    }

    #[test]
    fn custom_tsv_overrides_and_bad_labels_are_rejected() {
        let map = VisemeMap::parse_tsv("M\tf\n").unwrap();
        assert_eq!(map.viseme_for("M").unwrap(), "f");
        assert!(matches!(
            VisemeMap::parse_tsv("M\tzz\n"),
            Err(AlignError::BadVisemeLabel(_))
        ));
        assert!(VisemeMap::parse_tsv("M f\n").is_err());
    }
}
