use std::collections::HashSet;
use std::io::{self, BufRead};
use std::path::Path;

const DEFAULT_EN: &str = include_str!("stopwords_en.txt");

/// Parses a stoplist: one word per line, `#` starts a comment line, blank
/// lines ignored, entries lowercased.
pub fn parse_stoplist(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn default_stoplist() -> HashSet<String> {
    parse_stoplist(DEFAULT_EN)
}

pub fn read_stoplist(path: &Path) -> io::Result<HashSet<String>> {
    let file = std::fs::File::open(path)?;
    let mut text = String::new();
    for line in io::BufReader::new(file).lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    Ok(parse_stoplist(&text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blanks_skipped() {
        let s = parse_stoplist("# header\nThe\n\n  of \n#x\n");
        assert_eq!(s.len(), 2);
        assert!(s.contains("the") && s.contains("of"));
    }

    #[test]
    fn default_list_is_lowercase() {
        let s = default_stoplist();
        assert!(s.contains("the"));
        assert!(!s.contains("monkey"));
        assert!(s.iter().all(|w| w.chars().all(|c| c.is_ascii_lowercase())));
    }
}
