//! Location-tagged, pre-tokenized document collections.
//!
//! The on-disk format is one document per line:
//!
//! ```text
//! <location_name>\t<doc_id>\t<token> <token> ...
//! ```
//!
//! Blank lines are ignored. Tokens never contain whitespace. Ingestion sorts
//! locations and vocabulary lexicographically and documents by
//! `(location, doc_id)`, so that ingesting the canonical form of a corpus
//! reproduces it exactly.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Documents with fewer tokens than this are dropped on ingestion by default.
pub const DEFAULT_MIN_TOKENS: usize = 3;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Builds a vocabulary from words; duplicates are collapsed and ids are
    /// assigned in lexicographic order.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let sorted: BTreeSet<String> = words.into_iter().map(Into::into).collect();
        let words: Vec<String> = sorted.into_iter().collect();
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        Self { words, index }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Hex SHA-256 over the newline-joined word list; identifies a vocabulary
    /// in model artifacts.
    pub fn fingerprint(&self) -> String {
        fingerprint_words(&self.words)
    }
}

pub fn fingerprint_words(words: &[String]) -> String {
    let mut hasher = Sha256::new();
    for w in words {
        hasher.update(w.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub location: usize,
    pub tokens: Vec<u32>,
}

impl Document {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// One parsed line of a corpus file, before vocabulary indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub location: String,
    pub doc_id: String,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub lines: usize,
    pub dropped_documents: usize,
    pub dropped_tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    vocabulary: Vocabulary,
    documents: Vec<Document>,
    location_names: Vec<String>,
}

/// Parses corpus lines. Line numbers in errors are 1-based.
pub fn parse_records<R: BufRead>(reader: R) -> Result<Vec<Record>> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::MalformedLine { line: line_no, reason: e.to_string() })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_line(line).map_err(|reason| Error::MalformedLine { line: line_no, reason })?);
    }
    Ok(records)
}

fn parse_line(line: &str) -> std::result::Result<Record, String> {
    let mut fields = line.split('\t');
    let (Some(location), Some(doc_id), Some(text), None) = (fields.next(), fields.next(), fields.next(), fields.next())
    else {
        return Err(format!("expected 3 tab-separated fields, found {}", line.split('\t').count()));
    };
    if location.is_empty() {
        return Err("empty location name".into());
    }
    if doc_id.is_empty() {
        return Err("empty document id".into());
    }
    let mut tokens = Vec::new();
    for tok in text.split(' ') {
        if tok.is_empty() {
            return Err("empty token (tokens are separated by single spaces)".into());
        }
        if tok.chars().any(char::is_whitespace) {
            return Err(format!("token {tok:?} contains whitespace"));
        }
        tokens.push(tok.to_string());
    }
    Ok(Record { location: location.to_string(), doc_id: doc_id.to_string(), tokens })
}

/// Reads and indexes a corpus file, dropping documents shorter than
/// `min_tokens`.
pub fn ingest(path: impl AsRef<Path>, min_tokens: usize) -> Result<Corpus> {
    ingest_with_stats(path, min_tokens).map(|(c, _)| c)
}

pub fn ingest_with_stats(path: impl AsRef<Path>, min_tokens: usize) -> Result<(Corpus, IngestStats)> {
    let records = read_records(path)?;
    Corpus::from_records(records, min_tokens)
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<Record>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_records(BufReader::new(file))
}

impl Corpus {
    pub fn from_records(records: Vec<Record>, min_tokens: usize) -> Result<(Self, IngestStats)> {
        let min_tokens = min_tokens.max(1);
        let mut stats = IngestStats { lines: records.len(), ..Default::default() };
        let mut kept = Vec::with_capacity(records.len());
        for r in records {
            if r.tokens.len() < min_tokens {
                stats.dropped_documents += 1;
                stats.dropped_tokens += r.tokens.len();
            } else {
                kept.push(r);
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptyCorpus { min_tokens });
        }

        let vocabulary = Vocabulary::from_words(kept.iter().flat_map(|r| r.tokens.iter().cloned()));
        let locations: BTreeMap<&str, usize> = kept
            .iter()
            .map(|r| r.location.as_str())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, name)| (name, i))
            .collect();
        let location_names: Vec<String> = locations.keys().map(|s| s.to_string()).collect();

        let mut documents: Vec<Document> = kept
            .iter()
            .map(|r| Document {
                doc_id: r.doc_id.clone(),
                location: locations[r.location.as_str()],
                tokens: r.tokens.iter().map(|t| vocabulary.id(t).expect("token indexed above")).collect(),
            })
            .collect();
        documents.sort_by(|a, b| (a.location, &a.doc_id).cmp(&(b.location, &b.doc_id)));

        Ok((Self { vocabulary, documents, location_names }, stats))
    }

    /// Builds a corpus over an existing vocabulary and location index without
    /// re-densifying anything. Used for held-out halves and synthetic data.
    pub fn from_parts(vocabulary: Vocabulary, location_names: Vec<String>, documents: Vec<Document>) -> Self {
        debug_assert!(documents.iter().all(|d| d.location < location_names.len()));
        debug_assert!(documents.iter().all(|d| d.tokens.iter().all(|&t| (t as usize) < vocabulary.len())));
        Self { vocabulary, documents, location_names }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn location_names(&self) -> &[String] {
        &self.location_names
    }

    pub fn num_locations(&self) -> usize {
        self.location_names.len()
    }

    pub fn num_words(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.documents.iter().map(Document::len).sum()
    }

    /// Writes the canonical line format: locations sorted by name, then
    /// documents by id.
    pub fn write_canonical<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut order: Vec<&Document> = self.documents.iter().collect();
        order.sort_by(|a, b| {
            (&self.location_names[a.location], &a.doc_id).cmp(&(&self.location_names[b.location], &b.doc_id))
        });
        for doc in order {
            write!(out, "{}\t{}\t", self.location_names[doc.location], doc.doc_id)?;
            for (i, &t) in doc.tokens.iter().enumerate() {
                if i > 0 {
                    out.write_all(b" ")?;
                }
                out.write_all(self.vocabulary.word(t).as_bytes())?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_canonical_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_canonical(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("corpus text is UTF-8")
    }

    /// Splits off a held-out set of documents.
    ///
    /// `round(held_out_fraction * D)` documents are held out, chosen in a
    /// seeded random order while never removing the last training document
    /// of a location. Both halves keep this corpus's vocabulary and location
    /// index, so the held-out half may leave locations empty.
    pub fn split(&self, held_out_fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
        if !(0.0..1.0).contains(&held_out_fraction) {
            return Err(Error::SplitTooLarge {
                requested: self.documents.len(),
                documents: self.documents.len(),
                locations: self.num_locations(),
            });
        }
        let n = self.documents.len();
        let requested = (held_out_fraction * n as f64).round() as usize;
        let mut per_location = vec![0usize; self.num_locations()];
        for d in &self.documents {
            per_location[d.location] += 1;
        }
        let capacity: usize = per_location.iter().map(|&c| c.saturating_sub(1)).sum();
        if requested > capacity {
            return Err(Error::SplitTooLarge { requested, documents: n, locations: self.num_locations() });
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut held = vec![false; n];
        let mut taken = 0;
        for i in order {
            if taken == requested {
                break;
            }
            let loc = self.documents[i].location;
            if per_location[loc] > 1 {
                per_location[loc] -= 1;
                held[i] = true;
                taken += 1;
            }
        }

        let (mut train, mut test) = (Vec::new(), Vec::new());
        for (doc, &h) in self.documents.iter().zip(&held) {
            if h {
                test.push(doc.clone());
            } else {
                train.push(doc.clone());
            }
        }
        let half = |docs| Corpus::from_parts(self.vocabulary.clone(), self.location_names.clone(), docs);
        Ok((half(train), half(test)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(text: &str, min_tokens: usize) -> Result<Corpus> {
        let records = parse_records(text.as_bytes())?;
        Corpus::from_records(records, min_tokens).map(|(c, _)| c)
    }

    #[test]
    fn drops_short_documents() {
        let c = corpus("a\td1\tx x x x x\na\td2\tx y\nb\td3\ty y z z\n", 3).unwrap();
        assert_eq!(c.documents().len(), 2);
        assert_eq!(c.token_count(), 9);
    }

    #[test]
    fn minimal_document() {
        let c = corpus("locA\td1\tw w w\n", 3).unwrap();
        assert_eq!(c.num_locations(), 1);
        assert_eq!(c.num_words(), 1);
        assert_eq!(c.documents()[0].tokens, vec![0, 0, 0]);
    }

    #[test]
    fn filtered_location_disappears_and_ids_stay_dense() {
        let text = "a\td1\tp q r\nb\td2\tp q\nc\td3\tr r s\nc\td4\ts s s\n";
        let c = corpus(text, 3).unwrap();
        assert_eq!(c.location_names(), &["a".to_string(), "c".to_string()]);
        let mut used: Vec<usize> = c.documents().iter().map(|d| d.location).collect();
        used.dedup();
        assert_eq!(used, vec![0, 1]);
        // "q" only appeared in the dropped document at b... and in d1.
        assert_eq!(c.vocabulary().words(), &["p", "q", "r", "s"]);
    }

    #[test]
    fn vocabulary_excludes_words_of_dropped_documents() {
        let c = corpus("a\td1\tx x x\na\td2\tonly here\n", 3).unwrap();
        assert_eq!(c.vocabulary().words(), &["x"]);
    }

    #[test]
    fn malformed_lines_report_line_number() {
        let err = corpus("a\td1\tx y z\n\nb\td2\n", 3).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 3, .. }), "{err}");
        let err = corpus("a\td1\tx  y z\n", 3).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
        let err = corpus("a\td1\tx\ty\n", 1).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn empty_after_filtering_is_an_error() {
        assert!(matches!(corpus("a\td\tx y\n", 3), Err(Error::EmptyCorpus { .. })));
        assert!(matches!(corpus("\n\n", 1), Err(Error::EmptyCorpus { .. })));
    }

    #[test]
    fn canonical_form_round_trips() {
        let c = corpus("z\tb\tk j\na\tz\tq q\na\tb\tj\n", 1).unwrap();
        let text = c.to_canonical_string();
        assert_eq!(text, "a\tb\tj\na\tz\tq q\nz\tb\tk j\n");
        assert_eq!(corpus(&text, 1).unwrap(), c);
    }

    fn ten_docs() -> Corpus {
        let mut text = String::new();
        for i in 0..10 {
            text.push_str(&format!("loc{}\td{i}\ta b c\n", i % 2));
        }
        corpus(&text, 3).unwrap()
    }

    #[test]
    fn split_zero_fraction() {
        let c = ten_docs();
        let (train, test) = c.split(0.0, 1).unwrap();
        assert_eq!(train, c);
        assert!(test.is_empty());
        assert_eq!(test.vocabulary(), c.vocabulary());
    }

    #[test]
    fn split_keeps_every_location_in_training() {
        let c = ten_docs();
        for seed in 0..20 {
            let (train, test) = c.split(0.2, seed).unwrap();
            assert_eq!(test.documents().len(), 2);
            assert_eq!(train.documents().len(), 8);
            for loc in 0..2 {
                assert!(train.documents().iter().any(|d| d.location == loc));
            }
        }
        assert_eq!(c.split(0.2, 7).unwrap(), c.split(0.2, 7).unwrap());
    }

    #[test]
    fn split_too_large() {
        let c = ten_docs();
        assert!(c.split(0.8, 0).is_ok());
        assert!(matches!(c.split(0.9, 0), Err(Error::SplitTooLarge { .. })));
        assert!(c.split(1.0, 0).is_err());
    }
}
