use std::collections::BTreeMap;

use rand::Rng;

use super::kb::KnowledgeBase;
use super::pos::{pos_tag, PosLexicon, PosTag};
use crate::corpus::Story;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
struct Bucket {
    words: Vec<String>,
    cumulative: Vec<u64>,
}

impl Bucket {
    fn total(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }
}

/// Keyword mention counts, bucketed by part of speech for weighted sampling.
#[derive(Debug, Clone, Default)]
pub struct FrequencyTable {
    counts: BTreeMap<String, u64>,
    buckets: BTreeMap<PosTag, Bucket>,
}

impl FrequencyTable {
    /// Builds the table from `(keyword, tag, count)` entries; zero counts are
    /// ignored and repeated keywords accumulate.
    pub fn from_counts(entries: impl IntoIterator<Item = (String, PosTag, u64)>) -> Self {
        let mut grouped: BTreeMap<PosTag, BTreeMap<String, u64>> = BTreeMap::new();
        let mut counts = BTreeMap::new();
        for (word, tag, count) in entries {
            if count == 0 {
                continue;
            }
            *grouped.entry(tag).or_default().entry(word.clone()).or_default() += count;
            *counts.entry(word).or_default() += count;
        }
        let buckets = grouped
            .into_iter()
            .map(|(tag, words)| {
                let mut bucket = Bucket::default();
                let mut acc = 0;
                for (w, c) in words {
                    acc += c;
                    bucket.words.push(w);
                    bucket.cumulative.push(acc);
                }
                (tag, bucket)
            })
            .collect();
        FrequencyTable { counts, buckets }
    }

    pub fn count(&self, keyword: &str) -> u64 {
        self.counts.get(keyword).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total mentions in a POS bucket.
    pub fn bucket_total(&self, pos: PosTag) -> u64 {
        self.buckets.get(&pos).map_or(0, Bucket::total)
    }

    /// `(keyword, count)` pairs of a POS bucket in lexicographic order.
    pub fn bucket(&self, pos: PosTag) -> Vec<(&str, u64)> {
        self.buckets.get(&pos).map_or_else(Vec::new, |b| {
            b.words
                .iter()
                .zip(&b.cumulative)
                .scan(0, |prev, (w, &c)| {
                    let n = c - *prev;
                    *prev = c;
                    Some((w.as_str(), n))
                })
                .collect()
        })
    }
}

/// Counts corpus tokens that are KB keywords, bucketed by their tag.
pub fn mention_frequency(corpus: &[Story], kb: &KnowledgeBase, lex: &PosLexicon) -> FrequencyTable {
    let mut counts: BTreeMap<(String, PosTag), u64> = BTreeMap::new();
    for story in corpus {
        let sentences = std::iter::once(&story.context).chain(&story.body);
        for sentence in sentences {
            for (token, tag) in sentence.iter().zip(pos_tag(sentence, lex)) {
                if kb.is_keyword(token) {
                    *counts.entry((token.clone(), tag)).or_default() += 1;
                }
            }
        }
    }
    FrequencyTable::from_counts(counts.into_iter().map(|((w, t), c)| (w, t, c)))
}

/// Draws a keyword of the given tag with probability proportional to its
/// mention count.
pub fn sample_keyword<'a, R: Rng + ?Sized>(ft: &'a FrequencyTable, pos: PosTag, rng: &mut R) -> Result<&'a str> {
    let bucket = ft
        .buckets
        .get(&pos)
        .filter(|b| b.total() > 0)
        .ok_or_else(|| Error::EmptyBucket(pos.to_string()))?;
    let target = rng.random_range(0..bucket.total());
    let idx = bucket.cumulative.partition_point(|&c| c <= target);
    Ok(&bucket.words[idx])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use std::collections::HashMap;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn kb(words: &[&str]) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        for w in words {
            kb.insert(w, "RelatedTo", "thing");
        }
        kb
    }

    #[test]
    fn counts_keyword_mentions() {
        let corpus = vec![Story::new("a", vec![], vec![vec!["bar".into(), "bar".into(), "park".into()]]).unwrap()];
        let ft = mention_frequency(&corpus, &kb(&["bar", "park"]), &PosLexicon::new());
        assert_eq!(ft.count("bar"), 2);
        assert_eq!(ft.count("park"), 1);
        assert_eq!(ft.bucket_total(PosTag::Noun), 3);
        assert!(mention_frequency(&[], &kb(&["bar"]), &PosLexicon::new()).is_empty());
    }

    #[test]
    fn counts_match_hash_map_oracle() {
        let world = crate::synth::SyntheticWorld::generate(&crate::synth::SynthConfig::new(2000, 3));
        let corpus = &world.corpus;
        let ft = mention_frequency(corpus, &world.kb, &world.pos);
        let mut oracle: HashMap<&str, u64> = HashMap::new();
        for s in corpus {
            for t in s.all_tokens() {
                if world.kb.keywords().contains(t) {
                    *oracle.entry(t).or_default() += 1;
                }
            }
        }
        assert_eq!(ft.counts().len(), oracle.len());
        for (w, c) in &oracle {
            assert_eq!(ft.count(w), *c, "{w}");
        }
    }

    #[test]
    fn sampling_is_proportional() {
        let ft = FrequencyTable::from_counts([("a".into(), PosTag::Noun, 3), ("b".into(), PosTag::Noun, 1)]);
        let mut rng = substream(11, "freq");
        let n = 100_000;
        let hits = (0..n).filter(|_| sample_keyword(&ft, PosTag::Noun, &mut rng).unwrap() == "a").count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.75).abs() < 0.01, "{freq}");
    }

    #[test]
    fn sampling_passes_chi_square() {
        let counts = [("w1", 5u64), ("w2", 1), ("w3", 10), ("w4", 4)];
        let ft = FrequencyTable::from_counts(counts.iter().map(|(w, c)| (w.to_string(), PosTag::Verb, *c)));
        let mut rng = substream(5, "chi");
        let n = 100_000usize;
        let mut observed: HashMap<&str, usize> = HashMap::new();
        for _ in 0..n {
            *observed.entry(sample_keyword(&ft, PosTag::Verb, &mut rng).unwrap()).or_default() += 1;
        }
        let total: u64 = counts.iter().map(|c| c.1).sum();
        let chi2: f64 = counts
            .iter()
            .map(|(w, c)| {
                let e = n as f64 * *c as f64 / total as f64;
                let o = observed.get(w).copied().unwrap_or(0) as f64;
                (o - e).powi(2) / e
            })
            .sum();
        let p = 1.0 - ChiSquared::new(3.0).unwrap().cdf(chi2);
        assert!(p > 0.01, "chi2 {chi2}, p {p}");
    }

    #[test]
    fn singleton_and_empty_buckets() {
        let ft = FrequencyTable::from_counts([("only".into(), PosTag::Adj, 2)]);
        let mut rng = substream(1, "s");
        for _ in 0..20 {
            assert_eq!(sample_keyword(&ft, PosTag::Adj, &mut rng).unwrap(), "only");
        }
        assert!(matches!(sample_keyword(&ft, PosTag::Adv, &mut rng), Err(Error::EmptyBucket(_))));
    }
}
