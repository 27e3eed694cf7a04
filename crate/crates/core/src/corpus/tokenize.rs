/// Name placeholders, kept verbatim in canonical upper case.
pub const PLACEHOLDERS: [&str; 3] = ["[MALE]", "[FEMALE]", "[NEUTRAL]"];

const CLITICS: [&str; 6] = ["'s", "'m", "'re", "'ve", "'ll", "'d"];

const ABBREVIATIONS: [&str; 16] = [
    "mr.", "mrs.", "ms.", "dr.", "st.", "jr.", "sr.", "prof.", "mt.", "vs.", "etc.", "e.g.",
    "i.e.", "capt.", "gen.", "lt.",
];

fn placeholder_at(chars: &[char], start: usize) -> Option<(&'static str, usize)> {
    PLACEHOLDERS.iter().find_map(|p| {
        let len = p.chars().count();
        if start + len > chars.len() {
            return None;
        }
        let matches = chars[start..start + len]
            .iter()
            .zip(p.chars())
            .all(|(a, b)| a.to_ascii_uppercase() == b);
        matches.then_some((*p, len))
    })
}

fn clitic_at(chars: &[char], start: usize) -> Option<(&'static str, usize)> {
    if !matches!(chars[start], '\'' | '’') {
        return None;
    }
    let end = chars[start + 1..]
        .iter()
        .position(|c| !c.is_alphanumeric())
        .map_or(chars.len(), |p| start + 1 + p);
    let tail: String = chars[start + 1..end].iter().flat_map(|c| c.to_lowercase()).collect();
    CLITICS
        .iter()
        .find(|c| c[1..] == tail)
        .map(|c| (*c, end - start))
}

fn push_word(word: &mut String, out: &mut Vec<String>) {
    if word.is_empty() {
        return;
    }
    let w = std::mem::take(word);
    if w.ends_with("n't") && w.len() > 3 {
        out.push(w);
        return;
    }
    for clitic in CLITICS {
        if let Some(stem) = w.strip_suffix(clitic) {
            if !stem.is_empty() {
                out.push(stem.to_string());
                out.push(clitic.to_string());
                return;
            }
        }
    }
    out.push(w);
}

/// Lowercased word tokens with punctuation split off.
///
/// `n't` contractions stay whole (`didn't`), other clitics split (`jack's` ->
/// `jack`, `'s`), and `[MALE]`-style placeholders are recognized in any case.
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut word = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '[' {
            if let Some((p, len)) = placeholder_at(&chars, i) {
                push_word(&mut word, &mut out);
                out.push(p.to_string());
                i += len;
                continue;
            }
        }
        let joins_word = |c: char| {
            (c == '\'' || c == '’' || c == '-')
                && !word.is_empty()
                && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
        };
        if c.is_alphanumeric() {
            word.extend(c.to_lowercase());
        } else if joins_word(c) {
            word.push(if c == '’' { '\'' } else { c });
        } else if c.is_whitespace() {
            push_word(&mut word, &mut out);
        } else {
            push_word(&mut word, &mut out);
            if let Some((clitic, len)) = clitic_at(&chars, i) {
                // clitic after a placeholder, e.g. "[MALE]'s"
                out.push(clitic.to_string());
                i += len;
                continue;
            }
            out.push(c.to_string());
        }
        i += 1;
    }
    push_word(&mut word, &mut out);
    out
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Split running text into sentences at terminal punctuation followed by
/// whitespace. Common abbreviations (`Mr.`, `Dr.`, ...) do not end a sentence.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if is_terminal(chars[i]) {
            let mut end = i + 1;
            while end < chars.len() && (is_terminal(chars[end]) || matches!(chars[end], '"' | '\'' | ')' | '”' | '’')) {
                end += 1;
            }
            let at_boundary = end == chars.len() || chars[end].is_whitespace();
            if at_boundary && !ends_with_abbreviation(&chars[start..end]) {
                let s: String = chars[start..end].iter().collect();
                let s = s.trim();
                if !s.is_empty() {
                    sentences.push(s.to_string());
                }
                start = end;
            }
            i = end;
        } else {
            i += 1;
        }
    }
    let rest: String = chars[start..].iter().collect();
    let rest = rest.trim();
    if !rest.is_empty() {
        sentences.push(rest.to_string());
    }
    sentences
}

fn ends_with_abbreviation(segment: &[char]) -> bool {
    let text: String = segment.iter().collect();
    let last = text.split_whitespace().last().unwrap_or("");
    let last = last.trim_start_matches(|c: char| !c.is_alphanumeric());
    let lower = last.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}
