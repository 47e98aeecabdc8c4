//! Porter's suffix-stripping stemmer, original 1980 rule set.
//!
//! No short-word shortcut: two-letter words go through the steps like any
//! other word. The later "logi" / "bli" revisions of the reference C code are
//! not applied.

/// Stems a single lowercase token.
pub fn stem(token: &str) -> String {
    let mut w = Word::new(token);
    w.step1a();
    w.step1b();
    w.step1c();
    w.step2();
    w.step3();
    w.step4();
    w.step5a();
    w.step5b();
    w.chars.into_iter().collect()
}

type Condition = fn(&Word, usize) -> bool;

struct Word {
    chars: Vec<char>,
}

impl Word {
    fn new(s: &str) -> Self {
        Word {
            chars: s.chars().collect(),
        }
    }

    fn is_consonant(&self, i: usize) -> bool {
        match self.chars[i] {
            'a' | 'e' | 'i' | 'o' | 'u' => false,
            'y' => i == 0 || !self.is_consonant(i - 1),
            _ => true,
        }
    }

    /// Number of VC sequences in `chars[..len]`.
    fn measure(&self, len: usize) -> usize {
        let mut m = 0;
        let mut prev_vowel = false;
        for i in 0..len {
            let c = self.is_consonant(i);
            if c && prev_vowel {
                m += 1;
            }
            prev_vowel = !c;
        }
        m
    }

    fn has_vowel(&self, len: usize) -> bool {
        (0..len).any(|i| !self.is_consonant(i))
    }

    fn ends_double_consonant(&self, len: usize) -> bool {
        len >= 2 && self.chars[len - 1] == self.chars[len - 2] && self.is_consonant(len - 1)
    }

    /// `*o`: stem ends consonant-vowel-consonant, last not w, x or y.
    fn ends_cvc(&self, len: usize) -> bool {
        len >= 3
            && self.is_consonant(len - 3)
            && !self.is_consonant(len - 2)
            && self.is_consonant(len - 1)
            && !matches!(self.chars[len - 1], 'w' | 'x' | 'y')
    }

    fn ends_with(&self, suffix: &str) -> bool {
        let n = suffix.chars().count();
        n <= self.chars.len() && self.chars[self.chars.len() - n..].iter().copied().eq(suffix.chars())
    }

    fn replace_tail(&mut self, strip: usize, with: &str) {
        let keep = self.chars.len() - strip;
        self.chars.truncate(keep);
        self.chars.extend(with.chars());
    }

    /// Finds the first rule whose suffix matches and applies it if the
    /// condition holds on the remaining stem. Later rules are never tried
    /// once a suffix matched.
    fn apply_rules(&mut self, rules: &[(&str, &str, Condition)]) -> bool {
        for &(suffix, replacement, cond) in rules {
            if self.ends_with(suffix) {
                let stem_len = self.chars.len() - suffix.chars().count();
                if cond(self, stem_len) {
                    self.replace_tail(suffix.chars().count(), replacement);
                    return true;
                }
                return false;
            }
        }
        false
    }

    fn step1a(&mut self) {
        self.apply_rules(&[
            ("sses", "ss", always),
            ("ies", "i", always),
            ("ss", "ss", always),
            ("s", "", always),
        ]);
    }

    fn step1b(&mut self) {
        if self.ends_with("eed") {
            if self.measure(self.chars.len() - 3) > 0 {
                self.chars.pop();
            }
            return;
        }
        let stripped = ["ed", "ing"].into_iter().find_map(|suffix| {
            let n = suffix.len();
            (self.ends_with(suffix) && self.has_vowel(self.chars.len() - n)).then_some(n)
        });
        let Some(n) = stripped else { return };
        self.chars.truncate(self.chars.len() - n);

        if self.ends_with("at") || self.ends_with("bl") || self.ends_with("iz") {
            self.chars.push('e');
            return;
        }
        let len = self.chars.len();
        if self.ends_double_consonant(len) {
            if !matches!(self.chars[len - 1], 'l' | 's' | 'z') {
                self.chars.pop();
            }
            return;
        }
        if self.measure(len) == 1 && self.ends_cvc(len) {
            self.chars.push('e');
        }
    }

    fn step1c(&mut self) {
        self.apply_rules(&[("y", "i", Word::has_vowel)]);
    }

    fn step2(&mut self) {
        self.apply_rules(&[
            ("ational", "ate", m_gt_0),
            ("tional", "tion", m_gt_0),
            ("enci", "ence", m_gt_0),
            ("anci", "ance", m_gt_0),
            ("izer", "ize", m_gt_0),
            ("abli", "able", m_gt_0),
            ("alli", "al", m_gt_0),
            ("entli", "ent", m_gt_0),
            ("eli", "e", m_gt_0),
            ("ousli", "ous", m_gt_0),
            ("ization", "ize", m_gt_0),
            ("ation", "ate", m_gt_0),
            ("ator", "ate", m_gt_0),
            ("alism", "al", m_gt_0),
            ("iveness", "ive", m_gt_0),
            ("fulness", "ful", m_gt_0),
            ("ousness", "ous", m_gt_0),
            ("aliti", "al", m_gt_0),
            ("iviti", "ive", m_gt_0),
            ("biliti", "ble", m_gt_0),
        ]);
    }

    fn step3(&mut self) {
        self.apply_rules(&[
            ("icate", "ic", m_gt_0),
            ("ative", "", m_gt_0),
            ("alize", "al", m_gt_0),
            ("iciti", "ic", m_gt_0),
            ("ical", "ic", m_gt_0),
            ("ful", "", m_gt_0),
            ("ness", "", m_gt_0),
        ]);
    }

    fn step4(&mut self) {
        self.apply_rules(&[
            ("al", "", m_gt_1),
            ("ance", "", m_gt_1),
            ("ence", "", m_gt_1),
            ("er", "", m_gt_1),
            ("ic", "", m_gt_1),
            ("able", "", m_gt_1),
            ("ible", "", m_gt_1),
            ("ant", "", m_gt_1),
            ("ement", "", m_gt_1),
            ("ment", "", m_gt_1),
            ("ent", "", m_gt_1),
            ("ion", "", m_gt_1_and_s_or_t),
            ("ou", "", m_gt_1),
            ("ism", "", m_gt_1),
            ("ate", "", m_gt_1),
            ("iti", "", m_gt_1),
            ("ous", "", m_gt_1),
            ("ive", "", m_gt_1),
            ("ize", "", m_gt_1),
        ]);
    }

    fn step5a(&mut self) {
        if !self.ends_with("e") {
            return;
        }
        let len = self.chars.len() - 1;
        let m = self.measure(len);
        if m > 1 || (m == 1 && !self.ends_cvc(len)) {
            self.chars.pop();
        }
    }

    fn step5b(&mut self) {
        let len = self.chars.len();
        if self.ends_with("ll") && self.measure(len - 1) > 1 {
            self.chars.pop();
        }
    }
}

fn always(_: &Word, _: usize) -> bool {
    true
}

fn m_gt_0(w: &Word, len: usize) -> bool {
    w.measure(len) > 0
}

fn m_gt_1(w: &Word, len: usize) -> bool {
    w.measure(len) > 1
}

fn m_gt_1_and_s_or_t(w: &Word, len: usize) -> bool {
    w.measure(len) > 1 && matches!(w.chars[len - 1], 's' | 't')
}
