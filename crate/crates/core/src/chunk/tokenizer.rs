use crate::error::{Error, Result};

/// Token counting and splitting. `split` must return pieces whose
/// concatenation is the input and whose counts add up to the input's count.
pub trait Tokenizer: Send + Sync {
    fn count(&self, text: &str) -> usize;

    /// Splits `text` into pieces of at most `max` tokens each. Empty input
    /// gives no pieces.
    fn split<'a>(&self, text: &'a str, max: usize) -> Result<Vec<&'a str>>;
}

/// Length-based approximation: one token per `chars_per_token` characters,
/// rounded up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApproxTokenizer {
    pub chars_per_token: usize,
}

impl Default for ApproxTokenizer {
    fn default() -> Self {
        ApproxTokenizer { chars_per_token: 4 }
    }
}

impl Tokenizer for ApproxTokenizer {
    fn count(&self, text: &str) -> usize {
        text.chars().count().div_ceil(self.chars_per_token)
    }

    fn split<'a>(&self, text: &'a str, max: usize) -> Result<Vec<&'a str>> {
        if max == 0 || self.chars_per_token == 0 {
            return Err(Error::Tokenizer("split size must be positive".into()));
        }
        let step = max * self.chars_per_token;
        let mut pieces = Vec::new();
        let mut start = 0;
        let mut chars = 0;
        for (i, _) in text.char_indices() {
            if chars == step {
                pieces.push(&text[start..i]);
                start = i;
                chars = 0;
            }
            chars += 1;
        }
        if start < text.len() {
            pieces.push(&text[start..]);
        }
        Ok(pieces)
    }
}
