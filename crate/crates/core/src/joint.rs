//! The model's joint id space: text ids, then the SVG vocabulary, then
//! `<SOS>` and `<PAD>`.

use crate::tokenizer::SVG_VOCAB_SIZE;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JointToken {
    Text(u32),
    Svg(u16),
    Sos,
    Pad,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct JointVocab {
    pub text_size: usize,
}

impl JointVocab {
    pub fn new(text_size: usize) -> Self {
        Self { text_size }
    }

    pub fn len(&self) -> usize {
        self.text_size + SVG_VOCAB_SIZE + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn text(&self, id: u32) -> u32 {
        debug_assert!((id as usize) < self.text_size);
        id
    }

    pub fn svg(&self, id: u16) -> u32 {
        (self.text_size + id as usize) as u32
    }

    pub fn svg_offset(&self) -> usize {
        self.text_size
    }

    pub fn sos(&self) -> u32 {
        (self.text_size + SVG_VOCAB_SIZE) as u32
    }

    pub fn pad(&self) -> u32 {
        self.sos() + 1
    }

    pub fn classify(&self, id: u32) -> Option<JointToken> {
        let i = id as usize;
        if i < self.text_size {
            Some(JointToken::Text(id))
        } else if i < self.text_size + SVG_VOCAB_SIZE {
            Some(JointToken::Svg((i - self.text_size) as u16))
        } else if id == self.sos() {
            Some(JointToken::Sos)
        } else if id == self.pad() {
            Some(JointToken::Pad)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_a_partition() {
        let j = JointVocab::new(7);
        assert_eq!(j.len(), 7 + 10_007 + 2);
        for id in 0..j.len() as u32 {
            let back = match j.classify(id).unwrap() {
                JointToken::Text(t) => j.text(t),
                JointToken::Svg(s) => j.svg(s),
                JointToken::Sos => j.sos(),
                JointToken::Pad => j.pad(),
            };
            assert_eq!(back, id);
        }
        assert_eq!(j.classify(j.len() as u32), None);
    }
}
