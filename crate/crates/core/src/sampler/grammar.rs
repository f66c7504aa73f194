//! Legal-next-token automaton for the icon encoding.

use crate::tokenizer::{is_location, SvgToken, BOP, LOCATIONS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrammarState {
    /// Nothing emitted: the only legal token is `<BOP>`.
    Start,
    /// After `<BOP>`: the path must open with `M`.
    AfterBop,
    /// Locations still owed to the current command.
    NeedLoc(u8),
    /// A command just completed.
    Boundary,
    Done,
}

/// Token set allowed at one step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Allowed {
    Tokens(Vec<u16>),
    Locations,
}

impl Allowed {
    pub fn contains(&self, id: u16) -> bool {
        match self {
            Allowed::Tokens(t) => t.contains(&id),
            Allowed::Locations => is_location(id),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Allowed::Tokens(t) => t.len(),
            Allowed::Locations => LOCATIONS as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Tracks the encode grammar and keeps enough budget to close the sequence
/// with `end` (`<EOS>` for whole icons, `<EOM>` for infilled spans).
#[derive(Clone, Debug)]
pub struct Grammar {
    pub state: GrammarState,
    pub end: u16,
}

const M: u16 = 0;
const L: u16 = 1;
const C: u16 = 2;

impl Grammar {
    pub fn new(end: u16) -> Self {
        Self {
            state: GrammarState::Start,
            end,
        }
    }

    /// Continuing after whole paths: already at a boundary.
    pub fn at_boundary(end: u16) -> Self {
        Self {
            state: GrammarState::Boundary,
            end,
        }
    }

    /// Legal tokens given `remaining` slots including this one, or `None`
    /// when the budget cannot fit any legal completion.
    pub fn allowed(&self, remaining: usize) -> Option<Allowed> {
        use GrammarState::*;
        let set = match self.state {
            Done => return None,
            // BOP M loc end
            Start if remaining >= 4 => Allowed::Tokens(vec![BOP]),
            Start => return None,
            // M loc end
            AfterBop if remaining >= 3 => Allowed::Tokens(vec![M]),
            AfterBop => return None,
            NeedLoc(k) if remaining > k as usize => Allowed::Locations,
            NeedLoc(_) => return None,
            Boundary => {
                let mut t = Vec::with_capacity(5);
                if remaining >= 3 {
                    t.extend([M, L]);
                }
                if remaining >= 5 {
                    t.push(C);
                }
                if remaining >= 4 {
                    t.push(BOP);
                }
                if remaining >= 1 {
                    t.push(self.end);
                }
                if t.is_empty() {
                    return None;
                }
                Allowed::Tokens(t)
            }
        };
        Some(set)
    }

    /// Advances on a token the caller has checked against [`Self::allowed`].
    pub fn advance(&mut self, id: u16) {
        use GrammarState::*;
        self.state = match (self.state, id) {
            (_, t) if t == self.end => Done,
            (_, BOP) => AfterBop,
            (_, M) | (_, L) => NeedLoc(1),
            (_, C) => NeedLoc(3),
            (NeedLoc(1), _) => Boundary,
            (NeedLoc(k), _) => NeedLoc(k - 1),
            (s, t) => panic!("token {t} ({:?}) is illegal in state {s:?}", SvgToken::from_id(t as u32)),
        };
    }

    pub fn is_done(&self) -> bool {
        self.state == GrammarState::Done
    }
}
