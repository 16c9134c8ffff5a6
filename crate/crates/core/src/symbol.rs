//! Inline, copyable symbols for attribute names and atomic values.

use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};

/// Longest symbol, in UTF-8 bytes.
pub const MAX_SYMBOL_LEN: usize = 31;

/// A short string stored inline. Feature names, atoms and functors are all
/// symbols, so unification never touches the heap to compare them.
#[derive(Clone, Copy)]
pub struct Symbol {
    len: u8,
    bytes: [u8; MAX_SYMBOL_LEN],
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("symbol `{0}` is longer than 31 bytes")]
pub struct SymbolTooLong(pub alloc::string::String);

impl Symbol {
    pub fn new(s: &str) -> Result<Symbol, SymbolTooLong> {
        if s.len() > MAX_SYMBOL_LEN {
            return Err(SymbolTooLong(s.into()));
        }
        let mut bytes = [0u8; MAX_SYMBOL_LEN];
        bytes[..s.len()].copy_from_slice(s.as_bytes());
        Ok(Symbol { len: s.len() as u8, bytes })
    }

    /// For names fixed in source code. Panics on overlong input.
    pub const fn lit(s: &str) -> Symbol {
        let b = s.as_bytes();
        assert!(b.len() <= MAX_SYMBOL_LEN, "symbol literal too long");
        let mut bytes = [0u8; MAX_SYMBOL_LEN];
        let mut i = 0;
        while i < b.len() {
            bytes[i] = b[i];
            i += 1;
        }
        Symbol { len: b.len() as u8, bytes }
    }

    pub fn as_str(&self) -> &str {
        // Only ever built from a &str, so the prefix is valid UTF-8.
        core::str::from_utf8(&self.bytes[..self.len as usize]).unwrap_or("")
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.bytes[..self.len as usize] == other.bytes[..other.len as usize]
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.as_str().hash(state)
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.as_str().cmp(other.as_str())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_str())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_lexically() {
        assert!(Symbol::lit("b") > Symbol::lit("aa"));
        assert_eq!(Symbol::lit("muet").as_str(), "muet");
    }

    #[test]
    fn rejects_long() {
        assert!(Symbol::new("abcdefghijklmnopqrstuvwxyz0123456789").is_err());
        assert!(Symbol::new("change_é_è").is_ok());
    }
}
