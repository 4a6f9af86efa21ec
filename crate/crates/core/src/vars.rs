//! Ambient variable lists shared by expressions, polynomials and forms.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// An immutable, cheaply clonable list of chart variable names.
///
/// Two values compare equal when the name lists agree; every operation
/// that combines expressions or polynomials checks this first.
#[derive(Clone, Debug, Eq)]
pub struct VarSet {
    names: Arc<Vec<String>>,
}

impl VarSet {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        VarSet {
            names: Arc::new(names.into_iter().map(Into::into).collect()),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.names, &other.names) || self.names == other.names
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for n in self.names.iter() {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{n}")?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_is_by_names() {
        let a = VarSet::new(["x", "y"]);
        let b = VarSet::new(["x", "y"]);
        let c = VarSet::new(["x", "z"]);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.index_of("y"), Some(1));
        assert_eq!(a.index_of("w"), None);
    }
}
