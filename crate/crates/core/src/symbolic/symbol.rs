use std::fmt;

/// Default bound on the derivative order carried by a [`Symbol`].
pub const DEFAULT_MAX_ORDER: u8 = 2;

/// The six coordinate functions `u1, u2, u3, v1, v2, v3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    U1,
    U2,
    U3,
    V1,
    V2,
    V3,
}

impl Base {
    pub const ALL: [Base; 6] = [Base::U1, Base::U2, Base::U3, Base::V1, Base::V2, Base::V3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Base> {
        Base::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Base::U1 => "u1",
            Base::U2 => "u2",
            Base::U3 => "u3",
            Base::V1 => "v1",
            Base::V2 => "v2",
            Base::V3 => "v3",
        }
    }

    pub fn from_name(s: &str) -> Option<Base> {
        Base::ALL.into_iter().find(|b| b.name() == s)
    }
}

/// A coordinate function differentiated `order` times with respect to `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub base: Base,
    pub order: u8,
}

impl Symbol {
    pub const fn new(base: Base, order: u8) -> Self {
        Symbol { base, order }
    }

    pub const fn plain(base: Base) -> Self {
        Symbol { base, order: 0 }
    }

    /// Dense variable index: all order-0 symbols first, then order 1, ...
    pub fn var(self) -> u16 {
        self.order as u16 * 6 + self.base.index() as u16
    }

    pub fn from_var(var: u16) -> Symbol {
        Symbol {
            base: Base::ALL[(var % 6) as usize],
            order: (var / 6) as u8,
        }
    }

    pub fn derivative(self) -> Symbol {
        Symbol {
            base: self.base,
            order: self.order + 1,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base.name())?;
        for _ in 0..self.order {
            f.write_str("'")?;
        }
        Ok(())
    }
}

/// Kernel-wide limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelConfig {
    pub max_order: u8,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

impl KernelConfig {
    pub fn with_max_order(max_order: u8) -> Self {
        KernelConfig { max_order }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_round_trip() {
        for order in 0..4 {
            for b in Base::ALL {
                let s = Symbol::new(b, order);
                assert_eq!(Symbol::from_var(s.var()), s);
            }
        }
    }

    #[test]
    fn display_uses_primes() {
        assert_eq!(Symbol::new(Base::V3, 2).to_string(), "v3''");
        assert_eq!(Symbol::plain(Base::U1).to_string(), "u1");
    }
}
