//! Coefficient layout of the reduced system.

use std::ops::Range;

/// Groups of spectral coefficients entering the reduced system.
///
/// `Wc` and `Wd` hold the coefficients of `ν × Ŝ²c` and `ν × Ŝ²d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    A,
    B,
    C,
    Wc,
    D,
    Wd,
    Psi,
}

impl Group {
    pub const ALL: [Group; 7] = [Group::A, Group::B, Group::C, Group::Wc, Group::D, Group::Wd, Group::Psi];

    /// Row block (equation) whose nodal density feeds this group.
    pub fn block(self) -> usize {
        match self {
            Group::A => 0,
            Group::B => 1,
            Group::C | Group::Wc => 2,
            Group::D | Group::Wd => 3,
            Group::Psi => 4,
        }
    }

    fn index(self) -> usize {
        Group::ALL.iter().position(|g| *g == self).unwrap_or(0)
    }

    pub fn is_scalar(self) -> bool {
        self == Group::Psi
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    ranges: [Option<Range<usize>>; 7],
    total: usize,
}

impl Layout {
    /// Places the `groups` in canonical order; tangential groups get `n_tan`
    /// coefficients and `Psi` gets `n_scal`.
    pub fn new(n_tan: usize, n_scal: usize, groups: &[Group]) -> Self {
        let mut ranges: [Option<Range<usize>>; 7] = Default::default();
        let mut off = 0;
        for g in Group::ALL {
            if groups.contains(&g) {
                let n = if g.is_scalar() { n_scal } else { n_tan };
                ranges[g.index()] = Some(off..off + n);
                off += n;
            }
        }
        Self { ranges, total: off }
    }

    pub fn range(&self, g: Group) -> Option<Range<usize>> {
        self.ranges[g.index()].clone()
    }

    pub fn contains(&self, g: Group) -> bool {
        self.ranges[g.index()].is_some()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn groups(&self) -> impl Iterator<Item = Group> + '_ {
        Group::ALL.into_iter().filter(|g| self.contains(*g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_contiguous() {
        let l = Layout::new(6, 4, &[Group::Psi, Group::A, Group::D]);
        assert_eq!(l.range(Group::A), Some(0..6));
        assert_eq!(l.range(Group::D), Some(6..12));
        assert_eq!(l.range(Group::Psi), Some(12..16));
        assert_eq!(l.range(Group::B), None);
        assert_eq!(l.total(), 16);
    }
}
