use super::ModeLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Create,
    Annihilate,
}

/// A single creation or annihilation operator on a labeled mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ladder {
    pub mode: ModeLabel,
    pub kind: LadderKind,
}

impl Ladder {
    pub fn create(mode: ModeLabel) -> Self {
        Ladder {
            mode,
            kind: LadderKind::Create,
        }
    }

    pub fn annihilate(mode: ModeLabel) -> Self {
        Ladder {
            mode,
            kind: LadderKind::Annihilate,
        }
    }

    pub fn dagger(self) -> Self {
        let kind = match self.kind {
            LadderKind::Create => LadderKind::Annihilate,
            LadderKind::Annihilate => LadderKind::Create,
        };
        Ladder { mode: self.mode, kind }
    }
}

/// Ordered operator product `ops[0] * ops[1] * ... * ops[n-1]`.
///
/// Acting on a ket, the last factor is applied first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Monomial(pub Vec<Ladder>);

impl Monomial {
    pub fn new(ops: Vec<Ladder>) -> Self {
        Monomial(ops)
    }

    /// `a_m^† a_m`
    pub fn number(mode: ModeLabel) -> Self {
        Monomial(vec![Ladder::create(mode), Ladder::annihilate(mode)])
    }

    pub fn dagger(&self) -> Self {
        Monomial(self.0.iter().rev().map(|op| op.dagger()).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Maps a basis occupation vector through the monomial.
    ///
    /// `positions[k]` is the tensor axis of `self.0[k]`. Returns the real
    /// coefficient, or `None` when an annihilator hits vacuum or a creator
    /// would leave the truncated space.
    pub(crate) fn act_on_basis(
        &self,
        positions: &[usize],
        cutoffs: &[usize],
        occupation: &mut [usize],
    ) -> Option<f64> {
        let mut coeff = 1.0;
        for (op, &axis) in self.0.iter().zip(positions).rev() {
            let n = occupation[axis];
            match op.kind {
                LadderKind::Annihilate => {
                    if n == 0 {
                        return None;
                    }
                    coeff *= (n as f64).sqrt();
                    occupation[axis] = n - 1;
                }
                LadderKind::Create => {
                    if n == cutoffs[axis] {
                        return None;
                    }
                    coeff *= ((n + 1) as f64).sqrt();
                    occupation[axis] = n + 1;
                }
            }
        }
        Some(coeff)
    }
}
