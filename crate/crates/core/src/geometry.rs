//! Detector placement next to a Dirichlet plane at `z = 0`.
//!
//! All lengths are in units of the switching width σ and all gaps are the
//! dimensionless products `Ωσ`.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    A,
    B,
    C,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::A, Label::B, Label::C];

    pub fn index(self) -> usize {
        match self {
            Label::A => 0,
            Label::B => 1,
            Label::C => 2,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Label::A => "A",
            Label::B => "B",
            Label::C => "C",
        };
        f.write_str(s)
    }
}

/// One of the three detector pairs, in the order the state stores them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pair {
    AB,
    BC,
    AC,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::AB, Pair::BC, Pair::AC];

    /// Members ordered earlier label first.
    pub fn members(self) -> (Label, Label) {
        match self {
            Pair::AB => (Label::A, Label::B),
            Pair::BC => (Label::B, Label::C),
            Pair::AC => (Label::A, Label::C),
        }
    }

    /// The detector traced out when reducing the tripartite state to this pair.
    pub fn excluded(self) -> Label {
        match self {
            Pair::AB => Label::C,
            Pair::BC => Label::A,
            Pair::AC => Label::B,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Pair::AB => 0,
            Pair::BC => 1,
            Pair::AC => 2,
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.members();
        write!(f, "{a}{b}")
    }
}

/// A static detector: gap `Ωσ`, position in units of σ, and its label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec<T> {
    pub gap: T,
    pub position: [T; 3],
    pub label: Label,
}

impl<T: Real> DetectorSpec<T> {
    pub fn new(label: Label, gap: T, position: [T; 3]) -> Result<Self> {
        if !(gap >= T::zero()) || !gap.is_finite() {
            return Err(invalid(
                "gap",
                format!("must be finite and >= 0, got {gap}"),
            ));
        }
        if position.iter().any(|c| !c.is_finite()) {
            return Err(invalid("position", "coordinates must be finite"));
        }
        if position[2] < T::zero() {
            return Err(invalid(
                "position",
                format!("detector {label} has z = {} below the mirror", position[2]),
            ));
        }
        Ok(Self {
            gap,
            position,
            label,
        })
    }

    /// Distance to the mirror.
    pub fn height(&self) -> T {
        self.position[2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryKind {
    /// Along `x` at common height `Δz`.
    Parallel,
    /// Along the mirror normal, starting at height `Δz`.
    Orthogonal,
    /// Arbitrary static placement.
    GeneralStatic,
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeometryKind::Parallel => "parallel",
            GeometryKind::Orthogonal => "orthogonal",
            GeometryKind::GeneralStatic => "general",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig<T> {
    pub kind: GeometryKind,
    /// Adjacent separation `L/σ`; zero for general placements.
    pub separation: T,
    /// `Δz/σ`; zero for general placements.
    pub boundary_distance: T,
    pub detectors: [DetectorSpec<T>; 3],
}

impl<T: Real> GeometryConfig<T> {
    /// Detectors at `x ∈ {0, L, 2L}`, `z = Δz`. `gaps` is `[Ω_A, Ω_B, Ω_C]`.
    pub fn parallel(gaps: [T; 3], separation: T, boundary_distance: T) -> Result<Self> {
        check_layout(separation, boundary_distance)?;
        let detectors = build(gaps, |i| [separation * i, T::zero(), boundary_distance])?;
        Ok(Self {
            kind: GeometryKind::Parallel,
            separation,
            boundary_distance,
            detectors,
        })
    }

    /// Detectors at `z ∈ {Δz, Δz + L, Δz + 2L}` on the `z` axis.
    pub fn orthogonal(gaps: [T; 3], separation: T, boundary_distance: T) -> Result<Self> {
        check_layout(separation, boundary_distance)?;
        let detectors = build(gaps, |i| {
            [T::zero(), T::zero(), boundary_distance + separation * i]
        })?;
        Ok(Self {
            kind: GeometryKind::Orthogonal,
            separation,
            boundary_distance,
            detectors,
        })
    }

    pub fn general(detectors: [DetectorSpec<T>; 3]) -> Result<Self> {
        for (i, d) in detectors.iter().enumerate() {
            if d.label != Label::ALL[i] {
                return Err(invalid(
                    "detectors",
                    format!("expected labels in A, B, C order, found {} at {i}", d.label),
                ));
            }
        }
        for pair in Pair::ALL {
            let (a, b) = pair.members();
            pair_distances(&detectors[a.index()], &detectors[b.index()])?;
        }
        Ok(Self {
            kind: GeometryKind::GeneralStatic,
            separation: T::zero(),
            boundary_distance: T::zero(),
            detectors,
        })
    }

    pub fn detector(&self, label: Label) -> &DetectorSpec<T> {
        &self.detectors[label.index()]
    }

    pub fn pair(&self, pair: Pair) -> (&DetectorSpec<T>, &DetectorSpec<T>) {
        let (a, b) = pair.members();
        (self.detector(a), self.detector(b))
    }

    pub fn gaps(&self) -> [T; 3] {
        [
            self.detectors[0].gap,
            self.detectors[1].gap,
            self.detectors[2].gap,
        ]
    }

    /// Set when the gaps do not follow `Ω_C >= Ω_B >= Ω_A`. Nothing depends
    /// on that ordering; the flag only tells callers they left the usual
    /// convention.
    pub fn gap_order_warning(&self) -> bool {
        let [a, b, c] = self.gaps();
        !(c >= b && b >= a)
    }

    /// Same placement with every gap replaced.
    pub fn with_gaps(&self, gaps: [T; 3]) -> Result<Self> {
        match self.kind {
            GeometryKind::Parallel => Self::parallel(gaps, self.separation, self.boundary_distance),
            GeometryKind::Orthogonal => {
                Self::orthogonal(gaps, self.separation, self.boundary_distance)
            }
            GeometryKind::GeneralStatic => {
                let mut detectors = self.detectors;
                for (d, g) in detectors.iter_mut().zip(gaps) {
                    *d = DetectorSpec::new(d.label, g, d.position)?;
                }
                Self::general(detectors)
            }
        }
    }
}

fn check_layout<T: Real>(separation: T, boundary_distance: T) -> Result<()> {
    if !(separation > T::zero()) || !separation.is_finite() {
        return Err(invalid(
            "separation",
            format!("L must be finite and > 0, got {separation}"),
        ));
    }
    if !(boundary_distance >= T::zero()) || !boundary_distance.is_finite() {
        return Err(invalid(
            "boundary_distance",
            format!("Δz must be finite and >= 0, got {boundary_distance}"),
        ));
    }
    Ok(())
}

fn build<T: Real>(gaps: [T; 3], place: impl Fn(T) -> [T; 3]) -> Result<[DetectorSpec<T>; 3]> {
    let mk = |i: usize| DetectorSpec::new(Label::ALL[i], gaps[i], place(T::from_usize(i).unwrap()));
    Ok([mk(0)?, mk(1)?, mk(2)?])
}

/// Direct separation of two detectors and the separation between one of them
/// and the mirror image of the other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDistances<T> {
    pub direct: T,
    pub image: T,
}

/// `direct = |r_a - r_b|`, `image = sqrt(d_⊥² + (z_a + z_b)²)` where `d_⊥` is
/// the separation parallel to the mirror.
pub fn pair_distances<T: Real>(
    a: &DetectorSpec<T>,
    b: &DetectorSpec<T>,
) -> Result<PairDistances<T>> {
    let dx = a.position[0] - b.position[0];
    let dy = a.position[1] - b.position[1];
    let dz = a.position[2] - b.position[2];
    let sz = a.position[2] + b.position[2];
    let transverse = dx.hypot(dy);
    let direct = transverse.hypot(dz);
    if direct == T::zero() {
        return Err(Error::DegenerateGeometry {
            a: a.label.to_string(),
            b: b.label.to_string(),
        });
    }
    Ok(PairDistances {
        direct,
        image: transverse.hypot(sz),
    })
}
