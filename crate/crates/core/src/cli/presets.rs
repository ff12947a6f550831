//! Named parameter sets for the figure datasets.

use super::axis::AxisSpec;

/// Which table a preset produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dataset {
    Density,
    Flux,
    Norm,
    Ratio,
    Transition,
    DitMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    FluxOrigin,
    NormFactor,
    DensitySteady,
    DensityDecay,
    Ratio,
    Transition,
    DitTrace,
    DitMap,
}

pub const ALL: [Preset; 8] = [
    Preset::FluxOrigin,
    Preset::NormFactor,
    Preset::DensitySteady,
    Preset::DensityDecay,
    Preset::Ratio,
    Preset::Transition,
    Preset::DitTrace,
    Preset::DitMap,
];

/// Default axes of a preset; `None` where the dataset has no such axis.
#[derive(Debug, Clone)]
pub struct PresetAxes {
    pub v0: AxisSpec,
    pub x: Option<AxisSpec>,
    pub t: Option<AxisSpec>,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::FluxOrigin => "flux-origin",
            Preset::NormFactor => "norm-factor",
            Preset::DensitySteady => "density-steady",
            Preset::DensityDecay => "density-decay",
            Preset::Ratio => "ratio",
            Preset::Transition => "transition",
            Preset::DitTrace => "dit-trace",
            Preset::DitMap => "dit-map",
        }
    }

    pub fn from_name(s: &str) -> Option<Preset> {
        ALL.iter().copied().find(|p| p.name() == s.trim())
    }

    pub fn summary(self) -> &'static str {
        match self {
            Preset::FluxOrigin => "flux J(0,t) for v0 in {1e-3, 0.25, 0.5, 0.999}",
            Preset::NormFactor => "emitted particle number N(v0)",
            Preset::DensitySteady => "density and its decomposition at x = 1, v0 = 0",
            Preset::DensityDecay => "density for v0 = 0.1 at x in {0.1, 1, 10, 50}",
            Preset::Ratio => "R = |psi_0/psi_S|^2 for v0 = 0.1 at x in {0.1, 1, 2.5, 4}",
            Preset::Transition => "t_p(x) and |psi_N(x,t_p)|^2 for v0 in {0.1, 0.25, 0.5, 0.9}",
            Preset::DitTrace => "density and its decomposition at x = 1.5, v0 = 0.05",
            Preset::DitMap => "normalized |psi_Int| at the first DIT minimum over (v0, x)",
        }
    }

    pub fn dataset(self) -> Dataset {
        match self {
            Preset::FluxOrigin => Dataset::Flux,
            Preset::NormFactor => Dataset::Norm,
            Preset::DensitySteady | Preset::DensityDecay | Preset::DitTrace => Dataset::Density,
            Preset::Ratio => Dataset::Ratio,
            Preset::Transition => Dataset::Transition,
            Preset::DitMap => Dataset::DitMap,
        }
    }

    pub fn axes(self) -> PresetAxes {
        let (v0, x, t) = match self {
            Preset::FluxOrigin => (
                AxisSpec::list(&[1e-3, 0.25, 0.5, 0.999]),
                Some(AxisSpec::single(0.0)),
                Some(AxisSpec::lin(0.01, 10.0, 1000)),
            ),
            Preset::NormFactor => (AxisSpec::log(1e-3, 0.999, 60), None, None),
            Preset::DensitySteady => (
                AxisSpec::single(0.0),
                Some(AxisSpec::single(1.0)),
                Some(AxisSpec::log(0.01, 100.0, 1000)),
            ),
            Preset::DensityDecay => (
                AxisSpec::single(0.1),
                Some(AxisSpec::list(&[0.1, 1.0, 10.0, 50.0])),
                Some(AxisSpec::log(0.01, 1000.0, 2000)),
            ),
            Preset::Ratio => (
                AxisSpec::single(0.1),
                Some(AxisSpec::list(&[0.1, 1.0, 2.5, 4.0])),
                Some(AxisSpec::log(0.01, 1000.0, 2000)),
            ),
            Preset::Transition => (
                AxisSpec::list(&[0.1, 0.25, 0.5, 0.9]),
                Some(AxisSpec::log(0.01, 5.0, 200)),
                None,
            ),
            Preset::DitTrace => (
                AxisSpec::single(0.05),
                Some(AxisSpec::single(1.5)),
                Some(AxisSpec::lin(0.1, 40.0, 2000)),
            ),
            Preset::DitMap => (
                AxisSpec::log(0.005, 0.5, 40),
                Some(AxisSpec::log(0.1, 20.0, 80)),
                None,
            ),
        };
        PresetAxes { v0, x, t }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in ALL {
            assert_eq!(Preset::from_name(p.name()), Some(p));
        }
        assert_eq!(Preset::from_name("nope"), None);
    }
}
