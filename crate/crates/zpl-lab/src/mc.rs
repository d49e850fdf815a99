//! Kinetic Monte Carlo generation of timestamped photon emission events.
//!
//! A molecule cycles between ground and excited states: the waiting time to
//! excite is exponential with the pump rate `R` from
//! [`crate::photophysics::excitation_rate`], 0-1 pumping inserts the short
//! S1,v=1 relaxation delay, and the excited residence is exponential with the
//! S1,v=0 decay rate. Every decay emits exactly one photon whose band is
//! drawn from the branching factors and whose frequency is drawn from that
//! band's lineshape. Streams are deterministic given their seed.

use crate::error::{Error, Result};
use crate::photophysics::{
    BandProbabilities, ExcitationScheme, LaserField, Molecule, PumpCalibration, VibronicLine,
    excitation_rate,
};
use crate::rng::{CounterRng, derive_seed};

/// Source id reserved for broadband background photons.
pub const BACKGROUND_SOURCE: u32 = u32::MAX;

/// Spectral band of an emitted photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    /// Zero-phonon line of the 0-0 transition.
    Zpl,
    /// One-sided phonon wing, red of the ZPL.
    PhononWing,
    /// Stokes-shifted vibronic manifold.
    Stokes,
    /// Spectrally flat background fluorescence.
    Broadband,
}

/// One emitted photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonEvent {
    /// Emission time, s. Strictly increasing within one source.
    pub time: f64,
    /// Sampled optical frequency, Hz.
    pub frequency: f64,
    pub band: Band,
    /// Copied from the emitting molecule's dipole axis.
    pub polarization_axis: [f64; 2],
    /// Molecule id, or [`BACKGROUND_SOURCE`].
    pub source: u32,
}

/// Everything needed to pump one molecule.
#[derive(Debug, Clone, Copy)]
pub struct EmitterSetup<'a> {
    pub molecule: &'a Molecule,
    pub laser: &'a LaserField,
    pub scheme: ExcitationScheme,
    /// Static electrode field at the molecule, V/m.
    pub static_field: f64,
    /// Gaussian PSF FWHM for the focus weight, nm (0 disables).
    pub psf_fwhm_nm: f64,
    pub calib: PumpCalibration,
}

/// Trajectory parameters shared by all sources of a scene.
#[derive(Debug, Clone)]
pub struct TrajectoryConfig {
    /// Simulated acquisition time, s.
    pub duration: f64,
    pub seed: u64,
    /// Broadband Poisson background rate, 1/s.
    pub background_rate: f64,
    /// Frequency band (lo, hi) over which background photons are spread, Hz.
    pub background_band: (f64, f64),
    /// Extra vibronic lines (local/hot modes) appended to the Stokes
    /// manifold.
    pub extra_lines: Vec<VibronicLine>,
}

impl TrajectoryConfig {
    pub fn new(duration: f64, seed: u64) -> Self {
        Self {
            duration,
            seed,
            background_rate: 0.0,
            background_band: (0.0, 1.0),
            extra_lines: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.duration <= 0.0 {
            return Err(Error::domain("trajectory duration must be positive"));
        }
        if self.background_rate < 0.0 {
            return Err(Error::domain("background rate must be >= 0"));
        }
        if self.background_rate > 0.0 && self.background_band.0 >= self.background_band.1 {
            return Err(Error::domain("background band must have lo < hi"));
        }
        if self.extra_lines.iter().any(|l| l.weight < 0.0) {
            return Err(Error::domain("extra line weights must be >= 0"));
        }
        Ok(())
    }
}

/// Lazily generated photon stream of a single molecule.
///
/// [`Iterator::next`] yields complete events. Performance-critical callers
/// can instead use [`EmissionStream::next_emission`] (time and band only)
/// and call [`EmissionStream::sample_frequency`] for the photons that
/// survive downstream thinning.
pub struct EmissionStream {
    pump_rate: f64,
    relax_rate: f64,
    decay_rate: f64,
    pump01: bool,
    zpl_center: f64,
    zpl_fwhm: f64,
    wing_rate: f64,
    /// (cumulative weight, absolute line center, fwhm) for the Stokes draw.
    stokes: Vec<(f64, f64, f64)>,
    probs: BandProbabilities,
    polarization_axis: [f64; 2],
    source: u32,
    duration: f64,
    t: f64,
    rng: CounterRng,
    done: bool,
}

impl EmissionStream {
    pub fn new(setup: &EmitterSetup<'_>, cfg: &TrajectoryConfig) -> Result<Self> {
        cfg.validate()?;
        setup.molecule.validate()?;
        setup.laser.validate()?;
        let mol = setup.molecule;
        let pump_rate = excitation_rate(
            setup.laser,
            mol,
            setup.scheme,
            setup.static_field,
            setup.psf_fwhm_nm,
            &setup.calib,
        );
        let zpl_center = mol.zpl_center(setup.static_field);

        let mut lines: Vec<VibronicLine> = mol.stokes_lines.clone();
        lines.extend(cfg.extra_lines.iter().copied());
        let total: f64 = lines.iter().map(|l| l.weight).sum();
        if total <= 0.0 {
            return Err(Error::domain("stokes manifold has zero total weight"));
        }
        let mut cum = 0.0;
        let stokes = lines
            .iter()
            .map(|l| {
                cum += l.weight / total;
                (cum, zpl_center - l.offset, l.fwhm)
            })
            .collect();

        Ok(Self {
            pump_rate,
            relax_rate: 1.0 / mol.lifetime_s1v1,
            decay_rate: mol.gamma(),
            pump01: setup.scheme == ExcitationScheme::Pump01,
            zpl_center,
            zpl_fwhm: mol.zpl_fwhm(),
            wing_rate: 1.0 / mol.phonon_wing_width,
            stokes,
            probs: mol.branching.band_probabilities(),
            polarization_axis: mol.dipole_axis,
            source: mol.id,
            duration: cfg.duration,
            t: 0.0,
            rng: CounterRng::new(derive_seed(cfg.seed, mol.id as u64)),
            done: false,
        })
    }

    /// The pump rate this stream runs at, 1/s.
    pub fn pump_rate(&self) -> f64 {
        self.pump_rate
    }

    /// Advance the cycle to the next decay; returns its time and band, or
    /// `None` once the trajectory duration is exhausted.
    #[inline]
    pub fn next_emission(&mut self) -> Option<(f64, Band)> {
        if self.done {
            return None;
        }
        if self.pump_rate <= 0.0 {
            self.done = true;
            return None;
        }
        let prev = self.t;
        let mut t = self.t + self.rng.exponential(self.pump_rate);
        if self.pump01 {
            t += self.rng.exponential(self.relax_rate);
        }
        t += self.rng.exponential(self.decay_rate);
        if !(t < self.duration) {
            self.done = true;
            return None;
        }
        if t <= prev {
            t = prev.next_up();
        }
        self.t = t;
        let u = self.rng.uniform();
        let band = if u < self.probs.zpl {
            Band::Zpl
        } else if u < self.probs.zpl + self.probs.phonon_wing {
            Band::PhononWing
        } else {
            Band::Stokes
        };
        Some((t, band))
    }

    /// Draw an optical frequency for a photon of the given band.
    #[inline]
    pub fn sample_frequency(&mut self, band: Band) -> f64 {
        match band {
            Band::Zpl => self.rng.lorentzian(self.zpl_center, self.zpl_fwhm),
            Band::PhononWing => self.zpl_center - self.rng.exponential(self.wing_rate),
            Band::Stokes => {
                let u = self.rng.uniform();
                let &(_, center, fwhm) = self
                    .stokes
                    .iter()
                    .find(|&&(c, _, _)| u <= c)
                    .unwrap_or_else(|| self.stokes.last().expect("non-empty manifold"));
                self.rng.lorentzian(center, fwhm)
            }
            Band::Broadband => unreachable!("molecules do not emit broadband photons"),
        }
    }

    pub fn polarization_axis(&self) -> [f64; 2] {
        self.polarization_axis
    }

    pub fn source(&self) -> u32 {
        self.source
    }
}

impl Iterator for EmissionStream {
    type Item = PhotonEvent;

    fn next(&mut self) -> Option<PhotonEvent> {
        let (time, band) = self.next_emission()?;
        let frequency = self.sample_frequency(band);
        Some(PhotonEvent {
            time,
            frequency,
            band,
            polarization_axis: self.polarization_axis,
            source: self.source,
        })
    }
}

/// Poisson stream of spectrally flat, unpolarized background photons.
pub struct BackgroundStream {
    rate: f64,
    band: (f64, f64),
    duration: f64,
    t: f64,
    rng: CounterRng,
    done: bool,
}

impl BackgroundStream {
    pub fn new(rate: f64, band: (f64, f64), duration: f64, seed: u64) -> Self {
        Self {
            rate,
            band,
            duration,
            t: 0.0,
            rng: CounterRng::new(seed),
            done: rate <= 0.0,
        }
    }
}

impl Iterator for BackgroundStream {
    type Item = PhotonEvent;

    fn next(&mut self) -> Option<PhotonEvent> {
        if self.done {
            return None;
        }
        let prev = self.t;
        let mut t = self.t + self.rng.exponential(self.rate);
        if !(t < self.duration) {
            self.done = true;
            return None;
        }
        if t <= prev {
            t = prev.next_up();
        }
        self.t = t;
        let frequency = self.rng.uniform_in(self.band.0, self.band.1);
        // Unpolarized: a fresh random axis per photon reproduces the 50%
        // average transmission through any polarizer.
        let angle = self.rng.uniform_in(0.0, std::f64::consts::PI);
        Some(PhotonEvent {
            time: t,
            frequency,
            band: Band::Broadband,
            polarization_axis: [angle.cos(), angle.sin()],
            source: BACKGROUND_SOURCE,
        })
    }
}

/// Generate the full event list for one molecule, merged with the
/// configured background. Deterministic for fixed inputs and seed.
pub fn generate_stream(setup: &EmitterSetup<'_>, cfg: &TrajectoryConfig) -> Result<Vec<PhotonEvent>> {
    let stream = EmissionStream::new(setup, cfg)?;
    let events: Vec<PhotonEvent> = stream.collect();
    if cfg.background_rate > 0.0 {
        let bg: Vec<PhotonEvent> = BackgroundStream::new(
            cfg.background_rate,
            cfg.background_band,
            cfg.duration,
            derive_seed(cfg.seed, BACKGROUND_SOURCE as u64),
        )
        .collect();
        merge_streams(vec![events, bg])
    } else {
        Ok(events)
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    time: f64,
    source: u32,
    stream: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reversed: BinaryHeap is a max-heap and we want the earliest event,
        // ties broken toward the lower source id.
        other
            .time
            .total_cmp(&self.time)
            .then(other.source.cmp(&self.source))
            .then(other.stream.cmp(&self.stream))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Merge per-source event lists into one globally time-ordered list.
///
/// Ties at identical timestamps are broken toward the lower source id.
/// Each input must already be time-ordered or the merge is rejected.
pub fn merge_streams(streams: Vec<Vec<PhotonEvent>>) -> Result<Vec<PhotonEvent>> {
    for (k, s) in streams.iter().enumerate() {
        if s.windows(2).any(|w| w[1].time < w[0].time) {
            return Err(Error::domain(format!(
                "merge input {k} is not time-ordered"
            )));
        }
    }
    let total: usize = streams.iter().map(Vec::len).sum();
    let mut out = Vec::with_capacity(total);
    let mut heads = vec![0usize; streams.len()];
    let mut heap = std::collections::BinaryHeap::with_capacity(streams.len());
    for (k, s) in streams.iter().enumerate() {
        if let Some(ev) = s.first() {
            heap.push(HeapEntry {
                time: ev.time,
                source: ev.source,
                stream: k,
            });
        }
    }
    while let Some(entry) = heap.pop() {
        let k = entry.stream;
        out.push(streams[k][heads[k]]);
        heads[k] += 1;
        if let Some(ev) = streams[k].get(heads[k]) {
            heap.push(HeapEntry {
                time: ev.time,
                source: ev.source,
                stream: k,
            });
        }
    }
    Ok(out)
}


#[cfg(test)]
mod merge_props {
    use super::*;
    use proptest::prelude::*;

    fn stream_strategy() -> impl Strategy<Value = Vec<PhotonEvent>> {
        (proptest::collection::vec(0.0f64..1.0, 0..40), 0u32..4).prop_map(|(mut ts, source)| {
            ts.sort_by(f64::total_cmp);
            ts.iter()
                .map(|&t| PhotonEvent {
                    time: t,
                    frequency: 5e14,
                    band: Band::Zpl,
                    polarization_axis: [1.0, 0.0],
                    source,
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn merge_is_ordered_and_conserving(
            streams in proptest::collection::vec(stream_strategy(), 0..5)
        ) {
            let total: usize = streams.iter().map(Vec::len).sum();
            let merged = merge_streams(streams).unwrap();
            prop_assert_eq!(merged.len(), total);
            for w in merged.windows(2) {
                prop_assert!(w[0].time <= w[1].time);
                if w[0].time == w[1].time {
                    prop_assert!(w[0].source <= w[1].source);
                }
            }
        }
    }
}
