//! Collection, filtering, spectral analysis and click detection.
//!
//! Photon streams pass through spectral filters, an optional polarizer, the
//! HBT beam splitter and a scanning Fabry-Perot etalon before being turned
//! into detector records with efficiency, Gaussian timing jitter, dark
//! counts, dead time and timestamp quantization. Every transform is an
//! independent Bernoulli thinning per photon, so the operations commute and
//! normalized correlation functions are preserved.

use crate::error::{Error, Result};
use crate::mc::PhotonEvent;
use crate::rng::{CounterRng, derive_seed};

/// Default per-detector timing jitter, s.
///
/// Fixed by a one-dimensional quadrature: convolving the ideal antibunching
/// dip `1 - exp(-|tau| / 5.5 ns)` with the two-detector difference jitter
/// (sigma * sqrt(2)) must give a zero-delay value of 0.18.
pub const DEFAULT_JITTER_SIGMA: f64 = 1.02577e-9;

/// Edge filter or band-pass in the detection path.
///
/// Edges are stored as optical frequencies in Hz; a "long pass" passes long
/// wavelengths, i.e. frequencies at or below its edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralFilter {
    LongPass {
        /// Highest transmitted frequency, Hz.
        edge: f64,
        transmission_pass: f64,
        transmission_stop: f64,
    },
    BandPass {
        /// Band center, Hz.
        center: f64,
        /// Full transmitted width, Hz.
        width: f64,
        transmission_pass: f64,
        transmission_stop: f64,
    },
}

impl SpectralFilter {
    pub fn long_pass(edge: f64) -> Self {
        SpectralFilter::LongPass {
            edge,
            transmission_pass: 0.95,
            transmission_stop: 1e-4,
        }
    }

    pub fn band_pass(center: f64, width: f64) -> Self {
        SpectralFilter::BandPass {
            center,
            width,
            transmission_pass: 0.95,
            transmission_stop: 1e-4,
        }
    }

    /// Long-pass with its cut-off given as a wavelength in nm.
    pub fn long_pass_nm(edge_nm: f64) -> Self {
        Self::long_pass(crate::photophysics::wavelength_nm_to_hz(edge_nm))
    }

    /// Band-pass centered on `center_nm` with a width of `width_nm`,
    /// converted to a frequency window at the band center.
    pub fn band_pass_nm(center_nm: f64, width_nm: f64) -> Self {
        let center = crate::photophysics::wavelength_nm_to_hz(center_nm);
        // d(nu) = c / lambda^2 * d(lambda)
        let width = crate::photophysics::SPEED_OF_LIGHT / (center_nm * 1e-9).powi(2)
            * (width_nm * 1e-9);
        Self::band_pass(center, width)
    }

    pub fn validate(&self) -> Result<()> {
        let (pass, stop) = match *self {
            SpectralFilter::LongPass {
                transmission_pass,
                transmission_stop,
                ..
            } => (transmission_pass, transmission_stop),
            SpectralFilter::BandPass {
                width,
                transmission_pass,
                transmission_stop,
                ..
            } => {
                if width <= 0.0 {
                    return Err(Error::domain("band-pass width must be positive"));
                }
                (transmission_pass, transmission_stop)
            }
        };
        if !(0.0..=1.0).contains(&pass) || !(0.0..=1.0).contains(&stop) {
            return Err(Error::domain("filter transmissions must be in [0, 1]"));
        }
        Ok(())
    }

    /// Transmission probability at the given optical frequency.
    #[inline]
    pub fn transmission(&self, frequency: f64) -> f64 {
        match *self {
            SpectralFilter::LongPass {
                edge,
                transmission_pass,
                transmission_stop,
            } => {
                if frequency <= edge {
                    transmission_pass
                } else {
                    transmission_stop
                }
            }
            SpectralFilter::BandPass {
                center,
                width,
                transmission_pass,
                transmission_stop,
            } => {
                if (frequency - center).abs() <= 0.5 * width {
                    transmission_pass
                } else {
                    transmission_stop
                }
            }
        }
    }
}

/// Keep each event independently with the filter's transmission probability
/// at its frequency.
pub fn apply_spectral_filter(
    events: &[PhotonEvent],
    filter: &SpectralFilter,
    seed: u64,
) -> Vec<PhotonEvent> {
    let mut rng = CounterRng::new(seed);
    events
        .iter()
        .filter(|e| rng.bernoulli(filter.transmission(e.frequency)))
        .copied()
        .collect()
}

/// Scanning Fabry-Perot etalon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FabryPerot {
    /// Free spectral range, Hz.
    pub fsr: f64,
    pub finesse: f64,
    /// Frequency of one transmission peak, Hz.
    pub peak_offset: f64,
}

impl FabryPerot {
    pub fn new(fsr: f64, finesse: f64, peak_offset: f64) -> Result<Self> {
        if fsr <= 0.0 {
            return Err(Error::domain("free spectral range must be positive"));
        }
        if finesse <= 1.0 {
            return Err(Error::domain("finesse must exceed 1"));
        }
        Ok(Self {
            fsr,
            finesse,
            peak_offset,
        })
    }

    /// Instrument FWHM, `fsr / finesse`, Hz.
    pub fn instrument_fwhm(&self) -> f64 {
        self.fsr / self.finesse
    }

    /// Airy transmission `1 / (1 + (2F/pi)^2 sin^2(pi (nu - peak)/fsr))`.
    ///
    /// The phase is reduced modulo one FSR before the sine so that
    /// `transmission(nu + k * fsr) == transmission(nu)` exactly whenever
    /// `nu + k * fsr` is exactly representable.
    #[inline]
    pub fn transmission(&self, nu: f64) -> f64 {
        let u = (nu - self.peak_offset).rem_euclid(self.fsr) / self.fsr;
        let s = (std::f64::consts::PI * u).sin();
        let f = 2.0 * self.finesse / std::f64::consts::PI;
        1.0 / (1.0 + f * f * s * s)
    }
}

/// Route each event independently to output A with probability
/// `reflectivity`, otherwise to B. Both outputs stay time-ordered.
pub fn beam_splitter(
    events: &[PhotonEvent],
    reflectivity: f64,
    seed: u64,
) -> (Vec<PhotonEvent>, Vec<PhotonEvent>) {
    let mut rng = CounterRng::new(seed);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for e in events {
        if rng.bernoulli(reflectivity) {
            a.push(*e);
        } else {
            b.push(*e);
        }
    }
    (a, b)
}

/// Linear polarizer with a finite extinction ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarizer {
    /// Transmission axis, unit norm.
    pub axis: [f64; 2],
    /// Power extinction ratio (>= 1); 300 reproduces a 300:1 contrast.
    pub extinction: f64,
}

impl Polarizer {
    pub fn new(axis: [f64; 2], extinction: f64) -> Result<Self> {
        if extinction < 1.0 {
            return Err(Error::domain("polarizer extinction must be >= 1"));
        }
        Ok(Self { axis, extinction })
    }

    /// Keep probability for a photon polarized along `polarization`:
    /// `cos^2 theta + sin^2 theta / extinction`.
    #[inline]
    pub fn keep_probability(&self, polarization: [f64; 2]) -> f64 {
        let c = self.axis[0] * polarization[0] + self.axis[1] * polarization[1];
        let c2 = c * c;
        c2 + (1.0 - c2) / self.extinction
    }
}

/// Keep each event with the Malus-law probability for its polarization.
pub fn polarizer(
    events: &[PhotonEvent],
    axis: [f64; 2],
    extinction: f64,
    seed: u64,
) -> Result<Vec<PhotonEvent>> {
    let pol = Polarizer::new(axis, extinction)?;
    let mut rng = CounterRng::new(seed);
    Ok(events
        .iter()
        .filter(|e| rng.bernoulli(pol.keep_probability(e.polarization_axis)))
        .copied()
        .collect())
}

/// Single-photon counter parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detector {
    pub quantum_efficiency: f64,
    /// Gaussian timestamp noise, s.
    pub jitter_sigma: f64,
    /// Non-paralyzable dead time, s.
    pub dead_time: f64,
    /// Dark count rate, 1/s.
    pub dark_rate: f64,
    /// Timestamp quantization, s.
    pub tick: f64,
}

impl Default for Detector {
    fn default() -> Self {
        Self {
            quantum_efficiency: 0.7,
            jitter_sigma: DEFAULT_JITTER_SIGMA,
            dead_time: 50e-9,
            dark_rate: 100.0,
            tick: 4e-12,
        }
    }
}

impl Detector {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.quantum_efficiency) {
            return Err(Error::domain("quantum efficiency must be in [0, 1]"));
        }
        if self.jitter_sigma < 0.0 || self.dead_time < 0.0 || self.dark_rate < 0.0 {
            return Err(Error::domain("detector parameters must be >= 0"));
        }
        if self.tick <= 0.0 {
            return Err(Error::domain("timestamp tick must be positive"));
        }
        Ok(())
    }
}

/// One detected click, quantized to `tick` units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectorRecord {
    pub channel: u8,
    pub tick_count: u64,
}

/// Convert photon arrival times (already thinned and jittered) into records:
/// merge a Poisson dark stream, sort, apply dead time, quantize.
pub(crate) fn finalize_channel(
    mut times: Vec<f64>,
    det: &Detector,
    duration: f64,
    channel: u8,
    seed: u64,
) -> Vec<DetectorRecord> {
    if det.dark_rate > 0.0 {
        let mut rng = CounterRng::new(derive_seed(seed, 0xDA7C));
        let mut t = rng.exponential(det.dark_rate);
        while t < duration {
            times.push(t);
            t += rng.exponential(det.dark_rate);
        }
    }
    times.sort_unstable_by(f64::total_cmp);
    let mut out = Vec::with_capacity(times.len());
    let mut last_accept = f64::NEG_INFINITY;
    for t in times {
        if t - last_accept < det.dead_time {
            continue;
        }
        last_accept = t;
        let ticks = (t / det.tick).round();
        out.push(DetectorRecord {
            channel,
            tick_count: if ticks < 0.0 { 0 } else { ticks as u64 },
        });
    }
    out
}

/// Detect a photon stream on one channel.
///
/// Bernoulli thinning by `quantum_efficiency * collection_efficiency`, then
/// Gaussian jitter, dark counts, re-sorting, dead-time pruning and
/// quantization to `tick`.
pub fn detect(
    events: &[PhotonEvent],
    det: &Detector,
    collection_efficiency: f64,
    channel: u8,
    duration: f64,
    seed: u64,
) -> Result<Vec<DetectorRecord>> {
    det.validate()?;
    if !(0.0..=1.0).contains(&collection_efficiency) {
        return Err(Error::domain("collection efficiency must be in [0, 1]"));
    }
    let p = det.quantum_efficiency * collection_efficiency;
    let mut rng = CounterRng::new(derive_seed(seed, channel as u64));
    let mut times = Vec::new();
    for e in events {
        if rng.bernoulli(p) {
            times.push(e.time + rng.normal(det.jitter_sigma));
        }
    }
    Ok(finalize_channel(times, det, duration, channel, seed))
}
