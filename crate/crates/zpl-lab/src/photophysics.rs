//! Photophysics of a DBATT-like dye emitter.
//!
//! Deterministic formulas and parameter containers: Lorentzian lineshapes,
//! the lifetime-linewidth (Fourier) relation, Stark shifts, pump rates for
//! the two excitation schemes, and two-level saturation. Everything here is
//! a pure function; the stochastic machinery lives in [`crate::mc`].

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Convert a vacuum wavelength in nm to an optical frequency in Hz.
pub fn wavelength_nm_to_hz(lambda_nm: f64) -> f64 {
    SPEED_OF_LIGHT / (lambda_nm * 1e-9)
}

/// Convert an optical frequency in Hz to a vacuum wavelength in nm.
pub fn hz_to_wavelength_nm(nu: f64) -> f64 {
    SPEED_OF_LIGHT / nu * 1e9
}

/// Convert a spectroscopic wavenumber in cm^-1 to Hz.
pub fn wavenumber_per_cm_to_hz(k: f64) -> f64 {
    k * SPEED_OF_LIGHT * 100.0
}

/// Emission branching of the vibronic cascade.
///
/// `franck_condon` is the fraction of emission that stays in the 0-0 band;
/// within that band, `debye_waller` is the fraction in the zero-phonon line
/// rather than the phonon wing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchingFactors {
    pub franck_condon: f64,
    pub debye_waller: f64,
}

/// Per-band emission probabilities. Constructed so the three entries sum to
/// exactly 1.0 in floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandProbabilities {
    pub zpl: f64,
    pub phonon_wing: f64,
    pub stokes: f64,
}

impl BranchingFactors {
    pub fn new(franck_condon: f64, debye_waller: f64) -> Result<Self> {
        for (name, v) in [
            ("franck_condon", franck_condon),
            ("debye_waller", debye_waller),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::domain(format!("{name} must be in [0, 1], got {v}")));
            }
        }
        Ok(Self {
            franck_condon,
            debye_waller,
        })
    }

    /// {ZPL, phonon wing, Stokes} probabilities; the Stokes entry is defined
    /// as `1 - zpl - wing` so the sum is exact.
    pub fn band_probabilities(&self) -> BandProbabilities {
        let zpl = self.franck_condon * self.debye_waller;
        let phonon_wing = self.franck_condon * (1.0 - self.debye_waller);
        let stokes = 1.0 - (zpl + phonon_wing);
        BandProbabilities {
            zpl,
            phonon_wing,
            stokes,
        }
    }
}

impl Default for BranchingFactors {
    fn default() -> Self {
        Self {
            franck_condon: 0.4,
            debye_waller: 0.7,
        }
    }
}

/// Stark response of the 0-0 transition to a static field along the
/// electrode axis. `shift(0) = 0` by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarkResponse {
    /// Hz per (V/m).
    pub linear: f64,
    /// Hz per (V/m)^2.
    pub quadratic: f64,
}

impl Default for StarkResponse {
    fn default() -> Self {
        // 1 kHz/(V/m): 5e6 V/m across the electrodes gives a 5 GHz shift.
        Self {
            linear: 1.0e3,
            quadratic: 0.0,
        }
    }
}

/// Frequency shift in Hz under a static field in V/m.
pub fn stark_shift(field: f64, stark: &StarkResponse) -> f64 {
    stark.linear * field + stark.quadratic * field * field
}

/// Ideal parallel-gap field from an electrode voltage, V/m.
pub fn field_from_voltage(voltage: f64, gap: f64) -> Result<f64> {
    if gap <= 0.0 {
        return Err(Error::domain(format!(
            "electrode gap must be positive, got {gap} m"
        )));
    }
    Ok(voltage / gap)
}

/// A single vibronic emission line of the Stokes manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VibronicLine {
    /// Offset below the 0-0 ZPL, Hz (positive).
    pub offset: f64,
    /// Relative weight within the Stokes band.
    pub weight: f64,
    /// Lorentzian FWHM of the line, Hz.
    pub fwhm: f64,
}

/// Default Stokes manifold: three lines at 750/1250/1700 cm^-1 below the
/// ZPL with weights 0.5/0.3/0.2 and 30 GHz widths.
pub fn default_stokes_lines() -> Vec<VibronicLine> {
    [(750.0, 0.5), (1250.0, 0.3), (1700.0, 0.2)]
        .iter()
        .map(|&(k, w)| VibronicLine {
            offset: wavenumber_per_cm_to_hz(k),
            weight: w,
            fwhm: 30e9,
        })
        .collect()
}

/// Single emitter in the sample plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    /// Compact numeric id; scenario files map string names onto these.
    pub id: u32,
    /// (x, y) position in the sample plane, nm.
    pub position: [f64; 2],
    /// Absolute optical frequency of the unshifted 0-0 ZPL, Hz.
    pub nu00: f64,
    /// S1,v=0 lifetime, s.
    pub lifetime_s1: f64,
    /// S1,v=1 lifetime, s.
    pub lifetime_s1v1: f64,
    /// 0-1 transition offset above the 0-0 ZPL, Hz.
    pub vib_offset_01: f64,
    pub branching: BranchingFactors,
    pub stark: StarkResponse,
    /// In-plane transition-dipole direction, unit norm.
    pub dipole_axis: [f64; 2],
    /// Decay constant of the one-sided phonon wing, Hz.
    pub phonon_wing_width: f64,
    /// Stokes manifold composition.
    pub stokes_lines: Vec<VibronicLine>,
}

impl Molecule {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: u32,
        position: [f64; 2],
        nu00: f64,
        lifetime_s1: f64,
        lifetime_s1v1: f64,
        vib_offset_01: f64,
        branching: BranchingFactors,
        stark: StarkResponse,
        dipole_axis: [f64; 2],
    ) -> Result<Self> {
        let m = Self {
            id,
            position,
            nu00,
            lifetime_s1,
            lifetime_s1v1,
            vib_offset_01,
            branching,
            stark,
            dipole_axis,
            phonon_wing_width: 1e12,
            stokes_lines: default_stokes_lines(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lifetime_s1 <= 0.0 || self.lifetime_s1v1 <= 0.0 {
            return Err(Error::domain("lifetimes must be positive"));
        }
        if self.lifetime_s1v1 >= self.lifetime_s1 {
            return Err(Error::domain(format!(
                "S1,v=1 lifetime ({:.3e} s) must be shorter than S1,v=0 lifetime ({:.3e} s)",
                self.lifetime_s1v1, self.lifetime_s1
            )));
        }
        if self.vib_offset_01 <= 0.0 {
            return Err(Error::domain("vib_offset_01 must be positive"));
        }
        let n = (self.dipole_axis[0].powi(2) + self.dipole_axis[1].powi(2)).sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "dipole_axis must have unit norm (got |d| = {n})"
            )));
        }
        if self.phonon_wing_width <= 0.0 {
            return Err(Error::domain("phonon_wing_width must be positive"));
        }
        if self.stokes_lines.is_empty() {
            return Err(Error::domain("stokes_lines must not be empty"));
        }
        for l in &self.stokes_lines {
            if l.weight < 0.0 || l.fwhm <= 0.0 || l.offset <= 0.0 {
                return Err(Error::domain(
                    "stokes line needs offset > 0, weight >= 0, fwhm > 0",
                ));
            }
        }
        Ok(())
    }

    /// Unit vector at `angle` radians from the x axis.
    pub fn axis_from_angle(angle: f64) -> [f64; 2] {
        [angle.cos(), angle.sin()]
    }

    /// Spontaneous decay rate of S1,v=0, 1/s.
    pub fn gamma(&self) -> f64 {
        1.0 / self.lifetime_s1
    }

    /// 0-0 ZPL center under the given static field, Hz.
    pub fn zpl_center(&self, field: f64) -> f64 {
        self.nu00 + stark_shift(field, &self.stark)
    }

    /// Natural FWHM of the 0-0 ZPL, Hz.
    pub fn zpl_fwhm(&self) -> f64 {
        fourier_limited_fwhm(self.lifetime_s1).expect("validated lifetime")
    }

    /// Center and natural FWHM of the transition pumped by `scheme`,
    /// including the Stark shift.
    pub fn transition(&self, scheme: ExcitationScheme, field: f64) -> (f64, f64) {
        match scheme {
            ExcitationScheme::Zpl00 => (self.zpl_center(field), self.zpl_fwhm()),
            ExcitationScheme::Pump01 => (
                self.zpl_center(field) + self.vib_offset_01,
                fourier_limited_fwhm(self.lifetime_s1v1).expect("validated lifetime"),
            ),
        }
    }
}

/// Narrow-band excitation laser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserField {
    /// Absolute optical frequency, Hz.
    pub frequency: f64,
    /// Power at the sample, W.
    pub power: f64,
    /// Lorentzian linewidth, Hz.
    pub linewidth: f64,
    /// Linear polarization direction, unit norm.
    pub polarization_axis: [f64; 2],
    /// Focus position in the sample plane, nm.
    pub focus_position: [f64; 2],
}

impl LaserField {
    pub fn validate(&self) -> Result<()> {
        if self.power < 0.0 {
            return Err(Error::domain("laser power must be >= 0"));
        }
        if self.linewidth < 0.0 {
            return Err(Error::domain("laser linewidth must be >= 0"));
        }
        let n = (self.polarization_axis[0].powi(2) + self.polarization_axis[1].powi(2)).sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::domain("laser polarization must have unit norm"));
        }
        Ok(())
    }
}

/// Which transition the laser pumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcitationScheme {
    /// Resonant 0-0 excitation; Stokes-shifted emission is detected.
    Zpl00,
    /// 0-1 excitation 242 cm^-1 above the ZPL; 0-0 emission is detected.
    Pump01,
}

/// Pump-rate calibration: the power at which each scheme reaches saturation
/// parameter s = 1 on resonance (dipole aligned, focus centered).
///
/// The 0-1 cross section is two orders of magnitude smaller per unit power,
/// so its saturation power is 100x larger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpCalibration {
    /// W; default 1 nW.
    pub sat_power_zpl00: f64,
    /// W; default 100 nW.
    pub sat_power_pump01: f64,
}

impl Default for PumpCalibration {
    fn default() -> Self {
        Self {
            sat_power_zpl00: 1e-9,
            sat_power_pump01: 100e-9,
        }
    }
}

impl PumpCalibration {
    pub fn sat_power(&self, scheme: ExcitationScheme) -> f64 {
        match scheme {
            ExcitationScheme::Zpl00 => self.sat_power_zpl00,
            ExcitationScheme::Pump01 => self.sat_power_pump01,
        }
    }
}

/// Unit-area Lorentzian spectral density, 1/Hz.
///
/// `(fwhm/2pi) / ((nu - nu0)^2 + (fwhm/2)^2)`; integrates to 1 over the real
/// line.
pub fn lorentzian_profile(nu: f64, nu0: f64, fwhm: f64) -> Result<f64> {
    if fwhm <= 0.0 {
        return Err(Error::domain(format!(
            "lorentzian fwhm must be positive, got {fwhm}"
        )));
    }
    Ok(lorentzian_density(nu, nu0, fwhm))
}

/// Unchecked Lorentzian density for hot paths; caller guarantees `fwhm > 0`.
#[inline]
pub(crate) fn lorentzian_density(nu: f64, nu0: f64, fwhm: f64) -> f64 {
    let d = nu - nu0;
    let h = 0.5 * fwhm;
    fwhm / (std::f64::consts::TAU * (d * d + h * h))
}

/// Peak value of the unit-area Lorentzian, `2 / (pi * fwhm)`.
#[inline]
pub(crate) fn lorentzian_peak(fwhm: f64) -> f64 {
    2.0 / (std::f64::consts::PI * fwhm)
}

/// Fourier-limited linewidth of a transition with the given lifetime:
/// `1 / (2 pi * lifetime)`, Hz.
pub fn fourier_limited_fwhm(lifetime: f64) -> Result<f64> {
    if lifetime <= 0.0 {
        return Err(Error::domain(format!(
            "lifetime must be positive, got {lifetime}"
        )));
    }
    Ok(1.0 / (std::f64::consts::TAU * lifetime))
}

/// Diffraction-limited Gaussian PSF width, nm: `0.51 * lambda / NA`.
pub fn diffraction_limited_fwhm_nm(wavelength_nm: f64, na: f64) -> f64 {
    0.51 * wavelength_nm / na
}

/// Gaussian point-spread weight at `distance_nm` from the focus, normalized
/// to 1 on axis.
#[inline]
pub fn psf_weight(distance_nm: f64, psf_fwhm_nm: f64) -> f64 {
    if psf_fwhm_nm <= 0.0 {
        return 1.0;
    }
    let sigma = psf_fwhm_nm / (8.0 * std::f64::consts::LN_2).sqrt();
    (-0.5 * (distance_nm / sigma).powi(2)).exp()
}

/// Un-saturated pump rate of `mol` by `laser` under `scheme`, 1/s.
///
/// `R = sigma_rel * power * L(nu_laser; center + stark, fwhm_eff) * cos^2
/// (theta) * psf_weight(|focus - position|)` where `fwhm_eff` is the
/// transition's Fourier-limited width plus the laser linewidth (exact for a
/// Lorentzian-Lorentzian convolution) and `sigma_rel` is fixed by the
/// requirement that `calib.sat_power(scheme)` on resonance gives `R = gamma`
/// (saturation parameter 1).
pub fn excitation_rate(
    laser: &LaserField,
    mol: &Molecule,
    scheme: ExcitationScheme,
    static_field: f64,
    psf_fwhm_nm: f64,
    calib: &PumpCalibration,
) -> f64 {
    let (center, natural_fwhm) = mol.transition(scheme, static_field);
    let fwhm_eff = natural_fwhm + laser.linewidth;
    let sigma_rel = mol.gamma() / (calib.sat_power(scheme) * lorentzian_peak(fwhm_eff));
    let cos = laser.polarization_axis[0] * mol.dipole_axis[0]
        + laser.polarization_axis[1] * mol.dipole_axis[1];
    let dx = laser.focus_position[0] - mol.position[0];
    let dy = laser.focus_position[1] - mol.position[1];
    let dist = (dx * dx + dy * dy).sqrt();
    sigma_rel
        * laser.power
        * lorentzian_density(laser.frequency, center, fwhm_eff)
        * cos
        * cos
        * psf_weight(dist, psf_fwhm_nm)
}

/// Steady state of the incoherent two-level pump/decay cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saturation {
    /// Steady-state excited population `R / (R + gamma)`.
    pub excited_population: f64,
    /// Total emitted photon rate `p * gamma`, 1/s.
    pub emitted_rate: f64,
    /// Rate constant of the antibunching recovery, `R + gamma`, 1/s.
    pub antibunching_rate: f64,
}

/// Solve the two-level rate equations for a pump rate `rate_pump` and decay
/// rate `gamma`.
pub fn saturation(rate_pump: f64, gamma: f64) -> Result<Saturation> {
    if gamma <= 0.0 {
        return Err(Error::domain("gamma must be positive"));
    }
    if rate_pump < 0.0 {
        return Err(Error::domain("pump rate must be >= 0"));
    }
    let p = rate_pump / (rate_pump + gamma);
    Ok(Saturation {
        excited_population: p,
        emitted_rate: p * gamma,
        antibunching_rate: rate_pump + gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_molecule() -> Molecule {
        Molecule::new(
            0,
            [0.0, 0.0],
            wavelength_nm_to_hz(590.0),
            9.4e-9,
            1.0 / (std::f64::consts::TAU * 28e9),
            wavenumber_per_cm_to_hz(242.0),
            BranchingFactors::default(),
            StarkResponse::default(),
            [1.0, 0.0],
        )
        .unwrap()
    }

    fn default_laser(frequency: f64, power: f64) -> LaserField {
        LaserField {
            frequency,
            power,
            linewidth: 1e6,
            polarization_axis: [1.0, 0.0],
            focus_position: [0.0, 0.0],
        }
    }

    #[test]
    fn lorentzian_peak_value() {
        // Unit-area Lorentzian peak: 2 / (pi * fwhm).
        let v = lorentzian_profile(0.0, 0.0, 17e6).unwrap();
        assert!((v - 3.745e-8).abs() / 3.745e-8 < 1e-3);
        // Half the peak at one half-width detuning.
        let h = lorentzian_profile(8.5e6, 0.0, 17e6).unwrap();
        assert!((h - v / 2.0).abs() / v < 1e-12);
    }

    #[test]
    fn lorentzian_normalization_quadrature() {
        // Trapezoid-rule oracle over +-1e4 fwhm.
        let fwhm = 17e6;
        let span = 1e4 * fwhm;
        let n = 2_000_000usize;
        let dx = 2.0 * span / n as f64;
        let mut sum = 0.0;
        for i in 0..=n {
            let x = -span + i as f64 * dx;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            sum += w * lorentzian_density(x, 0.0, fwhm);
        }
        sum *= dx;
        assert!(
            (sum - 1.0).abs() < 1e-4,
            "integral {sum} should be 1 within 1e-4"
        );
    }

    #[test]
    fn lorentzian_rejects_bad_fwhm() {
        assert!(lorentzian_profile(0.0, 0.0, 0.0).is_err());
        assert!(lorentzian_profile(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn fourier_limit_examples() {
        let f = fourier_limited_fwhm(9.4e-9).unwrap();
        assert!((f - 16.93e6).abs() < 0.01e6, "9.4 ns -> 16.93 MHz, got {f}");
        let g = fourier_limited_fwhm(5e-12).unwrap();
        assert!((g - 31.8e9).abs() < 0.1e9, "5 ps -> 31.8 GHz, got {g}");
        // Inverse proportionality.
        let h = fourier_limited_fwhm(2.0 * 9.4e-9).unwrap();
        assert!((h - f / 2.0).abs() / f < 1e-12);
        assert!(fourier_limited_fwhm(0.0).is_err());
    }

    #[test]
    fn fourier_limit_product_is_one() {
        for t in [5e-12, 1e-9, 9.4e-9, 1.0] {
            let f = fourier_limited_fwhm(t).unwrap();
            let prod = f * (std::f64::consts::TAU * t);
            assert!((prod - 1.0).abs() <= 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn stark_examples() {
        let s = StarkResponse::default();
        assert_eq!(stark_shift(0.0, &s), 0.0);
        assert!((stark_shift(5e6, &s) - 5e9).abs() < 1.0);
        assert!((stark_shift(1.167e6, &s) - 1.167e9).abs() < 1.0);
    }

    #[test]
    fn stark_is_odd_when_linear() {
        let s = StarkResponse::default();
        for f in [1.0, 1e3, 5e6, 2.3e4] {
            assert_eq!(stark_shift(-f, &s), -stark_shift(f, &s));
        }
    }

    #[test]
    fn field_from_voltage_examples() {
        let f = field_from_voltage(21.0, 18e-6).unwrap();
        assert!((f - 1.1667e6).abs() < 1e2);
        assert_eq!(field_from_voltage(0.0, 18e-6).unwrap(), 0.0);
        let g = field_from_voltage(90.0, 18e-6).unwrap();
        assert!((g - 5e6).abs() < 1.0);
        assert!(field_from_voltage(1.0, 0.0).is_err());
    }

    #[test]
    fn band_probabilities_sum_exactly() {
        for (fc, dw) in [(0.4, 0.7), (0.9, 0.1), (0.123, 0.456), (1.0, 0.0), (0.0, 1.0)] {
            let b = BranchingFactors::new(fc, dw).unwrap();
            let p = b.band_probabilities();
            assert_eq!(p.zpl + p.phonon_wing + p.stokes, 1.0, "fc={fc} dw={dw}");
            assert!(p.zpl >= 0.0 && p.phonon_wing >= 0.0 && p.stokes >= 0.0);
        }
        assert!(BranchingFactors::new(1.2, 0.5).is_err());
    }

    #[test]
    fn excitation_rate_detuned_and_crossed() {
        let mol = test_molecule();
        let calib = PumpCalibration::default();
        let on = default_laser(mol.nu00, 1e-9);
        let r_on = excitation_rate(&on, &mol, ExcitationScheme::Zpl00, 0.0, 0.0, &calib);
        // Calibration: 1 nW on resonance gives R = gamma exactly.
        assert!((r_on - mol.gamma()).abs() / mol.gamma() < 1e-12);

        let fwhm_eff = mol.zpl_fwhm() + 1e6;
        let far = default_laser(mol.nu00 + 150.0 * fwhm_eff, 1e-9);
        let r_far = excitation_rate(&far, &mol, ExcitationScheme::Zpl00, 0.0, 0.0, &calib);
        assert!(r_far < 1e-4 * r_on);

        let crossed = LaserField {
            polarization_axis: [0.0, 1.0],
            ..on
        };
        let r_crossed = excitation_rate(&crossed, &mol, ExcitationScheme::Zpl00, 0.0, 0.0, &calib);
        assert_eq!(r_crossed, 0.0);
    }

    #[test]
    fn pump_scheme_power_parity() {
        // 100 nW on the 0-1 resonance matches 1 nW on the ZPL within 20%.
        let mol = test_molecule();
        let calib = PumpCalibration::default();
        let zpl = default_laser(mol.nu00, 1e-9);
        let r_zpl = excitation_rate(&zpl, &mol, ExcitationScheme::Zpl00, 0.0, 0.0, &calib);
        let pump = default_laser(mol.nu00 + mol.vib_offset_01, 100e-9);
        let r_01 = excitation_rate(&pump, &mol, ExcitationScheme::Pump01, 0.0, 0.0, &calib);
        assert!(
            (r_01 / r_zpl - 1.0).abs() < 0.2,
            "r_01 = {r_01}, r_zpl = {r_zpl}"
        );
    }

    #[test]
    fn excitation_rate_dipole_sign_flip() {
        let mut mol = test_molecule();
        mol.dipole_axis = Molecule::axis_from_angle(0.7);
        let calib = PumpCalibration::default();
        let mut laser = default_laser(mol.nu00, 1e-9);
        laser.polarization_axis = Molecule::axis_from_angle(0.2);
        let r1 = excitation_rate(&laser, &mol, ExcitationScheme::Zpl00, 0.0, 0.0, &calib);
        mol.dipole_axis = [-mol.dipole_axis[0], -mol.dipole_axis[1]];
        let r2 = excitation_rate(&laser, &mol, ExcitationScheme::Zpl00, 0.0, 0.0, &calib);
        assert_eq!(r1, r2);
    }

    #[test]
    fn stark_shift_moves_excitation_center() {
        let mol = test_molecule();
        let calib = PumpCalibration::default();
        let field = 1.167e6;
        let shifted = default_laser(mol.nu00 + stark_shift(field, &mol.stark), 1e-9);
        let r = excitation_rate(&shifted, &mol, ExcitationScheme::Zpl00, field, 0.0, &calib);
        assert!((r - mol.gamma()).abs() / mol.gamma() < 1e-9);
    }

    #[test]
    fn saturation_examples() {
        let gamma = 1.0 / 9.4e-9;
        let s = saturation(gamma, gamma).unwrap();
        assert!((s.excited_population - 0.5).abs() < 1e-14);
        assert!((s.emitted_rate - gamma / 2.0).abs() < 1e-3);

        // Antibunching time of 5.5 ns fixes R = 1/5.5 - 1/9.4 per ns.
        let k = 1.0 / 5.5e-9;
        let r = k - gamma;
        assert!((r * 1e-9 - 0.07543).abs() < 1e-5, "R = {} /ns", r * 1e-9);
        let s2 = saturation(r, gamma).unwrap();
        assert!((s2.antibunching_rate - k).abs() / k < 1e-12);

        // Full saturation approaches gamma.
        let s3 = saturation(1e6 * gamma, gamma).unwrap();
        assert!((s3.emitted_rate - gamma).abs() / gamma < 1e-5);
        assert!((gamma - 1.064e8).abs() < 1e5);
    }

    #[test]
    fn saturation_monotone_and_bounded() {
        let gamma = 1.0 / 9.4e-9;
        let mut last = -1.0;
        for i in 0..60 {
            let r = 10f64.powf(-2.0 + i as f64 * 0.2) * gamma;
            let s = saturation(r, gamma).unwrap();
            assert!(s.excited_population > last);
            assert!(s.excited_population < 1.0);
            assert!(s.emitted_rate < gamma);
            last = s.excited_population;
        }
        assert!(saturation(-1.0, gamma).is_err());
        assert!(saturation(1.0, 0.0).is_err());
    }

    #[test]
    fn psf_matches_diffraction_limit() {
        let f = diffraction_limited_fwhm_nm(590.0, 1.12);
        assert!((f - 268.66).abs() < 0.05);
        // Half weight at half the fwhm from the axis.
        let w = psf_weight(f / 2.0, f);
        assert!((w - 0.5).abs() < 1e-12);
    }

    #[test]
    fn molecule_invariants_enforced() {
        let m = test_molecule();
        assert!(m.validate().is_ok());
        let mut bad = m.clone();
        bad.lifetime_s1v1 = 2.0 * bad.lifetime_s1;
        assert!(bad.validate().is_err());
        let mut bad2 = m.clone();
        bad2.dipole_axis = [0.9, 0.0];
        assert!(bad2.validate().is_err());
        let mut bad3 = m;
        bad3.vib_offset_01 = -1.0;
        assert!(bad3.validate().is_err());
    }
}
