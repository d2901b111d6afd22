//! Click statistics of a beamsplitter followed by two bucket detectors.
//!
//! An `n`-photon Fock state hits a beamsplitter with reflectivity
//! `reflectivity`. Each photon independently goes to the reflected port with
//! that probability, is then lost with the detector's `loss` probability, and
//! each detector additionally fires a dark count with probability
//! `dark_count` once per window. A bucket detector only reports whether at
//! least one thing (photon or dark count) arrived.
//!
//! Because the model is diagonal in photon number, each of the four click
//! patterns corresponds to a POVM element `sum_n P_s(n) |n><n|`, which
//! [`SignatureTable`] stores as columns of `P_s(n)`.

use std::fmt;

use crate::{check_probability, Result};

/// Loss and dark-count probabilities of one on/off detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    loss: f64,
    dark_count: f64,
}

impl DetectorParams {
    /// `loss` is the per-photon probability of not registering,
    /// `dark_count` the probability of a spurious click per window.
    pub fn new(loss: f64, dark_count: f64) -> Result<Self> {
        Ok(Self {
            loss: check_probability("loss", loss)?,
            dark_count: check_probability("dark_count", dark_count)?,
        })
    }

    pub const IDEAL: Self = Self {
        loss: 0.0,
        dark_count: 0.0,
    };

    pub fn loss(&self) -> f64 {
        self.loss
    }

    pub fn dark_count(&self) -> f64 {
        self.dark_count
    }

    /// Probability that the detector stays silent when `photons` arrive.
    ///
    /// `loss^photons * (1 - dark_count)`, with `0^0 = 1`.
    pub fn silence_prob(&self, photons: u32) -> f64 {
        powu(self.loss, photons) * (1.0 - self.dark_count)
    }

    pub fn click_prob(&self, photons: u32) -> f64 {
        1.0 - self.silence_prob(photons)
    }

    fn outcome_prob(&self, photons: u32, clicked: bool) -> f64 {
        if clicked {
            self.click_prob(photons)
        } else {
            self.silence_prob(photons)
        }
    }
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self::IDEAL
    }
}

/// Beamsplitter reflectivity plus the detectors on its two output ports.
///
/// Detector 1 sits on the reflected port, detector 2 on the transmitted one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPortConfig {
    reflectivity: f64,
    detector_reflected: DetectorParams,
    detector_transmitted: DetectorParams,
}

impl TwoPortConfig {
    pub fn new(
        reflectivity: f64,
        detector_reflected: DetectorParams,
        detector_transmitted: DetectorParams,
    ) -> Result<Self> {
        Ok(Self {
            reflectivity: check_probability("reflectivity", reflectivity)?,
            detector_reflected,
            detector_transmitted,
        })
    }

    /// Both ports equipped with identical detectors.
    pub fn symmetric(reflectivity: f64, detector: DetectorParams) -> Result<Self> {
        Self::new(reflectivity, detector, detector)
    }

    pub fn reflectivity(&self) -> f64 {
        self.reflectivity
    }

    pub fn detector_reflected(&self) -> DetectorParams {
        self.detector_reflected
    }

    pub fn detector_transmitted(&self) -> DetectorParams {
        self.detector_transmitted
    }

    /// Same detectors, different reflectivity.
    pub fn with_reflectivity(&self, reflectivity: f64) -> Result<Self> {
        Self::new(
            reflectivity,
            self.detector_reflected,
            self.detector_transmitted,
        )
    }
}

/// Joint click pattern of the two detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub detector1_clicked: bool,
    pub detector2_clicked: bool,
}

impl Signature {
    /// Click on the reflected port, silence on the transmitted one.
    pub const HERALD: Self = Self::new(true, false);

    pub const ALL: [Self; 4] = [
        Self::new(false, false),
        Self::new(true, false),
        Self::new(false, true),
        Self::new(true, true),
    ];

    pub const fn new(detector1_clicked: bool, detector2_clicked: bool) -> Self {
        Self {
            detector1_clicked,
            detector2_clicked,
        }
    }

    /// Position of this signature in [`Signature::ALL`].
    pub const fn index(self) -> usize {
        self.detector1_clicked as usize | (self.detector2_clicked as usize) << 1
    }

    /// The same pattern with the two detectors exchanged.
    pub const fn mirrored(self) -> Self {
        Self::new(self.detector2_clicked, self.detector1_clicked)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = |c| if c { "click" } else { "silent" };
        write!(
            f,
            "({}, {})",
            word(self.detector1_clicked),
            word(self.detector2_clicked)
        )
    }
}

/// `base^exp` with `0^0 = 1`.
fn powu(base: f64, exp: u32) -> f64 {
    match i32::try_from(exp) {
        Ok(e) => base.powi(e),
        Err(_) => base.powf(exp as f64),
    }
}

/// Click probability of a single bucket detector hit by `photons_arriving` photons.
pub fn single_detector_click_prob(photons_arriving: u32, det: &DetectorParams) -> f64 {
    det.click_prob(photons_arriving)
}

/// Above this photon number the binomial weights are evaluated in log space,
/// since `C(n, i)` overflows an `f64` near `n = 1030`.
const LOG_SPACE_THRESHOLD: u32 = 512;

/// Probability of observing `sig` when `n` photons enter the two-port network.
///
/// Sums over the number `i` of reflected photons,
/// `C(n,i) r^i (1-r)^(n-i) * p1(sig.1 | i) * p2(sig.2 | n-i)`.
pub fn signature_prob(n: u32, sig: Signature, cfg: &TwoPortConfig) -> f64 {
    let r = cfg.reflectivity;
    let t = 1.0 - r;
    let d1 = &cfg.detector_reflected;
    let d2 = &cfg.detector_transmitted;
    let large = n > LOG_SPACE_THRESHOLD;
    let (ln_r, ln_t) = (r.ln(), t.ln());

    let mut binom = 1.0_f64;
    let mut ln_binom = 0.0_f64;
    let mut total = 0.0;
    for i in 0..=n {
        if i > 0 {
            let step = f64::from(n - i + 1) / f64::from(i);
            if large {
                ln_binom += step.ln();
            } else {
                binom *= step;
            }
        }
        let routing = if !large {
            binom * powu(r, i) * powu(t, n - i)
        } else if (r == 0.0 && i > 0) || (t == 0.0 && i < n) {
            0.0
        } else {
            let ln_r_part = if i == 0 { 0.0 } else { f64::from(i) * ln_r };
            let ln_t_part = if i == n { 0.0 } else { f64::from(n - i) * ln_t };
            (ln_binom + ln_r_part + ln_t_part).exp()
        };
        if routing == 0.0 {
            continue;
        }
        total += routing
            * d1.outcome_prob(i, sig.detector1_clicked)
            * d2.outcome_prob(n - i, sig.detector2_clicked);
    }
    total.clamp(0.0, 1.0)
}

/// Diagonal POVM weights `P_s(n)` for all four signatures, `n = 0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureTable {
    cutoff: u32,
    probs: [Vec<f64>; 4],
}

impl SignatureTable {
    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// `P_sig(n)` for `n = 0..=cutoff`.
    pub fn column(&self, sig: Signature) -> &[f64] {
        &self.probs[sig.index()]
    }

    pub fn herald(&self) -> &[f64] {
        self.column(Signature::HERALD)
    }

    pub fn get(&self, sig: Signature, n: u32) -> Option<f64> {
        self.column(sig).get(n as usize).copied()
    }

    /// Sum over the four signatures at each photon number. Should be all ones.
    pub fn completeness(&self) -> Vec<f64> {
        (0..=self.cutoff as usize)
            .map(|n| self.probs.iter().map(|col| col[n]).sum())
            .collect()
    }
}

/// Tabulates every signature column up to `cutoff`.
pub fn herald_prob_table(cfg: &TwoPortConfig, cutoff: u32) -> SignatureTable {
    let probs =
        Signature::ALL.map(|sig| (0..=cutoff).map(|n| signature_prob(n, sig, cfg)).collect());
    SignatureTable { cutoff, probs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Exhaustive enumeration over routing, loss and dark-count outcomes.
    fn brute_force(n: u32, sig: Signature, cfg: &TwoPortConfig) -> f64 {
        let r = cfg.reflectivity();
        let (d1, d2) = (cfg.detector_reflected(), cfg.detector_transmitted());
        let mut total = 0.0;
        for routing in 0u32..(1 << n) {
            for lost in 0u32..(1 << n) {
                for dark in 0u32..4 {
                    let mut p = 1.0;
                    let (mut hits1, mut hits2) = (0, 0);
                    for k in 0..n {
                        let reflected = routing >> k & 1 == 1;
                        let is_lost = lost >> k & 1 == 1;
                        let det = if reflected { d1 } else { d2 };
                        p *= if reflected { r } else { 1.0 - r };
                        p *= if is_lost {
                            det.loss()
                        } else {
                            1.0 - det.loss()
                        };
                        if !is_lost {
                            if reflected {
                                hits1 += 1;
                            } else {
                                hits2 += 1;
                            }
                        }
                    }
                    let dark1 = dark & 1 == 1;
                    let dark2 = dark & 2 == 2;
                    p *= if dark1 {
                        d1.dark_count()
                    } else {
                        1.0 - d1.dark_count()
                    };
                    p *= if dark2 {
                        d2.dark_count()
                    } else {
                        1.0 - d2.dark_count()
                    };
                    let observed = Signature::new(hits1 > 0 || dark1, hits2 > 0 || dark2);
                    if observed == sig {
                        total += p;
                    }
                }
            }
        }
        total
    }

    /// Term-by-term transcription of the herald probability with shared detectors.
    fn herald_literal(n: u32, r: f64, loss: f64, dark: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..=n {
            let binom = (1..=i).fold(1.0, |acc, k| acc * f64::from(n - k + 1) / f64::from(k));
            total += binom
                * r.powi(i as i32)
                * (1.0 - r).powi((n - i) as i32)
                * loss.powi((n - i) as i32)
                * (1.0 - dark)
                * (loss.powi(i as i32) * dark + (1.0 - loss.powi(i as i32)));
        }
        total
    }

    fn cfg(r: f64, loss: f64, dark: f64) -> TwoPortConfig {
        TwoPortConfig::symmetric(r, DetectorParams::new(loss, dark).unwrap()).unwrap()
    }

    #[test]
    fn click_prob_examples() {
        let det = DetectorParams::new(0.3, 0.0).unwrap();
        assert_eq!(single_detector_click_prob(0, &det), 0.0);
        assert_eq!(single_detector_click_prob(1, &DetectorParams::IDEAL), 1.0);
        let det = DetectorParams::new(0.5, 0.1).unwrap();
        assert_abs_diff_eq!(single_detector_click_prob(2, &det), 0.775, epsilon = 1e-15);
    }

    #[test]
    fn click_prob_matches_enumeration() {
        let (loss, dark) = (0.5, 0.1);
        let det = DetectorParams::new(loss, dark).unwrap();
        let mut click = 0.0;
        for lost in 0..4u32 {
            let p_loss: f64 = (0..2)
                .map(|k| if lost >> k & 1 == 1 { loss } else { 1.0 - loss })
                .product();
            for dark_fired in [false, true] {
                let p = p_loss * if dark_fired { dark } else { 1.0 - dark };
                if lost != 3 || dark_fired {
                    click += p;
                }
            }
        }
        assert_abs_diff_eq!(det.click_prob(2), click, epsilon = 1e-15);
    }

    #[test]
    fn zero_loss_zero_photons_is_silent() {
        let det = DetectorParams::new(0.0, 0.2).unwrap();
        assert_eq!(det.silence_prob(0), 0.8);
        assert_eq!(det.silence_prob(3), 0.0);
    }

    #[test]
    fn signature_prob_examples() {
        assert_abs_diff_eq!(
            signature_prob(2, Signature::HERALD, &cfg(0.5, 0.0, 0.0)),
            0.25,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            signature_prob(1, Signature::HERALD, &cfg(0.3, 0.2, 0.0)),
            0.24,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            brute_force(1, Signature::HERALD, &cfg(0.3, 0.2, 0.0)),
            0.24,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            signature_prob(0, Signature::new(false, false), &cfg(0.4, 0.0, 0.01)),
            0.9801,
            epsilon = 1e-15
        );
        for n in 1..10 {
            assert_eq!(
                signature_prob(n, Signature::HERALD, &cfg(1.0, 0.0, 0.0)),
                1.0
            );
        }
    }

    #[test]
    fn brute_force_equivalence() {
        let grid = [0.0, 0.2, 0.5, 0.9, 1.0];
        for n in 0..=5 {
            for &r in &grid {
                for &loss in &grid {
                    for &dark in &[0.0, 0.01, 0.5] {
                        let c = cfg(r, loss, dark);
                        for sig in Signature::ALL {
                            assert_abs_diff_eq!(
                                signature_prob(n, sig, &c),
                                brute_force(n, sig, &c),
                                epsilon = 1e-12
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn asymmetric_detectors_match_enumeration() {
        let c = TwoPortConfig::new(
            0.35,
            DetectorParams::new(0.1, 0.02).unwrap(),
            DetectorParams::new(0.6, 0.001).unwrap(),
        )
        .unwrap();
        for n in 0..=6 {
            for sig in Signature::ALL {
                assert_abs_diff_eq!(
                    signature_prob(n, sig, &c),
                    brute_force(n, sig, &c),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn table_examples() {
        let t = herald_prob_table(&cfg(0.5, 0.0, 0.0), 1);
        assert_eq!(t.herald(), &[0.0, 0.5]);
        let t = herald_prob_table(&cfg(0.0, 0.0, 0.0), 8);
        assert!(t.herald().iter().all(|&p| p == 0.0));
        let t = herald_prob_table(&cfg(0.37, 0.2, 0.05), 4);
        for s in t.completeness() {
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        }
        for n in 0..=4 {
            assert_eq!(
                t.get(Signature::HERALD, n).unwrap(),
                signature_prob(n, Signature::HERALD, &cfg(0.37, 0.2, 0.05))
            );
        }
    }

    #[test]
    fn large_photon_numbers_stay_finite() {
        for r in [0.0, 1e-3, 0.5, 0.97, 1.0] {
            let c = cfg(r, 0.3, 1e-4);
            for n in [LOG_SPACE_THRESHOLD, LOG_SPACE_THRESHOLD + 1, 1500, 5000] {
                let sum: f64 = Signature::ALL
                    .iter()
                    .map(|&s| signature_prob(n, s, &c))
                    .sum();
                assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-9);
            }
        }
        // ideal detectors: herald probability is r^n exactly
        let c = cfg(0.999, 0.0, 0.0);
        assert_abs_diff_eq!(
            signature_prob(2000, Signature::HERALD, &c),
            0.999f64.powi(2000),
            epsilon = 1e-12
        );
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(DetectorParams::new(-0.1, 0.0).is_err());
        assert!(DetectorParams::new(0.0, 1.5).is_err());
        assert!(DetectorParams::new(f64::NAN, 0.0).is_err());
        assert!(TwoPortConfig::symmetric(1.01, DetectorParams::IDEAL).is_err());
    }

    #[test]
    fn signature_indexing() {
        for (k, sig) in Signature::ALL.into_iter().enumerate() {
            assert_eq!(sig.index(), k);
        }
        assert_eq!(Signature::HERALD.to_string(), "(click, silent)");
    }

    fn prob() -> impl Strategy<Value = f64> {
        prop_oneof![Just(0.0), Just(1.0), 0.0..=1.0]
    }

    proptest! {
        #[test]
        fn completeness_and_range(
            r in prob(), l1 in prob(), d1 in prob(), l2 in prob(), d2 in prob(), n in 0u32..60
        ) {
            let c = TwoPortConfig::new(
                r,
                DetectorParams::new(l1, d1).unwrap(),
                DetectorParams::new(l2, d2).unwrap(),
            ).unwrap();
            let mut sum = 0.0;
            for sig in Signature::ALL {
                let p = signature_prob(n, sig, &c);
                prop_assert!((0.0..=1.0).contains(&p));
                sum += p;
            }
            prop_assert!((sum - 1.0).abs() <= 1e-12, "sum = {}", sum);
        }

        #[test]
        fn mirror_symmetry_exact_on_dyadic_ratios(k in 0u32..=64, loss in prob(), dark in prob(), n in 0u32..40) {
            let r = f64::from(k) / 64.0;
            let a = cfg(r, loss, dark);
            let b = cfg(1.0 - r, loss, dark);
            let x = signature_prob(n, Signature::HERALD, &a);
            let y = signature_prob(n, Signature::HERALD.mirrored(), &b);
            prop_assert!((x - y).abs() <= 4.0 * f64::EPSILON);
        }

        #[test]
        fn mirror_symmetry(r in prob(), loss in prob(), dark in prob(), n in 0u32..40) {
            let a = cfg(r, loss, dark);
            let b = cfg(1.0 - r, loss, dark);
            for sig in Signature::ALL {
                let (x, y) = (signature_prob(n, sig, &a), signature_prob(n, sig.mirrored(), &b));
                // 1 - (1 - r) need not round back to r
                prop_assert!((x - y).abs() <= 1e-13, "{} vs {}", x, y);
            }
        }

        #[test]
        fn herald_matches_literal_form(r in prob(), loss in prob(), dark in prob(), n in 0u32..30) {
            let got = signature_prob(n, Signature::HERALD, &cfg(r, loss, dark));
            prop_assert!((got - herald_literal(n, r, loss, dark)).abs() <= 1e-12);
        }
    }
}
