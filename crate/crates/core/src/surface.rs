//! Yamabe invariants of compact complex surfaces from their numerical
//! invariants.
//!
//! For `b₁` even the sign of `Y(M)` is decided by the Kodaira dimension:
//! positive for `−∞`, zero for `0` and `1`, negative for `2`. For general
//! type `Y(M) = Y(X) = −4π√(2c₁²(X))` where `X` is the minimal model, and
//! `∫s² dμ ≥ 32π²c₁²(X)` is the matching sharp bound. Blowing up adds a copy
//! of the reversed projective plane: `χ += 1`, `τ −= 1`, `c₁² −= 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kodaira {
    #[serde(alias = "-inf", alias = "minus_infinity")]
    MinusInfinity,
    #[serde(alias = "0")]
    Zero,
    #[serde(alias = "1")]
    One,
    #[serde(alias = "2")]
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    #[serde(alias = "even")]
    Even,
    #[serde(alias = "odd")]
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceData {
    pub kod: Kodaira,
    pub b1_parity: Parity,
    /// `c₁²` of the minimal model.
    pub c1sq_min: i64,
    pub chi: i64,
    pub tau: i64,
    pub blowups: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum YamabeSign {
    Positive,
    Zero,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialCase {
    /// The invariant is attained by the Fubini-Study metric; no number is
    /// recorded.
    FubiniStudy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YamabeAnswer {
    pub sign: YamabeSign,
    pub value: Option<f64>,
    pub value_known: bool,
    pub special: Option<SpecialCase>,
}

impl SurfaceData {
    pub fn new(kod: Kodaira, c1sq_min: i64, chi: i64, tau: i64, blowups: u32) -> Result<Self> {
        let s = Self { kod, b1_parity: Parity::Even, c1sq_min, chi, tau, blowups };
        s.validate()?;
        Ok(s)
    }

    /// `c₁²` of the surface itself.
    pub fn c1sq(&self) -> i64 {
        self.c1sq_min - i64::from(self.blowups)
    }

    pub fn two_chi_plus_three_tau(&self) -> i64 {
        2 * self.chi + 3 * self.tau
    }

    pub fn validate(&self) -> Result<()> {
        if self.c1sq() != self.two_chi_plus_three_tau() {
            return Err(Error::InconsistentSurface(format!(
                "c1² = {} − {} = {} but 2χ+3τ = {}",
                self.c1sq_min,
                self.blowups,
                self.c1sq(),
                self.two_chi_plus_three_tau()
            )));
        }
        match self.kod {
            Kodaira::Two if self.c1sq_min <= 0 => {
                Err(Error::InconsistentSurface(format!("general type needs c1²(X) > 0, got {}", self.c1sq_min)))
            }
            Kodaira::Zero | Kodaira::One if self.c1sq_min != 0 => Err(Error::InconsistentSurface(format!(
                "Kodaira dimension 0 or 1 needs c1²(X) = 0, got {}",
                self.c1sq_min
            ))),
            _ => Ok(()),
        }
    }

    /// The projective plane itself (`χ = 3`, `τ = 1`, no blow-ups).
    pub fn is_projective_plane(&self) -> bool {
        self.kod == Kodaira::MinusInfinity && self.chi == 3 && self.tau == 1 && self.blowups == 0
    }

    fn checked(&self) -> Result<()> {
        self.validate()?;
        if self.b1_parity == Parity::Odd {
            return Err(Error::OddFirstBetti);
        }
        Ok(())
    }
}

pub fn classify_sign(surface: &SurfaceData) -> Result<YamabeSign> {
    surface.checked()?;
    Ok(match surface.kod {
        Kodaira::MinusInfinity => YamabeSign::Positive,
        Kodaira::Zero | Kodaira::One => YamabeSign::Zero,
        Kodaira::Two => YamabeSign::Negative,
    })
}

/// `−4π√(2c₁²)`.
pub fn general_type_value(c1sq_min: i64) -> f64 {
    -4.0 * PI * (2.0 * c1sq_min as f64).sqrt()
}

pub fn yamabe_value(surface: &SurfaceData) -> Result<YamabeAnswer> {
    let sign = classify_sign(surface)?;
    Ok(match surface.kod {
        Kodaira::Two => {
            YamabeAnswer { sign, value: Some(general_type_value(surface.c1sq_min)), value_known: true, special: None }
        }
        Kodaira::Zero | Kodaira::One => YamabeAnswer { sign, value: Some(0.0), value_known: true, special: None },
        Kodaira::MinusInfinity if surface.is_projective_plane() => {
            YamabeAnswer { sign, value: None, value_known: true, special: Some(SpecialCase::FubiniStudy) }
        }
        Kodaira::MinusInfinity => YamabeAnswer { sign, value: None, value_known: false, special: None },
    })
}

pub fn blow_up_surface(surface: &SurfaceData, k: u32) -> Result<SurfaceData> {
    surface.validate()?;
    let mut s = *surface;
    s.blowups = s.blowups.checked_add(k).ok_or_else(|| Error::InconsistentSurface("blow-up count overflow".into()))?;
    s.chi += i64::from(k);
    s.tau -= i64::from(k);
    s.validate()?;
    Ok(s)
}

/// `32π²c₁²(X)`, the sharp lower bound for `∫s² dμ` on general type.
pub fn sw_bound(surface: &SurfaceData) -> Result<f64> {
    surface.validate()?;
    if surface.kod != Kodaira::Two {
        return Err(Error::NotGeneralType(format!("{:?}", surface.kod)));
    }
    Ok(32.0 * PI * PI * surface.c1sq_min as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSurface {
    pub name: &'static str,
    pub data: SurfaceData,
    pub expected: YamabeSign,
}

/// Six standard surfaces, one or more per Kodaira dimension.
pub fn canonical_surfaces() -> Vec<CanonicalSurface> {
    let mk = |kod, c, chi, tau, b| SurfaceData { kod, b1_parity: Parity::Even, c1sq_min: c, chi, tau, blowups: b };
    vec![
        CanonicalSurface { name: "CP2", data: mk(Kodaira::MinusInfinity, 9, 3, 1, 0), expected: YamabeSign::Positive },
        CanonicalSurface {
            name: "E(1) = CP2#9(-CP2)",
            data: mk(Kodaira::MinusInfinity, 9, 12, -8, 9),
            expected: YamabeSign::Positive,
        },
        CanonicalSurface { name: "K3", data: mk(Kodaira::Zero, 0, 24, -16, 0), expected: YamabeSign::Zero },
        CanonicalSurface { name: "Enriques", data: mk(Kodaira::Zero, 0, 12, -8, 0), expected: YamabeSign::Zero },
        CanonicalSurface { name: "E(3)", data: mk(Kodaira::One, 0, 36, -24, 0), expected: YamabeSign::Zero },
        CanonicalSurface {
            name: "quintic in CP3",
            data: mk(Kodaira::Two, 5, 55, -35, 0),
            expected: YamabeSign::Negative,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_table_signs() {
        for c in canonical_surfaces() {
            assert_eq!(classify_sign(&c.data).unwrap(), c.expected, "{}", c.name);
        }
    }

    #[test]
    fn general_type_values() {
        let s = SurfaceData::new(Kodaira::Two, 2, 0, 0, 3);
        // c1² = 2 − 3 = −1 = 2χ + 3τ needs e.g. χ = 1, τ = −1
        assert!(s.is_err());
        let s = SurfaceData::new(Kodaira::Two, 2, 1, -1, 3).unwrap();
        let v = yamabe_value(&s).unwrap().value.unwrap();
        assert!((v + 8.0 * PI).abs() < 1e-12);
        let s = SurfaceData::new(Kodaira::Two, 1, 11, -7, 0).unwrap();
        assert!((yamabe_value(&s).unwrap().value.unwrap() + 4.0 * PI * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn blow_up_arithmetic() {
        let s = SurfaceData::new(Kodaira::Two, 1, 11, -7, 0).unwrap();
        let b = blow_up_surface(&s, 1).unwrap();
        assert_eq!((b.chi, b.tau, b.c1sq()), (12, -8, 0));
        assert_eq!(blow_up_surface(&s, 0).unwrap(), s);
    }

    #[test]
    fn odd_b1_refused() {
        let mut s = SurfaceData::new(Kodaira::Zero, 0, 0, 0, 0).unwrap();
        s.b1_parity = Parity::Odd;
        assert_eq!(classify_sign(&s), Err(Error::OddFirstBetti));
        assert!(yamabe_value(&s).is_err());
    }

    #[test]
    fn sw_bound_requires_general_type() {
        let k3 = SurfaceData::new(Kodaira::Zero, 0, 24, -16, 0).unwrap();
        assert!(matches!(sw_bound(&k3), Err(Error::NotGeneralType(_))));
        let s = SurfaceData::new(Kodaira::Two, 1, 11, -7, 0).unwrap();
        assert!((sw_bound(&s).unwrap() - 32.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn projective_plane_is_special() {
        let cp2 = canonical_surfaces()[0].data;
        let a = yamabe_value(&cp2).unwrap();
        assert_eq!(a.special, Some(SpecialCase::FubiniStudy));
        assert!(a.value.is_none() && a.value_known);
        let e1 = yamabe_value(&canonical_surfaces()[1].data).unwrap();
        assert!(!e1.value_known && e1.special.is_none());
    }

    #[test]
    fn json_round_trip_with_aliases() {
        let s: SurfaceData =
            serde_json::from_str(r#"{"kod":"2","b1_parity":"even","c1sq_min":5,"chi":55,"tau":-35,"blowups":0}"#)
                .unwrap();
        assert_eq!(classify_sign(&s).unwrap(), YamabeSign::Negative);
        let back: SurfaceData = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
