use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::polybasis::{default_quad_order, Coefficient};
use crate::weakcalc::StabilizerSpec;

pub const DEFAULT_RHO: f64 = 1.0;
pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_TAU: f64 = 1.0;
pub const DEFAULT_K: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    PrimalWg,
    PrimalMixedWg,
    MixedWg,
    HybridMixedWg,
    Hdg,
    HdgV2,
}

impl Scheme {
    pub const ALL: [Scheme; 6] =
        [Self::PrimalWg, Self::PrimalMixedWg, Self::MixedWg, Self::HybridMixedWg, Self::Hdg, Self::HdgV2];

    pub fn name(self) -> &'static str {
        match self {
            Self::PrimalWg => "primal-wg",
            Self::PrimalMixedWg => "primal-mixed-wg",
            Self::MixedWg => "mixed-wg",
            Self::HybridMixedWg => "hybrid-mixed-wg",
            Self::Hdg => "hdg",
            Self::HdgV2 => "hdg-v2",
        }
    }

    pub fn is_hdg(self) -> bool {
        matches!(self, Self::Hdg | Self::HdgV2)
    }

    /// Schemes whose flux is a weak vector field with a mixed stabilizer.
    pub fn is_mixed(self) -> bool {
        matches!(self, Self::MixedWg | Self::HybridMixedWg)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|x| x.name()).collect();
            Error::InvalidArgument(format!("unknown scheme '{s}', expected one of {}", names.join(", ")))
        })
    }
}

/// HDG stabilization, constant on each cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tau {
    Constant(f64),
    /// `rho^-1 h_T^-alpha`, the value that matches the mixed stabilizer.
    MatchMixed,
    /// `rho h_T^-1`, the value that matches the primal stabilizer.
    MatchPrimal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    /// Interior degree: `u0` for primal schemes, `q0` for mixed schemes,
    /// the vector space `V(T)` for HDG.
    pub k: usize,
    /// Edge degree of `u_b`, `q_b` and the HDG trace.
    pub s: usize,
    /// Weak gradient degree (primal) or scalar degree (mixed, HDG).
    pub r: usize,
    /// Flux degree of the primal-mixed scheme.
    pub m: usize,
    pub rho: f64,
    pub alpha: f64,
    pub tau: Tau,
    pub quad_order: Option<usize>,
}

impl SchemeConfig {
    /// Defaults `s = k`, `r = k - 1` (or 0), `m = r`, `rho = alpha = tau = 1`.
    pub fn new(scheme: Scheme, k: usize) -> Self {
        let r = k.saturating_sub(1);
        Self {
            scheme,
            k,
            s: k,
            r,
            m: r,
            rho: DEFAULT_RHO,
            alpha: DEFAULT_ALPHA,
            tau: Tau::Constant(DEFAULT_TAU),
            quad_order: None,
        }
    }

    pub fn with_degrees(mut self, k: usize, s: usize, r: usize) -> Self {
        self.k = k;
        self.s = s;
        self.r = r;
        self
    }

    /// Checks hard constraints and returns advisory warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return invalid(format!("rho must be positive, got {}", self.rho));
        }
        if !self.alpha.is_finite() {
            return invalid("alpha must be finite");
        }
        match self.scheme {
            Scheme::PrimalWg => {
                if self.k == 0 {
                    return invalid("primal-wg needs k >= 1");
                }
            }
            Scheme::PrimalMixedWg => {
                if self.k == 0 {
                    return invalid("primal-mixed-wg needs k >= 1");
                }
                if self.m < self.r {
                    return invalid(format!("primal-mixed-wg needs m >= r, got m={} r={}", self.m, self.r));
                }
            }
            Scheme::MixedWg | Scheme::HybridMixedWg => {
                if self.k + 1 < self.r || self.s < self.r {
                    warnings.push(format!(
                        "degrees (k,s,r)=({},{},{}) violate k >= r-1, s >= r; inf-sup stability is not guaranteed",
                        self.k, self.s, self.r
                    ));
                }
            }
            Scheme::Hdg | Scheme::HdgV2 => {
                if let Tau::Constant(t) = self.tau {
                    if !(t > 0.0 && t.is_finite()) {
                        return invalid(format!("HDG needs tau > 0, got {t}"));
                    }
                }
            }
        }
        if let Some(q) = self.quad_order {
            if q > 60 {
                return invalid(format!("quadrature order {q} is too large"));
            }
        }
        Ok(warnings)
    }

    pub fn tau_for(&self, h: f64) -> f64 {
        match self.tau {
            Tau::Constant(t) => t,
            Tau::MatchMixed => h.powf(-self.alpha) / self.rho,
            Tau::MatchPrimal => self.rho / h,
        }
    }

    pub fn primal_stabilizer(&self) -> StabilizerSpec {
        StabilizerSpec::primal(self.rho)
    }

    pub fn mixed_stabilizer(&self) -> StabilizerSpec {
        StabilizerSpec::mixed(self.rho, self.alpha)
    }

    pub fn max_degree(&self) -> usize {
        let mut d = self.k.max(self.s).max(self.r);
        if self.scheme == Scheme::PrimalMixedWg {
            d = d.max(self.m);
        }
        d
    }

    pub fn quad_order(&self, coeff: &Coefficient) -> usize {
        self.quad_order.unwrap_or_else(|| default_quad_order(self.max_degree(), coeff))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        let err = "fem".parse::<Scheme>().unwrap_err().to_string();
        assert!(err.contains("hybrid-mixed-wg"));
    }

    #[test]
    fn defaults() {
        let c = SchemeConfig::new(Scheme::PrimalWg, 2);
        assert_eq!((c.k, c.s, c.r, c.m), (2, 2, 1, 1));
        assert_eq!((c.rho, c.alpha), (1.0, 1.0));
        assert_eq!(c.tau, Tau::Constant(1.0));
    }

    #[test]
    fn constraints() {
        assert!(SchemeConfig::new(Scheme::PrimalWg, 0).validate().is_err());
        let mut pm = SchemeConfig::new(Scheme::PrimalMixedWg, 2);
        pm.m = 0;
        assert!(pm.validate().is_err());
        let mixed = SchemeConfig::new(Scheme::MixedWg, 1).with_degrees(1, 0, 1);
        assert_eq!(mixed.validate().unwrap().len(), 1);
        let mut hdg = SchemeConfig::new(Scheme::Hdg, 1);
        hdg.tau = Tau::Constant(0.0);
        assert!(hdg.validate().is_err());
    }

    #[test]
    fn matched_tau() {
        let mut c = SchemeConfig::new(Scheme::Hdg, 1);
        c.rho = 2.0;
        c.alpha = 1.0;
        c.tau = Tau::MatchMixed;
        assert_eq!(c.tau_for(0.5), 1.0);
        c.tau = Tau::MatchPrimal;
        assert_eq!(c.tau_for(0.5), 4.0);
    }
}
