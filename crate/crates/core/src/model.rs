//! Network parameters, instantaneous SNR expressions and the per-link
//! threshold constants used by the outage analysis.
//!
//! All quantities are linear-scale and normalised by the common noise power,
//! so the transmit power enters only through `rho0 = P0 / sigma^2`.

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, Result};

/// One of the two terminal nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Terminal {
    A,
    B,
}

impl Terminal {
    /// The opposite terminal (`ī` for `i`).
    pub fn other(self) -> Terminal {
        match self {
            Terminal::A => Terminal::B,
            Terminal::B => Terminal::A,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Terminal::A => "A",
            Terminal::B => "B",
        }
    }
}

/// SNR threshold for a target rate in bits per channel use.
pub fn snr_threshold(rate_u: f64) -> f64 {
    rate_u.exp2() - 1.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Physical and protocol parameters of one network instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Transmit SNR `P0 / sigma^2`, linear.
    pub rho0: f64,
    /// Energy conversion efficiency.
    pub eta: f64,
    /// Fraction of the block used by each uplink slot.
    pub beta: f64,
    /// Block duration.
    pub block_time: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    pub d_a: f64,
    pub d_b: f64,
    /// Mean of `|h_A|^2`.
    pub mu_a: f64,
    /// Mean of `|h_B|^2`.
    pub mu_b: f64,
    /// Power-splitting ratio (harvested share) at the relay for A's signal.
    pub lambda_a: f64,
    pub lambda_b: f64,
    /// Share of the relay power carrying `x_A`; `x_B` gets `1 - theta_a_sq`.
    pub theta_a_sq: f64,
    /// Target rate in bits per channel use.
    pub rate_u: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            rho0: db_to_linear(30.0),
            eta: 0.7,
            beta: 1.0 / 3.0,
            block_time: 1.0,
            alpha: 2.7,
            d_a: 0.8,
            d_b: 1.2,
            mu_a: 1.0,
            mu_b: 1.0,
            lambda_a: 0.5,
            lambda_b: 0.5,
            theta_a_sq: 0.5,
            rate_u: 1.0,
        }
    }
}

fn require(ok: bool, name: &'static str, value: f64, rule: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError { name, value, rule }.into())
    }
}

impl NetworkConfig {
    pub fn distance(&self, t: Terminal) -> f64 {
        match t {
            Terminal::A => self.d_a,
            Terminal::B => self.d_b,
        }
    }

    pub fn mu(&self, t: Terminal) -> f64 {
        match t {
            Terminal::A => self.mu_a,
            Terminal::B => self.mu_b,
        }
    }

    pub fn lambda(&self, t: Terminal) -> f64 {
        match t {
            Terminal::A => self.lambda_a,
            Terminal::B => self.lambda_b,
        }
    }

    /// Relay power share of the stream originating at `t`.
    pub fn theta_sq(&self, t: Terminal) -> f64 {
        match t {
            Terminal::A => self.theta_a_sq,
            Terminal::B => 1.0 - self.theta_a_sq,
        }
    }

    pub fn gamma_th(&self) -> f64 {
        snr_threshold(self.rate_u)
    }

    /// `d_t^{-alpha}`.
    pub fn path_gain(&self, t: Terminal) -> f64 {
        self.distance(t).powf(-self.alpha)
    }

    pub fn with_lambdas(mut self, lambda_a: f64, lambda_b: f64) -> Self {
        self.lambda_a = lambda_a;
        self.lambda_b = lambda_b;
        self
    }

    /// The configuration with the A and B labels exchanged.
    pub fn swapped(&self) -> Self {
        NetworkConfig {
            d_a: self.d_b,
            d_b: self.d_a,
            mu_a: self.mu_b,
            mu_b: self.mu_a,
            lambda_a: self.lambda_b,
            lambda_b: self.lambda_a,
            theta_a_sq: 1.0 - self.theta_a_sq,
            ..*self
        }
    }

    /// Checks everything except the open-interval constraints on the ratios:
    /// `lambda` and `theta` may sit on their endpoints and the rate may be 0.
    /// This is the domain on which the raw SNR expressions are defined.
    pub fn validate_physical(&self) -> Result<()> {
        let positive = [
            ("rho0", self.rho0),
            ("eta", self.eta),
            ("block_time", self.block_time),
            ("alpha", self.alpha),
            ("d_a", self.d_a),
            ("d_b", self.d_b),
            ("mu_a", self.mu_a),
            ("mu_b", self.mu_b),
        ];
        for (name, value) in positive {
            require(
                value.is_finite() && value > 0.0,
                name,
                value,
                "must be finite and > 0",
            )?;
        }
        require(self.eta <= 1.0, "eta", self.eta, "must lie in (0, 1]")?;
        require(
            self.beta > 0.0 && self.beta < 0.5,
            "beta",
            self.beta,
            "must lie in (0, 0.5)",
        )?;
        for (name, value) in [
            ("lambda_a", self.lambda_a),
            ("lambda_b", self.lambda_b),
            ("theta_a_sq", self.theta_a_sq),
        ] {
            require(
                (0.0..=1.0).contains(&value),
                name,
                value,
                "must lie in [0, 1]",
            )?;
        }
        require(
            self.rate_u.is_finite() && self.rate_u >= 0.0,
            "rate_u",
            self.rate_u,
            "must be finite and >= 0",
        )?;
        Ok(())
    }

    /// Full validation for the analytic expressions: ratios strictly inside
    /// (0, 1) and a strictly positive rate.
    pub fn validate(&self) -> Result<()> {
        self.validate_physical()?;
        for (name, value) in [
            ("lambda_a", self.lambda_a),
            ("lambda_b", self.lambda_b),
            ("theta_a_sq", self.theta_a_sq),
        ] {
            require(
                value > 0.0 && value < 1.0,
                name,
                value,
                "must lie in (0, 1)",
            )?;
        }
        require(self.rate_u > 0.0, "rate_u", self.rate_u, "must be > 0")?;
        Ok(())
    }

    /// Uplink SNR `t -> R` for channel power `gain`.
    pub fn uplink_snr(&self, gain: f64, t: Terminal) -> f64 {
        self.rho0 * gain * (1.0 - self.lambda(t)) * self.path_gain(t)
    }

    /// Harvested energy per unit noise power, `E_total / sigma^2`.
    pub fn harvested_energy(&self, g_a: f64, g_b: f64) -> f64 {
        self.rho0
            * self.eta
            * self.beta
            * self.block_time
            * (self.lambda_a * g_a * self.path_gain(Terminal::A)
                + self.lambda_b * g_b * self.path_gain(Terminal::B))
    }

    /// Duration of the broadcast slot, `(1 - 2 beta) T`.
    pub fn broadcast_duration(&self) -> f64 {
        (1.0 - 2.0 * self.beta) * self.block_time
    }

    /// Relay transmit power per unit noise power when it spends the harvested
    /// energy over the broadcast slot.
    pub fn relay_power(&self, g_a: f64, g_b: f64) -> f64 {
        self.harvested_energy(g_a, g_b) / self.broadcast_duration()
    }

    /// Downlink SNR `R -> t` after perfect self-interference cancellation.
    pub fn downlink_snr(&self, g_a: f64, g_b: f64, t: Terminal) -> f64 {
        let g_t = match t {
            Terminal::A => g_a,
            Terminal::B => g_b,
        };
        self.theta_sq(t.other()) * self.relay_power(g_a, g_b) * g_t * self.path_gain(t)
    }

    /// Whether the one-way path `t̄ -> R -> t` delivers the target rate.
    pub fn link_succeeds(&self, g_a: f64, g_b: f64, t: Terminal) -> bool {
        let gamma_th = self.gamma_th();
        let g_other = match t {
            Terminal::A => g_b,
            Terminal::B => g_a,
        };
        self.downlink_snr(g_a, g_b, t) >= gamma_th
            && self.uplink_snr(g_other, t.other()) >= gamma_th
    }

    /// Outage that is forced by a ratio sitting on its endpoint, for the link
    /// delivering to `t`. `None` when the link is not structurally dead.
    pub fn forced_t2t_outage(&self, t: Terminal) -> Option<f64> {
        let source = t.other();
        let dead = self.lambda(source) >= 1.0
            || (self.lambda_a <= 0.0 && self.lambda_b <= 0.0)
            || self.theta_sq(source) <= 0.0;
        dead.then_some(1.0)
    }

    /// Forced system outage: either link structurally dead.
    pub fn forced_system_outage(&self) -> Option<f64> {
        self.forced_t2t_outage(Terminal::A)
            .or_else(|| self.forced_t2t_outage(Terminal::B))
    }
}

/// Per-link constants derived from a validated configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkDerived {
    /// Uplink decoding threshold on `|h_i|^2`.
    pub phi: f64,
    /// Downlink SNR scale for terminal `i`.
    pub x_cap: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Positive root of `a_i w^2 + b_ī w - c_i = 0`.
    pub omega: f64,
    pub c_big: f64,
    pub d_big: f64,
}

/// Positive root of `a w^2 + b w - c = 0` for `a, c > 0`, `b >= 0`, in the
/// cancellation-free form.
pub fn positive_root(a: f64, b: f64, c: f64) -> f64 {
    2.0 * c / ((b * b + 4.0 * a * c).sqrt() + b)
}

/// A validated configuration together with the derived constants of both
/// links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Network {
    cfg: NetworkConfig,
    link_a: LinkDerived,
    link_b: LinkDerived,
}

impl Network {
    pub fn new(cfg: NetworkConfig) -> Result<Network> {
        cfg.validate()?;
        let link_a = derive_link(&cfg, Terminal::A)?;
        let link_b = derive_link(&cfg, Terminal::B)?;
        Ok(Network {
            cfg,
            link_a,
            link_b,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn link(&self, t: Terminal) -> &LinkDerived {
        match t {
            Terminal::A => &self.link_a,
            Terminal::B => &self.link_b,
        }
    }

    pub fn mu(&self, t: Terminal) -> f64 {
        self.cfg.mu(t)
    }

    /// Threshold `Psi_target` on `|h_target|^2` implied by the downlink to the
    /// other terminal, given that terminal's channel power `g_other > 0`.
    /// Negative values mean the other terminal's own contribution already
    /// satisfies the downlink constraint.
    pub fn psi(&self, target: Terminal, g_other: f64) -> f64 {
        let other = target.other();
        let lo = self.link(other);
        (lo.c - lo.a * g_other * g_other) * self.cfg.distance(target).powf(self.cfg.alpha)
            / (self.cfg.lambda(target) * g_other)
    }

    /// `max(Phi_t, Psi_t(g_other))`: the channel power terminal `t` needs for
    /// the link towards the other terminal to succeed.
    pub fn required_gain(&self, target: Terminal, g_other: f64) -> f64 {
        self.link(target).phi.max(self.psi(target, g_other))
    }
}

/// Computes the threshold constants of the link seen from terminal `t`.
pub fn derive_link(cfg: &NetworkConfig, t: Terminal) -> Result<LinkDerived> {
    let other = t.other();
    let gamma_th = cfg.gamma_th();
    let d_alpha = |u: Terminal| cfg.distance(u).powf(cfg.alpha);
    let split_info = |u: Terminal| 1.0 - cfg.lambda(u);
    let slot = 1.0 - 2.0 * cfg.beta;
    if split_info(t) <= 0.0 || split_info(other) <= 0.0 || slot <= 0.0 {
        return Err(crate::Error::Degenerate(
            "information share or broadcast slot is zero",
        ));
    }
    let x_cap_of =
        |u: Terminal| cfg.theta_sq(u.other()) * cfg.rho0 * cfg.eta * cfg.beta / (slot * d_alpha(u));
    let b_of = |u: Terminal| gamma_th * cfg.lambda(u) / (cfg.rho0 * split_info(u));

    let phi = gamma_th * d_alpha(t) / (cfg.rho0 * split_info(t));
    let x_cap = x_cap_of(t);
    let a = cfg.lambda(t) / d_alpha(t);
    let b = b_of(t);
    let c = gamma_th / x_cap;
    let omega = positive_root(a, b_of(other), c);
    let c_big = gamma_th * d_alpha(t) / (x_cap_of(other) * cfg.lambda(t));
    let d_big = cfg.lambda(other) * d_alpha(t) / (cfg.lambda(t) * d_alpha(other));

    let link = LinkDerived {
        phi,
        x_cap,
        a,
        b,
        c,
        omega,
        c_big,
        d_big,
    };
    let all = [phi, x_cap, a, b, c, omega, c_big, d_big];
    if all.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(crate::Error::Degenerate(
            "derived link constant is not positive and finite",
        ));
    }
    Ok(link)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn simple() -> NetworkConfig {
        NetworkConfig {
            rho0: 10.0,
            eta: 0.8,
            beta: 0.25,
            alpha: 2.0,
            d_a: 1.0,
            d_b: 1.0,
            lambda_a: 0.5,
            lambda_b: 0.5,
            theta_a_sq: 0.5,
            ..NetworkConfig::default()
        }
    }

    #[test]
    fn threshold_values() {
        assert_eq!(snr_threshold(1.0), 1.0);
        assert_eq!(snr_threshold(0.0), 0.0);
        assert_eq!(snr_threshold(2.0), 3.0);
    }

    #[test]
    fn uplink_arithmetic() {
        let cfg = simple();
        assert_eq!(cfg.uplink_snr(0.0, Terminal::A), 0.0);
        assert_eq!(cfg.uplink_snr(1.0, Terminal::A), 5.0);
        let dead = NetworkConfig {
            lambda_a: 1.0,
            ..cfg
        };
        assert_eq!(dead.uplink_snr(3.0, Terminal::A), 0.0);
    }

    #[test]
    fn relay_power_arithmetic() {
        let cfg = simple();
        assert_eq!(cfg.relay_power(0.0, 0.0), 0.0);
        assert!((cfg.relay_power(1.0, 1.0) - 4.0).abs() < 1e-12);
        let doubled = NetworkConfig { rho0: 20.0, ..cfg };
        assert!((doubled.relay_power(1.0, 1.0) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn downlink_arithmetic() {
        let cfg = simple();
        assert_eq!(cfg.downlink_snr(0.0, 0.0, Terminal::A), 0.0);
        let starved = NetworkConfig {
            theta_a_sq: 0.0,
            ..cfg
        };
        assert_eq!(starved.downlink_snr(2.0, 3.0, Terminal::B), 0.0);
        assert!((cfg.downlink_snr(1.0, 1.0, Terminal::A) - 2.0).abs() < 1e-12);
        let link = derive_link(&cfg, Terminal::A).unwrap();
        assert!((link.x_cap - 2.0).abs() < 1e-12);
    }

    #[test]
    fn positive_root_examples() {
        assert_eq!(positive_root(1.0, 0.0, 1.0), 1.0);
        let w = positive_root(1.0, 3.0, 1.0);
        assert!((w - (13f64.sqrt() - 3.0) / 2.0).abs() < 1e-15);
        assert!((w - 0.302776).abs() < 1e-6);
    }

    #[test]
    fn symmetric_links_are_equal() {
        let cfg = NetworkConfig {
            d_a: 1.0,
            d_b: 1.0,
            ..NetworkConfig::default()
        };
        let a = derive_link(&cfg, Terminal::A).unwrap();
        let b = derive_link(&cfg, Terminal::B).unwrap();
        assert_eq!(a, b);
        let net = Network::new(cfg).unwrap();
        assert_eq!(net.psi(Terminal::A, 0.3), net.psi(Terminal::B, 0.3));
    }

    #[test]
    fn psi_meets_phi_at_omega() {
        let net = Network::new(NetworkConfig::default()).unwrap();
        for t in [Terminal::A, Terminal::B] {
            let omega_other = net.link(t.other()).omega;
            let psi = net.psi(t, omega_other);
            let phi = net.link(t).phi;
            assert!((psi - phi).abs() <= 1e-10 * phi, "{t:?}: {psi} vs {phi}");
        }
        assert!(net.psi(Terminal::A, 1e6) < 0.0);
    }

    #[test]
    fn omega_is_a_root() {
        let cfg = NetworkConfig::default();
        for t in [Terminal::A, Terminal::B] {
            let l = derive_link(&cfg, t).unwrap();
            let b_other = derive_link(&cfg, t.other()).unwrap().b;
            let resid = l.a * l.omega * l.omega + b_other * l.omega - l.c;
            assert!(resid.abs() <= 1e-12 * l.c);
        }
    }

    #[test]
    fn validation_rejects_boundaries() {
        let bad = NetworkConfig {
            beta: 0.5,
            ..NetworkConfig::default()
        };
        assert!(bad.validate().is_err());
        let edge = NetworkConfig {
            lambda_a: 1.0,
            ..NetworkConfig::default()
        };
        assert!(edge.validate().is_err());
        assert!(edge.validate_physical().is_ok());
        let err = NetworkConfig {
            d_a: -1.0,
            ..NetworkConfig::default()
        }
        .validate()
        .unwrap_err();
        assert!(err.to_string().contains("d_a"));
    }

    #[test]
    fn forced_outage_branches() {
        let cfg = NetworkConfig::default();
        assert_eq!(cfg.forced_system_outage(), None);
        let dead_b = NetworkConfig {
            lambda_b: 1.0,
            ..cfg
        };
        assert_eq!(dead_b.forced_t2t_outage(Terminal::A), Some(1.0));
        assert_eq!(dead_b.forced_t2t_outage(Terminal::B), None);
        let no_energy = NetworkConfig {
            lambda_a: 0.0,
            lambda_b: 0.0,
            ..cfg
        };
        assert_eq!(no_energy.forced_t2t_outage(Terminal::A), Some(1.0));
        assert_eq!(no_energy.forced_t2t_outage(Terminal::B), Some(1.0));
        let starved = NetworkConfig {
            theta_a_sq: 0.0,
            ..cfg
        };
        assert_eq!(starved.forced_t2t_outage(Terminal::B), Some(1.0));
        assert_eq!(starved.forced_system_outage(), Some(1.0));
    }

    proptest! {
        #[test]
        fn energy_causality_is_exact(g_a in 0.0f64..20.0, g_b in 0.0f64..20.0) {
            let cfg = NetworkConfig::default();
            let energy = cfg.harvested_energy(g_a, g_b);
            prop_assert_eq!(cfg.relay_power(g_a, g_b), energy / cfg.broadcast_duration());
            let spent = cfg.relay_power(g_a, g_b) * cfg.broadcast_duration();
            prop_assert!((spent - energy).abs() <= 2.0 * f64::EPSILON * energy);
        }

        #[test]
        fn link_success_matches_threshold_form(g_a in 1e-4f64..5.0, g_b in 1e-4f64..5.0) {
            let net = Network::new(NetworkConfig::default()).unwrap();
            let cfg = net.config();
            for t in [Terminal::A, Terminal::B] {
                let (g_t, g_src) = match t {
                    Terminal::A => (g_a, g_b),
                    Terminal::B => (g_b, g_a),
                };
                let need = net.required_gain(t.other(), g_t);
                if (g_src - need).abs() <= 1e-12 * need.abs().max(1e-300) {
                    continue;
                }
                prop_assert_eq!(cfg.link_succeeds(g_a, g_b, t), g_src >= need);
            }
        }
    }
}
