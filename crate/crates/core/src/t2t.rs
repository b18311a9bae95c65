//! Terminal-to-terminal outage: the one-way path `ī -> R -> i` succeeds when
//! the relay decodes `x_ī` and the broadcast reaches `i` above threshold.

use serde::Serialize;

use crate::chebyshev::QuadratureRule;
use crate::error::Result;
use crate::model::{Network, NetworkConfig, Terminal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct T2TReport {
    /// Destination of the path.
    pub terminal: Terminal,
    pub p_success: f64,
    pub p_outage: f64,
    /// Outage capacity `(1 - P_out) U beta T`.
    pub capacity: f64,
    pub quadrature_order: usize,
    /// Quadrature value before clamping to [0, 1].
    pub p_success_raw: f64,
}

/// Success probability of the path delivering to `terminal`, before clamping.
pub fn t2t_success_raw(net: &Network, terminal: Terminal, rule: &QuadratureRule) -> Result<f64> {
    let source = terminal.other();
    let phi_src = net.link(source).phi;
    let omega = net.link(terminal).omega;
    let (mu_dst, mu_src) = (net.mu(terminal), net.mu(source));

    let tail = (-phi_src / mu_src - omega / mu_dst).exp();
    let body = rule.integrate(0.0, omega, |y| {
        (-net.psi(source, y) / mu_src - y / mu_dst).exp() / mu_dst
    })?;
    Ok(tail + body)
}

pub fn t2t_success(net: &Network, terminal: Terminal, rule: &QuadratureRule) -> Result<f64> {
    Ok(t2t_success_raw(net, terminal, rule)?.clamp(0.0, 1.0))
}

pub fn t2t_outage(net: &Network, terminal: Terminal, rule: &QuadratureRule) -> Result<f64> {
    Ok(1.0 - t2t_success(net, terminal, rule)?)
}

pub fn t2t_capacity(net: &Network, terminal: Terminal, rule: &QuadratureRule) -> Result<f64> {
    Ok(capacity_from_outage(
        net.config(),
        t2t_outage(net, terminal, rule)?,
    ))
}

/// `(1 - P_out) U beta T`.
pub fn capacity_from_outage(cfg: &NetworkConfig, p_outage: f64) -> f64 {
    (1.0 - p_outage) * cfg.rate_u * cfg.beta * cfg.block_time
}

pub fn t2t_report(net: &Network, terminal: Terminal, rule: &QuadratureRule) -> Result<T2TReport> {
    let raw = t2t_success_raw(net, terminal, rule)?;
    let p_success = raw.clamp(0.0, 1.0);
    let p_outage = 1.0 - p_success;
    Ok(T2TReport {
        terminal,
        p_success,
        p_outage,
        capacity: capacity_from_outage(net.config(), p_outage),
        quadrature_order: rule.order(),
        p_success_raw: raw,
    })
}

/// Like [`t2t_report`] but accepts ratios on their endpoints, returning the
/// forced outage there.
pub fn t2t_report_with_limits(
    cfg: &NetworkConfig,
    terminal: Terminal,
    rule: &QuadratureRule,
) -> Result<T2TReport> {
    cfg.validate_physical()?;
    if let Some(p_outage) = cfg.forced_t2t_outage(terminal) {
        return Ok(T2TReport {
            terminal,
            p_success: 1.0 - p_outage,
            p_outage,
            capacity: capacity_from_outage(cfg, p_outage),
            quadrature_order: rule.order(),
            p_success_raw: 1.0 - p_outage,
        });
    }
    t2t_report(&Network::new(*cfg)?, terminal, rule)
}
