//! Reference values by adaptive integration of the exact probability
//! integrals.
//!
//! The two-dimensional reference works in probability coordinates: with
//! `u = 1 - exp(-x / mu_A)` and `v = 1 - exp(-y / mu_B)` the joint density of
//! the gains becomes uniform on the unit square, so an event probability is
//! the area of its preimage. For each `u` the measure of the `v`-section is
//! found by scanning the indicator and bisecting every change of state; the
//! resulting section length is then integrated over `u` adaptively.

use serde::Serialize;

use super::adaptive;
use crate::error::Result;
use crate::model::{Network, NetworkConfig, Terminal};

pub const EVALUATION_BUDGET: usize = 1_000_000;

/// Gains beyond `TAIL * mu` carry less than `exp(-50)` of the mass.
const TAIL: f64 = 50.0;
const SCAN_POINTS: usize = 1024;
const OUTER_PIECES: usize = 32;

/// Success event passed to [`quad_reference_system`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Event {
    /// Both paths succeed, decided on the raw SNRs.
    Full,
    P11,
    P12,
    P13,
    P14,
}

impl Event {
    pub const PIECES: [Event; 4] = [Event::P11, Event::P12, Event::P13, Event::P14];

    /// Membership of `(g_a, g_b)` in the event, evaluated pointwise.
    pub fn contains(self, net: &Network, g_a: f64, g_b: f64) -> bool {
        if let Event::Full = self {
            let cfg = net.config();
            return cfg.link_succeeds(g_a, g_b, Terminal::A)
                && cfg.link_succeeds(g_a, g_b, Terminal::B);
        }
        let phi_a = net.link(Terminal::A).phi;
        let phi_b = net.link(Terminal::B).phi;
        let psi_a = net.psi(Terminal::A, g_b);
        let psi_b = net.psi(Terminal::B, g_a);
        let (a_binds, b_binds) = (psi_a >= phi_a, psi_b >= phi_b);
        match self {
            Event::P11 => g_a >= psi_a && g_b >= phi_b && a_binds && !b_binds,
            Event::P12 => g_b >= psi_b && g_a >= phi_a && !a_binds && b_binds,
            Event::P13 => g_b >= phi_b && g_a >= phi_a && !a_binds && !b_binds,
            Event::P14 => g_b >= psi_b && g_a >= psi_a && a_binds && b_binds,
            Event::Full => unreachable!(),
        }
    }
}

/// Exact one-dimensional integral behind the path success probability,
/// integrated adaptively, plus its closed-form tail.
pub fn quad_reference_t2t(cfg: &NetworkConfig, terminal: Terminal, abs_tol: f64) -> Result<f64> {
    let net = Network::new(*cfg)?;
    let source = terminal.other();
    let phi_src = net.link(source).phi;
    let omega = net.link(terminal).omega;
    let (mu_dst, mu_src) = (net.mu(terminal), net.mu(source));
    let tail = (-phi_src / mu_src - omega / mu_dst).exp();
    let body = adaptive::integrate(
        |y| (-net.psi(source, y) / mu_src - y / mu_dst).exp() / mu_dst,
        0.0,
        omega,
        &[],
        abs_tol,
        EVALUATION_BUDGET,
    )?;
    Ok(tail + body.value)
}

fn quadratic_grid(len: usize, top: f64) -> Vec<f64> {
    (0..=len)
        .map(|k| {
            let s = k as f64 / len as f64;
            s * s * top
        })
        .collect()
}

/// Length of `{v in [0, top] : member(v)}`, locating each change of state to
/// machine precision.
fn section_length<M: Fn(f64) -> bool>(member: M, grid: &[f64]) -> f64 {
    let mut inside = member(grid[0]);
    let mut total = 0.0;
    let mut run_start = grid[0];
    for w in grid.windows(2) {
        let now = member(w[1]);
        if now == inside {
            continue;
        }
        let (mut lo, mut hi) = (w[0], w[1]);
        while hi - lo > f64::EPSILON * hi.max(1e-300) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if member(mid) == inside {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let edge = 0.5 * (lo + hi);
        if inside {
            total += edge - run_start;
        }
        run_start = edge;
        inside = now;
    }
    if inside {
        total += grid[grid.len() - 1] - run_start;
    }
    total
}

/// Probability of `event` by two-dimensional integration of the joint gain
/// density over the region where the event's raw inequalities hold.
pub fn quad_reference_system(cfg: &NetworkConfig, abs_tol: f64, event: Event) -> Result<f64> {
    let net = Network::new(*cfg)?;
    let (mu_a, mu_b) = (cfg.mu_a, cfg.mu_b);
    let top = -(-TAIL).exp_m1();
    let scan = quadratic_grid(SCAN_POINTS, top);
    let outer = quadratic_grid(OUTER_PIECES, top);
    let to_gain = |p: f64, mu: f64| -mu * (-p).ln_1p();

    let section = |u: f64| {
        let g_a = to_gain(u, mu_a);
        section_length(|v| event.contains(&net, g_a, to_gain(v, mu_b)), &scan)
    };
    let est = adaptive::integrate(
        section,
        0.0,
        top,
        &outer[1..outer.len() - 1],
        abs_tol,
        EVALUATION_BUDGET,
    )?;
    Ok(est.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysout::p13;

    #[test]
    fn section_length_of_intervals() {
        let grid = quadratic_grid(64, 1.0);
        let len = section_length(|v| (0.1..0.35).contains(&v) || v > 0.9, &grid);
        assert!((len - 0.35).abs() < 1e-14);
        assert_eq!(section_length(|_| false, &grid), 0.0);
        assert!((section_length(|_| true, &grid) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn p13_calibration() {
        let cfg = NetworkConfig::default();
        let net = Network::new(cfg).unwrap();
        let tol = 1e-8;
        let reference = quad_reference_system(&cfg, tol, Event::P13).unwrap();
        assert!(
            (reference - p13(&net)).abs() <= tol,
            "{reference} vs {}",
            p13(&net)
        );
    }

    #[test]
    fn pieces_sum_to_full_event() {
        let cfg = NetworkConfig::default();
        let tol = 1e-8;
        let full = quad_reference_system(&cfg, tol, Event::Full).unwrap();
        let sum: f64 = Event::PIECES
            .iter()
            .map(|&e| quad_reference_system(&cfg, tol, e).unwrap())
            .sum();
        assert!((full - sum).abs() <= 2.0 * tol, "{full} vs {sum}");
    }

    #[test]
    fn t2t_reference_is_stable() {
        let cfg = NetworkConfig::default();
        for t in [Terminal::A, Terminal::B] {
            let coarse = quad_reference_t2t(&cfg, t, 1e-8).unwrap();
            let fine = quad_reference_t2t(&cfg, t, 1e-12).unwrap();
            assert!((coarse - fine).abs() < 1e-8);
        }
    }
}
