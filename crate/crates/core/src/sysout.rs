//! System outage: both one-way paths must succeed in the same block.
//!
//! With `x = |h_A|^2` and `y = |h_B|^2`, the joint success event splits by the
//! sign of `Psi_i - Phi_i` for each terminal into four disjoint pieces:
//!
//! | piece | `Psi_A >= Phi_A` (`y <= Omega_B`) | `Psi_B >= Phi_B` (`x <= Omega_A`) |
//! |-------|------------------------------------|-----------------------------------|
//! | P11   | yes                                | no                                |
//! | P12   | no                                 | yes                               |
//! | P13   | no                                 | no                                |
//! | P14   | yes                                | yes                               |
//!
//! P13 has a closed form, P11/P12 are one-dimensional integrals, and P14 lives
//! in the box `[0, Omega_A] x [0, Omega_B]` above the two downlink curves
//! `x = C_A / y - D_A y` and `y = C_B / x - D_B x`. Its shape is classified by
//! where those curves cross the box edges and each other.

use serde::Serialize;

use crate::chebyshev::QuadratureRule;
use crate::error::{Error, Result};
use crate::model::{positive_root, Network, NetworkConfig, Terminal};
use crate::t2t::capacity_from_outage;

/// Shape class of the P14 integration region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Case {
    /// Empty region.
    I,
    /// Bounded by the box edges and a single downlink curve.
    II,
    /// Bounded by the box edges and both curves.
    III,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionGeometry {
    /// `Omega_A`, the vertical box edge.
    pub x1: f64,
    /// `Omega_B`, the horizontal box edge.
    pub y1: f64,
    /// Ordinate where the A-curve `x = C_A/y - D_A y` meets `x = x1`.
    pub y_delta: f64,
    /// Abscissa where the B-curve `y = C_B/x - D_B x` meets `y = y1`.
    pub x_delta: f64,
    /// Abscissa of the A-curve at `y = y1`.
    pub q1: f64,
    /// Ordinate of the B-curve at `x = x1`.
    pub q2: f64,
    pub xo: f64,
    pub yo: f64,
    pub case: Case,
    /// `y_delta >= q2`: the A-curve is the binding lower edge at `x = x1`.
    pub y_delta_ge_q2: bool,
}

impl RegionGeometry {
    pub fn case_label(&self) -> &'static str {
        match (self.case, self.y_delta_ge_q2) {
            (Case::I, _) => "I",
            (Case::II, true) => "II-upper",
            (Case::II, false) => "II-lower",
            (Case::III, true) => "III-upper",
            (Case::III, false) => "III-lower",
        }
    }
}

pub fn geometry(net: &Network) -> RegionGeometry {
    let la = net.link(Terminal::A);
    let lb = net.link(Terminal::B);
    let (ca, da, cb, db) = (la.c_big, la.d_big, lb.c_big, lb.d_big);
    let x1 = la.omega;
    let y1 = lb.omega;

    // D_A y^2 + x1 y - C_A = 0 and D_B x^2 + y1 x - C_B = 0.
    let y_delta = positive_root(da, x1, ca);
    let x_delta = positive_root(db, y1, cb);
    let q1 = ca / y1 - da * y1;
    let q2 = cb / x1 - db * x1;
    let xo = (cb * cb * da / (ca + cb)).sqrt();
    let yo = cb / xo - db * xo;

    let x_low = q1.max(x_delta);
    let case = if x_low >= x1 || q2.max(y_delta) >= y1 {
        Case::I
    } else if xo <= x_low || xo >= x1 {
        Case::II
    } else {
        Case::III
    };
    RegionGeometry {
        x1,
        y1,
        y_delta,
        x_delta,
        q1,
        q2,
        xo,
        yo,
        case,
        y_delta_ge_q2: y_delta >= q2,
    }
}

/// Oriented integral: swaps and negates when `hi < lo`, which only happens
/// through rounding at region ties.
fn oriented<F: FnMut(f64) -> f64>(rule: &QuadratureRule, lo: f64, hi: f64, f: F) -> Result<f64> {
    if hi >= lo {
        rule.integrate(lo, hi, f)
    } else {
        Ok(-rule.integrate(hi, lo, f)?)
    }
}

/// Integral over the strip where terminal `narrow` sits in
/// `[Phi_narrow, max(Phi_narrow, Omega_narrow)]` and the other terminal clears
/// `max(Psi_other, Omega_other)`. `narrow = B` gives P11, `narrow = A` gives P12.
fn strip(net: &Network, narrow: Terminal, rule: &QuadratureRule) -> Result<f64> {
    let wide = narrow.other();
    let ln = net.link(narrow);
    let omega_wide = net.link(wide).omega;
    let (mu_n, mu_w) = (net.mu(narrow), net.mu(wide));
    let upper = ln.phi.max(ln.omega);
    if upper <= ln.phi {
        return Ok(0.0);
    }
    rule.integrate(ln.phi, upper, |x| {
        let need = net.psi(wide, x).max(omega_wide);
        (-need / mu_w - x / mu_n).exp() / mu_n
    })
}

pub fn p11(net: &Network, rule: &QuadratureRule) -> Result<f64> {
    strip(net, Terminal::B, rule)
}

pub fn p12(net: &Network, rule: &QuadratureRule) -> Result<f64> {
    strip(net, Terminal::A, rule)
}

pub fn p13(net: &Network) -> f64 {
    let la = net.link(Terminal::A);
    let lb = net.link(Terminal::B);
    p13_from_thresholds(
        la.phi.max(la.omega),
        lb.phi.max(lb.omega),
        net.mu(Terminal::A),
        net.mu(Terminal::B),
    )
}

/// `P(|h_A|^2 >= m_a, |h_B|^2 >= m_b)` for independent exponential gains.
pub fn p13_from_thresholds(m_a: f64, m_b: f64, mu_a: f64, mu_b: f64) -> f64 {
    (-m_a / mu_a - m_b / mu_b).exp()
}

/// Exponential kernels and rectangle corrections of the P14 closed forms.
struct Kernels {
    ca: f64,
    da: f64,
    cb: f64,
    db: f64,
    mu_a: f64,
    mu_b: f64,
}

impl Kernels {
    fn new(net: &Network) -> Self {
        let la = net.link(Terminal::A);
        let lb = net.link(Terminal::B);
        Kernels {
            ca: la.c_big,
            da: la.d_big,
            cb: lb.c_big,
            db: lb.d_big,
            mu_a: net.mu(Terminal::A),
            mu_b: net.mu(Terminal::B),
        }
    }

    /// Exponent of the y-integrand right of the A-curve, `kappa_A(y)`.
    fn kappa_a(&self, y: f64) -> f64 {
        -self.ca / (self.mu_a * y) + (self.da / self.mu_a - 1.0 / self.mu_b) * y
    }

    /// Exponent of the x-integrand above the B-curve, `kappa_B(x)`.
    fn kappa_b(&self, x: f64) -> f64 {
        -self.cb / (self.mu_b * x) + (self.db / self.mu_b - 1.0 / self.mu_a) * x
    }

    /// `P(x >= x_edge, lo <= y <= hi)`.
    fn eps_a(&self, x_edge: f64, lo: f64, hi: f64) -> f64 {
        (-x_edge / self.mu_a).exp() * ((-lo / self.mu_b).exp() - (-hi / self.mu_b).exp())
    }

    /// `P(y >= y_edge, lo <= x <= hi)`.
    fn eps_b(&self, y_edge: f64, lo: f64, hi: f64) -> f64 {
        (-y_edge / self.mu_b).exp() * ((-lo / self.mu_a).exp() - (-hi / self.mu_a).exp())
    }

    /// `P(xo <= x <= x1, yo <= y <= y1)`.
    fn corner(&self, g: &RegionGeometry) -> f64 {
        ((-g.xo / self.mu_a).exp() - (-g.x1 / self.mu_a).exp())
            * ((-g.yo / self.mu_b).exp() - (-g.y1 / self.mu_b).exp())
    }

    fn along_x(&self, rule: &QuadratureRule, lo: f64, hi: f64) -> Result<f64> {
        Ok(oriented(rule, lo, hi, |x| self.kappa_b(x).exp())? / self.mu_a)
    }

    fn along_y(&self, rule: &QuadratureRule, lo: f64, hi: f64) -> Result<f64> {
        Ok(oriented(rule, lo, hi, |y| self.kappa_a(y).exp())? / self.mu_b)
    }
}

/// P14 before clamping, dispatched on the region shape.
pub fn p14_raw(net: &Network, rule: &QuadratureRule) -> Result<f64> {
    let g = geometry(net);
    let k = Kernels::new(net);
    match (g.case, g.y_delta_ge_q2) {
        (Case::I, _) => Ok(0.0),
        // Only the A-curve bounds the region: integrate along y.
        (Case::II, true) => Ok(k.along_y(rule, g.y_delta, g.y1)? - k.eps_a(g.x1, g.y_delta, g.y1)),
        // Only the B-curve bounds the region: integrate along x.
        (Case::II, false) => Ok(k.along_x(rule, g.x_delta, g.x1)? - k.eps_b(g.y1, g.x_delta, g.x1)),
        // B-curve on [x_delta, xo], A-curve on [xo, x1]. The A-curve piece,
        // taken along y over [y_delta, yo], misses the rectangle
        // [xo, x1] x [yo, y1], which is added back.
        (Case::III, true) => Ok(k.along_x(rule, g.x_delta, g.xo)?
            + k.along_y(rule, g.y_delta, g.yo)?
            - k.eps_b(g.y1, g.x_delta, g.xo)
            - k.eps_a(g.x1, g.y_delta, g.yo)
            + k.corner(&g)),
        // Reachable only through rounding when xo is within an ulp of x1.
        (Case::III, false) => Ok(k.along_x(rule, g.xo, g.x1)? + k.along_y(rule, g.yo, g.y1)?
            - k.eps_b(g.yo, g.xo, g.x1)
            - k.eps_a(g.x1, g.yo, g.y1)),
    }
}

pub fn p14(net: &Network, rule: &QuadratureRule) -> Result<f64> {
    Ok(p14_raw(net, rule)?.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemReport {
    pub p11: f64,
    pub p12: f64,
    pub p13: f64,
    pub p14: f64,
    pub p_success: f64,
    pub p_outage: f64,
    pub capacity: f64,
    pub geometry: RegionGeometry,
    pub quadrature_order: usize,
    /// `p11 + p12 + p13 + p14` before clamping of the pieces or the sum.
    pub p_success_raw: f64,
}

pub fn system_success(net: &Network, rule: &QuadratureRule) -> Result<SystemReport> {
    let raw = [
        p11(net, rule)?,
        p12(net, rule)?,
        p13(net),
        p14_raw(net, rule)?,
    ];
    let clamped = raw.map(|p| p.clamp(0.0, 1.0));
    let p_success = clamped.iter().sum::<f64>().clamp(0.0, 1.0);
    let p_outage = 1.0 - p_success;
    Ok(SystemReport {
        p11: clamped[0],
        p12: clamped[1],
        p13: clamped[2],
        p14: clamped[3],
        p_success,
        p_outage,
        capacity: capacity_from_outage(net.config(), p_outage),
        geometry: geometry(net),
        quadrature_order: rule.order(),
        p_success_raw: raw.iter().sum(),
    })
}

/// System outage for a configuration whose ratios may sit on their endpoints.
pub fn system_outage_with_limits(cfg: &NetworkConfig, rule: &QuadratureRule) -> Result<f64> {
    cfg.validate_physical()?;
    match cfg.forced_system_outage() {
        Some(p) => Ok(p),
        None => Ok(system_success(&Network::new(*cfg)?, rule)?.p_outage),
    }
}

/// Least-squares slope of `-ln p` against `ln x`.
pub fn log_log_slope(xs: &[f64], ps: &[f64]) -> Result<f64> {
    if xs.len() != ps.len() || xs.len() < 3 {
        return Err(Error::InvalidArgument(
            "slope fit needs at least three paired points".into(),
        ));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "abscissae must be strictly increasing".into(),
        ));
    }
    if let Some(p) = ps.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "probability {p} cannot be placed on a log scale"
        )));
    }
    let u: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let v: Vec<f64> = ps.iter().map(|p| -p.ln()).collect();
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let sxy: f64 = u.iter().zip(&v).map(|(a, b)| (a - mu) * (b - mv)).sum();
    let sxx: f64 = u.iter().map(|a| (a - mu) * (a - mu)).sum();
    Ok(sxy / sxx)
}

/// High-SNR slope of the analytic system outage over `rho_grid` (linear).
pub fn diversity_slope(
    cfg_base: &NetworkConfig,
    rho_grid: &[f64],
    rule: &QuadratureRule,
) -> Result<f64> {
    let outages = rho_grid
        .iter()
        .map(|&rho0| {
            let net = Network::new(NetworkConfig { rho0, ..*cfg_base })?;
            Ok(system_success(&net, rule)?.p_outage)
        })
        .collect::<Result<Vec<f64>>>()?;
    if outages.iter().any(|&p| p <= 0.0) {
        return Err(Error::InvalidArgument(
            "system outage underflows to zero on the SNR grid".into(),
        ));
    }
    log_log_slope(rho_grid, &outages)
}
