//! Structural checks shared by the integration tests and the acceptance run.
//! Each check returns a short summary on success and a description of the
//! first counterexample on failure.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twr_outage::oracle::{mc_estimate, sample_gains, Event, McEvent};
use twr_outage::sysout::system_success;
use twr_outage::t2t::{t2t_report, t2t_success};
use twr_outage::{model, Network, NetworkConfig, QuadratureRule, Terminal};

pub type Check = Result<String, String>;

pub const PAIRS: usize = 100_000;

/// Random valid configuration spanning the parameter ranges used by the sweeps.
pub fn random_config(rng: &mut impl Rng) -> NetworkConfig {
    let d_a = rng.gen_range(0.3..1.7);
    NetworkConfig {
        rho0: model::db_to_linear(rng.gen_range(0.0..60.0)),
        eta: rng.gen_range(0.05..=1.0),
        beta: rng.gen_range(0.05..0.45),
        alpha: rng.gen_range(2.0..4.0),
        d_a,
        d_b: 2.0 - d_a,
        mu_a: rng.gen_range(0.5..2.0),
        mu_b: rng.gen_range(0.5..2.0),
        lambda_a: rng.gen_range(0.02..0.98),
        lambda_b: rng.gen_range(0.02..0.98),
        theta_a_sq: rng.gen_range(0.05..0.95),
        rate_u: rng.gen_range(0.25..2.0),
        ..NetworkConfig::default()
    }
}

/// Gain pairs drawn from the configured fading, mixed with a uniform sweep of
/// small gains where the thresholds live.
fn gain_pair(rng: &mut impl Rng, cfg: &NetworkConfig, k: usize) -> (f64, f64) {
    if k.is_multiple_of(2) {
        sample_gains(rng, cfg.mu_a, cfg.mu_b)
    } else {
        (rng.gen_range(1e-6..0.5), rng.gen_range(1e-6..0.5))
    }
}

pub fn probability_bounds() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rules: Vec<QuadratureRule> = [1, 5, 50]
        .iter()
        .map(|&n| QuadratureRule::new(n).unwrap())
        .collect();
    let mut evaluated = 0;
    for _ in 0..200 {
        let cfg = random_config(&mut rng);
        let net = Network::new(cfg).map_err(|e| format!("{cfg:?}: {e}"))?;
        for rule in &rules {
            let s = system_success(&net, rule).map_err(|e| e.to_string())?;
            let mut values = vec![s.p11, s.p12, s.p13, s.p14, s.p_success, s.p_outage];
            for t in [Terminal::A, Terminal::B] {
                let r = t2t_report(&net, t, rule).map_err(|e| e.to_string())?;
                values.extend([r.p_success, r.p_outage]);
            }
            if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(format!("probability {v} outside [0, 1] for {cfg:?}"));
            }
            evaluated += values.len();
        }
    }
    Ok(format!("{evaluated} probabilities in [0, 1]"))
}

pub fn energy_causality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 0..PAIRS {
        let cfg = random_config(&mut rng);
        let (g_a, g_b) = gain_pair(&mut rng, &cfg, k);
        let energy = cfg.harvested_energy(g_a, g_b);
        let power = cfg.relay_power(g_a, g_b);
        if power != energy / cfg.broadcast_duration() {
            return Err(format!(
                "relay power is not harvested energy over broadcast time at {g_a}, {g_b}"
            ));
        }
        let spent = power * cfg.broadcast_duration();
        if (spent - energy).abs() > 2.0 * f64::EPSILON * energy {
            return Err(format!("spent {spent} versus harvested {energy}"));
        }
    }
    Ok(format!("{PAIRS} pairs"))
}

pub fn link_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut skipped = 0;
    let mut cfg = random_config(&mut rng);
    let mut net = Network::new(cfg).map_err(|e| e.to_string())?;
    for k in 0..PAIRS {
        if k % 1000 == 0 {
            cfg = random_config(&mut rng);
            net = Network::new(cfg).map_err(|e| e.to_string())?;
        }
        let (g_a, g_b) = gain_pair(&mut rng, &cfg, k);
        for t in [Terminal::A, Terminal::B] {
            let (g_dst, g_src) = match t {
                Terminal::A => (g_a, g_b),
                Terminal::B => (g_b, g_a),
            };
            let need = net.required_gain(t.other(), g_dst);
            if (g_src - need).abs() <= 1e-9 * need {
                skipped += 1;
                continue;
            }
            if cfg.link_succeeds(g_a, g_b, t) != (g_src >= need) {
                return Err(format!(
                    "link to {} disagrees at ({g_a}, {g_b}) for {cfg:?}",
                    t.label()
                ));
            }
        }
    }
    Ok(format!("{PAIRS} pairs, {skipped} boundary ties skipped"))
}

pub fn region_partition() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut cfg = random_config(&mut rng);
    let mut net = Network::new(cfg).map_err(|e| e.to_string())?;
    let mut inside = 0usize;
    let mut skipped = 0usize;
    for k in 0..PAIRS {
        if k % 1000 == 0 {
            cfg = random_config(&mut rng);
            net = Network::new(cfg).map_err(|e| e.to_string())?;
        }
        let (g_a, g_b) = gain_pair(&mut rng, &cfg, k);
        let near = |g: f64, edge: f64| (g - edge).abs() <= 1e-9 * edge.max(1e-300);
        let edges = [
            near(g_a, net.psi(Terminal::A, g_b)),
            near(g_b, net.psi(Terminal::B, g_a)),
            near(g_a, net.link(Terminal::A).phi),
            near(g_b, net.link(Terminal::B).phi),
            near(g_a, net.link(Terminal::A).omega),
            near(g_b, net.link(Terminal::B).omega),
        ];
        if edges.iter().any(|&e| e) {
            skipped += 1;
            continue;
        }
        let hits = Event::PIECES
            .iter()
            .filter(|e| e.contains(&net, g_a, g_b))
            .count();
        let full = Event::Full.contains(&net, g_a, g_b);
        if hits > 1 || (hits == 1) != full {
            return Err(format!(
                "({g_a}, {g_b}) lies in {hits} pieces, full event {full}, for {cfg:?}"
            ));
        }
        inside += hits;
    }
    Ok(format!(
        "{PAIRS} pairs, {inside} in the success region, {skipped} boundary ties skipped"
    ))
}

pub fn symmetric_equality() -> Check {
    let rule = QuadratureRule::default();
    for (rho_db, lambda) in [(10.0, 0.3), (20.0, 0.5), (30.0, 0.8)] {
        let cfg = NetworkConfig {
            rho0: model::db_to_linear(rho_db),
            d_a: 1.0,
            d_b: 1.0,
            ..NetworkConfig::default()
        }
        .with_lambdas(lambda, lambda);
        let net = Network::new(cfg).map_err(|e| e.to_string())?;
        if net.link(Terminal::A) != net.link(Terminal::B) {
            return Err(format!("link constants differ at {rho_db} dB"));
        }
        let a = t2t_success(&net, Terminal::A, &rule).map_err(|e| e.to_string())?;
        let b = t2t_success(&net, Terminal::B, &rule).map_err(|e| e.to_string())?;
        let s = system_success(&net, &rule).map_err(|e| e.to_string())?;
        if a != b || s.p11 != s.p12 {
            return Err(format!(
                "A/B values differ at {rho_db} dB: {a} {b} {} {}",
                s.p11, s.p12
            ));
        }
    }
    Ok("3 symmetric configurations".into())
}

pub fn mc_determinism() -> Check {
    let cfg = NetworkConfig::default();
    let run =
        |seed| mc_estimate(&cfg, McEvent::System, 200_000, seed, None).map_err(|e| e.to_string());
    let (a, b, c) = (run(7)?, run(7)?, run(8)?);
    if a != b {
        return Err("same seed gave different estimates".into());
    }
    if a.p_hat == c.p_hat {
        return Err("different seeds gave identical estimates".into());
    }
    Ok(format!("seed 7 twice: {}", a.p_hat))
}

pub fn worker_independence() -> Check {
    let cfg = NetworkConfig::default();
    let mut seen = Vec::new();
    for workers in [1, 2, 3, 8] {
        let m = mc_estimate(&cfg, McEvent::T2T(Terminal::B), 300_000, 5, Some(workers))
            .map_err(|e| e.to_string())?;
        seen.push(m);
    }
    if seen.windows(2).any(|w| w[0] != w[1]) {
        return Err(format!(
            "estimates differ across worker counts: {:?}",
            seen.iter().map(|m| m.p_hat).collect::<Vec<_>>()
        ));
    }
    Ok("1, 2, 3 and 8 workers agree".into())
}

pub type NamedCheck = (&'static str, fn() -> Check);

pub const ALL: [NamedCheck; 7] = [
    ("probability bounds", probability_bounds),
    ("energy causality", energy_causality),
    ("link threshold equivalence", link_equivalence),
    ("region partition", region_partition),
    ("symmetric A/B equality", symmetric_equality),
    ("MC determinism", mc_determinism),
    ("worker-count independence", worker_independence),
];
